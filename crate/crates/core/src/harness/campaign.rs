//! Randomized verification campaigns.
//!
//! Trial `i` of check `c` draws everything from a ChaCha8 stream seeded with
//! `mix(master_seed, i, c.tag())` (see [`crate::seed`]), so a record depends
//! only on the configuration and its own coordinates, never on scheduling.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{
    gaussian_matrix, gen_functional_density, gen_hamiltonian, gen_insertions, log_uniform, normalize_spread,
    random_positive, HamiltonianKind, MAX_DIM,
};
use crate::error::{Error, Result};
use crate::holder_verify::{araki_bound_check, finite_trace_holder_check, holder_check, InsertionTuple, SplitSpec};
use crate::nclp::{chain_identity_check, lemma41_check, lemma42_check, lp_holder_contraction_check, OptConfig};
use crate::record::{VerificationRecord, MARGIN_FLOOR};
use crate::seed::{mix, rng_from_seed};
use crate::spectral::ComplexMatrix;
use crate::standard_form::{EnsembleSpec, GibbsEnsemble, StateFunctional};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Holder,
    Araki,
    Kms,
    Tomita,
    Lemma41,
    Lemma42,
    Lp,
    TraceHolder,
    Chain,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        CheckKind::Holder,
        CheckKind::Araki,
        CheckKind::Kms,
        CheckKind::Tomita,
        CheckKind::Lemma41,
        CheckKind::Lemma42,
        CheckKind::Lp,
        CheckKind::TraceHolder,
        CheckKind::Chain,
    ];

    /// Name used in records, summaries and seed derivation.
    pub fn tag(self) -> &'static str {
        match self {
            CheckKind::Holder => "holder",
            CheckKind::Araki => "araki",
            CheckKind::Kms => "kms",
            CheckKind::Tomita => "tomita",
            CheckKind::Lemma41 => "lemma41",
            CheckKind::Lemma42 => "lemma42",
            CheckKind::Lp => "lp",
            CheckKind::TraceHolder => "trace_holder",
            CheckKind::Chain => "chain",
        }
    }

    /// Accepts the tag or its dashed spelling (`trace-holder`).
    pub fn parse(name: &str) -> Option<Self> {
        let name = name.replace('-', "_");
        Self::ALL.into_iter().find(|c| c.tag() == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    /// Replaces the relative inequality slack when judging every record.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ineq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub dims: Vec<usize>,
    pub beta_range: [f64; 2],
    pub n_range: [usize; 2],
    pub trials: usize,
    pub master_seed: u64,
    pub re_floor: f64,
    /// Imaginary parts are drawn from `[−im_range, im_range]`.
    pub im_range: f64,
    pub hamiltonian: HamiltonianKind,
    /// Transverse field of the Ising chain.
    pub ising_field: f64,
    /// Rescale every Hamiltonian to spectrum `[0, 1]` before forming `e^{−βH}`.
    pub normalize_hamiltonian: bool,
    /// Positive operators get condition numbers log-uniform in `[1, conditioning_max]`.
    pub conditioning_max: f64,
    pub checks: Vec<CheckKind>,
    pub workers: usize,
    pub tolerances: ToleranceOverrides,
    pub opt: OptConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            dims: vec![2, 3, 4],
            beta_range: [0.1, 10.0],
            n_range: [1, 4],
            trials: 100,
            master_seed: 0,
            re_floor: 0.05,
            im_range: 5.0,
            hamiltonian: HamiltonianKind::Gue,
            ising_field: 1.0,
            normalize_hamiltonian: true,
            conditioning_max: 1e3,
            checks: vec![CheckKind::Holder],
            workers: 1,
            tolerances: ToleranceOverrides::default(),
            opt: OptConfig::default(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=MAX_DIM).contains(&d)) {
            return bad(format!("dims must be nonempty and within 2..={MAX_DIM}"));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| self.hamiltonian.size_for_dim(d).is_none()) {
            return bad(format!("dimension {d} is not available for {:?}", self.hamiltonian));
        }
        let [blo, bhi] = self.beta_range;
        if !(blo > 0.0 && blo <= bhi && bhi.is_finite()) {
            return bad(format!("beta_range {:?} must satisfy 0 < lo ≤ hi", self.beta_range));
        }
        let [nlo, nhi] = self.n_range;
        if !(1 <= nlo && nlo <= nhi) {
            return bad(format!("n_range {:?} must satisfy 1 ≤ lo ≤ hi", self.n_range));
        }
        if !(self.re_floor > 0.0) || self.re_floor * (nhi + 1) as f64 >= 1.0 {
            return bad(format!("re_floor {} must be positive with re_floor·(n+1) < 1", self.re_floor));
        }
        if !(self.im_range >= 0.0) || !self.im_range.is_finite() {
            return bad("im_range must be a nonnegative number".into());
        }
        if !(self.conditioning_max >= 1.0) || !self.conditioning_max.is_finite() {
            return bad("conditioning_max must be ≥ 1".into());
        }
        if self.checks.is_empty() {
            return bad("at least one check must be enabled".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if let Some(t) = self.tolerances.ineq {
            if !(t >= 0.0) {
                return bad("tolerance override must be nonnegative".into());
            }
        }
        self.opt.validate()
    }

    fn enabled_checks(&self) -> Vec<CheckKind> {
        let mut seen = Vec::new();
        for &c in &self.checks {
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        seen
    }
}

/// Everything needed to re-evaluate one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub check: CheckKind,
    pub trial: usize,
    pub seed: u64,
    pub ensemble: EnsembleSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<ComplexMatrix>,
    /// Densities of auxiliary functionals (`φ_j` or `ν_j`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functionals: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

const CHAIN_EXPONENTS: [&[u32]; 5] = [&[2], &[4, 4], &[8, 8, 8, 8], &[4, 8, 8], &[6, 6, 6]];
const LP_EXPONENTS: [[f64; 3]; 3] = [[4.0, 4.0, 2.0], [8.0, 8.0, 4.0], [4.0, 8.0, 8.0 / 3.0]];
const EVEN_P: [u32; 3] = [2, 4, 8];

fn pick<T: Copy>(items: &[T], rng: &mut ChaCha8Rng) -> T {
    items[rng.random_range(0..items.len())]
}

/// Draws the instance for trial `trial` of `check`.
pub fn gen_instance(cfg: &CampaignConfig, check: CheckKind, trial: usize) -> Result<Instance> {
    let seed = mix(cfg.master_seed, trial as u64, check.tag());
    let mut rng = rng_from_seed(seed);
    let d = pick(&cfg.dims, &mut rng);
    let size = cfg.hamiltonian.size_for_dim(d).ok_or_else(|| Error::Config(format!("dimension {d}")))?;
    let mut h = gen_hamiltonian(cfg.hamiltonian, size, rng.random(), cfg.ising_field)?;
    if cfg.normalize_hamiltonian {
        h = normalize_spread(&h)?;
    }
    let beta = log_uniform(cfg.beta_range[0], cfg.beta_range[1], &mut rng);
    let ensemble = EnsembleSpec {
        dim: d,
        beta,
        hamiltonian: h.row_major().iter().map(|z| [z.re, z.im]).collect(),
        seed: Some(seed),
    };
    let mut inst = Instance {
        check,
        trial,
        seed,
        ensemble,
        operators: Vec::new(),
        functionals: Vec::new(),
        z: Vec::new(),
        split: None,
        exponents: Vec::new(),
        t: None,
    };
    let cond_max = cfg.conditioning_max;
    let positive = |rng: &mut ChaCha8Rng| {
        let cond = log_uniform(1.0, cond_max, rng);
        random_positive(d, cond, rng)
    };
    let n = rng.random_range(cfg.n_range[0]..=cfg.n_range[1]);
    match check {
        CheckKind::Holder => {
            let z = gen_insertions(n, 1.0, cfg.re_floor, cfg.im_range, rng.random())?;
            inst.operators = (0..=n).map(|_| positive(&mut rng)).collect();
            inst.z = z.values().to_vec();
        }
        CheckKind::Araki => {
            let z = gen_insertions(n, 1.0, cfg.re_floor, cfg.im_range, rng.random())?;
            inst.operators = (0..=n).map(|_| gaussian_matrix(d, &mut rng)).collect();
            inst.functionals = (0..n)
                .map(|_| {
                    let rank = if rng.random::<f64>() < 0.25 { rng.random_range(1..=d) } else { d };
                    let trace = log_uniform(0.1, 10.0, &mut rng);
                    gen_functional_density(d, rank, trace, &mut rng)
                })
                .collect();
            let frac = rng.random::<f64>();
            let share = rng.random::<f64>();
            inst.split = Some(SplitSpec::choose(&z, frac, share)?);
            inst.z = z.values().to_vec();
        }
        CheckKind::Kms => {
            inst.operators = vec![gaussian_matrix(d, &mut rng), gaussian_matrix(d, &mut rng)];
            inst.t = Some(cfg.im_range * (2.0 * rng.random::<f64>() - 1.0));
        }
        CheckKind::Tomita => {
            inst.operators = (0..3).map(|_| gaussian_matrix(d, &mut rng)).collect();
        }
        CheckKind::Lemma41 | CheckKind::Lemma42 => {
            inst.operators = vec![positive(&mut rng)];
            inst.exponents = vec![pick(&EVEN_P, &mut rng) as f64];
        }
        CheckKind::Chain => {
            let ps = pick(&CHAIN_EXPONENTS, &mut rng);
            inst.operators = ps.iter().map(|_| positive(&mut rng)).collect();
            inst.exponents = ps.iter().map(|&p| p as f64).collect();
        }
        CheckKind::Lp => {
            inst.operators = vec![gaussian_matrix(d, &mut rng), positive(&mut rng), positive(&mut rng)];
            inst.exponents = pick(&LP_EXPONENTS, &mut rng).to_vec();
        }
        CheckKind::TraceHolder => {
            inst.functionals = (0..2)
                .map(|_| {
                    let trace = log_uniform(0.1, 10.0, &mut rng);
                    gen_functional_density(d, d, trace, &mut rng)
                })
                .collect();
            inst.operators = (0..3).map(|_| gaussian_matrix(d, &mut rng)).collect();
            inst.exponents = vec![log_uniform(1.0, 8.0, &mut rng)];
        }
    }
    Ok(inst)
}

/// Runs the check described by `inst`. The ensemble density doubles as the
/// reference state of the trace inequalities.
pub fn evaluate(inst: &Instance, opt: &OptConfig) -> Result<VerificationRecord> {
    let ens = GibbsEnsemble::from_spec(&inst.ensemble)?;
    let ops = &inst.operators;
    let opt = OptConfig { seed: inst.seed, ..opt.clone() };
    let as_u32 = |p: &f64| *p as u32;
    match inst.check {
        CheckKind::Holder => holder_check(&ens, ops, &InsertionTuple::new(inst.z.clone())?),
        CheckKind::Araki => {
            let phis = inst.functionals.iter().cloned().map(StateFunctional::new).collect::<Result<Vec<_>>>()?;
            let split = inst.split.ok_or_else(|| Error::InvalidSplit("instance without split".into()))?;
            araki_bound_check(&ens, ops, &phis, &InsertionTuple::new(inst.z.clone())?, &split)
        }
        CheckKind::Kms => ens.kms_boundary_check(&ops[0], &ops[1], inst.t.unwrap_or(0.0)),
        CheckKind::Tomita => ens.tomita_check(ops),
        CheckKind::Lemma41 => lemma41_check(&ens, &ops[0], as_u32(&inst.exponents[0])),
        CheckKind::Lemma42 => lemma42_check(&ens, &ops[0], as_u32(&inst.exponents[0]), &opt),
        CheckKind::Chain => {
            let ps: Vec<u32> = inst.exponents.iter().map(as_u32).collect();
            chain_identity_check(&ens, ops, &ps)
        }
        CheckKind::Lp => {
            let e = &inst.exponents;
            lp_holder_contraction_check(&ens, &ops[0], &ops[1..], [e[0], e[1], e[2]], &opt)
        }
        CheckKind::TraceHolder => {
            let mut r = finite_trace_holder_check(&inst.functionals, ens.rho(), ops, inst.exponents[0])?;
            let mut meta = ens.meta();
            meta.p = r.meta.p.clone();
            r.meta = meta;
            Ok(r)
        }
    }
}

/// Re-judges `r` and its parts with relative slack `tol`.
fn rejudge(r: &mut VerificationRecord, tol: f64) {
    if r.parts.is_empty() {
        if r.meta.error.is_none() {
            r.pass = r.margin.is_finite() && r.margin >= -tol * r.rhs.max(MARGIN_FLOOR);
        }
    } else {
        for p in &mut r.parts {
            rejudge(p, tol);
        }
        r.pass = r.parts.iter().all(|p| p.pass);
    }
}

fn run_one(cfg: &CampaignConfig, check: CheckKind, trial: usize) -> (VerificationRecord, Duration) {
    let start = Instant::now();
    let inst = gen_instance(cfg, check, trial);
    let mut record = match &inst {
        Ok(i) => evaluate(i, &cfg.opt).unwrap_or_else(|e| VerificationRecord::errored(check.tag(), e.to_string())),
        Err(e) => VerificationRecord::errored(check.tag(), e.to_string()),
    };
    let seed = mix(cfg.master_seed, trial as u64, check.tag());
    record.meta.seed = Some(seed);
    record.meta.extra.insert("trial".into(), trial as f64);
    if let Some(tol) = cfg.tolerances.ineq {
        rejudge(&mut record, tol);
    }
    if !record.pass {
        if let Ok(i) = &inst {
            record.meta.instance = serde_json::to_value(i).ok();
        }
    }
    (record, start.elapsed())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub count: usize,
    pub passes: usize,
    pub worst_rel_margin: f64,
    /// Wall-clock seconds; excluded from determinism comparisons.
    pub runtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub config: CampaignConfig,
    pub records: Vec<VerificationRecord>,
    pub summary: BTreeMap<String, CheckSummary>,
}

/// Per-check counts and worst margins of `records`, with zero runtimes.
pub fn summarize(records: &[VerificationRecord]) -> BTreeMap<String, CheckSummary> {
    let mut out: BTreeMap<String, CheckSummary> = BTreeMap::new();
    for r in records {
        let s = out.entry(r.check.clone()).or_insert(CheckSummary {
            count: 0,
            passes: 0,
            worst_rel_margin: f64::INFINITY,
            runtime: 0.0,
        });
        s.count += 1;
        s.passes += r.pass as usize;
        s.worst_rel_margin = s.worst_rel_margin.min(r.rel_margin);
    }
    out
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// True when recomputing the summary from the records reproduces every
    /// count and worst margin.
    pub fn summary_consistent(&self) -> bool {
        let fresh = summarize(&self.records);
        fresh.len() == self.summary.len()
            && fresh.iter().all(|(k, f)| {
                self.summary.get(k).is_some_and(|s| {
                    s.count == f.count && s.passes == f.passes && s.worst_rel_margin == f.worst_rel_margin
                })
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Runs every enabled check on every trial. Records are ordered by trial,
/// then by check order in the configuration, independent of `workers`.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Report> {
    cfg.validate()?;
    let checks = cfg.enabled_checks();
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| Error::Config(e.to_string()))?;
    let per_trial: Vec<Vec<(VerificationRecord, Duration)>> = pool.install(|| {
        (0..cfg.trials).into_par_iter().map(|i| checks.iter().map(|&c| run_one(cfg, c, i)).collect()).collect()
    });
    let mut records = Vec::with_capacity(cfg.trials * checks.len());
    let mut runtime: BTreeMap<String, f64> = BTreeMap::new();
    for (r, t) in per_trial.into_iter().flatten() {
        *runtime.entry(r.check.clone()).or_default() += t.as_secs_f64();
        records.push(r);
    }
    let mut summary = summarize(&records);
    for (k, s) in summary.iter_mut() {
        s.runtime = runtime.get(k).copied().unwrap_or(0.0);
    }
    Ok(Report { schema_version: SCHEMA_VERSION.to_string(), config: cfg.clone(), records, summary })
}
