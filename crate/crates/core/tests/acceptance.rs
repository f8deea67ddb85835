//! Acceptance criteria, one line per criterion. Runs as a plain binary so the
//! verdict lines always reach stdout; exits nonzero if any criterion fails.

use std::time::Instant;

use mh_core::harness::generators::{gen_hamiltonian, log_uniform, normalize_spread, random_positive};
use mh_core::harness::{gen_instance, run_campaign, CampaignConfig, CheckKind, HamiltonianKind, Report};
use mh_core::holder_verify::{holder_check, InsertionTuple};
use mh_core::nclp::{
    am_norm, cone_vector, kms_norm, kms_norm_analytic, kms_norm_unchecked, lemma42_check, opt_tol,
    phi_from_cone_vector, OptConfig,
};
use mh_core::seed::{mix, rng_from_seed};
use mh_core::{ComplexMatrix, GibbsEnsemble};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn random_ensemble(rng: &mut ChaCha8Rng, dims: std::ops::RangeInclusive<usize>) -> GibbsEnsemble {
    let d = rng.random_range(dims);
    let h = normalize_spread(&gen_hamiltonian(HamiltonianKind::Gue, d, rng.random(), 1.0).unwrap()).unwrap();
    let beta = log_uniform(0.1, 10.0, rng);
    GibbsEnsemble::new(h, beta).unwrap()
}

fn campaign(checks: Vec<CheckKind>, dims: Vec<usize>, n_max: usize, trials: usize, seed: u64) -> Report {
    let cfg =
        CampaignConfig { dims, n_range: [1, n_max], trials, master_seed: seed, checks, ..CampaignConfig::default() };
    run_campaign(&cfg).expect("valid campaign configuration")
}

fn summarize_campaign(report: &Report, floor: f64) -> Verdict {
    let worst = report.records.iter().map(|r| r.rel_margin).fold(f64::INFINITY, f64::min);
    let failures = report.records.iter().filter(|r| !r.pass).count();
    let first_failure = report
        .failures()
        .next()
        .map(|r| format!(", first failure: {}", serde_json::to_string(r).unwrap()))
        .unwrap_or_default();
    Verdict {
        pass: failures == 0 && worst >= floor && report.summary_consistent(),
        detail: format!(
            "{} records, {failures} failing, worst rel_margin {worst:.3e}{first_failure}",
            report.records.len()
        ),
    }
}

fn dims(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).collect()
}

fn criterion_1() -> Verdict {
    let r = campaign(vec![CheckKind::Holder], dims(2, 8), 4, 10_000, 1);
    let mut v = summarize_campaign(&r, -1e-9);
    // ΣRe z_j + 1/(2p_0) + 1/(2p_n) above 1 is where the stated exponent rule
    // leaves the factorization used in the proof without room
    let budget = |x: &mh_core::VerificationRecord| x.meta.extra.get("proof_budget").copied().unwrap_or(f64::NAN);
    let over = r.records.iter().filter(|x| budget(x) > 1.0 + 1e-12).count();
    let fail_over = r.failures().filter(|x| budget(x) > 1.0 + 1e-12).count();
    let fail_within = r.failures().filter(|x| budget(x) <= 1.0 + 1e-12).count();
    let fail_other = r.failures().filter(|x| budget(x).is_nan()).count();
    v.detail = format!(
        "failures with proof budget > 1: {fail_over} of {over} such instances; with budget ≤ 1: {fail_within} of {}; errored: {fail_other}; {}",
        r.records.len() - over,
        v.detail
    );
    v
}

fn criterion_2() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..100u64 {
        let mut rng = rng_from_seed(mix(2, i, "saturation"));
        let ens = random_ensemble(&mut rng, 2..=6);
        let cond = log_uniform(1.0, 1e3, &mut rng);
        let a = random_positive(ens.dim(), cond, &mut rng);
        let z = InsertionTuple::new(vec![Complex64::new(0.5, 0.0)]).unwrap();
        match holder_check(&ens, &[a.clone(), a], &z) {
            Ok(r) => worst = worst.max((r.lhs.norm() - r.rhs).abs() / r.rhs),
            Err(_) => errors += 1,
        }
    }
    Verdict {
        pass: errors == 0 && worst <= 1e-10,
        detail: format!("100 instances, max |lhs−rhs|/rhs {worst:.3e}, {errors} errors"),
    }
}

fn criterion_3() -> Verdict {
    summarize_campaign(&campaign(vec![CheckKind::Araki], dims(2, 6), 3, 1000, 3), -1e-9)
}

fn criterion_4() -> Verdict {
    summarize_campaign(&campaign(vec![CheckKind::Kms], dims(2, 8), 4, 1000, 4), f64::NEG_INFINITY)
}

fn criterion_5() -> Verdict {
    summarize_campaign(&campaign(vec![CheckKind::Tomita], dims(2, 8), 4, 1000, 5), f64::NEG_INFINITY)
}

fn criterion_6() -> Verdict {
    let l41 = campaign(vec![CheckKind::Lemma41], dims(2, 6), 4, 100, 6);
    let chain = campaign(vec![CheckKind::Chain], dims(2, 6), 4, 100, 7);
    let roundtrip_worst =
        l41.records.iter().map(|r| r.part("lemma41.roundtrip").map_or(f64::INFINITY, |p| p.lhs.re)).fold(0.0, f64::max);
    let cone_worst = l41
        .records
        .iter()
        .map(|r| r.part("lemma41.cone_identity").map_or(f64::INFINITY, |p| p.lhs.re))
        .fold(0.0, f64::max);
    let chain_pass = chain.all_pass();
    let chain_worst = chain.records.iter().map(|r| r.lhs.re / r.rhs * 1e-9).fold(0.0, f64::max);

    let opt = OptConfig { restarts: 8, ..OptConfig::default() };
    let mut ab_worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..100u64 {
        let mut rng = rng_from_seed(mix(8, i, "lemma42"));
        let ens = random_ensemble(&mut rng, 2..=5);
        let a = random_positive(ens.dim(), log_uniform(1.0, 1e3, &mut rng), &mut rng);
        let p = [2, 4, 8][rng.random_range(0..3)];
        match lemma42_check(&ens, &a, p, &opt) {
            Ok(r) => {
                let x = r.meta.extra["phi_root"];
                let y = r.meta.extra["correlation_root"];
                ab_worst = ab_worst.max((x - y).abs() / x);
            }
            Err(_) => errors += 1,
        }
    }
    Verdict {
        pass: l41.all_pass()
            && roundtrip_worst <= 1e-9
            && cone_worst <= 1e-9
            && chain_pass
            && ab_worst <= 1e-9
            && errors == 0,
        detail: format!(
            "round trip {roundtrip_worst:.2e}, cone identity {cone_worst:.2e}, chain residual {chain_worst:.2e} \
             (all pass: {chain_pass}), (a)=(b) rel {ab_worst:.2e}, {errors} errors"
        ),
    }
}

fn criterion_7() -> Verdict {
    let cfg = OptConfig::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for (group, range, per_p) in [("d≤3", 2..=3usize, 15u64), ("4≤d≤6", 4..=6usize, 10u64)] {
        for p in [2u32, 4, 8] {
            let mut worst: f64 = 0.0;
            let mut over_norm: f64 = f64::NEG_INFINITY;
            let mut tol = 0.0;
            for i in 0..per_p {
                let mut rng = rng_from_seed(mix(9, i + 1000 * p as u64, group));
                let ens = random_ensemble(&mut rng, range.clone());
                let a = random_positive(ens.dim(), log_uniform(1.0, 1e3, &mut rng), &mut rng);
                let want = phi_from_cone_vector(&ens, &a, p).unwrap().value_on_identity().powf(1.0 / p as f64);
                let zeta = cone_vector(&ens, &a, p as f64).unwrap();
                let est = am_norm(&ens, &zeta, p as f64, &OptConfig { seed: i, ..cfg.clone() }).unwrap();
                worst = worst.max((est.value - want).abs() / want);
                over_norm = over_norm.max(est.value - a.operator_norm());
                tol = if p == 2 { 1e-10 } else { opt_tol(ens.dim()) };
                ok &= (est.value - want).abs() <= tol * want && est.value <= a.operator_norm() + 1e-9;
            }
            lines.push(format!("{group} p={p}: rel err {worst:.2e} (tol {tol:.0e}), max(est−‖A‖) {over_norm:.2e}"));
        }
    }
    Verdict { pass: ok, detail: lines.join("; ") }
}

fn criterion_8() -> Verdict {
    let r = campaign(vec![CheckKind::Lp], dims(2, 4), 4, 100, 10);
    let mut v = summarize_campaign(&r, -1e-9);
    let per_part = |name: &str| r.records.iter().filter(|x| x.part(name).is_some_and(|p| p.pass)).count();
    v.detail = format!(
        "contraction {} / 100, vector Hölder {} / 100; {}",
        per_part("lp.contraction"),
        per_part("lp.holder"),
        v.detail
    );
    v
}

fn criterion_9() -> Verdict {
    let mut v = summarize_campaign(&campaign(vec![CheckKind::TraceHolder], dims(2, 6), 4, 1000, 11), -1e-9);
    let ens = GibbsEnsemble::new(ComplexMatrix::from_real_diagonal(&[0.0, 2f64.ln()]), 1.0).unwrap();
    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    let want = (2.0 * 2f64.sqrt() / 3.0).sqrt();
    // exact 2×2 arithmetic: ρ^{1/4}σ_xρ^{1/4} has off-diagonal (ρ₁ρ₂)^{1/4},
    // so Tr((ρ^{1/4}σ_xρ^{1/4})²) = 2(ρ₁ρ₂)^{1/2} = 2√2/3
    let closed = (2.0 * (2.0f64 / 9.0).sqrt()).sqrt();
    let chain = kms_norm_unchecked(&ens, &sx, 2).unwrap();
    let ok = (chain - want).abs() <= 1e-12 && (closed - want).abs() <= 1e-15 && kms_norm(&ens, &sx, 2).is_err();
    v.pass &= ok;
    v.detail = format!("{}; σ_x chain {chain:.15} vs (2√2/3)^(1/2) {want:.15}", v.detail);
    v
}

fn criterion_10() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..1000u64 {
        let mut rng = rng_from_seed(mix(12, i, "cross"));
        let ens = random_ensemble(&mut rng, 2..=8);
        let a = random_positive(ens.dim(), log_uniform(1.0, 1e3, &mut rng), &mut rng);
        let p = rng.random_range(1..=8u32);
        match (kms_norm(&ens, &a, p), kms_norm_analytic(&ens, &a, p)) {
            (Ok(x), Ok(y)) => worst = worst.max((x - y).abs() / x),
            _ => errors += 1,
        }
    }
    Verdict {
        pass: errors == 0 && worst <= 1e-9,
        detail: format!("1000 instances, max rel diff {worst:.3e}, {errors} errors"),
    }
}

fn criterion_11() -> Verdict {
    let cfg = CampaignConfig {
        dims: dims(2, 4),
        trials: 6,
        master_seed: 13,
        checks: CheckKind::ALL.to_vec(),
        opt: OptConfig { restarts: 8, ..OptConfig::default() },
        ..CampaignConfig::default()
    };
    let a = run_campaign(&cfg).unwrap();
    let b = run_campaign(&CampaignConfig { workers: 2, ..cfg.clone() }).unwrap();
    let pass_a: Vec<bool> = a.records.iter().map(|r| r.pass).collect();
    let pass_b: Vec<bool> = b.records.iter().map(|r| r.pass).collect();
    let streams_equal = CheckKind::ALL
        .iter()
        .all(|&c| (0..cfg.trials).all(|i| gen_instance(&cfg, c, i).unwrap() == gen_instance(&cfg, c, i).unwrap()));
    let records_equal = a.records == b.records;
    Verdict {
        pass: pass_a == pass_b && streams_equal && records_equal,
        detail: format!(
            "{} records; pass vectors equal: {}, instance streams equal: {streams_equal}, records equal: {records_equal}",
            a.records.len(),
            pass_a == pass_b
        ),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored
    let criteria: [Criterion; 11] = [
        ("multi-insertion Hölder inequality", criterion_1),
        ("saturation at z = 1/2", criterion_2),
        ("Araki two-sided bound", criterion_3),
        ("KMS boundary condition", criterion_4),
        ("modular identities", criterion_5),
        ("cone functional, chain identity, three-way norm equality", criterion_6),
        ("Araki–Masuda norm estimates", criterion_7),
        ("vector Hölder and contraction", criterion_8),
        ("finite trace inequalities", criterion_9),
        ("chain vs imaginary-time presentation", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{name}]: {status} ({:.1}s) {}", k + 1, start.elapsed().as_secs_f64(), v.detail);
        failed += !v.pass as usize;
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
