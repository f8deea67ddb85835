use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mh_core::harness::{run_campaign, CampaignConfig, CheckKind, Report};
use mh_core::spectral::MatrixFile;
use mh_core::{kms_norm, ComplexMatrix, GibbsEnsemble, VerificationRecord};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "mh", version, about = "Numerical checks of modular Hölder inequalities for Gibbs states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one check (or all) on randomly generated instances.
    Verify {
        /// holder, araki, kms, tomita, lemma41, lemma42, lp, trace-holder, chain or all
        check: String,
        /// Hilbert space dimension; default draws from 2, 3, 4.
        #[arg(long)]
        dim: Option<usize>,
        /// Fixed inverse temperature; default is log-uniform in [0.1, 10].
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed number of insertions; default draws from 1..=4.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        re_floor: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write one CSV row per record here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// KMS p-norm of a positive matrix read from a JSON matrix file.
    Norm {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        matrix: PathBuf,
        /// Hamiltonian matrix file; default is H = 0, i.e. the tracial state.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Run a campaign described by a JSON configuration file.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("mh: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    ComplexMatrix::try_from(file).map_err(|e| format!("{}: {e}", path.display()))
}

fn verify_config(
    check: &str,
    dim: Option<usize>,
    beta: Option<f64>,
    trials: usize,
    seed: u64,
    n: Option<usize>,
    re_floor: Option<f64>,
) -> Result<CampaignConfig, String> {
    let checks = if check == "all" {
        CheckKind::ALL.to_vec()
    } else {
        vec![CheckKind::parse(check).ok_or_else(|| format!("unknown check '{check}'"))?]
    };
    let mut cfg = CampaignConfig { checks, trials, master_seed: seed, ..CampaignConfig::default() };
    if let Some(d) = dim {
        cfg.dims = vec![d];
    }
    if let Some(b) = beta {
        cfg.beta_range = [b, b];
    }
    if let Some(k) = n {
        cfg.n_range = [k, k];
    }
    if let Some(f) = re_floor {
        cfg.re_floor = f;
    }
    Ok(cfg)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn write_csv(path: &Path, records: &[VerificationRecord]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = [
        "check",
        "pass",
        "lhs_re",
        "lhs_im",
        "rhs",
        "margin",
        "rel_margin",
        "dim",
        "beta",
        "n",
        "p",
        "z",
        "seed",
        "ensemble_hash",
        "extra",
        "error",
    ];
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in records {
        let m = &r.meta;
        let opt = |x: Option<String>| x.unwrap_or_default();
        let row = [
            r.check.clone(),
            r.pass.to_string(),
            r.lhs.re.to_string(),
            r.lhs.im.to_string(),
            r.rhs.to_string(),
            r.margin.to_string(),
            r.rel_margin.to_string(),
            opt(m.dim.map(|d| d.to_string())),
            opt(m.beta.map(|b| b.to_string())),
            opt(m.n.map(|n| n.to_string())),
            join(&m.p),
            join(m.z.iter().map(|[re, im]| format!("{re}{im:+}i"))),
            opt(m.seed.map(|s| s.to_string())),
            opt(m.ensemble_hash.clone()),
            join(m.extra.iter().map(|(k, v)| format!("{k}={v}"))),
            opt(m.error.clone()),
        ];
        w.write_record(&row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn finish(report: &Report, json: Option<&Path>, csv: Option<&Path>) -> ExitCode {
    for (check, s) in &report.summary {
        println!(
            "{check:<16} {:>6} / {:<6} pass   worst rel_margin {:+.3e}   {:.2}s",
            s.passes, s.count, s.worst_rel_margin, s.runtime
        );
    }
    if let Some(path) = json {
        if let Err(e) = fs::write(path, report.to_json()) {
            return config_error(format!("{}: {e}", path.display()));
        }
    }
    if let Some(path) = csv {
        if let Err(e) = write_csv(path, &report.records) {
            return config_error(e);
        }
    }
    let failures = report.failures().count();
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} failing record(s)");
        ExitCode::from(EXIT_FAIL)
    }
}

fn campaign(cfg: &CampaignConfig, json: Option<&Path>, csv: Option<&Path>) -> ExitCode {
    match run_campaign(cfg) {
        Ok(report) => finish(&report, json, csv),
        Err(e) => config_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { check, dim, beta, trials, seed, n, re_floor, report, csv } => {
            match verify_config(&check, dim, beta, trials, seed, n, re_floor) {
                Ok(cfg) => campaign(&cfg, report.as_deref(), csv.as_deref()),
                Err(e) => config_error(e),
            }
        }
        Command::Campaign { config, report, csv } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return config_error(format!("{}: {e}", config.display())),
            };
            match serde_json::from_str::<CampaignConfig>(&text) {
                Ok(cfg) => campaign(&cfg, report.as_deref(), csv.as_deref()),
                Err(e) => config_error(format!("{}: {e}", config.display())),
            }
        }
        Command::Norm { p, matrix, hamiltonian, beta } => {
            let a = match read_matrix(&matrix) {
                Ok(a) => a,
                Err(e) => return config_error(e),
            };
            let h = match &hamiltonian {
                Some(path) => match read_matrix(path) {
                    Ok(h) => h,
                    Err(e) => return config_error(e),
                },
                None => ComplexMatrix::zeros(a.dim()),
            };
            let value = GibbsEnsemble::new(h, beta).and_then(|ens| kms_norm(&ens, &a, p));
            match value {
                Ok(v) => {
                    println!("{v}");
                    ExitCode::SUCCESS
                }
                Err(e) => config_error(e),
            }
        }
    }
}
