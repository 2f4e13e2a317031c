//! Batch command-line front end: CSV ingestion, method dispatch, JSON/CSV
//! reporting and plot-data emission.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 numerical or domain
//! error.

mod io;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use mlrselect::{
    classify_theorems, general_koo_select, koo_condition_values, koo_profile, koo_select,
    phi, psi, region_grid, run_monte_carlo, select_exhaustive, AsymptoticParams, CriterionKind,
    Dataset, ErrorDist, FullModelCache, KooFlavor, MethodSpec, NoncentralityLimit, Setting,
    SimulationConfig, ThresholdRule,
};
use report::{DiagnoseReport, RunManifest, SelectMethodReport, SelectReport, WorstCaseEntry};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse {
        path: String,
        row: usize,
        col: usize,
        detail: String,
    },
    Io {
        path: String,
        detail: String,
    },
    Lib(mlrselect::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Parse {
                path,
                row,
                col,
                detail,
            } => {
                if *row == 0 {
                    write!(f, "{path}: {detail}")
                } else {
                    write!(f, "{path}: row {row}, column {col}: {detail}")
                }
            }
            CliError::Io { path, detail } => write!(f, "{path}: {detail}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<mlrselect::Error> for CliError {
    fn from(e: mlrselect::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Lib(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mlrselect",
    version,
    about = "Variable selection for multivariate linear regression",
    propagate_version = true
)]
struct Cli {
    /// Cap on worker threads (overrides MLRSELECT_THREADS); never affects output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run selection methods on X/Y matrices read from CSV files.
    Select(SelectArgs),
    /// Monte Carlo selection-percentage experiment.
    Simulate(SimulateArgs),
    /// Emit the phi/psi values over a grid of the (alpha, c) simplex as CSV.
    Regions(RegionsArgs),
    /// Condition values V1-V4 and per-method consistency verdicts.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Design matrix CSV (n rows, k columns; optional header row).
    #[arg(long, value_name = "FILE")]
    x: PathBuf,
    /// Response matrix CSV (n rows, p columns; optional header row).
    #[arg(long, value_name = "FILE")]
    y: PathBuf,
    /// Comma-separated methods: koo-aic, koo-bic, koo-cp, gkoo-a, gkoo-c,
    /// exhaustive-aic, exhaustive-bic, exhaustive-cp.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    /// Threshold rule for the general KOO methods: sd:M, mad:M or theory:T.
    #[arg(long, default_value = "sd:2")]
    rule: String,
    /// Restrict exhaustive search to models of at most this size.
    #[arg(long)]
    max_size: Option<usize>,
    /// Output JSON report path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Signal setting: I (bounded noncentrality) or II (diverging).
    #[arg(long)]
    setting: String,
    /// Error distribution: normal, t3 or chisq2.
    #[arg(long, default_value = "normal")]
    dist: String,
    #[arg(long)]
    n: usize,
    /// Target ratio p/n.
    #[arg(long)]
    c: f64,
    /// Target ratio k/n.
    #[arg(long)]
    alpha: f64,
    /// Number of true variables (the first k-star columns carry signal).
    #[arg(long, default_value_t = 5)]
    k_star: usize,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated KOO methods to evaluate per replication.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "koo-aic,koo-bic,koo-cp,gkoo-a,gkoo-c"
    )]
    methods: Vec<String>,
    /// Threshold rule applied to the general KOO methods.
    #[arg(long, default_value = "sd:2")]
    rule: String,
    /// Output CSV report path (one row per method).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct RegionsArgs {
    /// Grid resolution: lattice step is 1/GRID.
    #[arg(long, value_name = "GRID")]
    grid: usize,
    /// Output CSV path with header alpha,c,phi,psi.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    c: f64,
    /// Optional CSV with header log_tau,kappa,s,m giving worst-case
    /// noncentrality limits (from simulation or theory).
    #[arg(long, value_name = "FILE")]
    tau_kappa: Option<PathBuf>,
    /// Optional JSON report path; the summary always goes to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let result = match cli.command {
        Command::Select(args) => cmd_select(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Regions(args) => cmd_regions(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("MLRSELECT_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = n {
        if n > 0 {
            // Ignore failure: the global pool can only be set once.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

enum SelectMethod {
    Koo(KooFlavor),
    Exhaustive(CriterionKind),
}

fn parse_select_method(s: &str) -> Result<SelectMethod, CliError> {
    match s {
        "exhaustive-aic" => Ok(SelectMethod::Exhaustive(CriterionKind::Aic)),
        "exhaustive-bic" => Ok(SelectMethod::Exhaustive(CriterionKind::Bic)),
        "exhaustive-cp" => Ok(SelectMethod::Exhaustive(CriterionKind::Cp)),
        other => KooFlavor::from_str(other)
            .map(SelectMethod::Koo)
            .map_err(|_| {
                CliError::Usage(format!(
                    "unknown method `{other}` (expected koo-aic, koo-bic, koo-cp, gkoo-a, \
                     gkoo-c, exhaustive-aic, exhaustive-bic or exhaustive-cp)"
                ))
            }),
    }
}

fn parse_rule(s: &str) -> Result<ThresholdRule, CliError> {
    ThresholdRule::from_str(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut buf = serde_json::to_vec_pretty(value).expect("serializable report");
    buf.push(b'\n');
    std::fs::write(path, buf).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

fn cmd_select(args: SelectArgs) -> Result<(), CliError> {
    let methods: Vec<(String, SelectMethod)> = args
        .methods
        .iter()
        .map(|s| parse_select_method(s).map(|m| (s.clone(), m)))
        .collect::<Result<_, _>>()?;
    let rule = parse_rule(&args.rule)?;

    let x = io::read_matrix(&args.x)?;
    let y = io::read_matrix(&args.y)?;
    let dataset = Dataset::new(y, x)?;
    let cache = FullModelCache::new(&dataset)?;

    let mut manifest = RunManifest::new("select");
    manifest.inputs = vec![args.x.display().to_string(), args.y.display().to_string()];
    manifest.methods = args.methods.clone();
    manifest.rule = args.rule.clone();
    manifest.out = args.out.display().to_string();

    let mut entries = Vec::new();
    for (name, method) in &methods {
        let entry = match method {
            SelectMethod::Koo(flavor) => {
                let mut profile = koo_profile(&cache, *flavor);
                let selected = if flavor.is_tilde() {
                    koo_select(&mut profile)?
                } else {
                    general_koo_select(&mut profile, &rule)?
                };
                SelectMethodReport::Koo {
                    method: name.clone(),
                    rule: if flavor.is_tilde() {
                        "-".to_string()
                    } else {
                        args.rule.clone()
                    },
                    threshold: profile.threshold.expect("set by selection"),
                    selected: selected.indices().to_vec(),
                    stats: profile.stats.clone(),
                }
            }
            SelectMethod::Exhaustive(kind) => {
                let sel = select_exhaustive(&dataset, &cache, *kind, args.max_size, false)?;
                SelectMethodReport::Exhaustive {
                    method: name.clone(),
                    selected: sel.best.model.indices().to_vec(),
                    value: sel.best.value,
                    subsets_evaluated: sel.table.len(),
                }
            }
        };
        entries.push(entry);
    }

    let report = SelectReport {
        manifest,
        n: dataset.n(),
        p: dataset.p(),
        k: dataset.k(),
        alpha_k: cache.alpha_k(),
        c_n: cache.c_n(),
        methods: entries,
    };
    write_json(&args.out, &report)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let setting = Setting::from_str(&args.setting).map_err(|e| CliError::Usage(e.to_string()))?;
    let dist = ErrorDist::from_str(&args.dist).map_err(|e| CliError::Usage(e.to_string()))?;
    let rule = parse_rule(&args.rule)?;
    let methods: Vec<MethodSpec> = args
        .methods
        .iter()
        .map(|s| {
            let flavor =
                KooFlavor::from_str(s).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(if flavor.is_tilde() {
                MethodSpec::tilde(flavor)
            } else {
                MethodSpec::breve(flavor, rule)
            })
        })
        .collect::<Result<_, CliError>>()?;

    let cfg = SimulationConfig {
        setting,
        dist,
        n: args.n,
        c_target: args.c,
        alpha_target: args.alpha,
        k_star: args.k_star,
        reps: args.reps,
        seed: args.seed,
        methods,
    };
    let report = run_monte_carlo(&cfg)?;

    let mut writer = csv::WriterBuilder::new()
        .from_path(&args.out)
        .map_err(|e| CliError::Io {
            path: args.out.display().to_string(),
            detail: e.to_string(),
        })?;
    let columns = [
        "command",
        "version",
        "setting",
        "dist",
        "n",
        "c",
        "alpha",
        "p",
        "k",
        "k_star",
        "reps",
        "seed",
        "method",
        "rule",
        "count_under",
        "count_exact",
        "count_over",
        "fraction_under",
        "fraction_exact",
        "fraction_over",
        "mean_over_size",
    ];
    let out_path = args.out.display().to_string();
    let fail = |e: csv::Error| CliError::Io {
        path: out_path.clone(),
        detail: e.to_string(),
    };
    writer.write_record(columns).map_err(fail)?;
    for m in &report.methods {
        writer
            .write_record([
                "simulate",
                env!("CARGO_PKG_VERSION"),
                &report.setting.to_string(),
                &report.dist.to_string(),
                &report.n.to_string(),
                &args.c.to_string(),
                &args.alpha.to_string(),
                &report.p.to_string(),
                &report.k.to_string(),
                &report.k_star.to_string(),
                &report.reps.to_string(),
                &report.seed.to_string(),
                &m.method,
                &m.rule,
                &m.count_under.to_string(),
                &m.count_exact.to_string(),
                &m.count_over.to_string(),
                &m.fraction_under.to_string(),
                &m.fraction_exact.to_string(),
                &m.fraction_over.to_string(),
                &m.mean_over_size.to_string(),
            ])
            .map_err(|e| CliError::Io {
                path: args.out.display().to_string(),
                detail: e.to_string(),
            })?;
    }
    writer.flush().map_err(|e| CliError::Io {
        path: args.out.display().to_string(),
        detail: e.to_string(),
    })?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_regions(args: RegionsArgs) -> Result<(), CliError> {
    let grid = region_grid(args.grid)?;
    let mut writer = csv::WriterBuilder::new()
        .from_path(&args.out)
        .map_err(|e| CliError::Io {
            path: args.out.display().to_string(),
            detail: e.to_string(),
        })?;
    writer
        .write_record(["alpha", "c", "phi", "psi"])
        .map_err(|e| CliError::Io {
            path: args.out.display().to_string(),
            detail: e.to_string(),
        })?;
    for pt in &grid {
        writer
            .write_record([
                pt.alpha.to_string(),
                pt.c.to_string(),
                pt.phi.to_string(),
                pt.psi.to_string(),
            ])
            .map_err(|e| CliError::Io {
                path: args.out.display().to_string(),
                detail: e.to_string(),
            })?;
    }
    writer.flush().map_err(|e| CliError::Io {
        path: args.out.display().to_string(),
        detail: e.to_string(),
    })?;
    println!("wrote {} ({} grid points)", args.out.display(), grid.len());
    Ok(())
}

/// Read worst-case noncentrality limits from a CSV with header
/// log_tau,kappa,s,m. `inf` is accepted for declared divergence.
fn read_limits(path: &Path) -> Result<Vec<NoncentralityLimit>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            row: 0,
            col: 0,
            detail: e.to_string(),
        })?;
    let headers = reader.headers().map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        row: 1,
        col: 0,
        detail: e.to_string(),
    })?;
    let expected = ["log_tau", "kappa", "s", "m"];
    let header_fields: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    if header_fields != expected {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            row: 1,
            col: 0,
            detail: format!("expected header log_tau,kappa,s,m, got {header_fields:?}"),
        });
    }
    let mut limits = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            row,
            col: 0,
            detail: e.to_string(),
        })?;
        let field = |col: usize| -> Result<&str, CliError> {
            record.get(col).ok_or_else(|| CliError::Parse {
                path: path.display().to_string(),
                row,
                col: col + 1,
                detail: "missing field".to_string(),
            })
        };
        let parse_f64 = |col: usize, s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| CliError::Parse {
                path: path.display().to_string(),
                row,
                col: col + 1,
                detail: format!("field `{s}` is not a number"),
            })
        };
        let parse_usize = |col: usize, s: &str| -> Result<usize, CliError> {
            s.parse().map_err(|_| CliError::Parse {
                path: path.display().to_string(),
                row,
                col: col + 1,
                detail: format!("field `{s}` is not a count"),
            })
        };
        limits.push(NoncentralityLimit {
            log_tau: parse_f64(0, field(0)?)?,
            kappa: parse_f64(1, field(1)?)?,
            s: parse_usize(2, field(2)?)?,
            m: parse_usize(3, field(3)?)?,
        });
    }
    Ok(limits)
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<(), CliError> {
    let params = AsymptoticParams::new(args.alpha, args.c)?;
    let limits = match &args.tau_kappa {
        Some(path) => Some(read_limits(path)?),
        None => None,
    };
    let verdicts = classify_theorems(&params, limits.as_deref());
    let phi_v = phi(args.alpha, args.c)?;
    let psi_v = psi(args.alpha, args.c)?;

    // V3/V4 from the first single-deletion entry, when present.
    let koo_entry = limits
        .as_deref()
        .and_then(|ls| ls.iter().find(|l| l.s == 1).copied());
    let conditions = koo_condition_values(
        args.alpha,
        args.c,
        koo_entry.map(|l| l.log_tau),
        koo_entry.map(|l| l.kappa),
    )?;

    let worst_case: Vec<WorstCaseEntry> = limits
        .as_deref()
        .unwrap_or(&[])
        .iter()
        .map(|l| {
            let cond = koo_condition_values(args.alpha, args.c, Some(l.log_tau), Some(l.kappa))?;
            Ok(WorstCaseEntry {
                limit: *l,
                v3: cond.v3.expect("supplied"),
                v4: cond.v4.expect("supplied"),
            })
        })
        .collect::<Result<_, CliError>>()?;

    println!("alpha = {}, c = {}", args.alpha, args.c);
    println!("phi = {phi_v}, psi = {psi_v}");
    println!("V1 = {}, V2 = {}", conditions.v1, conditions.v2);
    match (conditions.v3, conditions.v4) {
        (Some(v3), Some(v4)) => println!("V3 = {v3}, V4 = {v4}"),
        _ => println!("V3, V4: not computable (supply --tau-kappa)"),
    }
    println!("aic: {}", verdicts.aic);
    println!("bic: {}", verdicts.bic);
    println!("cp: {}", verdicts.cp);
    println!("koo-aic: {}", verdicts.koo_aic);
    println!("koo-bic: {}", verdicts.koo_bic);
    println!("koo-cp: {}", verdicts.koo_cp);
    println!("general-koo: {}", verdicts.general_koo);

    if let Some(out) = &args.out {
        let mut manifest = RunManifest::new("diagnose");
        manifest.inputs = args
            .tau_kappa
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        manifest.out = out.display().to_string();
        let report = DiagnoseReport {
            manifest,
            alpha: args.alpha,
            c: args.c,
            phi: phi_v,
            psi: psi_v,
            conditions,
            worst_case,
            verdicts,
        };
        write_json(out, &report)?;
    }
    Ok(())
}
