//! `eparam`: estimate the entropic entanglement parameter of a bipartite
//! state, sweep the isotropic family, run verification suites, search for
//! estimate-vs-reduced-entropy witnesses, and cross-check the inner optimizer
//! against brute-force grids.
//!
//! Exit codes: 0 success, 1 property failure, 2 input error, 3 budget error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eparam_core::io::{report_human, report_to_json};
use eparam_core::suites;
use eparam_core::{
    estimate_eparam, Error, FamilySpec, OptimizationConfig,
};

#[derive(Parser)]
#[command(
    name = "eparam",
    about = "Entropic entanglement parameter estimation for bipartite quantum states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the parameter and all applicable bounds for one state.
    Compute(ComputeArgs),
    /// Sweep the isotropic family over a p-grid (CSV by default).
    SweepIsotropic(SweepArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Search Haar-random 2-qubit pure states for estimate > reduced entropy.
    NegativeSearch(NegativeSearchArgs),
    /// Compare the inner optimizer against the brute-force grid oracle.
    OracleCompare(OracleCompareArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Human,
    Machine,
    Csv,
}

#[derive(Args)]
struct ConfigArgs {
    /// Outer measurement-search restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Random restarts for the inner product-state minimization.
    #[arg(long)]
    inner_restarts: Option<usize>,
    /// Objective evaluations per outer restart.
    #[arg(long)]
    outer_evals: Option<usize>,
    /// Simplex iteration cap per restart.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Convergence tolerance on function-value spread.
    #[arg(long)]
    tol: Option<f64>,
    /// Angular resolution for grid oracles (radians).
    #[arg(long)]
    grid_resolution: Option<f64>,
    /// Master RNG seed; every command is deterministic for a fixed seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest local dimension accepted by the search.
    #[arg(long)]
    max_dim: Option<usize>,
}

impl ConfigArgs {
    fn build(&self) -> OptimizationConfig {
        let mut cfg = OptimizationConfig::default();
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.inner_restarts {
            cfg.inner_restarts = v;
        }
        if let Some(v) = self.outer_evals {
            cfg.outer_evals = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.f_tol = v;
        }
        if let Some(v) = self.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.max_dim {
            cfg.max_dim = v;
        }
        cfg
    }
}

#[derive(Args)]
struct StateArgs {
    /// JSON state file (`dims` + `matrix`/`amplitudes`, or a `family` stanza).
    #[arg(long, conflicts_with = "family")]
    state: Option<PathBuf>,
    /// Generate a family state instead of reading a file.
    #[arg(long, value_parser = ["isotropic", "bell-diagonal", "max-entangled", "random-pure", "random-separable", "random-product"])]
    family: Option<String>,
    /// Local dimension for --family.
    #[arg(long, short = 'd')]
    d: Option<usize>,
    /// Isotropic mixing parameter.
    #[arg(long)]
    p: Option<f64>,
    /// Bell-diagonal weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Term count for random-separable.
    #[arg(long)]
    terms: Option<usize>,
    /// Seed for random state families (independent of the optimizer seed).
    #[arg(long, default_value_t = 1)]
    state_seed: u64,
}

impl StateArgs {
    fn load(&self) -> Result<eparam_core::DensityMatrix, Error> {
        if let Some(path) = &self.state {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            return eparam_core::io::state_from_json(&text);
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Parse("need --state FILE or --family NAME".into()))?;
        let d = self
            .d
            .ok_or_else(|| Error::Parse("--family needs --d".into()))?;
        let spec = match family {
            "isotropic" => FamilySpec::Isotropic {
                d,
                p: self
                    .p
                    .ok_or_else(|| Error::Parse("isotropic needs --p".into()))?,
            },
            "bell-diagonal" => FamilySpec::BellDiagonal {
                d,
                weights: self
                    .weights
                    .clone()
                    .ok_or_else(|| Error::Parse("bell-diagonal needs --weights".into()))?,
            },
            "max-entangled" => FamilySpec::MaxEntangled { d },
            "random-pure" => FamilySpec::RandomPure {
                d,
                seed: self.state_seed,
            },
            "random-separable" => FamilySpec::RandomSeparable {
                d,
                terms: self.terms.unwrap_or(4),
                seed: self.state_seed,
            },
            "random-product" => FamilySpec::RandomProduct {
                d,
                seed: self.state_seed,
            },
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        };
        spec.realize()
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, short = 'd', default_value_t = 2)]
    d: usize,
    /// Number of evenly spaced grid points on [0, 1].
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Explicit grid, comma separated (overrides --points).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// signs | bounds | continuity | bases | oracle | all
    #[arg(value_parser = ["signs", "bounds", "continuity", "bases", "oracle", "all"])]
    suite: String,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NegativeSearchArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCompareArgs {
    #[arg(long, default_value_t = 2)]
    d_a: usize,
    #[arg(long, default_value_t = 2)]
    d_b: usize,
    #[arg(long, default_value_t = 50)]
    measurements: usize,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Parse(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::DimensionBudget(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn run_compute(args: &ComputeArgs) -> Result<ExitCode, Error> {
    let rho = args.state.load()?;
    let cfg = args.config.build();
    let report = estimate_eparam(&rho, &cfg)?;
    let text = match args.format {
        Format::Human => report_human(&report),
        Format::Machine => {
            let json = report_to_json(&report, &cfg);
            format!("{}\n", serde_json::to_string_pretty(&json).unwrap())
        }
        Format::Csv => {
            let b = &report.bounds;
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.9}"));
            format!(
                "estimate,analytic,info_content,dim_bound,two_qubit_bound,qutrit_numeric_bound,\
                 eigenbasis_lower,bell_diag_lower,pure_state_lower,coherent_info,sandwich_ok\n\
                 {:.9},{},{:.9},{:.9},{},{},{:.9},{},{},{:.9},{}\n",
                report.estimate,
                opt(report.analytic_value),
                b.info_content,
                b.dim_bound,
                opt(b.two_qubit_bound),
                opt(b.qutrit_numeric_bound),
                b.eigenbasis_lower,
                opt(b.bell_diag_lower),
                opt(b.pure_state_lower),
                b.coherent_info,
                report.sandwich_ok(),
            )
        }
    };
    emit(&args.out, &text)?;
    Ok(if report.sandwich_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_sweep(args: &SweepArgs) -> Result<ExitCode, Error> {
    let cfg = args.config.build();
    let grid: Vec<f64> = match &args.grid {
        Some(g) => g.clone(),
        None => {
            if args.points < 2 {
                return Err(Error::InvalidArgument("--points must be ≥ 2".into()));
            }
            (0..args.points)
                .map(|k| k as f64 / (args.points - 1) as f64)
                .collect()
        }
    };
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument("grid values must lie in [0, 1]".into()));
    }
    let rows = suites::sweep_isotropic(args.d, &grid, &cfg)?;
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("p,entropy,analytic,estimate,separable\n");
            for r in &rows {
                s.push_str(&format!(
                    "{:.6},{:.9},{},{:.9},{}\n",
                    r.p,
                    r.entropy,
                    r.analytic.map_or(String::new(), |a| format!("{a:.9}")),
                    r.estimate,
                    r.separable
                ));
            }
            s
        }
        Format::Machine => format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()),
        Format::Human => {
            let mut s = format!(
                "{:>8} {:>12} {:>12} {:>12} {:>10}\n",
                "p", "S", "analytic", "estimate", "separable"
            );
            for r in &rows {
                s.push_str(&format!(
                    "{:>8.4} {:>12.6} {:>12} {:>12.6} {:>10}\n",
                    r.p,
                    r.entropy,
                    r.analytic.map_or(String::new(), |a| format!("{a:+.6}")),
                    r.estimate,
                    r.separable
                ));
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = args.config.build();
    let mut checks = Vec::new();
    let suites_to_run: Vec<&str> = if args.suite == "all" {
        vec!["signs", "bounds", "continuity", "bases", "oracle"]
    } else {
        vec![args.suite.as_str()]
    };
    for name in suites_to_run {
        let batch = match name {
            "signs" => suites::suite_signs(&cfg)?,
            "bounds" => suites::suite_bounds(&cfg)?,
            "continuity" => suites::suite_continuity(&cfg)?,
            "bases" => suites::suite_bases(&cfg)?,
            "oracle" => suites::suite_oracle(&cfg)?,
            _ => unreachable!("clap validates the suite name"),
        };
        checks.extend(batch);
    }
    let all_passed = checks.iter().all(|c| c.passed);
    let text = match args.format {
        Format::Machine => format!("{}\n", serde_json::to_string_pretty(&checks).unwrap()),
        _ => {
            let mut s = String::new();
            for c in &checks {
                s.push_str(&format!(
                    "{} {:<40} {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            s.push_str(&format!(
                "{}: {}/{} properties passed\n",
                if all_passed { "OK" } else { "FAILED" },
                checks.iter().filter(|c| c.passed).count(),
                checks.len()
            ));
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_negative_search(args: &NegativeSearchArgs) -> Result<ExitCode, Error> {
    if args.samples < 1 {
        return Err(Error::InvalidArgument("--samples must be ≥ 1".into()));
    }
    let cfg = args.config.build();
    let report = suites::negative_search(args.samples, args.threshold, &cfg)?;
    let text = match args.format {
        Format::Machine => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut s = String::from("seed,estimate,reduced_entropy,gap\n");
            for w in &report.witnesses {
                s.push_str(&format!(
                    "{},{:.9},{:.9},{:.9}\n",
                    w.seed,
                    w.estimate,
                    w.reduced_entropy,
                    w.estimate - w.reduced_entropy
                ));
            }
            s
        }
        Format::Human => {
            let mut s = format!(
                "witnesses: {}/{} (fraction {:.3}, threshold {})\nfloor violations (estimate < S_A - 5e-2): {}\n",
                report.witnesses.len(),
                report.samples,
                report.witness_fraction,
                args.threshold,
                report.floor_violations
            );
            for w in report.witnesses.iter().take(10) {
                s.push_str(&format!(
                    "  seed {:>6}  estimate {:+.5}  S_A {:+.5}  gap {:+.5}\n",
                    w.seed,
                    w.estimate,
                    w.reduced_entropy,
                    w.estimate - w.reduced_entropy
                ));
            }
            if report.witnesses.len() > 10 {
                s.push_str(&format!("  … {} more\n", report.witnesses.len() - 10));
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if report.floor_violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_oracle_compare(args: &OracleCompareArgs) -> Result<ExitCode, Error> {
    let cfg = args.config.build();
    let dims = eparam_core::Dims::new(args.d_a, args.d_b);
    let report = suites::oracle_compare(dims, args.measurements, &cfg)?;
    let ok = report.max_excess <= 1e-9;
    let text = match args.format {
        Format::Machine => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut s = String::from("seed,optimizer,grid,diff\n");
            for r in &report.rows {
                s.push_str(&format!(
                    "{},{:.9},{:.9},{:+.3e}\n",
                    r.seed,
                    r.optimizer,
                    r.grid,
                    r.optimizer - r.grid
                ));
            }
            s
        }
        Format::Human => {
            let mut s = format!(
                "{:>6} {:>12} {:>12} {:>12}\n",
                "seed", "optimizer", "grid", "diff"
            );
            for r in &report.rows {
                s.push_str(&format!(
                    "{:>6} {:>12.6} {:>12.6} {:>+12.3e}\n",
                    r.seed,
                    r.optimizer,
                    r.grid,
                    r.optimizer - r.grid
                ));
            }
            s.push_str(&format!(
                "max |diff| = {:.4e}; max optimizer excess = {:+.3e} (must be ≤ 1e-9)\n",
                report.max_abs_diff, report.max_excess
            ));
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compute(args) => run_compute(args),
        Command::SweepIsotropic(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
        Command::NegativeSearch(args) => run_negative_search(args),
        Command::OracleCompare(args) => run_oracle_compare(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
