use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use halfmap_lab::{describe, run_suite, ExperimentConfig, Suite};

const AFTER_HELP: &str = "\
Suites and config keys (key, default, meaning):

{KEYS}
CSV files are named <suite>_<table>.csv. Columns:
  identities   errors: trial, round_trip, plancherel, quarter_compose, riesz_square,
                 riesz_gradient, self_adjoint
  paraproduct  partition: mode, sum_psi, error | products: trial, error
               maximal: n, trial, ratio | maximal_summary: n, c_m
  commutators  structure: trial, t_const_q, t_const_u, r3_const_q, r3_const_u, s_const_q,
                 s_tilde_const_q, mean_t, mean_s, mean_r3, mean_s_tilde, bilinear_q, bilinear_u
               gap: map, gap, wedge_form
               sweep: n, trial, r_t, r_s, r_r3, r_s_tilde, r_lone, anti
  cancellation ladder: k, r_t, r_s, r_lone, r_r3
  localization localization: trial, lhs, rhs, ratio_n, ratio_2n, change
               bracket: ratio_min, ratio_max, c | poincare: trial, ratio, ratio_doubled, change
  solve        flow: iter, energy, energy_change, residual, step, accepted
               summary: n, degree, iterations, status, energy, energy_error, residual, monotone
               fixed_points: degree, residual_dual, residual_l2, structure_max
               refinement: n, trial, residual_l2 | refinement_mean: n, geometric_mean
  morrey       profile_degree1, profile_solution: center, radius, energy, excess
               fits: map, center, beta | annuli: form, center, k, ratio
               annuli_constants: form, center, constant, drift
  seq          exponents: c, tau, beta | reference: c, tau, beta, tau_expected, beta_expected
               sequences: trial, c, tau, beta, c_prime, violations, bound_failures,
                 naive_c_prime, naive_bound_failures
               bounds: trial, n, partial, bound

Exit status: 0 all verdicts pass, 1 a verdict failed, 2 configuration error,
3 internal or output error.";

/// Runs one experiment suite and writes its tables as CSV.
#[derive(Parser, Debug)]
#[command(name = "halfmap-lab", version, about)]
struct Args {
    /// Suite to run.
    suite: String,
    /// Flat `key = value` config file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size (overrides `n`).
    #[arg(long)]
    n: Option<usize>,
    /// Also write SVG plots for tables that define one.
    #[arg(long)]
    plot: bool,
}

fn load(args: &Args) -> Result<ExperimentConfig, String> {
    let suite = Suite::parse(&args.suite).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!(
            "unknown suite `{}` (expected one of {})",
            args.suite,
            names.join(", ")
        )
    })?;
    let mut cfg = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ExperimentConfig::parse(suite, &text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::defaults(suite),
    };
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())
            .map_err(|e| format!("--seed: {e}"))?;
    }
    if let Some(n) = args.n {
        cfg.set("n", &n.to_string())
            .map_err(|e| format!("--n: {e}"))?;
    }
    if let Some(out) = &args.out {
        cfg.set("out", &out.to_string_lossy())
            .map_err(|e| format!("--out: {e}"))?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let help = AFTER_HELP.replace("{KEYS}", &describe());
    let cmd = <Args as clap::CommandFactory>::command().after_long_help(help);
    let args = match cmd
        .try_get_matches()
        .and_then(|m| <Args as clap::FromArgMatches>::from_arg_matches(&m))
    {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let written = match result.write(&cfg.out_dir(), args.plot) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error writing {}: {e}", cfg.out_dir().display());
            return ExitCode::from(3);
        }
    };
    // Output may go to a closed pipe; the exit status still reports.
    let mut stdout = std::io::stdout().lock();
    for v in &result.verdicts {
        let _ = writeln!(
            stdout,
            "{} {}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    let _ = writeln!(
        stdout,
        "{}: {} files in {}, {:.2} s",
        result.suite.name(),
        written.len(),
        cfg.out_dir().display(),
        result.elapsed.as_secs_f64()
    );
    if result.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
