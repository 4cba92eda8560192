//! One module per suite. Every suite fills tables first and then derives its
//! verdicts from those rows alone, so a CSV can be re-checked offline.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use halfmap::synth::trial_rng;
use halfmap::TorusGrid;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::output::{write_csv, write_plot};
use crate::table::{Table, Verdict};

mod cancellation;
mod commutators;
mod identities;
mod localization;
mod morrey;
mod paraproduct;
mod seq;
mod solve;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: Suite,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<suite>_<table>.csv` for every table, plus an SVG for tables
    /// with a plot when `plots` is set. Returns the paths in write order.
    pub fn write(&self, dir: &Path, plots: bool) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let stem = format!("{}_{}", self.suite.name(), t.name);
            let csv = dir.join(format!("{stem}.csv"));
            write_csv(t, &csv)?;
            written.push(csv);
            if let (true, Some(spec)) = (plots, &t.plot) {
                let svg = dir.join(format!("{stem}.svg"));
                write_plot(t, spec, &svg)?;
                written.push(svg);
            }
        }
        Ok(written)
    }
}

pub fn run_suite(cfg: &ExperimentConfig) -> halfmap::Result<SuiteResult> {
    let start = Instant::now();
    let (tables, verdicts) = match cfg.suite {
        Suite::Identities => identities::run(cfg)?,
        Suite::Paraproduct => paraproduct::run(cfg)?,
        Suite::Commutators => commutators::run(cfg)?,
        Suite::Cancellation => cancellation::run(cfg)?,
        Suite::Localization => localization::run(cfg)?,
        Suite::Solve => solve::run(cfg)?,
        Suite::Morrey => morrey::run(cfg)?,
        Suite::Seq => seq::run(cfg)?,
    };
    Ok(SuiteResult {
        suite: cfg.suite,
        tables,
        verdicts,
        elapsed: start.elapsed(),
    })
}

type Outcome = halfmap::Result<(Vec<Table>, Vec<Verdict>)>;

fn grid(cfg: &ExperimentConfig, n: usize) -> halfmap::Result<TorusGrid> {
    TorusGrid::new(n, cfg.float("period"))
}

/// Runs `count` independent trials in parallel; trial `i` gets the generator
/// seeded with `seed + i` and results come back in trial order.
fn trials<T: Send>(
    seed: u64,
    count: usize,
    f: impl Fn(usize, &mut ChaCha8Rng) -> halfmap::Result<T> + Sync,
) -> halfmap::Result<Vec<T>> {
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i as u64)))
        .collect()
}

/// `max|a - b| / max(|b|, floor)`.
fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

/// All entries of a column are present and finite.
fn all_finite(t: &Table, column: &str) -> bool {
    t.rows.len() == t.floats(column).len() && t.floats(column).iter().all(|v| v.is_finite())
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
