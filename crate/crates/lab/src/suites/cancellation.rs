use std::f64::consts::PI;

use halfmap::commutators::estimate_ratios;
use halfmap::{MatrixField, ScalarField, VectorField};

use super::{grid, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

/// `Q_K = cos(Kx)/√(πK)` and `u_K = cos((K+1)x)/√(π(K+1))`: unit `Ḣ^{1/2}`
/// norms and neighboring frequencies, so the product terms meet head on.
pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let g = grid(cfg, cfg.usize("n"))?;
    let mut table = Table::new("ladder", &["k", "r_t", "r_s", "r_lone", "r_r3"])
        .with_plot("k", "r_lone", true, true);
    for &k in cfg.list("ladder") {
        let wave = |freq: f64| ScalarField::from_fn(&g, |x| (freq * x).cos() / (PI * freq).sqrt());
        let q = MatrixField::new(1, 1, vec![wave(k)?])?;
        let u = VectorField::new(vec![wave(k + 1.0)?])?;
        let r = estimate_ratios(&q, &u)?;
        table.push(vec![
            (k as i64).into(),
            r.r_t.into(),
            r.r_s.into(),
            r.r_lone.into(),
            r.r_r3.into(),
        ]);
    }

    let lone = table.floats("r_lone");
    let growth = lone
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min);
    let mut rt = table.floats("r_t");
    rt.sort_by(f64::total_cmp);
    let median = if rt.is_empty() {
        f64::NAN
    } else if rt.len() % 2 == 1 {
        rt[rt.len() / 2]
    } else {
        0.5 * (rt[rt.len() / 2 - 1] + rt[rt.len() / 2])
    };
    let spread = rt
        .iter()
        .map(|v| (v / median).max(median / v))
        .fold(1.0, f64::max);
    let complete = rt.len() == table.rows.len() && lone.len() == table.rows.len();
    let verdicts = vec![
        Verdict::new(
            "every ratio defined",
            complete,
            format!("{} rungs", table.rows.len()),
        ),
        Verdict::at_least("rLone growth per rung", growth, cfg.float("min_growth")),
        Verdict::at_most(
            "rT within a factor of its median",
            spread,
            cfg.float("median_factor"),
        ),
    ];
    Ok((vec![table], verdicts))
}
