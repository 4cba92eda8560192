use halfmap::norms::{localization_sides, poincare_ratio};
use halfmap::synth::{band_limited, Band};
use halfmap::ScalarField;

use super::{all_finite, grid, trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let n = cfg.usize("n");
    let center = cfg.float("center");
    let band = Band::new(cfg.usize("ceiling"), cfg.float("decay"));
    let count = cfg.usize("trials");

    let mut per_grid = Vec::new();
    for size in [n, 2 * n] {
        let g = grid(cfg, size)?;
        per_grid.push(trials(cfg.seed(), count, |_, rng| {
            let f = band_limited(&g, band, rng)?;
            localization_sides(&f, center)
        })?);
    }
    let mut local = Table::new(
        "localization",
        &["trial", "lhs", "rhs", "ratio_n", "ratio_2n", "change"],
    );
    for (i, (a, b)) in per_grid[0].iter().zip(&per_grid[1]).enumerate() {
        let change = match (a.ratio, b.ratio) {
            (Some(x), Some(y)) => Some((y - x).abs() / x),
            _ => None,
        };
        local.push(vec![
            i.into(),
            a.lhs.into(),
            a.rhs.into(),
            a.ratio.into(),
            b.ratio.into(),
            change.into(),
        ]);
    }

    let g = grid(cfg, n)?;
    let poincare = trials(cfg.seed(), count, |_, rng| {
        let w = band_limited(&g, band, rng)?;
        let wmax = w.max_abs();
        let samples: Vec<f64> = g
            .points()
            .into_iter()
            .zip(w.samples())
            .map(|(x, v)| {
                let d = g.distance(x, 0.0);
                bump(d) * (1.0 + 0.5 * v / wmax)
            })
            .collect();
        let f = ScalarField::new(&g, samples)?;
        Ok((poincare_ratio(&f)?, poincare_ratio(&f.scale(2.0))?))
    })?;
    let mut poin = Table::new("poincare", &["trial", "ratio", "ratio_doubled", "change"]);
    for (i, (a, b)) in poincare.into_iter().enumerate() {
        let change = match (a, b) {
            (Some(x), Some(y)) => Some((y - x).abs() / x),
            _ => None,
        };
        poin.push(vec![i.into(), a.into(), b.into(), change.into()]);
    }

    let ratios: Vec<f64> = local
        .floats("ratio_n")
        .into_iter()
        .chain(local.floats("ratio_2n"))
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
    let bracket = hi.max(1.0 / lo);
    let mut summary = Table::new("bracket", &["ratio_min", "ratio_max", "c"]);
    summary.push(vec![lo.into(), hi.into(), bracket.into()]);

    let positive = all_finite(&local, "ratio_n") && all_finite(&local, "ratio_2n") && lo > 0.0;
    let verdicts = vec![
        Verdict::new(
            "localization ratios in [1/C, C] at n and 2n",
            positive && bracket.is_finite(),
            format!("C = {bracket:.4}, ratios in [{lo:.4}, {hi:.4}]"),
        ),
        Verdict::at_most(
            "localization ratio change n -> 2n",
            local.max("change"),
            cfg.float("max_change"),
        ),
        Verdict::new(
            "poincare ratio finite",
            all_finite(&poin, "ratio"),
            format!("max {:.4e}", poin.max("ratio")),
        ),
        Verdict::at_most(
            "poincare ratio under f -> 2f",
            poin.max("change"),
            cfg.float("scale_tol"),
        ),
    ];
    Ok((vec![local, summary, poin], verdicts))
}
