use halfmap::littlewood_paley::DyadicPartition;
use halfmap::synth::{band_limited, Band};

use super::{grid, trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let g = grid(cfg, cfg.usize("n"))?;
    let p = DyadicPartition::new(&g);

    let mut partition = Table::new("partition", &["mode", "sum_psi", "error"]);
    for k in g.modes() {
        let sum: f64 = (0..p.block_count()).map(|j| p.psi(j, k)).sum();
        partition.push(vec![k.into(), sum.into(), (sum - 1.0).abs().into()]);
    }

    let band = Band::new(cfg.usize("ceiling"), cfg.float("decay"));
    let errors = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
        let f = band_limited(&g, band, rng)?;
        let h = band_limited(&g, band, rng)?;
        let sum = &(&p.pi1(&f, &h)? + &p.pi2(&f, &h)?) + &p.pi3(&f, &h)?;
        Ok((&sum - &(&f * &h)).max_abs() / (f.max_abs() * h.max_abs()))
    })?;
    let mut products = Table::new("products", &["trial", "error"]);
    for (i, e) in errors.into_iter().enumerate() {
        products.push(vec![i.into(), e.into()]);
    }

    // The same continuous functions sampled on both grids.
    let cm_band = Band::new(cfg.usize("cm_ceiling"), cfg.float("decay"));
    let mut maximal = Table::new("maximal", &["n", "trial", "ratio"]);
    let mut summary = Table::new("maximal_summary", &["n", "c_m"]);
    for key in ["cm_coarse", "cm_fine"] {
        let n = cfg.usize(key);
        let g = grid(cfg, n)?;
        let p = DyadicPartition::new(&g);
        let ratios = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
            let f = band_limited(&g, cm_band, rng)?;
            let m = p.maximal(&f)?;
            let lows = p.low_passes(&f)?;
            Ok((0..n)
                .map(|i| {
                    let top = lows.iter().fold(0.0f64, |a, l| a.max(l.samples()[i].abs()));
                    top / m.samples()[i]
                })
                .fold(0.0f64, f64::max))
        })?;
        let c_m = ratios.iter().cloned().fold(0.0f64, f64::max);
        for (i, r) in ratios.into_iter().enumerate() {
            maximal.push(vec![n.into(), i.into(), r.into()]);
        }
        summary.push(vec![n.into(), c_m.into()]);
    }

    let c = summary.floats("c_m");
    let drift = (c[1] - c[0]).abs() / c[0];
    let verdicts = vec![
        Verdict::at_most(
            "partition of unity",
            partition.max("error"),
            cfg.float("partition_tol"),
        ),
        Verdict::at_most(
            "paraproduct recombination",
            products.max("error"),
            cfg.float("product_tol"),
        ),
        Verdict::at_most(
            format!("maximal constant drift (C_M {:.4} -> {:.4})", c[0], c[1]),
            drift,
            cfg.float("max_cm_drift"),
        ),
    ];
    Ok((vec![partition, products, maximal, summary], verdicts))
}
