use halfmap::synth::{band_limited, Band};
use halfmap::torus::{analyze, derivative, frac_laplacian, riesz, synthesize};

use super::{grid, rel, trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

const COLUMNS: [&str; 6] = [
    "round_trip",
    "plancherel",
    "quarter_compose",
    "riesz_square",
    "riesz_gradient",
    "self_adjoint",
];

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let n = cfg.usize("n");
    let g = grid(cfg, n)?;
    // Everything below Nyquist, where the odd multipliers are exact.
    let band = Band::new(n / 2 - 1, 0.5);
    let rows = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
        let f = band_limited(&g, band, rng)?;
        let h = band_limited(&g, band, rng)?;
        let back = synthesize(&analyze(&f)?)?;
        let spectral = g.period()
            * analyze(&f)?
                .coeffs()
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>();
        let physical = f.inner(&f)?;
        let half = frac_laplacian(&f, 0.5)?;
        let quarter = frac_laplacian(&frac_laplacian(&f, 0.25)?, 0.25)?;
        let rr = riesz(&riesz(&f));
        let rd = riesz(&derivative(&f));
        let half_h = frac_laplacian(&h, 0.5)?;
        let pairing = (half.inner(&h)? - f.inner(&half_h)?).abs();
        let pairing_scale = half.l2_norm() * h.l2_norm() + f.l2_norm() * half_h.l2_norm();
        Ok([
            rel((&back - &f).max_abs(), f.max_abs()),
            rel((spectral - physical).abs(), physical),
            rel((&quarter - &half).max_abs(), half.max_abs()),
            rel((&rr + &f).max_abs(), f.max_abs()),
            rel((&rd - &half).max_abs(), half.max_abs()),
            rel(pairing, pairing_scale),
        ])
    })?;
    let mut columns = vec!["trial"];
    columns.extend(COLUMNS);
    let mut table = Table::new("errors", &columns);
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![i.into()];
        row.extend(r.iter().map(|&v| v.into()));
        table.push(row);
    }
    let tol = cfg.float("tol");
    let verdicts = COLUMNS
        .iter()
        .map(|c| Verdict::at_most(format!("{c} relative error"), table.max(c), tol))
        .collect();
    Ok((vec![table], verdicts))
}
