use halfmap::commutators::{
    anti_ratio, estimate_ratios, euler_residual_forms, op_r3, op_s, op_s_tilde, op_t,
};
use halfmap::flow::SphereField;
use halfmap::synth::{band_limited_matrix, band_limited_vector, Band};
use halfmap::torus::frac_laplacian;
use halfmap::{MatrixField, TorusGrid, VectorField};
use rand::Rng;

use super::{all_finite, grid, rel, trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Cell, Table, Verdict};

type Op = fn(&MatrixField, &VectorField) -> halfmap::Result<VectorField>;

const OPS: [(&str, Op); 4] = [
    ("t", op_t),
    ("s", op_s),
    ("r3", op_r3),
    ("s_tilde", op_s_tilde),
];

/// `max|Q| max|Δ^{1/2}u| + max|Δ^{1/2}Q| max|u|`, the size of each term.
fn scale(q: &MatrixField, u: &VectorField) -> halfmap::Result<f64> {
    let hq = q
        .entries()
        .iter()
        .map(|e| frac_laplacian(e, 0.5))
        .collect::<halfmap::Result<Vec<_>>>()?;
    let hu = u.try_map(|c| frac_laplacian(c, 0.5))?;
    let hq_max = hq.iter().fold(0.0f64, |m, e| m.max(e.max_abs()));
    Ok(q.max_abs() * hu.max_abs() + hq_max * u.max_abs())
}

fn random_constants(rng: &mut impl Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `project(e₁ + 0.45 w / max|w|)` for band-limited `w`.
pub(super) fn random_unit_map(
    g: &TorusGrid,
    m: usize,
    band: Band,
    rng: &mut impl Rng,
) -> halfmap::Result<SphereField> {
    let w = band_limited_vector(g, m, band, rng)?;
    let mut e1 = vec![0.0; m];
    e1[0] = 1.0;
    let v = VectorField::constant(g, &e1)?.add(&w.scale(0.45 / w.max_abs()))?;
    SphereField::project(&v)
}

fn structure(cfg: &ExperimentConfig, g: &TorusGrid, band: Band) -> halfmap::Result<Table> {
    let (rows, m) = (cfg.usize("rows"), cfg.usize("m"));
    let mut columns = vec!["trial"];
    columns.extend([
        "t_const_q",
        "t_const_u",
        "r3_const_q",
        "r3_const_u",
        "s_const_q",
        "s_tilde_const_q",
    ]);
    columns.extend(["mean_t", "mean_s", "mean_r3", "mean_s_tilde"]);
    columns.extend(["bilinear_q", "bilinear_u"]);
    let results = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
        let q = band_limited_matrix(g, rows, m, band, rng)?;
        let u = band_limited_vector(g, m, band, rng)?;
        let q2 = band_limited_matrix(g, rows, m, band, rng)?;
        let u2 = band_limited_vector(g, m, band, rng)?;
        let cq = MatrixField::constant(g, rows, m, &random_constants(rng, rows * m))?;
        let cu = VectorField::constant(g, &random_constants(rng, m))?;
        let (a, b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));

        let mut row: Vec<Cell> = Vec::new();
        let vanish = |op: Op, q: &MatrixField, u: &VectorField| -> halfmap::Result<f64> {
            Ok(rel(op(q, u)?.max_abs(), scale(q, u)?))
        };
        row.push(vanish(op_t, &cq, &u)?.into());
        row.push(vanish(op_t, &q, &cu)?.into());
        row.push(vanish(op_r3, &cq, &u)?.into());
        row.push(vanish(op_r3, &q, &cu)?.into());
        row.push(vanish(op_s, &cq, &u)?.into());
        row.push(vanish(op_s_tilde, &cq, &u)?.into());
        let s = scale(&q, &u)?;
        for (_, op) in OPS {
            let out = op(&q, &u)?;
            let mean = out
                .components()
                .iter()
                .fold(0.0f64, |m, c| m.max(c.mean().abs()));
            row.push(rel(mean, s).into());
        }
        let (mut defect_q, mut defect_u) = (0.0f64, 0.0f64);
        let qc = q.scale(a).add(&q2.scale(b))?;
        let uc = u.scale(a).add(&u2.scale(b))?;
        for (_, op) in OPS {
            let want_q = op(&q, &u)?.scale(a).add(&op(&q2, &u)?.scale(b))?;
            let want_u = op(&q, &u)?.scale(a).add(&op(&q, &u2)?.scale(b))?;
            let sq = scale(&qc, &u)?;
            let su = scale(&q, &uc)?;
            defect_q = defect_q.max(rel(op(&qc, &u)?.sub(&want_q)?.max_abs(), sq));
            defect_u = defect_u.max(rel(op(&q, &uc)?.sub(&want_u)?.max_abs(), su));
        }
        row.push(defect_q.into());
        row.push(defect_u.into());
        Ok(row)
    })?;
    let mut table = Table::new("structure", &columns);
    for (i, mut r) in results.into_iter().enumerate() {
        r.insert(0, i.into());
        table.push(r);
    }
    Ok(table)
}

fn gap(cfg: &ExperimentConfig, g: &TorusGrid, band: Band) -> halfmap::Result<Table> {
    let m = cfg.usize("m");
    let gaps = trials(cfg.seed(), cfg.usize("unit_maps"), |_, rng| {
        let u = random_unit_map(g, m, band, rng)?;
        let forms = euler_residual_forms(u.field())?;
        Ok((forms.commutator_gap.max_abs(), forms.wedge_form.max_abs()))
    })?;
    let mut table = Table::new("gap", &["map", "gap", "wedge_form"]);
    for (i, (gap, wedge)) in gaps.into_iter().enumerate() {
        table.push(vec![i.into(), gap.into(), wedge.into()]);
    }
    Ok(table)
}

fn sweep(cfg: &ExperimentConfig, band: Band) -> halfmap::Result<Table> {
    let (rows, m) = (cfg.usize("rows"), cfg.usize("m"));
    let mut table = Table::new(
        "sweep",
        &[
            "n",
            "trial",
            "r_t",
            "r_s",
            "r_r3",
            "r_s_tilde",
            "r_lone",
            "anti",
        ],
    );
    let n = cfg.usize("n");
    for size in [n, n * cfg.usize("refine")] {
        let g = grid(cfg, size)?;
        let ratios = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
            let q = band_limited_matrix(&g, rows, m, band, rng)?;
            let u = band_limited_vector(&g, m, band, rng)?;
            Ok((estimate_ratios(&q, &u)?, anti_ratio(&u)))
        })?;
        for (i, (r, anti)) in ratios.into_iter().enumerate() {
            table.push(vec![
                size.into(),
                i.into(),
                r.r_t.into(),
                r.r_s.into(),
                r.r_r3.into(),
                r.r_s_tilde.into(),
                r.r_lone.into(),
                anti.into(),
            ]);
        }
    }
    Ok(table)
}

/// Largest value of `column` among rows whose `n` equals `size`.
fn max_at(t: &Table, size: usize, column: &str) -> f64 {
    t.cells("n")
        .zip(t.cells(column))
        .filter(|(n, _)| n.as_f64() == Some(size as f64))
        .filter_map(|(_, v)| v.as_f64())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let g = grid(cfg, cfg.usize("n"))?;
    let band = Band::new(cfg.usize("ceiling"), cfg.float("decay"));
    let structure = structure(cfg, &g, band)?;
    let gap = gap(cfg, &g, band)?;
    let sweep = sweep(cfg, band)?;

    let vanish_tol = cfg.float("vanish_tol");
    let mut verdicts: Vec<Verdict> = [
        ("T vanishes for constant Q", "t_const_q"),
        ("T vanishes for constant u", "t_const_u"),
        ("R3 vanishes for constant Q", "r3_const_q"),
        ("R3 vanishes for constant u", "r3_const_u"),
        ("S vanishes for constant Q", "s_const_q"),
        ("S~ vanishes for constant Q", "s_tilde_const_q"),
    ]
    .into_iter()
    .map(|(name, c)| Verdict::at_most(name, structure.max(c), vanish_tol))
    .collect();
    for (name, _) in OPS {
        let c = format!("mean_{name}");
        verdicts.push(Verdict::at_most(
            format!("{name} is mean-free"),
            structure.max(&c),
            cfg.float("mean_tol"),
        ));
    }
    let bilinear = structure.max("bilinear_q").max(structure.max("bilinear_u"));
    verdicts.push(Verdict::at_most(
        "bilinearity",
        bilinear,
        cfg.float("bilinear_tol"),
    ));
    let gap_max = if gap.rows.is_empty() {
        0.0
    } else {
        gap.max("gap")
    };
    verdicts.push(Verdict::at_most(
        "Euler commutator gap",
        gap_max,
        cfg.float("gap_tol"),
    ));

    let n = cfg.usize("n");
    let fine = n * cfg.usize("refine");
    for c in ["r_t", "r_s"] {
        let (a, b) = (max_at(&sweep, n, c), max_at(&sweep, fine, c));
        verdicts.push(Verdict::at_most(
            format!("max {c} stable from n = {n} to {fine} ({a:.4} -> {b:.4})"),
            (b - a).abs() / a,
            cfg.float("max_sweep_change"),
        ));
    }
    for c in ["r_r3", "r_s_tilde", "anti"] {
        verdicts.push(Verdict::new(
            format!("{c} finite in every trial"),
            all_finite(&sweep, c),
            format!("max {:.4e}", sweep.max(c)),
        ));
    }
    Ok((vec![structure, gap, sweep], verdicts))
}
