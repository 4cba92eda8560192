use halfmap::commutators::{dot_matrix, wedge_matrix};
use halfmap::flow::{
    annuli_constant, degree_map, dyadic_radii, fit_beta, morrey_profile, AnnuliForm, SphereField,
};

use super::solve::flow_solution;
use super::{grid, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

fn profile_table(name: &'static str, u: &SphereField, centers: &[f64]) -> halfmap::Result<Table> {
    let radii = dyadic_radii(u.grid());
    let mut t = Table::new(name, &["center", "radius", "energy", "excess"])
        .with_plot("radius", "energy", true, true);
    for &c in centers {
        for p in morrey_profile(u, c, &radii)? {
            t.push(vec![
                c.into(),
                p.radius.into(),
                p.energy.into(),
                (p.energy - 2.0 * p.radius).into(),
            ]);
        }
    }
    Ok(t)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let g = grid(cfg, cfg.usize("n"))?;
    let centers = cfg.list("centers");
    let line = degree_map(1, cfg.usize("m"), &g)?;
    let (solution, _) = flow_solution(cfg)?;

    let exact = profile_table("profile_degree1", &line, centers)?;
    let flowed = profile_table("profile_solution", &solution, centers)?;
    let radii = dyadic_radii(&g);
    let mut fits = Table::new("fits", &["map", "center", "beta"]);
    for (name, u) in [("degree1", &line), ("solution", &solution)] {
        for &c in centers {
            fits.push(vec![
                name.into(),
                c.into(),
                fit_beta(&morrey_profile(u, c, &radii)?)?.into(),
            ]);
        }
    }

    let mut annuli = Table::new("annuli", &["form", "center", "k", "ratio"]);
    let mut constants = Table::new("annuli_constants", &["form", "center", "constant", "drift"]);
    let forms = [
        ("wedge", AnnuliForm::Matrix(wedge_matrix(solution.field())?)),
        ("dot", AnnuliForm::Matrix(dot_matrix(solution.field()))),
        ("combined", AnnuliForm::Combined),
    ];
    for (name, form) in &forms {
        for &c in centers {
            let r = annuli_constant(&solution, form, c, None)?;
            for &(k, ratio) in &r.ratios {
                annuli.push(vec![(*name).into(), c.into(), k.into(), ratio.into()]);
            }
            constants.push(vec![
                (*name).into(),
                c.into(),
                r.constant.into(),
                r.drift.into(),
            ]);
        }
    }

    let betas = |map: &str| -> Vec<f64> {
        fits.cells("map")
            .zip(fits.cells("beta"))
            .filter(|(m, _)| m.to_string() == map)
            .filter_map(|(_, b)| b.as_f64())
            .collect()
    };
    let line_dev = betas("degree1")
        .iter()
        .map(|b| (b - 1.0).abs())
        .fold(0.0, f64::max);
    let solution_min = betas("solution").into_iter().fold(f64::INFINITY, f64::min);
    let excess = exact
        .floats("excess")
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let finite = constants.floats("constant").iter().all(|v| v.is_finite());
    let verdicts = vec![
        Verdict::at_most(
            "degree-1 profile |E(r) - 2r|",
            excess,
            cfg.float("profile_tol"),
        ),
        Verdict::at_most("degree-1 |beta - 1|", line_dev, cfg.float("beta_tol")),
        Verdict::at_least("solution beta", solution_min, cfg.float("beta_min")),
        Verdict::new(
            "annuli constants finite",
            finite,
            format!("max {:.4e}", constants.max("constant")),
        ),
        Verdict::at_most(
            "annuli constant drift",
            constants.max("drift"),
            cfg.float("max_annuli_drift"),
        ),
    ];
    Ok((vec![exact, flowed, fits, annuli, constants], verdicts))
}
