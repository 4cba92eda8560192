use std::f64::consts::TAU;

use halfmap::commutators::structure_residual;
use halfmap::flow::{
    degree_map, el_residual, perturb, solve, FlowParams, FlowReport, FlowStatus, SphereField,
};
use halfmap::synth::Band;

use super::commutators::random_unit_map;
use super::{grid, ls_slope, trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

pub(super) fn flow_params(cfg: &ExperimentConfig) -> FlowParams {
    FlowParams {
        initial_step: cfg.float("initial_step"),
        backtrack: cfg.float("backtrack"),
        sufficient_decrease: cfg.float("sufficient_decrease"),
        max_iters: cfg.usize("max_iters"),
        tolerance: cfg.float("tolerance"),
    }
}

/// Flow from the perturbed degree map described by the config.
pub(super) fn flow_solution(cfg: &ExperimentConfig) -> halfmap::Result<(SphereField, FlowReport)> {
    let g = grid(cfg, cfg.usize("n"))?;
    let start = degree_map(cfg.int("degree"), cfg.usize("m"), &g)?;
    let band = Band::new(cfg.usize("ceiling"), cfg.float("decay"));
    let u0 = perturb(
        &start,
        cfg.float("amplitude"),
        band,
        cfg.int("flow_seed") as u64,
    )?;
    solve(&u0, &flow_params(cfg))
}

fn status_name(s: FlowStatus) -> &'static str {
    match s {
        FlowStatus::Converged => "converged",
        FlowStatus::MaxIters => "max_iters",
        FlowStatus::Stalled => "stalled",
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let (_, report) = flow_solution(cfg)?;
    let mut steps = Table::new(
        "flow",
        &[
            "iter",
            "energy",
            "energy_change",
            "residual",
            "step",
            "accepted",
        ],
    )
    .with_plot("iter", "residual", false, true);
    for (i, s) in report.steps.iter().enumerate() {
        steps.push(vec![
            i.into(),
            s.energy.into(),
            s.energy_change.into(),
            s.residual.into(),
            s.step.into(),
            s.accepted.into(),
        ]);
    }
    let target = TAU * cfg.int("degree").unsigned_abs() as f64;
    let mut summary = Table::new(
        "summary",
        &[
            "n",
            "degree",
            "iterations",
            "status",
            "energy",
            "energy_error",
            "residual",
            "monotone",
        ],
    );
    summary.push(vec![
        cfg.int("n").into(),
        cfg.int("degree").into(),
        report.iterations().into(),
        status_name(report.status).into(),
        report.final_energy.into(),
        (report.final_energy - target).abs().into(),
        report.final_residual.dual.into(),
        report.is_monotone().into(),
    ]);

    let g = grid(cfg, cfg.usize("n"))?;
    let mut fixed = Table::new(
        "fixed_points",
        &["degree", "residual_dual", "residual_l2", "structure_max"],
    );
    for &k in cfg.list("fixed_degrees") {
        let u = degree_map(k as i64, cfg.usize("m"), &g)?;
        let r = el_residual(&u);
        let s = structure_residual(u.field())?.max_abs();
        fixed.push(vec![
            (k as i64).into(),
            r.dual.into(),
            r.l2.into(),
            s.into(),
        ]);
    }

    let mut refinement = Table::new("refinement", &["n", "trial", "residual_l2"]);
    let mut refinement_mean = Table::new("refinement_mean", &["n", "geometric_mean"]).with_plot(
        "n",
        "geometric_mean",
        true,
        true,
    );
    for &size in cfg.list("refine_sizes") {
        let size = size as usize;
        let g = grid(cfg, size)?;
        let band = Band::new(size / 8, cfg.float("refine_decay"));
        let residuals = trials(cfg.seed(), cfg.usize("refine_trials"), |_, rng| {
            let u = random_unit_map(&g, cfg.usize("refine_m"), band, rng)?;
            Ok(structure_residual(u.field())?.l2_norm())
        })?;
        let log_mean = residuals.iter().map(|r| r.ln()).sum::<f64>() / residuals.len() as f64;
        for (i, r) in residuals.into_iter().enumerate() {
            refinement.push(vec![size.into(), i.into(), r.into()]);
        }
        refinement_mean.push(vec![size.into(), log_mean.exp().into()]);
    }

    let xs: Vec<f64> = refinement_mean.floats("n").iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = refinement_mean
        .floats("geometric_mean")
        .iter()
        .map(|v| v.ln())
        .collect();
    let slope = ls_slope(&xs, &ys);
    let converged = summary
        .cells("status")
        .all(|c| c.to_string() == "converged");
    let monotone = summary.cells("monotone").all(|c| c.to_string() == "true");
    let iterations = summary.max("iterations");
    let verdicts = vec![
        Verdict::new(
            "flow converged within the iteration cap",
            converged && iterations <= cfg.float("max_iters"),
            format!("{iterations} iterations"),
        ),
        Verdict::at_most(
            "final |E - 2pi|degree||",
            summary.max("energy_error"),
            cfg.float("energy_tol"),
        ),
        Verdict::at_most(
            "final dual residual",
            summary.max("residual"),
            cfg.float("residual_tol"),
        ),
        Verdict::new(
            "accepted steps lower the energy",
            monotone,
            format!(
                "{} accepted steps",
                steps
                    .cells("accepted")
                    .filter(|c| c.to_string() == "true")
                    .count()
            ),
        ),
        Verdict::at_most(
            "degree maps: dual residual",
            fixed.max("residual_dual"),
            cfg.float("fixed_tol"),
        ),
        Verdict::at_most(
            "degree maps: structure residual",
            fixed.max("structure_max"),
            cfg.float("fixed_tol"),
        ),
        Verdict::at_most(
            "structure residual slope in log n",
            slope,
            cfg.float("max_slope"),
        ),
    ];
    Ok((
        vec![steps, summary, fixed, refinement, refinement_mean],
        verdicts,
    ))
}
