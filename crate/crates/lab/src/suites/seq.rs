use halfmap::flow::{decay_exponent, required_constant, seq_check, DyadicSequence};
use rand::Rng;

use super::{trials, Outcome};
use crate::config::ExperimentConfig;
use crate::table::{Table, Verdict};

/// `a_k` for `-head < k ≤ tail`; the tail stays positive so every weighted
/// tail is, and the smallest admissible `C` is finite.
fn random_sequence(
    head: usize,
    tail: usize,
    rng: &mut impl Rng,
) -> halfmap::Result<DyadicSequence> {
    let mut values: Vec<f64> = (0..head).map(|_| rng.random_range(0.0..2.0)).collect();
    // Some sequences start with a run of zeros.
    let zeros = rng.random_range(0..=head / 2);
    values[..zeros].fill(0.0);
    values.extend((0..tail).map(|_| rng.random_range(0.1..2.0)));
    DyadicSequence::new(1 - head as i64, values)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Outcome {
    let mut exponents =
        Table::new("exponents", &["c", "tau", "beta"]).with_plot("c", "beta", true, false);
    for &c in cfg.list("c_values") {
        let (tau, beta) = decay_exponent(c)?;
        exponents.push(vec![c.into(), tau.into(), beta.into()]);
    }
    let (tau1, beta1) = decay_exponent(1.0)?;
    let mut reference = Table::new(
        "reference",
        &["c", "tau", "beta", "tau_expected", "beta_expected"],
    );
    reference.push(vec![
        1.0.into(),
        tau1.into(),
        beta1.into(),
        cfg.float("tau_expected").into(),
        cfg.float("beta_expected").into(),
    ]);

    let (head, tail) = (cfg.usize("head"), cfg.usize("tail"));
    let results = trials(cfg.seed(), cfg.usize("trials"), |_, rng| {
        let a = random_sequence(head, tail, rng)?;
        let c = required_constant(&a);
        let report = seq_check(&a, c)?;
        Ok((a, c, report))
    })?;
    let mut sequences = Table::new(
        "sequences",
        &[
            "trial",
            "c",
            "tau",
            "beta",
            "c_prime",
            "violations",
            "bound_failures",
            "naive_c_prime",
            "naive_bound_failures",
        ],
    );
    let mut bounds = Table::new("bounds", &["trial", "n", "partial", "bound"]);
    for (i, (a, c, r)) in results.iter().enumerate() {
        sequences.push(vec![
            i.into(),
            (*c).into(),
            r.tau.into(),
            r.beta.into(),
            r.c_prime.into(),
            r.violations.len().into(),
            r.bound_failures.len().into(),
            r.naive_c_prime.into(),
            r.naive_bound_failures.len().into(),
        ]);
        for n in a.start..=0 {
            let bound = r.c_prime * 2f64.powf(r.beta * n as f64);
            bounds.push(vec![i.into(), n.into(), a.partial(n).into(), bound.into()]);
        }
    }

    let betas = exponents.floats("beta");
    let cs = exponents.floats("c");
    let mut order: Vec<usize> = (0..cs.len()).collect();
    order.sort_by(|&i, &j| cs[i].total_cmp(&cs[j]));
    let decreasing = order.windows(2).all(|w| betas[w[1]] < betas[w[0]]);
    let worst = bounds
        .floats("partial")
        .iter()
        .zip(bounds.floats("bound"))
        .map(|(p, b)| if *p == 0.0 { 0.0 } else { p / b })
        .fold(0.0, f64::max);
    let verdicts = vec![
        Verdict::at_most(
            format!("tau at C = 1 ({tau1:.8})"),
            (reference.max("tau") - reference.max("tau_expected")).abs(),
            cfg.float("tau_tol"),
        ),
        Verdict::at_most(
            format!("beta at C = 1 ({beta1:.8})"),
            (reference.max("beta") - reference.max("beta_expected")).abs(),
            cfg.float("beta_tol"),
        ),
        Verdict::new("beta decreasing in C", decreasing, format!("{betas:.5?}")),
        Verdict::new(
            "hypothesis holds on every sequence",
            sequences.max("violations") <= 0.0,
            format!("{} sequences", sequences.rows.len()),
        ),
        Verdict::at_most(
            "worst A_n / (C' 2^(beta n)) - 1",
            worst - 1.0,
            cfg.float("bound_slack"),
        ),
    ];
    Ok((vec![exponents, reference, sequences, bounds], verdicts))
}
