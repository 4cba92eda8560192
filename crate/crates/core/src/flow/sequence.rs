//! Dyadic decay of sequences satisfying a reverse-tail inequality
//! `Σ_{k≤n} a_k² ≤ C Σ_{k>n} 2^{(n+1-k)/2} a_k²` for every `n ≤ 0`.
//!
//! Writing `A_n = Σ_{k≤n} a_k²` the hypothesis is equivalent to
//! `A_n ≤ τ B_n` with `B_n = Σ_{k>n} 2^{(n+1-k)/2} A_k`, which iterates to
//! `A_n ≤ τ B_0 2^{βn}`.

use crate::error::{Error, Result};

const HALF_SQRT: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `τ = C(1 - 2^{-1/2})/(C + 1)` and `β = -log₂(τ + 2^{-1/2})`.
pub fn decay_exponent(c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!(
            "constant C = {c} must be positive"
        )));
    }
    let tau = c * (1.0 - HALF_SQRT) / (c + 1.0);
    Ok((tau, -(tau + HALF_SQRT).log2()))
}

/// `a_k` for `k = start, …, start + values.len() - 1`; zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSequence {
    pub start: i64,
    pub values: Vec<f64>,
}

impl DyadicSequence {
    pub fn new(start: i64, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Precondition(format!(
                "a_{} = {} is not a finite nonnegative number",
                start + i as i64,
                values[i]
            )));
        }
        Ok(Self { start, values })
    }

    fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    fn sq(&self, k: i64) -> f64 {
        if k < self.start || k >= self.end() {
            0.0
        } else {
            self.values[(k - self.start) as usize].powi(2)
        }
    }

    /// `A_n = Σ_{k≤n} a_k²`.
    pub fn partial(&self, n: i64) -> f64 {
        (self.start..=n.min(self.end() - 1))
            .map(|k| self.sq(k))
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `Σ_{k>n} 2^{(n+1-k)/2} a_k²`.
    pub fn weighted_tail(&self, n: i64) -> f64 {
        ((n + 1).max(self.start)..self.end())
            .map(|k| 2f64.powf((n + 1 - k) as f64 / 2.0) * self.sq(k))
            .sum()
    }

    /// `B_0 = Σ_{k≥1} 2^{(1-k)/2} A_k`; past the support `A_k` is the total
    /// and the geometric remainder is summed in closed form.
    pub fn b0(&self) -> f64 {
        let last = self.end().max(1);
        let head: f64 = (1..last)
            .map(|k| 2f64.powf((1 - k) as f64 / 2.0) * self.partial(k))
            .sum();
        head + self.total() * 2f64.powf((1 - last) as f64 / 2.0) / (1.0 - HALF_SQRT)
    }

    /// Indices `n ≤ 0` where the hypothesis can fail, i.e. `A_n > 0`.
    fn checked(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=0
    }
}

/// Smallest `C` for which the hypothesis holds at every `n ≤ 0`; infinite
/// when some `A_n > 0` has an empty weighted tail.
pub fn required_constant(a: &DyadicSequence) -> f64 {
    a.checked()
        .filter_map(|n| {
            let (lhs, tail) = (a.partial(n), a.weighted_tail(n));
            (lhs > 0.0).then(|| {
                if tail > 0.0 {
                    lhs / tail
                } else {
                    f64::INFINITY
                }
            })
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqReport {
    pub tau: f64,
    pub beta: f64,
    /// `n ≤ 0` where the hypothesis fails.
    pub violations: Vec<i64>,
    /// `τ B_0`.
    pub c_prime: f64,
    /// `n ≤ 0` with `A_n > C′ 2^{βn}`.
    pub bound_failures: Vec<i64>,
    /// `τ Σ a_k²`, a smaller constant that is not implied by the hypothesis.
    pub naive_c_prime: f64,
    pub naive_bound_failures: Vec<i64>,
}

impl SeqReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn conclusion_holds(&self) -> bool {
        self.bound_failures.is_empty()
    }
}

/// Relative slack for saturated inequalities.
const SLACK: f64 = 1e-12;

pub fn seq_check(a: &DyadicSequence, c: f64) -> Result<SeqReport> {
    let (tau, beta) = decay_exponent(c)?;
    let violations = a
        .checked()
        .filter(|&n| a.partial(n) > c * a.weighted_tail(n) * (1.0 + SLACK))
        .collect();
    let failures = |constant: f64| -> Vec<i64> {
        a.checked()
            .filter(|&n| a.partial(n) > constant * 2f64.powf(beta * n as f64) * (1.0 + SLACK))
            .collect()
    };
    let c_prime = tau * a.b0();
    let naive_c_prime = tau * a.total();
    Ok(SeqReport {
        tau,
        beta,
        violations,
        c_prime,
        bound_failures: failures(c_prime),
        naive_c_prime,
        naive_bound_failures: failures(naive_c_prime),
    })
}
