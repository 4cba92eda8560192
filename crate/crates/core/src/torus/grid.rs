use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic sampling of the torus `[0, L)` with `N` points.
///
/// Numeric conventions (part of the public contract):
///
/// * sample points `x_i = i L / N`, `i = 0..N`;
/// * modes `k ∈ {-N/2, …, N/2 - 1}`, stored in FFT order: storage index `i`
///   holds mode `i` for `i < N/2` and mode `i - N` otherwise;
/// * angular frequency `ξ_k = 2πk / L`.
#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    period: f64,
    plans: Arc<Plans>,
}

impl TorusGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "sample count {n} must be a power of two >= 8"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period {period} must be positive"
            )));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Self {
            n,
            period,
            plans: Arc::new(plans),
        })
    }

    /// Grid on the standard `2π` torus.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Mode stored at FFT index `i`.
    pub fn mode_at(&self, i: usize) -> i64 {
        let half = self.n / 2;
        if i < half {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT storage index of mode `k`, if it is representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    pub fn modes(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.mode_at(i)).collect()
    }

    /// Mode `-N/2`, the only mode without a partner.
    pub fn nyquist(&self) -> i64 {
        -((self.n / 2) as i64)
    }

    pub fn xi(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period
    }

    pub fn max_abs_xi(&self) -> f64 {
        self.xi((self.n / 2) as i64)
    }

    /// Shortest periodic distance between two points.
    pub fn distance(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(self.period);
        d.min(self.period - d)
    }

    pub(crate) fn forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.forward
    }

    pub(crate) fn inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.inverse
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.period == other.period
    }
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish()
    }
}
