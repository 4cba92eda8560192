use super::SphereField;
use crate::error::{Error, Result};
use crate::norms::{local_l2_sq_vector, Region};
use crate::torus::{frac_laplacian_unchecked, MatrixField, TorusGrid, VectorField};

/// One sample `(r, ∫_{B_r(x0)} |Δ^{1/4}u|²)` of a Morrey profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorreyPoint {
    pub radius: f64,
    pub energy: f64,
}

fn quarter(u: &VectorField) -> VectorField {
    u.map(|c| frac_laplacian_unchecked(c, 0.25))
}

/// Powers of two in `[4h, L/4]`.
pub fn dyadic_radii(grid: &TorusGrid) -> Vec<f64> {
    let lo = (4.0 * grid.spacing()).log2().ceil() as i32;
    let hi = (grid.period() / 4.0).log2().floor() as i32;
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

pub fn morrey_profile(u: &SphereField, x0: f64, radii: &[f64]) -> Result<Vec<MorreyPoint>> {
    let grid = u.grid();
    let (lo, hi) = (4.0 * grid.spacing(), grid.period() / 4.0);
    for &r in radii {
        if !(r >= lo && r <= hi) || r.log2().fract() != 0.0 {
            return Err(Error::Precondition(format!(
                "radius {r} is not a power of two in [{lo}, {hi}]"
            )));
        }
    }
    let density = quarter(u.field());
    radii
        .iter()
        .map(|&r| {
            Ok(MorreyPoint {
                radius: r,
                energy: local_l2_sq_vector(&density, &Region::ball(x0, r))?,
            })
        })
        .collect()
}

/// Least-squares slope of `log E` against `log r`.
pub fn fit_beta(profile: &[MorreyPoint]) -> Result<f64> {
    if profile.len() < 3 {
        return Err(Error::Precondition(format!(
            "slope fit needs at least 3 radii, got {}",
            profile.len()
        )));
    }
    if let Some(p) = profile
        .iter()
        .find(|p| p.energy.is_nan() || p.energy <= 0.0)
    {
        return Err(Error::Degenerate(format!(
            "energy {} at radius {} has no logarithm",
            p.energy, p.radius
        )));
    }
    let xs: Vec<f64> = profile.iter().map(|p| p.radius.ln()).collect();
    let ys: Vec<f64> = profile.iter().map(|p| p.energy.ln()).collect();
    Ok(ls_slope(&xs, &ys))
}

pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Which energy-decrease inequality to measure.
#[derive(Debug, Clone, PartialEq)]
pub enum AnnuliForm {
    /// `‖MΔ^{1/4}u‖²(B) - ¼‖Δ^{1/4}u‖²(B)` against
    /// `Σ_h 2^{(k-h)/2} (‖MΔ^{1/4}u‖²(A_h) + ‖Δ^{1/4}u‖²(A_h))`.
    Matrix(MatrixField),
    /// `‖Δ^{1/4}u‖²(B)` against `Σ_h 2^{(k-h)/2} ‖Δ^{1/4}u‖²(A_h)`.
    Combined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnuliReport {
    /// `(k, LHS_k / RHS_k)` for every `k` in range.
    pub ratios: Vec<(i32, f64)>,
    /// Smallest admissible constant, `max(0, max_k ratio)`.
    pub constant: f64,
    /// Relative spread of `C(k_lo) = max(0, max_{k ≥ k_lo} ratio_k)` as the
    /// lower end of the range moves up; zero when every `C(k_lo)` vanishes.
    pub drift: f64,
}

/// `[⌈log₂ 8h⌉, ⌊log₂ L/8⌋]`.
pub fn default_k_range(grid: &TorusGrid) -> (i32, i32) {
    (
        (8.0 * grid.spacing()).log2().ceil() as i32,
        (grid.period() / 8.0).log2().floor() as i32,
    )
}

/// Measures the constant in the energy-decrease inequality on balls
/// `B_{2^k}(x0)` and annuli `A_h = B_{2^{h+1}} \ B_{2^{h-1}}`, `h ≥ k`,
/// truncated at `2^h ≤ L/4`. `k_range` defaults to [`default_k_range`].
pub fn annuli_constant(
    u: &SphereField,
    form: &AnnuliForm,
    x0: f64,
    k_range: Option<(i32, i32)>,
) -> Result<AnnuliReport> {
    let grid = u.grid();
    let (k_lo, k_hi) = k_range.unwrap_or_else(|| default_k_range(grid));
    let h_max = (grid.period() / 4.0).log2().floor() as i32;
    if k_lo > k_hi || k_hi > h_max {
        return Err(Error::Precondition(format!(
            "k range [{k_lo}, {k_hi}] is empty or exceeds {h_max}"
        )));
    }
    let du = quarter(u.field());
    let mdu = match form {
        AnnuliForm::Matrix(m) => {
            if m.grid() != grid {
                return Err(Error::GridMismatch);
            }
            Some(m.apply(&du)?)
        }
        AnnuliForm::Combined => None,
    };
    let mass = |region: &Region| -> Result<(f64, f64)> {
        let plain = local_l2_sq_vector(&du, region)?;
        let matrix = match &mdu {
            Some(v) => local_l2_sq_vector(v, region)?,
            None => 0.0,
        };
        Ok((plain, matrix))
    };
    let annuli: Vec<(f64, f64)> = (k_lo..=h_max)
        .map(|h| mass(&Region::annulus(x0, h)))
        .collect::<Result<_>>()?;

    let mut ratios = Vec::new();
    for k in k_lo..=k_hi {
        let (plain, matrix) = mass(&Region::ball(x0, 2f64.powi(k)))?;
        let lhs = if mdu.is_some() {
            matrix - 0.25 * plain
        } else {
            plain
        };
        let rhs: f64 = (k..=h_max)
            .map(|h| {
                let (p, m) = annuli[(h - k_lo) as usize];
                2f64.powf(f64::from(k - h) / 2.0) * (p + m)
            })
            .sum();
        if rhs > 0.0 {
            ratios.push((k, lhs / rhs));
        }
    }
    if ratios.is_empty() {
        return Err(Error::Degenerate("every annulus sum vanishes".into()));
    }
    let running: Vec<f64> = (0..ratios.len())
        .map(|i| ratios[i..].iter().fold(0.0f64, |m, r| m.max(r.1)))
        .collect();
    let constant = running[0];
    let least = running.iter().cloned().fold(f64::INFINITY, f64::min);
    let drift = if constant > 0.0 {
        (constant - least) / constant
    } else {
        0.0
    };
    Ok(AnnuliReport {
        ratios,
        constant,
        drift,
    })
}
