//! Sphere-valued maps, their L-energy `Σ_a ‖u_a‖²_{Ḣ^{1/2}}` and a projected
//! gradient flow towards half-harmonic maps.
//!
//! A discrete map is treated as half-harmonic once the Euler–Lagrange
//! residual `u ∧ Δ^{1/2}u`, measured in `Ḣ^{-1/2}`, drops below tolerance.

mod morrey;
mod sequence;

pub use morrey::{
    annuli_constant, dyadic_radii, fit_beta, morrey_profile, AnnuliForm, AnnuliReport, MorreyPoint,
};
pub use sequence::{decay_exponent, required_constant, seq_check, DyadicSequence, SeqReport};

use crate::commutators::wedge_matrix;
use crate::error::{Error, Result};
use crate::norms::{neg_half_dual, sobolev_sq_vector};
use crate::synth::{band_limited_vector, trial_rng, Band};
use crate::torus::{frac_laplacian_unchecked, ScalarField, TorusGrid, VectorField};

/// Pointwise unit tolerance enforced at construction.
pub const UNIT_TOL: f64 = 1e-12;

/// Normalization refuses to divide by smaller lengths.
const MIN_LENGTH: f64 = 0.5;

/// A map into the unit sphere `S^{m-1}`, `m ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField(VectorField);

impl SphereField {
    pub fn new(u: VectorField) -> Result<Self> {
        if u.dim() < 2 {
            return Err(Error::ShapeMismatch(format!(
                "sphere target needs m >= 2, got {}",
                u.dim()
            )));
        }
        let defect = u.unit_defect();
        if defect > UNIT_TOL {
            return Err(Error::NotUnit(defect));
        }
        Ok(Self(u))
    }

    /// Pointwise normalization `v / |v|`, refused when some `|v(x_i)| < 1/2`.
    pub fn project(v: &VectorField) -> Result<Self> {
        let len = v.norm_sq().map(f64::sqrt);
        if let Some(&m) = len.samples().iter().find(|&&l| l < MIN_LENGTH) {
            return Err(Error::Degenerate(format!(
                "cannot normalize a vector of length {m:.3e}"
            )));
        }
        Self::new(v.mul_scalar(&len.map(|l| 1.0 / l))?)
    }

    pub fn field(&self) -> &VectorField {
        &self.0
    }

    pub fn into_field(self) -> VectorField {
        self.0
    }

    pub fn grid(&self) -> &TorusGrid {
        self.0.grid()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

fn half(f: &ScalarField) -> ScalarField {
    frac_laplacian_unchecked(f, 0.5)
}

/// L-energy `∫ |Δ^{1/4}u|²`.
pub fn l_energy(u: &SphereField) -> f64 {
    sobolev_sq_vector(u.field().components(), 0.5)
}

/// `L(v) - L(u) = ∫ (v - u)·Δ^{1/2}(v + u)`, free of the cancellation in a
/// plain difference of energies.
fn energy_delta(u: &VectorField, v: &VectorField) -> f64 {
    let diff = v.sub(u).expect("same shape");
    let sum = v.add(u).expect("same shape");
    diff.inner(&sum.map(half)).expect("same shape")
}

/// `(cos ξ_k x, sin ξ_k x, 0, …, 0)` with `m` components.
pub fn degree_map(k: i64, m: usize, grid: &TorusGrid) -> Result<SphereField> {
    if m < 2 {
        return Err(Error::ShapeMismatch(format!(
            "degree map needs m >= 2, got {m}"
        )));
    }
    let w = grid.xi(k);
    let mut comps = vec![
        ScalarField::from_fn(grid, |x| (w * x).cos())?,
        ScalarField::from_fn(grid, |x| (w * x).sin())?,
    ];
    comps.resize(m, ScalarField::zeros(grid));
    SphereField::new(VectorField::new(comps)?)
}

/// Adds band-limited noise, projected onto the tangent space and scaled to
/// pointwise size at most `amplitude`, then renormalizes.
pub fn perturb(u: &SphereField, amplitude: f64, band: Band, seed: u64) -> Result<SphereField> {
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::Precondition(format!(
            "perturbation amplitude {amplitude} outside [0, 0.5)"
        )));
    }
    let noise = band_limited_vector(u.grid(), u.dim(), band, &mut trial_rng(seed, 0))?;
    let tangent = tangent_part(u.field(), &noise);
    let size = tangent
        .norm_sq()
        .samples()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.sqrt()));
    if size == 0.0 {
        return Ok(u.clone());
    }
    SphereField::project(&u.field().add(&tangent.scale(amplitude / size))?)
}

/// `v - (v·u) u`.
fn tangent_part(u: &VectorField, v: &VectorField) -> VectorField {
    let along = v.dot(u).expect("same shape");
    v.sub(&u.mul_scalar(&along).expect("same grid"))
        .expect("same shape")
}

/// L²-gradient `2Δ^{1/2}u` of the L-energy, projected onto the tangent space.
pub fn tangential_gradient(u: &SphereField) -> VectorField {
    let g = u.field().map(half).scale(2.0);
    tangent_part(u.field(), &g)
}

/// Euler–Lagrange residual of a unit map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElResidual {
    /// Sum over pairs `i < j` of `‖(u ∧ Δ^{1/2}u)_{ij}‖_{Ḣ^{-1/2}}`.
    pub dual: f64,
    /// `∫ |u ∧ Δ^{1/2}u|²`.
    pub l2: f64,
}

pub fn el_residual(u: &SphereField) -> ElResidual {
    let w = wedge_matrix(u.field()).expect("m >= 2");
    let form = w.apply(&u.field().map(half)).expect("matching shapes");
    ElResidual {
        dual: form
            .components()
            .iter()
            .map(|c| neg_half_dual(c).norm)
            .sum(),
        l2: form.l2_norm_sq(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    /// First trial step in units of `1 / max|ξ|`.
    pub initial_step: f64,
    /// Step shrink factor on rejection.
    pub backtrack: f64,
    /// Armijo constant: accept when `ΔL ≤ -c τ ‖g‖²`.
    pub sufficient_decrease: f64,
    pub max_iters: usize,
    /// Stop once the dual residual falls below this.
    pub tolerance: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            backtrack: 0.5,
            sufficient_decrease: 1e-4,
            max_iters: 5000,
            tolerance: 1e-7,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.initial_step, self.sufficient_decrease, self.tolerance]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive || !(self.backtrack > 0.0 && self.backtrack < 1.0) || self.max_iters == 0 {
            return Err(Error::Precondition(format!(
                "invalid flow parameters {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    Converged,
    MaxIters,
    /// No step length down to roundoff passed the decrease test.
    Stalled,
}

/// State at the start of one iteration and the step taken from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStep {
    pub energy: f64,
    /// `L(u_next) - L(u)` evaluated without cancellation; zero if rejected.
    pub energy_change: f64,
    pub residual: f64,
    pub step: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub steps: Vec<FlowStep>,
    pub status: FlowStatus,
    pub final_energy: f64,
    pub final_residual: ElResidual,
}

impl FlowReport {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Every accepted step lowers the energy, and the recomputed totals never
    /// rise by more than roundoff. Late steps lower the energy by less than
    /// its last bit, so strictness is read off the step differences.
    pub fn is_monotone(&self) -> bool {
        let strict = self
            .steps
            .iter()
            .filter(|s| s.accepted)
            .all(|s| s.energy_change < 0.0);
        let mut energies: Vec<f64> = self.steps.iter().map(|s| s.energy).collect();
        energies.push(self.final_energy);
        let slack = 1e-12 * energies[0].abs().max(1.0);
        strict && energies.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Smallest trial step relative to the first one before giving up.
const MIN_STEP_RATIO: f64 = 1e-12;

/// Projected gradient descent with Armijo backtracking. Every iteration
/// restarts from the full step.
pub fn solve(u0: &SphereField, params: &FlowParams) -> Result<(SphereField, FlowReport)> {
    params.validate()?;
    let grid = u0.grid().clone();
    let tau0 = params.initial_step / grid.max_abs_xi();
    let mut u = u0.clone();
    let mut energy = l_energy(&u);
    let mut residual = el_residual(&u);
    let mut steps = Vec::new();
    let mut status = FlowStatus::MaxIters;

    for _ in 0..params.max_iters {
        if residual.dual < params.tolerance {
            status = FlowStatus::Converged;
            break;
        }
        let g = tangential_gradient(&u);
        let g_sq = g.l2_norm_sq();
        let mut tau = tau0;
        let mut next = None;
        let mut change = 0.0;
        while tau >= tau0 * MIN_STEP_RATIO {
            if let Ok(v) = SphereField::project(&u.field().sub(&g.scale(tau))?) {
                let de = energy_delta(u.field(), v.field());
                if de < 0.0 && de <= -params.sufficient_decrease * tau * g_sq {
                    next = Some(v);
                    change = de;
                    break;
                }
            }
            tau *= params.backtrack;
        }
        let accepted = next.is_some();
        steps.push(FlowStep {
            energy,
            energy_change: change,
            residual: residual.dual,
            step: tau,
            accepted,
        });
        match next {
            Some(v) => {
                u = v;
                energy = l_energy(&u);
                residual = el_residual(&u);
            }
            None => {
                status = FlowStatus::Stalled;
                break;
            }
        }
    }
    if status == FlowStatus::MaxIters && residual.dual < params.tolerance {
        status = FlowStatus::Converged;
    }
    Ok((
        u,
        FlowReport {
            steps,
            status,
            final_energy: energy,
            final_residual: residual,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::standard(n).unwrap()
    }

    #[test]
    fn sphere_field_checks_unit_length() {
        let g = grid(32);
        assert!(SphereField::new(VectorField::constant(&g, &[0.6, 0.8]).unwrap()).is_ok());
        assert!(matches!(
            SphereField::new(VectorField::constant(&g, &[0.6, 0.9]).unwrap()),
            Err(Error::NotUnit(_))
        ));
        assert!(SphereField::new(VectorField::constant(&g, &[1.0]).unwrap()).is_err());
        assert!(SphereField::project(&VectorField::constant(&g, &[0.3, 0.0]).unwrap()).is_err());
        let p = SphereField::project(&VectorField::constant(&g, &[3.0, 4.0]).unwrap()).unwrap();
        assert!((p.field().at(0)[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn energy_of_degree_maps() {
        let g = grid(256);
        for k in 0..=5i64 {
            let u = degree_map(k, 3, &g).unwrap();
            assert!((l_energy(&u) - 2.0 * PI * k as f64).abs() < 1e-10);
        }
        let c = degree_map(0, 2, &g).unwrap();
        assert_eq!(c.field().at(7), vec![1.0, 0.0]);
        assert!(degree_map(1, 1, &g).is_err());
    }

    #[test]
    fn energy_spectral_and_physical_agree() {
        let g = grid(256);
        let u = perturb(&degree_map(2, 3, &g).unwrap(), 0.3, Band::new(10, 0.5), 4).unwrap();
        let quarter = u.field().map(|c| frac_laplacian_unchecked(c, 0.25));
        assert!((l_energy(&u) - quarter.l2_norm_sq()).abs() < 1e-10);
        let v = perturb(&u, 0.1, Band::new(6, 0.0), 5).unwrap();
        let direct = l_energy(&v) - l_energy(&u);
        assert!((energy_delta(u.field(), v.field()) - direct).abs() < 1e-10);
    }

    #[test]
    fn perturb_contract() {
        let g = grid(128);
        let u = degree_map(1, 2, &g).unwrap();
        let same = perturb(&u, 0.0, Band::new(8, 1.0), 3).unwrap();
        assert!(same.field().sub(u.field()).unwrap().max_abs() < 1e-15);
        let p = perturb(&u, 0.4, Band::new(8, 1.0), 3).unwrap();
        assert!(p.field().unit_defect() <= UNIT_TOL);
        assert!(p.field().sub(u.field()).unwrap().max_abs() > 0.1);
        assert!(perturb(&u, 0.5, Band::new(8, 1.0), 3).is_err());
    }

    #[test]
    fn tangential_gradient_examples() {
        let g = grid(256);
        assert!(tangential_gradient(&degree_map(1, 2, &g).unwrap()).max_abs() < 1e-10);
        assert!(tangential_gradient(&degree_map(0, 3, &g).unwrap()).max_abs() < 1e-14);
        let u = perturb(&degree_map(3, 3, &g).unwrap(), 0.4, Band::new(20, 0.3), 9).unwrap();
        let t = tangential_gradient(&u);
        assert!(t.dot(u.field()).unwrap().max_abs() < 1e-10);
        assert!(t.max_abs() > 1e-3);
    }

    #[test]
    fn residual_on_critical_and_perturbed_maps() {
        let g = grid(256);
        for k in 0..=8 {
            let r = el_residual(&degree_map(k, 2, &g).unwrap());
            assert!(r.dual <= 1e-10 && r.l2 <= 1e-20);
        }
        let p = perturb(&degree_map(1, 2, &g).unwrap(), 0.2, Band::new(8, 1.0), 7).unwrap();
        assert!(el_residual(&p).dual > 1e-3);
    }

    #[test]
    fn critical_points_are_fixed() {
        let g = grid(128);
        for k in [0, 1, 3] {
            let u = degree_map(k, 2, &g).unwrap();
            let (v, report) = solve(&u, &FlowParams::default()).unwrap();
            assert_eq!(report.status, FlowStatus::Converged);
            assert_eq!(report.iterations(), 0);
            assert_eq!(v, u);
        }
    }

    #[test]
    fn flow_reaches_the_degree_one_energy() {
        let g = grid(512);
        let u0 = perturb(&degree_map(1, 2, &g).unwrap(), 0.2, Band::new(8, 1.0), 7).unwrap();
        let (u, report) = solve(&u0, &FlowParams::default()).unwrap();
        assert_eq!(report.status, FlowStatus::Converged);
        assert!(report.is_monotone());
        assert!(report.steps.iter().all(|s| s.accepted));
        assert!((report.final_energy - 2.0 * PI).abs() < 1e-4);
        assert!(el_residual(&u).dual < 1e-6);
        assert!(u.field().unit_defect() <= UNIT_TOL);
    }

    #[test]
    fn params_are_validated() {
        let bad = FlowParams {
            backtrack: 1.0,
            ..FlowParams::default()
        };
        assert!(bad.validate().is_err());
        let g = grid(32);
        assert!(solve(&degree_map(1, 2, &g).unwrap(), &bad).is_err());
    }
}
