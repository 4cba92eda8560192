//! Three-term commutators and the algebraic identities around them.
//!
//! For a matrix field `Q` (`ℓ × m`) and a vector field `u` (`m` components):
//!
//! ```text
//! T(Q,u) = Δ^{1/4}(Q Δ^{1/4}u) - Q Δ^{1/2}u + (Δ^{1/4}Q)(Δ^{1/4}u)
//! S(Q,u) = Δ^{1/4}(Q Δ^{1/4}u) - ℛ(Q ∇u) + ℛ((Δ^{1/4}Q)(ℛ Δ^{1/4}u))
//! R(Q,u) = Δ^{1/4}(Q Δ^{1/4}u) - Δ^{1/2}(Q u) + Δ^{1/4}((Δ^{1/4}Q) u)
//! S̃(Q,u) = Δ^{1/4}(Q Δ^{1/4}u) - ∇(Q ℛu) + ℛΔ^{1/4}((Δ^{1/4}Q)(ℛu))
//! ```
//!
//! Each individual term is only as regular as its factors; the combinations
//! cancel the worst frequency interactions. `ℛ` has symbol `-i sgn ξ`, see
//! [`crate::torus::riesz`].

use crate::error::{Error, Result};
use crate::norms::{
    bmo_vector, hardy, hardy_vector, neg_half_dual, neg_half_dual_vector, sobolev_sq_vector,
};
use crate::torus::{
    derivative, frac_laplacian_unchecked, riesz, MatrixField, ScalarField, VectorField,
};

const UNIT_TOL: f64 = 1e-9;

fn quarter(f: &ScalarField) -> ScalarField {
    frac_laplacian_unchecked(f, 0.25)
}

fn half(f: &ScalarField) -> ScalarField {
    frac_laplacian_unchecked(f, 0.5)
}

fn check(q: &MatrixField, u: &VectorField) -> Result<()> {
    if q.cols() != u.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix against a {}-vector",
            q.rows(),
            q.cols(),
            u.dim()
        )));
    }
    if q.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn check_unit(u: &VectorField) -> Result<()> {
    let defect = u.unit_defect();
    if defect >= UNIT_TOL {
        return Err(Error::NotUnit(defect));
    }
    Ok(())
}

/// `Δ^{1/4}(Q Δ^{1/4}u)`, the term shared by all four commutators.
fn leading(q: &MatrixField, u: &VectorField) -> VectorField {
    q.apply(&u.map(quarter))
        .expect("checked shapes")
        .map(quarter)
}

/// Matrix of the map `v ↦ u ∧ v`: row `(i, j)`, `i < j`, gives
/// `u_i v_j - u_j v_i`. Rows are ordered lexicographically.
pub fn wedge_matrix(u: &VectorField) -> Result<MatrixField> {
    let m = u.dim();
    if m < 2 {
        return Err(Error::ShapeMismatch(format!("wedge needs m >= 2, got {m}")));
    }
    let zero = ScalarField::zeros(u.grid());
    let mut rows = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let row: Vec<ScalarField> = (0..m)
                .map(|c| {
                    if c == j {
                        u.component(i).clone()
                    } else if c == i {
                        -u.component(j)
                    } else {
                        zero.clone()
                    }
                })
                .collect();
            rows.push(VectorField::new(row)?);
        }
    }
    MatrixField::from_vector_rows(rows)
}

/// Pair `(i, j)` labelling row `r` of [`wedge_matrix`].
pub fn wedge_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

/// `1 × m` matrix of the map `v ↦ u · v`.
pub fn dot_matrix(u: &VectorField) -> MatrixField {
    MatrixField::new(1, u.dim(), u.components().to_vec()).expect("m >= 1 on one grid")
}

pub fn op_t(q: &MatrixField, u: &VectorField) -> Result<VectorField> {
    check(q, u)?;
    let q4 = q.map(quarter);
    let u4 = u.map(quarter);
    let first = leading(q, u);
    let second = q.apply(&u.map(half))?;
    let third = q4.apply(&u4)?;
    first.sub(&second)?.add(&third)
}

pub fn op_s(q: &MatrixField, u: &VectorField) -> Result<VectorField> {
    check(q, u)?;
    let first = leading(q, u);
    let second = q.apply(&u.map(derivative))?.map(riesz);
    let third = q
        .map(quarter)
        .apply(&u.map(|c| riesz(&quarter(c))))?
        .map(riesz);
    first.sub(&second)?.add(&third)
}

pub fn op_r3(q: &MatrixField, u: &VectorField) -> Result<VectorField> {
    check(q, u)?;
    let first = leading(q, u);
    let second = q.apply(u)?.map(half);
    let third = q.map(quarter).apply(u)?.map(quarter);
    first.sub(&second)?.add(&third)
}

pub fn op_s_tilde(q: &MatrixField, u: &VectorField) -> Result<VectorField> {
    check(q, u)?;
    let ru = u.map(riesz);
    let first = leading(q, u);
    let second = q.apply(&ru)?.map(derivative);
    let third = q.map(quarter).apply(&ru)?.map(|c| riesz(&quarter(c)));
    first.sub(&second)?.add(&third)
}

/// `ℛ(Δ^{1/4}u · ℛΔ^{1/4}u)`.
pub fn anti_term(u: &VectorField) -> ScalarField {
    let u4 = u.map(quarter);
    let ru4 = u4.map(riesz);
    riesz(&u4.dot(&ru4).expect("same shape"))
}

/// `Δ^{1/4}(u · Δ^{1/4}u) - S(u·, u) + ℛ(Δ^{1/4}u · ℛΔ^{1/4}u)`.
///
/// Vanishes for sphere-valued maps; algebraically it equals `ℛ(u · ∇u)`,
/// which [`tangency_term`] evaluates directly.
pub fn structure_residual(u: &VectorField) -> Result<ScalarField> {
    check_unit(u)?;
    let dot = dot_matrix(u);
    let lhs = leading(&dot, u);
    let s = op_s(&dot, u)?;
    let anti = anti_term(u);
    Ok(&(lhs.component(0) - s.component(0)) + &anti)
}

/// `ℛ(u · ∇u)`, which is `½ ℛ∇|u|²` and zero for exactly unit maps.
pub fn tangency_term(u: &VectorField) -> ScalarField {
    riesz(&u.dot(&u.map(derivative)).expect("same shape"))
}

/// The two Euler–Lagrange forms evaluated on a unit map.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerForms {
    /// `u ∧ Δ^{1/2}u`, one component per pair `i < j`.
    pub wedge_form: VectorField,
    /// `Δ^{1/4}(u∧Δ^{1/4}u) - T(u∧, u) - u∧Δ^{1/2}u`; identically zero.
    pub commutator_gap: VectorField,
}

pub fn euler_residual_forms(u: &VectorField) -> Result<EulerForms> {
    check_unit(u)?;
    let w = wedge_matrix(u)?;
    let wedge_form = w.apply(&u.map(half))?;
    let lhs = leading(&w, u);
    let t = op_t(&w, u)?;
    let commutator_gap = lhs.sub(&t)?.sub(&wedge_form)?;
    Ok(EulerForms {
        wedge_form,
        commutator_gap,
    })
}

/// Ratios of commutator norms to the products of norms that bound them.
/// A field is `None` when its denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateRatios {
    /// `‖T‖_{Ḣ^{-1/2}} / (‖Q‖_{Ḣ^{1/2}} ‖u‖_{BMO})`.
    pub r_t: Option<f64>,
    /// `‖S‖_{Ḣ^{-1/2}} / (‖Q‖_{Ḣ^{1/2}} ‖u‖_{BMO})`.
    pub r_s: Option<f64>,
    /// `‖R‖_{ℋ¹} / (‖Q‖_{Ḣ^{1/2}} ‖u‖_{Ḣ^{1/2}})`.
    pub r_r3: Option<f64>,
    /// `‖S̃‖_{ℋ¹} / (‖Q‖_{Ḣ^{1/2}} ‖u‖_{Ḣ^{1/2}})`.
    pub r_s_tilde: Option<f64>,
    /// `‖Q Δ^{1/2}u‖_{Ḣ^{-1/2}} / (‖Q‖_{Ḣ^{1/2}} ‖u‖_{BMO})`: one term alone.
    pub r_lone: Option<f64>,
}

/// Denominators of [`EstimateRatios`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Denominators {
    pub q_half: f64,
    pub u_half: f64,
    pub u_bmo: f64,
}

pub fn denominators(q: &MatrixField, u: &VectorField) -> Denominators {
    Denominators {
        q_half: sobolev_sq_vector(q.entries(), 0.5).sqrt(),
        u_half: sobolev_sq_vector(u.components(), 0.5).sqrt(),
        u_bmo: bmo_vector(u),
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    // Relative floor: constants leave roundoff-level seminorms behind.
    (den > 1e-12).then(|| num / den)
}

pub fn estimate_ratios(q: &MatrixField, u: &VectorField) -> Result<EstimateRatios> {
    check(q, u)?;
    let d = denominators(q, u);
    let dual = |v: &VectorField| neg_half_dual_vector(v).norm;
    let bmo_den = d.q_half * d.u_bmo;
    let half_den = d.q_half * d.u_half;
    Ok(EstimateRatios {
        r_t: ratio(dual(&op_t(q, u)?), bmo_den),
        r_s: ratio(dual(&op_s(q, u)?), bmo_den),
        r_r3: ratio(hardy_vector(&op_r3(q, u)?), half_den),
        r_s_tilde: ratio(hardy_vector(&op_s_tilde(q, u)?), half_den),
        r_lone: ratio(dual(&q.apply(&u.map(half))?), bmo_den),
    })
}

/// `‖ℛ(Δ^{1/4}u · ℛΔ^{1/4}u)‖_{ℋ¹} / Σ_a ‖u_a‖²_{Ḣ^{1/2}}`.
pub fn anti_ratio(u: &VectorField) -> Option<f64> {
    ratio(hardy(&anti_term(u)), sobolev_sq_vector(u.components(), 0.5))
}

/// `‖ℛ(Δ^{1/4}u · ℛΔ^{1/4}u)‖_{Ḣ^{-1/2}} / Σ_a ‖u_a‖²_{Ḣ^{1/2}}`.
pub fn anti_dual_ratio(u: &VectorField) -> Option<f64> {
    ratio(
        neg_half_dual(&anti_term(u)).norm,
        sobolev_sq_vector(u.components(), 0.5),
    )
}
