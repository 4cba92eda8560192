//! Fourier analysis/synthesis and the multiplier operators built on it.
//!
//! Coefficient convention: `c_k = (1/N) Σ_i f_i e^{-iξ_k x_i}` and
//! `f_i = Σ_k c_k e^{iξ_k x_i}`.
//!
//! Homogeneous symbols (`|ξ|^{2s}`, `-i sgn ξ`) vanish at `k = 0`. Odd symbols
//! (`iξ`, `-i sgn ξ`) also vanish at the unpaired mode `-N/2`, where a purely
//! imaginary multiplier cannot produce a real field. Identities such as
//! `ℛ∇ = Δ^{1/2}` and `ℛ² = -Id` therefore hold exactly on fields without a
//! `-N/2` component.

use rustfft::num_complex::Complex64;

use super::field::{ScalarField, Spectrum};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

pub fn analyze(f: &ScalarField) -> Result<Spectrum> {
    if let Some(i) = f.samples().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(analyze_raw(f))
}

pub(crate) fn analyze_raw(f: &ScalarField) -> Spectrum {
    let grid = f.grid();
    let n = grid.len() as f64;
    let mut buf: Vec<Complex64> = f
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    grid.forward().process(&mut buf);
    for c in &mut buf {
        *c /= n;
    }
    Spectrum::from_raw(grid, buf)
}

/// Real field with the given coefficients. The spectrum must be Hermitian.
pub fn synthesize(c: &Spectrum) -> Result<ScalarField> {
    if let Some(k) = c.hermitian_defect(HERMITIAN_TOL) {
        return Err(Error::ComplexOutput(k));
    }
    Ok(synthesize_raw(c))
}

pub(crate) fn synthesize_raw(c: &Spectrum) -> ScalarField {
    let grid = c.grid();
    let mut buf = c.coeffs().to_vec();
    grid.inverse().process(&mut buf);
    ScalarField::from_raw(grid, buf.into_iter().map(|z| z.re).collect())
}

/// Multiply `c_k` by `symbol(k)` in place.
pub(crate) fn scale_spectrum(c: &mut Spectrum, symbol: impl Fn(i64) -> Complex64) {
    let grid = c.grid().clone();
    for (i, z) in c.coeffs_mut().iter_mut().enumerate() {
        *z *= symbol(grid.mode_at(i));
    }
}

/// Apply a symbol known to be Hermitian.
pub(crate) fn multiply(f: &ScalarField, symbol: impl Fn(i64) -> Complex64) -> ScalarField {
    let mut c = analyze_raw(f);
    scale_spectrum(&mut c, symbol);
    synthesize_raw(&c)
}

/// Apply a real even symbol `μ(|k|)`.
pub(crate) fn multiply_real(f: &ScalarField, symbol: impl Fn(i64) -> f64) -> ScalarField {
    multiply(f, |k| Complex64::new(symbol(k), 0.0))
}

/// Generic Fourier multiplier `c_k ↦ μ(k) c_k`.
///
/// The symbol must satisfy `μ(-k) = conj(μ(k))` and be real at `k = 0` and
/// `k = -N/2`, otherwise the image is not a real field.
pub fn apply_multiplier(f: &ScalarField, symbol: impl Fn(i64) -> Complex64) -> Result<ScalarField> {
    let grid = f.grid();
    let half = (grid.len() / 2) as i64;
    let table: Vec<Complex64> = grid.modes().into_iter().map(&symbol).collect();
    let scale = table.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let tol = HERMITIAN_TOL * scale;
    let at = |k: i64| table[grid.index_of(k).expect("representable mode")];
    if at(0).im.abs() > tol {
        return Err(Error::ComplexOutput(0));
    }
    if at(-half).im.abs() > tol {
        return Err(Error::ComplexOutput(-half));
    }
    if let Some(k) = (1..half).find(|&k| (at(-k) - at(k).conj()).norm() > tol) {
        return Err(Error::ComplexOutput(k));
    }
    let mut c = analyze(f)?;
    for (z, m) in c.coeffs_mut().iter_mut().zip(&table) {
        *z *= m;
    }
    Ok(synthesize_raw(&c))
}

/// Symbol of `Δ^s`: `|ξ_k|^{2s}`, zero at `k = 0`.
pub fn frac_laplacian_symbol(grid: &super::TorusGrid, s: f64) -> impl Fn(i64) -> f64 + '_ {
    move |k| {
        if k == 0 {
            0.0
        } else {
            grid.xi(k).abs().powf(2.0 * s)
        }
    }
}

/// `Δ^s f`, the multiplier `|ξ|^{2s}` with the zero mode annihilated.
pub fn frac_laplacian(f: &ScalarField, s: f64) -> Result<ScalarField> {
    if !(-2.0..=2.0).contains(&s) {
        return Err(Error::Precondition(format!(
            "order s = {s} outside [-2, 2]"
        )));
    }
    Ok(frac_laplacian_unchecked(f, s))
}

pub(crate) fn frac_laplacian_unchecked(f: &ScalarField, s: f64) -> ScalarField {
    let grid = f.grid().clone();
    multiply_real(f, frac_laplacian_symbol(&grid, s))
}

fn odd_symbol(nyquist: i64, k: i64, value: f64) -> Complex64 {
    if k == 0 || k == nyquist {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, value)
    }
}

/// Hilbert-type transform `ℛ` with symbol `-i sgn(k)`, so that `ℛ∇ = Δ^{1/2}`.
pub fn riesz(f: &ScalarField) -> ScalarField {
    let nyq = f.grid().nyquist();
    multiply(f, |k| odd_symbol(nyq, k, -(k.signum() as f64)))
}

/// Spectral derivative, symbol `iξ_k`.
pub fn derivative(f: &ScalarField) -> ScalarField {
    let grid = f.grid().clone();
    let nyq = grid.nyquist();
    multiply(f, |k| odd_symbol(nyq, k, grid.xi(k)))
}

pub fn integral(f: &ScalarField) -> f64 {
    f.integral()
}

pub fn mean(f: &ScalarField) -> f64 {
    f.mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TorusGrid;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::standard(n).unwrap()
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        (a - b).max_abs()
    }

    fn wiggly(g: &TorusGrid) -> ScalarField {
        ScalarField::from_fn(g, |x| (x.sin() * 2.0).exp() + (5.0 * x).cos() * 0.3 - 1.0).unwrap()
    }

    #[test]
    fn cosine_coefficients() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x| (3.0 * x).cos()).unwrap();
        let c = analyze(&f).unwrap();
        for k in -16i64..16 {
            let want = if k.abs() == 3 { 0.5 } else { 0.0 };
            assert!(
                (c.coeff(k) - Complex64::new(want, 0.0)).norm() < 1e-14,
                "k={k}"
            );
        }
    }

    #[test]
    fn constant_coefficients() {
        let g = grid(16);
        let c = analyze(&ScalarField::constant(&g, 5.0)).unwrap();
        assert!((c.coeff(0).re - 5.0).abs() < 1e-14);
        assert!(c.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid(8);
        assert!(ScalarField::new(&g, vec![f64::NAN; 8]).is_err());
        let bad = Spectrum::new(&g, vec![Complex64::new(f64::INFINITY, 0.0); 8]);
        assert!(matches!(bad, Err(Error::NonFinite(0))));
    }

    #[test]
    fn synthesize_rejects_non_hermitian() {
        let g = grid(8);
        let c = Spectrum::from_modes(&g, |k| {
            if k == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        assert_eq!(synthesize(&c), Err(Error::ComplexOutput(1)));
    }

    #[test]
    fn multiplier_identity_and_derivative() {
        let g = grid(64);
        let f = wiggly(&g);
        let same = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(max_diff(&same, &f) < 1e-13);

        let k = 4.0;
        let c = ScalarField::from_fn(&g, |x| (k * x).cos()).unwrap();
        let nyq = g.nyquist();
        let d = apply_multiplier(&c, |m| odd_symbol(nyq, m, g.xi(m))).unwrap();
        let want = ScalarField::from_fn(&g, |x| -k * (k * x).sin()).unwrap();
        assert!(max_diff(&d, &want) < 1e-12);
    }

    #[test]
    fn multiplier_rejects_non_hermitian() {
        let g = grid(16);
        let f = wiggly(&g);
        let err = apply_multiplier(&f, |k| Complex64::new(0.0, k as f64)).unwrap_err();
        assert_eq!(err, Error::ComplexOutput(-8));
        let err = apply_multiplier(&f, |k| Complex64::new(k as f64, 0.0)).unwrap_err();
        assert_eq!(err, Error::ComplexOutput(1));
    }

    #[test]
    fn multipliers_compose() {
        let g = grid(128);
        let f = wiggly(&g);
        let a = |k: i64| Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0);
        let b = |k: i64| Complex64::new((k as f64).cos(), 0.0);
        let two = apply_multiplier(&apply_multiplier(&f, a).unwrap(), b).unwrap();
        let one = apply_multiplier(&f, |k| a(k) * b(k)).unwrap();
        assert!(max_diff(&two, &one) < 1e-12);
    }

    #[test]
    fn half_laplacian_eigenfunction() {
        let g = grid(64);
        let f = ScalarField::from_fn(&g, |x| (3.0 * x).cos()).unwrap();
        let d = frac_laplacian(&f, 0.5).unwrap();
        assert!(max_diff(&d, &f.scale(3.0)) < 1e-12);
        for s in [-1.5, -0.5, 0.25, 1.0, 2.0] {
            let z = frac_laplacian(&ScalarField::constant(&g, 2.5), s).unwrap();
            assert!(z.max_abs() < 1e-14);
        }
        assert!(frac_laplacian(&f, 2.5).is_err());
    }

    #[test]
    fn quarter_laplacian_twice() {
        let g = grid(256);
        let f = wiggly(&g);
        let q = frac_laplacian(&frac_laplacian(&f, 0.25).unwrap(), 0.25).unwrap();
        let h = frac_laplacian(&f, 0.5).unwrap();
        assert!(max_diff(&q, &h) < 1e-12 * h.max_abs());
    }

    #[test]
    fn riesz_examples() {
        let g = grid(64);
        for k in 1..10 {
            let kf = k as f64;
            let c = ScalarField::from_fn(&g, |x| (kf * x).cos()).unwrap();
            let s = ScalarField::from_fn(&g, |x| (kf * x).sin()).unwrap();
            assert!(max_diff(&riesz(&c), &s) < 1e-13);
            let lhs = riesz(&derivative(&c));
            let rhs = frac_laplacian(&c, 0.5).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
        assert!(riesz(&ScalarField::constant(&g, 7.0)).max_abs() < 1e-14);
        let f = wiggly(&g).remove_mean();
        let rr = riesz(&riesz(&f));
        // wiggly has a tiny Nyquist tail, so compare against the tail-free part.
        let mut c = analyze(&f).unwrap();
        c.coeffs_mut()[32] = Complex64::new(0.0, 0.0);
        let f0 = synthesize_raw(&c);
        assert!(max_diff(&rr, &-&f0) < 1e-12);
    }

    #[test]
    fn derivative_and_integral() {
        let g = grid(64);
        let s = ScalarField::from_fn(&g, |x| (2.0 * x).sin()).unwrap();
        let c2 = ScalarField::from_fn(&g, |x| 2.0 * (2.0 * x).cos()).unwrap();
        assert!(max_diff(&derivative(&s), &c2) < 1e-12);
        assert!(derivative(&ScalarField::constant(&g, 3.0)).max_abs() < 1e-14);
        assert!((integral(&ScalarField::constant(&g, 1.0)) - 2.0 * PI).abs() < 1e-13);
        let c = ScalarField::from_fn(&g, |x| (5.0 * x).cos()).unwrap();
        assert!(integral(&c).abs() < 1e-13);
        assert!((mean(&ScalarField::constant(&g, 4.0)) - 4.0).abs() < 1e-15);
    }
}
