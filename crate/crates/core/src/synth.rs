//! Seeded band-limited test fields.
//!
//! Draws happen in a fixed mode order that does not depend on the grid, so
//! one seed describes the same continuous function at every resolution whose
//! Nyquist mode lies above the ceiling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus::{synthesize_raw, MatrixField, ScalarField, Spectrum, TorusGrid, VectorField};

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

/// Shape of a random trigonometric polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// Highest mode present.
    pub ceiling: usize,
    /// Amplitudes scale like `k^{-decay}`.
    pub decay: f64,
}

impl Band {
    pub fn new(ceiling: usize, decay: f64) -> Self {
        Self { ceiling, decay }
    }
}

/// Sum of `a_k cos(ξ_k x) + b_k sin(ξ_k x)` over `1 ≤ k ≤ ceiling` with
/// standard normal `a_k, b_k` scaled by `k^{-decay}`. Mean zero.
pub fn band_limited(grid: &TorusGrid, band: Band, rng: &mut impl rand::Rng) -> Result<ScalarField> {
    if band.ceiling == 0 || band.ceiling >= grid.len() / 2 {
        return Err(Error::Precondition(format!(
            "mode ceiling {} must lie in 1..{}",
            band.ceiling,
            grid.len() / 2
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 1..=band.ceiling {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        let w = (k as f64).powf(-band.decay);
        let c = Complex64::new(a * w, -b * w) * 0.5;
        let ki = k as i64;
        coeffs[grid.index_of(ki).expect("below nyquist")] = c;
        coeffs[grid.index_of(-ki).expect("below nyquist")] = c.conj();
    }
    Ok(synthesize_raw(&Spectrum::new(grid, coeffs)?))
}

pub fn band_limited_vector(
    grid: &TorusGrid,
    m: usize,
    band: Band,
    rng: &mut impl rand::Rng,
) -> Result<VectorField> {
    VectorField::new(
        (0..m)
            .map(|_| band_limited(grid, band, rng))
            .collect::<Result<_>>()?,
    )
}

pub fn band_limited_matrix(
    grid: &TorusGrid,
    rows: usize,
    cols: usize,
    band: Band,
    rng: &mut impl rand::Rng,
) -> Result<MatrixField> {
    MatrixField::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| band_limited(grid, band, rng))
            .collect::<Result<_>>()?,
    )
}
