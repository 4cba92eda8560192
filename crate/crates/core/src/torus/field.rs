use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Real samples of a function on a [`TorusGrid`].
///
/// Arithmetic operators act pointwise and panic when the operands live on
/// different grids; the public operators of this crate check grids up front
/// and report [`Error::GridMismatch`] instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    samples: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &TorusGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples on a grid of {}",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            grid: grid.clone(),
            samples,
        })
    }

    pub fn from_fn(grid: &TorusGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            samples: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Construction for samples known to be finite (results of operators on
    /// finite fields).
    pub(crate) fn from_raw(grid: &TorusGrid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self {
            grid: grid.clone(),
            samples,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(&self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_raw(
            &self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn shift(&self, offset: f64) -> Self {
        self.map(|v| v + offset)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `h · Σ f_i`.
    pub fn integral(&self) -> f64 {
        self.grid.spacing() * self.samples.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    pub fn remove_mean(&self) -> Self {
        self.shift(-self.mean())
    }

    /// `h · Σ f_i g_i`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.grid.spacing()
            * self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.grid.spacing() * self.samples.iter().map(|v| v.abs()).sum::<f64>()
    }
}

fn pointwise(a: &ScalarField, b: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
    assert_eq!(a.grid, b.grid, "pointwise operation on mismatched grids");
    ScalarField::from_raw(
        &a.grid,
        a.samples
            .iter()
            .zip(&b.samples)
            .map(|(&x, &y)| f(x, y))
            .collect(),
    )
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        pointwise(self, rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        pointwise(self, rhs, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: Self) -> ScalarField {
        pointwise(self, rhs, |a, b| a * b)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// `m` scalar components on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::ShapeMismatch("vector field needs m >= 1".into()))?;
        if components.iter().any(|c| c.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &TorusGrid, m: usize) -> Result<Self> {
        Self::new(vec![ScalarField::zeros(grid); m])
    }

    pub fn constant(grid: &TorusGrid, value: &[f64]) -> Result<Self> {
        Self::new(
            value
                .iter()
                .map(|&v| ScalarField::constant(grid, v))
                .collect(),
        )
    }

    pub(crate) fn from_raw(components: Vec<ScalarField>) -> Self {
        debug_assert!(!components.is_empty());
        Self { components }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &ScalarField {
        &self.components[a]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    /// Value at sample `i` as a vector in `R^m`.
    pub fn at(&self, i: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.samples()[i]).collect()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_raw(self.components.iter().map(f).collect())
    }

    pub fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(Self::from_raw(
            self.components.iter().map(f).collect::<Result<_>>()?,
        ))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField, &ScalarField) -> ScalarField,
    ) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_raw(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|c| c.scale(factor))
    }

    /// Pointwise Euclidean dot product.
    pub fn dot(&self, other: &Self) -> Result<ScalarField> {
        self.check(other)?;
        let mut acc = vec![0.0; self.grid().len()];
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((s, x), y) in acc.iter_mut().zip(a.samples()).zip(b.samples()) {
                *s += x * y;
            }
        }
        Ok(ScalarField::from_raw(self.grid(), acc))
    }

    /// Pointwise `|u(x_i)|²`.
    pub fn norm_sq(&self) -> ScalarField {
        self.dot(self).expect("self-compatible")
    }

    /// `max_i ||u(x_i)| - 1|`.
    pub fn unit_defect(&self) -> f64 {
        self.norm_sq()
            .samples()
            .iter()
            .fold(0.0, |m, v| m.max((v.sqrt() - 1.0).abs()))
    }

    /// Multiply every component by the scalar field `s` pointwise.
    pub fn mul_scalar(&self, s: &ScalarField) -> Result<Self> {
        if s.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(self.map(|c| c * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// `h · Σ_i |u(x_i)|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm().powi(2)).sum()
    }

    /// `h · Σ_i u(x_i) · v(x_i)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }
}

/// An `ℓ × m` matrix of scalar fields, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarField>,
}

impl MatrixField {
    pub fn new(rows: usize, cols: usize, entries: Vec<ScalarField>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.grid() != entries[0].grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Constant matrix field from a row-major array.
    pub fn constant(grid: &TorusGrid, rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values
                .iter()
                .map(|&v| ScalarField::constant(grid, v))
                .collect(),
        )
    }

    pub fn from_vector_rows(rows: Vec<VectorField>) -> Result<Self> {
        let cols = rows
            .first()
            .map(VectorField::dim)
            .ok_or_else(|| Error::ShapeMismatch("matrix needs at least one row".into()))?;
        if rows.iter().any(|r| r.dim() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        let n = rows.len();
        Self::new(
            n,
            cols,
            rows.into_iter()
                .flat_map(VectorField::into_components)
                .collect(),
        )
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, entries: Vec<ScalarField>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.entries[0].grid()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &ScalarField {
        &self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_raw(self.rows, self.cols, self.entries.iter().map(f).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|e| e.scale(factor))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch("matrix shapes differ".into()));
        }
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_raw(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.entry(r, c).clone());
            }
        }
        Self::from_raw(self.cols, self.rows, entries)
    }

    /// Pointwise matrix-vector product `(M v)(x) = M(x) v(x)`.
    pub fn apply(&self, v: &VectorField) -> Result<VectorField> {
        if v.dim() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to a {}-vector",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        if v.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let n = self.grid().len();
        let out = (0..self.rows)
            .map(|r| {
                let mut acc = vec![0.0; n];
                for c in 0..self.cols {
                    let q = self.entry(r, c).samples();
                    for ((s, a), b) in acc.iter_mut().zip(q).zip(v.component(c).samples()) {
                        *s += a * b;
                    }
                }
                ScalarField::from_raw(self.grid(), acc)
            })
            .collect();
        Ok(VectorField::from_raw(out))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs()))
    }
}

/// Fourier coefficients `c_k` of a field, stored in FFT order (see
/// [`TorusGrid`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients on a grid of {}",
                coeffs.len(),
                grid.len()
            )));
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Spectrum with `c_k = f(k)` for every representable mode.
    pub fn from_modes(grid: &TorusGrid, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.modes().into_iter().map(f).collect())
    }

    pub(crate) fn from_raw(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Coefficients in FFT storage order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of mode `k`; zero for modes the grid cannot represent.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .index_of(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Mode with the largest `|c_k|`-violation of Hermitian symmetry, if any
    /// exceeds `tol` (relative to the largest coefficient).
    pub fn hermitian_defect(&self, tol: f64) -> Option<i64> {
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let n = self.grid.len();
        let half = (n / 2) as i64;
        let bad = |d: f64| d > tol * scale;
        if bad(self.coeffs[0].im.abs()) {
            return Some(0);
        }
        if bad(self.coeffs[n / 2].im.abs()) {
            return Some(-half);
        }
        (1..half).find(|&k| {
            let a = self.coeff(k);
            let b = self.coeff(-k);
            bad((a - b.conj()).norm())
        })
    }
}
