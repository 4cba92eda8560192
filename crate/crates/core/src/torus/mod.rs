//! Periodic grid, Fourier analysis/synthesis and Fourier-multiplier operators.
//!
//! Every operator acts on a [`ScalarField`]; vector and matrix fields lift
//! them componentwise through [`VectorField::map`] and [`MatrixField::map`].

mod field;
mod grid;
mod ops;

pub use field::{MatrixField, ScalarField, Spectrum, VectorField};
pub use grid::TorusGrid;
pub use ops::{
    analyze, apply_multiplier, derivative, frac_laplacian, frac_laplacian_symbol, integral, mean,
    riesz, synthesize,
};

pub(crate) use ops::{analyze_raw, frac_laplacian_unchecked, synthesize_raw};
