//! Numerical toolkit for half-harmonic maps on the periodic line.
//!
//! * [`torus`]: grid, Fourier transforms and multiplier operators (`Δ^s`, `ℛ`, `∇`).
//! * [`littlewood_paley`]: dyadic blocks, paraproducts, maximal function.
//! * [`norms`]: Sobolev, dual, Gagliardo, BMO, Besov and Hardy norms plus
//!   localization diagnostics.
//! * [`commutators`]: the three-term commutators `T`, `S`, `R`, `S̃` and the
//!   identities they satisfy.
//! * [`flow`]: L-energy, projected gradient flow into the sphere, Morrey and
//!   dyadic-decay diagnostics.
//! * [`synth`]: seeded band-limited test fields.

pub mod commutators;
pub mod error;
pub mod flow;
pub mod littlewood_paley;
pub mod norms;
pub mod synth;
pub mod torus;

pub use error::{Error, Result};
pub use torus::{MatrixField, ScalarField, Spectrum, TorusGrid, VectorField};
