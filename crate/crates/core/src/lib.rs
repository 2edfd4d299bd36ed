//! Minimal-norm Fourier majorants of trigonometric polynomials for the
//! exponents `p = 2j/(2j−1)`.
//!
//! Given `f`, the majorant `F` with `F̂(n) >= |f̂(n)|` of least `L^p` norm
//! factors as `F = Ḡ^{j−1}G^j` with `Ĝ >= 0` supported on `supp f̂`. This
//! crate computes `G` and `F` through a dual program on a weighted simplex
//! ([`dual`]), recomputes `F` directly by a primal program ([`primal`]), and
//! checks the structural properties of both ([`verify`]).

pub mod dual;
pub mod error;
pub mod primal;
pub mod spectral;
pub mod sumset;
pub mod verify;

pub use error::{MajorantError, Result};
pub use spectral::{CoefficientSequence, ExponentPair, QuadratureConfig};
pub use sumset::FrequencySet;

pub use num_complex::Complex64;
