//! Exact algebra: rationals, jets, polynomials, vector fields and linear algebra.

pub mod jet;
pub mod linalg;
pub mod mpoly;
pub mod mseries;
pub mod parse;
pub mod scalar;
pub mod vf;

pub use jet::{schwarzian, Jet, EXACT};
pub use scalar::{binomial, factorial, rat, rat_int, Rat, Scalar};
pub use linalg::Mat;
pub use mpoly::{MPoly, Monomial};
pub use vf::{lie_bracket, PolyVF};
