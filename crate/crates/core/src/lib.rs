//! G2-structures on seven-dimensional Lie algebras.
//!
//! The crate is layered bottom-up:
//!
//! * [`exterior`] – forms, wedge, Hodge star, the `θ` representation;
//! * [`liealg`] – structure constants, Chevalley–Eilenberg `d`, derivations;
//! * [`g2`] – torsion forms, Hodge Laplacian, type decomposition, induced
//!   metrics, ERP and eigenform residuals (formula-agnostic);
//! * [`family`] – the `G_{A1,A,B,C}` family with closed-form formulas and
//!   built-in instances;
//! * [`solitons`] – Laplacian/Ricci soliton solvers, self-similar profiles
//!   and a Laplacian-flow integrator.

pub mod dense;
pub mod exterior;
pub mod family;
pub mod g2;
pub mod liealg;
pub mod linalg;
pub mod sampling;
pub mod scalar;
pub mod solitons;

pub use exterior::{Blade, KForm, Mat2, Mat4, Mat7};
pub use liealg::LieAlgebra;
pub use scalar::{Number, Rational, Scalar};
