//! Numerical toolkit for the boundaries of bipartite binary/dichotomic
//! correlation sets and for separability of permutationally symmetric
//! multi-qubit states.
//!
//! The crate splits into two halves that share little beyond linear algebra:
//!
//! * Correlation-set side: [`boxes`] holds (2,2,2) behaviors and the named
//!   boxes, [`tsirelson`] computes quantum maxima of linear functionals via
//!   characteristic polynomials of Hermitian operators, and [`qbounds`]
//!   evaluates five quantum-bound criteria (Uffink, NPA level 1, a
//!   function-valued Tsirelson family, a 10-term local-orthogonality clique,
//!   and the NPA 1+AB semidefinite certificate) along two parametric slices
//!   of the no-signalling polytope.
//!
//! * Symmetric-state side: [`dicke`] fits Dicke-diagonal states against an
//!   explicitly separable form and computes PPT conditions and state-space
//!   volumes, [`radiance`] evolves superradiant and independently-radiating
//!   populations in time, and [`driven`] solves driven-superradiance steady
//!   states, reduced states, spin squeezing, and negativity.
//!
//! All solvers that consume randomness take explicit 64-bit seeds and
//! partition work into fixed chunks, so results are reproducible regardless
//! of thread count.

pub mod boxes;
pub mod dicke;
pub mod driven;
mod error;
pub mod numeric;
pub mod qbounds;
pub mod radiance;
pub mod tsirelson;

pub use error::{Error, Result};
