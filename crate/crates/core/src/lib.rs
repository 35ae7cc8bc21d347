//! Numerical toolkit for generalized Helmholtz equations Φ(−Δ)u = Φ(1)u.
//!
//! * [`symbols`]: symbols Φ, derivatives, admissibility checkers.
//! * [`bessel`]: J_ν, its large-argument expansion, and the sphere transform F_d.
//! * [`kernel`]: the low-frequency kernel F⁻¹(Φ(|ξ|²)χ) and its L¹ bound.
//! * [`multiplier`]: Φ(−Δ) on periodic grids and Helmholtz residuals.
//! * [`localization`]: spectral-support diagnostics and the j₀ quotient.
//! * [`bernstein`]: complete Bernstein symbols with discrete measures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod bessel;
pub mod error;
pub mod expr;
pub mod grid;
pub mod jet;
pub mod kernel;
pub mod localization;
pub mod multiplier;
pub mod quadrature;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use grid::{GridFunction, Spectrum};
pub use symbols::{builtin_symbol, Symbol};
