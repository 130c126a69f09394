//! Extremal problems for the coefficients of schlicht functions, solved over
//! Loewner chains driven by unimodular step functions.
//!
//! A driver with `m` equal steps ([`driver::StepDriver`]) generates a
//! schlicht function whose second to fourth coefficients are explicit
//! trigonometric polynomials in the step angles ([`coefficients`]). Any real
//! functional of `(a2, a3, a4)` ([`functionals`]) then becomes a smooth
//! function on the torus `[0, 2π)^m`, which [`optimizer`] maximizes for an
//! increasing sequence of `m`. [`milin_bound`] evaluates the companion
//! one-dimensional bound for the Milin functional.

pub mod cli;
pub mod coefficients;
pub mod driver;
pub mod error;
pub mod fixtures;
pub mod functionals;
pub mod io;
pub mod milin_bound;
pub mod optimizer;
mod piecewise;

pub use coefficients::{
    coeffs_234, coeffs_upto, grad_coeffs_234, CoeffJacobian, CoefficientTriple, PiecewisePolyState,
};
pub use driver::StepDriver;
pub use error::{Error, Result};
pub use functionals::{log_coeffs, CustomFunctional, Functional, LogCoefficients};
pub use optimizer::{
    local_maximize, multi_start, refine_schedule, AscentOptions, OptimizationResult,
    RefinementTrace,
};
