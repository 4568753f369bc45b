//! Convolution-type maximal functions in one dimension.
//!
//! For a compactly supported piecewise-linear `u` and a unit-mass kernel
//! `phi` (Poisson, heat, or fractional Poisson), the crate evaluates the
//! scale-space extension `u~(x, t) = (|u| * phi_t)(x)` and the maximal function
//! `u*(x) = sup_t u~(x, t)`, and provides falsification harnesses for the
//! regularity theory of `u -> (u*)'` on `W^{1,1}(R)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a > b)` also rejects NaN

pub mod cli;
pub mod corpus;
pub mod detachment;
pub mod error;
pub mod funcmodel;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod scalespace;
pub mod suite;
pub mod svg;
pub mod variation;
pub mod verify;

pub use error::{Error, Result};
pub use funcmodel::{FunctionSource, PiecewiseLinearFn, StepFunction};
pub use kernels::{make_kernel, normalize_fractional, KernelFamily, KernelSpec};
pub use scalespace::{extension, maximal_at, maximal_profile, Grid, MaximalProfile, Maximum, ScaleSpace, SearchOptions};
