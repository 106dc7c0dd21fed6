//! Numerical laboratory for tubular domains around curves and submanifolds,
//! Pohozaev-type multiplier fields, and the sign certificates that rule out
//! nontrivial solutions of supercritical Dirichlet problems on thin tubes.

// `!(x > 0.0)` is the NaN-rejecting form used throughout parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod geometry;
pub mod identity;
pub mod io;
pub mod numerics;
pub mod radial;

pub use error::{Error, Result};

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;
