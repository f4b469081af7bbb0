//! Numerical laboratory for Einstein-type structures `f Ric = Ddf + h g` on
//! radially symmetric Riemannian manifolds.
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::redundant_guards
)]

pub mod dd;
pub mod error;
pub mod expr;
pub mod field;
pub mod format;
pub mod frame;
pub mod identities;
pub mod jet;
pub mod lab;
pub mod metric;
pub mod ode;
pub mod oracle;
pub mod spline;
pub mod structure;
pub mod tensors;

pub use error::{LabError, Result};
