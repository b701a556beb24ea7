// `!(x > 0.0)` is deliberate throughout: NaN must fail positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bend;
pub mod config;
pub mod curvature;
pub mod error;
pub mod isotopy;
pub mod path;
pub mod quad;
pub mod radial;
pub mod retract;
pub mod smooth;
pub mod surgery;
pub mod suite;
pub mod svg;
pub mod torpedo;

pub use error::{Error, Result};
