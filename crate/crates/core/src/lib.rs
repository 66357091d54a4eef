//! Error bounds for compound Poisson and Poisson approximation of sums of
//! non-negative integer random variables, with exact oracles to check them.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod float_serde;
pub mod metrics;
pub mod oracle;
pub mod pmf;
pub mod runs;
pub mod smoothness;
pub mod verify;

pub use error::{Error, Result};
pub use metrics::{tv_distance, zeta2, MetricValue};
pub use pmf::{CompoundSpec, IntPmf, Moments};
