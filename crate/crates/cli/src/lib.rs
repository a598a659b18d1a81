//! Library side of the `sphwave` binary: config parsing and the command
//! drivers.

// `!(x > 0.0)` style checks are intended: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod multi;
pub mod output;
pub mod single;
pub mod transform;
pub mod verify;
