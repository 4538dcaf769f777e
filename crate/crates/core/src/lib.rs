#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod numerics;
pub mod oracle;
pub mod pwell;
pub mod real;
pub mod xwell;

pub use error::{Error, Result};
pub use numerics::{Bracket, PrecisionPolicy, Root};
pub use real::{Cplx, MpReal, Real};
