#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod constants;
pub mod error;
pub mod exec;
pub mod ground_state;
pub mod ode;
pub mod quad;
pub mod rumin;
pub mod simplex;
pub mod special;
pub mod spectral;
pub mod sphere;
pub mod stability;
pub mod verify;

pub use error::{LtError, Result};
pub use exec::Execution;
