pub mod cli_io;
pub mod elasticity;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod kernels;
pub mod pressure;
pub mod regularity;
pub mod singular_integral;
pub mod variational;

pub use error::{Error, Result};
