pub mod cli;
pub mod cofactor_transforms;
pub mod det_transforms;
pub mod duality;
pub mod error;
pub mod family;
pub mod fd;
pub mod linalg;
pub mod minors;
pub mod variational;

pub use error::{Error, Result};
pub use linalg::Matrix;
