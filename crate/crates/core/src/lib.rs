pub mod algebra;
pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub mod space;
pub mod chern;
pub mod fixtures;
pub mod flat;
pub mod index;
pub mod mishchenko;
pub mod quadrature;
