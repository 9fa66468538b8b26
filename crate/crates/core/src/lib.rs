pub mod dd;
pub mod error;
pub mod exec;
pub mod expr;
pub mod geodesic;
pub mod instance;
pub mod invariant;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod model;
pub mod scalar;
pub mod suites;
pub mod tensor;

pub use error::{Error, Result};
