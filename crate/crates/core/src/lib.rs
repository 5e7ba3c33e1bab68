pub mod bimodule;
pub mod complex;
pub mod error;
pub mod field;
pub mod matrix;
pub mod parse;
pub mod resolution;
pub mod ring;
pub mod stable;
pub mod tate;
pub mod tor;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
