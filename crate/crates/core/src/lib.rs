pub mod error;
pub mod density;
pub mod group;
pub mod matching;
pub mod quasitiling;
pub mod symbolic;
pub mod comparison;
pub mod encoding;
pub mod entropy;
pub mod experiment;

pub use error::{Error, Result};

/// Exact rational used for every density and invariance ratio.
pub type Rational = num_rational::Ratio<i64>;
