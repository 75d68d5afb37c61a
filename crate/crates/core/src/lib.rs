//! Continued-fraction laboratory for convergence exponents of partial
//! quotients.
//!
//! - [`cf`]: exact expansions, convergents, cylinders and the Gauss map.
//! - [`seq`]: partial-quotient sequences with exact and log-domain access.
//! - [`exponent`]: convergence-exponent estimators and constructions.
//! - [`spectra`]: dimension formulas and the limits `xi`, `B`, `T_j`.
//! - [`covers`]: cover families, counting bounds and dimension estimators.
//! - [`ergodic`]: Gauss-measure Monte Carlo for Birkhoff averages.

pub mod arith;
pub mod cf;
pub mod covers;
pub mod ergodic;
pub mod error;
pub mod estimate;
pub mod exponent;
pub mod seq;
pub mod serde_util;
pub mod spectra;

pub use error::{Error, Result};
pub use estimate::{EstimatorConfig, TailEstimate};
pub use exponent::Exponent;
pub use seq::{Bits, PQSeq};
