//! Exact arithmetic for the spin of ideals in totally real cyclic number fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] builds explicit cyclic fields (simplest cubics, Lehmer quintics and
//!   real quadratic fields) and provides exact element arithmetic.
//! * [`ideals`] splits rational primes, enumerates ideals by norm and finds
//!   principal generators.
//! * [`units`] handles unit sign combinatorics and the fundamental domain for the
//!   action of totally positive units.
//! * [`symbols`] evaluates quadratic residue symbols and reciprocity factors.
//! * [`spin`], [`analytic`], [`involution`] and [`selmer`] build the experiments on
//!   top of these.
//!
//! Element coordinates are generic over [`Scalar`]; the aliases below cover the
//! three instantiations used in practice.

pub mod analytic;
pub mod arith;
pub mod error;
pub mod field;
pub mod ideals;
pub mod interval;
pub mod involution;
pub mod lattice;
pub mod polymod;
pub mod scalar;
pub mod selmer;
pub mod spin;
pub mod symbols;
pub mod units;

pub use error::{Error, Result};
pub use field::{Element, FieldContext, FieldFamily};
pub use scalar::Scalar;

/// Integral element with machine-word coordinates. Used on every hot path.
pub type IntElement = Element<i128>;
/// Integral element with arbitrary precision coordinates.
pub type BigElement = Element<num_bigint::BigInt>;
/// General field element with exact rational coordinates.
pub type RatElement = Element<num_rational::BigRational>;
