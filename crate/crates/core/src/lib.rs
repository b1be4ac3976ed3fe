//! Exact computation of tropical stationary descendant invariants of the
//! elliptic curve.
//!
//! Three independent routes are provided and cross-checked against each other:
//!
//! * [`integral`]: coefficient extraction from products of (vertex-dressed)
//!   propagators, i.e. refined Feynman integrals.
//! * [`covers`]: direct enumeration of graph covers (tuples of windings and
//!   oriented edge weights) weighted by edge expansion factors and one-point
//!   vertex multiplicities.
//! * [`fock`]: matrix elements of cut-join operators on the bosonic Fock space
//!   (Hurwitz case, all psi powers equal to one).
//!
//! [`quasimodular`] fits the resulting q-series into the ring generated by the
//! Eisenstein series `E2`, `E4`, `E6`.
//!
//! All arithmetic is exact over arbitrary-precision rationals.

pub mod arith;
pub mod covers;
pub mod error;
pub mod fock;
pub mod graph;
pub mod integral;
pub mod partition;
pub mod propagators;
pub mod quasimodular;
pub mod series;

pub use error::{Error, Result};

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds the rational `num / den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
