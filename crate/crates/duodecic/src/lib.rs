//! Exact arithmetic for pure duodecic fields K = Q(theta), theta a root of
//! x^12 - m with m a 12th-power-free integer.
//!
//! The crate computes, per prime p, the valuation v_p of the index
//! [O_K : Z[theta]], a triangular p-integral basis, a global integral basis
//! and the field discriminant, through three routes that check one another:
//!
//! - [`pure12`]: closed-form case tables for every (p, v_p(m)) shape;
//! - [`newton`] + [`montes2`]: Newton polygons of first and second order,
//!   Ore's index count and the second-order index/basis engine;
//! - [`verify`]: an independent round-2 (radical / multiplier-ring) oracle.
//!
//! All arithmetic is exact; nothing in the library uses randomness.

pub mod arith;
#[cfg(test)]
pub(crate) mod testutil;
pub mod combine;
pub mod montes2;
pub mod newton;
pub mod pure12;
pub mod verify;
