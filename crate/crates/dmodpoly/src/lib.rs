//! Exact arithmetic for rank-2 Drinfeld modules over F_q(t): finite field
//! towers, the Bruhat-Tits tree at infinity, Farey decompositions, modular
//! polynomials via interpolation + CRT, and height identities. Everything is
//! exact; there is no floating point anywhere in this crate.

pub mod error;
pub mod fq;
pub mod polycore;
pub mod linalg;
pub mod ext;
pub mod poly;
pub mod ratfun;
pub mod puiseux;
pub mod parse;
pub mod arith;
pub mod omega;
pub mod farey;
pub mod btree;
pub mod drinfeld;
pub mod modpoly;
pub mod heights;
pub mod cache;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational type used for every log-base-q quantity (heights,
/// valuations, band endpoints).
pub type Rat = num_rational::BigRational;

/// Degree of the zero polynomial. Kept away from i64::MIN so sums of two
/// sentinels cannot wrap.
pub const NEG_INF: i64 = i64::MIN / 2;

/// Valuation of zero (v_inf sentinel), matching NEG_INF in magnitude.
pub const POS_INF: i64 = i64::MAX / 2;

/// Exact q^e as a big integer for integer e >= 0.
pub fn q_pow(q: u32, e: u64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(q).pow(e.try_into().expect("exponent out of range"))
}

/// Compare q^a <= x for exact rational x and integer a (may be negative).
pub fn q_pow_le(q: u32, a: i64, x: &Rat) -> bool {
    use num_bigint::BigInt;
    if a >= 0 {
        Rat::from_integer(BigInt::from(q).pow(a as u32)) <= *x
    } else {
        Rat::new(BigInt::from(1), BigInt::from(q).pow((-a) as u32)) <= *x
    }
}
