//! Token amounts.
//!
//! Every balance in the engine is a count of indivisible token units. The
//! engine is generic over the unsigned integer used to hold those counts so
//! the same state machine can run on `u64` (the default), `u128` for very
//! large economies, or a narrow type such as `u16` when exercising overflow
//! paths in tests.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// An unsigned integer type usable as a token balance.
pub trait Amount:
    PrimInt
    + Unsigned
    + Hash
    + Debug
    + Display
    + FromStr
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl<T> Amount for T where
    T: PrimInt
        + Unsigned
        + Hash
        + Debug
        + Display
        + FromStr
        + Default
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

pub(crate) fn add<A: Amount>(a: A, b: A) -> Result<A> {
    a.checked_add(&b).ok_or(Error::Overflow)
}

pub(crate) fn mul<A: Amount>(a: A, b: A) -> Result<A> {
    a.checked_mul(&b).ok_or(Error::Overflow)
}

/// Converts a `u64` into the amount type, rejecting values that do not fit.
pub fn from_u64<A: Amount>(value: u64) -> Result<A> {
    A::from(value).ok_or(Error::Overflow)
}

/// Widens an amount to `u128`. Every primitive unsigned type fits.
pub fn to_u128<A: Amount>(value: A) -> u128 {
    value.to_u128().expect("unsigned primitive fits in u128")
}

/// `floor(a * b / c)` without intermediate overflow of `A`.
///
/// The product is formed in `u128`; only a product exceeding `u128::MAX` or a
/// quotient that does not fit back into `A` is reported as overflow.
pub fn mul_div_floor<A: Amount>(a: A, b: A, c: A) -> Result<A> {
    if c.is_zero() {
        return Err(Error::Overflow);
    }
    let product = to_u128(a).checked_mul(to_u128(b)).ok_or(Error::Overflow)?;
    A::from(product / to_u128(c)).ok_or(Error::Overflow)
}

/// `floor(a * pct / 100)` for a percentage in `0..=100`.
pub fn percent_of<A: Amount>(a: A, pct: u8) -> Result<A> {
    mul_div_floor(a, from_u64(u64::from(pct))?, from_u64(100)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_div_survives_narrow_products() {
        // 200 * 200 overflows u8 but the quotient fits.
        assert_eq!(mul_div_floor::<u8>(200, 200, 250).unwrap(), 160);
        assert!(matches!(mul_div_floor::<u8>(200, 200, 1), Err(Error::Overflow)));
        assert!(matches!(mul_div_floor::<u8>(1, 1, 0), Err(Error::Overflow)));
    }

    #[test]
    fn percent_floors() {
        assert_eq!(percent_of::<u64>(99, 50).unwrap(), 49);
        assert_eq!(percent_of::<u64>(100, 0).unwrap(), 0);
        assert_eq!(percent_of::<u64>(7, 100).unwrap(), 7);
    }

    #[test]
    fn checked_add_rejects_wrap() {
        assert!(matches!(add::<u8>(255, 1), Err(Error::Overflow)));
        assert_eq!(add::<u128>(u128::MAX - 1, 1).unwrap(), u128::MAX);
    }
}
