use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, Zero};
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact coefficient field for polynomials and structure data.
///
/// Printing through `Display` must produce `n` or `n/d` with an optional
/// leading minus sign, so printed values parse back unchanged.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Builds a value from decimal digit strings; `None` if out of range or
    /// the denominator is zero.
    fn from_decimal(num: &str, den: Option<&str>) -> Option<Self>;

    fn is_negative(&self) -> bool;
}

impl<T> Field for Ratio<T>
where
    T: Clone
        + Debug
        + Display
        + Integer
        + Signed
        + Hash
        + FromPrimitive
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v).expect("integer out of range for scalar type"))
    }

    fn from_decimal(num: &str, den: Option<&str>) -> Option<Self> {
        let n = T::from_str(num).ok()?;
        let d = match den {
            Some(d) => T::from_str(d).ok()?,
            None => T::one(),
        };
        if d.is_zero() {
            return None;
        }
        Some(Ratio::new(n, d))
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn decimal_parsing_reduces() {
        let r = <Ratio<BigInt> as Field>::from_decimal("6", Some("4")).unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert!(<Ratio<i64> as Field>::from_decimal("1", Some("0")).is_none());
    }
}
