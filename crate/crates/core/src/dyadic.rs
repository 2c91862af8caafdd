//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every vertex coordinate produced by the generators is dyadic, so keying
//! vertices by position never involves floating point. Values are kept in
//! lowest terms: when `exp > 0` the numerator is odd.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Largest exponent accepted. Keeps every shift inside `i128`
/// comparisons well defined.
pub const MAX_EXPONENT: u32 = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDyadic", into = "RawDyadic")]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

#[derive(Serialize, Deserialize)]
struct RawDyadic {
    num: i128,
    exp: u32,
}

impl From<Dyadic> for RawDyadic {
    fn from(d: Dyadic) -> Self {
        RawDyadic { num: d.num, exp: d.exp }
    }
}

impl TryFrom<RawDyadic> for Dyadic {
    type Error = String;

    fn try_from(raw: RawDyadic) -> Result<Self, Self::Error> {
        if raw.exp > MAX_EXPONENT {
            return Err(format!("exponent {} exceeds {}", raw.exp, MAX_EXPONENT));
        }
        if raw.exp > 0 && raw.num % 2 == 0 {
            return Err(format!(
                "dyadic {}/2^{} is not in lowest terms",
                raw.num, raw.exp
            ));
        }
        Ok(Dyadic { num: raw.num, exp: raw.exp })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("dyadic arithmetic overflowed the 128-bit numerator")]
pub struct DyadicOverflow;

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n as i128, exp: 0 }
    }

    /// Builds `num / 2^exp` and reduces it.
    pub fn new(num: i128, exp: u32) -> Result<Self, DyadicOverflow> {
        if exp > MAX_EXPONENT {
            return Err(DyadicOverflow);
        }
        Ok(Self::reduced(num, exp))
    }

    fn reduced(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        num >>= tz;
        exp -= tz;
        Dyadic { num, exp }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    fn aligned(self, other: Dyadic) -> Result<(i128, i128, u32), DyadicOverflow> {
        let exp = self.exp.max(other.exp);
        let a = shl_checked(self.num, exp - self.exp)?;
        let b = shl_checked(other.num, exp - other.exp)?;
        Ok((a, b, exp))
    }

    pub fn checked_add(self, other: Dyadic) -> Result<Dyadic, DyadicOverflow> {
        let (a, b, exp) = self.aligned(other)?;
        Ok(Self::reduced(a.checked_add(b).ok_or(DyadicOverflow)?, exp))
    }

    pub fn checked_sub(self, other: Dyadic) -> Result<Dyadic, DyadicOverflow> {
        let (a, b, exp) = self.aligned(other)?;
        Ok(Self::reduced(a.checked_sub(b).ok_or(DyadicOverflow)?, exp))
    }

    pub fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }

    pub fn halve(self) -> Result<Dyadic, DyadicOverflow> {
        if self.num == 0 {
            return Ok(self);
        }
        if self.exp == 0 && self.num % 2 == 0 {
            return Ok(Dyadic { num: self.num / 2, exp: 0 });
        }
        if self.exp >= MAX_EXPONENT {
            return Err(DyadicOverflow);
        }
        Ok(Dyadic { num: self.num, exp: self.exp + 1 })
    }

    pub fn double(self) -> Result<Dyadic, DyadicOverflow> {
        if self.exp > 0 {
            Ok(Self::reduced(self.num, self.exp - 1))
        } else {
            Ok(Dyadic { num: self.num.checked_mul(2).ok_or(DyadicOverflow)?, exp: 0 })
        }
    }

    /// `(self + other) / 2`.
    pub fn midpoint(self, other: Dyadic) -> Result<Dyadic, DyadicOverflow> {
        self.checked_add(other)?.halve()
    }

    /// `2^k` for `k` in `-MAX_EXPONENT..=126`.
    pub fn pow2(k: i32) -> Result<Dyadic, DyadicOverflow> {
        if k >= 0 {
            if k > 126 {
                return Err(DyadicOverflow);
            }
            Ok(Dyadic { num: 1i128 << k, exp: 0 })
        } else {
            Dyadic::new(1, (-k) as u32)
        }
    }

    pub fn to_bigint_pair(&self) -> (BigInt, u32) {
        (BigInt::from(self.num), self.exp)
    }
}

fn shl_checked(v: i128, by: u32) -> Result<i128, DyadicOverflow> {
    if v == 0 {
        return Ok(0);
    }
    if by >= 127 {
        return Err(DyadicOverflow);
    }
    let r = v << by;
    if r >> by != v {
        return Err(DyadicOverflow);
    }
    Ok(r)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.aligned(*other) {
            Ok((a, b, _)) => a.cmp(&b),
            Err(_) => {
                let (a, ea) = self.to_bigint_pair();
                let (b, eb) = other.to_bigint_pair();
                let e = ea.max(eb);
                (a << (e - ea) as usize).cmp(&(b << (e - eb) as usize))
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms() {
        let d = Dyadic::new(12, 3).unwrap();
        assert_eq!((d.numerator(), d.exponent()), (3, 1));
        assert_eq!(Dyadic::new(0, 7).unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn midpoint_and_halving() {
        let a = Dyadic::from_int(-1);
        let b = Dyadic::from_int(1);
        assert_eq!(a.midpoint(b).unwrap(), Dyadic::ZERO);
        let q = Dyadic::ZERO.midpoint(Dyadic::new(1, 1).unwrap()).unwrap();
        assert_eq!(q, Dyadic::new(1, 2).unwrap());
        assert_eq!(q.to_f64(), 0.25);
    }

    #[test]
    fn rejects_unreduced_on_deserialize() {
        let bad: Result<Dyadic, _> = serde_json::from_str(r#"{"num":4,"exp":1}"#);
        assert!(bad.is_err());
        let ok: Dyadic = serde_json::from_str(r#"{"num":3,"exp":2}"#).unwrap();
        assert_eq!(ok.to_f64(), 0.75);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Dyadic::from_int(i64::MAX);
        let mut x = big;
        let mut failed = false;
        for _ in 0..80 {
            match x.double() {
                Ok(y) => x = y,
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        assert!(failed);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_rationals(an in -1_000_000i64..1_000_000, ae in 0u32..30,
                                       bn in -1_000_000i64..1_000_000, be in 0u32..30) {
            let a = Dyadic::new(an as i128, ae).unwrap();
            let b = Dyadic::new(bn as i128, be).unwrap();
            let ra = num_rational::BigRational::new(an.into(), num_bigint::BigInt::from(1u64 << ae));
            let rb = num_rational::BigRational::new(bn.into(), num_bigint::BigInt::from(1u64 << be));
            let to_r = |d: Dyadic| num_rational::BigRational::new(
                d.numerator().into(), num_bigint::BigInt::from(1u128 << d.exponent()));
            prop_assert_eq!(to_r(a.checked_add(b).unwrap()), &ra + &rb);
            prop_assert_eq!(to_r(a.checked_sub(b).unwrap()), &ra - &rb);
            prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
            let m = a.midpoint(b).unwrap();
            prop_assert_eq!(to_r(m), (&ra + &rb) / num_rational::BigRational::from_integer(2.into()));
        }
    }
}
