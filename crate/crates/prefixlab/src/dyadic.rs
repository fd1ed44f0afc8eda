//! Exact nonnegative dyadic rationals: `numerator / 2^exponent`.
//!
//! Kraft sums and semi-measure masses are sums of powers of two and must
//! be compared exactly — equality and the `≤ 1` bound are part of the
//! contracts they appear in, with zero tolerance. Values are kept in
//! canonical form: the numerator is odd, or zero (with exponent zero),
//! or the exponent is already zero, so structural equality is value
//! equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use num_bigint::BigUint;
use num_traits::Zero;

/// An exact nonnegative dyadic rational.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::from(1u8),
            exp: 0,
        }
    }

    /// `2^{-exp}`.
    pub fn pow2_neg(exp: u64) -> Self {
        Dyadic {
            num: BigUint::from(1u8),
            exp,
        }
    }

    /// `num / 2^exp`, normalized.
    pub fn from_parts(num: BigUint, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    /// `count · 2^{-exp}`.
    pub fn count_times_pow2_neg(count: u64, exp: u64) -> Self {
        Dyadic::from_parts(BigUint::from(count), exp)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let strip = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        self.num >>= strip;
        self.exp -= strip;
    }

    /// JSON value in the `{"num": <decimal string>, "exp": <number>}` schema.
    pub fn to_json(&self) -> String {
        format!("{{\"num\":\"{}\",\"exp\":{}}}", self.num, self.exp)
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let num = (&self.num << (exp - self.exp)) + (&rhs.num << (exp - rhs.exp));
        Dyadic::from_parts(num, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, d| &acc + &d)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let lhs = &self.num << (exp - self.exp);
        let rhs = &other.num << (exp - other.exp);
        lhs.cmp(&rhs)
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

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}
