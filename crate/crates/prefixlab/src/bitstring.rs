//! Bit-exact binary strings and their identification with the naturals.
//!
//! Strings are ordered length-lexicographically: `λ, 0, 1, 00, 01, 10,
//! 11, 000, …` and the position of a string in this listing is its
//! [`Rank`]. Equivalently, prepend a `1` to the string, read the result
//! as a binary numeral, and subtract one. [`pair`]/[`unpair`] lift the
//! Cantor pairing through this bijection, giving a bijective pairing on
//! strings. Everything here is pure and immutable after construction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

/// Text encoding of the empty string in files and CLI output.
pub const EMPTY_TOKEN: &str = "-";

/// An immutable finite binary string. The empty string is written `-`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    /// The empty string.
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitString {
            bits: bits.into_iter().collect(),
        }
    }

    /// A run of `n` zero bits.
    pub fn zeros(n: usize) -> Self {
        BitString {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    /// True iff `self` is a prefix of `other` (improper prefixes included).
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && self.bits == other.bits[..self.len()]
    }

    /// Position of this string in the length-lexicographic listing
    /// `λ, 0, 1, 00, 01, 10, 11, 000, …`: the value of the binary
    /// numeral `1·self` minus one.
    pub fn rank(&self) -> Rank {
        let mut value = BigUint::one();
        for bit in &self.bits {
            value <<= 1u8;
            if *bit {
                value += 1u8;
            }
        }
        Rank(value - 1u8)
    }

    /// Inverse of [`BitString::rank`]: the string at position `rank`.
    pub fn from_rank(rank: &Rank) -> BitString {
        let numeral = &rank.0 + 1u8;
        // Binary digits of rank+1, most significant first; the leading 1
        // is the prepended marker, the remainder is the string.
        let digits = numeral.to_radix_be(2);
        BitString {
            bits: digits[1..].iter().map(|d| *d == 1).collect(),
        }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        // Length-lexicographic order agrees with numeric order of ranks.
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str(EMPTY_TOKEN);
        }
        for bit in &self.bits {
            f.write_str(if *bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Error parsing the text encoding of a [`BitString`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBitStringError {
    token: String,
}

impl fmt::Display for ParseBitStringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "token {:?} is not a binary string over {{0,1}} or \"{}\"",
            self.token, EMPTY_TOKEN
        )
    }
}

impl std::error::Error for ParseBitStringError {}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    /// Accepts `-` for the empty string, otherwise a nonempty run of
    /// `0`/`1` characters. Anything else (including a bare empty token)
    /// is an error.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == EMPTY_TOKEN {
            return Ok(BitString::empty());
        }
        if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(ParseBitStringError {
                token: s.to_string(),
            });
        }
        Ok(BitString {
            bits: s.bytes().map(|b| b == b'1').collect(),
        })
    }
}

/// The natural-number position of a string in the length-lexicographic
/// listing. Arbitrary precision; the bijection with [`BitString`] holds
/// for every length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(BigUint);

impl Rank {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    /// The rank as a `u64` when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }
}

impl From<u64> for Rank {
    fn from(n: u64) -> Self {
        Rank(BigUint::from(n))
    }
}

impl From<BigUint> for Rank {
    fn from(n: BigUint) -> Self {
        Rank(n)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rank({})", self.0)
    }
}

fn cantor(m: &BigUint, n: &BigUint) -> BigUint {
    let sum = m + n;
    (&sum * (&sum + 1u8)) / 2u8 + n
}

fn cantor_inverse(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z+1) - 1) / 2) is the diagonal index.
    let w = ((z * 8u8 + 1u8).sqrt() - 1u8) / 2u8;
    let triangle = (&w * (&w + 1u8)) / 2u8;
    let n = z - triangle;
    let m = w - &n;
    (m, n)
}

/// Bijective pairing of strings: the Cantor pairing of the two ranks,
/// read back as a string. Total and deterministic; every construction
/// in this crate that needs a two-argument code goes through this
/// function rather than an inlined formula.
pub fn pair(s: &BitString, t: &BitString) -> BitString {
    let z = cantor(s.rank().value(), t.rank().value());
    BitString::from_rank(&Rank(z))
}

/// Exact inverse of [`pair`].
pub fn unpair(u: &BitString) -> (BitString, BitString) {
    let (m, n) = cantor_inverse(u.rank().value());
    (BitString::from_rank(&Rank(m)), BitString::from_rank(&Rank(n)))
}
