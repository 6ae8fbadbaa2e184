//! Exact scalar arithmetic: arbitrary-precision rationals ℚ and the prime
//! field 𝔽_p with p = 32003.
//!
//! Everything downstream (axiom checkers, coboundary matrices, cohomology
//! dimensions) is generic over [`Field`]; ℚ is the default backend and the
//! only one used by the command-line tool, while 𝔽_32003 serves as a fast
//! cross-check for ranks in tests.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Error produced when a scalar literal cannot be parsed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid scalar literal `{literal}`: {reason}")]
pub struct ScalarParseError {
    pub literal: String,
    pub reason: String,
}

impl ScalarParseError {
    fn new(literal: &str, reason: impl Into<String>) -> Self {
        ScalarParseError {
            literal: literal.to_owned(),
            reason: reason.into(),
        }
    }
}

/// An exact field of scalars.
///
/// Implementations must be exact: equality is decidable and every arithmetic
/// identity holds on the nose. Representations are normalized (rationals in
/// lowest terms with positive denominator, residues in `[0, p)`), so `==` is
/// semantic equality and values can be used as map keys.
pub trait Field:
    Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self) -> Option<Self>;
    /// Parse a literal: an integer `"n"` or a fraction `"n/d"`.
    fn parse(s: &str) -> Result<Self, ScalarParseError>;
    /// Render in the syntax accepted by [`Field::parse`].
    fn render(&self) -> String;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|i| self.mul(&i))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `self += coeff * x`, the workhorse of all tensor accumulation.
    fn add_mul(&mut self, coeff: &Self, x: &Self) {
        if !coeff.is_zero() && !x.is_zero() {
            *self = self.add(&coeff.mul(x));
        }
    }
}

/// The default scalar type: arbitrary-precision rationals.
pub type Q = BigRational;

/// Convenience constructor for small rational constants.
pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for a rational fraction `n/d` (`d != 0`).
pub fn qr(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn parse_bigint(part: &str, literal: &str) -> Result<BigInt, ScalarParseError> {
    BigInt::from_str(part.trim())
        .map_err(|_| ScalarParseError::new(literal, format!("`{part}` is not an integer")))
}

impl Field for BigRational {
    fn zero() -> Self {
        num::Zero::zero()
    }

    fn one() -> Self {
        num::One::one()
    }

    fn from_int(n: i64) -> Self {
        q(n)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn parse(s: &str) -> Result<Self, ScalarParseError> {
        match s.split_once('/') {
            None => Ok(BigRational::from_integer(parse_bigint(s, s)?)),
            Some((num, den)) => {
                let n = parse_bigint(num, s)?;
                let d = parse_bigint(den, s)?;
                if Zero::is_zero(&d) {
                    return Err(ScalarParseError::new(s, "zero denominator"));
                }
                Ok(BigRational::new(n, d))
            }
        }
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// The prime-field modulus of the cross-check backend.
pub const FP_MODULUS: u64 = 32003;

/// An element of 𝔽_32003, stored as its canonical residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct F32003(u64);

impl F32003 {
    pub fn new(n: i64) -> Self {
        let p = FP_MODULUS as i64;
        F32003(n.rem_euclid(p) as u64)
    }

    pub fn residue(self) -> u64 {
        self.0
    }

    fn from_bigint(n: &BigInt) -> Self {
        let p = BigInt::from(FP_MODULUS);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        // r fits in u64 by construction.
        let digits = r.to_u64_digits().1;
        F32003(digits.first().copied().unwrap_or(0))
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = F32003(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for F32003 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Field for F32003 {
    fn zero() -> Self {
        F32003(0)
    }

    fn one() -> Self {
        F32003(1)
    }

    fn from_int(n: i64) -> Self {
        F32003::new(n)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        F32003((self.0 + rhs.0) % FP_MODULUS)
    }

    fn sub(&self, rhs: &Self) -> Self {
        F32003((self.0 + FP_MODULUS - rhs.0) % FP_MODULUS)
    }

    fn mul(&self, rhs: &Self) -> Self {
        F32003(self.0 * rhs.0 % FP_MODULUS)
    }

    fn neg(&self) -> Self {
        F32003((FP_MODULUS - self.0) % FP_MODULUS)
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(FP_MODULUS - 2))
        }
    }

    fn parse(s: &str) -> Result<Self, ScalarParseError> {
        match s.split_once('/') {
            None => Ok(F32003::from_bigint(&parse_bigint(s, s)?)),
            Some((num, den)) => {
                let n = F32003::from_bigint(&parse_bigint(num, s)?);
                let d = F32003::from_bigint(&parse_bigint(den, s)?);
                let di = d.inv().ok_or_else(|| {
                    ScalarParseError::new(s, "denominator divisible by the modulus")
                })?;
                Ok(Field::mul(&n, &di))
            }
        }
    }

    fn render(&self) -> String {
        self.0.to_string()
    }
}
