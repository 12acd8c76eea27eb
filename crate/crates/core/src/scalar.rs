//! Dual-mode scalars: exact rationals or `f64`.
//!
//! Exact values are `BigRational`s, which are kept in lowest terms with a
//! positive denominator after every operation, so two exact scalars are equal
//! iff their representations are identical. Float values compare by bit
//! pattern: `0.0` and `-0.0` are distinct and no epsilon is ever applied.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic mode of a scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Self::from_int(mode, 1)
    }

    pub fn from_int(mode: Mode, value: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(value))),
            Mode::Float => Scalar::Float(value as f64),
        }
    }

    /// Exact `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn float(value: f64) -> Self {
        Scalar::Float(value)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(num::pow(q.clone(), exp as usize)),
            Scalar::Float(x) => Scalar::Float(x.powi(exp as i32)),
        }
    }

    /// Converts to the requested mode. Exact to float may round.
    pub fn to_mode(&self, mode: Mode) -> Result<Self> {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Exact) | (Scalar::Float(_), Mode::Float) => Ok(self.clone()),
            (Scalar::Exact(_), Mode::Float) => Ok(Scalar::Float(self.to_f64())),
            (Scalar::Float(x), Mode::Exact) => BigRational::from_float(*x)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::InvalidArgument(format!("{x} has no exact value"))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    /// Natural logarithm of `|self|`, robust to rationals outside the `f64`
    /// range. Returns `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        match self {
            Scalar::Exact(q) => {
                if q.is_zero() {
                    return f64::NEG_INFINITY;
                }
                ln_bigint(q.numer()) - ln_bigint(q.denom())
            }
            Scalar::Float(x) => x.abs().ln(),
        }
    }

    /// `|self|^(1/t)` evaluated as `exp(ln|self| / t)`; zero maps to zero.
    pub fn root(&self, t: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if t == 1 {
            return self.to_f64().abs();
        }
        (self.ln_abs() / t as f64).exp()
    }

    /// Parses an exact literal: a decimal integer or `p/q`.
    pub fn parse_exact(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidArgument(format!("not an exact number: {text:?}"));
        let value = match text.split_once('/') {
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                BigRational::new(p, q)
            }
            None => BigRational::from_integer(BigInt::from_str(text).map_err(|_| bad())?),
        };
        Ok(Scalar::Exact(value))
    }
}

fn ln_bigint(value: &BigInt) -> f64 {
    let bits = value.bits();
    if bits <= 1000 {
        value.to_f64().map(f64::abs).unwrap_or(f64::INFINITY).ln()
    } else {
        // keep the top 64 bits and account for the shifted-out part
        let shift = bits - 64;
        let top = (value.magnitude() >> shift).to_f64().unwrap_or(0.0);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(x) = q.to_f64() {
        if x.is_finite() && (x != 0.0 || q.is_zero()) {
            return x;
        }
    }
    let sign = if q.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * Scalar::Exact(q.clone()).ln_abs().exp()
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero(Mode::Exact)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: exact by value, float by `total_cmp`, and every exact value
/// before every float value (mixed comparisons only arise in sorted
/// containers, never in arithmetic).
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.total_cmp(b),
            (Scalar::Exact(_), Scalar::Float(_)) => Ordering::Less,
            (Scalar::Float(_), Scalar::Exact(_)) => Ordering::Greater,
        }
    }
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Exact(q) => {
                0u8.hash(state);
                q.hash(state);
            }
            Scalar::Float(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse_exact(s)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.collect_str(self),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

// Mixed-mode arithmetic promotes to float. Containers enforce a uniform mode,
// so this only matters for ad-hoc use.
fn binary(
    a: &Scalar,
    b: &Scalar,
    exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
    float: impl FnOnce(f64, f64) -> f64,
) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
        _ => Scalar::Float(float(a.to_f64(), b.to_f64())),
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                binary(self, rhs, |x, y| x $op y, |x, y| x $op y)
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);
impl_binop!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_after_arithmetic() {
        let a = Scalar::ratio(2, -4);
        assert_eq!(a.to_string(), "-1/2");
        let b = &a + &Scalar::ratio(3, 2);
        assert_eq!(b, Scalar::from_int(Mode::Exact, 1));
        assert_eq!(b.to_string(), "1");
        let q = b.as_rational().unwrap();
        assert!(q.denom().is_positive());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Scalar::parse_exact("6/4").unwrap().to_string(), "3/2");
        assert_eq!(Scalar::parse_exact("-7").unwrap().to_string(), "-7");
        assert_eq!(Scalar::parse_exact(" 0/5 ").unwrap().to_string(), "0");
        assert!(Scalar::parse_exact("1/0").is_err());
        assert!(Scalar::parse_exact("1.5").is_err());
        assert_eq!(Scalar::float(2.0).to_string(), "2.0");
    }

    #[test]
    fn abs_negates_numerator() {
        assert_eq!(Scalar::ratio(-3, 7).abs(), Scalar::ratio(3, 7));
        assert_eq!(Scalar::float(-0.5).abs(), Scalar::float(0.5));
    }

    #[test]
    fn float_equality_is_bitwise() {
        assert_ne!(Scalar::float(0.0), Scalar::float(-0.0));
        assert_eq!(Scalar::float(f64::NAN), Scalar::float(f64::NAN));
    }

    #[test]
    fn root_and_ln_handle_huge_values() {
        let big = Scalar::from_int(Mode::Exact, 2).pow(3000);
        assert!((big.root(3000) - 2.0).abs() < 1e-12);
        let tiny = Scalar::ratio(1, 2).pow(3000);
        assert!((tiny.root(3000) - 0.5).abs() < 1e-12);
        assert_eq!(Scalar::zero(Mode::Exact).root(5), 0.0);
        assert!((Scalar::from_int(Mode::Exact, 32).root(5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_mode_promotes_to_float() {
        let x = Scalar::ratio(1, 2) + Scalar::float(0.25);
        assert_eq!(x, Scalar::float(0.75));
    }
}
