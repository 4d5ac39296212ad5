//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! A [`Scalar`] is `p + q·√d` with `p, q` reduced big rationals. The field
//! discriminant `d` travels with every irrational value; rational values
//! (`q = 0`) carry `d = 0` so that they mix freely with any field. Mixing two
//! different non-zero discriminants is a programming error and panics.
//!
//! Comparison is decided exactly. Floating point only appears in
//! [`Scalar::approx`], which is meant for report emission.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NumError {
    #[error("discriminant {0} is not square-free (or is 1)")]
    BadDiscriminant(u64),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Parses `"num"` or `"num/den"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let r = if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| NumError::BadRational(s.into()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| NumError::BadRational(s.into()))?;
        if d.is_zero() {
            return Err(NumError::BadRational(s.into()));
        }
        BigRational::new(n, d)
    } else {
        BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| NumError::BadRational(s.into()))?,
        )
    };
    Ok(r)
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// True for `d = 0` and for square-free `d ≥ 2`.
pub fn valid_discriminant(d: u64) -> bool {
    if d == 0 {
        return true;
    }
    if d == 1 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= d {
        if d.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// An exact element `p + q·√d` of a real quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    p: Rational,
    q: Rational,
    d: u64,
}

impl Scalar {
    /// Builds `p + q√d`. `d` must be 0 or square-free and at least 2.
    pub fn new(p: Rational, q: Rational, d: u64) -> Result<Self, NumError> {
        if !valid_discriminant(d) {
            return Err(NumError::BadDiscriminant(d));
        }
        Ok(Self::canonical(p, q, d))
    }

    fn canonical(p: Rational, q: Rational, d: u64) -> Self {
        if q.is_zero() || d == 0 {
            Scalar { p, q: Rational::zero(), d: 0 }
        } else {
            Scalar { p, q, d }
        }
    }

    pub fn rational(p: Rational) -> Self {
        Scalar { p, q: Rational::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `√d` itself.
    pub fn sqrt(d: u64) -> Result<Self, NumError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Discriminant, or 0 for rational values.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    fn field(&self, other: &Scalar) -> u64 {
        match (self.d, other.d) {
            (0, e) | (e, 0) => e,
            (e, f) if e == f => e,
            (e, f) => panic!("mixing quadratic fields Q(sqrt {e}) and Q(sqrt {f})"),
        }
    }

    /// Sign of `p + q√d`, decided without approximation.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.cmp(&Rational::zero());
        let sq = self.q.cmp(&Rational::zero());
        match (sp, sq) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (a, b) if a == b => a,
            _ => {
                // opposite signs: compare p² with q²d
                let p2 = &self.p * &self.p;
                let q2d = &self.q * &self.q * Rational::from_integer(BigInt::from(self.d));
                let c = p2.cmp(&q2d);
                if sp == Ordering::Greater {
                    c
                } else {
                    c.reverse()
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `p − q√d`.
    pub fn conjugate(&self) -> Scalar {
        Scalar { p: self.p.clone(), q: -&self.q, d: self.d }
    }

    /// Field norm `p² − q²d`, always rational.
    pub fn norm(&self) -> Rational {
        &self.p * &self.p - &self.q * &self.q * Rational::from_integer(BigInt::from(self.d))
    }

    pub fn checked_inv(&self) -> Result<Scalar, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Scalar::canonical(&self.p / &n, -&self.q / &n, self.d))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumError> {
        Ok(self * &other.checked_inv()?)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.p.floor().to_integer();
        }
        // candidate from an approximation, then corrected by exact comparisons
        let guess = self.to_f64().floor();
        let mut n = BigInt::from(guess as i64);
        if !guess.is_finite() || guess.abs() > 1e15 {
            n = self.p.floor().to_integer();
            let s = BigInt::from(self.d).sqrt();
            n += (&self.q * Rational::from_integer(s)).floor().to_integer();
        }
        loop {
            let ns = Scalar::rational(Rational::from_integer(n.clone()));
            if ns > *self {
                n -= 1;
                continue;
            }
            let n1 = Scalar::rational(Rational::from_integer(&n + 1));
            if n1 <= *self {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Scalar {
        let f = self.floor();
        self - &Scalar::rational(Rational::from_integer(f))
    }

    /// Floating approximation; for emission and plotting only.
    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return p;
        }
        p + self.q.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// Decimal string accurate to within `2^-bits`.
    pub fn approx(&self, bits: u32) -> String {
        let bits = bits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        // √d to m fractional bits, m large enough that |q|·2^-m is negligible
        let value = if self.is_rational() {
            self.p.clone()
        } else {
            let qbits = self.q.abs().ceil().to_integer().bits() as u32;
            let m = bits + qbits + 3;
            let scaled = (BigInt::from(self.d) << (2 * m as usize)).sqrt();
            let root = BigRational::new(scaled, BigInt::one() << m as usize);
            &self.p + &self.q * root
        };
        // 10^-digits / 2 <= 2^-(bits+1) holds with digits = ceil(bits log10 2)
        let digits = ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let scale = BigInt::from(10).pow(digits as u32);
        let scaled = (value.abs() * Rational::from_integer(scale.clone())).round().to_integer();
        let (int_part, frac_part) = scaled.div_rem(&scale);
        let sign = if value.is_negative() && !scaled.is_zero() { "-" } else { "" };
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.p)
        } else if self.p.is_zero() {
            write!(f, "{}*sqrt({})", self.q, self.d)
        } else if self.q.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.p, -&self.q, self.d)
        } else {
            write!(f, "{}+{}*sqrt({})", self.p, self.q, self.d)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    let d = a.field(b);
    Scalar::canonical(&a.p + &b.p, &a.q + &b.q, d)
});

forward_binop!(Sub, sub, |a, b| {
    let d = a.field(b);
    Scalar::canonical(&a.p - &b.p, &a.q - &b.q, d)
});

forward_binop!(Mul, mul, |a, b| {
    let d = a.field(b);
    let dd = Rational::from_integer(BigInt::from(d));
    let p = &a.p * &b.p + &a.q * &b.q * dd;
    let q = &a.p * &b.q + &a.q * &b.p;
    Scalar::canonical(p, q, d)
});

forward_binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by zero scalar"));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { p: -&self.p, q: -&self.q, d: self.d }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// JSON form `{"p": "num/den", "q": "num/den"}`; the field is supplied by the
/// surrounding document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScalarRepr {
    pub p: String,
    #[serde(default = "zero_string")]
    pub q: String,
}

fn zero_string() -> String {
    "0".to_string()
}

impl ScalarRepr {
    pub fn to_scalar(&self, d: u64) -> Result<Scalar, NumError> {
        let q = parse_rational(&self.q)?;
        let d = if q.is_zero() { 0 } else { d };
        Scalar::new(parse_rational(&self.p)?, q, d)
    }

    pub fn from_scalar(s: &Scalar) -> Self {
        ScalarRepr { p: s.p.to_string(), q: s.q.to_string() }
    }
}

/// A scalar or one of the two infinities.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtScalar {
    NegInf,
    Finite(Scalar),
    PosInf,
}

impl ExtScalar {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ExtScalar::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtScalar::Finite(_))
    }
}

impl From<Scalar> for ExtScalar {
    fn from(s: Scalar) -> Self {
        ExtScalar::Finite(s)
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtScalar::NegInf => write!(f, "-inf"),
            ExtScalar::PosInf => write!(f, "+inf"),
            ExtScalar::Finite(s) => write!(f, "{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s2(p: Rational, q: Rational) -> Scalar {
        Scalar::new(p, q, 2).unwrap()
    }

    #[test]
    fn make_scalar_examples() {
        let half = Scalar::new(rat(1, 2), rat(0, 1), 2).unwrap();
        assert!(half.is_rational());
        assert_eq!(half, Scalar::frac(1, 2));
        let root2 = Scalar::new(rat(0, 1), rat(1, 1), 2).unwrap();
        assert_eq!(root2, Scalar::sqrt(2).unwrap());
        assert_eq!(root2.d(), 2);
        let r = s2(rat(2, 4), rat(2, 6));
        assert_eq!(r.p(), &rat(1, 2));
        assert_eq!(r.q(), &rat(1, 3));
    }

    #[test]
    fn discriminant_validation() {
        assert!(Scalar::new(rat(0, 1), rat(1, 1), 4).is_err());
        assert!(Scalar::new(rat(0, 1), rat(1, 1), 1).is_err());
        assert!(Scalar::new(rat(0, 1), rat(1, 1), 12).is_err());
        assert!(Scalar::new(rat(0, 1), rat(1, 1), 30).is_ok());
    }

    #[test]
    fn compare_examples() {
        let one = Scalar::one();
        let root2 = Scalar::sqrt(2).unwrap();
        assert_eq!(one.cmp(&root2), Ordering::Less);
        assert_eq!(root2.cmp(&root2.clone()), Ordering::Equal);
        // (√2)² = 2 < 9/4 = (3/2)², so 1 + √2 < 5/2
        let lhs = &one + &root2;
        assert_eq!(lhs.cmp(&Scalar::frac(5, 2)), Ordering::Less);
        // √2 − 1 vs 5/12: 2 vs (17/12)² = 289/144 > 2
        let alpha = &root2 - &one;
        assert!(alpha < Scalar::frac(5, 12));
        assert!(alpha > Scalar::frac(2, 5));
    }

    #[test]
    fn approx_examples() {
        assert_eq!(Scalar::frac(1, 2).approx(10), "0.5000");
        assert_eq!(Scalar::zero().approx(4), "0");
        let a = Scalar::sqrt(2).unwrap().approx(20);
        // long-division digits of √2: 1.4142135623...
        assert!(a.starts_with("1.414213"), "{a}");
        let neg = (-Scalar::sqrt(2).unwrap()).approx(10);
        assert_eq!(neg, "-1.4142");
    }

    #[test]
    fn floor_and_fract() {
        let a = Scalar::sqrt(2).unwrap() * Scalar::from_int(7);
        assert_eq!(a.floor(), BigInt::from(9));
        let f = a.fract();
        assert!(f >= Scalar::zero() && f < Scalar::one());
        assert_eq!((-Scalar::sqrt(2).unwrap()).floor(), BigInt::from(-2));
        assert_eq!(Scalar::frac(-1, 2).floor(), BigInt::from(-1));
    }

    #[test]
    fn inverse_and_division() {
        let x = &Scalar::one() + &Scalar::sqrt(2).unwrap();
        let inv = x.checked_inv().unwrap();
        assert_eq!(&x * &inv, Scalar::one());
        // 1/(1+√2) = √2 − 1
        assert_eq!(inv, Scalar::sqrt(2).unwrap() - Scalar::one());
        assert_eq!(Scalar::zero().checked_inv(), Err(NumError::DivisionByZero));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn repr_roundtrip() {
        let x = s2(rat(-1, 3), rat(5, 7));
        let r = ScalarRepr::from_scalar(&x);
        assert_eq!(r.to_scalar(2).unwrap(), x);
    }

    #[test]
    fn ext_order() {
        let a = ExtScalar::Finite(Scalar::from_int(-1_000_000));
        assert!(ExtScalar::NegInf < a);
        assert!(a < ExtScalar::PosInf);
    }

    fn small() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6)
            .prop_map(|(a, b, c, d)| s2(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn order_is_total_and_transitive(a in small(), b in small(), c in small()) {
            let ab = a.cmp(&b);
            prop_assert_eq!(ab, b.cmp(&a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }

        #[test]
        fn order_compatible_with_arithmetic(a in small(), b in small(), c in small()) {
            if a < b {
                prop_assert!(&a + &c < &b + &c);
                if c.is_positive() {
                    prop_assert!(&a * &c < &b * &c);
                }
            }
        }

        #[test]
        fn field_closure(a in small(), b in small()) {
            let s = &a + &b;
            let p = &a * &b;
            prop_assert_eq!(&s - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&p / &b, a.clone());
            }
        }

        #[test]
        fn approx_within_tolerance(a in small()) {
            let s: f64 = a.approx(30).parse().unwrap();
            prop_assert!((s - a.to_f64()).abs() < 1e-8);
        }
    }
}
