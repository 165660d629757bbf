use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FieldError, Rational};

/// Splits `n` as `s^2 * k` with `k` squarefree; returns `(s, k)`.
pub fn squarefree_kernel(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut square = 1u64;
    let mut kernel = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        if e % 2 == 1 {
            kernel *= p;
        }
        p += 1;
    }
    kernel *= rest;
    (square, kernel)
}

/// An exact real number `a + b*sqrt(D)` with `a, b` rational.
///
/// Canonical form: `D` is squarefree and at least 2 whenever `b != 0`, and
/// `D = 0` whenever `b = 0`. Plain rationals therefore carry `disc() == 0`
/// and combine with elements of any field. Because the representation is
/// canonical, derived equality and hashing are value equality.
///
/// The arithmetic operators panic when both operands carry different nonzero
/// discriminants; the `try_*` methods report [`FieldError`] instead.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadElem {
    rational: Rational,
    radical: Rational,
    disc: u64,
}

impl QuadElem {
    pub fn new(rational: Rational, radical: Rational, disc: u64) -> Self {
        let (square, kernel) = squarefree_kernel(disc);
        if kernel <= 1 || radical.is_zero() {
            let folded = if kernel == 1 {
                rational + radical * Rational::from_integer(BigInt::from(square))
            } else {
                rational
            };
            return QuadElem {
                rational: folded,
                radical: Rational::zero(),
                disc: 0,
            };
        }
        QuadElem {
            rational,
            radical: radical * Rational::from_integer(BigInt::from(square)),
            disc: kernel,
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadElem {
            rational: r,
            radical: Rational::zero(),
            disc: 0,
        }
    }

    pub fn from_frac(numer: i64, denom: i64) -> Self {
        Self::from_rational(super::rat(numer, denom))
    }

    /// `sqrt(n)`, folded to a rational when `n` is a perfect square.
    pub fn sqrt(n: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), n)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn phi() -> Self {
        Self::new(super::rat(1, 2), super::rat(1, 2), 5)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn radical_part(&self) -> &Rational {
        &self.radical
    }

    pub fn disc(&self) -> u64 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rational)
    }

    /// Common field of two elements, or an error if they disagree.
    pub fn common_disc(&self, other: &QuadElem) -> Result<u64, FieldError> {
        match (self.disc, other.disc) {
            (0, d) | (d, 0) => Ok(d),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(FieldError::MismatchedField(a, b)),
        }
    }

    /// Sign of the real number, decided from the signs of both parts and a
    /// comparison of `a^2` with `b^2 D`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.radical);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.rational * &self.rational;
        let b2d = &self.radical * &self.radical * Rational::from_integer(BigInt::from(self.disc));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> QuadElem {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn conjugate(&self) -> QuadElem {
        QuadElem {
            rational: self.rational.clone(),
            radical: -&self.radical,
            disc: self.disc,
        }
    }

    /// Field norm `a^2 - b^2 D`.
    pub fn norm(&self) -> Rational {
        &self.rational * &self.rational
            - &self.radical * &self.radical * Rational::from_integer(BigInt::from(self.disc))
    }

    pub fn try_add(&self, other: &QuadElem) -> Result<QuadElem, FieldError> {
        let disc = self.common_disc(other)?;
        Ok(Self::canonical(
            &self.rational + &other.rational,
            &self.radical + &other.radical,
            disc,
        ))
    }

    pub fn try_sub(&self, other: &QuadElem) -> Result<QuadElem, FieldError> {
        let disc = self.common_disc(other)?;
        Ok(Self::canonical(
            &self.rational - &other.rational,
            &self.radical - &other.radical,
            disc,
        ))
    }

    pub fn try_mul(&self, other: &QuadElem) -> Result<QuadElem, FieldError> {
        let disc = self.common_disc(other)?;
        let d = Rational::from_integer(BigInt::from(disc));
        let rational = &self.rational * &other.rational + &self.radical * &other.radical * d;
        let radical = &self.rational * &other.radical + &self.radical * &other.rational;
        Ok(Self::canonical(rational, radical, disc))
    }

    pub fn try_inverse(&self) -> Result<QuadElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::canonical(
            &self.rational / &n,
            -&self.radical / &n,
            self.disc,
        ))
    }

    pub fn try_div(&self, other: &QuadElem) -> Result<QuadElem, FieldError> {
        self.common_disc(other)?;
        self.try_mul(&other.try_inverse()?)
    }

    pub fn inverse(&self) -> QuadElem {
        self.try_inverse().expect("inverse of zero")
    }

    pub fn cmp_exact(&self, other: &QuadElem) -> Result<Ordering, FieldError> {
        let diff = self.try_sub(other)?;
        Ok(diff.signum().cmp(&0))
    }

    /// Total order for elements known to share a field; panics otherwise.
    pub fn cmp_same_field(&self, other: &QuadElem) -> Ordering {
        self.cmp_exact(other).expect("comparison across fields")
    }

    pub fn max_of(a: &QuadElem, b: &QuadElem) -> QuadElem {
        if a.cmp_same_field(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn min_of(a: &QuadElem, b: &QuadElem) -> QuadElem {
        if a.cmp_same_field(b) == Ordering::Greater {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn square(&self) -> QuadElem {
        self * self
    }

    pub fn pow(&self, exp: u32) -> QuadElem {
        let mut acc = QuadElem::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// The nonnegative square root when it is again of the form `a + b*sqrt(D)`.
    ///
    /// For a rational input the root may introduce a new field. For an
    /// irrational input, `(x + y sqrt D)^2 = a + b sqrt D` forces
    /// `x^2 = (a +- sqrt(a^2 - D b^2)) / 2`.
    pub fn sqrt_exact(&self) -> Option<QuadElem> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(QuadElem::zero());
        }
        if self.radical.is_zero() {
            let n = self.rational.numer() * self.rational.denom();
            let d = self.rational.denom().clone();
            if let Some(r) = rational_sqrt(&self.rational) {
                return Some(QuadElem::from_rational(r));
            }
            let (s, k) = squarefree_kernel(n.to_u64()?);
            let coeff = Rational::new(BigInt::from(s), d);
            return Some(QuadElem::new(Rational::zero(), coeff, k));
        }
        let disc = Rational::from_integer(BigInt::from(self.disc));
        let norm = &self.rational * &self.rational - &self.radical * &self.radical * &disc;
        let n = rational_sqrt(&norm)?;
        let two = Rational::from_integer(BigInt::from(2));
        for cand in [(&self.rational + &n) / &two, (&self.rational - &n) / &two] {
            if cand.is_zero() {
                continue;
            }
            let Some(x) = rational_sqrt(&cand) else { continue };
            let y = &self.radical / (&two * &x);
            let root = QuadElem::canonical(x, y, self.disc);
            let root = if root.is_negative() { -root } else { root };
            if &root.square() == self {
                return Some(root);
            }
        }
        None
    }

    /// Approximate value, for rendering only.
    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.radical.is_zero() {
            return a;
        }
        let b = self.radical.to_f64().unwrap_or(f64::NAN);
        a + b * (self.disc as f64).sqrt()
    }

    fn canonical(rational: Rational, radical: Rational, disc: u64) -> QuadElem {
        if radical.is_zero() || disc == 0 {
            QuadElem {
                rational,
                radical: Rational::zero(),
                disc: 0,
            }
        } else {
            QuadElem {
                rational,
                radical,
                disc,
            }
        }
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl From<i64> for QuadElem {
    fn from(n: i64) -> Self {
        QuadElem::from_int(n)
    }
}

impl From<Rational> for QuadElem {
    fn from(r: Rational) -> Self {
        QuadElem::from_rational(r)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem {
            rational: -self.rational,
            radical: -self.radical,
            disc: self.disc,
        }
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem {
            rational: -&self.rational,
            radical: -&self.radical,
            disc: self.disc,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                match self.$try(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl AddAssign<&QuadElem> for QuadElem {
    fn add_assign(&mut self, rhs: &QuadElem) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QuadElem> for QuadElem {
    fn sub_assign(&mut self, rhs: &QuadElem) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QuadElem> for QuadElem {
    fn mul_assign(&mut self, rhs: &QuadElem) {
        *self = &*self * rhs;
    }
}

impl Zero for QuadElem {
    fn zero() -> Self {
        QuadElem::zero()
    }
    fn is_zero(&self) -> bool {
        QuadElem::is_zero(self)
    }
}

impl One for QuadElem {
    fn one() -> Self {
        QuadElem::one()
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadElem {
    /// `p/q`, `p/q+r/s*sqrt(D)`, or `r/s*sqrt(D)` when the rational part is zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radical.is_zero() {
            return write_rational(f, &self.rational);
        }
        if !self.rational.is_zero() {
            write_rational(f, &self.rational)?;
            if self.radical.is_positive() {
                f.write_str("+")?;
            }
        }
        write_rational(f, &self.radical)?;
        write!(f, "*sqrt({})", self.disc)
    }
}

/// Parses `p`, `p/q` or `-p/q` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let err = || FieldError::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

fn parse_term(term: &str, whole: &str) -> Result<QuadElem, FieldError> {
    let err = || FieldError::Parse(whole.to_string());
    let t = term.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let value = if let Some(idx) = body.find("sqrt") {
        let coeff = body[..idx].trim().trim_end_matches('*').trim();
        let coeff = if coeff.is_empty() {
            Rational::one()
        } else {
            parse_rational(coeff)?
        };
        let radicand = body[idx + 4..].trim();
        let radicand = radicand
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(radicand)
            .trim();
        let d: u64 = radicand.parse().map_err(|_| err())?;
        QuadElem::new(Rational::zero(), coeff, d)
    } else {
        QuadElem::from_rational(parse_rational(body)?)
    };
    Ok(if negative { -value } else { value })
}

impl FromStr for QuadElem {
    type Err = FieldError;

    /// Accepts sums of rational terms and `coeff*sqrt(D)` terms, e.g.
    /// `1/2+1/2*sqrt(5)`, `-sqrt(2)`, `3-2*sqrt5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0i32;
        let bytes = s.as_bytes();
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > start => {
                    let prev = s[..i].trim_end().chars().last();
                    if !matches!(prev, Some('*') | Some('/') | Some('(')) && !s[start..i].trim().is_empty() {
                        terms.push(&s[start..i]);
                        start = i;
                    }
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut acc = QuadElem::zero();
        for term in terms {
            if term.trim().is_empty() {
                return Err(FieldError::Parse(s.to_string()));
            }
            acc = acc.try_add(&parse_term(term, s)?)?;
        }
        Ok(acc)
    }
}

impl Serialize for QuadElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Square root of a nonnegative rational when it is rational.
fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn q(s: &str) -> QuadElem {
        s.parse().unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(QuadElem::zero().signum(), 0);
        assert_eq!(q("2-sqrt(5)").signum(), -1);
        assert_eq!(q("-1/2+1/2*sqrt(5)").signum(), 1);
        assert_eq!(q("-3+2*sqrt(2)").signum(), -1);
        assert_eq!(q("3-2*sqrt(2)").signum(), 1);
    }

    #[test]
    fn golden_ratio_relation() {
        let phi = QuadElem::phi();
        assert_eq!(&phi * &phi, &phi + QuadElem::one());
    }

    #[test]
    fn conjugate_flips_radical() {
        assert_eq!(q("3+2*sqrt(5)").conjugate(), q("3-2*sqrt(5)"));
    }

    #[test]
    fn prototype_lambda_relation() {
        // D = 5, (b, c, e) = (1, 1, -1): lambda^2 = e*lambda + bc
        let lambda = q("-1/2+1/2*sqrt(5)");
        assert_eq!(lambda.square(), -&lambda + QuadElem::one());
    }

    #[test]
    fn disc_normalization_folds_squares() {
        let x = QuadElem::new(rat(0, 1), rat(1, 1), 8);
        assert_eq!(x, QuadElem::new(rat(0, 1), rat(2, 1), 2));
        assert_eq!(QuadElem::sqrt(9), QuadElem::from_int(3));
        assert_eq!(squarefree_kernel(72), (6, 2));
        assert_eq!(squarefree_kernel(41), (1, 41));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = QuadElem::sqrt(2);
        let b = QuadElem::sqrt(3);
        assert_eq!(a.try_add(&b), Err(FieldError::MismatchedField(2, 3)));
        assert!(a.try_add(&QuadElem::from_int(1)).is_ok());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            QuadElem::one().try_div(&QuadElem::zero()),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn formatting_and_parsing() {
        for s in ["0", "-3/4", "1/2+1/2*sqrt(5)", "-1/2*sqrt(3)", "7-2*sqrt(2)"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("sqrt5"), QuadElem::sqrt(5));
        assert_eq!(q("1/2 + 1/2*sqrt(5)"), QuadElem::phi());
        assert!("1/0".parse::<QuadElem>().is_err());
        assert!("abc".parse::<QuadElem>().is_err());
        assert!("1+".parse::<QuadElem>().is_err());
    }

    #[test]
    fn exact_square_roots() {
        let q = |s: &str| s.parse::<QuadElem>().unwrap();
        assert_eq!(q("3+2*sqrt(2)").sqrt_exact(), Some(q("1+sqrt(2)")));
        assert_eq!(q("3-2*sqrt(2)").sqrt_exact(), Some(q("-1+sqrt(2)")));
        assert_eq!(q("8/9").sqrt_exact(), Some(q("2/3*sqrt(2)")));
        assert_eq!(q("9/4").sqrt_exact(), Some(q("3/2")));
        assert_eq!(q("1+sqrt(5)").sqrt_exact(), None);
        assert_eq!(q("-2").sqrt_exact(), None);
    }
}
