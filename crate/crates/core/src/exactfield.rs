//! Exact arithmetic in `Q` and in real quadratic fields `Q(sqrt(d))`.
//!
//! An element `a + b*sqrt(d)` is stored as its two rational coordinates.
//! Rational elements (`b = 0`) carry no radicand and embed into every
//! quadratic field, so they mix freely with elements of any `Q(sqrt(d))`.
//! Two irrational elements over different radicands cannot be combined.
//!
//! The order is the one inherited from the reals and is decided
//! symbolically by integer comparisons; there is no floating point on any
//! path that affects a result.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Radicand marker carried by elements whose irrational coordinate is zero.
const NO_RADICAND: u32 = 1;

/// Builds a rational from a numerator and denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// An exact element `rat + irr*sqrt(d)` of an ordered real quadratic field.
#[derive(Clone)]
pub struct QuadraticElement {
    rat: Rational,
    irr: Rational,
    d: u32,
}

impl QuadraticElement {
    /// `rat + irr*sqrt(d)`; `d` must be square-free and at least 2.
    pub fn new(rat: Rational, irr: Rational, d: u64) -> Result<Self> {
        if d < 2 || !is_square_free(d) || d > u32::MAX as u64 {
            return Err(Error::InvalidRadicand(d));
        }
        Ok(Self::from_parts(rat, irr, d as u32))
    }

    fn from_parts(rat: Rational, irr: Rational, d: u32) -> Self {
        let d = if irr.is_zero() { NO_RADICAND } else { d };
        QuadraticElement { rat, irr, d }
    }

    pub fn from_rational(rat: Rational) -> Self {
        QuadraticElement {
            rat,
            irr: Rational::zero(),
            d: NO_RADICAND,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// The rational number `num/den`.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::from_rational(rational(num, den))
    }

    /// `irr*sqrt(d)`.
    pub fn sqrt_multiple(irr: Rational, d: u64) -> Result<Self> {
        Self::new(Rational::zero(), irr, d)
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn irr(&self) -> &Rational {
        &self.irr
    }

    /// The radicand of an irrational element, `None` for rationals.
    pub fn radicand(&self) -> Option<u32> {
        (!self.irr.is_zero()).then_some(self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn rational_and_irrational_parts(&self) -> (Rational, Rational) {
        (self.rat.clone(), self.irr.clone())
    }

    fn common_radicand(&self, other: &Self) -> Result<u32> {
        match (self.radicand(), other.radicand()) {
            (Some(a), Some(b)) if a != b => Err(Error::MismatchedRadicand(a, b)),
            (Some(a), _) | (_, Some(a)) => Ok(a),
            (None, None) => Ok(NO_RADICAND),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::from_parts(&self.rat + &other.rat, &self.irr + &other.irr, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::from_parts(&self.rat - &other.rat, &self.irr - &other.irr, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let dr = Rational::from_integer(BigInt::from(d));
        let rat = &self.rat * &other.rat + &self.irr * &other.irr * dr;
        let irr = &self.rat * &other.irr + &other.rat * &self.irr;
        Ok(Self::from_parts(rat, irr, d))
    }

    /// Multiplicative inverse via the conjugate: `1/(a+b√d) = (a-b√d)/(a²-b²d)`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.rat.recip()));
        }
        let dr = Rational::from_integer(BigInt::from(self.d));
        let norm = &self.rat * &self.rat - &self.irr * &self.irr * dr;
        // norm != 0 because sqrt(d) is irrational
        Ok(Self::from_parts(&self.rat / &norm, -(&self.irr / &norm), self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.common_radicand(other)?;
        self.checked_mul(&other.invert()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::from_parts(&self.rat * r, &self.irr * r, self.d)
    }

    /// Exact sign of the real value, as -1, 0 or 1.
    pub fn sign(&self) -> i8 {
        let sr = signum(&self.rat);
        let si = signum(&self.irr);
        if si == 0 {
            return sr;
        }
        if sr == 0 || sr == si {
            return si;
        }
        if let Some(s) = self.approx().and_then(|(v, mag)| certain_sign(v, mag)) {
            return s;
        }
        // opposite signs: the coefficient with the larger square dominates
        let lhs = self.rat.numer() * self.rat.numer() * self.irr.denom() * self.irr.denom();
        let rhs = self.irr.numer() * self.irr.numer() * self.rat.denom() * self.rat.denom()
            * BigInt::from(self.d);
        match lhs.cmp(&rhs) {
            Ordering::Greater => sr,
            Ordering::Less => si,
            Ordering::Equal => unreachable!("sqrt({}) is irrational", self.d),
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rat.floor().to_integer();
        }
        if let Some((v, mag)) = self.approx() {
            let fl = v.floor();
            let margin = APPROX_TOLERANCE * (1.0 + mag);
            if v - fl > margin && fl + 1.0 - v > margin && fl.abs() < 1e15 {
                return BigInt::from(fl as i64);
            }
        }
        // bracket irr*sqrt(d) between consecutive multiples of 1/q
        let p = self.irr.numer();
        let q = self.irr.denom();
        let root = (p * p * BigInt::from(self.d)).sqrt();
        let low = if p.is_negative() { -(root + 1u32) } else { root };
        let mut guess = (&self.rat + Rational::new(low, q.clone())).floor().to_integer();
        while (self - &Self::from_bigint(guess.clone())).sign() < 0 {
            guess -= 1;
        }
        while (self - &Self::from_bigint(&guess + 1u32)).sign() >= 0 {
            guess += 1;
        }
        guess
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    /// `x - floor(x)`, the representative in `[0, 1)`.
    pub fn fractional_part(&self) -> Self {
        self - &Self::from_bigint(self.floor())
    }

    /// `(value, |rat| + |irr·sqrt(d)|)` in floating point, if finite. Used only
    /// to short-cut decisions that are far from a tie.
    fn approx(&self) -> Option<(f64, f64)> {
        let r = self.rat.to_f64()?;
        let i = if self.is_rational() {
            0.0
        } else {
            self.irr.to_f64()? * (self.d as f64).sqrt()
        };
        let (v, mag) = (r + i, r.abs() + i.abs());
        (v.is_finite() && mag.is_finite()).then_some((v, mag))
    }

    /// Floating point approximation, for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return r;
        }
        r + self.irr.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// Decimal expansion truncated toward zero after `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let negative = self.sign() < 0;
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = self.abs().scale(&Rational::from_integer(scale.clone())).floor();
        let (int_part, frac_part) = scaled.div_rem(&scale);
        let mut s = String::new();
        if negative && !scaled.is_zero() {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            let frac = frac_part.to_string();
            s.push('.');
            for _ in frac.len()..digits as usize {
                s.push('0');
            }
            s.push_str(&frac);
        }
        s
    }
}

/// Relative error bound under which floating point comparisons are trusted;
/// anything closer is decided exactly.
const APPROX_TOLERANCE: f64 = 1e-9;

fn certain_sign(v: f64, mag: f64) -> Option<i8> {
    if v.abs() > APPROX_TOLERANCE * (1.0 + mag) {
        Some(if v > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

fn signum(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for QuadraticElement {
    fn eq(&self, other: &Self) -> bool {
        // the NO_RADICAND normalization makes the representation unique
        self.rat == other.rat && self.irr == other.irr && self.d == other.d
    }
}

impl Eq for QuadraticElement {}

impl Hash for QuadraticElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rat.hash(state);
        self.irr.hash(state);
        self.d.hash(state);
    }
}

impl PartialOrd for QuadraticElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticElement {
    /// Panics when both operands are irrational over different radicands.
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if let (Some((a, ma)), Some((b, mb))) = (self.approx(), other.approx()) {
            match certain_sign(a - b, ma + mb) {
                Some(1) => return Ordering::Greater,
                Some(_) => return Ordering::Less,
                None => {}
            }
        }
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Debug for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        if !self.rat.is_zero() {
            write!(f, "{}", self.rat)?;
            if self.irr.is_positive() {
                write!(f, "+")?;
            }
        }
        write!(f, "{}*sqrt({})", self.irr, self.d)
    }
}

impl From<Rational> for QuadraticElement {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for QuadraticElement {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident, $checked:ident) => {
        impl<'a> $imp<&'a QuadraticElement> for &'a QuadraticElement {
            type Output = QuadraticElement;
            fn $method(self, rhs: &'a QuadraticElement) -> QuadraticElement {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $imp<QuadraticElement> for QuadraticElement {
            type Output = QuadraticElement;
            fn $method(self, rhs: QuadraticElement) -> QuadraticElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a QuadraticElement> for QuadraticElement {
            type Output = QuadraticElement;
            fn $method(self, rhs: &'a QuadraticElement) -> QuadraticElement {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<QuadraticElement> for &'a QuadraticElement {
            type Output = QuadraticElement;
            fn $method(self, rhs: QuadraticElement) -> QuadraticElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadraticElement {
    type Output = QuadraticElement;
    fn neg(self) -> QuadraticElement {
        QuadraticElement::from_parts(-&self.rat, -&self.irr, self.d)
    }
}

impl Neg for QuadraticElement {
    type Output = QuadraticElement;
    fn neg(self) -> QuadraticElement {
        -&self
    }
}

impl AddAssign<&QuadraticElement> for QuadraticElement {
    fn add_assign(&mut self, rhs: &QuadraticElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QuadraticElement> for QuadraticElement {
    fn sub_assign(&mut self, rhs: &QuadraticElement) {
        *self = &*self - rhs;
    }
}

impl Zero for QuadraticElement {
    fn zero() -> Self {
        QuadraticElement::zero()
    }
    fn is_zero(&self) -> bool {
        QuadraticElement::is_zero(self)
    }
}

impl One for QuadraticElement {
    fn one() -> Self {
        QuadraticElement::one()
    }
}

// Text syntax: sums of terms `p`, `p/q`, `p/q*sqrt(D)` or `sqrt(D)`, with
// optional signs and arbitrary whitespace.

fn parse_rational(s: &str, whole: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        input: whole.to_string(),
        reason: reason.to_string(),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

impl FromStr for QuadraticElement {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Err(err("empty"));
        }
        // split into signed terms; a sign inside "sqrt(...)" is rejected below
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in s.chars().enumerate() {
            if ch == '+' || ch == '-' {
                if current.is_empty() {
                    if i != 0 {
                        return Err(err("dangling sign"));
                    }
                    negative = ch == '-';
                    continue;
                }
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(err("dangling sign"));
        }
        terms.push((negative, current));

        let mut rat = Rational::zero();
        let mut irr = Rational::zero();
        let mut radicand: Option<u64> = None;
        for (negative, term) in terms {
            let (coef, root) = if let Some(idx) = term.find("sqrt(") {
                if !term.ends_with(')') {
                    return Err(err("unterminated sqrt"));
                }
                let d: u64 = term[idx + 5..term.len() - 1]
                    .parse()
                    .map_err(|_| err("bad radicand"))?;
                let coef = match &term[..idx] {
                    "" => Rational::one(),
                    c => {
                        let c = c.strip_suffix('*').ok_or_else(|| err("expected '*' before sqrt"))?;
                        parse_rational(c, input)?
                    }
                };
                (coef, Some(d))
            } else {
                (parse_rational(&term, input)?, None)
            };
            let coef = if negative { -coef } else { coef };
            match root {
                None => rat += coef,
                Some(d) => {
                    if radicand.is_some_and(|r| r != d) {
                        return Err(err("more than one radicand"));
                    }
                    radicand = Some(d);
                    irr += coef;
                }
            }
        }
        match radicand {
            Some(d) => QuadraticElement::new(rat, irr, d),
            None => Ok(QuadraticElement::from_rational(rat)),
        }
    }
}

/// Parses an element, for literals in data tables.
pub fn qe(s: &str) -> QuadraticElement {
    s.parse().unwrap_or_else(|e| panic!("{}", e))
}

/// Decides whether two elements are linearly independent over `Q`, i.e.
/// whether their coordinate vectors `(rat, irr)` are not proportional.
pub fn q_linearly_independent(a: &QuadraticElement, b: &QuadraticElement) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    if a.radicand().is_some() && b.radicand().is_some() && a.radicand() != b.radicand() {
        return true;
    }
    a.rat() * b.irr() - a.irr() * b.rat() != Rational::zero()
}

impl serde::Serialize for QuadraticElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QuadraticElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
