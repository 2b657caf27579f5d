//! Numeric representations shared by the engines.
//!
//! Two table representations are supported behind one interface: exact
//! rationals ([`BigRational`]) and `f64` values carried in the radius-tilted
//! scale. [`Scalar`] abstracts over both so the recurrences and sweeps are
//! written once. [`Real`] is the dynamic counterpart used for user-facing
//! constants (radius, condition constants, witnesses).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance used whenever a comparison has to fall back to floats.
pub const FLOAT_REL_TOL: f64 = 1e-12;

/// Running sum in a fixed order.
pub trait Accumulator<S> {
    fn new() -> Self;
    fn push(&mut self, value: S);
    fn total(self) -> S;
}

/// Field operations needed by the counting and moment engines.
///
/// Method names avoid the `std::ops` names so that `f64` call sites are not
/// ambiguous.
pub trait Scalar: Clone + fmt::Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    /// True for the exact rational representation.
    const EXACT: bool;
    type Acc: Accumulator<Self>;

    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// `None` for the exact representation.
    fn from_f64(x: f64) -> Option<Self>;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Division; callers guarantee a nonzero divisor.
    fn over(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn as_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn to_real(&self) -> Real;
    /// The value itself for exact scalars.
    fn as_rational(&self) -> Option<&BigRational>;
    /// Lowest-terms `p/q` for rationals, shortest round-trip decimal for floats.
    fn render(&self) -> String;
    fn parse_value(s: &str) -> Result<Self>;

    /// `w^k / k! * num / den`.
    ///
    /// `ln_w` is the natural log of `w` computed without underflow; the float
    /// representation evaluates the product in the log domain so that tiny
    /// weights do not vanish before the division.
    fn weighted_ratio(w: &Self, ln_w: f64, k: usize, num: &Self, den: &Self) -> Self;

    /// `w^k / k!`.
    fn power_over_factorial(w: &Self, ln_w: f64, k: usize) -> Self;
}

/// Plain exact summation.
#[derive(Debug, Clone)]
pub struct ExactSum(BigRational);

impl Accumulator<BigRational> for ExactSum {
    fn new() -> Self {
        ExactSum(Zero::zero())
    }
    fn push(&mut self, value: BigRational) {
        self.0 += value;
    }
    fn total(self) -> BigRational {
        self.0
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl Accumulator<f64> for CompensatedSum {
    fn new() -> Self {
        CompensatedSum {
            sum: 0.0,
            carry: 0.0,
        }
    }
    fn push(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }
    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    type Acc = ExactSum;

    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn to_real(&self) -> Real {
        Real::Exact(self.clone())
    }
    fn as_rational(&self) -> Option<&BigRational> {
        Some(self)
    }
    fn render(&self) -> String {
        format_rational(self)
    }
    fn parse_value(s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn weighted_ratio(w: &Self, _ln_w: f64, k: usize, num: &Self, den: &Self) -> Self {
        Self::power_over_factorial(w, 0.0, k) * num / den
    }
    fn power_over_factorial(w: &Self, _ln_w: f64, k: usize) -> Self {
        let mut out: BigRational = One::one();
        for i in 1..=k {
            out = out * w / BigInt::from(i);
        }
        out
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    type Acc = CompensatedSum;

    fn zero_value() -> Self {
        0.0
    }
    fn one_value() -> Self {
        1.0
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_real(&self) -> Real {
        Real::Float(*self)
    }
    fn as_rational(&self) -> Option<&BigRational> {
        None
    }
    fn render(&self) -> String {
        format_float(*self)
    }
    fn parse_value(s: &str) -> Result<Self> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(s.to_string()))
    }
    fn weighted_ratio(_w: &Self, ln_w: f64, k: usize, num: &Self, den: &Self) -> Self {
        if *num == 0.0 || (k > 0 && ln_w == f64::NEG_INFINITY) {
            return 0.0;
        }
        if k == 0 {
            return (num.ln() - den.ln()).exp();
        }
        (k as f64 * ln_w - ln_factorial(k) + num.ln() - den.ln()).exp()
    }
    fn power_over_factorial(_w: &Self, ln_w: f64, k: usize) -> Self {
        if k == 0 {
            return 1.0;
        }
        if ln_w == f64::NEG_INFINITY {
            return 0.0;
        }
        (k as f64 * ln_w - ln_factorial(k)).exp()
    }
}

/// `ln k!`.
pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        statrs::function::gamma::ln_gamma(k as f64 + 1.0)
    }
}

/// Converts a rational to the nearest `f64`, saturating to infinity or zero
/// only when the value is genuinely out of range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || Zero::is_zero(r)) {
            return v;
        }
    }
    let ln = ln_rational(r);
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln.exp()
}

/// Natural log of `|r|`, valid far outside the `f64` range. Returns `-inf`
/// for zero.
pub fn ln_rational(r: &BigRational) -> f64 {
    if Zero::is_zero(r) {
        return f64::NEG_INFINITY;
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `p/q` in lowest terms with `q > 0`; integers print without a denominator.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Parses `p/q`, an integer, or a decimal such as `-1.25e-3` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigInt::from_str(&all_digits).map_err(|_| bad())?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let out = if scale >= 0 {
        BigRational::from_integer(value * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(value, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(out)
}

/// A real constant that is either an exact rational or a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn integer(n: i64) -> Self {
        Real::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Real::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rational_to_f64(r),
            Real::Float(x) => *x,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Real::Exact(r) if r.is_negative() => f64::NAN,
            Real::Exact(r) => ln_rational(r),
            Real::Float(x) => x.ln(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Float(_) => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_positive(),
            Real::Float(x) => *x > 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Real::Exact(_) => true,
            Real::Float(x) => x.is_finite(),
        }
    }

    /// Exact comparison when both sides are rational, otherwise `f64`.
    pub fn compare(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Real::Exact(r) => format_rational(r),
            Real::Float(x) => format_float(*x),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Real {
    type Err = Error;

    /// Rational and decimal strings become exact values.
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Real::Exact)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl From<BigRational> for Real {
    fn from(r: BigRational) -> Self {
        Real::Exact(r)
    }
}

/// Exact values serialize as `"p/q"` strings, floats as JSON numbers.
impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) => serializer.serialize_str(&format_rational(r)),
            Real::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"p/q\", a decimal string, or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Real, E> {
                parse_rational(v).map(Real::Exact).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Real, E> {
                Ok(Real::Float(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Real, E> {
                Ok(Real::integer(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Real, E> {
                Ok(Real::Exact(BigRational::from_integer(BigInt::from(v))))
            }
        }

        deserializer.deserialize_any(RealVisitor)
    }
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact `r^k` for a rational and a (possibly negative) integer exponent.
pub fn rational_pow(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(r.clone(), k as usize)
    } else {
        num_traits::pow(r.recip(), (-k) as usize)
    }
}

/// True when `a >= b` up to a relative tolerance.
pub fn float_ge(a: f64, b: f64, rel_tol: f64) -> bool {
    a >= b - rel_tol * a.abs().max(b.abs())
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}
