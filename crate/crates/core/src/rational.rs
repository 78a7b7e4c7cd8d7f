//! Exact rational numbers with a fast path for dyadic values.
//!
//! Every quantity in the crate is a [`Rational`]. Almost all of them are
//! dyadic (the denominator is a power of two), and the deep recursions
//! produce dyadics with denominators of tens of thousands of bits. Those
//! are stored as an odd numerator plus a shift, so addition, comparison
//! and reduction are linear-time shifts rather than gcd computations.
//! Non-dyadic values (such as `2/5`) take the general gcd path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Denom {
    /// Denominator `2^k`.
    Pow2(u64),
    /// Any denominator with an odd factor greater than one.
    Other(BigUint),
}

/// An exact rational number in lowest terms.
///
/// Zero is `0/1`. Equality and hashing are structural, which is sound
/// because the representation is canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: Denom,
}

/// The exponent `e(a)` of a dyadic rational: the `n` in `a = (2k+1)/2^n`.
///
/// `NegativeInfinity` is the exponent of zero and orders below every finite
/// exponent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExponentValue {
    NegativeInfinity,
    Finite(i64),
}

impl fmt::Display for ExponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentValue::NegativeInfinity => f.write_str("-inf"),
            ExponentValue::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Binary operations exposed by [`arith`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Min,
    Max,
}

/// Output styles for [`format_rational`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum RationalStyle {
    /// `p/q`, or `p` when `q = 1`.
    #[default]
    Fraction,
    /// `2^e` for signed powers of two, `p/2^k` for other dyadics.
    Pow2,
    /// Terminating decimal expansion when one exists, else a fraction.
    Decimal,
}

fn shl_int(n: &BigInt, by: u64) -> BigInt {
    if by == 0 {
        n.clone()
    } else {
        n << by
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational {
            num: BigInt::zero(),
            den: Denom::Pow2(0),
        }
    }

    pub fn one() -> Self {
        Rational::from_integer(1)
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        Rational {
            num: n.into(),
            den: Denom::Pow2(0),
        }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Rational::from_integer(BigInt::one() << (e as u64))
        } else {
            Rational {
                num: BigInt::one(),
                den: Denom::Pow2(e.unsigned_abs()),
            }
        }
    }

    /// `num / 2^shift`, reduced.
    pub fn dyadic(num: BigInt, shift: i64) -> Self {
        if num.is_zero() {
            return Rational::zero();
        }
        if shift <= 0 {
            return Rational::from_integer(shl_int(&num, shift.unsigned_abs()));
        }
        let shift = shift as u64;
        let tz = num.trailing_zeros().unwrap_or(0).min(shift);
        Rational {
            num: if tz == 0 { num } else { num >> tz },
            den: Denom::Pow2(shift - tz),
        }
    }

    /// Build `num/den` in lowest terms; `None` when `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        Some(Rational::from_parts(num, den.magnitude().clone()))
    }

    /// Convenience constructor for small fractions. Panics on a zero
    /// denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Rational::new(num.into(), den.into()).expect("zero denominator")
    }

    fn from_parts(num: BigInt, den: BigUint) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Rational::zero();
        }
        let g = num.magnitude().gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num / BigInt::from(g.clone()), den / g)
        };
        let tz = den.trailing_zeros().unwrap_or(0);
        if den.bits() == tz + 1 {
            Rational {
                num,
                den: Denom::Pow2(tz),
            }
        } else {
            Rational {
                num,
                den: Denom::Other(den),
            }
        }
    }

    fn den_big(&self) -> BigUint {
        match &self.den {
            Denom::Pow2(k) => BigUint::one() << *k,
            Denom::Other(d) => d.clone(),
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    /// The reduced denominator. `0` has denominator `1`.
    pub fn denom(&self) -> BigUint {
        self.den_big()
    }

    /// `log2` of the denominator when it is a power of two.
    pub fn denom_log2(&self) -> Option<u64> {
        match self.den {
            Denom::Pow2(k) => Some(k),
            Denom::Other(_) => None,
        }
    }

    /// `1 / denominator`.
    pub fn recip_denom(&self) -> Rational {
        match &self.den {
            Denom::Pow2(k) => Rational::pow2(-(*k as i64)),
            Denom::Other(d) => Rational {
                num: BigInt::one(),
                den: Denom::Other(d.clone()),
            },
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self.den, Denom::Pow2(_))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.den, Denom::Pow2(0))
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn abs(&self) -> Rational {
        Rational {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    /// Multiply by `2^e` exactly.
    pub fn mul_pow2(&self, e: i64) -> Rational {
        match &self.den {
            Denom::Pow2(k) => Rational::dyadic(self.num.clone(), *k as i64 - e),
            Denom::Other(d) => {
                if e >= 0 {
                    Rational::from_parts(shl_int(&self.num, e as u64), d.clone())
                } else {
                    Rational::from_parts(self.num.clone(), d << e.unsigned_abs())
                }
            }
        }
    }

    pub fn half(&self) -> Rational {
        self.mul_pow2(-1)
    }

    /// `Some(e)` when `self == 2^e`.
    pub fn pow2_exponent(&self) -> Option<i64> {
        let Denom::Pow2(k) = self.den else {
            return None;
        };
        if !self.num.is_positive() {
            return None;
        }
        if k > 0 {
            return self.num.is_one().then_some(-(k as i64));
        }
        let mag = self.num.magnitude();
        let tz = mag.trailing_zeros()?;
        (mag.bits() == tz + 1).then_some(tz as i64)
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let num = &self.num * BigInt::from(other.den_big());
        let den = BigInt::from(self.den_big()) * &other.num;
        Rational::new(num, den)
    }

    /// Lossy conversion for diagnostics only; never used in computation.
    pub fn to_f64_lossy(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        match &self.den {
            Denom::Pow2(k) => n * (-(*k as f64)).exp2(),
            Denom::Other(d) => n / d.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.num.sign(), other.num.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        match (&self.den, &other.den) {
            (Denom::Pow2(a), Denom::Pow2(b)) => {
                let k = (*a).max(*b);
                shl_int(&self.num, k - a).cmp(&shl_int(&other.num, k - b))
            }
            _ => {
                let lhs = &self.num * BigInt::from(other.den_big());
                let rhs = &other.num * BigInt::from(self.den_big());
                lhs.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        match (&self.den, &rhs.den) {
            (Denom::Pow2(a), Denom::Pow2(b)) => {
                let k = (*a).max(*b);
                let num = shl_int(&self.num, k - a) + shl_int(&rhs.num, k - b);
                Rational::dyadic(num, k as i64)
            }
            _ => {
                let (da, db) = (self.den_big(), rhs.den_big());
                let num = &self.num * BigInt::from(db.clone()) + &rhs.num * BigInt::from(da.clone());
                Rational::from_parts(num, da * db)
            }
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.den, &rhs.den) {
            (Denom::Pow2(a), Denom::Pow2(b)) => Rational::dyadic(&self.num * &rhs.num, (a + b) as i64),
            _ => Rational::from_parts(&self.num * &rhs.num, self.den_big() * rhs.den_big()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl serde::Serialize for Rational {
    /// Serialized as the exact `p/q` string.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.den {
            Denom::Pow2(0) => write!(f, "{}", self.num),
            _ => write!(f, "{}/{}", self.num, self.den_big()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

/// Exact `add`, `sub`, `min` or `max`.
pub fn arith(a: &Rational, b: &Rational, op: ArithOp) -> Rational {
    match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Min => a.clone().min(b.clone()),
        ArithOp::Max => a.clone().max(b.clone()),
    }
}

/// The fuse operation `a ~ b = (a + b + 1) / 2`, defined only when
/// `|a - b| < 1`.
pub fn fuse(a: &Rational, b: &Rational) -> Result<Rational> {
    if (a - b).abs() >= Rational::one() {
        return Err(Error::InvalidFuse {
            a: a.clone(),
            b: b.clone(),
        });
    }
    Ok((a + b + Rational::one()).half())
}

/// The exponent `e(a)`; errors on non-dyadic input.
pub fn exponent(a: &Rational) -> Result<ExponentValue> {
    if a.is_zero() {
        return Ok(ExponentValue::NegativeInfinity);
    }
    match a.den {
        Denom::Pow2(k) if k > 0 => Ok(ExponentValue::Finite(k as i64)),
        Denom::Pow2(_) => {
            let tz = a.num.trailing_zeros().unwrap_or(0);
            Ok(ExponentValue::Finite(-(tz as i64)))
        }
        Denom::Other(_) => Err(Error::NotDyadic(a.clone())),
    }
}

fn ceil_log2_uint(n: &BigUint) -> i64 {
    let bits = n.bits();
    let tz = n.trailing_zeros().unwrap_or(0);
    if bits == tz + 1 {
        tz as i64
    } else {
        bits as i64
    }
}

/// Smallest integer `k` with `2^k >= r`.
pub fn ceil_log2(r: &Rational) -> Result<i64> {
    if !r.is_positive() {
        return Err(Error::NonPositive(r.clone()));
    }
    let num = r.num.magnitude();
    if let Denom::Pow2(k) = r.den {
        return Ok(ceil_log2_uint(num) - k as i64);
    }
    let den = r.den_big();
    let guess = num.bits() as i64 - den.bits() as i64;
    let fits = |k: i64| -> bool {
        if k >= 0 {
            (&den << (k as u64)) >= *num
        } else {
            den >= (num << k.unsigned_abs())
        }
    };
    (guess - 1..=guess + 1)
        .find(|&k| fits(k))
        .ok_or_else(|| Error::NonPositive(r.clone()))
}

/// Reduced denominator; `1` for every integer including zero.
pub fn denominator_of(r: &Rational) -> BigUint {
    r.denom()
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_digits(s: &str, offset: usize) -> Result<BigUint> {
    if s.is_empty() {
        return Err(parse_err(offset, "expected digits"));
    }
    if let Some(i) = s.find(|c: char| !c.is_ascii_digit()) {
        return Err(parse_err(offset + i, "unexpected character"));
    }
    BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| parse_err(offset, "invalid integer"))
}

/// Parse `[-]INT`, `[-]INT/INT` or `[-]INT.DIGITS`. Decimals convert
/// exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let lead = text.len() - text.trim_start().len();
    let (neg, body, off) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest, lead + 1),
        None => (false, trimmed, lead),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p, off)?;
        let q = parse_digits(q, off + body.find('/').unwrap() + 1)?;
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Rational::from_parts(BigInt::from(p), q)
    } else if let Some((ip, fp)) = body.split_once('.') {
        let ipart = parse_digits(ip, off)?;
        let fpart = parse_digits(fp, off + ip.len() + 1)?;
        let scale = num_traits::pow(BigUint::from(10u32), fp.len());
        Rational::from_parts(BigInt::from(ipart * &scale + fpart), scale)
    } else {
        Rational::from_integer(BigInt::from(parse_digits(body, off)?))
    };
    Ok(if neg { -value } else { value })
}

/// Render `r` in the requested style. `Fraction` output always parses
/// back to `r`.
pub fn format_rational(r: &Rational, style: RationalStyle) -> String {
    match style {
        RationalStyle::Fraction => r.to_string(),
        RationalStyle::Pow2 => {
            if let Some(e) = r.pow2_exponent() {
                return format!("2^{e}");
            }
            if let Some(e) = (-r).pow2_exponent() {
                return format!("-2^{e}");
            }
            match r.den {
                Denom::Pow2(k) if k > 0 => format!("{}/2^{}", r.num, k),
                _ => r.to_string(),
            }
        }
        RationalStyle::Decimal => format_decimal(r).unwrap_or_else(|| r.to_string()),
    }
}

fn format_decimal(r: &Rational) -> Option<String> {
    let den = r.den_big();
    let twos = den.trailing_zeros().unwrap_or(0);
    let mut rest = &den >> twos;
    let five = BigUint::from(5u32);
    let mut fives = 0u64;
    while !rest.is_one() {
        let (q, m) = rest.div_rem(&five);
        if !m.is_zero() {
            return None;
        }
        rest = q;
        fives += 1;
    }
    let digits = twos.max(fives);
    let scale = num_traits::pow(BigUint::from(10u32), digits as usize);
    let scaled = r.num.magnitude() * &scale / &den;
    let sign = if r.is_negative() { "-" } else { "" };
    if digits == 0 {
        return Some(format!("{sign}{scaled}"));
    }
    let s = format!("{:0>width$}", scaled.to_string(), width = digits as usize + 1);
    let (ip, fp) = s.split_at(s.len() - digits as usize);
    Some(format!("{sign}{ip}.{fp}"))
}
