//! Exact scalars: Gaussian rationals, their rank-two extension by the
//! Liouville constant, and rational-endpoint complex boxes.
//!
//! Nothing in here touches floating point. Approximate knowledge enters
//! only through [`ComplexBox`], whose endpoints are exact rationals, and
//! through the nested enclosures handed out by [`LambdaOracle`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Canonical text form: `a` or `a/b`, sign on the numerator.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Format(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if n.is_empty() || d.is_empty() || d.starts_with('-') || d.starts_with('+') {
        return Err(bad());
    }
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    let q = Rational::new(n.clone(), d.clone());
    // Only canonical (reduced) text is accepted, so every value has one spelling.
    if q.numer() != &n || q.denom() != &d {
        return Err(Error::Format(format!("non-canonical rational `{s}`")));
    }
    Ok(q)
}

/// Nearest integer with ties rounded away from zero.
pub fn round_half_away(q: &Rational) -> BigInt {
    let h = half();
    if q.is_negative() {
        -(-q + &h).floor().to_integer()
    } else {
        (q + &h).floor().to_integer()
    }
}

pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Rational upper bound on `sqrt(q)`; exact when numerator and denominator
/// are perfect squares, otherwise within `2^-bits` relative overshoot.
pub fn sqrt_upper(q: &Rational, bits: u32) -> Rational {
    assert!(!q.is_negative(), "sqrt of negative rational");
    if q.is_zero() {
        return Rational::zero();
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Rational::new(rn, rd);
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let t = n * d * &scale;
    let mut s = t.sqrt();
    if &s * &s < t {
        s += 1;
    }
    Rational::new(s, d * (BigInt::one() << bits as usize))
}

/// Number of precision bits used for every modulus upper bound in the
/// system; fixed so that builder and verifier agree bit for bit.
pub const MODULUS_BITS: u32 = 64;

// ---------------------------------------------------------------------------

/// Exact Gaussian rational `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussQ {
    pub re: Rational,
    pub im: Rational,
}

impl GaussQ {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::real(int(n))
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn abs_squared(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Rational upper bound on the modulus.
    pub fn modulus_upper(&self) -> Rational {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        sqrt_upper(&self.abs_squared(), MODULUS_BITS)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.abs_squared();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// `self^e`, computed on the Gaussian-integer numerator and reduced once.
    pub fn pow(&self, e: u64) -> Self {
        if self.im.is_zero() {
            let n = num_traits::pow(self.re.numer().clone(), e as usize);
            let d = num_traits::pow(self.re.denom().clone(), e as usize);
            return Self::real(Rational::new_raw(n, d));
        }
        let d = self.re.denom().lcm(self.im.denom());
        let mut base = (
            self.re.numer() * (&d / self.re.denom()),
            self.im.numer() * (&d / self.im.denom()),
        );
        let mut acc = (BigInt::one(), BigInt::zero());
        let mul = |x: &(BigInt, BigInt), y: &(BigInt, BigInt)| {
            (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
        };
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = mul(&base, &base);
            }
        }
        let den = num_traits::pow(d, e as usize);
        Self::new(Rational::new(acc.0, den.clone()), Rational::new(acc.1, den))
    }

    /// Largest numerator or denominator magnitude among both parts.
    pub fn height(&self) -> BigInt {
        [&self.re, &self.im]
            .iter()
            .map(|q| q.numer().abs().max(q.denom().clone()))
            .max()
            .unwrap()
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rational(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(
                        f,
                        "{}-{}*i",
                        fmt_rational(&self.re),
                        fmt_rational(&-&self.im)
                    )
                } else {
                    write!(f, "{}+{}*i", fmt_rational(&self.re), fmt_rational(&self.im))
                }
            }
        }
    }
}

impl FromStr for GaussQ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad Gaussian rational `{s}`"));
        if let Some(body) = s.strip_suffix("*i") {
            // Split at the last sign that is not the leading one.
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            match split {
                Some(i) => {
                    let re = parse_rational(&body[..i])?;
                    let sign = &body[i..i + 1];
                    let mag = &body[i + 1..];
                    if mag.starts_with('-') || mag.starts_with('+') {
                        return Err(bad());
                    }
                    let mut im = parse_rational(mag)?;
                    if sign == "-" {
                        im = -im;
                    }
                    if re.is_zero() || im.is_zero() {
                        return Err(Error::Format(format!(
                            "non-canonical Gaussian rational `{s}`"
                        )));
                    }
                    Ok(GaussQ::new(re, im))
                }
                None => {
                    let im = parse_rational(body)?;
                    if im.is_zero() {
                        return Err(Error::Format(format!(
                            "non-canonical Gaussian rational `{s}`"
                        )));
                    }
                    Ok(GaussQ::new(Rational::zero(), im))
                }
            }
        } else {
            parse_rational(s).map(GaussQ::real).map_err(|_| bad())
        }
    }
}

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

impl Add<&GaussQ> for &GaussQ {
    type Output = GaussQ;
    fn add(self, rhs: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&GaussQ> for &GaussQ {
    type Output = GaussQ;
    fn sub(self, rhs: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&GaussQ> for &GaussQ {
    type Output = GaussQ;
    fn mul(self, rhs: &GaussQ) -> GaussQ {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussQ::real(&self.re * &rhs.re);
        }
        GaussQ::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        -&self
    }
}

forward_binop!(GaussQ, Add, add);
forward_binop!(GaussQ, Sub, sub);
forward_binop!(GaussQ, Mul, mul);

// ---------------------------------------------------------------------------

/// `base + lam * λ`, λ the Liouville constant.
///
/// The set of such values is a module over ℚ(i), not a ring: two values with
/// nonzero λ-parts are never multiplied. A value is algebraic-certifiable iff
/// `lam == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct XVal {
    pub base: GaussQ,
    pub lam: GaussQ,
}

impl XVal {
    pub fn new(base: GaussQ, lam: GaussQ) -> Self {
        Self { base, lam }
    }

    pub fn algebraic(base: GaussQ) -> Self {
        Self {
            base,
            lam: GaussQ::zero(),
        }
    }

    pub fn lambda_multiple(lam: GaussQ) -> Self {
        Self {
            base: GaussQ::zero(),
            lam,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.lam.is_zero()
    }

    pub fn is_algebraic(&self) -> bool {
        self.lam.is_zero()
    }

    /// Both components real, so the value itself is real.
    pub fn is_real(&self) -> bool {
        self.base.is_real() && self.lam.is_real()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.base.conj(), self.lam.conj())
    }

    pub fn scale(&self, c: &GaussQ) -> Self {
        Self::new(&self.base * c, &self.lam * c)
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        Self::new(self.base.scale(r), self.lam.scale(r))
    }

    pub fn checked_div(&self, c: &GaussQ) -> Option<Self> {
        let inv = c.inv()?;
        Some(self.scale(&inv))
    }

    /// Product of two values; fails if both carry a λ-part.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        match (self.lam.is_zero(), other.lam.is_zero()) {
            (true, _) => Ok(other.scale(&self.base)),
            (false, true) => Ok(self.scale(&other.base)),
            (false, false) => Err(Error::LambdaSquare),
        }
    }

    /// Rational upper bound on `|x|` for a real value (λ < 1/8).
    pub fn real_abs_upper(&self) -> Rational {
        debug_assert!(self.is_real());
        self.base.re.abs() + self.lam.re.abs() * rat(1, 8)
    }

    pub fn enclose(&self, oracle: &LambdaOracle) -> ComplexBox {
        let base = ComplexBox::point(&self.base);
        if self.lam.is_zero() {
            return base;
        }
        base.add(&oracle.enclosure_box().mul_point(&self.lam))
    }
}

impl From<GaussQ> for XVal {
    fn from(g: GaussQ) -> Self {
        XVal::algebraic(g)
    }
}

impl fmt::Display for XVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lam.is_zero() {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}+({})*L", self.base, self.lam)
        }
    }
}

impl FromStr for XVal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_suffix(")*L") {
            let (base, lam) = body
                .split_once("+(")
                .ok_or_else(|| Error::Format(format!("bad λ-value `{s}`")))?;
            let lam: GaussQ = lam.parse()?;
            if lam.is_zero() {
                return Err(Error::Format(format!("non-canonical λ-value `{s}`")));
            }
            Ok(XVal::new(base.parse()?, lam))
        } else {
            Ok(XVal::algebraic(s.parse()?))
        }
    }
}

impl Add<&XVal> for &XVal {
    type Output = XVal;
    fn add(self, rhs: &XVal) -> XVal {
        XVal::new(&self.base + &rhs.base, &self.lam + &rhs.lam)
    }
}

impl Sub<&XVal> for &XVal {
    type Output = XVal;
    fn sub(self, rhs: &XVal) -> XVal {
        XVal::new(&self.base - &rhs.base, &self.lam - &rhs.lam)
    }
}

impl Neg for &XVal {
    type Output = XVal;
    fn neg(self) -> XVal {
        XVal::new(-&self.base, -&self.lam)
    }
}

impl Neg for XVal {
    type Output = XVal;
    fn neg(self) -> XVal {
        -&self
    }
}

forward_binop!(XVal, Add, add);
forward_binop!(XVal, Sub, sub);

pub fn conjugate(x: &XVal) -> XVal {
    x.conj()
}

pub fn abs_squared(x: &GaussQ) -> Rational {
    x.abs_squared()
}

// ---------------------------------------------------------------------------

/// Deepest enclosure level the system will refine to; level 7 already
/// resolves λ to 40320 decimal digits.
pub const MAX_LAMBDA_LEVEL: u32 = 7;

/// Default level used by the builder; the verifier replays one level deeper.
pub const DEFAULT_LAMBDA_LEVEL: u32 = 3;

/// Enclosures of λ = Σ_{n≥1} 10^(−n!).
///
/// At level `N` the enclosure is `[S_N, S_N + 2·10^(−(N+1)!)]` where `S_N`
/// is the `N`-th partial sum; the tail after `S_N` is below
/// `10^(−(N+1)!)·(1 + 10^(−1)) < 2·10^(−(N+1)!)`, and enclosures are nested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaOracle {
    level: u32,
    lo: Rational,
    hi: Rational,
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

fn ten_pow_neg(k: u64) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

impl LambdaOracle {
    pub fn new(level: u32) -> Result<Self> {
        if level == 0 || level > MAX_LAMBDA_LEVEL {
            return Err(Error::LambdaPrecision(level));
        }
        let mut lo = Rational::zero();
        for n in 1..=level {
            lo += ten_pow_neg(factorial(n));
        }
        let hi = &lo + ten_pow_neg(factorial(level + 1)) * int(2);
        Ok(Self { level, lo, hi })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn refine(&self) -> Result<Self> {
        Self::new(self.level + 1)
    }

    pub fn enclosure_box(&self) -> ComplexBox {
        ComplexBox::new(
            self.lo.clone(),
            self.hi.clone(),
            Rational::zero(),
            Rational::zero(),
        )
    }

    /// Real interval enclosing `a + b·λ` for rationals `a`, `b`.
    pub fn real_interval(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let x = a + b * &self.lo;
        let y = a + b * &self.hi;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

/// Nearest integer to a real value, ties away from zero.
///
/// λ-bearing inputs are resolved by refining the enclosure, starting at
/// `start_level`, until it avoids every half-integer; `a + b·λ` with `b ≠ 0`
/// is irrational, so the refinement stops once precision suffices.
pub fn nearest_integer(x: &XVal, start_level: u32) -> Result<BigInt> {
    if !x.is_real() {
        return Err(Error::NonRealInput(x.to_string()));
    }
    if x.lam.is_zero() {
        return Ok(round_half_away(&x.base.re));
    }
    let h = half();
    let mut level = start_level.max(1);
    loop {
        let oracle = LambdaOracle::new(level)?;
        let (lo, hi) = oracle.real_interval(&x.base.re, &x.lam.re);
        let n = round_half_away(&lo);
        let nq = Rational::from_integer(n.clone());
        if lo > &nq - &h && hi < &nq + &h {
            return Ok(n);
        }
        level += 1;
    }
}

// ---------------------------------------------------------------------------

/// Axis-aligned rectangle in ℂ with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re_lo: Rational,
    pub re_hi: Rational,
    pub im_lo: Rational,
    pub im_hi: Rational,
}

/// Outcome of separating a box from the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    Separated(Rational),
    NotSeparated,
}

fn imul(alo: &Rational, ahi: &Rational, blo: &Rational, bhi: &Rational) -> (Rational, Rational) {
    let c = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
    let lo = c.iter().min().unwrap().clone();
    let hi = c.iter().max().unwrap().clone();
    (lo, hi)
}

fn iscale(lo: &Rational, hi: &Rational, s: &Rational) -> (Rational, Rational) {
    let (x, y) = (lo * s, hi * s);
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl ComplexBox {
    pub fn new(re_lo: Rational, re_hi: Rational, im_lo: Rational, im_hi: Rational) -> Self {
        assert!(re_lo <= re_hi && im_lo <= im_hi, "inverted box");
        Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    pub fn point(z: &GaussQ) -> Self {
        Self::new(z.re.clone(), z.re.clone(), z.im.clone(), z.im.clone())
    }

    pub fn zero() -> Self {
        Self::point(&GaussQ::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            &self.re_lo + &o.re_lo,
            &self.re_hi + &o.re_hi,
            &self.im_lo + &o.im_lo,
            &self.im_hi + &o.im_hi,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(
            &self.re_lo - &o.re_hi,
            &self.re_hi - &o.re_lo,
            &self.im_lo - &o.im_hi,
            &self.im_hi - &o.im_lo,
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (ac_lo, ac_hi) = imul(&self.re_lo, &self.re_hi, &o.re_lo, &o.re_hi);
        let (bd_lo, bd_hi) = imul(&self.im_lo, &self.im_hi, &o.im_lo, &o.im_hi);
        let (ad_lo, ad_hi) = imul(&self.re_lo, &self.re_hi, &o.im_lo, &o.im_hi);
        let (bc_lo, bc_hi) = imul(&self.im_lo, &self.im_hi, &o.re_lo, &o.re_hi);
        Self::new(ac_lo - bd_hi, ac_hi - bd_lo, ad_lo + bc_lo, ad_hi + bc_hi)
    }

    /// Product with an exact point, `(a + bi)·z`.
    pub fn mul_point(&self, z: &GaussQ) -> Self {
        let (ar_lo, ar_hi) = iscale(&self.re_lo, &self.re_hi, &z.re);
        let (bi_lo, bi_hi) = iscale(&self.im_lo, &self.im_hi, &z.im);
        let (ai_lo, ai_hi) = iscale(&self.re_lo, &self.re_hi, &z.im);
        let (br_lo, br_hi) = iscale(&self.im_lo, &self.im_hi, &z.re);
        Self::new(ar_lo - bi_hi, ar_hi - bi_lo, ai_lo + br_lo, ai_hi + br_hi)
    }

    /// Enlarge by a modulus allowance `r` in both components.
    pub fn widen(&self, r: &Rational) -> Self {
        Self::new(
            &self.re_lo - r,
            &self.re_hi + r,
            &self.im_lo - r,
            &self.im_hi + r,
        )
    }

    pub fn contains_point(&self, z: &GaussQ) -> bool {
        self.re_lo <= z.re && z.re <= self.re_hi && self.im_lo <= z.im && z.im <= self.im_hi
    }

    pub fn contains_box(&self, o: &Self) -> bool {
        self.re_lo <= o.re_lo
            && o.re_hi <= self.re_hi
            && self.im_lo <= o.im_lo
            && o.im_hi <= self.im_hi
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let re_lo = (&self.re_lo).max(&o.re_lo).clone();
        let re_hi = (&self.re_hi).min(&o.re_hi).clone();
        let im_lo = (&self.im_lo).max(&o.im_lo).clone();
        let im_hi = (&self.im_hi).min(&o.im_hi).clone();
        if re_lo <= re_hi && im_lo <= im_hi {
            Some(Self::new(re_lo, re_hi, im_lo, im_hi))
        } else {
            None
        }
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> Rational {
        (&self.re_hi - &self.re_lo).max(&self.im_hi - &self.im_lo)
    }

    /// Exact lower bound on `|z|` over the box: the max-norm distance from
    /// the box to the origin.
    pub fn nonzero_lower_bound(&self) -> Separation {
        let gap = |lo: &Rational, hi: &Rational| {
            if lo.is_positive() {
                lo.clone()
            } else if hi.is_negative() {
                -hi
            } else {
                Rational::zero()
            }
        };
        let d = gap(&self.re_lo, &self.re_hi).max(gap(&self.im_lo, &self.im_hi));
        if d.is_positive() {
            Separation::Separated(d)
        } else {
            Separation::NotSeparated
        }
    }
}

impl fmt::Display for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]x[{},{}]",
            fmt_rational(&self.re_lo),
            fmt_rational(&self.re_hi),
            fmt_rational(&self.im_lo),
            fmt_rational(&self.im_hi)
        )
    }
}

pub fn box_nonzero_lower_bound(b: &ComplexBox) -> Separation {
    b.nonzero_lower_bound()
}

/// Small integers as `u64`, for exponents read from rationals.
pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::testgen::{gauss, real_xval, small_rat, xval};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn conjugation_is_an_involution(x in xval(9)) {
            prop_assert_eq!(conjugate(&conjugate(&x)), x.clone());
            prop_assert_eq!(x.base.conj().conj(), x.base);
        }

        #[test]
        fn abs_squared_is_multiplicative(x in gauss(9), y in gauss(9)) {
            prop_assert_eq!(abs_squared(&(&x * &y)), abs_squared(&x) * abs_squared(&y));
        }

        #[test]
        fn nearest_integer_ignores_start_level(x in real_xval(9), lo in 1u32..3, up in 1u32..3) {
            let a = nearest_integer(&x, lo).unwrap();
            let b = nearest_integer(&x, lo + up).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn nearest_integer_is_within_half(q in small_rat(20)) {
            let n = nearest_integer(&XVal::algebraic(GaussQ::real(q.clone())), 1).unwrap();
            prop_assert!((Rational::from_integer(n) - q).abs() <= half());
        }

        #[test]
        fn box_arithmetic_is_sound(u in gauss(9), v in gauss(9), w in small_rat(5)) {
            let w = w.abs();
            let (bu, bv) = (ComplexBox::point(&u), ComplexBox::point(&v));
            prop_assert!(bu.add(&bv).contains_point(&(&u + &v)));
            prop_assert!(bu.sub(&bv).contains_point(&(&u - &v)));
            prop_assert!(bu.mul(&bv).contains_point(&(&u * &v)));
            prop_assert!(bu.mul_point(&v).contains_point(&(&u * &v)));
            let (wu, wv) = (bu.widen(&w), bv.widen(&w));
            let shifted = &u + &GaussQ::new(w.clone(), -w.clone());
            prop_assert!(wu.mul(&wv).contains_point(&(&shifted * &v)));
            prop_assert!(wu.add(&wv).contains_box(&bu.add(&bv)));
        }

        #[test]
        fn lambda_enclosures_shrink(x in xval(9), level in 1u32..5) {
            let a = LambdaOracle::new(level).unwrap();
            let b = a.refine().unwrap();
            prop_assert!(x.enclose(&a).contains_box(&x.enclose(&b)));
        }

        #[test]
        fn text_round_trips(x in xval(30), q in small_rat(1000)) {
            prop_assert_eq!(x.to_string().parse::<XVal>().unwrap(), x.clone());
            prop_assert_eq!(x.base.to_string().parse::<GaussQ>().unwrap(), x.base);
            prop_assert_eq!(parse_rational(&fmt_rational(&q)).unwrap(), q);
        }
    }
}
