//! Sparse multivariate polynomials and truncated integer power series.
//!
//! Exponent tuples are ordered graded-lexicographically: total degree
//! first, then the first coordinate, the second, and so on. Every
//! coefficient stream in the crate is produced and stored in that order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::points::Point;
use crate::scalar::{fmt_rational, rat, ComplexBox, GaussQ, LambdaOracle, Rational, XVal};

/// Exponent tuple θ = (t₁, …, t_m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exp(pub Vec<u32>);

impl Exp {
    pub fn zero(m: usize) -> Self {
        Exp(vec![0; m])
    }

    pub fn unit(m: usize, i: usize, power: u32) -> Self {
        let mut v = vec![0; m];
        v[i] = power;
        Exp(v)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&t| t as u64).sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    pub fn add(&self, o: &Exp) -> Exp {
        Exp(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self − o` when `o ≤ self` componentwise.
    pub fn checked_sub(&self, o: &Exp) -> Option<Exp> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            v.push(a.checked_sub(*b)?);
        }
        Some(Exp(v))
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn grlex_compare(a: &Exp, b: &Exp) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.cmp(b))
}

/// All exponent tuples of total degree exactly `d`, ascending in grlex.
pub fn monomials_of_degree(m: usize, d: u32) -> Vec<Exp> {
    fn rec(m: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exp>) {
        if prefix.len() == m - 1 {
            prefix.push(d);
            out.push(Exp(prefix.clone()));
            prefix.pop();
            return;
        }
        for t in 0..=d {
            prefix.push(t);
            rec(m, d - t, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, d, &mut Vec::with_capacity(m), &mut out);
    out
}

/// All exponent tuples with `|θ| ≤ max_degree`, ascending in grlex.
pub fn monomials_up_to(m: usize, max_degree: u32) -> Vec<Exp> {
    (0..=max_degree)
        .flat_map(|d| monomials_of_degree(m, d))
        .collect()
}

// ---------------------------------------------------------------------------

/// Coefficient domain of a [`Poly`]: an additive group acted on by ℚ(i).
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + FromStr<Err = Error> {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn scale(&self, c: &GaussQ) -> Self;
    fn conj(&self) -> Self;
    fn is_real(&self) -> bool;
}

impl Coeff for GaussQ {
    fn zero() -> Self {
        GaussQ::zero()
    }
    fn is_zero(&self) -> bool {
        GaussQ::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, c: &GaussQ) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        GaussQ::conj(self)
    }
    fn is_real(&self) -> bool {
        GaussQ::is_real(self)
    }
}

impl Coeff for XVal {
    fn zero() -> Self {
        XVal::zero()
    }
    fn is_zero(&self) -> bool {
        XVal::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, c: &GaussQ) -> Self {
        XVal::scale(self, c)
    }
    fn conj(&self) -> Self {
        XVal::conj(self)
    }
    fn is_real(&self) -> bool {
        XVal::is_real(self)
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Coeff> {
    m: usize,
    terms: BTreeMap<Exp, T>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: T) -> Self {
        let mut p = Self::zero(m);
        p.add_term(Exp::zero(m), c);
        p
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Exp, T)>) -> Self {
        let mut p = Self::zero(m);
        for (e, c) in terms {
            assert_eq!(e.dim(), m, "exponent dimension");
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<Exp, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exp) -> T {
        self.terms.get(e).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Exp::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Exp, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), T::zero().sub(c));
        }
        out
    }

    pub fn scale(&self, c: &GaussQ) -> Self {
        Self::from_terms(
            self.m,
            self.terms.iter().map(|(e, v)| (e.clone(), v.scale(c))),
        )
    }

    /// Product with a polynomial over ℚ(i).
    pub fn mul_gauss(&self, o: &Poly<GaussQ>) -> Self {
        let mut acc: HashMap<Exp, T> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.add(e2);
                let v = c1.scale(c2);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        Self::from_terms(self.m, acc)
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(
            self.m,
            self.terms.iter().map(|(e, v)| (e.clone(), v.conj())),
        )
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coeff::is_real)
    }

    pub fn eval(&self, z: &Point) -> Result<T> {
        z.check_dim(self.m)?;
        let table = PowerTable::new(z, self.degree() as u32);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            acc = acc.add(&c.scale(&table.monomial(e)));
        }
        Ok(acc)
    }
}

impl Poly<GaussQ> {
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_gauss(o)
    }

    /// `1 − Σ w_i z_i`.
    pub fn affine_one_minus(w: &[GaussQ]) -> Self {
        let m = w.len();
        let mut p = Self::constant(m, GaussQ::one());
        for (i, wi) in w.iter().enumerate() {
            p.add_term(Exp::unit(m, i, 1), -wi);
        }
        p
    }
}

pub fn poly_eval<T: Coeff>(p: &Poly<T>, z: &Point) -> Result<T> {
    p.eval(z)
}

/// Sum of absolute values of the coefficients of a rational polynomial.
pub fn poly_length(p: &Poly<GaussQ>) -> Result<Rational> {
    let mut acc = Rational::zero();
    for c in p.terms.values() {
        if !c.is_real() {
            return Err(Error::NonRationalCoefficient);
        }
        acc += c.re.abs();
    }
    Ok(acc)
}

/// Precomputed coordinate powers of a point.
pub struct PowerTable {
    powers: Vec<Vec<GaussQ>>,
}

impl PowerTable {
    pub fn new(z: &Point, max_degree: u32) -> Self {
        let powers = z
            .coords()
            .iter()
            .map(|c| {
                let mut v = Vec::with_capacity(max_degree as usize + 1);
                v.push(GaussQ::one());
                for k in 1..=max_degree as usize {
                    let next = &v[k - 1] * c;
                    v.push(next);
                }
                v
            })
            .collect();
        Self { powers }
    }

    pub fn monomial(&self, e: &Exp) -> GaussQ {
        let mut acc = GaussQ::one();
        for (i, &t) in e.0.iter().enumerate() {
            if t > 0 {
                acc = &acc * &self.powers[i][t as usize];
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------

/// `Σ_{d > after} binom(d+J−1, J−1)·r^d`, the tail of `(1−r)^(−J)`; when
/// `after < 0` this is the whole sum.
pub fn degree_tail(after: i64, r: &Rational, j: u64) -> Rational {
    assert!(
        !r.is_negative() && r < &Rational::one(),
        "degree_tail radius"
    );
    assert!(j >= 1);
    let one = Rational::one();
    let full = num_traits::pow(&one / (&one - r), j as usize);
    if after < 0 {
        return full;
    }
    if r.is_zero() {
        return Rational::zero();
    }
    // term_d = binom(d+J−1, J−1) r^d, term_{d+1} = term_d · r · (d+J)/(d+1)
    let mut term = one.clone();
    let mut head = one.clone();
    for d in 0..after as u64 {
        term = term * r * Rational::new(BigInt::from(d + j), BigInt::from(d + 1));
        head += &term;
    }
    full - head
}

/// Rigorous bound on `M·Σ_{|θ|>D} r^|θ|` over exponent tuples in `m` variables.
pub fn tail_bound(coeff_bound: &Rational, degree: u32, r: &Rational, m: usize) -> Result<Rational> {
    if r.is_negative() || r >= &Rational::one() {
        return Err(Error::RadiusOutOfRange(fmt_rational(r)));
    }
    Ok(coeff_bound * degree_tail(degree as i64, r, m as u64))
}

/// `|f(z)| ≤ C / (1 − ‖z‖)^e` on the open unit polydisc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTemplate {
    pub c: Rational,
    pub e: u32,
}

/// Structure `f = p + q·g` with `q(0) = 1` real, where `g` is the remainder
/// series of the rounding recursion. `remainder` holds `g` up to the series
/// degree; it is recomputed from `f`, `p`, `q` whenever a file is read.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub p: Poly<XVal>,
    pub q: Poly<GaussQ>,
    pub g_bound: Rational,
    pub remainder: BTreeMap<Exp, XVal>,
}

/// Truncated power series with integer coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct IntSeries {
    pub m: usize,
    pub degree: u32,
    pub coeffs: BTreeMap<Exp, BigInt>,
    pub coeff_bound: Rational,
    pub template: BoundTemplate,
    pub decomposition: Option<Decomposition>,
    /// Present for polyradius-control series; tails then follow the
    /// coefficient model `a_{i,n} ≤ ρ_i^{−n} + 1` on pure powers.
    pub rho: Option<Vec<Rational>>,
    /// Summands that are not stored beyond the degree, each bounded by a
    /// majorant `c·z^θ·Π_i (1 − z_i)^{−J/m}` with `|θ| = shift`.
    pub majorants: Vec<Majorant>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Majorant {
    pub coeff: Rational,
    pub shift: u64,
    pub power: u64,
}

impl Majorant {
    /// Bound on the summand's part of degree above `degree` at max-norm `r`.
    pub fn tail(&self, degree: u32, r: &Rational) -> Rational {
        let after = degree as i64 - self.shift as i64;
        &self.coeff * pow_upper(r, self.shift) * degree_tail(after, r, self.power)
    }
}

/// Exact `r^n` for moderate `n`; beyond that a bound `2^{−K}` with
/// `K ≤ 256`, keeping far-out summands from inflating every box.
pub fn pow_upper(r: &Rational, n: u64) -> Rational {
    const EXACT: u64 = 1024;
    const BITS: u64 = 16;
    let scale = BigInt::one() << BITS;
    let p = (r * Rational::from_integer(scale.clone()))
        .ceil()
        .to_integer();
    if n <= EXACT || p >= scale {
        return num_traits::pow(r.clone(), n as usize);
    }
    // p^64 < 2^a, so r^n ≤ (p/2^16)^n ≤ 2^{n(a/64 − 16)}.
    let a = num_traits::pow(p, 64).bits();
    let k = (n as u128 * (BITS as u128 * 64 - a as u128) / 64).min(256) as usize;
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// `a_θ + Σ_{σ ≠ 0, σ ≤ θ} g_{θ−σ} b_σ`: the value the rounding recursion
/// must bring to an integer at θ, given every earlier remainder coefficient.
pub fn recursion_target(
    theta: &Exp,
    p: &Poly<XVal>,
    q_terms: &[(Exp, Rational)],
    remainder: &HashMap<Exp, XVal>,
) -> XVal {
    let mut acc = p.coeff(theta);
    for (sigma, b) in q_terms {
        if sigma.is_zero() {
            continue;
        }
        if let Some(phi) = theta.checked_sub(sigma) {
            if let Some(g) = remainder.get(&phi) {
                acc = &acc + &g.scale_rational(b);
            }
        }
    }
    acc
}

/// Real coefficients of `q` as rationals, checking `q(0) = 1`.
pub fn normalized_q_terms(q: &Poly<GaussQ>) -> Result<Vec<(Exp, Rational)>> {
    let mut out = Vec::with_capacity(q.terms().len());
    for (e, c) in q.terms() {
        if !c.is_real() {
            return Err(Error::NonRationalCoefficient);
        }
        out.push((e.clone(), c.re.clone()));
    }
    if q.coeff(&Exp::zero(q.dim())) != GaussQ::one() {
        return Err(Error::DegenerateNodes("q(0) must equal 1".into()));
    }
    Ok(out)
}

/// Remainder series `g = (f − p)/q` up to `degree`, computed by the same
/// recursion that produced `f`.
pub fn recover_remainder(
    m: usize,
    degree: u32,
    coeffs: &BTreeMap<Exp, BigInt>,
    p: &Poly<XVal>,
    q: &Poly<GaussQ>,
) -> Result<BTreeMap<Exp, XVal>> {
    let q_terms = normalized_q_terms(q)?;
    let mut g: HashMap<Exp, XVal> = HashMap::new();
    for theta in monomials_up_to(m, degree) {
        let target = recursion_target(&theta, p, &q_terms, &g);
        let f = coeffs.get(&theta).cloned().unwrap_or_else(BigInt::zero);
        let val = &XVal::algebraic(GaussQ::real(Rational::from_integer(f))) - &target;
        if !val.is_zero() {
            g.insert(theta, val);
        }
    }
    Ok(g.into_iter().collect())
}

impl IntSeries {
    pub fn coeff(&self, e: &Exp) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// The decomposition proves the series equals its truncation: `p` and
    /// `q` fit below the degree and the remainder vanishes on the last
    /// `deg q` degrees, so every later recursion target is 0.
    pub fn is_exact_polynomial(&self) -> bool {
        let Some(dec) = &self.decomposition else {
            return false;
        };
        let d = self.degree as u64;
        let dq = dec.q.degree();
        if dec.p.degree() > d || dq > d {
            return false;
        }
        dec.remainder
            .iter()
            .all(|(e, v)| v.is_zero() || e.degree() + dq <= d)
    }

    /// Exact value of the truncation at `z`.
    pub fn eval_truncated(&self, z: &Point) -> Result<GaussQ> {
        z.check_dim(self.m)?;
        let table = PowerTable::new(z, self.degree);
        let mut acc = GaussQ::zero();
        for (e, c) in &self.coeffs {
            acc = &acc + &table.monomial(e).scale(&Rational::from_integer(c.clone()));
        }
        Ok(acc)
    }

    /// Exact value at the origin (the constant coefficient) or at a node of
    /// the decomposition (`p(z)` when `q(z) = 0`), else `None`.
    pub fn exact_value_at(&self, z: &Point) -> Result<Option<XVal>> {
        z.check_dim(self.m)?;
        if z.is_origin() {
            let c = Rational::from_integer(self.coeff(&Exp::zero(self.m)));
            return Ok(Some(XVal::algebraic(GaussQ::real(c))));
        }
        let Some(dec) = &self.decomposition else {
            return Ok(None);
        };
        if !dec.q.eval(z)?.is_zero() {
            return Ok(None);
        }
        Ok(Some(dec.p.eval(z)?))
    }

    /// Tail allowance for the plain coefficient-bound model at max-norm `r`.
    fn plain_tail(&self, z: &Point, r: &Rational) -> Result<Rational> {
        let mut extra = Rational::zero();
        for mj in &self.majorants {
            extra += mj.tail(self.degree, r);
        }
        if self.is_exact_polynomial() {
            return Ok(extra);
        }
        if let Some(rho) = &self.rho {
            return Ok(radius_tail(rho, self.degree, z)? + extra);
        }
        Ok(tail_bound(&self.coeff_bound, self.degree, r, self.m)? + extra)
    }
}

/// Tail of `Σ_i Σ_{n>D} a_{i,n} z_i^n` with `a_{i,n} ≤ ρ_i^{−n} + 1`
/// (exactly `ρ_i^{−n}` when `1/ρ_i` is an integer).
pub fn radius_tail(rho: &[Rational], degree: u32, z: &Point) -> Result<Rational> {
    let one = Rational::one();
    let mut acc = Rational::zero();
    for (c, r) in z.coords().iter().zip(rho) {
        let ri = c.modulus_upper();
        let s = &ri / r;
        if s >= one {
            return Err(Error::OutsideDomain(z.to_string()));
        }
        let e = degree as usize + 1;
        acc += num_traits::pow(s.clone(), e) / (&one - &s);
        if !(&one / r).is_integer() {
            acc += num_traits::pow(ri.clone(), e) / (&one - &ri);
        }
    }
    Ok(acc)
}

/// Enclosure of the full series value at `z`.
///
/// The plain model adds `tail_bound(M, D, ‖z‖, m)` around the exact
/// truncated sum. With a decomposition the value is `p(z) + q(z)·g(z)` where
/// `g`'s coefficients beyond the degree are bounded by 1/2; at a node this
/// is the node value's own λ enclosure.
pub fn eval_box(f: &IntSeries, z: &Point, oracle: &LambdaOracle) -> Result<ComplexBox> {
    z.check_dim(f.m)?;
    if let Some(rho) = &f.rho {
        if !crate::points::in_polydisc(z, rho)? {
            return Err(Error::OutsideDomain(z.to_string()));
        }
    } else if !z.in_unit_polydisc() {
        return Err(Error::OutsideDomain(z.to_string()));
    }
    let r = z.norm_upper();
    if r >= Rational::one() {
        return Err(Error::OutsideDomain(z.to_string()));
    }
    let Some(dec) = &f.decomposition else {
        let centre = f.eval_truncated(z)?;
        return Ok(ComplexBox::point(&centre).widen(&f.plain_tail(z, &r)?));
    };
    let pz = dec.p.eval(z)?;
    let qz = dec.q.eval(z)?;
    let table = PowerTable::new(z, f.degree);
    let mut gz = XVal::zero();
    for (e, g) in &dec.remainder {
        gz = &gz + &g.scale(&table.monomial(e));
    }
    let value = &pz + &gz.scale(&qz);
    let tail = if f.is_exact_polynomial() {
        Rational::zero()
    } else {
        qz.modulus_upper() * tail_bound(&rat(1, 2), f.degree, &r, f.m)?
    };
    Ok(value.enclose(oracle).widen(&tail))
}

// ---------------------------------------------------------------------------
// Truncated coefficient-map arithmetic.

pub type CoeffMap = BTreeMap<Exp, BigInt>;

pub fn map_add(a: &CoeffMap, b: &CoeffMap) -> CoeffMap {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.entry(e.clone()).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            out.remove(e);
        }
    }
    out
}

pub fn map_mul(a: &CoeffMap, b: &CoeffMap, degree: u32) -> CoeffMap {
    let d = degree as u64;
    let mut bv: Vec<(&Exp, &BigInt)> = b.iter().collect();
    bv.sort_by_key(|(e, _)| e.degree());
    let mut acc: HashMap<Exp, BigInt> = HashMap::new();
    for (ea, ca) in a {
        let da = ea.degree();
        if da > d {
            continue;
        }
        for (eb, cb) in &bv {
            if da + eb.degree() > d {
                break;
            }
            *acc.entry(ea.add(eb)).or_insert_with(BigInt::zero) += ca * *cb;
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `z^shift · a`, truncated.
pub fn map_shift(a: &CoeffMap, shift: &Exp, degree: u32) -> CoeffMap {
    let d = degree as u64;
    if shift.degree() > d {
        return CoeffMap::new();
    }
    a.iter()
        .filter(|(e, _)| e.degree() + shift.degree() <= d)
        .map(|(e, c)| (e.add(shift), c.clone()))
        .collect()
}

pub fn map_from_gauss_poly(p: &Poly<GaussQ>) -> Option<CoeffMap> {
    let mut out = CoeffMap::new();
    for (e, c) in p.terms() {
        if !c.is_real() || !c.re.is_integer() {
            return None;
        }
        out.insert(e.clone(), c.re.to_integer());
    }
    Some(out)
}
