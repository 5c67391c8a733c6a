//! Gaussian-rational points of polydiscs and their bounded-height enumeration.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{GaussQ, Rational};

/// A point of ℂᵐ with Gaussian-rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<GaussQ>);

impl Point {
    pub fn new(coords: Vec<GaussQ>) -> Self {
        assert!(!coords.is_empty(), "points have at least one coordinate");
        Point(coords)
    }

    pub fn origin(m: usize) -> Self {
        Point(vec![GaussQ::zero(); m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[GaussQ] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(GaussQ::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(GaussQ::is_real)
    }

    pub fn conj(&self) -> Self {
        Point(self.0.iter().map(GaussQ::conj).collect())
    }

    pub fn height(&self) -> BigInt {
        self.0.iter().map(GaussQ::height).max().unwrap()
    }

    /// Exact test `‖z‖ < 1` in the max norm.
    pub fn in_unit_polydisc(&self) -> bool {
        self.0.iter().all(|c| c.abs_squared() < Rational::one())
    }

    /// Rational upper bound on the max norm, strictly below 1 whenever the
    /// point lies in the open unit polydisc.
    pub fn norm_upper(&self) -> Rational {
        self.0
            .iter()
            .map(GaussQ::modulus_upper)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `z^θ` for an exponent tuple given as a slice.
    pub fn monomial(&self, exps: &[u32]) -> GaussQ {
        let mut acc = GaussQ::one();
        for (c, &e) in self.0.iter().zip(exps) {
            if e > 0 {
                acc = &acc * &c.pow(e as u64);
            }
        }
        acc
    }

    pub fn check_dim(&self, m: usize) -> Result<()> {
        if self.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| Error::Format(format!("bad point `{s}`")))?;
        if body.is_empty() {
            return Err(Error::Format(format!("empty point `{s}`")));
        }
        let coords = body
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<GaussQ>>>()?;
        Ok(Point(coords))
    }
}

/// Exact membership in the open polydisc `Δ(0; rho)`.
pub fn in_polydisc(z: &Point, rho: &[Rational]) -> Result<bool> {
    z.check_dim(rho.len())?;
    Ok(z.0.iter().zip(rho).all(|(c, r)| c.abs_squared() < r * r))
}

/// The member of `{z, conj z}` whose first nonreal coordinate has positive
/// imaginary part.
pub fn canonical_rep(z: &Point) -> Point {
    match z.0.iter().find(|c| !c.is_real()) {
        Some(c) if c.im.is_negative() => z.conj(),
        _ => z.clone(),
    }
}

/// Ordering used by every enumeration: height, then imaginary parts, then
/// real parts, each compared lexicographically as rationals.
pub fn enumeration_order(a: &Point, b: &Point) -> Ordering {
    a.height()
        .cmp(&b.height())
        .then_with(|| a.0.iter().map(|c| &c.im).cmp(b.0.iter().map(|c| &c.im)))
        .then_with(|| a.0.iter().map(|c| &c.re).cmp(b.0.iter().map(|c| &c.re)))
}

/// Bounded-height enumeration of `Δ(0; rho)`, one representative per
/// conjugate pair, origin first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub m: usize,
    pub rho: Vec<Rational>,
    pub height: u32,
    pub reps: Vec<Point>,
    /// `partners[k]` is the conjugate of `reps[k]` when that point is nonreal.
    pub partners: Vec<Option<Point>>,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Representatives followed by their partners, i.e. every point.
    pub fn all_points(&self) -> Vec<Point> {
        let mut out = self.reps.clone();
        out.extend(self.partners.iter().flatten().cloned());
        out
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        let rep = canonical_rep(p);
        self.reps.iter().position(|r| r == &rep)
    }
}

fn rationals_of_height(h: u32) -> Vec<Rational> {
    let h = h as i64;
    let mut out = Vec::new();
    for d in 1..=h {
        for n in -h..=h {
            if n.gcd(&d) == 1 {
                out.push(Rational::new(BigInt::from(n), BigInt::from(d)));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All Gaussian-rational points of `Δ(0; rho)` whose real and imaginary
/// parts have reduced numerators and denominators bounded by `height`.
pub fn enumerate_points(m: usize, rho: &[Rational], height: u32) -> Result<Enumeration> {
    if m == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if rho.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: rho.len(),
        });
    }
    for r in rho {
        if !r.is_positive() || r > &Rational::one() {
            return Err(Error::RadiusOutOfRange(crate::scalar::fmt_rational(r)));
        }
    }
    if height == 0 {
        return Err(Error::Format("height must be at least 1".into()));
    }
    let values = rationals_of_height(height);
    // Per-coordinate candidates inside the disc of radius rho_i.
    let per_coord: Vec<Vec<GaussQ>> = rho
        .iter()
        .map(|r| {
            let r2 = r * r;
            let mut v = Vec::new();
            for re in &values {
                for im in &values {
                    let z = GaussQ::new(re.clone(), im.clone());
                    if z.abs_squared() < r2 {
                        v.push(z);
                    }
                }
            }
            v
        })
        .collect();

    let mut reps = Vec::new();
    let mut idx = vec![0usize; m];
    if per_coord.iter().any(Vec::is_empty) {
        return Err(Error::Format("empty polydisc slice".into()));
    }
    loop {
        let p = Point(
            idx.iter()
                .enumerate()
                .map(|(i, &k)| per_coord[i][k].clone())
                .collect(),
        );
        if canonical_rep(&p) == p {
            reps.push(p);
        }
        let mut i = 0;
        loop {
            if i == m {
                break;
            }
            idx[i] += 1;
            if idx[i] < per_coord[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    reps.sort_by(enumeration_order);
    let partners = reps
        .iter()
        .map(|p| if p.is_real() { None } else { Some(p.conj()) })
        .collect();
    debug_assert!(reps.first().is_some_and(Point::is_origin));
    Ok(Enumeration {
        m,
        rho: rho.to_vec(),
        height,
        reps,
        partners,
    })
}

/// Total number of points (representatives plus partners).
pub fn point_count(e: &Enumeration) -> usize {
    e.reps.len() + e.partners.iter().flatten().count()
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::scalar::rat;
    use crate::testgen::disc_point;
    use proptest::prelude::*;

    fn rho_choice() -> impl Strategy<Value = Rational> {
        prop_oneof![
            Just(rat(1, 1)),
            Just(rat(1, 2)),
            Just(rat(2, 3)),
            Just(rat(3, 4))
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn canonical_rep_ignores_conjugation(z in (1usize..4).prop_flat_map(|m| disc_point(m, 7))) {
            prop_assert_eq!(canonical_rep(&z.conj()), canonical_rep(&z));
            prop_assert!(canonical_rep(&z) == z || canonical_rep(&z) == z.conj());
        }

        #[test]
        fn enumeration_is_closed_and_nested(
            rho in proptest::collection::vec(rho_choice(), 1..3),
            h in 1u32..3,
        ) {
            let m = rho.len();
            let e = enumerate_points(m, &rho, h).unwrap();
            let all = e.all_points();
            for z in &all {
                prop_assert!(in_polydisc(z, &rho).unwrap());
                prop_assert!(all.contains(&z.conj()));
                prop_assert!(z.height() <= BigInt::from(h));
            }
            let next = enumerate_points(m, &rho, h + 1).unwrap();
            prop_assert_eq!(&next.reps[..e.reps.len()], &e.reps[..]);
        }
    }
}
