//! Series with prescribed polyradius of convergence:
//! `g_ρ(z) = Σ_i Σ_{n≥1} a_{i,n} z_i^n` with `ρ_i^{−n} ≤ a_{i,n} ≤ ρ_i^{−n} + 1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::points::{in_polydisc, Point};
use crate::polyseries::{BoundTemplate, Exp, IntSeries};
use crate::scalar::{ceil_int, fmt_rational, GaussQ, Rational};

pub fn check_rho(rho: &[Rational]) -> Result<()> {
    if rho.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    for r in rho {
        if !r.is_positive() || r > &Rational::one() {
            return Err(Error::RadiusOutOfRange(fmt_rational(r)));
        }
    }
    Ok(())
}

/// `⌈ρ^{−n}⌉`; equal to the nearest integer whenever `1/ρ` is an integer.
pub fn radius_coefficient(rho: &Rational, n: u32) -> BigInt {
    ceil_int(&num_traits::pow(rho.recip(), n as usize))
}

/// Every `1/ρ_i` is an integer, so `a_{i,n} = ρ_i^{−n}` exactly.
pub fn is_exact_mode(rho: &[Rational]) -> bool {
    rho.iter().all(|r| r.recip().is_integer())
}

pub fn sandwich_holds(rho: &Rational, n: u32, a: &BigInt) -> bool {
    let p = num_traits::pow(rho.recip(), n as usize);
    let a = Rational::from_integer(a.clone());
    p <= a && a <= p + Rational::one()
}

pub fn radius_series(rho: &[Rational], degree: u32) -> Result<IntSeries> {
    check_rho(rho)?;
    let m = rho.len();
    let mut coeffs = BTreeMap::new();
    let mut max = BigInt::zero();
    for (i, r) in rho.iter().enumerate() {
        for n in 1..=degree {
            let a = radius_coefficient(r, n);
            if a > max {
                max = a.clone();
            }
            coeffs.insert(Exp::unit(m, i, n), a);
        }
    }
    let c = if is_exact_mode(rho) { m } else { 2 * m };
    Ok(IntSeries {
        m,
        degree,
        coeffs,
        coeff_bound: Rational::from_integer(max),
        template: BoundTemplate {
            c: Rational::from_integer(BigInt::from(c)),
            e: 1,
        },
        decomposition: None,
        rho: Some(rho.to_vec()),
        majorants: Vec::new(),
    })
}

/// Closed form `Σ_i (z_i/ρ_i)/(1 − z_i/ρ_i)`, the exact value in exact mode.
pub fn radius_exact_value(rho: &[Rational], z: &Point) -> Result<GaussQ> {
    check_rho(rho)?;
    if !is_exact_mode(rho) {
        return Err(Error::ExactModeRequired);
    }
    if !in_polydisc(z, rho)? {
        return Err(Error::OutsideDomain(z.to_string()));
    }
    let mut acc = GaussQ::zero();
    for (c, r) in z.coords().iter().zip(rho) {
        let s = c.scale(&r.recip());
        let denom = &GaussQ::one() - &s;
        acc = &acc + &s.checked_div(&denom).expect("inside the disc");
    }
    Ok(acc)
}

/// For `n ∈ [D/2, D)`: `|a_{i,n+1}/a_{i,n} − 1/ρ_i| ≤ 2ρ_i^{n−1}`.
pub fn growth_window_holds(f: &IntSeries) -> bool {
    let Some(rho) = &f.rho else {
        return false;
    };
    let d = f.degree;
    rho.iter().enumerate().all(|(i, r)| {
        ((d / 2).max(1)..d).all(|n| {
            let a0 = Rational::from_integer(f.coeff(&Exp::unit(f.m, i, n)));
            let a1 = Rational::from_integer(f.coeff(&Exp::unit(f.m, i, n + 1)));
            if a0.is_zero() {
                return false;
            }
            let delta = num_traits::pow(r.clone(), n as usize - 1)
                * Rational::from_integer(BigInt::from(2));
            (a1 / a0 - r.recip()).abs() <= delta
        })
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn coefficients_are_sandwiched(n in 1i64..=9, d in 1i64..=9, k in 0u32..=64) {
            prop_assume!(n <= d);
            let rho = crate::scalar::rat(n, d);
            prop_assert!(sandwich_holds(&rho, k, &radius_coefficient(&rho, k)));
        }

        #[test]
        fn exact_values_lie_in_their_boxes(
            rho in proptest::collection::vec(prop_oneof![Just(crate::scalar::rat(1, 1)), Just(crate::scalar::rat(1, 2)), Just(crate::scalar::rat(1, 3))], 1..3),
            z in proptest::collection::vec((-7i64..=7, -7i64..=7), 2),
        ) {
            // Coordinates of modulus at most 7√2/10 · ρ_i.
            let z = Point::new(
                z.iter()
                    .zip(&rho)
                    .map(|((a, b), r)| GaussQ::new(crate::scalar::rat(*a, 10), crate::scalar::rat(*b, 10)).scale(r))
                    .collect(),
            );
            let f = radius_series(&rho, 20).unwrap();
            let b = crate::polyseries::eval_box(&f, &z, &crate::scalar::LambdaOracle::new(3).unwrap()).unwrap();
            prop_assert!(b.contains_point(&radius_exact_value(&rho, &z).unwrap()));
        }
    }
}
