//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::points::Point;
use crate::scalar::{rat, GaussQ, Rational, XVal};

pub fn small_rat(h: i64) -> impl Strategy<Value = Rational> {
    (-h..=h, 1..=h).prop_map(|(n, d)| rat(n, d))
}

pub fn gauss(h: i64) -> impl Strategy<Value = GaussQ> {
    (small_rat(h), small_rat(h)).prop_map(|(a, b)| GaussQ::new(a, b))
}

pub fn xval(h: i64) -> impl Strategy<Value = XVal> {
    (gauss(h), gauss(h)).prop_map(|(a, b)| XVal::new(a, b))
}

pub fn real_xval(h: i64) -> impl Strategy<Value = XVal> {
    (small_rat(h), small_rat(h)).prop_map(|(a, b)| XVal::new(GaussQ::real(a), GaussQ::real(b)))
}

/// Gaussian rationals strictly inside the unit disc.
pub fn disc_gauss(h: i64) -> impl Strategy<Value = GaussQ> {
    gauss(h).prop_filter("inside the unit disc", |z| z.abs_squared() < rat(1, 1))
}

pub fn disc_point(m: usize, h: i64) -> impl Strategy<Value = Point> {
    proptest::collection::vec(disc_gauss(h), m).prop_map(Point::new)
}

/// Conjugate-closed node lists avoiding the origin, with real values at real
/// nodes and conjugate values at partners.
pub fn node_set(m: usize, h: i64, max_reps: usize) -> impl Strategy<Value = Vec<(Point, XVal)>> {
    proptest::collection::vec((disc_point(m, h), xval(h)), 1..=max_reps)
        .prop_map(|raw| {
            let mut out: Vec<(Point, XVal)> = Vec::new();
            for (z, v) in raw {
                let z = crate::points::canonical_rep(&z);
                if z.is_origin() || out.iter().any(|(p, _)| p == &z) {
                    continue;
                }
                if z.is_real() {
                    let v = XVal::new(
                        GaussQ::real(v.base.re.clone()),
                        GaussQ::real(v.lam.re.clone()),
                    );
                    out.push((z, v));
                } else {
                    out.push((z.conj(), v.conj()));
                    out.push((z, v));
                }
            }
            out
        })
        .prop_filter("at least one node", |v| !v.is_empty())
}
