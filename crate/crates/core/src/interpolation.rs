//! Interpolation by integer power series with bounded coefficients.
//!
//! Nodes get affine hyperplanes `h_k = 1 − w_k·z` through `α_k` avoiding
//! every other node; `q = Π h_k` and the Lagrange polynomial `p` then give
//! `f = p + q·g` where `g` is chosen coefficient by coefficient so that `f`
//! has integer coefficients.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::points::Point;
use crate::polyseries::{
    monomials_up_to, normalized_q_terms, poly_length, recursion_target, BoundTemplate,
    Decomposition, Exp, IntSeries, Poly,
};
use crate::scalar::{
    ceil_int, half, nearest_integer, rat, GaussQ, Rational, XVal, DEFAULT_LAMBDA_LEVEL,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub alpha: Point,
    pub beta: XVal,
}

/// Validated interpolation data: distinct nonzero points, real values at
/// real points, conjugate-symmetric pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    m: usize,
    nodes: Vec<Node>,
    partner: Vec<Option<usize>>,
}

impl NodeSet {
    pub fn new(m: usize, nodes: Vec<(Point, XVal)>) -> Result<Self> {
        let nodes: Vec<Node> = nodes
            .into_iter()
            .map(|(alpha, beta)| Node { alpha, beta })
            .collect();
        let mut index: HashMap<&Point, usize> = HashMap::new();
        for (k, n) in nodes.iter().enumerate() {
            n.alpha.check_dim(m)?;
            if n.alpha.is_origin() {
                return Err(Error::DegenerateNodes("origin among nodes".into()));
            }
            if !n.alpha.in_unit_polydisc() {
                return Err(Error::OutsideDomain(n.alpha.to_string()));
            }
            if index.insert(&n.alpha, k).is_some() {
                return Err(Error::DegenerateNodes(format!("repeated node {}", n.alpha)));
            }
        }
        let mut partner = Vec::with_capacity(nodes.len());
        for n in &nodes {
            if n.alpha.is_real() {
                if !n.beta.is_real() {
                    return Err(Error::DegenerateNodes(format!(
                        "real node {} with nonreal value",
                        n.alpha
                    )));
                }
                partner.push(None);
                continue;
            }
            let c = n.alpha.conj();
            let Some(&l) = index.get(&c) else {
                return Err(Error::DegenerateNodes(format!(
                    "node {} lacks its conjugate",
                    n.alpha
                )));
            };
            if nodes[l].beta != n.beta.conj() {
                return Err(Error::DegenerateNodes(format!(
                    "values at {} and {c} are not conjugate",
                    n.alpha
                )));
            }
            partner.push(Some(l));
        }
        Ok(Self { m, nodes, partner })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn partner(&self, k: usize) -> Option<usize> {
        self.partner[k]
    }
}

/// `h_k = 1 − w_k·z`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneSet {
    pub w: Vec<Vec<GaussQ>>,
}

impl HyperplaneSet {
    pub fn poly(&self, k: usize) -> Poly<GaussQ> {
        Poly::affine_one_minus(&self.w[k])
    }

    pub fn eval(&self, k: usize, z: &Point) -> GaussQ {
        hyperplane_value(&self.w[k], z)
    }
}

fn hyperplane_value(w: &[GaussQ], z: &Point) -> GaussQ {
    let mut acc = GaussQ::one();
    for (wi, zi) in w.iter().zip(z.coords()) {
        acc = &acc - &(wi * zi);
    }
    acc
}

const DIRECTION_CAP: u64 = 64;
const STEP_CAP: u64 = 4096;

/// 0, 1/2, −1/2, 1/3, −1/3, …
fn perturbation(step: u64) -> Rational {
    if step == 0 {
        return Rational::zero();
    }
    let d = (step + 3) / 2;
    let t = Rational::new(BigInt::one(), BigInt::from(d));
    if step % 2 == 1 {
        t
    } else {
        -t
    }
}

pub fn build_hyperplanes(nodes: &NodeSet) -> Result<HyperplaneSet> {
    let m = nodes.dim();
    let n = nodes.len();
    let mut w: Vec<Option<Vec<GaussQ>>> = vec![None; n];
    for k in 0..n {
        if w[k].is_some() {
            continue;
        }
        let alpha = &nodes.nodes[k].alpha;
        let istar = alpha
            .coords()
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero node");
        let a_star = &alpha.coords()[istar];
        let inv = a_star.inv().expect("nonzero coordinate");
        let mut w0 = vec![GaussQ::zero(); m];
        w0[istar] = inv.clone();
        // Kernel of v ↦ Σ v_i α_i, one basis vector per other coordinate.
        let basis: Vec<Vec<GaussQ>> = (0..m)
            .filter(|&i| i != istar)
            .map(|i| {
                let mut v = vec![GaussQ::zero(); m];
                v[i] = GaussQ::one();
                v[istar] = -(&alpha.coords()[i] * &inv);
                v
            })
            .collect();
        let avoids = |cand: &[GaussQ]| {
            (0..n).all(|j| j == k || !hyperplane_value(cand, &nodes.nodes[j].alpha).is_zero())
        };
        let found = if avoids(&w0) {
            Some(w0)
        } else if basis.is_empty() {
            None
        } else {
            search_direction(&w0, &basis, avoids)
        };
        let Some(wk) = found else {
            return Err(Error::SearchCapExceeded(alpha.to_string()));
        };
        if let Some(l) = nodes.partner[k] {
            w[l] = Some(wk.iter().map(GaussQ::conj).collect());
        }
        w[k] = Some(wk);
    }
    Ok(HyperplaneSet {
        w: w.into_iter().map(Option::unwrap).collect(),
    })
}

fn search_direction(
    w0: &[GaussQ],
    basis: &[Vec<GaussQ>],
    avoids: impl Fn(&[GaussQ]) -> bool,
) -> Option<Vec<GaussQ>> {
    for s in 1..=DIRECTION_CAP {
        // v_s = Σ_j s^j basis_j, points on the moment curve.
        let mut v = vec![GaussQ::zero(); w0.len()];
        let mut sp = Rational::one();
        for b in basis {
            sp *= Rational::from_integer(BigInt::from(s));
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = &*vi + &bi.scale(&sp);
            }
        }
        for step in 1..=STEP_CAP {
            let t = perturbation(step);
            let cand: Vec<GaussQ> = w0.iter().zip(&v).map(|(a, b)| a + &b.scale(&t)).collect();
            if avoids(&cand) {
                return Some(cand);
            }
        }
    }
    None
}

/// `q = Π h_k`, the values `q′(α_k) = Π_{j≠k} h_j(α_k)` and the Lagrange
/// polynomial `p = Σ β_k Π_{j≠k} h_j / q′(α_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeData {
    pub p: Poly<XVal>,
    pub q: Poly<GaussQ>,
    pub qprime_values: Vec<GaussQ>,
}

impl LagrangeData {
    pub fn b0(&self) -> GaussQ {
        self.q.coeff(&Exp::zero(self.q.dim()))
    }
}

/// Quotient of `q` by `1 − w·z`, assuming the division is exact.
fn divide_by_affine(q: &Poly<GaussQ>, w: &[GaussQ]) -> Poly<GaussQ> {
    let m = q.dim();
    let d = q.degree();
    if d == 0 {
        return Poly::zero(m);
    }
    // r_θ = q_θ + Σ_i w_i r_{θ−e_i}, for |θ| < deg q.
    let mut r: HashMap<Exp, GaussQ> = HashMap::new();
    for theta in monomials_up_to(m, (d - 1) as u32) {
        let mut acc = q.coeff(&theta);
        for (i, wi) in w.iter().enumerate() {
            if wi.is_zero() || theta.0[i] == 0 {
                continue;
            }
            let mut prev = theta.clone();
            prev.0[i] -= 1;
            if let Some(rv) = r.get(&prev) {
                acc = &acc + &(wi * rv);
            }
        }
        if !acc.is_zero() {
            r.insert(theta, acc);
        }
    }
    Poly::from_terms(m, r)
}

pub fn build_lagrange(nodes: &NodeSet, hp: &HyperplaneSet) -> Result<LagrangeData> {
    let m = nodes.dim();
    let n = nodes.len();
    let mut q = Poly::constant(m, GaussQ::one());
    for k in 0..n {
        q = q.mul(&hp.poly(k));
    }
    if !q.is_real() {
        return Err(Error::DegenerateNodes(
            "node set is not conjugate-closed".into(),
        ));
    }
    let mut qprime_values = Vec::with_capacity(n);
    let mut p_acc: BTreeMap<Exp, XVal> = BTreeMap::new();
    for k in 0..n {
        let alpha = &nodes.nodes[k].alpha;
        let mut qp = GaussQ::one();
        for j in (0..n).filter(|&j| j != k) {
            qp = &qp * &hp.eval(j, alpha);
        }
        let inv = qp
            .inv()
            .ok_or_else(|| Error::DegenerateNodes(format!("q′ vanishes at {alpha}")))?;
        qprime_values.push(qp);
        let beta = &nodes.nodes[k].beta;
        if beta.is_zero() {
            continue;
        }
        let others = divide_by_affine(&q, &hp.w[k]);
        for (e, c) in others.terms() {
            let v = beta.scale(&(c * &inv));
            let slot = p_acc.entry(e.clone()).or_insert_with(XVal::zero);
            *slot = &*slot + &v;
        }
    }
    let p = Poly::from_terms(m, p_acc);
    Ok(LagrangeData {
        p,
        q,
        qprime_values,
    })
}

/// Bound `|x|` of a real λ-linear value from above.
fn abs_upper(x: &XVal) -> Result<Rational> {
    if !x.is_real() {
        return Err(Error::NonRealTarget(x.to_string()));
    }
    Ok(x.real_abs_upper())
}

/// The integer coefficient stream of `p + q·g`, up to total degree `d`.
pub fn rounding_stream(l: &LagrangeData, d: u32, const_term: Option<&BigInt>) -> Result<IntSeries> {
    let m = l.q.dim();
    let q_terms = normalized_q_terms(&l.q)?;
    let mut g: HashMap<Exp, XVal> = HashMap::new();
    let mut coeffs: BTreeMap<Exp, BigInt> = BTreeMap::new();
    for theta in monomials_up_to(m, d) {
        let target = recursion_target(&theta, &l.p, &q_terms, &g);
        if !target.is_real() {
            return Err(Error::NonRealTarget(theta.to_string()));
        }
        let f = match const_term {
            Some(c) if theta.is_zero() => c.clone(),
            _ => nearest_integer(&target, DEFAULT_LAMBDA_LEVEL)?,
        };
        let gv = &XVal::algebraic(GaussQ::real(Rational::from_integer(f.clone()))) - &target;
        if !gv.is_zero() {
            g.insert(theta.clone(), gv);
        }
        if !f.is_zero() {
            coeffs.insert(theta, f);
        }
    }
    let g0 = g.get(&Exp::zero(m)).cloned().unwrap_or_else(XVal::zero);
    let g_bound = half().max(abs_upper(&g0)?);
    let remainder: BTreeMap<Exp, XVal> = g.into_iter().collect();
    let dec = Decomposition {
        p: l.p.clone(),
        q: l.q.clone(),
        g_bound,
        remainder,
    };
    let mut series = IntSeries {
        m,
        degree: d,
        coeffs,
        coeff_bound: Rational::zero(),
        template: BoundTemplate {
            c: Rational::one(),
            e: m as u32,
        },
        decomposition: Some(dec),
        rho: None,
        majorants: Vec::new(),
    };
    let bound = coefficient_bound(&series)?;
    series.template.c = if bound.is_zero() {
        Rational::one()
    } else {
        bound.clone()
    };
    series.coeff_bound = bound;
    Ok(series)
}

/// `⌈max|a_θ|⌉ + ⌈L(q)·g_bound⌉`, or the largest stored coefficient when the
/// decomposition proves the series is a polynomial.
pub fn coefficient_bound(f: &IntSeries) -> Result<Rational> {
    if f.is_exact_polynomial() {
        return Ok(Rational::from_integer(f.max_abs_coeff()));
    }
    let dec = f.decomposition.as_ref().expect("decomposed series");
    let mut amax = Rational::zero();
    for c in dec.p.terms().values() {
        amax = amax.max(abs_upper(c)?);
    }
    let lq = poly_length(&dec.q)?;
    Ok(Rational::from_integer(
        ceil_int(&amax) + ceil_int(&(lq * &dec.g_bound)),
    ))
}

/// Interpolating integer series through `nodes`, truncated at degree `d`.
///
/// An origin node is removed and its value, which must be an integer,
/// becomes the prescribed constant term.
pub fn interpolate(
    m: usize,
    nodes: Vec<(Point, XVal)>,
    d: u32,
    const_term: Option<BigInt>,
) -> Result<IntSeries> {
    let mut c = const_term;
    let mut rest = Vec::with_capacity(nodes.len());
    for (a, b) in nodes {
        if a.is_origin() {
            let ok = b.is_algebraic() && b.base.is_real() && b.base.re.is_integer();
            if !ok {
                return Err(Error::OriginTargetNotInteger(b.to_string()));
            }
            let v = b.base.re.to_integer();
            if c.as_ref().is_some_and(|x| x != &v) {
                return Err(Error::DegenerateNodes("conflicting constant terms".into()));
            }
            c = Some(v);
        } else {
            rest.push((a, b));
        }
    }
    let set = NodeSet::new(m, rest)?;
    let hp = build_hyperplanes(&set)?;
    let l = build_lagrange(&set, &hp)?;
    rounding_stream(&l, d, c.as_ref())
}

/// The same interpolant regenerated to a different degree from its
/// decomposition, keeping the constant term.
pub fn extend_interpolant(f: &IntSeries, degree: u32) -> Result<IntSeries> {
    let dec = f
        .decomposition
        .as_ref()
        .ok_or_else(|| Error::Format("series carries no decomposition".into()))?;
    let l = LagrangeData {
        p: dec.p.clone(),
        q: dec.q.clone(),
        qprime_values: Vec::new(),
    };
    rounding_stream(&l, degree, Some(&f.coeff(&Exp::zero(f.m))))
}

/// `|g_φ| ≤ 1/2` for every recorded remainder coefficient with `φ ≠ 0`.
pub fn remainder_within_half(f: &IntSeries) -> bool {
    let Some(dec) = &f.decomposition else {
        return true;
    };
    let h = rat(1, 2);
    dec.remainder
        .iter()
        .all(|(e, v)| e.is_zero() || (v.is_real() && abs_upper_exact_le(v, &h)))
}

/// `|base + lam·λ| ≤ bound`, decided with a λ enclosure fine enough that
/// only exact ties remain undecided; real values only.
pub fn abs_upper_exact_le(v: &XVal, bound: &Rational) -> bool {
    if v.lam.is_zero() {
        return v.base.re.abs() <= *bound;
    }
    for level in DEFAULT_LAMBDA_LEVEL..=crate::scalar::MAX_LAMBDA_LEVEL {
        let o = crate::scalar::LambdaOracle::new(level).expect("level within range");
        let (lo, hi) = o.real_interval(&v.base.re, &v.lam.re);
        if lo.abs() <= *bound && hi.abs() <= *bound {
            return true;
        }
        if lo > *bound || hi < -bound.clone() {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyseries::{eval_box, poly_eval};
    use crate::scalar::{int, LambdaOracle};

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn xv(s: &str) -> XVal {
        s.parse().unwrap()
    }

    fn coeffs_1d(f: &IntSeries) -> Vec<i64> {
        (0..=f.degree)
            .map(|k| i64::try_from(f.coeff(&Exp(vec![k]))).unwrap())
            .collect()
    }

    fn gpoly(m: usize, terms: &[(&[u32], i64)]) -> Poly<GaussQ> {
        Poly::from_terms(
            m,
            terms
                .iter()
                .map(|(t, c)| (Exp(t.to_vec()), GaussQ::from_i64(*c))),
        )
    }

    #[test]
    fn hyperplane_examples() {
        let ns = NodeSet::new(1, vec![(p("(1/2)"), xv("0")), (p("(1/3)"), xv("0"))]).unwrap();
        let hp = build_hyperplanes(&ns).unwrap();
        assert_eq!(hp.poly(0), gpoly(1, &[(&[0], 1), (&[1], -2)]));
        assert_eq!(hp.poly(1), gpoly(1, &[(&[0], 1), (&[1], -3)]));

        let ns = NodeSet::new(2, vec![(p("(1/2,1/3)"), xv("0"))]).unwrap();
        let hp = build_hyperplanes(&ns).unwrap();
        assert_eq!(hp.poly(0), gpoly(2, &[(&[0, 0], 1), (&[1, 0], -2)]));

        let ns = NodeSet::new(1, vec![(p("(1/2*i)"), xv("0")), (p("(-1/2*i)"), xv("0"))]).unwrap();
        let hp = build_hyperplanes(&ns).unwrap();
        assert_eq!(hp.w[0], vec!["-2*i".parse::<GaussQ>().unwrap()]);
        assert_eq!(hp.w[1], vec!["2*i".parse::<GaussQ>().unwrap()]);
    }

    #[test]
    fn hyperplane_conflicts_are_perturbed_away() {
        // (1/2, 0) and (1/2, 1/2) share the first coordinate.
        let ns = NodeSet::new(2, vec![(p("(1/2,0)"), xv("0")), (p("(1/2,1/2)"), xv("0"))]).unwrap();
        let hp = build_hyperplanes(&ns).unwrap();
        for k in 0..2 {
            for j in 0..2 {
                assert_eq!(hp.eval(k, &ns.nodes()[j].alpha).is_zero(), j == k);
            }
        }
    }

    #[test]
    fn lagrange_examples() {
        let ns = NodeSet::new(1, vec![(p("(1/2)"), xv("1")), (p("(1/3)"), xv("0"))]).unwrap();
        let l = build_lagrange(&ns, &build_hyperplanes(&ns).unwrap()).unwrap();
        let expect_p: Poly<XVal> =
            Poly::from_terms(1, [(Exp(vec![0]), xv("-2")), (Exp(vec![1]), xv("6"))]);
        assert_eq!(l.p, expect_p);
        assert_eq!(l.q, gpoly(1, &[(&[0], 1), (&[1], -5), (&[2], 6)]));

        let ns = NodeSet::new(1, vec![(p("(1/2)"), xv("1/3"))]).unwrap();
        let l = build_lagrange(&ns, &build_hyperplanes(&ns).unwrap()).unwrap();
        assert_eq!(l.p, Poly::constant(1, xv("1/3")));
        assert_eq!(l.q, gpoly(1, &[(&[0], 1), (&[1], -2)]));

        let ns = NodeSet::new(1, vec![(p("(1/2)"), xv("0")), (p("(-1/3)"), xv("0"))]).unwrap();
        let l = build_lagrange(&ns, &build_hyperplanes(&ns).unwrap()).unwrap();
        assert!(l.p.is_zero());
        assert_eq!(l.b0(), GaussQ::one());
    }

    #[test]
    fn rounding_examples() {
        let f = interpolate(1, vec![(p("(1/2)"), xv("1/3"))], 4, None).unwrap();
        assert_eq!(coeffs_1d(&f), vec![0, 1, -1, 1, -1]);
        let dec = f.decomposition.as_ref().unwrap();
        for k in 0..=4u32 {
            let expect = if k % 2 == 0 { rat(-1, 3) } else { rat(1, 3) };
            assert_eq!(
                dec.remainder[&Exp(vec![k])],
                XVal::algebraic(GaussQ::real(expect))
            );
        }

        let f = interpolate(1, vec![(p("(1/2)"), xv("0"))], 6, Some(BigInt::from(1))).unwrap();
        assert_eq!(coeffs_1d(&f), vec![1, -2, 0, 0, 0, 0, 0]);
        assert!(f.is_exact_polynomial());

        let f = interpolate(
            1,
            vec![(p("(1/2)"), xv("1")), (p("(1/3)"), xv("0"))],
            5,
            None,
        )
        .unwrap();
        assert_eq!(coeffs_1d(&f), vec![-2, 6, 0, 0, 0, 0]);
        assert!(f.decomposition.as_ref().unwrap().remainder.is_empty());
    }

    #[test]
    fn interpolate_examples() {
        let f = interpolate(1, vec![(p("(0)"), xv("5")), (p("(1/2)"), xv("0"))], 4, None).unwrap();
        assert_eq!(f.coeff(&Exp(vec![0])), BigInt::from(5));

        let f = interpolate(
            1,
            vec![(p("(1/2*i)"), xv("1*i")), (p("(-1/2*i)"), xv("-1*i"))],
            10,
            None,
        )
        .unwrap();
        let dec = f.decomposition.as_ref().unwrap();
        assert!(dec.p.is_real());
        assert!(dec.q.is_real());
        assert_eq!(poly_eval(&dec.p, &p("(1/2*i)")).unwrap(), xv("1*i"));

        assert!(matches!(
            interpolate(1, vec![(p("(0)"), xv("1/2"))], 2, None),
            Err(Error::OriginTargetNotInteger(_))
        ));
        assert!(matches!(
            interpolate(1, vec![(p("(1/2)"), xv("1*i"))], 2, None),
            Err(Error::DegenerateNodes(_))
        ));
    }

    #[test]
    fn lambda_targets_round_to_integers() {
        let nodes = vec![
            (p("(1/3)"), xv("1/2+(1)*L")),
            (p("(1/2+1/2*i)"), xv("1*i")),
            (p("(1/2-1/2*i)"), xv("-1*i")),
        ];
        let f = interpolate(1, nodes.clone(), 12, None).unwrap();
        assert!(remainder_within_half(&f));
        let oracle = LambdaOracle::new(4).unwrap();
        for (a, b) in &nodes {
            let bx = eval_box(&f, a, &oracle).unwrap();
            assert!(bx.contains_box(&b.enclose(&oracle)));
            assert_eq!(f.exact_value_at(a).unwrap().as_ref(), Some(b));
        }
    }

    #[test]
    fn bound_formula() {
        let f = interpolate(1, vec![(p("(1/2)"), xv("1/3"))], 8, None).unwrap();
        // max|a| = 1/3, L(q) = 3, g bound 1/2.
        assert_eq!(f.coeff_bound, int(1) + int(2));
        assert_eq!(f.template, BoundTemplate { c: int(3), e: 1 });
    }
}
