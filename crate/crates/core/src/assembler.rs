//! The main construction
//! `f = g_ρ + Σ_{k=1}^{N} z^{θ_k}·h_k·Π_{j<k} f_j`, truncated.
//!
//! `g_ρ` fixes the polyradius, `f_j` vanishes at the `j`-th enumerated
//! point and equals 1 at every other one, and the steering interpolant
//! `h_k` is zero at every enumerated point except `α_k`. Hence
//! `f(α_k) = g_ρ(α_k) + α_k^{θ_k}·h_k(α_k)` exactly, and `h_k(α_k)` carries
//! a λ-part precisely when `α_k` is outside the prescribed set `S`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interpolation::interpolate;
use crate::points::{enumerate_points, Point};
use crate::polyseries::{
    eval_box, map_add, map_mul, map_shift, BoundTemplate, CoeffMap, Exp, IntSeries, Majorant, Poly,
};
use crate::radius::{is_exact_mode, radius_exact_value, radius_series};
use crate::scalar::{
    ceil_int, fmt_rational, rat, ComplexBox, GaussQ, LambdaOracle, Rational, XVal,
};
use crate::vanishing::{build_gadget, in_grid, GadgetBundle, GadgetSpec};

/// Largest admissible `|θ_k|`.
pub const THETA_CAP: u64 = 1 << 22;

/// Radii at which the convergence chain is certified.
pub fn sample_radii() -> Vec<Rational> {
    vec![rat(1, 4), rat(1, 2), rat(3, 4)]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub m: usize,
    pub rho: Vec<Rational>,
    pub height: u32,
    pub stage: usize,
    pub degree: u32,
    pub seed: u64,
    /// Indices into the enumeration representatives.
    pub s: Vec<usize>,
    pub lambda_level: u32,
    pub paper_faithful: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Steering {
    pub k: usize,
    pub alpha: Point,
    /// Prescribed value `h_k(α_k)`.
    pub beta: XVal,
    pub series: IntSeries,
    pub theta: Exp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub k: usize,
    /// `Ĉ_1⋯Ĉ_{k−1}·C̃_k`.
    pub c_paper: Rational,
    /// `Ĉ_0·Ĉ_1⋯Ĉ_{k−1}·C̃_k`, bounding the whole `k`-th summand.
    pub c_full: Rational,
    /// Exponent `E_k = Σ_{j<k} e_j + e(h_k)` of the summand's template.
    pub e: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassRecord {
    pub index: usize,
    pub point: Point,
    pub inside: bool,
    pub witness: XVal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainBundle {
    pub problem: Problem,
    /// `α_0 = 0, α_1, …, α_N`.
    pub reps: Vec<Point>,
    pub radius: IntSeries,
    pub gadgets: Vec<GadgetBundle>,
    pub steering: Vec<Steering>,
    pub ledger: Vec<LedgerEntry>,
    /// Exact `f(α_k)`; absent in paper-faithful mode.
    pub nodes: Option<Vec<XVal>>,
    pub series: IntSeries,
}

pub fn check_problem(p: &Problem) -> Result<()> {
    crate::radius::check_rho(&p.rho)?;
    if p.rho.len() != p.m {
        return Err(Error::DimensionMismatch {
            expected: p.m,
            got: p.rho.len(),
        });
    }
    if !is_exact_mode(&p.rho) {
        return Err(Error::ExactModeRequired);
    }
    if !p.s.contains(&0) {
        return Err(Error::OriginNotInS);
    }
    if let Some(bad) = p.s.iter().find(|&&i| i > p.stage) {
        return Err(Error::Format(format!(
            "S index {bad} exceeds stage {}",
            p.stage
        )));
    }
    Ok(())
}

/// Prescribed steering values: `k + seed` inside `S`, `λ/(seed + 1)` outside,
/// and 0 at the origin.
pub fn assign_targets(reps: &[Point], s: &[usize], seed: u64) -> Result<Vec<XVal>> {
    if !s.contains(&0) {
        return Err(Error::OriginNotInS);
    }
    let mut out = Vec::with_capacity(reps.len());
    for k in 0..reps.len() {
        let v = if k == 0 {
            XVal::zero()
        } else if s.contains(&k) {
            XVal::from(GaussQ::real(Rational::from_integer(BigInt::from(
                k as u64 + seed,
            ))))
        } else {
            let lam = Rational::new(BigInt::one(), BigInt::from(seed + 1));
            XVal::lambda_multiple(GaussQ::real(lam))
        };
        out.push(v);
    }
    Ok(out)
}

/// `|θ_k| = ⌈C_k⌉ + k·E_k + seed`, placed on the first nonzero coordinate.
pub fn theta_for(k: usize, alpha: &Point, c: &Rational, e: u32, seed: u64) -> Result<Exp> {
    if k == 0 || alpha.is_origin() {
        return Err(Error::ZeroPointNeedsNoTheta);
    }
    let size = ceil_int(c) + BigInt::from(k as u64 * e as u64 + seed);
    let s = u64::try_from(&size)
        .ok()
        .filter(|&s| s <= THETA_CAP)
        .ok_or_else(|| Error::ExponentBudget {
            k,
            size: size.to_string(),
        })?;
    let i = alpha
        .coords()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero point");
    Ok(Exp::unit(alpha.dim(), i, s as u32))
}

pub fn theta_schedule(ledger: &[LedgerEntry], points: &[Point], seed: u64) -> Result<Vec<Exp>> {
    ledger
        .iter()
        .map(|l| theta_for(l.k, &points[l.k], &l.c_full, l.e, seed))
        .collect()
}

/// Ĉ-products for every `k`.
pub fn build_ledger(
    gadgets: &[GadgetBundle],
    steering_templates: &[BoundTemplate],
) -> Vec<LedgerEntry> {
    let mut out = Vec::with_capacity(steering_templates.len());
    for (idx, t) in steering_templates.iter().enumerate() {
        let k = idx + 1;
        let mut c_paper = t.c.clone();
        for g in &gadgets[1..k] {
            c_paper *= &g.ledger.c;
        }
        let c_full = &gadgets[0].ledger.c * &c_paper;
        let e = gadgets[..k].iter().map(|g| g.ledger.e).sum::<u32>() + t.e;
        out.push(LedgerEntry {
            k,
            c_paper,
            c_full,
            e,
        });
    }
    out
}

/// Enumerated points carrying nodes: nonzero representatives and partners.
pub fn node_points(reps: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for r in reps.iter().filter(|r| !r.is_origin()) {
        out.push(r.clone());
        if !r.is_real() {
            out.push(r.conj());
        }
    }
    out
}

/// `lcm(denominators)·q` divided by its content.
pub fn integer_annihilator(q: &Poly<GaussQ>) -> Poly<GaussQ> {
    let m = q.dim();
    let mut l = BigInt::one();
    for c in q.terms().values() {
        l = l.lcm(c.re.denom());
    }
    let scaled: Vec<(Exp, BigInt)> = q
        .terms()
        .iter()
        .map(|(e, c)| {
            (
                e.clone(),
                (&c.re * Rational::from_integer(l.clone())).to_integer(),
            )
        })
        .collect();
    let content = scaled.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    let content = if content.is_zero() {
        BigInt::one()
    } else {
        content
    };
    Poly::from_terms(
        m,
        scaled
            .into_iter()
            .map(|(e, c)| (e, GaussQ::real(Rational::from_integer(c / &content)))),
    )
}

/// Certification points for gadget `j`: enumeration points after the
/// nodes, outside the grid of `alpha`, `count` of them.
pub fn next_tier(
    problem: &Problem,
    alpha: &Point,
    nodes: &[Point],
    count: usize,
) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    let mut h = problem.height.max(2);
    while out.len() < count {
        if h > problem.height + 4 {
            return Err(Error::StageExhausted {
                stage: count,
                reason: "no further enumerated points".into(),
            });
        }
        let e = enumerate_points(problem.m, &problem.rho, h)?;
        for r in &e.reps {
            if out.len() == count {
                break;
            }
            let taken = r.is_origin() || nodes.contains(r) || out.contains(r) || in_grid(alpha, r);
            if !taken {
                out.push(r.clone());
            }
        }
        h += 1;
    }
    Ok(out)
}

pub fn assemble(problem: &Problem) -> Result<MainBundle> {
    check_problem(problem)?;
    let m = problem.m;
    let d = problem.degree;
    let n = problem.stage;
    let e = enumerate_points(m, &problem.rho, problem.height)?;
    if e.len() <= n {
        return Err(Error::Format(format!(
            "stage {n} needs {} enumerated points, height gives {}",
            n + 1,
            e.len()
        )));
    }
    let reps: Vec<Point> = e.reps[..=n].to_vec();
    let nodes = node_points(&reps);
    let radius = radius_series(&problem.rho, d)?;
    let targets = assign_targets(&reps, &problem.s, problem.seed)?;

    let mut steering_series = Vec::with_capacity(n);
    for k in 1..=n {
        steering_series.push(steering_interpolant(&reps, &nodes, k, &targets[k], d)?);
    }
    let annihilator = match (steering_series.first(), problem.paper_faithful) {
        (Some(h), false) => Some(integer_annihilator(
            &h.decomposition.as_ref().expect("interpolant").q,
        )),
        _ => None,
    };

    let mut gadgets = Vec::with_capacity(n);
    for alpha in reps.iter().take(n) {
        let spec = if problem.paper_faithful {
            let betas: Vec<Point> = reps
                .iter()
                .filter(|r| !in_grid(alpha, r))
                .cloned()
                .collect();
            GadgetSpec {
                alpha: alpha.clone(),
                pinned: Vec::new(),
                annihilator: None,
                betas,
                degree: d,
            }
        } else {
            GadgetSpec {
                alpha: alpha.clone(),
                pinned: nodes.clone(),
                annihilator: annihilator.clone(),
                betas: next_tier(problem, alpha, &nodes, n)?,
                degree: d,
            }
        };
        gadgets.push(build_gadget(&spec)?);
    }

    let templates: Vec<BoundTemplate> =
        steering_series.iter().map(|h| h.template.clone()).collect();
    let ledger = build_ledger(&gadgets, &templates);
    let thetas = theta_schedule(&ledger, &reps, problem.seed)?;
    let steering: Vec<Steering> = steering_series
        .into_iter()
        .zip(thetas)
        .enumerate()
        .map(|(i, (series, theta))| Steering {
            k: i + 1,
            alpha: reps[i + 1].clone(),
            beta: targets[i + 1].clone(),
            series,
            theta,
        })
        .collect();

    let node_values = if problem.paper_faithful {
        None
    } else {
        Some(node_table(&problem.rho, &reps, &gadgets, &steering)?)
    };
    let series = main_series(&radius, &gadgets, &steering, &ledger, d)?;
    Ok(MainBundle {
        problem: problem.clone(),
        reps,
        radius,
        gadgets,
        steering,
        ledger,
        nodes: node_values,
        series,
    })
}

/// `h_k`: value `β_k` at `α_k` (conjugate at the partner), 0 at every other
/// enumerated point and at the origin.
pub fn steering_interpolant(
    reps: &[Point],
    nodes: &[Point],
    k: usize,
    beta: &XVal,
    d: u32,
) -> Result<IntSeries> {
    let alpha = &reps[k];
    let nodes = nodes
        .iter()
        .map(|z| {
            let v = if z == alpha {
                beta.clone()
            } else if *z == alpha.conj() {
                beta.conj()
            } else {
                XVal::zero()
            };
            (z.clone(), v)
        })
        .collect();
    interpolate(alpha.dim(), nodes, d, Some(BigInt::zero()))
}

/// Exact `f(α_k) = g_ρ(α_k) + Σ_j α_k^{θ_j}·h_j(α_k)·Π_{i<j} f_i(α_k)`.
pub fn node_table(
    rho: &[Rational],
    reps: &[Point],
    gadgets: &[GadgetBundle],
    steering: &[Steering],
) -> Result<Vec<XVal>> {
    let mut out = Vec::with_capacity(reps.len());
    for (k, a) in reps.iter().enumerate() {
        let mut v = XVal::from(radius_exact_value(rho, a)?);
        for st in steering {
            let hv = st
                .series
                .exact_value_at(a)?
                .ok_or(Error::DenominatorZero(k))?;
            if hv.is_zero() {
                continue;
            }
            let mut prod = GaussQ::one();
            for g in &gadgets[..st.k] {
                let fv = g.exact_value(a)?.ok_or(Error::DenominatorZero(k))?;
                if !fv.is_algebraic() {
                    return Err(Error::LambdaSquare);
                }
                prod = &prod * &fv.base;
            }
            if prod.is_zero() {
                return Err(Error::DenominatorZero(k));
            }
            let mono = a.monomial(&st.theta.0);
            v = &v + &hv.scale(&(&mono * &prod));
        }
        out.push(v);
    }
    Ok(out)
}

/// Truncated main series. Summands with `|θ_k| > D` leave no stored
/// coefficient and enter through their majorants only.
pub fn main_series(
    radius: &IntSeries,
    gadgets: &[GadgetBundle],
    steering: &[Steering],
    ledger: &[LedgerEntry],
    d: u32,
) -> Result<IntSeries> {
    let m = radius.m;
    let mut coeffs: CoeffMap = radius.coeffs.clone();
    let mut majorants = Vec::with_capacity(steering.len());
    for st in steering {
        let shift = st.theta.degree();
        if shift <= d as u64 {
            let mut term = map_shift(&st.series.coeffs, &st.theta, d);
            for g in &gadgets[..st.k] {
                term = map_mul(&term, &g.series.coeffs, d);
            }
            coeffs = map_add(&coeffs, &term);
        }
        let mut c = st.series.coeff_bound.clone();
        for g in &gadgets[..st.k] {
            c *= &g.series.coeff_bound;
        }
        majorants.push(Majorant {
            coeff: c,
            shift,
            power: ((st.k + 1) * m) as u64,
        });
    }
    let max = coeffs
        .values()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    let template = main_template(radius, ledger);
    Ok(IntSeries {
        m,
        degree: d,
        coeffs,
        coeff_bound: Rational::from_integer(max),
        template,
        decomposition: None,
        rho: radius.rho.clone(),
        majorants,
    })
}

/// `C = C(g_ρ) + Σ_k C_k`, `e = max(e(g_ρ), E_k)`.
pub fn main_template(radius: &IntSeries, ledger: &[LedgerEntry]) -> BoundTemplate {
    let mut c = radius.template.c.clone();
    let mut e = radius.template.e;
    for l in ledger {
        c += &l.c_full;
        e = e.max(l.e);
    }
    BoundTemplate { c, e }
}

/// One record per representative `α_0, …, α_N`: inside iff the exact value
/// has no λ-part.
pub fn classify(bundle: &MainBundle) -> Option<Vec<ClassRecord>> {
    let nodes = bundle.nodes.as_ref()?;
    Some(
        bundle
            .reps
            .iter()
            .zip(nodes)
            .enumerate()
            .map(|(index, (p, v))| ClassRecord {
                index,
                point: p.clone(),
                inside: v.lam.is_zero(),
                witness: v.clone(),
            })
            .collect(),
    )
}

/// Box of the truncated main series at every representative.
pub fn node_boxes(bundle: &MainBundle, oracle: &LambdaOracle) -> Result<Vec<ComplexBox>> {
    bundle
        .reps
        .iter()
        .map(|a| eval_box(&bundle.series, a, oracle))
        .collect()
}

/// Rational lower bound on `1/(e·|log r|)` for `r ∈ (0, 1)`, from
/// `e < 2719/1000` and `|log r| ≤ Σ_{n≤12} x^n/n + x^13/(13·r)`, `x = 1 − r`.
pub fn log_factor(r: &Rational) -> Rational {
    let one = Rational::one();
    let x = &one - r;
    let mut s = Rational::zero();
    let mut p = one.clone();
    for k in 1..=12u32 {
        p *= &x;
        s += &p / Rational::from_integer(BigInt::from(k));
    }
    p *= &x;
    s += p / (Rational::from_integer(BigInt::from(13)) * r);
    one / (rat(2719, 1000) * s)
}

/// Least `k ≥ 1` with `r^k/(1 − r) < 1/2`.
pub fn threshold_index(r: &Rational) -> u32 {
    let one = Rational::one();
    let q = &one - r;
    let mut p = r.clone();
    let mut k = 1;
    while &p / &q >= rat(1, 2) {
        p *= r;
        k += 1;
    }
    k
}

pub fn fmt_ledger(l: &LedgerEntry) -> String {
    format!(
        "k={} Cpaper={} Cfull={} E={}",
        l.k,
        fmt_rational(&l.c_paper),
        fmt_rational(&l.c_full),
        l.e
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn problem(m: usize, height: u32, stage: usize, s: Vec<usize>) -> Problem {
        Problem {
            m,
            rho: vec![int(1); m],
            height,
            stage,
            degree: 16,
            seed: 0,
            s,
            lambda_level: 3,
            paper_faithful: false,
        }
    }

    #[test]
    fn target_examples() {
        let reps = vec![p("(0)"), p("(-1/2)"), p("(1/2)")];
        let t = assign_targets(&reps, &[0, 2], 0).unwrap();
        assert_eq!(t[0], XVal::zero());
        assert_eq!(t[1], "0+(1)*L".parse().unwrap());
        assert_eq!(t[2], "2".parse().unwrap());
        let t = assign_targets(&reps, &[0, 2], 5).unwrap();
        assert_eq!(t[2], "7".parse().unwrap());
        assert!(matches!(
            assign_targets(&reps, &[1], 0),
            Err(Error::OriginNotInS)
        ));
    }

    #[test]
    fn theta_examples() {
        let a = p("(1/2)");
        assert_eq!(theta_for(1, &a, &rat(16, 5), 5, 0).unwrap().degree(), 9);
        assert_eq!(theta_for(2, &a, &int(1), 9, 0).unwrap().degree(), 19);
        assert_eq!(
            theta_for(1, &p("(1/2,0)"), &int(1), 5, 0).unwrap(),
            Exp(vec![6, 0])
        );
        assert_eq!(
            theta_for(1, &p("(0,1/3)"), &int(1), 5, 0).unwrap(),
            Exp(vec![0, 6])
        );
        assert!(matches!(
            theta_for(0, &p("(0)"), &int(1), 5, 0),
            Err(Error::ZeroPointNeedsNoTheta)
        ));
        assert!(matches!(
            theta_for(1, &a, &int(1 << 23), 5, 0),
            Err(Error::ExponentBudget { .. })
        ));
    }

    #[test]
    fn radii_thresholds() {
        assert_eq!(threshold_index(&rat(1, 2)), 3);
        assert_eq!(threshold_index(&rat(1, 4)), 1);
        assert_eq!(threshold_index(&rat(3, 4)), 8);
        let u = log_factor(&rat(1, 2));
        assert!(u < rat(5307, 10000) && u > rat(53, 100));
    }

    #[test]
    fn stage_zero_is_radius_series() {
        let b = assemble(&problem(1, 1, 0, vec![0])).unwrap();
        assert_eq!(b.series.coeffs, b.radius.coeffs);
        let c = classify(&b).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].inside);
        assert!(c[0].witness.is_zero());
    }

    #[test]
    fn one_variable_classification() {
        let b = assemble(&problem(1, 2, 2, vec![0, 2])).unwrap();
        assert_eq!(b.reps, vec![p("(0)"), p("(-1/2)"), p("(1/2)")]);
        let c = classify(&b).unwrap();
        assert_eq!(
            c.iter().map(|r| r.inside).collect::<Vec<_>>(),
            vec![true, false, true]
        );
        for l in &b.ledger {
            let size = b.steering[l.k - 1].theta.degree();
            assert!(BigInt::from(size) >= ceil_int(&l.c_paper) + BigInt::from(l.k * (4 * l.k + 1)));
        }
        let oracle = LambdaOracle::new(3).unwrap();
        for (bx, v) in node_boxes(&b, &oracle)
            .unwrap()
            .iter()
            .zip(b.nodes.as_ref().unwrap())
        {
            assert!(bx.contains_box(&v.enclose(&oracle)));
        }
    }

    #[test]
    fn problem_checks() {
        let mut pr = problem(1, 2, 1, vec![1]);
        assert!(matches!(assemble(&pr), Err(Error::OriginNotInS)));
        pr.s = vec![0];
        pr.rho = vec![rat(2, 3)];
        assert!(matches!(assemble(&pr), Err(Error::ExactModeRequired)));
    }
}
