//! Integer series vanishing at a prescribed conjugate pair `{α, ᾱ}` and
//! certified nonzero at a finite list of further points.
//!
//! The gadget is `g(z) + A(z)·Σ_i Σ_n h_i(z_i)·z_i^{t_{i,n}}`: `g` is an
//! interpolant equal to 0 at `α, ᾱ` and 1 on the rest of the grid
//! `Π_i {0, α_i, ᾱ_i}`, each `h_i` is a one-variable series vanishing at
//! `α_i, ᾱ_i`, and `A` is either 1 or an integer polynomial vanishing at
//! every pinned point. The exponents are chosen stage by stage so that the
//! partial sum `B_n` at the `n`-th point is boxed away from zero and the
//! neglected remainder is smaller than half its modulus.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interpolation::{extend_interpolant, interpolate, rounding_stream, LagrangeData};
use crate::points::{canonical_rep, enumerate_points, Point};
use crate::polyseries::{
    eval_box, map_add, map_from_gauss_poly, map_mul, map_shift, monomials_up_to, poly_length,
    BoundTemplate, CoeffMap, Exp, IntSeries, Poly,
};
use crate::scalar::{half, ComplexBox, GaussQ, LambdaOracle, Rational, Separation, XVal};

/// Largest total excess over the monotonicity floor tried per stage.
pub const EXCESS_CAP: u32 = 8;
/// Largest tail rank `s_n` searched.
pub const S_CAP: u64 = 20_000;
/// Largest height scanned when listing certification points.
pub const BETA_HEIGHT_CAP: u32 = 8;

/// `Π_i {0, α_i, ᾱ_i}` with repeats removed.
pub fn grid_points(alpha: &Point) -> Result<Vec<Point>> {
    if !alpha.in_unit_polydisc() {
        return Err(Error::OutsideDomain(alpha.to_string()));
    }
    let choices: Vec<Vec<GaussQ>> = alpha
        .coords()
        .iter()
        .map(|a| {
            let mut v = vec![GaussQ::zero()];
            if !a.is_zero() {
                v.push(a.clone());
                if !a.is_real() {
                    v.push(a.conj());
                }
            }
            v
        })
        .collect();
    let mut out: Vec<Vec<GaussQ>> = vec![Vec::new()];
    for c in &choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(Point).collect())
}

pub fn in_grid(alpha: &Point, z: &Point) -> bool {
    z.coords()
        .iter()
        .zip(alpha.coords())
        .all(|(x, a)| x.is_zero() || x == a || *x == a.conj())
}

/// One-variable series vanishing at `a` and `ā`, with its value certified
/// nonzero at every excluded point.
///
/// For `a ≠ 0` this is the interpolant `0 ↦ 1, a ↦ 0, ā ↦ 0`; an excluded
/// point whose value cannot be separated from zero is added as a node with
/// value 1 and the interpolant rebuilt. For `a = 0` it is the monomial `z`.
pub fn univariate_gadget(a: &GaussQ, excluded: &[GaussQ], degree: u32) -> Result<IntSeries> {
    let ac = a.conj();
    if let Some(x) = excluded.iter().find(|x| *x == a || **x == ac) {
        return Err(Error::ExcludedContainsTarget(x.to_string()));
    }
    let pt = |x: &GaussQ| Point::new(vec![x.clone()]);
    if a.is_zero() {
        let l = LagrangeData {
            p: Poly::from_terms(1, [(Exp(vec![1]), XVal::from(GaussQ::one()))]),
            q: Poly::constant(1, GaussQ::one()),
            qprime_values: Vec::new(),
        };
        return rounding_stream(&l, degree, None);
    }
    let mut nodes = vec![(pt(a), XVal::zero())];
    if !a.is_real() {
        nodes.push((pt(&ac), XVal::zero()));
    }
    let oracle = LambdaOracle::new(crate::scalar::DEFAULT_LAMBDA_LEVEL)?;
    for _ in 0..=excluded.len() {
        let f = interpolate(1, nodes.clone(), degree, Some(BigInt::one()))?;
        let mut weak = None;
        for x in excluded {
            let z = pt(x);
            if nodes.iter().any(|(n, _)| n == &z) {
                continue;
            }
            if eval_box(&f, &z, &oracle)?.nonzero_lower_bound() == Separation::NotSeparated {
                weak = Some(x.clone());
                break;
            }
        }
        let Some(x) = weak else {
            return Ok(f);
        };
        nodes.push((pt(&x), XVal::from(GaussQ::one())));
        if !x.is_real() {
            nodes.push((pt(&x.conj()), XVal::from(GaussQ::one())));
        }
    }
    Err(Error::SearchCapExceeded(a.to_string()))
}

/// One stage of the exponent selection.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub beta: Point,
    /// `(t_{1,n}, …, t_{m,n})`.
    pub t: Vec<u32>,
    pub b_box: ComplexBox,
    /// Lower bound on `|B_n|`.
    pub lower: Rational,
    /// Upper bound `b_n` on `max_i |b_{i,n}|`.
    pub b_upper: Rational,
    /// Upper bound on `|A(β_n)|`.
    pub q_upper: Rational,
    pub s: u64,
    /// `m·Ĉ·|A(β_n)|·b_n^{s_n}/(1 − b_n)^4`, below `lower/2`.
    pub tail: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ledger {
    /// Coefficient bounds of the one-variable gadgets.
    pub ci: Vec<Rational>,
    pub chat: Rational,
    /// Template constant of the base interpolant.
    pub ctilde: Rational,
    pub c: Rational,
    pub e: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetBundle {
    pub alpha: Point,
    pub degree: u32,
    pub base: IntSeries,
    pub gadgets: Vec<IntSeries>,
    pub annihilator: Option<Poly<GaussQ>>,
    pub pinned: Vec<Point>,
    pub stages: Vec<StageRecord>,
    pub ledger: Ledger,
    pub series: IntSeries,
}

impl GadgetBundle {
    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    /// `t_{i,1}, …, t_{i,N}` for each coordinate `i`.
    pub fn schedule(&self) -> Vec<Vec<u32>> {
        (0..self.dim())
            .map(|i| self.stages.iter().map(|s| s.t[i]).collect())
            .collect()
    }

    /// Exact value on the grid and at points where the correction terms are
    /// annihilated, whenever the base interpolant knows it exactly there.
    pub fn exact_value(&self, z: &Point) -> Result<Option<XVal>> {
        let killed = self.stages.is_empty()
            || in_grid(&self.alpha, z)
            || match &self.annihilator {
                Some(a) => a.eval(z)?.is_zero(),
                None => false,
            };
        if !killed {
            return Ok(None);
        }
        self.base.exact_value_at(z)
    }
}

/// Everything `build_gadget` needs beyond the target.
#[derive(Clone, Debug)]
pub struct GadgetSpec {
    pub alpha: Point,
    /// Points where the gadget must equal exactly 1 (conjugate-closed).
    pub pinned: Vec<Point>,
    /// Integer polynomial vanishing on `pinned`, multiplied into the
    /// correction terms.
    pub annihilator: Option<Poly<GaussQ>>,
    pub betas: Vec<Point>,
    pub degree: u32,
}

fn map_of(f: &IntSeries) -> &CoeffMap {
    &f.coeffs
}

fn embed(h: &IntSeries, m: usize, i: usize) -> CoeffMap {
    h.coeffs
        .iter()
        .map(|(e, c)| (Exp::unit(m, i, e.0[0]), c.clone()))
        .collect()
}

fn coordinate_box(h: &IntSeries, x: &GaussQ, oracle: &LambdaOracle) -> Result<ComplexBox> {
    eval_box(h, &Point::new(vec![x.clone()]), oracle)
}

/// Box of `B_n = g(β) + A(β)·Σ_i Σ_{j≤n} h_i(b_i)·b_i^{t_{i,j}}` for the
/// exponent tuples `ts` (one per stage up to `n`).
pub fn stage_box(
    base: &IntSeries,
    gadgets: &[IntSeries],
    annihilator: Option<&Poly<GaussQ>>,
    beta: &Point,
    ts: &[Vec<u32>],
    oracle: &LambdaOracle,
) -> Result<ComplexBox> {
    let parts = StageParts::new(base, gadgets, annihilator, beta, oracle)?;
    Ok(parts.total(&parts.fixed(&ts[..ts.len() - 1]), &ts[ts.len() - 1]))
}

struct StageParts {
    gbox: ComplexBox,
    hboxes: Vec<Option<ComplexBox>>,
    coords: Vec<GaussQ>,
    qval: GaussQ,
}

impl StageParts {
    fn new(
        base: &IntSeries,
        gadgets: &[IntSeries],
        annihilator: Option<&Poly<GaussQ>>,
        beta: &Point,
        oracle: &LambdaOracle,
    ) -> Result<Self> {
        let gbox = eval_box(base, beta, oracle)?;
        let mut hboxes = Vec::with_capacity(gadgets.len());
        for (h, b) in gadgets.iter().zip(beta.coords()) {
            hboxes.push(if b.is_zero() {
                None
            } else {
                Some(coordinate_box(h, b, oracle)?)
            });
        }
        let qval = match annihilator {
            Some(a) => a.eval(beta)?,
            None => GaussQ::one(),
        };
        Ok(Self {
            gbox,
            hboxes,
            coords: beta.coords().to_vec(),
            qval,
        })
    }

    fn term(&self, t: &[u32]) -> ComplexBox {
        let mut acc = ComplexBox::zero();
        for (i, hb) in self.hboxes.iter().enumerate() {
            if let Some(hb) = hb {
                acc = acc.add(&hb.mul_point(&self.coords[i].pow(t[i] as u64)));
            }
        }
        acc
    }

    fn fixed(&self, earlier: &[Vec<u32>]) -> ComplexBox {
        earlier
            .iter()
            .fold(ComplexBox::zero(), |acc, t| acc.add(&self.term(t)))
    }

    fn total(&self, fixed: &ComplexBox, t: &[u32]) -> ComplexBox {
        self.gbox
            .add(&fixed.add(&self.term(t)).mul_point(&self.qval))
    }
}

/// Least `s ≥ 1` with `factor · b^s < target`, if below the cap.
pub fn minimal_rank(factor: &Rational, b: &Rational, target: &Rational) -> Option<u64> {
    let mut pw = b.clone();
    for s in 1..=S_CAP {
        if factor * &pw < *target {
            return Some(s);
        }
        pw *= b;
    }
    None
}

/// `m·Ĉ·|A(β)|/(1 − b)^4`.
pub fn rank_factor(m: usize, chat: &Rational, q_upper: &Rational, b: &Rational) -> Rational {
    let one = Rational::one();
    let d = num_traits::pow(&one - b, 4);
    Rational::from_integer(BigInt::from(m)) * chat * q_upper / d
}

pub fn point_max_modulus(beta: &Point) -> Rational {
    beta.norm_upper()
}

pub fn select_exponents(
    base: &IntSeries,
    gadgets: &[IntSeries],
    annihilator: Option<&Poly<GaussQ>>,
    betas: &[Point],
    oracle: &LambdaOracle,
) -> Result<Vec<StageRecord>> {
    let m = base.m;
    let chat = gadgets
        .iter()
        .map(|h| h.coeff_bound.clone())
        .max()
        .unwrap_or_else(Rational::one);
    let excess = monomials_up_to(m, EXCESS_CAP);
    let mut records: Vec<StageRecord> = Vec::with_capacity(betas.len());
    for (n, beta) in betas.iter().enumerate() {
        let stage = n + 1;
        let floor: Vec<u32> = match records.last() {
            None => vec![1; m],
            Some(prev) => {
                let s = u32::try_from(prev.s).map_err(|_| Error::StageExhausted {
                    stage,
                    reason: "tail rank too large".into(),
                })?;
                prev.t.iter().map(|&t| (t + 1).max(s)).collect()
            }
        };
        let parts = StageParts::new(base, gadgets, annihilator, beta, oracle)?;
        let earlier: Vec<Vec<u32>> = records.iter().map(|r| r.t.clone()).collect();
        let fixed = parts.fixed(&earlier);
        let mut found = None;
        for e in &excess {
            let t: Vec<u32> = floor.iter().zip(&e.0).map(|(a, b)| a + b).collect();
            let bx = parts.total(&fixed, &t);
            if let Separation::Separated(lo) = bx.nonzero_lower_bound() {
                found = Some((t, bx, lo));
                break;
            }
        }
        let Some((t, b_box, lower)) = found else {
            return Err(Error::StageExhausted {
                stage,
                reason: format!("B box at {beta} not separated from 0"),
            });
        };
        let b_upper = point_max_modulus(beta);
        if b_upper >= Rational::one() || b_upper.is_zero() {
            return Err(Error::StageExhausted {
                stage,
                reason: format!("modulus bound {b_upper} for {beta}"),
            });
        }
        let q_upper = parts.qval.modulus_upper();
        let factor = rank_factor(m, &chat, &q_upper, &b_upper);
        let target = &lower * half();
        let s = minimal_rank(&factor, &b_upper, &target).ok_or_else(|| Error::StageExhausted {
            stage,
            reason: "tail rank cap reached".into(),
        })?;
        let tail = &factor * num_traits::pow(b_upper.clone(), s as usize);
        records.push(StageRecord {
            beta: beta.clone(),
            t,
            b_box,
            lower,
            b_upper,
            q_upper,
            s,
            tail,
        });
    }
    Ok(records)
}

/// The first `n` enumeration representatives outside the grid of `alpha`.
pub fn standalone_betas(alpha: &Point, n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = alpha.dim();
    let ones = vec![Rational::one(); m];
    for h in 2..=BETA_HEIGHT_CAP {
        let e = enumerate_points(m, &ones, h)?;
        let picked: Vec<Point> = e
            .reps
            .iter()
            .filter(|p| !in_grid(alpha, p))
            .take(n)
            .cloned()
            .collect();
        if picked.len() == n {
            return Ok(picked);
        }
    }
    Err(Error::StageExhausted {
        stage: n,
        reason: "not enough enumerated points".into(),
    })
}

/// Distinct canonical coordinate values of the certification points that
/// a one-variable gadget must not vanish at.
fn excluded_coordinates(alpha_i: &GaussQ, betas: &[Point], i: usize) -> Vec<GaussQ> {
    let mut out: Vec<GaussQ> = Vec::new();
    for b in betas {
        let x = &b.coords()[i];
        if x.is_zero() || x == alpha_i || *x == alpha_i.conj() {
            continue;
        }
        let rep = canonical_rep(&Point::new(vec![x.clone()])).0.remove(0);
        if !out.contains(&rep) {
            out.push(rep);
        }
    }
    out
}

pub fn build_gadget(spec: &GadgetSpec) -> Result<GadgetBundle> {
    let alpha = &spec.alpha;
    let m = alpha.dim();
    let d = spec.degree;
    let grid = grid_points(alpha)?;
    let target_pair = [alpha.clone(), alpha.conj()];
    let mut nodes: Vec<(Point, XVal)> = Vec::new();
    for z in grid.iter().filter(|z| !z.is_origin()) {
        let v = if target_pair.contains(z) {
            XVal::zero()
        } else {
            XVal::from(GaussQ::one())
        };
        nodes.push((z.clone(), v));
    }
    for z in &spec.pinned {
        if z.is_origin() || in_grid(alpha, z) {
            continue;
        }
        if !nodes.iter().any(|(n, _)| n == z) {
            nodes.push((z.clone(), XVal::from(GaussQ::one())));
        }
    }
    let constant = if alpha.is_origin() {
        BigInt::zero()
    } else {
        BigInt::one()
    };
    let base = interpolate(m, nodes, d, Some(constant))?;
    let mut gadgets = Vec::with_capacity(m);
    for (i, a) in alpha.coords().iter().enumerate() {
        gadgets.push(univariate_gadget(
            a,
            &excluded_coordinates(a, &spec.betas, i),
            d,
        )?);
    }
    let oracle = LambdaOracle::new(crate::scalar::DEFAULT_LAMBDA_LEVEL)?;
    let stages = select_exponents(
        &base,
        &gadgets,
        spec.annihilator.as_ref(),
        &spec.betas,
        &oracle,
    )?;
    let ledger = gadget_ledger(&base, &gadgets, spec.annihilator.as_ref())?;
    let series = gadget_series(&base, &gadgets, spec.annihilator.as_ref(), &stages, &ledger)?;
    Ok(GadgetBundle {
        alpha: alpha.clone(),
        degree: d,
        base,
        gadgets,
        annihilator: spec.annihilator.clone(),
        pinned: spec.pinned.clone(),
        stages,
        ledger,
        series,
    })
}

/// `C_i`, `Ĉ = max C_i`, `C̃`, and `C = C̃ + m·Ĉ·L(A)`.
pub fn gadget_ledger(
    base: &IntSeries,
    gadgets: &[IntSeries],
    annihilator: Option<&Poly<GaussQ>>,
) -> Result<Ledger> {
    let m = base.m;
    let ci: Vec<Rational> = gadgets.iter().map(|h| h.coeff_bound.clone()).collect();
    let chat = ci.iter().max().cloned().unwrap_or_else(Rational::one);
    let ctilde = base.template.c.clone();
    let la = annihilator_length(annihilator)?;
    let c = &ctilde + Rational::from_integer(BigInt::from(m)) * &chat * la;
    Ok(Ledger {
        ci,
        chat,
        ctilde,
        c,
        e: (m as u32).max(4),
    })
}

pub fn annihilator_length(annihilator: Option<&Poly<GaussQ>>) -> Result<Rational> {
    match annihilator {
        Some(a) => poly_length(a),
        None => Ok(Rational::one()),
    }
}

/// The truncated gadget and its coefficient bound
/// `M_g + L(A)·N·m·Ĉ`.
pub fn gadget_series(
    base: &IntSeries,
    gadgets: &[IntSeries],
    annihilator: Option<&Poly<GaussQ>>,
    stages: &[StageRecord],
    ledger: &Ledger,
) -> Result<IntSeries> {
    let m = base.m;
    let d = base.degree;
    let template = BoundTemplate {
        c: ledger.c.clone(),
        e: ledger.e,
    };
    if stages.is_empty() {
        let mut s = base.clone();
        s.template = template;
        return Ok(s);
    }
    let mut corr = CoeffMap::new();
    for (i, h) in gadgets.iter().enumerate() {
        let emb = embed(h, m, i);
        for st in stages {
            let t = st.t[i];
            if t <= d {
                corr = map_add(&corr, &map_shift(&emb, &Exp::unit(m, i, t), d));
            }
        }
    }
    if let Some(a) = annihilator {
        let am = map_from_gauss_poly(a).ok_or(Error::NonRationalCoefficient)?;
        corr = map_mul(&corr, &am, d);
    }
    let coeffs: BTreeMap<Exp, BigInt> = map_add(map_of(base), &corr);
    let la = annihilator_length(annihilator)?;
    let n = Rational::from_integer(BigInt::from(stages.len() * m));
    let bound = &base.coeff_bound + la * n * &ledger.chat;
    Ok(IntSeries {
        m,
        degree: d,
        coeffs,
        coeff_bound: bound,
        template,
        decomposition: None,
        rho: None,
        majorants: Vec::new(),
    })
}

/// Standalone gadget for `alpha`, certified at the first `n` enumerated
/// points outside its grid.
pub fn build_vanishing(alpha: &Point, n: usize, degree: u32) -> Result<GadgetBundle> {
    let betas = standalone_betas(alpha, n)?;
    build_gadget(&GadgetSpec {
        alpha: alpha.clone(),
        pinned: Vec::new(),
        annihilator: None,
        betas,
        degree,
    })
}

/// Lower bounds on every `|B_n|` recomputed with the constituents
/// regenerated to `degree`.
pub fn replay_stages(
    bundle: &GadgetBundle,
    degree: u32,
    oracle: &LambdaOracle,
) -> Result<Vec<Rational>> {
    let base = extend_interpolant(&bundle.base, degree)?;
    let gadgets = bundle
        .gadgets
        .iter()
        .map(|h| extend_interpolant(h, degree))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(bundle.stages.len());
    let ts: Vec<Vec<u32>> = bundle.stages.iter().map(|s| s.t.clone()).collect();
    for (n, st) in bundle.stages.iter().enumerate() {
        let bx = stage_box(
            &base,
            &gadgets,
            bundle.annihilator.as_ref(),
            &st.beta,
            &ts[..=n],
            oracle,
        )?;
        match bx.nonzero_lower_bound() {
            Separation::Separated(lo) => out.push(lo),
            Separation::NotSeparated => {
                return Err(Error::StageExhausted {
                    stage: n + 1,
                    reason: "replay lost separation".into(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn g(s: &str) -> GaussQ {
        s.parse().unwrap()
    }

    fn coeffs_1d(f: &IntSeries) -> Vec<i64> {
        (0..=f.degree)
            .map(|k| i64::try_from(f.coeff(&Exp(vec![k]))).unwrap())
            .collect()
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_points(&p("(1/2,1/2*i)")).unwrap().len(), 6);
        assert_eq!(grid_points(&p("(0,0,0)")).unwrap(), vec![p("(0,0,0)")]);
        assert_eq!(
            grid_points(&p("(1/2)")).unwrap(),
            vec![p("(0)"), p("(1/2)")]
        );
        assert!(grid_points(&p("(1)")).is_err());
    }

    #[test]
    fn univariate_examples() {
        let z = univariate_gadget(&GaussQ::zero(), &[g("1/2")], 6).unwrap();
        assert_eq!(coeffs_1d(&z), vec![0, 1, 0, 0, 0, 0, 0]);
        assert!(z.is_exact_polynomial());

        let h = univariate_gadget(&g("1/2"), &[], 6).unwrap();
        assert_eq!(coeffs_1d(&h), vec![1, -2, 0, 0, 0, 0, 0]);

        let h2 = univariate_gadget(&g("1/2"), &[g("1/3")], 6).unwrap();
        assert_eq!(h2, h);
        let oracle = LambdaOracle::new(3).unwrap();
        let bx = eval_box(&h2, &p("(1/3)"), &oracle).unwrap();
        assert_eq!(bx, ComplexBox::point(&g("1/3")));

        assert!(matches!(
            univariate_gadget(&g("1/2*i"), &[g("-1/2*i")], 4),
            Err(Error::ExcludedContainsTarget(_))
        ));
    }

    #[test]
    fn toy_stage() {
        let base = univariate_gadget(&g("1/2"), &[], 8).unwrap();
        let h = univariate_gadget(&g("1/2"), &[g("1/3")], 8).unwrap();
        let oracle = LambdaOracle::new(3).unwrap();
        let recs = select_exponents(&base, &[h], None, &[p("(1/3)")], &oracle).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].t, vec![1]);
        assert_eq!(recs[0].b_box, ComplexBox::point(&g("4/9")));
        assert_eq!(recs[0].lower, rat(4, 9));
        assert_eq!(recs[0].s, 4);
        assert!(recs[0].tail < rat(2, 9));
        assert!(select_exponents(&base, &[], None, &[], &oracle)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn standalone_examples() {
        let b = build_vanishing(&p("(1/2)"), 0, 6).unwrap();
        assert_eq!(coeffs_1d(&b.series), vec![1, -2, 0, 0, 0, 0, 0]);
        assert_eq!(b.ledger.chat, int(2));

        let b = build_vanishing(&p("(0,0)"), 0, 6).unwrap();
        assert!(b.series.coeff(&Exp::zero(2)).is_zero());

        let alpha = p("(1/2,1/2*i)");
        let b = build_vanishing(&alpha, 3, 16).unwrap();
        for z in grid_points(&alpha).unwrap() {
            let v = b.exact_value(&z).unwrap().unwrap();
            let expect = if z == alpha || z == alpha.conj() {
                XVal::zero()
            } else {
                XVal::from(GaussQ::one())
            };
            assert_eq!(v, expect);
        }
        for (i, ts) in b.schedule().iter().enumerate() {
            for j in 1..ts.len() {
                assert!(
                    ts[j] >= (ts[j - 1] + 1).max(b.stages[j - 1].s as u32),
                    "coordinate {i}"
                );
            }
        }
        for st in &b.stages {
            assert!(st.tail < &st.lower * half());
        }
    }
}
