//! Construction formulas restated from scratch for the verifier. Only the
//! scalar, point and series layers are used; nothing here calls into the
//! builder.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::assembler::{LedgerEntry, MainBundle, Problem, Steering, THETA_CAP};
use crate::certificate::{Certificate, Entry, Kind, Operand};
use crate::points::{enumerate_points, Point};
use crate::polyseries::{
    eval_box, map_add, map_from_gauss_poly, map_mul, map_shift, poly_length, BoundTemplate,
    CoeffMap, Exp, IntSeries, Majorant, Poly,
};
use crate::scalar::{
    ceil_int, fmt_rational, half, rat, ComplexBox, GaussQ, LambdaOracle, Rational, XVal,
    DEFAULT_LAMBDA_LEVEL, MAX_LAMBDA_LEVEL,
};
use crate::vanishing::{GadgetBundle, Ledger, StageRecord};

pub fn radii() -> [Rational; 3] {
    [rat(1, 4), rat(1, 2), rat(3, 4)]
}

pub fn problem_ok(p: &Problem) -> bool {
    p.m > 0
        && p.rho.len() == p.m
        && p.rho
            .iter()
            .all(|r| r.is_positive() && *r <= Rational::one() && r.recip().is_integer())
        && p.s.contains(&0)
        && p.s.iter().all(|&i| i <= p.stage)
}

pub fn nodes(reps: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for r in reps {
        if r.is_origin() {
            continue;
        }
        out.push(r.clone());
        let c = r.conj();
        if c != *r {
            out.push(c);
        }
    }
    out
}

pub fn target(k: usize, s: &[usize], seed: u64) -> XVal {
    if k == 0 {
        XVal::zero()
    } else if s.contains(&k) {
        XVal::from(GaussQ::real(Rational::from_integer(BigInt::from(
            k as u64 + seed,
        ))))
    } else {
        XVal::lambda_multiple(GaussQ::real(Rational::new(
            BigInt::one(),
            BigInt::from(seed + 1),
        )))
    }
}

pub fn on_grid(alpha: &Point, z: &Point) -> bool {
    alpha
        .coords()
        .iter()
        .zip(z.coords())
        .all(|(a, x)| x.is_zero() || x == a || *x == a.conj())
}

pub fn grid(alpha: &Point) -> Vec<Point> {
    let mut out = vec![Vec::new()];
    for a in alpha.coords() {
        let mut vals = vec![GaussQ::zero()];
        if !a.is_zero() {
            vals.push(a.clone());
        }
        if !a.is_real() {
            vals.push(a.conj());
        }
        out = out
            .iter()
            .flat_map(|p: &Vec<GaussQ>| {
                vals.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(Point::new).collect()
}

/// `a` is the primitive integer multiple of `q` with positive scale.
pub fn is_primitive_multiple(a: &Poly<GaussQ>, q: &Poly<GaussQ>) -> bool {
    let at = a.terms();
    let qt = q.terms();
    if at.len() != qt.len() || at.is_empty() {
        return false;
    }
    let integral = at.values().all(|c| c.im.is_zero() && c.re.is_integer());
    if !integral {
        return false;
    }
    let content = at.values().fold(BigInt::zero(), |g, c| g.gcd(c.re.numer()));
    let (e0, q0) = qt.iter().next().expect("nonempty");
    if q0.is_zero() || !q0.im.is_zero() {
        return false;
    }
    let Some(a0) = at.get(e0) else {
        return false;
    };
    let scale = &a0.re / &q0.re;
    scale.is_positive()
        && content.is_one()
        && qt.iter().all(|(e, c)| at.get(e) == Some(&c.scale(&scale)))
}

/// Enumerated points outside the nodes and the grid of `alpha`, scanned
/// from the problem height up to four levels further.
pub fn later_points(
    p: &Problem,
    alpha: &Point,
    nodes: &[Point],
    count: usize,
) -> Option<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for h in p.height.max(2)..=p.height + 4 {
        if out.len() == count {
            break;
        }
        let e = enumerate_points(p.m, &p.rho, h).ok()?;
        for z in &e.reps {
            if out.len() == count {
                break;
            }
            if !z.is_origin() && !nodes.contains(z) && !out.contains(z) && !on_grid(alpha, z) {
                out.push(z.clone());
            }
        }
    }
    (out.len() == count).then_some(out)
}

fn length(a: Option<&Poly<GaussQ>>) -> Option<Rational> {
    match a {
        Some(a) => poly_length(a).ok(),
        None => Some(Rational::one()),
    }
}

pub fn gadget_ledger(g: &GadgetBundle) -> Option<Ledger> {
    let m = g.dim();
    let ci: Vec<Rational> = g.gadgets.iter().map(|h| h.coeff_bound.clone()).collect();
    let chat = ci.iter().max().cloned().unwrap_or_else(Rational::one);
    let ctilde = g.base.template.c.clone();
    let c =
        &ctilde + Rational::from_integer(BigInt::from(m)) * &chat * length(g.annihilator.as_ref())?;
    Some(Ledger {
        ci,
        chat,
        ctilde,
        c,
        e: 4.max(m as u32),
    })
}

/// `g(β) + A(β)·(Σ_{j<n} T_j + T_n)` with `T_j = Σ_i h_i(β_i)·β_i^{t_{i,j}}`.
pub fn stage_box(g: &GadgetBundle, n: usize, oracle: &LambdaOracle) -> Option<ComplexBox> {
    let beta = &g.stages[n].beta;
    let coords = beta.coords();
    let mut h = Vec::new();
    for (hi, b) in g.gadgets.iter().zip(coords) {
        h.push(if b.is_zero() {
            None
        } else {
            Some(eval_box(hi, &Point::new(vec![b.clone()]), oracle).ok()?)
        });
    }
    let term = |t: &[u32]| {
        h.iter()
            .enumerate()
            .filter_map(|(i, hb)| {
                hb.as_ref()
                    .map(|hb| hb.mul_point(&coords[i].pow(t[i] as u64)))
            })
            .fold(ComplexBox::zero(), |acc, x| acc.add(&x))
    };
    let fixed = g.stages[..n]
        .iter()
        .fold(ComplexBox::zero(), |acc, st| acc.add(&term(&st.t)));
    let a = match &g.annihilator {
        Some(a) => a.eval(beta).ok()?,
        None => GaussQ::one(),
    };
    let gb = eval_box(&g.base, beta, oracle).ok()?;
    Some(gb.add(&fixed.add(&term(&g.stages[n].t)).mul_point(&a)))
}

/// `m·Ĉ·q/(1 − b)^4`.
pub fn tail_factor(m: usize, chat: &Rational, q: &Rational, b: &Rational) -> Rational {
    let w = Rational::one() - b;
    Rational::from_integer(BigInt::from(m)) * chat * q / (&w * &w * &w * &w)
}

/// `s` is the least positive exponent with `factor·b^s < target`.
pub fn least_rank(factor: &Rational, b: &Rational, target: &Rational, s: u64) -> bool {
    if s == 0 {
        return false;
    }
    let below = |e: u64| factor * num_traits::pow(b.clone(), e as usize) < *target;
    below(s) && (s == 1 || !below(s - 1))
}

pub fn gadget_series(g: &GadgetBundle, l: &Ledger) -> Option<IntSeries> {
    let m = g.dim();
    let d = g.degree;
    let template = BoundTemplate {
        c: l.c.clone(),
        e: l.e,
    };
    if g.stages.is_empty() {
        return Some(IntSeries {
            template,
            ..g.base.clone()
        });
    }
    let mut corr = CoeffMap::new();
    for st in &g.stages {
        for (i, h) in g.gadgets.iter().enumerate() {
            if st.t[i] > d {
                continue;
            }
            let lifted: CoeffMap = h
                .coeffs
                .iter()
                .map(|(e, c)| (Exp::unit(m, i, e.0[0] + st.t[i]), c.clone()))
                .filter(|(e, _)| e.degree() <= d as u64)
                .collect();
            corr = map_add(&corr, &lifted);
        }
    }
    if let Some(a) = &g.annihilator {
        corr = map_mul(&corr, &map_from_gauss_poly(a)?, d);
    }
    let la = length(g.annihilator.as_ref())?;
    let count = Rational::from_integer(BigInt::from(g.stages.len() * m));
    Some(IntSeries {
        m,
        degree: d,
        coeffs: map_add(&g.base.coeffs, &corr),
        coeff_bound: &g.base.coeff_bound + la * count * &l.chat,
        template,
        decomposition: None,
        rho: None,
        majorants: Vec::new(),
    })
}

pub fn main_ledger(gadgets: &[GadgetBundle], steering: &[Steering]) -> Vec<LedgerEntry> {
    steering
        .iter()
        .map(|st| {
            let k = st.k;
            let c_paper = gadgets[1..k]
                .iter()
                .fold(st.series.template.c.clone(), |c, g| c * &g.ledger.c);
            let e = st.series.template.e + gadgets[..k].iter().map(|g| g.ledger.e).sum::<u32>();
            LedgerEntry {
                k,
                c_full: &c_paper * &gadgets[0].ledger.c,
                c_paper,
                e,
            }
        })
        .collect()
}

pub fn theta(l: &LedgerEntry, alpha: &Point, seed: u64) -> Option<Exp> {
    let i = alpha.coords().iter().position(|c| !c.is_zero())?;
    let size = ceil_int(&l.c_full) + BigInt::from(seed) + BigInt::from(l.k) * BigInt::from(l.e);
    let size = u64::try_from(&size).ok().filter(|&s| s <= THETA_CAP)?;
    Some(Exp::unit(alpha.dim(), i, size as u32))
}

pub fn main_series(b: &MainBundle) -> IntSeries {
    let d = b.problem.degree;
    let m = b.problem.m;
    let mut coeffs = b.radius.coeffs.clone();
    let mut majorants = Vec::new();
    let mut c = b.radius.template.c.clone();
    let mut e = b.radius.template.e;
    for (st, l) in b.steering.iter().zip(&b.ledger) {
        let fs = &b.gadgets[..st.k];
        let shift = st.theta.degree();
        if shift <= d as u64 {
            let term = fs
                .iter()
                .fold(map_shift(&st.series.coeffs, &st.theta, d), |t, g| {
                    map_mul(&t, &g.series.coeffs, d)
                });
            coeffs = map_add(&coeffs, &term);
        }
        majorants.push(Majorant {
            coeff: fs.iter().fold(st.series.coeff_bound.clone(), |c, g| {
                c * &g.series.coeff_bound
            }),
            shift,
            power: (m * (st.k + 1)) as u64,
        });
        c += &l.c_full;
        e = e.max(l.e);
    }
    let max = coeffs.values().map(BigInt::abs).max().unwrap_or_default();
    IntSeries {
        m,
        degree: d,
        coeffs,
        coeff_bound: Rational::from_integer(max),
        template: BoundTemplate { c, e },
        decomposition: None,
        rho: b.radius.rho.clone(),
        majorants,
    }
}

fn gadget_value(g: &GadgetBundle, z: &Point) -> Option<XVal> {
    let killed = g.stages.is_empty()
        || on_grid(&g.alpha, z)
        || g.annihilator
            .as_ref()
            .is_some_and(|a| a.eval(z).is_ok_and(|v| v.is_zero()));
    if killed {
        g.base.exact_value_at(z).ok()?
    } else {
        None
    }
}

/// `f(α) = Σ_i w_i/(1 − w_i) + Σ_k α^{θ_k}·h_k(α)·Π_{j<k} f_j(α)`, `w = α/ρ`.
pub fn node_values(b: &MainBundle) -> Option<Vec<XVal>> {
    let mut out = Vec::new();
    for a in &b.reps {
        let mut v = GaussQ::zero();
        for (x, r) in a.coords().iter().zip(&b.problem.rho) {
            let w = x.scale(&r.recip());
            v = &v + &w.checked_div(&(&GaussQ::one() - &w))?;
        }
        let mut v = XVal::from(v);
        for st in &b.steering {
            let hv = st.series.exact_value_at(a).ok()??;
            if hv.is_zero() {
                continue;
            }
            let mut prod = a.monomial(&st.theta.0);
            for g in &b.gadgets[..st.k] {
                let fv = gadget_value(g, a)?;
                if !fv.lam.is_zero() || fv.base.is_zero() {
                    return None;
                }
                prod = &prod * &fv.base;
            }
            v = &v + &hv.scale(&prod);
        }
        out.push(v);
    }
    Some(out)
}

/// Coefficient bound of an interpolant: the largest coefficient when the
/// series is a polynomial, else `⌈max|p|⌉ + ⌈L(q)·G⌉`.
pub fn interpolant_bound(f: &IntSeries) -> Option<Rational> {
    let dec = f.decomposition.as_ref()?;
    let d = f.degree as u64;
    let dq = dec.q.degree();
    let polynomial = dec.p.degree() <= d
        && dq <= d
        && dec
            .remainder
            .iter()
            .all(|(e, v)| v.is_zero() || e.degree() + dq <= d);
    if polynomial {
        let max = f.coeffs.values().map(BigInt::abs).max().unwrap_or_default();
        return Some(Rational::from_integer(max));
    }
    let mut amax = Rational::zero();
    for c in dec.p.terms().values() {
        if !c.is_real() {
            return None;
        }
        amax = amax.max(c.real_abs_upper());
    }
    let lq = poly_length(&dec.q).ok()?;
    Some(Rational::from_integer(
        ceil_int(&amax) + ceil_int(&(lq * &dec.g_bound)),
    ))
}

/// `|v| ≤ 1/2` for real `v`, refining λ until the comparison is decided.
pub fn within_half(v: &XVal) -> bool {
    let h = half();
    if v.lam.is_zero() {
        return v.base.re.abs() <= h;
    }
    for level in DEFAULT_LAMBDA_LEVEL..=MAX_LAMBDA_LEVEL {
        let Ok(o) = LambdaOracle::new(level) else {
            return false;
        };
        let (lo, hi) = o.real_interval(&v.base.re, &v.lam.re);
        if -h.clone() <= lo && hi <= h {
            return true;
        }
        if hi < -h.clone() || lo > h {
            return false;
        }
    }
    false
}

/// `r ≥ 1/Σ_{n≤40} X^n/n!` with `X = 1000/(2719·u)`: then
/// `|log r| ≤ X`, and `u ≤ 1/(e·|log r|)` follows from `e < 2719/1000`.
pub fn log_factor_valid(r: &Rational, u: &Rational) -> bool {
    if !u.is_positive() || !r.is_positive() || *r >= Rational::one() {
        return false;
    }
    let x = rat(1000, 2719) / u;
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for n in 1..=40u32 {
        term = term * &x / Rational::from_integer(BigInt::from(n));
        sum += &term;
    }
    r * sum >= Rational::one()
}

fn push(c: &mut Certificate, name: String, kind: Kind, lhs: Operand, rhs: Operand) {
    c.entries.push(Entry::new(name, kind, lhs, rhs));
}

fn q(v: &Rational) -> Operand {
    Operand::Rat(v.clone())
}

fn n(v: impl Into<BigInt>) -> Operand {
    Operand::Rat(Rational::from_integer(v.into()))
}

fn pow(c: &Rational, r: &Rational, e: u64) -> Operand {
    Operand::Pow {
        c: c.clone(),
        r: r.clone(),
        e,
    }
}

pub fn gadget_entries(c: &mut Certificate, prefix: &str, g: &GadgetBundle) {
    let m = g.dim();
    let mut prev: Option<&StageRecord> = None;
    for (idx, st) in g.stages.iter().enumerate() {
        let p = format!("{prefix}.stage{}", idx + 1);
        push(
            c,
            format!("{p}.separation"),
            Kind::Sep,
            Operand::Box(st.b_box.clone()),
            q(&st.lower),
        );
        let f = tail_factor(m, &g.ledger.chat, &st.q_upper, &st.b_upper);
        let goal = &st.lower / Rational::from_integer(BigInt::from(2));
        push(
            c,
            format!("{p}.rank"),
            Kind::Lt,
            pow(&f, &st.b_upper, st.s),
            q(&goal),
        );
        if st.s >= 2 {
            push(
                c,
                format!("{p}.rank_minimal"),
                Kind::Ge,
                pow(&f, &st.b_upper, st.s - 1),
                q(&goal),
            );
        }
        for i in 0..m {
            let floor = prev.map_or(1, |pv| pv.s.max(pv.t[i] as u64 + 1));
            push(
                c,
                format!("{p}.floor{}", i + 1),
                Kind::Ge,
                n(st.t[i]),
                n(floor),
            );
        }
        prev = Some(st);
    }
    let e = n(g.ledger.e);
    push(
        c,
        format!("{prefix}.exponent.dimension"),
        Kind::Ge,
        e.clone(),
        n(m as u64),
    );
    push(c, format!("{prefix}.exponent.stated"), Kind::Ge, e, n(4));
}

/// Parameters of the convergence chain at one radius, as stated by the
/// certificate under review.
pub struct ChainParams {
    pub u: Rational,
    pub threshold: u64,
}

pub fn chain_params(cert: &Certificate, tag: &str) -> Option<ChainParams> {
    let find = |name: String| cert.entries.iter().find(|e| e.name == name);
    let u = match &find(format!("conv{tag}.k1.dominate"))?.rhs {
        Operand::Rat(u) => u.clone(),
        _ => return None,
    };
    let threshold = match &find(format!("conv{tag}.threshold"))?.lhs {
        Operand::Pow { e, .. } => *e,
        _ => return None,
    };
    Some(ChainParams { u, threshold })
}

pub fn radius_tag(r: &Rational) -> String {
    fmt_rational(r).replace('/', "_")
}

/// Every entry a certificate of `b` must carry, in order. `None` when the
/// chain parameters are missing or invalid.
pub fn certificate(
    b: &MainBundle,
    stated: &Certificate,
    oracle: &LambdaOracle,
) -> Option<Certificate> {
    let mut c = Certificate::default();
    for (j, g) in b.gadgets.iter().enumerate() {
        gadget_entries(&mut c, &format!("gadget{j}"), g);
    }
    for (st, l) in b.steering.iter().zip(&b.ledger) {
        let k = st.k;
        let paper = b.gadgets[1..k]
            .iter()
            .fold(st.series.template.c.clone(), |c, g| c * &g.ledger.c);
        let full = &paper * &b.gadgets[0].ledger.c;
        push(
            &mut c,
            format!("ledger{k}.paper"),
            Kind::Eq,
            q(&paper),
            q(&l.c_paper),
        );
        push(
            &mut c,
            format!("ledger{k}.full"),
            Kind::Eq,
            q(&full),
            q(&l.c_full),
        );
        let size = st.theta.degree();
        let k64 = k as u64;
        push(
            &mut c,
            format!("theta{k}.growth"),
            Kind::Ge,
            n(size),
            n(ceil_int(&l.c_paper) + BigInt::from(4 * k64 * k64 + k64)),
        );
        push(
            &mut c,
            format!("theta{k}.budget"),
            Kind::Ge,
            n(size),
            n(ceil_int(&l.c_full) + BigInt::from(k64 * l.e as u64)),
        );
        for (i, t) in st.theta.0.iter().enumerate() {
            if *t != 0 {
                push(
                    &mut c,
                    format!("theta{k}.support{}", i + 1),
                    Kind::Lt,
                    n(0),
                    q(&st.alpha.coords()[i].abs_squared()),
                );
            }
        }
    }
    if let Some(vals) = &b.nodes {
        for (k, (a, v)) in b.reps.iter().zip(vals).enumerate() {
            let bx = eval_box(&b.series, a, oracle).ok()?;
            push(
                &mut c,
                format!("node{k}.box"),
                Kind::Contains,
                Operand::Box(bx),
                Operand::Box(v.enclose(oracle)),
            );
        }
    }
    if b.ledger.is_empty() {
        return Some(c);
    }
    let one = Rational::one();
    for r in radii() {
        let tag = radius_tag(&r);
        let ChainParams { u, threshold } = chain_params(stated, &tag)?;
        if threshold == 0 || !log_factor_valid(&r, &u) {
            return None;
        }
        let w = (&one - &r).recip();
        let mut total = Rational::zero();
        let mut head = Rational::zero();
        for l in &b.ledger {
            let st = &b.steering[l.k - 1];
            let e = st.theta.degree().saturating_sub(l.k as u64 * l.e as u64);
            push(
                &mut c,
                format!("conv{tag}.k{}.dominate", l.k),
                Kind::Le,
                pow(&l.c_full, &r, e),
                q(&u),
            );
            let x = num_traits::pow(num_traits::pow(r.clone(), l.k) * &w, l.e as usize);
            if (l.k as u64) < threshold {
                head += &x;
            }
            total += &u * x;
        }
        push(
            &mut c,
            format!("conv{tag}.threshold"),
            Kind::Lt,
            pow(&w, &r, threshold),
            q(&half()),
        );
        if threshold >= 2 {
            push(
                &mut c,
                format!("conv{tag}.threshold_minimal"),
                Kind::Ge,
                pow(&w, &r, threshold - 1),
                q(&half()),
            );
        }
        push(
            &mut c,
            format!("conv{tag}.total"),
            Kind::Le,
            q(&total),
            q(&((head + half()) * &u)),
        );
    }
    Some(c)
}
