//! Independent replay of build artifacts.
//!
//! Everything is recomputed from the parsed files: interpolants by
//! re-running their rounding recursion from `(p, q)`, gadget stages by
//! re-boxing every `B_n` (also at a finer λ level), and the main series,
//! node table, classification and certificate from their constituents.
//! The recomputations live in `recompute` and use only scalar, point and
//! series arithmetic.

mod recompute;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::assembler::MainBundle;
use crate::certificate::{certificate_from_str, certificate_to_string, Certificate};
use crate::error::{Error, Result};
use crate::format::{
    bundle_from_str, bundle_to_string, classification_from_str, classification_to_string,
    series_from_str, series_to_string, witnesses_to_string,
};
use crate::points::{enumerate_points, Point};
use crate::polyseries::{
    eval_box, monomials_up_to, normalized_q_terms, recursion_target, BoundTemplate, Exp, IntSeries,
};
use crate::scalar::{
    half, nearest_integer, GaussQ, LambdaOracle, Rational, Separation, XVal, DEFAULT_LAMBDA_LEVEL,
    MAX_LAMBDA_LEVEL,
};
use crate::vanishing::GadgetBundle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn add(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.all_pass() {
            Ok(self)
        } else {
            Err(Error::VerificationFailure(self.failures()))
        }
    }
}

/// The five text artifacts written by a build.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub series: String,
    pub bundle: String,
    pub certificate: String,
    pub classification: String,
    pub witnesses: String,
}

pub const SERIES_FILE: &str = "series.txt";
pub const BUNDLE_FILE: &str = "bundle.txt";
pub const CERTIFICATE_FILE: &str = "certificate.txt";
pub const CLASSIFICATION_FILE: &str = "classification.txt";
pub const WITNESS_FILE: &str = "witnesses.txt";

impl Artifacts {
    pub fn read_dir(dir: &std::path::Path) -> Result<Self> {
        let rd = |f: &str| std::fs::read_to_string(dir.join(f));
        Ok(Self {
            series: rd(SERIES_FILE)?,
            bundle: rd(BUNDLE_FILE)?,
            certificate: rd(CERTIFICATE_FILE)?,
            classification: rd(CLASSIFICATION_FILE)?,
            witnesses: rd(WITNESS_FILE)?,
        })
    }

    pub fn write_dir(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(SERIES_FILE), &self.series)?;
        std::fs::write(dir.join(BUNDLE_FILE), &self.bundle)?;
        std::fs::write(dir.join(CERTIFICATE_FILE), &self.certificate)?;
        std::fs::write(dir.join(CLASSIFICATION_FILE), &self.classification)?;
        std::fs::write(dir.join(WITNESS_FILE), &self.witnesses)?;
        Ok(())
    }
}

/// Assembles `problem` and renders its five artifacts together with the
/// build-time certificate.
pub fn build_artifacts(
    problem: &crate::assembler::Problem,
) -> Result<(MainBundle, Certificate, Artifacts)> {
    let b = crate::assembler::assemble(problem)?;
    let oracle = LambdaOracle::new(problem.lambda_level)?;
    let cert = crate::certificate::build_certificate(&b, &oracle)?;
    let records = crate::assembler::classify(&b).unwrap_or_default();
    let a = Artifacts {
        series: series_to_string(&b.series),
        bundle: bundle_to_string(&b),
        certificate: certificate_to_string(&cert),
        classification: classification_to_string(&records),
        witnesses: witnesses_to_string(&records),
    };
    Ok((b, cert, a))
}

fn finer(level: u32) -> u32 {
    (level + 1).min(MAX_LAMBDA_LEVEL)
}

/// Parses and replays every artifact; parse failures are errors, failed
/// checks are listed in the report.
pub fn verify_artifacts(a: &Artifacts) -> Result<Report> {
    let b = bundle_from_str(&a.bundle)?;
    let main = series_from_str(&a.series)?;
    let (cert, claimed) = certificate_from_str(&a.certificate)?;
    let records = classification_from_str(&a.classification, &a.witnesses)?;
    let mut r = Report::default();
    let p = &b.problem;
    let ok_problem = recompute::problem_ok(p);
    r.add("problem", ok_problem);
    if !ok_problem {
        return Ok(r);
    }
    let oracle = LambdaOracle::new(p.lambda_level)?;
    let e = enumerate_points(p.m, &p.rho, p.height)?;
    r.add(
        "problem.reps",
        e.len() > p.stage && e.reps[..=p.stage] == b.reps[..],
    );
    check_radius(&mut r, &b);

    let nodes = recompute::nodes(&b.reps);
    for (idx, st) in b.steering.iter().enumerate() {
        let k = idx + 1;
        let name = format!("steering{k}");
        r.add(format!("{name}.alpha"), st.alpha == b.reps[k]);
        r.add(
            format!("{name}.beta"),
            st.beta == recompute::target(k, &p.s, p.seed),
        );
        let want: Vec<(Point, XVal)> = nodes
            .iter()
            .map(|z| {
                let v = if *z == st.alpha {
                    st.beta.clone()
                } else if *z == st.alpha.conj() {
                    st.beta.conj()
                } else {
                    XVal::zero()
                };
                (z.clone(), v)
            })
            .collect();
        check_interpolant(
            &mut r,
            &name,
            &st.series,
            p.m,
            p.degree,
            &want,
            &BigInt::zero(),
        );
    }

    let q1 = b
        .steering
        .first()
        .and_then(|h| h.series.decomposition.as_ref())
        .map(|d| &d.q);
    for (j, g) in b.gadgets.iter().enumerate() {
        let name = format!("gadget{j}");
        r.add(format!("{name}.alpha"), g.alpha == b.reps[j]);
        r.add(format!("{name}.degree"), g.degree == p.degree);
        let (pinned, betas) = if p.paper_faithful {
            r.add(format!("{name}.annihilator"), g.annihilator.is_none());
            let outside = b
                .reps
                .iter()
                .filter(|z| !recompute::on_grid(&g.alpha, z))
                .cloned()
                .collect();
            (Vec::new(), Some(outside))
        } else {
            let ok = match (&g.annihilator, q1) {
                (Some(a), Some(q)) => recompute::is_primitive_multiple(a, q),
                (None, None) => true,
                _ => false,
            };
            r.add(format!("{name}.annihilator"), ok);
            (
                nodes.clone(),
                recompute::later_points(p, &g.alpha, &nodes, p.stage),
            )
        };
        r.add(format!("{name}.pinned"), g.pinned == pinned);
        if let Some(a) = &g.annihilator {
            let kills = g
                .pinned
                .iter()
                .all(|z| a.eval(z).map(|v| v.is_zero()).unwrap_or(false));
            r.add(format!("{name}.annihilator.vanishes"), kills);
        }
        let stage_betas: Vec<Point> = g.stages.iter().map(|s| s.beta.clone()).collect();
        r.add(format!("{name}.betas"), Some(stage_betas) == betas);
        check_gadget(&mut r, &name, g, p.degree)?;
    }

    let sized = b.gadgets.len() == p.stage && b.steering.len() == p.stage;
    r.add("bundle.sizes", sized);
    if !sized {
        return Ok(r);
    }
    r.add(
        "ledger",
        recompute::main_ledger(&b.gadgets, &b.steering) == b.ledger,
    );
    for (st, l) in b.steering.iter().zip(&b.ledger) {
        let theta = recompute::theta(l, &st.alpha, p.seed);
        r.add(format!("theta{}", st.k), theta.as_ref() == Some(&st.theta));
    }
    r.add("main.series", recompute::main_series(&b) == b.series);
    r.add("main.file", main == b.series);

    if p.paper_faithful {
        r.add("nodes.absent", b.nodes.is_none());
        r.add("classification.absent", records.is_empty());
    } else {
        let table = recompute::node_values(&b);
        r.add("nodes", table.is_some() && table == b.nodes);
        let listed = records.len() == b.reps.len()
            && records.iter().enumerate().all(|(i, c)| {
                c.index == i
                    && c.point == b.reps[i]
                    && table.as_ref().is_some_and(|t| t[i] == c.witness)
                    && c.inside == c.witness.lam.is_zero()
            });
        r.add("classification", listed);
        let membership = records.iter().all(|c| c.inside == p.s.contains(&c.index));
        r.add(
            "classification.membership",
            membership && records.len() == b.reps.len(),
        );
        r.add(
            "classification.origin",
            records
                .first()
                .is_some_and(|c| c.inside && c.witness.is_zero()),
        );
        let fine = LambdaOracle::new(finer(p.lambda_level))?;
        if let Some(nodes) = &b.nodes {
            for (k, (z, v)) in b.reps.iter().zip(nodes).enumerate() {
                let ok = eval_box(&b.series, z, &fine)
                    .map(|bx| bx.contains_box(&v.enclose(&fine)))
                    .unwrap_or(false);
                r.add(format!("node{k}.box.fine"), ok);
            }
        }
    }

    for (e, c) in cert.entries.iter().zip(&claimed) {
        r.add(format!("cert.{}", e.name), e.pass && *c);
    }
    let expected = recompute::certificate(&b, &cert, &oracle);
    r.add("cert.complete", expected.as_ref() == Some(&cert));
    Ok(r)
}

fn check_radius(r: &mut Report, b: &MainBundle) {
    let p = &b.problem;
    let f = &b.radius;
    r.add(
        "radius.shape",
        f.m == p.m && f.degree == p.degree && f.rho.as_ref() == Some(&p.rho),
    );
    r.add(
        "radius.plain",
        f.decomposition.is_none() && f.majorants.is_empty(),
    );
    let mut ok = true;
    let mut count = 0;
    let mut max = BigInt::zero();
    for (i, rho) in p.rho.iter().enumerate() {
        let inv = rho.recip();
        let mut want = Rational::one();
        for n in 1..=p.degree {
            want *= &inv;
            let c = f.coeff(&Exp::unit(p.m, i, n));
            ok &= Rational::from_integer(c.clone()) == want;
            max = max.max(c);
            count += 1;
        }
    }
    r.add("radius.coefficients", ok && f.coeffs.len() == count);
    r.add("radius.bound", f.coeff_bound == Rational::from_integer(max));
    r.add(
        "radius.template",
        f.template
            == BoundTemplate {
                c: Rational::from_integer(BigInt::from(p.m)),
                e: 1,
            },
    );
}

/// Node exactness of `(p, q)` and a replay of the rounding recursion.
pub fn check_interpolant(
    r: &mut Report,
    name: &str,
    f: &IntSeries,
    m: usize,
    degree: u32,
    nodes: &[(Point, XVal)],
    constant: &BigInt,
) {
    r.add(
        format!("{name}.shape"),
        f.m == m && f.degree == degree && f.rho.is_none() && f.majorants.is_empty(),
    );
    let Some(dec) = &f.decomposition else {
        r.add(format!("{name}.decomposition"), false);
        return;
    };
    let Ok(q_terms) = normalized_q_terms(&dec.q) else {
        r.add(format!("{name}.q"), false);
        return;
    };
    let exact = nodes.iter().all(|(z, v)| {
        let q0 = dec.q.eval(z).map(|x| x.is_zero()).unwrap_or(false);
        let pv = dec.p.eval(z).map(|x| &x == v).unwrap_or(false);
        q0 && pv
    });
    r.add(format!("{name}.nodes"), exact);
    let mut g: HashMap<Exp, XVal> = HashMap::new();
    let mut replay = true;
    for theta in monomials_up_to(m, degree) {
        let target = recursion_target(&theta, &dec.p, &q_terms, &g);
        let stored = f.coeff(&theta);
        let want = if theta.is_zero() {
            Some(constant.clone())
        } else if target.is_real() {
            nearest_integer(&target, DEFAULT_LAMBDA_LEVEL).ok()
        } else {
            None
        };
        if want.as_ref() != Some(&stored) {
            replay = false;
            break;
        }
        let gv = &XVal::from(GaussQ::real(Rational::from_integer(stored))) - &target;
        if !gv.is_zero() {
            g.insert(theta, gv);
        }
    }
    r.add(format!("{name}.rounding"), replay);
    let small = dec
        .remainder
        .iter()
        .all(|(e, v)| e.is_zero() || (v.is_real() && recompute::within_half(v)));
    r.add(format!("{name}.remainder"), small);
    let g0 = dec
        .remainder
        .get(&Exp::zero(m))
        .cloned()
        .unwrap_or_else(XVal::zero);
    let gb = g0.is_real() && dec.g_bound == half().max(g0.real_abs_upper());
    r.add(format!("{name}.gbound"), gb);
    let bound = recompute::interpolant_bound(f);
    r.add(
        format!("{name}.bound"),
        bound.as_ref() == Some(&f.coeff_bound),
    );
    let c = if f.coeff_bound.is_zero() {
        Rational::one()
    } else {
        f.coeff_bound.clone()
    };
    r.add(
        format!("{name}.template"),
        f.template == BoundTemplate { c, e: m as u32 },
    );
}

/// Base interpolant, one-variable gadgets, stages, ledger and series of a
/// gadget bundle.
pub fn check_gadget(r: &mut Report, name: &str, g: &GadgetBundle, degree: u32) -> Result<()> {
    let m = g.dim();
    let alpha = &g.alpha;
    if !alpha.in_unit_polydisc() {
        r.add(format!("{name}.grid"), false);
        return Ok(());
    }
    let grid = recompute::grid(alpha);
    let pair = [alpha.clone(), alpha.conj()];
    let mut nodes: Vec<(Point, XVal)> = grid
        .iter()
        .filter(|z| !z.is_origin())
        .map(|z| {
            (
                z.clone(),
                if pair.contains(z) {
                    XVal::zero()
                } else {
                    XVal::from(GaussQ::one())
                },
            )
        })
        .collect();
    for z in g
        .pinned
        .iter()
        .filter(|z| !z.is_origin() && !recompute::on_grid(alpha, z))
    {
        if !nodes.iter().any(|(n, _)| n == z) {
            nodes.push((z.clone(), XVal::from(GaussQ::one())));
        }
    }
    let c0 = if alpha.is_origin() {
        BigInt::zero()
    } else {
        BigInt::one()
    };
    check_interpolant(r, &format!("{name}.base"), &g.base, m, degree, &nodes, &c0);
    r.add(format!("{name}.univariate.count"), g.gadgets.len() == m);
    for (i, (h, a)) in g.gadgets.iter().zip(alpha.coords()).enumerate() {
        let hn = format!("{name}.univariate{}", i + 1);
        let pt = |x: &GaussQ| Point::new(vec![x.clone()]);
        if a.is_zero() {
            check_interpolant(r, &hn, h, 1, degree, &[], &BigInt::zero());
        } else {
            let mut nodes = vec![(pt(a), XVal::zero())];
            if !a.is_real() {
                nodes.push((pt(&a.conj()), XVal::zero()));
            }
            check_interpolant(r, &hn, h, 1, degree, &nodes, &BigInt::one());
        }
    }
    if g.gadgets.len() != m {
        return Ok(());
    }

    let ledger = recompute::gadget_ledger(g);
    r.add(format!("{name}.ledger"), ledger.as_ref() == Some(&g.ledger));
    let oracle = LambdaOracle::new(DEFAULT_LAMBDA_LEVEL)?;
    let fine = LambdaOracle::new(finer(DEFAULT_LAMBDA_LEVEL))?;
    for (n, st) in g.stages.iter().enumerate() {
        let sn = format!("{name}.stage{}", n + 1);
        let shaped = st.t.len() == m && st.beta.dim() == m;
        r.add(format!("{sn}.shape"), shaped);
        if !shaped {
            continue;
        }
        let a = g.annihilator.as_ref();
        let bx = recompute::stage_box(g, n, &oracle);
        r.add(format!("{sn}.box"), bx.as_ref() == Some(&st.b_box));
        let sep = st.b_box.nonzero_lower_bound();
        r.add(
            format!("{sn}.lower"),
            sep == Separation::Separated(st.lower.clone()),
        );
        let fine_ok = match recompute::stage_box(g, n, &fine) {
            Some(b) => {
                matches!(b.nonzero_lower_bound(), Separation::Separated(lo) if lo >= st.lower)
            }
            None => false,
        };
        r.add(format!("{sn}.fine"), fine_ok);
        r.add(
            format!("{sn}.modulus"),
            st.b_upper == st.beta.norm_upper() && st.b_upper < Rational::one(),
        );
        let qv = match a {
            Some(a) => a.eval(&st.beta).map(|v| v.modulus_upper()).ok(),
            None => Some(Rational::one()),
        };
        r.add(
            format!("{sn}.annihilator"),
            qv.as_ref() == Some(&st.q_upper),
        );
        let factor = recompute::tail_factor(m, &g.ledger.chat, &st.q_upper, &st.b_upper);
        let target = &st.lower * half();
        r.add(
            format!("{sn}.rank"),
            recompute::least_rank(&factor, &st.b_upper, &target, st.s),
        );
        let tail = &factor * num_traits::pow(st.b_upper.clone(), st.s as usize);
        r.add(format!("{sn}.tail"), tail == st.tail && st.tail < target);
        let outside = st.beta.in_unit_polydisc() && !recompute::on_grid(alpha, &st.beta);
        r.add(format!("{sn}.beta"), outside);
    }
    if let Some(l) = ledger {
        let series = recompute::gadget_series(g, &l);
        r.add(format!("{name}.series"), series.as_ref() == Some(&g.series));
    }
    Ok(())
}

/// Replays a standalone gadget bundle (no pinned points, no annihilator).
pub fn verify_gadget(g: &GadgetBundle) -> Result<Report> {
    let mut r = Report::default();
    check_gadget(&mut r, "gadget", g, g.degree)?;
    let mut cert = Certificate::default();
    recompute::gadget_entries(&mut cert, "gadget", g);
    for e in &cert.entries {
        r.add(format!("cert.{}", e.name), e.pass);
    }
    Ok(r)
}
