//! Acceptance suite. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exset::assembler::{assemble, classify, Problem};
use exset::certificate::{build_certificate, gadget_certificate};
use exset::interpolation::{extend_interpolant, interpolate};
use exset::points::{canonical_rep, enumerate_points, Point};
use exset::polyseries::{eval_box, poly_eval, BoundTemplate, Exp, IntSeries};
use exset::radius::radius_series;
use exset::scalar::{int, rat, ComplexBox, GaussQ, LambdaOracle, Rational, XVal};
use exset::vanishing::{build_vanishing, replay_stages, select_exponents, univariate_gadget};
use exset::verify::{build_artifacts, verify_artifacts, Artifacts};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_rat(rng: &mut ChaCha8Rng, h: i64) -> Rational {
    rat(rng.gen_range(-h..=h), rng.gen_range(1..=h))
}

/// Random Gaussian rational with max-modulus below 1.
fn rand_disc(rng: &mut ChaCha8Rng, h: i64) -> GaussQ {
    loop {
        let z = GaussQ::new(rand_rat(rng, h), rand_rat(rng, h));
        if z.abs_squared() < int(1) {
            return z;
        }
    }
}

fn rand_point(rng: &mut ChaCha8Rng, m: usize, h: i64) -> Point {
    Point::new((0..m).map(|_| rand_disc(rng, h)).collect())
}

fn rand_xval(rng: &mut ChaCha8Rng, h: i64, real: bool) -> XVal {
    let g = |rng: &mut ChaCha8Rng| {
        if real {
            GaussQ::real(rand_rat(rng, h))
        } else {
            GaussQ::new(rand_rat(rng, h), rand_rat(rng, h))
        }
    };
    let base = g(rng);
    let lam = if rng.gen_bool(0.5) {
        g(rng)
    } else {
        GaussQ::zero()
    };
    XVal::new(base, lam)
}

/// Conjugate-closed node list with at most `max_points` points.
fn rand_nodes(rng: &mut ChaCha8Rng, m: usize, max_points: usize) -> Vec<(Point, XVal)> {
    let mut out: Vec<(Point, XVal)> = Vec::new();
    let want = rng.gen_range(1..=max_points);
    while out.len() < want {
        let z = canonical_rep(&rand_point(rng, m, 4));
        if z.is_origin() || out.iter().any(|(p, _)| p == &z) {
            continue;
        }
        if z.is_real() {
            out.push((z, rand_xval(rng, 5, true)));
        } else if out.len() + 2 <= max_points {
            let v = rand_xval(rng, 5, false);
            out.push((z.conj(), v.conj()));
            out.push((z, v));
        }
    }
    out.shuffle(rng);
    out
}

fn gq(q: &Rational) -> XVal {
    XVal::algebraic(GaussQ::real(q.clone()))
}

/// Lower bound on `|x|` for a real value, from its λ enclosure.
fn abs_lower(x: &XVal, oracle: &LambdaOracle) -> Rational {
    let (lo, hi) = oracle.real_interval(&x.base.re, &x.lam.re);
    if lo.is_positive() {
        lo
    } else if hi.is_negative() {
        -hi
    } else {
        Rational::zero()
    }
}

fn xval_le_half(x: &XVal) -> bool {
    // |g| ≤ 1/2 with g = a + bλ; λ-parts are irrational so ties only occur
    // for b = 0.
    let h = rat(1, 2);
    if x.lam.is_zero() {
        return x.base.re.abs() <= h;
    }
    for level in 3..=6 {
        let o = LambdaOracle::new(level).unwrap();
        let (lo, hi) = o.real_interval(&x.base.re, &x.lam.re);
        if lo >= -h.clone() && hi <= h {
            return true;
        }
        if lo > h || hi < -h.clone() {
            return false;
        }
    }
    false
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let oracle = LambdaOracle::new(4).unwrap();
    let d = 10;
    let mut checked = 0usize;
    for case in 0..200 {
        let m = rng.gen_range(1..=3);
        let nodes = rand_nodes(&mut rng, m, 6);
        let f = interpolate(m, nodes.clone(), d, None).map_err(|e| format!("case {case}: {e}"))?;
        let dec = f.decomposition.as_ref().ok_or("no decomposition")?;
        let q = &dec.q;
        ensure(q.coeff(&Exp::zero(m)) == GaussQ::one(), || {
            format!("case {case}: b0 != 1")
        })?;
        for (z, v) in &nodes {
            ensure(poly_eval(q, z).unwrap().is_zero(), || {
                format!("case {case}: q({z}) != 0")
            })?;
            ensure(&poly_eval(&dec.p, z).unwrap() == v, || {
                format!("case {case}: p({z}) != {v}")
            })?;
        }
        // g = (f − p)/q as a power series, by forward substitution in grlex order.
        let mut g: Vec<(Exp, XVal)> = Vec::new();
        for theta in exset::polyseries::monomials_up_to(m, d) {
            let mut acc = &gq(&Rational::from_integer(f.coeff(&theta))) - &dec.p.coeff(&theta);
            for (phi, gv) in &g {
                if let Some(sigma) = theta.checked_sub(phi) {
                    let b = q.coeff(&sigma);
                    if !b.is_zero() {
                        acc = &acc - &gv.scale(&b);
                    }
                }
            }
            g.push((theta, acc));
        }
        for (phi, gv) in &g {
            ensure(gv.is_real(), || {
                format!("case {case}: nonreal remainder at {phi}")
            })?;
            if !phi.is_zero() {
                ensure(xval_le_half(gv), || {
                    format!("case {case}: |g_{phi}| = {gv} > 1/2")
                })?;
            }
        }
        let amax = dec
            .p
            .terms()
            .values()
            .map(|a| abs_lower(a, &oracle))
            .max()
            .unwrap_or_else(Rational::zero);
        let lq: Rational = q.terms().values().map(|b| b.re.abs() + b.im.abs()).sum();
        let bound = amax + lq / int(2);
        for (theta, c) in &f.coeffs {
            if !theta.is_zero() {
                ensure(Rational::from_integer(c.abs()) <= bound, || {
                    format!("case {case}: |f_{theta}| = {c} exceeds bound")
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("200 node sets, {checked} coefficients"))
}

fn criterion_2() -> Outcome {
    let f = interpolate(
        1,
        vec![("(1/2)".parse().unwrap(), "1/3".parse().unwrap())],
        16,
        None,
    )
    .map_err(|e| e.to_string())?;
    // z/(1+z) = Σ_{n≥1} (−1)^{n+1} zⁿ.
    for n in 0..=16u32 {
        let want = if n == 0 {
            0
        } else if n % 2 == 1 {
            1
        } else {
            -1
        };
        ensure(f.coeff(&Exp(vec![n])) == BigInt::from(want), || {
            format!("coefficient {n} is {}", f.coeff(&Exp(vec![n])))
        })?;
    }
    ensure(f.coeffs.len() == 16, || "extra coefficients".into())?;
    Ok("z/(1+z) through degree 16".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let oracle = LambdaOracle::new(3).unwrap();
    let (n, d) = (8, 16);
    let mut stages = 0;
    for case in 0..20 {
        let m = rng.gen_range(1..=2);
        let alpha = loop {
            let a = rand_point(&mut rng, m, 4);
            if !a.is_origin() {
                break a;
            }
        };
        let g = build_vanishing(&alpha, n, d).map_err(|e| format!("case {case} ({alpha}): {e}"))?;
        let cert = gadget_certificate(&g);
        ensure(cert.all_pass(), || {
            format!(
                "case {case} ({alpha}): {:?}",
                cert.first_failure().map(|e| e.name.clone())
            )
        })?;
        ensure(g.stages.len() == n, || {
            format!("case {case}: {} stages", g.stages.len())
        })?;
        let replay =
            replay_stages(&g, 2 * d, &oracle).map_err(|e| format!("case {case} replay: {e}"))?;
        for (j, (lo, st)) in replay.iter().zip(&g.stages).enumerate() {
            ensure(lo >= &st.lower, || {
                format!(
                    "case {case} stage {}: replay {lo} below {}",
                    j + 1,
                    st.lower
                )
            })?;
        }
        for w in g.stages.windows(2) {
            for i in 0..m {
                let need = (w[0].t[i] as u64 + 1).max(w[0].s);
                ensure(w[1].t[i] as u64 >= need, || {
                    format!("case {case}: schedule {:?} then {:?}", w[0].t, w[1].t)
                })?;
            }
        }
        ensure(g.exact_value(&alpha).unwrap() == Some(XVal::zero()), || {
            format!("case {case}: f(α) not 0")
        })?;
        stages += g.stages.len();
    }
    let half = GaussQ::real(rat(1, 2));
    let base = univariate_gadget(&half, &[], 8).map_err(|e| e.to_string())?;
    let h = univariate_gadget(&half, &[GaussQ::real(rat(1, 3))], 8).map_err(|e| e.to_string())?;
    let toy = select_exponents(&base, &[h], None, &["(1/3)".parse().unwrap()], &oracle)
        .map_err(|e| e.to_string())?;
    ensure(toy.len() == 1, || "toy stage count".into())?;
    ensure(
        toy[0].b_box == ComplexBox::point(&GaussQ::real(rat(4, 9))),
        || format!("toy B₁ = {}", toy[0].b_box),
    )?;
    ensure(toy[0].lower == rat(4, 9) && toy[0].s == 4, || {
        format!("toy lower {} s {}", toy[0].lower, toy[0].s)
    })?;
    Ok(format!(
        "20 gadgets, {stages} stages replayed at degree {}; toy stage B₁ = 4/9, s₁ = 4",
        2 * d
    ))
}

fn plain_series(m: usize, degree: u32, coeffs: &[(Exp, BigInt)], bound: &BigInt) -> IntSeries {
    IntSeries {
        m,
        degree,
        coeffs: coeffs
            .iter()
            .filter(|(e, _)| e.degree() <= degree as u64)
            .cloned()
            .collect(),
        coeff_bound: Rational::from_integer(bound.clone()),
        template: BoundTemplate {
            c: Rational::from_integer(bound.clone()),
            e: m as u32,
        },
        decomposition: None,
        rho: None,
        majorants: Vec::new(),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let oracle = LambdaOracle::new(3).unwrap();
    let mut kinds = [0usize; 3];
    for case in 0..500 {
        let m = rng.gen_range(1..=3);
        let d: u32 = rng.gen_range(2..=if m == 3 { 5 } else { 8 });
        let z = loop {
            let z = rand_point(&mut rng, m, 5);
            if z.norm_upper() < int(1) {
                break z;
            }
        };
        let (short, long_value) = match case % 3 {
            0 => {
                let bound = BigInt::from(rng.gen_range(1..=50));
                let mut coeffs = Vec::new();
                for e in exset::polyseries::monomials_up_to(m, 2 * d) {
                    let c =
                        BigInt::from(rng.gen_range(-50..=50)).clamp(-bound.clone(), bound.clone());
                    if rng.gen_bool(0.6) && !c.is_zero() {
                        coeffs.push((e, c));
                    }
                }
                let long = plain_series(m, 2 * d, &coeffs, &bound);
                (
                    plain_series(m, d, &coeffs, &bound),
                    long.eval_truncated(&z).unwrap(),
                )
            }
            1 => {
                let rho: Vec<Rational> = (0..m)
                    .map(|_| [int(1), rat(1, 2), rat(2, 3), rat(3, 4)][rng.gen_range(0..4)].clone())
                    .collect();
                let z = Point::new(
                    z.coords()
                        .iter()
                        .zip(&rho)
                        .map(|(c, r)| c.scale(r))
                        .collect(),
                );
                let short = radius_series(&rho, d).unwrap();
                let long = radius_series(&rho, 2 * d).unwrap();
                let b = eval_box(&short, &z, &oracle).map_err(|e| format!("case {case}: {e}"))?;
                let v = long.eval_truncated(&z).unwrap();
                ensure(b.contains_point(&v), || {
                    format!("case {case}: radius series at {z}")
                })?;
                kinds[1] += 1;
                continue;
            }
            _ => {
                let nodes = rand_nodes(&mut rng, m, 4);
                let mut f = interpolate(m, nodes, d, None).unwrap();
                let long = extend_interpolant(&f, 2 * d).unwrap();
                let v = long.eval_truncated(&z).unwrap();
                // Judged by its coefficient bound alone: the decomposition
                // model encloses f(z) itself, not its truncations.
                f.decomposition = None;
                (f, v)
            }
        };
        let b = eval_box(&short, &z, &oracle).map_err(|e| format!("case {case}: {e}"))?;
        ensure(b.contains_point(&long_value), || {
            format!("case {case}: box {b} misses {long_value} at {z}")
        })?;
        kinds[case % 3] += 1;
    }
    Ok(format!(
        "500 pairs ({} plain, {} radius, {} interpolants), 0 failures",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn closed_form(rho: &[Rational], z: &Point) -> GaussQ {
    let mut acc = GaussQ::zero();
    for (c, r) in z.coords().iter().zip(rho) {
        let w = c.scale(&r.recip());
        acc = &acc + &w.checked_div(&(&GaussQ::one() - &w)).unwrap();
    }
    acc
}

fn criterion_5() -> Outcome {
    let mut n_checked = 0;
    for rho in [int(1), rat(1, 2), rat(1, 3), rat(2, 3)] {
        let f = radius_series(std::slice::from_ref(&rho), 64).map_err(|e| e.to_string())?;
        ensure(f.coeff(&Exp(vec![0])).is_zero(), || "constant term".into())?;
        for n in 1..=64u32 {
            let a = Rational::from_integer(f.coeff(&Exp(vec![n])));
            let lo = num_traits::pow(rho.recip(), n as usize);
            ensure(lo <= a && a <= &lo + Rational::one(), || {
                format!("ρ = {rho}, n = {n}: a = {a}")
            })?;
            n_checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let oracle = LambdaOracle::new(3).unwrap();
    let choices = [int(1), rat(1, 2), rat(1, 3)];
    let mut boxes = 0;
    for case in 0..60 {
        let m = rng.gen_range(1..=2);
        let rho: Vec<Rational> = (0..m)
            .map(|_| choices[rng.gen_range(0..3)].clone())
            .collect();
        let z = loop {
            let raw = rand_point(&mut rng, m, 6);
            let z = Point::new(
                raw.coords()
                    .iter()
                    .zip(&rho)
                    .map(|(c, r)| c.scale(r))
                    .collect(),
            );
            if exset::points::in_polydisc(&z, &rho).unwrap() && raw.norm_upper() < rat(9, 10) {
                break z;
            }
        };
        let f = radius_series(&rho, 24).map_err(|e| e.to_string())?;
        let b = eval_box(&f, &z, &oracle).map_err(|e| format!("case {case}: {e}"))?;
        let v = closed_form(&rho, &z);
        ensure(b.contains_point(&v), || {
            format!("case {case}: box {b} misses {v} at {z}")
        })?;
        boxes += 1;
    }
    Ok(format!(
        "{n_checked} sandwiched coefficients, {boxes} closed-form values in their boxes"
    ))
}

/// Problems exercised end to end, with their artifacts kept for the
/// verifier criterion.
fn end_to_end_problems() -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut out = Vec::new();
    for (m, height) in [(1usize, 2u32), (1, 3), (2, 2), (2, 3)] {
        let n = 2;
        let mut s = vec![0];
        for k in 1..=n {
            if rng.gen_bool(0.5) {
                s.push(k);
            }
        }
        out.push(Problem {
            m,
            rho: vec![int(1); m],
            height,
            stage: n,
            degree: 16,
            seed: rng.gen_range(0..5),
            s,
            lambda_level: 3,
            paper_faithful: false,
        });
    }
    out
}

fn check_end_to_end(p: &Problem) -> Result<String, String> {
    let tag = format!("m={} height={} S={:?}", p.m, p.height, p.s);
    let b = assemble(p).map_err(|e| format!("{tag}: {e}"))?;
    let enumeration = enumerate_points(p.m, &p.rho, p.height).unwrap();
    ensure(b.reps[..] == enumeration.reps[..=p.stage], || {
        format!("{tag}: representatives")
    })?;
    let records = classify(&b).ok_or("no classification")?;
    ensure(records.len() == p.stage + 1, || {
        format!("{tag}: {} records", records.len())
    })?;
    for r in &records {
        let in_s = p.s.contains(&r.index);
        ensure(r.inside == in_s, || {
            format!("{tag}: index {} classified {}", r.index, r.inside)
        })?;
        ensure(r.witness.lam.is_zero() == in_s, || {
            format!("{tag}: witness {} at {}", r.witness, r.index)
        })?;
    }
    ensure(records[0].witness.is_zero(), || {
        format!("{tag}: f(0) = {}", records[0].witness)
    })?;
    for (st, l) in b.steering.iter().zip(&b.ledger) {
        let k = st.k as u64;
        let ceil = exset::scalar::ceil_int(&l.c_paper);
        let need = ceil + BigInt::from(k * (4 * k + 1));
        ensure(BigInt::from(st.theta.degree()) >= need, || {
            format!("{tag}: |θ_{k}| = {} < {need}", st.theta.degree())
        })?;
        for (t, c) in st.theta.0.iter().zip(st.alpha.coords()) {
            ensure(*t == 0 || !c.is_zero(), || {
                format!("{tag}: α_{k}^θ_{k} = 0")
            })?;
        }
    }
    let oracle = LambdaOracle::new(p.lambda_level).unwrap();
    for r in &records {
        let bx = eval_box(&b.series, &r.point, &oracle).map_err(|e| format!("{tag}: {e}"))?;
        ensure(bx.contains_box(&r.witness.enclose(&oracle)), || {
            format!("{tag}: box at {} misses witness", r.point)
        })?;
    }
    let cert = build_certificate(&b, &oracle).map_err(|e| format!("{tag}: {e}"))?;
    ensure(cert.all_pass(), || {
        format!(
            "{tag}: certificate entry {:?}",
            cert.first_failure().map(|e| e.name.clone())
        )
    })?;
    for r in ["1_4", "1_2", "3_4"] {
        let conv: Vec<_> = cert
            .entries
            .iter()
            .filter(|e| e.name.starts_with(&format!("conv{r}.")))
            .collect();
        ensure(!conv.is_empty() && conv.iter().all(|e| e.pass), || {
            format!("{tag}: convergence at {r}")
        })?;
    }
    let thetas: Vec<u64> = b.steering.iter().map(|s| s.theta.degree()).collect();
    Ok(format!("{tag} θ={thetas:?}"))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for p in end_to_end_problems() {
        parts.push(check_end_to_end(&p)?);
    }
    Ok(parts.join("; "))
}

fn family_problem(seed: u64) -> Problem {
    Problem {
        m: 1,
        rho: vec![int(1)],
        height: 2,
        stage: 2,
        degree: 16,
        seed,
        s: vec![0, 2],
        lambda_level: 3,
        paper_faithful: false,
    }
}

fn criterion_7() -> Outcome {
    let mut series = BTreeSet::new();
    let mut classification = BTreeSet::new();
    for seed in 0..8 {
        let (_, cert, a) = build_artifacts(&family_problem(seed)).map_err(|e| e.to_string())?;
        ensure(cert.all_pass(), || format!("seed {seed}: certificate"))?;
        series.insert(a.series);
        classification.insert(a.classification);
    }
    ensure(series.len() == 8, || {
        format!("{} distinct series files", series.len())
    })?;
    ensure(classification.len() == 1, || {
        format!("{} distinct classification files", classification.len())
    })?;
    Ok("8 seeds: 8 distinct series files, 1 classification file".into())
}

fn detected(a: &Artifacts) -> bool {
    match verify_artifacts(a) {
        Ok(r) => !r.all_pass(),
        Err(_) => true,
    }
}

/// Replaces one digit of one numeric token with a different digit.
fn tamper(rng: &mut ChaCha8Rng, a: &Artifacts) -> (Artifacts, String) {
    loop {
        let mut t = a.clone();
        let (name, text) = match rng.gen_range(0..5) {
            0 => ("series", &mut t.series),
            1 => ("bundle", &mut t.bundle),
            2 => ("certificate", &mut t.certificate),
            3 => ("classification", &mut t.classification),
            _ => ("witnesses", &mut t.witnesses),
        };
        let digits: Vec<usize> = text
            .bytes()
            .enumerate()
            .filter(|(_, b)| b.is_ascii_digit())
            .map(|(i, _)| i)
            .collect();
        if digits.is_empty() {
            continue;
        }
        let pos = digits[rng.gen_range(0..digits.len())];
        let old = text.as_bytes()[pos];
        let new = loop {
            let c = b'0' + rng.gen_range(0..10u8);
            if c != old {
                break c;
            }
        };
        let mut bytes = std::mem::take(text).into_bytes();
        bytes[pos] = new;
        *text = String::from_utf8(bytes).unwrap();
        return (t, format!("{name}@{pos}"));
    }
}

fn criterion_8() -> Outcome {
    let mut problems = end_to_end_problems();
    problems.extend((0..8).map(family_problem));
    let mut paper = family_problem(0);
    paper.paper_faithful = true;
    problems.push(paper);
    let mut checks = 0;
    let mut base = None;
    for p in &problems {
        let (_, _, a) = build_artifacts(p).map_err(|e| e.to_string())?;
        let r = verify_artifacts(&a).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), || {
            format!("m={} S={:?}: {:?}", p.m, p.s, r.failures())
        })?;
        checks += r.checks.len();
        if base.is_none() {
            base = Some(a);
        }
    }
    let base = base.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for i in 0..100 {
        let (t, wher) = tamper(&mut rng, &base);
        ensure(detected(&t), || {
            format!("tampering {i} at {wher} went unnoticed")
        })?;
    }
    Ok(format!(
        "{} builds verified ({checks} checks), 100/100 tamperings detected",
        problems.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("interpolation contract on 200 node sets", criterion_1),
        ("worked example z/(1+z)", criterion_2),
        ("vanishing gadgets at stage 8", criterion_3),
        ("tail-bound soundness", criterion_4),
        ("polyradius series", criterion_5),
        ("end-to-end classification", criterion_6),
        ("family distinctness", criterion_7),
        ("verifier integrity", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
