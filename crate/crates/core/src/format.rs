//! Line-oriented text formats for series, gadget and main bundles,
//! problems, certificates and classifications.
//!
//! Every value is printed in its canonical exact form, so rebuilding from
//! identical inputs reproduces files byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::assembler::{ClassRecord, LedgerEntry, MainBundle, Problem, Steering};
use crate::error::{Error, Result};
use crate::points::Point;
use crate::polyseries::{
    recover_remainder, BoundTemplate, Coeff, Decomposition, Exp, IntSeries, Majorant, Poly,
};
use crate::scalar::{
    fmt_rational, parse_rational, ComplexBox, GaussQ, Rational, XVal, DEFAULT_LAMBDA_LEVEL,
};
use crate::vanishing::{GadgetBundle, Ledger, StageRecord};

/// Cursor over numbered lines; blank lines are skipped.
pub struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { lines, pos: 0 }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, l)| *l)
    }

    pub fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .or(self.lines.last())
            .map_or(0, |(n, _)| *n)
    }

    pub fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let l = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(self.line_no(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(l)
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    /// Next line, which must start with `word`; returns the other tokens.
    pub fn expect(&mut self, word: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, l) = self.next_line()?;
        let mut toks = l.split_whitespace();
        if toks.next() != Some(word) {
            return Err(Error::parse(
                n,
                format!("expected `{word}`, found `{}`", short(l)),
            ));
        }
        Ok((n, toks.collect()))
    }

    pub fn peek_word(&self) -> Option<&'a str> {
        self.peek().and_then(|l| l.split_whitespace().next())
    }
}

fn short(l: &str) -> String {
    l.chars().take(60).collect()
}

fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

/// `key=value` token lookup, in order.
fn field<'a>(line: usize, toks: &[&'a str], idx: usize, key: &str) -> Result<&'a str> {
    let t = toks
        .get(idx)
        .ok_or_else(|| Error::parse(line, format!("missing `{key}=`")))?;
    t.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, format!("expected `{key}=`, found `{t}`")))
}

fn no_extra(line: usize, toks: &[&str], n: usize) -> Result<()> {
    if toks.len() != n {
        return Err(Error::parse(
            line,
            format!("expected {n} fields, found {}", toks.len()),
        ));
    }
    Ok(())
}

fn num<T: FromStr>(line: usize, s: &str) -> Result<T> {
    let v: T = s
        .parse()
        .map_err(|_| Error::parse(line, format!("bad integer `{s}`")))?;
    Ok(v)
}

/// Integers in their canonical decimal spelling only.
fn canonical_int<T: FromStr + ToString>(line: usize, s: &str) -> Result<T> {
    let v: T = num(line, s)?;
    if v.to_string() != s {
        return Err(Error::parse(line, format!("non-canonical integer `{s}`")));
    }
    Ok(v)
}

fn rational(line: usize, s: &str) -> Result<Rational> {
    at(line, parse_rational(s))
}

fn value<T: FromStr<Err = Error> + ToString>(line: usize, s: &str) -> Result<T> {
    let v: T = at(line, s.parse())?;
    if v.to_string() != s {
        return Err(Error::parse(line, format!("non-canonical value `{s}`")));
    }
    Ok(v)
}

fn u32_list(line: usize, s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| canonical_int(line, t)).collect()
}

fn join_u32(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn fmt_box(b: &ComplexBox) -> String {
    b.to_string()
}

pub fn parse_box(s: &str) -> Result<ComplexBox> {
    let bad = || Error::Format(format!("bad box `{s}`"));
    let (re, im) = s.split_once("]x[").ok_or_else(bad)?;
    let re = re.strip_prefix('[').ok_or_else(bad)?;
    let im = im.strip_suffix(']').ok_or_else(bad)?;
    let (a, b) = re.split_once(',').ok_or_else(bad)?;
    let (c, d) = im.split_once(',').ok_or_else(bad)?;
    let (a, b, c, d) = (
        parse_rational(a)?,
        parse_rational(b)?,
        parse_rational(c)?,
        parse_rational(d)?,
    );
    if a > b || c > d {
        return Err(bad());
    }
    Ok(ComplexBox::new(a, b, c, d))
}

// ---------------------------------------------------------------------------
// Series.

fn write_poly<T: Coeff>(out: &mut String, tag: &str, p: &Poly<T>) {
    for (e, c) in p.terms() {
        let _ = writeln!(out, "{tag} {e} {c}");
    }
}

pub fn write_series(out: &mut String, f: &IntSeries) {
    let _ = writeln!(
        out,
        "POLYSERIES v1 m={} order=grlex D={} M={} C={} e={}",
        f.m,
        f.degree,
        fmt_rational(&f.coeff_bound),
        fmt_rational(&f.template.c),
        f.template.e
    );
    if let Some(rho) = &f.rho {
        let r: Vec<String> = rho.iter().map(fmt_rational).collect();
        let _ = writeln!(out, "RHO {}", r.join(" "));
    }
    for (e, c) in &f.coeffs {
        let _ = writeln!(out, "{e} {c}");
    }
    for mj in &f.majorants {
        let _ = writeln!(
            out,
            "MAJORANT {} {} {}",
            fmt_rational(&mj.coeff),
            mj.shift,
            mj.power
        );
    }
    if let Some(dec) = &f.decomposition {
        let _ = writeln!(out, "DECOMP");
        write_poly(out, "P", &dec.p);
        write_poly(out, "Q", &dec.q);
        let _ = writeln!(out, "GBOUND {}", fmt_rational(&dec.g_bound));
    }
    let _ = writeln!(out, "END");
}

pub fn series_to_string(f: &IntSeries) -> String {
    let mut s = String::new();
    write_series(&mut s, f);
    s
}

fn parse_exp(line: usize, toks: &[&str], m: usize) -> Result<Exp> {
    Ok(Exp(toks[..m]
        .iter()
        .map(|t| canonical_int(line, t))
        .collect::<Result<_>>()?))
}

fn parse_poly<T: Coeff>(lines: &mut Lines, tag: &str, m: usize) -> Result<Poly<T>> {
    let mut terms: Vec<(Exp, T)> = Vec::new();
    while lines.peek_word() == Some(tag) {
        let (n, toks) = lines.expect(tag)?;
        no_extra(n, &toks, m + 1)?;
        let e = parse_exp(n, &toks, m)?;
        let c: T = value(n, toks[m])?;
        if Coeff::is_zero(&c) {
            return Err(Error::parse(n, "zero term"));
        }
        if terms.last().is_some_and(|(p, _)| p >= &e) {
            return Err(Error::parse(n, "terms out of graded-lex order"));
        }
        terms.push((e, c));
    }
    Ok(Poly::from_terms(m, terms))
}

pub fn parse_series(lines: &mut Lines) -> Result<IntSeries> {
    let (n, toks) = lines.expect("POLYSERIES")?;
    no_extra(n, &toks, 7)?;
    if toks[0] != "v1" || toks[2] != "order=grlex" {
        return Err(Error::parse(n, "unsupported series header"));
    }
    let m: usize = canonical_int(n, field(n, &toks, 1, "m")?)?;
    if m == 0 {
        return Err(Error::parse(n, "m must be positive"));
    }
    let degree: u32 = canonical_int(n, field(n, &toks, 3, "D")?)?;
    let coeff_bound = rational(n, field(n, &toks, 4, "M")?)?;
    let c = rational(n, field(n, &toks, 5, "C")?)?;
    let e: u32 = canonical_int(n, field(n, &toks, 6, "e")?)?;
    let mut rho = None;
    if lines.peek_word() == Some("RHO") {
        let (n, toks) = lines.expect("RHO")?;
        no_extra(n, &toks, m)?;
        rho = Some(
            toks.iter()
                .map(|t| rational(n, t))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut coeffs: BTreeMap<Exp, BigInt> = BTreeMap::new();
    let mut last: Option<Exp> = None;
    while lines
        .peek_word()
        .is_some_and(|w| w.as_bytes()[0].is_ascii_digit())
    {
        let (n, l) = lines.next_line()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        no_extra(n, &toks, m + 1)?;
        let ex = parse_exp(n, &toks, m)?;
        if ex.degree() > degree as u64 {
            return Err(Error::parse(n, "coefficient beyond the truncation degree"));
        }
        if last.as_ref().is_some_and(|p| p >= &ex) {
            return Err(Error::parse(n, "coefficients out of graded-lex order"));
        }
        let c: BigInt = canonical_int(n, toks[m])?;
        if c.is_zero() {
            return Err(Error::parse(n, "zero coefficient stored"));
        }
        last = Some(ex.clone());
        coeffs.insert(ex, c);
    }
    let mut majorants = Vec::new();
    while lines.peek_word() == Some("MAJORANT") {
        let (n, toks) = lines.expect("MAJORANT")?;
        no_extra(n, &toks, 3)?;
        majorants.push(Majorant {
            coeff: rational(n, toks[0])?,
            shift: canonical_int(n, toks[1])?,
            power: canonical_int(n, toks[2])?,
        });
    }
    let mut decomposition = None;
    if lines.peek_word() == Some("DECOMP") {
        let (n, toks) = lines.expect("DECOMP")?;
        no_extra(n, &toks, 0)?;
        let p: Poly<XVal> = parse_poly(lines, "P", m)?;
        let q: Poly<GaussQ> = parse_poly(lines, "Q", m)?;
        let (n, toks) = lines.expect("GBOUND")?;
        no_extra(n, &toks, 1)?;
        let g_bound = rational(n, toks[0])?;
        let remainder = at(n, recover_remainder(m, degree, &coeffs, &p, &q))?;
        decomposition = Some(Decomposition {
            p,
            q,
            g_bound,
            remainder,
        });
    }
    let (n, toks) = lines.expect("END")?;
    no_extra(n, &toks, 0)?;
    Ok(IntSeries {
        m,
        degree,
        coeffs,
        coeff_bound,
        template: BoundTemplate { c, e },
        decomposition,
        rho,
        majorants,
    })
}

pub fn series_from_str(s: &str) -> Result<IntSeries> {
    let mut lines = Lines::new(s);
    let f = parse_series(&mut lines)?;
    trailing(&lines)?;
    Ok(f)
}

fn trailing(lines: &Lines) -> Result<()> {
    if !lines.is_done() {
        return Err(Error::parse(lines.line_no(), "trailing content"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gadget bundles.

fn fmt_points(ps: &[Point]) -> String {
    ps.iter()
        .map(Point::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_gadget(out: &mut String, j: usize, g: &GadgetBundle) {
    let _ = writeln!(out, "GADGET {j} alpha={} degree={}", g.alpha, g.degree);
    let _ = writeln!(out, "PINNED {}", fmt_points(&g.pinned));
    match &g.annihilator {
        Some(a) => {
            let _ = writeln!(out, "ANNIHILATOR {}", a.terms().len());
            write_poly(out, "A", a);
        }
        None => {
            let _ = writeln!(out, "ANNIHILATOR none");
        }
    }
    let _ = writeln!(out, "BASE");
    write_series(out, &g.base);
    for (i, h) in g.gadgets.iter().enumerate() {
        let _ = writeln!(out, "UNIVARIATE {i}");
        write_series(out, h);
    }
    for (n, st) in g.stages.iter().enumerate() {
        let _ = writeln!(
            out,
            "STAGE {}: beta={} t={} B={} Blo={} b={} q={} s={} tail={}",
            n + 1,
            st.beta,
            join_u32(&st.t),
            st.b_box,
            fmt_rational(&st.lower),
            fmt_rational(&st.b_upper),
            fmt_rational(&st.q_upper),
            st.s,
            fmt_rational(&st.tail)
        );
    }
    let ci: Vec<String> = g.ledger.ci.iter().map(fmt_rational).collect();
    let _ = writeln!(
        out,
        "LEDGER ci={} chat={} ctilde={} c={} e={}",
        ci.join(","),
        fmt_rational(&g.ledger.chat),
        fmt_rational(&g.ledger.ctilde),
        fmt_rational(&g.ledger.c),
        g.ledger.e
    );
    let _ = writeln!(out, "SERIES");
    write_series(out, &g.series);
    let _ = writeln!(out, "ENDGADGET");
}

pub fn gadget_to_string(g: &GadgetBundle) -> String {
    let mut s = String::new();
    write_gadget(&mut s, 0, g);
    s
}

fn parse_points(line: usize, toks: &[&str]) -> Result<Vec<Point>> {
    toks.iter().map(|t| value(line, t)).collect()
}

pub fn parse_gadget(lines: &mut Lines, expect_index: usize) -> Result<GadgetBundle> {
    let (n, toks) = lines.expect("GADGET")?;
    no_extra(n, &toks, 3)?;
    let j: usize = canonical_int(n, toks[0])?;
    if j != expect_index {
        return Err(Error::parse(
            n,
            format!("gadget index {j}, expected {expect_index}"),
        ));
    }
    let alpha: Point = value(n, field(n, &toks, 1, "alpha")?)?;
    let degree: u32 = canonical_int(n, field(n, &toks, 2, "degree")?)?;
    let m = alpha.dim();
    let (n, toks) = lines.expect("PINNED")?;
    let pinned = parse_points(n, &toks)?;
    let (n, toks) = lines.expect("ANNIHILATOR")?;
    no_extra(n, &toks, 1)?;
    let annihilator = if toks[0] == "none" {
        None
    } else {
        let count: usize = canonical_int(n, toks[0])?;
        let a: Poly<GaussQ> = parse_poly(lines, "A", m)?;
        if a.terms().len() != count {
            return Err(Error::parse(n, "annihilator term count mismatch"));
        }
        Some(a)
    };
    let (n, toks) = lines.expect("BASE")?;
    no_extra(n, &toks, 0)?;
    let base = parse_series(lines)?;
    let mut gadgets = Vec::with_capacity(m);
    for i in 0..m {
        let (n, toks) = lines.expect("UNIVARIATE")?;
        no_extra(n, &toks, 1)?;
        if canonical_int::<usize>(n, toks[0])? != i {
            return Err(Error::parse(n, "univariate gadget index out of order"));
        }
        gadgets.push(parse_series(lines)?);
    }
    let mut stages = Vec::new();
    while lines.peek_word() == Some("STAGE") {
        let (n, toks) = lines.expect("STAGE")?;
        no_extra(n, &toks, 9)?;
        let idx = toks[0]
            .strip_suffix(':')
            .ok_or_else(|| Error::parse(n, "expected `STAGE <n>:`"))?;
        if canonical_int::<usize>(n, idx)? != stages.len() + 1 {
            return Err(Error::parse(n, "stage index out of order"));
        }
        let t = u32_list(n, field(n, &toks, 2, "t")?)?;
        if t.len() != m {
            return Err(Error::parse(n, "exponent tuple of wrong length"));
        }
        let b_box = {
            let s = field(n, &toks, 3, "B")?;
            let b = at(n, parse_box(s))?;
            if b.to_string() != s {
                return Err(Error::parse(n, "non-canonical box"));
            }
            b
        };
        stages.push(StageRecord {
            beta: value(n, field(n, &toks, 1, "beta")?)?,
            t,
            b_box,
            lower: rational(n, field(n, &toks, 4, "Blo")?)?,
            b_upper: rational(n, field(n, &toks, 5, "b")?)?,
            q_upper: rational(n, field(n, &toks, 6, "q")?)?,
            s: canonical_int(n, field(n, &toks, 7, "s")?)?,
            tail: rational(n, field(n, &toks, 8, "tail")?)?,
        });
    }
    let (n, toks) = lines.expect("LEDGER")?;
    no_extra(n, &toks, 5)?;
    let ci_field = field(n, &toks, 0, "ci")?;
    let ci = ci_field
        .split(',')
        .map(|t| rational(n, t))
        .collect::<Result<Vec<_>>>()?;
    let ledger = Ledger {
        ci,
        chat: rational(n, field(n, &toks, 1, "chat")?)?,
        ctilde: rational(n, field(n, &toks, 2, "ctilde")?)?,
        c: rational(n, field(n, &toks, 3, "c")?)?,
        e: canonical_int(n, field(n, &toks, 4, "e")?)?,
    };
    let (n, toks) = lines.expect("SERIES")?;
    no_extra(n, &toks, 0)?;
    let series = parse_series(lines)?;
    let (n, toks) = lines.expect("ENDGADGET")?;
    no_extra(n, &toks, 0)?;
    Ok(GadgetBundle {
        alpha,
        degree,
        base,
        gadgets,
        annihilator,
        pinned,
        stages,
        ledger,
        series,
    })
}

pub fn gadget_from_str(s: &str) -> Result<GadgetBundle> {
    let mut lines = Lines::new(s);
    let g = parse_gadget(&mut lines, 0)?;
    trailing(&lines)?;
    Ok(g)
}

// ---------------------------------------------------------------------------
// Main bundle.

pub fn bundle_to_string(b: &MainBundle) -> String {
    let p = &b.problem;
    let mut out = String::new();
    let _ = writeln!(out, "BUNDLE v1");
    let _ = writeln!(
        out,
        "PROBLEM m={} height={} stage={} degree={} seed={} lambda={} faithful={}",
        p.m,
        p.height,
        p.stage,
        p.degree,
        p.seed,
        p.lambda_level,
        u8::from(p.paper_faithful)
    );
    let rho: Vec<String> = p.rho.iter().map(fmt_rational).collect();
    let _ = writeln!(out, "RHO {}", rho.join(" "));
    let s: Vec<String> = p.s.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "S {}", s.join(" "));
    for (k, r) in b.reps.iter().enumerate() {
        let _ = writeln!(out, "REP {k} {r}");
    }
    let _ = writeln!(out, "RADIUS");
    write_series(&mut out, &b.radius);
    for (j, g) in b.gadgets.iter().enumerate() {
        write_gadget(&mut out, j, g);
    }
    for st in &b.steering {
        let _ = writeln!(
            out,
            "STEERING {} alpha={} beta={} theta={}",
            st.k,
            st.alpha,
            st.beta,
            join_u32(&st.theta.0)
        );
        write_series(&mut out, &st.series);
    }
    for l in &b.ledger {
        let _ = writeln!(
            out,
            "LEDGERK {} Cpaper={} Cfull={} E={}",
            l.k,
            fmt_rational(&l.c_paper),
            fmt_rational(&l.c_full),
            l.e
        );
    }
    if let Some(nodes) = &b.nodes {
        for (k, v) in nodes.iter().enumerate() {
            let _ = writeln!(out, "NODE {k} {v}");
        }
    }
    let _ = writeln!(out, "MAIN");
    write_series(&mut out, &b.series);
    let _ = writeln!(out, "ENDBUNDLE");
    out
}

pub fn bundle_from_str(text: &str) -> Result<MainBundle> {
    let mut lines = Lines::new(text);
    let (n, toks) = lines.expect("BUNDLE")?;
    if toks != ["v1"] {
        return Err(Error::parse(n, "unsupported bundle version"));
    }
    let (n, toks) = lines.expect("PROBLEM")?;
    no_extra(n, &toks, 7)?;
    let m: usize = canonical_int(n, field(n, &toks, 0, "m")?)?;
    let height: u32 = canonical_int(n, field(n, &toks, 1, "height")?)?;
    let stage: usize = canonical_int(n, field(n, &toks, 2, "stage")?)?;
    let degree: u32 = canonical_int(n, field(n, &toks, 3, "degree")?)?;
    let seed: u64 = canonical_int(n, field(n, &toks, 4, "seed")?)?;
    let lambda_level: u32 = canonical_int(n, field(n, &toks, 5, "lambda")?)?;
    let paper_faithful = match field(n, &toks, 6, "faithful")? {
        "0" => false,
        "1" => true,
        _ => return Err(Error::parse(n, "faithful must be 0 or 1")),
    };
    let (n, toks) = lines.expect("RHO")?;
    no_extra(n, &toks, m)?;
    let rho = toks
        .iter()
        .map(|t| rational(n, t))
        .collect::<Result<Vec<_>>>()?;
    let (n, toks) = lines.expect("S")?;
    let s = toks
        .iter()
        .map(|t| canonical_int(n, t))
        .collect::<Result<Vec<usize>>>()?;
    let problem = Problem {
        m,
        rho,
        height,
        stage,
        degree,
        seed,
        s,
        lambda_level,
        paper_faithful,
    };
    let mut reps = Vec::with_capacity(stage + 1);
    for k in 0..=stage {
        let (n, toks) = lines.expect("REP")?;
        no_extra(n, &toks, 2)?;
        if canonical_int::<usize>(n, toks[0])? != k {
            return Err(Error::parse(n, "representative index out of order"));
        }
        reps.push(value(n, toks[1])?);
    }
    let (n, toks) = lines.expect("RADIUS")?;
    no_extra(n, &toks, 0)?;
    let radius = parse_series(&mut lines)?;
    let mut gadgets = Vec::with_capacity(stage);
    for j in 0..stage {
        gadgets.push(parse_gadget(&mut lines, j)?);
    }
    let mut steering = Vec::with_capacity(stage);
    for k in 1..=stage {
        let (n, toks) = lines.expect("STEERING")?;
        no_extra(n, &toks, 4)?;
        if canonical_int::<usize>(n, toks[0])? != k {
            return Err(Error::parse(n, "steering index out of order"));
        }
        let alpha: Point = value(n, field(n, &toks, 1, "alpha")?)?;
        let beta: XVal = value(n, field(n, &toks, 2, "beta")?)?;
        let theta = Exp(u32_list(n, field(n, &toks, 3, "theta")?)?);
        let series = parse_series(&mut lines)?;
        steering.push(Steering {
            k,
            alpha,
            beta,
            series,
            theta,
        });
    }
    let mut ledger = Vec::with_capacity(stage);
    for k in 1..=stage {
        let (n, toks) = lines.expect("LEDGERK")?;
        no_extra(n, &toks, 4)?;
        if canonical_int::<usize>(n, toks[0])? != k {
            return Err(Error::parse(n, "ledger index out of order"));
        }
        ledger.push(LedgerEntry {
            k,
            c_paper: rational(n, field(n, &toks, 1, "Cpaper")?)?,
            c_full: rational(n, field(n, &toks, 2, "Cfull")?)?,
            e: canonical_int(n, field(n, &toks, 3, "E")?)?,
        });
    }
    let nodes = if lines.peek_word() == Some("NODE") {
        let mut v = Vec::with_capacity(stage + 1);
        for k in 0..=stage {
            let (n, toks) = lines.expect("NODE")?;
            no_extra(n, &toks, 2)?;
            if canonical_int::<usize>(n, toks[0])? != k {
                return Err(Error::parse(n, "node index out of order"));
            }
            v.push(value(n, toks[1])?);
        }
        Some(v)
    } else {
        None
    };
    let (n, toks) = lines.expect("MAIN")?;
    no_extra(n, &toks, 0)?;
    let series = parse_series(&mut lines)?;
    let (n, toks) = lines.expect("ENDBUNDLE")?;
    no_extra(n, &toks, 0)?;
    trailing(&lines)?;
    Ok(MainBundle {
        problem,
        reps,
        radius,
        gadgets,
        steering,
        ledger,
        nodes,
        series,
    })
}

// ---------------------------------------------------------------------------
// Problem files.

/// Keys `M`, `RHO`, `HEIGHT`, `STAGE`, `DEGREE`, `SEED`, `S`; `#` starts a
/// comment. `STAGE`, `DEGREE`, `SEED` and `S` default to 0, 16, 0 and `0`.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut m = None;
    let mut rho = None;
    let mut height = None;
    let mut stage = 0usize;
    let mut degree = 16u32;
    let mut seed = 0u64;
    let mut s = vec![0usize];
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        last_line = n;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let mut toks = l.split_whitespace();
        let key = toks.next().unwrap_or("");
        let rest: Vec<&str> = toks.collect();
        let one = |rest: &[&str]| -> Result<String> {
            if rest.len() != 1 {
                return Err(Error::parse(n, format!("`{key}` takes one value")));
            }
            Ok(rest[0].to_string())
        };
        match key {
            "M" => {
                let v: usize = num(n, &one(&rest)?)?;
                if v == 0 {
                    return Err(Error::parse(n, "M must be positive"));
                }
                m = Some(v);
            }
            "RHO" => {
                if rest.is_empty() {
                    return Err(Error::parse(n, "RHO needs values"));
                }
                let r = rest
                    .iter()
                    .map(|t| rational(n, t))
                    .collect::<Result<Vec<_>>>()?;
                at(n, crate::radius::check_rho(&r))?;
                rho = Some(r);
            }
            "HEIGHT" => height = Some(num(n, &one(&rest)?)?),
            "STAGE" => stage = num(n, &one(&rest)?)?,
            "DEGREE" => degree = num(n, &one(&rest)?)?,
            "SEED" => seed = num(n, &one(&rest)?)?,
            "S" => {
                let mut v = rest
                    .iter()
                    .map(|t| num(n, t))
                    .collect::<Result<Vec<usize>>>()?;
                v.sort_unstable();
                v.dedup();
                s = v;
            }
            other => return Err(Error::parse(n, format!("unknown key `{other}`"))),
        }
    }
    let m = m.ok_or_else(|| Error::parse(last_line, "missing `M`"))?;
    let rho = rho.ok_or_else(|| Error::parse(last_line, "missing `RHO`"))?;
    if rho.len() != m {
        return Err(Error::parse(
            last_line,
            format!("RHO has {} values, M is {m}", rho.len()),
        ));
    }
    let height = height.ok_or_else(|| Error::parse(last_line, "missing `HEIGHT`"))?;
    Ok(Problem {
        m,
        rho,
        height,
        stage,
        degree,
        seed,
        s,
        lambda_level: DEFAULT_LAMBDA_LEVEL,
        paper_faithful: false,
    })
}

pub fn problem_to_string(p: &Problem) -> String {
    let rho: Vec<String> = p.rho.iter().map(fmt_rational).collect();
    let s: Vec<String> = p.s.iter().map(usize::to_string).collect();
    format!(
        "M {}\nRHO {}\nHEIGHT {}\nSTAGE {}\nDEGREE {}\nSEED {}\nS {}\n",
        p.m,
        rho.join(" "),
        p.height,
        p.stage,
        p.degree,
        p.seed,
        s.join(" ")
    )
}

// ---------------------------------------------------------------------------
// Classification.

pub fn classification_to_string(records: &[ClassRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let tag = if r.inside { "IN" } else { "OUT" };
        let _ = writeln!(out, "{} {} {tag}", r.index, r.point);
    }
    out
}

/// Witness values live in their own file so that the membership table does
/// not change with the seed.
pub fn witnesses_to_string(records: &[ClassRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{} {}", r.index, r.witness);
    }
    out
}

pub fn classification_from_str(text: &str, witnesses: &str) -> Result<Vec<ClassRecord>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while !lines.is_done() {
        let (n, l) = lines.next_line()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        no_extra(n, &toks, 3)?;
        let index: usize = canonical_int(n, toks[0])?;
        if index != out.len() {
            return Err(Error::parse(n, "record index out of order"));
        }
        let inside = match toks[2] {
            "IN" => true,
            "OUT" => false,
            t => return Err(Error::parse(n, format!("expected IN or OUT, found `{t}`"))),
        };
        out.push(ClassRecord {
            index,
            point: value(n, toks[1])?,
            inside,
            witness: XVal::zero(),
        });
    }
    let mut lines = Lines::new(witnesses);
    let mut k = 0;
    while !lines.is_done() {
        let (n, l) = lines.next_line()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        no_extra(n, &toks, 2)?;
        let index: usize = canonical_int(n, toks[0])?;
        if index != k || k >= out.len() {
            return Err(Error::parse(
                n,
                "witness index does not match the classification",
            ));
        }
        out[k].witness = value(n, toks[1])?;
        k += 1;
    }
    if k != out.len() {
        return Err(Error::Format(
            "witness file is shorter than the classification".into(),
        ));
    }
    Ok(out)
}

/// Reads a node file for direct interpolation: `<point> <value>` lines and
/// an optional `CONST <int>` line.
pub fn parse_nodes(text: &str) -> Result<(usize, Vec<(Point, XVal)>, Option<BigInt>)> {
    let mut nodes: Vec<(Point, XVal)> = Vec::new();
    let mut c = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        no_extra(n, &toks, 2)?;
        if toks[0] == "CONST" {
            c = Some(num(n, toks[1])?);
            continue;
        }
        let p: Point = at(n, toks[0].parse())?;
        let v: XVal = at(n, toks[1].parse())?;
        if let Some((q, _)) = nodes.first() {
            if q.dim() != p.dim() {
                return Err(Error::parse(n, "points of different dimensions"));
            }
        }
        nodes.push((p, v));
    }
    let m = nodes
        .first()
        .map(|(p, _)| p.dim())
        .ok_or_else(|| Error::parse(0, "no nodes"))?;
    Ok((m, nodes, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::interpolate;
    use crate::radius::radius_series;
    use crate::scalar::{int, rat};
    use crate::vanishing::build_vanishing;

    #[test]
    fn series_round_trip() {
        let f = interpolate(
            1,
            vec![("(1/2)".parse().unwrap(), "1/3".parse().unwrap())],
            16,
            None,
        )
        .unwrap();
        let s = series_to_string(&f);
        assert!(s.starts_with("POLYSERIES v1 m=1 order=grlex D=16 "));
        let g = series_from_str(&s).unwrap();
        assert_eq!(g, f);
        assert_eq!(series_to_string(&g), s);
        let r = radius_series(&[rat(1, 2), int(1)], 8).unwrap();
        assert_eq!(series_from_str(&series_to_string(&r)).unwrap(), r);
    }

    #[test]
    fn series_rejects_bad_text() {
        let f = radius_series(&[int(1)], 4).unwrap();
        let s = series_to_string(&f);
        assert!(series_from_str(&s.replace("1 1\n2 1", "2 1\n1 1")).is_err());
        assert!(series_from_str(&s.replace("D=4", "D=3")).is_err());
        assert!(series_from_str(&s.replace("END\n", "")).is_err());
        let e = series_from_str(&s.replace("RHO 1", "RHO 2/4")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn gadget_round_trip() {
        let g = build_vanishing(&"(1/2*i)".parse().unwrap(), 3, 16).unwrap();
        let s = gadget_to_string(&g);
        let h = gadget_from_str(&s).unwrap();
        assert_eq!(h, g);
        assert_eq!(gadget_to_string(&h), s);
    }

    #[test]
    fn box_text() {
        let b = ComplexBox::new(rat(-1, 2), int(1), int(0), rat(1, 3));
        assert_eq!(parse_box(&fmt_box(&b)).unwrap(), b);
        assert!(parse_box("[1,0]x[0,0]").is_err());
    }

    #[test]
    fn problem_text() {
        let p = parse_problem("M 1\nRHO 1\nHEIGHT 1\nSTAGE 0\nS 0\n").unwrap();
        assert_eq!(p.m, 1);
        assert_eq!(p.degree, 16);
        assert_eq!(parse_problem(&problem_to_string(&p)).unwrap(), p);
        let e = parse_problem("M 1\nRHO 0\nHEIGHT 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_problem("M 0\nRHO 1\nHEIGHT 1\n").is_err());
        assert!(parse_problem("M 1\nRHO 1\n").is_err());
    }
}
