//! Named exact inequalities, each re-checkable from its own operands.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::assembler::{log_factor, node_boxes, sample_radii, threshold_index, MainBundle};
use crate::error::{Error, Result};
use crate::format::{parse_box, Lines};
use crate::scalar::{
    ceil_int, fmt_rational, half, parse_rational, ComplexBox, LambdaOracle, Rational, Separation,
};
use crate::vanishing::{rank_factor, GadgetBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Eq,
    Lt,
    Le,
    Ge,
    /// The box is separated from 0 with exactly the stated lower bound.
    Sep,
    /// The first box contains the second.
    Contains,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Eq => "EQ",
            Kind::Lt => "LT",
            Kind::Le => "LE",
            Kind::Ge => "GE",
            Kind::Sep => "SEP",
            Kind::Contains => "CONTAINS",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        Some(match s {
            "EQ" => Kind::Eq,
            "LT" => Kind::Lt,
            "LE" => Kind::Le,
            "GE" => Kind::Ge,
            "SEP" => Kind::Sep,
            "CONTAINS" => Kind::Contains,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Rat(Rational),
    /// `c·r^e`, kept symbolic because `e` may be large.
    Pow {
        c: Rational,
        r: Rational,
        e: u64,
    },
    Box(ComplexBox),
}

impl Operand {
    fn rational(&self) -> Option<Rational> {
        self.fraction().map(|(n, d)| Rational::new(n, d))
    }

    /// Unreduced numerator and positive denominator; large powers are never
    /// normalised.
    fn fraction(&self) -> Option<(BigInt, BigInt)> {
        match self {
            Operand::Rat(q) => Some((q.numer().clone(), q.denom().clone())),
            Operand::Pow { c, r, e } => {
                let e = *e as usize;
                Some((
                    c.numer() * num_traits::pow(r.numer().clone(), e),
                    c.denom() * num_traits::pow(r.denom().clone(), e),
                ))
            }
            Operand::Box(_) => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Rat(q) => write!(f, "{}", fmt_rational(q)),
            Operand::Pow { c, r, e } => write!(f, "{}*({})^{e}", fmt_rational(c), fmt_rational(r)),
            Operand::Box(b) => write!(f, "{b}"),
        }
    }
}

fn parse_operand(s: &str) -> Result<Operand> {
    if s.starts_with('[') {
        return Ok(Operand::Box(parse_box(s)?));
    }
    if let Some((c, rest)) = s.split_once("*(") {
        let (r, e) = rest
            .split_once(")^")
            .ok_or_else(|| Error::Format(format!("bad power operand `{s}`")))?;
        let e: u64 = e
            .parse()
            .map_err(|_| Error::Format(format!("bad exponent in `{s}`")))?;
        return Ok(Operand::Pow {
            c: parse_rational(c)?,
            r: parse_rational(r)?,
            e,
        });
    }
    Ok(Operand::Rat(parse_rational(s)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub lhs: Operand,
    pub rhs: Operand,
    pub pass: bool,
}

impl Entry {
    pub fn new(name: impl Into<String>, kind: Kind, lhs: Operand, rhs: Operand) -> Self {
        let mut e = Entry {
            name: name.into(),
            kind,
            lhs,
            rhs,
            pass: false,
        };
        e.pass = e.check();
        e
    }

    /// Decides the relation from the operands alone.
    pub fn check(&self) -> bool {
        match self.kind {
            Kind::Sep => match (&self.lhs, self.rhs.rational()) {
                (Operand::Box(b), Some(lo)) => b.nonzero_lower_bound() == Separation::Separated(lo),
                _ => false,
            },
            Kind::Contains => match (&self.lhs, &self.rhs) {
                (Operand::Box(a), Operand::Box(b)) => a.contains_box(b),
                _ => false,
            },
            Kind::Eq if matches!((&self.lhs, &self.rhs), (Operand::Box(_), Operand::Box(_))) => {
                self.lhs == self.rhs
            }
            _ => {
                let (Some((an, ad)), Some((bn, bd))) = (self.lhs.fraction(), self.rhs.fraction())
                else {
                    return false;
                };
                let o = (an * bd).cmp(&(bn * ad));
                match self.kind {
                    Kind::Eq => o.is_eq(),
                    Kind::Lt => o.is_lt(),
                    Kind::Le => o.is_le(),
                    Kind::Ge => o.is_ge(),
                    Kind::Sep | Kind::Contains => unreachable!(),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub entries: Vec<Entry>,
}

impl Certificate {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn first_failure(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| !e.pass)
    }

    /// `CertificateFails` naming the first violated entry.
    pub fn require(&self) -> Result<()> {
        match self.first_failure() {
            Some(e) => Err(Error::CertificateFails(e.name.clone())),
            None => Ok(()),
        }
    }

    fn push(&mut self, name: String, kind: Kind, lhs: Operand, rhs: Operand) {
        self.entries.push(Entry::new(name, kind, lhs, rhs));
    }
}

pub fn certificate_to_string(c: &Certificate) -> String {
    let mut out = String::from("CERTIFICATE v1\n");
    for e in &c.entries {
        let status = if e.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "ENTRY {} {} {} {} {status}",
            e.name,
            e.kind.tag(),
            e.lhs,
            e.rhs
        );
    }
    out.push_str("END\n");
    out
}

/// Parses entries and re-derives every status; a claimed status that
/// disagrees with the operands is kept as stated so the caller can flag it.
pub fn certificate_from_str(text: &str) -> Result<(Certificate, Vec<bool>)> {
    let mut lines = Lines::new(text);
    let (n, toks) = lines.expect("CERTIFICATE")?;
    if toks != ["v1"] {
        return Err(Error::parse(n, "unsupported certificate version"));
    }
    let mut cert = Certificate::default();
    let mut claimed = Vec::new();
    while lines.peek_word() == Some("ENTRY") {
        let (n, toks) = lines.expect("ENTRY")?;
        if toks.len() != 5 {
            return Err(Error::parse(
                n,
                "expected `ENTRY <name> <kind> <lhs> <rhs> <status>`",
            ));
        }
        let kind = Kind::from_tag(toks[1])
            .ok_or_else(|| Error::parse(n, format!("unknown kind `{}`", toks[1])))?;
        let op = |s: &str| parse_operand(s).map_err(|e| Error::parse(n, e.to_string()));
        let (lhs, rhs) = (op(toks[2])?, op(toks[3])?);
        let pass = match toks[4] {
            "PASS" => true,
            "FAIL" => false,
            t => return Err(Error::parse(n, format!("bad status `{t}`"))),
        };
        let e = Entry::new(toks[0], kind, lhs, rhs);
        if e.to_line_operands() != (toks[2].to_string(), toks[3].to_string()) {
            return Err(Error::parse(n, "non-canonical operand"));
        }
        claimed.push(pass);
        cert.entries.push(e);
    }
    let (n, toks) = lines.expect("END")?;
    if !toks.is_empty() || !lines.is_done() {
        return Err(Error::parse(n, "trailing content after END"));
    }
    Ok((cert, claimed))
}

impl Entry {
    fn to_line_operands(&self) -> (String, String) {
        (self.lhs.to_string(), self.rhs.to_string())
    }
}

fn q(v: &Rational) -> Operand {
    Operand::Rat(v.clone())
}

fn u(v: u64) -> Operand {
    Operand::Rat(Rational::from_integer(BigInt::from(v)))
}

fn z(v: BigInt) -> Operand {
    Operand::Rat(Rational::from_integer(v))
}

/// Stage entries of one gadget: separation of every `B_n`, the tail rank
/// inequality with its minimality, and the exponent floors; then the
/// template exponent against both the dimension `m` and the stated 4.
pub fn gadget_entries(cert: &mut Certificate, prefix: &str, g: &GadgetBundle) {
    let m = g.dim();
    for (n, st) in g.stages.iter().enumerate() {
        let p = format!("{prefix}.stage{}", n + 1);
        cert.push(
            format!("{p}.separation"),
            Kind::Sep,
            Operand::Box(st.b_box.clone()),
            q(&st.lower),
        );
        let factor = rank_factor(m, &g.ledger.chat, &st.q_upper, &st.b_upper);
        let target = &st.lower * half();
        cert.push(
            format!("{p}.rank"),
            Kind::Lt,
            Operand::Pow {
                c: factor.clone(),
                r: st.b_upper.clone(),
                e: st.s,
            },
            q(&target),
        );
        if st.s > 1 {
            cert.push(
                format!("{p}.rank_minimal"),
                Kind::Ge,
                Operand::Pow {
                    c: factor,
                    r: st.b_upper.clone(),
                    e: st.s - 1,
                },
                q(&target),
            );
        }
        for i in 0..m {
            let floor = match n {
                0 => 1,
                _ => {
                    let prev = &g.stages[n - 1];
                    (prev.t[i] as u64 + 1).max(prev.s)
                }
            };
            cert.push(
                format!("{p}.floor{}", i + 1),
                Kind::Ge,
                u(st.t[i] as u64),
                u(floor),
            );
        }
    }
    let e = u(g.ledger.e as u64);
    cert.push(
        format!("{prefix}.exponent.dimension"),
        Kind::Ge,
        e.clone(),
        u(m as u64),
    );
    cert.push(format!("{prefix}.exponent.stated"), Kind::Ge, e, u(4));
}

/// Every entry of a main bundle, evaluated at the given λ level.
pub fn build_certificate(b: &MainBundle, oracle: &LambdaOracle) -> Result<Certificate> {
    let mut cert = Certificate::default();
    for (j, g) in b.gadgets.iter().enumerate() {
        gadget_entries(&mut cert, &format!("gadget{j}"), g);
    }
    let products = ledger_products(b);
    for (l, (c_paper, c_full)) in b.ledger.iter().zip(&products) {
        let k = l.k;
        cert.push(
            format!("ledger{k}.paper"),
            Kind::Eq,
            q(c_paper),
            q(&l.c_paper),
        );
        cert.push(format!("ledger{k}.full"), Kind::Eq, q(c_full), q(&l.c_full));
        let st = &b.steering[k - 1];
        let size = st.theta.degree();
        let growth = ceil_int(&l.c_paper) + BigInt::from((k * (4 * k + 1)) as u64);
        cert.push(format!("theta{k}.growth"), Kind::Ge, u(size), z(growth));
        let budget = ceil_int(&l.c_full) + BigInt::from(k as u64 * l.e as u64);
        cert.push(format!("theta{k}.budget"), Kind::Ge, u(size), z(budget));
        for (i, &t) in st.theta.0.iter().enumerate() {
            if t > 0 {
                let a2 = st.alpha.coords()[i].abs_squared();
                cert.push(
                    format!("theta{k}.support{}", i + 1),
                    Kind::Lt,
                    q(&Rational::zero()),
                    q(&a2),
                );
            }
        }
    }
    if let Some(nodes) = &b.nodes {
        for (k, (bx, v)) in node_boxes(b, oracle)?.into_iter().zip(nodes).enumerate() {
            cert.push(
                format!("node{k}.box"),
                Kind::Contains,
                Operand::Box(bx),
                Operand::Box(v.enclose(oracle)),
            );
        }
    }
    if !b.ledger.is_empty() {
        convergence_entries(&mut cert, b);
    }
    Ok(cert)
}

/// `(C_k, Ĉ_0·C_k)` recomputed from the gadget and steering ledgers.
pub fn ledger_products(b: &MainBundle) -> Vec<(Rational, Rational)> {
    b.steering
        .iter()
        .map(|st| {
            let mut c = st.series.template.c.clone();
            for g in b.gadgets.iter().take(st.k).skip(1) {
                c *= &g.ledger.c;
            }
            let full = b.gadgets.first().map_or(c.clone(), |g0| &g0.ledger.c * &c);
            (c, full)
        })
        .collect()
}

/// The convergence chain at every sample radius `r`:
/// `C_k·r^{|θ_k|}/(1−r)^{E_k} ≤ U(r)·(r^k/(1−r))^{E_k}` with `U(r) ≤ 1/(e|log r|)`,
/// the threshold `r^{k*}/(1−r) < 1/2`, and the summed bound.
pub fn convergence_entries(cert: &mut Certificate, b: &MainBundle) {
    let one = Rational::one();
    for r in sample_radii() {
        let tag = fmt_rational(&r).replace('/', "_");
        let ur = log_factor(&r);
        let inv = &one / (&one - &r);
        for l in &b.ledger {
            let size = b.steering[l.k - 1].theta.degree();
            let ke = l.k as u64 * l.e as u64;
            let e = size.saturating_sub(ke);
            cert.push(
                format!("conv{tag}.k{}.dominate", l.k),
                Kind::Le,
                Operand::Pow {
                    c: l.c_full.clone(),
                    r: r.clone(),
                    e,
                },
                q(&ur),
            );
        }
        let ks = threshold_index(&r) as u64;
        cert.push(
            format!("conv{tag}.threshold"),
            Kind::Lt,
            Operand::Pow {
                c: inv.clone(),
                r: r.clone(),
                e: ks,
            },
            q(&half()),
        );
        if ks > 1 {
            cert.push(
                format!("conv{tag}.threshold_minimal"),
                Kind::Ge,
                Operand::Pow {
                    c: inv.clone(),
                    r: r.clone(),
                    e: ks - 1,
                },
                q(&half()),
            );
        }
        let mut total = Rational::zero();
        let mut head = Rational::zero();
        for l in &b.ledger {
            let x = num_traits::pow(r.clone(), l.k) * &inv;
            let term = num_traits::pow(x, l.e as usize);
            if (l.k as u64) < ks {
                head += &term;
            }
            total += &ur * term;
        }
        cert.push(
            format!("conv{tag}.total"),
            Kind::Le,
            q(&total),
            q(&(&ur * (head + half()))),
        );
    }
}

/// Certificate of a standalone gadget: stage entries only.
pub fn gadget_certificate(g: &GadgetBundle) -> Certificate {
    let mut cert = Certificate::default();
    gadget_entries(&mut cert, "gadget", g);
    cert
}
