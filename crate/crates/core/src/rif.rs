//! Rough inclusion functions, their axiom profiles and derived measures.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, one, ratio_or_one, zero, Rational, UnitRational};
use crate::report::{Check, Report, Status};
use crate::spaces::{GranularSpace, SetHgos};
use crate::subset::Subset;
use crate::tables::BinaryRelationSpace;

/// Largest domain on which the triple-quantified axioms are scanned.
pub const AXIOM_SCAN_LIMIT: usize = 256;

/// A rough-inclusion-style map on pairs of subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InclusionFn {
    /// `#(A∩B)/#A`, 1 on `A = ∅`.
    K0,
    /// `#B/#(A∪B)`, 1 on `A∪B = ∅`.
    K1,
    /// `#(Aᶜ∪B)/#⊤`.
    K2,
    /// Piecewise-linear rescale of `base` between `s` and `t`.
    Kst { base: Box<InclusionFn>, s: Rational, t: Rational },
    Table(BTreeMap<(Subset, Subset), Rational>),
}

impl InclusionFn {
    pub fn kst(base: InclusionFn, s: Rational, t: Rational) -> Result<InclusionFn> {
        if !(zero() <= s && s < t && t <= one()) {
            return Err(Error::input(format!(
                "Kst needs 0 ≤ s < t ≤ 1, got s = {}, t = {}",
                format_rational(&s),
                format_rational(&t)
            )));
        }
        Ok(InclusionFn::Kst { base: Box::new(base), s, t })
    }

    pub fn parse(name: &str) -> Result<InclusionFn> {
        match name.to_ascii_lowercase().as_str() {
            "k0" => Ok(InclusionFn::K0),
            "k1" => Ok(InclusionFn::K1),
            "k2" => Ok(InclusionFn::K2),
            _ => Err(Error::input(format!("unknown inclusion function `{name}` (k0|k1|k2|kst)"))),
        }
    }

    pub fn needs_complement(&self) -> bool {
        match self {
            InclusionFn::K2 => true,
            InclusionFn::Kst { base, .. } => base.needs_complement(),
            _ => false,
        }
    }

    /// Evaluates on plain subsets of an `n`-element universe.
    pub fn eval_sets(&self, a: Subset, b: Subset, n: usize) -> Result<Rational> {
        Ok(match self {
            InclusionFn::K0 => ratio_or_one(a.intersect(b).len(), a.len()),
            InclusionFn::K1 => ratio_or_one(b.len(), a.union(b).len()),
            InclusionFn::K2 => {
                if n == 0 {
                    return Err(Error::unsupported("K2 over an empty universe"));
                }
                Rational::new(a.complement(n).union(b).len() as i64, n as i64)
            }
            InclusionFn::Kst { base, s, t } => {
                let v = base.eval_sets(a, b, n)?;
                if v <= *s {
                    zero()
                } else if v >= *t {
                    one()
                } else {
                    (v - s) / (t - s)
                }
            }
            InclusionFn::Table(m) => *m
                .get(&(a, b))
                .ok_or_else(|| Error::input(format!("table has no entry for ({a:?}, {b:?})")))?,
        })
    }
}

/// Family closed under complement.
pub fn complement_closed(s: &SetHgos) -> bool {
    s.elements().into_iter().all(|x| s.complement(x).is_some())
}

pub fn eval_rif(f: &InclusionFn, s: &SetHgos, a: Subset, b: Subset) -> Result<UnitRational> {
    if !s.in_family(a) || !s.in_family(b) {
        return Err(Error::input("argument outside the space family"));
    }
    if f.needs_complement() && !complement_closed(s) {
        return Err(Error::unsupported("K2 needs a family closed under complement"));
    }
    UnitRational::new(f.eval_sets(a, b, s.universe().len())?)
}

/// Degree values the axiom scan can test.
pub trait Degree: Copy + Ord + Send + Sync {
    fn is_one(self) -> bool;
    fn is_zero(self) -> bool;
    /// `self + other = 1`.
    fn complements(self, other: Self) -> bool;
    fn show(self) -> String;
}

impl Degree for Rational {
    fn is_one(self) -> bool {
        self == one()
    }
    fn is_zero(self) -> bool {
        self == zero()
    }
    fn complements(self, other: Self) -> bool {
        self + other == one()
    }
    fn show(self) -> String {
        format_rational(&self)
    }
}

/// `0`, `1/2`, `1` coded as `0`, `1`, `2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub u8);

impl Degree for Half {
    fn is_one(self) -> bool {
        self.0 == 2
    }
    fn is_zero(self) -> bool {
        self.0 == 0
    }
    fn complements(self, other: Self) -> bool {
        self.0 + other.0 == 2
    }
    fn show(self) -> String {
        ["0/1", "1/2", "1/1"][self.0 as usize].to_string()
    }
}

/// A finite domain for inclusion axioms: parthood, partial meet/join,
/// optional bounds and complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub labels: Vec<String>,
    pub part: Vec<Vec<bool>>,
    pub meet: Vec<Vec<Option<usize>>>,
    pub join: Vec<Vec<Option<usize>>>,
    pub bottom: Option<usize>,
    pub top: Option<usize>,
    pub complement: Option<Vec<usize>>,
}

impl Domain {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Meet and join as greatest lower / least upper bounds under parthood.
    pub fn from_order(labels: Vec<String>, part: Vec<Vec<bool>>) -> Domain {
        let n = labels.len();
        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let cands: Vec<usize> = (0..n)
                .filter(|&z| if lower { part[z][a] && part[z][b] } else { part[a][z] && part[b][z] })
                .collect();
            cands
                .iter()
                .copied()
                .find(|&z| cands.iter().all(|&y| if lower { part[y][z] } else { part[z][y] }))
        };
        let meet = (0..n).map(|a| (0..n).map(|b| bound(a, b, true)).collect()).collect();
        let join = (0..n).map(|a| (0..n).map(|b| bound(a, b, false)).collect()).collect();
        let bottom = (0..n).find(|&x| (0..n).all(|y| part[x][y]));
        let top = (0..n).find(|&x| (0..n).all(|y| part[y][x]));
        Domain { labels, part, meet, join, bottom, top, complement: None }
    }

    /// The Boolean algebra on `k` atoms, elements as bitmasks.
    pub fn boolean(k: usize) -> Domain {
        let n = 1usize << k;
        let labels = (0..n).map(|m| format!("{m:0k$b}")).collect();
        let part = (0..n).map(|a| (0..n).map(|b| a & !b == 0).collect()).collect();
        let mut d = Domain::from_order(labels, part);
        d.complement = Some((0..n).map(|a| !a & (n - 1)).collect());
        d
    }

    pub fn from_space<S: GranularSpace>(s: &S) -> (Domain, Vec<S::Elem>) {
        let es = s.elements();
        let idx: std::collections::HashMap<S::Elem, usize> = es.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let part = es.iter().map(|&a| es.iter().map(|&b| s.part(a, b)).collect()).collect();
        let op = |f: &dyn Fn(S::Elem, S::Elem) -> Option<S::Elem>| -> Vec<Vec<Option<usize>>> {
            es.iter().map(|&a| es.iter().map(|&b| f(a, b).and_then(|r| idx.get(&r).copied())).collect()).collect()
        };
        let complement: Option<Vec<usize>> =
            es.iter().map(|&x| s.complement(x).and_then(|c| idx.get(&c).copied())).collect();
        let d = Domain {
            labels: es.iter().map(|&e| s.label(e)).collect(),
            part,
            meet: op(&|a, b| s.meet(a, b)),
            join: op(&|a, b| s.join(a, b)),
            bottom: idx.get(&s.bottom()).copied(),
            top: idx.get(&s.top()).copied(),
            complement,
        };
        (d, es)
    }

    /// `⊥` is a proper part of `a`.
    fn above_bottom(&self, a: usize) -> bool {
        let b = self.bottom.expect("bottom checked by caller");
        self.part[b][a] && !self.part[a][b]
    }

    fn meet_is_bottom(&self, a: usize, b: usize) -> bool {
        self.bottom.is_some() && self.meet[a][b] == self.bottom
    }

    pub fn describe(&self) -> String {
        let n = self.len();
        let pairs: Vec<String> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.part[a][b])
            .map(|(a, b)| format!("{}≤{}", self.labels[a], self.labels[b]))
            .collect();
        format!("{{{}}} over {{{}}}", pairs.join(", "), self.labels.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    U1,
    R0,
    R1,
    R2,
    R3,
    IR0,
    RB,
    R4,
    IR4,
    /// `ℙ⊥a → (κ(a,b) = 0 ↔ a∧b = ⊥)`.
    R5,
    /// `ℙ⊥a → κ(a,b) + κ(a,bᶜ) = 1`.
    R6,
    /// `(κ(a,b) = 0 ∧ ℙ⊥a) ↔ a∧b = ⊥`.
    R5Verbatim,
    /// `ℙ⊥a ∧ b∨c = ⊤ → κ(a,b) + κ(a,c) = 1`.
    R6Verbatim,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::U1,
        Axiom::R0,
        Axiom::R1,
        Axiom::R2,
        Axiom::R3,
        Axiom::IR0,
        Axiom::RB,
        Axiom::R4,
        Axiom::IR4,
        Axiom::R5,
        Axiom::R6,
        Axiom::R5Verbatim,
        Axiom::R6Verbatim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::U1 => "U1",
            Axiom::R0 => "R0",
            Axiom::R1 => "R1",
            Axiom::R2 => "R2",
            Axiom::R3 => "R3",
            Axiom::IR0 => "IR0",
            Axiom::RB => "RB",
            Axiom::R4 => "R4",
            Axiom::IR4 => "IR4",
            Axiom::R5 => "R5",
            Axiom::R6 => "R6",
            Axiom::R5Verbatim => "R5-verbatim",
            Axiom::R6Verbatim => "R6-verbatim",
        }
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }

    /// Why the axiom cannot be evaluated on `d`, if it cannot.
    pub fn unavailable(self, d: &Domain) -> Option<&'static str> {
        match self {
            Axiom::RB | Axiom::R4 | Axiom::IR4 | Axiom::R5 | Axiom::R5Verbatim if d.bottom.is_none() => {
                Some("domain has no bottom")
            }
            Axiom::R6 if d.bottom.is_none() || d.complement.is_none() => Some("complementation is not available"),
            Axiom::R6Verbatim if d.bottom.is_none() || d.top.is_none() => Some("domain has no bottom or top"),
            _ => None,
        }
    }
}

/// First witness tuple violating `ax`; `None` when it holds.
///
/// Callers must rule out [`Axiom::unavailable`] first.
pub fn axiom_witness<V: Degree>(d: &Domain, k: &(dyn Fn(usize, usize) -> V + Sync), ax: Axiom) -> Option<Vec<usize>> {
    let n = d.len();
    let p = &d.part;
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
    let pair = |bad: &dyn Fn(usize, usize) -> bool| pairs().find(|&(a, b)| bad(a, b)).map(|(a, b)| vec![a, b]);
    let triple = |bad: &(dyn Fn(usize, usize, usize) -> bool + Sync)| {
        crate::par::find_first(n, |b| {
            for c in 0..n {
                for a in 0..n {
                    if bad(a, b, c) {
                        return Some(vec![a, b, c]);
                    }
                }
            }
            None
        })
    };
    match ax {
        Axiom::U1 => (0..n).find(|&a| !k(a, a).is_one()).map(|a| vec![a]),
        Axiom::R0 => pair(&|a, b| p[a][b] && !k(a, b).is_one()),
        Axiom::IR0 => pair(&|a, b| k(a, b).is_one() && !p[a][b]),
        Axiom::R1 => pair(&|a, b| k(a, b).is_one() != p[a][b]),
        Axiom::R2 => triple(&|a, b, c| k(b, c).is_one() && k(a, b) > k(a, c)),
        Axiom::R3 => triple(&|a, b, c| p[b][c] && k(a, b) > k(a, c)),
        Axiom::RB => {
            let bot = d.bottom?;
            (0..n).find(|&a| d.above_bottom(a) && !k(a, bot).is_zero()).map(|a| vec![a, bot])
        }
        Axiom::R4 => pair(&|a, b| k(a, b).is_zero() && !d.meet_is_bottom(a, b)),
        Axiom::IR4 => pair(&|a, b| d.meet_is_bottom(a, b) && d.above_bottom(a) && !k(a, b).is_zero()),
        Axiom::R5 => pair(&|a, b| d.above_bottom(a) && k(a, b).is_zero() != d.meet_is_bottom(a, b)),
        Axiom::R5Verbatim => pair(&|a, b| (k(a, b).is_zero() && d.above_bottom(a)) != d.meet_is_bottom(a, b)),
        Axiom::R6 => {
            let comp = d.complement.as_ref()?;
            pair(&|a, b| d.above_bottom(a) && !k(a, b).complements(k(a, comp[b])))
        }
        Axiom::R6Verbatim => {
            let top = d.top?;
            triple(&|a, b, c| d.above_bottom(a) && d.join[b][c] == Some(top) && !k(a, b).complements(k(a, c)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RifClass {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "wqRIF")]
    WqRif,
    #[serde(rename = "qRIF")]
    QRif,
    #[serde(rename = "RIF")]
    Rif,
}

impl RifClass {
    /// RIF ⇔ R1∧R2; qRIF ⇔ R0∧R2; wqRIF ⇔ R0∧R3; the strongest applies.
    pub fn from_flags(r0: bool, r1: bool, r2: bool, r3: bool) -> RifClass {
        if r1 && r2 {
            RifClass::Rif
        } else if r0 && r2 {
            RifClass::QRif
        } else if r0 && r3 {
            RifClass::WqRif
        } else {
            RifClass::None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RifProfile {
    pub u1: bool,
    pub r0: bool,
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub ir0: bool,
    pub ir4: Option<bool>,
    pub rb: Option<bool>,
    pub r4: Option<bool>,
    pub r5: Option<bool>,
    pub r6: Option<bool>,
    pub classification: RifClass,
    pub report: Report,
}

/// Scans every axiom over the space family.
pub fn check_rif_axioms<S, F>(s: &S, kappa: F) -> Result<RifProfile>
where
    S: GranularSpace,
    F: Fn(S::Elem, S::Elem) -> Rational + Sync,
{
    let (d, es) = Domain::from_space(s);
    if d.len() > AXIOM_SCAN_LIMIT {
        return Err(Error::unsupported(format!(
            "axiom scan needs at most {AXIOM_SCAN_LIMIT} elements, family has {}",
            d.len()
        )));
    }
    let n = d.len();
    let values: Vec<Rational> = crate::par::map_range(n * n, |i| kappa(es[i / n], es[i % n]));
    let k = |a: usize, b: usize| values[a * n + b];
    profile_domain(&d, &k)
}

/// Axiom profile of an explicit degree table on a domain.
pub fn profile_domain(d: &Domain, k: &(dyn Fn(usize, usize) -> Rational + Sync)) -> Result<RifProfile> {
    let mut report = Report::new();
    let mut flag = BTreeMap::new();
    for ax in Axiom::ALL {
        let check = match ax.unavailable(d) {
            Some(why) => Check::not_applicable(ax.name(), why),
            None => {
                let w = axiom_witness(d, k, ax);
                flag.insert(ax, w.is_none());
                Check::from_witness(
                    ax.name(),
                    w.map(|t| {
                        let mut v: Vec<String> = t.iter().map(|&i| d.labels[i].clone()).collect();
                        if t.len() >= 2 {
                            v.push(format!("κ={}", k(t[t.len() - 2], t[t.len() - 1]).show()));
                        }
                        v
                    }),
                )
            }
        };
        let check = match ax {
            Axiom::R5 => check.with_note("read as ℙ⊥a → (κ(a,b) = 0 ↔ a∧b = ⊥)"),
            Axiom::R6 => check.with_note("read with c = bᶜ: ℙ⊥a → κ(a,b) + κ(a,bᶜ) = 1"),
            _ => check,
        };
        report.push(check);
    }
    let f = |a: Axiom| flag.get(&a).copied();
    let req = |a: Axiom| f(a).unwrap_or(false);
    let classification = RifClass::from_flags(req(Axiom::R0), req(Axiom::R1), req(Axiom::R2), req(Axiom::R3));
    Ok(RifProfile {
        u1: req(Axiom::U1),
        r0: req(Axiom::R0),
        r1: req(Axiom::R1),
        r2: req(Axiom::R2),
        r3: req(Axiom::R3),
        ir0: req(Axiom::IR0),
        ir4: f(Axiom::IR4),
        rb: f(Axiom::RB),
        r4: f(Axiom::R4),
        r5: f(Axiom::R5),
        r6: f(Axiom::R6),
        classification,
        report,
    })
}

/// Profile of a named inclusion function on a set HGOS.
pub fn profile_inclusion_fn(f: &InclusionFn, s: &SetHgos) -> Result<RifProfile> {
    if f.needs_complement() && !complement_closed(s) {
        return Err(Error::unsupported("K2 needs a family closed under complement"));
    }
    let n = s.universe().len();
    let es = s.elements();
    for &a in &es {
        for &b in &es {
            f.eval_sets(a, b, n)?;
        }
    }
    check_rif_axioms(s, |a, b| f.eval_sets(a, b, n).expect("checked above"))
}

/// A statement over axiom masks.
#[derive(Clone, Debug)]
enum Shape {
    /// premises ⇒ conclusion.
    Implies(Vec<Axiom>, Axiom),
    /// premises ⇒ (x ⇔ y).
    Equivalent(Vec<Axiom>, Axiom, Axiom),
    /// (∧ lhs) ⇔ rhs.
    Iff(Vec<Axiom>, Axiom),
    /// The axiom holds outright.
    Always(Axiom),
    /// The axioms never hold together.
    Never(Vec<Axiom>),
}

impl Shape {
    fn axioms(&self) -> Vec<Axiom> {
        match self {
            Shape::Implies(p, c) => p.iter().copied().chain([*c]).collect(),
            Shape::Equivalent(p, x, y) => p.iter().copied().chain([*x, *y]).collect(),
            Shape::Iff(l, r) => l.iter().copied().chain([*r]).collect(),
            Shape::Always(a) => vec![*a],
            Shape::Never(p) => p.clone(),
        }
    }

    fn violated(&self, mask: u16) -> bool {
        let all = |xs: &[Axiom]| xs.iter().all(|a| mask & a.bit() != 0);
        let has = |a: Axiom| mask & a.bit() != 0;
        match self {
            Shape::Implies(p, c) => all(p) && !has(*c),
            Shape::Equivalent(p, x, y) => all(p) && has(*x) != has(*y),
            Shape::Iff(l, r) => all(l) != has(*r),
            Shape::Always(a) => !has(*a),
            Shape::Never(p) => all(p),
        }
    }

    fn render(&self) -> String {
        let names = |xs: &[Axiom]| xs.iter().map(|a| a.name()).collect::<Vec<_>>().join(" ∧ ");
        match self {
            Shape::Implies(p, c) => format!("{} ⇒ {}", names(p), c.name()),
            Shape::Equivalent(p, x, y) if p.is_empty() => format!("{} ⇔ {}", x.name(), y.name()),
            Shape::Equivalent(p, x, y) => format!("{} ⇒ ({} ⇔ {})", names(p), x.name(), y.name()),
            Shape::Iff(l, r) => format!("{} ⇔ {}", names(l), r.name()),
            Shape::Always(a) => a.name().to_string(),
            Shape::Never(p) => format!("¬({})", names(p)),
        }
    }

    fn premises(&self) -> &[Axiom] {
        match self {
            Shape::Implies(p, _) | Shape::Equivalent(p, _, _) | Shape::Iff(p, _) => p,
            Shape::Always(_) | Shape::Never(_) => &[],
        }
    }

    /// The statement with premise `i` removed.
    fn drop_premise(&self, i: usize) -> Shape {
        let without = |p: &[Axiom]| -> Vec<Axiom> {
            p.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, a)| *a).collect()
        };
        match self {
            Shape::Implies(p, c) if p.len() == 1 => Shape::Always(*c),
            Shape::Implies(p, c) => Shape::Implies(without(p), *c),
            Shape::Equivalent(p, x, y) => Shape::Equivalent(without(p), *x, *y),
            Shape::Iff(l, r) if l.len() == 1 => Shape::Always(*r),
            Shape::Iff(l, r) => Shape::Iff(without(l), *r),
            other => other.clone(),
        }
    }
}

fn prif_statements() -> Vec<(&'static str, Shape)> {
    use Axiom::*;
    vec![
        ("prif1", Shape::Equivalent(vec![R1], R3, R2)),
        ("prif2", Shape::Iff(vec![R0, IR0], R1)),
        ("prif3", Shape::Implies(vec![R0, R2], R3)),
        ("prif4", Shape::Implies(vec![IR0, R3], R2)),
        ("prif5", Shape::Implies(vec![IR4], RB)),
        ("prif6", Shape::Iff(vec![IR4, R4], R5)),
        ("prif7", Shape::Implies(vec![R0, R6], IR4)),
        ("prif8", Shape::Implies(vec![IR0, R6], R4)),
        ("prif9", Shape::Implies(vec![R1, R6], R5)),
        ("R0⇒U1", Shape::Implies(vec![R0], U1)),
        ("R1⇒U1", Shape::Implies(vec![R1], U1)),
    ]
}

/// Which κ maps a domain class enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaFilter {
    /// Every map into `{0, 1/2, 1}`.
    All,
    /// Maps with `κ = 1` on every parthood pair (all R0 maps).
    R0,
    /// Maps with `κ < 1` off parthood pairs (all IR0 maps).
    IR0,
}

/// One enumerated domain with its κ filter.
#[derive(Clone, Debug)]
pub struct PrifDomain {
    pub domain: Domain,
    pub filter: KappaFilter,
}

impl PrifDomain {
    fn choices(&self) -> Vec<Vec<u8>> {
        let n = self.domain.len();
        (0..n * n)
            .map(|i| {
                let p = self.domain.part[i / n][i % n];
                match (self.filter, p) {
                    (KappaFilter::R0, true) => vec![2],
                    (KappaFilter::IR0, false) => vec![0, 1],
                    _ => vec![0, 1, 2],
                }
            })
            .collect()
    }

    /// Number of enumerated maps.
    pub fn count(&self) -> u64 {
        self.choices().iter().map(|c| c.len() as u64).product()
    }
}

/// The enumeration domains: every reflexive antisymmetric relation on three
/// elements, plus the two- and four-element Boolean algebras. The
/// four-element algebra is enumerated under the R0 and IR0 filters only.
pub fn prif_domains() -> Vec<PrifDomain> {
    let labels: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut out = Vec::new();
    for code in 0..27u32 {
        let mut part = vec![vec![false; 3]; 3];
        for (i, row) in part.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => part[a][b] = true,
                2 => part[b][a] = true,
                _ => {}
            }
            c /= 3;
        }
        out.push(PrifDomain { domain: Domain::from_order(labels.clone(), part), filter: KappaFilter::All });
    }
    out.push(PrifDomain { domain: Domain::boolean(1), filter: KappaFilter::All });
    out.push(PrifDomain { domain: Domain::boolean(2), filter: KappaFilter::R0 });
    out.push(PrifDomain { domain: Domain::boolean(2), filter: KappaFilter::IR0 });
    out
}

/// Satisfied-axiom mask per distinct pattern, with the first map realizing it.
fn mask_census(pd: &PrifDomain, axioms: &[Axiom]) -> BTreeMap<u16, u64> {
    let choices = pd.choices();
    let total = pd.count();
    let d = &pd.domain;
    let n = d.len();
    let live: Vec<Axiom> = axioms.iter().copied().filter(|a| a.unavailable(d).is_none()).collect();
    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK) as usize;
    let parts = crate::par::map_range(chunks, |ci| {
        let mut seen: BTreeMap<u16, u64> = BTreeMap::new();
        let mut vals = vec![Half(0); n * n];
        let lo = ci as u64 * CHUNK;
        for idx in lo..(lo + CHUNK).min(total) {
            decode(idx, &choices, &mut vals);
            let k = |a: usize, b: usize| vals[a * n + b];
            let mut mask = 0u16;
            for &ax in &live {
                if axiom_witness(d, &k, ax).is_none() {
                    mask |= ax.bit();
                }
            }
            seen.entry(mask).or_insert(idx);
        }
        seen
    });
    let mut all = BTreeMap::new();
    for part in parts {
        for (m, i) in part {
            let e = all.entry(m).or_insert(i);
            *e = (*e).min(i);
        }
    }
    all
}

fn decode(mut idx: u64, choices: &[Vec<u8>], out: &mut [Half]) {
    for (slot, c) in out.iter_mut().zip(choices) {
        let r = c.len() as u64;
        *slot = Half(c[(idx % r) as usize]);
        idx /= r;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrifWitness {
    pub domain: String,
    /// `(a, b, κ(a,b))` for every pair.
    pub kappa: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrifCheck {
    pub name: String,
    pub statement: String,
    /// `Holds` = no counterexample; `Fails` = counterexample in `witness`.
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PrifWitness>,
    pub domains: usize,
    pub maps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrifReport {
    pub theorems: Vec<PrifCheck>,
    /// Each statement with one premise removed; a counterexample is expected.
    pub premise_drops: Vec<PrifCheck>,
    /// Satisfiability of the verbatim R5 and R0 ∧ R6 readings.
    pub readings: Vec<PrifCheck>,
}

fn witness_of(pd: &PrifDomain, idx: u64) -> PrifWitness {
    let d = &pd.domain;
    let n = d.len();
    let mut vals = vec![Half(0); n * n];
    decode(idx, &pd.choices(), &mut vals);
    PrifWitness {
        domain: d.describe(),
        kappa: (0..n * n)
            .map(|i| [d.labels[i / n].clone(), d.labels[i % n].clone(), vals[i].show()])
            .collect(),
    }
}

fn evaluate(name: &str, shape: &Shape, domains: &[PrifDomain], census: &[BTreeMap<u16, u64>]) -> PrifCheck {
    let needed = shape.axioms();
    let mut used = 0;
    let mut maps = 0;
    let mut witness = None;
    for (pd, masks) in domains.iter().zip(census) {
        if needed.iter().any(|a| a.unavailable(&pd.domain).is_some()) {
            continue;
        }
        used += 1;
        maps += pd.count();
        if witness.is_none() {
            if let Some((_, &idx)) = masks.iter().filter(|(m, _)| shape.violated(**m)).min_by_key(|(_, &i)| i) {
                witness = Some(witness_of(pd, idx));
            }
        }
    }
    PrifCheck {
        name: name.to_string(),
        statement: shape.render(),
        status: Status::from_bool(witness.is_none()),
        witness,
        domains: used,
        maps,
    }
}

/// Exhaustive check of the implications between the inclusion axioms.
pub fn prif_oracle() -> PrifReport {
    prif_oracle_on(&prif_domains())
}

pub fn prif_oracle_on(domains: &[PrifDomain]) -> PrifReport {
    let census: Vec<BTreeMap<u16, u64>> = domains.iter().map(|pd| mask_census(pd, &Axiom::ALL)).collect();
    let statements = prif_statements();
    let theorems = statements.iter().map(|(n, s)| evaluate(n, s, domains, &census)).collect();
    let mut premise_drops = Vec::new();
    for (n, s) in &statements {
        for (i, p) in s.premises().iter().enumerate() {
            let name = format!("{n} without {}", p.name());
            premise_drops.push(evaluate(&name, &s.drop_premise(i), domains, &census));
        }
    }
    let readings = vec![
        evaluate("R5-verbatim unsatisfiable", &Shape::Never(vec![Axiom::R5Verbatim]), domains, &census),
        evaluate(
            "R0 ∧ R6-verbatim unsatisfiable",
            &Shape::Never(vec![Axiom::R0, Axiom::R6Verbatim]),
            domains,
            &census,
        ),
    ];
    PrifReport { theorems, premise_drops, readings }
}

/// Accuracy `#(xˡ)/#(xᵘ)`, 1 when `xᵘ = ∅`.
pub fn accuracy(s: &SetHgos, x: Subset) -> UnitRational {
    UnitRational::new(ratio_or_one(s.lower_set(x).len(), s.upper_set(x).len())).expect("lower within upper")
}

/// `μ(a,b) = 1 − ν(a,b)` for K0.
pub fn misclassification(a: Subset, b: Subset) -> UnitRational {
    UnitRational::new(one() - ratio_or_one(a.intersect(b).len(), a.len())).expect("in range")
}

/// Generalized VPRS approximations over the granulation; `fixed` measures
/// against `Xˡ` instead of `X`.
pub fn vprs_approx(
    s: &SetHgos,
    f: &InclusionFn,
    x: Subset,
    alpha: UnitRational,
    beta: UnitRational,
    fixed: bool,
) -> Result<(Subset, Subset)> {
    if !(alpha.get() > zero() && alpha <= beta && beta.get() < one()) {
        return Err(Error::input("VPRS parameters need 0 < α ≤ β < 1"));
    }
    let target = if fixed { s.lower_set(x) } else { x };
    let n = s.universe().len();
    let mut lo = Subset::EMPTY;
    let mut up = Subset::EMPTY;
    for &g in s.granulation() {
        let v = f.eval_sets(g, target, n)?;
        if v > beta.get() {
            lo = lo.union(g);
        }
        if v > alpha.get() {
            up = up.union(g);
        }
    }
    Ok((lo, up))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Low,
    Up,
    Glow,
    Gup,
    LowR,
    UpR,
    LowRg,
    UpRg,
}

impl std::str::FromStr for ParamKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ParamKind> {
        Ok(match s {
            "low" => ParamKind::Low,
            "up" => ParamKind::Up,
            "glow" => ParamKind::Glow,
            "gup" => ParamKind::Gup,
            "lowR" | "lowr" => ParamKind::LowR,
            "upR" | "upr" => ParamKind::UpR,
            "lowRg" | "lowrg" => ParamKind::LowRg,
            "upRg" | "uprg" => ParamKind::UpRg,
            _ => return Err(Error::input(format!("unknown parametric approximation `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamApprox {
    Set(Subset),
    Family(Vec<Subset>),
}

/// Pointwise, granular and tolerance-guarded parametric approximations.
///
/// The tolerance variants read the guard as `∀a (R x a → h(ξ(a), X) …)`.
pub fn parametric_approx(
    n: usize,
    xi: &[Subset],
    h: &InclusionFn,
    x: Subset,
    kind: ParamKind,
    r: Option<&BinaryRelationSpace>,
) -> Result<ParamApprox> {
    if xi.len() != n {
        return Err(Error::input("uncertainty map must cover every object"));
    }
    let vals = xi.iter().map(|&g| h.eval_sets(g, x, n)).collect::<Result<Vec<Rational>>>()?;
    let is_low = |i: usize| vals[i] == one();
    let is_up = |i: usize| vals[i] > zero();
    let guarded = |test: &dyn Fn(usize) -> bool| -> Result<Vec<usize>> {
        let r = r.ok_or_else(|| Error::input("tolerance variants need a relation R"))?;
        if r.len() != n {
            return Err(Error::input("relation universe does not match"));
        }
        if !r.is_reflexive() || !r.is_symmetric() {
            return Err(Error::input("R must be reflexive and symmetric"));
        }
        Ok((0..n).filter(|&i| r.successors(i).iter().all(test)).collect())
    };
    let pts = |v: Vec<usize>| ParamApprox::Set(Subset::from_indices(v));
    let fam = |v: Vec<usize>| {
        let mut f: Vec<Subset> = v.into_iter().map(|i| xi[i]).collect();
        f.sort();
        f.dedup();
        ParamApprox::Family(f)
    };
    let union = |v: Vec<usize>| ParamApprox::Set(v.into_iter().fold(Subset::EMPTY, |m, i| m.union(xi[i])));
    Ok(match kind {
        ParamKind::Low => pts((0..n).filter(|&i| is_low(i)).collect()),
        ParamKind::Up => pts((0..n).filter(|&i| is_up(i)).collect()),
        ParamKind::Glow => fam((0..n).filter(|&i| is_low(i)).collect()),
        ParamKind::Gup => fam((0..n).filter(|&i| is_up(i)).collect()),
        ParamKind::LowR => pts(guarded(&is_low)?),
        ParamKind::UpR => pts(guarded(&is_up)?),
        ParamKind::LowRg => union(guarded(&is_low)?),
        ParamKind::UpRg => union(guarded(&is_up)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::five_element_space;
    use crate::rational::rat;

    fn space() -> SetHgos {
        five_element_space()
    }

    fn set(s: &SetHgos, x: &str) -> Subset {
        s.universe().parse_subset(x).unwrap()
    }

    #[test]
    fn formula_values() {
        let s = space();
        let k0 = InclusionFn::K0;
        assert_eq!(eval_rif(&k0, &s, Subset::EMPTY, set(&s, "c")).unwrap(), UnitRational::one());
        assert_eq!(eval_rif(&k0, &s, set(&s, "a,b,e"), set(&s, "a,c,f")).unwrap(), UnitRational::of(1, 3));
        let kst = InclusionFn::kst(InclusionFn::K0, rat(1, 4), rat(3, 4)).unwrap();
        // K0 = 1/3 here.
        assert_eq!(eval_rif(&kst, &s, set(&s, "a,b,e"), set(&s, "a,c,f")).unwrap(), UnitRational::of(1, 6));
        assert!(InclusionFn::kst(InclusionFn::K0, rat(1, 2), rat(1, 2)).is_err());
        assert_eq!(InclusionFn::K1.eval_sets(set(&s, "a"), Subset::EMPTY, 5).unwrap(), zero());
    }

    #[test]
    fn k0_and_k1_profiles() {
        let s = space();
        let p = profile_inclusion_fn(&InclusionFn::K0, &s).unwrap();
        assert!(p.r1 && p.r2 && p.u1);
        assert_eq!(p.classification, RifClass::Rif);
        // #B = #(A∪B) ⇔ A ⊆ B on finite sets, so R1 holds for K1 as well.
        let p1 = profile_inclusion_fn(&InclusionFn::K1, &s).unwrap();
        assert!(p1.r0 && p1.r1);
        assert_eq!(p1.report.status("R1"), Some(Status::Holds));
        for a in 0u64..32 {
            for b in 0u64..32 {
                let k = InclusionFn::K1.eval_sets(Subset(a), Subset(b), 5).unwrap();
                assert_eq!(k == one(), a & !b == 0);
            }
        }
    }

    #[test]
    fn accuracy_values() {
        let s = space();
        assert_eq!(accuracy(&s, s.universe().full()), UnitRational::one());
        assert_eq!(accuracy(&s, set(&s, "a,b")), UnitRational::of(1, 3));
        assert_eq!(accuracy(&s, set(&s, "c")), UnitRational::zero());
        for x in s.elements() {
            let via_k0 = InclusionFn::K0.eval_sets(s.upper_set(x), s.lower_set(x), 5).unwrap();
            assert_eq!(accuracy(&s, x).get(), via_k0);
        }
    }

    #[test]
    fn vprs_examples() {
        let s = space();
        let half = UnitRational::of(1, 2);
        let q = UnitRational::of(1, 4);
        let (lo, _) = vprs_approx(&s, &InclusionFn::K0, set(&s, "a,b"), q, half, true).unwrap();
        assert_eq!(lo, set(&s, "a"));
        let (lo, up) = vprs_approx(&s, &InclusionFn::K0, set(&s, "c"), q, half, true).unwrap();
        assert_eq!((lo, up), (Subset::EMPTY, Subset::EMPTY));
        let (lo, up) = vprs_approx(&s, &InclusionFn::K0, set(&s, "a,c,e"), half, half, false).unwrap();
        assert_eq!(lo, up);
        assert!(vprs_approx(&s, &InclusionFn::K0, Subset::EMPTY, half, q, false).is_err());
    }

    #[test]
    fn parametric_low_on_neighborhoods() {
        let s = space();
        let rel = crate::fixtures::five_element_relation();
        let xi = crate::tables::successor_neighborhoods(&rel).sets;
        let low = parametric_approx(5, &xi, &InclusionFn::K0, set(&s, "a,b,e"), ParamKind::Low, None).unwrap();
        assert_eq!(low, ParamApprox::Set(set(&s, "a,b,f")));
        let all = parametric_approx(5, &xi, &InclusionFn::K0, s.universe().full(), ParamKind::Low, None).unwrap();
        assert_eq!(all, ParamApprox::Set(s.universe().full()));
        let up = parametric_approx(5, &xi, &InclusionFn::K0, Subset::EMPTY, ParamKind::Up, None).unwrap();
        assert_eq!(up, ParamApprox::Set(Subset::EMPTY));
        assert!(parametric_approx(5, &xi, &InclusionFn::K0, Subset::EMPTY, ParamKind::LowR, None).is_err());
    }
}
