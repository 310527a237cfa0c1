//! Granular operator spaces: set-based and abstract.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::subset::{Subset, Universe};

/// Largest universe for which the full powerset is the default family.
pub const POWERSET_LIMIT: usize = 12;

/// Operations shared by every granular space.
///
/// `lower`/`upper`/`join`/`meet` return `None` where the operation is
/// undefined. Elements are enumerated in a fixed canonical order.
pub trait GranularSpace: Sync {
    type Elem: Copy + Eq + Hash + Ord + Debug + Send + Sync;

    fn elements(&self) -> Vec<Self::Elem>;
    fn granules(&self) -> Vec<Self::Elem>;
    fn lower(&self, x: Self::Elem) -> Option<Self::Elem>;
    fn upper(&self, x: Self::Elem) -> Option<Self::Elem>;
    fn part(&self, a: Self::Elem, b: Self::Elem) -> bool;
    fn leq(&self, a: Self::Elem, b: Self::Elem) -> bool;
    fn join(&self, a: Self::Elem, b: Self::Elem) -> Option<Self::Elem>;
    fn meet(&self, a: Self::Elem, b: Self::Elem) -> Option<Self::Elem>;
    fn bottom(&self) -> Self::Elem;
    fn top(&self) -> Self::Elem;
    fn label(&self, x: Self::Elem) -> String;

    /// Unique complement, when the space supplies one.
    fn complement(&self, _x: Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// Proper parthood.
    fn proper_part(&self, a: Self::Elem, b: Self::Elem) -> bool {
        self.part(a, b) && !self.part(b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Family {
    Powerset,
    Explicit(Vec<Subset>, HashSet<Subset>),
}

/// A set HGOS: union/intersection over a family of subsets, with
/// `lower(X) = ∪{g : g ⊆ X}` and `upper(X) = ∪{g : g ∩ X ≠ ∅}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetHgos {
    universe: Universe,
    family: Family,
    granules: Vec<Subset>,
}

/// Builds a set HGOS whose family is the full powerset.
pub fn build_set_hgos(universe: Universe, granulation: Vec<Subset>) -> Result<SetHgos> {
    if universe.len() > POWERSET_LIMIT {
        return Err(Error::input(format!(
            "universe of {} elements needs an explicit family (powerset default stops at {POWERSET_LIMIT})",
            universe.len()
        )));
    }
    let full = universe.full();
    if let Some(g) = granulation.iter().find(|g| !g.is_subset(full)) {
        return Err(Error::input(format!("granule {g:?} is not over the universe")));
    }
    Ok(SetHgos { universe, family: Family::Powerset, granules: dedup(granulation) })
}

fn dedup(v: Vec<Subset>) -> Vec<Subset> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|g| seen.insert(*g)).collect()
}

#[derive(Serialize, Deserialize)]
struct SetHgosJson {
    universe: Vec<String>,
    granules: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<Vec<Vec<String>>>,
}

impl SetHgos {
    /// A set HGOS over an explicit family; the family must contain every
    /// granule, `∅` and the universe.
    pub fn with_family(universe: Universe, granulation: Vec<Subset>, family: Vec<Subset>) -> Result<SetHgos> {
        let full = universe.full();
        let family = dedup(family);
        if family.iter().any(|f| !f.is_subset(full)) {
            return Err(Error::input("family member not over the universe"));
        }
        let set: HashSet<Subset> = family.iter().copied().collect();
        if !set.contains(&Subset::EMPTY) || !set.contains(&full) {
            return Err(Error::input("family must contain the empty set and the universe"));
        }
        if let Some(g) = granulation.iter().find(|g| !set.contains(g)) {
            return Err(Error::input(format!("granule {g:?} outside the family")));
        }
        Ok(SetHgos { universe, family: Family::Explicit(family, set), granules: dedup(granulation) })
    }

    /// Reads `{"universe":[...],"granules":[[...],...]}` with an optional `family`.
    pub fn from_json(s: &str) -> Result<SetHgos> {
        let j: SetHgosJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("space json: {e}")))?;
        SetHgos::from_parts(j)
    }

    fn from_parts(j: SetHgosJson) -> Result<SetHgos> {
        let universe = Universe::new(j.universe)?;
        let granules = j.granules.iter().map(|g| universe.subset(g)).collect::<Result<Vec<_>>>()?;
        match j.family {
            None => build_set_hgos(universe, granules),
            Some(f) => {
                let fam = f.iter().map(|g| universe.subset(g)).collect::<Result<Vec<_>>>()?;
                SetHgos::with_family(universe, granules, fam)
            }
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = SetHgosJson {
            universe: self.universe.labels().to_vec(),
            granules: self.granules.iter().map(|g| self.universe.names(*g)).collect(),
            family: match &self.family {
                Family::Powerset => None,
                Family::Explicit(f, _) => Some(f.iter().map(|g| self.universe.names(*g)).collect()),
            },
        };
        serde_json::to_value(j).expect("plain data")
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn granulation(&self) -> &[Subset] {
        &self.granules
    }

    pub fn is_powerset(&self) -> bool {
        self.family == Family::Powerset
    }

    pub fn in_family(&self, x: Subset) -> bool {
        match &self.family {
            Family::Powerset => x.is_subset(self.universe.full()),
            Family::Explicit(_, set) => set.contains(&x),
        }
    }

    pub fn lower_set(&self, x: Subset) -> Subset {
        self.granules.iter().filter(|g| g.is_subset(x)).fold(Subset::EMPTY, |m, g| m.union(*g))
    }

    pub fn upper_set(&self, x: Subset) -> Subset {
        self.granules.iter().filter(|g| g.meets(x)).fold(Subset::EMPTY, |m, g| m.union(*g))
    }

    pub fn is_definite(&self, x: Subset) -> bool {
        self.lower_set(x) == x && self.upper_set(x) == x
    }

    /// `X ⊆ upper(X)` for every family member.
    pub fn upper_is_extensive(&self) -> bool {
        self.elements().into_iter().all(|x| x.is_subset(self.upper_set(x)))
    }

    /// Lifts to explicit tables; intended for small families.
    pub fn to_abstract(&self) -> AbstractGgs {
        let elems = self.elements();
        let idx: HashMap<Subset, usize> = elems.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let n = elems.len();
        let lookup = |s: Subset| idx.get(&s).copied();
        let rel = |f: &dyn Fn(Subset, Subset) -> bool| -> Vec<Vec<bool>> {
            elems.iter().map(|&a| elems.iter().map(|&b| f(a, b)).collect()).collect()
        };
        let op = |f: &dyn Fn(Subset, Subset) -> Subset| -> Vec<Vec<Option<usize>>> {
            elems.iter().map(|&a| elems.iter().map(|&b| lookup(f(a, b))).collect()).collect()
        };
        let granules: HashSet<Subset> = self.granules.iter().copied().collect();
        AbstractGgs {
            carrier: elems.iter().map(|e| self.universe.show(*e)).collect(),
            parthood: rel(&|a, b| a.is_subset(b)),
            leq: rel(&|a, b| a.is_subset(b)),
            join: op(&|a, b| a.union(b)),
            meet: op(&|a, b| a.intersect(b)),
            lower: elems.iter().map(|&e| lookup(self.lower_set(e))).collect(),
            upper: elems.iter().map(|&e| lookup(self.upper_set(e))).collect(),
            gamma: elems.iter().map(|e| granules.contains(e)).collect(),
            bottom: idx[&Subset::EMPTY],
            top: idx[&self.universe.full()],
        }
        .with_len_check(n)
    }
}

impl GranularSpace for SetHgos {
    type Elem = Subset;

    fn elements(&self) -> Vec<Subset> {
        match &self.family {
            Family::Powerset => Subset::all(self.universe.len()).collect(),
            Family::Explicit(f, _) => f.clone(),
        }
    }

    fn granules(&self) -> Vec<Subset> {
        self.granules.clone()
    }

    fn lower(&self, x: Subset) -> Option<Subset> {
        Some(self.lower_set(x)).filter(|r| self.in_family(*r))
    }

    fn upper(&self, x: Subset) -> Option<Subset> {
        Some(self.upper_set(x)).filter(|r| self.in_family(*r))
    }

    fn part(&self, a: Subset, b: Subset) -> bool {
        a.is_subset(b)
    }

    fn leq(&self, a: Subset, b: Subset) -> bool {
        a.is_subset(b)
    }

    fn join(&self, a: Subset, b: Subset) -> Option<Subset> {
        Some(a.union(b)).filter(|r| self.in_family(*r))
    }

    fn meet(&self, a: Subset, b: Subset) -> Option<Subset> {
        Some(a.intersect(b)).filter(|r| self.in_family(*r))
    }

    fn bottom(&self) -> Subset {
        Subset::EMPTY
    }

    fn top(&self) -> Subset {
        self.universe.full()
    }

    fn label(&self, x: Subset) -> String {
        self.universe.show(x)
    }

    fn complement(&self, x: Subset) -> Option<Subset> {
        Some(x.complement(self.universe.len())).filter(|r| self.in_family(*r))
    }
}

/// A row of the grouped approximation table: every family member with the
/// given lower and upper approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxRow {
    pub members: Vec<Subset>,
    pub lower: Subset,
    pub upper: Subset,
}

/// Groups the family by `(lower, upper)`, rows in order of first appearance.
pub fn approximation_table(s: &SetHgos) -> Vec<ApproxRow> {
    let mut rows: Vec<ApproxRow> = Vec::new();
    let mut at: HashMap<(Subset, Subset), usize> = HashMap::new();
    for x in s.elements() {
        let key = (s.lower_set(x), s.upper_set(x));
        match at.get(&key) {
            Some(&i) => rows[i].members.push(x),
            None => {
                at.insert(key, rows.len());
                rows.push(ApproxRow { members: vec![x], lower: key.0, upper: key.1 });
            }
        }
    }
    rows
}

/// JSON export of [`approximation_table`] with element labels.
pub fn approximation_table_json(s: &SetHgos) -> serde_json::Value {
    let u = s.universe();
    let rows: Vec<serde_json::Value> = approximation_table(s)
        .iter()
        .map(|r| {
            serde_json::json!({
                "members": r.members.iter().map(|m| u.names(*m)).collect::<Vec<_>>(),
                "lower": u.names(r.lower),
                "upper": u.names(r.upper),
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// A granular space given by explicit predicate and operation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractGgs {
    pub carrier: Vec<String>,
    pub parthood: Vec<Vec<bool>>,
    pub leq: Vec<Vec<bool>>,
    pub join: Vec<Vec<Option<usize>>>,
    pub meet: Vec<Vec<Option<usize>>>,
    pub lower: Vec<Option<usize>>,
    pub upper: Vec<Option<usize>>,
    pub gamma: Vec<bool>,
    pub bottom: usize,
    pub top: usize,
}

#[derive(Serialize, Deserialize)]
struct AbstractJson {
    carrier: Vec<String>,
    parthood: Vec<(String, String)>,
    #[serde(default)]
    leq: Option<Vec<(String, String)>>,
    #[serde(default)]
    join: Vec<(String, String, String)>,
    #[serde(default)]
    meet: Vec<(String, String, String)>,
    #[serde(default)]
    lower: Vec<(String, String)>,
    #[serde(default)]
    upper: Vec<(String, String)>,
    #[serde(default)]
    granules: Vec<String>,
    bottom: String,
    top: String,
}

impl AbstractGgs {
    fn with_len_check(self, n: usize) -> AbstractGgs {
        debug_assert_eq!(self.carrier.len(), n);
        self
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.carrier
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::input(format!("`{label}` not in carrier")))
    }

    /// Reads the pair/triple JSON layout; a missing `leq` defaults to parthood.
    pub fn from_json(s: &str) -> Result<AbstractGgs> {
        let j: AbstractJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("ggs json: {e}")))?;
        let n = j.carrier.len();
        let mut seen = HashSet::new();
        if j.carrier.iter().any(|c| !seen.insert(c)) {
            return Err(Error::input("duplicate carrier element"));
        }
        let idx: HashMap<&str, usize> = j.carrier.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let get = |t: &str| idx.get(t).copied().ok_or_else(|| Error::input(format!("`{t}` not in carrier")));
        let pred = |pairs: &[(String, String)]| -> Result<Vec<Vec<bool>>> {
            let mut t = vec![vec![false; n]; n];
            for (a, b) in pairs {
                t[get(a)?][get(b)?] = true;
            }
            Ok(t)
        };
        let binop = |rows: &[(String, String, String)]| -> Result<Vec<Vec<Option<usize>>>> {
            let mut t = vec![vec![None; n]; n];
            for (a, b, c) in rows {
                let (a, b, c) = (get(a)?, get(b)?, get(c)?);
                if t[a][b].is_some_and(|o| o != c) {
                    return Err(Error::input("conflicting operation entries"));
                }
                t[a][b] = Some(c);
            }
            Ok(t)
        };
        let unop = |rows: &[(String, String)]| -> Result<Vec<Option<usize>>> {
            let mut t = vec![None; n];
            for (a, b) in rows {
                let (a, b) = (get(a)?, get(b)?);
                if t[a].is_some_and(|o| o != b) {
                    return Err(Error::input("conflicting approximation entries"));
                }
                t[a] = Some(b);
            }
            Ok(t)
        };
        let parthood = pred(&j.parthood)?;
        let leq = match &j.leq {
            Some(l) => pred(l)?,
            None => parthood.clone(),
        };
        let mut gamma = vec![false; n];
        for g in &j.granules {
            gamma[get(g)?] = true;
        }
        Ok(AbstractGgs {
            parthood,
            leq,
            join: binop(&j.join)?,
            meet: binop(&j.meet)?,
            lower: unop(&j.lower)?,
            upper: unop(&j.upper)?,
            gamma,
            bottom: get(&j.bottom)?,
            top: get(&j.top)?,
            carrier: j.carrier,
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let c = |i: usize| self.carrier[i].clone();
        let n = self.len();
        let pairs = |t: &Vec<Vec<bool>>| -> Vec<(String, String)> {
            (0..n).flat_map(|a| (0..n).filter(move |&b| t[a][b]).map(move |b| (a, b))).map(|(a, b)| (c(a), c(b))).collect()
        };
        let triples = |t: &Vec<Vec<Option<usize>>>| -> Vec<(String, String, String)> {
            let mut out = Vec::new();
            for (a, row) in t.iter().enumerate() {
                for (b, cell) in row.iter().enumerate() {
                    if let Some(r) = cell {
                        out.push((c(a), c(b), c(*r)));
                    }
                }
            }
            out
        };
        let un = |t: &Vec<Option<usize>>| -> Vec<(String, String)> {
            (0..n).filter_map(|a| t[a].map(|r| (c(a), c(r)))).collect()
        };
        let j = AbstractJson {
            carrier: self.carrier.clone(),
            parthood: pairs(&self.parthood),
            leq: Some(pairs(&self.leq)),
            join: triples(&self.join),
            meet: triples(&self.meet),
            lower: un(&self.lower),
            upper: un(&self.upper),
            granules: (0..n).filter(|&i| self.gamma[i]).map(c).collect(),
            bottom: c(self.bottom),
            top: c(self.top),
        };
        serde_json::to_value(j).expect("plain data")
    }

    /// Parthood coincides with the order.
    pub fn is_gs_shaped(&self) -> bool {
        self.parthood == self.leq
    }
}

impl GranularSpace for AbstractGgs {
    type Elem = usize;

    fn elements(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn granules(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.gamma[i]).collect()
    }

    fn lower(&self, x: usize) -> Option<usize> {
        self.lower[x]
    }

    fn upper(&self, x: usize) -> Option<usize> {
        self.upper[x]
    }

    fn part(&self, a: usize, b: usize) -> bool {
        self.parthood[a][b]
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.join[a][b]
    }

    fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.meet[a][b]
    }

    fn bottom(&self) -> usize {
        self.bottom
    }

    fn top(&self) -> usize {
        self.top
    }

    fn label(&self, x: usize) -> String {
        self.carrier[x].clone()
    }
}

/// Which axiom set [`check_ggs_axioms`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomMode {
    Ggs,
    /// GGS axioms plus parthood = order.
    Gs,
    PreGgs,
    PreGs,
}

fn omega_eq<E: PartialEq>(l: Option<E>, r: Option<E>) -> bool {
    match (l, r) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    }
}

fn bind<E: Copy>(x: Option<E>, f: impl Fn(E) -> Option<E>) -> Option<E> {
    x.and_then(f)
}

/// Per-axiom evaluation with witnesses.
///
/// Partial-operation axioms are ω-equalities. In G5 a defined `a∨b` or
/// `a∧b` must agree with `≤`, and `a ≤ b` forces those that are defined to
/// take the expected value. Atomic predicates on undefined terms are false.
pub fn check_ggs_axioms<S: GranularSpace>(s: &S, mode: AxiomMode) -> Report {
    let es = s.elements();
    let lab = |x: S::Elem| s.label(x);
    let w1 = |a: S::Elem| vec![lab(a)];
    let w2 = |a: S::Elem, b: S::Elem| vec![lab(a), lab(b)];
    let pairs = || es.iter().flat_map(|&a| es.iter().map(move |&b| (a, b)));
    let triple_witness = |f: &(dyn Fn(S::Elem, S::Elem, S::Elem) -> bool + Sync)| -> Option<Vec<String>> {
        let n = es.len();
        crate::par::find_first(n, |i| {
            let a = es[i];
            for &b in &es {
                for &c in &es {
                    if !f(a, b, c) {
                        return Some(vec![lab(a), lab(b), lab(c)]);
                    }
                }
            }
            None
        })
    };
    let (j, m) = (|a, b| s.join(a, b), |a, b| s.meet(a, b));
    let (l, u) = (|a| s.lower(a), |a| s.upper(a));
    let p = |a: Option<S::Elem>, b: Option<S::Elem>| matches!((a, b), (Some(x), Some(y)) if s.part(x, y));

    let mut r = Report::new();
    r.push(Check::from_witness("PT1", es.iter().find(|&&x| !s.part(x, x)).map(|&x| w1(x))));
    r.push(Check::from_witness(
        "PT2",
        pairs().find(|&(a, b)| a != b && s.part(a, b) && s.part(b, a)).map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "G1",
        pairs()
            .find(|&(a, b)| !omega_eq(j(a, b), j(b, a)) || !omega_eq(m(a, b), m(b, a)))
            .map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "G2",
        pairs()
            .find(|&(a, b)| {
                !omega_eq(bind(j(a, b), |x| m(x, a)), Some(a)) || !omega_eq(bind(m(a, b), |x| j(x, a)), Some(a))
            })
            .map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "G3",
        triple_witness(&|a, b, c| {
            let rhs = match (j(a, c), j(b, c)) {
                (Some(x), Some(y)) => m(x, y),
                _ => None,
            };
            omega_eq(bind(m(a, b), |x| j(x, c)), rhs)
        }),
    ));
    r.push(Check::from_witness(
        "G4",
        triple_witness(&|a, b, c| {
            let rhs = match (m(a, c), m(b, c)) {
                (Some(x), Some(y)) => j(x, y),
                _ => None,
            };
            omega_eq(bind(j(a, b), |x| m(x, c)), rhs)
        }),
    ));
    r.push(Check::from_witness(
        "G5",
        pairs()
            .find(|&(a, b)| {
                let le = s.leq(a, b);
                let jb = j(a, b).map(|x| x == b);
                let ma = m(a, b).map(|x| x == a);
                (le && (jb == Some(false) || ma == Some(false))) || (!le && (jb == Some(true) || ma == Some(true)))
            })
            .map(|(a, b)| w2(a, b)),
    ));

    let (bot, top) = (s.bottom(), s.top());
    let pre = matches!(mode, AxiomMode::PreGgs | AxiomMode::PreGs);
    if !pre {
        r.push(Check::from_witness(
            "UL1",
            es.iter()
                .find(|&&a| {
                    let al = l(a);
                    !(p(al, Some(a)) && al.is_some() && bind(al, l) == al && p(u(a), bind(u(a), u)))
                })
                .map(|&a| w1(a)),
        ));
        r.push(Check::from_witness(
            "UL2",
            pairs()
                .find(|&(a, b)| s.part(a, b) && !(p(l(a), l(b)) && p(u(a), u(b))))
                .map(|(a, b)| w2(a, b)),
        ));
    } else {
        r.push(Check::from_witness(
            "PL0",
            es.iter().find(|&&a| l(a).is_some() && !p(l(a), Some(a))).map(|&a| w1(a)),
        ));
        r.push(Check::from_witness(
            "PU0",
            es.iter().find(|&&a| u(a).is_some() && !p(u(a), bind(u(a), u))).map(|&a| w1(a)),
        ));
        r.push(Check::from_witness(
            "PL1",
            es.iter().find(|&&a| !omega_eq(bind(l(a), l), l(a))).map(|&a| w1(a)),
        ));
        r.push(Check::from_witness(
            "PUL2",
            pairs()
                .find(|&(a, b)| {
                    let defined = l(a).is_some() && l(b).is_some() && u(a).is_some() && u(b).is_some();
                    s.part(a, b) && defined && !(p(l(a), l(b)) && p(u(a), u(b)))
                })
                .map(|(a, b)| w2(a, b)),
        ));
    }
    let ul3 = l(bot) == Some(bot) && u(bot) == Some(bot) && p(l(top), Some(top)) && p(u(top), Some(top));
    r.push(if ul3 { Check::holds("UL3") } else { Check::fails("UL3", vec![lab(bot), lab(top)]) });
    r.push(Check::from_witness(
        "TB",
        es.iter().find(|&&a| !(s.part(bot, a) && s.part(a, top))).map(|&a| w1(a)),
    ));
    if matches!(mode, AxiomMode::Gs | AxiomMode::PreGs) {
        r.push(Check::from_witness(
            "P=≤",
            pairs().find(|&(a, b)| s.part(a, b) != s.leq(a, b)).map(|(a, b)| w2(a, b)),
        ));
    }
    r
}

/// Options for [`check_admissibility`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AdmissibilityOptions {
    /// Also quantify FU over pairs `(g, g)`.
    pub fu_include_equal_pairs: bool,
}

/// The elements reachable as finite joins of granules; `⊥` stands for the
/// empty join.
pub fn granule_joins<S: GranularSpace>(s: &S) -> HashSet<S::Elem> {
    let gs = s.granules();
    let mut closed: HashSet<S::Elem> = gs.iter().copied().collect();
    closed.insert(s.bottom());
    let mut frontier: Vec<S::Elem> = closed.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        for &g in &gs {
            if let Some(y) = s.join(x, g) {
                if closed.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    closed
}

/// WRA (join-of-granules terms), LS and FU.
pub fn check_admissibility<S: GranularSpace>(s: &S, opts: AdmissibilityOptions) -> Report {
    let es = s.elements();
    let gs = s.granules();
    let joins = granule_joins(s);
    let mut r = Report::new();

    let wra = es.iter().find(|&&x| {
        !matches!(s.lower(x), Some(y) if joins.contains(&y)) || !matches!(s.upper(x), Some(y) if joins.contains(&y))
    });
    r.push(
        Check::from_witness("WRA", wra.map(|&x| vec![s.label(x)]))
            .with_note("terms restricted to joins of granules; the empty join is the bottom"),
    );

    let ls = gs
        .iter()
        .flat_map(|&g| es.iter().map(move |&x| (g, x)))
        .find(|&(g, x)| s.part(g, x) && !matches!(s.lower(x), Some(xl) if s.part(g, xl)));
    r.push(Check::from_witness("LS", ls.map(|(g, x)| vec![s.label(g), s.label(x)])));

    let definite: Vec<S::Elem> =
        es.iter().copied().filter(|&z| s.lower(z) == Some(z) && s.upper(z) == Some(z)).collect();
    let pairs: Vec<(S::Elem, S::Elem)> = gs
        .iter()
        .enumerate()
        .flat_map(|(i, &g)| gs.iter().enumerate().map(move |(k, &h)| (i, g, k, h)))
        .filter(|&(i, _, k, _)| i < k || (opts.fu_include_equal_pairs && i == k))
        .map(|(_, g, _, h)| (g, h))
        .collect();
    if pairs.is_empty() {
        r.push(Check::vacuous("FU", "fewer than two granules; no pair to underlap"));
    } else {
        let fu = pairs
            .iter()
            .find(|&&(g, h)| !definite.iter().any(|&z| s.proper_part(g, z) && s.proper_part(h, z)));
        let mut c = Check::from_witness("FU", fu.map(|&(g, h)| vec![s.label(g), s.label(h)]));
        if opts.fu_include_equal_pairs {
            c = c.with_note("pairs (g, g) included");
        }
        r.push(c);
    }
    r
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DefinitenessFlags {
    pub lower_definite: bool,
    pub upper_definite: bool,
    pub definite: bool,
    pub weakly_upper_definite: bool,
    pub weakly_definite: bool,
}

pub fn classify_definiteness<S: GranularSpace>(s: &S, x: S::Elem) -> DefinitenessFlags {
    let (xl, xu) = (s.lower(x), s.upper(x));
    let xuu = xu.and_then(|y| s.upper(y));
    let lower_definite = xl == Some(x);
    let upper_definite = xu == Some(x);
    let weakly_upper_definite = xu.is_some() && xu == xuu;
    DefinitenessFlags {
        lower_definite,
        upper_definite,
        definite: lower_definite && upper_definite,
        weakly_upper_definite,
        weakly_definite: weakly_upper_definite && lower_definite,
    }
}

/// Which of the five definiteness notions counts as crisp.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Crispness {
    LowerDefinite,
    UpperDefinite,
    #[default]
    Definite,
    WeaklyUpperDefinite,
    WeaklyDefinite,
}

impl Crispness {
    pub fn holds(self, f: DefinitenessFlags) -> bool {
        match self {
            Crispness::LowerDefinite => f.lower_definite,
            Crispness::UpperDefinite => f.upper_definite,
            Crispness::Definite => f.definite,
            Crispness::WeaklyUpperDefinite => f.weakly_upper_definite,
            Crispness::WeaklyDefinite => f.weakly_definite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoughObjectKind {
    RL,
    RU,
    RW,
    RB,
    RD,
    RP,
    RIA,
    RI,
    ET,
    RND,
}

impl std::str::FromStr for RoughObjectKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "RL" => RoughObjectKind::RL,
            "RU" => RoughObjectKind::RU,
            "RW" => RoughObjectKind::RW,
            "RB" => RoughObjectKind::RB,
            "RD" => RoughObjectKind::RD,
            "RP" => RoughObjectKind::RP,
            "RIA" => RoughObjectKind::RIA,
            "RI" => RoughObjectKind::RI,
            "ET" => RoughObjectKind::ET,
            "RND" => RoughObjectKind::RND,
            _ => return Err(Error::input(format!("unknown rough object kind `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoughObject<E> {
    Element(E),
    Pair(E, E),
    Interval { lo: E, hi: E, members: Vec<E> },
    Triple(E, E, E),
}

impl<E: Copy> RoughObject<E> {
    pub fn render(&self, label: impl Fn(E) -> String) -> serde_json::Value {
        use serde_json::json;
        match self {
            RoughObject::Element(x) => json!(label(*x)),
            RoughObject::Pair(a, b) => json!([label(*a), label(*b)]),
            RoughObject::Interval { lo, hi, members } => json!({
                "lo": label(*lo), "hi": label(*hi),
                "members": members.iter().map(|m| label(*m)).collect::<Vec<_>>()
            }),
            RoughObject::Triple(a, b, c) => json!([label(*a), label(*b), label(*c)]),
        }
    }
}

/// The ten rough-object representations, with `crisp` fixing the notion of
/// definiteness used by RD and RI. Elements with an undefined approximation
/// are skipped.
pub fn rough_objects<S: GranularSpace>(s: &S, kind: RoughObjectKind, crisp: Crispness) -> Vec<RoughObject<S::Elem>> {
    let es = s.elements();
    let approx = |x: S::Elem| Some((s.lower(x)?, s.upper(x)?));
    let interval = |lo: S::Elem, hi: S::Elem| RoughObject::Interval {
        lo,
        hi,
        members: es.iter().copied().filter(|&z| s.leq(lo, z) && s.leq(z, hi)).collect(),
    };
    let crisp_elems: Vec<S::Elem> =
        es.iter().copied().filter(|&x| crisp.holds(classify_definiteness(s, x))).collect();
    let ordered_pairs = |strict: bool| -> Vec<(S::Elem, S::Elem)> {
        crisp_elems
            .iter()
            .flat_map(|&a| crisp_elems.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| s.leq(a, b) && (!strict || a != b))
            .collect()
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &x in &es {
        let Some((xl, xu)) = approx(x) else { continue };
        let obj = match kind {
            RoughObjectKind::RL => (xl != x).then_some(RoughObject::Element(x)),
            RoughObjectKind::RU => (x != xu).then_some(RoughObject::Element(x)),
            RoughObjectKind::RW => match s.upper(xu) {
                Some(xuu) if xuu != xu => Some(RoughObject::Element(x)),
                _ => None,
            },
            RoughObjectKind::RB => (xl != xu).then_some(RoughObject::Element(x)),
            RoughObjectKind::RND => (!s.part(xu, xl)).then_some(RoughObject::Element(x)),
            RoughObjectKind::RP => (xl != xu).then_some(RoughObject::Pair(xl, xu)),
            RoughObjectKind::RIA => Some(interval(xl, xu)),
            RoughObjectKind::ET => s.upper(xl).map(|xlu| RoughObject::Triple(xl, xlu, xu)),
            RoughObjectKind::RD | RoughObjectKind::RI => None,
        };
        if let Some(o) = obj {
            let key = format!("{o:?}");
            if seen.insert(key) {
                out.push(o);
            }
        }
    }
    match kind {
        RoughObjectKind::RD => ordered_pairs(true).into_iter().map(|(a, b)| RoughObject::Pair(a, b)).collect(),
        RoughObjectKind::RI => ordered_pairs(false).into_iter().map(|(a, b)| interval(a, b)).collect(),
        _ => out,
    }
}

/// True iff every member of `domain` is definite.
pub fn check_careful_measure<S: GranularSpace>(domain: &[S::Elem], s: &S) -> bool {
    domain.iter().all(|&x| classify_definiteness(s, x).definite)
}

/// Result of [`complete_and_quotient`].
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: AbstractGgs,
    /// Class index of each input element.
    pub class_of: Vec<usize>,
    /// Index of the class `[o]`.
    pub o_class: usize,
    /// The minimal elements with an approximation sent to `o`.
    pub h: Vec<usize>,
}

/// One-point completion of a Pre-GS followed by the quotient that makes it
/// a GS.
///
/// Undefined approximations go to a fresh `o`; `H` is the set of minimal
/// elements whose lower or upper approximation is `o`; the class `[o]`
/// gathers `o`, `H` and every `z` with `𝐏 h z` for some `h ∈ H`. The
/// quotient keeps each remaining element as its own class, sets
/// `[o]ˡ = [o]ᵘ = [o]`, `𝐏 x [o]` for all `x`, and makes `[o]` the top.
/// Joins and meets are inherited where both arguments and the result stay
/// outside `[o]`.
pub fn complete_and_quotient(g: &AbstractGgs) -> Result<Quotient> {
    if !g.is_gs_shaped() {
        return Err(Error::precondition("parthood must coincide with the order (Pre-GS)"));
    }
    let n = g.len();
    let undefined: Vec<usize> = (0..n).filter(|&x| g.lower[x].is_none() || g.upper[x].is_none()).collect();
    let h: Vec<usize> = undefined
        .iter()
        .copied()
        .filter(|&x| !undefined.iter().any(|&y| y != x && g.parthood[y][x] && !g.parthood[x][y]))
        .collect();
    let in_o: Vec<bool> = (0..n).map(|z| h.iter().any(|&x| x == z || g.parthood[x][z])).collect();

    let mut class_of = vec![0; n];
    let mut carrier = Vec::new();
    let mut rep = Vec::new();
    for x in 0..n {
        if !in_o[x] {
            class_of[x] = carrier.len();
            carrier.push(g.carrier[x].clone());
            rep.push(x);
        }
    }
    let o_class = carrier.len();
    let mut o_label = "[o]".to_string();
    while g.carrier.contains(&o_label) {
        o_label.push('\'');
    }
    carrier.push(o_label);
    for x in 0..n {
        if in_o[x] {
            class_of[x] = o_class;
        }
    }
    let m = carrier.len();
    let cls = |x: Option<usize>| x.map(|y| class_of[y]).unwrap_or(o_class);

    let mut parthood = vec![vec![false; m]; m];
    for (i, &x) in rep.iter().enumerate() {
        for (k, &z) in rep.iter().enumerate() {
            parthood[i][k] = g.parthood[x][z];
        }
    }
    for row in parthood.iter_mut() {
        row[o_class] = true;
    }
    let op = |t: &Vec<Vec<Option<usize>>>| -> Vec<Vec<Option<usize>>> {
        let mut q = vec![vec![None; m]; m];
        for (i, &x) in rep.iter().enumerate() {
            for (k, &z) in rep.iter().enumerate() {
                q[i][k] = t[x][z].filter(|&r| !in_o[r]).map(|r| class_of[r]);
            }
        }
        q[o_class][o_class] = Some(o_class);
        q
    };
    let mut lower: Vec<Option<usize>> = rep.iter().map(|&x| Some(cls(g.lower[x]))).collect();
    let mut upper: Vec<Option<usize>> = rep.iter().map(|&x| Some(cls(g.upper[x]))).collect();
    lower.push(Some(o_class));
    upper.push(Some(o_class));
    let mut gamma: Vec<bool> = rep.iter().map(|&x| g.gamma[x]).collect();
    gamma.push((0..n).any(|x| in_o[x] && g.gamma[x]));

    let space = AbstractGgs {
        carrier,
        leq: parthood.clone(),
        parthood,
        join: op(&g.join),
        meet: op(&g.meet),
        lower,
        upper,
        gamma,
        bottom: class_of[g.bottom],
        top: o_class,
    };
    Ok(Quotient { space, class_of, o_class, h })
}

/// A total map between the carriers of two spaces.
pub struct GgsMorphism<'a, S: GranularSpace, T: GranularSpace> {
    pub source: &'a S,
    pub target: &'a T,
    map: HashMap<S::Elem, T::Elem>,
}

impl<'a, S: GranularSpace, T: GranularSpace> GgsMorphism<'a, S, T> {
    pub fn new(source: &'a S, target: &'a T, f: impl Fn(S::Elem) -> T::Elem) -> Self {
        let map = source.elements().into_iter().map(|x| (x, f(x))).collect();
        GgsMorphism { source, target, map }
    }

    pub fn from_pairs(source: &'a S, target: &'a T, pairs: &[(S::Elem, T::Elem)]) -> Result<Self> {
        let map: HashMap<_, _> = pairs.iter().copied().collect();
        if let Some(x) = source.elements().into_iter().find(|x| !map.contains_key(x)) {
            return Err(Error::input(format!("map undefined on {}", source.label(x))));
        }
        Ok(GgsMorphism { source, target, map })
    }

    pub fn apply(&self, x: S::Elem) -> T::Elem {
        self.map[&x]
    }
}

/// Verifies the morphism conditions; `closed` adds the closedness checks.
pub fn check_morphism<S: GranularSpace, T: GranularSpace>(m: &GgsMorphism<S, T>, closed: bool) -> Report {
    let (s, t) = (m.source, m.target);
    let es = s.elements();
    let f = |x: S::Elem| m.apply(x);
    let w1 = |a: S::Elem| vec![s.label(a)];
    let w2 = |a: S::Elem, b: S::Elem| vec![s.label(a), s.label(b)];
    let pairs = || es.iter().flat_map(|&a| es.iter().map(move |&b| (a, b)));
    let img_eq = |src: Option<S::Elem>, tgt: Option<T::Elem>| match src {
        Some(x) => tgt == Some(f(x)),
        None => true,
    };
    let mut r = Report::new();
    r.push(Check::from_witness(
        "lu-morphism",
        es.iter()
            .find(|&&a| !img_eq(s.lower(a), t.lower(f(a))) || !img_eq(s.upper(a), t.upper(f(a))))
            .map(|&a| w1(a)),
    ));
    r.push(Check::from_witness(
        "P-morphism",
        pairs().find(|&(a, b)| s.part(a, b) && !t.part(f(a), f(b))).map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "≤-morphism",
        pairs().find(|&(a, b)| s.leq(a, b) && !t.leq(f(a), f(b))).map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "weak ∨-morphism",
        pairs().find(|&(a, b)| !omega_eq(s.join(a, b).map(f), t.join(f(a), f(b)))).map(|(a, b)| w2(a, b)),
    ));
    r.push(Check::from_witness(
        "weak ∧-morphism",
        pairs().find(|&(a, b)| !omega_eq(s.meet(a, b).map(f), t.meet(f(a), f(b)))).map(|(a, b)| w2(a, b)),
    ));
    let zero_ok = f(s.bottom()) == t.bottom() && f(s.top()) == t.top();
    r.push(if zero_ok {
        Check::holds("(0)")
    } else {
        Check::fails("(0)", vec![s.label(s.bottom()), s.label(s.top())])
    });
    if closed {
        r.push(Check::from_witness(
            "closed ∨",
            pairs().find(|&(a, b)| t.join(f(a), f(b)).is_some() && s.join(a, b).is_none()).map(|(a, b)| w2(a, b)),
        ));
        r.push(Check::from_witness(
            "closed ∧",
            pairs().find(|&(a, b)| t.meet(f(a), f(b)).is_some() && s.meet(a, b).is_none()).map(|(a, b)| w2(a, b)),
        ));
        r.push(Check::from_witness(
            "closed l/u",
            es.iter()
                .find(|&&a| {
                    (t.lower(f(a)).is_some() && s.lower(a).is_none()) || (t.upper(f(a)).is_some() && s.upper(a).is_none())
                })
                .map(|&a| w1(a)),
        ));
    }
    r
}

/// Cardinality transported through a morphism into a set HGOS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhiCardinality {
    pub value: usize,
    pub closed: bool,
}

pub fn phi_cardinality<S: GranularSpace>(m: &GgsMorphism<S, SetHgos>, a: S::Elem) -> Result<PhiCardinality> {
    let report = check_morphism(m, false);
    if let Some(f) = report.failures().next() {
        return Err(Error::precondition(format!("not a morphism: {} fails", f.name)));
    }
    Ok(PhiCardinality { value: m.apply(a).len(), closed: check_morphism(m, true).all_ok() })
}

/// A set rendered as sorted labels; used for stable comparisons in reports.
pub fn family_labels(u: &Universe, fam: &[Subset]) -> BTreeSet<String> {
    fam.iter().map(|s| u.show(*s)).collect()
}
