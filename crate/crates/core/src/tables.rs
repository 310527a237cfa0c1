//! Information tables, relations, covers and valuation algebras.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::subset::{Subset, Universe};

/// Objects × attributes → finite sets of value tokens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationTable {
    objects: Vec<String>,
    attributes: Vec<String>,
    /// `cells[o][a]`.
    cells: Vec<Vec<BTreeSet<String>>>,
}

impl InformationTable {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        cells: Vec<Vec<BTreeSet<String>>>,
    ) -> Result<InformationTable> {
        check_unique(&objects, "object")?;
        check_unique(&attributes, "attribute")?;
        if cells.len() != objects.len() || cells.iter().any(|r| r.len() != attributes.len()) {
            return Err(Error::input("valuation grid does not match objects × attributes"));
        }
        Ok(InformationTable { objects, attributes, cells })
    }

    /// Reads CSV: header row of attribute ids after a leading object column,
    /// cells hold `|`-separated tokens, an empty cell is the empty set.
    pub fn from_csv<R: std::io::Read>(rdr: R) -> Result<InformationTable> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(rdr);
        let header = r.headers().map_err(|e| Error::input(format!("csv: {e}")))?.clone();
        if header.is_empty() {
            return Err(Error::input("csv: missing header row"));
        }
        let attributes: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let mut objects = Vec::new();
        let mut cells = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::input(format!("csv: {e}")))?;
            objects.push(rec.get(0).unwrap_or("").trim().to_string());
            cells.push(
                rec.iter()
                    .skip(1)
                    .map(|c| {
                        c.split('|').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
                    })
                    .collect(),
            );
        }
        InformationTable::new(objects, attributes, cells)
    }

    pub fn from_csv_str(s: &str) -> Result<InformationTable> {
        InformationTable::from_csv(s.as_bytes())
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn value(&self, object: usize, attribute: usize) -> &BTreeSet<String> {
        &self.cells[object][attribute]
    }

    pub fn attribute_index(&self, id: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| Error::input(format!("unknown attribute id `{id}`")))
    }

    pub fn object_universe(&self) -> Universe {
        Universe::new(self.objects.clone()).expect("object ids validated unique")
    }
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if id.is_empty() {
            return Err(Error::input(format!("empty {what} id")));
        }
        if !seen.insert(id) {
            return Err(Error::input(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

/// The indiscernibility relation of `attrs`: objects related iff their
/// value sets agree on every attribute in `attrs`.
pub fn equivalence_from_table<S: AsRef<str>>(
    table: &InformationTable,
    attrs: &[S],
) -> Result<BinaryRelationSpace> {
    if attrs.is_empty() {
        return Err(Error::input("attribute set must be nonempty"));
    }
    let idx: Vec<usize> =
        attrs.iter().map(|a| table.attribute_index(a.as_ref())).collect::<Result<_>>()?;
    let universe = table.object_universe();
    let n = universe.len();
    let mut rows = vec![Subset::EMPTY; n];
    for (x, row) in rows.iter_mut().enumerate() {
        for w in 0..n {
            if idx.iter().all(|&a| table.value(x, a) == table.value(w, a)) {
                *row = row.union(Subset::singleton(w));
            }
        }
    }
    Ok(BinaryRelationSpace { universe, rows })
}

/// True iff every cell holds exactly one token.
pub fn is_deterministic(table: &InformationTable) -> bool {
    table.cells.iter().flatten().all(|c| c.len() == 1)
}

/// A binary relation on a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryRelationSpace {
    pub universe: Universe,
    /// `rows[x]` = `{y : (x, y) ∈ R}`.
    rows: Vec<Subset>,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    universe: Vec<String>,
    pairs: Vec<(String, String)>,
}

impl BinaryRelationSpace {
    pub fn from_pairs<S: AsRef<str>>(universe: Universe, pairs: &[(S, S)]) -> Result<Self> {
        let mut rows = vec![Subset::EMPTY; universe.len()];
        for (x, y) in pairs {
            let (i, j) = (universe.index_of(x.as_ref())?, universe.index_of(y.as_ref())?);
            rows[i] = rows[i].union(Subset::singleton(j));
        }
        Ok(BinaryRelationSpace { universe, rows })
    }

    pub fn from_rows(universe: Universe, rows: Vec<Subset>) -> Result<Self> {
        let full = universe.full();
        if rows.len() != universe.len() || rows.iter().any(|r| !r.is_subset(full)) {
            return Err(Error::input("relation rows do not match the universe"));
        }
        Ok(BinaryRelationSpace { universe, rows })
    }

    /// The relation whose pair `(i, j)` is bit `i * n + j` of `code`.
    pub fn from_code(universe: Universe, code: u64) -> Self {
        let n = universe.len();
        let rows = (0..n).map(|i| Subset((code >> (i * n)) & Subset::full(n).0)).collect();
        BinaryRelationSpace { universe, rows }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: RelationJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("relation json: {e}")))?;
        BinaryRelationSpace::from_pairs(Universe::new(j.universe)?, &j.pairs)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = RelationJson { universe: self.universe.labels().to_vec(), pairs: self.pairs() };
        serde_json::to_value(j).expect("plain data")
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn successors(&self, x: usize) -> Subset {
        self.rows[x]
    }

    pub fn predecessors(&self, y: usize) -> Subset {
        Subset::from_indices((0..self.len()).filter(|&x| self.related(x, y)))
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in self.rows[x].iter() {
                out.push((self.universe.label(x).to_string(), self.universe.label(y).to_string()));
            }
        }
        out
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|x| self.related(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|x| self.rows[x].iter().all(|y| self.related(y, x)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.len()).all(|x| self.rows[x].iter().all(|y| x == y || !self.related(y, x)))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| self.rows[x].iter().all(|y| self.rows[y].is_subset(self.rows[x])))
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }
}

/// Per-element neighborhoods derived from a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhoods {
    pub sets: Vec<Subset>,
    /// The neighborhoods cover the universe.
    pub cover: bool,
}

impl Neighborhoods {
    /// The granulation `{n(x)}` as a deduplicated family in canonical order.
    pub fn family(&self) -> Vec<Subset> {
        let set: BTreeSet<Subset> = self.sets.iter().copied().collect();
        set.into_iter().collect()
    }
}

/// Neighborhood of `x` is `{y : (y, x) ∈ R}`.
///
/// This direction reproduces the tabulated granules of the worked 5-element
/// example, where `(a, b) ∈ R` places `a` in the granule of `b`.
pub fn successor_neighborhoods(rel: &BinaryRelationSpace) -> Neighborhoods {
    let sets: Vec<Subset> = (0..rel.len()).map(|x| rel.predecessors(x)).collect();
    let covered = sets.iter().fold(Subset::EMPTY, |m, s| m.union(*s));
    Neighborhoods { cover: covered == rel.universe.full(), sets }
}

/// A finite family of blocks over a universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpace {
    pub universe: Universe,
    pub blocks: Vec<Subset>,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    universe: Vec<String>,
    blocks: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverQueryKind {
    Nbd,
    Md,
    Fr,
}

impl std::str::FromStr for CoverQueryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nbd" => Ok(CoverQueryKind::Nbd),
            "md" => Ok(CoverQueryKind::Md),
            "fr" => Ok(CoverQueryKind::Fr),
            _ => Err(Error::input(format!("unknown cover query `{s}` (nbd|md|fr)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverAnswer {
    /// `uncovered` marks the empty-intersection convention (result = universe).
    Set { set: Subset, uncovered: bool },
    Family(Vec<Subset>),
}

impl CoverSpace {
    pub fn new(universe: Universe, blocks: Vec<Subset>) -> Result<CoverSpace> {
        let full = universe.full();
        if let Some(b) = blocks.iter().find(|b| !b.is_subset(full)) {
            return Err(Error::input(format!("block {b:?} is not over the universe")));
        }
        Ok(CoverSpace { universe, blocks })
    }

    pub fn from_json(s: &str) -> Result<CoverSpace> {
        let j: CoverJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("cover json: {e}")))?;
        let universe = Universe::new(j.universe)?;
        let blocks = j.blocks.iter().map(|b| universe.subset(b)).collect::<Result<_>>()?;
        CoverSpace::new(universe, blocks)
    }

    /// Union of blocks equals the universe.
    pub fn is_proper(&self) -> bool {
        self.blocks.iter().fold(Subset::EMPTY, |m, b| m.union(*b)) == self.universe.full()
    }

    fn containing(&self, x: usize) -> impl Iterator<Item = Subset> + '_ {
        self.blocks.iter().copied().filter(move |b| b.contains(x))
    }

    /// Intersection of blocks containing `x`; the flag marks an uncovered `x`.
    pub fn nbd(&self, x: usize) -> (Subset, bool) {
        let mut any = false;
        let set = self.containing(x).fold(self.universe.full(), |m, b| {
            any = true;
            m.intersect(b)
        });
        (set, !any)
    }

    /// The ⊆-maximal blocks containing `x`, deduplicated in block order.
    pub fn md(&self, x: usize) -> Vec<Subset> {
        let cs: Vec<Subset> = self.containing(x).collect();
        let mut out: Vec<Subset> = Vec::new();
        for &b in &cs {
            if !cs.iter().any(|&c| b.is_proper_subset(c)) && !out.contains(&b) {
                out.push(b);
            }
        }
        out
    }

    pub fn fr(&self, x: usize) -> Subset {
        self.containing(x).fold(Subset::EMPTY, Subset::union)
    }

    pub fn query(&self, x: usize, kind: CoverQueryKind) -> Result<CoverAnswer> {
        if x >= self.universe.len() {
            return Err(Error::input("element not in universe"));
        }
        Ok(match kind {
            CoverQueryKind::Nbd => {
                let (set, uncovered) = self.nbd(x);
                CoverAnswer::Set { set, uncovered }
            }
            CoverQueryKind::Md => CoverAnswer::Family(self.md(x)),
            CoverQueryKind::Fr => CoverAnswer::Set { set: self.fr(x), uncovered: false },
        })
    }
}

/// Removes every block that is a maximal description of none of its points.
pub fn cover_reduct(cov: &CoverSpace) -> CoverSpace {
    let mds: Vec<Vec<Subset>> = (0..cov.universe.len()).map(|x| cov.md(x)).collect();
    let blocks = cov
        .blocks
        .iter()
        .copied()
        .filter(|k| k.iter().any(|x| mds[x].contains(k)))
        .collect();
    CoverSpace { universe: cov.universe.clone(), blocks }
}

/// A finite partial algebra `⟨V, ∪, ∩, ∼, 0, 1⟩` of valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationAlgebra {
    pub carrier: Vec<String>,
    pub meet: Vec<Vec<Option<usize>>>,
    pub join: Vec<Vec<Option<usize>>>,
    pub neg: Vec<Option<usize>>,
    pub zero: usize,
    pub one: usize,
}

#[derive(Serialize, Deserialize)]
struct ValuationJson {
    carrier: Vec<String>,
    meet: Vec<(String, String, String)>,
    join: Vec<(String, String, String)>,
    #[serde(default)]
    neg: Vec<(String, String)>,
    zero: String,
    one: String,
}

impl ValuationAlgebra {
    pub fn from_json(s: &str) -> Result<ValuationAlgebra> {
        let j: ValuationJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("valuation json: {e}")))?;
        check_unique(&j.carrier, "carrier")?;
        let idx: HashMap<&str, usize> =
            j.carrier.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let get = |t: &str| {
            idx.get(t).copied().ok_or_else(|| Error::input(format!("token `{t}` not in carrier")))
        };
        let n = j.carrier.len();
        let binary = |rows: &[(String, String, String)], name: &str| -> Result<Vec<Vec<Option<usize>>>> {
            let mut t = vec![vec![None; n]; n];
            for (a, b, c) in rows {
                let (a, b, c) = (get(a)?, get(b)?, get(c)?);
                if t[a][b].is_some_and(|old| old != c) {
                    return Err(Error::input(format!("conflicting {name} entries")));
                }
                t[a][b] = Some(c);
            }
            Ok(t)
        };
        let meet = binary(&j.meet, "meet")?;
        let join = binary(&j.join, "join")?;
        let mut neg = vec![None; n];
        for (a, b) in &j.neg {
            let (a, b) = (get(a)?, get(b)?);
            if neg[a].is_some_and(|old| old != b) {
                return Err(Error::input("conflicting neg entries"));
            }
            neg[a] = Some(b);
        }
        let (zero, one) = (get(&j.zero)?, get(&j.one)?);
        if zero == one && n > 1 {
            return Err(Error::input("zero and one coincide on a multi-token carrier"));
        }
        Ok(ValuationAlgebra { carrier: j.carrier, meet, join, neg, zero, one })
    }

    /// The two-element Boolean algebra on tokens `0`, `1`.
    pub fn boolean() -> ValuationAlgebra {
        ValuationAlgebra {
            carrier: vec!["0".into(), "1".into()],
            meet: vec![vec![Some(0), Some(0)], vec![Some(0), Some(1)]],
            join: vec![vec![Some(0), Some(1)], vec![Some(1), Some(1)]],
            neg: vec![Some(1), Some(0)],
            zero: 0,
            one: 1,
        }
    }

    fn m(&self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        self.meet[a?][b?]
    }

    fn j(&self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        self.join[a?][b?]
    }

    fn n(&self, a: Option<usize>) -> Option<usize> {
        self.neg[a?]
    }
}

/// `l =ω r`: both defined implies equal.
fn omega_eq(l: Option<usize>, r: Option<usize>) -> bool {
    match (l, r) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

/// Checks WA, WD, WC, WAb, Bo, WCp and WNeg.
///
/// Bo is evaluated exactly as stated (`a∩0 = a & a∪0 = 0 & a∩1 = a &
/// a∪1 = 1`, all sides required defined). `Bo-lattice` reports the usual
/// bounded-lattice orientation alongside it.
pub fn check_valuation_algebra(v: &ValuationAlgebra) -> Report {
    let n = v.carrier.len();
    let name = |i: usize| v.carrier[i].clone();
    let s = Some;
    let triples = || (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))));
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));

    let mut r = Report::new();
    let wa = triples().find(|&(a, b, c)| {
        !omega_eq(v.m(s(a), v.m(s(b), s(c))), v.m(v.m(s(a), s(b)), s(c)))
            || !omega_eq(v.j(s(a), v.j(s(b), s(c))), v.j(v.j(s(a), s(b)), s(c)))
    });
    r.push(Check::from_witness("WA", wa.map(|(a, b, c)| vec![name(a), name(b), name(c)])));
    let wd = triples().find(|&(a, b, c)| {
        !omega_eq(v.j(s(a), v.m(s(b), s(c))), v.m(v.j(s(a), s(b)), v.j(s(a), s(c))))
            || !omega_eq(v.m(s(a), v.j(s(b), s(c))), v.j(v.m(s(a), s(b)), v.m(s(a), s(c))))
    });
    r.push(Check::from_witness("WD", wd.map(|(a, b, c)| vec![name(a), name(b), name(c)])));
    let wc = pairs().find(|&(a, b)| {
        !omega_eq(v.m(s(a), s(b)), v.m(s(b), s(a))) || !omega_eq(v.j(s(a), s(b)), v.j(s(b), s(a)))
    });
    r.push(Check::from_witness("WC", wc.map(|(a, b)| vec![name(a), name(b)])));
    let wab = pairs().find(|&(a, b)| {
        !omega_eq(v.j(v.m(s(a), s(b)), s(a)), s(a)) || !omega_eq(v.m(v.j(s(a), s(b)), s(a)), s(a))
    });
    r.push(Check::from_witness("WAb", wab.map(|(a, b)| vec![name(a), name(b)])));

    let (z, o) = (s(v.zero), s(v.one));
    let bo = (0..n).find(|&a| {
        v.m(s(a), z) != s(a) || v.j(s(a), z) != z || v.m(s(a), o) != s(a) || v.j(s(a), o) != o
    });
    r.push(
        Check::from_witness("Bo", bo.map(|a| vec![name(a)]))
            .with_note("evaluated verbatim: a∩0 = a & a∪0 = 0, the reverse of the bounded-lattice orientation"),
    );
    let bo_lattice = (0..n).find(|&a| {
        v.m(s(a), z) != z || v.j(s(a), z) != s(a) || v.m(s(a), o) != s(a) || v.j(s(a), o) != o
    });
    r.push(
        Check::from_witness("Bo-lattice", bo_lattice.map(|a| vec![name(a)]))
            .with_note("a∩0 = 0 & a∪0 = a & a∩1 = a & a∪1 = 1"),
    );

    let wcp = (0..n).find(|&a| {
        !omega_eq(v.m(s(a), v.n(s(a))), z) || !omega_eq(v.j(s(a), v.n(s(a))), o)
    });
    r.push(Check::from_witness("WCp", wcp.map(|a| vec![name(a)])));
    let wneg = (0..n).find(|&a| !omega_eq(v.n(v.n(v.n(s(a)))), v.n(s(a))));
    r.push(Check::from_witness("WNeg", wneg.map(|a| vec![name(a)])));
    r
}

/// Table, attribute-space, incidence and valuation data of a concrete space.
#[derive(Clone, Debug)]
pub struct CggsBundle {
    pub table: InformationTable,
    pub space: crate::spaces::SetHgos,
    /// `(object index, space element)` pairs.
    pub xi: Vec<(usize, Subset)>,
    pub valg: ValuationAlgebra,
}

impl CggsBundle {
    pub fn new(
        table: InformationTable,
        space: crate::spaces::SetHgos,
        xi: Vec<(usize, Subset)>,
        valg: ValuationAlgebra,
    ) -> Result<CggsBundle> {
        let full = space.universe().full();
        if xi.iter().any(|&(o, e)| o >= table.objects().len() || !e.is_subset(full)) {
            return Err(Error::input("incidence references an unknown object or element"));
        }
        Ok(CggsBundle { table, space, xi, valg })
    }
}
