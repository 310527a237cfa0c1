//! Mereological predicates over finite parthood relations.
//!
//! Overlap is `O(x) = {y : ∃z (𝐏 z x ∧ 𝐏 z y)}`.

use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::spaces::GranularSpace;
use crate::subset::{Subset, Universe};
use crate::tables::{BinaryRelationSpace, CggsBundle, InformationTable};

/// Largest carrier for which ideals are enumerated.
pub const IDEAL_SCAN_LIMIT: usize = 16;

/// `𝐏 x y` iff `(x, y)` is in the underlying relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParthoodRelation {
    rel: BinaryRelationSpace,
    overlaps: Vec<Subset>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MereoKind {
    Sum,
    Fusion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealKind {
    Ideal,
    Principal,
}

impl ParthoodRelation {
    pub fn new(rel: BinaryRelationSpace) -> ParthoodRelation {
        let n = rel.len();
        let overlaps = (0..n)
            .map(|x| {
                rel.predecessors(x)
                    .iter()
                    .fold(Subset::EMPTY, |m, z| m.union(rel.successors(z)))
            })
            .collect();
        ParthoodRelation { rel, overlaps }
    }

    pub fn from_json(s: &str) -> Result<ParthoodRelation> {
        Ok(ParthoodRelation::new(BinaryRelationSpace::from_json(s)?))
    }

    pub fn relation(&self) -> &BinaryRelationSpace {
        &self.rel
    }

    pub fn universe(&self) -> &Universe {
        &self.rel.universe
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn part(&self, x: usize, y: usize) -> bool {
        self.rel.related(x, y)
    }

    /// `P(a) = {z : 𝐏 z a}`.
    pub fn part_set(&self, a: usize) -> Subset {
        self.rel.predecessors(a)
    }

    pub fn overlap(&self, x: usize) -> Subset {
        self.overlaps[x]
    }

    pub fn overlaps(&self, x: usize, y: usize) -> bool {
        self.overlaps[x].contains(y)
    }

    fn overlap_union(&self, b: Subset) -> Subset {
        b.iter().fold(Subset::EMPTY, |m, x| m.union(self.overlaps[x]))
    }

    /// `B ⊆ P(a) ⊆ ∪{O(x) : x ∈ B}`.
    pub fn sum(&self, a: usize, b: Subset) -> bool {
        let pa = self.part_set(a);
        b.is_subset(pa) && pa.is_subset(self.overlap_union(b))
    }

    /// `O(a) = ∪{O(x) : x ∈ B}`.
    pub fn fusion(&self, a: usize, b: Subset) -> bool {
        self.overlaps[a] == self.overlap_union(b)
    }

    /// Label-level entry point for [`ParthoodRelation::sum`] and [`ParthoodRelation::fusion`].
    pub fn predicate<S: AsRef<str>>(&self, a: &str, b: &[S], kind: MereoKind) -> Result<bool> {
        let ai = self.universe().index_of(a)?;
        let bs = self.universe().subset(b)?;
        Ok(match kind {
            MereoKind::Sum => self.sum(ai, bs),
            MereoKind::Fusion => self.fusion(ai, bs),
        })
    }

    pub fn bounds(&self, x: Subset, kind: BoundKind) -> Subset {
        let n = self.len();
        Subset::from_indices((0..n).filter(|&a| {
            x.iter().all(|y| match kind {
                BoundKind::Upper => self.part(y, a),
                BoundKind::Lower => self.part(a, y),
            })
        }))
    }

    /// `¬𝐏 a b → ∃z (𝐏 z a ∧ ¬𝐏 z b ∧ ¬𝐏 b z)`, witness `(a, b)` on failure.
    pub fn ssp_witness(&self) -> Option<(usize, usize)> {
        let n = self.len();
        pairs(n).find(|&(a, b)| {
            !self.part(a, b) && !(0..n).any(|z| self.part(z, a) && !self.part(z, b) && !self.part(b, z))
        })
    }

    /// `¬𝐏 a b → ∃z (𝐏 z a ∧ z does not overlap b)`.
    pub fn overlap_ssp_witness(&self) -> Option<(usize, usize)> {
        let n = self.len();
        pairs(n).find(|&(a, b)| !self.part(a, b) && !(0..n).any(|z| self.part(z, a) && !self.overlaps(z, b)))
    }

    /// `U(a, b) = {x : 𝐏 a x ∧ 𝐏 b x}`.
    pub fn up_set(&self, a: usize, b: usize) -> Subset {
        self.rel.successors(a).intersect(self.rel.successors(b))
    }

    pub fn is_ideal(&self, k: Subset) -> bool {
        let down = k.iter().all(|a| self.part_set(a).is_subset(k));
        down && k.iter().all(|a| k.iter().all(|b| self.up_set(a, b).meets(k)))
    }

    /// All ideals, in mask order.
    pub fn ideals(&self) -> Result<Vec<Subset>> {
        if self.len() > IDEAL_SCAN_LIMIT {
            return Err(Error::unsupported(format!(
                "ideal enumeration needs a carrier of at most {IDEAL_SCAN_LIMIT} elements"
            )));
        }
        Ok(crate::par::filter_slice(&Subset::all(self.len()).collect::<Vec<_>>(), |k| self.is_ideal(*k)))
    }

    /// The intersection of all ideals containing `a`, if any ideal does.
    pub fn principal_of(&self, a: usize, ideals: &[Subset]) -> Option<Subset> {
        let mut it = ideals.iter().filter(|k| k.contains(a));
        let first = *it.next()?;
        Some(it.fold(first, |m, k| m.intersect(*k)))
    }

    pub fn p_ideal_check(&self, k: Subset, kind: IdealKind) -> Result<bool> {
        match kind {
            IdealKind::Ideal => Ok(self.is_ideal(k)),
            IdealKind::Principal => {
                if !self.is_ideal(k) {
                    return Ok(false);
                }
                let ideals = self.ideals()?;
                Ok((0..self.len()).any(|a| self.principal_of(a, &ideals) == Some(k)))
            }
        }
    }

    fn show_pair(&self, a: usize, b: Subset) -> Vec<String> {
        vec![self.universe().label(a).to_string(), self.universe().show(b)]
    }

    fn scan(&self, bad: impl Fn(usize, Subset) -> bool + Sync) -> Option<Vec<String>> {
        let n = self.len();
        let sets: Vec<Subset> = Subset::all(n).collect();
        crate::par::find_first(n, |a| sets.iter().find(|&&b| bad(a, b)).map(|&b| self.show_pair(a, b)))
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// Separativity under both readings and the sum/fusion correspondences.
///
/// Correspondence checks run only where their premises hold; otherwise
/// they are reported not applicable.
pub fn check_separative_theorems(p: &ParthoodRelation) -> Result<Report> {
    if p.len() > 20 {
        return Err(Error::unsupported("sum/fusion scans need a carrier of at most 20 elements"));
    }
    let label = |x: usize| p.universe().label(x).to_string();
    let mut r = Report::new();
    let ssp = p.ssp_witness();
    let ossp = p.overlap_ssp_witness();
    r.push(
        Check::from_witness("SSP", ssp.map(|(a, b)| vec![label(a), label(b)]))
            .with_note("∃z (𝐏 z a ∧ ¬𝐏 z b ∧ ¬𝐏 b z)"),
    );
    r.push(
        Check::from_witness("SSP-overlap", ossp.map(|(a, b)| vec![label(a), label(b)]))
            .with_note("∃z (𝐏 z a ∧ z does not overlap b)"),
    );
    let reflexive = p.relation().is_reflexive();
    let transitive = p.relation().is_transitive();
    let o_note = "O(x) = {y : ∃z (𝐏 z x ∧ 𝐏 z y)}";

    if reflexive {
        let w = p.scan(|a, b| b.is_subset(p.part_set(a)) && p.fusion(a, b) && !p.sum(a, b));
        r.push(Check::from_witness("bounded-fusion⇒sum", w).with_note(o_note));
    } else {
        r.push(Check::not_applicable("bounded-fusion⇒sum", "parthood is not reflexive"));
    }

    let equiv = |name: &str, premise: bool, why: &str, r: &mut Report| {
        if premise {
            let w = p.scan(|a, b| p.sum(a, b) != p.fusion(a, b));
            r.push(Check::from_witness(name, w).with_note(o_note));
        } else {
            r.push(Check::not_applicable(name, why));
        }
    };
    equiv("sum⇔fusion", transitive && ssp.is_none(), "needs transitivity and SSP", &mut r);
    equiv(
        "sum⇔fusion (SSP-overlap)",
        transitive && ossp.is_none(),
        "needs transitivity and SSP-overlap",
        &mut r,
    );

    if transitive && ssp.is_none() {
        let w = p.scan(|a, b| b.len() == 2 && p.fusion(a, b) && !p.sum(a, b));
        r.push(Check::from_witness("binary-fusion⇒sum", w).with_note(o_note));
    } else {
        r.push(Check::not_applicable("binary-fusion⇒sum", "needs transitivity and SSP"));
    }
    Ok(r)
}

/// Square matrix of discerning space elements, indexed by object pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscernibilityMatrix {
    pub order: usize,
    pub entries: Vec<Vec<Vec<Subset>>>,
}

impl DiscernibilityMatrix {
    pub fn to_json_value(&self, u: &Universe) -> serde_json::Value {
        let grid: Vec<Vec<Vec<Vec<String>>>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.iter().map(|x| u.names(*x)).collect()).collect())
            .collect();
        serde_json::json!({ "order": self.order, "entries": grid })
    }
}

/// Keeps the members of `entry` with no proper part inside `entry`.
pub fn p_minimal<S: GranularSpace>(s: &S, entry: &[S::Elem]) -> Vec<S::Elem> {
    entry
        .iter()
        .copied()
        .filter(|&x| !entry.iter().any(|&y| s.proper_part(y, x)))
        .collect()
}

/// `δᵢⱼ = {x : Φ(aᵢ, aⱼ, x)}`; the diagonal stays empty.
pub fn discernibility_matrix<F>(bundle: &CggsBundle, phi: F, minimize: bool) -> DiscernibilityMatrix
where
    F: Fn(&InformationTable, usize, usize, Subset) -> bool + Sync,
{
    let n = bundle.table.objects().len();
    let elems = bundle.space.elements();
    let entries = crate::par::map_range(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    return Vec::new();
                }
                let e: Vec<Subset> = elems.iter().copied().filter(|&x| phi(&bundle.table, i, j, x)).collect();
                if minimize {
                    p_minimal(&bundle.space, &e)
                } else {
                    e
                }
            })
            .collect()
    });
    DiscernibilityMatrix { order: n, entries }
}

/// Classical discernibility over a space whose universe labels name table
/// attributes: `x` discerns when some attribute in `x` takes different
/// values on the two objects.
pub fn classical_discernibility(bundle: &CggsBundle) -> Result<impl Fn(&InformationTable, usize, usize, Subset) -> bool + Sync> {
    let u = bundle.space.universe();
    let cols = (0..u.len())
        .map(|k| bundle.table.attribute_index(u.label(k)))
        .collect::<Result<Vec<usize>>>()?;
    Ok(move |t: &InformationTable, i: usize, j: usize, x: Subset| {
        x.iter().any(|k| t.value(i, cols[k]) != t.value(j, cols[k]))
    })
}
