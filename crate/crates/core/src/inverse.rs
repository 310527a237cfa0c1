//! Inverse problem: candidate granular models filtered against observed
//! approximations and GRIF matrices.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grif::{feasibility_filter, matrix_combine, zeta, CombineKind, GrifMatrix};
use crate::norms::NormTriple;
use crate::par;
use crate::rif::InclusionFn;
use crate::spaces::{build_set_hgos, GranularSpace, SetHgos};
use crate::subset::{Subset, Universe};
use crate::tables::{successor_neighborhoods, BinaryRelationSpace};

/// Largest universe the relations generator accepts.
pub const RELATION_UNIVERSE_LIMIT: usize = 4;
/// Largest number of block combinations the pool generator accepts.
pub const POOL_COMBINATION_LIMIT: u128 = 10_000_000;
/// Largest candidate universe searched for placeholder subjects.
pub const PLACEHOLDER_UNIVERSE_LIMIT: usize = 4;

/// An observed subject: a concrete set of labels, or a placeholder id whose
/// extension is unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Subject {
    Set(Vec<String>),
    Id(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrifObservation {
    pub a: Subject,
    pub b: Subject,
    pub matrix: GrifMatrix,
}

/// Observed approximations of one subject and/or observed matrices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<Subject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grif: Vec<GrifObservation>,
}

impl Observation {
    pub fn validate(&self) -> Result<()> {
        let approx = self.lower.is_some() || self.upper.is_some();
        if !approx && self.grif.is_empty() {
            return Err(Error::input("observation carries no data"));
        }
        match (&self.subject, approx) {
            (None, true) => Err(Error::input("approximations observed without a subject")),
            (Some(Subject::Id(id)), true) => {
                Err(Error::input(format!("approximations of placeholder {id:?} cannot be compared")))
            }
            _ => Ok(()),
        }
    }
}

/// Reads either a JSON array of observations or `{"observations": [...]}`.
pub fn observations_from_json(s: &str) -> Result<Vec<Observation>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        List(Vec<Observation>),
        Wrapped { observations: Vec<Observation> },
    }
    let doc: Doc = serde_json::from_str(s).map_err(|e| Error::input(format!("observation json: {e}")))?;
    let obs = match doc {
        Doc::List(v) => v,
        Doc::Wrapped { observations } => observations,
    };
    for o in &obs {
        o.validate()?;
    }
    Ok(obs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateModel {
    pub universe: Universe,
    /// Canonical order, no duplicates.
    pub granulation: Vec<Subset>,
}

impl CandidateModel {
    pub fn new(universe: Universe, granulation: Vec<Subset>) -> CandidateModel {
        let set: BTreeSet<Subset> = granulation.into_iter().collect();
        CandidateModel { universe, granulation: set.into_iter().collect() }
    }

    pub fn from_relation(rel: &BinaryRelationSpace) -> CandidateModel {
        CandidateModel::new(rel.universe.clone(), successor_neighborhoods(rel).family())
    }

    pub fn space(&self) -> Result<SetHgos> {
        build_set_hgos(self.universe.clone(), self.granulation.clone())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "universe": self.universe.labels(),
            "granules": self.granulation.iter().map(|g| self.universe.names(*g)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniverseSpec {
    Known(Universe),
    /// Every universe `x, y, z, w` prefix of size `1..=k`.
    Bound(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Relations,
    Pool { pool: Vec<Subset>, max_blocks: usize },
}

fn default_universe(n: usize) -> Result<Universe> {
    const NAMES: [&str; RELATION_UNIVERSE_LIMIT] = ["x", "y", "z", "w"];
    if n > NAMES.len() {
        return Err(Error::Bound(format!("unknown universes are searched up to {} elements", NAMES.len())));
    }
    Universe::new(NAMES[..n].iter().copied())
}

fn relation_count(n: usize) -> Result<u64> {
    if n > RELATION_UNIVERSE_LIMIT {
        return Err(Error::Bound(format!(
            "relations generator needs a universe of at most {RELATION_UNIVERSE_LIMIT} elements, got {n}"
        )));
    }
    Ok(1u64 << (n * n))
}

/// Successor-neighborhood models of every relation on `u`, one per relation
/// code and without deduplication.
pub fn relation_models(u: &Universe) -> Result<Vec<CandidateModel>> {
    let count = relation_count(u.len())?;
    Ok(par::map_range(count as usize, |code| {
        CandidateModel::from_relation(&BinaryRelationSpace::from_code(u.clone(), code as u64))
    }))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of block combinations the pool generator would visit.
pub fn pool_combinations(pool_len: usize, max_blocks: usize) -> u128 {
    (1..=max_blocks.min(pool_len)).map(|k| binomial(pool_len as u128, k as u128)).sum()
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Candidate models in canonical order with duplicate granulations removed.
pub fn enumerate_models(universe: &UniverseSpec, generator: &Generator) -> Result<Vec<CandidateModel>> {
    let universes = match universe {
        UniverseSpec::Known(u) => vec![u.clone()],
        UniverseSpec::Bound(k) => (1..=*k).map(default_universe).collect::<Result<Vec<_>>>()?,
    };
    let mut out = Vec::new();
    for u in universes {
        let models = match generator {
            Generator::Relations => relation_models(&u)?,
            Generator::Pool { pool, max_blocks } => {
                if matches!(universe, UniverseSpec::Bound(_)) {
                    return Err(Error::input("the pool generator needs a known universe"));
                }
                let pool: Vec<Subset> = pool.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
                if let Some(g) = pool.iter().find(|g| !g.is_subset(u.full())) {
                    return Err(Error::input(format!("pool block {g:?} is not over the universe")));
                }
                let total = pool_combinations(pool.len(), *max_blocks);
                if total > POOL_COMBINATION_LIMIT {
                    return Err(Error::Bound(format!(
                        "pool of {} blocks with up to {max_blocks} per model needs {total} combinations; limit is {POOL_COMBINATION_LIMIT}",
                        pool.len()
                    )));
                }
                let mut combos = Vec::new();
                for k in 1..=(*max_blocks).min(pool.len()) {
                    combinations(pool.len(), k, &mut combos);
                }
                combos
                    .into_iter()
                    .map(|c| CandidateModel::new(u.clone(), c.into_iter().map(|i| pool[i]).collect()))
                    .collect()
            }
        };
        let mut seen = BTreeSet::new();
        out.extend(models.into_iter().filter(|m| seen.insert(m.granulation.clone())));
    }
    Ok(out)
}

/// Relations obtained from `rel` by toggling one pair each, drawn with `seed`.
pub fn relation_mutants(rel: &BinaryRelationSpace, count: usize, seed: u64) -> Vec<BinaryRelationSpace> {
    let n = rel.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let rows = (0..n)
                .map(|x| Subset::from_indices((0..n).filter(|&y| rel.related(x, y) != ((x, y) == (i, j)))))
                .collect();
            BinaryRelationSpace::from_rows(rel.universe.clone(), rows).expect("rows over the universe")
        })
        .collect()
}

/// The full approximation table of `s` as observations.
pub fn observations_of(s: &SetHgos) -> Vec<Observation> {
    let u = s.universe();
    s.elements()
        .into_iter()
        .map(|x| Observation {
            subject: Some(Subject::Set(u.names(x))),
            lower: Some(u.names(s.lower_set(x))),
            upper: Some(u.names(s.upper_set(x))),
            grif: Vec::new(),
        })
        .collect()
}

/// Observed matrices are impossible in any set HGOS for this τ.
fn prefilter_applies(tau: &InclusionFn) -> bool {
    matches!(tau, InclusionFn::K0 | InclusionFn::K1)
}

fn resolve(u: &Universe, labels: &[String]) -> Option<Subset> {
    u.subset(labels).ok()
}

enum Slot {
    Fixed(Subset),
    Free(usize),
}

fn slot(u: &Universe, s: &Subject, ids: &mut Vec<String>) -> Option<Slot> {
    match s {
        Subject::Set(labels) => resolve(u, labels).map(Slot::Fixed),
        Subject::Id(id) => {
            let k = ids.iter().position(|x| x == id).unwrap_or_else(|| {
                ids.push(id.clone());
                ids.len() - 1
            });
            Some(Slot::Free(k))
        }
    }
}

/// Assignment of placeholder ids to subsets making every observation hold,
/// or `None` when the model is incompatible.
pub fn match_model(
    model: &CandidateModel,
    obs: &[Observation],
    tau: &InclusionFn,
) -> Result<Option<BTreeMap<String, Subset>>> {
    let s = model.space()?;
    let u = &model.universe;
    for o in obs {
        if o.lower.is_none() && o.upper.is_none() {
            continue;
        }
        let Some(Subject::Set(labels)) = &o.subject else { continue };
        let Some(x) = resolve(u, labels) else { return Ok(None) };
        for (seen, want) in [(s.lower_set(x), &o.lower), (s.upper_set(x), &o.upper)] {
            if let Some(w) = want {
                if resolve(u, w) != Some(seen) {
                    return Ok(None);
                }
            }
        }
    }
    let mut ids = Vec::new();
    let mut constraints = Vec::new();
    for g in obs.iter().flat_map(|o| &o.grif) {
        let (Some(a), Some(b)) = (slot(u, &g.a, &mut ids), slot(u, &g.b, &mut ids)) else { return Ok(None) };
        constraints.push((a, b, g.matrix));
    }
    if !ids.is_empty() && u.len() > PLACEHOLDER_UNIVERSE_LIMIT {
        return Err(Error::Bound(format!(
            "placeholder search is limited to universes of {PLACEHOLDER_UNIVERSE_LIMIT} elements"
        )));
    }
    let mut assign: Vec<Option<Subset>> = vec![None; ids.len()];
    let value = |sl: &Slot, assign: &[Option<Subset>]| match sl {
        Slot::Fixed(x) => Some(*x),
        Slot::Free(k) => assign[*k],
    };
    let consistent = |assign: &[Option<Subset>]| -> Result<bool> {
        for (a, b, m) in &constraints {
            if let (Some(x), Some(y)) = (value(a, assign), value(b, assign)) {
                if zeta(&s, tau, x, y)? != *m {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    if !consistent(&assign)? {
        return Ok(None);
    }
    let family = s.elements();
    // Depth-first over ids in first-appearance order; candidates in family order.
    fn search(
        k: usize,
        assign: &mut Vec<Option<Subset>>,
        family: &[Subset],
        consistent: &dyn Fn(&[Option<Subset>]) -> Result<bool>,
    ) -> Result<bool> {
        if k == assign.len() {
            return Ok(true);
        }
        for &x in family {
            assign[k] = Some(x);
            if consistent(assign)? && search(k + 1, assign, family, consistent)? {
                return Ok(true);
            }
        }
        assign[k] = None;
        Ok(false)
    }
    if !search(0, &mut assign, &family, &consistent)? {
        return Ok(None);
    }
    Ok(Some(ids.into_iter().zip(assign.into_iter().map(|x| x.expect("assigned"))).collect()))
}

/// Models compatible with every observation, in input order.
///
/// Under K0 and K1 an infeasible matrix among the observations empties the
/// result before any model is built.
pub fn consistency_filter(
    models: &[CandidateModel],
    obs: &[Observation],
    tau: &InclusionFn,
) -> Result<Vec<CandidateModel>> {
    for o in obs {
        o.validate()?;
    }
    let matrices: Vec<GrifMatrix> = obs.iter().flat_map(|o| o.grif.iter().map(|g| g.matrix)).collect();
    if prefilter_applies(tau) && !feasibility_filter(&matrices) {
        return Ok(Vec::new());
    }
    let verdicts: Vec<Result<bool>> = par::map_slice(models, |m| Ok(match_model(m, obs, tau)?.is_some()));
    let mut out = Vec::new();
    for (m, v) in models.iter().zip(verdicts) {
        if v? {
            out.push(m.clone());
        }
    }
    Ok(out)
}

/// Ordered pairs of distinct subjects: the number of matrices computed for
/// `k` subjects.
pub fn ordered_pair_count(k: usize) -> usize {
    k * k.saturating_sub(1)
}

/// `ζ^τ` on every ordered pair of distinct subjects.
pub fn pair_matrices(s: &SetHgos, subjects: &[Subset], tau: &InclusionFn) -> Result<Vec<(Subset, Subset, GrifMatrix)>> {
    let mut out = Vec::with_capacity(ordered_pair_count(subjects.len()));
    for (i, &a) in subjects.iter().enumerate() {
        for (j, &b) in subjects.iter().enumerate() {
            if i != j {
                out.push((a, b, zeta(s, tau, a, b)?));
            }
        }
    }
    Ok(out)
}

/// Folds known matrices with `⋎` or `⋏`. A summary for reports; never used
/// to accept or reject models.
pub fn aggregate(ms: &[GrifMatrix], kind: CombineKind, nt: &NormTriple) -> Result<GrifMatrix> {
    let (first, rest) = ms.split_first().ok_or_else(|| Error::input("nothing to aggregate"))?;
    rest.iter().try_fold(*first, |acc, m| matrix_combine(&acc, m, kind, nt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{five_element_relation, five_element_space};
    use crate::rational::rat;

    fn xy() -> Universe {
        Universe::parse_list("x,y").unwrap()
    }

    #[test]
    fn relation_counts() {
        assert_eq!(relation_models(&xy()).unwrap().len(), 16);
        let deduped = enumerate_models(&UniverseSpec::Known(xy()), &Generator::Relations).unwrap();
        assert!(deduped.len() <= 16);
        let one = enumerate_models(&UniverseSpec::Bound(1), &Generator::Relations).unwrap();
        let grans: Vec<_> = one.iter().map(|m| m.granulation.clone()).collect();
        assert_eq!(grans, vec![vec![Subset::EMPTY], vec![Subset(1)]]);
    }

    #[test]
    fn bounds_are_refused() {
        let u5 = five_element_space().universe().clone();
        let e = enumerate_models(&UniverseSpec::Known(u5.clone()), &Generator::Relations).unwrap_err();
        assert!(matches!(e, Error::Bound(_)));
        let pool: Vec<Subset> = (1..32u64).map(Subset).collect();
        let e = enumerate_models(&UniverseSpec::Known(u5), &Generator::Pool { pool, max_blocks: 31 }).unwrap_err();
        assert!(e.to_string().contains("limit"));
    }

    #[test]
    fn pool_contains_true_model() {
        let s = five_element_space();
        let pool = s.granulation().to_vec();
        let models = enumerate_models(
            &UniverseSpec::Known(s.universe().clone()),
            &Generator::Pool { pool: pool.clone(), max_blocks: 5 },
        )
        .unwrap();
        assert_eq!(models.len(), 31);
        let truth = CandidateModel::new(s.universe().clone(), pool);
        assert!(models.contains(&truth));
        let survivors = consistency_filter(&models, &observations_of(&s), &InclusionFn::K0).unwrap();
        assert_eq!(survivors, vec![truth]);
    }

    #[test]
    fn mutants_that_change_approximations_are_removed() {
        let rel = five_element_relation();
        let truth = CandidateModel::from_relation(&rel);
        let obs = observations_of(&truth.space().unwrap());
        let mut models = vec![truth.clone()];
        models.extend(relation_mutants(&rel, 100, 11).iter().map(CandidateModel::from_relation));
        let survivors = consistency_filter(&models, &obs, &InclusionFn::K0).unwrap();
        assert!(survivors.contains(&truth));
        for m in &models {
            let same = observations_of(&m.space().unwrap()) == obs;
            assert_eq!(survivors.contains(m), same);
        }
    }

    #[test]
    fn infeasible_and_empty_observations() {
        let models = relation_models(&xy()).unwrap();
        let bad = Observation {
            grif: vec![GrifObservation {
                a: Subject::Id("p".into()),
                b: Subject::Id("q".into()),
                matrix: GrifMatrix::forbidden(),
            }],
            ..Observation::default()
        };
        assert!(consistency_filter(&models, &[bad], &InclusionFn::K0).unwrap().is_empty());
        assert_eq!(consistency_filter(&models, &[], &InclusionFn::K0).unwrap().len(), 16);
    }

    #[test]
    fn placeholders_are_matched() {
        let s = five_element_space();
        let truth = CandidateModel::new(s.universe().clone(), s.granulation().to_vec());
        let m = GrifMatrix::from_entries([rat(1, 1), rat(1, 1), rat(1, 3), rat(1, 1)]);
        let obs = vec![Observation {
            grif: vec![GrifObservation { a: Subject::Id("p".into()), b: Subject::Id("q".into()), matrix: m }],
            ..Observation::default()
        }];
        assert!(matches!(match_model(&truth, &obs, &InclusionFn::K0), Err(Error::Bound(_))));
        let small = CandidateModel::new(xy(), vec![Subset(1), Subset(3)]);
        // Denominators are at most 2 here, so 1/3 cannot be realized.
        assert_eq!(match_model(&small, &obs, &InclusionFn::K0).unwrap(), None);
        let s2 = small.space().unwrap();
        let target = zeta(&s2, &InclusionFn::K0, Subset(2), Subset(1)).unwrap();
        let obs = vec![Observation {
            grif: vec![GrifObservation { a: Subject::Id("p".into()), b: Subject::Set(vec!["x".into()]), matrix: target }],
            ..Observation::default()
        }];
        let found = match_model(&small, &obs, &InclusionFn::K0).unwrap().expect("realizable");
        assert_eq!(zeta(&s2, &InclusionFn::K0, found["p"], Subset(1)).unwrap(), target);
    }

    #[test]
    fn pair_count_for_twelve_subjects() {
        assert_eq!(ordered_pair_count(12), 132);
        let s = five_element_space();
        let subjects: Vec<Subset> = s.elements().into_iter().take(12).collect();
        assert_eq!(pair_matrices(&s, &subjects, &InclusionFn::K0).unwrap().len(), 132);
    }

    #[test]
    fn observation_json() {
        let j = r#"{"observations":[{"subject":["a","b"],"lower":["a"],"upper":["a","b","e"]},
            {"grif":[{"a":"p","b":["a"],"matrix":{"ll":"1/1","lu":"1/1","ul":"1/3","uu":"1/1"}}]}]}"#;
        let obs = observations_from_json(j).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[1].grif[0].a, Subject::Id("p".into()));
        assert!(observations_from_json(r#"[{"subject":"p","lower":["a"]}]"#).is_err());
        assert!(observations_from_json(r#"[{}]"#).is_err());
    }
}
