//! The pilot's decision schema: GRIF-guided action selection over scripted
//! error-recovery scenarios, and the synthetic dataset it is compared on.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grif::{matrix_leq, matrix_lt, zeta_sets, GrifMatrix};
use crate::rational::{format_rational, one, Rational};
use crate::report::{Check, Report};
use crate::rif::InclusionFn;
use crate::spaces::{check_ggs_axioms, AxiomMode, GranularSpace, SetHgos};
use crate::subset::{Subset, Universe};
use crate::tables::{CggsBundle, InformationTable, ValuationAlgebra};

/// The six stage names, in schema order.
pub const STAGES: [&str; 6] = ["Er", "Erp", "Sok", "Sokp", "Sok1", "Sokp1"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Effect {
    pub name: String,
    #[serde(default)]
    pub add: Vec<String>,
    #[serde(default)]
    pub remove: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalogs {
    #[serde(rename = "A")]
    pub a: Vec<Effect>,
    #[serde(rename = "C")]
    pub c: Vec<Effect>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct Stages {
    pub Er: Vec<String>,
    pub Erp: Vec<String>,
    pub Sok: Vec<String>,
    pub Sokp: Vec<String>,
    pub Sok1: Vec<String>,
    pub Sokp1: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    #[serde(default)]
    schema: Option<String>,
    space: serde_json::Value,
    stages: Stages,
    catalogs: Catalogs,
    #[serde(default)]
    seed: u64,
}

/// A scripted run: pilot estimates, the plane's true states and two action
/// catalogs over one set HGOS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub space: SetHgos,
    /// Stage name → element, for every name in [`STAGES`].
    pub stages: BTreeMap<&'static str, Subset>,
    pub catalog_a: Vec<Effect>,
    pub catalog_c: Vec<Effect>,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        space: SetHgos,
        stages: BTreeMap<&'static str, Subset>,
        catalog_a: Vec<Effect>,
        catalog_c: Vec<Effect>,
        seed: u64,
    ) -> Result<Scenario> {
        for name in STAGES {
            let x = stages.get(name).ok_or_else(|| Error::input(format!("stage {name} missing")))?;
            if !space.in_family(*x) {
                return Err(Error::input(format!("stage {name} is outside the space family")));
            }
        }
        if catalog_a.is_empty() || catalog_c.is_empty() {
            return Err(Error::input("both action catalogs must be nonempty"));
        }
        for e in catalog_a.iter().chain(&catalog_c) {
            space.universe().subset(&e.add)?;
            space.universe().subset(&e.remove)?;
        }
        Ok(Scenario { space, stages, catalog_a, catalog_c, seed })
    }

    pub fn from_json(s: &str) -> Result<Scenario> {
        let j: ScenarioJson = serde_json::from_str(s).map_err(|e| Error::input(format!("scenario json: {e}")))?;
        let space = SetHgos::from_json(&j.space.to_string())?;
        let u = space.universe().clone();
        let st = &j.stages;
        let raw = [&st.Er, &st.Erp, &st.Sok, &st.Sokp, &st.Sok1, &st.Sokp1];
        let mut stages = BTreeMap::new();
        for (name, labels) in STAGES.iter().zip(raw) {
            stages.insert(*name, u.subset(labels)?);
        }
        Scenario::new(space, stages, j.catalogs.a, j.catalogs.c, j.seed)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let u = self.space.universe();
        let n = |k: &str| u.names(self.stages[k]);
        json!({
            "schema": crate::SCHEMA,
            "space": self.space.to_json_value(),
            "stages": {
                "Er": n("Er"), "Erp": n("Erp"), "Sok": n("Sok"),
                "Sokp": n("Sokp"), "Sok1": n("Sok1"), "Sokp1": n("Sokp1"),
            },
            "catalogs": {"A": self.catalog_a, "C": self.catalog_c},
            "seed": self.seed,
        })
    }

    pub fn stage(&self, name: &str) -> Subset {
        self.stages[name]
    }
}

/// `(state ∪ add) \ remove`.
pub fn apply_effect(u: &Universe, e: &Effect, state: Subset) -> Result<Subset> {
    Ok(state.union(u.subset(&e.add)?).minus(u.subset(&e.remove)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `ζ^τ` matrices ordered by `⪯`.
    Grif(InclusionFn),
    /// Scalar `τ` on the sets themselves.
    Rif(InclusionFn),
}

impl Measure {
    pub fn closeness(&self, s: &SetHgos, x: Subset, target: Subset) -> Result<Closeness> {
        Ok(match self {
            Measure::Grif(t) => Closeness::Matrix(zeta_sets(s, t, x, target)?),
            Measure::Rif(t) => Closeness::Scalar(t.eval_sets(x, target, s.universe().len())?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Grif(_) => "grif",
            Measure::Rif(_) => "rif",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closeness {
    Matrix(GrifMatrix),
    Scalar(Rational),
}

impl Closeness {
    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            Closeness::Matrix(m) => m.to_json_value(),
            Closeness::Scalar(r) => json!(format_rational(r)),
        }
    }

    fn render(&self) -> String {
        match self {
            Closeness::Matrix(m) => m.to_string(),
            Closeness::Scalar(r) => format_rational(r),
        }
    }

    fn is_max(&self) -> bool {
        match self {
            Closeness::Matrix(m) => *m == GrifMatrix::ones(),
            Closeness::Scalar(r) => *r == one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedAction {
    /// Position in the catalog.
    pub index: usize,
    pub name: String,
    pub result: Subset,
    pub closeness: Closeness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub ranked: Vec<RankedAction>,
    pub trace: Vec<String>,
}

impl Ranking {
    pub fn to_json_value(&self, u: &Universe) -> serde_json::Value {
        json!({
            "ranked": self.ranked.iter().map(|r| json!({
                "index": r.index,
                "name": r.name,
                "result": u.names(r.result),
                "closeness": r.closeness.to_json_value(),
            })).collect::<Vec<_>>(),
            "trace": self.trace,
        })
    }
}

/// Ranks each action by the closeness of its effect on `state` to `target`.
///
/// GRIF mode peels `⪯`-maximal layers, ordering each layer lexicographically
/// descending on `(ll, lu, ul, uu)` and then by catalog position. RIF mode
/// sorts by descending scalar, then catalog position.
pub fn suggest_action(
    s: &SetHgos,
    state: Subset,
    catalog: &[Effect],
    target: Subset,
    measure: &Measure,
) -> Result<Ranking> {
    if catalog.is_empty() {
        return Err(Error::input("empty action catalog"));
    }
    let u = s.universe();
    let mut items = Vec::with_capacity(catalog.len());
    for (index, e) in catalog.iter().enumerate() {
        let result = apply_effect(u, e, state)?;
        items.push(RankedAction { index, name: e.name.clone(), result, closeness: measure.closeness(s, result, target)? });
    }
    let mut trace = Vec::new();
    let ranked = match measure {
        Measure::Rif(_) => {
            let scalar = |r: &RankedAction| match r.closeness {
                Closeness::Scalar(v) => v,
                Closeness::Matrix(_) => unreachable!("rif mode yields scalars"),
            };
            items.sort_by(|x, y| scalar(y).cmp(&scalar(x)).then(x.index.cmp(&y.index)));
            for w in items.windows(2) {
                if scalar(&w[0]) == scalar(&w[1]) {
                    trace.push(format!(
                        "{} ties {} at {}; catalog order decides",
                        w[0].name,
                        w[1].name,
                        format_rational(&scalar(&w[0]))
                    ));
                }
            }
            items
        }
        Measure::Grif(_) => {
            let matrix = |r: &RankedAction| match r.closeness {
                Closeness::Matrix(m) => m,
                Closeness::Scalar(_) => unreachable!("grif mode yields matrices"),
            };
            let mut rest = items;
            let mut out = Vec::new();
            let mut layer_no = 0;
            while !rest.is_empty() {
                layer_no += 1;
                let (mut layer, remaining): (Vec<_>, Vec<_>) = rest
                    .iter()
                    .cloned()
                    .partition(|x| !rest.iter().any(|y| matrix_lt(&matrix(x), &matrix(y))));
                layer.sort_by(|x, y| matrix(y).lex_key().cmp(&matrix(x).lex_key()).then(x.index.cmp(&y.index)));
                trace.push(format!(
                    "layer {layer_no}: {}",
                    layer.iter().map(|r| format!("{} {}", r.name, matrix(r))).collect::<Vec<_>>().join(", ")
                ));
                for w in layer.windows(2) {
                    let (a, b) = (matrix(&w[0]), matrix(&w[1]));
                    if a == b {
                        trace.push(format!("{} ties {}; catalog order decides", w[0].name, w[1].name));
                    } else {
                        trace.push(format!("{} before {}: incomparable, lexicographic order decides", w[0].name, w[1].name));
                    }
                }
                out.extend(layer);
                rest = remaining;
            }
            out
        }
    };
    Ok(Ranking { ranked, trace })
}

/// One line of the decision log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub step: usize,
    pub event: String,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionLog {
    pub measure: String,
    pub entries: Vec<LogEntry>,
    /// Step 11: the revised estimate is strictly closer than the first.
    pub improvement: Check,
}

impl DecisionLog {
    /// One JSON document per entry, then the improvement verdict.
    pub fn to_json_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = serde_json::to_value(e).expect("log entry serializes");
                v["schema"] = json!(crate::SCHEMA);
                v.to_string()
            })
            .collect();
        out.push(json!({"schema": crate::SCHEMA, "measure": self.measure, "improvement": self.improvement}).to_string());
        out
    }
}

/// Strict improvement of `new` over `old`; equality at the maximum passes
/// with a non-strict note.
pub fn improvement_check(old: &Closeness, new: &Closeness) -> Check {
    const NAME: &str = "step 11 improvement";
    if old == new {
        return if new.is_max() {
            Check::holds(NAME).with_note("non-strict: both closeness values are maximal")
        } else {
            Check::fails(NAME, vec![old.render(), new.render()]).with_note("no change")
        };
    }
    match (old, new) {
        (Closeness::Matrix(a), Closeness::Matrix(b)) => {
            if matrix_leq(a, b) {
                return Check::holds(NAME);
            }
            let names = ["ll", "lu", "ul", "uu"];
            let worse: Vec<String> = names
                .iter()
                .zip(a.entries().iter().zip(b.entries()))
                .filter(|(_, (x, y))| y < *x)
                .map(|(n, (x, y))| format!("{n}: {} < {}", format_rational(&y), format_rational(x)))
                .collect();
            Check::fails(NAME, worse)
        }
        (Closeness::Scalar(a), Closeness::Scalar(b)) => {
            if b > a {
                Check::holds(NAME)
            } else {
                Check::fails(NAME, vec![format!("{} < {}", format_rational(b), format_rational(a))])
            }
        }
        _ => Check::fails(NAME, vec!["mixed measures".into()]),
    }
}

/// Replays the fourteen-step schema. `choose` picks the performed action
/// from each ranking; `|_, _| 0` follows the suggestion.
pub fn run_scenario(
    sc: &Scenario,
    measure: &Measure,
    choose: &mut dyn FnMut(usize, &Ranking) -> usize,
) -> Result<DecisionLog> {
    let s = &sc.space;
    let u = s.universe();
    let names = |x: Subset| json!(u.names(x));
    let approx = |x: Subset| json!({"lower": u.names(s.lower_set(x)), "upper": u.names(s.upper_set(x))});
    let mut entries = Vec::new();
    let mut log = |step: usize, event: &str, data: serde_json::Value| {
        entries.push(LogEntry { step, event: event.to_string(), data });
    };
    let (er, erp) = (sc.stage("Er"), sc.stage("Erp"));
    let (sok, sokp) = (sc.stage("Sok"), sc.stage("Sokp"));
    let (sok1, sokp1) = (sc.stage("Sok1"), sc.stage("Sokp1"));

    log(1, "in flight", json!({"seed": sc.seed}));
    log(2, "error indication", serde_json::Value::Null);
    log(3, "approximate Er", approx(er));
    let c_er = measure.closeness(s, er, erp)?;
    log(4, "closeness Er to Erp", c_er.to_json_value());
    log(5, "approximate Sok", approx(sok));
    let c_sok = measure.closeness(s, sok, sokp)?;
    log(6, "closeness Sok to Sokp", c_sok.to_json_value());

    let rank_a = suggest_action(s, erp, &sc.catalog_a, sokp, measure)?;
    log(7, "rank catalog A", rank_a.to_json_value(u));
    let pick = choose(7, &rank_a);
    let chosen_a = rank_a.ranked.get(pick).ok_or_else(|| Error::input("chosen action out of range"))?;
    let state1 = chosen_a.result;
    log(8, "perform", json!({"action": chosen_a.name, "state": names(state1)}));

    log(9, "error indication", serde_json::Value::Null);
    log(10, "approximate Sok1", approx(sok1));
    let c_sok1 = measure.closeness(s, sok1, sokp1)?;
    let improvement = improvement_check(&c_sok, &c_sok1);
    log(11, "closeness Sok1 to Sokp1", json!({"closeness": c_sok1.to_json_value(), "improvement": improvement}));

    let rank_c = suggest_action(s, state1, &sc.catalog_c, sokp1, measure)?;
    log(12, "rank catalog C", rank_c.to_json_value(u));
    let pick = choose(12, &rank_c);
    let chosen_c = rank_c.ranked.get(pick).ok_or_else(|| Error::input("chosen action out of range"))?;
    log(13, "perform", json!({"action": chosen_c.name, "state": names(chosen_c.result)}));
    let final_c = measure.closeness(s, chosen_c.result, sokp1)?;
    log(14, "stable", json!({"state": names(chosen_c.result), "closeness": final_c.to_json_value()}));
    Ok(DecisionLog { measure: measure.name().to_string(), entries, improvement })
}

/// Actions whose τ values tie while their `ζ^τ` matrices differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapPair {
    pub first: usize,
    pub second: usize,
    pub scalar: Rational,
    pub matrices: (GrifMatrix, GrifMatrix),
    /// The matrices are `⪯`-comparable, so GRIF mode separates the pair.
    pub comparable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub pairs: Vec<GapPair>,
}

impl GapReport {
    /// Some tie in RIF mode is strictly resolved in GRIF mode.
    pub fn gap_detected(&self) -> bool {
        self.pairs.iter().any(|p| p.comparable)
    }

    pub fn to_json_value(&self, catalog: &[Effect]) -> serde_json::Value {
        json!({
            "schema": crate::SCHEMA,
            "gap": self.gap_detected(),
            "pairs": self.pairs.iter().map(|p| json!({
                "actions": [catalog[p.first].name, catalog[p.second].name],
                "scalar": format_rational(&p.scalar),
                "matrices": [p.matrices.0.to_json_value(), p.matrices.1.to_json_value()],
                "comparable": p.comparable,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Compares the scalar and matrix views of one catalog.
pub fn discrimination_gap(
    s: &SetHgos,
    state: Subset,
    catalog: &[Effect],
    target: Subset,
    tau: &InclusionFn,
) -> Result<GapReport> {
    let u = s.universe();
    let n = u.len();
    let mut vals = Vec::with_capacity(catalog.len());
    for e in catalog {
        let x = apply_effect(u, e, state)?;
        vals.push((tau.eval_sets(x, target, n)?, zeta_sets(s, tau, x, target)?));
    }
    let mut pairs = Vec::new();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let ((si, mi), (sj, mj)) = (vals[i], vals[j]);
            if si == sj && mi != mj {
                let comparable = matrix_leq(&mi, &mj) || matrix_leq(&mj, &mi);
                pairs.push(GapPair { first: i, second: j, scalar: si, matrices: (mi, mj), comparable });
            }
        }
    }
    Ok(GapReport { pairs })
}

/// First triple `(X, Y, T)` of the family, in family order, with
/// `τ(X, T) = τ(Y, T)` and `ζ^τ(X, T) ≺ ζ^τ(Y, T)`. Triples with no empty
/// member are preferred.
pub fn find_gap_triple(s: &SetHgos, tau: &InclusionFn) -> Result<Option<(Subset, Subset, Subset)>> {
    let es = s.elements();
    let n = s.universe().len();
    let mut fallback = None;
    for &t in &es {
        let vals: Vec<(Rational, GrifMatrix)> = es
            .iter()
            .map(|&x| Ok((tau.eval_sets(x, t, n)?, zeta_sets(s, tau, x, t)?)))
            .collect::<Result<_>>()?;
        for i in 0..es.len() {
            for j in 0..es.len() {
                if vals[i].0 == vals[j].0 && matrix_lt(&vals[i].1, &vals[j].1) {
                    let triple = (es[i], es[j], t);
                    if [es[i], es[j], t].iter().all(|x| !x.is_empty()) {
                        return Ok(Some(triple));
                    }
                    fallback.get_or_insert(triple);
                }
            }
        }
    }
    Ok(fallback)
}

/// The effect turning `state` into `to`.
pub fn effect_towards(u: &Universe, name: &str, state: Subset, to: Subset) -> Effect {
    Effect { name: name.to_string(), add: u.names(to.minus(state)), remove: u.names(state.minus(to)) }
}

/// Synthetic dataset: objects `S = A ∪ B`, `C ⊆ B` the approximation
/// images, granulation `𝒢 ⊆ C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PilotDataset {
    pub n: usize,
    pub r: usize,
    pub q: usize,
    pub l: usize,
    pub seed: u64,
    pub universe: Universe,
    pub granules: Vec<Subset>,
    pub a: Vec<Subset>,
    /// `C` first, then the `q` further objects.
    pub b: Vec<Subset>,
    pub c: Vec<Subset>,
    /// `∅`, the universe and `∪𝒢` where not already in `S`; they close the carrier.
    pub frame: Vec<Subset>,
}

impl PilotDataset {
    pub fn space(&self) -> Result<SetHgos> {
        let family: Vec<Subset> = self.a.iter().chain(&self.b).chain(&self.frame).copied().collect();
        SetHgos::with_family(self.universe.clone(), self.granules.clone(), family)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let u = &self.universe;
        let fam = |v: &[Subset]| v.iter().map(|x| u.names(*x)).collect::<Vec<_>>();
        json!({
            "schema": crate::SCHEMA,
            "counts": {"n": self.n, "r": self.r, "q": self.q, "l": self.l},
            "seed": self.seed,
            "universe": u.labels(),
            "granules": fam(&self.granules),
            "A": fam(&self.a),
            "B": fam(&self.b),
            "C": fam(&self.c),
            "frame": fam(&self.frame),
        })
    }
}

/// Widest attribute universe the generator builds.
pub const DATASET_UNIVERSE_LIMIT: usize = 64;

fn block(i: usize) -> Subset {
    Subset::from_indices([2 * i, 2 * i + 1])
}

fn blocks_of(mask: u64, l: usize) -> Subset {
    (0..l).filter(|i| mask >> i & 1 == 1).fold(Subset::EMPTY, |acc, i| acc.union(block(i)))
}

/// Builds a dataset with `#C = n`, `#A = r`, `#B = q + n`, `#𝒢 = l`.
///
/// Granules are disjoint two-attribute blocks; free attributes lie in no
/// granule. `C` holds the granules and further unions of blocks. Objects of
/// `A` and `B \ C` are non-definite sets whose approximations lie in `C`.
pub fn generate_dataset(n: usize, r: usize, q: usize, l: usize, seed: u64) -> Result<(PilotDataset, CggsBundle)> {
    if l > n {
        return Err(Error::input(format!("need l ≤ n, got l = {l}, n = {n}")));
    }
    if n == 0 || r == 0 {
        return Err(Error::input("need n ≥ 1 and r ≥ 1"));
    }
    if l < 63 && n as u128 > 1u128 << l {
        return Err(Error::input(format!("only 2^{l} unions of {l} granules exist, n = {n} requested")));
    }
    // Each C element with a nonempty free part yields 2^f - 1 distinct objects.
    let mut f = 1;
    while (n as u128) * ((1u128 << f) - 1) < (r + q) as u128 {
        f += 1;
    }
    let width = 2 * l + f;
    if width > DATASET_UNIVERSE_LIMIT {
        return Err(Error::input(format!("dataset needs {width} attributes; limit is {DATASET_UNIVERSE_LIMIT}")));
    }
    let labels: Vec<String> =
        (0..l).flat_map(|i| [format!("g{}a", i + 1), format!("g{}b", i + 1)]).chain((0..f).map(|j| format!("f{}", j + 1))).collect();
    let universe = Universe::new(labels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut masks: Vec<u64> = (0..l).map(|i| 1u64 << i).collect();
    let mut seen: HashSet<u64> = masks.iter().copied().collect();
    let all = if l >= 64 { u64::MAX } else { (1u64 << l) - 1 };
    if (1u128 << l.min(127)) <= 4 * n as u128 {
        let mut rest: Vec<u64> = (0..=all).filter(|m| !seen.contains(m)).collect();
        rest.shuffle(&mut rng);
        masks.extend(rest.into_iter().take(n - l));
    } else {
        while masks.len() < n {
            let m = rng.gen::<u64>() & all;
            if seen.insert(m) {
                masks.push(m);
            }
        }
    }
    let c: Vec<Subset> = masks.iter().map(|m| blocks_of(*m, l)).collect();
    let granules: Vec<Subset> = (0..l).map(block).collect();

    let free: Vec<usize> = (2 * l..width).collect();
    let pick_free = |bits: u64| Subset::from_indices(free.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, i)| *i));
    let comparable: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| masks[i] & !masks[j] == 0)
        .collect();
    let want = r + q;
    let mut objects: Vec<Subset> = Vec::with_capacity(want);
    let mut taken: HashSet<Subset> = HashSet::new();
    let mut attempts = 0usize;
    while objects.len() < want && attempts < 64 * want {
        attempts += 1;
        let (lo, hi) = comparable[rng.gen_range(0..comparable.len())];
        let diff = masks[hi] & !masks[lo];
        let mut x = blocks_of(masks[lo], l);
        for i in (0..l).filter(|i| diff >> i & 1 == 1) {
            x = x.union(Subset::singleton(2 * i + rng.gen_range(0..2)));
        }
        x = x.union(pick_free(rng.gen_range(0..(1u64 << f))));
        if (diff != 0 || x != c[lo]) && taken.insert(x) {
            objects.push(x);
        }
    }
    // Deterministic completion: each C element with every nonempty free part.
    'fill: for bits in 1..(1u64 << f) {
        for cc in &c {
            if objects.len() == want {
                break 'fill;
            }
            let x = cc.union(pick_free(bits));
            if taken.insert(x) {
                objects.push(x);
            }
        }
    }
    let a = objects[..r].to_vec();
    let b: Vec<Subset> = c.iter().copied().chain(objects[r..].iter().copied()).collect();
    let in_s: HashSet<Subset> = a.iter().chain(&b).copied().collect();
    let union_g = granules.iter().fold(Subset::EMPTY, |m, g| m.union(*g));
    let mut frame = Vec::new();
    for x in [Subset::EMPTY, universe.full(), union_g] {
        if !in_s.contains(&x) && !frame.contains(&x) {
            frame.push(x);
        }
    }
    let ds = PilotDataset { n, r, q, l, seed, universe, granules, a, b, c, frame };

    let objects: Vec<String> = (1..=n).map(|i| format!("o{i}")).collect();
    let cells = ds
        .c
        .iter()
        .map(|cc| {
            (0..width)
                .map(|k| BTreeSet::from([if cc.contains(k) { "1" } else { "0" }.to_string()]))
                .collect()
        })
        .collect();
    let table = InformationTable::new(objects, ds.universe.labels().to_vec(), cells)?;
    let xi = ds.c.iter().enumerate().map(|(i, cc)| (i, *cc)).collect();
    let bundle = CggsBundle::new(table, ds.space()?, xi, ValuationAlgebra::boolean())?;
    Ok((ds, bundle))
}

/// Structural invariants of a generated dataset and the GGS axioms of its
/// space.
pub fn check_dataset(ds: &PilotDataset) -> Result<Report> {
    let s = ds.space()?;
    let cset: HashSet<Subset> = ds.c.iter().copied().collect();
    let bset: HashSet<Subset> = ds.b.iter().copied().collect();
    let show = |x: Subset| ds.universe.show(x);
    let count = |name: &str, got: usize, want: usize| {
        if got == want {
            Check::holds(name)
        } else {
            Check::fails(name, vec![got.to_string(), want.to_string()])
        }
    };
    let distinct = |v: &[Subset]| v.iter().collect::<HashSet<_>>().len();
    let mut r = Report::new();
    r.push(count("#C = n", distinct(&ds.c), ds.n));
    r.push(count("#A = r", distinct(&ds.a), ds.r));
    r.push(count("#B = q + n", distinct(&ds.b), ds.q + ds.n));
    r.push(count("#G = l", distinct(&ds.granules), ds.l));
    r.push(Check::from_witness("A ∩ B = ∅", ds.a.iter().find(|x| bset.contains(x)).map(|x| vec![show(*x)])));
    r.push(Check::from_witness("C ⊆ B", ds.c.iter().find(|x| !bset.contains(x)).map(|x| vec![show(*x)])));
    r.push(Check::from_witness("G ⊆ C", ds.granules.iter().find(|x| !cset.contains(x)).map(|x| vec![show(*x)])));
    r.push(Check::from_witness(
        "approximations of A in C",
        ds.a
            .iter()
            .find(|x| !cset.contains(&s.lower_set(**x)) || !cset.contains(&s.upper_set(**x)))
            .map(|x| vec![show(*x)]),
    ));
    r.push(Check::from_witness(
        "C definite",
        ds.c.iter().find(|x| !s.is_definite(**x)).map(|x| vec![show(*x)]),
    ));
    for c in check_ggs_axioms(&s, AxiomMode::Ggs).checks {
        r.push(Check { name: format!("GGS {}", c.name), ..c });
    }
    Ok(r)
}

/// A scenario over a dataset's space, deterministic in `seed`.
///
/// True states are drawn from `S`; the revised estimate `Sok1` is the
/// element closest to `Sokp1` under `ζ^{K0}`. Catalog effects move their
/// state to drawn elements, and one catalog entry each is a no-op.
pub fn generate_scenario(ds: &PilotDataset, seed: u64) -> Result<Scenario> {
    let s = ds.space()?;
    let u = s.universe().clone();
    let es = s.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || es[rng.gen_range(0..es.len())];
    let (er, erp, sok, sokp, sokp1) = (draw(), draw(), draw(), draw(), draw());
    let mut best: Option<(GrifMatrix, Subset)> = None;
    for &x in &es {
        let m = zeta_sets(&s, &InclusionFn::K0, x, sokp1)?;
        let better = match &best {
            None => true,
            Some((b, _)) => matrix_lt(b, &m) || (!matrix_leq(&m, b) && m.lex_key() > b.lex_key()),
        };
        if better {
            best = Some((m, x));
        }
    }
    let sok1 = best.expect("nonempty family").1;
    let targets_a: Vec<Subset> = (0..3).map(|_| draw()).collect();
    let targets_c: Vec<Subset> = (0..3).map(|_| draw()).collect();
    let catalog = |prefix: &str, from: Subset, targets: &[Subset]| -> Vec<Effect> {
        let mut v: Vec<Effect> =
            targets.iter().enumerate().map(|(i, t)| effect_towards(&u, &format!("{prefix}{}", i + 1), from, *t)).collect();
        v.push(Effect { name: format!("{prefix}{}", targets.len() + 1), add: vec![], remove: vec![] });
        v
    };
    let catalog_a = catalog("A", erp, &targets_a);
    let catalog_c = catalog("C", sokp, &targets_c);
    let stages = BTreeMap::from([("Er", er), ("Erp", erp), ("Sok", sok), ("Sokp", sokp), ("Sok1", sok1), ("Sokp1", sokp1)]);
    Scenario::new(s, stages, catalog_a, catalog_c, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::five_element_space;

    fn top(_: usize, _: &Ranking) -> usize {
        0
    }

    fn fixture_scenario(stages: [&str; 6]) -> Scenario {
        let s = five_element_space();
        let u = s.universe().clone();
        let p = |x: &str| if x == "S" { u.full() } else { u.parse_subset(x).unwrap() };
        let map = STAGES.iter().zip(stages).map(|(k, v)| (*k, p(v))).collect();
        let a = vec![effect_towards(&u, "A1", p(stages[1]), p("a,b,e")), effect_towards(&u, "A2", p(stages[1]), p("c,e"))];
        let c = vec![Effect { name: "C1".into(), add: vec![], remove: vec![] }];
        Scenario::new(s, map, a, c, 3).unwrap()
    }

    #[test]
    fn dataset_invariants_and_determinism() {
        let (d1, b1) = generate_dataset(3, 2, 1, 2, 7).unwrap();
        let (d2, _) = generate_dataset(3, 2, 1, 2, 7).unwrap();
        assert_eq!(d1.to_json_value().to_string(), d2.to_json_value().to_string());
        let r = check_dataset(&d1).unwrap();
        assert!(r.all_ok(), "{r:?}");
        assert_eq!(b1.xi.len(), 3);
        assert_eq!(b1.table.objects().len(), 3);
    }

    #[test]
    fn dataset_boundaries() {
        let (d, _) = generate_dataset(1, 1, 0, 1, 0).unwrap();
        assert!(check_dataset(&d).unwrap().all_ok());
        assert_eq!(d.a.len(), 1);
        let (d, _) = generate_dataset(4, 3, 2, 4, 5).unwrap();
        assert_eq!(d.c.iter().collect::<HashSet<_>>(), d.granules.iter().collect::<HashSet<_>>());
        assert!(check_dataset(&d).unwrap().all_ok());
        assert!(generate_dataset(2, 1, 0, 3, 0).is_err());
        assert!(generate_dataset(5, 1, 0, 2, 0).is_err());
    }

    #[test]
    fn perfect_estimates_pass_non_strictly() {
        let sc = fixture_scenario(["S", "S", "S", "S", "S", "S"]);
        let log = run_scenario(&sc, &Measure::Grif(InclusionFn::K0), &mut top).unwrap();
        assert!(log.improvement.status.is_ok());
        assert!(log.improvement.note.as_deref().unwrap().contains("non-strict"));
        assert_eq!(log.entries.len(), 14);
        assert_eq!(log.entries[3].data, GrifMatrix::ones().to_json_value());
    }

    #[test]
    fn worsening_names_the_entry() {
        // ζ(S, S) is all-ones; ζ({c}, {f}) drops ul and uu.
        let sc = fixture_scenario(["a", "a", "S", "S", "c", "f"]);
        let log = run_scenario(&sc, &Measure::Grif(InclusionFn::K0), &mut top).unwrap();
        assert!(!log.improvement.status.is_ok());
        let w = log.improvement.witness.clone().unwrap();
        assert!(w.iter().any(|e| e.starts_with("ul")) && w.iter().any(|e| e.starts_with("uu")));
    }

    #[test]
    fn single_action_is_chosen_and_empty_catalog_refused() {
        let s = five_element_space();
        let e = vec![Effect { name: "only".into(), add: vec!["a".into()], remove: vec![] }];
        let r = suggest_action(&s, Subset::EMPTY, &e, s.universe().full(), &Measure::Grif(InclusionFn::K0)).unwrap();
        assert_eq!(r.ranked[0].name, "only");
        assert!(suggest_action(&s, Subset::EMPTY, &[], Subset::EMPTY, &Measure::Rif(InclusionFn::K0)).is_err());
    }

    #[test]
    fn comparable_pair_ranks_larger_first() {
        let s = five_element_space();
        let u = s.universe().clone();
        let t = u.parse_subset("a,b,e").unwrap();
        let cat = vec![
            effect_towards(&u, "far", Subset::EMPTY, u.parse_subset("c").unwrap()),
            effect_towards(&u, "near", Subset::EMPTY, t),
        ];
        let r = suggest_action(&s, Subset::EMPTY, &cat, t, &Measure::Grif(InclusionFn::K0)).unwrap();
        assert_eq!(r.ranked[0].name, "near");
        assert!(r.trace[0].starts_with("layer 1"));
    }

    #[test]
    fn gap_exists_on_fixture() {
        let s = five_element_space();
        let (x, y, t) = find_gap_triple(&s, &InclusionFn::K0).unwrap().expect("gap triple");
        let u = s.universe().clone();
        let cat = vec![effect_towards(&u, "X", Subset::EMPTY, x), effect_towards(&u, "Y", Subset::EMPTY, y)];
        let rif = suggest_action(&s, Subset::EMPTY, &cat, t, &Measure::Rif(InclusionFn::K0)).unwrap();
        assert_eq!(rif.ranked[0].name, "X");
        assert!(rif.trace[0].contains("ties"));
        let grif = suggest_action(&s, Subset::EMPTY, &cat, t, &Measure::Grif(InclusionFn::K0)).unwrap();
        assert_eq!(grif.ranked[0].name, "Y");
        let gap = discrimination_gap(&s, Subset::EMPTY, &cat, t, &InclusionFn::K0).unwrap();
        assert!(gap.gap_detected());
    }

    #[test]
    fn generated_scenario_is_deterministic() {
        let (ds, _) = generate_dataset(3, 2, 1, 2, 7).unwrap();
        let a = generate_scenario(&ds, 7).unwrap();
        let b = generate_scenario(&ds, 7).unwrap();
        assert_eq!(a, b);
        let la = run_scenario(&a, &Measure::Grif(InclusionFn::K0), &mut top).unwrap().to_json_lines();
        let lb = run_scenario(&b, &Measure::Grif(InclusionFn::K0), &mut top).unwrap().to_json_lines();
        assert_eq!(la, lb);
        let back = Scenario::from_json(&a.to_json_value().to_string()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn malformed_stages_rejected() {
        let sc = fixture_scenario(["S", "S", "S", "S", "S", "S"]);
        let mut v = sc.to_json_value();
        v["stages"].as_object_mut().unwrap().remove("Sok1");
        assert!(matches!(Scenario::from_json(&v.to_string()), Err(Error::Input(_))));
    }
}
