//! Acceptance gate: one line per criterion, each with its pinned time budget.
//!
//! Criterion 1 is red by construction: four tabulated rows are not the
//! approximations of any granulation. The harness reports it as FAIL and
//! pins the exact mismatch set; any other outcome for it is an error.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use granulum::fixtures::{
    doctors_parthood, five_element_relation, five_element_space, letters, REFERENCE_APPROXIMATIONS,
    REFERENCE_NEIGHBORHOODS,
};
use granulum::grif::{
    check_semiring, form_conditions, form_disjunction, form_theorems, has_upper_form, k1_all_ones_conditions,
    monotonicity_check, zeta, FormTau, GrifMatrix,
};
use granulum::inverse::{consistency_filter, observations_of, CandidateModel, GrifObservation, Observation, Subject};
use granulum::mereo::{BoundKind, MereoKind, ParthoodRelation};
use granulum::norms::{Negation, NormTriple, SNorm, TNorm};
use granulum::pilot::{
    discrimination_gap, effect_towards, find_gap_triple, generate_dataset, generate_scenario, run_scenario, Measure,
    Ranking,
};
use granulum::rational::{grid, one, rat, ratio_or_one, Rational};
use granulum::rif::{prif_oracle, profile_inclusion_fn, InclusionFn, RifClass};
use granulum::spaces::{build_set_hgos, GranularSpace, SetHgos};
use granulum::tables::{successor_neighborhoods, BinaryRelationSpace};
use granulum::{Status, Subset, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_GRANULATIONS: usize = 1_000;
const RANDOM_SPACES: usize = 100;
const RANDOM_SEED: u64 = 0xacce;

/// Rows whose reference approximations are not those of the granulation:
/// `(member, computed lower, computed upper, reference lower, reference upper)`.
const KNOWN_ROW_MISMATCHES: [(&str, &str, &str, &str, &str); 5] = [
    ("b", "", "abe", "a", "abe"),
    ("ae", "ae", "abce", "a", "abce"),
    ("abe", "abe", "abce", "a", "abce"),
    ("abcf", "acf", "S", "abcf", "S"),
    ("abce", "abce", "S", "abcf", "S"),
];

enum Outcome {
    Pass(String),
    Fail(String),
    /// A red criterion whose failure matches the recorded analysis.
    KnownFail(String),
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ok_if(cond: bool, pass: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Outcome::Pass(pass.into())
    } else {
        Outcome::Fail(fail.into())
    }
}

/// Powerset spaces on universes of 1..=5 points with 1..=4 random nonempty
/// granules.
fn random_spaces(count: usize, seed: u64) -> Vec<SetHgos> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let u = Universe::new(labels).unwrap();
            let k = rng.gen_range(1..=4);
            let gs = (0..k).map(|_| Subset(rng.gen_range(1..(1u64 << n)))).collect();
            build_set_hgos(u, gs).unwrap()
        })
        .collect()
}

fn approx_pair(s: &SetHgos, x: Subset) -> [Subset; 2] {
    [s.lower_set(x), s.upper_set(x)]
}

/// `#(X∩Y)/#X`, 1 on `X = ∅`, computed without the library's τ.
fn k0_direct(x: Subset, y: Subset) -> Rational {
    ratio_or_one(x.intersect(y).len(), x.len())
}

/// `#Y/#(X∪Y)`, 1 on `X∪Y = ∅`.
fn k1_direct(x: Subset, y: Subset) -> Rational {
    ratio_or_one(y.len(), x.union(y).len())
}

fn direct_matrix(s: &SetHgos, a: Subset, b: Subset, f: fn(Subset, Subset) -> Rational) -> GrifMatrix {
    let (x, y) = (approx_pair(s, a), approx_pair(s, b));
    GrifMatrix::new(f(x[0], y[0]), f(x[0], y[1]), f(x[1], y[0]), f(x[1], y[1]))
}

fn c1_golden_tables() -> Outcome {
    let rel = five_element_relation();
    let u = rel.universe.clone();
    let nbhd: BTreeSet<Subset> = successor_neighborhoods(&rel).family().into_iter().collect();
    let want: BTreeSet<Subset> = REFERENCE_NEIGHBORHOODS.iter().map(|x| letters(&u, x)).collect();
    if nbhd != want {
        return Outcome::Fail(format!("neighborhoods {:?}", nbhd.iter().map(|x| u.show(*x)).collect::<Vec<_>>()));
    }
    let s = five_element_space();
    let mut bad = Vec::new();
    let mut bad_rows = BTreeSet::new();
    for (row, (members, lo, hi)) in REFERENCE_APPROXIMATIONS.iter().enumerate() {
        for m in members.iter() {
            let [l, h] = approx_pair(&s, letters(&u, m));
            if l != letters(&u, lo) || h != letters(&u, hi) {
                bad_rows.insert(row);
                let show = |x: Subset| if x == u.full() { "S".to_string() } else { u.names(x).concat() };
                bad.push((m.to_string(), show(l), show(h), lo.to_string(), hi.to_string()));
            }
        }
    }
    if bad.is_empty() {
        return Outcome::Pass("5 neighborhoods, 18 rows exact".into());
    }
    let show = |x: &str| if x.is_empty() { "∅".to_string() } else { x.to_string() };
    let detail: Vec<String> = bad
        .iter()
        .map(|(m, l, h, pl, ph)| format!("{m}: ({}, {}) vs reference ({}, {})", show(l), show(h), show(pl), show(ph)))
        .collect();
    let recorded: Vec<(String, String, String, String, String)> = KNOWN_ROW_MISMATCHES
        .iter()
        .map(|(a, b, c, d, e)| (a.to_string(), b.to_string(), c.to_string(), d.to_string(), e.to_string()))
        .collect();
    // Published lower({b}) = {a} and lower({a,b,c,e}) = {a,b,c,f} leave their argument: no granulation gives them.
    let escapes_argument = ["b", "abce"].iter().all(|m| {
        let (_, _, _, pl, _) = recorded.iter().find(|r| r.0 == *m).unwrap();
        !letters(&u, pl).is_subset(letters(&u, m))
    });
    let msg = format!("{} of 18 rows differ at {} members: {}", bad_rows.len(), bad.len(), detail.join("; "));
    if bad == recorded && bad_rows.len() == 4 && escapes_argument {
        Outcome::KnownFail(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn c2_grif_golden() -> Outcome {
    let s = five_element_space();
    let u = s.universe().clone();
    let m = zeta(&s, &InclusionFn::K0, letters(&u, "ab"), letters(&u, "acf")).unwrap();
    let want = GrifMatrix::new(one(), one(), rat(1, 3), one());
    ok_if(m == want, format!("ζ = {m}"), format!("ζ = {m}, expected {want}"))
}

fn c3_mereology() -> Outcome {
    let p = ParthoodRelation::new(doctors_parthood());
    let k = ["a", "b", "c", "e"];
    let fc = p.predicate("c", &k, MereoKind::Fusion).unwrap();
    let fe = p.predicate("e", &k, MereoKind::Fusion).unwrap();
    let ub = p.bounds(p.universe().subset(&k).unwrap(), BoundKind::Upper);
    ok_if(
        fc && fe && ub.is_empty(),
        "fusion(c,K), fusion(e,K), UB(K) = ∅",
        format!("fusion(c) = {fc}, fusion(e) = {fe}, UB = {}", p.universe().show(ub)),
    )
}

/// Every ordered pair of every space, `f` returning a failure description.
fn scan_all(spaces: &[SetHgos], f: &(dyn Fn(&SetHgos, Subset, Subset) -> Option<String> + Sync)) -> (u64, Option<String>) {
    let per: Vec<(u64, Option<String>)> = granulum::par::map_slice(spaces, |s| {
        let es = s.elements();
        let mut count = 0u64;
        for &a in &es {
            for &b in &es {
                count += 1;
                if let Some(w) = f(s, a, b) {
                    return (count, Some(format!("{:?}: {w}", s.granulation().iter().map(|g| s.universe().show(*g)).collect::<Vec<_>>())));
                }
            }
        }
        (count, None)
    });
    let pairs = per.iter().map(|p| p.0).sum();
    (pairs, per.into_iter().find_map(|p| p.1))
}

fn theorem_domain() -> Vec<SetHgos> {
    let mut v = vec![five_element_space()];
    v.extend(random_spaces(RANDOM_GRANULATIONS, RANDOM_SEED));
    v
}

fn c4_impossibility() -> Outcome {
    let spaces = theorem_domain();
    let forbidden = GrifMatrix::forbidden();
    let (pairs, bad) = scan_all(&spaces, &|s, a, b| {
        let lib = zeta(s, &InclusionFn::K0, a, b).unwrap();
        let direct = direct_matrix(s, a, b, k0_direct);
        if lib != direct {
            return Some(format!("routes disagree at {}, {}", s.universe().show(a), s.universe().show(b)));
        }
        (lib == forbidden).then(|| format!("forbidden at {}, {}", s.universe().show(a), s.universe().show(b)))
    });
    let reports_ok = spaces.iter().all(|s| {
        form_theorems(s, FormTau::K0).unwrap().status("[[0,1],[1,1]] unreachable") == Some(Status::Holds)
    });
    match bad {
        None if reports_ok => Outcome::Pass(format!("{pairs} pairs over {} spaces, 0 occurrences", spaces.len())),
        None => Outcome::Fail("direct scan clean but the theorem report disagrees".into()),
        Some(w) => Outcome::Fail(w),
    }
}

fn c5_k1_all_ones() -> Outcome {
    let spaces = theorem_domain();
    let (pairs, bad) = scan_all(&spaces, &|s, a, b| {
        let direct = direct_matrix(s, a, b, k1_direct);
        let lib = zeta(s, &InclusionFn::K1, a, b).unwrap();
        if lib != direct {
            return Some("routes disagree".into());
        }
        let all_ones = direct == GrifMatrix::ones();
        let cond = k1_all_ones_conditions(s, a, b).iter().any(|c| *c);
        (all_ones != cond).then(|| format!("{}, {}: all-ones {all_ones}, conditions {cond}", s.universe().show(a), s.universe().show(b)))
    });
    let reports_ok = spaces.iter().all(|s| {
        form_theorems(s, FormTau::K1).unwrap().status("K1 all-ones characterization") == Some(Status::Holds)
    });
    match bad {
        None if reports_ok => Outcome::Pass(format!("{pairs} pairs, 0 counterexamples")),
        None => Outcome::Fail("direct scan clean but the theorem report disagrees".into()),
        Some(w) => Outcome::Fail(w),
    }
}

fn c6_form_theorem_status() -> Outcome {
    let spaces = theorem_domain();
    let (_, bad) = scan_all(&spaces, &|s, a, b| {
        if s.lower_set(a).is_empty() {
            return None;
        }
        let m = direct_matrix(s, a, b, k0_direct);
        let lhs = has_upper_form(&m) && m.ul < one();
        let rhs = form_conditions(s, a, b).iter().all(|c| *c);
        (lhs != rhs).then(|| format!("{}, {}", s.universe().show(a), s.universe().show(b)))
    });
    if let Some(w) = bad {
        return Outcome::Fail(format!("necessary conditions fail at {w}"));
    }
    let s = five_element_space();
    let u = s.universe().clone();
    let (a, b) = (letters(&u, "ab"), letters(&u, "acf"));
    let m = zeta(&s, &InclusionFn::K0, a, b).unwrap();
    let refuted = has_upper_form(&m) && !form_disjunction(&s, a, b) && !s.lower_set(a).is_empty();
    let r = form_theorems(&s, FormTau::K0).unwrap();
    let entries_ok = r.status("entry characterization") == Some(Status::Holds);
    let converse_red = r.status("upper form converse") == Some(Status::Fails);
    ok_if(
        refuted && entries_ok && converse_red,
        format!("conditions hold exhaustively; converse refuted by ({{a,b}}, {{a,c,f}}), ζ = {m}"),
        format!("refuted {refuted}, entries {entries_ok}, converse report red {converse_red}"),
    )
}

fn c7_prif() -> Outcome {
    let r = prif_oracle();
    let broken: Vec<&str> =
        r.theorems.iter().filter(|c| c.status != Status::Holds).map(|c| c.name.as_str()).collect();
    let maps: u64 = r.theorems.iter().map(|c| c.maps).sum();
    let names: BTreeSet<&str> = r.theorems.iter().map(|c| c.name.as_str()).collect();
    let undropped: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| {
            let drops: Vec<_> = r.premise_drops.iter().filter(|d| d.name.starts_with(&format!("{n} without"))).collect();
            !drops.is_empty() && !drops.iter().all(|d| d.status == Status::Fails)
        })
        .collect();
    let nine = (1..=9).all(|i| names.contains(format!("prif{i}").as_str()));
    ok_if(
        broken.is_empty() && undropped.is_empty() && nine,
        format!("9 implications hold over {maps} map checks; every dropped premise has a counterexample"),
        format!("broken {broken:?}, premise drops without counterexample {undropped:?}, all nine present {nine}"),
    )
}

fn c8_semiring() -> Outcome {
    let g = grid(2);
    let mm = check_semiring(&NormTriple::min_max(), &g).unwrap();
    let nt = NormTriple::new(TNorm::Product, SNorm::Lukasiewicz, Negation::Standard).unwrap();
    let pl = check_semiring(&nt, &g).unwrap();
    let distrib_red = ["left distributivity", "right distributivity"]
        .iter()
        .find(|n| pl.status(n) == Some(Status::Fails))
        .and_then(|n| pl.get(n))
        .and_then(|c| c.witness.clone());
    ok_if(
        mm.all_ok() && distrib_red.is_some(),
        format!("min/max laws hold over 81³ triples; product/Łukasiewicz counterexample {:?}", distrib_red.clone().unwrap_or_default()),
        format!("min/max failures {:?}", mm.failures().map(|c| c.name.clone()).collect::<Vec<_>>()),
    )
}

fn c9_basic_grif_properties() -> Outcome {
    let mut spaces = vec![five_element_space()];
    spaces.extend(random_spaces(RANDOM_SPACES, RANDOM_SEED + 1));
    let names = ["ulu2", "llu2", "mo", "refl", "bot", "top"];
    for s in &spaces {
        let r = monotonicity_check(s).unwrap();
        for n in names {
            match r.status(n) {
                Some(st) if st.is_ok() => {}
                other => {
                    return Outcome::Fail(format!(
                        "{n} is {other:?} on granulation {:?}",
                        s.granulation().iter().map(|g| s.universe().show(*g)).collect::<Vec<_>>()
                    ))
                }
            }
        }
    }
    Outcome::Pass(format!("6 properties on {} spaces", spaces.len()))
}

fn c10_kst_classification() -> Outcome {
    let s = five_element_space();
    let eighths: Vec<Rational> = (1..8).map(|k| rat(k, 8)).collect();
    let mut worst: Option<String> = None;
    let mut count = 0;
    for &a in &eighths {
        for &b in eighths.iter().filter(|b| **b > a) {
            let p = profile_inclusion_fn(&InclusionFn::kst(InclusionFn::K0, a, b).unwrap(), &s).unwrap();
            count += 1;
            if p.classification < RifClass::WqRif {
                worst.get_or_insert(format!("Kst({a}, {b}) is {:?}", p.classification));
            }
        }
        let p = profile_inclusion_fn(&InclusionFn::kst(InclusionFn::K0, a, one()).unwrap(), &s).unwrap();
        count += 1;
        if p.classification < RifClass::QRif {
            worst.get_or_insert(format!("Kst({a}, 1) is {:?}", p.classification));
        }
    }
    match worst {
        None => Outcome::Pass(format!("{count} parameter pairs classified at or above the bound")),
        Some(w) => Outcome::Fail(w),
    }
}

fn c11_inverse_round_trip() -> Outcome {
    let u = Universe::parse_list("w,x,y,z").unwrap();
    let lost: Vec<u64> = granulum::par::map_range(1 << 16, |code| {
        let rel = BinaryRelationSpace::from_code(u.clone(), code as u64);
        let model = CandidateModel::from_relation(&rel);
        let obs = observations_of(&model.space().unwrap());
        let kept = consistency_filter(std::slice::from_ref(&model), &obs, &InclusionFn::K0).unwrap();
        (kept != [model]).then_some(code as u64)
    })
    .into_iter()
    .flatten()
    .collect();
    if let Some(code) = lost.first() {
        return Outcome::Fail(format!("{} relations lost, first code {code}", lost.len()));
    }
    let rel = BinaryRelationSpace::from_code(u.clone(), 0xffff);
    let model = CandidateModel::from_relation(&rel);
    let mut obs = observations_of(&model.space().unwrap());
    obs.push(Observation {
        grif: vec![GrifObservation {
            a: Subject::Set(vec!["w".into()]),
            b: Subject::Set(vec!["x".into()]),
            matrix: GrifMatrix::forbidden(),
        }],
        ..Observation::default()
    });
    let kept = consistency_filter(&[model], &obs, &InclusionFn::K0).unwrap();
    ok_if(
        kept.is_empty(),
        "65536 generating granulations survive; infeasible matrix empties the survivors",
        "infeasible observation left survivors",
    )
}

fn c12_pilot() -> Outcome {
    let run = || {
        let (ds, _) = generate_dataset(6, 4, 3, 3, 7).unwrap();
        let sc = generate_scenario(&ds, 7).unwrap();
        let log = run_scenario(&sc, &Measure::Grif(InclusionFn::K0), &mut |_, _: &Ranking| 0).unwrap();
        (ds.to_json_value().to_string(), log.to_json_lines())
    };
    let (d1, l1) = run();
    let (d2, l2) = run();
    if d1 != d2 || l1 != l2 {
        return Outcome::Fail("runs under one seed differ".into());
    }
    let s = five_element_space();
    let u = s.universe().clone();
    let Some((x, y, t)) = find_gap_triple(&s, &InclusionFn::K0).unwrap() else {
        return Outcome::Fail("no action pair with tied τ and ⪯-separated matrices".into());
    };
    let cat = vec![effect_towards(&u, "first", Subset::EMPTY, x), effect_towards(&u, "second", Subset::EMPTY, y)];
    let gap = discrimination_gap(&s, Subset::EMPTY, &cat, t, &InclusionFn::K0).unwrap();
    let direct_tie = k0_direct(x, t) == k0_direct(y, t);
    let (mx, my) = (direct_matrix(&s, x, t, k0_direct), direct_matrix(&s, y, t, k0_direct));
    let separated = granulum::grif::matrix_lt(&mx, &my);
    ok_if(
        gap.gap_detected() && direct_tie && separated,
        format!(
            "bit-identical under seed 7; τ ties at {} for {} and {} toward {}, ζ {mx} ≺ {my}",
            k0_direct(x, t),
            u.show(x),
            u.show(y),
            u.show(t)
        ),
        format!("gap {}, tie {direct_tie}, separated {separated}", gap.gap_detected()),
    )
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "golden neighborhoods and approximation table", budget: Duration::from_secs(1), run: c1_golden_tables },
        Criterion { id: 2, name: "GRIF golden value", budget: Duration::from_secs(1), run: c2_grif_golden },
        Criterion { id: 3, name: "mereology golden values", budget: Duration::from_secs(1), run: c3_mereology },
        Criterion { id: 4, name: "[[0,1],[1,1]] impossibility under K0", budget: Duration::from_secs(60), run: c4_impossibility },
        Criterion { id: 5, name: "K1 all-ones biconditional", budget: Duration::from_secs(60), run: c5_k1_all_ones },
        Criterion { id: 6, name: "upper-form conditions and converse refutation", budget: Duration::from_secs(60), run: c6_form_theorem_status },
        Criterion { id: 7, name: "prif1-prif9 and premise drops", budget: Duration::from_secs(30), run: c7_prif },
        Criterion { id: 8, name: "matrix semiring laws", budget: Duration::from_secs(120), run: c8_semiring },
        Criterion { id: 9, name: "basic GRIF property suite", budget: Duration::from_secs(30), run: c9_basic_grif_properties },
        Criterion { id: 10, name: "Kst classification", budget: Duration::from_secs(60), run: c10_kst_classification },
        Criterion { id: 11, name: "inverse round trip over all 4-point relations", budget: Duration::from_secs(120), run: c11_inverse_round_trip },
        Criterion { id: 12, name: "pilot determinism and discrimination gap", budget: Duration::from_secs(60), run: c12_pilot },
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for c in &criteria {
        let t = Instant::now();
        let outcome = (c.run)();
        let dt = t.elapsed();
        let over = dt > c.budget;
        let (tag, msg) = match outcome {
            Outcome::Pass(m) if !over => {
                passed += 1;
                ("PASS", m)
            }
            Outcome::Pass(m) => {
                unexpected += 1;
                ("FAIL", format!("over budget: {m}"))
            }
            Outcome::KnownFail(m) => ("FAIL", format!("recorded finding: {m}")),
            Outcome::Fail(m) => {
                unexpected += 1;
                ("FAIL", m)
            }
        };
        println!(
            "criterion {:>2} {tag} [{:.2}s / {}s] {}: {msg}",
            c.id,
            dt.as_secs_f64(),
            c.budget.as_secs(),
            c.name
        );
    }
    println!("acceptance: {passed}/{} pass, {unexpected} unexpected failure(s)", criteria.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
