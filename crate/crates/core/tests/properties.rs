use granulum::grif::{matrix_leq, zeta, GrifMatrix};
use granulum::inverse::{consistency_filter, enumerate_models, observations_of, Generator, UniverseSpec};
use granulum::pilot::{check_dataset, generate_dataset};
use granulum::rational::grid;
use granulum::rif::InclusionFn;
use granulum::spaces::{
    build_set_hgos, check_admissibility, check_ggs_axioms, check_morphism, complete_and_quotient, AxiomMode,
    AdmissibilityOptions, GgsMorphism, GranularSpace, SetHgos,
};
use granulum::{Subset, Universe};
use proptest::prelude::*;

fn space_strategy(max_n: usize) -> impl Strategy<Value = SetHgos> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1..(1u64 << n), 0..=4).prop_map(move |gs| {
            let u = Universe::new((0..n).map(|i| format!("p{i}"))).unwrap();
            build_set_hgos(u, gs.into_iter().map(Subset).collect()).unwrap()
        })
    })
}

fn matrix_strategy() -> impl Strategy<Value = GrifMatrix> {
    let g = grid(2);
    prop::array::uniform4(prop::sample::select(g)).prop_map(GrifMatrix::from_entries)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lower_upper_laws(s in space_strategy(5)) {
        for x in s.elements() {
            let (l, u) = (s.lower_set(x), s.upper_set(x));
            prop_assert!(l.is_subset(x));
            prop_assert!(l.is_subset(u));
            prop_assert_eq!(s.lower_set(l), l);
            for y in s.elements().into_iter().filter(|y| x.is_subset(*y)) {
                prop_assert!(l.is_subset(s.lower_set(y)));
                prop_assert!(u.is_subset(s.upper_set(y)));
            }
        }
    }

    #[test]
    fn built_spaces_are_admissible_and_identity_is_closed(s in space_strategy(4)) {
        let r = check_admissibility(&s, AdmissibilityOptions::default());
        prop_assert!(r.status("WRA").unwrap().is_ok());
        prop_assert!(r.status("LS").unwrap().is_ok());
        let id = GgsMorphism::new(&s, &s, |x| x);
        prop_assert!(check_morphism(&id, true).all_ok());
    }

    #[test]
    fn matrix_order_is_partial(a in matrix_strategy(), b in matrix_strategy(), c in matrix_strategy()) {
        prop_assert!(matrix_leq(&a, &a));
        if matrix_leq(&a, &b) && matrix_leq(&b, &a) { prop_assert_eq!(a, b); }
        if matrix_leq(&a, &b) && matrix_leq(&b, &c) { prop_assert!(matrix_leq(&a, &c)); }
    }

    #[test]
    fn k0_entries_in_unit_range(s in space_strategy(4)) {
        let es = s.elements();
        for &a in &es {
            for &b in &es {
                let m = zeta(&s, &InclusionFn::K0, a, b).unwrap();
                prop_assert!(m.in_unit_range());
                prop_assert!(m.ll <= m.lu && m.ul <= m.uu);
            }
        }
    }

    #[test]
    fn survivors_shrink_with_more_observations(code in 0u64..512, cut in 0usize..8) {
        let u = Universe::parse_list("x,y,z").unwrap();
        let rel = granulum::tables::BinaryRelationSpace::from_code(u.clone(), code);
        let truth = granulum::inverse::CandidateModel::from_relation(&rel).space().unwrap();
        let obs = observations_of(&truth);
        let models = enumerate_models(&UniverseSpec::Known(u), &Generator::Relations).unwrap();
        let few = consistency_filter(&models, &obs[..cut], &InclusionFn::K0);
        let all = consistency_filter(&models, &obs, &InclusionFn::K0).unwrap();
        if let Ok(few) = few {
            prop_assert!(all.len() <= few.len());
            prop_assert!(all.iter().all(|m| few.contains(m)));
        }
        prop_assert!(!all.is_empty());
    }

    #[test]
    fn generated_datasets_pass_their_suite(l in 1usize..4, extra in 0usize..3, r in 1usize..5, q in 0usize..4, seed in any::<u64>()) {
        let n = (l + extra).min(1 << l);
        let (ds, _) = generate_dataset(n, r, q, l, seed).unwrap();
        let rep = check_dataset(&ds).unwrap();
        prop_assert!(rep.all_ok(), "{:?}", rep.failures().collect::<Vec<_>>());
    }
}

/// Every Pre-GS obtained from a powerset space on at most two points by
/// leaving approximations undefined.
#[test]
fn quotient_of_every_small_pre_gs_is_gs() {
    let mut checked = 0;
    for n in 1..=2usize {
        let u = Universe::new((0..n).map(|i| format!("p{i}"))).unwrap();
        let nonempty: Vec<Subset> = (1..(1u64 << n)).map(Subset).collect();
        for gmask in 0..(1u32 << nonempty.len()) {
            let gs = nonempty.iter().enumerate().filter(|(i, _)| gmask >> i & 1 == 1).map(|(_, g)| *g).collect();
            let base = build_set_hgos(u.clone(), gs).unwrap().to_abstract();
            let m = base.len();
            for drop in 0..(1u32 << (2 * m)) {
                let mut g = base.clone();
                for i in 0..m {
                    if drop >> i & 1 == 1 {
                        g.lower[i] = None;
                    }
                    if drop >> (m + i) & 1 == 1 {
                        g.upper[i] = None;
                    }
                }
                if !check_ggs_axioms(&g, AxiomMode::PreGs).all_ok() {
                    continue;
                }
                checked += 1;
                let q = complete_and_quotient(&g).unwrap();
                let r = check_ggs_axioms(&q.space, AxiomMode::Gs);
                assert!(r.all_ok(), "{:?} from {:?}", r.failures().collect::<Vec<_>>(), g);
            }
        }
    }
    assert!(checked > 0);
}

