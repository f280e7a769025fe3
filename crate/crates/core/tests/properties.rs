mod common;

use std::collections::BTreeSet;

use asemin::alt_sim::{is_asr, max_asr, Relation};
use asemin::minimize::{quotient_relation, step1_quotient, step2_remove_controller_moves, step3_remove_younger_siblings};
use asemin::random::{random_lts, seeded};
use asemin::{ase_holds, check_n_conditions, find_babi, minimize, minimize_stages, Lts, StateId};
use proptest::prelude::*;

use common::{brute_force_max_asr, relation_pairs, system_from_bits};

fn small(seed: u64) -> Lts {
    random_lts(&mut seeded(seed), 6, 3, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn post_and_pre_are_dual(seed in any::<u64>()) {
        let s = small(seed);
        for x in 0..s.num_states() {
            for u in 0..s.num_actions() {
                for &y in s.post_ix(x, u) {
                    prop_assert!(s.pre_ix(y, u).contains(&x));
                }
                for &p in s.pre_ix(x, u) {
                    prop_assert!(s.post_ix(p, u).contains(&x));
                }
            }
        }
    }

    #[test]
    fn restriction_is_idempotent(seed in any::<u64>(), keep_mask in any::<u32>()) {
        let s = small(seed);
        let keep: Vec<StateId> =
            s.states().iter().enumerate().filter(|(i, _)| keep_mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
        let once = s.restrict(&keep).unwrap();
        prop_assert_eq!(once.restrict(&keep).unwrap(), once.clone());
        prop_assert!(once.num_states() == keep.len());
    }

    #[test]
    fn maximal_relation_is_a_preorder_and_an_asr(seed in any::<u64>()) {
        let s = small(seed);
        let r = max_asr(&s, &s);
        prop_assert!(r.is_reflexive());
        prop_assert!(r.is_transitive());
        prop_assert_eq!(is_asr(&s, &s, &r).unwrap(), None);
    }

    #[test]
    fn maximal_relation_between_systems_is_step_closed(a in any::<u64>(), b in any::<u64>()) {
        let (sa, sb) = (small(a), small(b));
        let r = max_asr(&sa, &sb);
        prop_assert!(common::is_step_closed(&sa, &sb, &relation_pairs(&r)));
    }

    #[test]
    fn every_step_preserves_equivalence(seed in any::<u64>()) {
        let s = small(seed);
        let st = minimize_stages(&s);
        prop_assert!(ase_holds(&s, &st.quotient));
        prop_assert!(ase_holds(&st.quotient, &st.controller_pruned));
        prop_assert!(ase_holds(&st.controller_pruned, &st.environment_pruned));
        prop_assert!(ase_holds(&st.environment_pruned, &st.minimal));
        prop_assert!(ase_holds(&s, &st.minimal));
    }

    #[test]
    fn minimal_systems_satisfy_necessary_conditions(seed in any::<u64>()) {
        let (m, _) = minimize(&small(seed));
        let report = check_n_conditions(&m);
        prop_assert!(report.all(), "{:?}", report);
    }

    #[test]
    fn minimization_is_idempotent(seed in any::<u64>()) {
        let (m, _) = minimize(&small(seed));
        let (mm, _) = minimize(&m);
        prop_assert!(find_babi(&m, &mm).is_some());
        prop_assert_eq!(m.size(), mm.size());
    }

    #[test]
    fn sizes_never_grow(seed in any::<u64>()) {
        let s = small(seed);
        let t = minimize(&s).1;
        for step in &t.steps {
            prop_assert!(step.after <= step.before);
        }
    }

    #[test]
    fn quotient_relation_matches_recomputation(seed in any::<u64>()) {
        let s = small(seed);
        let mas = max_asr(&s, &s);
        let (s1, p) = step1_quotient(&s, &mas);
        let r1 = quotient_relation(&mas, &p);
        prop_assert!(r1.is_antisymmetric());
        prop_assert_eq!(&r1, &max_asr(&s1, &s1));
        let s2 = step2_remove_controller_moves(&s1, &r1);
        prop_assert_eq!(&r1, &max_asr(&s2, &s2));
        let s3 = step3_remove_younger_siblings(&s2, &r1);
        prop_assert_eq!(s3.num_states(), s1.num_states());
    }

    #[test]
    fn babi_is_found_under_renaming(seed in any::<u64>()) {
        let s = small(seed);
        let renamed = rename(&s);
        let babi = find_babi(&s, &renamed);
        prop_assert!(babi.is_some());
        prop_assert!(babi.unwrap().verify(&s, &renamed));
    }
}

/// Reverses the state order by renaming `xi` to `z{n - i}` and actions to
/// upper case.
fn rename(s: &Lts) -> Lts {
    let n = s.num_states();
    let name = |x: &StateId| -> String {
        let i: usize = x.as_str()[1..].parse().unwrap();
        format!("z{:02}", n - i)
    };
    let mut b = asemin::LtsBuilder::new();
    for u in s.actions() {
        b.action(u.as_str().to_uppercase());
    }
    for y in s.outputs() {
        b.output(y.clone());
    }
    for (i, x) in s.states().iter().enumerate() {
        b.state(name(x), s.output(i).clone());
    }
    for x in s.initial_states() {
        b.initial(name(x));
    }
    for (x, u, y) in s.named_transitions() {
        b.transition(name(x), u.as_str().to_uppercase(), name(y));
    }
    b.build().unwrap()
}

#[test]
fn maximal_relation_matches_brute_force_on_two_state_systems() {
    let mut systems = Vec::new();
    for n in 1..=2 {
        for m in 1..=2 {
            for out in 0..(1u32 << n) {
                for bits in 0..(1u64 << (n * m * n)) {
                    systems.push(system_from_bits(n, m, &["A", "B"], out, bits));
                }
            }
        }
    }
    for s in &systems {
        assert_eq!(relation_pairs(&max_asr(s, s)), brute_force_max_asr(s, s), "{s:?}");
    }
}

#[test]
fn relation_from_names_round_trips() {
    let s = asemin::running_example::fig1();
    let r = max_asr(&s, &s);
    let named = r.named_pairs(&s, &s);
    let back = Relation::from_named_pairs(&s, &s, named.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
    assert_eq!(back, r);
    let set: BTreeSet<_> = named.into_iter().collect();
    assert!(set.contains(&("q0,2".into(), "q1,3".into())));
}
