mod common;

use asemin::alt_sim::max_asr;
use asemin::game::{collision_predicate, solve_safety, split_components, RefinedScheduler};
use asemin::petc::{ClockedState, SAMPLE, WAIT};
use asemin::random::{random_traffic_spec, seeded};
use asemin::{ase_holds, compose, find_babi, minimize, petc_reduced_model, petc_traffic_model, schedule, Lts, StateId};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

use common::{petc_component, transmitting, GameOracle};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn full_and_reduced_models_are_equivalent(seed in any::<u64>()) {
        let spec = random_traffic_spec(&mut seeded(seed), 4, 5);
        let full = petc_traffic_model(&spec).unwrap();
        let reduced = petc_reduced_model(&spec).unwrap();
        prop_assert!(ase_holds(&full, &reduced));
        prop_assert!(find_babi(&minimize(&full).0, &minimize(&reduced).0).is_some());
    }

    /// Waiting at the earliest trigger time offers the environment every
    /// outcome of sampling plus a waiting state, so it is strictly worse.
    #[test]
    fn waiting_at_earliest_trigger_is_dominated(seed in any::<u64>()) {
        let spec = random_traffic_spec(&mut seeded(seed), 4, 5);
        let full = petc_traffic_model(&spec).unwrap();
        let mas = max_asr(&full, &full);
        let (w, s) = (full.action_index(WAIT).unwrap(), full.action_index(SAMPLE).unwrap());
        for x in 0..full.num_states() {
            let c = ClockedState::parse(full.state(x).as_str()).unwrap();
            let region = &spec.regions[&c.region];
            if c.clock != region.tau_low || region.tau_low == region.tau_high {
                continue;
            }
            let (post_w, post_s) = (full.post_ix(x, w), full.post_ix(x, s));
            prop_assert!(post_s.iter().all(|y| post_w.contains(y)));
            prop_assert!(post_w.len() > post_s.len());
            let w_le_s = post_s.iter().all(|&b| post_w.iter().any(|&a| mas.contains(a, b)));
            let s_le_w = post_w.iter().all(|&b| post_s.iter().any(|&a| mas.contains(a, b)));
            prop_assert!(w_le_s && !s_le_w);
        }
    }

    #[test]
    fn solver_matches_game_tree_oracle(seed in any::<u64>(), channels in 1usize..=2) {
        let mut rng = seeded(seed);
        let models = [petc_component(&mut rng), petc_component(&mut rng)];
        let game = compose(&models).unwrap();
        prop_assume!(game.num_states() <= 64);
        let bad = collision_predicate(channels).unwrap();
        let result = solve_safety(&game, &bad);
        let mut oracle = GameOracle::new(&game, |x| transmitting(game.output(x).as_str()) > channels);
        let expected: Vec<&StateId> = oracle.winning_region().into_iter().map(|x| game.state(x)).collect();
        prop_assert_eq!(result.winning.iter().collect::<Vec<_>>(), expected);
    }

    /// From every winning state the chosen action keeps all successors
    /// winning and collision free, and adding a channel never shrinks the
    /// winning region.
    #[test]
    fn strategy_is_safe_and_channels_are_monotone(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let models = [petc_component(&mut rng), petc_component(&mut rng), petc_component(&mut rng)];
        let game = compose(&models).unwrap();
        let one = solve_safety(&game, &collision_predicate(1).unwrap());
        let two = solve_safety(&game, &collision_predicate(2).unwrap());
        prop_assert!(one.winning.is_subset(&two.winning));
        for (x, u) in &one.strategy {
            let xi = game.state_index(x.as_str()).unwrap();
            prop_assert!(transmitting(game.output(xi).as_str()) <= 1);
            for y in game.post(x.as_str(), u.as_str()).unwrap() {
                prop_assert!(one.winning.contains(&y));
            }
        }
    }

    #[test]
    fn minimizing_components_preserves_schedulability(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let models = [petc_component(&mut rng), petc_component(&mut rng)];
        let plain = schedule(&models, 1, false).unwrap();
        let reduced = schedule(&models, 1, true).unwrap();
        prop_assert_eq!(plain.result.schedulable, reduced.result.schedulable);
        if reduced.result.schedulable {
            replay(&models, &reduced.components, &reduced.result, &mut rng, 40);
        }
    }
}

/// Runs the strategy solved on `abstract_models` against the original
/// components with random environment choices and checks no collision
/// happens.
fn replay<R: Rng>(concrete: &[Lts], abstract_models: &[Lts], result: &asemin::GameResult, rng: &mut R, steps: usize) {
    let mut scheduler = RefinedScheduler::new(result, abstract_models, concrete).unwrap();
    let mut current: Vec<StateId> =
        concrete.iter().map(|m| m.initial_states().cloned().collect::<Vec<_>>().choose(rng).unwrap().clone()).collect();
    scheduler.start(&current).unwrap();
    for _ in 0..steps {
        let actions = scheduler.joint_action().unwrap();
        current = concrete
            .iter()
            .zip(&current)
            .zip(&actions)
            .map(|((m, x), u)| m.post(x.as_str(), u.as_str()).unwrap().into_iter().collect::<Vec<_>>().choose(rng).unwrap().clone())
            .collect();
        let sending = concrete.iter().zip(&current).filter(|(m, x)| m.output(m.state_index(x.as_str()).unwrap()).as_str() == "T");
        assert!(sending.count() <= 1, "collision at {current:?}");
        scheduler.advance(&current).unwrap();
    }
}

#[test]
fn joint_actions_split_per_component() {
    let g = compose(&[asemin::running_example::fig5(), asemin::running_example::fig5()]).unwrap();
    for u in g.actions() {
        assert_eq!(split_components(u.as_str()).len(), 2);
    }
}
