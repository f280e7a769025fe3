//! Seeded generators for transition systems and traffic specs, and the
//! `inflate` transformation that blows a system up without changing its
//! minimal form. Every generator is driven by a caller-supplied RNG, so a
//! failing seed can be replayed.

use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alt_sim::max_asr;
use crate::lts::{Lts, LtsDescription};
use crate::petc::TrafficSpec;
use crate::symbol::{ActionId, OutputId, StateId};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact dimensions of a generated system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtsShape {
    pub states: usize,
    pub actions: usize,
    pub outputs: usize,
    pub initial: usize,
    pub transitions: usize,
}

fn state_name(i: usize) -> StateId {
    format!("x{i}").into()
}

/// A system with exactly the given numbers of states, initial states and
/// distinct transitions, drawn uniformly. Counts are clamped to what fits.
pub fn random_lts_with_shape<R: Rng + ?Sized>(rng: &mut R, shape: LtsShape) -> Lts {
    let n = shape.states;
    let m = shape.actions.max(1);
    let k = shape.outputs.max(1);
    let mut desc = LtsDescription::default();
    let actions: Vec<ActionId> = (0..m).map(|u| ActionId::from(format!("u{u}"))).collect();
    let outputs: Vec<OutputId> = (0..k).map(|y| OutputId::from(format!("y{y}"))).collect();
    desc.actions.extend(actions.iter().cloned());
    for x in 0..n {
        let y = outputs[rng.random_range(0..k)].clone();
        desc.states.insert(state_name(x));
        desc.outputs.insert(y.clone());
        desc.output_map.insert(state_name(x), y);
    }
    for x in sample(rng, n, shape.initial.min(n)) {
        desc.initial.insert(state_name(x));
    }
    let total = n * m * n;
    for t in sample(rng, total, shape.transitions.min(total)) {
        let (x, rest) = (t / (m * n), t % (m * n));
        let (u, y) = (rest / n, rest % n);
        desc.transitions.push((state_name(x), actions[u].clone(), state_name(y)));
    }
    Lts::new(desc).expect("generated system is well-formed")
}

/// A small system with at most the given dimensions and a random density.
pub fn random_lts<R: Rng + ?Sized>(rng: &mut R, max_states: usize, max_actions: usize, max_outputs: usize) -> Lts {
    let states = rng.random_range(1..=max_states.max(1));
    let actions = rng.random_range(1..=max_actions.max(1));
    let outputs = rng.random_range(1..=max_outputs.max(1));
    let initial = rng.random_range(1..=states);
    let total = states * actions * states;
    let density = rng.random_range(0.05..0.6);
    let transitions = ((total as f64) * density).round() as usize;
    random_lts_with_shape(rng, LtsShape { states, actions, outputs, initial, transitions })
}

/// A valid traffic spec with up to `max_regions` regions and `tau_high` up
/// to `max_tau`. Each region is initial with probability one half, and at
/// least one region is.
pub fn random_traffic_spec<R: Rng + ?Sized>(rng: &mut R, max_regions: usize, max_tau: u32) -> TrafficSpec {
    let n = rng.random_range(1..=max_regions.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let mut spec = TrafficSpec::new();
    let forced_initial = rng.random_range(0..n);
    for (i, q) in names.iter().enumerate() {
        let tau_high = rng.random_range(1..=max_tau.max(1));
        let tau_low = rng.random_range(1..=tau_high);
        spec.add_region(q.clone(), tau_low, tau_high, i == forced_initial || rng.random_bool(0.5));
    }
    for q in &names {
        let tau_high = spec.regions[q].tau_high;
        for tau in 1..=tau_high {
            let fanout = rng.random_range(1..=n.min(2));
            for j in sample(rng, n, fanout) {
                spec.add_transition(q.clone(), tau, names[j].clone());
            }
        }
    }
    spec
}

/// What [`inflate`] added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inflation {
    /// `(original, copy)`.
    pub duplicated_state: Option<(StateId, StateId)>,
    /// `(state, copied action, new action)`.
    pub redundant_action: Option<(StateId, ActionId, ActionId)>,
    pub younger_sibling: Option<(StateId, ActionId, StateId)>,
}

fn fresh<T: From<String>>(base: &str, taken: impl Fn(&str) -> bool) -> T {
    let mut name = format!("{base}'");
    while taken(&name) {
        name.push('\'');
    }
    T::from(name)
}

/// Adds a duplicated state, a redundant copy of an action, and an
/// environment choice into a strictly dominating sibling. Each addition
/// keeps the system alternating-simulation equivalent to the original; the
/// third is skipped when no dominated sibling exists.
pub fn inflate<R: Rng + ?Sized>(rng: &mut R, s: &Lts) -> (Lts, Inflation) {
    let mut report = Inflation { duplicated_state: None, redundant_action: None, younger_sibling: None };
    if s.num_states() == 0 {
        return (s.clone(), report);
    }
    let mut desc = s.to_description();

    // A bisimilar copy of a state, entered by one copied incoming transition
    // (or initial if the original is).
    let p = rng.random_range(0..s.num_states());
    let pname = s.state(p).clone();
    let copy: StateId = fresh(pname.as_str(), |n| desc.states.contains(n));
    desc.states.insert(copy.clone());
    desc.output_map.insert(copy.clone(), s.output(p).clone());
    for u in s.enabled_ix(p) {
        for &y in s.post_ix(p, u) {
            desc.transitions.push((copy.clone(), s.action(u).clone(), s.state(y).clone()));
        }
    }
    let incoming: Vec<&(usize, usize, usize)> = s.transitions().iter().filter(|t| t.2 == p).collect();
    if let Some(&&(x, u, _)) = incoming.choose(rng) {
        desc.transitions.push((s.state(x).clone(), s.action(u).clone(), copy.clone()));
    } else if s.is_initial(p) {
        desc.initial.insert(copy.clone());
    }
    report.duplicated_state = Some((pname, copy));

    // A second action with identical successors at one state.
    let enabled: Vec<(usize, usize)> =
        (0..s.num_states()).flat_map(|x| s.enabled_ix(x).map(move |u| (x, u))).collect();
    if let Some(&(x, u)) = enabled.choose(rng) {
        let twin: ActionId = fresh(s.action(u).as_str(), |n| desc.actions.contains(n));
        desc.actions.insert(twin.clone());
        for &y in s.post_ix(x, u) {
            desc.transitions.push((s.state(x).clone(), twin.clone(), s.state(y).clone()));
        }
        report.redundant_action = Some((s.state(x).clone(), s.action(u).clone(), twin));
    }

    let mid = Lts::new(desc).expect("inflation keeps the system well-formed");

    // An extra outcome q' next to an existing outcome q that q' strictly
    // simulates: the environment never prefers it.
    let mas = max_asr(&mid, &mid);
    let mut candidates = Vec::new();
    for &(x, u, q) in mid.transitions() {
        for q2 in 0..mid.num_states() {
            if mas.contains(q, q2) && !mas.contains(q2, q) && !mid.post_ix(x, u).contains(&q2) {
                candidates.push((x, u, q2));
            }
        }
    }
    let Some(&(x, u, q2)) = candidates.choose(rng) else {
        return (mid, report);
    };
    let mut desc = mid.to_description();
    let added = (mid.state(x).clone(), mid.action(u).clone(), mid.state(q2).clone());
    desc.transitions.push(added.clone());
    report.younger_sibling = Some(added);
    (Lts::new(desc).expect("inflation keeps the system well-formed"), report)
}
