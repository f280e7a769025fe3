//! Traffic models of periodic event-triggered control loops.
//!
//! A [`TrafficSpec`] lists abstract regions with their earliest and latest
//! trigger step and the region transitions observed when sampling at a given
//! step. From it we build the full traffic model (the triggering condition may
//! fire anywhere in `tau_low..=tau_high`, and the scheduler may force a sample
//! at any step), the reduced model (scheduler-only sampling, clocks capped at
//! `tau_low`) and the initialization chain used before composing loops.
//!
//! States are named `region,clock`; the state reached right after a sample has
//! clock 1 and output `T`, every other state outputs `W`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lts::{Lts, LtsBuilder};

pub const WAIT: &str = "w";
pub const SAMPLE: &str = "s";
pub const TRANSMIT: &str = "T";
pub const IDLE: &str = "W";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub tau_low: u32,
    pub tau_high: u32,
    pub initial: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrafficSpec {
    pub regions: BTreeMap<String, Region>,
    /// `(q, tau, q')`: sampling region `q` after `tau` steps may land in `q'`.
    pub delta: BTreeSet<(String, u32, String)>,
}

impl TrafficSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_region(&mut self, name: impl Into<String>, tau_low: u32, tau_high: u32, initial: bool) -> &mut Self {
        self.regions.insert(name.into(), Region { tau_low, tau_high, initial });
        self
    }

    pub fn add_transition(&mut self, from: impl Into<String>, tau: u32, to: impl Into<String>) -> &mut Self {
        self.delta.insert((from.into(), tau, to.into()));
        self
    }

    pub fn initial_regions(&self) -> impl Iterator<Item = &str> + '_ {
        self.regions.iter().filter(|(_, r)| r.initial).map(|(q, _)| q.as_str())
    }

    pub fn successors(&self, q: &str, tau: u32) -> impl Iterator<Item = &str> + '_ {
        let q = q.to_owned();
        self.delta
            .iter()
            .filter(move |(from, t, _)| *from == q && *t == tau)
            .map(|(_, _, to)| to.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (q, r) in &self.regions {
            if q.is_empty() || q.contains('|') || q.contains('+') {
                problems.push(format!("region name `{q}` must be nonempty and free of `|` and `+`"));
            }
            if r.tau_low == 0 || r.tau_low > r.tau_high {
                problems.push(format!("region `{q}`: need 1 <= tau_low <= tau_high, got {}..{}", r.tau_low, r.tau_high));
            }
        }
        for (q, tau, q2) in &self.delta {
            let Some(r) = self.regions.get(q) else {
                problems.push(format!("transition ({q}, {tau}, {q2}): unknown source region"));
                continue;
            };
            if !self.regions.contains_key(q2) {
                problems.push(format!("transition ({q}, {tau}, {q2}): unknown target region"));
            }
            if *tau == 0 || *tau > r.tau_high {
                problems.push(format!("transition ({q}, {tau}, {q2}): time outside 1..={}", r.tau_high));
            }
        }
        for (q, r) in &self.regions {
            if r.tau_low == 0 || r.tau_low > r.tau_high {
                continue;
            }
            for tau in 1..=r.tau_high {
                if self.successors(q, tau).next().is_none() {
                    problems.push(format!("region `{q}` has no successor when sampled at step {tau}"));
                }
            }
        }
        if problems.is_empty() { Ok(()) } else { Err(Error::InvalidSpec(problems)) }
    }
}

/// A traffic-model state: region plus steps since the last sample.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockedState {
    pub region: String,
    pub clock: u32,
}

impl ClockedState {
    pub fn new(region: impl Into<String>, clock: u32) -> Self {
        Self { region: region.into(), clock }
    }

    /// Splits `region,clock` at the last comma.
    pub fn parse(name: &str) -> Option<Self> {
        let (region, clock) = name.rsplit_once(',')?;
        Some(Self::new(region, clock.parse().ok()?))
    }
}

impl fmt::Display for ClockedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.region, self.clock)
    }
}

fn output_for(clock: u32) -> &'static str {
    if clock == 1 { TRANSMIT } else { IDLE }
}

fn model(spec: &TrafficSpec, reduced: bool) -> Result<Lts> {
    spec.validate()?;
    let mut b = LtsBuilder::new();
    b.action(SAMPLE).action(WAIT).output(TRANSMIT).output(IDLE);
    for (q, r) in &spec.regions {
        let top = if reduced { r.tau_low } else { r.tau_high };
        for c in 1..=top {
            let x = ClockedState::new(q, c).to_string();
            b.state(x.as_str(), output_for(c));
            if c < top {
                b.transition(x.as_str(), WAIT, ClockedState::new(q, c + 1).to_string());
            }
            for q2 in spec.successors(q, c) {
                let target = ClockedState::new(q2, 1).to_string();
                b.transition(x.as_str(), SAMPLE, target.as_str());
                if !reduced && c >= r.tau_low {
                    b.transition(x.as_str(), WAIT, target);
                }
            }
        }
        if r.initial {
            b.initial(ClockedState::new(q, 1).to_string());
        }
    }
    b.build()
}

/// The full traffic model with wait, scheduled-sample and triggered-sample
/// transitions.
pub fn petc_traffic_model(spec: &TrafficSpec) -> Result<Lts> {
    model(spec, false)
}

/// The reduced model: clocks stop at `tau_low` and only the scheduler samples.
/// Alternating-simulation equivalent to [`petc_traffic_model`].
pub fn petc_reduced_model(spec: &TrafficSpec) -> Result<Lts> {
    spec.validate()?;
    let outside: Vec<String> = spec
        .initial_regions()
        .map(|q| ClockedState::new(q, 1))
        .filter(|x| x.clock > spec.regions[&x.region].tau_low)
        .map(|x| x.to_string())
        .collect();
    if !outside.is_empty() {
        return Err(Error::InitialOutsideReduced(outside));
    }
    model(spec, true)
}

/// Name of the `k`-th initialization state (1-based).
pub fn init_state_name(k: u32) -> String {
    format!("i{k}")
}

/// Prefixes `model` with a chain `i1 -w-> i2 -w-> ... -w-> i{t0}` of idle
/// states from which the scheduler may sample at any point, landing in any
/// freshly sampled region. The only initial state becomes `i1`.
pub fn add_init_phase(model: &Lts, spec: &TrafficSpec, t0: u32) -> Result<Lts> {
    if t0 == 0 {
        return Err(Error::InvalidArgument("initialization phase length must be at least 1".into()));
    }
    let mut desc = model.to_description();
    let mut missing = Vec::new();
    let targets: Vec<String> = spec.regions.keys().map(|q| ClockedState::new(q, 1).to_string()).collect();
    for x in &targets {
        if !desc.states.contains(x.as_str()) {
            missing.push(format!("region entry state `{x}` is not in the model"));
        }
    }
    for k in 1..=t0 {
        let name = init_state_name(k);
        if desc.states.contains(name.as_str()) {
            missing.push(format!("initialization state `{name}` clashes with an existing state"));
        }
    }
    if !missing.is_empty() {
        return Err(Error::InvalidSpec(missing));
    }

    desc.initial.clear();
    desc.actions.insert(WAIT.into());
    desc.actions.insert(SAMPLE.into());
    desc.outputs.insert(IDLE.into());
    for k in 1..=t0 {
        let name = init_state_name(k);
        desc.states.insert(name.as_str().into());
        desc.output_map.insert(name.as_str().into(), IDLE.into());
        if k < t0 {
            desc.transitions.push((name.as_str().into(), WAIT.into(), init_state_name(k + 1).into()));
        }
        for x in &targets {
            desc.transitions.push((name.as_str().into(), SAMPLE.into(), x.into()));
        }
    }
    desc.initial.insert(init_state_name(1).into());
    Lts::new(desc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_sim::ase_holds;
    use crate::running_example::{fig1, fig1_spec, fig5, fig7, single_region_spec};

    #[test]
    fn full_model_of_two_region_spec() {
        let m = petc_traffic_model(&fig1_spec()).unwrap();
        assert_eq!(m, fig1());
        assert_eq!(m.tran_size(), 17);
    }

    #[test]
    fn reduced_models() {
        assert_eq!(petc_reduced_model(&fig1_spec()).unwrap(), fig7());
        assert_eq!(petc_reduced_model(&single_region_spec()).unwrap(), fig5());
        assert!(ase_holds(&fig1(), &fig7()));
    }

    #[test]
    fn degenerate_single_state() {
        let mut spec = TrafficSpec::new();
        spec.add_region("q", 1, 1, true).add_transition("q", 1, "q");
        let m = petc_traffic_model(&spec).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.output(0).as_str(), "T");
        let names: Vec<_> = m.named_transitions().map(|(x, u, y)| format!("{x} {u} {y}")).collect();
        // Trigger at tau_low = 1 adds a w-copy of the sample edge.
        assert_eq!(names, ["q,1 s q,1", "q,1 w q,1"]);
    }

    #[test]
    fn trigger_edges_duplicate_sample_edges() {
        let spec = fig1_spec();
        let m = petc_traffic_model(&spec).unwrap();
        for (q, r) in &spec.regions {
            for c in r.tau_low..=r.tau_high {
                let x = ClockedState::new(q, c).to_string();
                let sampled = m.post(&x, SAMPLE).unwrap();
                assert!(sampled.is_subset(&m.post(&x, WAIT).unwrap()));
            }
        }
    }

    #[test]
    fn only_fresh_states_transmit() {
        let m = petc_traffic_model(&fig1_spec()).unwrap();
        for (i, x) in m.states().iter().enumerate() {
            let clock = ClockedState::parse(x.as_str()).unwrap().clock;
            assert_eq!(m.output(i).as_str() == TRANSMIT, clock == 1);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = TrafficSpec::new();
        spec.add_region("q", 3, 2, true);
        assert!(matches!(petc_traffic_model(&spec), Err(Error::InvalidSpec(_))));

        let mut spec = TrafficSpec::new();
        spec.add_region("q", 1, 2, true).add_transition("q", 1, "q");
        let Err(Error::InvalidSpec(problems)) = petc_traffic_model(&spec) else { panic!() };
        assert_eq!(problems, ["region `q` has no successor when sampled at step 2"]);

        let mut spec = TrafficSpec::new();
        spec.add_region("q", 1, 1, true).add_transition("q", 1, "r").add_transition("q", 5, "q");
        let Err(Error::InvalidSpec(problems)) = petc_traffic_model(&spec) else { panic!() };
        assert_eq!(problems.len(), 2);
    }

    #[test]
    fn init_phase_chain() {
        let spec = single_region_spec();
        let m = add_init_phase(&fig5(), &spec, 3).unwrap();
        assert_eq!(m.num_states(), 5);
        assert_eq!(m.initial_states().map(|x| x.as_str()).collect::<Vec<_>>(), ["i1"]);
        assert_eq!(m.post("i1", "w").unwrap().into_iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["i2"]);
        assert!(m.post("i3", "w").unwrap().is_empty());
        for k in ["i1", "i2", "i3"] {
            assert_eq!(m.post(k, "s").unwrap().len(), 1);
        }

        let one = add_init_phase(&fig5(), &spec, 1).unwrap();
        assert_eq!(one.enabled("i1").unwrap(), [SAMPLE.into()]);

        let two = add_init_phase(&fig1(), &fig1_spec(), 10).unwrap();
        assert_eq!(two.size().n_initial, 1);
        assert_eq!(two.num_states(), 16);
        assert_eq!(two.post("i10", "s").unwrap().len(), 2);
    }

    #[test]
    fn init_phase_needs_entry_states() {
        let mut spec = single_region_spec();
        spec.add_region("q9", 1, 1, false).add_transition("q9", 1, "q9");
        assert!(add_init_phase(&fig5(), &spec, 2).is_err());
        assert!(add_init_phase(&fig5(), &single_region_spec(), 0).is_err());
    }

    #[test]
    fn clocked_state_names() {
        let x = ClockedState::parse("a,b,12").unwrap();
        assert_eq!(x, ClockedState::new("a,b", 12));
        assert_eq!(x.to_string(), "a,b,12");
        assert_eq!(ClockedState::parse("i1"), None);
    }
}
