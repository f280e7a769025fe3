//! Finite labelled transition systems with controller/environment semantics.
//!
//! The controller picks an action at each step; the environment resolves the
//! nondeterminism among the successors of that action and also picks the
//! initial state. An [`Lts`] is immutable once built. States, actions and
//! outputs are stored sorted by name and addressed internally by index, with
//! successor and predecessor indexes per `(state, action)` built eagerly.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::symbol::{ActionId, OutputId, StateId};

/// Name-level description of a transition system, possibly invalid.
///
/// This is the form external inputs arrive in. [`Lts::new`] validates it and
/// builds the indexed representation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LtsDescription {
    pub states: BTreeSet<StateId>,
    pub initial: BTreeSet<StateId>,
    pub actions: BTreeSet<ActionId>,
    pub outputs: BTreeSet<OutputId>,
    pub transitions: Vec<(StateId, ActionId, StateId)>,
    pub output_map: BTreeMap<StateId, OutputId>,
}

/// A broken invariant of an [`LtsDescription`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InitialStateUnknown(StateId),
    TransitionSourceUnknown { index: usize, transition: (StateId, ActionId, StateId) },
    TransitionTargetUnknown { index: usize, transition: (StateId, ActionId, StateId) },
    TransitionActionUnknown { index: usize, transition: (StateId, ActionId, StateId) },
    DuplicateTransition { index: usize, transition: (StateId, ActionId, StateId) },
    OutputMissing(StateId),
    OutputUnknown { state: StateId, output: OutputId },
    OutputForUnknownState(StateId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tr = |t: &(StateId, ActionId, StateId)| format!("({}, {}, {})", t.0, t.1, t.2);
        match self {
            Violation::InitialStateUnknown(s) => write!(f, "initial state unknown: {s}"),
            Violation::TransitionSourceUnknown { index, transition } => {
                write!(f, "transition #{index} {} has unknown source", tr(transition))
            }
            Violation::TransitionTargetUnknown { index, transition } => {
                write!(f, "transition #{index} {} has unknown target", tr(transition))
            }
            Violation::TransitionActionUnknown { index, transition } => {
                write!(f, "transition #{index} {} has unknown action", tr(transition))
            }
            Violation::DuplicateTransition { index, transition } => {
                write!(f, "transition #{index} {} is a duplicate", tr(transition))
            }
            Violation::OutputMissing(s) => write!(f, "state {s} has no output"),
            Violation::OutputUnknown { state, output } => {
                write!(f, "state {state} maps to unknown output {output}")
            }
            Violation::OutputForUnknownState(s) => write!(f, "output given for unknown state {s}"),
        }
    }
}

/// Checks every structural invariant and returns all violations found.
pub fn validate(desc: &LtsDescription) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for s in &desc.initial {
        if !desc.states.contains(s) {
            violations.push(Violation::InitialStateUnknown(s.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for (index, t) in desc.transitions.iter().enumerate() {
        let transition = t.clone();
        if !desc.states.contains(&t.0) {
            violations.push(Violation::TransitionSourceUnknown { index, transition: transition.clone() });
        }
        if !desc.actions.contains(&t.1) {
            violations.push(Violation::TransitionActionUnknown { index, transition: transition.clone() });
        }
        if !desc.states.contains(&t.2) {
            violations.push(Violation::TransitionTargetUnknown { index, transition: transition.clone() });
        }
        if !seen.insert(t) {
            violations.push(Violation::DuplicateTransition { index, transition });
        }
    }
    for s in &desc.states {
        match desc.output_map.get(s) {
            None => violations.push(Violation::OutputMissing(s.clone())),
            Some(y) if !desc.outputs.contains(y) => {
                violations.push(Violation::OutputUnknown { state: s.clone(), output: y.clone() })
            }
            Some(_) => {}
        }
    }
    for s in desc.output_map.keys() {
        if !desc.states.contains(s) {
            violations.push(Violation::OutputForUnknownState(s.clone()));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// `(|X|, |X0|, |δ|)`, ordered componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SizeTriple {
    pub n_states: usize,
    pub n_initial: usize,
    pub n_transitions: usize,
}

impl PartialOrd for SizeTriple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        let parts = [
            self.n_states.cmp(&other.n_states),
            self.n_initial.cmp(&other.n_initial),
            self.n_transitions.cmp(&other.n_transitions),
        ];
        if parts.iter().all(|o| *o == Equal) {
            Some(Equal)
        } else if parts.iter().all(|o| *o != Greater) {
            Some(Less)
        } else if parts.iter().all(|o| *o != Less) {
            Some(Greater)
        } else {
            None
        }
    }
}

impl fmt::Display for SizeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_states, self.n_initial, self.n_transitions)
    }
}

/// A validated, indexed transition system `(X, X0, U, Y, δ, H)`.
#[derive(Clone)]
pub struct Lts {
    states: Vec<StateId>,
    actions: Vec<ActionId>,
    outputs: Vec<OutputId>,
    state_index: HashMap<StateId, usize>,
    action_index: HashMap<ActionId, usize>,
    initial: Vec<usize>,
    is_initial: Vec<bool>,
    output_of: Vec<usize>,
    /// Sorted `(source, action, target)` index triples.
    transitions: Vec<(usize, usize, usize)>,
    /// `succ[x * |U| + u]`: sorted targets.
    succ: Vec<Vec<usize>>,
    /// `pred[x * |U| + u]`: sorted sources.
    pred: Vec<Vec<usize>>,
}

impl PartialEq for Lts {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.actions == other.actions
            && self.outputs == other.outputs
            && self.initial == other.initial
            && self.output_of == other.output_of
            && self.transitions == other.transitions
    }
}

impl Eq for Lts {}

impl fmt::Debug for Lts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lts")
            .field("states", &self.states)
            .field("initial", &self.initial_states().collect::<Vec<_>>())
            .field("transitions", &self.named_transitions().collect::<Vec<_>>())
            .finish()
    }
}

impl Lts {
    pub fn new(desc: LtsDescription) -> Result<Self> {
        validate(&desc).map_err(Error::InvalidLts)?;
        let states: Vec<StateId> = desc.states.into_iter().collect();
        let actions: Vec<ActionId> = desc.actions.into_iter().collect();
        let outputs: Vec<OutputId> = desc.outputs.into_iter().collect();
        let state_index: HashMap<_, _> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let action_index: HashMap<_, _> = actions.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let output_index: HashMap<&OutputId, usize> = outputs.iter().enumerate().map(|(i, y)| (y, i)).collect();
        let output_of = states.iter().map(|s| output_index[&desc.output_map[s]]).collect();
        let initial: Vec<usize> = desc.initial.iter().map(|s| state_index[s]).collect();
        let transitions = desc
            .transitions
            .iter()
            .map(|(x, u, y)| (state_index[x], action_index[u], state_index[y]))
            .collect();
        Ok(Self::from_indexed(states, actions, outputs, initial, output_of, transitions))
    }

    /// Builds directly from index data. Indices must be in range; duplicates
    /// are removed.
    pub(crate) fn from_indexed(
        states: Vec<StateId>,
        actions: Vec<ActionId>,
        outputs: Vec<OutputId>,
        mut initial: Vec<usize>,
        output_of: Vec<usize>,
        mut transitions: Vec<(usize, usize, usize)>,
    ) -> Self {
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(actions.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(outputs.windows(2).all(|w| w[0] < w[1]));
        initial.sort_unstable();
        initial.dedup();
        transitions.sort_unstable();
        transitions.dedup();
        let n = states.len();
        let m = actions.len();
        let mut succ = vec![Vec::new(); n * m];
        let mut pred = vec![Vec::new(); n * m];
        for &(x, u, y) in &transitions {
            succ[x * m + u].push(y);
            pred[y * m + u].push(x);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        let mut is_initial = vec![false; n];
        for &i in &initial {
            is_initial[i] = true;
        }
        let state_index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let action_index = actions.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Lts {
            states,
            actions,
            outputs,
            state_index,
            action_index,
            initial,
            is_initial,
            output_of,
            transitions,
            succ,
            pred,
        }
    }

    pub fn empty() -> Self {
        Self::from_indexed(vec![], vec![], vec![], vec![], vec![], vec![])
    }

    pub fn to_description(&self) -> LtsDescription {
        LtsDescription {
            states: self.states.iter().cloned().collect(),
            initial: self.initial_states().cloned().collect(),
            actions: self.actions.iter().cloned().collect(),
            outputs: self.outputs.iter().cloned().collect(),
            transitions: self.named_transitions().map(|(x, u, y)| (x.clone(), u.clone(), y.clone())).collect(),
            output_map: self.states.iter().enumerate().map(|(i, s)| (s.clone(), self.output(i).clone())).collect(),
        }
    }

    // ---- sizes ------------------------------------------------------------

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn size(&self) -> SizeTriple {
        SizeTriple {
            n_states: self.states.len(),
            n_initial: self.initial.len(),
            n_transitions: self.transitions.len(),
        }
    }

    /// `|δ| + |X0|`.
    pub fn tran_size(&self) -> usize {
        self.transitions.len() + self.initial.len()
    }

    // ---- index-level access -----------------------------------------------

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn outputs(&self) -> &[OutputId] {
        &self.outputs
    }

    pub fn state(&self, x: usize) -> &StateId {
        &self.states[x]
    }

    pub fn action(&self, u: usize) -> &ActionId {
        &self.actions[u]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.action_index.get(name).copied()
    }

    pub(crate) fn require_state(&self, name: &str) -> Result<usize> {
        self.state_index(name).ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub(crate) fn require_action(&self, name: &str) -> Result<usize> {
        self.action_index(name).ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// Index of the output of state `x` in [`Lts::outputs`].
    pub fn output_index(&self, x: usize) -> usize {
        self.output_of[x]
    }

    pub fn output(&self, x: usize) -> &OutputId {
        &self.outputs[self.output_of[x]]
    }

    /// Sorted indices of the initial states.
    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_initial(&self, x: usize) -> bool {
        self.is_initial[x]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = &StateId> + '_ {
        self.initial.iter().map(|&i| &self.states[i])
    }

    /// Sorted `(source, action, target)` index triples.
    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    pub fn named_transitions(&self) -> impl Iterator<Item = (&StateId, &ActionId, &StateId)> + '_ {
        self.transitions.iter().map(|&(x, u, y)| (&self.states[x], &self.actions[u], &self.states[y]))
    }

    /// Sorted `u`-successors of `x`.
    pub fn post_ix(&self, x: usize, u: usize) -> &[usize] {
        &self.succ[x * self.actions.len() + u]
    }

    /// Sorted `u`-predecessors of `x`.
    pub fn pre_ix(&self, x: usize, u: usize) -> &[usize] {
        &self.pred[x * self.actions.len() + u]
    }

    /// Actions enabled at `x`, ascending.
    pub fn enabled_ix(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.actions.len()).filter(move |&u| !self.post_ix(x, u).is_empty())
    }

    pub fn is_deadlock(&self, x: usize) -> bool {
        self.enabled_ix(x).next().is_none()
    }

    /// All successors of `x` over every action (may repeat).
    pub fn successors_ix(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.actions.len()).flat_map(move |u| self.post_ix(x, u).iter().copied())
    }

    /// All predecessors of `x` over every action (may repeat).
    pub fn predecessors_ix(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.actions.len()).flat_map(move |u| self.pre_ix(x, u).iter().copied())
    }

    // ---- name-level operations --------------------------------------------

    pub fn post(&self, x: &str, u: &str) -> Result<BTreeSet<StateId>> {
        let (x, u) = (self.require_state(x)?, self.require_action(u)?);
        Ok(self.post_ix(x, u).iter().map(|&y| self.states[y].clone()).collect())
    }

    pub fn pre(&self, x: &str, u: &str) -> Result<BTreeSet<StateId>> {
        let (x, u) = (self.require_state(x)?, self.require_action(u)?);
        Ok(self.pre_ix(x, u).iter().map(|&y| self.states[y].clone()).collect())
    }

    pub fn enabled(&self, x: &str) -> Result<Vec<ActionId>> {
        let x = self.require_state(x)?;
        Ok(self.enabled_ix(x).map(|u| self.actions[u].clone()).collect())
    }

    /// Induced subsystem on `keep`; alphabets are unchanged.
    pub fn restrict<S: AsRef<str>>(&self, keep: impl IntoIterator<Item = S>) -> Result<Lts> {
        let mut mask = vec![false; self.states.len()];
        for name in keep {
            mask[self.require_state(name.as_ref())?] = true;
        }
        Ok(self.restrict_ix(&mask))
    }

    pub(crate) fn restrict_ix(&self, keep: &[bool]) -> Lts {
        let mut new_index = vec![usize::MAX; self.states.len()];
        let mut states = Vec::new();
        let mut output_of = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if keep[i] {
                new_index[i] = states.len();
                states.push(s.clone());
                output_of.push(self.output_of[i]);
            }
        }
        let initial = self.initial.iter().filter(|&&i| keep[i]).map(|&i| new_index[i]).collect();
        let transitions = self
            .transitions
            .iter()
            .filter(|&&(x, _, y)| keep[x] && keep[y])
            .map(|&(x, u, y)| (new_index[x], u, new_index[y]))
            .collect();
        Lts::from_indexed(states, self.actions.clone(), self.outputs.clone(), initial, output_of, transitions)
    }

    /// Same states, alphabets and outputs, different initial set and transitions.
    pub(crate) fn with_structure(&self, initial: Vec<usize>, transitions: Vec<(usize, usize, usize)>) -> Lts {
        Lts::from_indexed(
            self.states.clone(),
            self.actions.clone(),
            self.outputs.clone(),
            initial,
            self.output_of.clone(),
            transitions,
        )
    }

    /// States reachable from the initial set over any action.
    pub fn reachable_ix(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &i in &self.initial {
            seen[i] = true;
            queue.push_back(i);
        }
        while let Some(x) = queue.pop_front() {
            for y in self.successors_ix(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

/// Incremental builder keyed by names. Alphabets are collected from use.
#[derive(Debug, Default, Clone)]
pub struct LtsBuilder {
    desc: LtsDescription,
}

impl LtsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<StateId>, output: impl Into<OutputId>) -> &mut Self {
        let (name, output) = (name.into(), output.into());
        self.desc.states.insert(name.clone());
        self.desc.outputs.insert(output.clone());
        self.desc.output_map.insert(name, output);
        self
    }

    pub fn initial(&mut self, name: impl Into<StateId>) -> &mut Self {
        self.desc.initial.insert(name.into());
        self
    }

    pub fn action(&mut self, name: impl Into<ActionId>) -> &mut Self {
        self.desc.actions.insert(name.into());
        self
    }

    pub fn output(&mut self, name: impl Into<OutputId>) -> &mut Self {
        self.desc.outputs.insert(name.into());
        self
    }

    /// Adds `(from, action, to)`; repeated transitions are ignored.
    pub fn transition(&mut self, from: impl Into<StateId>, action: impl Into<ActionId>, to: impl Into<StateId>) -> &mut Self {
        let t = (from.into(), action.into(), to.into());
        self.desc.actions.insert(t.1.clone());
        if !self.desc.transitions.contains(&t) {
            self.desc.transitions.push(t);
        }
        self
    }

    pub fn build(&self) -> Result<Lts> {
        Lts::new(self.desc.clone())
    }
}
