//! Synchronous composition of traffic models and the safety game deciding
//! whether a scheduler can keep the shared channels collision-free.
//!
//! Composite names join component names with `|`: state `q0,1|i2`, joint
//! action `s|w`, output `T|W`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::alt_sim::{answers, max_asr, Relation};
use crate::error::{Error, Result};
use crate::lts::{Lts, LtsDescription};
use crate::minimize::minimize;
use crate::petc::{SAMPLE, TRANSMIT, WAIT};
use crate::symbol::{ActionId, OutputId, StateId};

pub const COMPONENT_SEPARATOR: char = '|';

pub fn split_components(name: &str) -> Vec<&str> {
    name.split(COMPONENT_SEPARATOR).collect()
}

pub fn join_components<S: AsRef<str>>(parts: &[S]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push(COMPONENT_SEPARATOR);
        }
        out.push_str(p.as_ref());
    }
    out
}

fn check_component(i: usize, m: &Lts) -> Result<()> {
    let bad_name = |s: &str| s.contains(COMPONENT_SEPARATOR);
    if let Some(x) = m.states().iter().find(|x| bad_name(x.as_str())) {
        return Err(Error::Compose(format!("component {i}: state `{x}` contains `{COMPONENT_SEPARATOR}`")));
    }
    if let Some(y) = m.outputs().iter().find(|y| bad_name(y.as_str())) {
        return Err(Error::Compose(format!("component {i}: output `{y}` contains `{COMPONENT_SEPARATOR}`")));
    }
    if let Some(u) = m.actions().iter().find(|u| u.as_str() != WAIT && u.as_str() != SAMPLE) {
        return Err(Error::Compose(format!("component {i}: action `{u}` is not `{WAIT}` or `{SAMPLE}`")));
    }
    Ok(())
}

/// Calls `f` on every element of the cartesian product of `choices`.
fn for_each_combination(choices: &[Vec<usize>], f: &mut impl FnMut(&[usize])) {
    if choices.iter().any(Vec::is_empty) {
        return;
    }
    let mut pick = vec![0usize; choices.len()];
    let mut current: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&current);
        let mut k = choices.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                current[k] = choices[k][pick[k]];
                break;
            }
            pick[k] = 0;
            current[k] = choices[k][0];
        }
    }
}

/// Reachable synchronous product. A joint transition exists iff every
/// component moves under its own action; each component's successor is
/// resolved independently.
pub fn compose(models: &[Lts]) -> Result<Lts> {
    if models.is_empty() {
        return Err(Error::Compose("nothing to compose".into()));
    }
    for (i, m) in models.iter().enumerate() {
        check_component(i, m)?;
    }

    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut vectors: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |v: &[usize], vectors: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(v) {
            return i;
        }
        let i = vectors.len();
        index.insert(v.to_vec(), i);
        vectors.push(v.to_vec());
        queue.push_back(i);
        i
    };

    let initial_choices: Vec<Vec<usize>> = models.iter().map(|m| m.initial().to_vec()).collect();
    let mut initial = Vec::new();
    for_each_combination(&initial_choices, &mut |v| initial.push(intern(v, &mut vectors, &mut queue)));

    let mut transitions: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let x = vectors[i].clone();
        let enabled: Vec<Vec<usize>> = models.iter().zip(&x).map(|(m, &xi)| m.enabled_ix(xi).collect()).collect();
        for_each_combination(&enabled, &mut |u| {
            let posts: Vec<Vec<usize>> = models.iter().zip(&x).zip(u).map(|((m, &xi), &ui)| m.post_ix(xi, ui).to_vec()).collect();
            for_each_combination(&posts, &mut |y| {
                let j = intern(y, &mut vectors, &mut queue);
                transitions.push((i, u.to_vec(), j));
            });
        });
    }

    let name = |v: &[usize]| -> StateId {
        join_components(&models.iter().zip(v).map(|(m, &x)| m.state(x).as_str()).collect::<Vec<_>>()).into()
    };
    let action = |u: &[usize]| -> ActionId {
        join_components(&models.iter().zip(u).map(|(m, &a)| m.action(a).as_str()).collect::<Vec<_>>()).into()
    };
    let names: Vec<StateId> = vectors.iter().map(|v| name(v)).collect();
    let mut desc = LtsDescription::default();
    for (v, x) in vectors.iter().zip(&names) {
        let y: OutputId =
            join_components(&models.iter().zip(v).map(|(m, &xi)| m.output(xi).as_str()).collect::<Vec<_>>()).into();
        desc.states.insert(x.clone());
        desc.outputs.insert(y.clone());
        desc.output_map.insert(x.clone(), y);
    }
    desc.initial = initial.iter().map(|&i| names[i].clone()).collect();
    for (i, u, j) in transitions {
        let u = action(&u);
        desc.actions.insert(u.clone());
        desc.transitions.push((names[i].clone(), u, names[j].clone()));
    }
    Lts::new(desc)
}

/// A set of game states the controller must avoid.
pub trait StatePredicate {
    fn holds(&self, game: &Lts, x: usize) -> bool;
}

impl<F: Fn(&Lts, usize) -> bool> StatePredicate for F {
    fn holds(&self, game: &Lts, x: usize) -> bool {
        self(game, x)
    }
}

/// Bad iff more than `channels` components transmit at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionPredicate {
    pub channels: usize,
}

pub fn collision_predicate(channels: usize) -> Result<CollisionPredicate> {
    if channels == 0 {
        return Err(Error::InvalidArgument("at least one channel is required".into()));
    }
    Ok(CollisionPredicate { channels })
}

impl CollisionPredicate {
    pub fn is_collision(&self, output: &str) -> bool {
        split_components(output).iter().filter(|&&y| y == TRANSMIT).count() > self.channels
    }
}

impl StatePredicate for CollisionPredicate {
    fn holds(&self, game: &Lts, x: usize) -> bool {
        self.is_collision(game.output(x).as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub winning: BTreeSet<StateId>,
    /// Defined exactly on `winning`.
    pub strategy: BTreeMap<StateId, ActionId>,
    pub schedulable: bool,
}

fn joint_key(u: &ActionId) -> Vec<&str> {
    split_components(u.as_str())
}

/// Solves the safety game on `game`: the controller wins from states where it
/// can avoid `bad` forever. Deadlocks lose.
///
/// Losing states are propagated backwards: a controller action is unsafe once
/// one of its successors loses, and a state loses once all of its actions are
/// unsafe.
pub fn solve_safety(game: &Lts, bad: &impl StatePredicate) -> GameResult {
    let n = game.num_states();
    let m = game.num_actions();
    let mut losing = vec![false; n];
    let mut unsafe_action = vec![false; n * m];
    let mut safe_left: Vec<usize> = (0..n).map(|x| game.enabled_ix(x).count()).collect();
    let mut queue = Vec::new();
    for x in 0..n {
        if safe_left[x] == 0 || bad.holds(game, x) {
            losing[x] = true;
            queue.push(x);
        }
    }
    while let Some(y) = queue.pop() {
        for u in 0..m {
            for &x in game.pre_ix(y, u) {
                let slot = x * m + u;
                if losing[x] || unsafe_action[slot] {
                    continue;
                }
                unsafe_action[slot] = true;
                safe_left[x] -= 1;
                if safe_left[x] == 0 {
                    losing[x] = true;
                    queue.push(x);
                }
            }
        }
    }

    let mut winning = BTreeSet::new();
    let mut strategy = BTreeMap::new();
    for x in (0..n).filter(|&x| !losing[x]) {
        let choice = game
            .enabled_ix(x)
            .filter(|&u| !unsafe_action[x * m + u])
            .min_by(|&u, &v| joint_key(game.action(u)).cmp(&joint_key(game.action(v))))
            .expect("winning states keep a safe action");
        winning.insert(game.state(x).clone());
        strategy.insert(game.state(x).clone(), game.action(choice).clone());
    }
    let schedulable = game.initial().iter().all(|&x| !losing[x]);
    GameResult { winning, strategy, schedulable }
}

/// Output of [`schedule`].
#[derive(Debug, Clone)]
pub struct Schedule {
    /// The systems actually composed (minimized if requested).
    pub components: Vec<Lts>,
    pub game: Lts,
    pub result: GameResult,
}

/// Composes `models` (optionally minimizing each first) and solves the
/// collision-avoidance game for `channels` channels.
pub fn schedule(models: &[Lts], channels: usize, minimize_first: bool) -> Result<Schedule> {
    let bad = collision_predicate(channels)?;
    let components: Vec<Lts> =
        if minimize_first { models.iter().map(|m| minimize(m).0).collect() } else { models.to_vec() };
    let game = compose(&components)?;
    let result = solve_safety(&game, &bad);
    Ok(Schedule { components, game, result })
}

/// Executes a solved strategy step by step.
#[derive(Debug, Clone)]
pub struct Scheduler {
    result: GameResult,
    models: Vec<Lts>,
    current: Option<Vec<StateId>>,
}

/// Turns a solved game over `models` into a step function.
pub fn refine_strategy(result: &GameResult, models: &[Lts]) -> Result<Scheduler> {
    if !result.schedulable {
        return Err(Error::ContractViolation("the game has no winning strategy from its initial states".into()));
    }
    Ok(Scheduler { result: result.clone(), models: models.to_vec(), current: None })
}

impl Scheduler {
    fn enter(&mut self, states: &[StateId]) -> Result<()> {
        let name = join_components(states);
        if !self.result.winning.contains(name.as_str()) {
            return Err(Error::ContractViolation(format!("state `{name}` is outside the winning region")));
        }
        self.current = Some(states.to_vec());
        Ok(())
    }

    /// Starts a run in the given component states.
    pub fn reset(&mut self, initial: &[StateId]) -> Result<()> {
        if initial.len() != self.models.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} component states, got {}",
                self.models.len(),
                initial.len()
            )));
        }
        for (m, x) in self.models.iter().zip(initial) {
            let i = m.require_state(x.as_str())?;
            if !m.is_initial(i) {
                return Err(Error::ContractViolation(format!("`{x}` is not an initial state")));
            }
        }
        self.enter(initial)
    }

    pub fn current(&self) -> Option<&[StateId]> {
        self.current.as_deref()
    }

    pub fn joint_action(&self) -> Result<Vec<ActionId>> {
        let current = self.current.as_ref().ok_or_else(|| Error::ContractViolation("scheduler not started".into()))?;
        let action = &self.result.strategy[join_components(current).as_str()];
        Ok(split_components(action.as_str()).into_iter().map(ActionId::from).collect())
    }

    /// Feeds back the component states the environment chose after the
    /// current joint action.
    pub fn advance(&mut self, next: &[StateId]) -> Result<()> {
        let actions = self.joint_action()?;
        let current = self.current.as_ref().expect("started");
        if next.len() != current.len() {
            return Err(Error::InvalidArgument(format!("expected {} component states, got {}", current.len(), next.len())));
        }
        for (i, m) in self.models.iter().enumerate() {
            if !m.post(current[i].as_str(), actions[i].as_str())?.contains(&next[i]) {
                return Err(Error::ContractViolation(format!(
                    "component {i}: `{}` is not a `{}`-successor of `{}`",
                    next[i], actions[i], current[i]
                )));
            }
        }
        self.enter(next)
    }
}

/// Runs a strategy computed on an abstract system against a concrete system
/// that the abstract one alternatingly simulates.
///
/// Keeps a pair `(abstract, concrete)` inside the maximal relation: abstract
/// actions are translated to concrete actions whose every outcome is matched
/// by some abstract outcome.
#[derive(Debug, Clone)]
pub struct ConcreteTracker {
    abstract_model: Lts,
    concrete: Lts,
    relation: Relation,
    current: Option<(usize, usize)>,
    pending: Option<usize>,
}

impl ConcreteTracker {
    pub fn new(abstract_model: &Lts, concrete: &Lts) -> Self {
        let relation = max_asr(abstract_model, concrete);
        Self { abstract_model: abstract_model.clone(), concrete: concrete.clone(), relation, current: None, pending: None }
    }

    fn related_in(&self, candidates: impl Iterator<Item = usize>, xb: usize) -> Result<usize> {
        let mut found = None;
        for xa in candidates {
            if self.relation.contains(xa, xb) {
                found = Some(xa);
                break;
            }
        }
        found.ok_or_else(|| {
            Error::ContractViolation(format!("concrete state `{}` has no related abstract state", self.concrete.state(xb)))
        })
    }

    /// Starts from a concrete initial state; returns the abstract initial
    /// state to track.
    pub fn start(&mut self, concrete_initial: &str) -> Result<StateId> {
        let xb = self.concrete.require_state(concrete_initial)?;
        let xa = self.related_in(self.abstract_model.initial().iter().copied(), xb)?;
        self.current = Some((xa, xb));
        self.pending = None;
        Ok(self.abstract_model.state(xa).clone())
    }

    pub fn abstract_state(&self) -> Option<&StateId> {
        self.current.map(|(xa, _)| self.abstract_model.state(xa))
    }

    /// Translates the abstract action into a concrete one.
    pub fn concrete_action(&mut self, abstract_action: &str) -> Result<ActionId> {
        let (xa, xb) = self.current.ok_or_else(|| Error::ContractViolation("tracker not started".into()))?;
        let ua = self.abstract_model.require_action(abstract_action)?;
        if self.abstract_model.post_ix(xa, ua).is_empty() {
            return Err(Error::ContractViolation(format!(
                "`{abstract_action}` is not enabled at `{}`",
                self.abstract_model.state(xa)
            )));
        }
        let (a, b, r) = (&self.abstract_model, &self.concrete, &self.relation);
        let ub = b.enabled_ix(xb).find(|&ub| answers(a, b, r, xa, ua, xb, ub)).ok_or_else(|| {
            Error::ContractViolation(format!("no concrete answer to `{abstract_action}` at `{}`", b.state(xb)))
        })?;
        self.pending = Some(ua);
        Ok(b.action(ub).clone())
    }

    /// Records the concrete successor; returns the matching abstract successor.
    pub fn observe(&mut self, concrete_next: &str) -> Result<StateId> {
        let (xa, _) = self.current.ok_or_else(|| Error::ContractViolation("tracker not started".into()))?;
        let ua = self.pending.take().ok_or_else(|| Error::ContractViolation("no action pending".into()))?;
        let yb = self.concrete.require_state(concrete_next)?;
        let ya = self.related_in(self.abstract_model.post_ix(xa, ua).iter().copied(), yb)?;
        self.current = Some((ya, yb));
        Ok(self.abstract_model.state(ya).clone())
    }
}

/// A scheduler solved on minimized components driving the original ones.
#[derive(Debug, Clone)]
pub struct RefinedScheduler {
    scheduler: Scheduler,
    trackers: Vec<ConcreteTracker>,
}

impl RefinedScheduler {
    /// `abstract_models` are the systems the game was solved on, `concrete`
    /// the systems actually running.
    pub fn new(result: &GameResult, abstract_models: &[Lts], concrete: &[Lts]) -> Result<Self> {
        if abstract_models.len() != concrete.len() {
            return Err(Error::InvalidArgument("component counts differ".into()));
        }
        let scheduler = refine_strategy(result, abstract_models)?;
        let trackers = abstract_models.iter().zip(concrete).map(|(a, c)| ConcreteTracker::new(a, c)).collect();
        Ok(Self { scheduler, trackers })
    }

    pub fn start(&mut self, concrete_initial: &[StateId]) -> Result<()> {
        if concrete_initial.len() != self.trackers.len() {
            return Err(Error::InvalidArgument("wrong number of component states".into()));
        }
        let abstract_initial =
            self.trackers.iter_mut().zip(concrete_initial).map(|(t, x)| t.start(x.as_str())).collect::<Result<Vec<_>>>()?;
        self.scheduler.reset(&abstract_initial)
    }

    /// Concrete joint action for the current step.
    pub fn joint_action(&mut self) -> Result<Vec<ActionId>> {
        let abstract_actions = self.scheduler.joint_action()?;
        self.trackers.iter_mut().zip(&abstract_actions).map(|(t, u)| t.concrete_action(u.as_str())).collect()
    }

    /// Call after [`Self::joint_action`] with the concrete successors.
    pub fn advance(&mut self, concrete_next: &[StateId]) -> Result<()> {
        if concrete_next.len() != self.trackers.len() {
            return Err(Error::InvalidArgument("wrong number of component states".into()));
        }
        let abstract_next =
            self.trackers.iter_mut().zip(concrete_next).map(|(t, x)| t.observe(x.as_str())).collect::<Result<Vec<_>>>()?;
        self.scheduler.advance(&abstract_next)
    }
}
