//! JSON documents for transition systems, traffic specs and strategies, and
//! Graphviz export.
//!
//! Emission is canonical: arrays are sorted and the JSON is pretty-printed
//! with a trailing newline, so equal inputs always give byte-equal files.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{join_components, split_components, GameResult};
use crate::lts::{Lts, LtsDescription};
use crate::petc::TrafficSpec;
use crate::symbol::{ActionId, OutputId, StateId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub id: StateId,
    pub output: OutputId,
    pub initial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: StateId,
    pub action: ActionId,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtsDocument {
    pub format_version: u32,
    pub states: Vec<StateEntry>,
    pub actions: Vec<ActionId>,
    /// Output alphabet, needed only when it has symbols no state carries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputId>>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionEntry {
    pub id: String,
    pub tau_low: u32,
    pub tau_high: u32,
    pub initial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub from: String,
    pub tau: u32,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSpecDocument {
    pub format_version: u32,
    pub regions: Vec<RegionEntry>,
    pub delta: Vec<DeltaEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyEntry {
    pub state: Vec<StateId>,
    pub action: Vec<ActionId>,
}

/// A solved game: component-wise state vectors and joint actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDocument {
    pub format_version: u32,
    pub schedulable: bool,
    pub winning: Vec<Vec<StateId>>,
    pub strategy: Vec<StrategyEntry>,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner().to_string())
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(parse_error("format_version", format!("unsupported version {v}, expected {FORMAT_VERSION}")));
    }
    Ok(())
}

impl LtsDocument {
    pub fn from_lts(s: &Lts) -> Self {
        let states = (0..s.num_states())
            .map(|x| StateEntry { id: s.state(x).clone(), output: s.output(x).clone(), initial: s.is_initial(x) })
            .collect();
        let used: BTreeSet<usize> = (0..s.num_states()).map(|x| s.output_index(x)).collect();
        let outputs = (used.len() != s.outputs().len()).then(|| s.outputs().to_vec());
        let transitions = s
            .named_transitions()
            .map(|(x, u, y)| TransitionEntry { from: x.clone(), action: u.clone(), to: y.clone() })
            .collect();
        LtsDocument { format_version: FORMAT_VERSION, states, actions: s.actions().to_vec(), outputs, transitions }
    }

    pub fn to_lts(&self) -> Result<Lts> {
        check_version(self.format_version)?;
        let mut desc = LtsDescription::default();
        for (i, st) in self.states.iter().enumerate() {
            if !desc.states.insert(st.id.clone()) {
                return Err(parse_error(format!("states[{i}].id"), format!("duplicate state `{}`", st.id)));
            }
            desc.outputs.insert(st.output.clone());
            desc.output_map.insert(st.id.clone(), st.output.clone());
            if st.initial {
                desc.initial.insert(st.id.clone());
            }
        }
        for (i, u) in self.actions.iter().enumerate() {
            if !desc.actions.insert(u.clone()) {
                return Err(parse_error(format!("actions[{i}]"), format!("duplicate action `{u}`")));
            }
        }
        if let Some(outputs) = &self.outputs {
            let declared: BTreeSet<OutputId> = outputs.iter().cloned().collect();
            if declared.len() != outputs.len() {
                return Err(parse_error("outputs", "duplicate output"));
            }
            for (i, st) in self.states.iter().enumerate() {
                if !declared.contains(&st.output) {
                    return Err(parse_error(format!("states[{i}].output"), format!("output `{}` not declared", st.output)));
                }
            }
            desc.outputs = declared;
        }
        let mut seen = HashSet::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if !desc.states.contains(&t.from) {
                return Err(parse_error(format!("transitions[{i}].from"), format!("unknown state `{}`", t.from)));
            }
            if !desc.actions.contains(&t.action) {
                return Err(parse_error(format!("transitions[{i}].action"), format!("unknown action `{}`", t.action)));
            }
            if !desc.states.contains(&t.to) {
                return Err(parse_error(format!("transitions[{i}].to"), format!("unknown state `{}`", t.to)));
            }
            if !seen.insert(t) {
                return Err(parse_error(format!("transitions[{i}]"), "duplicate transition"));
            }
            desc.transitions.push((t.from.clone(), t.action.clone(), t.to.clone()));
        }
        Lts::new(desc)
    }
}

pub fn parse_lts(text: &str) -> Result<Lts> {
    from_json::<LtsDocument>(text)?.to_lts()
}

pub fn emit_lts(s: &Lts) -> String {
    to_json(&LtsDocument::from_lts(s))
}

impl TrafficSpecDocument {
    pub fn from_spec(spec: &TrafficSpec) -> Self {
        TrafficSpecDocument {
            format_version: FORMAT_VERSION,
            regions: spec
                .regions
                .iter()
                .map(|(q, r)| RegionEntry { id: q.clone(), tau_low: r.tau_low, tau_high: r.tau_high, initial: r.initial })
                .collect(),
            delta: spec.delta.iter().map(|(q, tau, q2)| DeltaEntry { from: q.clone(), tau: *tau, to: q2.clone() }).collect(),
        }
    }

    pub fn to_spec(&self) -> Result<TrafficSpec> {
        check_version(self.format_version)?;
        let mut spec = TrafficSpec::new();
        for (i, r) in self.regions.iter().enumerate() {
            if spec.regions.contains_key(&r.id) {
                return Err(parse_error(format!("regions[{i}].id"), format!("duplicate region `{}`", r.id)));
            }
            spec.add_region(r.id.clone(), r.tau_low, r.tau_high, r.initial);
        }
        for (i, d) in self.delta.iter().enumerate() {
            if !spec.regions.contains_key(&d.from) {
                return Err(parse_error(format!("delta[{i}].from"), format!("unknown region `{}`", d.from)));
            }
            if !spec.regions.contains_key(&d.to) {
                return Err(parse_error(format!("delta[{i}].to"), format!("unknown region `{}`", d.to)));
            }
            if !spec.delta.insert((d.from.clone(), d.tau, d.to.clone())) {
                return Err(parse_error(format!("delta[{i}]"), "duplicate transition"));
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub fn parse_traffic_spec(text: &str) -> Result<TrafficSpec> {
    from_json::<TrafficSpecDocument>(text)?.to_spec()
}

pub fn emit_traffic_spec(spec: &TrafficSpec) -> String {
    to_json(&TrafficSpecDocument::from_spec(spec))
}

fn split_state(x: &StateId) -> Vec<StateId> {
    split_components(x.as_str()).into_iter().map(StateId::from).collect()
}

impl StrategyDocument {
    pub fn from_result(result: &GameResult) -> Self {
        let mut winning: Vec<Vec<StateId>> = result.winning.iter().map(split_state).collect();
        winning.sort();
        let mut strategy: Vec<StrategyEntry> = result
            .strategy
            .iter()
            .map(|(x, u)| StrategyEntry {
                state: split_state(x),
                action: split_components(u.as_str()).into_iter().map(ActionId::from).collect(),
            })
            .collect();
        strategy.sort_by(|a, b| a.state.cmp(&b.state));
        StrategyDocument { format_version: FORMAT_VERSION, schedulable: result.schedulable, winning, strategy }
    }

    pub fn to_result(&self) -> Result<GameResult> {
        check_version(self.format_version)?;
        let winning: BTreeSet<StateId> = self.winning.iter().map(|v| StateId::from(join_components(v))).collect();
        let mut strategy = BTreeMap::new();
        for (i, e) in self.strategy.iter().enumerate() {
            if e.state.len() != e.action.len() {
                return Err(parse_error(format!("strategy[{i}]"), "state and action vectors differ in length"));
            }
            let x = StateId::from(join_components(&e.state));
            if !winning.contains(&x) {
                return Err(parse_error(format!("strategy[{i}].state"), "state is not in the winning region"));
            }
            if strategy.insert(x, ActionId::from(join_components(&e.action))).is_some() {
                return Err(parse_error(format!("strategy[{i}].state"), "duplicate state"));
            }
        }
        if strategy.len() != winning.len() {
            return Err(parse_error("strategy", "every winning state needs an action"));
        }
        Ok(GameResult { winning, strategy, schedulable: self.schedulable })
    }
}

pub fn emit_strategy(result: &GameResult) -> String {
    to_json(&StrategyDocument::from_result(result))
}

pub fn parse_strategy(text: &str) -> Result<GameResult> {
    from_json::<StrategyDocument>(text)?.to_result()
}

/// Any serializable report (reduction traces, N-condition reports) as
/// canonical JSON.
pub fn emit_json<T: Serialize>(value: &T) -> String {
    to_json(value)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotOptions {
    pub graph_name: String,
    /// Put the output under the state name in node labels.
    pub show_outputs: bool,
}

impl Default for DotOptions {
    fn default() -> Self {
        Self { graph_name: "lts".into(), show_outputs: true }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz digraph. Parallel transitions between the same pair of states
/// share one edge whose label lists the actions; each initial state gets an
/// incoming edge from an invisible point.
pub fn emit_dot(s: &Lts, options: &DotOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&options.graph_name));
    for x in 0..s.num_states() {
        let name = s.state(x).as_str();
        let label = if options.show_outputs { format!("{name}\\n{}", s.output(x)) } else { name.to_string() };
        // `label` already carries the DOT newline escape, so only quotes need escaping.
        let _ = writeln!(out, "  {} [label=\"{}\"];", quote(name), label.replace('"', "\\\""));
    }
    for (k, &x) in s.initial().iter().enumerate() {
        let stub = format!("__init{k}");
        let _ = writeln!(out, "  {stub} [shape=point, style=invis];");
        let _ = writeln!(out, "  {stub} -> {};", quote(s.state(x).as_str()));
    }
    let mut edges: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for &(x, u, y) in s.transitions() {
        edges.entry((x, y)).or_default().push(s.action(u).as_str());
    }
    for ((x, y), mut labels) in edges {
        labels.sort_unstable();
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(s.state(x).as_str()),
            quote(s.state(y).as_str()),
            quote(&labels.join(", "))
        );
    }
    out.push_str("}\n");
    out
}
