//! The reduction pipeline: quotient, controller-move pruning, environment-move
//! pruning and reachability pruning, plus checkers for the four necessary
//! conditions of minimality.
//!
//! The maximal relation is computed once on the input. It is mapped onto the
//! quotient's blocks and then reused unchanged for the two pruning steps,
//! which keep the state set and leave the maximal relation of the system to
//! itself intact.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::alt_sim::{as_equivalence_partition, max_asr, Partition, Relation};
use crate::lts::{Lts, SizeTriple};
use crate::symbol::{ActionId, StateId};

/// Separator used in the names of merged quotient states.
pub const BLOCK_SEPARATOR: &str = "+";

/// Quotient of `s` by mutual membership in `mas = max_asr(s, s)`.
///
/// Each block becomes a state named by its members joined with `+`; a block
/// is initial if any member is. Its transitions are those of a single
/// representative member (fewest outgoing transitions, then smallest name)
/// with targets lifted to blocks. Taking the union over all members instead
/// can offer the environment successor combinations that no member has, and
/// the result is then not equivalent to `s`.
pub fn step1_quotient(s: &Lts, mas: &Relation) -> (Lts, Partition) {
    let partition = as_equivalence_partition(s, mas);
    let names: Vec<StateId> = partition
        .blocks()
        .iter()
        .map(|b| {
            let members: Vec<&str> = b.iter().map(|&x| s.state(x).as_str()).collect();
            StateId::new(members.join(BLOCK_SEPARATOR))
        })
        .collect();

    // Block names need not sort like their first members.
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&i, &j| names[i].cmp(&names[j]));
    let mut rank = vec![0; names.len()];
    for (r, &b) in order.iter().enumerate() {
        rank[b] = r;
    }
    let state_of = |x: usize| rank[partition.block_of(x)];

    let states = order.iter().map(|&b| names[b].clone()).collect();
    let output_of = order.iter().map(|&b| s.output_index(partition.blocks()[b][0])).collect();
    let initial = s.initial().iter().map(|&x| state_of(x)).collect();
    let mut out_degree = vec![0usize; s.num_states()];
    for &(x, _, _) in s.transitions() {
        out_degree[x] += 1;
    }
    let representative: Vec<usize> = partition
        .blocks()
        .iter()
        .map(|b| *b.iter().min_by(|&&x, &&y| (out_degree[x], s.state(x)).cmp(&(out_degree[y], s.state(y)))).unwrap())
        .collect();
    let transitions = s
        .transitions()
        .iter()
        .filter(|&&(x, _, _)| representative[partition.block_of(x)] == x)
        .map(|&(x, u, y)| (state_of(x), u, state_of(y)))
        .collect();
    let quotient = Lts::from_indexed(
        states,
        s.actions().to_vec(),
        s.outputs().to_vec(),
        initial,
        output_of,
        transitions,
    );
    let partition = reorder_partition(&partition, &rank);
    (quotient, partition)
}

fn reorder_partition(p: &Partition, rank: &[usize]) -> Partition {
    let mut blocks = vec![Vec::new(); p.num_blocks()];
    for (b, members) in p.blocks().iter().enumerate() {
        blocks[rank[b]] = members.clone();
    }
    Partition::from_blocks(blocks)
}

/// `mas` mapped onto the blocks of `partition`: `(P, Q)` is related iff
/// some (equivalently every) member pair is.
pub fn quotient_relation(mas: &Relation, partition: &Partition) -> Relation {
    let k = partition.num_blocks();
    let mut r = Relation::empty(k, k);
    for (x, y) in mas.pairs() {
        r.insert(partition.block_of(x), partition.block_of(y));
    }
    r
}

/// `(p, a) ⊑ (p, b)`: every `b`-successor dominates some `a`-successor, so
/// the controller loses nothing by playing `b` instead of `a`.
fn dominated(s: &Lts, mas: &Relation, p: usize, a: usize, b: usize) -> bool {
    let post_a = s.post_ix(p, a);
    s.post_ix(p, b).iter().all(|&q| post_a.iter().any(|&q2| mas.contains(q2, q)))
}

/// For each enabled action at `p`, whether to keep it: drop every action
/// strictly dominated by another, then keep the smallest action of each
/// remaining class of mutually dominating actions.
fn rational_actions(s: &Lts, mas: &Relation, p: usize) -> Vec<(usize, bool)> {
    let enabled: Vec<usize> = s.enabled_ix(p).collect();
    let k = enabled.len();
    // Transitive closure over the (few) enabled actions.
    let mut le = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            le[i][j] = i == j || dominated(s, mas, p, enabled[i], enabled[j]);
        }
    }
    for m in 0..k {
        for i in 0..k {
            for j in 0..k {
                if le[i][m] && le[m][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    (0..k)
        .map(|i| {
            let irrational = (0..k).any(|j| le[i][j] && !le[j][i]);
            let redundant = (0..i).any(|j| le[i][j] && le[j][i]);
            (enabled[i], !irrational && !redundant)
        })
        .collect()
}

/// Removes irrational and redundant controller actions.
pub fn step2_remove_controller_moves(s: &Lts, mas: &Relation) -> Lts {
    step2_with_removed(s, mas).0
}

fn step2_with_removed(s: &Lts, mas: &Relation) -> (Lts, Vec<(usize, usize, usize)>) {
    let mut keep = vec![false; s.num_states() * s.num_actions().max(1)];
    let m = s.num_actions();
    for p in 0..s.num_states() {
        for (u, k) in rational_actions(s, mas, p) {
            keep[p * m + u] = k;
        }
    }
    let (kept, removed): (Vec<_>, Vec<_>) = s.transitions().iter().partition(|&&(x, u, _)| keep[x * m + u]);
    (s.with_structure(s.initial().to_vec(), kept), removed)
}

/// `q2` is a younger sibling of `q` when `q` is strictly below `q2` in `mas`.
fn younger(mas: &Relation, q: usize, q2: usize) -> bool {
    mas.contains(q, q2) && !mas.contains(q2, q)
}

/// Removes every transition and initial state that is a younger sibling of
/// another one.
pub fn step3_remove_younger_siblings(s: &Lts, mas: &Relation) -> Lts {
    step3_with_removed(s, mas).0
}

fn step3_with_removed(s: &Lts, mas: &Relation) -> (Lts, Vec<(usize, usize, usize)>, Vec<usize>) {
    let (kept, removed): (Vec<_>, Vec<_>) = s.transitions().iter().partition(|&&(p, u, q2)| {
        !s.post_ix(p, u).iter().any(|&q| younger(mas, q, q2))
    });
    let initial = s.initial();
    let (kept_init, removed_init): (Vec<_>, Vec<_>) =
        initial.iter().partition(|&&q2| !initial.iter().any(|&q| younger(mas, q, q2)));
    (s.with_structure(kept_init, kept), removed, removed_init)
}

/// Restricts to the states reachable from the initial set.
pub fn step4_prune_unreachable(s: &Lts) -> Lts {
    s.restrict_ix(&s.reachable_ix())
}

/// Sizes and removals recorded for one reduction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: String,
    pub before: SizeTriple,
    pub after: SizeTriple,
    pub tran_size_before: usize,
    pub tran_size_after: usize,
    pub removed_transitions: Vec<(StateId, ActionId, StateId)>,
    pub removed_initial: Vec<StateId>,
    pub removed_states: Vec<StateId>,
}

impl StepRecord {
    fn new(step: &str, before: &Lts, after: &Lts) -> Self {
        StepRecord {
            step: step.to_string(),
            before: before.size(),
            after: after.size(),
            tran_size_before: before.tran_size(),
            tran_size_after: after.tran_size(),
            removed_transitions: Vec::new(),
            removed_initial: Vec::new(),
            removed_states: Vec::new(),
        }
    }
}

/// Evidence collected while minimizing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub original: SizeTriple,
    /// Blocks of the quotient, by member name.
    pub partition: Vec<Vec<StateId>>,
    pub steps: Vec<StepRecord>,
    pub minimal: SizeTriple,
}

impl ReductionTrace {
    pub fn quotient(&self) -> SizeTriple {
        self.steps[0].after
    }
}

/// Every intermediate system of the pipeline.
#[derive(Debug, Clone)]
pub struct Stages {
    pub quotient: Lts,
    pub controller_pruned: Lts,
    pub environment_pruned: Lts,
    pub minimal: Lts,
    pub trace: ReductionTrace,
}

fn named(s: &Lts, ts: &[(usize, usize, usize)]) -> Vec<(StateId, ActionId, StateId)> {
    ts.iter().map(|&(x, u, y)| (s.state(x).clone(), s.action(u).clone(), s.state(y).clone())).collect()
}

/// Runs all four steps and keeps every intermediate system.
pub fn minimize_stages(s: &Lts) -> Stages {
    let mas = max_asr(s, s);
    let (s1, partition) = step1_quotient(s, &mas);
    let r1 = quotient_relation(&mas, &partition);

    let mut rec1 = StepRecord::new("quotient", s, &s1);
    let merged: BTreeSet<&StateId> = s1.states().iter().collect();
    rec1.removed_states = s.states().iter().filter(|x| !merged.contains(x)).cloned().collect();

    let (s2, removed2) = step2_with_removed(&s1, &r1);
    let mut rec2 = StepRecord::new("controller", &s1, &s2);
    rec2.removed_transitions = named(&s1, &removed2);

    let (s3, removed3, removed_init) = step3_with_removed(&s2, &r1);
    let mut rec3 = StepRecord::new("environment", &s2, &s3);
    rec3.removed_transitions = named(&s2, &removed3);
    rec3.removed_initial = removed_init.iter().map(|&x| s2.state(x).clone()).collect();

    let reachable = s3.reachable_ix();
    let s4 = s3.restrict_ix(&reachable);
    let mut rec4 = StepRecord::new("reachability", &s3, &s4);
    rec4.removed_states = (0..s3.num_states()).filter(|&x| !reachable[x]).map(|x| s3.state(x).clone()).collect();
    rec4.removed_transitions = named(
        &s3,
        &s3.transitions().iter().copied().filter(|&(x, _, y)| !(reachable[x] && reachable[y])).collect::<Vec<_>>(),
    );

    let trace = ReductionTrace {
        original: s.size(),
        partition: partition.named_blocks(s),
        steps: vec![rec1, rec2, rec3, rec4],
        minimal: s4.size(),
    };
    Stages { quotient: s1, controller_pruned: s2, environment_pruned: s3, minimal: s4, trace }
}

/// The minimal system alternating-simulation equivalent to `s`.
pub fn minimize(s: &Lts) -> (Lts, ReductionTrace) {
    let stages = minimize_stages(s);
    (stages.minimal, stages.trace)
}

/// One dominated action at a state: `dominated ⊑ by`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominatedMove {
    pub state: StateId,
    pub dominated: ActionId,
    pub by: ActionId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum YoungerSibling {
    Transition { source: StateId, action: ActionId, younger: StateId, elder: StateId },
    Initial { younger: StateId, elder: StateId },
}

/// Outcome of checking the four necessary conditions of minimality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NConditionReport {
    /// No two distinct states are equivalent.
    pub n1: bool,
    /// No irrational or redundant moves.
    pub n2: bool,
    /// No younger siblings.
    pub n3: bool,
    /// Every state reachable.
    pub n4: bool,
    pub equivalent_states: Vec<(StateId, StateId)>,
    pub dominated_moves: Vec<DominatedMove>,
    pub younger_siblings: Vec<YoungerSibling>,
    pub unreachable: Vec<StateId>,
}

impl NConditionReport {
    pub fn all(&self) -> bool {
        self.n1 && self.n2 && self.n3 && self.n4
    }
}

pub fn check_n_conditions(s: &Lts) -> NConditionReport {
    let mas = max_asr(s, s);
    let n = s.num_states();
    let name = |x: usize| s.state(x).clone();

    let mut equivalent_states = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if mas.mutual(x, y) {
                equivalent_states.push((name(x), name(y)));
            }
        }
    }

    let mut dominated_moves = Vec::new();
    for p in 0..n {
        let enabled: Vec<usize> = s.enabled_ix(p).collect();
        for &a in &enabled {
            for &b in &enabled {
                if a != b && dominated(s, &mas, p, a, b) {
                    dominated_moves.push(DominatedMove {
                        state: name(p),
                        dominated: s.action(a).clone(),
                        by: s.action(b).clone(),
                    });
                }
            }
        }
    }

    let mut younger_siblings = Vec::new();
    for &(p, u, q2) in s.transitions() {
        for &q in s.post_ix(p, u) {
            if younger(&mas, q, q2) {
                younger_siblings.push(YoungerSibling::Transition {
                    source: name(p),
                    action: s.action(u).clone(),
                    younger: name(q2),
                    elder: name(q),
                });
            }
        }
    }
    for &q2 in s.initial() {
        for &q in s.initial() {
            if younger(&mas, q, q2) {
                younger_siblings.push(YoungerSibling::Initial { younger: name(q2), elder: name(q) });
            }
        }
    }

    let reachable = s.reachable_ix();
    let unreachable: Vec<StateId> = (0..n).filter(|&x| !reachable[x]).map(name).collect();

    NConditionReport {
        n1: equivalent_states.is_empty(),
        n2: dominated_moves.is_empty(),
        n3: younger_siblings.is_empty(),
        n4: unreachable.is_empty(),
        equivalent_states,
        dominated_moves,
        younger_siblings,
        unreachable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_sim::ase_holds;
    use crate::lts::LtsBuilder;
    use crate::running_example::{fig1, fig3a, fig3b, fig3c, fig5, MERGED_BLOCK};

    #[test]
    fn quotient_of_running_example() {
        let s = fig1();
        let (q, p) = step1_quotient(&s, &max_asr(&s, &s));
        assert_eq!(q, fig3a());
        assert_eq!(p.num_blocks(), 5);
        assert!(q.state_index(MERGED_BLOCK).is_some());
    }

    #[test]
    fn quotient_does_not_mix_member_moves() {
        // x0 ~ x1, but each reaches x2 under a different action. Merging
        // their transitions would make both actions risky.
        let mut b = LtsBuilder::new();
        b.state("x0", "a").state("x1", "a").state("x2", "b").initial("x0");
        b.transition("x0", "u0", "x0").transition("x0", "u1", "x2");
        b.transition("x1", "u0", "x2").transition("x1", "u1", "x0");
        b.transition("x2", "u1", "x0");
        let s = b.build().unwrap();
        let (q, p) = step1_quotient(&s, &max_asr(&s, &s));
        assert_eq!(p.num_blocks(), 2);
        assert_eq!(q.num_transitions(), 3);
        assert!(ase_holds(&s, &q));
        assert!(ase_holds(&s, &q));
    }

    #[test]
    fn quotient_relation_is_maximal_partial_order() {
        let s = fig1();
        let mas = max_asr(&s, &s);
        let (q, p) = step1_quotient(&s, &mas);
        let r1 = quotient_relation(&mas, &p);
        assert!(r1.is_antisymmetric());
        assert_eq!(r1, max_asr(&q, &q));
    }

    #[test]
    fn singleton_partition_quotient_is_a_copy() {
        let s = fig5();
        let (q, p) = step1_quotient(&s, &max_asr(&s, &s));
        assert!(p.is_discrete());
        assert_eq!(q, s);
    }

    #[test]
    fn equivalent_loops_merge() {
        let mut b = LtsBuilder::new();
        b.state("p", "Y").state("q", "Y").initial("p").initial("q");
        b.transition("p", "u", "p").transition("q", "u", "q");
        let s = b.build().unwrap();
        let (q, _) = step1_quotient(&s, &max_asr(&s, &s));
        assert_eq!(q.num_states(), 1);
        assert_eq!(q.states()[0].as_str(), "p+q");
        assert_eq!(q.size(), SizeTriple { n_states: 1, n_initial: 1, n_transitions: 1 });
    }

    #[test]
    fn controller_step_on_running_example() {
        let s1 = fig3a();
        let r1 = max_asr(&s1, &s1);
        let (s2, removed) = step2_with_removed(&s1, &r1);
        assert_eq!(s2, fig3b());
        let removed: Vec<String> = named(&s1, &removed).iter().map(|(x, u, y)| format!("{x} {u} {y}")).collect();
        assert_eq!(removed, ["q0,2 w q0,1", "q0,2 w q1,1", "q1,3+q1,4 w q1,1"]);
    }

    #[test]
    fn single_action_system_untouched_by_controller_step() {
        let mut b = LtsBuilder::new();
        b.state("a", "A").state("b", "B").initial("a");
        b.transition("a", "u", "b").transition("b", "u", "a").transition("b", "u", "b");
        let s = b.build().unwrap();
        assert_eq!(step2_remove_controller_moves(&s, &max_asr(&s, &s)), s);
    }

    #[test]
    fn waiting_at_earliest_trigger_is_irrational() {
        // (q,c) at the start of its triggering window: s samples, w either
        // waits or triggers the same samples.
        let mut b = LtsBuilder::new();
        b.state("x", "W").state("t", "T").state("x2", "W").initial("x");
        b.transition("x", "s", "t").transition("x", "w", "t").transition("x", "w", "x2");
        b.transition("t", "s", "t").transition("x2", "s", "t");
        let s = b.build().unwrap();
        let s2 = step2_remove_controller_moves(&s, &max_asr(&s, &s));
        assert_eq!(s2.enabled("x").unwrap(), vec![ActionId::from("s")]);
    }

    #[test]
    fn environment_step_on_running_example() {
        let s2 = fig3b();
        let r = max_asr(&s2, &s2);
        let (s3, removed, removed_init) = step3_with_removed(&s2, &r);
        assert_eq!(s3, fig3c());
        assert_eq!(named(&s2, &removed), vec![("q0,2".into(), "s".into(), "q1,1".into())]);
        assert_eq!(removed_init.iter().map(|&x| s2.state(x).as_str()).collect::<Vec<_>>(), ["q1,1"]);
    }

    #[test]
    fn deterministic_system_untouched_by_environment_step() {
        let mut b = LtsBuilder::new();
        b.state("a", "A").state("b", "A").initial("a");
        b.transition("a", "u", "b").transition("b", "u", "a").transition("a", "v", "a");
        let s = b.build().unwrap();
        assert_eq!(step3_remove_younger_siblings(&s, &max_asr(&s, &s)), s);
    }

    #[test]
    fn mutually_related_initials_are_kept() {
        let mut b = LtsBuilder::new();
        b.state("p", "Y").state("q", "Y").initial("p").initial("q");
        b.transition("p", "u", "p").transition("q", "u", "q");
        let s = b.build().unwrap();
        let s3 = step3_remove_younger_siblings(&s, &max_asr(&s, &s));
        assert_eq!(s3.initial().len(), 2);
    }

    #[test]
    fn reachability_step() {
        assert_eq!(step4_prune_unreachable(&fig3c()), fig5());
        assert_eq!(step4_prune_unreachable(&fig1()), fig1());
        let mut b = LtsBuilder::new();
        b.state("a", "A").transition("a", "u", "a");
        let s = step4_prune_unreachable(&b.build().unwrap());
        assert_eq!(s.num_states(), 0);
    }

    #[test]
    fn full_pipeline_on_running_example() {
        let stages = minimize_stages(&fig1());
        assert_eq!(stages.quotient, fig3a());
        assert_eq!(stages.controller_pruned, fig3b());
        assert_eq!(stages.environment_pruned, fig3c());
        assert_eq!(stages.minimal, fig5());
        let t = &stages.trace;
        assert_eq!(t.original, SizeTriple { n_states: 6, n_initial: 2, n_transitions: 15 });
        assert_eq!(t.quotient(), SizeTriple { n_states: 5, n_initial: 2, n_transitions: 12 });
        assert_eq!(t.minimal, SizeTriple { n_states: 2, n_initial: 1, n_transitions: 3 });
        assert_eq!(t.steps[3].removed_states.len(), 3);
    }

    #[test]
    fn minimal_system_is_a_fixed_point() {
        let (m, _) = minimize(&fig5());
        assert_eq!(m, fig5());
    }

    #[test]
    fn n_conditions_on_running_example() {
        assert!(check_n_conditions(&fig5()).all());

        let r = check_n_conditions(&fig1());
        assert!(!r.n1);
        assert!(r.equivalent_states.contains(&("q1,3".into(), "q1,4".into())));

        let r = check_n_conditions(&fig3c());
        assert!(r.n1 && r.n2 && r.n3);
        assert!(!r.n4);
        assert!(r.unreachable.contains(&"q1,1".into()));

        let r = check_n_conditions(&fig3a());
        assert!(r.n1 && !r.n2 && !r.n3);
    }
}
