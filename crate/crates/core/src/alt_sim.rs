//! Alternating simulation: relation checking, the maximal relation, the
//! equivalence decision and the induced partition of a system's states.
//!
//! A relation `R ⊆ Xa × Xb` is an alternating simulation relation (ASR) from
//! `a` to `b` when
//!
//! 1. every initial state of `b` is related to some initial state of `a`,
//! 2. related states have equal outputs, and
//! 3. for every related `(xa, xb)` and every action `ua` enabled at `xa`
//!    there is an action `ub` enabled at `xb` such that every `ub`-successor
//!    of `xb` is related to some `ua`-successor of `xa`.
//!
//! Intuitively `b`'s controller is at least as strong as `a`'s and `a`'s
//! environment at least as strong as `b`'s.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::symbol::{ActionId, OutputId, StateId};

/// Dense relation between the states of a left and a right system,
/// addressed by state index.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Relation { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n, n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    /// Relation between `left` and `right` from state names.
    pub fn from_named_pairs<S: AsRef<str>, T: AsRef<str>>(
        left: &Lts,
        right: &Lts,
        pairs: impl IntoIterator<Item = (S, T)>,
    ) -> Result<Self> {
        let mut r = Self::empty(left.num_states(), right.num_states());
        for (x, y) in pairs {
            let i = left
                .state_index(x.as_ref())
                .ok_or_else(|| Error::MalformedRelation(format!("`{}` is not a left state", x.as_ref())))?;
            let j = right
                .state_index(y.as_ref())
                .ok_or_else(|| Error::MalformedRelation(format!("`{}` is not a right state", y.as_ref())))?;
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn named_pairs(&self, left: &Lts, right: &Lts) -> Vec<(StateId, StateId)> {
        self.pairs().map(|(i, j)| (left.state(i).clone(), right.state(j).clone())).collect()
    }

    pub fn contains_named(&self, left: &Lts, right: &Lts, x: &str, y: &str) -> bool {
        match (left.state_index(x), right.state_index(y)) {
            (Some(i), Some(j)) => self.contains(i, j),
            _ => false,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        !std::mem::replace(&mut self.bits[i * self.cols + j], true)
    }

    pub fn remove(&mut self, i: usize, j: usize) -> bool {
        std::mem::replace(&mut self.bits[i * self.cols + j], false)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Pairs in row-major (hence lexicographic by name) order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols.max(1);
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(k, _)| (k / cols, k % cols))
    }

    pub fn inverse(&self) -> Relation {
        let mut r = Self::empty(self.cols, self.rows);
        for (i, j) in self.pairs() {
            r.insert(j, i);
        }
        r
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.pairs().all(|(i, j)| other.contains(i, j))
    }

    pub fn is_reflexive(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| self.contains(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        (0..n).all(|i| {
            (0..n).filter(|&j| self.contains(i, j)).all(|j| (0..n).all(|k| !self.contains(j, k) || self.contains(i, k)))
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols && self.pairs().all(|(i, j)| i == j || !self.contains(j, i))
    }

    /// Both `(i, j)` and `(j, i)` present.
    pub fn mutual(&self, i: usize, j: usize) -> bool {
        self.contains(i, j) && self.contains(j, i)
    }
}

/// Which condition of the definition a relation breaks, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsrViolation {
    /// Condition (i): this initial state of the right system has no related
    /// initial state on the left.
    UnmatchedInitial { right_initial: StateId },
    /// Condition (ii).
    OutputMismatch { left: StateId, right: StateId, left_output: OutputId, right_output: OutputId },
    /// Condition (iii): no action at `right` answers `action` at `left`.
    UnmatchedMove { left: StateId, right: StateId, action: ActionId },
}

impl AsrViolation {
    /// 1, 2 or 3 for conditions (i), (ii), (iii).
    pub fn condition(&self) -> u8 {
        match self {
            AsrViolation::UnmatchedInitial { .. } => 1,
            AsrViolation::OutputMismatch { .. } => 2,
            AsrViolation::UnmatchedMove { .. } => 3,
        }
    }
}

impl fmt::Display for AsrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsrViolation::UnmatchedInitial { right_initial } => {
                write!(f, "condition (i): initial state {right_initial} is not matched by any initial state")
            }
            AsrViolation::OutputMismatch { left, right, left_output, right_output } => write!(
                f,
                "condition (ii): ({left}, {right}) relates outputs {left_output} and {right_output}"
            ),
            AsrViolation::UnmatchedMove { left, right, action } => write!(
                f,
                "condition (iii): at ({left}, {right}) no action answers {action}"
            ),
        }
    }
}

fn check_dims(a: &Lts, b: &Lts, r: &Relation) -> Result<()> {
    if r.rows() != a.num_states() || r.cols() != b.num_states() {
        return Err(Error::MalformedRelation(format!(
            "relation is {}x{} but systems have {} and {} states",
            r.rows(),
            r.cols(),
            a.num_states(),
            b.num_states()
        )));
    }
    Ok(())
}

/// True iff every `ub`-successor of `xb` is related to some `ua`-successor of `xa`.
#[inline]
pub(crate) fn answers(a: &Lts, b: &Lts, r: &Relation, xa: usize, ua: usize, xb: usize, ub: usize) -> bool {
    let post_a = a.post_ix(xa, ua);
    b.post_ix(xb, ub).iter().all(|&yb| post_a.iter().any(|&ya| r.contains(ya, yb)))
}

fn step_condition_violation(a: &Lts, b: &Lts, r: &Relation, xa: usize, xb: usize) -> Option<usize> {
    a.enabled_ix(xa).find(|&ua| !b.enabled_ix(xb).any(|ub| answers(a, b, r, xa, ua, xb, ub)))
}

/// Checks conditions (ii) and (iii) only.
pub fn check_step_conditions(a: &Lts, b: &Lts, r: &Relation) -> Result<Option<AsrViolation>> {
    check_dims(a, b, r)?;
    for (xa, xb) in r.pairs() {
        if a.output(xa) != b.output(xb) {
            return Ok(Some(AsrViolation::OutputMismatch {
                left: a.state(xa).clone(),
                right: b.state(xb).clone(),
                left_output: a.output(xa).clone(),
                right_output: b.output(xb).clone(),
            }));
        }
    }
    for (xa, xb) in r.pairs() {
        if let Some(ua) = step_condition_violation(a, b, r, xa, xb) {
            return Ok(Some(AsrViolation::UnmatchedMove {
                left: a.state(xa).clone(),
                right: b.state(xb).clone(),
                action: a.action(ua).clone(),
            }));
        }
    }
    Ok(None)
}

fn initial_condition_violation(a: &Lts, b: &Lts, r: &Relation) -> Option<AsrViolation> {
    b.initial()
        .iter()
        .find(|&&yb| !a.initial().iter().any(|&xa| r.contains(xa, yb)))
        .map(|&yb| AsrViolation::UnmatchedInitial { right_initial: b.state(yb).clone() })
}

/// Checks whether `r` is an ASR from `a` to `b`. Returns `Ok(None)` when it
/// is, otherwise the first violation found. Per-pair conditions (ii) then
/// (iii) are checked before the initial-state condition (i).
pub fn is_asr(a: &Lts, b: &Lts, r: &Relation) -> Result<Option<AsrViolation>> {
    if let Some(v) = check_step_conditions(a, b, r)? {
        return Ok(Some(v));
    }
    Ok(initial_condition_violation(a, b, r))
}

/// The largest relation from `a` to `b` satisfying conditions (ii) and (iii).
///
/// Starts from all output-equal pairs and deletes violating pairs until a
/// fixed point. A deleted pair re-queues exactly the pairs of its
/// predecessors, and each pair remembers the last answering action per
/// left action so most re-checks succeed on the first try.
pub fn max_asr(a: &Lts, b: &Lts) -> Relation {
    let (na, nb) = (a.num_states(), b.num_states());
    let ua_count = a.num_actions();

    // Output alignment across the two systems' alphabets.
    let b_outputs: HashMap<&OutputId, usize> = b.outputs().iter().enumerate().map(|(i, y)| (y, i)).collect();
    let a_to_b_output: Vec<Option<usize>> = a.outputs().iter().map(|y| b_outputs.get(y).copied()).collect();

    let mut r = Relation::empty(na, nb);
    let mut queue = Vec::new();
    let mut queued = vec![false; na * nb];
    for xa in 0..na {
        let Some(ya) = a_to_b_output[a.output_index(xa)] else { continue };
        for xb in 0..nb {
            if b.output_index(xb) == ya {
                r.insert(xa, xb);
                queue.push((xa, xb));
                queued[xa * nb + xb] = true;
            }
        }
    }
    // Process in index order.
    queue.reverse();

    const NONE: u32 = u32::MAX;
    let mut witness = vec![NONE; na * nb * ua_count];

    while let Some((xa, xb)) = queue.pop() {
        queued[xa * nb + xb] = false;
        if !r.contains(xa, xb) {
            continue;
        }
        let mut ok = true;
        for ua in a.enabled_ix(xa) {
            let slot = (xa * nb + xb) * ua_count + ua;
            let cached = witness[slot];
            if cached != NONE && answers(a, b, &r, xa, ua, xb, cached as usize) {
                continue;
            }
            match b.enabled_ix(xb).find(|&ub| answers(a, b, &r, xa, ua, xb, ub)) {
                Some(ub) => witness[slot] = ub as u32,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            continue;
        }
        r.remove(xa, xb);
        for pa in a.predecessors_ix(xa) {
            for pb in b.predecessors_ix(xb) {
                let k = pa * nb + pb;
                if r.contains(pa, pb) && !queued[k] {
                    queued[k] = true;
                    queue.push((pa, pb));
                }
            }
        }
    }
    r
}

/// The maximal relation from `a` to `b` if it also satisfies condition (i),
/// i.e. if `b` alternatingly simulates `a`; otherwise the violation.
pub fn simulation_witness(a: &Lts, b: &Lts) -> std::result::Result<Relation, AsrViolation> {
    let r = max_asr(a, b);
    match initial_condition_violation(a, b, &r) {
        None => Ok(r),
        Some(v) => Err(v),
    }
}

/// `a ⪯ b`: some ASR from `a` to `b` exists.
pub fn simulates(a: &Lts, b: &Lts) -> bool {
    simulation_witness(a, b).is_ok()
}

/// Alternating simulation equivalence: ASRs exist in both directions.
pub fn ase_holds(a: &Lts, b: &Lts) -> bool {
    simulates(a, b) && simulates(b, a)
}

/// Alternating bisimilarity: some `R` with `R` and its inverse both ASRs.
///
/// Computed by deleting pairs from the output-equal universe until `R` and
/// `R⁻¹` both satisfy the step condition.
pub fn alternating_bisimilar(a: &Lts, b: &Lts) -> bool {
    let mut r = max_asr(a, b);
    loop {
        let mut changed = false;
        let inv = r.inverse();
        let forward_bad: Vec<_> =
            r.pairs().filter(|&(xa, xb)| step_condition_violation(a, b, &r, xa, xb).is_some()).collect();
        let backward_bad: Vec<_> =
            inv.pairs().filter(|&(xb, xa)| step_condition_violation(b, a, &inv, xb, xa).is_some()).collect();
        for (xa, xb) in forward_bad {
            changed |= r.remove(xa, xb);
        }
        for (xb, xa) in backward_bad {
            changed |= r.remove(xa, xb);
        }
        if !changed {
            break;
        }
    }
    initial_condition_violation(a, b, &r).is_none() && initial_condition_violation(b, a, &r.inverse()).is_none()
}

/// Equivalence blocks of a system's states under mutual membership in a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl Partition {
    pub(crate) fn from_blocks(blocks: Vec<Vec<usize>>) -> Self {
        let n = blocks.iter().map(Vec::len).sum();
        let mut part_of = vec![0; n];
        for (b, members) in blocks.iter().enumerate() {
            for &x in members {
                part_of[x] = b;
            }
        }
        Partition { blocks, part_of }
    }

    /// Blocks ordered by their smallest member; members ascending.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.part_of[x]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn named_blocks(&self, s: &Lts) -> Vec<Vec<StateId>> {
        self.blocks.iter().map(|b| b.iter().map(|&x| s.state(x).clone()).collect()).collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

/// Partition of `s`'s states into classes of mutually related states under
/// `mas`, which should be `max_asr(s, s)`.
pub fn as_equivalence_partition(s: &Lts, mas: &Relation) -> Partition {
    let n = s.num_states();
    let mut part_of = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for x in 0..n {
        if part_of[x] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut block = vec![x];
        part_of[x] = id;
        for (y, slot) in part_of.iter_mut().enumerate().skip(x + 1) {
            if *slot == usize::MAX && mas.mutual(x, y) {
                *slot = id;
                block.push(y);
            }
        }
        blocks.push(block);
    }
    Partition { blocks, part_of }
}
