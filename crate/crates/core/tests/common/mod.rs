//! Independent reference implementations used to cross-check the library.
//! These favour obviousness over speed and share no code with the crate's
//! algorithms beyond the `Lts` accessors.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use asemin::random::random_traffic_spec;
use asemin::{add_init_phase, petc_traffic_model, Lts, LtsBuilder};
use rand::Rng;

pub type PairSet = BTreeSet<(usize, usize)>;

/// Conditions (ii) and (iii) for every pair of `r`.
pub fn is_step_closed(a: &Lts, b: &Lts, r: &PairSet) -> bool {
    r.iter().all(|&(xa, xb)| {
        a.output(xa) == b.output(xb)
            && a.enabled_ix(xa).all(|ua| {
                b.enabled_ix(xb).any(|ub| {
                    b.post_ix(xb, ub).iter().all(|&yb| a.post_ix(xa, ua).iter().any(|&ya| r.contains(&(ya, yb))))
                })
            })
    })
}

/// Union of every relation satisfying (ii) and (iii), by enumerating all
/// subsets of output-equal pairs.
pub fn brute_force_max_asr(a: &Lts, b: &Lts) -> PairSet {
    let candidates: Vec<(usize, usize)> = (0..a.num_states())
        .flat_map(|xa| (0..b.num_states()).map(move |xb| (xa, xb)))
        .filter(|&(xa, xb)| a.output(xa) == b.output(xb))
        .collect();
    assert!(candidates.len() <= 16, "oracle is exponential in the number of pairs");
    let mut union = PairSet::new();
    for mask in 0u32..(1 << candidates.len()) {
        let r: PairSet = candidates.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        if is_step_closed(a, b, &r) {
            union.extend(r);
        }
    }
    union
}

pub fn relation_pairs(r: &asemin::Relation) -> PairSet {
    r.pairs().collect()
}

/// Reflexive-transitive closure of `edges` over `0..n`.
pub fn closure(n: usize, edges: &[(usize, usize)]) -> PairSet {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(i, j) in edges {
        reach[i][j] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (cell, &r) in row.iter_mut().zip(&via) {
                *cell |= r;
            }
        }
    }
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| reach[i][j]).collect()
}

/// Builds the system with `n` states, `m` actions, outputs from `outputs`
/// and a transition bitmask over `(x, u, y)` in row-major order.
pub fn system_from_bits(n: usize, m: usize, outputs: &[&str], output_bits: u32, transition_bits: u64) -> Lts {
    let mut b = LtsBuilder::new();
    for y in outputs {
        b.output(*y);
    }
    for u in 0..m {
        b.action(format!("a{u}"));
    }
    for x in 0..n {
        b.state(format!("x{x}"), outputs[((output_bits >> x) & 1) as usize]);
    }
    b.initial("x0");
    for x in 0..n {
        for u in 0..m {
            for y in 0..n {
                if transition_bits >> ((x * m + u) * n + y) & 1 == 1 {
                    b.transition(format!("x{x}"), format!("a{u}"), format!("x{y}"));
                }
            }
        }
    }
    b.build().unwrap()
}

/// Controller wins from `x` in the safety game iff it can stay out of `bad`
/// for `k` steps, computed by depth-bounded minimax. With `k = |X|` this is
/// the winning region.
pub struct GameOracle<'a, P> {
    game: &'a Lts,
    bad: P,
    memo: HashMap<(usize, usize), bool>,
}

impl<'a, P: Fn(usize) -> bool> GameOracle<'a, P> {
    pub fn new(game: &'a Lts, bad: P) -> Self {
        Self { game, bad, memo: HashMap::new() }
    }

    pub fn wins(&mut self, x: usize, k: usize) -> bool {
        if (self.bad)(x) {
            return false;
        }
        if let Some(&w) = self.memo.get(&(x, k)) {
            return w;
        }
        let actions: Vec<usize> = self.game.enabled_ix(x).collect();
        let w = !actions.is_empty()
            && (k == 0
                || actions.into_iter().any(|u| {
                    let post = self.game.post_ix(x, u).to_vec();
                    post.into_iter().all(|y| self.wins(y, k - 1))
                }));
        self.memo.insert((x, k), w);
        w
    }

    pub fn winning_region(&mut self) -> BTreeSet<usize> {
        let n = self.game.num_states();
        (0..n).filter(|&x| self.wins(x, n)).collect()
    }
}

/// Counts `T` components in a composed output.
pub fn transmitting(output: &str) -> usize {
    output.split('|').filter(|&y| y == "T").count()
}

/// A full traffic model of a random spec (up to 3 regions, clocks up to 4),
/// started by an initialization chain of 1 to 3 steps.
pub fn petc_component<R: Rng>(rng: &mut R) -> Lts {
    let spec = random_traffic_spec(rng, 3, 4);
    let t0 = rng.random_range(1..=3);
    add_init_phase(&petc_traffic_model(&spec).unwrap(), &spec, t0).unwrap()
}
