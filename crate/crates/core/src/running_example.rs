//! The two-region PETC traffic model used throughout the documentation and
//! tests, along with the intermediate systems produced by each reduction step.
//!
//! State `qR,C` is region `qR` at clock `C`; `Q` in the quotient stands for the
//! merged block `q1,3+q1,4`.

use crate::lts::{Lts, LtsBuilder};
use crate::petc::TrafficSpec;

type Edge<'a> = (&'a str, &'a str, &'a str);

fn build(states: &[(&str, &str)], initial: &[&str], edges: &[Edge<'_>]) -> Lts {
    let mut b = LtsBuilder::new();
    b.action("s").action("w");
    for &(x, y) in states {
        b.state(x, y);
    }
    for &x in initial {
        b.initial(x);
    }
    for &(x, u, y) in edges {
        b.transition(x, u, y);
    }
    b.build().expect("running example is well-formed")
}

const FIG1_STATES: [(&str, &str); 6] =
    [("q0,1", "T"), ("q0,2", "W"), ("q1,1", "T"), ("q1,2", "W"), ("q1,3", "W"), ("q1,4", "W")];

/// Traffic model with scheduler actions: 6 states, 2 initial, 15 transitions.
pub fn fig1() -> Lts {
    build(
        &FIG1_STATES,
        &["q0,1", "q1,1"],
        &[
            ("q0,1", "w", "q0,2"),
            ("q0,1", "s", "q0,1"),
            ("q0,2", "w", "q0,1"),
            ("q0,2", "s", "q0,1"),
            ("q0,2", "w", "q1,1"),
            ("q0,2", "s", "q1,1"),
            ("q1,1", "w", "q1,2"),
            ("q1,1", "s", "q1,1"),
            ("q1,2", "s", "q1,1"),
            ("q1,2", "w", "q1,3"),
            ("q1,3", "w", "q1,4"),
            ("q1,3", "w", "q1,1"),
            ("q1,3", "s", "q1,1"),
            ("q1,4", "w", "q1,1"),
            ("q1,4", "s", "q1,1"),
        ],
    )
}

pub const MERGED_BLOCK: &str = "q1,3+q1,4";

const QUOTIENT_STATES: [(&str, &str); 5] =
    [("q0,1", "T"), ("q0,2", "W"), ("q1,1", "T"), ("q1,2", "W"), (MERGED_BLOCK, "W")];

/// After the quotient step. The merged block keeps the moves of `q1,4`.
pub fn fig3a() -> Lts {
    build(
        &QUOTIENT_STATES,
        &["q0,1", "q1,1"],
        &[
            ("q0,1", "w", "q0,2"),
            ("q0,1", "s", "q0,1"),
            ("q0,2", "w", "q0,1"),
            ("q0,2", "s", "q0,1"),
            ("q0,2", "w", "q1,1"),
            ("q0,2", "s", "q1,1"),
            ("q1,1", "w", "q1,2"),
            ("q1,1", "s", "q1,1"),
            ("q1,2", "s", "q1,1"),
            ("q1,2", "w", MERGED_BLOCK),
            (MERGED_BLOCK, "w", "q1,1"),
            (MERGED_BLOCK, "s", "q1,1"),
        ],
    )
}

/// After removing irrational and redundant controller actions.
pub fn fig3b() -> Lts {
    build(
        &QUOTIENT_STATES,
        &["q0,1", "q1,1"],
        &[
            ("q0,1", "w", "q0,2"),
            ("q0,1", "s", "q0,1"),
            ("q0,2", "s", "q0,1"),
            ("q0,2", "s", "q1,1"),
            ("q1,1", "w", "q1,2"),
            ("q1,1", "s", "q1,1"),
            ("q1,2", "s", "q1,1"),
            ("q1,2", "w", MERGED_BLOCK),
            (MERGED_BLOCK, "s", "q1,1"),
        ],
    )
}

/// After removing younger-sibling transitions and initial states.
pub fn fig3c() -> Lts {
    build(
        &QUOTIENT_STATES,
        &["q0,1"],
        &[
            ("q0,1", "w", "q0,2"),
            ("q0,1", "s", "q0,1"),
            ("q0,2", "s", "q0,1"),
            ("q1,1", "w", "q1,2"),
            ("q1,1", "s", "q1,1"),
            ("q1,2", "s", "q1,1"),
            ("q1,2", "w", MERGED_BLOCK),
            (MERGED_BLOCK, "s", "q1,1"),
        ],
    )
}

/// The minimal system: 2 states, 1 initial, 3 transitions.
pub fn fig5() -> Lts {
    build(
        &[("q0,1", "T"), ("q0,2", "W")],
        &["q0,1"],
        &[("q0,1", "w", "q0,2"), ("q0,1", "s", "q0,1"), ("q0,2", "s", "q0,1")],
    )
}

/// Reduced (earliest-trigger, scheduler-only sampling) model of [`fig1`].
pub fn fig7() -> Lts {
    build(
        &FIG1_STATES[..5],
        &["q0,1", "q1,1"],
        &[
            ("q0,1", "w", "q0,2"),
            ("q0,1", "s", "q0,1"),
            ("q0,2", "s", "q0,1"),
            ("q0,2", "s", "q1,1"),
            ("q1,1", "w", "q1,2"),
            ("q1,1", "s", "q1,1"),
            ("q1,2", "s", "q1,1"),
            ("q1,2", "w", "q1,3"),
            ("q1,3", "s", "q1,1"),
        ],
    )
}

/// Pairs drawn in the maximal-relation diagram, before reflexive and
/// transitive closure.
pub const MAS_DIAGRAM_EDGES: [(&str, &str); 7] = [
    ("q0,1", "q1,1"),
    ("q0,2", "q1,3"),
    ("q0,2", "q1,4"),
    ("q1,3", "q1,4"),
    ("q1,4", "q1,3"),
    ("q1,3", "q1,2"),
    ("q1,4", "q1,2"),
];

/// Region data that generates [`fig1`]: `q0` triggers at exactly 2 steps,
/// `q1` anywhere in 3..=4; both regions start freshly sampled.
pub fn fig1_spec() -> TrafficSpec {
    let mut spec = TrafficSpec::new();
    spec.add_region("q0", 2, 2, true);
    spec.add_region("q1", 3, 4, true);
    for (q, tau, q2) in [
        ("q0", 1, "q0"),
        ("q0", 2, "q0"),
        ("q0", 2, "q1"),
        ("q1", 1, "q1"),
        ("q1", 2, "q1"),
        ("q1", 3, "q1"),
        ("q1", 4, "q1"),
    ] {
        spec.add_transition(q, tau, q2);
    }
    spec
}

/// Single region with a fixed two-step deadline; its reduced model is [`fig5`].
pub fn single_region_spec() -> TrafficSpec {
    let mut spec = TrafficSpec::new();
    spec.add_region("q0", 2, 2, true);
    spec.add_transition("q0", 1, "q0");
    spec.add_transition("q0", 2, "q0");
    spec
}
