//! Minimization of labelled transition systems modulo alternating simulation
//! equivalence (ASE), with the traffic models of periodic event-triggered
//! control loops and a safety-game scheduler built on top.
//!
//! A transition system ([`Lts`]) is read as a two-player game: the controller
//! picks an action, the environment picks the initial state and which
//! transition under that action is taken. Two systems are ASE when each
//! alternatingly simulates the other, which means a controller enforcing an
//! output-based specification exists for one iff it exists for the other.
//! [`minimize`] returns the smallest such system, unique up to [`find_babi`].
//!
//! ```
//! use asemin::{ase_holds, minimize, running_example};
//!
//! let s = running_example::fig1();
//! let (m, trace) = minimize(&s);
//! assert_eq!((m.num_states(), m.initial().len(), m.num_transitions()), (2, 1, 3));
//! assert_eq!(trace.original.n_transitions, 15);
//! assert!(ase_holds(&s, &m));
//! ```

pub mod alt_sim;
pub mod babi;
pub mod error;
pub mod game;
pub mod io;
pub mod lts;
pub mod minimize;
pub mod petc;
pub mod random;
pub mod running_example;
pub mod symbol;

pub use alt_sim::{
    alternating_bisimilar, ase_holds, as_equivalence_partition, is_asr, max_asr, simulates, AsrViolation, Partition,
    Relation,
};
pub use babi::{find_babi, Babi};
pub use error::{Error, Result};
pub use game::{
    collision_predicate, compose, refine_strategy, schedule, solve_safety, CollisionPredicate, GameResult,
    RefinedScheduler, Schedule, Scheduler,
};
pub use lts::{validate, Lts, LtsBuilder, LtsDescription, SizeTriple, Violation};
pub use minimize::{check_n_conditions, minimize, minimize_stages, NConditionReport, ReductionTrace};
pub use petc::{add_init_phase, petc_reduced_model, petc_traffic_model, TrafficSpec};
pub use symbol::{ActionId, OutputId, StateId};
