use thiserror::Error;

use crate::lts::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("invalid transition system: {}", join(.0))]
    InvalidLts(Vec<Violation>),

    #[error("malformed relation: {0}")]
    MalformedRelation(String),

    #[error("invalid traffic spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("initial states outside the reduced state set: {}", .0.join(", "))]
    InitialOutsideReduced(Vec<String>),

    #[error("cannot compose: {0}")]
    Compose(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scheduler contract violation: {0}")]
    ContractViolation(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
