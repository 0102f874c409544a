use thiserror::Error;

use crate::instance::InstanceViolation;
use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precedence graph contains a cycle")]
    Cycle,

    #[error("congestion exceeded: more than {machines} intervals cover time {time}")]
    CongestionExceeded { machines: usize, time: i64 },

    #[error("invalid instance: {}", format_violations(.0))]
    InvalidInstance(Vec<InstanceViolation>),

    #[error("operation requires a {expected} instance, got {found}")]
    WrongModel {
        expected: &'static str,
        found: &'static str,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid generator configuration: {0}")]
    Generator(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("solution too infeasible: {0}")]
    TooInfeasible(String),

    #[error("order keys violate precedence {from} -> {to} ({key_from} > {key_to})")]
    OrderContract {
        from: usize,
        to: usize,
        key_from: f64,
        key_to: f64,
    },

    #[error("theta = {theta} outside {range}")]
    ThetaOutOfRange { theta: f64, range: &'static str },

    #[error("unit-size algorithm called on job {job} with size {size}")]
    NonUnitSize { job: usize, size: i64 },

    #[error("job {job} has no fractional mass")]
    EmptyJob { job: usize },

    #[error("job {job} is assigned to an empty machine group")]
    EmptyGroup { job: usize },

    #[error("instance has {n} jobs, exact search is capped at {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("makespan certificate violated: makespan {makespan} > bound {bound}")]
    CertificateViolated { makespan: f64, bound: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[InstanceViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
