//! Time-indexed LP relaxations and randomized rounding for scheduling with the
//! total weighted completion time objective.
//!
//! The crate covers four machine environments:
//!
//! * identical machines with precedence constraints (`P|prec|ΣwC`), rounded by
//!   job-driven list scheduling over random α-point style orders ([`identical`]);
//! * the unit-size special case (`P|prec,p=1|ΣwC`), using quantile order keys;
//! * related machines with precedence constraints (`Q|prec|Cmax` and
//!   `Q|prec|ΣwC`), via speed grouping and machine-driven list scheduling
//!   ([`related`]);
//! * unrelated machines without precedence (`R||ΣwC`), via rectangle sampling,
//!   basic-block groupings and dependent rounding ([`unrelated`]).
//!
//! Every algorithm emits a [`Schedule`] that [`validate_schedule`] can check
//! bit-exactly. [`exact`] provides brute-force optima for small instances and
//! [`harness`] runs reproducible experiments that compare LP bounds, optima and
//! algorithm costs.

pub mod error;
pub mod exact;
pub mod generate;
pub mod harness;
pub mod identical;
pub mod instance;
pub mod io;
pub mod lp;
pub mod related;
pub mod seed;
pub mod unrelated;

pub use error::{Error, Result};
pub use generate::{generate, DagShape, GeneratorConfig};
pub use instance::{
    depth, intervals_to_machines, objective, validate_instance, validate_schedule, Instance,
    InstanceViolation, Interval, IntervalSet, Job, Model, PrecedenceDag, Rational, Schedule,
    ScheduleViolation, ScheduledJob,
};
pub use io::{read_instance, read_schedule, write_instance, write_schedule};
pub use lp::{
    solve_lp, BundledSimplex, FracIdentical, FracRelated, FracUnrelated, LinearProgram, LpOutcome,
    LpSolver, Relation, SolverConfig, relax_identical, relax_related_cmax, relax_related_wc,
    relax_unrelated,
};
pub use exact::{exact, ExactResult, Objective};
pub use harness::{exact_for, exact_result, run_algorithm, run_experiment, Algorithm, ExperimentConfig, ExperimentReport, RunOutcome};
pub use seed::split_seed;
