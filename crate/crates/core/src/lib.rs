//! Auditing and constructing fair risk assignments for two-group populations.
//!
//! The crate models a population as feature vectors with group masses and a
//! shared positive-class rate, scores it with a (possibly fractional)
//! assignment to bins, and checks three conditions: calibration within
//! groups, balance for the positive class, and balance for the negative class.
//! Arithmetic is exact over [`Rational`] throughout; an `f64` backend exists for
//! instances with irrational rates.
//!
//! Modules:
//!
//! * [`model`]: instances, assignments, ingestion from labelled rows.
//! * [`audit`]: exact and eps-approximate audits, parity gap, slack function.
//! * [`construct`]: loss, identity/trivial assignments, interpolation.
//! * [`integral`]: set-partition enumeration and the integral solver.
//! * [`reduction`]: Subset Sum reduction with exact verification.
//! * [`sweep`]: seeded searches for counterexamples to the impossibility results.

pub mod audit;
pub mod construct;
pub mod error;
pub mod integral;
pub mod model;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod surd;
pub mod sweep;

pub use audit::{
    audit_approx, audit_exact, bin_statistics, classify_consequence, f_epsilon,
    statistical_parity_gap, ApproxAuditReport, AuditReport, Balance, BinStats, Consequence, Slack,
};
pub use construct::{
    fairness_difference, find_fair_nontrivial, identity_assignment, interpolate, loss,
    target_lambda, trivial_assignment, FairnessDifference, Favors, LossReport,
};
pub use error::{Error, Result};
pub use integral::{
    assignment_from_partition, bell_number, enumerate_partitions, solve_integral, Objective,
    Partition, SolveOptions, SolveResult, SolveStatus,
};
pub use model::{
    derived_stats, ingest_records, split_by_group, validate_instance, DivergenceReport,
    FeatureVector, Group, GroupStats, Instance, Record, RecordTable, RiskAssignment,
    ValidationReport,
};
pub use reduction::{
    check_reduction_equation, decode_partition, encode_solution, reduce_subset_sum,
    sum_of_squares_identity, ReducedInstance, SubsetSumInstance,
};
pub use scalar::{Rational, Scalar};
pub use surd::Surd;
pub use sweep::{approx_sweep, theorem_sweep, ApproxSweep, SweepBudget, SweepReport};
