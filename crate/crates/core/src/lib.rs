//! Concept induction from positive examples over partial binary states.
//!
//! A [`Task`] is a set of complete goal states plus decision frames. Learners see
//! an [`OstensiveDefinition`] (a sample of goals) and produce a [`Solution`]:
//!
//! * `extensional`: the lookup table of observed goals;
//! * `strongest`: every width-bounded clause true on the observed goals;
//! * `intensional`: the exact sentence with the largest model count.
//!
//! Solutions are scored by abducting completions of initial states and checking
//! them against the goal set.

pub mod decision;
pub mod error;
pub mod format;
pub mod harness;
pub mod learn;
pub mod logic;
pub mod selftest;
pub mod state;
pub mod suite;

pub use decision::{abduct, decision_trial, generalization_rate, AbductionPolicy, Outcome, PolicyKind};
pub use error::{Error, Result};
pub use format::{read_task, write_task};
pub use harness::{dominance_report, run_curve, write_csv, CurvePoint, EvalMode, ExperimentConfig};
pub use learn::{
    fit, fit_extensional, fit_intensional, fit_strongest, is_exact, observed_frame, weakness_of,
    InfeasibilityMode, LearnerConfig, LearnerKind, Solution,
};
pub use logic::{clause_universe, Clause, Literal, Sentence, Truth};
pub use state::{OstensiveDefinition, PartialState, Task, VariableSpace};
