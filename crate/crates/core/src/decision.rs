//! Decision evaluation: abduct a completion of an initial state and score it
//! against the task's goals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::learn::{Hypothesis, Solution};
use crate::state::{PartialState, Task};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbductionPolicy {
    /// Lexicographically least accepted completion.
    LexFirst,
    /// Uniformly random accepted completion.
    Uniform,
    /// Consult the attached lookup table first, then fall back to lex-first.
    ExtensionalFirst(Vec<PartialState>),
}

impl AbductionPolicy {
    pub fn extensional_first(lookup: &Solution) -> Result<Self> {
        match lookup.hypothesis() {
            Hypothesis::Lookup(states) => Ok(Self::ExtensionalFirst(states.clone())),
            Hypothesis::Sentence(_) => Err(Error::NotExtensional),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            AbductionPolicy::LexFirst => PolicyKind::LexFirst,
            AbductionPolicy::Uniform => PolicyKind::Uniform,
            AbductionPolicy::ExtensionalFirst(_) => PolicyKind::ExtensionalFirst,
        }
    }
}

/// Policy selector for configs; `ExtensionalFirst` gets its table at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    LexFirst,
    Uniform,
    ExtensionalFirst,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::LexFirst => "lex-first",
            PolicyKind::Uniform => "uniform",
            PolicyKind::ExtensionalFirst => "extensional-first",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex-first" | "lex_first" => Ok(PolicyKind::LexFirst),
            "uniform" => Ok(PolicyKind::Uniform),
            "extensional-first" | "extensional_first" => Ok(PolicyKind::ExtensionalFirst),
            _ => Err(Error::InvalidConfig(format!("unknown policy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    NoCompletion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub initial: PartialState,
    pub decision: Option<PartialState>,
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.decision {
            Some(b) => write!(f, "{} -> {}", self.initial, b)?,
            None => write!(f, "{} -> NO_COMPLETION", self.initial)?,
        }
        f.write_str(if self.success { " ok" } else { " fail" })
    }
}

/// Accepted complete supersequences of `s`, lexicographically.
fn accepted_completions(sol: &Solution, s: &PartialState) -> Result<Vec<PartialState>> {
    match sol.hypothesis() {
        Hypothesis::Sentence(h) => h.satisfying_completions(s),
        Hypothesis::Lookup(states) => Ok(lookup_hits(states, s)),
    }
}

fn lookup_hits(states: &[PartialState], s: &PartialState) -> Vec<PartialState> {
    states.iter().filter(|g| s.is_subsequence_unchecked(g)).copied().collect()
}

fn lex_first(sol: &Solution, s: &PartialState) -> Result<Option<PartialState>> {
    match sol.hypothesis() {
        Hypothesis::Sentence(h) => Ok(s
            .completion_values()?
            .find(|&v| h.accepts_values(v))
            .map(|v| PartialState::complete(s.len(), v))),
        Hypothesis::Lookup(states) => Ok(states.iter().find(|g| s.is_subsequence_unchecked(g)).copied()),
    }
}

/// Picks a complete supersequence of `s` accepted by `sol`, or `None` when there is none.
pub fn abduct<R: Rng + ?Sized>(
    sol: &Solution,
    s: &PartialState,
    policy: &AbductionPolicy,
    rng: Option<&mut R>,
) -> Result<Option<PartialState>> {
    if s.len() != sol.n() {
        return Err(Error::SpaceMismatch { left: sol.n(), right: s.len() });
    }
    match policy {
        AbductionPolicy::LexFirst => lex_first(sol, s),
        AbductionPolicy::Uniform => {
            let rng = rng.ok_or(Error::MissingRng)?;
            let options = accepted_completions(sol, s)?;
            if options.is_empty() {
                Ok(None)
            } else {
                Ok(Some(options[rng.gen_range(0..options.len())]))
            }
        }
        AbductionPolicy::ExtensionalFirst(table) => {
            if let Some(hit) = table.iter().find(|g| s.is_subsequence_unchecked(g)) {
                if hit.len() != s.len() {
                    return Err(Error::SpaceMismatch { left: s.len(), right: hit.len() });
                }
                return Ok(Some(*hit));
            }
            lex_first(sol, s)
        }
    }
}

/// One decision: abduct from `s`, succeed iff the decision is a goal of the task.
pub fn decision_trial<R: Rng + ?Sized>(
    task: &Task,
    sol: &Solution,
    s: &PartialState,
    policy: &AbductionPolicy,
    rng: Option<&mut R>,
) -> Result<Outcome> {
    if task.n() != sol.n() {
        return Err(Error::SpaceMismatch { left: task.n(), right: sol.n() });
    }
    task.space().check(s)?;
    let decision = abduct(sol, s, policy, rng)?;
    Ok(match decision {
        Some(b) => Outcome { initial: *s, decision: Some(b), success: task.is_goal(&b), failure_reason: None },
        None => Outcome {
            initial: *s,
            decision: None,
            success: false,
            failure_reason: Some(FailureReason::NoCompletion),
        },
    })
}

/// Runs every trial in `eval_set` and returns the outcomes.
pub fn decision_trials<R: Rng + ?Sized>(
    task: &Task,
    sol: &Solution,
    eval_set: &[PartialState],
    policy: &AbductionPolicy,
    mut rng: Option<&mut R>,
) -> Result<Vec<Outcome>> {
    eval_set
        .iter()
        .map(|s| decision_trial(task, sol, s, policy, rng.as_deref_mut()))
        .collect()
}

/// Fraction of `eval_set` on which a decision trial succeeds.
pub fn generalization_rate<R: Rng + ?Sized>(
    task: &Task,
    sol: &Solution,
    eval_set: &[PartialState],
    policy: &AbductionPolicy,
    rng: Option<&mut R>,
) -> Result<f64> {
    if eval_set.is_empty() {
        return Err(Error::EmptyEvalSet);
    }
    let outcomes = decision_trials(task, sol, eval_set, policy, rng)?;
    let wins = outcomes.iter().filter(|o| o.success).count();
    Ok(wins as f64 / eval_set.len() as f64)
}
