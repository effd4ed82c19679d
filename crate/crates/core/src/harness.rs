//! Sample-efficiency sweeps: paired ostensive samples, every learner fitted on
//! each, decision success measured on the task's initial states.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decision::{generalization_rate, AbductionPolicy, PolicyKind};
use crate::error::{Error, Result};
use crate::learn::{fit, fit_extensional, LearnerConfig, LearnerKind};
use crate::state::{PartialState, Task};

/// splitmix64 finalizer (Steele, Lea and Flood): golden-ratio increment
/// `0x9E3779B97F4A7C15`, then xor-shift-multiply by `0xBF58476D1CE4E5B9` and
/// `0x94D049BB133111EB` with shifts 30, 27 and 31.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a (offset `0xcbf29ce484222325`, prime `0x100000001b3`).
pub fn task_hash(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of trial `trial` at sample size `m`.
pub fn trial_seed(master: u64, task_id: &str, m: usize, trial: usize) -> u64 {
    mix64(mix64(mix64(master ^ task_hash(task_id)) ^ m as u64) ^ trial as u64)
}

/// Abduction stream of one learner within a trial.
fn learner_stream(trial_seed: u64, learner: LearnerKind) -> u64 {
    mix64(trial_seed ^ (learner as u64 + 1).wrapping_mul(0xA076_1D64_78BD_642F))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Every initial state of the task.
    FullS,
    /// Initial states the ostensive definition did not cover.
    Heldout,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::FullS => "full",
            EvalMode::Heldout => "heldout",
        })
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "full-s" | "full_s" => Ok(EvalMode::FullS),
            "heldout" | "held-out" => Ok(EvalMode::Heldout),
            _ => Err(Error::InvalidConfig(format!("unknown eval mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task_id: String,
    pub learners: Vec<LearnerKind>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub learner: LearnerConfig,
    pub policy: PolicyKind,
    pub eval_mode: EvalMode,
    pub abort_on_error: bool,
    /// Record wall-clock fit times; off keeps result files byte-reproducible.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(task_id: impl Into<String>, width: usize) -> Self {
        Self {
            task_id: task_id.into(),
            learners: LearnerKind::ALL.to_vec(),
            sizes: Vec::new(),
            trials: 1,
            seed: 0,
            learner: LearnerConfig::new(width),
            policy: PolicyKind::LexFirst,
            eval_mode: EvalMode::Heldout,
            abort_on_error: false,
            record_timing: false,
        }
    }

    pub fn validate(&self, task: &Task) -> Result<()> {
        let goals = task.goals().len();
        if self.learners.is_empty() {
            return Err(Error::InvalidConfig("no learners".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes".into()));
        }
        if let Some(m) = self.sizes.iter().find(|&&m| m == 0 || m >= goals) {
            return Err(Error::InvalidConfig(format!("sample size {m} outside 1..={}", goals - 1)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub task: String,
    pub learner: LearnerKind,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    /// `None` when the fit failed or there was nothing to evaluate.
    pub rate: Option<f64>,
    pub weakness: Option<u64>,
    pub exact: bool,
    pub fit_ms: f64,
}

pub const CSV_HEADER: &str = "task,learner,m,trial,seed,rate,weakness,exact,fit_ms";

fn eval_set(task: &Task, observed: &[PartialState], mode: EvalMode) -> Vec<PartialState> {
    match mode {
        EvalMode::FullS => task.initials().to_vec(),
        EvalMode::Heldout => task
            .initials()
            .iter()
            .filter(|s| observed.binary_search(s).is_err())
            .copied()
            .collect(),
    }
}

fn run_trial(task: &Task, cfg: &ExperimentConfig, m: usize, trial: usize) -> Result<Vec<CurvePoint>> {
    let seed = trial_seed(cfg.seed, &cfg.task_id, m, trial);
    let o = task.sample_ostensive(m, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let evals = eval_set(task, o.initials(), cfg.eval_mode);
    let lookup = fit_extensional(&o);

    let mut points = Vec::with_capacity(cfg.learners.len());
    for &learner in &cfg.learners {
        let mut point = CurvePoint {
            task: cfg.task_id.clone(),
            learner,
            m,
            trial,
            seed,
            rate: None,
            weakness: None,
            exact: false,
            fit_ms: 0.0,
        };
        let sol = match fit(learner, &o, &cfg.learner) {
            Ok(sol) => sol,
            Err(e) if cfg.abort_on_error => return Err(e),
            Err(_) => {
                points.push(point);
                continue;
            }
        };
        let policy = match cfg.policy {
            PolicyKind::LexFirst => AbductionPolicy::LexFirst,
            PolicyKind::Uniform => AbductionPolicy::Uniform,
            PolicyKind::ExtensionalFirst => AbductionPolicy::extensional_first(&lookup)?,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(learner_stream(seed, learner));
        point.rate = match generalization_rate(task, &sol, &evals, &policy, Some(&mut rng)) {
            Ok(rate) => Some(rate),
            Err(Error::EmptyEvalSet) => None,
            Err(e) => return Err(e),
        };
        point.weakness = Some(sol.weakness());
        point.exact = sol.is_exact(&o)?;
        if cfg.record_timing {
            point.fit_ms = sol.provenance().fit_ms;
        }
        points.push(point);
    }
    Ok(points)
}

/// Runs every `(m, trial)` pair; rows come back ordered by m, trial, learner.
pub fn run_curve(task: &Task, cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate(task)?;
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let rows: Vec<Vec<CurvePoint>> = jobs
        .par_iter()
        .map(|&(m, trial)| run_trial(task, cfg, m, trial))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let rate = p.rate.map(|r| format!("{r:.6}")).unwrap_or_default();
        let weakness = p.weakness.map(|w| w.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            p.task, p.learner, p.m, p.trial, p.seed, rate, weakness, p.exact, p.fit_ms
        )
        .unwrap();
    }
    out
}

pub const DEFAULT_EPSILON: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceRow {
    pub m: usize,
    pub comparator: LearnerKind,
    pub pairs: usize,
    pub mean_intensional: f64,
    pub mean_comparator: f64,
    pub pass: bool,
}

impl DominanceRow {
    pub fn difference(&self) -> f64 {
        self.mean_intensional - self.mean_comparator
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub epsilon: f64,
    pub rows: Vec<DominanceRow>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

impl fmt::Display for DominanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "m={} vs {}: intensional={:.6} {}={:.6} diff={:+.6} pairs={} {}",
                r.m,
                r.comparator,
                r.mean_intensional,
                r.comparator,
                r.mean_comparator,
                r.difference(),
                r.pairs,
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "verdict: {} (epsilon {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.epsilon
        )
    }
}

/// Per-m mean rates of the intensional learner against each other learner,
/// paired by trial seed. A failed fit counts as rate 0 when its partner has a rate.
pub fn dominance_report(points: &[CurvePoint], epsilon: f64) -> Result<DominanceReport> {
    let Some(first) = points.first() else {
        return Err(Error::MismatchedRuns("no results".into()));
    };
    if let Some(p) = points.iter().find(|p| p.task != first.task) {
        return Err(Error::MismatchedRuns(format!("tasks {} and {} mixed", first.task, p.task)));
    }
    let mut by_key: BTreeMap<(usize, usize, u64), BTreeMap<LearnerKind, Option<f64>>> =
        BTreeMap::new();
    for p in points {
        by_key.entry((p.m, p.trial, p.seed)).or_default().insert(p.learner, p.rate);
    }
    let comparators: Vec<LearnerKind> = [LearnerKind::Strongest, LearnerKind::Extensional]
        .into_iter()
        .filter(|k| points.iter().any(|p| p.learner == *k))
        .collect();
    if !points.iter().any(|p| p.learner == LearnerKind::Intensional) || comparators.is_empty() {
        return Err(Error::MismatchedRuns(
            "need intensional results and at least one comparator".into(),
        ));
    }

    let mut sizes: Vec<usize> = points.iter().map(|p| p.m).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = Vec::new();
    for &m in &sizes {
        for &comparator in &comparators {
            let (mut sum_i, mut sum_c, mut pairs) = (0.0, 0.0, 0usize);
            for ((km, trial, _), learners) in by_key.range((m, 0, 0)..=(m, usize::MAX, u64::MAX)) {
                debug_assert_eq!(*km, m);
                let (Some(ri), Some(rc)) =
                    (learners.get(&LearnerKind::Intensional), learners.get(&comparator))
                else {
                    return Err(Error::MismatchedRuns(format!(
                        "m={m} trial={trial} lacks a paired intensional/{comparator} result"
                    )));
                };
                if ri.is_none() && rc.is_none() {
                    continue;
                }
                sum_i += ri.unwrap_or(0.0);
                sum_c += rc.unwrap_or(0.0);
                pairs += 1;
            }
            let (mean_i, mean_c) = if pairs == 0 {
                (0.0, 0.0)
            } else {
                (sum_i / pairs as f64, sum_c / pairs as f64)
            };
            rows.push(DominanceRow {
                m,
                comparator,
                pairs,
                mean_intensional: mean_i,
                mean_comparator: mean_c,
                pass: mean_i >= mean_c - epsilon,
            });
        }
    }
    Ok(DominanceReport { epsilon, rows })
}

/// What the worst-case (random goal set) experiment checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracySummary {
    /// Trials where both the intensional and strongest fits were exact.
    pub feasible_trials: usize,
    /// Of those, trials where their weaknesses differ.
    pub weakness_mismatches: usize,
    /// Mean rate per learner over trials with a rate.
    pub mean_rates: BTreeMap<LearnerKind, f64>,
}

impl DegeneracySummary {
    pub fn from_points(points: &[CurvePoint]) -> Self {
        let mut pairs: BTreeMap<(usize, usize, u64), [Option<&CurvePoint>; 2]> = BTreeMap::new();
        let mut sums: BTreeMap<LearnerKind, (f64, usize)> = BTreeMap::new();
        for p in points {
            let slot = match p.learner {
                LearnerKind::Intensional => Some(0),
                LearnerKind::Strongest => Some(1),
                LearnerKind::Extensional => None,
            };
            if let Some(i) = slot {
                pairs.entry((p.m, p.trial, p.seed)).or_default()[i] = Some(p);
            }
            if let Some(r) = p.rate {
                let e = sums.entry(p.learner).or_default();
                e.0 += r;
                e.1 += 1;
            }
        }
        let mut feasible_trials = 0;
        let mut weakness_mismatches = 0;
        for [i, s] in pairs.values() {
            if let (Some(i), Some(s)) = (i, s) {
                if i.exact && s.exact {
                    feasible_trials += 1;
                    if i.weakness != s.weakness {
                        weakness_mismatches += 1;
                    }
                }
            }
        }
        let mean_rates = sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect();
        Self { feasible_trials, weakness_mismatches, mean_rates }
    }

    /// Largest gap between any two learners' mean rates.
    pub fn rate_spread(&self) -> f64 {
        let rates: Vec<f64> = self.mean_rates.values().copied().collect();
        let max = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
        if rates.is_empty() {
            0.0
        } else {
            max - min
        }
    }
}
