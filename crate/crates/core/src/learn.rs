//! Extensional, strongest and intensional learners over an ostensive definition.
//!
//! Exactness is judged in a closed world: the completions of the observed initial
//! states. A sentence is exact when, among those completions, it accepts precisely
//! the observed goals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result, MAX_VARS};
use crate::logic::{for_each_clause, Clause, Sentence, Truth};
use crate::state::{OstensiveDefinition, PartialState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LearnerKind {
    Intensional,
    Strongest,
    Extensional,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 3] =
        [LearnerKind::Intensional, LearnerKind::Strongest, LearnerKind::Extensional];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Intensional => "intensional",
            LearnerKind::Strongest => "strongest",
            LearnerKind::Extensional => "extensional",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intensional" => Ok(LearnerKind::Intensional),
            "strongest" => Ok(LearnerKind::Strongest),
            "extensional" => Ok(LearnerKind::Extensional),
            _ => Err(Error::InvalidConfig(format!("unknown learner {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibilityMode {
    Error,
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerConfig {
    pub width: usize,
    /// Largest candidate-clause count searched exhaustively.
    pub exhaustive_threshold: usize,
    pub infeasibility: InfeasibilityMode,
}

impl LearnerConfig {
    pub const DEFAULT_THRESHOLD: usize = 18;
    /// A subset table of `2^threshold` entries must fit in memory.
    pub const MAX_THRESHOLD: usize = 22;

    pub fn new(width: usize) -> Self {
        Self {
            width,
            exhaustive_threshold: Self::DEFAULT_THRESHOLD,
            infeasibility: InfeasibilityMode::Error,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables { n, limit: MAX_VARS });
        }
        if self.width == 0 || self.width > n {
            return Err(Error::BadWidth(format!("width {} outside 1..={n}", self.width)));
        }
        if self.exhaustive_threshold > Self::MAX_THRESHOLD {
            return Err(Error::InvalidConfig(format!(
                "exhaustive threshold {} above {}",
                self.exhaustive_threshold,
                Self::MAX_THRESHOLD
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub learner: LearnerKind,
    pub width: Option<usize>,
    pub fit_ms: f64,
    pub search: Option<SearchMode>,
    /// Candidate clauses entering the weakening search.
    pub candidates: usize,
    /// Observed non-goals still accepted (best-effort fits only).
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    Sentence(Sentence),
    /// Sorted set of complete states.
    Lookup(Vec<PartialState>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    n: usize,
    kind: LearnerKind,
    hypothesis: Hypothesis,
    weakness: u64,
    provenance: Provenance,
}

impl Solution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn hypothesis(&self) -> &Hypothesis {
        &self.hypothesis
    }

    pub fn sentence(&self) -> Option<&Sentence> {
        match &self.hypothesis {
            Hypothesis::Sentence(s) => Some(s),
            Hypothesis::Lookup(_) => None,
        }
    }

    pub fn lookup(&self) -> Option<&[PartialState]> {
        match &self.hypothesis {
            Hypothesis::Sentence(_) => None,
            Hypothesis::Lookup(states) => Some(states),
        }
    }

    pub fn weakness(&self) -> u64 {
        self.weakness
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Whether the solution accepts `state`; partial states count only when the
    /// sentence is already true on them.
    pub fn accepts(&self, state: &PartialState) -> bool {
        match &self.hypothesis {
            Hypothesis::Sentence(h) => h.eval(state).map(|t| t == Truth::True).unwrap_or(false),
            Hypothesis::Lookup(states) => states.binary_search(state).is_ok(),
        }
    }

    /// True iff the solution accepts precisely the observed goals within the observed frame.
    pub fn is_exact(&self, o: &OstensiveDefinition) -> Result<bool> {
        if o.n() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: o.n() });
        }
        Ok(observed_frame(o)?.iter().all(|c| self.accepts(c) == o.contains_goal(c)))
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.provenance;
        write!(f, "# learner={} weakness={}", self.kind, self.weakness)?;
        if let Some(w) = p.width {
            write!(f, " width={w}")?;
        }
        if let Some(mode) = p.search {
            let mode = match mode {
                SearchMode::Exhaustive => "exhaustive",
                SearchMode::Greedy => "greedy",
            };
            write!(f, " search={mode} candidates={}", p.candidates)?;
        }
        if p.violations > 0 {
            write!(f, " violations={}", p.violations)?;
        }
        writeln!(f, " fit_ms={:.3}", p.fit_ms)?;
        match &self.hypothesis {
            Hypothesis::Sentence(h) => write!(f, "{h}"),
            Hypothesis::Lookup(states) => {
                for (i, s) in states.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
        }
    }
}

/// Recomputes a solution's weakness from its hypothesis.
pub fn weakness_of(sol: &Solution) -> Result<u64> {
    match &sol.hypothesis {
        Hypothesis::Sentence(h) => h.count_models(),
        Hypothesis::Lookup(states) => Ok(states.len() as u64),
    }
}

/// Every completion of every observed initial state, sorted.
pub fn observed_frame(o: &OstensiveDefinition) -> Result<Vec<PartialState>> {
    let mut out = Vec::new();
    for s in o.initials() {
        out.extend(s.completions()?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Exactness of a bare sentence against an ostensive definition.
pub fn is_exact(h: &Sentence, o: &OstensiveDefinition) -> Result<bool> {
    if h.n() != o.n() {
        return Err(Error::SpaceMismatch { left: h.n(), right: o.n() });
    }
    for s in o.initials() {
        for v in s.completion_values()? {
            let c = PartialState::complete(o.n(), v);
            if h.accepts_values(v) != o.contains_goal(&c) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn fit(kind: LearnerKind, o: &OstensiveDefinition, cfg: &LearnerConfig) -> Result<Solution> {
    match kind {
        LearnerKind::Intensional => fit_intensional(o, cfg),
        LearnerKind::Strongest => fit_strongest(o, cfg),
        LearnerKind::Extensional => Ok(fit_extensional(o)),
    }
}

/// The lookup table of observed goals.
pub fn fit_extensional(o: &OstensiveDefinition) -> Solution {
    let start = Instant::now();
    let states = o.sample().to_vec();
    Solution {
        n: o.n(),
        kind: LearnerKind::Extensional,
        weakness: states.len() as u64,
        hypothesis: Hypothesis::Lookup(states),
        provenance: Provenance {
            learner: LearnerKind::Extensional,
            width: None,
            fit_ms: elapsed_ms(start),
            search: None,
            candidates: 0,
            violations: 0,
        },
    }
}

/// Every clause of the language that holds on all observed goals.
pub fn strongest_clauses(o: &OstensiveDefinition, width: usize) -> Result<Vec<Clause>> {
    let goals: Vec<u32> = o.sample().iter().map(|g| g.values()).collect();
    let mut out = Vec::new();
    for_each_clause(o.n(), width, |c| {
        if goals.iter().all(|&g| c.satisfied_by(g)) {
            out.push(c);
        }
    })?;
    Ok(out)
}

pub fn fit_strongest(o: &OstensiveDefinition, cfg: &LearnerConfig) -> Result<Solution> {
    cfg.check(o.n())?;
    let start = Instant::now();
    let h = Sentence::new(o.n(), cfg.width, strongest_clauses(o, cfg.width)?)?;
    let weakness = h.count_models()?;
    Ok(Solution {
        n: o.n(),
        kind: LearnerKind::Strongest,
        hypothesis: Hypothesis::Sentence(h),
        weakness,
        provenance: Provenance {
            learner: LearnerKind::Strongest,
            width: Some(cfg.width),
            fit_ms: elapsed_ms(start),
            search: None,
            candidates: 0,
            violations: 0,
        },
    })
}

/// The weakest exact sentence of the width-bounded language.
pub fn fit_intensional(o: &OstensiveDefinition, cfg: &LearnerConfig) -> Result<Solution> {
    cfg.check(o.n())?;
    let start = Instant::now();
    let n = o.n();
    let all = strongest_clauses(o, cfg.width)?;

    let negatives: Vec<u32> = observed_frame(o)?
        .into_iter()
        .filter(|c| !o.contains_goal(c))
        .map(|c| c.values())
        .collect();
    let rejected_by_some: Vec<bool> = negatives
        .iter()
        .map(|&z| all.iter().any(|c| !c.satisfied_by(z)))
        .collect();
    let violations = rejected_by_some.iter().filter(|r| !**r).count();
    if violations > 0 && cfg.infeasibility == InfeasibilityMode::Error {
        return Err(Error::ExactnessInfeasible { width: cfg.width, violations });
    }
    // Best effort keeps every rejectable negative rejected and weakens around that.
    let negatives: Vec<u32> = negatives
        .into_iter()
        .zip(rejected_by_some)
        .filter_map(|(z, r)| r.then_some(z))
        .collect();

    let candidates: Vec<Clause> = all
        .into_iter()
        .filter(|c| negatives.iter().any(|&z| !c.satisfied_by(z)))
        .collect();

    let (mode, kept) = if candidates.len() <= cfg.exhaustive_threshold {
        (SearchMode::Exhaustive, exhaustive_weakest(n, &candidates, &negatives))
    } else {
        (SearchMode::Greedy, greedy_weakening(n, &candidates, &negatives)?)
    };
    let h = Sentence::new(n, cfg.width, kept)?;
    let weakness = h.count_models()?;
    Ok(Solution {
        n,
        kind: LearnerKind::Intensional,
        hypothesis: Hypothesis::Sentence(h),
        weakness,
        provenance: Provenance {
            learner: LearnerKind::Intensional,
            width: Some(cfg.width),
            fit_ms: elapsed_ms(start),
            search: Some(mode),
            candidates: candidates.len(),
            violations,
        },
    })
}

/// Mask of the candidates (by position) that reject `z`.
fn rejecting_mask(candidates: &[Clause], z: u32) -> usize {
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.satisfied_by(z))
        .fold(0usize, |m, (i, _)| m | 1 << i)
}

/// In-place subset-sum transform: `table[u]` becomes the sum over all `m ⊆ u`.
fn subset_sums(table: &mut [u64], bits: usize) {
    for b in 0..bits {
        let bit = 1usize << b;
        for u in 0..table.len() {
            if u & bit != 0 {
                table[u] += table[u ^ bit];
            }
        }
    }
}

/// Canonical order between two candidate subsets of equal size: compare the
/// ascending index sequences.
fn canonical_cmp(a: usize, b: usize) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let low = (a ^ b).trailing_zeros();
    // whichever subset holds the first differing index sorts first
    if a >> low & 1 == 1 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn exhaustive_weakest(n: usize, candidates: &[Clause], negatives: &[u32]) -> Vec<Clause> {
    let c = candidates.len();
    let full = (1usize << c) - 1;
    // histograms of rejecting-masks over the whole space and over the negatives
    let mut all_hist = vec![0u64; 1 << c];
    for z in 0..(1u32 << n) {
        all_hist[rejecting_mask(candidates, z)] += 1;
    }
    let mut neg_hist = vec![0u64; 1 << c];
    for &z in negatives {
        neg_hist[rejecting_mask(candidates, z)] += 1;
    }
    subset_sums(&mut all_hist, c);
    subset_sums(&mut neg_hist, c);

    // models(T) = #{z : R(z) ∩ T = ∅} = all_hist[!T]; T exact iff no negative escapes it
    let mut best: Option<(u64, u32, usize)> = None;
    for t in 0..=full {
        let outside = full & !t;
        if neg_hist[outside] != 0 {
            continue;
        }
        let models = all_hist[outside];
        let size = t.count_ones();
        let better = match best {
            None => true,
            Some((bm, bs, bt)) => models
                .cmp(&bm)
                .then_with(|| bs.cmp(&size))
                .then_with(|| canonical_cmp(bt, t))
                .is_gt(),
        };
        if better {
            best = Some((models, size, t));
        }
    }
    let (_, _, t) = best.expect("the full candidate set is always exact");
    candidates
        .iter()
        .enumerate()
        .filter(|(i, _)| t >> i & 1 == 1)
        .map(|(_, c)| *c)
        .collect()
}

fn greedy_weakening(n: usize, candidates: &[Clause], negatives: &[u32]) -> Result<Vec<Clause>> {
    let size = 1usize << n;
    let mut is_negative = vec![false; size];
    for &z in negatives {
        is_negative[z as usize] = true;
    }
    let mut rejects: Vec<Vec<u32>> = Vec::with_capacity(candidates.len());
    let mut cover = vec![0u32; size];
    let mut rejected_by: Vec<Vec<u32>> = vec![Vec::new(); size];
    for (i, c) in candidates.iter().enumerate() {
        let states: Vec<u32> = c.rejected_pattern().completion_values()?.collect();
        for &z in &states {
            cover[z as usize] += 1;
            rejected_by[z as usize].push(i as u32);
        }
        rejects.push(states);
    }

    let mut gain = vec![0u64; candidates.len()];
    let mut blocked = vec![0u32; candidates.len()];
    for (i, states) in rejects.iter().enumerate() {
        for &z in states {
            if cover[z as usize] == 1 {
                gain[i] += 1;
                if is_negative[z as usize] {
                    blocked[i] += 1;
                }
            }
        }
    }

    let mut alive = vec![true; candidates.len()];
    loop {
        let mut pick: Option<usize> = None;
        for i in 0..candidates.len() {
            if alive[i] && blocked[i] == 0 && pick.is_none_or(|p| gain[i] > gain[p]) {
                pick = Some(i);
            }
        }
        let Some(r) = pick else { break };
        alive[r] = false;
        for &z in &rejects[r] {
            let z = z as usize;
            cover[z] -= 1;
            if cover[z] == 1 {
                let owner = rejected_by[z]
                    .iter()
                    .map(|&j| j as usize)
                    .find(|&j| alive[j])
                    .expect("cover count tracks live clauses");
                gain[owner] += 1;
                if is_negative[z] {
                    blocked[owner] += 1;
                }
            }
        }
    }
    Ok(candidates
        .iter()
        .zip(alive)
        .filter_map(|(c, keep)| keep.then_some(*c))
        .collect())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
