//! Partial binary states, the subsequence order, tasks and ostensive definitions.
//!
//! A state over `n` variables is stored as two bitmasks with variable `i` at bit `i`.
//! Text form lists variables left to right: `"1*0"` assigns `x0 = 1`, `x2 = 0` and
//! leaves `x1` undefined.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result, MAX_VARS};

/// The set of binary variables a task is posed over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSpace {
    n: usize,
    names: Option<Vec<String>>,
}

impl VariableSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if n > MAX_VARS {
            return Err(Error::TooManyVariables { n, limit: MAX_VARS });
        }
        Ok(Self { n, names: None })
    }

    pub fn with_names(n: usize, names: Vec<String>) -> Result<Self> {
        let mut space = Self::new(n)?;
        if names.len() != n {
            return Err(Error::BadNames(format!("expected {n} names, got {}", names.len())));
        }
        let distinct: BTreeSet<&str> = names.iter().map(String::as_str).collect();
        if distinct.len() != n {
            return Err(Error::BadNames("duplicate name".into()));
        }
        if let Some(bad) = names
            .iter()
            .find(|s| s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#'))
        {
            return Err(Error::BadNames(format!("unusable name {bad:?}")));
        }
        space.names = Some(names);
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Builds a state from `(index, bit)` pairs.
    pub fn make_state(&self, assignments: &[(usize, bool)]) -> Result<PartialState> {
        let mut defined = 0u32;
        let mut values = 0u32;
        for &(index, bit) in assignments {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
            if defined & (1 << index) != 0 {
                return Err(Error::DuplicateIndex(index));
            }
            defined |= 1 << index;
            if bit {
                values |= 1 << index;
            }
        }
        Ok(PartialState::from_masks(self.n, defined, values))
    }

    pub fn empty_state(&self) -> PartialState {
        PartialState::from_masks(self.n, 0, 0)
    }

    /// Parses a `{0,1,*}` pattern and checks its length against this space.
    pub fn parse_state(&self, text: &str) -> Result<PartialState> {
        let state: PartialState = text.parse()?;
        if state.len() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: state.len() });
        }
        Ok(state)
    }

    pub(crate) fn check(&self, state: &PartialState) -> Result<()> {
        if state.len() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: state.len() });
        }
        Ok(())
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A partial assignment of binary values to the variables of a space.
///
/// `values` is kept canonical: bits outside `defined` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialState {
    n: u8,
    defined: u32,
    values: u32,
}

impl PartialState {
    /// Builds a state from raw masks, clearing value bits outside `defined`.
    pub fn from_masks(n: usize, defined: u32, values: u32) -> Self {
        debug_assert!(n <= MAX_VARS);
        let defined = defined & full_mask(n);
        Self { n: n as u8, defined, values: values & defined }
    }

    /// A complete state whose value vector is `values`.
    pub fn complete(n: usize, values: u32) -> Self {
        Self::from_masks(n, full_mask(n), values)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn defined(&self) -> u32 {
        self.defined
    }

    pub fn values(&self) -> u32 {
        self.values
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        if index < self.len() && self.defined & (1 << index) != 0 {
            Some(self.values & (1 << index) != 0)
        } else {
            None
        }
    }

    pub fn is_complete(&self) -> bool {
        self.defined == full_mask(self.len())
    }

    pub fn free_count(&self) -> usize {
        self.len() - self.defined.count_ones() as usize
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SpaceMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    /// True iff `other` assigns everything `self` assigns, with identical values.
    pub fn is_subsequence_of(&self, other: &Self) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.is_subsequence_unchecked(other))
    }

    pub(crate) fn is_subsequence_unchecked(&self, other: &Self) -> bool {
        self.defined & !other.defined == 0 && (self.values ^ other.values) & self.defined == 0
    }

    /// Keeps only the variables in `frame` (that are also defined here).
    pub fn restrict(&self, frame: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &index in frame {
            if index >= self.len() {
                return Err(Error::IndexOutOfRange { index, n: self.len() });
            }
            mask |= 1 << index;
        }
        Ok(Self::from_masks(self.len(), self.defined & mask, self.values))
    }

    /// Value vectors of every complete supersequence, in lexicographic order.
    pub fn completion_values(&self) -> Result<CompletionValues> {
        let free = self.free_count();
        if free > MAX_VARS {
            return Err(Error::TooManyFree { free, limit: MAX_VARS });
        }
        let free_mask = !self.defined & full_mask(self.len());
        // Lowest free index is the most significant position of the counter.
        let positions: Vec<u32> =
            (0..self.len() as u32).rev().filter(|i| free_mask & (1 << i) != 0).collect();
        Ok(CompletionValues { base: self.values, positions, next: 0, end: 1u64 << free })
    }

    /// Every complete supersequence, in lexicographic order.
    pub fn completions(&self) -> Result<Vec<PartialState>> {
        let n = self.len();
        Ok(self.completion_values()?.map(|v| Self::complete(n, v)).collect())
    }

    fn code_at(&self, index: u32) -> u8 {
        if self.defined & (1 << index) == 0 {
            0
        } else if self.values & (1 << index) == 0 {
            1
        } else {
            2
        }
    }
}

/// Iterator over completion value vectors, see [`PartialState::completion_values`].
#[derive(Debug, Clone)]
pub struct CompletionValues {
    base: u32,
    // positions[j] receives bit j of the counter
    positions: Vec<u32>,
    next: u64,
    end: u64,
}

impl Iterator for CompletionValues {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.next >= self.end {
            return None;
        }
        let counter = self.next;
        self.next += 1;
        let mut v = self.base;
        for (j, &pos) in self.positions.iter().enumerate() {
            if counter >> j & 1 == 1 {
                v |= 1 << pos;
            }
        }
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CompletionValues {}

/// Text order of the `{*,0,1}` rendering, with `* < 0 < 1`.
impl Ord for PartialState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let diff = (self.defined ^ other.defined) | (self.values ^ other.values);
            if diff == 0 {
                return Ordering::Equal;
            }
            let p = diff.trailing_zeros();
            self.code_at(p).cmp(&other.code_at(p))
        })
    }
}

impl PartialOrd for PartialState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PartialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: String = (0..self.len())
            .map(|i| match self.get(i) {
                None => '*',
                Some(false) => '0',
                Some(true) => '1',
            })
            .collect();
        f.write_str(&text)
    }
}

impl FromStr for PartialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_VARS {
            return Err(Error::BadState(s.to_string()));
        }
        let mut defined = 0u32;
        let mut values = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '*' => {}
                '0' => defined |= 1 << i,
                '1' => {
                    defined |= 1 << i;
                    values |= 1 << i;
                }
                _ => return Err(Error::BadState(s.to_string())),
            }
        }
        Ok(Self::from_masks(n, defined, values))
    }
}

/// A task: a complete goal set and the decision frames that induce its initial states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    space: VariableSpace,
    goals: Vec<PartialState>,
    frames: Vec<Vec<usize>>,
    initials: Vec<PartialState>,
}

impl Task {
    /// Expands goal patterns to their completions and derives the initial states.
    pub fn build(
        space: VariableSpace,
        goal_patterns: &[PartialState],
        frames: &[Vec<usize>],
    ) -> Result<Self> {
        if goal_patterns.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        if frames.is_empty() {
            return Err(Error::NoFrames);
        }
        let mut goals = BTreeSet::new();
        for pattern in goal_patterns {
            space.check(pattern)?;
            goals.extend(pattern.completions()?);
        }
        let goals: Vec<PartialState> = goals.into_iter().collect();

        let mut canonical_frames = BTreeSet::new();
        for frame in frames {
            let mut frame = frame.clone();
            frame.sort_unstable();
            frame.dedup();
            if let Some(&index) = frame.iter().find(|&&i| i >= space.len()) {
                return Err(Error::IndexOutOfRange { index, n: space.len() });
            }
            canonical_frames.insert(frame);
        }
        let frames: Vec<Vec<usize>> = canonical_frames.into_iter().collect();

        let initials = restrictions(&goals, &frames)?;
        let task = Self { space, goals, frames, initials };
        task.verify()?;
        Ok(task)
    }

    fn verify(&self) -> Result<()> {
        for s in &self.initials {
            if !self.goals.iter().any(|g| s.is_subsequence_unchecked(g)) {
                return Err(Error::UnreachableInitial(s.to_string()));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn goals(&self) -> &[PartialState] {
        &self.goals
    }

    pub fn frames(&self) -> &[Vec<usize>] {
        &self.frames
    }

    pub fn initials(&self) -> &[PartialState] {
        &self.initials
    }

    pub fn is_goal(&self, state: &PartialState) -> bool {
        self.goals.binary_search(state).is_ok()
    }

    /// Draws a uniformly random proper subset of `m` goals.
    pub fn sample_ostensive<R: Rng + ?Sized>(
        &self,
        m: usize,
        rng: &mut R,
    ) -> Result<OstensiveDefinition> {
        if m == 0 {
            return Err(Error::EmptySample);
        }
        if m >= self.goals.len() {
            return Err(Error::SampleTooLarge { m, goals: self.goals.len() });
        }
        let mut picked = index::sample(rng, self.goals.len(), m).into_vec();
        picked.sort_unstable();
        let sample = picked.into_iter().map(|i| self.goals[i]).collect();
        OstensiveDefinition::derive(self, sample)
    }
}

fn restrictions(goals: &[PartialState], frames: &[Vec<usize>]) -> Result<Vec<PartialState>> {
    let mut out = BTreeSet::new();
    for g in goals {
        for frame in frames {
            out.insert(g.restrict(frame)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Observed goals and the initial states they explain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OstensiveDefinition {
    n: usize,
    sample: Vec<PartialState>,
    initials: Vec<PartialState>,
    covers_all: bool,
}

impl OstensiveDefinition {
    /// Builds a definition from an explicit proper subset of the task's goals.
    pub fn from_sample(task: &Task, goals: &[PartialState]) -> Result<Self> {
        let mut sample: Vec<PartialState> = goals.to_vec();
        sample.sort_unstable();
        sample.dedup();
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(g) = sample.iter().find(|g| !task.is_goal(g)) {
            return Err(Error::NotAGoal(g.to_string()));
        }
        if sample.len() >= task.goals.len() {
            return Err(Error::SampleTooLarge { m: sample.len(), goals: task.goals.len() });
        }
        Self::derive(task, sample)
    }

    /// Observes every goal of the task. This breaks properness and is only
    /// meant for fitting a task's full solution as a reference.
    pub fn entire_task(task: &Task) -> Self {
        Self {
            n: task.n(),
            sample: task.goals.clone(),
            initials: task.initials.clone(),
            covers_all: true,
        }
    }

    fn derive(task: &Task, sample: Vec<PartialState>) -> Result<Self> {
        let initials = restrictions(&sample, &task.frames)?;
        let covers_all = task
            .initials
            .iter()
            .all(|s| sample.iter().any(|g| s.is_subsequence_unchecked(g)));
        Ok(Self { n: task.n(), sample, initials, covers_all })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample(&self) -> &[PartialState] {
        &self.sample
    }

    pub fn initials(&self) -> &[PartialState] {
        &self.initials
    }

    pub fn covers_all(&self) -> bool {
        self.covers_all
    }

    pub fn contains_goal(&self, state: &PartialState) -> bool {
        self.sample.binary_search(state).is_ok()
    }
}
