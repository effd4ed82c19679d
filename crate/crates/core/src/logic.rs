//! Width-bounded clausal sentences under strong Kleene evaluation.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result, MAX_VARS};
use crate::state::{full_mask, PartialState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    False,
    Indeterminate,
    True,
}

/// The atomic statement `x<index> = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub index: usize,
    pub value: bool,
}

impl Literal {
    pub fn new(index: usize, value: bool) -> Self {
        Self { index, value }
    }

    pub fn eval(&self, s: &PartialState) -> Result<Truth> {
        if self.index >= s.len() {
            return Err(Error::IndexOutOfRange { index: self.index, n: s.len() });
        }
        Ok(match s.get(self.index) {
            None => Truth::Indeterminate,
            Some(v) if v == self.value => Truth::True,
            Some(_) => Truth::False,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}={}", self.index, self.value as u8)
    }
}

/// A disjunction of literals over distinct variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    n: u8,
    vars: u32,
    pol: u32,
}

impl Clause {
    pub fn new(n: usize, literals: &[Literal]) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::TooManyVariables { n, limit: MAX_VARS });
        }
        if literals.is_empty() {
            return Err(Error::BadWidth("a clause needs at least one literal".into()));
        }
        let mut vars = 0u32;
        let mut pol = 0u32;
        for lit in literals {
            if lit.index >= n {
                return Err(Error::IndexOutOfRange { index: lit.index, n });
            }
            if vars & (1 << lit.index) != 0 {
                return Err(Error::DuplicateIndex(lit.index));
            }
            vars |= 1 << lit.index;
            if lit.value {
                pol |= 1 << lit.index;
            }
        }
        Ok(Self { n: n as u8, vars, pol })
    }

    pub(crate) fn from_masks(n: usize, vars: u32, pol: u32) -> Self {
        debug_assert!(vars != 0 && vars & !full_mask(n) == 0);
        Self { n: n as u8, vars, pol: pol & vars }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn width(&self) -> usize {
        self.vars.count_ones() as usize
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.n as usize)
            .filter(|i| self.vars & (1 << i) != 0)
            .map(|i| Literal::new(i, self.pol & (1 << i) != 0))
    }

    /// Two-valued check on a complete value vector.
    #[inline]
    pub fn satisfied_by(&self, values: u32) -> bool {
        !(values ^ self.pol) & self.vars != 0
    }

    pub fn eval(&self, s: &PartialState) -> Result<Truth> {
        if s.len() != self.n() {
            return Err(Error::SpaceMismatch { left: self.n(), right: s.len() });
        }
        Ok(self.eval_unchecked(s))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, s: &PartialState) -> Truth {
        if !(s.values() ^ self.pol) & self.vars & s.defined() != 0 {
            Truth::True
        } else if self.vars & !s.defined() != 0 {
            Truth::Indeterminate
        } else {
            Truth::False
        }
    }

    /// The partial state this clause rejects: every literal negated.
    pub fn rejected_pattern(&self) -> PartialState {
        PartialState::from_masks(self.n(), self.vars, !self.pol)
    }
}

/// Ascending width, then lexicographic on the `(index, value)` sequence.
impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.width().cmp(&other.width()))
            .then_with(|| self.literals().cmp(other.literals()))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, lit) in self.literals().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(")")
    }
}

/// A conjunction of clauses, each at most `width` literals wide.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    n: usize,
    width: usize,
    clauses: Vec<Clause>,
}

impl Sentence {
    pub fn new(n: usize, width: usize, clauses: impl IntoIterator<Item = Clause>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::TooManyVariables { n, limit: MAX_VARS });
        }
        if width == 0 || width > n {
            return Err(Error::BadWidth(format!("width {width} outside 1..={n}")));
        }
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        for c in &clauses {
            if c.n() != n {
                return Err(Error::SpaceMismatch { left: n, right: c.n() });
            }
            if c.width() > width {
                return Err(Error::BadWidth(format!("clause {c} wider than {width}")));
            }
        }
        clauses.sort_unstable();
        clauses.dedup();
        Ok(Self { n, width, clauses })
    }

    /// The vacuous sentence, true everywhere.
    pub fn tautology(n: usize, width: usize) -> Result<Self> {
        Self::new(n, width, [])
    }

    /// Parses the canonical text form, e.g. `(x0=1|x3=0)&(x1=0)` or `TRUE`.
    pub fn parse(text: &str, n: usize, width: usize) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse { line: 1, message: format!("malformed sentence {text:?}") };
        if text == "TRUE" {
            return Self::tautology(n, width);
        }
        let mut clauses = Vec::new();
        for part in text.split('&') {
            let inner = part
                .trim()
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(bad)?;
            let mut lits = Vec::new();
            for lit in inner.split('|') {
                let (var, val) = lit.trim().split_once('=').ok_or_else(bad)?;
                let index: usize = var.strip_prefix('x').and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                let value = match val {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad()),
                };
                lits.push(Literal::new(index, value));
            }
            clauses.push(Clause::new(n, &lits)?);
        }
        Self::new(n, width, clauses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    #[inline]
    pub fn accepts_values(&self, values: u32) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(values))
    }

    /// Strong Kleene value: minimum over clauses of the maximum over literals.
    pub fn eval(&self, s: &PartialState) -> Result<Truth> {
        if s.len() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: s.len() });
        }
        let mut value = Truth::True;
        for c in &self.clauses {
            value = value.min(c.eval_unchecked(s));
            if value == Truth::False {
                break;
            }
        }
        Ok(value)
    }

    /// Number of complete states on which the sentence is true.
    pub fn count_models(&self) -> Result<u64> {
        if self.n > MAX_VARS {
            return Err(Error::TooManyVariables { n: self.n, limit: MAX_VARS });
        }
        let mut count = 0u64;
        for z in 0..(1u32 << self.n) {
            if self.accepts_values(z) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Complete supersequences of `s` on which the sentence is true, lexicographically.
    pub fn satisfying_completions(&self, s: &PartialState) -> Result<Vec<PartialState>> {
        if s.len() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: s.len() });
        }
        Ok(s.completion_values()?
            .filter(|&v| self.accepts_values(v))
            .map(|v| PartialState::complete(self.n, v))
            .collect())
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("TRUE");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str("&")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Number of clauses of width `1..=width` over `n` variables.
pub fn clause_universe_size(n: usize, width: usize) -> u64 {
    let mut total = 0u64;
    let mut binom = 1u64;
    for w in 1..=width.min(n) as u64 {
        binom = binom * (n as u64 - w + 1) / w;
        total += binom << w;
    }
    total
}

/// Visits every clause of width `1..=width` in canonical order.
pub fn for_each_clause(n: usize, width: usize, mut visit: impl FnMut(Clause)) -> Result<()> {
    check_width(n, width)?;
    fn extend(
        n: usize,
        remaining: usize,
        start: usize,
        vars: u32,
        pol: u32,
        visit: &mut dyn FnMut(Clause),
    ) {
        if remaining == 0 {
            visit(Clause::from_masks(n, vars, pol));
            return;
        }
        // leave room for the literals still to place
        for i in start..=(n - remaining) {
            for value in [false, true] {
                let pol = if value { pol | 1 << i } else { pol };
                extend(n, remaining - 1, i + 1, vars | 1 << i, pol, visit);
            }
        }
    }
    for w in 1..=width {
        extend(n, w, 0, 0, 0, &mut visit);
    }
    Ok(())
}

pub fn clause_universe(n: usize, width: usize) -> Result<Vec<Clause>> {
    let mut out = Vec::with_capacity(clause_universe_size(n, width.min(n)) as usize);
    for_each_clause(n, width, |c| out.push(c))?;
    Ok(out)
}

fn check_width(n: usize, width: usize) -> Result<()> {
    if n > MAX_VARS {
        return Err(Error::TooManyVariables { n, limit: MAX_VARS });
    }
    if width == 0 || width > n {
        return Err(Error::BadWidth(format!("width {width} outside 1..={n}")));
    }
    Ok(())
}
