//! Invariant checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::{abduct, AbductionPolicy};
use crate::format::{read_task, write_task};
use crate::learn::{fit_extensional, fit_intensional, fit_strongest, LearnerConfig};
use crate::logic::{clause_universe, clause_universe_size, Clause, Literal, Sentence, Truth};
use crate::state::{PartialState, Task};
use crate::suite;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, failures: usize, cases: usize) -> Self {
        Self { name, passed: failures == 0, detail: format!("{failures} failures in {cases} cases") }
    }
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> PartialState {
    PartialState::from_masks(n, rng.gen(), rng.gen())
}

/// A random refinement of `s`: some undefined variables get values.
pub fn random_refinement<R: Rng>(s: &PartialState, rng: &mut R) -> PartialState {
    let extra: u32 = rng.gen::<u32>() & !s.defined();
    PartialState::from_masks(s.len(), s.defined() | extra, s.values() | (rng.gen::<u32>() & extra))
}

pub fn random_sentence<R: Rng>(n: usize, width: usize, clauses: usize, rng: &mut R) -> Sentence {
    let mut out = Vec::with_capacity(clauses);
    for _ in 0..clauses {
        let w = rng.gen_range(1..=width);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..w {
            let j = rng.gen_range(i..n);
            idx.swap(i, j);
        }
        let lits: Vec<Literal> = idx[..w].iter().map(|&i| Literal::new(i, rng.gen())).collect();
        out.push(Clause::new(n, &lits).expect("distinct indices"));
    }
    Sentence::new(n, width, out).expect("width respected")
}

fn all_states(n: usize) -> Vec<PartialState> {
    let mut out = Vec::new();
    for defined in 0..(1u32 << n) {
        let mut values = defined;
        loop {
            out.push(PartialState::from_masks(n, defined, values));
            if values == 0 {
                break;
            }
            values = (values - 1) & defined;
        }
    }
    out
}

fn partial_order() -> Check {
    let states = all_states(3);
    let le = |a: &PartialState, b: &PartialState| a.is_subsequence_of(b).unwrap();
    let mut failures = 0;
    let mut cases = 0;
    for a in &states {
        failures += usize::from(!le(a, a));
        for b in &states {
            if le(a, b) && le(b, a) && a != b {
                failures += 1;
            }
            for c in &states {
                cases += 1;
                if le(a, b) && le(b, c) && !le(a, c) {
                    failures += 1;
                }
            }
        }
    }
    Check::new("subsequence is a partial order (n=3)", failures, cases)
}

fn persistence(rng: &mut ChaCha8Rng) -> Check {
    let mut failures = 0;
    let cases = 2000;
    for _ in 0..cases {
        let n = rng.gen_range(1..=8);
        let h = random_sentence(n, n.min(3), rng.gen_range(0..6), rng);
        let s = random_state(n, rng);
        let t = random_refinement(&s, rng);
        let (vs, vt) = (h.eval(&s).unwrap(), h.eval(&t).unwrap());
        if vs != Truth::Indeterminate && vs != vt {
            failures += 1;
        }
        let full = PartialState::complete(n, t.values() | (rng.gen::<u32>() & !t.defined()));
        if h.eval(&full).unwrap() == Truth::Indeterminate {
            failures += 1;
        }
    }
    Check::new("Kleene persistence and two-valuedness", failures, cases)
}

fn counting(rng: &mut ChaCha8Rng) -> Check {
    let mut failures = 0;
    let cases = 50;
    for _ in 0..cases {
        let h = random_sentence(8, 3, rng.gen_range(0..10), rng);
        let naive = (0..256u32)
            .filter(|&v| h.eval(&PartialState::complete(8, v)).unwrap() == Truth::True)
            .count() as u64;
        let empty = PartialState::from_masks(8, 0, 0);
        if h.count_models().unwrap() != naive
            || h.satisfying_completions(&empty).unwrap().len() as u64 != naive
        {
            failures += 1;
        }
    }
    Check::new("model counts match naive enumeration", failures, cases)
}

fn universe() -> Check {
    let mut failures = 0;
    let mut cases = 0;
    for n in 1..=6 {
        for k in 1..=n {
            cases += 1;
            if clause_universe(n, k).unwrap().len() as u64 != clause_universe_size(n, k) {
                failures += 1;
            }
        }
    }
    Check::new("clause universe sizes", failures, cases)
}

fn generators() -> Check {
    let mut tasks: Vec<Task> = Vec::new();
    for w in 1..=3 {
        tasks.push(suite::binary_addition(w).unwrap());
    }
    for n in 2..=8 {
        tasks.push(suite::parity(n).unwrap());
    }
    tasks.push(suite::string_prediction(8, 3).unwrap());
    for w in 1..=2 {
        tasks.push(suite::toy_cpu(&suite::ToyCpuSpec::new(w, &suite::Opcode::ALL).unwrap()).unwrap());
    }
    let failures = tasks
        .iter()
        .filter(|t| read_task(&write_task(t)).as_ref() != Ok(t))
        .count();
    Check::new("generated tasks round-trip through the file format", failures, tasks.len())
}

fn learners_and_abduction(rng: &mut ChaCha8Rng) -> Check {
    let tasks = [
        suite::binary_addition(1).unwrap(),
        suite::parity(4).unwrap(),
        suite::string_prediction(5, 2).unwrap(),
    ];
    let mut failures = 0;
    let mut cases = 0;
    for task in &tasks {
        for m in 1..task.goals().len() {
            let o = task.sample_ostensive(m, rng).unwrap();
            let cfg = LearnerConfig::new(task.n());
            let int = fit_intensional(&o, &cfg).unwrap();
            let strong = fit_strongest(&o, &cfg).unwrap();
            let ext = fit_extensional(&o);
            cases += 1;
            if !int.is_exact(&o).unwrap() || int.weakness() < strong.weakness() || !ext.is_exact(&o).unwrap() {
                failures += 1;
            }
            for s in task.initials() {
                for sol in [&int, &strong, &ext] {
                    cases += 1;
                    let b = abduct(sol, s, &AbductionPolicy::LexFirst, Some(rng)).unwrap();
                    let ok = match b {
                        Some(b) => b.is_complete() && s.is_subsequence_of(&b).unwrap() && sol.accepts(&b),
                        None => s.completions().unwrap().iter().all(|c| !sol.accepts(c)),
                    };
                    failures += usize::from(!ok);
                }
            }
        }
    }
    Check::new("fits are exact and abductions sound", failures, cases)
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        partial_order(),
        persistence(&mut rng),
        counting(&mut rng),
        universe(),
        generators(),
        learners_and_abduction(&mut rng),
    ]
}
