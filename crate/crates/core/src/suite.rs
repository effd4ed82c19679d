//! Generators for the concrete task families.
//!
//! Multi-bit registers are laid out most significant bit first, so the text form
//! of a state reads like the binary numbers it encodes.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::{PartialState, Task, VariableSpace};

/// Writes `value` into `width` bits starting at `offset`, most significant first.
fn put(bits: &mut u32, offset: usize, width: usize, value: u32) {
    for j in 0..width {
        if value >> (width - 1 - j) & 1 == 1 {
            *bits |= 1 << (offset + j);
        }
    }
}

fn register_names(prefix: &str, width: usize) -> impl Iterator<Item = String> + '_ {
    (0..width).rev().map(move |j| format!("{prefix}{j}"))
}

/// `a + b = s` over `w`-bit operands with a `w+1`-bit sum.
pub fn binary_addition(w: usize) -> Result<Task> {
    if !(1..=3).contains(&w) {
        return Err(Error::BadWidth(format!("addition width {w} outside 1..=3")));
    }
    let n = 3 * w + 1;
    let names = register_names("a", w)
        .chain(register_names("b", w))
        .chain(register_names("s", w + 1))
        .collect();
    let space = VariableSpace::with_names(n, names)?;
    let mut goals = Vec::new();
    for a in 0..(1u32 << w) {
        for b in 0..(1u32 << w) {
            let mut bits = 0;
            put(&mut bits, 0, w, a);
            put(&mut bits, w, w, b);
            put(&mut bits, 2 * w, w + 1, a + b);
            goals.push(PartialState::complete(n, bits));
        }
    }
    Task::build(space, &goals, &[(0..2 * w).collect()])
}

/// Period-`p` binary strings of length `len`; the first `p` symbols are given.
pub fn string_prediction(len: usize, period: usize) -> Result<Task> {
    if !(period >= 1 && period < len && len <= 16) {
        return Err(Error::BadPeriod(format!("need 1 <= p < L <= 16, got p={period} L={len}")));
    }
    let space = VariableSpace::with_names(len, (0..len).map(|i| format!("s{i}")).collect())?;
    let goals: Vec<PartialState> = (0..(1u32 << period))
        .map(|seed| {
            let mut bits = 0u32;
            for i in 0..len {
                // position i copies position i mod p of the seed block
                if seed >> (i % period) & 1 == 1 {
                    bits |= 1 << i;
                }
            }
            PartialState::complete(len, bits)
        })
        .collect();
    Task::build(space, &goals, &[(0..period).collect()])
}

/// `y = x1 xor ... xor x(n-1)`.
pub fn parity(n: usize) -> Result<Task> {
    if !(2..=8).contains(&n) {
        return Err(Error::BadWidth(format!("parity size {n} outside 2..=8")));
    }
    let names = (1..n).map(|i| format!("x{i}")).chain(["y".to_string()]).collect();
    let space = VariableSpace::with_names(n, names)?;
    let goals: Vec<PartialState> = (0..(1u32 << (n - 1)))
        .map(|x| {
            let y = x.count_ones() & 1;
            PartialState::complete(n, x | y << (n - 1))
        })
        .collect();
    Task::build(space, &goals, &[(0..n - 1).collect()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Opcode {
    Add = 0,
    And = 1,
    Xor = 2,
    Mov = 3,
}

impl Opcode {
    pub const ALL: [Opcode; 4] = [Opcode::Add, Opcode::And, Opcode::Xor, Opcode::Mov];

    pub fn code(self) -> u32 {
        self as u32
    }

    /// New value of r0; ADD wraps modulo `2^width`.
    pub fn apply(self, r0: u32, r1: u32, width: usize) -> u32 {
        let mask = (1u32 << width) - 1;
        match self {
            Opcode::Add => (r0 + r1) & mask,
            Opcode::And => r0 & r1,
            Opcode::Xor => r0 ^ r1,
            Opcode::Mov => r1,
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Opcode::Add => "ADD",
            Opcode::And => "AND",
            Opcode::Xor => "XOR",
            Opcode::Mov => "MOV",
        })
    }
}

impl FromStr for Opcode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ADD" => Ok(Opcode::Add),
            "AND" => Ok(Opcode::And),
            "XOR" => Ok(Opcode::Xor),
            "MOV" => Ok(Opcode::Mov),
            _ => Err(Error::BadSpec(format!("unknown opcode {s:?}"))),
        }
    }
}

/// Two-register machine executing one instruction `r0 <- op(r0, r1)`.
///
/// Layout: opcode (2 bits), r0, r1 before, r0, r1 after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyCpuSpec {
    pub width: usize,
    pub opcodes: Vec<Opcode>,
}

impl ToyCpuSpec {
    pub fn new(width: usize, opcodes: &[Opcode]) -> Result<Self> {
        let mut opcodes = opcodes.to_vec();
        opcodes.sort_unstable();
        let before = opcodes.len();
        opcodes.dedup();
        if opcodes.len() != before {
            return Err(Error::BadSpec("repeated opcode".into()));
        }
        let spec = Self { width, opcodes };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(1..=3).contains(&self.width) {
            return Err(Error::BadSpec(format!("register width {} outside 1..=3", self.width)));
        }
        if self.opcodes.is_empty() {
            return Err(Error::BadSpec("no opcodes".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        2 + 4 * self.width
    }

    /// Encodes one transition as a complete state.
    pub fn encode(&self, op: Opcode, r0: u32, r1: u32, r0_post: u32, r1_post: u32) -> PartialState {
        let w = self.width;
        let mut bits = 0;
        put(&mut bits, 0, 2, op.code());
        put(&mut bits, 2, w, r0);
        put(&mut bits, 2 + w, w, r1);
        put(&mut bits, 2 + 2 * w, w, r0_post);
        put(&mut bits, 2 + 3 * w, w, r1_post);
        PartialState::complete(self.n(), bits)
    }
}

pub fn toy_cpu(spec: &ToyCpuSpec) -> Result<Task> {
    spec.check()?;
    let w = spec.width;
    let names = ["op1".to_string(), "op0".to_string()]
        .into_iter()
        .chain(register_names("r0_", w))
        .chain(register_names("r1_", w))
        .chain(register_names("r0n_", w))
        .chain(register_names("r1n_", w))
        .collect();
    let space = VariableSpace::with_names(spec.n(), names)?;
    let mut goals = Vec::new();
    for &op in &spec.opcodes {
        for r0 in 0..(1u32 << w) {
            for r1 in 0..(1u32 << w) {
                goals.push(spec.encode(op, r0, r1, op.apply(r0, r1, w), r1));
            }
        }
    }
    Task::build(space, &goals, &[(0..2 + 2 * w).collect()])
}

/// Goals are the complete states whose score reaches `threshold`.
pub fn from_reward(
    n: usize,
    score: impl Fn(&PartialState) -> f64,
    threshold: f64,
    frames: &[Vec<usize>],
) -> Result<Task> {
    let space = VariableSpace::new(n)?;
    let goals: Vec<PartialState> = space
        .empty_state()
        .completions()?
        .into_iter()
        .filter(|z| score(z) >= threshold)
        .collect();
    if goals.is_empty() {
        return Err(Error::EmptyGoalSet);
    }
    Task::build(space, &goals, frames)
}

/// A uniformly random goal set of `size` states, decided from the first `frame_len` variables.
pub fn random_goals(n: usize, size: usize, frame_len: usize, seed: u64) -> Result<Task> {
    let space = VariableSpace::new(n)?;
    if size == 0 || size > 1 << n {
        return Err(Error::InvalidConfig(format!("goal count {size} outside 1..=2^{n}")));
    }
    if frame_len > n {
        return Err(Error::IndexOutOfRange { index: frame_len, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goals: Vec<PartialState> = index::sample(&mut rng, 1 << n, size)
        .into_iter()
        .map(|v| PartialState::complete(n, v as u32))
        .collect();
    Task::build(space, &goals, &[(0..frame_len).collect()])
}

/// Seeds of the worst-case (random goal set) preset.
pub const RANDOM_PRESET_SEEDS: [u64; 5] = [11, 23, 37, 41, 53];
pub const RANDOM_PRESET_VARS: usize = 8;
pub const RANDOM_PRESET_GOALS: usize = 32;
pub const RANDOM_PRESET_FRAME: usize = 5;

pub fn random_preset(seed: u64) -> Result<Task> {
    random_goals(RANDOM_PRESET_VARS, RANDOM_PRESET_GOALS, RANDOM_PRESET_FRAME, seed)
}

/// A generator name with `key=value` parameters, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: Vec<(String, String)>,
}

impl GeneratorSpec {
    /// Parses `w=2,ops=ADD+AND` style parameter lists.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in params.split([',', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("parameter {part:?} is not key=value")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { name: name.to_string(), params: out })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn num<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("parameter {key}={v:?} is not a number"))),
            None => default.ok_or_else(|| Error::InvalidConfig(format!("missing parameter {key}"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::InvalidConfig(format!(
                "generator {} takes no parameter {k:?}",
                self.name
            ))),
            None => Ok(()),
        }
    }

    /// Stable identifier used in result files, e.g. `addition:w=1`.
    pub fn id(&self) -> String {
        let mut id = self.name.clone();
        for (i, (k, v)) in self.params.iter().enumerate() {
            id.push(if i == 0 { ':' } else { ';' });
            id.push_str(&format!("{k}={v}"));
        }
        id
    }

    pub fn build(&self) -> Result<Task> {
        match self.name.as_str() {
            "addition" => {
                self.check_keys(&["w"])?;
                binary_addition(self.num("w", None)?)
            }
            "string" => {
                self.check_keys(&["L", "p"])?;
                string_prediction(self.num("L", None)?, self.num("p", None)?)
            }
            "parity" => {
                self.check_keys(&["n"])?;
                parity(self.num("n", None)?)
            }
            "toycpu" => {
                self.check_keys(&["w", "ops"])?;
                let ops = match self.get("ops") {
                    Some(list) => list.split('+').map(str::parse).collect::<Result<Vec<_>>>()?,
                    None => Opcode::ALL.to_vec(),
                };
                toy_cpu(&ToyCpuSpec::new(self.num("w", None)?, &ops)?)
            }
            "threshold" => {
                self.check_keys(&["n", "theta", "frame"])?;
                let n: usize = self.num("n", None)?;
                let theta: f64 = self.num("theta", None)?;
                let frame_len: usize = self.num("frame", Some(n / 2))?;
                if frame_len > n {
                    return Err(Error::IndexOutOfRange { index: frame_len, n });
                }
                from_reward(n, |z| z.values().count_ones() as f64, theta, &[(0..frame_len).collect()])
            }
            "random" => {
                self.check_keys(&["n", "goals", "frame", "seed"])?;
                random_goals(
                    self.num("n", Some(RANDOM_PRESET_VARS))?,
                    self.num("goals", Some(RANDOM_PRESET_GOALS))?,
                    self.num("frame", Some(RANDOM_PRESET_FRAME))?,
                    self.num("seed", Some(RANDOM_PRESET_SEEDS[0]))?,
                )
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown generator {other:?} (addition, string, parity, toycpu, threshold, random)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> PartialState {
        s.parse().unwrap()
    }

    #[test]
    fn addition_examples() {
        let t = binary_addition(1).unwrap();
        assert_eq!(t.goals().len(), 4);
        assert_eq!(t.initials().len(), 4);
        assert!(t.is_goal(&st("1110")));
        assert!(t.is_goal(&st("0000")));
        let t = binary_addition(2).unwrap();
        assert_eq!(t.goals().len(), 16);
        assert!(t.is_goal(&st("0101010")));
        assert!(binary_addition(4).is_err());
    }

    #[test]
    fn string_examples() {
        let t = string_prediction(4, 1).unwrap();
        assert_eq!(t.goals(), &[st("0000"), st("1111")]);
        let t = string_prediction(4, 2).unwrap();
        assert_eq!(t.goals().len(), 4);
        assert!(t.is_goal(&st("1010")));
        assert_eq!(t.initials()[0].to_string(), "00**");
        assert!(matches!(string_prediction(4, 4), Err(Error::BadPeriod(_))));
        assert!(matches!(string_prediction(17, 2), Err(Error::BadPeriod(_))));
    }

    #[test]
    fn parity_examples() {
        let t = parity(3).unwrap();
        assert!(t.is_goal(&st("110")));
        assert!(t.is_goal(&st("000")));
        assert!(!t.is_goal(&st("111")));
        assert_eq!(t.goals().len(), 4);
        assert!(parity(1).is_err());
        assert!(parity(9).is_err());
    }

    #[test]
    fn toycpu_examples() {
        let spec = ToyCpuSpec::new(1, &[Opcode::Mov, Opcode::And]).unwrap();
        let t = toy_cpu(&spec).unwrap();
        assert!(t.is_goal(&spec.encode(Opcode::Mov, 0, 1, 1, 1)));
        assert!(t.is_goal(&spec.encode(Opcode::And, 1, 1, 1, 1)));
        assert_eq!(t.goals().len(), 8);

        let spec = ToyCpuSpec::new(2, &Opcode::ALL).unwrap();
        let t = toy_cpu(&spec).unwrap();
        assert!(t.is_goal(&spec.encode(Opcode::Add, 0b11, 0b01, 0b00, 0b01)));
        assert_eq!(t.goals().len(), 64);
        assert!(ToyCpuSpec::new(0, &[Opcode::Add]).is_err());
        assert!(ToyCpuSpec::new(1, &[]).is_err());
        assert!(ToyCpuSpec::new(1, &[Opcode::Add, Opcode::Add]).is_err());
    }

    #[test]
    fn reward_examples() {
        let popcount = |z: &PartialState| z.values().count_ones() as f64;
        let t = from_reward(3, popcount, 3.0, &[vec![0]]).unwrap();
        assert_eq!(t.goals(), &[st("111")]);
        assert_eq!(from_reward(3, popcount, 0.0, &[vec![0]]).unwrap().goals().len(), 8);
        assert_eq!(from_reward(4, popcount, 3.0, &[vec![0]]).unwrap().goals().len(), 5);
        assert_eq!(from_reward(3, popcount, 4.0, &[vec![0]]), Err(Error::EmptyGoalSet));
    }

    #[test]
    fn generator_specs() {
        let g = GeneratorSpec::parse("toycpu", "w=1,ops=ADD+XOR").unwrap();
        assert_eq!(g.id(), "toycpu:w=1;ops=ADD+XOR");
        assert_eq!(g.build().unwrap().goals().len(), 8);
        assert!(GeneratorSpec::parse("parity", "n=3,q=1").unwrap().build().is_err());
        assert!(GeneratorSpec::parse("nope", "").unwrap().build().is_err());
        assert!(GeneratorSpec::parse("parity", "n").is_err());
        let r = GeneratorSpec::parse("random", "seed=3").unwrap().build().unwrap();
        assert_eq!(r.goals().len(), RANDOM_PRESET_GOALS);
    }
}
