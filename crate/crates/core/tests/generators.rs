use std::collections::BTreeSet;

use intension::suite::{self, GeneratorSpec, Opcode, ToyCpuSpec};
use intension::{read_task, write_task, PartialState, Task};

/// Reads `width` bits starting at `offset`, most significant first.
fn field(z: &PartialState, offset: usize, width: usize) -> u32 {
    (0..width).fold(0, |acc, j| acc << 1 | u32::from(z.get(offset + j).unwrap()))
}

fn values(task: &Task) -> BTreeSet<u32> {
    task.goals().iter().map(|g| g.values()).collect()
}

#[test]
fn addition_goals_are_correct_sums() {
    for w in 1..=3 {
        let task = suite::binary_addition(w).unwrap();
        assert_eq!(task.n(), 3 * w + 1);
        assert_eq!(task.goals().len(), 1 << (2 * w));
        assert_eq!(task.initials().len(), 1 << (2 * w));
        let mut operands = BTreeSet::new();
        for g in task.goals() {
            let (a, b, s) = (field(g, 0, w), field(g, w, w), field(g, 2 * w, w + 1));
            assert_eq!(a + b, s, "{g}");
            operands.insert((a, b));
        }
        assert_eq!(operands.len(), 1 << (2 * w));
    }
}

#[test]
fn addition_text_reads_as_binary() {
    let task = suite::binary_addition(2).unwrap();
    // 3 + 2 = 5
    assert!(task.is_goal(&"1110101".parse().unwrap()));
    assert!(!task.is_goal(&"1110100".parse().unwrap()));
}

#[test]
fn parity_goals_have_even_weight() {
    for n in 2..=8 {
        let task = suite::parity(n).unwrap();
        assert_eq!(task.goals().len(), 1 << (n - 1));
        assert!(task.goals().iter().all(|g| g.values().count_ones() % 2 == 0));
        assert_eq!(task.frames(), &[(0..n - 1).collect::<Vec<_>>()]);
    }
}

#[test]
fn strings_repeat_their_seed_block() {
    for (len, p) in [(4, 1), (6, 2), (8, 3), (16, 5)] {
        let task = suite::string_prediction(len, p).unwrap();
        assert_eq!(task.goals().len(), 1 << p);
        for g in task.goals() {
            for i in p..len {
                assert_eq!(g.get(i), g.get(i - p), "{g}");
            }
        }
    }
    assert!(suite::string_prediction(4, 4).is_err());
    assert!(suite::string_prediction(17, 2).is_err());
}

/// Reference interpreter for one instruction, written against the register fields.
fn step(op: Opcode, r0: u32, r1: u32, width: usize) -> (u32, u32) {
    let wrap = 1u32 << width;
    let r0_next = match op {
        Opcode::Add => (r0 + r1) % wrap,
        Opcode::And => r0 & r1,
        Opcode::Xor => r0 ^ r1,
        Opcode::Mov => r1,
    };
    (r0_next, r1)
}

#[test]
fn toy_cpu_matches_reference_interpreter() {
    let subsets: [&[Opcode]; 4] =
        [&Opcode::ALL, &[Opcode::Add], &[Opcode::Xor, Opcode::Mov], &[Opcode::And, Opcode::Add]];
    for w in 1..=3 {
        for ops in subsets {
            let spec = ToyCpuSpec::new(w, ops).unwrap();
            let task = suite::toy_cpu(&spec).unwrap();
            assert_eq!(task.goals().len(), ops.len() << (2 * w));
            let mut seen = BTreeSet::new();
            for g in task.goals() {
                let code = field(g, 0, 2);
                let op = Opcode::ALL[code as usize];
                assert!(ops.contains(&op));
                let (r0, r1) = (field(g, 2, w), field(g, 2 + w, w));
                let after = (field(g, 2 + 2 * w, w), field(g, 2 + 3 * w, w));
                assert_eq!(after, step(op, r0, r1, w), "{g}");
                seen.insert((code, r0, r1));
            }
            assert_eq!(seen.len(), task.goals().len());
            // every pre-state decides exactly one transition
            assert_eq!(task.initials().len(), task.goals().len());
        }
    }
}

#[test]
fn toy_cpu_rejects_bad_specs() {
    assert!(ToyCpuSpec::new(0, &Opcode::ALL).is_err());
    assert!(ToyCpuSpec::new(4, &Opcode::ALL).is_err());
    assert!(ToyCpuSpec::new(2, &[]).is_err());
    assert!(ToyCpuSpec::new(2, &[Opcode::Add, Opcode::Add]).is_err());
}

#[test]
fn reward_threshold_keeps_high_scores() {
    let task = suite::from_reward(5, |z| z.values().count_ones() as f64, 4.0, &[vec![0, 1]]).unwrap();
    let want: BTreeSet<u32> = (0..32u32).filter(|v| v.count_ones() >= 4).collect();
    assert_eq!(values(&task), want);
    assert!(suite::from_reward(3, |_| 0.0, 1.0, &[vec![0]]).is_err());
}

#[test]
fn random_goals_are_seeded() {
    let a = suite::random_goals(8, 32, 5, 11).unwrap();
    let b = suite::random_goals(8, 32, 5, 11).unwrap();
    let c = suite::random_goals(8, 32, 5, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(values(&a), values(&c));
    assert_eq!(a.goals().len(), 32);
    assert!(suite::random_goals(3, 9, 1, 0).is_err());
}

#[test]
fn generator_specs_build_and_round_trip() {
    let cases = [
        ("addition", "w=2", "addition:w=2"),
        ("string", "L=6;p=2", "string:L=6;p=2"),
        ("parity", "n=5", "parity:n=5"),
        ("toycpu", "w=1,ops=ADD+MOV", "toycpu:w=1;ops=ADD+MOV"),
        ("threshold", "n=6,theta=4,frame=2", "threshold:n=6;theta=4;frame=2"),
        ("random", "", "random"),
    ];
    for (name, params, id) in cases {
        let spec = GeneratorSpec::parse(name, params).unwrap();
        assert_eq!(spec.id(), id);
        let task = spec.build().unwrap();
        assert_eq!(read_task(&write_task(&task)).unwrap(), task, "{id}");
    }
    assert!(GeneratorSpec::parse("parity", "m=3").unwrap().build().is_err());
    assert!(GeneratorSpec::parse("nope", "").unwrap().build().is_err());
    assert!(GeneratorSpec::parse("parity", "n").is_err());
}
