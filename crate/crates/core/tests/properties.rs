use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use intension::learn::{fit_intensional, fit_strongest, observed_frame, strongest_clauses, SearchMode};
use intension::selftest::{random_refinement, random_sentence, random_state};
use intension::suite::random_goals;
use intension::{
    fit_extensional, read_task, run_curve, write_csv, Clause, ExperimentConfig, LearnerConfig,
    OstensiveDefinition, PartialState, Sentence, Task, Truth,
};

fn state(n: usize) -> impl Strategy<Value = PartialState> {
    (any::<u32>(), any::<u32>()).prop_map(move |(d, v)| PartialState::from_masks(n, d, v))
}

fn sentence_with(n: usize, width: usize, clauses: usize, seed: u64) -> Sentence {
    random_sentence(n, width, clauses, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A small random task and a proper sample of it.
fn sampled(n: usize, size: usize, frame: usize, seed: u64) -> (Task, OstensiveDefinition) {
    let task = random_goals(n, size.min(1 << n), frame.min(n), seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let m = rng.gen_range(1..task.goals().len());
    let o = task.sample_ostensive(m, &mut rng).unwrap();
    (task, o)
}

fn models(h: &Sentence) -> Vec<u32> {
    (0..1u32 << h.n()).filter(|&z| h.accepts_values(z)).collect()
}

proptest! {
    #[test]
    fn subsequence_is_a_partial_order(a in state(5), b in state(5), c in state(5)) {
        let le = |x: &PartialState, y: &PartialState| x.is_subsequence_of(y).unwrap();
        prop_assert!(le(&a, &a));
        if le(&a, &b) && le(&b, &a) {
            prop_assert_eq!(a, b);
        }
        if le(&a, &b) && le(&b, &c) {
            prop_assert!(le(&a, &c));
        }
    }

    #[test]
    fn state_text_round_trips(s in state(9)) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<PartialState>().unwrap(), s);
    }

    #[test]
    fn state_order_matches_text_order(a in state(6), b in state(6)) {
        let key = |s: &PartialState| s.to_string().replace('*', "!");
        prop_assert_eq!(a.cmp(&b), key(&a).cmp(&key(&b)));
    }

    #[test]
    fn completions_refine_and_enumerate(s in state(7)) {
        let all = s.completions().unwrap();
        prop_assert_eq!(all.len(), 1usize << s.free_count());
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
        for c in &all {
            prop_assert!(c.is_complete());
            prop_assert!(s.is_subsequence_of(c).unwrap());
        }
    }

    #[test]
    fn kleene_persistence(n in 1usize..=9, clauses in 0usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_sentence(n, n.min(3), clauses, &mut rng);
        let s = random_state(n, &mut rng);
        let t = random_refinement(&s, &mut rng);
        let before = h.eval(&s).unwrap();
        if before != Truth::Indeterminate {
            prop_assert_eq!(h.eval(&t).unwrap(), before);
        }
        if t.is_complete() {
            prop_assert_ne!(h.eval(&t).unwrap(), Truth::Indeterminate);
        }
    }

    #[test]
    fn adding_clauses_never_weakens(n in 2usize..=8, base in 0usize..6, extra in 0usize..6, seed in any::<u64>()) {
        let h = sentence_with(n, n.min(3), base, seed);
        let more = sentence_with(n, n.min(3), extra, seed.wrapping_add(1));
        let both = Sentence::new(n, n.min(3), h.clauses().iter().chain(more.clauses()).copied()).unwrap();
        prop_assert!(both.count_models().unwrap() <= h.count_models().unwrap());
    }

    #[test]
    fn counts_agree_with_satisfying_completions(n in 1usize..=9, clauses in 0usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_sentence(n, n.min(3), clauses, &mut rng);
        let naive = models(&h);
        prop_assert_eq!(h.count_models().unwrap(), naive.len() as u64);
        let s = random_state(n, &mut rng);
        let got: Vec<u32> = h.satisfying_completions(&s).unwrap().iter().map(|z| z.values()).collect();
        let want: Vec<u32> = s.completions().unwrap().iter().map(|z| z.values()).filter(|z| naive.contains(z)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn sentence_text_round_trips(n in 1usize..=10, clauses in 0usize..8, seed in any::<u64>()) {
        let h = sentence_with(n, n.min(3), clauses, seed);
        prop_assert_eq!(Sentence::parse(&h.to_string(), n, n.min(3)).unwrap(), h);
    }

    #[test]
    fn fits_are_exact(n in 2usize..=6, size in 2usize..=12, frame in 0usize..=6, seed in any::<u64>()) {
        let (_, o) = sampled(n, size, frame, seed);
        let cfg = LearnerConfig::new(n);
        let int = fit_intensional(&o, &cfg).unwrap();
        let strong = fit_strongest(&o, &cfg).unwrap();
        let ext = fit_extensional(&o);
        prop_assert!(int.is_exact(&o).unwrap());
        prop_assert!(strong.is_exact(&o).unwrap());
        prop_assert!(ext.is_exact(&o).unwrap());
        prop_assert!(int.weakness() >= strong.weakness());
        prop_assert!(strong.weakness() >= ext.weakness());
        for g in o.sample() {
            prop_assert!(int.accepts(g));
        }
    }

    #[test]
    fn exhaustive_search_is_optimal(
        n in 3usize..=5,
        size in 2usize..=10,
        frame in 0usize..=5,
        width in 1usize..=2,
        seed in any::<u64>(),
    ) {
        let (_, o) = sampled(n, size, frame, seed);
        let negatives: Vec<u32> = observed_frame(&o)
            .unwrap()
            .iter()
            .filter(|z| !o.contains_goal(z))
            .map(|z| z.values())
            .collect();
        let candidates: Vec<Clause> = strongest_clauses(&o, width)
            .unwrap()
            .into_iter()
            .filter(|c| negatives.iter().any(|&z| !c.satisfied_by(z)))
            .collect();
        prop_assume!(candidates.len() <= 12);

        // Independent oracle: try every subset of candidates.
        let mut best: Option<usize> = None;
        for subset in 0usize..1 << candidates.len() {
            let chosen: Vec<&Clause> = (0..candidates.len()).filter(|i| subset >> i & 1 == 1).map(|i| &candidates[i]).collect();
            if !negatives.iter().all(|&z| chosen.iter().any(|c| !c.satisfied_by(z))) {
                continue;
            }
            let count = (0..1u32 << n).filter(|&z| chosen.iter().all(|c| c.satisfied_by(z))).count();
            best = best.max(Some(count));
        }

        let cfg = LearnerConfig { exhaustive_threshold: 12, ..LearnerConfig::new(width) };
        match (fit_intensional(&o, &cfg), best) {
            (Ok(sol), Some(best)) => {
                prop_assert_eq!(sol.provenance().search, Some(SearchMode::Exhaustive));
                prop_assert_eq!(sol.weakness(), best as u64);
                prop_assert!(sol.is_exact(&o).unwrap());
            }
            (Err(intension::Error::ExactnessInfeasible { .. }), None) => {}
            (got, want) => prop_assert!(false, "fit {:?} but oracle {:?}", got.map(|s| s.weakness()), want),
        }
    }

    #[test]
    fn greedy_fits_stay_exact(n in 3usize..=6, size in 2usize..=12, frame in 0usize..=6, seed in any::<u64>()) {
        let (_, o) = sampled(n, size, frame, seed);
        let cfg = LearnerConfig { exhaustive_threshold: 0, ..LearnerConfig::new(n) };
        let sol = fit_intensional(&o, &cfg).unwrap();
        prop_assert!(sol.is_exact(&o).unwrap());
        prop_assert!(sol.weakness() >= fit_strongest(&o, &cfg).unwrap().weakness());
    }

    #[test]
    fn task_files_round_trip(n in 1usize..=8, size in 1usize..=16, frame in 0usize..=8, seed in any::<u64>()) {
        let task = random_goals(n, size.min(1 << n), frame.min(n), seed).unwrap();
        let text = intension::write_task(&task);
        let back = read_task(&text).unwrap();
        prop_assert_eq!(intension::write_task(&back), text);
        prop_assert_eq!(back, task);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn curves_are_deterministic(seed in any::<u64>(), task_seed in any::<u64>()) {
        let task = random_goals(5, 8, 3, task_seed).unwrap();
        let mut cfg = ExperimentConfig::new("random", task.n());
        cfg.sizes = vec![1, 4, 7];
        cfg.trials = 4;
        cfg.seed = seed;
        let a = write_csv(&run_curve(&task, &cfg).unwrap());
        let b = write_csv(&run_curve(&task, &cfg).unwrap());
        prop_assert_eq!(a, b);
    }
}
