use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use intension::decision::{decision_trials, AbductionPolicy, PolicyKind};
use intension::harness::{self, DEFAULT_EPSILON};
use intension::learn::{fit, fit_extensional, LearnerConfig, LearnerKind};
use intension::suite::GeneratorSpec;
use intension::{read_task, selftest, write_task, Error, EvalMode, ExperimentConfig, Task};

const SEED_ENV: &str = "INTENSION_SEED";
const TIMING_ENV: &str = "INTENSION_TIMING";

#[derive(Parser)]
#[command(name = "intension", version, about = "Weakest-constraint learning over partial binary states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a task file from a generator.
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<String>,
    },
    /// Fit one learner on a seeded ostensive sample and print the solution.
    Fit {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Fit one learner, then run decision trials on the task's initial states.
    Eval {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value = "lex-first")]
        policy: String,
        #[arg(long = "eval-mode", default_value = "full")]
        eval_mode: String,
    },
    /// Run a sample-efficiency sweep and write CSV results.
    Curve {
        #[command(flatten)]
        source: Source,
        /// Comma-separated learners.
        #[arg(long, default_value = "intensional,strongest,extensional")]
        learner: String,
        /// Comma-separated sample sizes; defaults to every valid size.
        #[arg(long)]
        samples: Option<String>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Clause width bound; defaults to the variable count.
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, default_value = "lex-first")]
        policy: String,
        #[arg(long = "eval-mode", default_value = "heldout")]
        eval_mode: String,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long = "abort-on-error")]
        abort_on_error: bool,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Source {
    /// Task file.
    #[arg(long, conflicts_with = "generator")]
    task: Option<String>,
    /// Generator: addition, string, parity, toycpu, threshold, random.
    #[arg(long)]
    generator: Option<String>,
    /// Generator parameters, e.g. `w=2` or `w=2,ops=ADD+XOR`.
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value = "intensional")]
    learner: String,
    /// Number of observed goals; defaults to all but one.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    width: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_) => 1,
            Error::ExactnessInfeasible { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

impl Source {
    fn load(&self) -> Result<(String, Task), Failure> {
        match (&self.task, &self.generator) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure { code: 2, message: format!("{path}: {e}") })?;
                let task = read_task(&text).map_err(|e| Failure { code: 2, message: format!("{path}: {e}") })?;
                let id = std::path::Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().replace(',', "_"))
                    .unwrap_or_else(|| "task".into());
                Ok((id, task))
            }
            (None, Some(name)) => {
                let spec = GeneratorSpec::parse(name, &self.params)?;
                Ok((spec.id(), spec.build()?))
            }
            _ => Err(usage("give exactly one of --task or --generator")),
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn emit(out: Option<&str>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure { code: 2, message: format!("{path}: {e}") }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("bad {what} {s:?}"))))
        .collect()
}

fn fitted(
    task: &Task,
    args: &FitArgs,
) -> Result<(intension::OstensiveDefinition, intension::Solution), Failure> {
    let learner: LearnerKind = args.learner.parse()?;
    let m = args.samples.unwrap_or(task.goals().len().saturating_sub(1));
    let seed = resolve_seed(args.seed)?;
    let o = task.sample_ostensive(m, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let cfg = LearnerConfig::new(args.width.unwrap_or(task.n()));
    let sol = fit(learner, &o, &cfg)?;
    Ok((o, sol))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { source, out } => {
            if source.generator.is_none() {
                return Err(usage("gen needs --generator"));
            }
            let (_, task) = source.load()?;
            emit(out.as_deref(), &write_task(&task))
        }
        Command::Fit { source, fit } => {
            let (_, task) = source.load()?;
            let (o, sol) = fitted(&task, &fit)?;
            let observed: Vec<String> = o.sample().iter().map(|g| g.to_string()).collect();
            println!("# observed {}", observed.join(" "));
            println!("{sol}");
            println!("weakness {}", sol.weakness());
            Ok(())
        }
        Command::Eval { source, fit, policy, eval_mode } => {
            let (_, task) = source.load()?;
            let (o, sol) = fitted(&task, &fit)?;
            let policy = match policy.parse::<PolicyKind>()? {
                PolicyKind::LexFirst => AbductionPolicy::LexFirst,
                PolicyKind::Uniform => AbductionPolicy::Uniform,
                PolicyKind::ExtensionalFirst => AbductionPolicy::extensional_first(&fit_extensional(&o))?,
            };
            let evals: Vec<_> = match eval_mode.parse::<EvalMode>()? {
                EvalMode::FullS => task.initials().to_vec(),
                EvalMode::Heldout => task
                    .initials()
                    .iter()
                    .filter(|s| o.initials().binary_search(s).is_err())
                    .copied()
                    .collect(),
            };
            if evals.is_empty() {
                return Err(Error::EmptyEvalSet.into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(fit.seed)?);
            let outcomes = decision_trials(&task, &sol, &evals, &policy, Some(&mut rng))?;
            println!("{sol}");
            for outcome in &outcomes {
                println!("{outcome}");
            }
            let wins = outcomes.iter().filter(|o| o.success).count();
            println!("rate {:.6}", wins as f64 / outcomes.len() as f64);
            Ok(())
        }
        Command::Curve {
            source,
            learner,
            samples,
            trials,
            seed,
            width,
            policy,
            eval_mode,
            epsilon,
            out,
            abort_on_error,
        } => {
            let (id, task) = source.load()?;
            let mut cfg = ExperimentConfig::new(id, width.unwrap_or(task.n()));
            cfg.learners = parse_list(&learner, "learner")?;
            cfg.sizes = match samples {
                Some(list) => parse_list(&list, "sample size")?,
                None => (1..task.goals().len()).collect(),
            };
            cfg.trials = trials;
            cfg.seed = resolve_seed(seed)?;
            cfg.policy = policy.parse()?;
            cfg.eval_mode = eval_mode.parse()?;
            cfg.abort_on_error = abort_on_error;
            cfg.record_timing = std::env::var(TIMING_ENV).is_ok_and(|v| v == "1");

            let points = harness::run_curve(&task, &cfg)?;
            emit(out.as_deref(), &harness::write_csv(&points))?;
            let comparable = cfg.learners.contains(&LearnerKind::Intensional) && cfg.learners.len() > 1;
            if comparable {
                let report = harness::dominance_report(&points, epsilon)?;
                eprintln!("{report}");
                if !report.passed() {
                    return Err(Failure { code: 4, message: "dominance verdict FAIL".into() });
                }
            }
            Ok(())
        }
        Command::Selftest { seed } => {
            let checks = selftest::run(resolve_seed(seed)?);
            let mut failed = 0;
            for c in &checks {
                println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Failure { code: 2, message: format!("{failed} self-checks failed") });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
