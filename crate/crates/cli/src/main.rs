use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use jetinv_core::equations::eikonal_sample;
use jetinv_core::harness::{
    compat_summary, emit_report, forms_summary, frames_summary, run_suite, Suite, SuiteConfig,
};
use jetinv_core::invariants::{eval_invariant, InvariantId};
use jetinv_core::frames::eval_numeric;
use jetinv_core::jetspace::JetPoint;
use jetinv_core::motion::{cayley_from_json, prolong_action, random_motion, Motion};
use jetinv_core::sampling::{case_rng, random_jet};
use jetinv_core::scalar::{format_f64, parse_rational, Q};

#[derive(Parser)]
#[command(name = "jetinv", version, about = "Exact differential invariants of Euclidean motions on jets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SuiteArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Jet order; each suite has its own default.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Numeric suites only.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated rational poles, e.g. `0,1/2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alphas: Vec<String>,
    /// Polar degree for the syzygy suite.
    #[arg(long)]
    s: Option<usize>,
    /// Report path; a summary goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the verification suites.
    Suites,
    /// Run a verification suite and emit its report.
    Verify {
        suite: String,
        #[command(flatten)]
        args: SuiteArgs,
    },
    /// Same as `verify invariance`.
    Invariance(SuiteArgs),
    /// Same as `verify counts`.
    Counts(SuiteArgs),
    /// Same as `verify syzygy`.
    Syzygy(SuiteArgs),
    /// Same as `verify lowrel`.
    Lowrel(SuiteArgs),
    /// Same as `verify tresse`.
    Tresse(SuiteArgs),
    /// Same as `verify eikonal`.
    Eikonal(SuiteArgs),
    /// With `--alphas`, the ODE and spectrum report for those poles;
    /// otherwise the compat suite.
    Compat {
        #[command(flatten)]
        args: SuiteArgs,
        #[arg(long, allow_hyphen_values = true)]
        u0: Option<String>,
    },
    /// With `--alphas`, every Omega form as JSON; otherwise the forms suite.
    Forms(SuiteArgs),
    /// With `--jet`, the eigenframe and structure constants; otherwise the frames suite.
    Frames {
        #[command(flatten)]
        args: SuiteArgs,
        #[arg(long)]
        jet: Option<PathBuf>,
    },
    /// Evaluate one catalog invariant at a jet.
    Eval {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        invariant: String,
    },
    /// Print a motion from a Cayley parameter file or a seed.
    Motion {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// JSON `{"S": [[..]], "b": [..]}`.
        #[arg(long)]
        cayley: Option<PathBuf>,
    },
    /// Apply a motion to a jet.
    Prolong {
        #[arg(long)]
        jet: PathBuf,
        /// Motion JSON `{"R": .., "b": ..}` or Cayley JSON `{"S": .., "b": ..}`.
        #[arg(long)]
        motion: PathBuf,
    },
    /// Print a seeded random jet.
    Sample {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Sample the eikonal equation instead of the full jet space.
        #[arg(long)]
        eikonal: bool,
    },
}

fn parse_alphas(raw: &[String]) -> Result<Vec<Q>> {
    raw.iter()
        .map(|s| parse_rational(s.trim()).with_context(|| format!("bad pole {s:?}")))
        .collect()
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_jet(path: &Path) -> Result<JetPoint> {
    Ok(JetPoint::from_json(&read_json(path)?)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON serializes"));
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn suite_config(suite: Suite, a: &SuiteArgs) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig::new(suite, a.n)
        .with_trials(a.trials)
        .with_seed(a.seed)
        .with_alphas(parse_alphas(&a.alphas)?);
    if let Some(k) = a.order {
        cfg = cfg.with_order(k);
    }
    if let Some(t) = a.tolerance {
        cfg = cfg.with_tolerance(t);
    }
    if let Some(s) = a.s {
        cfg = cfg.with_s(s);
    }
    Ok(cfg)
}

fn run(suite: Suite, a: &SuiteArgs) -> Result<ExitCode> {
    let cfg = suite_config(suite, a)?;
    let report = run_suite(&cfg)?;
    if let Some(path) = &a.out {
        emit_report(&report, path)?;
    }
    println!(
        "{}: {} records, {} failures, max exact residual {}, max numeric residual {}, {:.2}s",
        report.suite,
        report.records.len(),
        report.failures,
        report.max_exact_residual.as_deref().unwrap_or("-"),
        report.max_numeric_residual.as_deref().unwrap_or("-"),
        report.wall_time.as_secs_f64(),
    );
    for line in report.failure_lines().iter().take(20) {
        println!("  FAIL {line}");
    }
    Ok(exit(report.passed()))
}

fn load_motion(path: &Path) -> Result<Motion> {
    let v = read_json(path)?;
    if v.get("S").is_some() {
        Ok(cayley_from_json(&v)?)
    } else {
        Ok(Motion::from_json(&v)?)
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Suites => {
            for s in Suite::ALL {
                println!("{:<11} {}", s.name(), s.description());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, args } => run(suite.parse()?, &args),
        Command::Invariance(a) => run(Suite::Invariance, &a),
        Command::Counts(a) => run(Suite::Counts, &a),
        Command::Syzygy(a) => run(Suite::Syzygy, &a),
        Command::Lowrel(a) => run(Suite::Lowrel, &a),
        Command::Tresse(a) => run(Suite::Tresse, &a),
        Command::Eikonal(a) => run(Suite::Eikonal, &a),
        Command::Compat { args, u0 } => {
            if args.alphas.is_empty() {
                if u0.is_some() {
                    bail!("--u0 needs --alphas");
                }
                return run(Suite::Compat, &args);
            }
            let u0 = u0.map(|s| parse_rational(&s)).transpose()?;
            let (v, ok) = compat_summary(args.n, &parse_alphas(&args.alphas)?, u0.as_ref())?;
            print_json(&v);
            Ok(exit(ok))
        }
        Command::Forms(a) => {
            if a.alphas.is_empty() {
                return run(Suite::Forms, &a);
            }
            let (v, ok) = forms_summary(a.n, &parse_alphas(&a.alphas)?)?;
            print_json(&v);
            Ok(exit(ok))
        }
        Command::Frames { args, jet } => match jet {
            Some(path) => {
                print_json(&frames_summary(&read_jet(&path)?)?);
                Ok(ExitCode::SUCCESS)
            }
            None => run(Suite::Frames, &args),
        },
        Command::Eval { jet, invariant } => {
            let j = read_jet(&jet)?;
            let id: InvariantId = invariant.parse()?;
            if id.is_algebraic() {
                println!("{}", eval_invariant(&id, &j)?);
            } else {
                println!("{}", format_f64(eval_numeric(&id, &j)?));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Motion { n, seed, cayley } => {
            let m = match cayley {
                Some(path) => cayley_from_json(&read_json(&path)?)?,
                None => random_motion(&mut case_rng(seed, 0), n),
            };
            print_json(&m.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Prolong { jet, motion } => {
            let j = read_jet(&jet)?;
            let g = load_motion(&motion)?;
            if g.n() != j.n() {
                bail!("motion acts on R^{} but the jet lives over R^{}", g.n(), j.n());
            }
            print_json(&prolong_action(&g, &j).to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { n, order, seed, eikonal } => {
            let mut rng = case_rng(seed, 0);
            let j = if eikonal {
                eikonal_sample(n, order, &mut rng).jet
            } else {
                random_jet(&mut rng, n, order)
            };
            print_json(&j.to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
