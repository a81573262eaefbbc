//! Command-line front end.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use relpol::domains::{self, builtin_source, GeneratorSpec, ProblemSize, BUILTIN};
use relpol::harness::{self, evaluate, generate_training, BagUnit, learn, EvalConfig, ExperimentConfig, TrainConfig};
use relpol::learner::{self, BagParams, LearnerParams};
use relpol::policy::{parse_policy, Policy};
use relpol::pstrips::{self, parse_domain, DomainDef};
use relpol::solver::{self, SolverParams};
use relpol::trainset;

#[derive(Parser)]
#[command(name = "relpol", version, about = "Learn and evaluate taxonomic decision-list policies")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More logging on standard error; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct DomainArg {
    /// Built-in domain name or path to a domain file.
    #[arg(long)]
    domain: String,
    /// Problem generator for a domain file (a built-in domain name).
    #[arg(long)]
    family: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a training set along optimal trajectories.
    GenData {
        #[command(flatten)]
        dom: DomainArg,
        #[arg(long)]
        size: String,
        #[arg(long)]
        trajectories: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = SolverParams::DEFAULT_BUDGET)]
        node_budget: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Learn a decision list or a bagged ensemble from a training set.
    Learn {
        #[command(flatten)]
        dom: DomainArg,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        beam: usize,
        /// Ensemble size.
        #[arg(long, requires_all = ["sample", "seed"])]
        bag: Option<usize>,
        /// Bootstrap sample size per member.
        #[arg(long, requires = "bag")]
        sample: Option<usize>,
        /// Resampling unit: `trajectory` groups lines by their trajectory tag.
        #[arg(long, default_value = "trajectory")]
        bag_unit: BagUnit,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a policy on fresh test problems.
    Eval {
        #[command(flatten)]
        dom: DomainArg,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        size: String,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Run a multi-trial experiment from a config file.
    Experiment {
        config: PathBuf,
        /// Print a CSV row instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Keep per-trial training sets and policies here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Parse a file and print it back in canonical form.
    Inspect {
        #[command(subcommand)]
        what: Inspect,
    },
    /// List built-in domains, or print one verbatim.
    Domains { name: Option<String> },
}

#[derive(Subcommand)]
enum Inspect {
    Domain {
        path: PathBuf,
    },
    Policy {
        #[arg(long)]
        domain: String,
        path: PathBuf,
    },
    Train {
        #[arg(long)]
        domain: String,
        path: PathBuf,
    },
}

/// A failure with its exit code.
struct Fail(u8, String);

impl Fail {
    fn usage(msg: impl Into<String>) -> Fail {
        Fail(2, msg.into())
    }
    fn io(path: &Path, e: std::io::Error) -> Fail {
        Fail(1, format!("{}: {e}", path.display()))
    }
}

impl From<pstrips::Error> for Fail {
    fn from(e: pstrips::Error) -> Fail {
        Fail(3, e.to_string())
    }
}

impl From<domains::Error> for Fail {
    fn from(e: domains::Error) -> Fail {
        match e {
            domains::Error::BadSize(..) | domains::Error::SizeMismatch(_) => Fail(2, e.to_string()),
            _ => Fail(3, e.to_string()),
        }
    }
}

impl From<solver::Error> for Fail {
    fn from(e: solver::Error) -> Fail {
        match e {
            solver::Error::Budget(_) => Fail(4, e.to_string()),
            solver::Error::Domain(d) => d.into(),
            _ => Fail(1, e.to_string()),
        }
    }
}

impl From<learner::Error> for Fail {
    fn from(e: learner::Error) -> Fail {
        match e {
            learner::Error::EmptyTrainingSet => Fail(5, e.to_string()),
            learner::Error::BadParams(_) => Fail(2, e.to_string()),
            _ => Fail(1, e.to_string()),
        }
    }
}

impl From<harness::Error> for Fail {
    fn from(e: harness::Error) -> Fail {
        match e {
            harness::Error::Solver(e) => e.into(),
            harness::Error::Learner(e) => e.into(),
            harness::Error::Domain(e) => e.into(),
            harness::Error::Config { .. } => Fail(2, e.to_string()),
            harness::Error::EmptyTrainingSet => Fail(5, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::io(path, e))
}

/// Loads a built-in domain by name, or a domain file.
fn load_domain(name: &str) -> Result<DomainDef, Fail> {
    match builtin_source(name) {
        Ok(src) => Ok(parse_domain(src)?),
        Err(_) if Path::new(name).exists() => Ok(parse_domain(&read(Path::new(name))?)?),
        Err(e) => Err(Fail(3, e.to_string())),
    }
}

fn generator(arg: &DomainArg, size: &str) -> Result<GeneratorSpec, Fail> {
    let dom = Arc::new(load_domain(&arg.domain)?);
    let family = arg.family.as_deref().unwrap_or(&arg.domain);
    let size: ProblemSize = size.parse()?;
    Ok(GeneratorSpec::new(dom, family, size)?)
}

fn positive(flag: &str, v: usize) -> Result<usize, Fail> {
    if v == 0 {
        Err(Fail::usage(format!("--{flag} must be at least 1")))
    } else {
        Ok(v)
    }
}

#[derive(Serialize)]
struct GenMeta<'a> {
    domain: &'a str,
    size: String,
    trajectories: usize,
    horizon: usize,
    seed: u64,
    node_budget: usize,
    instances: usize,
    skipped: usize,
    already_solved: usize,
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::GenData {
            dom,
            size,
            trajectories,
            horizon,
            seed,
            node_budget,
            output,
        } => {
            let cfg = TrainConfig {
                spec: generator(&dom, &size)?,
                trajectories: positive("trajectories", trajectories)?,
                horizon: positive("horizon", horizon)?,
                seed,
                node_budget,
            };
            let set = generate_training(&cfg)?;
            let file = fs::File::create(&output).map_err(|e| Fail::io(&output, e))?;
            let mut w = BufWriter::new(file);
            trainset::write_tagged(&mut w, &cfg.spec.dom, &set.instances, &set.trajectory)
                .and_then(|_| w.flush())
                .map_err(|e| Fail::io(&output, e))?;
            let meta = GenMeta {
                domain: &dom.domain,
                size: cfg.spec.size.to_string(),
                trajectories,
                horizon,
                seed,
                node_budget,
                instances: set.instances.len(),
                skipped: set.skipped,
                already_solved: set.already_solved,
            };
            let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
            write(&meta_path(&output), &text)?;
            log::info!("{} instances, {} skipped", set.instances.len(), set.skipped);
        }
        Cmd::Learn {
            dom,
            train,
            depth,
            width,
            beam,
            bag,
            sample,
            bag_unit,
            seed,
            output,
        } => {
            let d = load_domain(&dom.domain)?;
            let file = fs::File::open(&train).map_err(|e| Fail::io(&train, e))?;
            let (f, tags) = trainset::read_tagged(BufReader::new(file), &d).map_err(|e| match e {
                trainset::Error::Io(e) => Fail::io(&train, e),
                e => Fail(1, format!("{}: {e}", train.display())),
            })?;
            let params = LearnerParams {
                d: positive("depth", depth)?,
                w: positive("width", width)?,
                b: positive("beam", beam)?,
            };
            let bag = match (bag, sample) {
                (Some(z), Some(m)) => Some(BagParams {
                    z: positive("bag", z)?,
                    m: positive("sample", m)?,
                }),
                _ => None,
            };
            let units = match bag_unit {
                BagUnit::Trajectory => Some(trainset::units(&tags)),
                BagUnit::Instance => None,
            };
            let pol = learn(&d, &f, params, bag, units.as_deref(), seed.unwrap_or(0))?;
            write(&output, &pol.into_policy().to_string(&d))?;
        }
        Cmd::Eval {
            dom,
            policy,
            size,
            episodes,
            horizon,
            seed,
        } => {
            let spec = generator(&dom, &size)?;
            let pol: Policy = parse_policy(&read(&policy)?, &spec.dom).map_err(|e| Fail(6, e.to_string()))?;
            let cfg = EvalConfig {
                spec,
                episodes: positive("episodes", episodes)?,
                horizon: positive("horizon", horizon)?,
                seed,
            };
            let r = evaluate(&pol, &cfg);
            if cli.verbose > 0 {
                for (i, e) in r.episodes.iter().enumerate() {
                    eprintln!("episode {i}: success={} steps={}", e.success, e.steps);
                }
            }
            println!("{}", serde_json::to_string(&r).expect("results serialize"));
        }
        Cmd::Experiment { config, csv, out_dir } => {
            let cfg = ExperimentConfig::parse(&read(&config)?)?;
            let dom = Arc::new(load_domain(&cfg.domain)?);
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir).map_err(|e| Fail::io(dir, e))?;
            }
            let mut per_trial = Vec::new();
            for k in 0..cfg.trials {
                let t = harness::run_trial(&cfg, &dom, k)?;
                if let Some(dir) = &out_dir {
                    let mut buf = Vec::new();
                    trainset::write_tagged(&mut buf, &dom, &t.training.instances, &t.training.trajectory).expect("in-memory write");
                    let train_path = dir.join(format!("trial{k}.train.jsonl"));
                    write(&train_path, &String::from_utf8(buf).expect("utf-8"))?;
                    write(&dir.join(format!("trial{k}.policy")), &t.policy.into_policy().to_string(&dom))?;
                }
                per_trial.push(t.result);
            }
            let row = harness::aggregate(&cfg, per_trial);
            let json = serde_json::to_string_pretty(&row).expect("results serialize");
            if let Some(dir) = &out_dir {
                write(&dir.join("result.json"), &(json.clone() + "\n"))?;
            }
            if csv {
                println!("{}", harness::ResultRow::CSV_HEADER);
                println!("{}", row.csv());
            } else {
                println!("{json}");
            }
        }
        Cmd::Inspect { what } => match what {
            Inspect::Domain { path } => {
                print!("{}", parse_domain(&read(&path)?)?);
            }
            Inspect::Policy { domain, path } => {
                let d = load_domain(&domain)?;
                let p = parse_policy(&read(&path)?, &d).map_err(|e| Fail(6, e.to_string()))?;
                print!("{}", p.to_string(&d));
            }
            Inspect::Train { domain, path } => {
                let d = load_domain(&domain)?;
                let f = trainset::read_instances(read(&path)?.as_bytes(), &d)
                    .map_err(|e| Fail(1, format!("{}: {e}", path.display())))?;
                let out = std::io::stdout();
                trainset::write_instances(out.lock(), &d, &f).map_err(|e| Fail(1, e.to_string()))?;
            }
        },
        Cmd::Domains { name } => match name {
            None => {
                for (n, _) in BUILTIN {
                    println!("{n}");
                }
            }
            Some(n) => print!("{}", builtin_source(&n).map_err(|e| Fail(3, e.to_string()))?),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::new().parse_filters(level).init();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
