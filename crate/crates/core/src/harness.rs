//! Training-set generation along optimal trajectories, policy evaluation
//! and multi-trial experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domains::{self, builtin_domain, GeneratorSpec, ProblemSize};
use crate::learner::{self, BagParams, Learner, LearnerParams};
use crate::policy::{dl_act, ensemble_act, DecisionList, Ensemble, Policy, TrainingInstance};
use crate::pstrips::{is_goal, sample_transition, DomainDef, GroundAction, State};
use crate::seed;
use crate::solver::{self, optimal_actions_at, reachable, solve, value_iterate, SolverParams};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Solver(#[from] solver::Error),
    #[error(transparent)]
    Learner(#[from] learner::Error),
    #[error(transparent)]
    Domain(#[from] domains::Error),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("training set is empty")]
    EmptyTrainingSet,
}

/// Parameters of `train(I, p, t, h)`.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub spec: GeneratorSpec,
    pub trajectories: usize,
    pub horizon: usize,
    pub seed: u64,
    pub node_budget: usize,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub spec: GeneratorSpec,
    pub episodes: usize,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingSet {
    pub instances: Vec<TrainingInstance>,
    /// Index of the trajectory each instance came from.
    pub trajectory: Vec<u32>,
    /// Initial states whose goal is unreachable within the horizon.
    pub skipped: usize,
    /// Initial states that already satisfied their goal.
    pub already_solved: usize,
}

impl TrainingSet {
    /// Instance ids grouped by trajectory.
    pub fn units(&self) -> Vec<Vec<u32>> {
        let tags: Vec<Option<u32>> = self.trajectory.iter().map(|&t| Some(t)).collect();
        crate::trainset::units(&tags)
    }
}

/// Resampling unit for bagging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BagUnit {
    /// Whole trajectories, so every member sees complete solution paths.
    #[default]
    Trajectory,
    Instance,
}

impl std::str::FromStr for BagUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trajectory" => Ok(BagUnit::Trajectory),
            "instance" => Ok(BagUnit::Instance),
            _ => Err(format!("unknown bag unit `{s}`")),
        }
    }
}

/// Solved neighbourhood of one trajectory. The full reachable closure is
/// solved once when it fits the budget; otherwise every step re-solves.
enum Oracle {
    Closure(solver::StateGraph, solver::ValueTable),
    PerStep,
}

fn step_labels(
    oracle: &Oracle,
    q: &State,
    dom: &DomainDef,
    params: &SolverParams,
) -> Result<(f64, Vec<GroundAction>), solver::Error> {
    let h = params.horizon;
    match oracle {
        Oracle::Closure(g, t) => {
            let i = g.node(q).ok_or(solver::Error::UnknownState)?;
            Ok((t.value(i, h), optimal_actions_at(q, g, t, h, params.tie_epsilon)?))
        }
        Oracle::PerStep => {
            let (g, t) = solve(q, dom, params)?;
            Ok((t.value(0, h), optimal_actions_at(q, &g, &t, h, params.tie_epsilon)?))
        }
    }
}

enum Trajectory {
    Solved,
    Skipped,
    Instances(Vec<TrainingInstance>),
}

fn trajectory(cfg: &TrainConfig, j: usize) -> Result<Trajectory, Error> {
    let dom = &*cfg.spec.dom;
    let mut rng = seed::stream(cfg.seed, "trajectory", j as u64);
    let mut q = cfg.spec.sample(&mut rng);
    if is_goal(&q) {
        return Ok(Trajectory::Solved);
    }
    let mut params = SolverParams::new(cfg.horizon);
    params.node_budget = cfg.node_budget;
    let oracle = match reachable(&q, dom, None, cfg.horizon, cfg.node_budget) {
        Ok(g) => {
            let t = value_iterate(&g, &params);
            Oracle::Closure(g, t)
        }
        Err(solver::Error::Budget(_)) => Oracle::PerStep,
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for step in 0..cfg.horizon {
        if is_goal(&q) {
            break;
        }
        let (value, alpha) = step_labels(&oracle, &q, dom, &params)?;
        if value <= 0.0 {
            if step == 0 {
                return Ok(Trajectory::Skipped);
            }
            break;
        }
        let a = alpha[rng.gen_range(0..alpha.len())].clone();
        let next = sample_transition(&q, dom, &a, &mut rng).map_err(solver::Error::from)?;
        out.push(TrainingInstance::new(q, alpha));
        q = next;
    }
    Ok(Trajectory::Instances(out))
}

/// Samples `t` initial states and records `(q, α)` along simulated optimal
/// trajectories. Trajectory `j` draws from its own stream.
pub fn generate_training(cfg: &TrainConfig) -> Result<TrainingSet, Error> {
    let runs: Vec<Trajectory> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|j| trajectory(cfg, j))
        .collect::<Result<_, _>>()?;
    let mut set = TrainingSet::default();
    for (j, r) in runs.into_iter().enumerate() {
        match r {
            Trajectory::Solved => set.already_solved += 1,
            Trajectory::Skipped => set.skipped += 1,
            Trajectory::Instances(v) => {
                set.trajectory.extend(std::iter::repeat(j as u32).take(v.len()));
                set.instances.extend(v);
            }
        }
    }
    if set.skipped > 0 {
        log::info!("skipped {} initial states with zero value at horizon {}", set.skipped, cfg.horizon);
    }
    Ok(set)
}

/// Anything that picks an action in a state.
pub trait Actor: Sync {
    fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction>;
}

impl Actor for DecisionList {
    fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction> {
        dl_act(self, q, dom)
    }
}

impl Actor for Ensemble {
    fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction> {
        ensemble_act(self, q, dom)
    }
}

impl Actor for Policy {
    fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction> {
        Policy::act(self, q, dom)
    }
}

/// The exact solver used as a policy: least optimal action at the horizon.
pub struct SolverPolicy(pub SolverParams);

impl Actor for SolverPolicy {
    fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction> {
        let (g, t) = solve(q, dom, &self.0).ok()?;
        optimal_actions_at(q, &g, &t, self.0.horizon, self.0.tie_epsilon)
            .ok()?
            .into_iter()
            .next()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Episode {
    pub success: bool,
    pub steps: usize,
}

/// Runs `pol` from `q0` until a goal or `e` actions.
pub fn run_episode<R: Rng + ?Sized>(
    pol: &dyn Actor,
    q0: &State,
    dom: &DomainDef,
    e: usize,
    rng: &mut R,
) -> Episode {
    let mut q = q0.clone();
    for steps in 0..e {
        if is_goal(&q) {
            return Episode { success: true, steps };
        }
        let Some(a) = pol.act(&q, dom) else {
            return Episode { success: false, steps };
        };
        q = sample_transition(&q, dom, &a, rng).expect("policies choose legal actions");
    }
    Episode {
        success: is_goal(&q),
        steps: e,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub phi: f64,
    /// Mean steps of successful episodes; `None` when none succeeded.
    pub psi: Option<f64>,
    #[serde(skip)]
    pub episodes: Vec<Episode>,
}

fn summarize(episodes: Vec<Episode>) -> EvalResult {
    let wins: Vec<usize> = episodes.iter().filter(|e| e.success).map(|e| e.steps).collect();
    EvalResult {
        phi: wins.len() as f64 / episodes.len().max(1) as f64,
        psi: (!wins.is_empty()).then(|| wins.iter().sum::<usize>() as f64 / wins.len() as f64),
        episodes,
    }
}

/// Test problem `i` of an evaluation seed and the stream its episode uses.
pub fn test_problem(spec: &GeneratorSpec, eval_seed: u64, i: usize) -> (State, rand_chacha::ChaCha8Rng) {
    let mut rng = seed::stream(eval_seed, "test-problem", i as u64);
    let q = spec.sample(&mut rng);
    (q, seed::stream(eval_seed, "episode", i as u64))
}

/// Success fraction `φ` and mean successful length `ψ` over fresh test
/// problems.
pub fn evaluate(pol: &dyn Actor, cfg: &EvalConfig) -> EvalResult {
    let dom = &*cfg.spec.dom;
    let episodes = (0..cfg.episodes)
        .into_par_iter()
        .map(|i| {
            let (q, mut rng) = test_problem(&cfg.spec, cfg.seed, i);
            run_episode(pol, &q, dom, cfg.horizon, &mut rng)
        })
        .collect();
    summarize(episodes)
}

/// Everything one experiment needs, as read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub domain: String,
    pub train_size: ProblemSize,
    pub trajectories: usize,
    pub horizon: usize,
    pub learner: LearnerParams,
    pub bag: Option<BagParams>,
    pub bag_unit: BagUnit,
    pub test_size: ProblemSize,
    pub episodes: usize,
    pub eval_horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// Use one test set for every trial instead of redrawing it.
    pub fix_test_set: bool,
    pub node_budget: usize,
    pub expected_phi: Option<f64>,
    pub expected_psi: Option<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, Error> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Config {
                line: i + 1,
                msg: "expected `key = value`".into(),
            })?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(Error::Config {
                    line: i + 1,
                    msg: format!("duplicate key `{k}`"),
                });
            }
        }
        const KEYS: &[&str] = &[
            "name", "domain", "train_size", "trajectories", "horizon", "depth", "width", "beam", "bag", "sample",
            "bag_unit", "test_size", "episodes", "eval_horizon", "trials", "seed", "fix_test_set", "node_budget",
            "expected_phi", "expected_psi",
        ];
        if let Some((k, (line, _))) = kv.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(Error::Config {
                line: *line,
                msg: format!("unknown key `{k}`"),
            });
        }
        fn get<T: std::str::FromStr>(kv: &BTreeMap<String, (usize, String)>, k: &str) -> Result<Option<T>, Error> {
            match kv.get(k) {
                None => Ok(None),
                Some((line, v)) => v.parse().map(Some).map_err(|_| Error::Config {
                    line: *line,
                    msg: format!("bad value `{v}` for `{k}`"),
                }),
            }
        }
        fn req<T: std::str::FromStr>(kv: &BTreeMap<String, (usize, String)>, k: &str) -> Result<T, Error> {
            get(kv, k)?.ok_or_else(|| Error::Config {
                line: 0,
                msg: format!("missing key `{k}`"),
            })
        }
        let positive = |k: &str, v: usize| -> Result<usize, Error> {
            if v == 0 {
                Err(Error::Config {
                    line: kv.get(k).map_or(0, |x| x.0),
                    msg: format!("`{k}` must be at least 1"),
                })
            } else {
                Ok(v)
            }
        };
        let bag = match (get::<usize>(&kv, "bag")?, get::<usize>(&kv, "sample")?) {
            (None, None) => None,
            (Some(z), Some(m)) => Some(BagParams {
                z: positive("bag", z)?,
                m: positive("sample", m)?,
            }),
            _ => {
                return Err(Error::Config {
                    line: 0,
                    msg: "`bag` and `sample` go together".into(),
                })
            }
        };
        let domain: String = req(&kv, "domain")?;
        Ok(ExperimentConfig {
            name: get(&kv, "name")?.unwrap_or_else(|| domain.clone()),
            train_size: req(&kv, "train_size")?,
            trajectories: positive("trajectories", req(&kv, "trajectories")?)?,
            horizon: positive("horizon", req(&kv, "horizon")?)?,
            learner: LearnerParams {
                d: positive("depth", req(&kv, "depth")?)?,
                w: positive("width", req(&kv, "width")?)?,
                b: positive("beam", req(&kv, "beam")?)?,
            },
            bag,
            bag_unit: get(&kv, "bag_unit")?.unwrap_or_default(),
            test_size: req(&kv, "test_size")?,
            episodes: positive("episodes", req(&kv, "episodes")?)?,
            eval_horizon: positive("eval_horizon", req(&kv, "eval_horizon")?)?,
            trials: positive("trials", get(&kv, "trials")?.unwrap_or(1))?,
            seed: req(&kv, "seed")?,
            fix_test_set: get(&kv, "fix_test_set")?.unwrap_or(false),
            node_budget: get(&kv, "node_budget")?.unwrap_or(SolverParams::DEFAULT_BUDGET),
            expected_phi: get(&kv, "expected_phi")?,
            expected_psi: get(&kv, "expected_psi")?,
            domain,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub phi: f64,
    pub psi: Option<f64>,
    pub train_instances: usize,
    pub skipped: usize,
    /// Rules of the single list, or summed over ensemble members.
    pub rules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub name: String,
    pub domain: String,
    pub learner: String,
    pub phi: f64,
    /// Mean of the defined per-trial `ψ` values.
    pub psi: Option<f64>,
    pub trials: usize,
    pub per_trial: Vec<TrialResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

/// Reference values with the tolerance check `|Δφ| ≤ 0.08`, `|Δψ| ≤ 10%`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub phi: Option<f64>,
    pub psi: Option<f64>,
    pub within_tolerance: bool,
}

impl ResultRow {
    pub const CSV_HEADER: &'static str = "name,domain,learner,phi,psi,trials";

    pub fn csv(&self) -> String {
        let mut s = String::new();
        let psi = self.psi.map_or("NA".to_string(), |p| format!("{p:.2}"));
        write!(s, "{},{},{},{:.4},{},{}", self.name, self.domain, self.learner, self.phi, psi, self.trials).unwrap();
        s
    }
}

/// A policy learned in one trial.
pub enum Learned {
    List(DecisionList),
    Ensemble(Ensemble),
}

impl Learned {
    pub fn actor(&self) -> &dyn Actor {
        match self {
            Learned::List(l) => l,
            Learned::Ensemble(e) => e,
        }
    }

    pub fn into_policy(self) -> Policy {
        match self {
            Learned::List(l) => Policy::List(l),
            Learned::Ensemble(e) => Policy::Ensemble(e),
        }
    }

    pub fn rules(&self) -> usize {
        match self {
            Learned::List(l) => l.rules.len(),
            Learned::Ensemble(e) => e.members.iter().map(|m| m.rules.len()).sum(),
        }
    }
}

/// Learns a single list, or a bagged ensemble when `bag` is given.
/// Bootstrap samples draw whole `units` when given, single instances otherwise.
pub fn learn(
    dom: &DomainDef,
    f: &[TrainingInstance],
    params: LearnerParams,
    bag: Option<BagParams>,
    units: Option<&[Vec<u32>]>,
    learn_seed: u64,
) -> Result<Learned, Error> {
    if f.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let l = Learner::new(dom, f, params)?;
    Ok(match bag {
        None => Learned::List(l.learn_all().list),
        Some(b) => {
            let members = match units {
                Some(u) => l.bag_units(b, learn_seed, u)?,
                None => l.bag(b, learn_seed)?,
            };
            Learned::Ensemble(Ensemble {
                members: members.into_iter().map(|o| o.list).collect(),
            })
        }
    })
}

/// Per-trial seeds: (training, learning, evaluation).
pub fn trial_seeds(master: u64, trial: usize, fix_test_set: bool) -> (u64, u64, u64) {
    let t = trial as u64;
    let eval = if fix_test_set {
        seed::stream(master, "eval", 0).gen()
    } else {
        seed::stream(master, "eval", t).gen()
    };
    (
        seed::stream(master, "train", t).gen(),
        seed::stream(master, "learn", t).gen(),
        eval,
    )
}

/// Training set and policy of one trial, with its scores.
pub struct TrialArtifacts {
    pub result: TrialResult,
    pub training: TrainingSet,
    pub policy: Learned,
}

/// One trial: fresh training set, learned policy and test draw.
pub fn run_trial(cfg: &ExperimentConfig, dom: &Arc<DomainDef>, trial: usize) -> Result<TrialArtifacts, Error> {
    let (train_seed, learn_seed, eval_seed) = trial_seeds(cfg.seed, trial, cfg.fix_test_set);
    let train = TrainConfig {
        spec: GeneratorSpec::new(dom.clone(), &cfg.domain, cfg.train_size.clone())?,
        trajectories: cfg.trajectories,
        horizon: cfg.horizon,
        seed: train_seed,
        node_budget: cfg.node_budget,
    };
    let set = generate_training(&train)?;
    let units = match cfg.bag_unit {
        BagUnit::Trajectory => Some(set.units()),
        BagUnit::Instance => None,
    };
    let pol = learn(dom, &set.instances, cfg.learner, cfg.bag, units.as_deref(), learn_seed)?;
    let eval = EvalConfig {
        spec: GeneratorSpec::new(dom.clone(), &cfg.domain, cfg.test_size.clone())?,
        episodes: cfg.episodes,
        horizon: cfg.eval_horizon,
        seed: eval_seed,
    };
    let r = evaluate(pol.actor(), &eval);
    log::info!(
        "trial {trial}: {} instances, {} rules, phi {:.3}",
        set.instances.len(),
        pol.rules(),
        r.phi
    );
    Ok(TrialArtifacts {
        result: TrialResult {
            phi: r.phi,
            psi: r.psi,
            train_instances: set.instances.len(),
            skipped: set.skipped,
            rules: pol.rules(),
        },
        training: set,
        policy: pol,
    })
}

/// Runs every trial and averages `φ` and the defined `ψ` values.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRow, Error> {
    let dom = Arc::new(builtin_domain(&cfg.domain)?);
    let per_trial = (0..cfg.trials)
        .map(|k| run_trial(cfg, &dom, k).map(|t| t.result))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(cfg, per_trial))
}

pub fn aggregate(cfg: &ExperimentConfig, per_trial: Vec<TrialResult>) -> ResultRow {
    let phi = per_trial.iter().map(|t| t.phi).sum::<f64>() / per_trial.len().max(1) as f64;
    let psis: Vec<f64> = per_trial.iter().filter_map(|t| t.psi).collect();
    let psi = (!psis.is_empty()).then(|| psis.iter().sum::<f64>() / psis.len() as f64);
    let expected = (cfg.expected_phi.is_some() || cfg.expected_psi.is_some()).then(|| {
        let phi_ok = cfg.expected_phi.is_none_or(|e| (phi - e).abs() <= 0.08);
        let psi_ok = cfg
            .expected_psi
            .is_none_or(|e| psi.is_some_and(|p| (p - e).abs() <= 0.1 * e));
        Expected {
            phi: cfg.expected_phi,
            psi: cfg.expected_psi,
            within_tolerance: phi_ok && psi_ok,
        }
    });
    ResultRow {
        name: cfg.name.clone(),
        domain: cfg.domain.clone(),
        learner: match cfg.bag {
            None => format!("list t={}", cfg.trajectories),
            Some(b) => format!("bag Z={} M={}", b.z, b.m),
        },
        phi,
        psi,
        trials: per_trial.len(),
        per_trial,
        expected,
    }
}
