//! Orchestration shared by the command-line tool and tests: building the
//! environment from a run configuration, training, and evaluating any
//! policy over the held-out span, optionally across threads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::train::{carry_at_day, FrozenPolicy};
use crate::agent::{train_agent, EpisodeLog, LagrangianSac, TrainError, TrainOutcome};
use crate::baselines::RuleController;
use crate::config::{ConfigError, RunConfig};
use crate::data::ExogenousSeries;
use crate::env::{run_span, Carry, Controller, EnvError, HouseholdEnv, StepRecord, HOURS_PER_DAY};
use crate::report::Summary;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("evaluation span days {start}..{end} exceeds the {len}-day series")]
    Span { start: usize, end: usize, len: usize },
    #[error("policy `agent` needs a trained agent")]
    MissingAgent,
    #[error("agent expects {expected} observation features, environment provides {got}")]
    AgentShape { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Rule1,
    Rule2,
    Agent,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Rule1 => "rule1",
            PolicyKind::Rule2 => "rule2",
            PolicyKind::Agent => "agent",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule1" => Ok(PolicyKind::Rule1),
            "rule2" => Ok(PolicyKind::Rule2),
            "agent" => Ok(PolicyKind::Agent),
            other => Err(format!("unknown policy `{other}` (expected rule1, rule2 or agent)")),
        }
    }
}

pub fn build_env(cfg: &RunConfig, series: ExogenousSeries) -> Result<HouseholdEnv, ExperimentError> {
    Ok(HouseholdEnv::new(cfg.env.clone(), series)?)
}

/// Trains a fresh agent under `cfg`.
pub fn train_run(
    cfg: &RunConfig,
    series: &ExogenousSeries,
    on_episode: impl FnMut(&EpisodeLog),
) -> Result<TrainOutcome, ExperimentError> {
    let mut env = build_env(cfg, series.clone())?;
    let agent = LagrangianSac::new(
        cfg.env.observation_dim(),
        cfg.env.action_dim(),
        cfg.agent.clone(),
        cfg.train.seed,
    );
    Ok(train_agent(&mut env, agent, &cfg.train, on_episode)?)
}

#[derive(Debug, Clone)]
pub struct EvalRun {
    pub behavior_seed: u64,
    pub records: Vec<StepRecord>,
    pub summary: Summary,
}

fn run_one(
    cfg: &RunConfig,
    series: &ExogenousSeries,
    policy: PolicyKind,
    agent: Option<&LagrangianSac>,
    behavior_seed: u64,
) -> Result<EvalRun, ExperimentError> {
    let mut env = build_env(cfg, series.clone())?;
    env.set_behavior_seed(behavior_seed);
    let mut controller: Box<dyn Controller + '_> = match policy {
        PolicyKind::Rule1 => Box::new(RuleController::new(cfg.rule_params(series, true)?)),
        PolicyKind::Rule2 => Box::new(RuleController::new(cfg.rule_params(series, false)?)),
        PolicyKind::Agent => Box::new(FrozenPolicy(agent.ok_or(ExperimentError::MissingAgent)?)),
    };
    let start = cfg.eval.start_day;
    let carry = carry_at_day(Carry::initial(&cfg.env), start);
    let ep = run_span(&mut env, controller.as_mut(), start * HOURS_PER_DAY, cfg.eval.days, carry)?;
    let summary = Summary::from_records(&policy.to_string(), &ep.records, cfg.eval.departure_threshold);
    Ok(EvalRun { behavior_seed, records: ep.records, summary })
}

/// Evaluates `policy` over the configured span for each behaviour seed,
/// spreading seeds over up to `threads` workers. Results are ordered by seed.
pub fn evaluate(
    cfg: &RunConfig,
    series: &ExogenousSeries,
    policy: PolicyKind,
    agent: Option<&LagrangianSac>,
    threads: usize,
) -> Result<Vec<EvalRun>, ExperimentError> {
    let end = cfg.eval.start_day + cfg.eval.days;
    if end > series.days() {
        return Err(ExperimentError::Span { start: cfg.eval.start_day, end, len: series.days() });
    }
    if let Some(a) = agent {
        if a.obs_dim() != cfg.env.observation_dim() {
            return Err(ExperimentError::AgentShape { expected: a.obs_dim(), got: cfg.env.observation_dim() });
        }
    }
    let seeds: Vec<u64> = (0..cfg.eval.behavior_seeds as u64).map(|k| cfg.env.behavior_seed + k).collect();
    let threads = threads.clamp(1, seeds.len());
    if threads == 1 {
        return seeds.iter().map(|&s| run_one(cfg, series, policy, agent, s)).collect();
    }
    let chunk = seeds.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter().map(|&s| run_one(cfg, series, policy, agent, s)).collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(seeds.len());
        for h in handles {
            out.extend(h.join().expect("evaluation worker panicked")?);
        }
        Ok(out)
    })
}
