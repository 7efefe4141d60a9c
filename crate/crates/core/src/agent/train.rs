//! Episode loop: random warm-up, one update per environment step, periodic
//! deterministic evaluation and a learning curve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::replay::{ReplayBuffer, Transition};
use super::sac::{LagrangianSac, SacConfig, UpdateStats};
use crate::env::{run_span, Carry, Control, Controller, EnvError, HouseholdEnv, HOURS_PER_DAY};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("non-finite update at episode {episode}, step {step}: {stats:?}")]
    NonFinite { episode: usize, step: usize, stats: UpdateStats },
    #[error("training span of {days} days is shorter than one {episode_days}-day episode")]
    SpanTooShort { days: usize, episode_days: usize },
    #[error("evaluation span days {start}..{end} lies outside the {len}-day series")]
    EvalSpan { start: usize, end: usize, len: usize },
    #[error("invalid training schedule: {0}")]
    Schedule(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSchedule {
    pub episodes: usize,
    pub eval_every: usize,
    /// Training episodes start on a day in `0..train_days − episode_days`.
    pub train_days: usize,
    /// Evaluation span used for the learning curve.
    pub eval_start_day: usize,
    pub eval_days: usize,
    pub seed: u64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self { episodes: 300, eval_every: 5, train_days: 60, eval_start_day: 53, eval_days: 7, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub eval_reward: f64,
    pub eval_cost: f64,
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub start_day: usize,
    pub reward: f64,
    pub cost: f64,
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub agent: LagrangianSac,
    pub curve: Vec<CurvePoint>,
    pub episodes: Vec<EpisodeLog>,
}

/// Battery states at the start of day `day`: carried SoC and capacity
/// loss, age equal to the hours elapsed since the series start.
pub fn carry_at_day(carry: Carry, day: usize) -> Carry {
    let age = (day * HOURS_PER_DAY) as f64;
    let mut c = carry;
    c.ess.age_hours = age;
    c.ev.age_hours = age;
    c
}

/// Acts with a policy: deterministic (`ξ = 0`) or sampled.
pub struct PolicyController<'a> {
    agent: &'a mut LagrangianSac,
    deterministic: bool,
}

impl<'a> PolicyController<'a> {
    pub fn new(agent: &'a mut LagrangianSac, deterministic: bool) -> Self {
        Self { agent, deterministic }
    }
}

impl Controller for PolicyController<'_> {
    fn act(&mut self, _env: &HouseholdEnv, obs: &[f64]) -> Control {
        Control::Normalized(self.agent.act(obs, self.deterministic))
    }
}

/// Deterministic policy over a shared, frozen snapshot.
pub struct FrozenPolicy<'a>(pub &'a LagrangianSac);

impl Controller for FrozenPolicy<'_> {
    fn act(&mut self, _env: &HouseholdEnv, obs: &[f64]) -> Control {
        Control::Normalized(self.0.act_deterministic(obs))
    }
}

/// Deterministic evaluation over `days` from `start_day` with fresh
/// batteries aged to the start day.
pub fn evaluate_policy(
    agent: &LagrangianSac,
    env: &mut HouseholdEnv,
    start_day: usize,
    days: usize,
) -> Result<(f64, f64), EnvError> {
    let carry = carry_at_day(Carry::initial(env.config()), start_day);
    let ep = run_span(env, &mut FrozenPolicy(agent), start_day * HOURS_PER_DAY, days, carry)?;
    Ok((ep.totals.reward, ep.totals.cost))
}

/// Trains a fresh agent; `env` supplies both training and evaluation data.
pub fn train(env: &mut HouseholdEnv, sac: SacConfig, schedule: &TrainSchedule) -> Result<TrainOutcome, TrainError> {
    let obs_dim = env.config().observation_dim();
    let act_dim = env.config().action_dim();
    let agent = LagrangianSac::new(obs_dim, act_dim, sac, schedule.seed);
    train_agent(env, agent, schedule, |_| {})
}

/// Continues training `agent`; `on_episode` sees each finished episode.
pub fn train_agent(
    env: &mut HouseholdEnv,
    mut agent: LagrangianSac,
    schedule: &TrainSchedule,
    mut on_episode: impl FnMut(&EpisodeLog),
) -> Result<TrainOutcome, TrainError> {
    let episode_days = env.config().episode_days;
    let days = env.series().days();
    if schedule.train_days < episode_days || schedule.train_days > days {
        return Err(TrainError::SpanTooShort { days: schedule.train_days.min(days), episode_days });
    }
    if schedule.eval_every == 0 {
        return Err(TrainError::Schedule("eval_every must be positive".into()));
    }
    let eval_end = schedule.eval_start_day + schedule.eval_days;
    if schedule.eval_days == 0 || eval_end > days {
        return Err(TrainError::EvalSpan { start: schedule.eval_start_day, end: eval_end, len: days });
    }

    let cfg = agent.config().clone();
    let act_dim = agent.act_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed ^ 0x5eed_7a1e);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity, agent.obs_dim(), act_dim);
    let eval_behavior_seed = env.config().behavior_seed;
    let mut carry = Carry::initial(env.config());
    let mut curve = Vec::new();
    let mut logs = Vec::with_capacity(schedule.episodes);
    let mut total_steps = 0usize;

    for episode in 0..schedule.episodes {
        let start_day = rng.random_range(0..=schedule.train_days - episode_days);
        env.set_behavior_seed(rng.random());
        carry = carry_at_day(carry, start_day);
        let mut obs = env.reset(start_day * HOURS_PER_DAY, carry)?;
        let (mut ep_reward, mut ep_cost) = (0.0, 0.0);
        loop {
            let action: Vec<f64> = if total_steps < cfg.warmup_steps {
                (0..act_dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
            } else {
                agent.act(&obs, false)
            };
            let outcome = env.step(&action)?;
            let next_obs = env.observation();
            ep_reward += outcome.reward;
            ep_cost += outcome.cost;
            // Episode ends are time limits, never true terminals.
            buffer.push(&Transition {
                obs: std::mem::take(&mut obs),
                action,
                reward: outcome.reward,
                cost: outcome.cost,
                next_obs: next_obs.clone(),
                terminal: false,
            });
            total_steps += 1;
            if total_steps >= cfg.warmup_steps && buffer.len() >= cfg.batch_size {
                for _ in 0..cfg.updates_per_step.max(1) {
                    let batch = buffer.sample(&mut rng, cfg.batch_size);
                    let stats = agent.update(&batch);
                    if !stats.is_finite() {
                        return Err(TrainError::NonFinite { episode, step: total_steps, stats });
                    }
                }
            }
            obs = next_obs;
            if outcome.terminated {
                break;
            }
        }
        carry = env.carry();
        let log = EpisodeLog {
            episode: episode + 1,
            start_day,
            reward: ep_reward,
            cost: ep_cost,
            lambda: agent.lambda(),
            alpha: agent.alpha(),
        };
        log::debug!("episode {} day {} reward {:.3} cost {:.3}", log.episode, start_day, ep_reward, ep_cost);
        on_episode(&log);
        logs.push(log);

        if (episode + 1) % schedule.eval_every == 0 {
            env.set_behavior_seed(eval_behavior_seed);
            let (eval_reward, eval_cost) =
                evaluate_policy(&agent, env, schedule.eval_start_day, schedule.eval_days)?;
            log::info!(
                "episode {} eval reward {:.3} cost {:.3} lambda {:.4} alpha {:.4}",
                episode + 1,
                eval_reward,
                eval_cost,
                agent.lambda(),
                agent.alpha()
            );
            curve.push(CurvePoint {
                episode: episode + 1,
                eval_reward,
                eval_cost,
                lambda: agent.lambda(),
                alpha: agent.alpha(),
            });
        }
    }
    env.set_behavior_seed(eval_behavior_seed);
    Ok(TrainOutcome { agent, curve, episodes: logs })
}
