//! Lagrangian soft actor-critic: squashed-Gaussian actor, twin reward and
//! twin cost critics with Polyak-averaged targets, entropy temperature
//! tuning and a projected dual ascent on the constraint multiplier.

use ndarray::{concatenate, s, Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::net::{DenseNet, ForwardCache};
use super::replay::Batch;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Guard inside `log(1 − u² + ε)`.
pub const SQUASH_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SacConfig {
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub lr_alpha: f64,
    /// Dual step size for the multiplier.
    pub lr_lambda: f64,
    pub warmup_steps: usize,
    /// Defaults to minus the action dimension.
    pub target_entropy: Option<f64>,
    /// Budget on the expected discounted constraint cost, in unscaled
    /// cost units.
    pub cost_budget: f64,
    pub initial_alpha: f64,
    pub initial_lambda: f64,
    /// Multiplies rewards before they enter the critics.
    pub reward_scale: f64,
    /// Multiplies constraint costs before they enter the critics.
    pub cost_scale: f64,
    pub updates_per_step: usize,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self {
            hidden: vec![256, 256],
            gamma: 0.99,
            tau: 0.005,
            batch_size: 256,
            buffer_capacity: 100_000,
            lr_actor: 3e-4,
            lr_critic: 3e-4,
            lr_alpha: 3e-4,
            lr_lambda: 1e-3,
            warmup_steps: 1000,
            target_entropy: None,
            cost_budget: 0.1,
            initial_alpha: 0.2,
            initial_lambda: 0.0,
            reward_scale: 1.0,
            cost_scale: 1.0,
            updates_per_step: 1,
        }
    }
}

/// Reparameterized actor output for a batch.
#[derive(Debug, Clone)]
pub struct ActorSample {
    pub actions: Array2<f64>,
    pub log_prob: Array1<f64>,
    pub mean: Array2<f64>,
    /// Clamped log standard deviation.
    pub log_std: Array2<f64>,
    /// True where the raw log standard deviation was clamped.
    pub clamped: Array2<bool>,
    pub noise: Array2<f64>,
    cache: ForwardCache,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpdateStats {
    pub reward_critic_loss: f64,
    pub cost_critic_loss: f64,
    pub actor_loss: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub mean_cost_value: f64,
    pub entropy: f64,
}

impl UpdateStats {
    pub fn is_finite(&self) -> bool {
        [
            self.reward_critic_loss,
            self.cost_critic_loss,
            self.actor_loss,
            self.alpha,
            self.lambda,
            self.mean_cost_value,
            self.entropy,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Twin critics with their targets and optimizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticPair {
    pub online: [DenseNet; 2],
    pub target: [DenseNet; 2],
    opt: [Adam; 2],
}

impl CriticPair {
    fn new(sizes: &[usize], lr: f64, rng: &mut ChaCha8Rng) -> Self {
        let a = DenseNet::new(sizes, rng);
        let b = DenseNet::new(sizes, rng);
        let n = a.num_params();
        Self {
            target: [a.clone(), b.clone()],
            online: [a, b],
            opt: [Adam::new(n, lr), Adam::new(n, lr)],
        }
    }

    fn soft_update(&mut self, tau: f64) {
        for k in 0..2 {
            self.target[k].soft_update_from(&self.online[k], tau);
        }
    }
}

/// Element-wise minimum of two column outputs and the index of the smaller.
fn twin_min(a: &Array2<f64>, b: &Array2<f64>) -> (Array1<f64>, Vec<usize>) {
    let n = a.nrows();
    let mut out = Array1::zeros(n);
    let mut which = vec![0; n];
    for r in 0..n {
        if b[[r, 0]] < a[[r, 0]] {
            out[r] = b[[r, 0]];
            which[r] = 1;
        } else {
            out[r] = a[[r, 0]];
        }
    }
    (out, which)
}

pub fn critic_input(obs: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    concatenate(Axis(1), &[obs.view(), actions.view()]).expect("matching batch sizes")
}

/// Mean squared Bellman error of `net` against fixed targets and its
/// parameter gradient.
pub fn critic_loss_grad(net: &DenseNet, input: &Array2<f64>, targets: &Array1<f64>) -> (f64, Vec<f64>) {
    let cache = net.forward_cached(input);
    let q = cache.output().column(0).to_owned();
    let n = targets.len() as f64;
    let err = &q - targets;
    let loss = err.mapv(|e| e * e).sum() / n;
    let d_out = (err.mapv(|e| 2.0 * e / n)).insert_axis(Axis(1));
    let mut grad = vec![0.0; net.num_params()];
    net.backward(&cache, &d_out, &mut grad);
    (loss, grad)
}

/// Loss `α·mean(−log π − H̄)` and its derivative w.r.t. `log α`.
pub fn alpha_loss_grad(log_alpha: f64, mean_log_prob: f64, target_entropy: f64) -> (f64, f64) {
    let alpha = log_alpha.exp();
    let loss = alpha * (-mean_log_prob - target_entropy);
    (loss, loss)
}

/// Projected dual ascent step.
pub fn dual_step(lambda: f64, mean_cost_value: f64, budget: f64, lr: f64) -> f64 {
    (lambda + lr * (mean_cost_value - budget)).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianSac {
    cfg: SacConfig,
    obs_dim: usize,
    act_dim: usize,
    actor: DenseNet,
    actor_opt: Adam,
    reward_critics: CriticPair,
    cost_critics: CriticPair,
    log_alpha: f64,
    alpha_opt: Adam,
    lambda: f64,
    target_entropy: f64,
    rng: ChaCha8Rng,
    updates: u64,
}

impl LagrangianSac {
    pub fn new(obs_dim: usize, act_dim: usize, cfg: SacConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut actor_sizes = vec![obs_dim];
        actor_sizes.extend(&cfg.hidden);
        actor_sizes.push(2 * act_dim);
        let mut actor = DenseNet::new(&actor_sizes, &mut rng);
        actor.scale_output_layer(0.1);
        let mut critic_sizes = vec![obs_dim + act_dim];
        critic_sizes.extend(&cfg.hidden);
        critic_sizes.push(1);
        let reward_critics = CriticPair::new(&critic_sizes, cfg.lr_critic, &mut rng);
        let cost_critics = CriticPair::new(&critic_sizes, cfg.lr_critic, &mut rng);
        let target_entropy = cfg.target_entropy.unwrap_or(-(act_dim as f64));
        Self {
            actor_opt: Adam::new(actor.num_params(), cfg.lr_actor),
            alpha_opt: Adam::new(1, cfg.lr_alpha),
            log_alpha: cfg.initial_alpha.ln(),
            lambda: cfg.initial_lambda.max(0.0),
            actor,
            reward_critics,
            cost_critics,
            target_entropy,
            obs_dim,
            act_dim,
            cfg,
            rng,
            updates: 0,
        }
    }

    pub fn config(&self) -> &SacConfig {
        &self.cfg
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set_lambda(&mut self, lambda: f64) {
        self.lambda = lambda.max(0.0);
    }

    pub fn target_entropy(&self) -> f64 {
        self.target_entropy
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn actor(&self) -> &DenseNet {
        &self.actor
    }

    pub fn actor_mut(&mut self) -> &mut DenseNet {
        &mut self.actor
    }

    pub fn reward_critics(&self) -> &CriticPair {
        &self.reward_critics
    }

    pub fn reward_critics_mut(&mut self) -> &mut CriticPair {
        &mut self.reward_critics
    }

    pub fn cost_critics(&self) -> &CriticPair {
        &self.cost_critics
    }

    pub fn cost_critics_mut(&mut self) -> &mut CriticPair {
        &mut self.cost_critics
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn noise(&mut self, rows: usize) -> Array2<f64> {
        let act_dim = self.act_dim;
        let rng = &mut self.rng;
        Array2::from_shape_simple_fn((rows, act_dim), || StandardNormal.sample(rng))
    }

    /// Squashed-Gaussian actions `tanh(μ + σ ⊙ ξ)` for given noise.
    pub fn actor_forward(&self, obs: &Array2<f64>, noise: &Array2<f64>) -> ActorSample {
        let m = self.act_dim;
        let cache = self.actor.forward_cached(obs);
        let out = cache.output();
        let mean = out.slice(s![.., ..m]).to_owned();
        let raw = out.slice(s![.., m..]);
        let clamped = raw.mapv(|v| !(LOG_STD_MIN..=LOG_STD_MAX).contains(&v));
        let log_std = raw.mapv(|v| v.clamp(LOG_STD_MIN, LOG_STD_MAX));
        let n = obs.nrows();
        let mut actions = Array2::zeros((n, m));
        let mut log_prob = Array1::zeros(n);
        let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        for r in 0..n {
            let mut lp = 0.0;
            for j in 0..m {
                let xi = noise[[r, j]];
                let sigma = log_std[[r, j]].exp();
                let u = (mean[[r, j]] + sigma * xi).tanh();
                actions[[r, j]] = u;
                lp += -0.5 * xi * xi - log_std[[r, j]] - half_log_2pi - (1.0 - u * u + SQUASH_EPS).ln();
            }
            log_prob[r] = lp;
        }
        ActorSample { actions, log_prob, mean, log_std, clamped, noise: noise.clone(), cache }
    }

    /// Action for one observation; `deterministic` uses zero noise.
    pub fn act(&mut self, obs: &[f64], deterministic: bool) -> Vec<f64> {
        let x = Array2::from_shape_vec((1, obs.len()), obs.to_vec()).expect("row vector");
        let noise = if deterministic { Array2::zeros((1, self.act_dim)) } else { self.noise(1) };
        self.actor_forward(&x, &noise).actions.row(0).to_vec()
    }

    /// Deterministic action without touching the RNG.
    pub fn act_deterministic(&self, obs: &[f64]) -> Vec<f64> {
        let x = Array2::from_shape_vec((1, obs.len()), obs.to_vec()).expect("row vector");
        self.actor_forward(&x, &Array2::zeros((1, self.act_dim))).actions.row(0).to_vec()
    }

    /// Bootstrapped targets for both critic pairs, with `next_noise` driving
    /// the actor at the successor states.
    pub fn critic_targets(&self, batch: &Batch, next_noise: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
        let next = self.actor_forward(&batch.next_obs, next_noise);
        let x = critic_input(&batch.next_obs, &next.actions);
        let (qr, _) = twin_min(&self.reward_critics.target[0].forward(&x), &self.reward_critics.target[1].forward(&x));
        let (qc, _) = twin_min(&self.cost_critics.target[0].forward(&x), &self.cost_critics.target[1].forward(&x));
        let alpha = self.alpha();
        let g = self.cfg.gamma;
        let live = batch.terminal.mapv(|l| g * (1.0 - l));
        let y_r = batch.rewards.mapv(|r| r * self.cfg.reward_scale) + &live * &(&qr - &next.log_prob.mapv(|lp| alpha * lp));
        // Costs are non-negative, so negative cost values are estimation error.
        let y_c = batch.costs.mapv(|c| c * self.cfg.cost_scale) + &live * &qc.mapv(|q| q.max(0.0));
        (y_r, y_c)
    }

    /// Actor loss `mean(α log π − min Q_R + λ min Q_C)` with the critics held
    /// fixed. Returns the loss, the actor gradient, the sample used and the
    /// batch mean of `max(0, min Q_C)`.
    pub fn actor_loss_grad(
        &self,
        obs: &Array2<f64>,
        noise: &Array2<f64>,
        lambda: f64,
        alpha: f64,
    ) -> (f64, Vec<f64>, ActorSample, f64) {
        let m = self.act_dim;
        let n = obs.nrows();
        let nf = n as f64;
        let sample = self.actor_forward(obs, noise);
        let x = critic_input(obs, &sample.actions);

        // Gradient of the critic terms w.r.t. the action.
        let mut d_action = Array2::<f64>::zeros((n, m));
        let mut critic_term = |pair: &CriticPair, coef: f64| -> Array1<f64> {
            let caches = [pair.online[0].forward_cached(&x), pair.online[1].forward_cached(&x)];
            let (qmin, which) = twin_min(caches[0].output(), caches[1].output());
            for k in 0..2 {
                let d_out = Array2::from_shape_fn((n, 1), |(r, _)| if which[r] == k { coef / nf } else { 0.0 });
                let d_in = pair.online[k].backward_input(&caches[k], &d_out);
                d_action += &d_in.slice(s![.., self.obs_dim..]);
            }
            qmin
        };
        let qr = critic_term(&self.reward_critics, -1.0);
        let qc = critic_term(&self.cost_critics, lambda);

        let loss = (alpha * &sample.log_prob - &qr + lambda * &qc).sum() / nf;

        let mut d_out = Array2::<f64>::zeros((n, 2 * m));
        for r in 0..n {
            for j in 0..m {
                let u = sample.actions[[r, j]];
                let xi = sample.noise[[r, j]];
                let sigma = sample.log_std[[r, j]].exp();
                let one_minus = 1.0 - u * u;
                let squash = 2.0 * u * one_minus / (one_minus + SQUASH_EPS);
                let dlp_dmean = squash;
                let dlp_dlogstd = -1.0 + sigma * xi * squash;
                let g_u = d_action[[r, j]];
                d_out[[r, j]] = alpha * dlp_dmean / nf + g_u * one_minus;
                d_out[[r, m + j]] = if sample.clamped[[r, j]] {
                    0.0
                } else {
                    alpha * dlp_dlogstd / nf + g_u * one_minus * sigma * xi
                };
            }
        }
        let mut grad = vec![0.0; self.actor.num_params()];
        self.actor.backward(&sample.cache, &d_out, &mut grad);
        let mean_qc = qc.mapv(|q| q.max(0.0)).mean().unwrap_or(0.0);
        (loss, grad, sample, mean_qc)
    }

    /// One full update on `batch`: critics, actor, temperature, multiplier
    /// and targets.
    pub fn update(&mut self, batch: &Batch) -> UpdateStats {
        let n = batch.len();
        let next_noise = self.noise(n);
        let (y_r, y_c) = self.critic_targets(batch, &next_noise);
        let x = critic_input(&batch.obs, &batch.actions);
        let mut reward_loss = 0.0;
        let mut cost_loss = 0.0;
        for k in 0..2 {
            let (l, g) = critic_loss_grad(&self.reward_critics.online[k], &x, &y_r);
            self.reward_critics.opt[k].step(self.reward_critics.online[k].params_mut(), &g);
            reward_loss += 0.5 * l;
            let (l, g) = critic_loss_grad(&self.cost_critics.online[k], &x, &y_c);
            self.cost_critics.opt[k].step(self.cost_critics.online[k].params_mut(), &g);
            cost_loss += 0.5 * l;
        }

        let noise = self.noise(n);
        let alpha = self.alpha();
        let (actor_loss, grad, sample, mean_qc) = self.actor_loss_grad(&batch.obs, &noise, self.lambda, alpha);
        self.actor_opt.step(self.actor.params_mut(), &grad);

        let mean_lp = sample.log_prob.mean().unwrap_or(0.0);
        let (_, g_alpha) = alpha_loss_grad(self.log_alpha, mean_lp, self.target_entropy);
        let mut la = [self.log_alpha];
        self.alpha_opt.step(&mut la, &[g_alpha]);
        self.log_alpha = la[0];

        // The critics see scaled costs, so the budget is scaled alike.
        let budget = self.cfg.cost_budget * self.cfg.cost_scale;
        self.lambda = dual_step(self.lambda, mean_qc, budget, self.cfg.lr_lambda);

        self.reward_critics.soft_update(self.cfg.tau);
        self.cost_critics.soft_update(self.cfg.tau);
        self.updates += 1;
        UpdateStats {
            reward_critic_loss: reward_loss,
            cost_critic_loss: cost_loss,
            actor_loss,
            alpha: self.alpha(),
            lambda: self.lambda,
            mean_cost_value: mean_qc,
            entropy: -mean_lp,
        }
    }

    pub fn soft_update_targets(&mut self, tau: f64) {
        self.reward_critics.soft_update(tau);
        self.cost_critics.soft_update(tau);
    }
}
