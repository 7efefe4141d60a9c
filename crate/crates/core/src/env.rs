//! Hourly household environment: action decoding, power balance, cost
//! accounting and week-long episodes with battery carry-over.

use chrono::{Datelike, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ExogenousSeries, TariffPolicy};
use crate::degradation::{degradation_cost_step, AgeingBattery, AgeingModel, DegradationError, DegradationWeights};
use crate::ev::{arrival_soc, itinerary_for_day, BehaviorError, BehaviorParams, DailyItinerary};
use crate::household::{
    appliance_power, default_roster, step_temperature, Appliance, ApplianceSpec, ApplianceState, HouseholdError,
    HvacMode, ThermalParams,
};
use crate::storage::{clamp_power, dispatch_pv, step_soc, BatteryConfig, BatteryState, StorageError};

pub const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already terminated")]
    Terminated,
    #[error("no active episode; call reset first")]
    NotStarted,
    #[error("data exhausted: need hours {start}..{end} but series has {len}")]
    DataExhausted { start: usize, end: usize, len: usize },
    #[error("episodes must start at midnight (index {0})")]
    NotMidnight(usize),
    #[error("action has {got} entries, expected {expected}")]
    ActionDim { got: usize, expected: usize },
    #[error("power balance residual {0:e} kW")]
    Balance(f64),
    #[error("invalid environment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Household(#[from] HouseholdError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Degradation(#[from] DegradationError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// Comfort band and penalty weights for the constraint cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComfortParams {
    pub t_min: f64,
    pub t_max: f64,
    /// Penalty per °C above the band.
    pub w_over: f64,
    /// Penalty per °C below the band.
    pub w_under: f64,
    /// Penalty per unit of SoC shortfall at departure.
    pub w_departure: f64,
}

impl Default for ComfortParams {
    fn default() -> Self {
        Self { t_min: 20.0, t_max: 24.0, w_over: 1.0, w_under: 1.0, w_departure: 100.0 }
    }
}

impl ComfortParams {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_min + self.t_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardWeights {
    pub grid: f64,
    pub comfort: f64,
    pub degradation: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self { grid: 1.0, comfort: 0.0, degradation: 1.0 }
    }
}

/// Ranges mapped onto [−1, 1] before observations reach a learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObsBounds {
    pub temp_min: f64,
    pub temp_max: f64,
    pub price_max: f64,
    pub pv_max: f64,
    pub hours_until_departure_max: f64,
}

impl Default for ObsBounds {
    fn default() -> Self {
        Self { temp_min: -25.0, temp_max: 40.0, price_max: 1.0, pv_max: 6.6, hours_until_departure_max: 24.0 }
    }
}

fn scale(x: f64, lo: f64, hi: f64) -> f64 {
    (2.0 * (x - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub dt_hours: f64,
    pub episode_days: usize,
    pub pv_inverter_kw: f64,
    pub thermal: ThermalParams,
    pub comfort: ComfortParams,
    pub reward: RewardWeights,
    pub ess: BatteryConfig,
    pub ev: BatteryConfig,
    pub degradation_weights: DegradationWeights,
    pub appliances: Vec<ApplianceSpec>,
    pub behavior: BehaviorParams,
    pub tariff: TariffPolicy,
    pub obs: ObsBounds,
    /// Seed of the EV itinerary streams (one stream per calendar day).
    pub behavior_seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt_hours: 1.0,
            episode_days: 7,
            pv_inverter_kw: 6.6,
            thermal: ThermalParams::default(),
            comfort: ComfortParams::default(),
            reward: RewardWeights::default(),
            ess: BatteryConfig::home_battery(),
            ev: BatteryConfig::vehicle_battery(),
            degradation_weights: DegradationWeights::default(),
            appliances: default_roster(),
            behavior: BehaviorParams::default(),
            tariff: TariffPolicy::default(),
            obs: ObsBounds::default(),
            behavior_seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn horizon(&self) -> usize {
        self.episode_days * HOURS_PER_DAY
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if (self.dt_hours - 1.0).abs() > 1e-12 {
            return Err(EnvError::Config("only hourly steps are supported".into()));
        }
        if self.episode_days == 0 {
            return Err(EnvError::Config("episode_days must be positive".into()));
        }
        if self.comfort.t_min >= self.comfort.t_max {
            return Err(EnvError::Config("comfort band must satisfy t_min < t_max".into()));
        }
        let c = &self.comfort;
        let r = &self.reward;
        if [c.w_over, c.w_under, c.w_departure, r.grid, r.comfort, r.degradation]
            .iter()
            .any(|w| *w < 0.0)
        {
            return Err(EnvError::Config("weights must be non-negative".into()));
        }
        if !(self.tariff.sell_ratio > 0.0 && self.tariff.sell_ratio <= 1.0) {
            return Err(EnvError::Config("sell ratio must lie in (0, 1]".into()));
        }
        self.thermal.validate()?;
        self.ess.validate()?;
        self.ev.validate()?;
        self.behavior.validate()?;
        Ok(())
    }

    pub fn shiftable_count(&self) -> usize {
        self.appliances.iter().filter(|a| a.is_shiftable()).count()
    }

    /// Action dimension: HVAC, ESS, EV, PV plus one per shiftable appliance.
    pub fn action_dim(&self) -> usize {
        4 + self.shiftable_count()
    }

    pub fn observation_dim(&self) -> usize {
        OBS_FIXED + self.shiftable_count()
    }
}

/// Number of observation features that do not depend on the roster.
pub const OBS_FIXED: usize = 13;

/// Control request in physical units, before limits are applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalRequest {
    pub p_hvac: f64,
    /// Signed, positive charges.
    pub p_ess: f64,
    pub p_ev: f64,
    pub pv_request: f64,
    /// One entry per roster appliance; ignored for non-shiftable ones.
    pub appliance_on: Vec<bool>,
    /// Curtail PV and battery discharge so the household never exports.
    pub forbid_export: bool,
}

/// Maps a normalized action in [−1, 1]^m to a physical request.
pub fn decode_action(u: &[f64], cfg: &EnvConfig) -> Result<PhysicalRequest, EnvError> {
    if u.len() != cfg.action_dim() {
        return Err(EnvError::ActionDim { got: u.len(), expected: cfg.action_dim() });
    }
    let u: Vec<f64> = u.iter().map(|x| if x.is_finite() { x.clamp(-1.0, 1.0) } else { 0.0 }).collect();
    let signed = |x: f64, b: &BatteryConfig| if x >= 0.0 { x * b.p_charge_max } else { x * b.p_discharge_max };
    let mut shiftable = u[4..].iter();
    let appliance_on = cfg
        .appliances
        .iter()
        .map(|a| a.is_shiftable() && *shiftable.next().expect("dimension checked") >= 0.0)
        .collect();
    Ok(PhysicalRequest {
        p_hvac: (u[0] + 1.0) / 2.0 * cfg.thermal.p_hvac_max,
        p_ess: signed(u[1], &cfg.ess),
        p_ev: signed(u[2], &cfg.ev),
        pv_request: (u[3] + 1.0) / 2.0 * cfg.pv_inverter_kw,
        appliance_on,
        forbid_export: false,
    })
}

/// Net grid import (positive) or export (negative) in kW.
pub fn grid_power(appliances_kw: f64, p_hvac: f64, p_ess: f64, p_ev: f64, pv_dispatched: f64) -> f64 {
    appliances_kw + p_hvac + p_ess + p_ev - pv_dispatched
}

/// Energy cost of one hour of grid exchange; import at `buy`, export at `sell`.
pub fn grid_cost(p_grid: f64, buy: f64, sell: f64) -> f64 {
    0.5 * (buy - sell) * p_grid.abs() + 0.5 * (buy + sell) * p_grid
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComfortOutcome {
    pub v_over: f64,
    pub v_under: f64,
    pub v_departure: f64,
    pub cost: f64,
}

pub fn comfort_cost(t_in: f64, params: &ComfortParams, soc_ev: f64, soc_required: f64, departing: bool) -> ComfortOutcome {
    let v_over = (t_in - params.t_max).max(0.0);
    let v_under = (params.t_min - t_in).max(0.0);
    let v_departure = if departing { (soc_required - soc_ev).max(0.0) } else { 0.0 };
    ComfortOutcome {
        v_over,
        v_under,
        v_departure,
        cost: params.w_over * v_over + params.w_under * v_under + params.w_departure * v_departure,
    }
}

/// Battery state carried from one episode into the next.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Carry {
    pub ess: BatteryState,
    pub ev: BatteryState,
}

impl Carry {
    pub fn initial(cfg: &EnvConfig) -> Self {
        Self { ess: cfg.ess.initial_state(), ev: cfg.ev.initial_state() }
    }
}

/// One logged hour. Flows are those realized during the hour; temperatures
/// and SoCs are the values at its end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub timestamp: String,
    pub hour: u32,
    pub t_out: f64,
    pub t_in: f64,
    pub hvac_mode: HvacMode,
    pub p_hvac: f64,
    pub p_ess: f64,
    pub p_ev: f64,
    pub pv_available: f64,
    pub pv_dispatched: f64,
    pub p_appliances: f64,
    pub p_grid: f64,
    pub buy_price: f64,
    pub sell_price: f64,
    pub soc_ess: f64,
    pub soc_ev: f64,
    pub ev_home: bool,
    pub departing: bool,
    pub v_over: f64,
    pub v_under: f64,
    pub v_departure: f64,
    pub dq_ess: f64,
    pub dq_ev: f64,
    pub c_grid: f64,
    pub c_comfort: f64,
    pub c_deg: f64,
    pub reward: f64,
    pub constraint_cost: f64,
    pub balance_residual: f64,
    /// Realized appliance flags in roster order, `1` for on.
    pub appliances_on: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub cost: f64,
    pub terminated: bool,
    pub record: StepRecord,
}

/// Inputs a rule-based controller may read.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub index: usize,
    pub hour: u32,
    pub t_in: f64,
    pub t_out: f64,
    pub mode: HvacMode,
    pub buy_price: f64,
    pub pv_available: f64,
    pub soc_ess: f64,
    pub soc_ev: f64,
    pub ev_home: bool,
    /// Load of appliances that will run this hour if every shiftable one is
    /// requested on.
    pub base_load_kw: f64,
}

#[derive(Debug, Clone)]
pub struct HouseholdEnv {
    cfg: EnvConfig,
    series: ExogenousSeries,
    appliances: Vec<Appliance>,
    ess_model: AgeingModel,
    ev_model: AgeingModel,
    departure_median_hour: f64,
    // episode state
    t: usize,
    start: usize,
    steps: usize,
    active: bool,
    t_in: f64,
    ess: BatteryState,
    ev: BatteryState,
    appliance_states: Vec<ApplianceState>,
    itinerary: DailyItinerary,
    soc_at_departure: f64,
}

impl HouseholdEnv {
    pub fn new(cfg: EnvConfig, series: ExogenousSeries) -> Result<Self, EnvError> {
        cfg.validate()?;
        let appliances = cfg
            .appliances
            .iter()
            .cloned()
            .map(Appliance::new)
            .collect::<Result<Vec<_>, _>>()?;
        let ess_model = AgeingModel::for_chemistry(cfg.ess.chemistry);
        let ev_model = AgeingModel::for_chemistry(cfg.ev.chemistry);
        let departure_median_hour = cfg.behavior.departure.median().floor();
        let n = appliances.len();
        let itinerary = itinerary_for_day(cfg.behavior_seed, 0, &cfg.behavior);
        Ok(Self {
            t_in: cfg.thermal.initial_t_in,
            ess: cfg.ess.initial_state(),
            ev: cfg.ev.initial_state(),
            cfg,
            series,
            appliances,
            ess_model,
            ev_model,
            departure_median_hour,
            t: 0,
            start: 0,
            steps: 0,
            active: false,
            appliance_states: vec![ApplianceState::default(); n],
            itinerary,
            soc_at_departure: 0.0,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn series(&self) -> &ExogenousSeries {
        &self.series
    }

    pub fn set_behavior_seed(&mut self, seed: u64) {
        self.cfg.behavior_seed = seed;
    }

    /// Number of complete episodes that fit in the series.
    pub fn episode_starts(&self) -> usize {
        let days = self.series.days();
        (days + 1).saturating_sub(self.cfg.episode_days)
    }

    fn day_key(&self, t: usize) -> u64 {
        self.series.timestamp(t).date_naive().num_days_from_ce() as u64
    }

    fn hour_of(&self, t: usize) -> u32 {
        self.series.timestamp(t).hour()
    }

    /// Starts an episode at series index `start` (a midnight) with the given
    /// battery states.
    pub fn reset(&mut self, start: usize, carry: Carry) -> Result<Vec<f64>, EnvError> {
        let end = start + self.cfg.horizon();
        if end > self.series.len() {
            return Err(EnvError::DataExhausted { start, end, len: self.series.len() });
        }
        if self.hour_of(start) != 0 {
            return Err(EnvError::NotMidnight(start));
        }
        self.t = start;
        self.start = start;
        self.steps = 0;
        self.active = true;
        self.t_in = self.cfg.thermal.initial_t_in;
        self.ess = carry.ess;
        self.ev = carry.ev;
        self.appliance_states = vec![ApplianceState::default(); self.appliances.len()];
        self.itinerary = itinerary_for_day(self.cfg.behavior_seed, self.day_key(start), &self.cfg.behavior);
        self.soc_at_departure = self.ev.soc;
        Ok(self.observation())
    }

    pub fn carry(&self) -> Carry {
        Carry { ess: self.ess, ev: self.ev }
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn itinerary(&self) -> &DailyItinerary {
        &self.itinerary
    }

    pub fn mode(&self) -> HvacMode {
        self.cfg
            .thermal
            .mode(self.series.daily_mean_temp(self.t), self.t_in, self.cfg.comfort.midpoint())
    }

    fn hours_until_departure(&self, hour: u32) -> f64 {
        if !self.itinerary.is_home(hour) {
            0.0
        } else if hour < self.itinerary.depart_hour {
            (self.itinerary.depart_hour - hour) as f64
        } else {
            (24 - hour) as f64 + self.departure_median_hour
        }
    }

    pub fn context(&self) -> Context {
        let hour = self.hour_of(self.t);
        let base_load_kw = self
            .appliances
            .iter()
            .zip(&self.appliance_states)
            .map(|(a, s)| {
                let mut probe = *s;
                if a.project(&mut probe, true, hour) {
                    a.spec().power_kw()
                } else {
                    0.0
                }
            })
            .sum();
        Context {
            index: self.t,
            hour,
            t_in: self.t_in,
            t_out: self.series.temp_out(self.t),
            mode: self.mode(),
            buy_price: self.series.buy_price(self.t),
            pv_available: self.series.pv_available(self.t),
            soc_ess: self.ess.soc,
            soc_ev: self.ev.soc,
            ev_home: self.itinerary.is_home(hour),
            base_load_kw,
        }
    }

    /// Normalized observation of the current state.
    pub fn observation(&self) -> Vec<f64> {
        let t = self.t.min(self.series.len() - 1);
        let hour = self.hour_of(t);
        let b = &self.cfg.obs;
        let angle = 2.0 * std::f64::consts::PI * hour as f64 / 24.0;
        let price = self.series.buy_price(t);
        let mean_price = self.series.daily_mean_price(t);
        let soc_scale = |s: f64, c: &BatteryConfig| scale(s, c.soc_min, c.soc_max);
        let mut obs = vec![
            angle.sin(),
            angle.cos(),
            scale(self.t_in, b.temp_min, b.temp_max),
            scale(self.series.temp_out(t), b.temp_min, b.temp_max),
            soc_scale(self.ess.soc, &self.cfg.ess),
            soc_scale(self.ev.soc, &self.cfg.ev),
            scale(self.series.pv_available(t), 0.0, b.pv_max),
            scale(price, 0.0, b.price_max),
            if self.itinerary.is_home(hour) { 1.0 } else { -1.0 },
            scale(self.hours_until_departure(hour), 0.0, b.hours_until_departure_max),
            self.mode().sign(),
            ((price - mean_price) / mean_price).clamp(-1.0, 1.0),
            scale(1.0 / (1.0 + self.ess.age_hours).sqrt(), 0.0, 1.0),
        ];
        debug_assert_eq!(obs.len(), OBS_FIXED);
        for (a, s) in self.appliances.iter().zip(&self.appliance_states) {
            if a.spec().is_shiftable() {
                obs.push(scale(a.progress(s, hour), 0.0, 1.0));
            }
        }
        obs
    }

    /// Steps with a normalized action.
    pub fn step(&mut self, u: &[f64]) -> Result<StepOutcome, EnvError> {
        let req = decode_action(u, &self.cfg)?;
        self.step_request(&req)
    }

    /// Steps with a physical request; every limit is enforced here.
    pub fn step_request(&mut self, req: &PhysicalRequest) -> Result<StepOutcome, EnvError> {
        if !self.active {
            return Err(if self.steps > 0 { EnvError::Terminated } else { EnvError::NotStarted });
        }
        if req.appliance_on.len() != self.appliances.len() {
            return Err(EnvError::ActionDim { got: req.appliance_on.len(), expected: self.appliances.len() });
        }
        let dt = self.cfg.dt_hours;
        let t = self.t;
        let hour = self.hour_of(t);
        let ev_home = self.itinerary.is_home(hour);
        let mode = self.mode();
        let t_out = self.series.temp_out(t);
        let buy = self.series.buy_price(t);
        let sell = self.cfg.tariff.sell(buy);
        let pv_available = self.series.pv_available(t);

        let p_hvac = if mode == HvacMode::Off {
            0.0
        } else {
            req.p_hvac.clamp(0.0, self.cfg.thermal.p_hvac_max)
        };
        let mut p_ess = clamp_power(req.p_ess, self.ess.soc, &self.cfg.ess, true, dt);
        let mut p_ev = clamp_power(req.p_ev, self.ev.soc, &self.cfg.ev, ev_home, dt);
        let mut pv = dispatch_pv(pv_available, self.cfg.pv_inverter_kw, req.pv_request);

        let realized: Vec<bool> = self
            .appliances
            .iter()
            .zip(self.appliance_states.iter_mut())
            .zip(&req.appliance_on)
            .map(|((a, s), &r)| a.project(s, r, hour))
            .collect();
        let p_appl = appliance_power(&self.cfg.appliances, &realized);

        if req.forbid_export {
            let mut surplus = -grid_power(p_appl, p_hvac, p_ess, p_ev, pv);
            if surplus > 0.0 {
                let cut = surplus.min(pv);
                pv -= cut;
                surplus -= cut;
            }
            for p in [&mut p_ess, &mut p_ev] {
                if surplus > 0.0 && *p < 0.0 {
                    let cut = surplus.min(-*p);
                    *p += cut;
                    surplus -= cut;
                }
            }
        }

        let p_grid = grid_power(p_appl, p_hvac, p_ess, p_ev, pv);
        let supply = pv + p_grid.max(0.0) + (-p_ess).max(0.0) + (-p_ev).max(0.0);
        let demand = p_appl + p_hvac + p_ess.max(0.0) + p_ev.max(0.0) + (-p_grid).max(0.0);
        let residual = supply - demand;
        if residual.abs() > 1e-9 {
            return Err(EnvError::Balance(residual));
        }
        let c_grid = grid_cost(p_grid, buy, sell);

        let w = self.cfg.degradation_weights;
        let deg = degradation_cost_step(
            AgeingBattery { state: &mut self.ess, config: &self.cfg.ess, model: &self.ess_model },
            p_ess,
            AgeingBattery { state: &mut self.ev, config: &self.cfg.ev, model: &self.ev_model },
            p_ev,
            dt,
            &w,
        )?;
        self.ess.soc = step_soc(self.ess.soc, p_ess, &self.cfg.ess, dt)?;
        self.ess.last_power_kw = p_ess;
        self.ev.soc = step_soc(self.ev.soc, p_ev, &self.cfg.ev, dt)?;
        self.ev.last_power_kw = p_ev;
        self.t_in = step_temperature(self.t_in, t_out, p_hvac, mode, &self.cfg.thermal)?;

        let departing = ev_home && hour + 1 == self.itinerary.depart_hour;
        let comfort = comfort_cost(
            self.t_in,
            &self.cfg.comfort,
            self.ev.soc,
            self.cfg.behavior.soc_required,
            departing,
        );
        let weights = self.cfg.reward;
        let reward = -(weights.grid * c_grid + weights.comfort * comfort.cost + weights.degradation * deg.cost_eur);

        let record = StepRecord {
            index: t,
            timestamp: self.series.timestamp(t).to_rfc3339(),
            hour,
            t_out,
            t_in: self.t_in,
            hvac_mode: mode,
            p_hvac,
            p_ess,
            p_ev,
            pv_available,
            pv_dispatched: pv,
            p_appliances: p_appl,
            p_grid,
            buy_price: buy,
            sell_price: sell,
            soc_ess: self.ess.soc,
            soc_ev: self.ev.soc,
            ev_home,
            departing,
            v_over: comfort.v_over,
            v_under: comfort.v_under,
            v_departure: comfort.v_departure,
            dq_ess: deg.dq_ess,
            dq_ev: deg.dq_ev,
            c_grid,
            c_comfort: comfort.cost,
            c_deg: deg.cost_eur,
            reward,
            constraint_cost: comfort.cost,
            balance_residual: residual,
            appliances_on: realized.iter().map(|&z| if z { '1' } else { '0' }).collect(),
        };

        self.advance_clock(departing);
        let terminated = self.steps == self.cfg.horizon();
        if terminated {
            self.active = false;
        }
        Ok(StepOutcome { reward, cost: comfort.cost, terminated, record })
    }

    fn advance_clock(&mut self, departed: bool) {
        if departed {
            self.soc_at_departure = self.ev.soc;
        }
        self.t += 1;
        self.steps += 1;
        if self.t >= self.series.len() {
            return;
        }
        let hour = self.hour_of(self.t);
        if hour == 0 {
            self.itinerary = itinerary_for_day(self.cfg.behavior_seed, self.day_key(self.t), &self.cfg.behavior);
        } else if hour == self.itinerary.arrive_hour {
            let (soc, _) = arrival_soc(self.soc_at_departure, self.itinerary.distance_km, &self.cfg.behavior, &self.cfg.ev);
            self.ev.soc = soc.min(self.cfg.ev.soc_max);
        }
    }
}

/// What a controller returns each hour.
#[derive(Debug, Clone, PartialEq)]
pub enum Control {
    Normalized(Vec<f64>),
    Physical(PhysicalRequest),
}

pub trait Controller {
    fn act(&mut self, env: &HouseholdEnv, obs: &[f64]) -> Control;

    /// Called before each episode.
    fn reset(&mut self) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTotals {
    pub reward: f64,
    pub cost: f64,
    pub grid_eur: f64,
    pub degradation_eur: f64,
    pub comfort: f64,
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub records: Vec<StepRecord>,
    pub totals: EpisodeTotals,
    pub carry_out: Carry,
}

/// Runs `days` consecutive days from `start` under `controller`. The span
/// may exceed one configured episode; the environment is reset per episode
/// with batteries carried over.
pub fn run_span(
    env: &mut HouseholdEnv,
    controller: &mut dyn Controller,
    start: usize,
    days: usize,
    carry_in: Carry,
) -> Result<Episode, EnvError> {
    let episode_days = env.cfg.episode_days;
    let mut carry = carry_in;
    let mut records = Vec::with_capacity(days * HOURS_PER_DAY);
    let mut day = 0;
    controller.reset();
    while day < days {
        let chunk = episode_days.min(days - day);
        let saved = env.cfg.episode_days;
        env.cfg.episode_days = chunk;
        let result = run_chunk(env, controller, start + day * HOURS_PER_DAY, carry, &mut records);
        env.cfg.episode_days = saved;
        carry = result?;
        day += chunk;
    }
    let totals = EpisodeTotals {
        reward: records.iter().map(|r| r.reward).sum(),
        cost: records.iter().map(|r| r.constraint_cost).sum(),
        grid_eur: records.iter().map(|r| r.c_grid).sum(),
        degradation_eur: records.iter().map(|r| r.c_deg).sum(),
        comfort: records.iter().map(|r| r.c_comfort).sum(),
    };
    Ok(Episode { records, totals, carry_out: carry })
}

fn run_chunk(
    env: &mut HouseholdEnv,
    controller: &mut dyn Controller,
    start: usize,
    carry: Carry,
    records: &mut Vec<StepRecord>,
) -> Result<Carry, EnvError> {
    let mut obs = env.reset(start, carry)?;
    loop {
        let outcome = match controller.act(env, &obs) {
            Control::Normalized(u) => env.step(&u)?,
            Control::Physical(req) => env.step_request(&req)?,
        };
        records.push(outcome.record);
        if outcome.terminated {
            return Ok(env.carry());
        }
        obs = env.observation();
    }
}

/// One configured episode (`episode_days` days).
pub fn run_episode(
    env: &mut HouseholdEnv,
    controller: &mut dyn Controller,
    start_day: usize,
    carry_in: Carry,
) -> Result<Episode, EnvError> {
    let days = env.cfg.episode_days;
    run_span(env, controller, start_day * HOURS_PER_DAY, days, carry_in)
}

/// Holds a fixed normalized action.
#[derive(Debug, Clone)]
pub struct ConstantController(pub Vec<f64>);

impl Controller for ConstantController {
    fn act(&mut self, _env: &HouseholdEnv, _obs: &[f64]) -> Control {
        Control::Normalized(self.0.clone())
    }
}
