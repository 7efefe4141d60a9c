//! Rule-based reference controllers: hysteresis HVAC, fixed-threshold ESS
//! arbitrage, immediate EV charging and earliest-start appliances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Control, Controller, HouseholdEnv, PhysicalRequest};
use crate::household::HvacMode;
use crate::storage::{clamp_power, dispatch_pv};

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("low price threshold {low} must be below high threshold {high}")]
    Thresholds { low: f64, high: f64 },
    #[error("percentile {0} outside [0, 1]")]
    Percentile(f64),
    #[error("no prices to derive thresholds from")]
    NoPrices,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleParams {
    /// Distance beyond the comfort edge that switches the HVAC on (°C).
    pub deadband_c: f64,
    pub low_price: f64,
    pub high_price: f64,
    pub allow_export: bool,
}

impl RuleParams {
    pub fn new(deadband_c: f64, low_price: f64, high_price: f64, allow_export: bool) -> Result<Self, RuleError> {
        if low_price.partial_cmp(&high_price) != Some(std::cmp::Ordering::Less) {
            return Err(RuleError::Thresholds { low: low_price, high: high_price });
        }
        Ok(Self { deadband_c, low_price, high_price, allow_export })
    }

    /// Thresholds at the given percentiles of `prices`.
    pub fn from_prices(prices: &[f64], low_q: f64, high_q: f64, allow_export: bool) -> Result<Self, RuleError> {
        Self::new(0.5, percentile(prices, low_q)?, percentile(prices, high_q)?, allow_export)
    }

    /// The export-permitting variant (`rule1`) with 30th/70th percentiles.
    pub fn rule1(prices: &[f64]) -> Result<Self, RuleError> {
        Self::from_prices(prices, 0.3, 0.7, true)
    }

    /// As [`RuleParams::rule1`] but never exporting (`rule2`).
    pub fn rule2(prices: &[f64]) -> Result<Self, RuleError> {
        Self::from_prices(prices, 0.3, 0.7, false)
    }
}

/// Linear-interpolation percentile, `q` in [0, 1].
pub fn percentile(values: &[f64], q: f64) -> Result<f64, RuleError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(RuleError::Percentile(q));
    }
    if values.is_empty() {
        return Err(RuleError::NoPrices);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// HVAC hysteresis: on below `t_min − deadband` (heating) or above
/// `t_max + deadband` (cooling), off once past the comfort midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Hysteresis {
    pub on: bool,
}

impl Hysteresis {
    pub fn update(&mut self, mode: HvacMode, t_in: f64, t_min: f64, t_max: f64, deadband: f64) -> bool {
        let mid = 0.5 * (t_min + t_max);
        self.on = match mode {
            HvacMode::Off => false,
            HvacMode::Heating => {
                if t_in <= t_min - deadband {
                    true
                } else if t_in >= mid {
                    false
                } else {
                    self.on
                }
            }
            HvacMode::Cooling => {
                if t_in >= t_max + deadband {
                    true
                } else if t_in <= mid {
                    false
                } else {
                    self.on
                }
            }
        };
        self.on
    }
}

#[derive(Debug, Clone)]
pub struct RuleController {
    pub params: RuleParams,
    hysteresis: Hysteresis,
    last_mode: HvacMode,
}

impl RuleController {
    pub fn new(params: RuleParams) -> Self {
        Self { params, hysteresis: Hysteresis::default(), last_mode: HvacMode::Off }
    }

    /// The physical request for the environment's current hour.
    pub fn request(&mut self, env: &HouseholdEnv) -> PhysicalRequest {
        let cfg = env.config();
        let ctx = env.context();
        let dt = cfg.dt_hours;
        if ctx.mode != self.last_mode {
            self.hysteresis.on = false;
            self.last_mode = ctx.mode;
        }
        let hvac_on = self.hysteresis.update(
            ctx.mode,
            ctx.t_in,
            cfg.comfort.t_min,
            cfg.comfort.t_max,
            self.params.deadband_c,
        );
        let p_hvac = if hvac_on { cfg.thermal.p_hvac_max } else { 0.0 };

        let p_ev_req = if ctx.ev_home && ctx.soc_ev < cfg.behavior.soc_required { cfg.ev.p_charge_max } else { 0.0 };
        let p_ev = clamp_power(p_ev_req, ctx.soc_ev, &cfg.ev, ctx.ev_home, dt);

        let pv = dispatch_pv(ctx.pv_available, cfg.pv_inverter_kw, cfg.pv_inverter_kw);
        let p_ess = if ctx.buy_price <= self.params.low_price {
            cfg.ess.p_charge_max
        } else if ctx.buy_price >= self.params.high_price {
            // Cover local demand only, so the battery never exports.
            let net_load = ctx.base_load_kw + p_hvac + p_ev - pv;
            -net_load.clamp(0.0, cfg.ess.p_discharge_max)
        } else {
            0.0
        };

        PhysicalRequest {
            p_hvac,
            p_ess,
            p_ev,
            pv_request: cfg.pv_inverter_kw,
            appliance_on: vec![true; cfg.appliances.len()],
            forbid_export: !self.params.allow_export,
        }
    }
}

impl Controller for RuleController {
    fn act(&mut self, env: &HouseholdEnv, _obs: &[f64]) -> Control {
        Control::Physical(self.request(env))
    }

    fn reset(&mut self) {
        self.hysteresis = Hysteresis::default();
        self.last_mode = HvacMode::Off;
    }
}
