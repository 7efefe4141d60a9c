//! Battery state-of-charge dynamics and PV dispatch.
//!
//! Power is one signed scalar per battery: positive charges, negative
//! discharges. Mutual exclusion of charging and discharging is therefore
//! structural.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on SoC bounds after a step.
pub const SOC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum StorageError {
    #[error("{battery}: SoC {soc} left [{min}, {max}]")]
    SocOutOfBounds {
        battery: String,
        soc: f64,
        min: f64,
        max: f64,
    },
    #[error("{battery}: invalid configuration: {reason}")]
    InvalidConfig { battery: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chemistry {
    Lfp,
    Nmc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    pub name: String,
    pub chemistry: Chemistry,
    pub energy_kwh: f64,
    pub capacity_ah: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    pub p_charge_max: f64,
    pub p_discharge_max: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub initial_soc: f64,
    /// Cell temperature used by the ageing model, in kelvin.
    pub temperature_k: f64,
}

impl BatteryConfig {
    /// Stationary LFP home battery.
    pub fn home_battery() -> Self {
        Self {
            name: "ess".into(),
            chemistry: Chemistry::Lfp,
            energy_kwh: 13.5,
            capacity_ah: 200.0,
            eta_c: 0.95,
            eta_d: 0.95,
            p_charge_max: 8.0,
            p_discharge_max: 11.5,
            soc_min: 0.1,
            soc_max: 1.0,
            initial_soc: 0.8,
            temperature_k: 298.15,
        }
    }

    /// NMC traction battery of the household EV.
    pub fn vehicle_battery() -> Self {
        Self {
            name: "ev".into(),
            chemistry: Chemistry::Nmc,
            energy_kwh: 70.0,
            capacity_ah: 175.0,
            eta_c: 0.95,
            eta_d: 0.95,
            p_charge_max: 11.0,
            p_discharge_max: 11.0,
            soc_min: 0.2,
            soc_max: 0.9,
            initial_soc: 0.9,
            temperature_k: 298.15,
        }
    }

    pub fn validate(&self) -> Result<(), StorageError> {
        let bad = |reason: &str| {
            Err(StorageError::InvalidConfig {
                battery: self.name.clone(),
                reason: reason.into(),
            })
        };
        if !(self.soc_min > 0.0 && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return bad("need 0 < soc_min < soc_max <= 1");
        }
        if !(self.eta_c > 0.0 && self.eta_c <= 1.0 && self.eta_d > 0.0 && self.eta_d <= 1.0) {
            return bad("efficiencies must lie in (0, 1]");
        }
        if self.energy_kwh <= 0.0 {
            return bad("energy must be positive");
        }
        if self.p_charge_max < 0.0 || self.p_discharge_max < 0.0 {
            return bad("power limits must be non-negative");
        }
        if !(self.soc_min..=self.soc_max).contains(&self.initial_soc) {
            return bad("initial SoC outside bounds");
        }
        if self.temperature_k <= 0.0 {
            return bad("temperature must be positive kelvin");
        }
        Ok(())
    }

    pub fn initial_state(&self) -> BatteryState {
        BatteryState {
            soc: self.initial_soc,
            ..BatteryState::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BatteryState {
    pub soc: f64,
    pub age_hours: f64,
    /// Cumulative capacity loss as a fraction of nominal capacity.
    pub q_loss_frac: f64,
    /// Signed terminal power of the last step, kW.
    pub last_power_kw: f64,
}

/// Limits a signed power request so that rate limits hold and the SoC after
/// `dt` hours lands inside `[soc_min, soc_max]`.
pub fn clamp_power(requested_kw: f64, soc: f64, cfg: &BatteryConfig, present: bool, dt: f64) -> f64 {
    if !present || dt <= 0.0 || !requested_kw.is_finite() {
        return 0.0;
    }
    let p = requested_kw.clamp(-cfg.p_discharge_max, cfg.p_charge_max);
    if p > 0.0 {
        let headroom = ((cfg.soc_max - soc) * cfg.energy_kwh / (cfg.eta_c * dt)).max(0.0);
        p.min(headroom)
    } else if p < 0.0 {
        let available = ((soc - cfg.soc_min) * cfg.eta_d * cfg.energy_kwh / dt).max(0.0);
        p.max(-available)
    } else {
        0.0
    }
}

/// SoC after applying terminal power `p_kw` for `dt` hours.
pub fn step_soc(soc: f64, p_kw: f64, cfg: &BatteryConfig, dt: f64) -> Result<f64, StorageError> {
    let charge = p_kw.max(0.0);
    let discharge = (-p_kw).max(0.0);
    let next = soc + cfg.eta_c * charge * dt / cfg.energy_kwh
        - discharge * dt / (cfg.eta_d * cfg.energy_kwh);
    if next < cfg.soc_min - SOC_TOLERANCE || next > cfg.soc_max + SOC_TOLERANCE || !next.is_finite() {
        return Err(StorageError::SocOutOfBounds {
            battery: cfg.name.clone(),
            soc: next,
            min: cfg.soc_min,
            max: cfg.soc_max,
        });
    }
    Ok(next.clamp(cfg.soc_min, cfg.soc_max))
}

/// PV output actually taken: the least of request, availability and inverter
/// rating.
pub fn dispatch_pv(pv_available: f64, pv_inverter_max: f64, requested: f64) -> f64 {
    requested.max(0.0).min(pv_available.max(0.0)).min(pv_inverter_max)
}
