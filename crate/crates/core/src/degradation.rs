//! Semi-empirical capacity fade for LFP and NMC cells.
//!
//! Calendar ageing follows a square-root-of-time law with an Arrhenius term
//! and an anode-potential term; cycle ageing scales with equivalent full
//! cycles through DOD, C-rate and temperature factors. Losses are fractions
//! of nominal capacity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::storage::{BatteryConfig, BatteryState, Chemistry};

pub const GAS_CONSTANT: f64 = 8.314;
pub const FARADAY: f64 = 96485.0;
pub const T_REF_K: f64 = 298.15;

#[derive(Debug, Error, PartialEq)]
pub enum DegradationError {
    #[error("SoC {0} outside [0, 1]")]
    SocOutOfRange(f64),
    #[error("temperature {0} K must be positive")]
    NonPositiveTemperature(f64),
    #[error("age {0} h must be non-negative")]
    NegativeAge(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationParams {
    pub k_cal: f64,
    pub activation_energy: f64,
    pub alpha_cal: f64,
    pub k_cyc: f64,
    /// Cycle-fit constants: DOD slope and offset, C-rate slope and offset,
    /// temperature curvature and offset.
    pub alpha_c: [f64; 6],
    pub t_ref_k: f64,
}

impl DegradationParams {
    pub fn lfp() -> Self {
        Self {
            k_cal: 1.9234e-3,
            activation_energy: 3.0233e4,
            alpha_cal: -0.05590,
            k_cyc: 2.93583e-6,
            alpha_c: [0.147611, 7.4008e-3, 0.082035, 0.0313111, 0.33344256, 331.652158],
            t_ref_k: T_REF_K,
        }
    }

    pub fn nmc() -> Self {
        Self {
            k_cal: 4.0149e-4,
            activation_energy: 5.9178e4,
            alpha_cal: -1.0,
            k_cyc: 4.3131332e-6,
            alpha_c: [0.3549361, 1.2308964e-4, 0.0, 1.0, 0.6149392, 63.619859],
            t_ref_k: T_REF_K,
        }
    }

    pub fn for_chemistry(chemistry: Chemistry) -> Self {
        match chemistry {
            Chemistry::Lfp => Self::lfp(),
            Chemistry::Nmc => Self::nmc(),
        }
    }
}

/// Graphite open-circuit potential against lithiation fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnodePotentialFit {
    pub offset: f64,
    pub exp_amplitude: f64,
    pub exp_rate: f64,
    /// `(a, b, c)` for each `a·tanh((x − b)/c)` term.
    pub tanh_terms: [(f64, f64, f64); 4],
    pub x_empty: f64,
    pub x_full: f64,
}

impl Default for AnodePotentialFit {
    fn default() -> Self {
        Self {
            offset: 0.6379,
            exp_amplitude: 0.5416,
            exp_rate: -305.5309,
            tanh_terms: [
                (-0.0440, 0.1958, 0.1088),
                (-0.1978, 1.0571, 0.0854),
                (-0.6875, -0.0117, 0.0529),
                (-0.0175, 0.5692, 0.0875),
            ],
            x_empty: 0.0085,
            x_full: 0.78,
        }
    }
}

impl AnodePotentialFit {
    pub fn lithiation(&self, soc: f64) -> f64 {
        self.x_empty + soc * (self.x_full - self.x_empty)
    }

    pub fn potential(&self, soc: f64) -> Result<f64, DegradationError> {
        if !(0.0..=1.0).contains(&soc) {
            return Err(DegradationError::SocOutOfRange(soc));
        }
        let x = self.lithiation(soc);
        let tanh_sum: f64 = self
            .tanh_terms
            .iter()
            .map(|&(a, b, c)| a * ((x - b) / c).tanh())
            .sum();
        Ok(self.offset + self.exp_amplitude * (self.exp_rate * x).exp() + tanh_sum)
    }
}

/// Ageing model for one chemistry with its reference potential cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeingModel {
    params: DegradationParams,
    fit: AnodePotentialFit,
    u_ref: f64,
}

impl AgeingModel {
    pub fn new(params: DegradationParams, fit: AnodePotentialFit) -> Self {
        let u_ref = fit.potential(0.5).expect("0.5 is a valid SoC");
        Self { params, fit, u_ref }
    }

    pub fn for_chemistry(chemistry: Chemistry) -> Self {
        Self::new(DegradationParams::for_chemistry(chemistry), AnodePotentialFit::default())
    }

    pub fn params(&self) -> &DegradationParams {
        &self.params
    }

    pub fn reference_potential(&self) -> f64 {
        self.u_ref
    }

    /// Stress factor multiplying `k_cal·√t`.
    pub fn calendar_stress(&self, temp_k: f64, soc: f64) -> Result<f64, DegradationError> {
        if temp_k <= 0.0 {
            return Err(DegradationError::NonPositiveTemperature(temp_k));
        }
        let p = &self.params;
        let u = self.fit.potential(soc)?;
        let arrhenius = -(p.activation_energy / (GAS_CONSTANT * temp_k)) * (1.0 / temp_k - 1.0 / p.t_ref_k);
        let potential = (p.alpha_cal * FARADAY / GAS_CONSTANT) * (u / temp_k - self.u_ref / p.t_ref_k);
        Ok((arrhenius + potential).exp())
    }

    pub fn calendar_loss_total(&self, temp_k: f64, soc: f64, age_hours: f64) -> Result<f64, DegradationError> {
        if age_hours < 0.0 {
            return Err(DegradationError::NegativeAge(age_hours));
        }
        Ok(self.params.k_cal * self.calendar_stress(temp_k, soc)? * age_hours.sqrt())
    }

    /// Calendar loss over `[age, age + dt]` at fixed temperature and SoC.
    pub fn calendar_loss_step(&self, age_hours: f64, dt: f64, temp_k: f64, soc: f64) -> Result<f64, DegradationError> {
        if age_hours < 0.0 {
            return Err(DegradationError::NegativeAge(age_hours));
        }
        let stress = self.calendar_stress(temp_k, soc)?;
        // √(a+dt) − √a written without cancellation.
        let root_gap = if dt > 0.0 { dt / ((age_hours + dt).sqrt() + age_hours.sqrt()) } else { 0.0 };
        Ok(self.params.k_cal * stress * root_gap)
    }

    pub fn cycle_loss_step(&self, p_kw: f64, dt: f64, temp_k: f64, energy_kwh: f64) -> f64 {
        let d_n = efc_increment(p_kw, dt, energy_kwh);
        if d_n == 0.0 {
            return 0.0;
        }
        let a = &self.params.alpha_c;
        let dod = d_n.min(1.0);
        let c_rate = p_kw.abs() / energy_kwh;
        let dt_k = temp_k - self.params.t_ref_k;
        self.params.k_cyc
            * (a[0] * dod + a[1])
            * (a[2] * c_rate + a[3])
            * (a[4] * dt_k * dt_k + a[5])
            * d_n
    }
}

/// Equivalent full cycles contributed by `|p|` over `dt` hours.
pub fn efc_increment(p_kw: f64, dt: f64, energy_kwh: f64) -> f64 {
    p_kw.abs() * dt / (2.0 * energy_kwh)
}

/// Euro value of one unit of fractional capacity loss for each battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationWeights {
    pub ess_eur: f64,
    pub ev_eur: f64,
}

impl Default for DegradationWeights {
    fn default() -> Self {
        Self { ess_eur: 28000.0, ev_eur: 36750.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DegradationStep {
    pub cost_eur: f64,
    pub dq_ess: f64,
    pub dq_ev: f64,
    pub dq_ess_calendar: f64,
    pub dq_ev_calendar: f64,
}

/// A battery paired with its configuration and ageing model.
pub struct AgeingBattery<'a> {
    pub state: &'a mut BatteryState,
    pub config: &'a BatteryConfig,
    pub model: &'a AgeingModel,
}

impl AgeingBattery<'_> {
    /// Loss over one step at the current SoC with terminal power `p_kw`;
    /// advances age and cumulative loss. Returns `(total, calendar)`.
    fn age(&mut self, p_kw: f64, dt: f64) -> Result<(f64, f64), DegradationError> {
        let t = self.config.temperature_k;
        let cal = self.model.calendar_loss_step(self.state.age_hours, dt, t, self.state.soc)?;
        let cyc = self.model.cycle_loss_step(p_kw, dt, t, self.config.energy_kwh);
        self.state.age_hours += dt;
        self.state.q_loss_frac += cal + cyc;
        Ok((cal + cyc, cal))
    }
}

/// Ages both batteries over one step and prices the loss.
pub fn degradation_cost_step(
    mut ess: AgeingBattery<'_>,
    p_ess: f64,
    mut ev: AgeingBattery<'_>,
    p_ev: f64,
    dt: f64,
    weights: &DegradationWeights,
) -> Result<DegradationStep, DegradationError> {
    let (dq_ess, dq_ess_calendar) = ess.age(p_ess, dt)?;
    let (dq_ev, dq_ev_calendar) = ev.age(p_ev, dt)?;
    Ok(DegradationStep {
        cost_eur: weights.ess_eur * dq_ess + weights.ev_eur * dq_ev,
        dq_ess,
        dq_ev,
        dq_ess_calendar,
        dq_ev_calendar,
    })
}
