//! Browser bindings: a rule-controlled week, a battery ageing calculator and
//! an EV itinerary sampler. Every export returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hems_core::baselines::{RuleController, RuleParams};
use hems_core::data::synthesize;
use hems_core::degradation::{AgeingModel, DegradationWeights};
use hems_core::env::{run_span, Carry, EnvConfig, HouseholdEnv, HOURS_PER_DAY};
use hems_core::ev::{itinerary_for_day, BehaviorParams};
use hems_core::report::Summary;
use hems_core::storage::{BatteryConfig, Chemistry};

#[derive(Debug, Serialize)]
pub struct WeekTrace {
    pub hour: Vec<u32>,
    pub t_in: Vec<f64>,
    pub t_out: Vec<f64>,
    pub soc_ess: Vec<f64>,
    pub soc_ev: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub buy_price: Vec<f64>,
    pub summary: Summary,
}

/// One synthetic week under a rule-based controller.
pub fn simulate_week_trace(seed: u64, allow_export: bool) -> Result<WeekTrace, String> {
    let series = synthesize(7, seed).map_err(|e| e.to_string())?;
    let prices = series.buy_prices().to_vec();
    let params = if allow_export { RuleParams::rule1(&prices) } else { RuleParams::rule2(&prices) }
        .map_err(|e| e.to_string())?;
    let mut env = HouseholdEnv::new(EnvConfig::default(), series).map_err(|e| e.to_string())?;
    let carry = Carry::initial(env.config());
    let ep = run_span(&mut env, &mut RuleController::new(params), 0, 7, carry).map_err(|e| e.to_string())?;
    let r = &ep.records;
    let label = if allow_export { "rule1" } else { "rule2" };
    Ok(WeekTrace {
        hour: (0..r.len() as u32).collect(),
        t_in: r.iter().map(|x| x.t_in).collect(),
        t_out: r.iter().map(|x| x.t_out).collect(),
        soc_ess: r.iter().map(|x| x.soc_ess).collect(),
        soc_ev: r.iter().map(|x| x.soc_ev).collect(),
        p_grid: r.iter().map(|x| x.p_grid).collect(),
        buy_price: r.iter().map(|x| x.buy_price).collect(),
        summary: Summary::from_records(label, r, 0.78),
    })
}

#[derive(Debug, Serialize, PartialEq)]
pub struct AgeingQuote {
    pub calendar_loss: f64,
    pub cycle_loss: f64,
    pub cost_eur: f64,
}

/// Capacity loss and its cost for one hour at `soc` and `power_kw`, for a
/// battery already `age_hours` old.
pub fn ageing_quote(vehicle: bool, soc: f64, power_kw: f64, age_hours: f64) -> Result<AgeingQuote, String> {
    let weights = DegradationWeights::default();
    let (cfg, eur) = if vehicle {
        (BatteryConfig::vehicle_battery(), weights.ev_eur)
    } else {
        (BatteryConfig::home_battery(), weights.ess_eur)
    };
    let chemistry = if vehicle { Chemistry::Nmc } else { Chemistry::Lfp };
    let model = AgeingModel::for_chemistry(chemistry);
    let calendar_loss = model
        .calendar_loss_step(age_hours.max(0.0), 1.0, cfg.temperature_k, soc)
        .map_err(|e| e.to_string())?;
    let cycle_loss = model.cycle_loss_step(power_kw, 1.0, cfg.temperature_k, cfg.energy_kwh);
    Ok(AgeingQuote { calendar_loss, cycle_loss, cost_eur: eur * (calendar_loss + cycle_loss) })
}

#[derive(Debug, Serialize)]
pub struct ItineraryRow {
    pub day: u64,
    pub departure_h: f64,
    pub arrival_h: f64,
    pub distance_km: f64,
}

pub fn itineraries(seed: u64, days: u32) -> Vec<ItineraryRow> {
    let params = BehaviorParams::default();
    (0..days as u64)
        .map(|day| {
            let it = itinerary_for_day(seed, day, &params);
            ItineraryRow { day, departure_h: it.t_dep, arrival_h: it.t_arr, distance_km: it.distance_km }
        })
        .collect()
}

fn to_json<T: Serialize>(value: Result<T, String>) -> Result<String, JsValue> {
    value
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate_week(seed: u32, allow_export: bool) -> Result<String, JsValue> {
    to_json(simulate_week_trace(seed as u64, allow_export))
}

#[wasm_bindgen]
pub fn battery_ageing(vehicle: bool, soc: f64, power_kw: f64, age_days: f64) -> Result<String, JsValue> {
    to_json(ageing_quote(vehicle, soc, power_kw, age_days * HOURS_PER_DAY as f64))
}

#[wasm_bindgen]
pub fn sample_itineraries(seed: u32, days: u32) -> Result<String, JsValue> {
    to_json(Ok(itineraries(seed as u64, days.min(365))))
}
