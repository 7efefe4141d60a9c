//! Household loads: shiftable appliance scheduling and the HVAC thermal model.
//!
//! Appliance start/stop rules (minimum on-time, minimum off-time, exactly-once
//! execution inside the admissible window) are enforced online by a
//! feasibility projector. Each appliance precomputes a reachability table over
//! its window; a request is honoured when a feasible completion of the window
//! still exists after it, otherwise the opposite switch state is taken. By
//! induction every realized schedule meets all constraints, whatever the
//! requests were.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HouseholdError {
    #[error("appliance `{name}`: {reason}")]
    InvalidAppliance { name: String, reason: String },
    #[error("HVAC power {power} kW outside [0, {max}]")]
    HvacPower { power: f64, max: f64 },
    #[error("invalid thermal parameters: {0}")]
    InvalidThermal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplianceCategory {
    /// Runs on a fixed schedule (on for the whole window).
    NonShiftable,
    /// Shiftable, uninterruptible: one contiguous run inside the window.
    Uninterruptible,
    /// Shiftable, interruptible: several runs with minimum on/off times.
    Interruptible,
}

/// One appliance as configured. Durations are in hours and may be
/// fractional; they are rounded up to whole hours on the hourly grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplianceSpec {
    pub name: String,
    pub category: ApplianceCategory,
    /// First admissible hour of day.
    pub window_begin: u32,
    /// End of the window (exclusive hour of day, at most 24).
    pub window_end: u32,
    /// Required on-time per window.
    pub duration_hours: f64,
    #[serde(default)]
    pub min_on_hours: f64,
    #[serde(default)]
    pub min_off_hours: f64,
    pub power_w: f64,
    /// Number of runs per window for interruptible appliances. `None` leaves
    /// the run count free.
    #[serde(default)]
    pub runs: Option<u32>,
}

impl ApplianceSpec {
    fn slots(hours: f64) -> u32 {
        (hours - 1e-9).ceil().max(0.0) as u32
    }

    pub fn duration_slots(&self) -> u32 {
        Self::slots(self.duration_hours)
    }

    pub fn min_on_slots(&self) -> u32 {
        match self.category {
            ApplianceCategory::Uninterruptible => self.duration_slots(),
            _ => Self::slots(self.min_on_hours).max(1),
        }
    }

    pub fn min_off_slots(&self) -> u32 {
        Self::slots(self.min_off_hours).max(1)
    }

    /// Exact number of runs per window, if constrained.
    pub fn run_count(&self) -> Option<u32> {
        match self.category {
            ApplianceCategory::Uninterruptible => Some(1),
            ApplianceCategory::Interruptible => self.runs,
            ApplianceCategory::NonShiftable => None,
        }
    }

    pub fn window_len(&self) -> u32 {
        self.window_end - self.window_begin
    }

    pub fn in_window(&self, hour: u32) -> bool {
        hour >= self.window_begin && hour < self.window_end
    }

    pub fn is_shiftable(&self) -> bool {
        self.category != ApplianceCategory::NonShiftable
    }

    pub fn power_kw(&self) -> f64 {
        self.power_w / 1000.0
    }

    fn validate(&self) -> Result<(), HouseholdError> {
        let bad = |reason: &str| {
            Err(HouseholdError::InvalidAppliance {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.window_begin >= self.window_end || self.window_end > 24 {
            return bad("window must satisfy begin < end <= 24");
        }
        if self.duration_slots() > self.window_len() {
            return bad("duration exceeds window length");
        }
        if self.power_w < 0.0 || !self.power_w.is_finite() {
            return bad("power must be non-negative");
        }
        if self.category == ApplianceCategory::Interruptible
            && (self.min_on_hours < 1.0 - 1e-9 && self.min_on_hours != 0.0)
        {
            return bad("interruptible appliances need min-on of at least one hour");
        }
        if self.is_shiftable() && self.duration_slots() == 0 {
            return bad("shiftable appliances need a positive duration");
        }
        if self.run_count() == Some(0) {
            return bad("run count must be positive");
        }
        Ok(())
    }
}

/// The appliance roster of the reference household.
pub fn default_roster() -> Vec<ApplianceSpec> {
    use ApplianceCategory::*;
    let a = |name: &str, category, b, e, d: f64, on: f64, off: f64, w: f64, runs| ApplianceSpec {
        name: name.into(),
        category,
        window_begin: b,
        window_end: e,
        duration_hours: d,
        min_on_hours: on,
        min_off_hours: off,
        power_w: w,
        runs,
    };
    vec![
        a("dishwasher", Uninterruptible, 19, 22, 40.0 / 60.0, 0.0, 0.0, 2000.0, None),
        a("washing_machine", Uninterruptible, 18, 23, 2.0, 0.0, 0.0, 1500.0, None),
        a("tv", Uninterruptible, 19, 23, 1.5, 0.0, 0.0, 200.0, None),
        a("electric_oven", Uninterruptible, 18, 20, 0.5, 0.0, 0.0, 3500.0, None),
        a("robot_cleaner", Interruptible, 0, 24, 2.0, 1.0, 0.5, 50.0, Some(2)),
        a("air_purifier", Interruptible, 0, 24, 12.0, 1.0, 1.0, 40.0, None),
        a("fridge", NonShiftable, 0, 24, 24.0, 0.0, 0.0, 450.0, None),
        a("lights", NonShiftable, 18, 23, 5.0, 0.0, 0.0, 150.0, None),
    ]
}

/// Per-appliance switching record within the current window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ApplianceState {
    /// Realized on/off flag of the last projected hour.
    pub z: bool,
    pub on_hours_served: u32,
    /// Runs started in the current window.
    pub starts: u32,
    /// Runs stopped in the current window (a run still on at window close is
    /// stopped by the close).
    pub stops: u32,
    /// Length of the current on-run or off-run.
    pub hours_since_switch: u32,
}

impl ApplianceState {
    pub fn started_this_window(&self) -> bool {
        self.starts > 0
    }
}

/// Compiled appliance: spec plus its window reachability table.
#[derive(Debug, Clone)]
pub struct Appliance {
    spec: ApplianceSpec,
    duration: u32,
    min_on: u32,
    min_off: u32,
    max_runs: u32,
    exact_runs: Option<u32>,
    len_cap: u32,
    feasible: Vec<bool>,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    served: u32,
    runs: u32,
    on: bool,
    len: u32,
}

impl Appliance {
    pub fn new(spec: ApplianceSpec) -> Result<Self, HouseholdError> {
        spec.validate()?;
        let duration = spec.duration_slots();
        let min_on = spec.min_on_slots();
        let min_off = spec.min_off_slots();
        let exact_runs = spec.run_count();
        let max_runs = exact_runs.unwrap_or(duration.max(1));
        let mut app = Self {
            len_cap: min_on.max(min_off),
            spec,
            duration,
            min_on,
            min_off,
            max_runs,
            exact_runs,
            feasible: Vec::new(),
        };
        if app.spec.is_shiftable() {
            app.build_table();
            if !app.is_feasible(0, Slot { served: 0, runs: 0, on: false, len: 0 }) {
                return Err(HouseholdError::InvalidAppliance {
                    name: app.spec.name.clone(),
                    reason: "no feasible schedule exists inside the window".into(),
                });
            }
        }
        Ok(app)
    }

    pub fn spec(&self) -> &ApplianceSpec {
        &self.spec
    }

    fn index(&self, k: u32, s: Slot) -> usize {
        let dims = [
            self.duration as usize + 1,
            self.max_runs as usize + 1,
            2,
            self.len_cap as usize + 1,
        ];
        let mut idx = k as usize;
        idx = idx * dims[0] + s.served as usize;
        idx = idx * dims[1] + s.runs as usize;
        idx = idx * dims[2] + s.on as usize;
        idx * dims[3] + s.len.min(self.len_cap) as usize
    }

    fn is_feasible(&self, k: u32, s: Slot) -> bool {
        self.feasible[self.index(k, s)]
    }

    /// Applies switch decision `z` to slot `s`; `None` when the move breaks
    /// a local rule.
    fn transition(&self, s: Slot, z: bool) -> Option<Slot> {
        match (s.on, z) {
            (true, true) => (s.served < self.duration).then(|| Slot {
                served: s.served + 1,
                len: (s.len + 1).min(self.len_cap),
                ..s
            }),
            (true, false) => (s.len >= self.min_on).then_some(Slot { on: false, len: 1, ..s }),
            (false, true) => {
                let rested = s.runs == 0 || s.len >= self.min_off;
                (rested && s.runs < self.max_runs && s.served < self.duration).then_some(Slot {
                    served: s.served + 1,
                    runs: s.runs + 1,
                    on: true,
                    len: 1,
                })
            }
            (false, false) => Some(Slot {
                len: (s.len + 1).min(self.len_cap),
                ..s
            }),
        }
    }

    fn terminal_ok(&self, s: Slot) -> bool {
        s.served == self.duration
            && self.exact_runs.is_none_or(|m| s.runs == m)
            && (!s.on || s.len >= self.min_on)
    }

    fn build_table(&mut self) {
        let w = self.spec.window_len();
        let size = self.index(w, Slot { served: self.duration, runs: self.max_runs, on: true, len: self.len_cap }) + 1;
        self.feasible = vec![false; size];
        for k in (0..=w).rev() {
            for served in 0..=self.duration {
                for runs in 0..=self.max_runs {
                    for on in [false, true] {
                        for len in 0..=self.len_cap {
                            let s = Slot { served, runs, on, len };
                            let ok = if k == w {
                                self.terminal_ok(s)
                            } else {
                                [false, true].iter().any(|&z| {
                                    self.transition(s, z)
                                        .is_some_and(|n| self.is_feasible(k + 1, n))
                                })
                            };
                            let i = self.index(k, s);
                            self.feasible[i] = ok;
                        }
                    }
                }
            }
        }
    }

    fn slot_of(&self, st: &ApplianceState) -> Slot {
        Slot {
            served: st.on_hours_served,
            runs: st.starts,
            on: st.z,
            len: st.hours_since_switch,
        }
    }

    /// Projects one hourly request onto the feasible set and advances the
    /// state. Returns the realized on/off flag.
    pub fn project(&self, state: &mut ApplianceState, request: bool, hour: u32) -> bool {
        if !self.spec.in_window(hour) {
            if state.z && self.spec.is_shiftable() {
                state.stops += 1;
            }
            state.z = false;
            return false;
        }
        if !self.spec.is_shiftable() {
            state.z = true;
            return true;
        }
        if hour == self.spec.window_begin {
            *state = ApplianceState::default();
        }
        let k = hour - self.spec.window_begin;
        let cur = self.slot_of(state);
        let pick = |z: bool| {
            self.transition(cur, z)
                .filter(|n| self.is_feasible(k + 1, *n))
                .map(|n| (z, n))
        };
        let (z, next) = pick(request)
            .or_else(|| pick(!request))
            .expect("projector state left the feasible set");
        if state.z && !z {
            state.stops += 1;
        }
        state.z = z;
        state.on_hours_served = next.served;
        state.starts = next.runs;
        state.hours_since_switch = if next.on == cur.on && k > 0 {
            state.hours_since_switch + 1
        } else {
            1
        };
        if hour + 1 == self.spec.window_end && z {
            state.stops += 1;
            state.z = false;
        }
        z
    }

    /// Remaining required on-hours divided by remaining window hours; zero
    /// outside the window or once served.
    pub fn progress(&self, state: &ApplianceState, hour: u32) -> f64 {
        if !self.spec.is_shiftable() || !self.spec.in_window(hour) {
            return 0.0;
        }
        let served = if hour == self.spec.window_begin {
            0
        } else {
            state.on_hours_served
        };
        let remaining = self.duration.saturating_sub(served) as f64;
        remaining / (self.spec.window_end - hour) as f64
    }
}

/// Projects a request vector (one entry per appliance, non-shiftable entries
/// ignored) and returns the realized flags.
pub fn project_appliance_actions(
    appliances: &[Appliance],
    states: &mut [ApplianceState],
    requested: &[bool],
    hour: u32,
) -> Vec<bool> {
    appliances
        .iter()
        .zip(states.iter_mut())
        .zip(requested)
        .map(|((a, s), &r)| a.project(s, r, hour))
        .collect()
}

/// Total electrical load of the appliances that are on, in kW.
pub fn appliance_power(specs: &[ApplianceSpec], realized: &[bool]) -> f64 {
    specs
        .iter()
        .zip(realized)
        .filter(|(_, &z)| z)
        .map(|(s, _)| s.power_kw())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HvacMode {
    Heating,
    Cooling,
    Off,
}

impl HvacMode {
    pub fn sign(self) -> f64 {
        match self {
            HvacMode::Heating => 1.0,
            HvacMode::Cooling => -1.0,
            HvacMode::Off => 0.0,
        }
    }
}

/// First-order building envelope and HVAC unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalParams {
    /// Heat retention per hour, in (0, 1).
    pub epsilon: f64,
    /// Temperature gain per kW of HVAC power (°C/kW).
    pub alpha_t: f64,
    pub p_hvac_max: f64,
    /// Heating season when the day's mean outdoor temperature is below this.
    pub heating_below_c: f64,
    /// Cooling season when the day's mean outdoor temperature is above this.
    pub cooling_above_c: f64,
    pub initial_t_in: f64,
}

impl Default for ThermalParams {
    fn default() -> Self {
        Self {
            epsilon: 0.7,
            alpha_t: 125.0 / 7.0,
            p_hvac_max: 3.0,
            heating_below_c: 16.0,
            cooling_above_c: 22.0,
            initial_t_in: 21.0,
        }
    }
}

impl ThermalParams {
    pub fn validate(&self) -> Result<(), HouseholdError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(HouseholdError::InvalidThermal("epsilon must lie in (0, 1)".into()));
        }
        if self.p_hvac_max <= 0.0 {
            return Err(HouseholdError::InvalidThermal("p_hvac_max must be positive".into()));
        }
        if self.heating_below_c > self.cooling_above_c {
            return Err(HouseholdError::InvalidThermal(
                "heating threshold above cooling threshold".into(),
            ));
        }
        Ok(())
    }

    /// Season-driven mode; in the shoulder band the mode follows the indoor
    /// temperature relative to `comfort_mid`.
    pub fn mode(&self, daily_mean_t_out: f64, t_in: f64, comfort_mid: f64) -> HvacMode {
        if daily_mean_t_out < self.heating_below_c {
            HvacMode::Heating
        } else if daily_mean_t_out > self.cooling_above_c {
            HvacMode::Cooling
        } else if t_in < comfort_mid {
            HvacMode::Heating
        } else {
            HvacMode::Cooling
        }
    }
}

/// One hour of the envelope recursion
/// `T_in' = ε T_in + (T_out + δ α_T P)(1 − ε)`.
pub fn step_temperature(
    t_in: f64,
    t_out: f64,
    p_hvac: f64,
    mode: HvacMode,
    params: &ThermalParams,
) -> Result<f64, HouseholdError> {
    if !(0.0..=params.p_hvac_max).contains(&p_hvac) {
        return Err(HouseholdError::HvacPower {
            power: p_hvac,
            max: params.p_hvac_max,
        });
    }
    let eps = params.epsilon;
    Ok(eps * t_in + (t_out + mode.sign() * params.alpha_t * p_hvac) * (1.0 - eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn roster() -> Vec<Appliance> {
        default_roster().into_iter().map(|s| Appliance::new(s).unwrap()).collect()
    }

    fn find(name: &str) -> Appliance {
        roster().into_iter().find(|a| a.spec().name == name).unwrap()
    }

    #[test]
    fn durations_round_up() {
        let r = default_roster();
        assert_eq!(r[0].duration_slots(), 1); // 40 min
        assert_eq!(r[2].duration_slots(), 2); // 1.5 h
        assert_eq!(r[3].duration_slots(), 1); // 0.5 h
        assert_eq!(r[4].min_off_slots(), 1); // 0.5 h
    }

    #[test]
    fn dishwasher_forced_at_last_start() {
        let dw = find("dishwasher");
        let mut st = ApplianceState::default();
        let mut starts = 0;
        for h in 0..24 {
            let prev = st.z;
            let z = dw.project(&mut st, false, h);
            if z && !prev {
                starts += 1;
            }
            if h == 21 {
                assert!(z, "last feasible start must be forced");
            } else {
                assert!(!z);
            }
        }
        assert_eq!(starts, 1);
    }

    #[test]
    fn min_on_holds_against_off_request() {
        let spec = ApplianceSpec {
            name: "x".into(),
            category: ApplianceCategory::Interruptible,
            window_begin: 0,
            window_end: 24,
            duration_hours: 4.0,
            min_on_hours: 2.0,
            min_off_hours: 1.0,
            power_w: 100.0,
            runs: None,
        };
        let a = Appliance::new(spec).unwrap();
        let mut st = ApplianceState::default();
        assert!(a.project(&mut st, true, 0));
        assert!(a.project(&mut st, false, 1));
        assert!(!a.project(&mut st, false, 2));
    }

    #[test]
    fn completed_sua_stays_off() {
        let wm = find("washing_machine");
        let mut st = ApplianceState::default();
        let got: Vec<bool> = (18..23).map(|h| wm.project(&mut st, true, h)).collect();
        assert_eq!(got, vec![true, true, false, false, false]);
    }

    #[test]
    fn robot_cleaner_two_separated_runs() {
        let rc = find("robot_cleaner");
        let mut st = ApplianceState::default();
        let got: Vec<bool> = (0..24).map(|h| rc.project(&mut st, true, h)).collect();
        assert_eq!(&got[..4], &[true, false, true, false]);
        assert_eq!(got.iter().filter(|&&z| z).count(), 2);
        assert_eq!(st.starts, 2);
    }

    #[test]
    fn air_purifier_deadline() {
        let ap = find("air_purifier");
        let mut st = ApplianceState::default();
        let got: Vec<bool> = (0..24).map(|h| ap.project(&mut st, false, h)).collect();
        assert_eq!(got.iter().filter(|&&z| z).count(), 12);
        assert!(got[12..].iter().all(|&z| z));
    }

    #[test]
    fn non_shiftable_ignores_requests() {
        let lights = find("lights");
        let mut st = ApplianceState::default();
        for h in 0..24 {
            assert_eq!(lights.project(&mut st, h % 2 == 0, h), (18..23).contains(&h));
        }
    }

    #[test]
    fn infeasible_spec_rejected() {
        let spec = ApplianceSpec {
            name: "bad".into(),
            category: ApplianceCategory::Interruptible,
            window_begin: 0,
            window_end: 4,
            duration_hours: 3.0,
            min_on_hours: 1.0,
            min_off_hours: 1.0,
            power_w: 10.0,
            runs: Some(3),
        };
        assert!(Appliance::new(spec).is_err());
    }

    #[test]
    fn power_examples() {
        let r = default_roster();
        let mut on = vec![false; r.len()];
        assert_eq!(appliance_power(&r, &on), 0.0);
        on[0] = true;
        on[7] = true;
        assert!((appliance_power(&r, &on) - 2.15).abs() < 1e-12);
        let mut fridge = vec![false; r.len()];
        fridge[6] = true;
        assert!((appliance_power(&r, &fridge) - 0.45).abs() < 1e-12);
    }

    #[test]
    fn thermal_examples() {
        let p = ThermalParams::default();
        let t = step_temperature(20.0, 10.0, 0.0, HvacMode::Off, &p).unwrap();
        assert!((t - 17.0).abs() < 1e-12);
        let t = step_temperature(20.0, 20.0, 0.0, HvacMode::Heating, &p).unwrap();
        assert!((t - 20.0).abs() < 1e-12);
        let t = step_temperature(20.0, 0.0, 3.0, HvacMode::Heating, &p).unwrap();
        assert!((t - (14.0 + 0.3 * 375.0 / 7.0)).abs() < 1e-12);
        assert!((t - 30.071428571428573).abs() < 1e-9);
        assert!(step_temperature(20.0, 0.0, 3.5, HvacMode::Heating, &p).is_err());
        assert!(step_temperature(20.0, 0.0, -0.1, HvacMode::Heating, &p).is_err());
    }

    #[test]
    fn mode_rule() {
        let p = ThermalParams::default();
        assert_eq!(p.mode(5.0, 25.0, 22.0), HvacMode::Heating);
        assert_eq!(p.mode(25.0, 18.0, 22.0), HvacMode::Cooling);
        assert_eq!(p.mode(19.0, 21.0, 22.0), HvacMode::Heating);
        assert_eq!(p.mode(19.0, 23.0, 22.0), HvacMode::Cooling);
    }

    #[test]
    fn thermal_contraction() {
        let p = ThermalParams::default();
        let mut t = 30.0;
        for _ in 0..20 {
            let next = step_temperature(t, 5.0, 0.0, HvacMode::Off, &p).unwrap();
            assert!(((next - 5.0) - 0.7 * (t - 5.0)).abs() < 1e-12);
            t = next;
        }
    }

    /// Independent schedule checker for one window of realized flags.
    pub(crate) fn check_window(spec: &ApplianceSpec, z: &[bool]) -> Result<(), String> {
        let (b, e) = (spec.window_begin as usize, spec.window_end as usize);
        for (h, &on) in z.iter().enumerate() {
            if on && !(b..e).contains(&h) {
                return Err(format!("on outside window at {h}"));
            }
        }
        if !spec.is_shiftable() {
            return if (b..e).all(|h| z[h]) { Ok(()) } else { Err("fixed load off".into()) };
        }
        let w = &z[b..e];
        let mut runs = Vec::new();
        let mut i = 0;
        while i < w.len() {
            if w[i] {
                let s = i;
                while i < w.len() && w[i] {
                    i += 1;
                }
                runs.push((s, i));
            } else {
                i += 1;
            }
        }
        let on: usize = runs.iter().map(|(s, e)| e - s).sum();
        if on != spec.duration_slots() as usize {
            return Err(format!("served {on} h"));
        }
        if let Some(m) = spec.run_count() {
            if runs.len() != m as usize {
                return Err(format!("{} runs", runs.len()));
            }
        }
        for (s, e) in &runs {
            if e - s < spec.min_on_slots() as usize {
                return Err("min-on violated".into());
            }
        }
        for pair in runs.windows(2) {
            if pair[1].0 - pair[0].1 < spec.min_off_slots() as usize {
                return Err("min-off violated".into());
            }
        }
        Ok(())
    }

    #[test]
    fn random_requests_always_feasible() {
        let apps = roster();
        let specs = default_roster();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut states = vec![ApplianceState::default(); apps.len()];
        for _day in 0..200 {
            let mut days: Vec<Vec<bool>> = vec![Vec::new(); apps.len()];
            for h in 0..24 {
                let req: Vec<bool> = (0..apps.len()).map(|_| rng.random_bool(0.5)).collect();
                let z = project_appliance_actions(&apps, &mut states, &req, h);
                for (i, v) in z.into_iter().enumerate() {
                    days[i].push(v);
                }
            }
            for (spec, d) in specs.iter().zip(&days) {
                check_window(spec, d).unwrap_or_else(|e| panic!("{}: {e}", spec.name));
            }
        }
    }

    proptest! {
        #[test]
        fn projector_is_idempotent(seed in any::<u64>()) {
            let apps = roster();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut st = vec![ApplianceState::default(); apps.len()];
            let mut realized = Vec::new();
            for h in 0..24 {
                let req: Vec<bool> = (0..apps.len()).map(|_| rng.random_bool(0.5)).collect();
                realized.push(project_appliance_actions(&apps, &mut st, &req, h));
            }
            let mut st2 = vec![ApplianceState::default(); apps.len()];
            for (h, z) in realized.iter().enumerate() {
                let again = project_appliance_actions(&apps, &mut st2, z, h as u32);
                prop_assert_eq!(&again, z);
            }
        }
    }
}
