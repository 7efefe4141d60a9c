//! Daily EV itineraries: departure, arrival, distance and the resulting
//! arrival SoC.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::storage::BatteryConfig;

#[derive(Debug, Error, PartialEq)]
pub enum BehaviorError {
    #[error("invalid behaviour parameters: {0}")]
    Invalid(String),
}

/// Shifted log-normal departure time, truncated to `[earliest, latest]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepartureModel {
    pub shift: f64,
    pub log_sigma: f64,
    pub scale: f64,
    pub earliest: f64,
    pub latest: f64,
}

impl Default for DepartureModel {
    fn default() -> Self {
        Self { shift: -13.75, log_sigma: 0.048, scale: 21.05, earliest: 5.0, latest: 12.0 }
    }
}

impl DepartureModel {
    /// Untruncated departure hour for a standard-normal draw `z`.
    pub fn from_normal(&self, z: f64) -> f64 {
        self.shift + self.scale * (self.log_sigma * z).exp()
    }

    pub fn median(&self) -> f64 {
        self.from_normal(0.0)
    }

    pub fn sample_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let ln = LogNormal::new(0.0, self.log_sigma).expect("validated sigma");
        self.shift + self.scale * ln.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let t = self.sample_raw(rng);
            if (self.earliest..=self.latest).contains(&t) {
                return t;
            }
        }
    }
}

/// Cauchy arrival time, truncated to `(t_dep + min_away, latest]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalModel {
    pub location: f64,
    pub scale: f64,
    pub min_away_hours: f64,
    pub latest: f64,
}

impl Default for ArrivalModel {
    fn default() -> Self {
        Self { location: 16.91, scale: 0.77, min_away_hours: 1.0, latest: 23.0 }
    }
}

impl ArrivalModel {
    /// Arrival hour for a uniform draw `u` in (0, 1).
    pub fn from_uniform(&self, u: f64) -> f64 {
        self.location + self.scale * (std::f64::consts::PI * (u - 0.5)).tan()
    }

    pub fn accepts(&self, t: f64, t_dep: f64) -> bool {
        t > t_dep + self.min_away_hours && t <= self.latest
    }

    pub fn sample_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Cauchy::new(self.location, self.scale).expect("validated scale").sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, t_dep: f64) -> f64 {
        loop {
            let t = self.sample_raw(rng);
            if self.accepts(t, t_dep) {
                return t;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean_km: f64,
    pub std_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceModel {
    pub components: Vec<MixtureComponent>,
}

impl Default for DistanceModel {
    fn default() -> Self {
        let c = |weight, mean_km, std_km| MixtureComponent { weight, mean_km, std_km };
        Self { components: vec![c(0.28, 2.49, 1.17), c(0.41, 7.84, 4.16), c(0.31, 26.47, 25.81)] }
    }
}

impl DistanceModel {
    pub fn mean_untruncated(&self) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        self.components.iter().map(|c| c.weight * c.mean_km).sum::<f64>() / total
    }

    /// Draws a component index and a positive distance from it.
    pub fn sample_with_component<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let index = WeightedIndex::new(self.components.iter().map(|c| c.weight)).expect("validated weights");
        let i = index.sample(rng);
        let c = &self.components[i];
        let normal = Normal::new(c.mean_km, c.std_km).expect("validated std");
        loop {
            let d = normal.sample(rng);
            if d > 0.0 {
                return (i, d);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with_component(rng).1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorParams {
    pub departure: DepartureModel,
    pub arrival: ArrivalModel,
    pub distance: DistanceModel,
    pub kwh_per_km: f64,
    /// SoC the user expects at departure.
    pub soc_required: f64,
}

impl Default for BehaviorParams {
    fn default() -> Self {
        Self {
            departure: DepartureModel::default(),
            arrival: ArrivalModel::default(),
            distance: DistanceModel::default(),
            kwh_per_km: 0.18,
            soc_required: 0.80,
        }
    }
}

impl BehaviorParams {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        let bad = |s: &str| Err(BehaviorError::Invalid(s.into()));
        if self.departure.log_sigma < 0.0 || self.departure.earliest >= self.departure.latest {
            return bad("departure model");
        }
        if self.arrival.scale <= 0.0 || self.arrival.latest >= 24.0 {
            return bad("arrival model");
        }
        if self.departure.latest + self.arrival.min_away_hours >= self.arrival.latest {
            return bad("latest departure leaves no arrival window");
        }
        if self.distance.components.is_empty()
            || self.distance.components.iter().any(|c| c.weight < 0.0 || c.std_km <= 0.0)
            || (self.distance.components.iter().map(|c| c.weight).sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("distance mixture needs weights summing to 1 and positive spreads");
        }
        if self.kwh_per_km < 0.0 || !(0.0..=1.0).contains(&self.soc_required) {
            return bad("consumption or required SoC");
        }
        Ok(())
    }
}

/// One day of driving, on the hourly grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyItinerary {
    pub t_dep: f64,
    pub t_arr: f64,
    pub depart_hour: u32,
    pub arrive_hour: u32,
    pub distance_km: f64,
}

impl DailyItinerary {
    /// Whether the car is parked at home during hour-of-day `hour`.
    pub fn is_home(&self, hour: u32) -> bool {
        hour < self.depart_hour || hour >= self.arrive_hour
    }
}

pub fn sample_itinerary<R: Rng + ?Sized>(rng: &mut R, params: &BehaviorParams) -> DailyItinerary {
    let t_dep = params.departure.sample(rng);
    let t_arr = params.arrival.sample(rng, t_dep);
    let distance_km = params.distance.sample(rng);
    DailyItinerary {
        t_dep,
        t_arr,
        depart_hour: t_dep.floor() as u32,
        arrive_hour: t_arr.floor() as u32,
        distance_km,
    }
}

/// Itinerary of absolute day `day`, drawn from its own stream so that a day's
/// draw does not depend on how many days came before it.
pub fn itinerary_for_day(seed: u64, day: u64, params: &BehaviorParams) -> DailyItinerary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(day);
    sample_itinerary(&mut rng, params)
}

/// SoC on return after driving `distance_km`; clamped up to `soc_min`.
/// The flag reports whether the clamp engaged.
pub fn arrival_soc(soc_dep: f64, distance_km: f64, params: &BehaviorParams, ev: &BatteryConfig) -> (f64, bool) {
    let raw = soc_dep - params.kwh_per_km * distance_km / ev.energy_kwh;
    if raw < ev.soc_min {
        log::warn!("trip of {distance_km:.1} km would drain the EV to {raw:.3}; clamped to {}", ev.soc_min);
        (ev.soc_min, true)
    } else {
        (raw, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn departure_median() {
        let d = DepartureModel::default();
        assert_relative_eq!(d.from_normal(0.0), 7.30, epsilon = 1e-12);
        let degenerate = DepartureModel { log_sigma: 0.0, ..d };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_relative_eq!(degenerate.sample(&mut rng), 7.30, epsilon = 1e-12);
        }
    }

    #[test]
    fn arrival_quantiles() {
        let a = ArrivalModel::default();
        assert_relative_eq!(a.from_uniform(0.5), 16.91, epsilon = 1e-12);
        assert_relative_eq!(a.from_uniform(0.75), 17.68, epsilon = 1e-12);
        assert!(!a.accepts(2.3, 7.0));
        assert!(!a.accepts(7.9, 7.0));
        assert!(a.accepts(17.0, 7.0));
        assert!(!a.accepts(23.5, 7.0));
    }

    #[test]
    fn mixture_weights_and_mean() {
        let m = DistanceModel::default();
        let w: Vec<f64> = m.components.iter().map(|c| c.weight).collect();
        assert_eq!(w, vec![0.28, 0.41, 0.31]);
        assert_relative_eq!(m.mean_untruncated(), 0.28 * 2.49 + 0.41 * 7.84 + 0.31 * 26.47, epsilon = 1e-12);
        assert!((m.mean_untruncated() - 12.12).abs() < 0.005);
    }

    #[test]
    fn distance_mean_within_two_percent_of_truncated_oracle() {
        use statrs::distribution::{ContinuousCDF, Normal as SNormal};
        let m = DistanceModel::default();
        // Mean of each component truncated to (0, ∞), mixed by weight.
        let oracle: f64 = m
            .components
            .iter()
            .map(|c| {
                let n = SNormal::new(0.0, 1.0).unwrap();
                let a = -c.mean_km / c.std_km;
                let phi = (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
                c.weight * (c.mean_km + c.std_km * phi / (1.0 - n.cdf(a)))
            })
            .sum();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mean = (0..n).map(|_| m.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - oracle).abs() / oracle < 0.02, "mean {mean} oracle {oracle}");
        assert!(mean > m.mean_untruncated());
    }

    #[test]
    fn arrival_soc_examples() {
        let p = BehaviorParams::default();
        let ev = BatteryConfig::vehicle_battery();
        let (s, c) = arrival_soc(0.8, 50.0, &p, &ev);
        assert_relative_eq!(s, 0.8 - 9.0 / 70.0, epsilon = 1e-12);
        assert!((s - 0.671429).abs() < 1e-6 && !c);
        assert_eq!(arrival_soc(0.8, 0.0, &p, &ev).0, 0.8);
        assert_eq!(arrival_soc(0.25, 100.0, &p, &ev), (0.2, true));
    }

    #[test]
    fn itineraries_are_ordered_and_deterministic() {
        let p = BehaviorParams::default();
        p.validate().unwrap();
        for day in 0..365 {
            let it = itinerary_for_day(11, day, &p);
            assert!(it.t_dep < it.t_arr && it.t_dep >= 0.0 && it.t_arr < 24.0);
            assert!(it.depart_hour < it.arrive_hour);
            assert!(it.distance_km > 0.0);
            assert_eq!(it, itinerary_for_day(11, day, &p));
        }
        assert_ne!(itinerary_for_day(11, 0, &p), itinerary_for_day(12, 0, &p));
    }

    #[test]
    fn presence_window() {
        let it = DailyItinerary { t_dep: 7.4, t_arr: 17.2, depart_hour: 7, arrive_hour: 17, distance_km: 10.0 };
        assert!(it.is_home(6));
        assert!(!it.is_home(7));
        assert!(!it.is_home(16));
        assert!(it.is_home(17));
    }
}
