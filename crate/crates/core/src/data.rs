//! Exogenous hourly inputs: buying price, available PV power and outdoor
//! temperature.
//!
//! Series are either loaded from a CSV export or synthesized from seeded
//! diurnal shapes. Once built an [`ExogenousSeries`] is immutable, so it can be
//! shared read-only between environment instances.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Installed PV peak power used by the synthesizer (kWp).
pub const SYNTH_PV_PEAK_KW: f64 = 6.6;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse {column} value `{value}`")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: negative PV power {value} kW")]
    NegativePv { row: usize, value: f64 },
    #[error("row {row}: non-positive buying price {value} EUR/kWh")]
    NonPositivePrice { row: usize, value: f64 },
    #[error("row {row}: non-finite value in column {column}")]
    NonFinite { row: usize, column: String },
    #[error("row {row}: expected hourly step after {previous}, found {timestamp}")]
    Gap {
        row: usize,
        previous: DateTime<Utc>,
        timestamp: DateTime<Utc>,
    },
    #[error("series needs at least 24 hourly rows, got {0}")]
    TooShort(usize),
    #[error("column lengths differ")]
    LengthMismatch,
    #[error("synthesize needs at least one day")]
    NoDays,
    #[error("hour index {index} out of range for series of length {len}")]
    OutOfRange { index: usize, len: usize },
}

/// Aligned hourly exogenous inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousSeries {
    timestamps: Vec<DateTime<Utc>>,
    buy_price: Vec<f64>,
    pv_available: Vec<f64>,
    temp_out: Vec<f64>,
}

impl ExogenousSeries {
    /// Validates and builds a series. Row numbers in errors are zero-based
    /// positions in the given vectors.
    pub fn new(
        timestamps: Vec<DateTime<Utc>>,
        buy_price: Vec<f64>,
        pv_available: Vec<f64>,
        temp_out: Vec<f64>,
    ) -> Result<Self, DataError> {
        let n = timestamps.len();
        if buy_price.len() != n || pv_available.len() != n || temp_out.len() != n {
            return Err(DataError::LengthMismatch);
        }
        for i in 0..n {
            check_values(i, buy_price[i], pv_available[i], temp_out[i])?;
        }
        check_hourly(&timestamps, |i| i)?;
        if n < 24 {
            return Err(DataError::TooShort(n));
        }
        Ok(Self {
            timestamps,
            buy_price,
            pv_available,
            temp_out,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Number of complete days covered.
    pub fn days(&self) -> usize {
        self.len() / 24
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn buy_prices(&self) -> &[f64] {
        &self.buy_price
    }

    pub fn pv(&self) -> &[f64] {
        &self.pv_available
    }

    pub fn temps(&self) -> &[f64] {
        &self.temp_out
    }

    pub fn buy_price(&self, t: usize) -> f64 {
        self.buy_price[t]
    }

    pub fn pv_available(&self, t: usize) -> f64 {
        self.pv_available[t]
    }

    pub fn temp_out(&self, t: usize) -> f64 {
        self.temp_out[t]
    }

    pub fn timestamp(&self, t: usize) -> DateTime<Utc> {
        self.timestamps[t]
    }

    /// Mean outdoor temperature of the calendar day (24-hour block) that
    /// contains index `t`.
    pub fn daily_mean_temp(&self, t: usize) -> f64 {
        let start = (t / 24) * 24;
        let end = (start + 24).min(self.len());
        self.temp_out[start..end].iter().sum::<f64>() / (end - start) as f64
    }

    /// Mean buying price of the 24-hour block containing `t`.
    pub fn daily_mean_price(&self, t: usize) -> f64 {
        let start = (t / 24) * 24;
        let end = (start + 24).min(self.len());
        self.buy_price[start..end].iter().sum::<f64>() / (end - start) as f64
    }

    /// Copies the `days` whole days starting at `start_day`.
    pub fn slice_days(&self, start_day: usize, days: usize) -> Result<Self, DataError> {
        let a = start_day * 24;
        let b = (start_day + days) * 24;
        if b > self.len() {
            return Err(DataError::OutOfRange {
                index: b.saturating_sub(1),
                len: self.len(),
            });
        }
        Self::new(
            self.timestamps[a..b].to_vec(),
            self.buy_price[a..b].to_vec(),
            self.pv_available[a..b].to_vec(),
            self.temp_out[a..b].to_vec(),
        )
    }

    /// Writes the series using the default column names.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let schema = CsvSchema::default();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            &schema.timestamp,
            &schema.buy_price,
            &schema.pv,
            &schema.temp_out,
        ])?;
        for i in 0..self.len() {
            w.write_record([
                self.timestamps[i].to_rfc3339(),
                self.buy_price[i].to_string(),
                self.pv_available[i].to_string(),
                self.temp_out[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Column names used when reading a CSV export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CsvSchema {
    pub timestamp: String,
    pub buy_price: String,
    pub pv: String,
    pub temp_out: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            buy_price: "buy_price_eur_kwh".into(),
            pv: "pv_kw".into(),
            temp_out: "temp_out_c".into(),
        }
    }
}

/// Loads a series from a CSV file. See [`read_csv`].
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<ExogenousSeries, DataError> {
    let file = std::fs::File::open(path)?;
    read_csv(file, schema)
}

/// Parses a header-first CSV with one row per hour.
///
/// Rows are sorted by timestamp before the gap check. Row numbers reported in
/// errors are 1-based data rows as they appear in the file (the header is not
/// counted).
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<ExogenousSeries, DataError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let (i_ts, i_price, i_pv, i_temp) = (
        col(&schema.timestamp)?,
        col(&schema.buy_price)?,
        col(&schema.pv)?,
        col(&schema.temp_out)?,
    );

    let mut rows: Vec<(usize, DateTime<Utc>, f64, f64, f64)> = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let row = k + 1;
        let field = |i: usize| record.get(i).unwrap_or("");
        let ts = DateTime::parse_from_rfc3339(field(i_ts))
            .map_err(|_| DataError::Parse {
                row,
                column: schema.timestamp.clone(),
                value: field(i_ts).to_string(),
            })?
            .with_timezone(&Utc);
        let num = |i: usize, name: &str| -> Result<f64, DataError> {
            field(i).parse::<f64>().map_err(|_| DataError::Parse {
                row,
                column: name.to_string(),
                value: field(i).to_string(),
            })
        };
        let price = num(i_price, &schema.buy_price)?;
        let pv = num(i_pv, &schema.pv)?;
        let temp = num(i_temp, &schema.temp_out)?;
        check_values(row, price, pv, temp)?;
        rows.push((row, ts, price, pv, temp));
    }
    rows.sort_by_key(|r| r.1);

    let file_rows: Vec<usize> = rows.iter().map(|r| r.0).collect();
    let timestamps: Vec<_> = rows.iter().map(|r| r.1).collect();
    check_hourly(&timestamps, |i| file_rows[i])?;
    if rows.len() < 24 {
        return Err(DataError::TooShort(rows.len()));
    }
    Ok(ExogenousSeries {
        timestamps,
        buy_price: rows.iter().map(|r| r.2).collect(),
        pv_available: rows.iter().map(|r| r.3).collect(),
        temp_out: rows.iter().map(|r| r.4).collect(),
    })
}

fn check_values(row: usize, price: f64, pv: f64, temp: f64) -> Result<(), DataError> {
    for (v, c) in [(price, "buy_price"), (pv, "pv"), (temp, "temp_out")] {
        if !v.is_finite() {
            return Err(DataError::NonFinite {
                row,
                column: c.to_string(),
            });
        }
    }
    if pv < 0.0 {
        return Err(DataError::NegativePv { row, value: pv });
    }
    if price <= 0.0 {
        return Err(DataError::NonPositivePrice { row, value: price });
    }
    Ok(())
}

fn check_hourly(ts: &[DateTime<Utc>], row_of: impl Fn(usize) -> usize) -> Result<(), DataError> {
    for i in 1..ts.len() {
        if ts[i] - ts[i - 1] != Duration::hours(1) {
            return Err(DataError::Gap {
                row: row_of(i),
                previous: ts[i - 1],
                timestamp: ts[i],
            });
        }
    }
    Ok(())
}

/// Constant-ratio feed-in tariff: selling price is a fixed fraction of the
/// buying price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffPolicy {
    pub sell_ratio: f64,
}

impl Default for TariffPolicy {
    fn default() -> Self {
        Self { sell_ratio: 0.8 }
    }
}

impl TariffPolicy {
    pub fn sell(&self, buy_price: f64) -> f64 {
        self.sell_ratio * buy_price
    }
}

/// Selling price at hour `t`.
pub fn sell_price(t: usize, series: &ExogenousSeries, tariff: &TariffPolicy) -> Result<f64, DataError> {
    if t >= series.len() {
        return Err(DataError::OutOfRange {
            index: t,
            len: series.len(),
        });
    }
    Ok(tariff.sell(series.buy_price(t)))
}

/// Generates `days` days of hourly data starting 2023-03-01T00:00Z.
///
/// Shapes: a clear-sky PV bell between sunrise and sunset scaled by a daily
/// cloudiness draw; outdoor temperature as a seasonal mean plus an AR(1)
/// day-to-day anomaly plus a diurnal sinusoid peaking mid-afternoon; buying
/// price as a daily spot level with morning and evening peaks, a night
/// trough, hourly noise and a fixed grid fee/tax component.
pub fn synthesize(days: usize, seed: u64) -> Result<ExogenousSeries, DataError> {
    if days < 1 {
        return Err(DataError::NoDays);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let start = Utc.with_ymd_and_hms(2023, 3, 1, 0, 0, 0).unwrap();

    let n = days * 24;
    let mut timestamps = Vec::with_capacity(n);
    let mut buy = Vec::with_capacity(n);
    let mut pv = Vec::with_capacity(n);
    let mut temp = Vec::with_capacity(n);

    let mut anomaly = 0.0;
    for d in 0..days {
        let doy = (59 + d) as f64;
        let season = (2.0 * PI * (doy - 80.0) / 365.0).sin();
        let day_len = 12.0 + 6.0 * season;
        let sunrise = 12.0 - day_len / 2.0;
        let sunset = 12.0 + day_len / 2.0;
        let elevation = 0.55 + 0.45 * season;
        let clearness = rng.random_range(0.25..1.0);

        anomaly = 0.7 * anomaly + 2.5 * noise.sample(&mut rng);
        let mean_temp = 6.0 + 11.0 * (2.0 * PI * (doy - 110.0) / 365.0).sin() + anomaly;
        let swing = 3.0 + 1.5 * clearness;

        let spot = 0.12 * (0.35 * noise.sample(&mut rng)).exp();
        let fees = 0.07;

        for h in 0..24 {
            let hf = h as f64 + 0.5;
            timestamps.push(start + Duration::hours((d * 24 + h) as i64));

            let p = if hf > sunrise && hf < sunset {
                let x = (hf - sunrise) / day_len;
                SYNTH_PV_PEAK_KW * elevation * clearness * (PI * x).sin().powi(2)
            } else {
                0.0
            };
            pv.push(p);

            temp.push(mean_temp + swing * (2.0 * PI * (hf - 9.0) / 24.0).sin());

            let shape = 1.0 + 0.55 * gauss(hf, 8.0, 1.3) + 0.8 * gauss(hf, 18.5, 1.8)
                - 0.35 * gauss(hf, 3.0, 2.0)
                - 0.15 * gauss(hf, 13.0, 2.0);
            let jitter = 1.0 + 0.05 * noise.sample(&mut rng);
            buy.push((fees + spot * shape * jitter).max(0.01));
        }
    }
    ExogenousSeries::new(timestamps, buy, pv, temp)
}

fn gauss(x: f64, mu: f64, sigma: f64) -> f64 {
    (-0.5 * ((x - mu) / sigma).powi(2)).exp()
}
