//! Uncertainty envelope over a time series: maps a demand trajectory through
//! swept Pareto triples to min/max cost bounds, and scores how much of a
//! forecast lies inside the band.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pareto::SweepResult;

/// A strictly time-ordered sequence of `(t, value)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    points: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("time series is empty".into()));
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Validation(format!(
                    "time column is not strictly increasing at row {} ({} then {})",
                    i + 2,
                    pair[0].0,
                    pair[1].0
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation at `t`, which must lie inside the time hull.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        if t < self.start() || t > self.end() {
            return Err(Error::Extrapolation(format!(
                "time {t} outside series hull [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let idx = self.points.partition_point(|&(pt, _)| pt <= t);
        if idx == 0 {
            return Ok(self.points[0].1);
        }
        let (t0, v0) = self.points[idx - 1];
        if t0 == t || idx == self.points.len() {
            return Ok(v0);
        }
        let (t1, v1) = self.points[idx];
        Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }
}

/// Named CSV columns to read a series from.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub time: String,
    pub value: String,
}

impl ColumnMap {
    pub fn new(time: &str, value: &str) -> Self {
        Self { time: time.into(), value: value.into() }
    }
}

/// Load a `(time, value)` series from a headed CSV file. Unparseable
/// numerics and non-monotone times are rejected with their row number.
pub fn load_series(path: &Path, columns: &ColumnMap) -> Result<TimeSeries> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => Error::Csv(e),
    })?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Validation(format!("column '{name}' not found in {}", path.display()))
        })
    };
    let time_idx = col(&columns.time)?;
    let value_idx = col(&columns.value)?;

    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize, name: &str| -> Result<f64> {
            record
                .get(idx)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "row {}: column '{name}' is not numeric (got {:?})",
                        row + 2,
                        record.get(idx).unwrap_or("")
                    ))
                })
        };
        let t = parse(time_idx, &columns.time)?;
        if let Some(&(prev, _)) = points.last() {
            if t <= prev {
                return Err(Error::Validation(format!(
                    "row {}: time column is not strictly increasing ({prev} then {t})",
                    row + 2
                )));
            }
        }
        points.push((t, parse(value_idx, &columns.value)?));
    }
    if points.is_empty() {
        return Err(Error::Validation(format!("{} has no data rows", path.display())));
    }
    TimeSeries::new(points)
}

/// Lower/upper cost bounds over a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub lower: TimeSeries,
    pub upper: TimeSeries,
}

impl Envelope {
    pub fn bounds_at(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.lower.interpolate(t)?, self.upper.interpolate(t)?))
    }
}

/// Map each demand sample through the sweep's `(min cost, max cost)` knots
/// by linear interpolation between the two nearest swept demands.
pub fn build_envelope(demand_series: &TimeSeries, sweep: &SweepResult) -> Result<Envelope> {
    if sweep.entries.is_empty() {
        return Err(Error::Validation("sweep has no entries".into()));
    }
    let knots: Vec<(f64, f64, f64)> = sweep
        .entries
        .iter()
        .map(|e| (e.demand as f64, e.result.min_cost, e.result.max_cost))
        .collect();
    let (d_lo, d_hi) = (knots[0].0, knots[knots.len() - 1].0);

    let mut lower = Vec::with_capacity(demand_series.points().len());
    let mut upper = Vec::with_capacity(demand_series.points().len());
    for &(t, demand) in demand_series.points() {
        if demand < d_lo || demand > d_hi {
            return Err(Error::Extrapolation(format!(
                "demand {demand} at t={t} outside sweep hull [{d_lo}, {d_hi}]"
            )));
        }
        let idx = knots.partition_point(|&(d, _, _)| d <= demand);
        let (min_fc, max_fc) = if idx == 0 {
            (knots[0].1, knots[0].2)
        } else {
            let (d0, lo0, hi0) = knots[idx - 1];
            if d0 == demand || idx == knots.len() {
                (lo0, hi0)
            } else {
                let (d1, lo1, hi1) = knots[idx];
                let w = (demand - d0) / (d1 - d0);
                (lo0 + (lo1 - lo0) * w, hi0 + (hi1 - hi0) * w)
            }
        };
        lower.push((t, min_fc));
        upper.push((t, max_fc));
    }
    Ok(Envelope {
        lower: TimeSeries::new(lower)?,
        upper: TimeSeries::new(upper)?,
    })
}

/// Containment score for one containment run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ContainmentReport {
    pub points: u64,
    pub inside: u64,
    pub ratio: f64,
}

/// Fraction of series points falling inside the closed envelope band,
/// interpolating the envelope between its time knots.
pub fn containment_ratio(series: &TimeSeries, env: &Envelope) -> Result<ContainmentReport> {
    let mut inside = 0u64;
    for &(t, value) in series.points() {
        let (lo, hi) = env.bounds_at(t)?;
        if lo <= value && value <= hi {
            inside += 1;
        }
    }
    let points = series.points().len() as u64;
    Ok(ContainmentReport {
        points,
        inside,
        ratio: inside as f64 / points as f64,
    })
}
