//! Loading measured boundary series (time, value) from delimited text files
//! and turning them into boundary drivers.

use crate::boundary::BoundaryDriver;
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Unit of the time column in an input file. Solver time is seconds (or the
/// dimensionless unit the diffusivity was expressed in).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Seconds,
    Minutes,
    Hours,
}

impl TimeUnit {
    pub fn to_seconds(self) -> f64 {
        match self {
            TimeUnit::Seconds => 1.0,
            TimeUnit::Minutes => 60.0,
            TimeUnit::Hours => 3600.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "sec" | "secs" | "second" | "seconds" => Ok(TimeUnit::Seconds),
            "min" | "mins" | "minute" | "minutes" => Ok(TimeUnit::Minutes),
            "h" | "hr" | "hrs" | "hour" | "hours" => Ok(TimeUnit::Hours),
            other => Err(Error::config(format!("unknown time unit '{other}'"))),
        }
    }
}

/// A measured series of (time, value) samples with strictly increasing
/// times, at least two samples, and finite values. Evaluation is
/// piecewise-linear between samples and constant beyond either end, so the
/// interpolant is continuous and bounded by the sample range.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    source: Option<PathBuf>,
}

impl TemperatureSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_source(times, values, None)
    }

    fn with_source(times: Vec<f64>, values: Vec<f64>, source: Option<PathBuf>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::config(format!(
                "series has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::config("series needs at least two samples"));
        }
        for (i, (&t, &v)) in times.iter().zip(&values).enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::config(format!(
                    "series sample {i} is not finite: ({t}, {v})"
                )));
            }
            if i > 0 && t <= times[i - 1] {
                return Err(Error::config(format!(
                    "series times must be strictly increasing: sample {i} has t = {t} after t = {}",
                    times[i - 1]
                )));
            }
        }
        Ok(TemperatureSeries {
            times,
            values,
            source,
        })
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires two samples
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn source_label(&self) -> String {
        match &self.source {
            Some(p) => p.display().to_string(),
            None => "<inline>".to_string(),
        }
    }

    /// Piecewise-linear interpolation, constant beyond the sampled range.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.times[0] {
            return self.values[0];
        }
        let last = self.times.len() - 1;
        if t >= self.times[last] {
            return self.values[last];
        }
        // partition_point: first index with times[i] > t; t is strictly
        // inside the range here, so 1 <= idx <= last.
        let idx = self.times.partition_point(|&ti| ti <= t);
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let (v0, v1) = (self.values[idx - 1], self.values[idx]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// Reads a two-column delimited text file (comma, semicolon, or whitespace)
/// into a series, converting the time column from `unit` to seconds.
/// `#`-prefixed lines are comments; a single non-numeric first row is
/// accepted as a header. Any other malformed row is an error naming the
/// line.
pub fn load_series(path: impl AsRef<Path>, unit: TimeUnit) -> Result<TemperatureSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut saw_data = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Option<(f64, f64)> = match fields.as_slice() {
            [a, b] => match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(v)) => Some((t, v)),
                _ => None,
            },
            _ => None,
        };
        match parsed {
            Some((t, v)) => {
                let t_s = t * unit.to_seconds();
                if let Some(&prev) = times.last() {
                    if t_s <= prev {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            reason: format!(
                                "time {t} not greater than the previous sample (times must be strictly increasing)"
                            ),
                        });
                    }
                }
                times.push(t_s);
                values.push(v);
                saw_data = true;
            }
            None if !saw_data && times.is_empty() && fields.len() == 2 => {
                // header row such as "hours,celsius"
                continue;
            }
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    reason: format!("expected two numeric columns, got '{line}'"),
                });
            }
        }
    }
    if times.len() < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: text.lines().count(),
            reason: format!("need at least two data rows, found {}", times.len()),
        });
    }
    TemperatureSeries::with_source(times, values, Some(path.to_path_buf()))
}

/// Wraps a series as a Dirichlet (prescribed temperature) driver for a run
/// of length `t_max`, reporting any extrapolation the run will rely on.
pub fn driver_from_series(
    series: TemperatureSeries,
    t_max: f64,
) -> Result<(BoundaryDriver, Vec<String>)> {
    let warnings = coverage_warnings(&series, t_max)?;
    Ok((BoundaryDriver::SampledTemperature(series), warnings))
}

/// Wraps a series of measured gradients as a Neumann (prescribed flux)
/// driver.
pub fn flux_driver_from_series(
    series: TemperatureSeries,
    t_max: f64,
) -> Result<(BoundaryDriver, Vec<String>)> {
    let warnings = coverage_warnings(&series, t_max)?;
    Ok((BoundaryDriver::SampledFlux(series), warnings))
}

fn coverage_warnings(series: &TemperatureSeries, t_max: f64) -> Result<Vec<String>> {
    if !(t_max > 0.0) {
        return Err(Error::config(format!("t_max must be positive, got {t_max}")));
    }
    if t_max < series.start_time() {
        return Err(Error::config(format!(
            "t_max = {t_max} ends before the first sample at t = {}; nothing to interpolate",
            series.start_time()
        )));
    }
    let mut warnings = Vec::new();
    if series.start_time() > 0.0 {
        warnings.push(format!(
            "series starts at t = {}; the first value {} is held constant back to t = 0",
            series.start_time(),
            series.eval(series.start_time())
        ));
    }
    if series.end_time() < t_max {
        warnings.push(format!(
            "series ends at t = {} but the run lasts until t = {t_max}; the last value {} is held constant beyond the data",
            series.end_time(),
            series.eval(series.end_time())
        ));
    }
    Ok(warnings)
}
