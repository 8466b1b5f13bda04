//! Time-indexed series, phase arithmetic and the `t,value` CSV format.
//!
//! Every series carries the absolute time coordinate of its first
//! observation. Phases are computed from absolute time, so a series that
//! has been shortened at its edges keeps the phase of every surviving
//! observation.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Header line of the series CSV format.
pub const SERIES_HEADER: &str = "t,value";

/// Phase of time `t` within a cycle of length `period`, in `1..=period`.
///
/// Phase 1 is anchored at `t = 1`.
pub fn phase_of(t: i64, period: usize) -> Result<usize> {
    if period == 0 {
        return Err(Error::InvalidPeriod(period));
    }
    Ok(phase_unchecked(t, period))
}

#[inline]
pub(crate) fn phase_unchecked(t: i64, period: usize) -> usize {
    ((t - 1).rem_euclid(period as i64) + 1) as usize
}

/// Real-valued observations at consecutive integer times `t0, t0 + 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: i64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries(
                "a series needs at least one observation".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "value at t={} is not finite",
                t0 + i as i64
            )));
        }
        Ok(Self { t0, values })
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time coordinate of the last observation.
    pub fn t_end(&self) -> i64 {
        self.t0 + self.values.len() as i64 - 1
    }

    pub fn time_of(&self, index: usize) -> i64 {
        self.t0 + index as i64
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Iterator over `(t, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.t0 + i as i64, v))
    }
}

/// Complex-valued counterpart of [`TimeSeries`], produced by the KZFT filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    t0: i64,
    values: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn new(t0: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries(
                "a series needs at least one observation".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "value at t={} is not finite",
                t0 + i as i64
            )));
        }
        Ok(Self { t0, values })
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise modulus as a real series.
    pub fn modulus(&self) -> TimeSeries {
        TimeSeries {
            t0: self.t0,
            values: self.values.iter().map(|z| z.norm()).collect(),
        }
    }
}

/// One value per phase `1..=period` of a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    values: Vec<f64>,
}

impl PeriodicProfile {
    /// Builds a profile whose period is `values.len()`; `values[0]` is phase 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPeriod(0));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries("profile values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(period: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; period])
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `phase` in `1..=period`.
    pub fn at(&self, phase: usize) -> f64 {
        self.values[phase - 1]
    }
}

/// Parses a series from `t,value` CSV.
///
/// Lines beginning with `#` are metadata comments and are skipped, as are
/// blank lines. Times must increase by exactly one per row.
pub fn read_series<R: BufRead>(reader: R) -> Result<TimeSeries> {
    let mut header_seen = false;
    let mut t0 = None;
    let mut expected = 0i64;
    let mut values = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line.trim() != SERIES_HEADER {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected header `{SERIES_HEADER}`, found `{line}`"),
                });
            }
            header_seen = true;
            continue;
        }

        let (t_str, v_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: lineno,
            message: "expected two comma-separated fields".into(),
        })?;
        let t: i64 = t_str.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("time `{}` is not an integer", t_str.trim()),
        })?;
        let v: f64 = v_str.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("value `{}` is not a number", v_str.trim()),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("value `{}` is not finite", v_str.trim()),
            });
        }

        match t0 {
            None => {
                t0 = Some(t);
                expected = t;
            }
            Some(_) if t != expected => {
                return Err(Error::NonContiguousTime {
                    line: lineno,
                    expected,
                    found: t,
                })
            }
            Some(_) => {}
        }
        values.push(v);
        expected += 1;
    }

    if !header_seen {
        return Err(Error::Parse {
            line: 0,
            message: format!("missing header `{SERIES_HEADER}`"),
        });
    }
    match t0 {
        Some(t0) => TimeSeries::new(t0, values),
        None => Err(Error::InvalidSeries("no observations".into())),
    }
}

/// Renders a series as `t,value` CSV.
///
/// Values use the shortest decimal form that parses back to the same `f64`,
/// so `read_series` recovers every value bit for bit.
pub fn series_to_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(16 * series.len() + 8);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for (t, v) in series.iter() {
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

pub fn write_series<W: Write>(series: &TimeSeries, mut writer: W) -> std::io::Result<()> {
    writer.write_all(series_to_csv(series).as_bytes())
}
