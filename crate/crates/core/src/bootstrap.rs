//! Periodic block bootstrap.
//!
//! A series is split into `p` phase subsets. A resample keeps each output
//! position's phase: in `Phasewise` mode every position is drawn from its
//! own phase subset, in `SeasonBlock` mode whole cycles are copied from
//! randomly chosen cycle starts.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::series::{phase_unchecked, PeriodicProfile, TimeSeries};

/// Header line of the band CSV format.
pub const BAND_HEADER: &str = "phase,point,lower,upper";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleMode {
    /// Each position draws one value from the subset of its phase.
    #[default]
    Phasewise,
    /// Each cycle is copied whole from a randomly chosen complete cycle.
    SeasonBlock,
}

impl std::str::FromStr for ResampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phasewise" => Ok(Self::Phasewise),
            "season-block" => Ok(Self::SeasonBlock),
            other => Err(Error::InvalidParameter(format!(
                "unknown resample mode `{other}` (expected phasewise or season-block)"
            ))),
        }
    }
}

impl std::fmt::Display for ResampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Phasewise => "phasewise",
            Self::SeasonBlock => "season-block",
        })
    }
}

/// Positions of a series grouped by phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePartition {
    t0: i64,
    subsets: Vec<Vec<usize>>,
}

impl PhasePartition {
    pub fn period(&self) -> usize {
        self.subsets.len()
    }

    /// Ascending positions whose phase is `phase` (`1..=period`).
    pub fn subset(&self, phase: usize) -> &[usize] {
        &self.subsets[phase - 1]
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Phase of position `index` in the partitioned series.
    pub fn phase_at(&self, index: usize) -> usize {
        phase_unchecked(self.t0 + index as i64, self.period())
    }
}

fn check_period(series: &TimeSeries, period: usize) -> Result<()> {
    if period == 0 {
        return Err(Error::InvalidPeriod(period));
    }
    if period > series.len() {
        return Err(Error::InsufficientData(format!(
            "period {period} exceeds series length {}",
            series.len()
        )));
    }
    Ok(())
}

pub fn phase_partition(series: &TimeSeries, period: usize) -> Result<PhasePartition> {
    check_period(series, period)?;
    let mut subsets = vec![Vec::with_capacity(series.len() / period + 1); period];
    for i in 0..series.len() {
        subsets[phase_unchecked(series.time_of(i), period) - 1].push(i);
    }
    Ok(PhasePartition {
        t0: series.t0(),
        subsets,
    })
}

/// Per-phase arithmetic mean.
pub fn periodic_mean(series: &TimeSeries, period: usize) -> Result<PeriodicProfile> {
    check_period(series, period)?;
    let means = phase_means(series.t0(), series.values(), period);
    PeriodicProfile::new(means)
}

/// Per-phase means, accumulated as offsets from the first value seen in each
/// phase so that a phase holding one repeated value has exactly that mean.
fn phase_means(t0: i64, values: &[f64], period: usize) -> Vec<f64> {
    let mut anchors = vec![0.0; period];
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    let first = phase_unchecked(t0, period) - 1;
    for (i, &v) in values.iter().enumerate() {
        let j = (first + i) % period;
        if counts[j] == 0 {
            anchors[j] = v;
        } else {
            sums[j] += v - anchors[j];
        }
        counts[j] += 1;
    }
    anchors
        .iter()
        .zip(&sums)
        .zip(&counts)
        .map(|((a, s), &c)| a + s / c as f64)
        .collect()
}

/// Source positions where a complete cycle starts.
fn cycle_starts(partition: &PhasePartition, n: usize) -> Vec<usize> {
    let p = partition.period();
    partition
        .subset(1)
        .iter()
        .copied()
        .filter(|&s| s + p <= n)
        .collect()
}

/// Draws one resample of `series` into `out`.
///
/// `out` is cleared and refilled with `series.len()` values; the output keeps
/// the input's time origin.
pub fn resample_into<R: Rng + ?Sized>(
    series: &TimeSeries,
    partition: &PhasePartition,
    mode: ResampleMode,
    rng: &mut R,
    out: &mut Vec<f64>,
) -> Result<()> {
    let x = series.values();
    let n = x.len();
    let p = partition.period();
    out.clear();
    out.reserve(n);
    let first = partition.phase_at(0) - 1;

    match mode {
        ResampleMode::Phasewise => {
            for i in 0..n {
                let subset = &partition.subsets[(first + i) % p];
                out.push(x[subset[rng.random_range(0..subset.len())]]);
            }
        }
        ResampleMode::SeasonBlock => {
            let starts = cycle_starts(partition, n);
            if starts.is_empty() {
                return Err(Error::InsufficientData(format!(
                    "no complete cycle of period {p} in a series of length {n}"
                )));
            }
            // A new block begins at position 0 and at every phase-1 position;
            // a leading or trailing partial block copies the matching phases
            // of the drawn cycle.
            let mut start = 0;
            for i in 0..n {
                let phase_idx = (first + i) % p;
                if i == 0 || phase_idx == 0 {
                    start = starts[rng.random_range(0..starts.len())];
                }
                out.push(x[start + phase_idx]);
            }
        }
    }
    Ok(())
}

/// Draws one phase-preserving resample of `series`.
pub fn resample<R: Rng + ?Sized>(
    series: &TimeSeries,
    partition: &PhasePartition,
    mode: ResampleMode,
    rng: &mut R,
) -> Result<TimeSeries> {
    if partition.t0 != series.t0()
        || partition.subsets.iter().map(Vec::len).sum::<usize>() != series.len()
    {
        return Err(Error::InvalidParameter(
            "partition was not built from this series".into(),
        ));
    }
    let mut out = Vec::new();
    resample_into(series, partition, mode, rng, &mut out)?;
    TimeSeries::new(series.t0(), out)
}

/// Quantile by linear interpolation between order statistics at rank
/// `(len - 1) q + 1` (1-based). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Median by the same interpolation rule as [`quantile_sorted`].
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Bootstrap parameters shared by every band computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandConfig {
    pub period: usize,
    pub resamples: usize,
    pub level: f64,
    pub mode: ResampleMode,
    pub seed: u64,
}

impl BandConfig {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::InvalidPeriod(0));
        }
        if self.resamples < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 resamples (got {})",
                self.resamples
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence level {} outside (0, 1)",
                self.level
            )));
        }
        Ok(())
    }
}

/// Per-phase bootstrap distribution summary of the periodic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapBand {
    pub point: PeriodicProfile,
    pub lower: PeriodicProfile,
    pub upper: PeriodicProfile,
    pub level: f64,
    pub resamples: usize,
}

impl BootstrapBand {
    pub fn period(&self) -> usize {
        self.point.period()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BAND_HEADER);
        out.push('\n');
        for j in 1..=self.period() {
            let _ = writeln!(
                out,
                "{j},{},{},{}",
                self.point.at(j),
                self.lower.at(j),
                self.upper.at(j)
            );
        }
        out
    }
}

/// Builds the bootstrap band of the periodic mean.
///
/// Resample `r` draws from stream `r` of `config.seed`, so the band is the
/// same whatever the thread count. Only the `B x p` resample means are kept.
pub fn bootstrap_band(series: &TimeSeries, config: &BandConfig) -> Result<BootstrapBand> {
    config.validate()?;
    let p = config.period;
    let partition = phase_partition(series, p)?;
    if config.mode == ResampleMode::SeasonBlock && cycle_starts(&partition, series.len()).is_empty()
    {
        return Err(Error::InsufficientData(format!(
            "no complete cycle of period {p} in a series of length {}",
            series.len()
        )));
    }

    let means: Vec<Vec<f64>> = (0..config.resamples)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = stream_rng(config.seed, r as u64);
            resample_into(series, &partition, config.mode, &mut rng, buf)
                .expect("resample preconditions checked above");
            phase_means(series.t0(), buf, p)
        })
        .collect();

    let lo_q = (1.0 - config.level) / 2.0;
    let hi_q = (1.0 + config.level) / 2.0;
    let mut point = Vec::with_capacity(p);
    let mut lower = Vec::with_capacity(p);
    let mut upper = Vec::with_capacity(p);
    let mut column = Vec::with_capacity(config.resamples);
    for j in 0..p {
        column.clear();
        column.extend(means.iter().map(|m| m[j]));
        column.sort_by(f64::total_cmp);
        point.push(quantile_sorted(&column, 0.5));
        lower.push(quantile_sorted(&column, lo_q));
        upper.push(quantile_sorted(&column, hi_q));
    }

    Ok(BootstrapBand {
        point: PeriodicProfile::new(point)?,
        lower: PeriodicProfile::new(lower)?,
        upper: PeriodicProfile::new(upper)?,
        level: config.level,
        resamples: config.resamples,
    })
}
