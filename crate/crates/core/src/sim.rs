//! Monte Carlo comparison of the plain periodic block bootstrap (PBB) and the
//! bandpass-filtered variant (VBPBB).
//!
//! Each repetition simulates a unit sine of period `p` (or nothing, in null
//! scenarios) plus iid Gaussian noise, bootstraps the raw series and its
//! KZFT-filtered reconstruction with identical settings, and scores both
//! bands against the true component.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_band, BandConfig, ResampleMode};
use crate::error::{Error, Result};
use crate::filter::{bandpass, BandSpec, EdgePolicy};
use crate::metrics::{aggregate, compare, ComparisonRecord, ScenarioSummary, Truth};
use crate::rng::{derive_seed, stream_rng, DERIVATION, GENERATOR};
use crate::series::{phase_unchecked, PeriodicProfile, TimeSeries};

/// Seed used when a scenario does not name one.
pub const DEFAULT_MASTER_SEED: u64 = 0;

/// Arm index in the seed-derivation path.
const ARM_NOISE: u64 = 0;
const ARM_PBB: u64 = 1;
const ARM_VBPBB: u64 = 2;

fn default_n() -> usize {
    1000
}
fn default_resamples() -> usize {
    500
}
fn default_repetitions() -> usize {
    100
}
fn default_m() -> usize {
    11
}
fn default_k() -> usize {
    1
}
fn default_level() -> f64 {
    0.95
}

/// One cell of the simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub period: usize,
    pub noise_variance: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_resamples", alias = "B")]
    pub resamples: usize,
    #[serde(default = "default_repetitions", alias = "R")]
    pub repetitions: usize,
    #[serde(default = "default_m")]
    pub kzft_m: usize,
    #[serde(default = "default_k")]
    pub kzft_k: usize,
    #[serde(default)]
    pub mode: ResampleMode,
    #[serde(default)]
    pub null_component: bool,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
}

impl Scenario {
    /// Desk-scale scenario with default filter settings.
    pub fn new(period: usize, noise_variance: f64) -> Self {
        Self {
            period,
            noise_variance,
            n: default_n(),
            resamples: default_resamples(),
            repetitions: default_repetitions(),
            kzft_m: default_m(),
            kzft_k: default_k(),
            mode: ResampleMode::default(),
            null_component: false,
            level: default_level(),
            master_seed: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(DEFAULT_MASTER_SEED)
    }

    pub fn label(&self) -> String {
        format!(
            "period={} noise_variance={} m={} k={} {}",
            self.period,
            self.noise_variance,
            self.kzft_m,
            self.kzft_k,
            if self.null_component {
                "null"
            } else {
                "component"
            }
        )
    }

    fn band(&self) -> Result<BandSpec> {
        BandSpec::for_period(self.period, self.kzft_m, self.kzft_k)
    }

    fn band_config(&self, seed: u64) -> BandConfig {
        BandConfig {
            period: self.period,
            resamples: self.resamples,
            level: self.level,
            mode: self.mode,
            seed,
        }
    }

    /// Checks parameter ranges and that the filtered series still spans a period.
    pub fn validate(&self) -> Result<()> {
        let invalid =
            |msg: String| Err(Error::InvalidParameter(format!("{}: {msg}", self.label())));
        if self.period == 0 {
            return Err(Error::InvalidPeriod(0));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return invalid(format!(
                "noise variance {} must be finite and >= 0",
                self.noise_variance
            ));
        }
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1".into());
        }
        self.band_config(0).validate()?;
        let band = self.band()?;
        let h = band.k * (band.m - 1) / 2;
        let filtered_len = self.n.saturating_sub(2 * h);
        if self.n < self.period || filtered_len < self.period {
            return Err(Error::ScenarioInfeasible {
                scenario: self.label(),
                reason: format!(
                    "series of length {} leaves {filtered_len} filtered observations, fewer than the period {}",
                    self.n, self.period
                ),
            });
        }
        Ok(())
    }
}

/// The unit sine `sin(2 pi j / p)` over phases `1..=p`.
pub fn true_profile(period: usize) -> Result<PeriodicProfile> {
    if period == 0 {
        return Err(Error::InvalidPeriod(0));
    }
    PeriodicProfile::new(
        (1..=period)
            .map(|j| (2.0 * PI * j as f64 / period as f64).sin())
            .collect(),
    )
}

/// Simulated series `X(t) = sin(2 pi t / p) + sigma Z(t)`, `t = 1..=n`.
///
/// The sine is read from [`true_profile`] by phase, so it is exactly
/// periodic in floating point.
pub fn simulate_series(scenario: &Scenario, repetition: usize) -> Result<TimeSeries> {
    let seed = derive_seed(scenario.seed(), &[repetition as u64, ARM_NOISE]);
    let mut rng = stream_rng(seed, 0);
    let sigma = scenario.noise_variance.sqrt();
    let truth = true_profile(scenario.period)?;
    let values = (1..=scenario.n as i64)
        .map(|t| {
            let signal = if scenario.null_component {
                0.0
            } else {
                truth.at(phase_unchecked(t, scenario.period))
            };
            let z: f64 = rng.sample(StandardNormal);
            signal + sigma * z
        })
        .collect();
    TimeSeries::new(1, values)
}

fn infeasible(scenario: &Scenario, err: Error) -> Error {
    match err {
        Error::InsufficientData(reason) => Error::ScenarioInfeasible {
            scenario: scenario.label(),
            reason,
        },
        other => other,
    }
}

/// Runs one repetition: both arms see the same simulated series.
pub fn run_repetition(scenario: &Scenario, repetition: usize) -> Result<ComparisonRecord> {
    let series = simulate_series(scenario, repetition)?;
    compare_arms(scenario, repetition, &series)
}

/// Scores the PBB and VBPBB arms of `repetition` on a given series.
pub fn compare_arms(
    scenario: &Scenario,
    repetition: usize,
    series: &TimeSeries,
) -> Result<ComparisonRecord> {
    let master = scenario.seed();
    let rep = repetition as u64;

    let pbb = bootstrap_band(
        series,
        &scenario.band_config(derive_seed(master, &[rep, ARM_PBB])),
    )
    .map_err(|e| infeasible(scenario, e))?;

    let filtered =
        bandpass(series, &scenario.band()?, EdgePolicy::Truncate).map_err(|e| match e {
            Error::SeriesTooShort { len, required } => Error::ScenarioInfeasible {
                scenario: scenario.label(),
                reason: format!(
                    "series of length {len} is shorter than the filter support {required}"
                ),
            },
            other => other,
        })?;
    let vbpbb = bootstrap_band(
        &filtered,
        &scenario.band_config(derive_seed(master, &[rep, ARM_VBPBB])),
    )
    .map_err(|e| infeasible(scenario, e))?;

    let truth = if scenario.null_component {
        Truth::Null {
            period: scenario.period,
        }
    } else {
        Truth::Component(true_profile(scenario.period)?)
    };
    compare(&truth, &pbb, &vbpbb)
}

/// Random-number provenance attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngInfo {
    pub generator: String,
    pub derivation: String,
    pub master_seed: u64,
}

impl RngInfo {
    pub fn new(master_seed: u64) -> Self {
        Self {
            generator: GENERATOR.to_string(),
            derivation: DERIVATION.to_string(),
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub rng: RngInfo,
    pub summary: ScenarioSummary,
    /// Per-repetition records in repetition order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<ComparisonRecord>,
}

impl ScenarioReport {
    /// Recomputes the summary from the stored records.
    pub fn resummarize(&self) -> Result<ScenarioSummary> {
        aggregate(&self.records)
    }
}

/// Runs every repetition of `scenario` and aggregates them.
///
/// Repetitions run in parallel; records are collected in repetition order,
/// so the report does not depend on the thread count.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    scenario.validate()?;
    let mut scenario = scenario.clone();
    let seed = scenario.seed();
    scenario.master_seed = Some(seed);

    let records = (0..scenario.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(&scenario, r))
        .collect::<Result<Vec<_>>>()?;
    let summary = aggregate(&records)?;
    Ok(ScenarioReport {
        scenario,
        rng: RngInfo::new(seed),
        summary,
        records,
    })
}

/// Which of the four summary tables to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Median CI width ratio PBB / VBPBB, scenarios with a component.
    WidthRatio = 1,
    /// Median r-squared difference (VBPBB - PBB) in percentage points.
    RsqDifference = 2,
    /// Median outside-fraction difference (VBPBB - PBB).
    OutsideDifference = 3,
    /// Median CI width ratio in null scenarios.
    NullWidthRatio = 4,
}

impl TableKind {
    pub const ALL: [TableKind; 4] = [
        TableKind::WidthRatio,
        TableKind::RsqDifference,
        TableKind::OutsideDifference,
        TableKind::NullWidthRatio,
    ];

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| *k as u8 == n)
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn title(self) -> &'static str {
        match self {
            TableKind::WidthRatio => "median ratio of CI widths, PBB / VBPBB",
            TableKind::RsqDifference => {
                "median difference in squared correlation with the true component, VBPBB - PBB, x100"
            }
            TableKind::OutsideDifference => {
                "median difference in fraction of the true component outside the CI, VBPBB - PBB"
            }
            TableKind::NullWidthRatio => "median ratio of CI widths, PBB / VBPBB, no periodic component",
        }
    }

    fn wants_null(self) -> bool {
        self == TableKind::NullWidthRatio
    }

    fn cell(self, summary: &ScenarioSummary) -> Option<f64> {
        match self {
            TableKind::WidthRatio | TableKind::NullWidthRatio => Some(summary.width_ratio),
            TableKind::RsqDifference => summary.rsq_difference_pct,
            TableKind::OutsideDifference => Some(summary.outside_difference),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub period: usize,
    pub m: usize,
    pub k: usize,
    pub cells: Vec<Option<f64>>,
}

/// Rows are `(period, m, k)`, columns are noise variances.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub kind: TableKind,
    pub noise_levels: Vec<f64>,
    pub rows: Vec<TableRow>,
}

impl StudyTable {
    /// Assembles a table from reports. When two reports share a cell the
    /// later one wins.
    pub fn from_reports(kind: TableKind, reports: &[ScenarioReport]) -> Self {
        let relevant: Vec<&ScenarioReport> = reports
            .iter()
            .filter(|r| r.scenario.null_component == kind.wants_null())
            .collect();

        let mut noise_levels: Vec<f64> =
            relevant.iter().map(|r| r.scenario.noise_variance).collect();
        noise_levels.sort_by(f64::total_cmp);
        noise_levels.dedup();

        let mut keys: Vec<(usize, usize, usize)> = relevant
            .iter()
            .map(|r| (r.scenario.period, r.scenario.kzft_m, r.scenario.kzft_k))
            .collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
        keys.dedup();

        let rows = keys
            .into_iter()
            .map(|(period, m, k)| {
                let mut cells = vec![None; noise_levels.len()];
                for r in relevant.iter().filter(|r| {
                    (r.scenario.period, r.scenario.kzft_m, r.scenario.kzft_k) == (period, m, k)
                }) {
                    let col = noise_levels
                        .iter()
                        .position(|v| v.total_cmp(&r.scenario.noise_variance).is_eq())
                        .expect("noise level collected above");
                    cells[col] = kind.cell(&r.summary);
                }
                TableRow {
                    period,
                    m,
                    k,
                    cells,
                }
            })
            .collect();
        Self {
            kind,
            noise_levels,
            rows,
        }
    }

    pub fn cell(&self, period: usize, m: usize, noise_variance: f64) -> Option<f64> {
        let col = self
            .noise_levels
            .iter()
            .position(|v| *v == noise_variance)?;
        self.rows
            .iter()
            .find(|r| r.period == period && r.m == m)
            .and_then(|r| r.cells[col])
    }

    /// CSV rendering: `#` comment lines, then `period,m,k,<noise levels>`.
    ///
    /// With `threshold_style` cells are rounded to two decimals, and outside
    /// differences below 0.01 / 0.05 print as `<0.01` / `<0.05`.
    pub fn to_csv(&self, threshold_style: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table {}: {}", self.kind.number(), self.kind.title());
        let _ = writeln!(
            out,
            "# rows: period and KZFT (m, k); columns: noise variance"
        );
        out.push_str("period,m,k");
        for v in &self.noise_levels {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{},{}", row.period, row.m, row.k);
            for cell in &row.cells {
                out.push(',');
                if let Some(v) = cell {
                    out.push_str(&format_cell(self.kind, *v, threshold_style));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn format_cell(kind: TableKind, v: f64, threshold_style: bool) -> String {
    if !threshold_style {
        return v.to_string();
    }
    if kind == TableKind::OutsideDifference {
        if v < 0.01 {
            return "<0.01".into();
        }
        if v < 0.05 {
            return "<0.05".into();
        }
    }
    format!("{v:.2}")
}

/// Reports and tables of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub reports: Vec<ScenarioReport>,
}

impl Study {
    pub fn table(&self, kind: TableKind) -> StudyTable {
        StudyTable::from_reports(kind, &self.reports)
    }
}

/// Runs every scenario of a grid, in grid order.
pub fn run_study(grid: &[Scenario]) -> Result<Study> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("scenario grid is empty".into()));
    }
    for s in grid {
        s.validate()?;
    }
    let reports = grid.iter().map(run_scenario).collect::<Result<Vec<_>>>()?;
    Ok(Study { reports })
}

/// Periods of the reference study grid.
pub const STUDY_PERIODS: [usize; 5] = [10, 25, 50, 100, 250];
/// Noise variances of the reference study grid (signal-to-noise 1:2, 1:5, 1:10).
pub const STUDY_NOISE_VARIANCES: [f64; 3] = [2.0, 5.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    /// 100 repetitions of 500 resamples.
    Desk,
    /// 1000 repetitions of 1000 resamples.
    Full,
}

/// The reference study design: every period and noise level with and without a
/// component, plus the `m = 5` reruns at period 10.
pub fn study_grid(scale: GridScale, master_seed: Option<u64>) -> Vec<Scenario> {
    let (repetitions, resamples) = match scale {
        GridScale::Desk => (100, 500),
        GridScale::Full => (1000, 1000),
    };
    let base = |period, noise_variance| Scenario {
        repetitions,
        resamples,
        master_seed,
        ..Scenario::new(period, noise_variance)
    };
    let mut grid = Vec::new();
    for null_component in [false, true] {
        for &p in &STUDY_PERIODS {
            for &v in &STUDY_NOISE_VARIANCES {
                grid.push(Scenario {
                    null_component,
                    ..base(p, v)
                });
            }
        }
    }
    for &v in &STUDY_NOISE_VARIANCES {
        grid.push(Scenario {
            kzft_m: 5,
            ..base(10, v)
        });
    }
    grid
}
