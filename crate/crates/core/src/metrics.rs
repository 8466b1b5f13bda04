//! Scores for comparing a plain PBB band with a VBPBB band.

use serde::{Deserialize, Serialize};

use crate::bootstrap::{median, BootstrapBand};
use crate::error::{Error, Result};
use crate::series::PeriodicProfile;

/// Mean over phases of the band width `upper - lower`.
pub fn band_width(band: &BootstrapBand) -> f64 {
    let p = band.period();
    let total: f64 = (1..=p).map(|j| band.upper.at(j) - band.lower.at(j)).sum();
    total / p as f64
}

/// Fraction of phases where `truth` lies strictly outside the band.
pub fn fraction_outside(truth: &PeriodicProfile, band: &BootstrapBand) -> Result<f64> {
    if truth.period() != band.period() {
        return Err(Error::InvalidComparison(format!(
            "truth period {} differs from band period {}",
            truth.period(),
            band.period()
        )));
    }
    let p = truth.period();
    let outside = (1..=p)
        .filter(|&j| {
            let v = truth.at(j);
            v < band.lower.at(j) || v > band.upper.at(j)
        })
        .count();
    Ok(outside as f64 / p as f64)
}

/// Squared Pearson correlation of two profiles of equal period.
pub fn r_squared(a: &PeriodicProfile, b: &PeriodicProfile) -> Result<f64> {
    if a.period() != b.period() {
        return Err(Error::InvalidComparison(format!(
            "profile periods {} and {} differ",
            a.period(),
            b.period()
        )));
    }
    let (ma, sa) = centred(a.values());
    let (mb, sb) = centred(b.values());
    if degenerate(sa, a.values()) {
        return Err(Error::UndefinedCorrelation("first profile"));
    }
    if degenerate(sb, b.values()) {
        return Err(Error::UndefinedCorrelation("second profile"));
    }
    let sab: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum();
    Ok(((sab * sab) / (sa * sb)).min(1.0))
}

/// Mean and sum of squared deviations.
fn centred(v: &[f64]) -> (f64, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let ss = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss)
}

/// True when the spread is rounding noise relative to the values' magnitude.
fn degenerate(ss: f64, v: &[f64]) -> bool {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 16.0 * f64::EPSILON * scale;
    ss <= v.len() as f64 * tol * tol
}

/// The reference a pair of bands is scored against.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    /// A known periodic component.
    Component(PeriodicProfile),
    /// No periodic component; coverage is scored against zero.
    Null { period: usize },
}

impl Truth {
    pub fn period(&self) -> usize {
        match self {
            Truth::Component(p) => p.period(),
            Truth::Null { period } => *period,
        }
    }

    fn profile(&self) -> Result<PeriodicProfile> {
        match self {
            Truth::Component(p) => Ok(p.clone()),
            Truth::Null { period } => PeriodicProfile::constant(*period, 0.0),
        }
    }
}

/// Metrics of one repetition: PBB arm against VBPBB arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub width_pbb: f64,
    pub width_vbpbb: f64,
    pub outside_pbb: f64,
    pub outside_vbpbb: f64,
    pub rsq_pbb: Option<f64>,
    pub rsq_vbpbb: Option<f64>,
}

impl ComparisonRecord {
    /// `width_pbb / width_vbpbb`; two zero widths compare as equal (ratio 1).
    pub fn width_ratio(&self) -> f64 {
        if self.width_pbb == self.width_vbpbb {
            1.0
        } else {
            self.width_pbb / self.width_vbpbb
        }
    }

    /// `rsq_vbpbb - rsq_pbb` in percentage points.
    pub fn rsq_difference_pct(&self) -> Option<f64> {
        Some((self.rsq_vbpbb? - self.rsq_pbb?) * 100.0)
    }

    pub fn outside_difference(&self) -> f64 {
        self.outside_vbpbb - self.outside_pbb
    }
}

pub fn compare(
    truth: &Truth,
    pbb: &BootstrapBand,
    vbpbb: &BootstrapBand,
) -> Result<ComparisonRecord> {
    let p = truth.period();
    if pbb.period() != p || vbpbb.period() != p {
        return Err(Error::InvalidComparison(format!(
            "band periods {} and {} do not match truth period {p}",
            pbb.period(),
            vbpbb.period()
        )));
    }
    let reference = truth.profile()?;
    let (rsq_pbb, rsq_vbpbb) = match truth {
        Truth::Component(profile) => (
            Some(r_squared(profile, &pbb.point)?),
            Some(r_squared(profile, &vbpbb.point)?),
        ),
        Truth::Null { .. } => (None, None),
    };
    Ok(ComparisonRecord {
        width_pbb: band_width(pbb),
        width_vbpbb: band_width(vbpbb),
        outside_pbb: fraction_outside(&reference, pbb)?,
        outside_vbpbb: fraction_outside(&reference, vbpbb)?,
        rsq_pbb,
        rsq_vbpbb,
    })
}

/// Medians across repetitions of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub repetitions: usize,
    /// Median of `width_pbb / width_vbpbb`.
    pub width_ratio: f64,
    /// Median of `(rsq_vbpbb - rsq_pbb) * 100`; absent without a component.
    pub rsq_difference_pct: Option<f64>,
    /// Median of `outside_vbpbb - outside_pbb`.
    pub outside_difference: f64,
    pub median_width_pbb: f64,
    pub median_width_vbpbb: f64,
    pub median_outside_pbb: f64,
    pub median_outside_vbpbb: f64,
}

pub fn aggregate(records: &[ComparisonRecord]) -> Result<ScenarioSummary> {
    if records.is_empty() {
        return Err(Error::InvalidAggregation("no records to aggregate".into()));
    }
    let with_rsq = records
        .iter()
        .filter(|r| r.rsq_difference_pct().is_some())
        .count();
    if with_rsq != 0 && with_rsq != records.len() {
        return Err(Error::InvalidAggregation(
            "records mix null and non-null scenarios".into(),
        ));
    }
    let col = |f: &dyn Fn(&ComparisonRecord) -> f64| -> f64 {
        median(&records.iter().map(f).collect::<Vec<_>>())
    };
    let rsq_difference_pct =
        (with_rsq > 0).then(|| col(&|r| r.rsq_difference_pct().expect("checked above")));
    Ok(ScenarioSummary {
        repetitions: records.len(),
        width_ratio: col(&ComparisonRecord::width_ratio),
        rsq_difference_pct,
        outside_difference: col(&ComparisonRecord::outside_difference),
        median_width_pbb: col(&|r| r.width_pbb),
        median_width_vbpbb: col(&|r| r.width_vbpbb),
        median_outside_pbb: col(&|r| r.outside_pbb),
        median_outside_vbpbb: col(&|r| r.outside_vbpbb),
    })
}
