//! Resampling toolkit for periodically correlated time series.
//!
//! * [`filter`]: KZ low-pass and KZFT bandpass filters, transfer functions
//!   and cut-off frequencies.
//! * [`bootstrap`]: phase partitions, phase-preserving resampling and
//!   bootstrap bands for the periodic mean.
//! * [`metrics`]: width, coverage and correlation scores for a pair of bands.
//! * [`sim`]: the Monte Carlo study comparing plain and bandpass-filtered
//!   periodic block bootstraps.
//!
//! The bandpass-filtered bootstrap (VBPBB) is a KZFT filter centred at
//! `1 / p`, followed by `2 Re` reconstruction and edge truncation, then the
//! same periodic bootstrap as the plain arm:
//!
//! ```
//! use vbpbb::{bandpass, bootstrap_band, BandConfig, BandSpec, EdgePolicy, ResampleMode, TimeSeries};
//!
//! let p = 25;
//! let x: Vec<f64> = (1..=500).map(|t| (2.0 * std::f64::consts::PI * t as f64 / p as f64).sin()).collect();
//! let series = TimeSeries::new(1, x).unwrap();
//! let filtered = bandpass(&series, &BandSpec::for_period(p, 11, 1).unwrap(), EdgePolicy::Truncate).unwrap();
//! let band = bootstrap_band(&filtered, &BandConfig {
//!     period: p, resamples: 100, level: 0.95, mode: ResampleMode::Phasewise, seed: 1,
//! }).unwrap();
//! assert_eq!(band.period(), p);
//! ```

pub mod bootstrap;
pub mod error;
pub mod filter;
pub mod metrics;
pub mod rng;
pub mod series;
pub mod sim;

pub use bootstrap::{
    bootstrap_band, periodic_mean, phase_partition, resample, BandConfig, BootstrapBand,
    PhasePartition, ResampleMode,
};
pub use error::{Error, Result};
pub use filter::{
    bandpass, bandpass_reconstruct, cutoff_frequency, energy_transfer_kz, energy_transfer_kzft,
    kz_filter, kz_kernel, kzft_filter, transfer_curve, BandSpec, CutoffMode, EdgePolicy,
    FilterKernel,
};
pub use metrics::{
    aggregate, band_width, compare, fraction_outside, r_squared, ComparisonRecord, ScenarioSummary,
    Truth,
};
pub use series::{phase_of, read_series, write_series, ComplexSeries, PeriodicProfile, TimeSeries};
pub use sim::{
    run_repetition, run_scenario, run_study, simulate_series, true_profile, Scenario,
    ScenarioReport,
};
