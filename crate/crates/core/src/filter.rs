//! Kolmogorov-Zurbenko low-pass and KZFT bandpass filters.
//!
//! A KZ filter with window `m` and `k` iterations is the `k`-fold iterated
//! centred moving average of width `m`. Its weights are the coefficients of
//! `(1 + z + ... + z^(m-1))^k` divided by `m^k`. The KZFT filter modulates
//! the same weights by `exp(-i 2 pi nu u)`, moving the passband from zero to
//! the centre frequency `nu`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{ComplexSeries, TimeSeries};

/// Threshold below which `sin(pi * lambda)` is treated as zero and the
/// transfer function returns its limit value.
const SINGULARITY_EPS: f64 = 1e-12;

/// How a filter treats the `h` observations at each end where the kernel
/// does not fully overlap the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Drop the incompletely filtered ends; the output starts at `t0 + h`.
    #[default]
    Truncate,
    /// Keep full length and rescale the available weights to unit mass.
    /// Values near the ends are biased.
    Renormalize,
}

impl std::str::FromStr for EdgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncate" => Ok(Self::Truncate),
            "renormalize" => Ok(Self::Renormalize),
            other => Err(Error::InvalidParameter(format!(
                "unknown edge policy `{other}` (expected truncate or renormalize)"
            ))),
        }
    }
}

impl std::fmt::Display for EdgePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Truncate => "truncate",
            Self::Renormalize => "renormalize",
        })
    }
}

/// Normalised KZ weights for offsets `-h..=h`, `h = k (m - 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel {
    m: usize,
    k: usize,
    weights: Vec<f64>,
}

impl FilterKernel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Weights indexed from offset `-h` to `+h`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn half_support(&self) -> usize {
        self.k * (self.m - 1) / 2
    }

    /// Weight at signed offset `u`; zero outside the support.
    pub fn weight(&self, u: i64) -> f64 {
        let h = self.half_support() as i64;
        if u.abs() > h {
            0.0
        } else {
            self.weights[(u + h) as usize]
        }
    }

    /// Minimum series length accepted under [`EdgePolicy::Truncate`].
    pub fn min_len(&self) -> usize {
        2 * self.half_support() + 1
    }
}

/// Centre frequency and KZ parameters of a KZFT bandpass filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub nu: f64,
    pub m: usize,
    pub k: usize,
}

impl BandSpec {
    pub fn new(nu: f64, m: usize, k: usize) -> Result<Self> {
        validate_mk(m, k)?;
        if !(0.0..=0.5).contains(&nu) {
            return Err(Error::InvalidParameter(format!(
                "centre frequency {nu} outside [0, 1/2]"
            )));
        }
        Ok(Self { nu, m, k })
    }

    /// Band centred on the frequency `1 / period`.
    pub fn for_period(period: usize, m: usize, k: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidPeriod(period));
        }
        Self::new(1.0 / period as f64, m, k)
    }
}

fn validate_mk(m: usize, k: usize) -> Result<()> {
    if m == 0 || m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window length m={m} must be a positive odd integer"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter(
            "iteration count k must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Builds the KZ kernel for window `m` and `k` iterations.
///
/// The polynomial coefficients are expanded in exact integer arithmetic and
/// divided by `m^k` once at the end.
pub fn kz_kernel(m: usize, k: usize) -> Result<FilterKernel> {
    validate_mk(m, k)?;
    let overflow = || Error::InvalidParameter(format!("kernel (m={m}, k={k}) too large"));

    let mut coeffs: Vec<u128> = vec![1];
    for _ in 0..k {
        let mut next = vec![0u128; coeffs.len() + m - 1];
        // Multiplying by (1 + z + ... + z^(m-1)) is a running window sum.
        for (r, slot) in next.iter_mut().enumerate() {
            let lo = r.saturating_sub(m - 1);
            let hi = r.min(coeffs.len() - 1);
            let mut acc: u128 = 0;
            for c in &coeffs[lo..=hi] {
                acc = acc.checked_add(*c).ok_or_else(overflow)?;
            }
            *slot = acc;
        }
        coeffs = next;
    }

    let mut total: u128 = 1;
    for _ in 0..k {
        total = total.checked_mul(m as u128).ok_or_else(overflow)?;
    }
    let total = total as f64;
    let weights = coeffs.into_iter().map(|c| c as f64 / total).collect();
    Ok(FilterKernel { m, k, weights })
}

/// Applies a KZ low-pass filter.
pub fn kz_filter(
    series: &TimeSeries,
    kernel: &FilterKernel,
    edge: EdgePolicy,
) -> Result<TimeSeries> {
    let x = series.values();
    let w = kernel.weights();
    let h = kernel.half_support();
    match edge {
        EdgePolicy::Truncate => {
            check_length(series, kernel)?;
            let out = x.windows(w.len()).map(|win| dot(w, win)).collect();
            TimeSeries::new(series.t0() + h as i64, out)
        }
        EdgePolicy::Renormalize => {
            let n = x.len();
            let out = (0..n)
                .map(|i| {
                    let (lo, hi) = support(i, n, h);
                    let wslice = &w[lo + h - i..=hi + h - i];
                    let mass: f64 = wslice.iter().sum();
                    dot(wslice, &x[lo..=hi]) / mass
                })
                .collect();
            TimeSeries::new(series.t0(), out)
        }
    }
}

/// Applies a KZFT bandpass filter; the output is complex.
pub fn kzft_filter(
    series: &TimeSeries,
    band: &BandSpec,
    edge: EdgePolicy,
) -> Result<ComplexSeries> {
    let kernel = kz_kernel(band.m, band.k)?;
    let h = kernel.half_support();
    let coeffs: Vec<Complex64> = kernel
        .weights()
        .iter()
        .enumerate()
        .map(|(idx, &w)| {
            let u = idx as f64 - h as f64;
            Complex64::from_polar(w, -2.0 * PI * band.nu * u)
        })
        .collect();
    let x = series.values();

    match edge {
        EdgePolicy::Truncate => {
            check_length(series, &kernel)?;
            let out = x
                .windows(coeffs.len())
                .map(|win| cdot(&coeffs, win))
                .collect();
            ComplexSeries::new(series.t0() + h as i64, out)
        }
        EdgePolicy::Renormalize => {
            let n = x.len();
            let w = kernel.weights();
            let out = (0..n)
                .map(|i| {
                    let (lo, hi) = support(i, n, h);
                    let range = lo + h - i..=hi + h - i;
                    // |c_u| = w_u, so the modulus mass is the KZ weight mass.
                    let mass: f64 = w[range.clone()].iter().sum();
                    cdot(&coeffs[range], &x[lo..=hi]) / mass
                })
                .collect();
            ComplexSeries::new(series.t0(), out)
        }
    }
}

/// Recovers a real series from KZFT output as `2 Re z(t)`.
pub fn bandpass_reconstruct(z: &ComplexSeries) -> TimeSeries {
    let values = z.values().iter().map(|c| 2.0 * c.re).collect();
    TimeSeries::new(z.t0(), values).expect("finite complex input gives finite real output")
}

/// KZFT followed by `2 Re` reconstruction: the real band-limited component.
pub fn bandpass(series: &TimeSeries, band: &BandSpec, edge: EdgePolicy) -> Result<TimeSeries> {
    kzft_filter(series, band, edge).map(|z| bandpass_reconstruct(&z))
}

fn check_length(series: &TimeSeries, kernel: &FilterKernel) -> Result<()> {
    if series.len() < kernel.min_len() {
        Err(Error::SeriesTooShort {
            len: series.len(),
            required: kernel.min_len(),
        })
    } else {
        Ok(())
    }
}

/// Index range of the input covered by the kernel centred at `i`.
fn support(i: usize, n: usize, h: usize) -> (usize, usize) {
    (i.saturating_sub(h), (i + h).min(n - 1))
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn cdot(c: &[Complex64], x: &[f64]) -> Complex64 {
    c.iter().zip(x).map(|(a, &b)| a * b).sum()
}

/// Energy transfer `(sin(pi m l) / (m sin(pi l)))^(2k)` of the KZ filter.
pub fn energy_transfer_kz(lambda: f64, m: usize, k: usize) -> f64 {
    let denom = (PI * lambda).sin();
    if denom.abs() < SINGULARITY_EPS {
        return 1.0;
    }
    let ratio = (PI * m as f64 * lambda).sin() / (m as f64 * denom);
    ratio.powi(2 * k as i32)
}

/// Energy transfer of the KZFT filter: the KZ response shifted to `nu`.
pub fn energy_transfer_kzft(lambda: f64, band: &BandSpec) -> f64 {
    energy_transfer_kz(lambda - band.nu, band.m, band.k)
}

/// How [`cutoff_frequency`] evaluates the cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffMode {
    /// Closed-form approximation.
    #[default]
    ClosedForm,
    /// Bisection on the exact energy transfer over `(0, 1/m)`.
    Numeric,
}

const BISECTION_TOL: f64 = 1e-10;

/// Offset `|lambda0 - nu|` at which the energy transfer falls to `alpha`.
pub fn cutoff_frequency(m: usize, k: usize, alpha: f64, mode: CutoffMode) -> Result<f64> {
    validate_mk(m, k)?;
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "cut-off needs m >= 3 (got m={m})"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "power ratio {alpha} outside (0, 1)"
        )));
    }
    match mode {
        CutoffMode::ClosedForm => {
            let root = alpha.powf(1.0 / (2.0 * k as f64));
            let mf = m as f64;
            Ok(6f64.sqrt() / PI * ((1.0 - root) / (mf * mf - root)).sqrt())
        }
        CutoffMode::Numeric => {
            // Energy falls monotonically from 1 to 0 across (0, 1/m).
            let (mut lo, mut hi) = (0.0, 1.0 / m as f64);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if energy_transfer_kz(mid, m, k) > alpha {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// One sample of a transfer curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    pub lambda: f64,
    pub energy: f64,
}

/// KZFT energy transfer on `grid` evenly spaced frequencies over `[0, 1/2]`.
pub fn transfer_curve(band: &BandSpec, grid: usize) -> Result<Vec<TransferPoint>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "transfer curve needs at least 2 grid points (got {grid})"
        )));
    }
    let step = 0.5 / (grid - 1) as f64;
    Ok((0..grid)
        .map(|i| {
            let lambda = if i == grid - 1 { 0.5 } else { i as f64 * step };
            TransferPoint {
                lambda,
                energy: energy_transfer_kzft(lambda, band),
            }
        })
        .collect())
}

/// Renders a transfer curve as `lambda,energy` CSV.
pub fn transfer_curve_to_csv(points: &[TransferPoint]) -> String {
    let mut out = String::from("lambda,energy\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.lambda, p.energy);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(t0: i64, v: &[f64]) -> TimeSeries {
        TimeSeries::new(t0, v.to_vec()).unwrap()
    }

    #[test]
    fn moving_average_kernel() {
        let k = kz_kernel(3, 1).unwrap();
        assert_eq!(k.half_support(), 1);
        for w in k.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-16);
        }
        let k = kz_kernel(11, 1).unwrap();
        assert_eq!(k.weights().len(), 11);
        assert_eq!(k.half_support(), 5);
    }

    #[test]
    fn two_iterations_of_three() {
        // (1 + z + z^2)^2 = 1 + 2z + 3z^2 + 2z^3 + z^4
        let k = kz_kernel(3, 2).unwrap();
        assert_eq!(k.half_support(), 2);
        let expected = [1.0, 2.0, 3.0, 2.0, 1.0].map(|c| c / 9.0);
        for (a, b) in k.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-16);
        }
        assert_eq!(k.weight(-2), 1.0 / 9.0);
        assert_eq!(k.weight(3), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(kz_kernel(4, 1).is_err());
        assert!(kz_kernel(0, 1).is_err());
        assert!(kz_kernel(3, 0).is_err());
        assert!(BandSpec::new(0.6, 5, 1).is_err());
        assert!(BandSpec::new(-0.1, 5, 1).is_err());
    }

    #[test]
    fn truncating_moving_average() {
        let s = series(1, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let out = kz_filter(&s, &kz_kernel(3, 1).unwrap(), EdgePolicy::Truncate).unwrap();
        assert_eq!(out.t0(), 2);
        let expected = [2.0, 3.0, 4.0];
        for (a, b) in out.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn alternating_series_is_attenuated() {
        let vals: Vec<f64> = (0..9)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let out = kz_filter(
            &series(1, &vals),
            &kz_kernel(3, 1).unwrap(),
            EdgePolicy::Truncate,
        )
        .unwrap();
        // Direct convolution: (1 - 1 + 1)/3 at even centres, (-1 + 1 - 1)/3 at odd.
        for (i, v) in out.values().iter().enumerate() {
            let expected = if i % 2 == 0 { 1.0 / 3.0 } else { -1.0 / 3.0 };
            assert!((v - expected).abs() < 1e-15, "{i}: {v}");
        }
    }

    #[test]
    fn too_short_series() {
        let s = series(1, &[1.0, 2.0, 3.0, 4.0]);
        let err = kz_filter(&s, &kz_kernel(5, 1).unwrap(), EdgePolicy::Truncate).unwrap_err();
        assert_eq!(
            err,
            Error::SeriesTooShort {
                len: 4,
                required: 5
            }
        );
        // Renormalize accepts any length.
        let out = kz_filter(&s, &kz_kernel(5, 1).unwrap(), EdgePolicy::Renormalize).unwrap();
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn renormalized_edges() {
        let s = series(0, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let out = kz_filter(&s, &kz_kernel(3, 1).unwrap(), EdgePolicy::Renormalize).unwrap();
        assert_eq!(out.t0(), 0);
        let expected = [1.5, 2.0, 3.0, 4.0, 4.5];
        for (a, b) in out.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let c = series(0, &[2.5; 7]);
        let out = kz_filter(&c, &kz_kernel(5, 2).unwrap(), EdgePolicy::Renormalize).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn kzft_zero_and_dc() {
        let zero = series(1, &[0.0; 30]);
        let band = BandSpec::new(0.1, 5, 2).unwrap();
        let z = kzft_filter(&zero, &band, EdgePolicy::Truncate).unwrap();
        assert!(z.values().iter().all(|c| c.norm() == 0.0));

        let vals: Vec<f64> = (0..40).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let s = series(-3, &vals);
        let dc = BandSpec::new(0.0, 5, 2).unwrap();
        for edge in [EdgePolicy::Truncate, EdgePolicy::Renormalize] {
            let z = kzft_filter(&s, &dc, edge).unwrap();
            let kz = kz_filter(&s, &kz_kernel(5, 2).unwrap(), edge).unwrap();
            assert_eq!(z.t0(), kz.t0());
            for (c, r) in z.values().iter().zip(kz.values()) {
                assert!(c.im.abs() < 1e-15);
                assert!((c.re - r).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn reconstruct_doubles_real_part() {
        let z = ComplexSeries::new(
            3,
            vec![Complex64::new(0.25, 9.0), Complex64::new(-0.5, 1.0)],
        )
        .unwrap();
        let r = bandpass_reconstruct(&z);
        assert_eq!(r.t0(), 3);
        assert_eq!(r.values(), &[0.5, -1.0]);

        // A modulus-1/2 phasor reconstructs to a unit-amplitude cosine.
        let nu = 0.05;
        let phasor: Vec<Complex64> = (0..40)
            .map(|t| Complex64::from_polar(0.5, 2.0 * PI * nu * t as f64 + 0.3))
            .collect();
        let r = bandpass_reconstruct(&ComplexSeries::new(0, phasor).unwrap());
        let max = r.values().iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 1.0).abs() < 2e-2);
    }

    #[test]
    fn energy_transfer_values() {
        assert_eq!(energy_transfer_kz(0.0, 11, 3), 1.0);
        assert_eq!(energy_transfer_kz(1.0, 11, 3), 1.0);
        assert!(energy_transfer_kz(1.0 / 11.0, 11, 1) < 1e-12);
        // Direct evaluation: (1 / (11 sin(pi/22)))^2.
        let direct = (1.0 / (11.0 * (PI / 22.0).sin())).powi(2);
        assert!((energy_transfer_kz(1.0 / 22.0, 11, 1) - direct).abs() < 1e-15);
        assert!((direct - 0.408_050).abs() < 1e-6);

        let band = BandSpec::new(0.1, 11, 2).unwrap();
        assert_eq!(energy_transfer_kzft(0.1, &band), 1.0);
        assert!(energy_transfer_kzft(0.1 + 1.0 / 11.0, &band) < 1e-12);
        assert!(energy_transfer_kzft(0.1 - 1.0 / 11.0, &band) < 1e-12);
    }

    #[test]
    fn cutoff_closed_form_values() {
        // Direct evaluation of the closed form at alpha = 1/2.
        let c11 = cutoff_frequency(11, 1, 0.5, CutoffMode::ClosedForm).unwrap();
        assert!((c11 - 0.038_473_387_411_812_21).abs() < 1e-12, "{c11}");
        let c5 = cutoff_frequency(5, 1, 0.5, CutoffMode::ClosedForm).unwrap();
        assert!((c5 - 0.085_613_211_858_286_3).abs() < 1e-12, "{c5}");
    }

    #[test]
    fn cutoff_rejects_bad_input() {
        for alpha in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(cutoff_frequency(11, 1, alpha, CutoffMode::ClosedForm).is_err());
        }
        assert!(cutoff_frequency(1, 1, 0.5, CutoffMode::Numeric).is_err());
        assert!(cutoff_frequency(4, 1, 0.5, CutoffMode::Numeric).is_err());
    }

    #[test]
    fn numeric_cutoff_hits_alpha() {
        for alpha in [0.1, 0.5, 0.9] {
            let c = cutoff_frequency(11, 2, alpha, CutoffMode::Numeric).unwrap();
            assert!((energy_transfer_kz(c, 11, 2) - alpha).abs() < 1e-8);
        }
    }

    #[test]
    fn three_point_transfer_curve() {
        let band = BandSpec::new(0.0, 5, 1).unwrap();
        let curve = transfer_curve(&band, 3).unwrap();
        let lambdas: Vec<f64> = curve.iter().map(|p| p.lambda).collect();
        assert_eq!(lambdas, vec![0.0, 0.25, 0.5]);
        assert_eq!(curve[0].energy, 1.0);
        assert_eq!(curve[1].energy, energy_transfer_kz(0.25, 5, 1));
        assert!(transfer_curve(&band, 1).is_err());
        let csv = transfer_curve_to_csv(&curve);
        assert!(csv.starts_with("lambda,energy\n0,1\n"));
    }

    #[test]
    fn curve_peaks_at_centre() {
        let band = BandSpec::new(0.1, 11, 1).unwrap();
        let curve = transfer_curve(&band, 101).unwrap();
        let peak = curve
            .iter()
            .max_by(|a, b| a.energy.total_cmp(&b.energy))
            .unwrap();
        assert!((peak.lambda - 0.1).abs() < 1e-12);
        assert_eq!(peak.energy, 1.0);
    }
}
