//! Sampled optical spectra and the instrument-resolution model.
//!
//! Two flavours share one type, told apart by the `resolution` field: ideal
//! spectra (`resolution == 0`) are line lists, one sample per discrete line
//! with its full power; instrument-convolved spectra (`resolution > 0`) are
//! power densities on a uniform grid. [`Spectrum::total_power`] integrates
//! accordingly, so convolution preserves total power between the two views.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("frequencies must be strictly increasing (sample {0})")]
    NotIncreasing(usize),
    #[error("powers must be >= 0 (sample {0})")]
    NegativePower(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("instrument resolution must be > 0")]
    BadResolution,
    #[error("CSV parse error at line {0}")]
    Csv(usize),
}

/// Which side of the converter a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Signal,
    Converted,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::Signal => "signal",
            Band::Converted => "converted",
        }
    }
}

/// Power-versus-angular-frequency trace with resolution metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    samples: Vec<(f64, f64)>,
    /// Instrument FWHM baked into the trace, rad/s; 0 for ideal spectra.
    pub resolution: f64,
    pub band: Band,
}

impl Spectrum {
    /// Ideal (line-list) spectrum. Frequencies must be strictly increasing
    /// and powers non-negative.
    pub fn new(samples: Vec<(f64, f64)>, band: Band) -> Result<Self, SpectrumError> {
        Self::with_resolution(samples, band, 0.0)
    }

    pub fn with_resolution(
        samples: Vec<(f64, f64)>,
        band: Band,
        resolution: f64,
    ) -> Result<Self, SpectrumError> {
        for (idx, pair) in samples.iter().enumerate() {
            if idx > 0 && !(pair.0 > samples[idx - 1].0) {
                return Err(SpectrumError::NotIncreasing(idx));
            }
            if !(pair.1 >= 0.0) {
                return Err(SpectrumError::NegativePower(idx));
            }
        }
        if !(resolution >= 0.0) {
            return Err(SpectrumError::BadResolution);
        }
        Ok(Self { samples, resolution, band })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Frequency span max - min, rad/s.
    pub fn span(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(first), Some(last)) => last.0 - first.0,
            _ => 0.0,
        }
    }

    /// Sum of line powers for ideal spectra, trapezoidal integral for dense
    /// ones.
    pub fn total_power(&self) -> f64 {
        if self.resolution == 0.0 {
            self.samples.iter().map(|s| s.1).sum()
        } else {
            let mut acc = 0.0;
            for pair in self.samples.windows(2) {
                acc += 0.5 * (pair[1].1 + pair[0].1) * (pair[1].0 - pair[0].0);
            }
            acc
        }
    }

    /// Frequency of the strongest sample.
    pub fn peak_frequency(&self) -> Option<f64> {
        self.samples
            .iter()
            .fold(None, |best: Option<(f64, f64)>, &(w, p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((w, p)),
            })
            .map(|(w, _)| w)
    }

    /// CSV exchange format: header `omega_rad_per_s,power`, one row per
    /// sample. Band and resolution travel in a sidecar record.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("omega_rad_per_s,power\n");
        for (w, p) in &self.samples {
            out.push_str(&format!("{w},{p}\n"));
        }
        out
    }

    pub fn from_csv_str(text: &str, band: Band, resolution: f64) -> Result<Self, SpectrumError> {
        let mut samples = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if idx == 0 {
                if line != "omega_rad_per_s,power" {
                    return Err(SpectrumError::Csv(1));
                }
                continue;
            }
            let mut parts = line.split(',');
            let omega = parts
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or(SpectrumError::Csv(idx + 1))?;
            let power = parts
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or(SpectrumError::Csv(idx + 1))?;
            if parts.next().is_some() {
                return Err(SpectrumError::Csv(idx + 1));
            }
            samples.push((omega, power));
        }
        Self::with_resolution(samples, band, resolution)
    }
}

/// Convolves a spectrum with a Gaussian instrument response of the given
/// FWHM (rad/s), returning a dense spectrum on a uniform grid.
///
/// Line spectra are deposited as impulses carrying their full power; dense
/// spectra are resampled as densities. Total power is preserved.
pub fn convolve_instrument(spec: &Spectrum, resolution: f64) -> Result<Spectrum, SpectrumError> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(SpectrumError::BadResolution);
    }
    if spec.len() < 2 {
        return Err(SpectrumError::TooFewSamples { needed: 2, got: spec.len() });
    }
    let sigma = resolution / (8.0 * core::f64::consts::LN_2).sqrt();
    let lo = spec.samples.first().unwrap().0 - 6.0 * sigma;
    let hi = spec.samples.last().unwrap().0 + 6.0 * sigma;
    let min_spacing = spec
        .samples
        .windows(2)
        .map(|p| p[1].0 - p[0].0)
        .fold(f64::INFINITY, f64::min);
    let step = (sigma / 8.0).min(min_spacing);
    let n = ((hi - lo) / step).ceil() as usize + 1;

    // density on the uniform grid
    let mut dense = alloc::vec![0.0f64; n];
    if spec.resolution == 0.0 {
        for &(w, p) in &spec.samples {
            let idx = (((w - lo) / step).round() as usize).min(n - 1);
            dense[idx] += p / step;
        }
    } else {
        for (idx, v) in dense.iter_mut().enumerate() {
            let w = lo + idx as f64 * step;
            *v = linear_interp(&spec.samples, w);
        }
    }

    // discretely normalized Gaussian kernel
    let half = (6.0 * sigma / step).ceil() as i64;
    let mut kernel = Vec::with_capacity((2 * half + 1) as usize);
    let mut ksum = 0.0;
    for k in -half..=half {
        let x = k as f64 * step;
        let v = (-x * x / (2.0 * sigma * sigma)).exp();
        kernel.push(v);
        ksum += v;
    }
    for v in &mut kernel {
        *v /= ksum;
    }

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for (ki, kv) in kernel.iter().enumerate() {
            let j = i as i64 + ki as i64 - half;
            if j >= 0 && (j as usize) < n {
                acc += kv * dense[j as usize];
            }
        }
        out.push((lo + i as f64 * step, acc));
    }

    let combined = (spec.resolution * spec.resolution + resolution * resolution).sqrt();
    Spectrum::with_resolution(out, spec.band, combined)
}

fn linear_interp(samples: &[(f64, f64)], w: f64) -> f64 {
    if w <= samples[0].0 || w >= samples[samples.len() - 1].0 {
        return 0.0;
    }
    let idx = samples.partition_point(|s| s.0 <= w);
    let (w0, p0) = samples[idx - 1];
    let (w1, p1) = samples[idx];
    p0 + (p1 - p0) * (w - w0) / (w1 - w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::rad_per_s_from_hz;
    use proptest::prelude::*;

    fn tooth(freqs_and_powers: &[(f64, f64)]) -> Spectrum {
        Spectrum::new(freqs_and_powers.to_vec(), Band::Signal).unwrap()
    }

    #[test]
    fn impulse_becomes_gaussian_of_instrument_width() {
        let res = rad_per_s_from_hz(600.0e6);
        let spec = tooth(&[(-1.0e9, 0.0), (0.0, 2.0), (1.0e9, 0.0)]);
        let blurred = convolve_instrument(&spec, res).unwrap();
        // area preserved
        assert!((blurred.total_power() - 2.0).abs() / 2.0 < 1e-6);
        // FWHM equals the instrument resolution
        let peak = blurred
            .samples()
            .iter()
            .cloned()
            .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        let above: Vec<f64> = blurred
            .samples()
            .iter()
            .filter(|s| s.1 >= peak.1 / 2.0)
            .map(|s| s.0)
            .collect();
        let fwhm = above.last().unwrap() - above.first().unwrap();
        assert!((fwhm - res).abs() / res < 0.05);
    }

    #[test]
    fn two_teeth_resolved_at_600_mhz() {
        let res = rad_per_s_from_hz(600.0e6);
        let d = rad_per_s_from_hz(1.0e9);
        let spec = tooth(&[(0.0, 1.0), (d, 1.0)]);
        let blurred = convolve_instrument(&spec, res).unwrap();
        let mid = linear_interp(blurred.samples(), d / 2.0);
        let at_tooth = linear_interp(blurred.samples(), 0.0);
        assert!(mid < 0.5 * at_tooth, "expected a dip between the peaks");
    }

    #[test]
    fn two_peaks_unresolved_at_10_ghz() {
        let res = rad_per_s_from_hz(10.0e9);
        let d = rad_per_s_from_hz(3.3e9);
        let spec = tooth(&[(0.0, 1.0), (d, 1.0)]);
        let blurred = convolve_instrument(&spec, res).unwrap();
        // single blob: no interior local minimum above 1% of peak
        let peak = blurred.samples().iter().map(|s| s.1).fold(0.0, f64::max);
        let mut minima = 0;
        let s = blurred.samples();
        for i in 1..s.len() - 1 {
            if s[i].1 > 0.01 * peak && s[i].1 < s[i - 1].1 && s[i].1 < s[i + 1].1 {
                minima += 1;
            }
        }
        assert_eq!(minima, 0);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let spec = tooth(&[(0.0, 1.0)]);
        assert!(matches!(
            convolve_instrument(&spec, 1.0),
            Err(SpectrumError::TooFewSamples { .. })
        ));
        let spec = tooth(&[(0.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(convolve_instrument(&spec, 0.0), Err(SpectrumError::BadResolution)));
        assert!(Spectrum::new(alloc::vec![(0.0, 1.0), (0.0, 1.0)], Band::Signal).is_err());
        assert!(Spectrum::new(alloc::vec![(0.0, -1.0)], Band::Signal).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = tooth(&[(1.0e15, 0.25), (1.000001e15, 1.5)]);
        let text = spec.to_csv_string();
        assert!(text.starts_with("omega_rad_per_s,power\n"));
        let back = Spectrum::from_csv_str(&text, Band::Signal, 0.0).unwrap();
        assert_eq!(back, spec);
        assert!(Spectrum::from_csv_str("bogus\n1,2\n", Band::Signal, 0.0).is_err());
    }

    proptest! {
        /// Convolution is linear and preserves total power.
        #[test]
        fn convolution_linear_and_area_preserving(
            powers in proptest::collection::vec(0.0f64..5.0, 2..12),
            scale in 0.1f64..10.0,
        ) {
            let spacing = rad_per_s_from_hz(1.0e9);
            let samples: Vec<(f64, f64)> =
                powers.iter().enumerate().map(|(i, &p)| (i as f64 * spacing, p)).collect();
            let spec = Spectrum::new(samples.clone(), Band::Signal).unwrap();
            let res = rad_per_s_from_hz(600.0e6);
            let blurred = convolve_instrument(&spec, res).unwrap();

            let total: f64 = powers.iter().sum();
            prop_assert!((blurred.total_power() - total).abs() <= 1e-6 * total.max(1e-12));

            let scaled_samples: Vec<(f64, f64)> =
                samples.iter().map(|&(w, p)| (w, p * scale)).collect();
            let scaled = Spectrum::new(scaled_samples, Band::Signal).unwrap();
            let blurred_scaled = convolve_instrument(&scaled, res).unwrap();
            for (a, b) in blurred.samples().iter().zip(blurred_scaled.samples()) {
                prop_assert!((a.1 * scale - b.1).abs() <= 1e-9 * (a.1 * scale).max(1.0));
            }
        }
    }
}
