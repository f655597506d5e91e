//! Least-squares recovery of converter parameters from pump-power sweeps.
//!
//! The conversion bandwidth is linear in pump power, `(1 + alpha*P) *
//! gamma_all`, so a line fit yields both `gamma_all` (intercept) and `alpha`
//! (slope/intercept). The on-resonance efficiency `gr * alpha*P /
//! ((1 + alpha*P)^2 / 4)` is linear in the single unknown `gr` once `alpha`
//! is known.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("sweep powers must be strictly increasing and >= 0 (index {0})")]
    BadPowerGrid(usize),
    #[error("sweep holds {got:?} data, expected {expected:?}")]
    KindMismatch { got: SweepKind, expected: SweepKind },
    #[error("fit is singular: {0}")]
    Singular(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Values are conversion bandwidths, rad/s.
    Bandwidth,
    /// Values are conversion efficiencies, dimensionless.
    Efficiency,
}

/// Measured values over a pump-power grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSweep {
    points: Vec<(f64, f64)>,
    pub kind: SweepKind,
}

impl PowerSweep {
    /// Powers in mW, strictly increasing and non-negative.
    pub fn new(points: Vec<(f64, f64)>, kind: SweepKind) -> Result<Self, FitError> {
        for (idx, p) in points.iter().enumerate() {
            if !(p.0 >= 0.0) || !p.0.is_finite() {
                return Err(FitError::BadPowerGrid(idx));
            }
            if idx > 0 && !(p.0 > points[idx - 1].0) {
                return Err(FitError::BadPowerGrid(idx));
            }
        }
        Ok(Self { points, kind })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthFit {
    /// Nonlinearity coefficient, 1/mW.
    pub alpha: f64,
    /// Cold-cavity linewidth, rad/s.
    pub gamma_all: f64,
    /// RMS residual of the fit, rad/s.
    pub residual: f64,
}

/// Fits `bandwidth = (1 + alpha*P) * gamma_all` by linear least squares.
pub fn fit_bandwidth_sweep(sweep: &PowerSweep) -> Result<BandwidthFit, FitError> {
    if sweep.kind != SweepKind::Bandwidth {
        return Err(FitError::KindMismatch { got: sweep.kind, expected: SweepKind::Bandwidth });
    }
    let pts = sweep.points();
    if pts.len() < 2 {
        return Err(FitError::Singular("need at least two points for a line"));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 * (n * sxx).max(1.0) {
        return Err(FitError::Singular("all pump powers equal"));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy * sxx - sx * sxy) / det;
    if !(intercept > 0.0) {
        return Err(FitError::Singular("non-positive linewidth intercept"));
    }
    let mut ss = 0.0;
    for &(p, y) in pts {
        let r = y - (intercept + slope * p);
        ss += r * r;
    }
    Ok(BandwidthFit {
        alpha: slope / intercept,
        gamma_all: intercept,
        residual: (ss / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyFit {
    /// Out-coupling fraction gamma_r / gamma_all.
    pub gamma_r_tilde: f64,
    /// RMS residual of the fit.
    pub residual: f64,
}

/// Fits the on-resonance efficiency curve for `gamma_r_tilde` at known
/// `alpha`.
pub fn fit_efficiency_sweep(sweep: &PowerSweep, alpha: f64) -> Result<EfficiencyFit, FitError> {
    if sweep.kind != SweepKind::Efficiency {
        return Err(FitError::KindMismatch { got: sweep.kind, expected: SweepKind::Efficiency });
    }
    if !(alpha > 0.0) {
        return Err(FitError::Singular("alpha must be > 0"));
    }
    let pts = sweep.points();
    let mut sfy = 0.0;
    let mut sff = 0.0;
    for &(p, y) in pts {
        let c = alpha * p;
        let f = c / (0.25 * (1.0 + c) * (1.0 + c));
        sfy += f * y;
        sff += f * f;
    }
    if sff == 0.0 {
        return Err(FitError::Singular("no point with nonzero pump power"));
    }
    let g = sfy / sff;
    let mut ss = 0.0;
    for &(p, y) in pts {
        let c = alpha * p;
        let f = c / (0.25 * (1.0 + c) * (1.0 + c));
        let r = y - g * f;
        ss += r * r;
    }
    Ok(EfficiencyFit { gamma_r_tilde: g, residual: (ss / pts.len() as f64).sqrt() })
}
