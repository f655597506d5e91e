//! Steady-state model of the intracavity sum-frequency conversion process.
//!
//! The converter is a nonlinear waveguide with a cavity around the converted
//! band. A strong pump couples a signal-band input mode to a converted-band
//! output mode; the cavity mirror out-coupling `gamma_r`, the internal loss
//! `gamma_int` and the pump-dependent coupling `C = alpha * P` fix the three
//! transfer amplitudes between the two ports.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Pump coupling above which the undepleted-pump model is not trusted.
pub const MAX_NORMALIZED_COUPLING: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("coupling rate gamma_r must be > 0, got {0}")]
    NonPositiveCoupling(f64),
    #[error("internal loss gamma_int must be >= 0, got {0}")]
    NegativeInternalLoss(f64),
    #[error("free spectral range {fsr} must exceed total linewidth {gamma_all} (resolvable resonances)")]
    UnresolvableResonances { fsr: f64, gamma_all: f64 },
    #[error("nonlinearity coefficient alpha must be > 0, got {0}")]
    NonPositiveAlpha(f64),
    #[error("waveguide length must be > 0, got {0}")]
    NonPositiveLength(f64),
    #[error("noise coefficient must be >= 0, got {0}")]
    NegativeNoiseCoeff(f64),
    #[error("acceptance band half-width must be >= 0, got {0}")]
    NegativeAcceptanceBand(f64),
    #[error("pump power must be >= 0, got {0}")]
    NegativePower(f64),
    #[error("normalized coupling C = alpha*P = {0} exceeds model validity bound {MAX_NORMALIZED_COUPLING}")]
    BeyondModelValidity(f64),
    #[error("detuning must be finite")]
    NonFiniteDetuning,
}

/// Converter constants: loss rates, cavity geometry, nonlinearity and the
/// noise coefficient of the waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Mirror out-coupling rate gamma_r, rad/s.
    pub gamma_r: f64,
    /// Internal loss rate gamma_int, rad/s.
    pub gamma_int: f64,
    /// Free spectral range of the converted-band cavity, rad/s.
    pub fsr: f64,
    /// Nonlinearity coefficient alpha, 1/mW (C = alpha * P).
    pub alpha: f64,
    /// Waveguide length, mm.
    pub length: f64,
    /// Anti-Stokes noise coefficient, counts/(s mW GHz mm).
    pub noise_coeff: f64,
    /// Half-width of the coating/phase-matching window around the converted
    /// band anchor, rad/s. Resonances outside it do not convert.
    pub acceptance_band: f64,
}

impl CavityParams {
    /// Checks all parameter invariants.
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.gamma_r > 0.0) {
            return Err(ParamError::NonPositiveCoupling(self.gamma_r));
        }
        if !(self.gamma_int >= 0.0) {
            return Err(ParamError::NegativeInternalLoss(self.gamma_int));
        }
        if !(self.fsr > self.gamma_all()) {
            return Err(ParamError::UnresolvableResonances {
                fsr: self.fsr,
                gamma_all: self.gamma_all(),
            });
        }
        if !(self.alpha > 0.0) {
            return Err(ParamError::NonPositiveAlpha(self.alpha));
        }
        if !(self.length > 0.0) {
            return Err(ParamError::NonPositiveLength(self.length));
        }
        if !(self.noise_coeff >= 0.0) {
            return Err(ParamError::NegativeNoiseCoeff(self.noise_coeff));
        }
        if !(self.acceptance_band >= 0.0) {
            return Err(ParamError::NegativeAcceptanceBand(self.acceptance_band));
        }
        Ok(())
    }

    /// Total cavity loss rate gamma_all = gamma_r + gamma_int, rad/s.
    pub fn gamma_all(&self) -> f64 {
        self.gamma_r + self.gamma_int
    }

    /// Out-coupling fraction gamma_r / gamma_all.
    pub fn gamma_r_tilde(&self) -> f64 {
        self.gamma_r / self.gamma_all()
    }

    /// Pump power that maximizes the conversion efficiency, mW (C = 1).
    pub fn max_efficiency_power(&self) -> f64 {
        1.0 / self.alpha
    }
}

/// Pump drive of the conversion process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSetting {
    /// Pump power P, mW.
    pub power: f64,
    /// Absolute pump angular frequency, rad/s.
    pub frequency: f64,
    /// Pump phase, radians.
    pub phase: f64,
}

impl PumpSetting {
    pub fn new(power: f64, frequency: f64, phase: f64) -> Self {
        Self { power, frequency, phase }
    }

    /// Normalized coupling C = alpha * P for the given cavity.
    pub fn normalized_coupling(&self, cavity: &CavityParams) -> f64 {
        cavity.alpha * self.power
    }

    fn validate(&self, cavity: &CavityParams) -> Result<f64, ParamError> {
        if !(self.power >= 0.0) {
            return Err(ParamError::NegativePower(self.power));
        }
        let c = self.normalized_coupling(cavity);
        if c > MAX_NORMALIZED_COUPLING {
            return Err(ParamError::BeyondModelValidity(c));
        }
        Ok(c)
    }
}

/// The three steady-state transfer amplitudes of the converter at one
/// detuning, for unit inputs on the respective port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferAmplitudes {
    /// Signal-band input -> converted-band output.
    pub t_conv: Complex64,
    /// Signal-band input -> signal-band (transmitted) output.
    pub r_pass: Complex64,
    /// Converted-band input -> signal-band output (reverse process).
    pub t_rev: Complex64,
    /// Detuning of the converted mode from resonance used for evaluation, rad/s.
    pub detuning: f64,
}

/// Steady-state transfer amplitudes at detuning `detuning` (rad/s) of the
/// converted mode from the cavity resonance.
///
/// With unit signal input and no converted-band input, `|t_conv|^2` is the
/// conversion efficiency and `|r_pass|^2` the transmitted fraction; `t_rev`
/// carries a converted-band input back into the signal band.
pub fn steady_state_transfer(
    cavity: &CavityParams,
    pump: &PumpSetting,
    detuning: f64,
) -> Result<TransferAmplitudes, ParamError> {
    cavity.validate()?;
    let c = pump.validate(cavity)?;
    if !detuning.is_finite() {
        return Err(ParamError::NonFiniteDetuning);
    }
    let gr = cavity.gamma_r_tilde();
    let d = detuning / cavity.gamma_all();
    // Common denominator (1 + C)/2 - i*d of the steady-state solution.
    let denom = Complex64::new(0.5 * (1.0 + c), -d);
    let cross = (gr * c).sqrt();
    let phase = Complex64::from_polar(1.0, pump.phase);
    Ok(TransferAmplitudes {
        t_conv: phase * cross / denom,
        r_pass: Complex64::new(0.5 * (1.0 - c), -d) / denom,
        t_rev: phase.conj() * cross / denom,
        detuning,
    })
}

/// Conversion efficiency at pump power `power` (mW) and detuning (rad/s):
/// `gr * alpha*P / ((1 + alpha*P)^2/4 + (detuning/gamma_all)^2)`.
///
/// Peaks at `gamma_r/gamma_all`, reached at `P = 1/alpha`, zero detuning.
pub fn conversion_efficiency(
    cavity: &CavityParams,
    power: f64,
    detuning: f64,
) -> Result<f64, ParamError> {
    cavity.validate()?;
    if !(power >= 0.0) {
        return Err(ParamError::NegativePower(power));
    }
    let c = cavity.alpha * power;
    if c > MAX_NORMALIZED_COUPLING {
        return Err(ParamError::BeyondModelValidity(c));
    }
    let d = detuning / cavity.gamma_all();
    Ok(cavity.gamma_r_tilde() * c / (0.25 * (1.0 + c) * (1.0 + c) + d * d))
}

/// FWHM conversion bandwidth `(1 + alpha*P) * gamma_all` in rad/s.
///
/// At zero pump power this is the cold-cavity linewidth.
pub fn conversion_bandwidth(cavity: &CavityParams, power: f64) -> Result<f64, ParamError> {
    cavity.validate()?;
    if !(power >= 0.0) {
        return Err(ParamError::NegativePower(power));
    }
    Ok((1.0 + cavity.alpha * power) * cavity.gamma_all())
}

/// Cold-cavity finesse FSR / gamma_all.
pub fn cold_finesse(cavity: &CavityParams) -> f64 {
    cavity.fsr / cavity.gamma_all()
}

/// Channel capacity floor(F_cold / 2).
///
/// Uses the representative C = 1 operating point, where the hot linewidth is
/// twice the cold one and the usable finesse halves.
pub fn max_channels(cavity: &CavityParams) -> u32 {
    (cold_finesse(cavity) / 2.0).floor() as u32
}

/// Paper-style helper: angular frequency from an ordinary frequency in Hz.
pub fn rad_per_s_from_hz(hz: f64) -> f64 {
    2.0 * PI * hz
}
