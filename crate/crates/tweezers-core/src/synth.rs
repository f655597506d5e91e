//! Transmitted and converted spectrum synthesis for a comb under one pump.
//!
//! Every tooth is pushed through the steady-state transfer amplitudes at the
//! residual detuning its sum-frequency product has from the nearest cavity
//! resonance. Teeth whose product misses the acceptance band pass through
//! untouched.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cavity::{steady_state_transfer, CavityParams, ParamError, PumpSetting};
use crate::plan::{ChannelPlan, PlanError};
use crate::spectrum::{Band, Spectrum, SpectrumError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("per-tooth power list has {got} entries, plan has {expected} teeth")]
    PowerCountMismatch { got: usize, expected: usize },
    #[error("plan FSR {plan_fsr} does not match cavity FSR {cavity_fsr}")]
    FsrMismatch { plan_fsr: f64, cavity_fsr: f64 },
}

fn check_inputs(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    per_tooth_power: &[f64],
) -> Result<(), SynthError> {
    plan.validate()?;
    cavity.validate()?;
    if per_tooth_power.len() != plan.tooth_count {
        return Err(SynthError::PowerCountMismatch {
            got: per_tooth_power.len(),
            expected: plan.tooth_count,
        });
    }
    let rel = (plan.fsr - cavity.fsr).abs() / cavity.fsr;
    if rel > 1e-12 {
        return Err(SynthError::FsrMismatch { plan_fsr: plan.fsr, cavity_fsr: cavity.fsr });
    }
    Ok(())
}

/// Signal-band spectrum after the converter: tooth `i` keeps
/// `per_tooth_power[i] * |r_pass|^2` at its residual detuning.
pub fn simulate_transmission(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    pump: &PumpSetting,
    per_tooth_power: &[f64],
) -> Result<Spectrum, SynthError> {
    check_inputs(plan, cavity, per_tooth_power)?;
    let mut samples = Vec::with_capacity(plan.tooth_count);
    for (i, &p_in) in per_tooth_power.iter().enumerate() {
        let product = plan.tooth_frequency(i) + pump.frequency;
        let (j, residual) = plan.nearest_resonance(product);
        let transmitted = if plan.resonance_in_band(cavity, j) {
            let t = steady_state_transfer(cavity, pump, residual)?;
            p_in * t.r_pass.norm_sqr()
        } else {
            p_in
        };
        samples.push((plan.tooth_frequency(i), transmitted));
    }
    Ok(Spectrum::new(samples, Band::Signal)?)
}

/// Converted-band spectrum: each in-band tooth contributes
/// `per_tooth_power[i] * |t_conv|^2` at its sum-frequency product.
pub fn simulate_conversion(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    pump: &PumpSetting,
    per_tooth_power: &[f64],
) -> Result<Spectrum, SynthError> {
    check_inputs(plan, cavity, per_tooth_power)?;
    let mut samples = Vec::with_capacity(plan.tooth_count);
    for (i, &p_in) in per_tooth_power.iter().enumerate() {
        let product = plan.tooth_frequency(i) + pump.frequency;
        let (j, residual) = plan.nearest_resonance(product);
        if !plan.resonance_in_band(cavity, j) {
            continue;
        }
        let t = steady_state_transfer(cavity, pump, residual)?;
        samples.push((product, p_in * t.t_conv.norm_sqr()));
    }
    Ok(Spectrum::new(samples, Band::Converted)?)
}

/// Comb filtered by the cold-cavity resonance ladder: tooth power weighted by
/// the Lorentzian of the nearest resonance. This is the synthetic analog of
/// the frequency-doubled comb used to read off the FSR, whose envelope beats
/// at the FSR period.
pub fn simulate_resonant_comb(
    cavity: &CavityParams,
    comb_center: f64,
    comb_spacing: f64,
    tooth_count: usize,
) -> Result<Spectrum, SynthError> {
    cavity.validate()?;
    if tooth_count < 2 {
        return Err(SpectrumError::TooFewSamples { needed: 2, got: tooth_count }.into());
    }
    if !(comb_spacing > 0.0) {
        return Err(PlanError::Invalid("comb_spacing must be > 0").into());
    }
    let gamma_all = cavity.gamma_all();
    // integer offsets keep a tooth exactly on the anchor resonance
    let half_index = ((tooth_count - 1) / 2) as f64;
    let mut samples = Vec::with_capacity(tooth_count);
    for k in 0..tooth_count {
        let omega = comb_center + (k as f64 - half_index) * comb_spacing;
        // residual against the ladder anchored at the comb center
        let offset = omega - comb_center;
        let residual = offset - (offset / cavity.fsr).round() * cavity.fsr;
        let d = 2.0 * residual / gamma_all;
        samples.push((omega, 1.0 / (1.0 + d * d)));
    }
    Ok(Spectrum::new(samples, Band::Converted)?)
}
