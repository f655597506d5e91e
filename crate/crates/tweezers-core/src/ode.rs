//! Time-domain integration of the intracavity converted mode.
//!
//! Integrates `da/dt = i*detuning*a - (gamma_all + |xi|^2)/2 * a + xi * a_in`
//! with a constant signal-band drive `a_in` and no converted-band input,
//! treating the mode operators as classical complex amplitudes. The output
//! amplitudes follow from the input-output relations
//! `a_t_out = a_in - conj(xi) * a` and `a_v_out = sqrt(gamma_r) * a`, and in
//! steady state they reproduce the closed-form transfer amplitudes of
//! [`crate::cavity::steady_state_transfer`]. The integrator is a fixed-step
//! classical Runge-Kutta scheme so trajectories are reproducible bit for bit.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cavity::{CavityParams, ParamError, PumpSetting};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("step and duration must be positive and finite")]
    BadTimeGrid,
    #[error("no steady state within duration; residual relative change {residual}")]
    NonConvergent { residual: f64 },
}

/// Sampled intracavity amplitude with the converged steady-state outputs.
#[derive(Debug, Clone)]
pub struct CavityTrajectory {
    /// Sample times, seconds.
    pub times: Vec<f64>,
    /// Intracavity amplitude at each sample time.
    pub amplitudes: Vec<Complex64>,
    /// Signal-band output amplitude at the final sample.
    pub transmitted_out: Complex64,
    /// Converted-band output amplitude at the final sample.
    pub converted_out: Complex64,
}

impl CavityTrajectory {
    pub fn final_amplitude(&self) -> Complex64 {
        *self.amplitudes.last().expect("trajectory never empty")
    }
}

/// Integrates the intracavity mode driven by a constant signal-band input
/// `input_amplitude` at the given detuning (rad/s), from `a(0) = 0`.
///
/// Convergence is declared once the relative change of the amplitude over one
/// `1/gamma_all` window drops below 1e-12; integration past that point stops.
/// Running out of `duration` first is reported as [`OdeError::NonConvergent`]
/// together with the residual relative change.
pub fn integrate_cavity_ode(
    cavity: &CavityParams,
    pump: &PumpSetting,
    detuning: f64,
    input_amplitude: Complex64,
    duration: f64,
    step: f64,
) -> Result<CavityTrajectory, OdeError> {
    cavity.validate()?;
    if !(step > 0.0) || !(duration > 0.0) || !step.is_finite() || !duration.is_finite() {
        return Err(OdeError::BadTimeGrid);
    }
    let c = pump.normalized_coupling(cavity);
    if !(pump.power >= 0.0) {
        return Err(ParamError::NegativePower(pump.power).into());
    }
    if c > crate::cavity::MAX_NORMALIZED_COUPLING {
        return Err(ParamError::BeyondModelValidity(c).into());
    }

    let gamma_all = cavity.gamma_all();
    let xi = Complex64::from_polar((c * gamma_all).sqrt(), pump.phase);
    let decay = Complex64::new(-(gamma_all + xi.norm_sqr()) / 2.0, detuning);
    let drive = xi * input_amplitude;
    let deriv = |a: Complex64| decay * a + drive;

    let n_steps = (duration / step).ceil() as usize;
    let window = (1.0 / gamma_all / step).ceil().max(1.0) as usize;

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut amplitudes = Vec::with_capacity(n_steps + 1);
    let mut a = Complex64::new(0.0, 0.0);
    times.push(0.0);
    amplitudes.push(a);

    let mut converged = false;
    let mut residual = f64::INFINITY;
    for i in 0..n_steps {
        let k1 = deriv(a);
        let k2 = deriv(a + k1 * (step / 2.0));
        let k3 = deriv(a + k2 * (step / 2.0));
        let k4 = deriv(a + k3 * step);
        a += (k1 + (k2 + k3) * 2.0 + k4) * (step / 6.0);
        times.push((i + 1) as f64 * step);
        amplitudes.push(a);

        if amplitudes.len() > window {
            let prev = amplitudes[amplitudes.len() - 1 - window];
            let scale = a.norm().max(prev.norm());
            residual = if scale == 0.0 { 0.0 } else { (a - prev).norm() / scale };
            if residual < 1e-12 {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(OdeError::NonConvergent { residual });
    }

    Ok(CavityTrajectory {
        transmitted_out: input_amplitude - xi.conj() * a,
        converted_out: Complex64::new(cavity.gamma_r.sqrt(), 0.0) * a,
        times,
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{self, steady_state_transfer};
    use crate::testutil::reference_cavity;

    fn run(cavity: &CavityParams, c: f64, d_norm: f64) -> CavityTrajectory {
        let pump = PumpSetting::new(c / cavity.alpha, 0.0, 0.0);
        let gamma_all = cavity.gamma_all();
        let step = 0.002 / (gamma_all * (1.0 + c));
        integrate_cavity_ode(
            cavity,
            &pump,
            d_norm * gamma_all,
            Complex64::new(1.0, 0.0),
            60.0 / gamma_all,
            step,
        )
        .unwrap()
    }

    #[test]
    fn steady_state_matches_closed_form_on_resonance() {
        let cavity = reference_cavity();
        let traj = run(&cavity, 1.0, 0.0);
        let expected = 0.17f64.sqrt();
        assert!((traj.converted_out.norm() - expected).abs() / expected < 1e-6);
        assert!(traj.transmitted_out.norm() < 1e-6);
    }

    #[test]
    fn steady_state_matches_closed_form_detuned() {
        let cavity = reference_cavity();
        let traj = run(&cavity, 1.0, 2.0);
        // |a_v_out|^2 -> 0.17 / (1 + 4) = 0.034
        assert!((traj.converted_out.norm_sqr() - 0.034).abs() < 1e-7);
    }

    #[test]
    fn zero_input_stays_zero() {
        let cavity = reference_cavity();
        let pump = PumpSetting::new(140.0, 0.0, 0.0);
        let gamma_all = cavity.gamma_all();
        let traj = integrate_cavity_ode(
            &cavity,
            &pump,
            0.0,
            Complex64::new(0.0, 0.0),
            40.0 / gamma_all,
            0.001 / gamma_all,
        )
        .unwrap();
        assert!(traj.amplitudes.iter().all(|a| a.norm() == 0.0));
        assert_eq!(traj.converted_out, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn too_short_duration_reports_residual() {
        let cavity = reference_cavity();
        let pump = PumpSetting::new(140.0, 0.0, 0.0);
        let gamma_all = cavity.gamma_all();
        let err = integrate_cavity_ode(
            &cavity,
            &pump,
            0.0,
            Complex64::new(1.0, 0.0),
            0.5 / gamma_all,
            0.001 / gamma_all,
        )
        .unwrap_err();
        match err {
            OdeError::NonConvergent { residual } => assert!(residual > 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    /// Steady state of the time-domain model against the closed forms over the
    /// full (C, detuning) grid, both output ports.
    #[test]
    fn ode_closed_form_equivalence_grid() {
        let cavity = reference_cavity();
        let pump_phase = 0.7;
        for &c in &[0.1, 1.0, 3.0] {
            for k in -5..=5 {
                let d_norm = k as f64;
                let pump = PumpSetting::new(c / cavity.alpha, 0.0, pump_phase);
                let gamma_all = cavity.gamma_all();
                let step = 0.002 / (gamma_all * (1.0 + c));
                let traj = integrate_cavity_ode(
                    &cavity,
                    &pump,
                    d_norm * gamma_all,
                    Complex64::new(1.0, 0.0),
                    80.0 / gamma_all,
                    step,
                )
                .unwrap();
                let closed = steady_state_transfer(&cavity, &pump, d_norm * gamma_all).unwrap();
                let err_conv = (traj.converted_out - closed.t_conv).norm() / closed.t_conv.norm().max(1e-3);
                let err_pass = (traj.transmitted_out - closed.r_pass).norm() / closed.r_pass.norm().max(1e-3);
                assert!(err_conv < 1e-6, "C={c} d={d_norm}: conv err {err_conv}");
                assert!(err_pass < 1e-6, "C={c} d={d_norm}: pass err {err_pass}");
            }
        }
    }

    #[test]
    fn capacity_consistency_with_cold_cavity() {
        // At zero pump the trajectory relaxes with the cold linewidth; the
        // transmitted port then passes everything.
        let cavity = reference_cavity();
        let pump = PumpSetting::new(0.0, 0.0, 0.0);
        let gamma_all = cavity.gamma_all();
        let traj = integrate_cavity_ode(
            &cavity,
            &pump,
            0.0,
            Complex64::new(1.0, 0.0),
            50.0 / gamma_all,
            0.002 / gamma_all,
        )
        .unwrap();
        assert!((traj.transmitted_out.norm() - 1.0).abs() < 1e-9);
        assert_eq!(cavity::max_channels(&cavity), 41);
    }
}
