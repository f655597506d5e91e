//! Shared fixtures for the unit tests.

use crate::cavity::{rad_per_s_from_hz, CavityParams};
use crate::plan::ChannelPlan;

/// Device parameters used throughout the test suite: gamma_all = 2pi*40 MHz,
/// gamma_r/gamma_all = 0.17, FSR = 2pi*3.3 GHz, alpha = 7.3e-3 /mW,
/// L = 19.67 mm, noise coefficient 25 cps/(mW GHz mm).
pub fn reference_cavity() -> CavityParams {
    let gamma_all = rad_per_s_from_hz(40.0e6);
    CavityParams {
        gamma_r: 0.17 * gamma_all,
        gamma_int: 0.83 * gamma_all,
        fsr: rad_per_s_from_hz(3.3e9),
        alpha: 7.3e-3,
        length: 19.67,
        noise_coeff: 25.0,
        acceptance_band: rad_per_s_from_hz(200.0e9),
    }
}

/// Same cavity with all loss routed through the mirror (gamma_int = 0).
pub fn lossless_cavity() -> CavityParams {
    let gamma_all = rad_per_s_from_hz(40.0e6);
    CavityParams {
        gamma_r: gamma_all,
        gamma_int: 0.0,
        ..reference_cavity()
    }
}

/// Channel plan of the demonstration: 40 teeth spaced 2pi*1 GHz starting at
/// 2pi*194.670 THz, converted-band anchor at 2pi*384.212 THz.
pub fn reference_plan() -> ChannelPlan {
    let cavity = reference_cavity();
    ChannelPlan {
        comb_center: rad_per_s_from_hz(194.670e12),
        comb_spacing: rad_per_s_from_hz(1.0e9),
        tooth_count: 40,
        resonance_anchor: rad_per_s_from_hz(384.212e12),
        fsr: cavity.fsr,
        bin_width: 2.0 * cavity.gamma_all(),
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
