//! Core model of a cavity-enhanced sum-frequency converter used as a
//! channel-selective add/drop switch on frequency-multiplexed optical links.
//!
//! The crate is organized around the signal chain of such a device:
//!
//! * [`cavity`] — steady-state transfer amplitudes, conversion efficiency,
//!   bandwidth, finesse and channel capacity of the converter cavity.
//! * [`ode`] — time-domain integration of the intracavity mode, used as an
//!   independent route to the steady-state results.
//! * [`plan`] — index algebra connecting comb teeth, cavity resonances and
//!   pump frequencies (which pump moves which input bin to which output bin).
//! * [`spectrum`] — sampled spectra, instrument-resolution convolution and
//!   the CSV exchange format.
//! * [`synth`] — transmitted/converted spectrum synthesis for a comb under a
//!   pump setting, and the resonance-filtered comb used for FSR estimation.
//! * [`fit`] — least-squares recovery of model parameters from power sweeps.
//! * [`fsr`] — free-spectral-range estimation from the periodic envelope of a
//!   measured spectrum.
//! * [`noise`] — pump-induced noise photon budget, converted-signal photon
//!   number, SNR and autocorrelation degradation over repeated extractions.
//! * [`netsim`] — deterministic round-based scenario engine for a ring
//!   network with per-node converters.
//!
//! All quantities are carried in SI units with angular frequencies in rad/s
//! throughout; conversions from ordinary-frequency conventions happen at the
//! edges (see `noise::RateConvention` for the one documented exception).

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod cavity;
pub mod fft;
#[cfg(test)]
pub(crate) mod testutil;
pub mod fit;
pub mod fsr;
pub mod netsim;
pub mod noise;
pub mod ode;
pub mod plan;
pub mod spectrum;
pub mod synth;

pub use cavity::{CavityParams, PumpSetting, TransferAmplitudes};
pub use plan::{ChannelPlan, PumpAssignment};
pub use spectrum::{Band, Spectrum};
