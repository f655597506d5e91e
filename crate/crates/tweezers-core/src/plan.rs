//! Index algebra between comb teeth, cavity resonances and pump frequencies.
//!
//! A plan fixes the tooth ladder `omega_t(i) = comb_center + i * comb_spacing`
//! and the resonance ladder `omega_v(j) = resonance_anchor + j * fsr`. Energy
//! conservation of the sum-frequency process then selects which tooth a given
//! pump converts and into which resonance: `omega_t(i) + omega_p = omega_v(j)`
//! up to a residual detuning. Shifting the pump down by one comb spacing moves
//! the selected tooth up by one index at a fixed output; shifting it up by one
//! FSR moves the output up by one resonance at a fixed tooth.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cavity::{conversion_bandwidth, max_channels, CavityParams, ParamError, PumpSetting};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("tooth index {index} outside plan with {count} teeth")]
    ToothOutOfRange { index: usize, count: usize },
    #[error("output resonance {index} at offset {offset} rad/s lies outside the acceptance band {band} rad/s")]
    OutOfBand { index: i32, offset: f64, band: f64 },
    #[error("plan invariant violated: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Comb geometry and cavity resonance ladder for one multiplexed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPlan {
    /// Angular frequency of tooth i = 0, rad/s.
    pub comb_center: f64,
    /// Comb tooth spacing, rad/s.
    pub comb_spacing: f64,
    /// Multiplexing degree M.
    pub tooth_count: usize,
    /// Angular frequency of the converted resonance j = 0, rad/s.
    pub resonance_anchor: f64,
    /// Free spectral range of the converted-band cavity, rad/s.
    pub fsr: f64,
    /// Conceptual bin width, rad/s. Carried as metadata; analog predictions
    /// use the cavity Lorentzian instead.
    pub bin_width: f64,
}

impl ChannelPlan {
    /// Builds a plan whose resonance ladder is tied to `cavity` (the FSR is
    /// copied over).
    pub fn for_cavity(
        cavity: &CavityParams,
        comb_center: f64,
        comb_spacing: f64,
        tooth_count: usize,
        resonance_anchor: f64,
        bin_width: f64,
    ) -> Result<Self, PlanError> {
        let plan = Self {
            comb_center,
            comb_spacing,
            tooth_count,
            resonance_anchor,
            fsr: cavity.fsr,
            bin_width,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.comb_spacing > 0.0) {
            return Err(PlanError::Invalid("comb_spacing must be > 0"));
        }
        if !(self.fsr > 0.0) {
            return Err(PlanError::Invalid("fsr must be > 0"));
        }
        if self.tooth_count == 0 {
            return Err(PlanError::Invalid("tooth_count must be >= 1"));
        }
        if !(self.bin_width >= 0.0) {
            return Err(PlanError::Invalid("bin_width must be >= 0"));
        }
        if !(self.comb_spacing > self.bin_width) {
            return Err(PlanError::Invalid("comb_spacing must exceed bin_width"));
        }
        Ok(())
    }

    /// Angular frequency of tooth `i`, rad/s.
    pub fn tooth_frequency(&self, i: usize) -> f64 {
        self.comb_center + i as f64 * self.comb_spacing
    }

    /// Angular frequency of resonance `j`, rad/s.
    pub fn resonance_frequency(&self, j: i32) -> f64 {
        self.resonance_anchor + j as f64 * self.fsr
    }

    /// Nearest resonance index and residual detuning for a converted-band
    /// frequency. A tie at exactly half an FSR resolves toward the lower
    /// resonance index, so the residual lies in (-fsr/2, +fsr/2].
    pub fn nearest_resonance(&self, omega: f64) -> (i32, f64) {
        let q = (omega - self.resonance_anchor) / self.fsr;
        let j = (q - 0.5).ceil();
        (j as i32, omega - self.resonance_anchor - j * self.fsr)
    }

    /// Whether resonance `j` falls inside the cavity acceptance band.
    pub fn resonance_in_band(&self, cavity: &CavityParams, j: i32) -> bool {
        (self.resonance_frequency(j) - self.resonance_anchor).abs() <= cavity.acceptance_band
    }
}

/// One pump setting resolved against a plan: which tooth it moves where.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpAssignment {
    /// Selected tooth index.
    pub input_index: usize,
    /// Targeted resonance index.
    pub output_index: i32,
    /// Pump angular frequency realizing the mapping, rad/s.
    pub pump_frequency: f64,
    /// Distance of the sum-frequency product from exact resonance, rad/s.
    pub residual_detuning: f64,
}

/// Pump frequency that maps tooth `i` onto resonance `j` exactly.
pub fn pump_for(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    i: usize,
    j: i32,
) -> Result<PumpAssignment, PlanError> {
    plan.validate()?;
    if i >= plan.tooth_count {
        return Err(PlanError::ToothOutOfRange { index: i, count: plan.tooth_count });
    }
    if !plan.resonance_in_band(cavity, j) {
        return Err(PlanError::OutOfBand {
            index: j,
            offset: (plan.resonance_frequency(j) - plan.resonance_anchor).abs(),
            band: cavity.acceptance_band,
        });
    }
    Ok(PumpAssignment {
        input_index: i,
        output_index: j,
        pump_frequency: plan.resonance_frequency(j) - plan.tooth_frequency(i),
        residual_detuning: 0.0,
    })
}

/// One tooth's fate under a given pump, as reported by [`decode_pump`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedTooth {
    pub tooth: usize,
    /// Nearest resonance index for the tooth's sum-frequency product.
    pub resonance: i32,
    /// Detuning of the product from that resonance, rad/s.
    pub residual: f64,
    /// Lorentzian conversion weight relative to the on-resonance value.
    pub weight: f64,
}

/// Resolves a pump setting against every tooth of the plan.
///
/// Teeth whose sum-frequency product falls on a resonance outside the
/// acceptance band are omitted. Entries are sorted by weight descending, so
/// the selected tooth comes first.
pub fn decode_pump(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    pump: &PumpSetting,
) -> Result<Vec<DecodedTooth>, PlanError> {
    plan.validate()?;
    cavity.validate()?;
    let c = pump.normalized_coupling(cavity);
    let half_width = 0.5 * (1.0 + c);
    let mut out = Vec::new();
    for i in 0..plan.tooth_count {
        let product = plan.tooth_frequency(i) + pump.frequency;
        let (j, residual) = plan.nearest_resonance(product);
        if !plan.resonance_in_band(cavity, j) {
            continue;
        }
        let d = residual / cavity.gamma_all();
        let weight = half_width * half_width / (half_width * half_width + d * d);
        out.push(DecodedTooth { tooth: i, resonance: j, residual, weight });
    }
    out.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .expect("weights are finite")
            .then(a.tooth.cmp(&b.tooth))
    });
    Ok(out)
}

/// A non-target tooth whose product lands within the conversion bandwidth of
/// some resonance, so it would co-convert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    /// Tooth offset from the target (in comb spacings).
    pub offset: usize,
    /// Centered residual of `offset * comb_spacing` modulo the FSR, rad/s.
    pub residual: f64,
}

/// Report produced by [`validate_plan`]; empty findings mean the plan is
/// usable as-is.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanReport {
    /// Set when tooth_count exceeds the cavity channel capacity.
    pub capacity_violation: Option<(usize, u32)>,
    /// Tooth offsets that co-convert at the given pump power.
    pub collisions: Vec<Collision>,
}

impl PlanReport {
    pub fn is_ok(&self) -> bool {
        self.capacity_violation.is_none() && self.collisions.is_empty()
    }
}

/// Checks a plan against a cavity at operating pump power `power_mw`:
/// capacity (tooth count vs. finesse) and commensurability collisions
/// (a non-target tooth offset whose product falls within the hot conversion
/// bandwidth of a resonance).
pub fn validate_plan(
    plan: &ChannelPlan,
    cavity: &CavityParams,
    power_mw: f64,
) -> Result<PlanReport, PlanError> {
    plan.validate()?;
    cavity.validate()?;
    let bandwidth = conversion_bandwidth(cavity, power_mw)?;
    let cap = max_channels(cavity);
    let mut report = PlanReport::default();
    if plan.tooth_count as u32 > cap {
        report.capacity_violation = Some((plan.tooth_count, cap));
    }
    for n in 1..plan.tooth_count {
        let shift = n as f64 * plan.comb_spacing;
        let wrapped = shift - (shift / plan.fsr).round() * plan.fsr;
        if wrapped.abs() < bandwidth {
            report.collisions.push(Collision { offset: n, residual: wrapped });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::rad_per_s_from_hz;
    use crate::testutil::{reference_cavity, reference_plan};
    use proptest::prelude::*;

    #[test]
    fn pump_for_reproduces_reference_frequencies() {
        let cavity = reference_cavity();
        let plan = reference_plan();
        let p00 = pump_for(&plan, &cavity, 0, 0).unwrap();
        assert!((p00.pump_frequency - rad_per_s_from_hz(189.542e12)).abs() < 1.0);
        assert_eq!(p00.residual_detuning, 0.0);

        let p10 = pump_for(&plan, &cavity, 1, 0).unwrap();
        assert!((p10.pump_frequency - (p00.pump_frequency - plan.comb_spacing)).abs() < 1.0);

        let p0_10 = pump_for(&plan, &cavity, 0, 10).unwrap();
        assert!((p0_10.pump_frequency - (p00.pump_frequency + 10.0 * plan.fsr)).abs() < 1.0);
    }

    #[test]
    fn pump_for_rejects_bad_indices() {
        let cavity = reference_cavity();
        let plan = reference_plan();
        assert!(matches!(
            pump_for(&plan, &cavity, plan.tooth_count, 0),
            Err(PlanError::ToothOutOfRange { .. })
        ));
        // acceptance band is 2pi*200 GHz -> resonance 61 is out at 2pi*201.3 GHz
        assert!(matches!(
            pump_for(&plan, &cavity, 0, 61),
            Err(PlanError::OutOfBand { .. })
        ));
        assert!(pump_for(&plan, &cavity, 0, -60).is_ok());
    }

    #[test]
    fn decode_identifies_target_and_aliased_neighbors() {
        let cavity = reference_cavity();
        let plan = reference_plan();
        let p00 = pump_for(&plan, &cavity, 0, 0).unwrap();
        let pump = PumpSetting::new(180.0, p00.pump_frequency, 0.0);
        let decoded = decode_pump(&plan, &cavity, &pump).unwrap();
        assert_eq!(decoded[0].tooth, 0);
        assert_eq!(decoded[0].resonance, 0);
        assert!(decoded[0].residual.abs() < 1.0);
        assert!((decoded[0].weight - 1.0).abs() < 1e-12);
        // tooth 3: product 3 GHz above the anchor, 0.3 GHz short of resonance 1
        let t3 = decoded.iter().find(|d| d.tooth == 3).unwrap();
        assert_eq!(t3.resonance, 1);
        assert!((t3.residual.abs() - rad_per_s_from_hz(0.3e9)).abs() < 10.0);
    }

    #[test]
    fn decode_follows_comb_shifted_pump() {
        let cavity = reference_cavity();
        let plan = reference_plan();
        let p00 = pump_for(&plan, &cavity, 0, 0).unwrap();
        let pump = PumpSetting::new(180.0, p00.pump_frequency - 2.0 * plan.comb_spacing, 0.0);
        let decoded = decode_pump(&plan, &cavity, &pump).unwrap();
        assert_eq!(decoded[0].tooth, 2);
        assert_eq!(decoded[0].resonance, 0);
        assert!(decoded[0].residual.abs() < 1.0);
    }

    #[test]
    fn commensurate_plan_puts_every_tooth_half_fsr_off() {
        // comb spacing equal to the FSR: offsetting the pump by fsr/2 leaves
        // every tooth exactly half an FSR from the nearest resonance.
        let cavity = reference_cavity();
        let mut plan = reference_plan();
        plan.comb_spacing = plan.fsr;
        plan.tooth_count = 8;
        let p00 = pump_for(&plan, &cavity, 0, 0).unwrap();
        let pump = PumpSetting::new(180.0, p00.pump_frequency + plan.fsr / 2.0, 0.0);
        let decoded = decode_pump(&plan, &cavity, &pump).unwrap();
        let min_residual = decoded
            .iter()
            .map(|d| d.residual.abs())
            .fold(f64::INFINITY, f64::min);
        assert!((min_residual - plan.fsr / 2.0).abs() < 10.0);
    }

    #[test]
    fn reference_plan_collides_only_at_the_exact_alias() {
        // 1 GHz teeth on a 3.3 GHz ladder: offsets up to 32 stay at least
        // 0.3 GHz off resonance (smallest at n = 3), but offset 33 aliases
        // exactly (33 x 1 GHz = 10 FSR), so a 40-tooth plan co-converts it
        let cavity = reference_cavity();
        let plan = reference_plan();
        let report = validate_plan(&plan, &cavity, 180.0).unwrap();
        assert!(report.capacity_violation.is_none());
        assert_eq!(report.collisions.len(), 1);
        assert_eq!(report.collisions[0].offset, 33);
        assert!(report.collisions[0].residual.abs() < 1.0);
        // among the near offsets the smallest residual is 2pi*0.3 GHz at n=3,
        // and the global sub-alias minimum 2pi*0.1 GHz (n=10) still clears
        // the 2pi*92.6 MHz hot bandwidth
        let residual = |n: usize| {
            let shift = n as f64 * plan.comb_spacing;
            (shift - (shift / plan.fsr).round() * plan.fsr).abs()
        };
        let near = (1..=3).map(residual).fold(f64::INFINITY, f64::min);
        assert!((near - rad_per_s_from_hz(0.3e9)).abs() < 10.0);
        let sub_alias = (1..33).map(residual).fold(f64::INFINITY, f64::min);
        assert!((sub_alias - rad_per_s_from_hz(0.1e9)).abs() < 10.0);
        assert!(sub_alias > rad_per_s_from_hz(92.6e6));
    }

    #[test]
    fn alias_free_truncation_of_the_reference_plan_is_clean() {
        let cavity = reference_cavity();
        let mut plan = reference_plan();
        plan.tooth_count = 33;
        let report = validate_plan(&plan, &cavity, 180.0).unwrap();
        assert!(report.is_ok(), "unexpected findings: {report:?}");
    }

    #[test]
    fn fully_commensurate_spacing_collides_everywhere() {
        let cavity = reference_cavity();
        let mut plan = reference_plan();
        plan.comb_spacing = plan.fsr;
        plan.tooth_count = 10;
        let report = validate_plan(&plan, &cavity, 180.0).unwrap();
        assert_eq!(report.collisions.len(), plan.tooth_count - 1);
    }

    #[test]
    fn oversubscribed_plan_flags_capacity() {
        let cavity = reference_cavity();
        let mut plan = reference_plan();
        plan.tooth_count = 50;
        let report = validate_plan(&plan, &cavity, 180.0).unwrap();
        assert_eq!(report.capacity_violation, Some((50, 41)));
    }

    #[test]
    fn half_fsr_tie_resolves_to_lower_resonance() {
        // small exact numbers so the halfway point is representable
        let mut plan = reference_plan();
        plan.resonance_anchor = 0.0;
        plan.fsr = 8.0;
        let (j, residual) = plan.nearest_resonance(4.0);
        assert_eq!(j, 0);
        assert_eq!(residual, 4.0);
        let (j, residual) = plan.nearest_resonance(12.0);
        assert_eq!(j, 1);
        assert_eq!(residual, 4.0);
        let (j, _) = plan.nearest_resonance(4.0 + 1e-9);
        assert_eq!(j, 1);
    }

    #[test]
    fn exact_alias_decodes_both_teeth_deterministically() {
        // teeth 33 apart convert together (33 comb spacings = 10 FSR); the
        // decode order falls back to the tooth index on the exact tie
        let cavity = reference_cavity();
        let plan = reference_plan();
        let assignment = pump_for(&plan, &cavity, 35, 0).unwrap();
        let pump = PumpSetting::new(180.0, assignment.pump_frequency, 0.0);
        let decoded = decode_pump(&plan, &cavity, &pump).unwrap();
        assert_eq!(decoded[0].tooth, 2);
        assert_eq!(decoded[0].resonance, -10);
        assert_eq!(decoded[1].tooth, 35);
        assert_eq!(decoded[1].resonance, 0);
        assert!((decoded[0].weight - 1.0).abs() < 1e-12);
        assert!((decoded[1].weight - 1.0).abs() < 1e-12);
    }

    proptest! {
        /// decode_pump(pump_for(i, j)) ranks (i, j) first with zero residual,
        /// for any tooth below the exact-alias offset (33 for this plan).
        #[test]
        fn round_trip(i in 0usize..33, j in -10i32..=10) {
            let cavity = reference_cavity();
            let plan = reference_plan();
            let assignment = pump_for(&plan, &cavity, i, j).unwrap();
            let pump = PumpSetting::new(180.0, assignment.pump_frequency, 0.0);
            let decoded = decode_pump(&plan, &cavity, &pump).unwrap();
            prop_assert_eq!(decoded[0].tooth, i);
            prop_assert_eq!(decoded[0].resonance, j);
            prop_assert!(decoded[0].residual.abs() < 2.0);
        }

        /// Shifting the pump by -n comb spacings selects tooth i+n at the same
        /// output; shifting by +m FSR selects resonance j+m at the same tooth.
        /// Stays below the exact-alias offset of the reference plan.
        #[test]
        fn translation_invariance(i in 0usize..16, n in 0usize..16, m in -5i32..=5) {
            let cavity = reference_cavity();
            let plan = reference_plan();
            let base = pump_for(&plan, &cavity, i, 0).unwrap();

            let comb_shifted = PumpSetting::new(
                180.0,
                base.pump_frequency - n as f64 * plan.comb_spacing,
                0.0,
            );
            let decoded = decode_pump(&plan, &cavity, &comb_shifted).unwrap();
            prop_assert_eq!(decoded[0].tooth, i + n);
            prop_assert_eq!(decoded[0].resonance, 0);

            let fsr_shifted =
                PumpSetting::new(180.0, base.pump_frequency + m as f64 * plan.fsr, 0.0);
            let decoded = decode_pump(&plan, &cavity, &fsr_shifted).unwrap();
            prop_assert_eq!(decoded[0].tooth, i);
            prop_assert_eq!(decoded[0].resonance, m);
        }

        /// Adding k FSR to a converted-band frequency moves the decoded
        /// resonance index by exactly k and keeps the residual.
        #[test]
        fn fsr_aliasing(offset in -0.49f64..0.49, j in -40i32..=40, k in -30i32..=30) {
            let plan = reference_plan();
            let omega = plan.resonance_frequency(j) + offset * plan.fsr;
            let (j0, r0) = plan.nearest_resonance(omega);
            let (j1, r1) = plan.nearest_resonance(omega + k as f64 * plan.fsr);
            prop_assert_eq!(j1, j0 + k);
            prop_assert!((r1 - r0).abs() < 20.0);
        }
    }
}
