//! Run configuration with explicit unit tags.
//!
//! Every frequency- or time-valued field is a `{ value, unit }` pair; a bare
//! number or an unknown unit is a load error. Frequencies accept plain
//! (`Hz`..`THz`, `rad/s`) and `2pi-` prefixed units (ordinary frequency to be
//! multiplied by 2 pi); times accept `s` down to `ps`. Everything is
//! converted to rad/s and seconds at load time.

use std::path::Path;

use serde::Deserialize;

use tweezers_core::cavity::CavityParams;
use tweezers_core::noise::SignalModel;
use tweezers_core::plan::ChannelPlan;
use tweezers_core::PumpSetting;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("TOML parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown unit tag {unit:?} for a {kind} value")]
    UnknownUnit { unit: String, kind: &'static str },
    #[error("cavity section must give either (gamma_r and gamma_int) or (gamma_all and gamma_r_tilde)")]
    AmbiguousLossRates,
    #[error("gamma_r_tilde must lie in (0, 1], got {0}")]
    BadGammaRTilde(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

/// A numeric value with a mandatory unit tag.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tagged {
    pub value: f64,
    pub unit: String,
}

impl Tagged {
    /// Angular frequency in rad/s.
    pub fn angular(&self) -> Result<f64, ConfigError> {
        let scale = match self.unit.as_str() {
            "rad/s" => return Ok(self.value),
            "Hz" => 1.0,
            "kHz" => 1.0e3,
            "MHz" => 1.0e6,
            "GHz" => 1.0e9,
            "THz" => 1.0e12,
            "2pi-Hz" => 1.0,
            "2pi-kHz" => 1.0e3,
            "2pi-MHz" => 1.0e6,
            "2pi-GHz" => 1.0e9,
            "2pi-THz" => 1.0e12,
            _ => {
                return Err(ConfigError::UnknownUnit {
                    unit: self.unit.clone(),
                    kind: "frequency",
                })
            }
        };
        // plain frequency units are ordinary frequencies as well; the 2pi-
        // prefix exists to make the converted value explicit in the config
        Ok(2.0 * std::f64::consts::PI * self.value * scale)
    }

    /// Time in seconds.
    pub fn seconds(&self) -> Result<f64, ConfigError> {
        let scale = match self.unit.as_str() {
            "s" => 1.0,
            "ms" => 1.0e-3,
            "us" => 1.0e-6,
            "ns" => 1.0e-9,
            "ps" => 1.0e-12,
            _ => {
                return Err(ConfigError::UnknownUnit { unit: self.unit.clone(), kind: "time" })
            }
        };
        Ok(self.value * scale)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CavitySection {
    gamma_r: Option<Tagged>,
    gamma_int: Option<Tagged>,
    gamma_all: Option<Tagged>,
    gamma_r_tilde: Option<f64>,
    fsr: Tagged,
    alpha_per_mw: f64,
    length_mm: f64,
    noise_coeff_cps_per_mw_ghz_mm: f64,
    acceptance_band: Tagged,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanSection {
    comb_center: Tagged,
    comb_spacing: Tagged,
    tooth_count: usize,
    resonance_anchor: Tagged,
    bin_width: Tagged,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpSection {
    power_mw: f64,
    frequency: Tagged,
    phase_rad: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalSection {
    n_in: f64,
    g2_in: f64,
    linewidth_ratio: f64,
    window: Tagged,
    zeta_override: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstrumentSection {
    signal_resolution: Tagged,
    converted_resolution: Tagged,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    directory: String,
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    cavity: CavitySection,
    plan: PlanSection,
    pump: PumpSection,
    signal: SignalSection,
    instrument: Option<InstrumentSection>,
    output: OutputSection,
}

/// Fully resolved configuration, all rates in rad/s.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cavity: CavityParams,
    pub plan: ChannelPlan,
    pub pump: PumpSetting,
    pub signal: SignalModel,
    pub zeta_override: Option<f64>,
    /// OSA FWHM for the signal and converted bands, rad/s.
    pub instrument: Option<(f64, f64)>,
    pub output_directory: String,
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;

        let c = &raw.cavity;
        let (gamma_r, gamma_int) = match (&c.gamma_r, &c.gamma_int, &c.gamma_all, c.gamma_r_tilde)
        {
            (Some(r), Some(i), None, None) => (r.angular()?, i.angular()?),
            (None, None, Some(all), Some(tilde)) => {
                if !(tilde > 0.0 && tilde <= 1.0) {
                    return Err(ConfigError::BadGammaRTilde(tilde));
                }
                let all = all.angular()?;
                (tilde * all, (1.0 - tilde) * all)
            }
            _ => return Err(ConfigError::AmbiguousLossRates),
        };
        let cavity = CavityParams {
            gamma_r,
            gamma_int,
            fsr: c.fsr.angular()?,
            alpha: c.alpha_per_mw,
            length: c.length_mm,
            noise_coeff: c.noise_coeff_cps_per_mw_ghz_mm,
            acceptance_band: c.acceptance_band.angular()?,
        };
        cavity.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let p = &raw.plan;
        let plan = ChannelPlan::for_cavity(
            &cavity,
            p.comb_center.angular()?,
            p.comb_spacing.angular()?,
            p.tooth_count,
            p.resonance_anchor.angular()?,
            p.bin_width.angular()?,
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let pump = PumpSetting::new(
            raw.pump.power_mw,
            raw.pump.frequency.angular()?,
            raw.pump.phase_rad,
        );
        if !(pump.power >= 0.0) {
            return Err(ConfigError::Invalid("pump power must be >= 0".into()));
        }

        let signal = SignalModel {
            n_in: raw.signal.n_in,
            g2_in: raw.signal.g2_in,
            linewidth_ratio: raw.signal.linewidth_ratio,
            window: raw.signal.window.seconds()?,
        };
        signal.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let instrument = match &raw.instrument {
            Some(i) => Some((i.signal_resolution.angular()?, i.converted_resolution.angular()?)),
            None => None,
        };

        Ok(RunConfig {
            cavity,
            plan,
            pump,
            signal,
            zeta_override: raw.signal.zeta_override,
            instrument,
            output_directory: raw.output.directory.clone(),
            seed: raw.output.seed,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologySection {
    nodes: Vec<String>,
    distributor: String,
    channel_count: usize,
    pump_power_mw: Option<f64>,
    edge_transmittance: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
enum RawAction {
    Link { a: String, b: String },
    Drop { node: String, channel: usize },
    Add { node: String, channel: usize, omega: Tagged },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    topology: TopologySection,
    #[serde(default, rename = "action")]
    actions: Vec<RawAction>,
}

/// Scenario file resolved against a run configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: tweezers_core::netsim::NetworkTopology,
    pub script: Vec<tweezers_core::netsim::ScriptAction>,
}

impl Scenario {
    pub fn load(path: &Path, config: &RunConfig) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, config)
    }

    pub fn parse(text: &str, config: &RunConfig) -> Result<Self, ConfigError> {
        let raw: RawScenario = toml::from_str(text)?;
        let names = raw.topology.nodes.clone();
        let index_of = |name: &str| -> Result<usize, ConfigError> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown node {name:?}")))
        };
        let distributor = index_of(&raw.topology.distributor)?;
        let n = names.len();
        let topology = tweezers_core::netsim::NetworkTopology {
            node_names: names.clone(),
            distributor,
            channel_count: raw.topology.channel_count,
            plan: ChannelPlan {
                tooth_count: raw.topology.channel_count,
                ..config.plan
            },
            cavities: vec![config.cavity; n],
            pump_power_mw: raw
                .topology
                .pump_power_mw
                .unwrap_or_else(|| config.cavity.max_efficiency_power()),
            signal: config.signal,
            zeta_override: config.zeta_override,
            edge_transmittance: raw.topology.edge_transmittance.clone().unwrap_or(vec![1.0; n]),
        };
        topology.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let mut script = Vec::with_capacity(raw.actions.len());
        for action in &raw.actions {
            script.push(match action {
                RawAction::Link { a, b } => tweezers_core::netsim::ScriptAction::Link {
                    node_a: index_of(a)?,
                    node_b: index_of(b)?,
                },
                RawAction::Drop { node, channel } => tweezers_core::netsim::ScriptAction::Drop {
                    node: index_of(node)?,
                    channel: *channel,
                },
                RawAction::Add { node, channel, omega } => {
                    tweezers_core::netsim::ScriptAction::Add {
                        node: index_of(node)?,
                        channel: *channel,
                        omega: omega.angular()?,
                    }
                }
            });
        }
        Ok(Scenario { topology, script })
    }
}
