//! Round-based scenario engine for a ring network with per-node converters.
//!
//! A distributor feeds frequency-multiplexed photon pairs into a ring; end
//! nodes pick channels up by up-conversion (drop), insert photons into empty
//! channels by the reverse process (add), and pair up for joint measurements
//! by converting one channel at two nodes to the same output resonance.
//! Every pump pass deposits noise into the channels still waiting, so each
//! channel carries a per-node exposure counter that divides the SNR of its
//! eventual extraction.
//!
//! The engine is synchronous and deterministic: identical topology, script
//! and seed produce byte-identical event logs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cavity::{
    conversion_efficiency, max_channels, steady_state_transfer, CavityParams, ParamError,
    PumpSetting,
};
use crate::noise::{g2_out, noise_photons, signal_photons, snr, NoiseBudget, NoiseError, SignalModel};
use crate::plan::{pump_for, ChannelPlan, PlanError, PumpAssignment};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("topology invariant violated: {0}")]
    BadTopology(&'static str),
    #[error("node index {0} out of range")]
    BadNode(usize),
    #[error("the distributor cannot act as an end node")]
    DistributorAsEndpoint,
    #[error("no channel with an available pair")]
    ResourceExhausted,
    #[error("channel {0} cannot be dropped (not available)")]
    InvalidDrop(usize),
    #[error("channel {0} is occupied; cannot add into it")]
    AddCollision(usize),
    #[error("pump is off; the converter is inert")]
    PumpOff,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Ring network description. Node 0..nodes.len() are ring-ordered; edge `k`
/// connects node `k` to node `(k+1) % n` with the given transmittance.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    pub node_names: Vec<String>,
    /// Index of the distributor node.
    pub distributor: usize,
    /// Multiplexing degree M.
    pub channel_count: usize,
    pub plan: ChannelPlan,
    /// Converter at each node (same length as `node_names`).
    pub cavities: Vec<CavityParams>,
    /// Operating pump power for every conversion, mW.
    pub pump_power_mw: f64,
    /// Input photon statistics per channel.
    pub signal: SignalModel,
    /// Base SNR override; when unset it is computed from the noise chain.
    pub zeta_override: Option<f64>,
    /// Per-edge power transmittance, edge k = (node k, node k+1).
    pub edge_transmittance: Vec<f64>,
}

impl NetworkTopology {
    pub fn validate(&self) -> Result<(), NetError> {
        let n = self.node_names.len();
        if n < 3 {
            return Err(NetError::BadTopology("need a distributor and at least two end nodes"));
        }
        if self.distributor >= n {
            return Err(NetError::BadTopology("distributor index out of range"));
        }
        if self.cavities.len() != n {
            return Err(NetError::BadTopology("one cavity per node required"));
        }
        if self.edge_transmittance.len() != n {
            return Err(NetError::BadTopology("one transmittance per ring edge required"));
        }
        if self.edge_transmittance.iter().any(|t| !(*t >= 0.0 && *t <= 1.0)) {
            return Err(NetError::BadTopology("edge transmittance must lie in [0, 1]"));
        }
        if self.channel_count == 0 || self.channel_count != self.plan.tooth_count {
            return Err(NetError::BadTopology("channel count must match the plan tooth count"));
        }
        self.plan.validate()?;
        self.signal.validate()?;
        for cavity in &self.cavities {
            cavity.validate()?;
            if self.channel_count as u32 > max_channels(cavity) {
                return Err(NetError::BadTopology("channel count exceeds a node's capacity"));
            }
        }
        Ok(())
    }

    /// Base SNR for one fresh extraction at this operating point.
    pub fn base_zeta(&self, node: usize) -> Result<f64, NetError> {
        if let Some(z) = self.zeta_override {
            return Ok(z);
        }
        let cavity = &self.cavities[node];
        let s = signal_photons(cavity, &self.signal)?;
        let n = noise_photons(cavity, self.pump_power_mw, self.signal.window)?;
        Ok(snr(s, n)?)
    }

    /// Product of edge transmittances from the distributor to `node`, walking
    /// the ring in the direction given by `forward`.
    fn path_transmittance(&self, node: usize, forward: bool) -> f64 {
        let n = self.node_names.len();
        let mut t = 1.0;
        let mut at = self.distributor;
        while at != node {
            if forward {
                t *= self.edge_transmittance[at];
                at = (at + 1) % n;
            } else {
                at = (at + n - 1) % n;
                t *= self.edge_transmittance[at];
            }
        }
        t
    }
}

/// What currently occupies a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupancy {
    /// Entangled pair (or inserted photon) ready for use.
    Available,
    /// Extracted; never reused.
    Consumed,
    /// Nothing in the channel.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelState {
    pub occupancy: Occupancy,
    /// Request that consumed the channel, if any.
    pub owner: Option<u32>,
}

/// Mutable network state: channel occupancies plus per-node exposure
/// counters (pump passes seen by each still-available channel at each node).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    channels: Vec<ChannelState>,
    exposure: Vec<Vec<u32>>,
}

impl NetworkState {
    /// All channels carrying a distributed pair, none exposed yet.
    pub fn fresh(topology: &NetworkTopology) -> Self {
        Self {
            channels: alloc::vec![
                ChannelState { occupancy: Occupancy::Available, owner: None };
                topology.channel_count
            ],
            exposure: alloc::vec![alloc::vec![0; topology.channel_count]; topology.node_names.len()],
        }
    }

    pub fn channels(&self) -> &[ChannelState] {
        &self.channels
    }

    pub fn exposure(&self, node: usize, channel: usize) -> u32 {
        self.exposure[node][channel]
    }

    pub fn count(&self, occupancy: Occupancy) -> usize {
        self.channels.iter().filter(|c| c.occupancy == occupancy).count()
    }

    fn lowest_available(&self) -> Option<usize> {
        self.channels.iter().position(|c| c.occupancy == Occupancy::Available)
    }

    /// One pump pass at `node`: every channel still holding a photon picks up
    /// one exposure. Returns the affected (channel, new count) pairs.
    fn expose_available(&mut self, node: usize) -> Vec<(usize, u32)> {
        let mut touched = Vec::new();
        for (ch, state) in self.channels.iter().enumerate() {
            if state.occupancy == Occupancy::Available {
                self.exposure[node][ch] += 1;
                touched.push((ch, self.exposure[node][ch]));
            }
        }
        touched
    }
}

/// Pump assignment plus noise budget for one photon of a link.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeConversion {
    pub node: usize,
    pub pump: PumpAssignment,
    pub efficiency: f64,
    pub path_transmittance: f64,
    pub budget: NoiseBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRequest {
    pub id: u32,
    pub node_a: usize,
    pub node_b: usize,
    pub issued_round: u32,
}

/// Result of scheduling one link between two end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkOutcome {
    pub request: LinkRequest,
    pub channel: usize,
    pub output_resonance: i32,
    pub side_a: NodeConversion,
    pub side_b: NodeConversion,
    /// Both photons routed to the same output resonance.
    pub bsm_feasible: bool,
    /// Conversion efficiencies times path transmittances of both photons.
    pub efficiency_product: f64,
}

fn node_budget(
    topology: &NetworkTopology,
    state: &NetworkState,
    node: usize,
    channel: usize,
) -> Result<NoiseBudget, NetError> {
    let rounds = state.exposure[node][channel].max(1);
    let zeta_base = topology.base_zeta(node)?;
    let zeta_eff = zeta_base / rounds as f64;
    let cavity = &topology.cavities[node];
    let s = signal_photons(cavity, &topology.signal)?;
    let n_single = noise_photons(cavity, topology.pump_power_mw, topology.signal.window)?;
    Ok(NoiseBudget {
        n_780: n_single * rounds as f64,
        s_780: s,
        zeta: zeta_eff,
        g2_out: g2_out(topology.signal.g2_in, zeta_eff),
        round_index: rounds,
    })
}

fn check_end_node(topology: &NetworkTopology, node: usize) -> Result<(), NetError> {
    if node >= topology.node_names.len() {
        return Err(NetError::BadNode(node));
    }
    if node == topology.distributor {
        return Err(NetError::DistributorAsEndpoint);
    }
    Ok(())
}

/// Assigns the lowest available channel to the request, converting it at both
/// end nodes to the anchor resonance (the lowest-order resonance inside the
/// acceptance band), and charges the exposure bookkeeping.
pub fn schedule_link(
    topology: &NetworkTopology,
    state: &mut NetworkState,
    request: LinkRequest,
) -> Result<LinkOutcome, NetError> {
    topology.validate()?;
    check_end_node(topology, request.node_a)?;
    check_end_node(topology, request.node_b)?;
    if request.node_a == request.node_b {
        return Err(NetError::BadTopology("end nodes of a link must differ"));
    }
    if !(topology.pump_power_mw > 0.0) {
        return Err(NetError::PumpOff);
    }
    let channel = state.lowest_available().ok_or(NetError::ResourceExhausted)?;

    state.expose_available(request.node_a);
    state.expose_available(request.node_b);

    let target_resonance = 0;
    let mut sides = [None, None];
    for (slot, node) in [(0, request.node_a), (1, request.node_b)] {
        let cavity = &topology.cavities[node];
        let pump = pump_for(&topology.plan, cavity, channel, target_resonance)?;
        let efficiency = conversion_efficiency(cavity, topology.pump_power_mw, 0.0)?;
        let budget = node_budget(topology, state, node, channel)?;
        sides[slot] = Some(NodeConversion {
            node,
            pump,
            efficiency,
            path_transmittance: topology.path_transmittance(node, slot == 0),
            budget,
        });
    }
    let side_a = sides[0].take().unwrap();
    let side_b = sides[1].take().unwrap();

    state.channels[channel] =
        ChannelState { occupancy: Occupancy::Consumed, owner: Some(request.id) };

    let bsm_feasible = side_a.pump.output_index == side_b.pump.output_index;
    let efficiency_product = side_a.efficiency
        * side_b.efficiency
        * side_a.path_transmittance
        * side_b.path_transmittance;
    Ok(LinkOutcome {
        request,
        channel,
        output_resonance: target_resonance,
        side_a,
        side_b,
        bsm_feasible,
        efficiency_product,
    })
}

/// Extraction of one channel at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct DropRecord {
    pub node: usize,
    pub channel: usize,
    pub pump: PumpAssignment,
    pub efficiency: f64,
    pub budget: NoiseBudget,
    /// Transmission factor of every other still-available channel.
    pub other_transmissions: Vec<(usize, f64)>,
}

/// Converts the photon in `channel` at `node` up and out of the ring.
pub fn drop_channel(
    topology: &NetworkTopology,
    state: &mut NetworkState,
    node: usize,
    channel: usize,
) -> Result<DropRecord, NetError> {
    topology.validate()?;
    check_end_node(topology, node)?;
    if !(topology.pump_power_mw > 0.0) {
        return Err(NetError::PumpOff);
    }
    if channel >= topology.channel_count
        || state.channels[channel].occupancy != Occupancy::Available
    {
        return Err(NetError::InvalidDrop(channel));
    }

    state.expose_available(node);

    let cavity = &topology.cavities[node];
    let pump_assignment = pump_for(&topology.plan, cavity, channel, 0)?;
    let pump = PumpSetting::new(topology.pump_power_mw, pump_assignment.pump_frequency, 0.0);
    let efficiency = conversion_efficiency(cavity, topology.pump_power_mw, 0.0)?;
    let budget = node_budget(topology, state, node, channel)?;

    let mut other_transmissions = Vec::new();
    for (ch, st) in state.channels.iter().enumerate() {
        if ch == channel || st.occupancy != Occupancy::Available {
            continue;
        }
        let product = topology.plan.tooth_frequency(ch) + pump.frequency;
        let (j, residual) = topology.plan.nearest_resonance(product);
        let transmission = if topology.plan.resonance_in_band(cavity, j) {
            steady_state_transfer(cavity, &pump, residual)?.r_pass.norm_sqr()
        } else {
            1.0
        };
        other_transmissions.push((ch, transmission));
    }

    state.channels[channel] = ChannelState { occupancy: Occupancy::Consumed, owner: None };
    Ok(DropRecord { node, channel, pump: pump_assignment, efficiency, budget, other_transmissions })
}

/// A photon presented to a node for insertion into the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InboundPhoton {
    /// Converted-band angular frequency, rad/s.
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AddRecord {
    pub node: usize,
    pub channel: usize,
    /// Resonance the photon entered through.
    pub resonance: i32,
    pub pump: PumpAssignment,
    /// Insertion efficiency |t_rev|^2.
    pub efficiency: f64,
}

/// Reverse conversion: inserts a converted-band photon into an empty channel
/// without touching occupied ones.
pub fn add_channel(
    topology: &NetworkTopology,
    state: &mut NetworkState,
    node: usize,
    channel: usize,
    photon: InboundPhoton,
) -> Result<AddRecord, NetError> {
    topology.validate()?;
    check_end_node(topology, node)?;
    if !(topology.pump_power_mw > 0.0) {
        return Err(NetError::PumpOff);
    }
    if channel >= topology.channel_count {
        return Err(NetError::BadTopology("channel index out of range"));
    }
    if state.channels[channel].occupancy != Occupancy::Empty {
        return Err(NetError::AddCollision(channel));
    }
    let cavity = &topology.cavities[node];
    let (resonance, residual) = topology.plan.nearest_resonance(photon.omega);
    if !topology.plan.resonance_in_band(cavity, resonance) {
        return Err(NetError::Plan(PlanError::OutOfBand {
            index: resonance,
            offset: (topology.plan.resonance_frequency(resonance) - topology.plan.resonance_anchor)
                .abs(),
            band: cavity.acceptance_band,
        }));
    }

    state.expose_available(node);

    let pump_assignment = pump_for(&topology.plan, cavity, channel, resonance)?;
    let pump = PumpSetting::new(topology.pump_power_mw, pump_assignment.pump_frequency, 0.0);
    let efficiency = steady_state_transfer(cavity, &pump, residual)?.t_rev.norm_sqr();

    state.channels[channel] = ChannelState { occupancy: Occupancy::Available, owner: None };
    // the inserting pump pass is the added photon's first exposure here
    state.exposure[node][channel] = 1;
    Ok(AddRecord { node, channel, resonance, pump: pump_assignment, efficiency })
}

/// One scripted action of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScriptAction {
    Link { node_a: usize, node_b: usize },
    Drop { node: usize, channel: usize },
    Add { node: usize, channel: usize, omega: f64 },
}

/// Complete, deterministic record of a scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    /// Line-formatted events: `round,event,node,channel,omega_p,eta,zeta_eff,g2_out`.
    pub events: Vec<String>,
    pub outcomes: Vec<LinkOutcome>,
    pub drops: Vec<DropRecord>,
    pub adds: Vec<AddRecord>,
    pub final_state: NetworkState,
    /// Actions that failed, with the round they were issued in.
    pub failures: Vec<(u32, NetError)>,
}

fn fmt_event(
    round: u32,
    event: &str,
    node: &str,
    channel: Option<usize>,
    omega_p: Option<f64>,
    eta: Option<f64>,
    zeta_eff: Option<f64>,
    g2: Option<f64>,
) -> String {
    fn opt_u(v: Option<usize>) -> String {
        v.map(|x| format!("{x}")).unwrap_or_default()
    }
    fn opt_f(v: Option<f64>) -> String {
        v.map(|x| format!("{x}")).unwrap_or_default()
    }
    format!(
        "{round},{event},{node},{},{},{},{},{}",
        opt_u(channel),
        opt_f(omega_p),
        opt_f(eta),
        opt_f(zeta_eff),
        opt_f(g2)
    )
}

/// Runs a script of actions against a fresh network state.
///
/// Failing actions are logged and the scenario continues. The `seed` keeps
/// the signature stable for randomized channel policies; the default
/// lowest-index policy ignores it, and identical `(topology, script, seed)`
/// always yield byte-identical event logs.
pub fn run_scenario(
    topology: &NetworkTopology,
    script: &[ScriptAction],
    seed: u64,
) -> Result<ScenarioRun, NetError> {
    topology.validate()?;
    let _ = seed;
    let mut state = NetworkState::fresh(topology);
    let mut run = ScenarioRun {
        events: Vec::new(),
        outcomes: Vec::new(),
        drops: Vec::new(),
        adds: Vec::new(),
        final_state: state.clone(),
        failures: Vec::new(),
    };

    for (idx, action) in script.iter().enumerate() {
        let round = (idx + 1) as u32;
        match *action {
            ScriptAction::Link { node_a, node_b } => {
                let request =
                    LinkRequest { id: round, node_a, node_b, issued_round: round };
                let exposure_before: Vec<Vec<u32>> = state.exposure.clone();
                match schedule_link(topology, &mut state, request) {
                    Ok(outcome) => {
                        for side in [&outcome.side_a, &outcome.side_b] {
                            let name = &topology.node_names[side.node];
                            for (ch, count) in exposure_delta(&exposure_before, &state, side.node) {
                                let zeta = topology.base_zeta(side.node)? / count as f64;
                                run.events.push(fmt_event(
                                    round, "expose", name, Some(ch), None, None, Some(zeta), None,
                                ));
                            }
                            run.events.push(fmt_event(
                                round,
                                "pump",
                                name,
                                Some(outcome.channel),
                                Some(side.pump.pump_frequency),
                                Some(side.efficiency),
                                None,
                                None,
                            ));
                            run.events.push(fmt_event(
                                round,
                                "link",
                                name,
                                Some(outcome.channel),
                                Some(side.pump.pump_frequency),
                                Some(side.efficiency),
                                Some(side.budget.zeta),
                                Some(side.budget.g2_out),
                            ));
                        }
                        run.outcomes.push(outcome);
                    }
                    Err(err) => log_failure(&mut run, round, "link", err),
                }
            }
            ScriptAction::Drop { node, channel } => {
                let exposure_before = state.exposure.clone();
                match drop_channel(topology, &mut state, node, channel) {
                    Ok(record) => {
                        let name = &topology.node_names[record.node];
                        for (ch, count) in exposure_delta(&exposure_before, &state, record.node) {
                            let zeta = topology.base_zeta(record.node)? / count as f64;
                            run.events.push(fmt_event(
                                round, "expose", name, Some(ch), None, None, Some(zeta), None,
                            ));
                        }
                        run.events.push(fmt_event(
                            round,
                            "drop",
                            name,
                            Some(record.channel),
                            Some(record.pump.pump_frequency),
                            Some(record.efficiency),
                            Some(record.budget.zeta),
                            Some(record.budget.g2_out),
                        ));
                        run.drops.push(record);
                    }
                    Err(err) => log_failure(&mut run, round, "drop", err),
                }
            }
            ScriptAction::Add { node, channel, omega } => {
                let exposure_before = state.exposure.clone();
                match add_channel(topology, &mut state, node, channel, InboundPhoton { omega }) {
                    Ok(record) => {
                        let name = &topology.node_names[record.node];
                        for (ch, count) in exposure_delta(&exposure_before, &state, record.node) {
                            if ch == record.channel {
                                continue; // reported as the add event itself
                            }
                            let zeta = topology.base_zeta(record.node)? / count as f64;
                            run.events.push(fmt_event(
                                round, "expose", name, Some(ch), None, None, Some(zeta), None,
                            ));
                        }
                        run.events.push(fmt_event(
                            round,
                            "add",
                            name,
                            Some(record.channel),
                            Some(record.pump.pump_frequency),
                            Some(record.efficiency),
                            None,
                            None,
                        ));
                        run.adds.push(record);
                    }
                    Err(err) => log_failure(&mut run, round, "add", err),
                }
            }
        }
        debug_assert_eq!(
            state.count(Occupancy::Available)
                + state.count(Occupancy::Consumed)
                + state.count(Occupancy::Empty),
            topology.channel_count
        );
    }

    run.final_state = state;
    Ok(run)
}

fn exposure_delta(
    before: &[Vec<u32>],
    state: &NetworkState,
    node: usize,
) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for (ch, &count) in state.exposure[node].iter().enumerate() {
        if count != before[node][ch] {
            out.push((ch, count));
        }
    }
    out
}

fn log_failure(run: &mut ScenarioRun, round: u32, what: &str, err: NetError) {
    run.events.push(fmt_event(round, &format!("error-{what}"), "-", None, None, None, None, None));
    run.failures.push((round, err));
}
