//! Round loop shared by both protocols.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::energy::{aggregation_energy, rx_energy, tx_energy, EnergyLedger};
use crate::error::SimError;
use crate::leach::{elect_heads, join_nearest, ClusterAssignment};
use crate::metrics::{summarize_series, RoundMetrics, Summary};
use crate::model::{deploy_nodes, validate_config, Protocol, SensorNode, SimConfig};
use crate::monch;
use crate::rng::SimRng;

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub round: u32,
    pub nodes: Vec<SensorNode>,
    pub ledger: EnergyLedger,
    pub cumulative_packets_to_bs: u64,
    pub rng: SimRng,
    initial_total: f64,
}

impl SimulationState {
    pub fn new(nodes: Vec<SensorNode>, rng: SimRng) -> Self {
        let initial_total = nodes.iter().map(|n| n.residual_energy).sum();
        Self {
            round: 0,
            ledger: EnergyLedger::new(nodes.len()),
            nodes,
            cumulative_packets_to_bs: 0,
            rng,
            initial_total,
        }
    }

    /// Deploys a fresh population for `config` from its seed.
    pub fn deploy(config: &SimConfig) -> Self {
        let mut rng = SimRng::new(config.seed);
        let nodes = deploy_nodes(config, &mut rng);
        Self::new(nodes, rng)
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn alive_ids(&self) -> BTreeSet<usize> {
        self.nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| n.id)
            .collect()
    }

    pub fn total_residual(&self) -> f64 {
        self.nodes.iter().map(|n| n.residual_energy).sum()
    }

    /// Battery energy present at deployment.
    pub fn initial_total(&self) -> f64 {
        self.initial_total
    }

    /// `|residual + consumed - initial| / initial`.
    pub fn conservation_error(&self) -> f64 {
        ((self.total_residual() + self.ledger.total_consumed) - self.initial_total).abs()
            / self.initial_total
    }

    fn metrics(&self, round: u32, head_count: usize) -> RoundMetrics {
        RoundMetrics {
            round,
            alive_count: self.alive_count(),
            total_residual_energy: self.total_residual(),
            cumulative_packets_to_bs: self.cumulative_packets_to_bs,
            head_count,
        }
    }
}

/// What one data frame cost and delivered.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameDelta {
    pub consumed: f64,
    pub packets_to_bs: u64,
}

/// Setup phase for the configured protocol. LEACH may legitimately return
/// an assignment with no heads, in which case everyone is unassigned.
pub fn form_round(state: &mut SimulationState, config: &SimConfig) -> ClusterAssignment {
    match config.protocol {
        Protocol::Leach => {
            let heads = elect_heads(
                &mut state.nodes,
                config.ch_probability,
                state.round,
                &mut state.rng,
            );
            join_nearest(&state.nodes, &heads)
        }
        Protocol::Monch => monch::plan_round(&state.nodes, config).assignment,
    }
}

/// One data frame over a fixed assignment.
///
/// Per cluster (heads in id order): each alive member sends one node packet
/// to its head, which pays reception for it; the head then aggregates the
/// received bits plus its own reading and sends one packet to the BS.
/// Unassigned nodes send their node packet straight to the BS. A charge that
/// exhausts a node still completes the operation being paid for; the node
/// is dead for everything after it. Members of a dead head stay silent.
pub fn steady_state_frame(
    state: &mut SimulationState,
    assignment: &ClusterAssignment,
    config: &SimConfig,
) -> FrameDelta {
    let radio = &config.radio;
    let bs = config.field.bs_position;
    let npl = radio.node_packet_len;
    let mut delta = FrameDelta::default();
    let nodes = &mut state.nodes;
    let ledger = &mut state.ledger;

    for &head in &assignment.heads {
        if !nodes[head].alive {
            continue;
        }
        let head_pos = nodes[head].position;
        let mut received_bits = 0u64;
        for member in assignment.members_of(head) {
            if !nodes[head].alive {
                break;
            }
            if !nodes[member].alive {
                continue;
            }
            let d = nodes[member].position.distance(&head_pos);
            delta.consumed += ledger.charge(&mut nodes[member], tx_energy(radio, npl, d));
            delta.consumed += ledger.charge(&mut nodes[head], rx_energy(radio, npl));
            received_bits += npl;
        }
        if !nodes[head].alive {
            continue;
        }
        delta.consumed += ledger.charge(
            &mut nodes[head],
            aggregation_energy(radio, received_bits + npl),
        );
        if !nodes[head].alive {
            continue;
        }
        let d_bs = head_pos.distance(&bs);
        delta.consumed += ledger.charge(&mut nodes[head], tx_energy(radio, radio.packet_len, d_bs));
        delta.packets_to_bs += 1;
    }

    for &id in &assignment.unassigned {
        if !nodes[id].alive {
            continue;
        }
        let d_bs = nodes[id].position.distance(&bs);
        delta.consumed += ledger.charge(&mut nodes[id], tx_energy(radio, npl, d_bs));
        delta.packets_to_bs += 1;
    }

    state.cumulative_packets_to_bs += delta.packets_to_bs;
    delta
}

/// Runs one full round over an already-formed assignment.
pub fn run_round_with(
    state: &mut SimulationState,
    assignment: &ClusterAssignment,
    config: &SimConfig,
) -> RoundMetrics {
    for node in &mut state.nodes {
        node.is_ch_this_round = assignment.heads.contains(&node.id);
    }
    for _ in 0..config.frames_per_round {
        steady_state_frame(state, assignment, config);
    }
    let metrics = state.metrics(state.round, assignment.heads.len());
    state.round += 1;
    metrics
}

/// Setup plus `frames_per_round` data frames. Fails if nobody is alive.
pub fn run_round(
    state: &mut SimulationState,
    config: &SimConfig,
) -> Result<RoundMetrics, SimError> {
    if state.alive_count() == 0 {
        return Err(SimError::Extinct);
    }
    let assignment = form_round(state, config);
    Ok(run_round_with(state, &assignment, config))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub per_round: Vec<RoundMetrics>,
    pub summary: Summary,
    pub config_echo: SimConfig,
    pub seed: u64,
}

/// Runs until extinction or `max_rounds` from a given starting state.
pub fn simulate(state: SimulationState, config: &SimConfig) -> SimulationResult {
    simulate_observed(state, config, |_, _| {})
}

/// [`simulate`], calling `observe` with the state after every round.
pub fn simulate_observed(
    mut state: SimulationState,
    config: &SimConfig,
    mut observe: impl FnMut(&SimulationState, &RoundMetrics),
) -> SimulationResult {
    let mut per_round = Vec::new();
    while state.round < config.max_rounds && state.alive_count() > 0 {
        let metrics = run_round(&mut state, config).expect("population checked alive");
        observe(&state, &metrics);
        per_round.push(metrics);
    }
    let summary = summarize_series(&per_round, config.node_count);
    SimulationResult {
        per_round,
        summary,
        config_echo: config.clone(),
        seed: config.seed,
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimulationResult, SimError> {
    let config = validate_config(config.clone())?;
    Ok(simulate(SimulationState::deploy(&config), &config))
}
