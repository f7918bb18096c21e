//! Paired LEACH vs MONCH runs on a shared deployment, and seed sweeps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{simulate_observed, SimulationResult, SimulationState};
use crate::error::SimError;
use crate::metrics::{RoundMetrics, Summary};
use crate::model::{validate_config, Position, Protocol, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRun {
    pub seed: u64,
    /// Node positions both protocols started from, in id order.
    pub deployment: Vec<Position>,
    pub leach: SimulationResult,
    pub monch: SimulationResult,
}

impl PairedRun {
    /// Last round index present in both runs, if either ran at all.
    pub fn final_common_round(&self) -> Option<u32> {
        let n = self.leach.per_round.len().min(self.monch.per_round.len());
        n.checked_sub(1).map(|i| i as u32)
    }

    /// Cumulative packets to the BS at the final common round, (LEACH, MONCH).
    pub fn packets_at_common_round(&self) -> (u64, u64) {
        match self.final_common_round() {
            Some(r) => (
                self.leach.per_round[r as usize].cumulative_packets_to_bs,
                self.monch.per_round[r as usize].cumulative_packets_to_bs,
            ),
            None => (0, 0),
        }
    }

    pub fn row(&self) -> ComparisonRow {
        let (leach_common, monch_common) = self.packets_at_common_round();
        ComparisonRow {
            label: self.seed.to_string(),
            leach: self.leach.summary,
            monch: self.monch.summary,
            common_round: self.final_common_round(),
            leach_packets_at_common: leach_common,
            monch_packets_at_common: monch_common,
        }
    }
}

/// Deploys once from `seed` and runs both protocols from that same state.
/// The protocol field of `config` is ignored.
pub fn run_pair(config: &SimConfig, seed: u64) -> Result<PairedRun, SimError> {
    run_pair_observed(config, seed, |_, _, _| {})
}

/// [`run_pair`], calling `observe` after every round of either protocol.
pub fn run_pair_observed(
    config: &SimConfig,
    seed: u64,
    mut observe: impl FnMut(Protocol, &SimulationState, &RoundMetrics),
) -> Result<PairedRun, SimError> {
    let config = validate_config(config.with_seed(seed))?;
    let state = SimulationState::deploy(&config);
    let deployment = state.nodes.iter().map(|n| n.position).collect();
    let leach = simulate_observed(
        state.clone(),
        &config.with_protocol(Protocol::Leach),
        |s, m| observe(Protocol::Leach, s, m),
    );
    let monch = simulate_observed(state, &config.with_protocol(Protocol::Monch), |s, m| {
        observe(Protocol::Monch, s, m)
    });
    Ok(PairedRun {
        seed,
        deployment,
        leach,
        monch,
    })
}

/// `count` consecutive seeds starting at `base` (wrapping).
pub fn sweep_seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

/// One line of the side-by-side table. Per-seed rows are labelled with the
/// seed; the aggregate row holds medians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub leach: Summary,
    pub monch: Summary,
    pub common_round: Option<u32>,
    pub leach_packets_at_common: u64,
    pub monch_packets_at_common: u64,
}

/// Median of the present values; mean of the middle two for even counts.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

fn median_round(values: impl Iterator<Item = Option<u32>>) -> Option<u32> {
    median(values.flatten().map(f64::from)).map(|m| m.round() as u32)
}

fn median_summary(summaries: &[Summary]) -> Summary {
    Summary {
        first_node_death_round: median_round(summaries.iter().map(|s| s.first_node_death_round)),
        half_nodes_death_round: median_round(summaries.iter().map(|s| s.half_nodes_death_round)),
        last_node_death_round: median_round(summaries.iter().map(|s| s.last_node_death_round)),
        total_packets_to_bs: median(summaries.iter().map(|s| s.total_packets_to_bs as f64))
            .unwrap_or(0.0)
            .round() as u64,
        rounds_executed: median(summaries.iter().map(|s| s.rounds_executed as f64))
            .unwrap_or(0.0)
            .round() as u32,
    }
}

/// Per-seed rows, followed by a `median` row when there is more than one
/// pair.
pub fn comparison_rows(pairs: &[PairedRun]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = pairs.iter().map(PairedRun::row).collect();
    if pairs.len() > 1 {
        let leach: Vec<Summary> = rows.iter().map(|r| r.leach).collect();
        let monch: Vec<Summary> = rows.iter().map(|r| r.monch).collect();
        let med = |f: fn(&ComparisonRow) -> f64| median(rows.iter().map(f)).unwrap_or(0.0);
        rows.push(ComparisonRow {
            label: "median".into(),
            leach: median_summary(&leach),
            monch: median_summary(&monch),
            common_round: median_round(rows.iter().map(|r| r.common_round)),
            leach_packets_at_common: med(|r| r.leach_packets_at_common as f64).round() as u64,
            monch_packets_at_common: med(|r| r.monch_packets_at_common as f64).round() as u64,
        });
    }
    rows
}

pub const COMPARISON_HEADER: &str = "seed,leach_fnd,monch_fnd,leach_hnd,monch_hnd,leach_lnd,monch_lnd,leach_packets,monch_packets,common_round,leach_packets_common,monch_packets_common";

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| "-".to_string(), |r| r.to_string())
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.label,
            opt(r.leach.first_node_death_round),
            opt(r.monch.first_node_death_round),
            opt(r.leach.half_nodes_death_round),
            opt(r.monch.half_nodes_death_round),
            opt(r.leach.last_node_death_round),
            opt(r.monch.last_node_death_round),
            r.leach.total_packets_to_bs,
            r.monch.total_packets_to_bs,
            opt(r.common_round),
            r.leach_packets_at_common,
            r.monch_packets_at_common,
        )
        .unwrap();
    }
    out
}

/// Fixed-width table for terminal output.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>10} | {:>13} | {:>13} | {:>13} | {:>15}",
        "seed", "FND L/M", "HND L/M", "LND L/M", "packets L/M"
    )
    .unwrap();
    writeln!(out, "{}", "-".repeat(75)).unwrap();
    for r in rows {
        let pair = |a: Option<u32>, b: Option<u32>| format!("{}/{}", opt(a), opt(b));
        writeln!(
            out,
            "{:>10} | {:>13} | {:>13} | {:>13} | {:>15}",
            r.label,
            pair(
                r.leach.first_node_death_round,
                r.monch.first_node_death_round
            ),
            pair(
                r.leach.half_nodes_death_round,
                r.monch.half_nodes_death_round
            ),
            pair(r.leach.last_node_death_round, r.monch.last_node_death_round),
            format!(
                "{}/{}",
                r.leach.total_packets_to_bs, r.monch.total_packets_to_bs
            ),
        )
        .unwrap();
    }
    out
}
