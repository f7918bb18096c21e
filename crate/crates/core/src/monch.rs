//! MONCH cluster formation.
//!
//! Each round the head count is fixed up front from the radio constants and
//! the field geometry, heads are picked greedily by proximity to the base
//! station among energy-rich nodes, and every head takes in its nearest
//! unassigned nodes up to a fixed cluster size.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::energy::{head_unit_energy, node_unit_energy};
use crate::leach::ClusterAssignment;
use crate::model::{FieldGeometry, RadioParams, SensorNode, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonchPlan {
    pub kopt: usize,
    /// Cluster size including the head.
    pub capacity: usize,
    /// Heads in the order they were formed.
    pub head_order: Vec<usize>,
    pub assignment: ClusterAssignment,
    /// Nodes attached after all `kopt` clusters were full, with the size
    /// limit waived.
    pub leftover: Vec<usize>,
}

/// Distance of the base station from the field origin.
pub fn bs_distance(field: &FieldGeometry) -> f64 {
    field.bs_position.x.hypot(field.bs_position.y)
}

/// Diagonal of the field rectangle (the `M` term of the head count).
pub fn field_diagonal(field: &FieldGeometry) -> f64 {
    field.yard_length.hypot(field.yard_width)
}

/// Unrounded `sqrt((Eh/Ec) * 2 * pt * (M / dBS²) * N)`.
pub fn optimal_head_count_raw(
    radio: &RadioParams,
    field: &FieldGeometry,
    alive: usize,
    pt: f64,
) -> f64 {
    let ratio = head_unit_energy(radio) / node_unit_energy(radio);
    let dbs = bs_distance(field);
    let spread = field_diagonal(field) / (dbs * dbs);
    (ratio * 2.0 * pt * spread * alive as f64).sqrt()
}

/// Nearest integer (halves round up) of the raw head count, clamped to
/// `[1, alive]`.
pub fn optimal_head_count(
    radio: &RadioParams,
    field: &FieldGeometry,
    alive: usize,
    pt: f64,
) -> usize {
    let raw = optimal_head_count_raw(radio, field, alive, pt);
    let rounded = (raw + 0.5).floor();
    let rounded = if rounded.is_finite() && rounded > 0.0 {
        rounded as usize
    } else {
        1
    };
    rounded.clamp(1, alive.max(1))
}

/// `ceil(alive / kopt)`.
pub fn cluster_capacity(alive: usize, kopt: usize) -> usize {
    alive.div_ceil(kopt.max(1))
}

/// Alive nodes holding at least the mean residual energy, nearest to the
/// base station first. Equal distances prefer more energy, then lower id.
/// Falls back to ranking every alive node if the energy filter leaves none.
pub fn rank_head_candidates(nodes: &[SensorNode], field: &FieldGeometry) -> Vec<usize> {
    let alive: Vec<&SensorNode> = nodes.iter().filter(|n| n.alive).collect();
    if alive.is_empty() {
        return Vec::new();
    }
    let mean = alive.iter().map(|n| n.residual_energy).sum::<f64>() / alive.len() as f64;
    let mut pool: Vec<&SensorNode> = alive
        .iter()
        .copied()
        .filter(|n| n.residual_energy >= mean)
        .collect();
    if pool.is_empty() {
        pool = alive;
    }
    let bs = field.bs_position;
    let mut keyed: Vec<(f64, &SensorNode)> = pool
        .into_iter()
        .map(|n| (n.position.distance(&bs), n))
        .collect();
    keyed.sort_by(|(da, a), (db, b)| {
        da.total_cmp(db)
            .then_with(|| b.residual_energy.total_cmp(&a.residual_energy))
            .then_with(|| a.id.cmp(&b.id))
    });
    keyed.into_iter().map(|(_, n)| n.id).collect()
}

fn by_distance_then_id(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

/// Greedy capacity-bounded formation over the alive nodes.
///
/// Until `kopt` heads exist or no nodes remain: the top-ranked remaining
/// node becomes a head and takes its `capacity - 1` nearest remaining nodes
/// as members. Anything left over joins its nearest head regardless of size.
pub fn form_clusters(
    nodes: &[SensorNode],
    field: &FieldGeometry,
    kopt: usize,
    capacity: usize,
) -> MonchPlan {
    let mut pool: BTreeMap<usize, SensorNode> = nodes
        .iter()
        .filter(|n| n.alive)
        .map(|n| (n.id, n.clone()))
        .collect();
    let mut assignment = ClusterAssignment::default();
    let mut head_order = Vec::new();
    let member_slots = capacity.saturating_sub(1);

    while head_order.len() < kopt && !pool.is_empty() {
        let remaining: Vec<SensorNode> = pool.values().cloned().collect();
        let head = rank_head_candidates(&remaining, field)[0];
        let head_pos = pool.remove(&head).expect("ranked head is pooled").position;
        head_order.push(head);
        assignment.heads.insert(head);

        let mut near: Vec<(f64, usize)> = pool
            .values()
            .map(|n| (n.position.distance(&head_pos), n.id))
            .collect();
        near.sort_by(|a, b| by_distance_then_id(*a, *b));
        for (_, member) in near.into_iter().take(member_slots) {
            pool.remove(&member);
            assignment.membership.insert(member, head);
        }
    }

    let mut leftover = Vec::new();
    if !head_order.is_empty() {
        let head_positions: Vec<(usize, _)> = assignment
            .heads
            .iter()
            .map(|h| (*h, nodes.iter().find(|n| n.id == *h).unwrap().position))
            .collect();
        for (id, node) in pool {
            let (head, _) = head_positions
                .iter()
                .map(|(h, p)| (*h, node.position.distance(p)))
                .min_by(|a, b| by_distance_then_id((a.1, a.0), (b.1, b.0)))
                .expect("at least one head");
            assignment.membership.insert(id, head);
            leftover.push(id);
        }
    }

    MonchPlan {
        kopt,
        capacity,
        head_order,
        assignment,
        leftover,
    }
}

/// Full per-round formation from the current alive population.
pub fn plan_round(nodes: &[SensorNode], config: &SimConfig) -> MonchPlan {
    let alive = nodes.iter().filter(|n| n.alive).count();
    let kopt = optimal_head_count(&config.radio, &config.field, alive, config.pt);
    let capacity = cluster_capacity(alive, kopt);
    form_clusters(nodes, &config.field, kopt, capacity)
}
