//! LEACH baseline: randomized rotating head election and nearest-head joining.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::SensorNode;
use crate::rng::SimRng;

/// One round's cluster structure over the alive population.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub heads: BTreeSet<usize>,
    /// member id → head id
    pub membership: BTreeMap<usize, usize>,
    /// Alive non-heads with no head to join (only when `heads` is empty).
    pub unassigned: BTreeSet<usize>,
}

impl ClusterAssignment {
    /// Members of `head` in ascending id order.
    pub fn members_of(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .filter(move |(_, &h)| h == head)
            .map(|(&m, _)| m)
    }

    pub fn member_count(&self, head: usize) -> usize {
        self.members_of(head).count()
    }

    /// Checks the structural invariants against the alive ids. Returns a
    /// description of the first violation.
    pub fn check(&self, alive_ids: &BTreeSet<usize>) -> Result<(), String> {
        for m in self.membership.keys() {
            if self.heads.contains(m) {
                return Err(format!("node {m} is both head and member"));
            }
        }
        for (m, h) in &self.membership {
            if !self.heads.contains(h) {
                return Err(format!("member {m} points at non-head {h}"));
            }
        }
        if !self.unassigned.is_empty() && !self.heads.is_empty() {
            return Err("unassigned nodes while heads exist".into());
        }
        let mut covered = BTreeSet::new();
        for id in self
            .heads
            .iter()
            .chain(self.membership.keys())
            .chain(self.unassigned.iter())
        {
            if !covered.insert(*id) {
                return Err(format!("node {id} covered twice"));
            }
        }
        if &covered != alive_ids {
            return Err("coverage differs from alive set".into());
        }
        Ok(())
    }
}

/// Rotation epoch length `floor(1/p)`, at least 1.
pub fn epoch_length(p: f64) -> u32 {
    // Guard against 1/p landing just under an integer (e.g. p = 0.05).
    (((1.0 / p) * (1.0 + 1e-12)).floor() as u32).max(1)
}

/// Classical LEACH threshold `p / (1 - p * (round mod floor(1/p)))`, or 0
/// for nodes that already served within the last epoch.
pub fn election_threshold(p: f64, round: u32, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let phase = (round % epoch_length(p)) as f64;
    (p / (1.0 - p * phase)).min(1.0)
}

/// Draws one uniform per alive node (id order) and elects those below their
/// threshold. Rounds are grouped into epochs of `floor(1/p)`; a node that
/// served earlier in the current epoch is ineligible until the next one.
pub fn elect_heads(
    nodes: &mut [SensorNode],
    p: f64,
    round: u32,
    rng: &mut SimRng,
) -> BTreeSet<usize> {
    let epoch = round / epoch_length(p);
    let mut heads = BTreeSet::new();
    for node in nodes.iter_mut().filter(|n| n.alive) {
        let eligible = node.last_ch_epoch != Some(epoch);
        let draw = rng.uniform();
        if draw < election_threshold(p, round, eligible) {
            node.last_ch_epoch = Some(epoch);
            heads.insert(node.id);
        }
    }
    heads
}

/// Every alive non-head joins its nearest head; equal distances go to the
/// lower head id.
pub fn join_nearest(nodes: &[SensorNode], heads: &BTreeSet<usize>) -> ClusterAssignment {
    let head_positions: Vec<_> = nodes
        .iter()
        .filter(|n| n.alive && heads.contains(&n.id))
        .map(|n| (n.id, n.position))
        .collect::<BTreeMap<_, _>>()
        .into_iter()
        .collect();

    let mut assignment = ClusterAssignment {
        heads: head_positions.iter().map(|(id, _)| *id).collect(),
        ..Default::default()
    };
    for node in nodes.iter().filter(|n| n.alive && !heads.contains(&n.id)) {
        let mut best: Option<(usize, f64)> = None;
        for (head, pos) in &head_positions {
            let d = node.position.distance(pos);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((*head, d));
            }
        }
        match best {
            Some((head, _)) => {
                assignment.membership.insert(node.id, head);
            }
            None => {
                assignment.unassigned.insert(node.id);
            }
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Position;

    fn node(id: usize, x: f64, y: f64) -> SensorNode {
        SensorNode::new(id, Position::new(x, y), 2.0)
    }

    fn alive_ids(nodes: &[SensorNode]) -> BTreeSet<usize> {
        nodes.iter().filter(|n| n.alive).map(|n| n.id).collect()
    }

    #[test]
    fn threshold_values() {
        assert!((election_threshold(0.05, 0, true) - 0.05).abs() < 1e-15);
        assert!((election_threshold(0.05, 19, true) - 1.0).abs() < 1e-12);
        assert!((election_threshold(0.05, 20, true) - 0.05).abs() < 1e-15);
        assert_eq!(election_threshold(0.05, 7, false), 0.0);
        assert_eq!(election_threshold(0.3, 2, false), 0.0);
    }

    #[test]
    fn epoch_lengths() {
        assert_eq!(epoch_length(0.05), 20);
        assert_eq!(epoch_length(0.1), 10);
        assert_eq!(epoch_length(0.3), 3);
        assert_eq!(epoch_length(0.999), 1);
    }

    #[test]
    fn ineligible_nodes_never_elected() {
        let mut nodes: Vec<_> = (0..50).map(|i| node(i, i as f64, 0.0)).collect();
        for n in &mut nodes {
            n.last_ch_epoch = Some(0);
        }
        let mut rng = SimRng::new(5);
        assert!(elect_heads(&mut nodes, 0.05, 19, &mut rng).is_empty());
        // a new epoch restores eligibility
        assert!(!elect_heads(&mut nodes, 0.5, 2, &mut rng).is_empty());
    }

    #[test]
    fn epoch_end_elects_every_remaining_node() {
        let mut nodes: Vec<_> = (0..30).map(|i| node(i, 0.0, 0.0)).collect();
        for n in nodes.iter_mut().take(20) {
            n.last_ch_epoch = Some(0);
        }
        let heads = elect_heads(&mut nodes, 0.05, 19, &mut SimRng::new(8));
        assert_eq!(heads, (20..30).collect());
    }

    #[test]
    fn election_is_deterministic() {
        let base: Vec<_> = (0..100).map(|i| node(i, 0.0, 0.0)).collect();
        let mut a = base.clone();
        let mut b = base;
        let ha = elect_heads(&mut a, 0.05, 0, &mut SimRng::new(77));
        let hb = elect_heads(&mut b, 0.05, 0, &mut SimRng::new(77));
        assert_eq!(ha, hb);
        assert_eq!(a, b);
    }

    #[test]
    fn mean_head_count_near_expectation() {
        let base: Vec<_> = (0..100).map(|i| node(i, 0.0, 0.0)).collect();
        let trials = 1000;
        let total: usize = (0..trials)
            .map(|seed| {
                let mut nodes = base.clone();
                elect_heads(&mut nodes, 0.05, 0, &mut SimRng::new(seed)).len()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((4.0..=6.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn once_per_epoch() {
        let mut nodes: Vec<_> = (0..40).map(|i| node(i, 0.0, 0.0)).collect();
        let mut rng = SimRng::new(123);
        let p = 0.1;
        let len = epoch_length(p);
        for epoch in 0..20 {
            let mut seen = BTreeSet::new();
            for round in epoch * len..(epoch + 1) * len {
                for h in elect_heads(&mut nodes, p, round, &mut rng) {
                    assert!(seen.insert(h), "node {h} twice in epoch {epoch}");
                }
            }
            // T reaches 1 in the last round, so everyone serves exactly once
            assert_eq!(seen.len(), 40);
        }
    }

    #[test]
    fn single_head_takes_everyone() {
        let nodes: Vec<_> = (0..6).map(|i| node(i, i as f64 * 7.0, 3.0)).collect();
        let heads = BTreeSet::from([2]);
        let a = join_nearest(&nodes, &heads);
        assert_eq!(a.membership.len(), 5);
        assert!(a.membership.values().all(|&h| h == 2));
        a.check(&alive_ids(&nodes)).unwrap();
    }

    #[test]
    fn equidistant_goes_to_lower_id() {
        let mut nodes: Vec<_> = (0..8).map(|i| node(i, 500.0, 500.0)).collect();
        nodes[3].position = Position::new(0.0, 0.0);
        nodes[7].position = Position::new(10.0, 0.0);
        nodes[5].position = Position::new(5.0, 4.0);
        let a = join_nearest(&nodes, &BTreeSet::from([7, 3]));
        assert_eq!(a.membership[&5], 3);
    }

    #[test]
    fn no_heads_means_unassigned() {
        let nodes: Vec<_> = (0..4).map(|i| node(i, i as f64, 0.0)).collect();
        let a = join_nearest(&nodes, &BTreeSet::new());
        assert_eq!(a.unassigned.len(), 4);
        a.check(&alive_ids(&nodes)).unwrap();
    }

    #[test]
    fn dead_nodes_are_skipped() {
        let mut nodes: Vec<_> = (0..5).map(|i| node(i, i as f64, 0.0)).collect();
        nodes[4].alive = false;
        nodes[4].residual_energy = 0.0;
        let a = join_nearest(&nodes, &BTreeSet::from([0]));
        assert!(!a.membership.contains_key(&4));
        a.check(&alive_ids(&nodes)).unwrap();
    }

    #[test]
    fn dead_nodes_draw_nothing() {
        let mut nodes: Vec<_> = (0..3).map(|i| node(i, 0.0, 0.0)).collect();
        for n in &mut nodes {
            n.alive = false;
        }
        let mut rng = SimRng::new(1);
        let before = rng.clone().next_u64();
        assert!(elect_heads(&mut nodes, 0.5, 0, &mut rng).is_empty());
        assert_eq!(rng.next_u64(), before);
    }
}
