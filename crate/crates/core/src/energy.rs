//! Two-branch radio dissipation model plus the per-unit head/node energies
//! that feed the optimal head count.

use serde::{Deserialize, Serialize};

use crate::model::{RadioParams, SensorNode};

/// Crossover distance `sqrt(e_amp / e_fs)` between the `d²` and `d⁴` branches.
pub fn distance_threshold(radio: &RadioParams) -> f64 {
    (radio.e_amp / radio.e_fs).sqrt()
}

/// Energy to transmit `bits` over `distance` meters. `distance == threshold`
/// takes the `d⁴` branch; both branches agree there.
pub fn tx_energy(radio: &RadioParams, bits: u64, distance: f64) -> f64 {
    let k = bits as f64;
    let electronics = radio.e_elec * k;
    if distance < distance_threshold(radio) {
        electronics + radio.e_amp * k * distance * distance
    } else {
        let d2 = distance * distance;
        electronics + radio.e_fs * k * d2 * d2
    }
}

pub fn rx_energy(radio: &RadioParams, bits: u64) -> f64 {
    radio.e_elec * bits as f64
}

pub fn aggregation_energy(radio: &RadioParams, bits: u64) -> f64 {
    radio.e_da * bits as f64
}

/// Head-side unit energy used only by the head count formula. The `e_fs`
/// term carries no distance factor; it is kept as written.
pub fn head_unit_energy(radio: &RadioParams) -> f64 {
    let packet = radio.packet_len as f64;
    (radio.e_elec + radio.e_da) * packet + radio.e_fs * packet
}

/// Member-side unit energy used only by the head count formula.
pub fn node_unit_energy(radio: &RadioParams) -> f64 {
    radio.e_elec * radio.node_packet_len as f64 + radio.e_fs * radio.packet_len as f64
}

/// Running account of energy drawn from node batteries.
///
/// Charges are capped at what a node still holds. The uncovered remainder of
/// the final, fatal charge is tracked as `overdraft` and never enters
/// `total_consumed`, so residual + consumed stays equal to the deployed total.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub total_consumed: f64,
    pub per_node_consumed: Vec<f64>,
    pub overdraft: f64,
}

impl EnergyLedger {
    pub fn new(node_count: usize) -> Self {
        Self {
            total_consumed: 0.0,
            per_node_consumed: vec![0.0; node_count],
            overdraft: 0.0,
        }
    }

    /// Draws `cost` from `node`, marking it dead when its battery hits zero.
    /// Returns the energy actually drawn.
    pub fn charge(&mut self, node: &mut SensorNode, cost: f64) -> f64 {
        debug_assert!(node.alive, "charging dead node {}", node.id);
        debug_assert!(cost >= 0.0);
        let drawn = cost.min(node.residual_energy);
        node.residual_energy -= drawn;
        if node.residual_energy <= 0.0 {
            node.residual_energy = 0.0;
            node.alive = false;
        }
        self.per_node_consumed[node.id] += drawn;
        self.total_consumed += drawn;
        self.overdraft += cost - drawn;
        drawn
    }

    pub fn recomputed_total(&self) -> f64 {
        self.per_node_consumed.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Position;

    fn reference() -> RadioParams {
        RadioParams::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn threshold_reference_value() {
        // sqrt(100 / 0.013) evaluated independently: 87.70580193070292
        let d0 = distance_threshold(&reference());
        assert!(rel(d0, 87.705_801_930_702_92) < 1e-12, "{d0}");
    }

    #[test]
    fn threshold_trivial_ratios() {
        let mut r = reference();
        r.e_amp = r.e_fs;
        assert_eq!(distance_threshold(&r), 1.0);
        r.e_amp = 4.0 * r.e_fs;
        assert_eq!(distance_threshold(&r), 2.0);
    }

    #[test]
    fn tx_point_values() {
        let r = reference();
        assert!(rel(tx_energy(&r, 200, 50.0), 6.0e-5) < 1e-12);
        assert!(rel(tx_energy(&r, 200, 100.0), 2.7e-4) < 1e-12);
        assert_eq!(tx_energy(&r, 0, 0.0), 0.0);
        assert_eq!(tx_energy(&r, 0, 500.0), 0.0);
    }

    #[test]
    fn tx_continuous_at_threshold() {
        let r = reference();
        let d0 = distance_threshold(&r);
        let k = 6400.0;
        let near = r.e_amp * k * d0 * d0;
        let far = r.e_fs * k * d0.powi(4);
        assert!(rel(near, far) <= 1e-15, "{near} vs {far}");
        let below = tx_energy(&r, 6400, d0 * (1.0 - 1e-12));
        let at = tx_energy(&r, 6400, d0);
        assert!(rel(below, at) < 1e-10);
    }

    #[test]
    fn rx_and_aggregation_values() {
        let r = reference();
        assert!(rel(rx_energy(&r, 6400), 3.2e-4) < 1e-12);
        assert_eq!(rx_energy(&r, 0), 0.0);
        assert!(rel(rx_energy(&r, 1), 5.0e-8) < 1e-12);
        assert!(rel(aggregation_energy(&r, 6400), 3.2e-5) < 1e-12);
        assert_eq!(aggregation_energy(&r, 0), 0.0);
        assert!(rel(aggregation_energy(&r, 200), 1.0e-6) < 1e-12);
    }

    #[test]
    fn unit_energies() {
        let r = reference();
        // (50e-9 + 5e-9) * 6400 + 0.013e-12 * 6400
        let eh = 3.52e-4 + 8.32e-11;
        // 50e-9 * 200 + 0.013e-12 * 6400
        let ec = 1.0e-5 + 8.32e-11;
        assert!(rel(head_unit_energy(&r), eh) < 1e-12);
        assert!(rel(node_unit_energy(&r), ec) < 1e-12);
        assert!((head_unit_energy(&r) / node_unit_energy(&r) - 35.2).abs() < 1e-3);

        let mut z = r;
        z.e_da = 0.0;
        z.e_fs = 0.0;
        assert!(rel(head_unit_energy(&z), 3.2e-4) < 1e-12);
        z.node_packet_len = 0;
        assert_eq!(node_unit_energy(&z), 0.0);

        let mut doubled = r;
        doubled.packet_len *= 2;
        assert_eq!(head_unit_energy(&doubled), 2.0 * head_unit_energy(&r));
    }

    #[test]
    fn ledger_caps_and_kills() {
        let mut ledger = EnergyLedger::new(2);
        let mut node = SensorNode::new(1, Position::new(0.0, 0.0), 1.0e-4);
        assert_eq!(ledger.charge(&mut node, 4.0e-5), 4.0e-5);
        assert!(node.alive);
        let drawn = ledger.charge(&mut node, 1.0e-4);
        assert!(!node.alive);
        assert_eq!(node.residual_energy, 0.0);
        assert!(rel(drawn, 6.0e-5) < 1e-12);
        assert!(rel(ledger.total_consumed, 1.0e-4) < 1e-12);
        assert!(rel(ledger.overdraft, 4.0e-5) < 1e-9);
        assert_eq!(ledger.per_node_consumed[0], 0.0);
    }

    #[test]
    fn exact_cost_kills() {
        let mut ledger = EnergyLedger::new(1);
        let cost = tx_energy(&reference(), 200, 30.0);
        let mut node = SensorNode::new(0, Position::new(0.0, 0.0), cost);
        ledger.charge(&mut node, cost);
        assert!(!node.alive);
        assert_eq!(ledger.overdraft, 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tx_monotone(bits in 0u64..20_000, extra in 0u64..1000, d in 0.0f64..300.0, dd in 0.0f64..50.0) {
                let r = RadioParams::default();
                prop_assert!(tx_energy(&r, bits, d) <= tx_energy(&r, bits + extra, d));
                prop_assert!(tx_energy(&r, bits, d) <= tx_energy(&r, bits, d + dd) * (1.0 + 1e-12));
            }

            #[test]
            fn tx_at_least_rx(bits in 0u64..20_000, d in 0.0f64..300.0) {
                let r = RadioParams::default();
                prop_assert!(tx_energy(&r, bits, d) >= rx_energy(&r, bits));
            }

            #[test]
            fn ledger_sum_matches(costs in proptest::collection::vec((0usize..5, 0.0f64..1e-3), 0..200)) {
                let mut ledger = EnergyLedger::new(5);
                let mut nodes: Vec<SensorNode> =
                    (0..5).map(|i| SensorNode::new(i, Position::new(0.0, 0.0), 0.02)).collect();
                for (id, cost) in costs {
                    if nodes[id].alive {
                        ledger.charge(&mut nodes[id], cost);
                    }
                }
                let total = ledger.recomputed_total();
                prop_assert!((ledger.total_consumed - total).abs() <= 1e-12 * total.max(1e-300));
                let residual: f64 = nodes.iter().map(|n| n.residual_energy).sum();
                prop_assert!(((residual + ledger.total_consumed) - 0.1).abs() <= 1e-9 * 0.1);
            }
        }
    }
}
