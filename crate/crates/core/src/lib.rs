//! Deterministic round-based simulator for LEACH and MONCH clustering in
//! wireless sensor networks.
//!
//! A run deploys `node_count` nodes uniformly on a rectangular field from a
//! seed, then repeats rounds of cluster formation followed by a fixed number
//! of data frames until every node is dead or the round limit is reached.
//! Energy is charged with a two-branch (`d²` / `d⁴`) radio model.

pub mod config_file;
pub mod energy;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod leach;
pub mod metrics;
pub mod model;
pub mod monch;
pub mod rng;

pub use config_file::{config_to_string, load_config, parse_config, ConfigFileError};
pub use energy::EnergyLedger;
pub use engine::{
    run_round, run_simulation, simulate, simulate_observed, SimulationResult, SimulationState,
};
pub use error::SimError;
pub use experiment::{run_pair, PairedRun};
pub use leach::ClusterAssignment;
pub use metrics::{RoundMetrics, Summary};
pub use model::{
    deploy_nodes, validate_config, ConfigError, FieldGeometry, Position, Protocol, RadioParams,
    SensorNode, SimConfig,
};
pub use monch::MonchPlan;
pub use rng::SimRng;
