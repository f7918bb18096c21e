//! Shared domain types, configuration validation and node deployment.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SimRng;

/// A point on the sensor field, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGeometry {
    pub yard_length: f64,
    pub yard_width: f64,
    pub bs_position: Position,
}

impl Default for FieldGeometry {
    fn default() -> Self {
        Self {
            yard_length: 100.0,
            yard_width: 100.0,
            bs_position: Position::new(50.0, 100.0),
        }
    }
}

/// Radio energy constants, in SI units (joules per bit, J/bit/m², J/bit/m⁴).
///
/// `e_amp` multiplies `d²` (short range) and `e_fs` multiplies `d⁴`
/// (long range). That is the reverse of the naming used by most first-order
/// radio write-ups, but it is how the two-branch model below pairs them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmit/receive electronics, J/bit.
    pub e_elec: f64,
    /// Data aggregation, J/bit.
    pub e_da: f64,
    /// Amplifier for the `d²` branch, J/bit/m².
    pub e_amp: f64,
    /// Amplifier for the `d⁴` branch, J/bit/m⁴.
    pub e_fs: f64,
    /// Aggregated head → BS packet, bits.
    pub packet_len: u64,
    /// Member → head packet, bits.
    pub node_packet_len: u64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            e_da: 5e-9,
            e_amp: 100e-12,
            e_fs: 0.013e-12,
            packet_len: 6400,
            node_packet_len: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Leach,
    Monch,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Leach => "leach",
            Protocol::Monch => "monch",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Protocol {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "leach" => Ok(Protocol::Leach),
            "monch" => Ok(Protocol::Monch),
            _ => Err(ConfigError::UnknownProtocol(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub node_count: usize,
    pub field: FieldGeometry,
    pub radio: RadioParams,
    /// Joules per node at deployment.
    pub initial_energy: f64,
    pub protocol: Protocol,
    /// LEACH's desired head fraction `p`.
    pub ch_probability: f64,
    pub frames_per_round: u32,
    pub max_rounds: u32,
    pub seed: u64,
    /// Dimensionless constant in the optimal head count formula.
    pub pt: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            field: FieldGeometry::default(),
            radio: RadioParams::default(),
            initial_energy: 2.0,
            protocol: Protocol::Leach,
            ch_probability: 0.05,
            frames_per_round: 4,
            max_rounds: 20_000,
            seed: 1,
            pt: std::f64::consts::PI,
        }
    }
}

impl SimConfig {
    pub fn with_protocol(&self, protocol: Protocol) -> Self {
        Self {
            protocol,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("nonpositive node count")]
    NonpositiveNodeCount,
    #[error("nonpositive yard")]
    NonpositiveYard,
    #[error("nonfinite bs position")]
    NonfiniteBs,
    #[error("bs at origin")]
    BsAtOrigin,
    #[error("nonpositive radio energy: {0}")]
    NonpositiveRadioEnergy(&'static str),
    #[error("nonpositive packet length: {0}")]
    NonpositivePacketLength(&'static str),
    #[error("nonpositive initial energy")]
    NonpositiveInitialEnergy,
    #[error("ch probability outside (0, 1)")]
    ChProbabilityOutOfRange,
    #[error("frames per round below 1")]
    NoFrames,
    #[error("nonpositive max rounds")]
    NonpositiveMaxRounds,
    #[error("nonpositive pt")]
    NonpositivePt,
    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),
}

/// Returns the config unchanged if every invariant holds, otherwise the
/// first violated one.
pub fn validate_config(config: SimConfig) -> Result<SimConfig, ConfigError> {
    if config.node_count == 0 {
        return Err(ConfigError::NonpositiveNodeCount);
    }
    let field = &config.field;
    if !(field.yard_length > 0.0 && field.yard_width > 0.0)
        || !field.yard_length.is_finite()
        || !field.yard_width.is_finite()
    {
        return Err(ConfigError::NonpositiveYard);
    }
    if !field.bs_position.is_finite() {
        return Err(ConfigError::NonfiniteBs);
    }
    if field.bs_position.x == 0.0 && field.bs_position.y == 0.0 {
        return Err(ConfigError::BsAtOrigin);
    }
    let radio = &config.radio;
    for (name, value) in [
        ("e_elec", radio.e_elec),
        ("e_da", radio.e_da),
        ("e_amp", radio.e_amp),
        ("e_fs", radio.e_fs),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ConfigError::NonpositiveRadioEnergy(name));
        }
    }
    if radio.packet_len == 0 {
        return Err(ConfigError::NonpositivePacketLength("packet_len"));
    }
    if radio.node_packet_len == 0 {
        return Err(ConfigError::NonpositivePacketLength("node_packet_len"));
    }
    if !(config.initial_energy > 0.0 && config.initial_energy.is_finite()) {
        return Err(ConfigError::NonpositiveInitialEnergy);
    }
    if !(config.ch_probability > 0.0 && config.ch_probability < 1.0) {
        return Err(ConfigError::ChProbabilityOutOfRange);
    }
    if config.frames_per_round == 0 {
        return Err(ConfigError::NoFrames);
    }
    if config.max_rounds == 0 {
        return Err(ConfigError::NonpositiveMaxRounds);
    }
    if !(config.pt > 0.0 && config.pt.is_finite()) {
        return Err(ConfigError::NonpositivePt);
    }
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorNode {
    pub id: usize,
    pub position: Position,
    pub residual_energy: f64,
    pub alive: bool,
    /// LEACH rotation epoch in which this node last served as head.
    pub last_ch_epoch: Option<u32>,
    pub is_ch_this_round: bool,
}

impl SensorNode {
    pub fn new(id: usize, position: Position, energy: f64) -> Self {
        Self {
            id,
            position,
            residual_energy: energy,
            alive: energy > 0.0,
            last_ch_epoch: None,
            is_ch_this_round: false,
        }
    }
}

/// Places `node_count` nodes uniformly on the field. Each node consumes two
/// draws (x then y) in id order.
pub fn deploy_nodes(config: &SimConfig, rng: &mut SimRng) -> Vec<SensorNode> {
    (0..config.node_count)
        .map(|id| {
            let x = rng.uniform_to(config.field.yard_length);
            let y = rng.uniform_to(config.field.yard_width);
            SensorNode::new(id, Position::new(x, y), config.initial_energy)
        })
        .collect()
}
