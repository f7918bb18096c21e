//! Flat key-value config files (TOML syntax).
//!
//! ```toml
//! node_count = 100
//! protocol = "monch"
//! bs_x = 50.0
//! bs_y = 100.0
//! ```
//!
//! Omitted keys take the defaults of [`SimConfig::default`]; unknown keys
//! are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_config, ConfigError, FieldGeometry, Position, RadioParams, SimConfig};

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(#[from] ConfigError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    node_count: usize,
    yard_length: f64,
    yard_width: f64,
    bs_x: f64,
    bs_y: f64,
    e_elec: f64,
    e_da: f64,
    e_amp: f64,
    e_fs: f64,
    packet_len: u64,
    node_packet_len: u64,
    initial_energy: f64,
    protocol: String,
    ch_probability: f64,
    frames_per_round: u32,
    max_rounds: u32,
    seed: u64,
    pt: f64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile::from(&SimConfig::default())
    }
}

impl From<&SimConfig> for ConfigFile {
    fn from(c: &SimConfig) -> Self {
        Self {
            node_count: c.node_count,
            yard_length: c.field.yard_length,
            yard_width: c.field.yard_width,
            bs_x: c.field.bs_position.x,
            bs_y: c.field.bs_position.y,
            e_elec: c.radio.e_elec,
            e_da: c.radio.e_da,
            e_amp: c.radio.e_amp,
            e_fs: c.radio.e_fs,
            packet_len: c.radio.packet_len,
            node_packet_len: c.radio.node_packet_len,
            initial_energy: c.initial_energy,
            protocol: c.protocol.name().to_string(),
            ch_probability: c.ch_probability,
            frames_per_round: c.frames_per_round,
            max_rounds: c.max_rounds,
            seed: c.seed,
            pt: c.pt,
        }
    }
}

impl TryFrom<ConfigFile> for SimConfig {
    type Error = ConfigError;

    fn try_from(f: ConfigFile) -> Result<Self, Self::Error> {
        Ok(SimConfig {
            node_count: f.node_count,
            field: FieldGeometry {
                yard_length: f.yard_length,
                yard_width: f.yard_width,
                bs_position: Position::new(f.bs_x, f.bs_y),
            },
            radio: RadioParams {
                e_elec: f.e_elec,
                e_da: f.e_da,
                e_amp: f.e_amp,
                e_fs: f.e_fs,
                packet_len: f.packet_len,
                node_packet_len: f.node_packet_len,
            },
            initial_energy: f.initial_energy,
            protocol: f.protocol.parse()?,
            ch_probability: f.ch_probability,
            frames_per_round: f.frames_per_round,
            max_rounds: f.max_rounds,
            seed: f.seed,
            pt: f.pt,
        })
    }
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigFileError> {
    let raw: ConfigFile = toml::from_str(text)?;
    let config = SimConfig::try_from(raw)?;
    Ok(validate_config(config)?)
}

pub fn load_config(path: &Path) -> Result<SimConfig, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Renders a config with every key present.
pub fn config_to_string(config: &SimConfig) -> String {
    toml::to_string(&ConfigFile::from(config)).expect("flat config always serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Protocol;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(parse_config("").unwrap(), SimConfig::default());
    }

    #[test]
    fn full_file_round_trips() {
        let cfg = SimConfig {
            protocol: Protocol::Monch,
            seed: 12345678901234,
            max_rounds: 77,
            ..SimConfig::default()
        };
        let text = config_to_string(&cfg);
        for key in [
            "node_count",
            "yard_length",
            "yard_width",
            "bs_x",
            "bs_y",
            "e_elec",
            "e_da",
            "e_amp",
            "e_fs",
            "packet_len",
            "node_packet_len",
            "initial_energy",
            "protocol",
            "ch_probability",
            "frames_per_round",
            "max_rounds",
            "seed",
            "pt",
        ] {
            assert!(text.contains(&format!("{key} = ")), "missing {key}");
        }
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("node_count = 10\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ConfigFileError::Parse(_)));
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn invalid_values_rejected() {
        let err = parse_config("bs_x = 0.0\nbs_y = 0.0\n").unwrap_err();
        assert!(matches!(
            err,
            ConfigFileError::Invalid(ConfigError::BsAtOrigin)
        ));
        let err = parse_config("protocol = \"spin\"\n").unwrap_err();
        assert!(matches!(
            err,
            ConfigFileError::Invalid(ConfigError::UnknownProtocol(_))
        ));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_config(Path::new("/nonexistent/cfg.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/cfg.toml"));
    }
}
