//! Versioned file of fitted and configured constants.
//!
//! Every entry carries a free-text `source` describing how its value was
//! obtained. The crate ships a default file (`data/constants.toml`); a
//! different file can be loaded with [`Constants::from_path`].

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_CONSTANTS: &str = include_str!("../data/constants.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default)]
    pub source: String,
}

impl Entry {
    pub fn new(value: f64, source: impl Into<String>) -> Self {
        Entry { value: Some(value), source: source.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub version: u32,
    pub lattice_constant: f64,
    /// Finite-mirror reflectance constant `C_R(d)`.
    pub c_r: Entry,
    /// Storage constant `C_s(d)`; falls back to `c_r` when unset.
    pub c_s: Entry,
    /// Switch-error prefactor `C(d)`.
    pub c_switch: Entry,
    /// Optimal-waist constant `C_ε(d)`.
    pub c_eps: Entry,
    /// `C₆ = C₀ n¹¹` prefactor in Hz·μm⁶.
    pub c0: Entry,
}

impl Default for Constants {
    fn default() -> Self {
        Constants::from_toml(DEFAULT_CONSTANTS).expect("embedded constants file is valid")
    }
}

impl Constants {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Constants(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Constants(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("constants serialize")
    }

    pub fn c_r(&self) -> Result<f64> {
        self.c_r.value.ok_or(Error::MissingConstant("c_r"))
    }

    pub fn c_s(&self) -> Result<f64> {
        match self.c_s.value {
            Some(v) => Ok(v),
            None => self.c_r(),
        }
    }

    pub fn c_switch(&self) -> Result<f64> {
        self.c_switch.value.ok_or(Error::MissingConstant("c_switch"))
    }

    pub fn c_eps(&self) -> Result<f64> {
        self.c_eps.value.ok_or(Error::MissingConstant("c_eps"))
    }

    pub fn c0(&self) -> Result<f64> {
        self.c0.value.ok_or(Error::MissingConstant("c0"))
    }
}
