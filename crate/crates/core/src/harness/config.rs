//! JSON suite configuration. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_QQ: [f64; 8] = [0.9, 0.9, 0.8, 0.7, 0.5, 0.4, 0.5, 0.3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiConfig {
    /// Only `"std"` is accepted.
    Named(String),
    /// Row-major `psi_0 .. psi_3`, four reals each.
    Rows(Vec<f64>),
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig::Named("std".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Default for BoxConfig {
    fn default() -> Self {
        BoxConfig { lo: [1.0; 4], hi: [2.0; 4] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub order: Option<usize>,
    pub subdiv: Option<usize>,
    /// Absolute half-width of the excluded cube; default `1e-2 * diameter`.
    pub epsilon: Option<f64>,
    pub grading: Option<f64>,
}

/// Pass thresholds on the relative residual `|lhs - rhs| / max(1, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub stokes: f64,
    pub bp_exterior: f64,
    pub bp_interior: f64,
    pub bp_constants: f64,
    pub pro15: f64,
    pub pro15_nontrivial: f64,
    pub certificate: f64,
    pub conjugation: f64,
    pub differential: f64,
    pub degeneracy: f64,
    /// `^psi D x = -2` in the standard frame.
    pub identity: f64,
    pub limit_order: f64,
    pub weights: f64,
    pub anchor: f64,
    pub s4_stokes: f64,
    pub s4_exterior: f64,
    pub s4_interior: f64,
    pub s4_constants: f64,
    pub kernel: f64,
    pub kernel_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stokes: 1e-10,
            bp_exterior: 1e-8,
            bp_interior: 1e-4,
            bp_constants: 1e-6,
            pro15: 1e-6,
            pro15_nontrivial: 1e-4,
            certificate: 1e-10,
            conjugation: 1e-13,
            differential: 1e-8,
            degeneracy: 1e-13,
            identity: 1e-14,
            limit_order: 0.2,
            weights: 1e-10,
            anchor: 1e-10,
            s4_stokes: 1e-6,
            s4_exterior: 1e-6,
            s4_interior: 1e-3,
            s4_constants: 1e-5,
            kernel: 1e-12,
            kernel_fd: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub psi: PsiConfig,
    #[serde(default = "default_qq")]
    pub qq: Vec<f64>,
    #[serde(rename = "box", default)]
    pub domain: BoxConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    /// Case ids to run; `None` runs every case, an empty list runs none.
    #[serde(default)]
    pub cases: Option<Vec<String>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_qq() -> Vec<f64> {
    DEFAULT_QQ.to_vec()
}

impl Default for Config {
    fn default() -> Self {
        Config {
            psi: PsiConfig::default(),
            qq: default_qq(),
            domain: BoxConfig::default(),
            quad: QuadConfig::default(),
            cases: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(Config::from_json("{}").unwrap(), Config::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_json(r#"{"psi": "std", "colour": 3}"#).is_err());
        assert!(Config::from_json(r#"{"quad": {"order": 4, "panels": 2}}"#).is_err());
        assert!(Config::from_json(r#"{"tolerances": {"stoke": 1}}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let c = Config {
            psi: PsiConfig::Rows(vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            cases: Some(vec!["stokes-classical".into()]),
            ..Config::default()
        };
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }
}
