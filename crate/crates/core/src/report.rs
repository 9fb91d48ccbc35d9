//! Report envelopes and per-point rows.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::quadrature::PointData;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every JSON report: what ran, on which input, with which settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of each input specification, in argument order.
    pub inputs: Vec<String>,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, inputs: Vec<String>, config: &RunConfig, result: T) -> Self {
        Report {
            tool: "qprime".into(),
            version: CODE_VERSION.into(),
            command: command.into(),
            inputs,
            config: config.clone(),
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numeric(format!("report serialization: {e}")))
    }
}

/// One CSV row per boundary node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub eta: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub re_z1: f64,
    pub im_z1: f64,
    pub re_z2: f64,
    pub im_z2: f64,
    pub q_prime: f64,
    pub scal: f64,
    pub norm_a2: f64,
    pub obstruction: f64,
    pub weight: f64,
    pub density: f64,
}

impl From<&PointData> for PointRow {
    fn from(p: &PointData) -> Self {
        PointRow {
            eta: p.coords[0],
            xi1: p.coords[1],
            xi2: p.coords[2],
            re_z1: p.point[0],
            im_z1: p.point[1],
            re_z2: p.point[2],
            im_z2: p.point[3],
            q_prime: p.q_prime,
            scal: p.scal,
            norm_a2: p.norm_a2,
            obstruction: p.obstruction,
            weight: p.weight,
            density: p.density,
        }
    }
}
