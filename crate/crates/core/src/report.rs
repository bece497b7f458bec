//! Certification reports.
//!
//! One [`CertReport`] per check: the parameter snapshot, the grid (or sample
//! family) layout, the minimal margin with its location, the pass tolerance,
//! and the verdict `pass = (min_margin > tolerance)`. Reports serialize to
//! JSON; wall time is recorded but excluded from byte-stability comparisons.

use crate::geometry::RotationParams;
use crate::profiles::{ProfileS, SmoothedProfile};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One axis of a certification grid or sample family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridAxis {
    pub fn new(name: &str, count: usize, lo: f64, hi: f64) -> Self {
        GridAxis {
            name: name.to_string(),
            count,
            lo,
            hi,
        }
    }
}

/// Snapshot of the parameters a check ran under.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamsSnapshot {
    pub alpha: f64,
    pub beta: f64,
    pub extension_c: f64,
    pub blend_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl ParamsSnapshot {
    pub fn of(p: &ProfileS) -> Self {
        ParamsSnapshot {
            alpha: p.alpha(),
            beta: p.beta(),
            extension_c: p.extension_c(),
            blend_width: p.blend_width(),
            ..Default::default()
        }
    }

    pub fn with_smoothed(mut self, sp: &SmoothedProfile) -> Self {
        self.eta = Some(sp.eta());
        self.gamma = Some(sp.gamma());
        self
    }

    pub fn with_rotation(mut self, rp: &RotationParams) -> Self {
        self.delta = Some(rp.delta());
        self.t = Some(rp.t());
        self.delta_tilde = Some(rp.delta_tilde());
        self.epsilon = Some(rp.epsilon());
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }
}

/// Outcome of one certification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub check_name: String,
    pub params: ParamsSnapshot,
    pub grid: Vec<GridAxis>,
    pub min_margin: f64,
    /// Coordinates of the minimizing grid node / sample, one per grid axis.
    pub argmin: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub version: String,
    /// Auxiliary named minima/maxima of sub-clauses (case bounds, defects).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl CertReport {
    pub fn new(
        check_name: &str,
        params: ParamsSnapshot,
        grid: Vec<GridAxis>,
        min_margin: f64,
        argmin: Vec<f64>,
        tolerance: f64,
        wall_time_s: f64,
    ) -> Self {
        CertReport {
            check_name: check_name.to_string(),
            params,
            grid,
            min_margin,
            argmin,
            tolerance,
            pass: min_margin > tolerance,
            wall_time_s,
            version: env!("CARGO_PKG_VERSION").to_string(),
            extras: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
