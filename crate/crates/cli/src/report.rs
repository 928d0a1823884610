//! JSON report documents. Field order is fixed by declaration, and floats
//! are printed in shortest round-trip form, so equal inputs give equal bytes.

use conekit::{Complex64, QuadratureSpec};
use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "conekit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A complex value with an absolute error bound. Unbounded errors print as
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounded {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl Bounded {
    pub fn new(z: Complex64, err: f64) -> Self {
        Self { re: z.re, im: z.im, err }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureEcho {
    pub theta_nodes: usize,
    pub phi_nodes: usize,
    pub target_rel_tol: f64,
    pub max_refinements: u32,
    pub max_subdivision_depth: u32,
}

impl From<&QuadratureSpec> for QuadratureEcho {
    fn from(s: &QuadratureSpec) -> Self {
        Self {
            theta_nodes: s.theta_nodes,
            phi_nodes: s.phi_nodes,
            target_rel_tol: s.target_rel_tol,
            max_refinements: s.max_refinements,
            max_subdivision_depth: s.max_subdivision_depth,
        }
    }
}

/// Fields shared by every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
}

impl Header {
    pub fn new(command: &'static str) -> Self {
        Self { tool: TOOL, version: VERSION, command }
    }
}

/// Serializes `body` and appends `wall_time_s` when timing was requested.
pub fn render<T: Serialize>(body: &T, wall_time: Option<f64>) -> String {
    let mut v = serde_json::to_value(body).expect("report types serialize");
    if let (Some(t), Value::Object(map)) = (wall_time, &mut v) {
        map.insert("wall_time_s".into(), serde_json::json!(t));
    }
    let mut s = serde_json::to_string_pretty(&v).expect("report values serialize");
    s.push('\n');
    s
}
