//! Typed JSON reports. Floats are carried as `serde_json::Number` holding
//! a 17-significant-digit literal, so reading a report back and writing it
//! again reproduces the same bytes.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Number;

pub const SCHEMA: u32 = 1;

/// `None` encodes a non-finite value.
pub type Float = Option<Number>;

pub fn float(x: f64) -> Float {
    x.is_finite().then(|| Number::from_str(&format_float(x)).unwrap())
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn float_text(x: &Float) -> String {
    x.as_ref().map_or_else(|| "null".to_string(), Number::to_string)
}

pub fn integer(decimal: &str) -> Number {
    Number::from_str(decimal).unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticJson {
    pub gate: String,
    pub quantity: String,
    pub value: Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub schema: u32,
    pub command: String,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub p_kind: String,
    pub p: Float,
    pub k: usize,
    pub kappa: Vec<Float>,
    #[serde(rename = "Delta")]
    pub big_delta: Vec<Float>,
    pub delta: Vec<Float>,
    pub delta1: Float,
    pub log_estimate: Float,
    pub estimate: Float,
    pub error_budget: Float,
    pub harris_log: Float,
    pub janson_log: Float,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Float>,
    pub lambda_range: String,
    pub rho_surrogate: Float,
    pub rho_range: String,
    pub rho_exact: Float,
    #[serde(rename = "Dstat")]
    pub dstat: Float,
    pub dstat_subset: Vec<usize>,
    pub dstat_j: usize,
    pub max_p: Float,
    pub cluster_counts: Vec<u64>,
    pub diagnostics: Vec<DiagnosticJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactJson {
    pub schema: u32,
    pub command: String,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub p_kind: String,
    pub p: Float,
    pub log_probability: Float,
    pub probability: Float,
    /// Independence profile, present for uniform `p`.
    pub profile: Option<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McJson {
    pub schema: u32,
    pub command: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: Float,
    pub lower: Float,
    pub upper: Float,
    pub level: Float,
    pub sigma: Float,
    pub seed: u64,
    pub shards: usize,
    pub algorithm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaJson {
    pub size: usize,
    pub falling: String,
    pub expanded: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: String,
    pub n_power: u32,
    pub p_power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeJson {
    pub size: usize,
    pub vertices: usize,
    pub edges: usize,
    pub aut: u64,
    pub cumulant: String,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicJson {
    pub schema: u32,
    pub command: String,
    pub family: Vec<String>,
    pub k: usize,
    pub kappa: Vec<KappaJson>,
    pub series_falling: String,
    pub series_expanded: String,
    pub alpha: Option<String>,
    pub reduced: Option<String>,
    pub reduced_terms: Vec<TermJson>,
    pub types: Vec<TypeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberJson {
    pub m_star: String,
    pub m_r: Option<String>,
    pub r_balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseJson {
    pub schema: u32,
    pub command: String,
    pub k: usize,
    pub p_kind: String,
    pub p: Float,
    pub instance_metrics: bool,
    pub diagnostics: Vec<DiagnosticJson>,
    pub members: Option<Vec<MemberJson>>,
    pub d: Option<String>,
    pub m_star: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestJson {
    pub schema: u32,
    pub command: String,
    pub passed: bool,
    pub checks: Vec<CheckJson>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialise");
    s.push('\n');
    s
}

/// Parses any report and writes it back out.
pub fn reemit(text: &str) -> serde_json::Result<String> {
    #[derive(Deserialize)]
    struct Head {
        command: String,
    }
    let head: Head = serde_json::from_str(text)?;
    fn again<T: Serialize + for<'de> Deserialize<'de>>(text: &str) -> serde_json::Result<String> {
        Ok(to_json(&serde_json::from_str::<T>(text)?))
    }
    match head.command.as_str() {
        "estimate" => again::<EstimateJson>(text),
        "exact" => again::<ExactJson>(text),
        "mc" => again::<McJson>(text),
        "symbolic" => again::<SymbolicJson>(text),
        "diagnose" => again::<DiagnoseJson>(text),
        "selftest" => again::<SelftestJson>(text),
        other => Err(serde::de::Error::custom(format!("unknown report command {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(f64::NAN), None);
        let x = 0.1f64 + 0.2;
        let back: f64 = format_float(x).parse().unwrap();
        assert_eq!(back, x);
    }
}
