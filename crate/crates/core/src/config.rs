//! Run configuration in a line-oriented `key = value` format.
//!
//! ```text
//! # comments start with '#'
//! [case]
//! case = rider_kothe
//! sizes = 64, 128, 256
//! beta0 = 6
//! cfl = 0.25
//! output_dir = out
//! fields = true
//! contours = true
//! psi = false
//! mass = true
//! snapshots = 4.0
//! ```
//!
//! The `[case]` header is optional; it is the only section. Only `case` is
//! required.

use std::path::PathBuf;
use std::str::FromStr;

use crate::benchmark::BenchmarkCase;
use crate::error::{Error, Result};
use crate::quadrature::{QuadratureRule, VolumeRule, MAX_ORDER};

/// Smallest accepted grid size.
pub const MIN_GRID_SIZE: usize = 16;

/// Which files a run writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputToggles {
    pub fields: bool,
    pub contours: bool,
    pub psi: bool,
    pub mass: bool,
}

impl Default for OutputToggles {
    fn default() -> Self {
        Self {
            fields: true,
            contours: true,
            psi: false,
            mass: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub sizes: Vec<usize>,
    pub beta0: f64,
    pub cfl: f64,
    pub output_dir: PathBuf,
    pub outputs: OutputToggles,
    pub snapshot_times: Vec<f64>,
    pub quadrature: VolumeRule,
    /// Overrides the case's final time when set.
    pub final_time: Option<f64>,
}

impl RunConfig {
    /// Defaults for `case`.
    pub fn new(case: impl Into<String>) -> Self {
        Self {
            case: case.into(),
            sizes: vec![100],
            beta0: 6.0,
            cfl: 0.25,
            output_dir: PathBuf::from("output"),
            outputs: OutputToggles::default(),
            snapshot_times: Vec::new(),
            quadrature: QuadratureRule::default().volume_rule(),
            final_time: None,
        }
    }

    pub fn quadrature_rule(&self) -> QuadratureRule {
        QuadratureRule::new(self.quadrature, 2)
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_config(s)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::new("");
    let mut seen_case = false;
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        if line.starts_with('[') {
            if line != "[case]" {
                return Err(err(format!("unknown section {line}")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("missing value for '{key}'")));
        }
        match key {
            "case" => {
                BenchmarkCase::by_name(value).map_err(|_| err(format!("unknown case '{value}'")))?;
                cfg.case = value.to_string();
                seen_case = true;
            }
            "sizes" => {
                cfg.sizes = parse_list::<usize>(value).map_err(|m| err(format!("sizes: {m}")))?;
                if cfg.sizes.is_empty() {
                    return Err(err("sizes: empty list".into()));
                }
                if let Some(n) = cfg.sizes.iter().find(|&&n| n < MIN_GRID_SIZE) {
                    return Err(err(format!("sizes: grid size {n} is below {MIN_GRID_SIZE}")));
                }
            }
            "beta0" => {
                cfg.beta0 = parse_value(value).map_err(|m| err(format!("beta0: {m}")))?;
                if !(cfg.beta0 > 0.0 && cfg.beta0.is_finite()) {
                    return Err(err(format!("beta0 must be positive, got {value}")));
                }
            }
            "cfl" => {
                cfg.cfl = parse_value(value).map_err(|m| err(format!("cfl: {m}")))?;
                if !(cfg.cfl > 0.0 && cfg.cfl < 1.0) {
                    return Err(err(format!("cfl must lie in (0, 1), got {value}")));
                }
            }
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "fields" => cfg.outputs.fields = parse_bool(value).map_err(err)?,
            "contours" => cfg.outputs.contours = parse_bool(value).map_err(err)?,
            "psi" => cfg.outputs.psi = parse_bool(value).map_err(err)?,
            "mass" => cfg.outputs.mass = parse_bool(value).map_err(err)?,
            "snapshots" => {
                cfg.snapshot_times = parse_list::<f64>(value).map_err(|m| err(format!("snapshots: {m}")))?;
                if cfg.snapshot_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                    return Err(err("snapshots: times must be non-negative".into()));
                }
            }
            "final_time" => {
                let t: f64 = parse_value(value).map_err(|m| err(format!("final_time: {m}")))?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(err(format!("final_time must be non-negative, got {value}")));
                }
                cfg.final_time = Some(t);
            }
            "quadrature" => cfg.quadrature = parse_quadrature(value).map_err(err)?,
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }
    if !seen_case {
        return Err(Error::Parse {
            line: last_line,
            message: "missing required key 'case'".into(),
        });
    }
    Ok(cfg)
}

fn parse_value<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("malformed value '{s}'"))
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|v| parse_value(v.trim())).collect()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got '{s}'")),
    }
}

/// `adaptive`, `adaptive:<tolerance>` or `tensor:<order>`.
fn parse_quadrature(s: &str) -> std::result::Result<VolumeRule, String> {
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (s, None),
    };
    match (kind, arg) {
        ("adaptive", None) => Ok(QuadratureRule::default().volume_rule()),
        ("adaptive", Some(a)) => {
            let tolerance: f64 = parse_value(a)?;
            if !(tolerance > 0.0 && tolerance < 1.0) {
                return Err(format!("adaptive tolerance must lie in (0, 1), got {a}"));
            }
            Ok(VolumeRule::Adaptive { tolerance })
        }
        ("tensor", Some(a)) => {
            let n: usize = parse_value(a)?;
            if !(1..=MAX_ORDER).contains(&n) {
                return Err(format!("tensor order must lie in 1..={MAX_ORDER}, got {n}"));
            }
            Ok(VolumeRule::Tensor(n))
        }
        _ => Err(format!("unknown quadrature '{s}'")),
    }
}
