//! Run configuration: `[section]` headers followed by `key = value` lines.
//! `#` starts a comment. Unknown sections and keys are rejected.
//!
//! ```text
//! [physical]
//! hbar = 1
//! mass = 1
//!
//! [potential]
//! expression = x^2/2
//!
//! [initial]
//! kind = gaussian        # or: coefficients
//! x0 = 1
//! sigma = 0.7071067811865476
//! k0 = 0
//! truncation = 2
//! # kind = coefficients uses instead:
//! # alpha_re = -0.25, 0.5, -0.5
//! # alpha_im = 0, 0, 0
//!
//! [stepper]
//! integrator = euler     # or: rk4
//! dt = 1e-4
//! steps = 10000
//! snapshot_stride = 100
//! blowup_threshold = 1e12
//!
//! [grid]
//! xmin = -10
//! xmax = 10
//! points = 512
//!
//! [oracle]               # optional; compare and the converge fallback
//! dt = 1e-3
//! steps = 1000
//!
//! [reference]            # optional; converge only
//! scenario = harmonic-coherent
//! oracle_fallback = true
//!
//! [output]
//! directory = out
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::initialization::{gaussian_coefficients, GaussianPacket};
use crate::integrators::{Integrator, StepperConfig, DEFAULT_BLOWUP_THRESHOLD};
use crate::reference::Scenario;
use crate::series::{CoefficientState, PhysicalParams, C64};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub msg: String,
}

impl ConfigError {
    fn at(line: usize, msg: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            msg: msg.into(),
        }
    }

    fn general(msg: impl Into<String>) -> Self {
        Self {
            line: None,
            msg: msg.into(),
        }
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("physical", &["hbar", "mass"]),
    ("potential", &["expression"]),
    (
        "initial",
        &["kind", "x0", "sigma", "k0", "alpha_re", "alpha_im", "truncation"],
    ),
    (
        "stepper",
        &["integrator", "dt", "steps", "snapshot_stride", "blowup_threshold"],
    ),
    ("grid", &["xmin", "xmax", "points"]),
    ("oracle", &["dt", "steps"]),
    ("reference", &["scenario", "oracle_fallback"]),
    ("output", &["directory"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Sections and their key/value entries, checked against the schema.
#[derive(Debug, Clone, Default)]
struct RawConfig {
    sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(lineno, "unterminated section header"))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::at(lineno, format!("unknown section [{name}]")));
                }
                if raw.sections.contains_key(name) {
                    return Err(ConfigError::at(lineno, format!("duplicate section [{name}]")));
                }
                raw.sections.insert(name.to_string(), (lineno, BTreeMap::new()));
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::at(lineno, "expected 'key = value' or '[section]'"))?;
            let (key, value) = (key.trim(), value.trim());
            let section = current
                .as_deref()
                .ok_or_else(|| ConfigError::at(lineno, format!("key '{key}' appears before any section")))?;
            let allowed = SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(ConfigError::at(lineno, format!("unknown key '{key}' in [{section}]")));
            }
            let entries = &mut raw.sections.get_mut(section).expect("section registered").1;
            if entries.contains_key(key) {
                return Err(ConfigError::at(lineno, format!("duplicate key '{key}' in [{section}]")));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line: lineno,
                },
            );
        }
        Ok(raw)
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|(_, e)| e.get(key))
    }

    fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.entry(section, key)
            .map(|e| {
                e.value
                    .parse::<T>()
                    .map_err(|err| ConfigError::at(e.line, format!("[{section}] {key}: {err}")))
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key)?
            .ok_or_else(|| ConfigError::general(format!("missing required key '{key}' in [{section}]")))
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                item.trim()
                    .parse::<f64>()
                    .map_err(|err| ConfigError::at(e.line, format!("[{section}] {key}: '{}': {err}", item.trim())))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entry(section, key).map(|e| e.line)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Gaussian(GaussianPacket),
    Coefficients(Vec<C64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    pub dt: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub potential: String,
    /// Line of the `expression` key, for error reporting.
    pub potential_line: Option<usize>,
    pub initial: InitialSpec,
    pub truncation: usize,
    pub stepper: StepperConfig,
    pub grid: Option<GridSpec>,
    pub oracle: Option<OracleSpec>,
    pub scenario: Option<Scenario>,
    pub oracle_fallback: bool,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn initial_state(&self) -> CoefficientState {
        match &self.initial {
            InitialSpec::Gaussian(p) => gaussian_coefficients(p, self.truncation).expect("validated packet"),
            InitialSpec::Coefficients(a) => {
                CoefficientState::from_leading(a, self.truncation, 0.0).expect("validated coefficients")
            }
        }
    }
}

fn finite(v: f64, section: &str, key: &str, line: Option<usize>) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError {
            line,
            msg: format!("[{section}] {key} must be finite"),
        })
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let raw = RawConfig::parse(text)?;

        let hbar = raw.get::<f64>("physical", "hbar")?.unwrap_or(1.0);
        let mass = raw.get::<f64>("physical", "mass")?.unwrap_or(1.0);
        let params = PhysicalParams::new(hbar, mass).map_err(|e| ConfigError {
            line: raw.line_of("physical", if hbar > 0.0 && hbar.is_finite() { "mass" } else { "hbar" }),
            msg: e.to_string(),
        })?;

        let potential: String = raw.require("potential", "expression")?;
        let potential_line = raw.line_of("potential", "expression");

        let kind: String = raw.require("initial", "kind")?;
        let kind_line = raw.line_of("initial", "kind");
        let initial = match kind.as_str() {
            "gaussian" => {
                for key in ["alpha_re", "alpha_im"] {
                    if let Some(line) = raw.line_of("initial", key) {
                        return Err(ConfigError::at(line, format!("'{key}' is not used with kind = gaussian")));
                    }
                }
                let x0 = finite(raw.get("initial", "x0")?.unwrap_or(0.0), "initial", "x0", raw.line_of("initial", "x0"))?;
                let k0 = finite(raw.get("initial", "k0")?.unwrap_or(0.0), "initial", "k0", raw.line_of("initial", "k0"))?;
                let sigma: f64 = raw.require("initial", "sigma")?;
                let packet = GaussianPacket::new(x0, sigma, k0).map_err(|e| ConfigError {
                    line: raw.line_of("initial", "sigma"),
                    msg: e.to_string(),
                })?;
                InitialSpec::Gaussian(packet)
            }
            "coefficients" => {
                for key in ["x0", "sigma", "k0"] {
                    if let Some(line) = raw.line_of("initial", key) {
                        return Err(ConfigError::at(line, format!("'{key}' is not used with kind = coefficients")));
                    }
                }
                let re = raw
                    .list("initial", "alpha_re")?
                    .ok_or_else(|| ConfigError::general("missing required key 'alpha_re' in [initial]"))?;
                let im = raw.list("initial", "alpha_im")?.unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err(ConfigError {
                        line: raw.line_of("initial", "alpha_im"),
                        msg: format!("alpha_im has {} entries but alpha_re has {}", im.len(), re.len()),
                    });
                }
                let alphas: Vec<C64> = re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect();
                if alphas.iter().any(|a| !a.is_finite()) {
                    return Err(ConfigError {
                        line: raw.line_of("initial", "alpha_re"),
                        msg: "coefficients must be finite".into(),
                    });
                }
                InitialSpec::Coefficients(alphas)
            }
            other => {
                return Err(ConfigError {
                    line: kind_line,
                    msg: format!("unknown initial kind '{other}' (expected gaussian or coefficients)"),
                })
            }
        };
        let min_order = match &initial {
            InitialSpec::Gaussian(_) => 2,
            InitialSpec::Coefficients(a) => a.len().saturating_sub(1).max(2),
        };
        let truncation = raw.get::<usize>("initial", "truncation")?.unwrap_or(min_order);
        if truncation < min_order {
            return Err(ConfigError {
                line: raw.line_of("initial", "truncation"),
                msg: format!("truncation must be at least {min_order} for this initial state"),
            });
        }

        let integrator = raw.get::<Integrator>("stepper", "integrator")?.unwrap_or(Integrator::Euler);
        let dt: f64 = raw.require("stepper", "dt")?;
        let steps: usize = raw.require("stepper", "steps")?;
        let stride = raw.get::<usize>("stepper", "snapshot_stride")?.unwrap_or(1);
        let threshold = raw
            .get::<f64>("stepper", "blowup_threshold")?
            .unwrap_or(DEFAULT_BLOWUP_THRESHOLD);
        let stepper_err = |key: &str, e: crate::integrators::StepperError| ConfigError {
            line: raw.line_of("stepper", key),
            msg: e.to_string(),
        };
        let stepper = StepperConfig::new(integrator, dt, steps)
            .map_err(|e| stepper_err(if dt > 0.0 && dt.is_finite() { "steps" } else { "dt" }, e))?
            .with_snapshot_stride(stride)
            .map_err(|e| stepper_err("snapshot_stride", e))?
            .with_blowup_threshold(threshold)
            .map_err(|e| stepper_err("blowup_threshold", e))?;

        let grid = if raw.has_section("grid") {
            let xmin: f64 = raw.require("grid", "xmin")?;
            let xmax: f64 = raw.require("grid", "xmax")?;
            let points: usize = raw.require("grid", "points")?;
            if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) {
                return Err(ConfigError {
                    line: raw.line_of("grid", "xmax"),
                    msg: format!("grid window [{xmin}, {xmax}] is empty or not finite"),
                });
            }
            if points < crate::reconstruction::MIN_GRID_POINTS {
                return Err(ConfigError {
                    line: raw.line_of("grid", "points"),
                    msg: format!("grid needs at least {} points", crate::reconstruction::MIN_GRID_POINTS),
                });
            }
            Some(GridSpec { xmin, xmax, points })
        } else {
            None
        };

        let oracle = if raw.has_section("oracle") {
            Some(OracleSpec {
                dt: raw.get("oracle", "dt")?,
                steps: raw.get("oracle", "steps")?,
            })
        } else {
            None
        };

        let scenario = raw.get::<Scenario>("reference", "scenario")?;
        let oracle_fallback = raw.get::<bool>("reference", "oracle_fallback")?.unwrap_or(true);
        let output_dir = raw.get::<String>("output", "directory")?.map(PathBuf::from);

        Ok(RunConfig {
            params,
            potential,
            potential_line,
            initial,
            truncation,
            stepper,
            grid,
            oracle,
            scenario,
            oracle_fallback,
            output_dir,
        })
    }
}
