//! Run specifications assembled from a flat `key = value` file and flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::double::AngleConvention;
use crate::error::{Error, Result};
use crate::model::{CouplingProfile, SystemConfig};

pub const DEFAULT_STRIDE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    SingleAtoms,
    SingleFields,
    Double,
    Kernel,
    Sweep,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SingleAtoms => "single-atoms",
            Scenario::SingleFields => "single-fields",
            Scenario::Double => "double",
            Scenario::Kernel => "kernel",
            Scenario::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "single-atoms" | "single" | "atoms" => Ok(Scenario::SingleAtoms),
            "single-fields" | "fields" => Ok(Scenario::SingleFields),
            "double" => Ok(Scenario::Double),
            "kernel" => Ok(Scenario::Kernel),
            "sweep" => Ok(Scenario::Sweep),
            other => Err(Error::config(
                "scenario",
                format!("unknown scenario `{other}` (expected single-atoms|single-fields|double|kernel|sweep)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta,
    NModes,
    LengthRatio,
    OmegaA,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Theta => "theta",
            SweepAxis::NModes => "n_modes",
            SweepAxis::LengthRatio => "length_ratio",
            SweepAxis::OmegaA => "omega_a",
        }
    }

    /// `base` with this axis set to `point`.
    pub fn apply(self, base: &SystemConfig, point: &SweepPoint) -> Result<SystemConfig> {
        let mut cfg = *base;
        match self {
            SweepAxis::Theta => cfg.theta = point.value,
            SweepAxis::NModes => {
                cfg.n_modes = as_count("values", point.value)?;
                if let Some(l) = point.paired_length {
                    cfg.length_ratio = l;
                }
            }
            SweepAxis::LengthRatio => cfg.length_ratio = point.value,
            SweepAxis::OmegaA => cfg.omega_a = point.value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "theta" => Ok(SweepAxis::Theta),
            "n_modes" | "modes" | "n" => Ok(SweepAxis::NModes),
            "length_ratio" | "length" => Ok(SweepAxis::LengthRatio),
            "omega_a" => Ok(SweepAxis::OmegaA),
            other => Err(Error::config(
                "axis",
                format!(
                    "unknown sweep axis `{other}` (expected theta|n_modes|length_ratio|omega_a)"
                ),
            )),
        }
    }
}

/// One sweep value. A mode-count value may carry its own cavity length,
/// written `n@length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub paired_length: Option<f64>,
}

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.paired_length {
            Some(l) => write!(f, "{}@{}", self.value, l),
            None => write!(f, "{}", self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Trajectory type run at every value.
    pub base: Scenario,
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub scenario: Scenario,
    pub system: SystemConfig,
    /// Defaults to five retardation times, or two Rabi periods for one mode.
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub sample_stride: usize,
    pub out: Option<PathBuf>,
    pub angle_convention: AngleConvention,
    pub sweep: Option<SweepSpec>,
}

impl RunSpec {
    pub fn new(scenario: Scenario) -> Self {
        RunSpec {
            scenario,
            system: SystemConfig::default(),
            t_max: None,
            dt: None,
            sample_stride: DEFAULT_STRIDE,
            out: None,
            angle_convention: AngleConvention::default(),
            sweep: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config(
                    "t_max",
                    format!("must be finite and > 0, got {t}"),
                ));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config(
                    "dt",
                    format!("must be finite and > 0, got {dt}"),
                ));
            }
        }
        if self.sample_stride == 0 {
            return Err(Error::config("stride", "must be at least 1"));
        }
        match (&self.scenario, &self.sweep) {
            (Scenario::Sweep, None) => Err(Error::config("axis", "sweep needs an axis and values")),
            (Scenario::Sweep, Some(sweep)) => {
                if sweep.points.is_empty() {
                    return Err(Error::config("values", "sweep needs at least one value"));
                }
                if matches!(sweep.base, Scenario::Sweep | Scenario::Kernel) {
                    return Err(Error::config(
                        "scenario",
                        format!(
                            "cannot sweep `{}` runs (expected single-atoms|single-fields|double)",
                            sweep.base
                        ),
                    ));
                }
                for point in &sweep.points {
                    if point.paired_length.is_some() && sweep.axis != SweepAxis::NModes {
                        return Err(Error::config(
                            "values",
                            "`n@length` pairs are only valid on the n_modes axis",
                        ));
                    }
                    sweep.axis.apply(&self.system, point)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn out_path(&self) -> PathBuf {
        match &self.out {
            Some(p) => p.clone(),
            None => match (&self.scenario, &self.sweep) {
                (Scenario::Sweep, Some(s)) => PathBuf::from(format!("sweep_{}", s.axis)),
                _ => PathBuf::from(format!("{}.csv", self.scenario)),
            },
        }
    }
}

/// Accumulates `key = value` settings; later settings replace earlier ones.
#[derive(Debug, Clone, Default)]
pub struct SpecBuilder {
    theta: Option<f64>,
    n_modes: Option<usize>,
    length_ratio: Option<f64>,
    omega_a: Option<f64>,
    profile: Option<CouplingProfile>,
    initial: Option<Scenario>,
    t_max: Option<f64>,
    dt: Option<f64>,
    stride: Option<usize>,
    out: Option<PathBuf>,
    angle_convention: Option<AngleConvention>,
    axis: Option<SweepAxis>,
    values: Option<String>,
    base: Option<Scenario>,
}

impl SpecBuilder {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "theta" => self.theta = Some(parse_real("theta", value)?),
            "n_modes" | "modes" => {
                self.n_modes = Some(as_count("n_modes", parse_real("n_modes", value)?)?)
            }
            "length_ratio" => self.length_ratio = Some(parse_real("length_ratio", value)?),
            "omega_a" => self.omega_a = Some(parse_real("omega_a", value)?),
            "profile" | "coupling_profile" => self.profile = Some(value.parse()?),
            "initial" => {
                self.initial = Some(match value.to_ascii_lowercase().as_str() {
                    "atoms" => Scenario::SingleAtoms,
                    "fields" => Scenario::SingleFields,
                    other => {
                        return Err(Error::config(
                            "initial",
                            format!("unknown initial state `{other}` (expected atoms|fields)"),
                        ))
                    }
                })
            }
            "t_max" | "tmax" => self.t_max = Some(parse_real("t_max", value)?),
            "dt" => self.dt = Some(parse_real("dt", value)?),
            "stride" | "sample_stride" => {
                self.stride = Some(as_count("stride", parse_real("stride", value)?)?)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "angle_convention" => self.angle_convention = Some(value.parse()?),
            "axis" => self.axis = Some(value.parse()?),
            "values" => self.values = Some(value.to_string()),
            "scenario" => self.base = Some(value.parse()?),
            _ => return Err(Error::config("config", format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Reads a flat file of `key = value` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        self.load_str(&text)
    }

    pub fn load_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    "config",
                    format!("line {}: expected `key = value`, got `{line}`", lineno + 1),
                )
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Builds the spec for `scenario`. For `single-atoms` the `initial` key
    /// may switch to the field-entangled start.
    pub fn build(&self, scenario: Scenario) -> Result<RunSpec> {
        let scenario = match (scenario, self.initial) {
            (Scenario::SingleAtoms | Scenario::SingleFields, Some(initial)) => initial,
            (s, _) => s,
        };
        let mut spec = RunSpec::new(scenario);
        let cfg = &mut spec.system;
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = self.n_modes {
            cfg.n_modes = v;
        }
        if let Some(v) = self.length_ratio {
            cfg.length_ratio = v;
        }
        if let Some(v) = self.omega_a {
            cfg.omega_a = v;
        }
        if let Some(v) = self.profile {
            cfg.coupling_profile = v;
        }
        spec.t_max = self.t_max;
        spec.dt = self.dt;
        if let Some(v) = self.stride {
            spec.sample_stride = v;
        }
        spec.out = self.out.clone();
        if let Some(v) = self.angle_convention {
            spec.angle_convention = v;
        }
        if scenario == Scenario::Sweep {
            let axis = self
                .axis
                .ok_or_else(|| Error::config("axis", "sweep needs --axis"))?;
            let values = self
                .values
                .as_deref()
                .ok_or_else(|| Error::config("values", "sweep needs --values"))?;
            let base = match (self.base, self.initial) {
                (Some(b), _) => b,
                (None, Some(initial)) => initial,
                (None, None) => Scenario::SingleAtoms,
            };
            spec.sweep = Some(SweepSpec {
                base,
                axis,
                points: parse_points(values)?,
            });
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// A real number, or a multiple of π written `pi`, `pi/4`, `3*pi/8`, `2pi`.
pub fn parse_real(field: &'static str, s: &str) -> Result<f64> {
    let bad = || Error::config(field, format!("cannot parse `{s}` as a number"));
    let text = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = text.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (text.as_str(), 1.0),
    };
    let factor = num.strip_suffix("pi").ok_or_else(bad)?;
    let factor = factor.strip_suffix('*').unwrap_or(factor);
    let factor = match factor {
        "" => 1.0,
        "-" => -1.0,
        f => f.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(factor * PI / den)
}

fn as_count(field: &'static str, x: f64) -> Result<usize> {
    if x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::config(
            field,
            format!("expected a positive integer, got {x}"),
        ))
    }
}

/// Comma-separated sweep values.
pub fn parse_points(s: &str) -> Result<Vec<SweepPoint>> {
    s.split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| match item.split_once('@') {
            Some((v, l)) => Ok(SweepPoint {
                value: parse_real("values", v)?,
                paired_length: Some(parse_real("values", l)?),
            }),
            None => Ok(SweepPoint {
                value: parse_real("values", item)?,
                paired_length: None,
            }),
        })
        .collect()
}
