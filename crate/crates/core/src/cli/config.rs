//! Run configuration: a JSON document, with command-line flags applied on top.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CknError, Result};
use crate::exponents::OperatorParams;
use crate::quadrature::QuadratureSpec;

/// One value or a strictly monotone list of values.
///
/// On the command line: `0.5`, `1,2,4` or `start:stop:count` (inclusive,
/// evenly spaced). In JSON: a number, an array, or `{start, stop, count}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Value(f64),
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Value(v) => vec![*v],
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*count)
                    .map(|i| {
                        if i + 1 == *count {
                            *stop
                        } else {
                            start + (stop - start) * i as f64 / (*count - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let v = self.values();
        if v.is_empty() {
            return Err(CknError::Config(format!("grid {name} is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CknError::Config(format!(
                "grid {name} has non-finite entries"
            )));
        }
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CknError::Config(format!(
                "grid {name} is not strictly monotone"
            )));
        }
        Ok(())
    }

    /// The value of a single-point grid.
    pub fn single(&self, name: &str) -> Result<f64> {
        self.validate(name)?;
        match self.values().as_slice() {
            [v] => Ok(*v),
            v => Err(CknError::Config(format!(
                "{name} must be a single value here (got {} values)",
                v.len()
            ))),
        }
    }
}

impl FromStr for Grid {
    type Err = CknError;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CknError::Config(format!("cannot parse {t:?} as a number")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [one] if one.contains(',') => {
                Grid::List(one.split(',').map(num).collect::<Result<_>>()?)
            }
            [one] => Grid::Value(num(one)?),
            [a, b, c] => Grid::Range {
                start: num(a)?,
                stop: num(b)?,
                count: c
                    .trim()
                    .parse()
                    .map_err(|_| CknError::Config(format!("cannot parse grid count {c:?}")))?,
            },
            _ => return Err(CknError::Config(format!("unrecognized grid {s:?}"))),
        };
        Ok(grid)
    }
}

impl From<f64> for Grid {
    fn from(v: f64) -> Self {
        Grid::Value(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CknError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CknError::Config(format!(
                "unknown format {other:?} (json or csv)"
            ))),
        }
    }
}

/// Test functions for `verify-identity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunctionKind {
    /// `exp(1 - 1/(1 - r²/R²))`, equal to 1 at the origin.
    SmoothBump,
    /// `(1 - r²/R²)³₊`.
    PolyBump,
    /// Smooth bump times `1 + x1/2`; not radial.
    Tilted,
    /// Difference of two smooth bumps, vanishing at the origin.
    Annulus,
}

impl FromStr for TestFunctionKind {
    type Err = CknError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| CknError::Config(format!("unknown test function {s:?}")))
    }
}

/// Source term for `poisson`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceConfig {
    /// `coeff · r^θ` with the run's θ.
    Power { coeff: f64 },
    /// `(r, f)` pairs, interpolated linearly in `ln r` and extended below the
    /// first node by `r^θ`.
    Table { points: Vec<(f64, f64)> },
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig::Power { coeff: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: f64,
    pub mu1: Grid,
    pub mu2: Grid,
    pub theta: f64,
    pub p: Grid,
    pub q0: f64,
    pub domain_radius: f64,
    pub quadrature: QuadratureSpec,
    pub output_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Singular coefficient prescribed in `poisson`.
    pub k: f64,
    pub source: SourceConfig,
    pub test_function: TestFunctionKind,
    /// Weight exponent of `ckn-check`; defaults to `μ1/2`.
    pub a: Option<f64>,
    /// Window half-width (in `ln r`) of the near-extremal profile; by default
    /// the width whose predicted ratio is 1.01, capped at 100.
    pub extremal_width: Option<f64>,
    /// Radii at which `fundamental` evaluates Φ and Γ.
    pub radii: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 3.0,
            mu1: Grid::Value(0.0),
            mu2: Grid::Value(0.0),
            theta: 0.0,
            p: Grid::Value(2.0),
            q0: 1.0,
            domain_radius: 1.0,
            quadrature: QuadratureSpec::default(),
            output_dir: None,
            formats: vec![Format::Json],
            k: 0.0,
            source: SourceConfig::default(),
            test_function: TestFunctionKind::SmoothBump,
            a: None,
            extremal_width: None,
            radii: vec![1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0],
        }
    }
}

/// Flag values; every `Some` replaces the config file entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<f64>,
    pub mu1: Option<Grid>,
    pub mu2: Option<Grid>,
    pub theta: Option<f64>,
    pub p: Option<Grid>,
    pub q0: Option<f64>,
    pub radius: Option<f64>,
    pub rel_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub k: Option<f64>,
    pub a: Option<f64>,
    pub test_function: Option<TestFunctionKind>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CknError::Config(format!("bad config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CknError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(v) = o.n {
            self.n = v;
        }
        if let Some(v) = &o.mu1 {
            self.mu1 = v.clone();
        }
        if let Some(v) = &o.mu2 {
            self.mu2 = v.clone();
        }
        if let Some(v) = o.theta {
            self.theta = v;
        }
        if let Some(v) = &o.p {
            self.p = v.clone();
        }
        if let Some(v) = o.q0 {
            self.q0 = v;
        }
        if let Some(v) = o.radius {
            self.domain_radius = v;
        }
        if let Some(v) = o.rel_tol {
            self.quadrature.rel_tol = v;
        }
        if let Some(v) = &o.out {
            self.output_dir = Some(v.clone());
        }
        if let Some(v) = &o.formats {
            self.formats = v.clone();
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = o.a {
            self.a = Some(v);
        }
        if let Some(v) = o.test_function {
            self.test_function = v;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_finite() {
            return Err(CknError::Config(format!("N = {} is not finite", self.n)));
        }
        self.mu1.validate("mu1")?;
        self.mu2.validate("mu2")?;
        self.p.validate("p")?;
        if !(self.domain_radius > 0.0 && self.domain_radius.is_finite()) {
            return Err(CknError::Config(format!(
                "domain_radius = {} must be positive",
                self.domain_radius
            )));
        }
        if self.formats.is_empty() {
            return Err(CknError::Config("no output format selected".into()));
        }
        self.quadrature.validate()
    }

    /// `(N, μ1, μ2)` for commands that take a single parameter point.
    pub fn single_params(&self) -> Result<OperatorParams> {
        OperatorParams::new(self.n, self.mu1.single("mu1")?, self.mu2.single("mu2")?)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}
