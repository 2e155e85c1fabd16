//! Run configuration: a JSON document naming a task and everything it needs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{Domain, Operator, Rational};
use crate::embedding::{critical_exponent, Threshold};
use crate::error::{Error, Result};
use crate::functional::Nonlinearity;
use crate::saddle::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Solve,
    Gram,
    Dalembert,
    Series,
    Witness,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::Solve,
        Task::Gram,
        Task::Dalembert,
        Task::Series,
        Task::Witness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Solve => "solve",
            Task::Gram => "gram",
            Task::Dalembert => "dalembert",
            Task::Series => "series",
            Task::Witness => "witness",
        }
    }
}

/// Spatial operator `P(−Δ)`; rational coefficients are written as strings
/// such as `"1/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `(−Δ)^m`.
    Polyharmonic { m: u32 },
    /// `−Δ + c`.
    ShiftedLaplacian { shift: String },
    /// `−Δ + ((N−1)/2)²` on `S^N`.
    KleinGordon,
    /// `P(τ) = Σ c_i τ^i`, lowest degree first.
    Polynomial { coefficients: Vec<String> },
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Config(format!("cannot parse rational number {s:?}")))
}

impl OperatorSpec {
    pub fn build(&self, domain: &Domain) -> Result<Operator> {
        match self {
            OperatorSpec::Polyharmonic { m } => Operator::polyharmonic(*m),
            OperatorSpec::ShiftedLaplacian { shift } => {
                Ok(Operator::shifted_laplacian(parse_rational(shift)?))
            }
            OperatorSpec::KleinGordon => Ok(Operator::klein_gordon(domain.dim())),
            OperatorSpec::Polynomial { coefficients } => Operator::from_coeffs(
                coefficients
                    .iter()
                    .map(|c| parse_rational(c))
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    pub k_max: u32,
    pub l_max: u32,
}

fn default_ramp() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        value: f64,
    },
    /// `value` times the product of interval indicators, smoothed by a cosine
    /// ramp of width `ramp` outside each interval.
    Rectangle {
        spatial: Vec<[f64; 2]>,
        temporal: [f64; 2],
        #[serde(default = "default_ramp")]
        ramp: f64,
        #[serde(default = "one")]
        value: f64,
    },
    /// CSV with columns `x..., t, value` on a full product grid.
    GridFile {
        path: PathBuf,
    },
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Multiple of the smallest exact grid `(2K+2) × (2L+2)`.
    #[serde(default = "two")]
    pub oversample: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { oversample: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesSpec {
    /// Exponent of the series; defaults to the nonlinearity's `p`.
    pub p: Option<f64>,
    /// Spatial radius for torus series.
    pub radius: u32,
    /// Offset cutoff for sphere series.
    pub j_max: u32,
    /// Temporal cutoff for sphere series; chosen from `j_max` when absent.
    pub l_max: Option<u64>,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec {
            p: None,
            radius: 64,
            j_max: 255,
            l_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DalembertSpec {
    /// A `coefficients.json` to split; a seeded random kernel field otherwise.
    pub field: Option<PathBuf>,
    /// Raster resolution for the characteristic slices.
    pub raster: usize,
    /// Slices are taken through `{q ≥ level · max q}`.
    pub level: f64,
}

impl Default for DalembertSpec {
    fn default() -> Self {
        DalembertSpec {
            field: None,
            raster: 256,
            level: 0.5,
        }
    }
}

fn default_witness() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    pub domain: Domain,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub cutoffs: Option<Cutoffs>,
    #[serde(default)]
    pub nonlinearity: Option<Nonlinearity>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    /// `solver.seed` is overwritten by the top-level `seed`.
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default)]
    pub dalembert: DalembertSpec,
    #[serde(default = "default_witness")]
    pub witness_count: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// A configuration that passed validation, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub config: RunConfig,
    pub task: Task,
    pub operator: Operator,
    pub warnings: Vec<String>,
    /// Hypothesis failure that forbids the task; diagnostics stay allowed.
    pub refusal: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))
    }

    fn require<'a, T>(field: &'a Option<T>, name: &str, task: Task) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::Config(format!("task {} needs `{name}`", task.name())))
    }

    /// Exponent used by the series task.
    pub fn series_p(&self) -> Option<f64> {
        self.series
            .p
            .or_else(|| self.nonlinearity.as_ref().map(|n| n.p()))
    }

    /// Checks task requirements and hypotheses. `task` overrides the file's
    /// task when given; the two must agree if both are present.
    pub fn validate(mut self, task: Option<Task>) -> Result<Validated> {
        let task = match (task, self.task) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "command asks for {} but the config names task {}",
                    a.name(),
                    b.name()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("no task given".into())),
        };
        self.task = Some(task);
        self.solver.seed = self.seed;
        self.domain
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let operator = self
            .operator
            .build(&self.domain)
            .map_err(|e| Error::Config(e.to_string()))?;
        self.solver.validate()?;
        let mut warnings = Vec::new();
        let mut refusal = None;

        let threshold = critical_exponent(&self.domain, &operator);
        let m_one_torus = matches!(self.domain, Domain::Torus { dim } if dim >= 2)
            && operator.monomial_power() == Some(1);
        if m_one_torus {
            let msg = format!(
                "compact embedding fails on {} for m = 1: the modes k = (l,1,0,...) have eigenvalue 1 for every l",
                self.domain
            );
            warnings.push(msg.clone());
            refusal = Some(msg);
        }
        let p_under_test = match task {
            Task::Series => self.series_p(),
            _ => self.nonlinearity.as_ref().map(|n| n.p()),
        };
        if let (Some(p), Threshold::Finite(ps)) = (p_under_test, threshold) {
            if p >= ps {
                warnings.push(format!(
                    "p = {p} lies outside the admissible range 2 < p < {ps} for this domain and operator"
                ));
            }
        }
        if let Some(WeightSpec::Rectangle { ramp, .. }) = &self.weight {
            if *ramp == 0.0 {
                warnings
                    .push("sharp indicator weight: quadrature of q f(u) is poorly resolved".into());
            }
        }

        match task {
            Task::Solve => {
                Self::require(&self.cutoffs, "cutoffs", task)?;
                Self::require(&self.nonlinearity, "nonlinearity", task)?;
                Self::require(&self.weight, "weight", task)?;
                self.require_grid_domain(task)?;
            }
            Task::Gram => {
                Self::require(&self.cutoffs, "cutoffs", task)?;
                Self::require(&self.weight, "weight", task)?;
                self.require_grid_domain(task)?;
            }
            Task::Dalembert => {
                Self::require(&self.cutoffs, "cutoffs", task)?;
                if self.domain != Domain::circle() || operator.monomial_power() != Some(1) {
                    return Err(Error::Config(
                        "dalembert needs the classical wave: torus of dim 1 with polyharmonic m = 1".into(),
                    ));
                }
                if self.dalembert.raster < 64 {
                    return Err(Error::Config("dalembert.raster must be at least 64".into()));
                }
                if !(self.dalembert.level > 0.0 && self.dalembert.level <= 1.0) {
                    return Err(Error::Config("dalembert.level must lie in (0, 1]".into()));
                }
            }
            Task::Series => {
                let p = self.series_p().ok_or_else(|| {
                    Error::Config("task series needs `series.p` or `nonlinearity`".into())
                })?;
                if !(p > 2.0) {
                    return Err(Error::Config(format!(
                        "series exponent must exceed 2, got {p}"
                    )));
                }
            }
            Task::Witness => {
                if !matches!(self.domain, Domain::Torus { .. })
                    || operator.monomial_power().is_none()
                {
                    return Err(Error::Config(
                        "witness needs a torus with a polyharmonic operator".into(),
                    ));
                }
            }
        }
        Ok(Validated {
            config: self,
            task,
            operator,
            warnings,
            refusal,
        })
    }

    fn require_grid_domain(&self, task: Task) -> Result<()> {
        if matches!(self.domain, Domain::Sphere { .. }) {
            return Err(Error::Config(format!(
                "task {} needs grid transforms, which exist only for circle and torus domains",
                task.name()
            )));
        }
        Ok(())
    }

    /// Makes relative file paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(WeightSpec::GridFile { path }) = &mut self.weight {
            fix(path);
        }
        if let Some(path) = &mut self.dalembert.field {
            fix(path);
        }
    }
}

/// Reads, parses and validates a configuration file.
pub fn validate_config(path: &Path, task: Option<Task>) -> Result<Validated> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(dir) = path.parent() {
        cfg.resolve_paths(dir);
    }
    cfg.validate(task)
}
