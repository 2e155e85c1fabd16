//! Executes a validated configuration and writes its artifacts.
//!
//! Every task writes `result.json` holding the resolved configuration, the
//! tool version, the seed and the task's findings. Outputs contain no
//! timestamps, so equal inputs give byte-identical files.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::catalog::{Domain, Operator, SpectralCatalog, SpectralClass};
use crate::config::{Task, Validated, WeightSpec};
use crate::control::{dalembert_split, kernel_gram, rectangle_margin, xi_eta_infimum, RasterSet};
use crate::embedding::{
    noncompact_witness, sphere_embedding_series, torus_gap_series, SphereOperator,
};
use crate::error::{Error, Result};
use crate::field::{FieldExport, SpectralField};
use crate::functional::EnergyContext;
use crate::grid::{ProductGrid, WeightField};
use crate::saddle::{GroundStateResult, SaddleProblem};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    /// Artifacts hold the best iterate found.
    NotConverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub result: Value,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Success => 0,
            RunStatus::NotConverged => 3,
        }
    }
}

/// Process exit status for a failed run: 2 for configuration problems, 3 for
/// solver failure, 4 for a failed hypothesis check.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Refused(_) => 4,
        Error::NoCoerciveDirection(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

fn envelope(v: &Validated, status: &str, body: Value) -> Result<Value> {
    Ok(json!({
        "tool": "npwave",
        "version": VERSION,
        "task": v.task.name(),
        "seed": v.config.seed,
        "status": status,
        "warnings": v.warnings,
        "config": serde_json::to_value(&v.config)?,
        v.task.name(): body,
    }))
}

fn build_catalog(v: &Validated) -> Result<Arc<SpectralCatalog>> {
    let c = v.config.cutoffs.expect("validated");
    Ok(Arc::new(SpectralCatalog::build(
        v.config.domain,
        v.operator.clone(),
        c.k_max,
        c.l_max,
    )?))
}

fn build_weight(
    spec: &WeightSpec,
    catalog: &SpectralCatalog,
    oversample: usize,
) -> Result<WeightField> {
    let grid = ProductGrid::for_catalog(catalog, oversample)?;
    let q = match spec {
        WeightSpec::Constant { value } => WeightField::constant(grid, *value)?,
        WeightSpec::Rectangle {
            spatial,
            temporal,
            ramp,
            value,
        } => {
            let sp: Vec<(f64, f64)> = spatial.iter().map(|r| (r[0], r[1])).collect();
            WeightField::box_indicator(grid, &sp, (temporal[0], temporal[1]), *ramp)?
                .scaled(*value)?
        }
        WeightSpec::GridFile { path } => WeightField::from_csv_path(path)?,
    };
    q.grid().check_compatible(catalog)?;
    Ok(q)
}

/// Runs the validated task, writing artifacts into `out_dir`.
pub fn run(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let mut art = Artifacts::new(out_dir)?;
    let (status, body) = match v.task {
        Task::Solve => run_solve(v, &mut art)?,
        Task::Gram => run_gram(v, &mut art)?,
        Task::Dalembert => run_dalembert(v, &mut art)?,
        Task::Series => run_series(v, &mut art)?,
        Task::Witness => run_witness(v, &mut art)?,
    };
    let label = match (v.task, status) {
        (_, RunStatus::NotConverged) => "not_converged",
        (Task::Solve, RunStatus::Success) => "converged",
        _ => "ok",
    };
    let result = envelope(v, label, body)?;
    art.write(
        "result.json",
        &(serde_json::to_string_pretty(&result)? + "\n"),
    )?;
    Ok(RunOutcome {
        status,
        out_dir: art.dir,
        files: art.files,
        result,
    })
}

fn run_solve(v: &Validated, art: &mut Artifacts) -> Result<(RunStatus, Value)> {
    if let Some(reason) = &v.refusal {
        return Err(Error::Refused(reason.clone()));
    }
    let cfg = &v.config;
    let cat = build_catalog(v)?;
    let spec = cfg.weight.as_ref().expect("validated");
    let q = build_weight(spec, &cat, cfg.grid.oversample)?;
    let nonlinearity = cfg.nonlinearity.clone().expect("validated");
    let ctx = Arc::new(EnergyContext::new(
        Arc::clone(&cat),
        q,
        nonlinearity.clone(),
    )?);
    let problem = SaddleProblem::new(Arc::clone(&ctx), cfg.solver.clone())?;
    let gs = match problem.ground_state() {
        Ok(gs) => gs,
        Err(e @ Error::NoCoerciveDirection(_)) => {
            let body = json!({ "error": e.to_string(), "gram": problem.gram() });
            let result = envelope(v, "no_coercive_direction", body)?;
            art.write(
                "result.json",
                &(serde_json::to_string_pretty(&result)? + "\n"),
            )?;
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    let drift = match spec {
        WeightSpec::GridFile { .. } => None,
        _ => {
            let fine_q = build_weight(spec, &cat, 2 * cfg.grid.oversample)?;
            let fine = EnergyContext::new(Arc::clone(&cat), fine_q, nonlinearity)?;
            Some((fine.potential(&gs.u) - ctx.potential(&gs.u)).abs())
        }
    };
    write_solution(art, &cat, &ctx, &gs)?;
    let status = if gs.converged {
        RunStatus::Success
    } else {
        RunStatus::NotConverged
    };
    let body = json!({
        "energy": gs.energy,
        "residual": gs.residual,
        "s_w": gs.s_w,
        "converged": gs.converged,
        "best_start": gs.best_start,
        "outer_iterations": gs.starts.iter().map(|s| s.outer_iters).sum::<usize>(),
        "inner_iterations": gs.starts.iter().map(|s| s.inner_iters).sum::<usize>(),
        "starts": gs.starts,
        "quadrature_drift": drift,
        "catalog": {
            "hash": cat.content_hash(),
            "modes": cat.len(),
            "kernel_dim": cat.kernel_dim(),
            "grid": ctx.grid(),
        },
        "gram": gs.gram,
    });
    Ok((status, body))
}

fn write_solution(
    art: &mut Artifacts,
    cat: &SpectralCatalog,
    ctx: &EnergyContext,
    gs: &GroundStateResult,
) -> Result<()> {
    art.write("catalog.json", &(cat.to_json()? + "\n"))?;
    art.write(
        "coefficients.json",
        &(serde_json::to_string_pretty(&gs.u.export())? + "\n"),
    )?;
    art.write("field.csv", &gs.u.synthesize(ctx.grid())?.to_csv())?;
    let mut log = String::new();
    for rec in &gs.history {
        log.push_str(&serde_json::to_string(rec)?);
        log.push('\n');
    }
    art.write("iterations.jsonl", &log)
}

fn run_gram(v: &Validated, art: &mut Artifacts) -> Result<(RunStatus, Value)> {
    let cfg = &v.config;
    let cat = build_catalog(v)?;
    let q = build_weight(
        cfg.weight.as_ref().expect("validated"),
        &cat,
        cfg.grid.oversample,
    )?;
    let report = kernel_gram(&q, &cat, cfg.solver.eps_ker)?;
    let mut csv = String::from("index,eigenvalue\n");
    for (i, mu) in report.eigenvalues.iter().enumerate() {
        let _ = writeln!(csv, "{i},{mu}");
    }
    art.write("gram_eigenvalues.csv", &csv)?;
    let body = json!({
        "kernel_dim": report.kernel_dim,
        "mu_min": report.mu_min,
        "mu_max": report.mu_max,
        "control_constant": report.control_constant,
        "report": report,
    });
    Ok((RunStatus::Success, body))
}

fn random_kernel_field(cat: &Arc<SpectralCatalog>, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0.0; cat.len()];
    for &i in cat.indices(SpectralClass::Zero) {
        c[i] = StandardNormal.sample(&mut rng);
    }
    SpectralField::from_coeffs(cat, c).expect("finite")
}

fn run_dalembert(v: &Validated, art: &mut Artifacts) -> Result<(RunStatus, Value)> {
    let cfg = &v.config;
    let cat = build_catalog(v)?;
    let u0 = match &cfg.dalembert.field {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let export: FieldExport = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
            export.into_field(&cat)?
        }
        None => random_kernel_field(&cat, cfg.seed),
    };
    let split = dalembert_split(&u0)?;
    let grid = ProductGrid::for_catalog(&cat, cfg.grid.oversample)?;
    let direct = u0.synthesize(&grid)?.values;
    let back = split.reassemble(&grid)?;
    let err = direct
        .iter()
        .zip(&back)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    let samples = 256;
    let mut csv = String::from("s,phi,psi\n");
    for i in 0..samples {
        let s = TAU * i as f64 / samples as f64;
        let _ = writeln!(csv, "{s},{},{}", split.phi.eval(s), split.psi.eval(s));
    }
    art.write("profiles.csv", &csv)?;

    let mut body = json!({
        "reconstruction_error": err,
        "phi": split.phi,
        "psi": split.psi,
    });
    if let Some(spec) = &cfg.weight {
        let n = cfg.dalembert.raster;
        let (raster, margin) = match spec {
            WeightSpec::Constant { value } if *value > 0.0 => (RasterSet::full(n)?, None),
            WeightSpec::Constant { .. } => (RasterSet::empty(n)?, None),
            WeightSpec::Rectangle {
                spatial, temporal, ..
            } => {
                let x = (spatial[0][0], spatial[0][1]);
                let t = (temporal[0], temporal[1]);
                (
                    RasterSet::rectangle(n, x, t)?,
                    Some(rectangle_margin(x.0, x.1, t.0, t.1)?),
                )
            }
            WeightSpec::GridFile { .. } => {
                let q = build_weight(spec, &cat, cfg.grid.oversample)?;
                (
                    RasterSet::superlevel(&q, cfg.dalembert.level * q.max())?,
                    None,
                )
            }
        };
        let (a, b) = xi_eta_infimum(&raster);
        art.write("slices.csv", &raster.slice_csv())?;
        body["slices"] = json!({
            "raster": n,
            "cell_width": raster.cell_width(),
            "inf_a": a,
            "inf_b": b,
            "rectangle_margin": margin,
        });
    }
    Ok((RunStatus::Success, body))
}

fn run_series(v: &Validated, art: &mut Artifacts) -> Result<(RunStatus, Value)> {
    let cfg = &v.config;
    let p = cfg.series_p().expect("validated");
    let s = &cfg.series;
    let report = match cfg.domain {
        Domain::Torus { dim } => {
            let m = v.operator.monomial_power().ok_or_else(|| {
                Error::Config("torus series needs a polyharmonic operator".into())
            })?;
            torus_gap_series(dim, m, p, s.radius)?
        }
        Domain::Sphere { dim } => {
            let (op, default_l) = if v.operator == Operator::klein_gordon(dim)
                && v.operator.monomial_power().is_none()
            {
                (SphereOperator::KleinGordon, 64 * (s.j_max as u64 + 1))
            } else if let Some(m) = v.operator.monomial_power() {
                let l = (16 * (s.j_max as u64 + 1).saturating_pow(m)).min(1 << 22);
                (SphereOperator::Polyharmonic(m), l)
            } else {
                return Err(Error::Config(
                    "sphere series needs a polyharmonic or klein_gordon operator".into(),
                ));
            };
            sphere_embedding_series(dim, op, p, s.j_max, s.l_max.unwrap_or(default_l))?
        }
    };
    art.write("series.csv", &report.to_csv())?;
    Ok((RunStatus::Success, serde_json::to_value(&report)?))
}

fn run_witness(v: &Validated, art: &mut Artifacts) -> Result<(RunStatus, Value)> {
    let m = v.operator.monomial_power().expect("validated");
    let list = noncompact_witness(v.config.domain.dim(), m, v.config.witness_count).map_err(
        |e| match e {
            Error::Unsupported(msg) => Error::Refused(msg),
            other => other,
        },
    )?;
    let mut csv = String::from("k,l,lambda\n");
    for w in &list {
        let k: Vec<String> = w.k.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(csv, "\"({})\",{},{}", k.join(","), w.l, w.lambda);
    }
    art.write("witness.csv", &csv)?;
    Ok((RunStatus::Success, json!({ "witness": list })))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::config::RunConfig;

    fn toy(task: Task) -> Validated {
        RunConfig::from_json(
            r#"{
                "domain": {"kind": "torus", "dim": 1},
                "operator": {"preset": "shifted_laplacian", "shift": "1"},
                "cutoffs": {"k_max": 0, "l_max": 0},
                "nonlinearity": [{"a": 1, "p": 4}],
                "weight": {"kind": "constant", "value": 1}
            }"#,
        )
        .unwrap()
        .validate(Some(task))
        .unwrap()
    }

    #[test]
    fn solve_toy_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&toy(Task::Solve), dir.path()).unwrap();
        assert_eq!(out.exit_code(), 0);
        let c = out.result["solve"]["energy"].as_f64().unwrap();
        assert!((c - PI * PI).abs() < 1e-6);
        for f in [
            "result.json",
            "coefficients.json",
            "field.csv",
            "iterations.jsonl",
            "catalog.json",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        assert_eq!(out.result["config"]["task"], "solve");
    }

    #[test]
    fn gram_constant_weight() {
        let dir = tempfile::tempdir().unwrap();
        let mut v = toy(Task::Gram);
        v.operator = Operator::polyharmonic(1).unwrap();
        v.config.cutoffs = Some(crate::config::Cutoffs { k_max: 3, l_max: 3 });
        let out = run(&v, dir.path()).unwrap();
        assert!((out.result["gram"]["mu_min"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Refused("x".into())), 4);
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::NoCoerciveDirection(2)), 3);
    }
}
