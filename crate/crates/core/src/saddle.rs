//! Saddle-point reduction of the strongly indefinite energy.
//!
//! For a direction `w` in the positive space, `Ψ(w)` is the maximum of `Φ`
//! over the half-space `ℝ⁺w ⊕ E⁰ ⊕ E⁻`. The ground state energy is the
//! infimum of `Ψ` over the unit sphere of the positive space, and the
//! maximizer attached to a minimizing `w` is a critical point of `Φ`.
//!
//! The inner maximization is a monotone inexact Newton ascent whose Hessian
//! products are applied matrix-free through the grid transforms. The outer
//! minimization is a Riemannian gradient descent on the sphere with
//! Barzilai–Borwein steps and Armijo backtracking, run from several seeded
//! random starts in parallel.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{SpectralCatalog, SpectralClass};
use crate::control::{kernel_gram, GramReport};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::functional::{residual_dual_norm, EnergyContext};

/// Relative resolution of the inner objective.
pub const ROUNDOFF: f64 = 1e-13;

/// Tolerances, budgets and seeding for [`ground_state`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Inner exit: dual norm and largest coordinate of `∇G` both below this.
    pub tol_inner: f64,
    /// Outer exit: dual norm of the tangential part of `Φ'(m̂(w))` below this.
    pub tol_outer: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub starts: usize,
    /// Angle (in the `‖·‖₊` geometry) of the first outer step.
    pub initial_step: f64,
    /// Largest admissible `‖(t, z)‖` before a start is declared divergent.
    pub divergence_threshold: f64,
    /// Largest admissible inner objective before a start is declared divergent.
    pub energy_threshold: f64,
    /// Kernel Gram directions below `eps_ker · μ_max` are removed.
    pub eps_ker: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_inner: 1e-10,
            tol_outer: 1e-7,
            max_inner: 100,
            max_outer: 500,
            starts: 4,
            initial_step: 0.2,
            divergence_threshold: 1e6,
            energy_threshold: 1e12,
            eps_ker: 1e-8,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("tol_inner", self.tol_inner),
            ("tol_outer", self.tol_outer),
            ("initial_step", self.initial_step),
            ("divergence_threshold", self.divergence_threshold),
            ("energy_threshold", self.energy_threshold),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.eps_ker >= 0.0 && self.eps_ker < 1.0) {
            return Err(Error::Config(format!(
                "eps_ker must lie in [0, 1), got {}",
                self.eps_ker
            )));
        }
        if self.starts == 0 || self.max_inner == 0 {
            return Err(Error::Config(
                "starts and max_inner must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The maximizer of `Φ` on `ℝ⁺w ⊕ E⁰ ⊕ E⁻`.
#[derive(Debug, Clone)]
pub struct SaddleResult {
    pub maximizer: SpectralField,
    /// Coefficient of `w` in the maximizer.
    pub s_w: f64,
    /// `Ψ(w) = Φ(m̂(w))`.
    pub psi: f64,
    pub inner_iters: usize,
    /// Dual norm of the inner gradient at exit.
    pub inner_grad_norm: f64,
    pub converged: bool,
    pub diverged: bool,
    /// Inner objective after every accepted step, starting at the initial
    /// point; nondecreasing up to [`ROUNDOFF`] relative.
    pub ascent: Vec<f64>,
    state: Vec<f64>,
    potential_grad: Vec<f64>,
}

/// One outer iteration of one start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub start: usize,
    pub iter: usize,
    pub psi: f64,
    pub grad_norm: f64,
    pub inner_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartSummary {
    pub start: usize,
    pub converged: bool,
    pub diverged: bool,
    pub psi_initial: f64,
    pub psi_final: f64,
    pub grad_norm: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub u: SpectralField,
    /// Normalized positive direction whose maximizer is `u`.
    pub direction: SpectralField,
    pub energy: f64,
    pub s_w: f64,
    /// Dual norm of `Φ'(u)` over all catalog modes.
    pub residual: f64,
    pub converged: bool,
    pub best_start: usize,
    pub starts: Vec<StartSummary>,
    pub history: Vec<IterationRecord>,
    pub gram: GramReport,
}

/// `w / ‖w‖₊` after discarding everything but the positive coefficients.
pub fn normalize_plus(w: &SpectralField) -> Result<SpectralField> {
    let p = w.project(SpectralClass::Plus);
    let n = p.energy_norms().plus;
    if !(n > 0.0) {
        return Err(Error::InvalidField(
            "direction has no positive component".into(),
        ));
    }
    let mut p = p;
    p.scale(1.0 / n);
    Ok(p)
}

/// The reduced problem on one energy context: the variables of the inner
/// maximization and the geometry of the outer sphere.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    ctx: Arc<EnergyContext>,
    cfg: SolverConfig,
    gram: GramReport,
    plus: Vec<usize>,
    minus: Vec<usize>,
    minus_abs: Vec<f64>,
    kernel: Vec<usize>,
    kept: Vec<Vec<f64>>,
    /// Space-time volume, for the mean curvature in the preconditioner.
    volume: f64,
}

struct InnerPoint {
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    potential_grad: Vec<f64>,
    qfp: Vec<f64>,
}

impl SaddleProblem {
    pub fn new(ctx: Arc<EnergyContext>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let cat = Arc::clone(ctx.catalog());
        let gram = kernel_gram(ctx.weight(), &cat, cfg.eps_ker)?;
        let plus = cat.indices(SpectralClass::Plus).to_vec();
        if plus.is_empty() {
            return Err(Error::InvalidArgument(
                "catalog has no positive modes".into(),
            ));
        }
        let minus = cat.indices(SpectralClass::Minus).to_vec();
        let minus_abs = minus
            .iter()
            .map(|&i| cat.mode(i).eigenvalue_f64().abs())
            .collect();
        let kernel = gram.kernel_indices.clone();
        let kept = gram.kept_directions().to_vec();
        let g = ctx.grid();
        let volume = g.quad_weight() * g.len() as f64;
        Ok(SaddleProblem {
            ctx,
            cfg,
            gram,
            plus,
            minus,
            minus_abs,
            kernel,
            kept,
            volume,
        })
    }

    pub fn context(&self) -> &Arc<EnergyContext> {
        &self.ctx
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn gram(&self) -> &GramReport {
        &self.gram
    }

    fn catalog(&self) -> &Arc<SpectralCatalog> {
        self.ctx.catalog()
    }

    fn nvar(&self) -> usize {
        1 + self.kept.len() + self.minus.len()
    }

    fn to_full(&self, w: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = w.iter().map(|a| a * x[0]).collect();
        let k = self.kept.len();
        for (v, &y) in self.kept.iter().zip(&x[1..=k]) {
            for (&idx, &c) in self.kernel.iter().zip(v) {
                out[idx] += y * c;
            }
        }
        for (&idx, &z) in self.minus.iter().zip(&x[1 + k..]) {
            out[idx] += z;
        }
        out
    }

    fn adjoint(&self, w: &[f64], r: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nvar());
        out.push(self.plus.iter().map(|&i| r[i] * w[i]).sum());
        for v in &self.kept {
            out.push(self.kernel.iter().zip(v).map(|(&i, c)| r[i] * c).sum());
        }
        out.extend(self.minus.iter().map(|&i| r[i]));
        out
    }

    fn evaluate(&self, w: &[f64], x: Vec<f64>) -> InnerPoint {
        let full = self.to_full(w, &x);
        let tr = self.ctx.transform();
        let ugrid = tr.synthesize(&full);
        let nl = self.ctx.nonlinearity();
        let q = self.ctx.weight().values();
        let mut qf = vec![0.0; ugrid.len()];
        let mut qfp = vec![0.0; ugrid.len()];
        let mut potential = 0.0;
        for (i, (&u, &qi)) in ugrid.iter().zip(q).enumerate() {
            if qi == 0.0 {
                continue;
            }
            let (f, prim, df) = nl.eval_full(u);
            potential += qi * prim;
            qf[i] = qi * f;
            qfp[i] = qi * df;
        }
        potential *= self.ctx.grid().quad_weight();
        let potential_grad = tr.analyze(&qf);
        let k = self.kept.len();
        let zsq: f64 = self
            .minus_abs
            .iter()
            .zip(&x[1 + k..])
            .map(|(l, z)| l * z * z)
            .sum();
        let value = 0.5 * x[0] * x[0] - 0.5 * zsq - potential;
        let mut grad = self.adjoint(w, &potential_grad);
        for g in grad.iter_mut() {
            *g = -*g;
        }
        grad[0] += x[0];
        for ((g, l), z) in grad[1 + k..]
            .iter_mut()
            .zip(&self.minus_abs)
            .zip(&x[1 + k..])
        {
            *g -= l * z;
        }
        InnerPoint {
            x,
            value,
            grad,
            potential_grad,
            qfp,
        }
    }

    /// `sqrt(g_t² + |g_ker|² + Σ g_z²/|λ|)` and the largest coordinate.
    fn inner_norms(&self, grad: &[f64]) -> (f64, f64) {
        let k = self.kept.len();
        let mut dual: f64 = grad[..=k].iter().map(|g| g * g).sum();
        dual += grad[1 + k..]
            .iter()
            .zip(&self.minus_abs)
            .map(|(g, l)| g * g / l)
            .sum::<f64>();
        let sup = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        (dual.sqrt(), sup)
    }

    /// `−∇²G · d`.
    fn neg_hessian_apply(&self, w: &[f64], pt: &InnerPoint, d: &[f64]) -> Vec<f64> {
        let tr = self.ctx.transform();
        let dgrid = tr.synthesize(&self.to_full(w, d));
        let weighted: Vec<f64> = dgrid.iter().zip(&pt.qfp).map(|(a, b)| a * b).collect();
        let mut out = self.adjoint(w, &tr.analyze(&weighted));
        let k = self.kept.len();
        out[0] -= d[0];
        for ((o, l), di) in out[1 + k..]
            .iter_mut()
            .zip(&self.minus_abs)
            .zip(&d[1 + k..])
        {
            *o += l * di;
        }
        out
    }

    fn preconditioner(&self, wgrid: &[f64], pt: &InnerPoint) -> Vec<f64> {
        let h = self.ctx.grid().quad_weight();
        let mean = h * pt.qfp.iter().sum::<f64>() / self.volume;
        let att = h * pt
            .qfp
            .iter()
            .zip(wgrid)
            .map(|(a, b)| a * b * b)
            .sum::<f64>()
            - 1.0;
        let k = self.kept.len();
        let floor = 1e-8;
        let mut m = Vec::with_capacity(self.nvar());
        m.push(att.max(floor));
        m.extend(std::iter::repeat_n(mean.max(floor), k));
        m.extend(self.minus_abs.iter().map(|l| l + mean));
        m
    }

    /// Preconditioned CG on `−∇²G d = ∇G`; stops at negative curvature.
    fn newton_direction(
        &self,
        w: &[f64],
        wgrid: &[f64],
        pt: &InnerPoint,
        forcing: f64,
    ) -> Vec<f64> {
        let n = self.nvar();
        let m = self.preconditioner(wgrid, pt);
        let mut d = vec![0.0; n];
        let mut r = pt.grad.clone();
        let mut z: Vec<f64> = r.iter().zip(&m).map(|(a, b)| a / b).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let target = forcing * forcing * rz;
        for it in 0..(n + 10).min(500) {
            let ap = self.neg_hessian_apply(w, pt, &p);
            let curv: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if curv <= 0.0 {
                if it == 0 {
                    return z;
                }
                break;
            }
            let alpha = rz / curv;
            for i in 0..n {
                d[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / m[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            if rz_new <= target {
                break;
            }
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        d
    }

    fn check_direction(&self, w: &SpectralField) -> Result<()> {
        if !Arc::ptr_eq(w.catalog(), self.catalog())
            && w.catalog().content_hash() != self.catalog().content_hash()
        {
            return Err(Error::InvalidField(
                "direction belongs to another catalog".into(),
            ));
        }
        let norms = w.energy_norms();
        let off_plus = w
            .coeffs()
            .iter()
            .enumerate()
            .any(|(i, &a)| a != 0.0 && self.catalog().mode(i).class != SpectralClass::Plus);
        if off_plus || (norms.plus - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidField(
                "direction must be positive-class with unit energy norm".into(),
            ));
        }
        Ok(())
    }

    /// Largest `t` along `t ↦ Φ(tw)` by bracketing and golden-section search;
    /// `None` when the bracket escapes the divergence threshold.
    fn initial_scale(&self, w: &[f64]) -> Option<f64> {
        let tr = self.ctx.transform();
        let wgrid = tr.synthesize(w);
        let phi = |t: f64| {
            let vals: Vec<f64> = wgrid.iter().map(|v| t * v).collect();
            0.5 * t * t - self.ctx.potential_on_grid(&vals)
        };
        let mut hi = 1.0;
        let mut f_hi = phi(hi);
        let mut lo = 0.0;
        loop {
            let next = 2.0 * hi;
            let f_next = phi(next);
            if f_next < f_hi {
                break;
            }
            lo = hi;
            hi = next;
            f_hi = f_next;
            if hi > self.cfg.divergence_threshold || f_hi > self.cfg.energy_threshold {
                return None;
            }
        }
        // maximum lies in [lo, 2·hi]
        let (mut a, mut b) = (lo, 2.0 * hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (phi(c), phi(d));
        while b - a > 1e-10 * b {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = phi(d);
            }
        }
        Some(0.5 * (a + b))
    }

    fn diverged_result(
        &self,
        w: &SpectralField,
        x: Vec<f64>,
        iters: usize,
        ascent: Vec<f64>,
    ) -> SaddleResult {
        let full = self.to_full(w.coeffs(), &x);
        SaddleResult {
            maximizer: SpectralField::from_coeffs(self.catalog(), full)
                .unwrap_or_else(|_| SpectralField::zeros(self.catalog())),
            s_w: x[0],
            psi: f64::INFINITY,
            inner_iters: iters,
            inner_grad_norm: f64::INFINITY,
            converged: false,
            diverged: true,
            ascent,
            state: x,
            potential_grad: Vec::new(),
        }
    }

    fn is_divergent(&self, pt: &InnerPoint) -> bool {
        let norm = pt.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        !(norm <= self.cfg.divergence_threshold && pt.value <= self.cfg.energy_threshold)
    }

    /// Maximizes `Φ` over `ℝ⁺w ⊕ E⁰ ⊕ E⁻`, optionally warm-started from an
    /// earlier result on a nearby direction.
    pub fn inner_maximize(
        &self,
        w: &SpectralField,
        warm: Option<&SaddleResult>,
    ) -> Result<SaddleResult> {
        self.check_direction(w)?;
        let wc = w.coeffs();
        let n = self.nvar();
        let Some(tau) = self.initial_scale(wc) else {
            let mut x = vec![0.0; n];
            x[0] = self.cfg.divergence_threshold;
            return Ok(self.diverged_result(w, x, 0, Vec::new()));
        };
        let mut x0 = vec![0.0; n];
        x0[0] = tau;
        let mut pt = self.evaluate(wc, x0);
        if let Some(prev) = warm.filter(|r| !r.diverged && r.state.len() == n) {
            let cand = self.evaluate(wc, prev.state.clone());
            if cand.x[0] > 0.0 && cand.value > pt.value {
                pt = cand;
            }
        }
        let wgrid = self.ctx.transform().synthesize(wc);
        let mut ascent = vec![pt.value];
        let mut iters = 0;
        let mut converged = false;
        loop {
            if self.is_divergent(&pt) {
                return Ok(self.diverged_result(w, pt.x, iters, ascent));
            }
            let (dual, sup) = self.inner_norms(&pt.grad);
            if dual <= self.cfg.tol_inner && sup <= self.cfg.tol_inner {
                converged = true;
                break;
            }
            if iters >= self.cfg.max_inner {
                break;
            }
            iters += 1;
            let forcing = dual.sqrt().min(0.1);
            let newton = self.newton_direction(wc, &wgrid, &pt, forcing);
            let mut next = self.line_search(wc, &pt, &newton);
            if next.is_none() {
                let m = self.preconditioner(&wgrid, &pt);
                let steep: Vec<f64> = pt.grad.iter().zip(&m).map(|(g, m)| g / m).collect();
                next = self.line_search(wc, &pt, &steep);
            }
            match next {
                Some(p) => {
                    pt = p;
                    ascent.push(pt.value);
                }
                None => {
                    // no representable ascent left: accept when within the
                    // roundoff floor of the tolerance
                    converged = dual <= 100.0 * self.cfg.tol_inner;
                    break;
                }
            }
        }
        let (dual, _) = self.inner_norms(&pt.grad);
        let full = self.to_full(wc, &pt.x);
        Ok(SaddleResult {
            maximizer: SpectralField::from_coeffs(self.catalog(), full)?,
            s_w: pt.x[0],
            psi: pt.value,
            inner_iters: iters,
            inner_grad_norm: dual,
            converged,
            diverged: false,
            ascent,
            state: pt.x,
            potential_grad: pt.potential_grad,
        })
    }

    /// Armijo backtracking along an ascent direction, keeping `t` above a
    /// tenth of its current value.
    fn line_search(&self, w: &[f64], pt: &InnerPoint, d: &[f64]) -> Option<InnerPoint> {
        let slope: f64 = pt.grad.iter().zip(d).map(|(a, b)| a * b).sum();
        if !(slope > 0.0) {
            return None;
        }
        let mut s = 1.0f64;
        if d[0] < 0.0 {
            s = s.min(0.9 * pt.x[0] / -d[0]);
        }
        let (dual, _) = self.inner_norms(&pt.grad);
        for trial in 0..60 {
            let x: Vec<f64> = pt.x.iter().zip(d).map(|(a, b)| a + s * b).collect();
            let cand = self.evaluate(w, x);
            if !cand.value.is_finite() {
                s *= 0.5;
                continue;
            }
            if cand.value >= pt.value + 1e-4 * s * slope && cand.value > pt.value {
                return Some(cand);
            }
            // Near the maximum the predicted increase is below the resolution
            // of G, so a full step is judged by the gradient instead.
            let floor = ROUNDOFF * (1.0 + pt.value.abs());
            if trial == 0
                && cand.value >= pt.value - floor
                && self.inner_norms(&cand.grad).0 < 0.5 * dual
            {
                return Some(cand);
            }
            s *= 0.5;
        }
        None
    }

    /// Riesz representative in `⟨·,·⟩₊` of `h ↦ s_w Φ'(m̂(w))[h]`, projected
    /// onto the tangent space `{h : ⟨h, w⟩₊ = 0}`.
    pub fn psi_gradient(&self, w: &SpectralField, saddle: &SaddleResult) -> SpectralField {
        let cat = self.catalog();
        let s = saddle.s_w;
        let u = saddle.maximizer.coeffs();
        let mut r = vec![0.0; cat.len()];
        for &i in &self.plus {
            let lam = cat.mode(i).eigenvalue_f64();
            r[i] = s * (lam * u[i] - saddle.potential_grad[i]) / lam;
        }
        let mut r = SpectralField::from_coeffs(cat, r).expect("finite gradient");
        let along = r.plus_inner(w);
        r.axpy(-along, w);
        r
    }

    /// A unit positive direction drawn from the seeded stream `start`.
    pub fn random_direction(&self, start: usize) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(start as u64);
        let cat = self.catalog();
        let mut c = vec![0.0; cat.len()];
        for &i in &self.plus {
            let z: f64 = StandardNormal.sample(&mut rng);
            c[i] = z / cat.mode(i).eigenvalue_f64();
        }
        let w = SpectralField::from_coeffs(cat, c).expect("finite");
        normalize_plus(&w).expect("nonzero positive direction")
    }

    /// Outer descent of `Ψ` on the unit sphere from one start direction.
    pub fn descend(&self, start: usize, w0: SpectralField) -> Result<StartRun> {
        let mut w = w0;
        let mut saddle = self.inner_maximize(&w, None)?;
        let mut records = Vec::new();
        let mut summary = StartSummary {
            start,
            converged: false,
            diverged: saddle.diverged,
            psi_initial: saddle.psi,
            psi_final: saddle.psi,
            grad_norm: f64::INFINITY,
            outer_iters: 0,
            inner_iters: saddle.inner_iters,
        };
        if saddle.diverged {
            return Ok(StartRun {
                summary,
                records,
                direction: w,
                saddle,
            });
        }
        let mut prev: Option<(SpectralField, SpectralField)> = None;
        let mut iter = 0;
        loop {
            let grad = self.psi_gradient(&w, &saddle);
            let gnorm = grad.energy_norms().plus;
            let crit = gnorm / saddle.s_w;
            records.push(IterationRecord {
                start,
                iter,
                psi: saddle.psi,
                grad_norm: gnorm,
                inner_iters: saddle.inner_iters,
            });
            summary.grad_norm = gnorm;
            if crit <= self.cfg.tol_outer && saddle.converged {
                summary.converged = true;
                break;
            }
            if iter >= self.cfg.max_outer || gnorm == 0.0 {
                summary.converged = gnorm == 0.0 && saddle.converged;
                break;
            }
            let mut eta = match &prev {
                None => self.cfg.initial_step / gnorm,
                Some((w_old, g_old)) => {
                    let mut sv = w.clone();
                    sv.axpy(-1.0, w_old);
                    let mut yv = grad.clone();
                    yv.axpy(-1.0, g_old);
                    let sy = sv.plus_inner(&yv).abs();
                    let ss = sv.plus_inner(&sv);
                    if sy > 0.0 {
                        ss / sy
                    } else {
                        self.cfg.initial_step / gnorm
                    }
                }
            };
            eta = eta.min(0.5 / gnorm);
            let mut accepted = None;
            for _ in 0..40 {
                let mut cand = w.clone();
                cand.axpy(-eta, &grad);
                let cand = normalize_plus(&cand)?;
                let res = self.inner_maximize(&cand, Some(&saddle))?;
                summary.inner_iters += res.inner_iters;
                if !res.diverged && res.psi <= saddle.psi - 1e-4 * eta * gnorm * gnorm {
                    accepted = Some((cand, res));
                    break;
                }
                eta *= 0.5;
            }
            iter += 1;
            match accepted {
                Some((cand, res)) => {
                    prev = Some((std::mem::replace(&mut w, cand), grad));
                    saddle = res;
                }
                None => {
                    // Ψ cannot be decreased further at working precision
                    summary.converged = crit <= 10.0 * self.cfg.tol_outer && saddle.converged;
                    break;
                }
            }
        }
        summary.outer_iters = iter;
        summary.psi_final = saddle.psi;
        Ok(StartRun {
            summary,
            records,
            direction: w,
            saddle,
        })
    }

    /// Multi-start minimization of `Ψ`; see [`ground_state`].
    pub fn ground_state(&self) -> Result<GroundStateResult> {
        let runs: Vec<StartRun> = (0..self.cfg.starts)
            .into_par_iter()
            .map(|s| self.descend(s, self.random_direction(s)))
            .collect::<Result<_>>()?;
        let best = runs
            .iter()
            .filter(|r| !r.summary.diverged)
            .min_by(|a, b| {
                a.saddle
                    .psi
                    .total_cmp(&b.saddle.psi)
                    .then(a.summary.grad_norm.total_cmp(&b.summary.grad_norm))
                    .then(a.summary.start.cmp(&b.summary.start))
            })
            .ok_or(Error::NoCoerciveDirection(self.cfg.starts))?;
        let u = best.saddle.maximizer.clone();
        let energy = self.ctx.energy(&u);
        let residual = residual_dual_norm(&self.ctx.energy_gradient(&u));
        Ok(GroundStateResult {
            direction: best.direction.clone(),
            s_w: best.saddle.s_w,
            converged: best.summary.converged,
            best_start: best.summary.start,
            u,
            energy,
            residual,
            starts: runs.iter().map(|r| r.summary.clone()).collect(),
            history: runs
                .iter()
                .flat_map(|r| r.records.iter().cloned())
                .collect(),
            gram: self.gram.clone(),
        })
    }
}

/// Outcome of [`SaddleProblem::descend`].
#[derive(Debug, Clone)]
pub struct StartRun {
    pub summary: StartSummary,
    pub records: Vec<IterationRecord>,
    pub direction: SpectralField,
    pub saddle: SaddleResult,
}

/// Maximizes `Φ` over `ℝ⁺w ⊕ E⁰ ⊕ E⁻` for a unit positive direction `w`.
pub fn inner_maximize(
    w: &SpectralField,
    ctx: Arc<EnergyContext>,
    cfg: &SolverConfig,
) -> Result<SaddleResult> {
    SaddleProblem::new(ctx, cfg.clone())?.inner_maximize(w, None)
}

/// Computes the ground state by minimizing `Ψ` over the unit sphere of the
/// positive space from `cfg.starts` seeded random directions.
pub fn ground_state(ctx: Arc<EnergyContext>, cfg: &SolverConfig) -> Result<GroundStateResult> {
    SaddleProblem::new(ctx, cfg.clone())?.ground_state()
}
