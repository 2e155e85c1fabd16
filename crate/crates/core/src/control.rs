//! Diagnostics for the kernel control inequality `∫|u|² ≤ C ∫ q|u|²`, and the
//! characteristic-slice machinery for the classical wave on `S¹ × S¹`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Domain, Parity, SpatialMode, SpectralCatalog, SpectralClass};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{ProductGrid, Transform, WeightField};

/// A kernel direction removed from the solver because its Gram eigenvalue is
/// below the relative floor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedDirection {
    pub eigenvalue: f64,
    /// Coefficients over the kernel modes, in catalog order.
    pub direction: Vec<f64>,
}

/// The q-weighted Gram matrix of the orthonormal truncated kernel basis.
#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub k_max: u32,
    pub l_max: u32,
    pub kernel_dim: usize,
    /// Catalog indices of the kernel modes, in the row order of `gram`.
    pub kernel_indices: Vec<usize>,
    pub gram: Vec<Vec<f64>>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub mu_min: f64,
    pub mu_max: f64,
    /// `1/μ_min` for this truncation; `0` for an empty kernel and `None` when
    /// `μ_min ≤ 0`.
    pub control_constant: Option<f64>,
    pub eps_ker: f64,
    pub dropped: Vec<DroppedDirection>,
    #[serde(skip)]
    kept: Vec<Vec<f64>>,
}

impl GramReport {
    /// Orthonormal eigenvectors with eigenvalue at or above the floor, as
    /// coefficient vectors over `kernel_indices`.
    pub fn kept_directions(&self) -> &[Vec<f64>] {
        &self.kept
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Assembles `G_ab = ∫ q φ_a φ_b` over the kernel modes by quadrature on the
/// weight's grid and diagonalizes it. Directions with eigenvalue below
/// `eps_ker · μ_max` are reported as dropped.
pub fn kernel_gram(q: &WeightField, catalog: &SpectralCatalog, eps_ker: f64) -> Result<GramReport> {
    if !(eps_ker >= 0.0 && eps_ker.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eps_ker must be >= 0, got {eps_ker}"
        )));
    }
    let transform = Transform::new(catalog, q.grid())?;
    let kernel = catalog.indices(SpectralClass::Zero).to_vec();
    let n = kernel.len();
    if n == 0 {
        return Ok(GramReport {
            k_max: catalog.k_max(),
            l_max: catalog.l_max(),
            kernel_dim: 0,
            kernel_indices: kernel,
            gram: Vec::new(),
            eigenvalues: Vec::new(),
            mu_min: 0.0,
            mu_max: 0.0,
            control_constant: Some(0.0),
            eps_ker,
            dropped: Vec::new(),
            kept: Vec::new(),
        });
    }
    let h = q.grid().quad_weight();
    let samples: Vec<Vec<f64>> = kernel
        .par_iter()
        .map(|&i| transform.mode_samples(i))
        .collect();
    let weighted: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|s| s.iter().zip(q.values()).map(|(a, w)| h * a * w).collect())
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    weighted[a]
                        .iter()
                        .zip(&samples[b])
                        .map(|(x, y)| x * y)
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut mat = DMatrix::from_fn(n, n, |a, b| rows[a][b]);
    // symmetrize away quadrature roundoff
    mat = (&mat + mat.transpose()) * 0.5;
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| mat[(a, b)]).collect())
        .collect();

    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mu_min = eigenvalues[0];
    let mu_max = eigenvalues[n - 1];
    let floor = eps_ker * mu_max;
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for &i in &order {
        let mu = eig.eigenvalues[i];
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        if mu_max <= 0.0 || mu < floor {
            dropped.push(DroppedDirection {
                eigenvalue: mu,
                direction: v,
            });
        } else {
            kept.push(v);
        }
    }
    Ok(GramReport {
        k_max: catalog.k_max(),
        l_max: catalog.l_max(),
        kernel_dim: n,
        kernel_indices: kernel,
        gram,
        eigenvalues,
        mu_min,
        mu_max,
        control_constant: (mu_min > 0.0).then(|| 1.0 / mu_min),
        eps_ker,
        dropped,
        kept,
    })
}

/// A rasterized subset `Ω` of `[0,2π)²` on an `n × n` node grid, indexed by
/// `(x index, t index)`. A node belongs to the set when its coordinates do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterSet {
    n: usize,
    mask: Vec<bool>,
}

/// Membership of `x` in the periodic half-open arc `[a, b)`.
fn in_arc(x: f64, (a, b): (f64, f64)) -> bool {
    if b - a >= TAU {
        return true;
    }
    (x - a).rem_euclid(TAU) < b - a
}

impl RasterSet {
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> bool) -> Result<Self> {
        if n < 64 {
            return Err(Error::InvalidArgument(format!(
                "raster resolution {n} below the minimum of 64"
            )));
        }
        let h = TAU / n as f64;
        let mask = (0..n * n)
            .map(|idx| f((idx / n) as f64 * h, (idx % n) as f64 * h))
            .collect();
        Ok(RasterSet { n, mask })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| false)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// `[a1,b1) × [a2,b2)` taken periodically.
    pub fn rectangle(n: usize, x: (f64, f64), t: (f64, f64)) -> Result<Self> {
        check_rectangle(x.0, x.1, t.0, t.1)?;
        Self::from_fn(n, |xv, tv| in_arc(xv, x) && in_arc(tv, t))
    }

    /// `ω × S¹`.
    pub fn cylinder(n: usize, omega: (f64, f64)) -> Result<Self> {
        Self::rectangle(n, omega, (0.0, TAU))
    }

    /// `{q ≥ level}` sampled on a square `S¹ × S¹` weight grid.
    pub fn superlevel(q: &WeightField, level: f64) -> Result<Self> {
        let g = q.grid();
        if g.spatial_dim != 1 || g.nx != g.nt {
            return Err(Error::InvalidArgument(
                "superlevel rasters need a square S¹ × S¹ grid".into(),
            ));
        }
        let n = g.nx;
        let vals = q.values();
        Self::from_fn(n, |x, t| {
            let j = (x / TAU * n as f64).round() as usize % n;
            let i = (t / TAU * n as f64).round() as usize % n;
            vals[j * n + i] >= level
        })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn cell_width(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn contains(&self, j: usize, i: usize) -> bool {
        self.mask[j * self.n + i]
    }

    /// Slice measures `(|A_ξ|, |B_η|)` at every raster offset `ξ = η = i·h`.
    ///
    /// `Ω̃` is `Ω` together with its translate by `2π` in time in the
    /// direction that makes every characteristic line through `[0,2π)` in
    /// `x` hit it, so both slices reduce to time taken modulo `2π`.
    pub fn slice_measures(&self) -> Vec<(f64, f64, f64)> {
        let n = self.n;
        let h = self.cell_width();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (mut a, mut b) = (0usize, 0usize);
                for j in 0..n {
                    if self.contains(j, (i + n - j) % n) {
                        a += 1;
                    }
                    if self.contains(j, (j + n - i) % n) {
                        b += 1;
                    }
                }
                (i as f64 * h, a as f64 * h, b as f64 * h)
            })
            .collect()
    }

    /// CSV with columns `offset,a_measure,b_measure`.
    pub fn slice_csv(&self) -> String {
        let mut out = String::from("offset,a_measure,b_measure\n");
        for (s, a, b) in self.slice_measures() {
            let _ = writeln!(out, "{s},{a},{b}");
        }
        out
    }
}

/// `(inf_ξ |A_ξ|, inf_η |B_η|)` over the raster offsets.
pub fn xi_eta_infimum(omega: &RasterSet) -> (f64, f64) {
    omega
        .slice_measures()
        .into_iter()
        .fold((f64::INFINITY, f64::INFINITY), |(ma, mb), (_, a, b)| {
            (ma.min(a), mb.min(b))
        })
}

fn check_rectangle(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<()> {
    let ok = |a: f64, b: f64| a.is_finite() && b.is_finite() && a <= b && b - a <= TAU + 1e-12;
    if ok(a1, b1) && ok(a2, b2) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "malformed rectangle [{a1},{b1}]x[{a2},{b2}]"
        )))
    }
}

/// `b1 + b2 − a1 − a2 − 2π`; positive exactly when the rectangle
/// `[a1,b1] × [a2,b2]` is wide enough to control the 1+1 wave kernel.
pub fn rectangle_margin(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<f64> {
    check_rectangle(a1, b1, a2, b2)?;
    Ok(b1 + b2 - a1 - a2 - TAU)
}

/// A `2π`-periodic profile `c + Σ_k (cos_k cos(ks) + sin_k sin(ks))` with
/// plain amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub constant: f64,
    /// `cos[k-1]` multiplies `cos(ks)`.
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Profile {
    fn zeros(k: usize) -> Self {
        Profile {
            constant: 0.0,
            cos: vec![0.0; k],
            sin: vec![0.0; k],
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(self.constant, |acc, (i, (c, d))| {
                let (sn, cs) = ((i + 1) as f64 * s).sin_cos();
                acc + c * cs + d * sn
            })
    }
}

/// Travelling-wave profiles with `u(x,t) = φ(x+t) + ψ(x−t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DalembertSplit {
    pub phi: Profile,
    pub psi: Profile,
}

impl DalembertSplit {
    /// Grid values of `φ(x+t) + ψ(x−t)`.
    pub fn reassemble(&self, grid: &ProductGrid) -> Result<Vec<f64>> {
        if grid.spatial_dim != 1 {
            return Err(Error::IncompatibleGrid("profiles live on S¹ × S¹".into()));
        }
        Ok((0..grid.len())
            .map(|idx| {
                let (x, t) = grid.point(idx);
                self.phi.eval(x[0] + t) + self.psi.eval(x[0] - t)
            })
            .collect())
    }
}

/// Splits a kernel field of the classical wave operator on `S¹ × S¹` into
/// its two travelling profiles. The constant is shared evenly.
pub fn dalembert_split(u0: &SpectralField) -> Result<DalembertSplit> {
    let cat = u0.catalog();
    if *cat.domain() != Domain::circle() || cat.operator().monomial_power() != Some(1) {
        return Err(Error::InvalidArgument(
            "d'Alembert split needs the classical wave on S¹ × S¹".into(),
        ));
    }
    let kmax = cat.k_max().min(cat.l_max()) as usize;
    let mut phi = Profile::zeros(kmax);
    let mut psi = Profile::zeros(kmax);
    let c0 = 1.0 / TAU;
    let c1 = 1.0 / PI;
    for (mode, &a) in cat.modes().iter().zip(u0.coeffs()) {
        if a == 0.0 {
            continue;
        }
        if mode.class != SpectralClass::Zero {
            return Err(Error::InvalidField(format!(
                "non-kernel coefficient {a} on mode with eigenvalue {}",
                mode.eigenvalue
            )));
        }
        let SpatialMode::Torus { freq, parity } = &mode.key.spatial else {
            unreachable!("circle catalog");
        };
        let k = freq[0] as usize;
        if k == 0 {
            phi.constant += 0.5 * c0 * a;
            psi.constant += 0.5 * c0 * a;
            continue;
        }
        // amplitude of the product of the two normalized factors, halved by
        // the product-to-sum identities
        let amp = 0.5 * c1 * a;
        let slot = k - 1;
        match (parity[0], mode.key.l > 0) {
            (Parity::Cos, true) => {
                phi.cos[slot] += amp;
                psi.cos[slot] += amp;
            }
            (Parity::Cos, false) => {
                phi.sin[slot] += amp;
                psi.sin[slot] -= amp;
            }
            (Parity::Sin, true) => {
                phi.sin[slot] += amp;
                psi.sin[slot] += amp;
            }
            (Parity::Sin, false) => {
                phi.cos[slot] -= amp;
                psi.cos[slot] += amp;
            }
        }
    }
    Ok(DalembertSplit { phi, psi })
}
