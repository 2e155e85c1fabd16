//! Uniform product grids on `T^N × S¹`, sampled weights, and the separable
//! trigonometric transforms between catalog coefficients and grid values.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{Domain, Parity, SpatialMode, SpectralCatalog};
use crate::error::{Error, Result};

/// Uniform nodes `2πj/G` on every circle factor: `nx` per spatial coordinate,
/// `nt` in time. Point values are stored row-major with time fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductGrid {
    pub spatial_dim: usize,
    pub nx: usize,
    pub nt: usize,
}

impl ProductGrid {
    pub fn new(spatial_dim: usize, nx: usize, nt: usize) -> Result<Self> {
        if spatial_dim == 0 || nx == 0 || nt == 0 {
            return Err(Error::IncompatibleGrid(
                "grid sizes must be positive".into(),
            ));
        }
        Ok(ProductGrid {
            spatial_dim,
            nx,
            nt,
        })
    }

    /// The smallest exact grid for `catalog` (`2K+2` and `2L+2` points) times
    /// `oversample`.
    pub fn for_catalog(catalog: &SpectralCatalog, oversample: usize) -> Result<Self> {
        let dim = torus_dim(catalog)?;
        let oversample = oversample.max(1);
        Self::new(
            dim,
            oversample * (2 * catalog.k_max() as usize + 2),
            oversample * (2 * catalog.l_max() as usize + 2),
        )
    }

    pub fn len(&self) -> usize {
        self.nx.pow(self.spatial_dim as u32) * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rectangle-rule weight `(2π/nx)^N · (2π/nt)`.
    pub fn quad_weight(&self) -> f64 {
        (TAU / self.nx as f64).powi(self.spatial_dim as i32) * (TAU / self.nt as f64)
    }

    pub fn x_node(&self, j: usize) -> f64 {
        TAU * j as f64 / self.nx as f64
    }

    pub fn t_node(&self, n: usize) -> f64 {
        TAU * n as f64 / self.nt as f64
    }

    /// Coordinates `(x, t)` of flat point index `idx`.
    pub fn point(&self, idx: usize) -> (Vec<f64>, f64) {
        let n = idx % self.nt;
        let mut rest = idx / self.nt;
        let mut x = vec![0.0; self.spatial_dim];
        for d in (0..self.spatial_dim).rev() {
            x[d] = self.x_node(rest % self.nx);
            rest /= self.nx;
        }
        (x, self.t_node(n))
    }

    /// Checks that analysis/synthesis is exact for every mode of `catalog`.
    pub fn check_compatible(&self, catalog: &SpectralCatalog) -> Result<()> {
        let dim = torus_dim(catalog)?;
        if dim != self.spatial_dim {
            return Err(Error::IncompatibleGrid(format!(
                "grid has {} spatial dimensions, catalog domain {}",
                self.spatial_dim,
                catalog.domain()
            )));
        }
        let need_x = 2 * catalog.k_max() as usize + 2;
        let need_t = 2 * catalog.l_max() as usize + 2;
        if self.nx < need_x || self.nt < need_t {
            return Err(Error::IncompatibleGrid(format!(
                "grid {}x{} too coarse for cutoffs K={} L={} (need at least {need_x}x{need_t})",
                self.nx,
                self.nt,
                catalog.k_max(),
                catalog.l_max()
            )));
        }
        Ok(())
    }

    fn csv_header(&self) -> String {
        let mut h = String::new();
        if self.spatial_dim == 1 {
            h.push_str("x,");
        } else {
            for d in 1..=self.spatial_dim {
                let _ = write!(h, "x{d},");
            }
        }
        h.push_str("t,value\n");
        h
    }
}

fn torus_dim(catalog: &SpectralCatalog) -> Result<usize> {
    match catalog.domain() {
        Domain::Torus { dim } => Ok(*dim),
        Domain::Sphere { .. } => Err(Error::Unsupported(
            "grid transforms exist only for circle and torus domains".into(),
        )),
    }
}

/// Point values on a [`ProductGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub grid: ProductGrid,
    pub values: Vec<f64>,
}

impl GridSamples {
    pub fn new(grid: ProductGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridSamples { grid, values })
    }

    pub fn from_fn(grid: ProductGrid, f: impl Fn(&[f64], f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, t) = grid.point(i);
                f(&x, t)
            })
            .collect();
        GridSamples { grid, values }
    }

    /// Rectangle-rule integral over `M × S¹`.
    pub fn integral(&self) -> f64 {
        self.grid.quad_weight() * self.values.iter().sum::<f64>()
    }

    /// CSV with columns `x..., t, value`.
    pub fn to_csv(&self) -> String {
        samples_csv(&self.grid, &self.values)
    }
}

fn samples_csv(grid: &ProductGrid, values: &[f64]) -> String {
    let mut out = grid.csv_header();
    for (i, v) in values.iter().enumerate() {
        let (x, t) = grid.point(i);
        for xi in x {
            let _ = write!(out, "{xi},");
        }
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

/// Nonnegative weight `q` sampled on a product grid.
///
/// An identically zero weight is representable (it is a legitimate degenerate
/// input for the functional), but the solver rejects it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    grid: ProductGrid,
    values: Vec<f64>,
}

impl WeightField {
    pub fn new(grid: ProductGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidWeight(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            let (x, t) = grid.point(i);
            return Err(Error::InvalidWeight(format!(
                "q must be finite and nonnegative, found {v} at x={x:?}, t={t}"
            )));
        }
        Ok(WeightField { grid, values })
    }

    pub fn constant(grid: ProductGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub fn from_fn(grid: ProductGrid, f: impl Fn(&[f64], f64) -> f64) -> Result<Self> {
        Self::new(grid, GridSamples::from_fn(grid, f).values)
    }

    /// Product of periodic interval indicators, one interval per spatial
    /// coordinate plus one in time, each smoothed by a cosine ramp of width
    /// `ramp` outside the interval (`ramp = 0` gives the sharp indicator).
    pub fn box_indicator(
        grid: ProductGrid,
        spatial: &[(f64, f64)],
        temporal: (f64, f64),
        ramp: f64,
    ) -> Result<Self> {
        if spatial.len() != grid.spatial_dim {
            return Err(Error::InvalidWeight(format!(
                "need {} spatial intervals, got {}",
                grid.spatial_dim,
                spatial.len()
            )));
        }
        for &(a, b) in spatial.iter().chain(std::iter::once(&temporal)) {
            if !(a <= b) {
                return Err(Error::InvalidWeight(format!(
                    "malformed interval [{a}, {b}]"
                )));
            }
        }
        if !(ramp >= 0.0) {
            return Err(Error::InvalidWeight(
                "ramp width must be nonnegative".into(),
            ));
        }
        Self::from_fn(grid, |x, t| {
            let mut v = smoothed_interval(t, temporal, ramp);
            for (xi, &iv) in x.iter().zip(spatial) {
                v *= smoothed_interval(*xi, iv, ramp);
            }
            v
        })
    }

    /// Reads a CSV with header and columns `x..., t, value` listed in grid
    /// order (time fastest). The grid is inferred from the distinct node counts.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidWeight("empty weight file".into()))?;
        let cols = header.split(',').count();
        if cols < 3 {
            return Err(Error::InvalidWeight(
                "weight file needs columns x..., t, value".into(),
            ));
        }
        let dim = cols - 2;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::InvalidWeight(format!("line {}: {e}", lineno + 2)))?;
            if row.len() != cols {
                return Err(Error::InvalidWeight(format!(
                    "line {}: expected {cols} columns",
                    lineno + 2
                )));
            }
            rows.push(row);
        }
        let distinct = |col: usize| {
            let mut v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.len()
        };
        let nt = distinct(dim);
        let nx = distinct(0);
        let grid = ProductGrid::new(dim, nx, nt)?;
        if rows.len() != grid.len() {
            return Err(Error::InvalidWeight(format!(
                "{} rows do not form a {nx}^{dim}x{nt} grid",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let (x, t) = grid.point(i);
            let off = x
                .iter()
                .zip(row)
                .map(|(a, b)| (a - b).abs())
                .fold((t - row[dim]).abs(), f64::max);
            if off > 1e-9 {
                return Err(Error::InvalidWeight(format!(
                    "row {} is not at grid node ({x:?}, {t})",
                    i + 1
                )));
            }
        }
        Self::new(grid, rows.into_iter().map(|r| r[cols - 1]).collect())
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The same weight multiplied by `alpha ≥ 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| alpha * v).collect())
    }

    pub fn to_csv(&self) -> String {
        samples_csv(&self.grid, &self.values)
    }
}

fn smoothed_interval(x: f64, (a, b): (f64, f64), ramp: f64) -> f64 {
    let len = b - a;
    if len >= TAU {
        return 1.0;
    }
    let y = (x - a).rem_euclid(TAU);
    if y <= len + 1e-12 {
        return 1.0;
    }
    let d = (y - len).min(TAU - y);
    if ramp > 0.0 && d < ramp {
        0.5 * (1.0 + (PI * d / ramp).cos())
    } else {
        0.0
    }
}

/// Per-axis real Fourier basis: index 0 is the constant `1/√(2π)`, index
/// `2n-1` is `cos(nθ)/√π` and `2n` is `sin(nθ)/√π`.
fn axis_basis(points: usize, cutoff: usize) -> Vec<f64> {
    let cols = 2 * cutoff + 1;
    let mut m = vec![0.0; points * cols];
    let c0 = 1.0 / TAU.sqrt();
    let c1 = 1.0 / PI.sqrt();
    for g in 0..points {
        let theta = TAU * g as f64 / points as f64;
        let row = &mut m[g * cols..(g + 1) * cols];
        row[0] = c0;
        for n in 1..=cutoff {
            let (s, c) = (n as f64 * theta).sin_cos();
            row[2 * n - 1] = c1 * c;
            row[2 * n] = c1 * s;
        }
    }
    m
}

fn axis_index(freq: u32, parity: Parity) -> usize {
    match (freq, parity) {
        (0, _) => 0,
        (n, Parity::Cos) => 2 * n as usize - 1,
        (n, Parity::Sin) => 2 * n as usize,
    }
}

fn temporal_index(l: i64) -> usize {
    match l {
        0 => 0,
        l if l > 0 => 2 * l as usize - 1,
        l => 2 * l.unsigned_abs() as usize,
    }
}

/// `out[o, r, i] = Σ_c mat[r, c] · data[o, c, i]` along `axis`.
fn apply_axis(
    data: &[f64],
    shape: &mut [usize],
    axis: usize,
    mat: &[f64],
    rows: usize,
) -> Vec<f64> {
    let cols = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    for o in 0..outer {
        let src = &data[o * cols * inner..(o + 1) * cols * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for r in 0..rows {
            let mrow = &mat[r * cols..(r + 1) * cols];
            let drow = &mut dst[r * inner..(r + 1) * inner];
            for (c, &w) in mrow.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let srow = &src[c * inner..(c + 1) * inner];
                for (d, s) in drow.iter_mut().zip(srow) {
                    *d += w * s;
                }
            }
        }
    }
    shape[axis] = rows;
    out
}

fn transpose(mat: &[f64], rows: usize, cols: usize, scale: f64) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = scale * mat[r * cols + c];
        }
    }
    t
}

/// Separable synthesis/analysis between a torus catalog and a compatible grid.
#[derive(Debug, Clone)]
pub struct Transform {
    grid: ProductGrid,
    dim: usize,
    nk: usize,
    nl: usize,
    x_synth: Vec<f64>,
    t_synth: Vec<f64>,
    x_anal: Vec<f64>,
    t_anal: Vec<f64>,
    offsets: Vec<usize>,
}

impl Transform {
    pub fn new(catalog: &SpectralCatalog, grid: &ProductGrid) -> Result<Self> {
        grid.check_compatible(catalog)?;
        let dim = grid.spatial_dim;
        let k = catalog.k_max() as usize;
        let l = catalog.l_max() as usize;
        let nk = 2 * k + 1;
        let nl = 2 * l + 1;
        let x_synth = axis_basis(grid.nx, k);
        let t_synth = axis_basis(grid.nt, l);
        let x_anal = transpose(&x_synth, grid.nx, nk, TAU / grid.nx as f64);
        let t_anal = transpose(&t_synth, grid.nt, nl, TAU / grid.nt as f64);
        let offsets = catalog
            .modes()
            .iter()
            .map(|m| match &m.key.spatial {
                SpatialMode::Torus { freq, parity } => {
                    let s = freq
                        .iter()
                        .zip(parity)
                        .fold(0, |acc, (&f, &p)| acc * nk + axis_index(f, p));
                    s * nl + temporal_index(m.key.l)
                }
                SpatialMode::Sphere { .. } => unreachable!("torus catalog"),
            })
            .collect();
        Ok(Transform {
            grid: *grid,
            dim,
            nk,
            nl,
            x_synth,
            t_synth,
            x_anal,
            t_anal,
            offsets,
        })
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.offsets.len()
    }

    /// Grid values of `Σ a_m φ_m`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.offsets.len());
        let mut shape: Vec<usize> = vec![self.nk; self.dim];
        shape.push(self.nl);
        let mut data = vec![0.0; shape.iter().product()];
        for (&off, &a) in self.offsets.iter().zip(coeffs) {
            data[off] = a;
        }
        for axis in 0..self.dim {
            data = apply_axis(&data, &mut shape, axis, &self.x_synth, self.grid.nx);
        }
        apply_axis(&data, &mut shape, self.dim, &self.t_synth, self.grid.nt)
    }

    /// Grid values of the single basis function `φ_idx`.
    pub fn mode_samples(&self, idx: usize) -> Vec<f64> {
        let mut off = self.offsets[idx];
        let it = off % self.nl;
        off /= self.nl;
        let mut ix = vec![0; self.dim];
        for slot in ix.iter_mut().rev() {
            *slot = off % self.nk;
            off /= self.nk;
        }
        let (nx, nt) = (self.grid.nx, self.grid.nt);
        let mut vals = vec![1.0];
        for &i in &ix {
            let col: Vec<f64> = (0..nx).map(|g| self.x_synth[g * self.nk + i]).collect();
            vals = vals
                .iter()
                .flat_map(|v| col.iter().map(move |c| v * c))
                .collect();
        }
        let col: Vec<f64> = (0..nt).map(|n| self.t_synth[n * self.nl + it]).collect();
        vals.iter()
            .flat_map(|v| col.iter().map(move |c| v * c))
            .collect()
    }

    /// Rectangle-rule inner products `∫ v φ_m` for every catalog mode.
    pub fn analyze(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.grid.len());
        let mut shape: Vec<usize> = vec![self.grid.nx; self.dim];
        shape.push(self.grid.nt);
        let mut data = values.to_vec();
        for axis in 0..self.dim {
            data = apply_axis(&data, &mut shape, axis, &self.x_anal, self.nk);
        }
        let data = apply_axis(&data, &mut shape, self.dim, &self.t_anal, self.nl);
        self.offsets.iter().map(|&off| data[off]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Domain, Operator};

    fn circle(k: u32, l: u32) -> SpectralCatalog {
        SpectralCatalog::build(Domain::circle(), Operator::polyharmonic(1).unwrap(), k, l).unwrap()
    }

    #[test]
    fn grid_points_and_weights() {
        let g = ProductGrid::new(2, 4, 8).unwrap();
        assert_eq!(g.len(), 128);
        assert!((g.quad_weight() * g.len() as f64 - TAU.powi(3)).abs() < 1e-12);
        let (x, t) = g.point(8 * 4 + 3);
        assert_eq!(x, vec![g.x_node(1), g.x_node(0)]);
        assert_eq!(t, g.t_node(3));
    }

    #[test]
    fn coarse_grid_rejected() {
        let cat = circle(3, 2);
        assert!(ProductGrid::new(1, 7, 6)
            .unwrap()
            .check_compatible(&cat)
            .is_err());
        assert!(ProductGrid::new(1, 8, 5)
            .unwrap()
            .check_compatible(&cat)
            .is_err());
        assert!(ProductGrid::new(1, 8, 6)
            .unwrap()
            .check_compatible(&cat)
            .is_ok());
        assert!(ProductGrid::new(2, 8, 6)
            .unwrap()
            .check_compatible(&cat)
            .is_err());
    }

    #[test]
    fn smoothed_interval_shape() {
        assert_eq!(smoothed_interval(1.0, (0.0, 2.0), 0.1), 1.0);
        assert_eq!(smoothed_interval(3.0, (0.0, 2.0), 0.1), 0.0);
        assert!((smoothed_interval(2.05, (0.0, 2.0), 0.1) - 0.5).abs() < 1e-12);
        // wraps around 2π
        assert_eq!(smoothed_interval(0.1, (5.0, 7.0), 0.0), 1.0);
        assert!((smoothed_interval(TAU - 0.05, (0.0, 1.0), 0.1) - 0.5).abs() < 1e-12);
        assert_eq!(smoothed_interval(4.0, (0.0, TAU), 0.0), 1.0);
    }

    #[test]
    fn weight_validation() {
        let g = ProductGrid::new(1, 4, 4).unwrap();
        assert!(WeightField::constant(g, -1.0).is_err());
        assert!(WeightField::constant(g, f64::NAN).is_err());
        assert!(WeightField::constant(g, 0.0).unwrap().is_trivial());
        assert!(WeightField::new(g, vec![1.0; 3]).is_err());
    }

    #[test]
    fn weight_csv_round_trip_and_negative_rejected() {
        let g = ProductGrid::new(1, 4, 6).unwrap();
        let q = WeightField::box_indicator(g, &[(0.0, 2.0)], (1.0, 4.0), 0.3).unwrap();
        let back = WeightField::from_csv_str(&q.to_csv()).unwrap();
        assert_eq!(back.grid(), q.grid());
        for (a, b) in back.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let bad = q.to_csv().replacen(",1\n", ",-1\n", 1);
        let err = WeightField::from_csv_str(&bad).unwrap_err();
        assert!(matches!(err, Error::InvalidWeight(_)), "{err}");
    }

    #[test]
    fn analysis_inverts_synthesis_on_torus() {
        let cat = SpectralCatalog::build(
            Domain::torus(2).unwrap(),
            Operator::polyharmonic(2).unwrap(),
            2,
            3,
        )
        .unwrap();
        let grid = ProductGrid::for_catalog(&cat, 1).unwrap();
        let tr = Transform::new(&cat, &grid).unwrap();
        let coeffs: Vec<f64> = (0..cat.len())
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let back = tr.analyze(&tr.synthesize(&coeffs));
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_samples_match_synthesis() {
        let cat = SpectralCatalog::build(
            Domain::torus(2).unwrap(),
            Operator::polyharmonic(2).unwrap(),
            2,
            2,
        )
        .unwrap();
        let grid = ProductGrid::for_catalog(&cat, 1).unwrap();
        let tr = Transform::new(&cat, &grid).unwrap();
        for idx in [0, 7, cat.len() / 2, cat.len() - 1] {
            let mut unit = vec![0.0; cat.len()];
            unit[idx] = 1.0;
            let direct = tr.mode_samples(idx);
            for (a, b) in direct.iter().zip(tr.synthesize(&unit)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }
}
