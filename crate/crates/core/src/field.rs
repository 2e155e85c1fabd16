//! Truncated functions on `M × S¹` as coefficient vectors over a catalog.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{SpectralCatalog, SpectralClass};
use crate::error::{Error, Result};
use crate::grid::{GridSamples, ProductGrid, Transform, WeightField};

/// `u = Σ a_m φ_m` in the catalog's L²-orthonormal real basis.
#[derive(Debug, Clone)]
pub struct SpectralField {
    catalog: Arc<SpectralCatalog>,
    coeffs: Vec<f64>,
}

/// `(‖u⁺‖₊, ‖u⁻‖₋, ‖u‖_{L²})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyNorms {
    pub plus: f64,
    pub minus: f64,
    pub l2: f64,
}

impl SpectralField {
    pub fn zeros(catalog: &Arc<SpectralCatalog>) -> Self {
        SpectralField {
            catalog: Arc::clone(catalog),
            coeffs: vec![0.0; catalog.len()],
        }
    }

    pub fn from_coeffs(catalog: &Arc<SpectralCatalog>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != catalog.len() {
            return Err(Error::InvalidField(format!(
                "{} coefficients for a catalog of {} modes",
                coeffs.len(),
                catalog.len()
            )));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidField("non-finite coefficient".into()));
        }
        Ok(SpectralField {
            catalog: Arc::clone(catalog),
            coeffs,
        })
    }

    /// Single-mode field `a · φ_idx`.
    pub fn unit(catalog: &Arc<SpectralCatalog>, idx: usize, a: f64) -> Self {
        let mut f = Self::zeros(catalog);
        f.coeffs[idx] = a;
        f
    }

    pub fn catalog(&self) -> &Arc<SpectralCatalog> {
        &self.catalog
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    fn same_catalog(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.catalog, &other.catalog) || self.catalog.len() == other.catalog.len(),
            "fields over different catalogs"
        );
    }

    /// `P⁺u`, `P⁰u` or `P⁻u`.
    pub fn project(&self, part: SpectralClass) -> Self {
        let mut out = Self::zeros(&self.catalog);
        for &i in self.catalog.indices(part) {
            out.coeffs[i] = self.coeffs[i];
        }
        out
    }

    pub fn energy_norms(&self) -> EnergyNorms {
        let (mut plus, mut minus, mut l2) = (0.0, 0.0, 0.0);
        for (m, a) in self.catalog.modes().iter().zip(&self.coeffs) {
            let a2 = a * a;
            l2 += a2;
            match m.class {
                SpectralClass::Plus => plus += m.eigenvalue_f64() * a2,
                SpectralClass::Minus => minus -= m.eigenvalue_f64() * a2,
                SpectralClass::Zero => {}
            }
        }
        EnergyNorms {
            plus: plus.sqrt(),
            minus: minus.sqrt(),
            l2: l2.sqrt(),
        }
    }

    /// `L_A u`, acting diagonally.
    pub fn wave_apply(&self) -> Self {
        let coeffs = self
            .catalog
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, a)| m.eigenvalue_f64() * a)
            .collect();
        SpectralField {
            catalog: Arc::clone(&self.catalog),
            coeffs,
        }
    }

    /// L² inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.same_catalog(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `⟨P⁺u, P⁺v⟩₊`.
    pub fn plus_inner(&self, other: &Self) -> f64 {
        self.weighted_inner(other, SpectralClass::Plus)
    }

    /// `⟨P⁻u, P⁻v⟩₋`.
    pub fn minus_inner(&self, other: &Self) -> f64 {
        self.weighted_inner(other, SpectralClass::Minus)
    }

    fn weighted_inner(&self, other: &Self, class: SpectralClass) -> f64 {
        self.same_catalog(other);
        self.catalog
            .indices(class)
            .iter()
            .map(|&i| {
                self.catalog.mode(i).eigenvalue_f64().abs() * self.coeffs[i] * other.coeffs[i]
            })
            .sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|a| *a *= s);
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.same_catalog(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn synthesize(&self, grid: &ProductGrid) -> Result<GridSamples> {
        let tr = Transform::new(&self.catalog, grid)?;
        GridSamples::new(*grid, tr.synthesize(&self.coeffs))
    }

    /// Projects grid values onto the catalog by rectangle-rule quadrature.
    pub fn analyze(samples: &GridSamples, catalog: &Arc<SpectralCatalog>) -> Result<Self> {
        let tr = Transform::new(catalog, &samples.grid)?;
        Self::from_coeffs(catalog, tr.analyze(&samples.values))
    }

    /// `‖u‖₀ = (∫ q |u⁰|^p)^{1/p}` by quadrature on the weight's grid.
    pub fn norm_zero(&self, q: &WeightField, p: f64) -> Result<f64> {
        if !(p > 2.0) {
            return Err(Error::InvalidArgument(format!("‖·‖₀ needs p > 2, got {p}")));
        }
        let kernel = self.project(SpectralClass::Zero);
        if kernel.coeffs.iter().all(|&a| a == 0.0) {
            return Ok(0.0);
        }
        let u0 = kernel.synthesize(q.grid())?;
        let sum: f64 = u0
            .values
            .iter()
            .zip(q.values())
            .map(|(u, w)| w * u.abs().powf(p))
            .sum();
        Ok((q.grid().quad_weight() * sum).powf(1.0 / p))
    }

    pub fn export(&self) -> FieldExport {
        FieldExport {
            catalog_hash: self.catalog.content_hash(),
            coefficients: self.coeffs.clone(),
        }
    }
}

/// JSON form of a field: the owning catalog's hash and the coefficient array.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldExport {
    pub catalog_hash: String,
    pub coefficients: Vec<f64>,
}

impl FieldExport {
    /// Rebuilds the field, refusing a catalog with a different hash.
    pub fn into_field(self, catalog: &Arc<SpectralCatalog>) -> Result<SpectralField> {
        if self.catalog_hash != catalog.content_hash() {
            return Err(Error::InvalidField(format!(
                "field belongs to catalog {}, not {}",
                self.catalog_hash,
                catalog.content_hash()
            )));
        }
        SpectralField::from_coeffs(catalog, self.coefficients)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::catalog::{Domain, ModeKey, Operator, Parity, Rational, SpatialMode};

    fn catalog(op: Operator, k: u32, l: u32) -> Arc<SpectralCatalog> {
        Arc::new(SpectralCatalog::build(Domain::circle(), op, k, l).unwrap())
    }

    fn key(k: u32, parity: Parity, l: i64) -> ModeKey {
        ModeKey {
            spatial: SpatialMode::torus(vec![k], vec![parity]),
            l,
        }
    }

    #[test]
    fn projections_partition_the_field() {
        let cat = catalog(Operator::polyharmonic(2).unwrap(), 2, 4);
        let u = SpectralField::from_coeffs(&cat, (0..cat.len()).map(|i| i as f64 - 7.0).collect())
            .unwrap();
        let parts = [
            SpectralClass::Plus,
            SpectralClass::Zero,
            SpectralClass::Minus,
        ];
        let mut sum = SpectralField::zeros(&cat);
        for c in parts {
            sum.axpy(1.0, &u.project(c));
        }
        assert_eq!(sum.coeffs(), u.coeffs());

        // mode (k=1, l=1) is resonant for P(τ)=τ²
        let i = cat.position(&key(1, Parity::Cos, 1)).unwrap();
        let single = SpectralField::unit(&cat, i, 3.0);
        assert_eq!(
            single.project(SpectralClass::Zero).coeffs(),
            single.coeffs()
        );
        assert!(single
            .project(SpectralClass::Plus)
            .coeffs()
            .iter()
            .all(|&a| a == 0.0));
    }

    #[test]
    fn norm_examples() {
        let cat = catalog(Operator::polyharmonic(1).unwrap(), 3, 3);
        let i5 = cat.position(&key(3, Parity::Cos, 2)).unwrap();
        let n = SpectralField::unit(&cat, i5, 1.0).energy_norms();
        assert!((n.plus - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!((n.minus, n.l2), (0.0, 1.0));

        let mut u = SpectralField::zeros(&cat);
        u.coeffs_mut()[cat.position(&key(0, Parity::Cos, 1)).unwrap()] = 1.0;
        u.coeffs_mut()[cat.position(&key(0, Parity::Cos, -2)).unwrap()] = 1.0;
        let n = u.energy_norms();
        assert_eq!(n.plus, 0.0);
        assert!((n.minus - 5f64.sqrt()).abs() < 1e-15);

        let k = SpectralField::unit(&cat, cat.position(&key(2, Parity::Sin, -2)).unwrap(), 4.0);
        let n = k.energy_norms();
        assert_eq!((n.plus, n.minus, n.l2), (0.0, 0.0, 4.0));
    }

    #[test]
    fn wave_apply_examples() {
        let cat = catalog(Operator::polyharmonic(1).unwrap(), 3, 3);
        let i5 = cat.position(&key(3, Parity::Cos, 2)).unwrap();
        let w = SpectralField::unit(&cat, i5, 2.0).wave_apply();
        assert_eq!(w.coeffs()[i5], 10.0);
        let ik = cat.position(&key(2, Parity::Cos, -2)).unwrap();
        assert!(SpectralField::unit(&cat, ik, 1.0)
            .wave_apply()
            .coeffs()
            .iter()
            .all(|&a| a == 0.0));
    }

    #[test]
    fn synthesis_examples() {
        let cat = catalog(Operator::polyharmonic(1).unwrap(), 2, 2);
        let grid = ProductGrid::for_catalog(&cat, 2).unwrap();
        let c = SpectralField::unit(&cat, 0, 1.0).synthesize(&grid).unwrap();
        assert!(c.values.iter().all(|v| (v - 1.0 / TAU).abs() < 1e-15));

        let i = cat.position(&key(1, Parity::Cos, 1)).unwrap();
        let s = SpectralField::unit(&cat, i, PI).synthesize(&grid).unwrap();
        for (idx, v) in s.values.iter().enumerate() {
            let (x, t) = grid.point(idx);
            assert!((v - x[0].cos() * t.cos()).abs() < 1e-14);
        }

        // sin(x)·sin(2t): spatial sin parity, temporal l = -2
        let i = cat.position(&key(1, Parity::Sin, -2)).unwrap();
        let s = SpectralField::unit(&cat, i, PI).synthesize(&grid).unwrap();
        for (idx, v) in s.values.iter().enumerate() {
            let (x, t) = grid.point(idx);
            assert!((v - x[0].sin() * (2.0 * t).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn analysis_examples() {
        let cat = catalog(Operator::polyharmonic(1).unwrap(), 1, 2);
        let grid = ProductGrid::for_catalog(&cat, 1).unwrap();
        let zero = GridSamples::new(grid, vec![0.0; grid.len()]).unwrap();
        let a = SpectralField::analyze(&zero, &cat).unwrap();
        assert!(a.coeffs().iter().all(|&c| c == 0.0));

        for m0 in 0..cat.len() {
            let s = SpectralField::unit(&cat, m0, 1.0)
                .synthesize(&grid)
                .unwrap();
            let a = SpectralField::analyze(&s, &cat).unwrap();
            for (m, c) in a.coeffs().iter().enumerate() {
                let expect = if m == m0 { 1.0 } else { 0.0 };
                assert!((c - expect).abs() < 1e-12);
            }
        }

        // cos(2x) lies outside K_max = 1: no leakage on a compliant grid.
        let s = GridSamples::from_fn(grid, |x, _| (2.0 * x[0]).cos());
        let a = SpectralField::analyze(&s, &cat).unwrap();
        assert!(a.coeffs().iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn norm_zero_examples() {
        let op = Operator::shifted_laplacian(Rational::from_integer(0));
        let cat = catalog(op, 1, 1);
        let grid = ProductGrid::for_catalog(&cat, 2).unwrap();
        let q1 = WeightField::constant(grid, 1.0).unwrap();
        // the constant mode is resonant for -Δ + ∂_tt
        let a = 0.7;
        let u = SpectralField::unit(&cat, 0, a * TAU);
        let p = 3.5;
        let expect = (TAU * TAU * a.powf(p)).powf(1.0 / p);
        assert!((u.norm_zero(&q1, p).unwrap() - expect).abs() < 1e-12);

        let q0 = WeightField::constant(grid, 0.0).unwrap();
        assert_eq!(u.norm_zero(&q0, p).unwrap(), 0.0);

        let plus = cat.indices(SpectralClass::Plus)[0];
        assert_eq!(
            SpectralField::unit(&cat, plus, 1.0)
                .norm_zero(&q1, p)
                .unwrap(),
            0.0
        );
        assert!(u.norm_zero(&q1, 2.0).is_err());
    }

    #[test]
    fn export_round_trip_checks_catalog() {
        let cat = catalog(Operator::polyharmonic(1).unwrap(), 1, 1);
        let other = catalog(Operator::polyharmonic(2).unwrap(), 1, 1);
        let u = SpectralField::unit(&cat, 2, 1.5);
        let json = serde_json::to_string(&u.export()).unwrap();
        let back: FieldExport = serde_json::from_str(&json).unwrap();
        assert!(back.clone().into_field(&other).is_err());
        assert_eq!(back.into_field(&cat).unwrap().coeffs(), u.coeffs());
    }
}
