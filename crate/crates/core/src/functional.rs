//! The energy `Φ(u) = ½‖u⁺‖₊² − ½‖u⁻‖₋² − ∫ q F(u)` and its gradient.
//!
//! Everything is evaluated on a fixed product grid with the rectangle rule,
//! so the gradient returned here is the exact gradient of the discrete
//! functional. For integer `p` and enough oversampling the quadrature is exact
//! on the truncated space; for fractional `p` it is an approximation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{SpectralCatalog, SpectralClass};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{ProductGrid, Transform, WeightField};

/// One term `a |s|^{p−2} s` of a quasipolynomial nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub a: f64,
    pub p: f64,
}

/// `f(s) = Σ a_i |s|^{p_i−2} s` with `a_i > 0` and `2 < p_1 < p_2 < …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PowerTerm>", into = "Vec<PowerTerm>")]
pub struct Nonlinearity {
    terms: Vec<PowerTerm>,
}

impl Nonlinearity {
    pub fn new(terms: Vec<PowerTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidNonlinearity("no terms".into()));
        }
        for t in &terms {
            if !(t.a > 0.0 && t.a.is_finite()) {
                return Err(Error::InvalidNonlinearity(format!(
                    "coefficient {} must be > 0",
                    t.a
                )));
            }
            if !(t.p > 2.0 && t.p.is_finite()) {
                return Err(Error::InvalidNonlinearity(format!(
                    "exponent {} must be > 2",
                    t.p
                )));
            }
        }
        if terms.windows(2).any(|w| w[0].p >= w[1].p) {
            return Err(Error::InvalidNonlinearity(
                "exponents must be strictly increasing".into(),
            ));
        }
        Ok(Nonlinearity { terms })
    }

    pub fn pure_power(p: f64) -> Result<Self> {
        Self::new(vec![PowerTerm { a: 1.0, p }])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    /// The dominant exponent `p = max p_i`.
    pub fn p(&self) -> f64 {
        self.terms.last().expect("nonempty").p
    }

    /// `Some(p)` for a single term with `a = 1`.
    pub fn as_pure_power(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [t] if t.a == 1.0 => Some(t.p),
            _ => None,
        }
    }

    /// `(f(s), F(s))` with `F(s) = Σ (a_i/p_i) |s|^{p_i}`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let abs = s.abs();
        if abs == 0.0 {
            return (0.0, 0.0);
        }
        self.terms.iter().fold((0.0, 0.0), |(f, prim), t| {
            let pow = abs.powf(t.p - 2.0);
            (f + t.a * pow * s, prim + t.a / t.p * pow * abs * abs)
        })
    }

    /// `(f(s), F(s), f'(s))`.
    pub fn eval_full(&self, s: f64) -> (f64, f64, f64) {
        let abs = s.abs();
        if abs == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        self.terms.iter().fold((0.0, 0.0, 0.0), |(f, prim, df), t| {
            let pow = t.a * abs.powf(t.p - 2.0);
            (
                f + pow * s,
                prim + pow * abs * abs / t.p,
                df + (t.p - 1.0) * pow,
            )
        })
    }

    /// `(f(s), f'(s))`.
    pub fn eval_with_derivative(&self, s: f64) -> (f64, f64) {
        let abs = s.abs();
        if abs == 0.0 {
            return (0.0, 0.0);
        }
        self.terms.iter().fold((0.0, 0.0), |(f, df), t| {
            let pow = abs.powf(t.p - 2.0);
            (f + t.a * pow * s, df + t.a * (t.p - 1.0) * pow)
        })
    }
}

impl TryFrom<Vec<PowerTerm>> for Nonlinearity {
    type Error = Error;
    fn try_from(terms: Vec<PowerTerm>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<Nonlinearity> for Vec<PowerTerm> {
    fn from(n: Nonlinearity) -> Self {
        n.terms
    }
}

/// Everything needed to evaluate `Φ` on a catalog: the grid, the sampled
/// weight and the nonlinearity.
#[derive(Debug, Clone)]
pub struct EnergyContext {
    catalog: Arc<SpectralCatalog>,
    transform: Transform,
    weight: WeightField,
    nonlinearity: Nonlinearity,
    eigenvalues: Vec<f64>,
    /// quadrature weight × q at each grid point
    quad_q: Vec<f64>,
}

impl EnergyContext {
    pub fn new(
        catalog: Arc<SpectralCatalog>,
        weight: WeightField,
        nonlinearity: Nonlinearity,
    ) -> Result<Self> {
        let transform = Transform::new(&catalog, weight.grid())?;
        let h = weight.grid().quad_weight();
        let quad_q = weight.values().iter().map(|q| h * q).collect();
        let eigenvalues = catalog.eigenvalues_f64();
        Ok(EnergyContext {
            catalog,
            transform,
            weight,
            nonlinearity,
            eigenvalues,
            quad_q,
        })
    }

    pub fn catalog(&self) -> &Arc<SpectralCatalog> {
        &self.catalog
    }

    pub fn grid(&self) -> &ProductGrid {
        self.transform.grid()
    }

    pub fn weight(&self) -> &WeightField {
        &self.weight
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// The same problem with `q` replaced by `alpha · q`.
    pub fn with_scaled_weight(&self, alpha: f64) -> Result<Self> {
        Self::new(
            Arc::clone(&self.catalog),
            self.weight.scaled(alpha)?,
            self.nonlinearity.clone(),
        )
    }

    /// `I` evaluated on grid values of `u`.
    pub(crate) fn potential_on_grid(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.quad_q)
            .filter(|(_, w)| **w != 0.0)
            .map(|(&u, w)| w * self.nonlinearity.eval(u).1)
            .sum()
    }

    /// `I(u) = ∫ q F(u)`.
    pub fn potential(&self, u: &SpectralField) -> f64 {
        self.potential_on_grid(&self.transform.synthesize(u.coeffs()))
    }

    /// `½Σ λ a²` over the nonkernel modes, i.e. `½‖u⁺‖₊² − ½‖u⁻‖₋²`.
    pub fn quadratic_part(&self, u: &SpectralField) -> f64 {
        0.5 * u
            .coeffs()
            .iter()
            .zip(&self.eigenvalues)
            .map(|(a, l)| l * a * a)
            .sum::<f64>()
    }

    /// `Φ(u)`.
    pub fn energy(&self, u: &SpectralField) -> f64 {
        let norms = u.energy_norms();
        0.5 * (norms.plus * norms.plus - norms.minus * norms.minus) - self.potential(u)
    }

    /// Coefficients of `I'(u)`: `g_m = ∫ q f(u) φ_m`.
    pub fn potential_gradient(&self, u: &SpectralField) -> Vec<f64> {
        let values = self.transform.synthesize(u.coeffs());
        self.potential_gradient_on_grid(&values)
    }

    pub(crate) fn potential_gradient_on_grid(&self, values: &[f64]) -> Vec<f64> {
        let h = self.grid().quad_weight();
        let qf: Vec<f64> = values
            .iter()
            .zip(&self.quad_q)
            .map(|(&u, w)| {
                if *w == 0.0 {
                    0.0
                } else {
                    w / h * self.nonlinearity.eval(u).0
                }
            })
            .collect();
        self.transform.analyze(&qf)
    }

    /// Coefficients of `Φ'(u)`: `λ a − g` off the kernel and `−g` on it, so
    /// that `⟨Φ'(u), v⟩_{ℓ²}` is the directional derivative along `v`.
    pub fn energy_gradient(&self, u: &SpectralField) -> SpectralField {
        let g = self.potential_gradient(u);
        let coeffs = u
            .coeffs()
            .iter()
            .zip(&self.eigenvalues)
            .zip(g)
            .map(|((a, l), g)| l * a - g)
            .collect();
        SpectralField::from_coeffs(&self.catalog, coeffs).expect("gradient is finite")
    }
}

/// `sqrt(Σ_{λ≠0} g²/|λ| + Σ_{λ=0} g²)`: the dual of `‖·‖_±` on the signed
/// parts and plain ℓ² on the kernel coordinates.
pub fn residual_dual_norm(g: &SpectralField) -> f64 {
    g.catalog()
        .modes()
        .iter()
        .zip(g.coeffs())
        .map(|(m, c)| match m.class {
            SpectralClass::Zero => c * c,
            _ => c * c / m.eigenvalue_f64().abs(),
        })
        .sum::<f64>()
        .sqrt()
}
