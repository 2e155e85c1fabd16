//! Exact eigenvalue catalogs of the generalized wave operator `P(-Δ) + ∂_tt`.
//!
//! A catalog enumerates the real product eigenfunctions `ζ_k ⊗ e_l` of the
//! operator on `M × S¹` up to a spatial and a temporal cutoff, together with
//! their eigenvalues `λ = P(ν̃_k) − l²` in exact rational arithmetic. The sign
//! of `λ` sorts each mode into the positive, kernel or negative spectral part,
//! and since resonances (`λ = 0`) are exactly what populates the kernel, the
//! classification never goes through floating point.
//!
//! Supported spatial manifolds are the flat torus `T^N` (with the circle as
//! `T^1`) and the round sphere `S^N`. Torus modes use the real Fourier basis
//! with a cos/sin parity tag per coordinate. Sphere modes carry only the
//! degree and a degeneracy index, no spherical harmonics are evaluated.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Exact rational scalar used for eigenvalues and operator coefficients.
pub type Rational = Ratio<i128>;

/// The spatial manifold `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Torus { dim: usize },
    Sphere { dim: usize },
}

impl Domain {
    /// The circle, canonically `T^1`.
    pub fn circle() -> Self {
        Domain::Torus { dim: 1 }
    }

    pub fn torus(dim: usize) -> Result<Self> {
        let d = Domain::Torus { dim };
        d.validate()?;
        Ok(d)
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        let d = Domain::Sphere { dim };
        d.validate()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        match *self {
            Domain::Torus { dim } | Domain::Sphere { dim } => dim,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Domain::Torus { dim: 1 })
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::Torus { dim: 1 } => write!(f, "S^1"),
            Domain::Torus { dim } => write!(f, "T^{dim}"),
            Domain::Sphere { dim } => write!(f, "S^{dim}"),
        }
    }
}

/// The spatial operator `A = P(-Δ)` given by the polynomial `P(τ) = Σ c_j τ^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operator {
    coeffs: Vec<Rational>,
}

impl Operator {
    /// Builds `P` from its coefficients in ascending degree. Trailing zeros are
    /// trimmed; the leading coefficient must be positive so that `P(τ) → ∞`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        match coeffs.last() {
            None => Err(Error::InvalidOperator("zero polynomial".into())),
            Some(_) if coeffs.len() < 2 => Err(Error::InvalidOperator(
                "P must be non-constant so that P(τ) → ∞".into(),
            )),
            Some(lead) if !lead.is_positive() => Err(Error::InvalidOperator(
                "leading coefficient must be positive".into(),
            )),
            Some(_) => Ok(Operator { coeffs }),
        }
    }

    /// `(-Δ)^m`, i.e. `P(τ) = τ^m`.
    pub fn polyharmonic(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOperator("power m must be at least 1".into()));
        }
        let mut coeffs = vec![Rational::zero(); m as usize + 1];
        coeffs[m as usize] = Rational::from_integer(1);
        Self::from_coeffs(coeffs)
    }

    /// `-Δ + c`, i.e. `P(τ) = τ + c`.
    pub fn shifted_laplacian(c: Rational) -> Self {
        Operator {
            coeffs: vec![c, Rational::from_integer(1)],
        }
    }

    /// Klein-Gordon operator `-Δ + c_N` on `S^N` with `c_N = ((N-1)/2)²`,
    /// for which `k(k+N-1) + c_N = (k + (N-1)/2)²`.
    pub fn klein_gordon(n: usize) -> Self {
        let half = Rational::new(n as i128 - 1, 2);
        Self::shifted_laplacian(half * half)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Some(m)` if `P(τ) = τ^m`.
    pub fn monomial_power(&self) -> Option<u32> {
        let (lead, rest) = self.coeffs.split_last()?;
        if *lead == Rational::from_integer(1) && rest.iter().all(Zero::is_zero) {
            Some(self.degree() as u32)
        } else {
            None
        }
    }

    /// `Some(c)` if `P(τ) = τ + c`.
    pub fn laplacian_shift(&self) -> Option<Rational> {
        if self.coeffs.len() == 2 && self.coeffs[1] == Rational::from_integer(1) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn eval(&self, tau: Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * tau + c)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·τ")?,
                _ => write!(f, "{c}·τ^{j}")?,
            }
        }
        Ok(())
    }
}

/// Cos/sin tag of a real Fourier factor. Frequency zero is always `Cos`
/// (the constant function).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

/// Spatial part `ζ_k` of a mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialMode {
    /// `Π_i c(freq_i x_i)` with `c ∈ {cos, sin}` chosen by `parity[i]`.
    Torus { freq: Vec<u32>, parity: Vec<Parity> },
    /// The `index`-th member (1-based) of an orthonormal basis of degree-`degree`
    /// spherical harmonics.
    Sphere { degree: u32, index: u64 },
}

impl SpatialMode {
    pub fn torus(freq: Vec<u32>, parity: Vec<Parity>) -> Self {
        SpatialMode::Torus { freq, parity }
    }

    /// Cosine-parity torus mode with the given frequencies.
    pub fn torus_cos(freq: Vec<u32>) -> Self {
        let parity = vec![Parity::Cos; freq.len()];
        SpatialMode::Torus { freq, parity }
    }

    pub fn sphere(degree: u32, index: u64) -> Self {
        SpatialMode::Sphere { degree, index }
    }

    /// Laplace–Beltrami eigenvalue `ν̃` of this mode on `domain`.
    pub fn laplace_eigenvalue(&self, domain: &Domain) -> Result<i128> {
        self.validate(domain)?;
        Ok(match (self, domain) {
            (SpatialMode::Torus { freq, .. }, _) => freq.iter().map(|&k| (k as i128).pow(2)).sum(),
            (SpatialMode::Sphere { degree, .. }, Domain::Sphere { dim }) => {
                let k = *degree as i128;
                k * (k + *dim as i128 - 1)
            }
            _ => unreachable!("validated above"),
        })
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        match (self, domain) {
            (SpatialMode::Torus { freq, parity }, Domain::Torus { dim }) => {
                if freq.len() != *dim || parity.len() != *dim {
                    return Err(Error::InvalidMode(format!(
                        "torus mode needs {dim} frequencies and parities, got {} and {}",
                        freq.len(),
                        parity.len()
                    )));
                }
                if freq
                    .iter()
                    .zip(parity)
                    .any(|(&k, &p)| k == 0 && p == Parity::Sin)
                {
                    return Err(Error::InvalidMode("sin parity at frequency 0".into()));
                }
                Ok(())
            }
            (SpatialMode::Sphere { degree, index }, Domain::Sphere { dim }) => {
                let rho = sphere_multiplicity(*dim, *degree);
                if *index < 1 || *index as u128 > rho {
                    return Err(Error::InvalidMode(format!(
                        "degeneracy index {index} outside 1..={rho} for degree {degree} on S^{dim}"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::InvalidMode(format!(
                "mode kind does not match domain {domain}"
            ))),
        }
    }

    fn sort_key(&self) -> (Vec<u64>, Vec<Parity>) {
        match self {
            SpatialMode::Torus { freq, parity } => {
                (freq.iter().map(|&k| k as u64).collect(), parity.clone())
            }
            SpatialMode::Sphere { degree, index } => (vec![*degree as u64, *index], vec![]),
        }
    }
}

/// One real eigenfunction `ζ_k ⊗ e_l`. The sign of `l` encodes the temporal
/// factor: `l > 0` is `cos(lt)`, `l < 0` is `sin(|l|t)`, `l = 0` the constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeKey {
    pub spatial: SpatialMode,
    pub l: i64,
}

/// Which part of the spectrum a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralClass {
    Plus,
    Zero,
    Minus,
}

impl SpectralClass {
    pub fn of(lambda: &Rational) -> Self {
        if lambda.is_positive() {
            SpectralClass::Plus
        } else if lambda.is_negative() {
            SpectralClass::Minus
        } else {
            SpectralClass::Zero
        }
    }
}

/// `λ = P(ν̃) − l²` for the given mode, exactly.
pub fn eigenvalue(
    operator: &Operator,
    domain: &Domain,
    spatial: &SpatialMode,
    l: i64,
) -> Result<Rational> {
    let nu = spatial.laplace_eigenvalue(domain)?;
    let l = l as i128;
    Ok(operator.eval(Rational::from_integer(nu)) - Rational::from_integer(l * l))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension `ρ_k = N_k − N_{k−2}` of the degree-`k` spherical harmonics on
/// `S^N`, with `N_k = C(N+k, k)` and `N_{−1} = N_{−2} = 0`.
pub fn sphere_multiplicity(n: usize, k: u32) -> u128 {
    let n = n as u128;
    let k = k as u128;
    let nk = binomial(n + k, k);
    let nk2 = if k >= 2 {
        binomial(n + k - 2, k - 2)
    } else {
        0
    };
    nk - nk2
}

/// A catalogued mode with its exact eigenvalue and class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mode {
    pub key: ModeKey,
    pub eigenvalue: Rational,
    pub class: SpectralClass,
}

impl Mode {
    pub fn eigenvalue_f64(&self) -> f64 {
        *self.eigenvalue.numer() as f64 / *self.eigenvalue.denom() as f64
    }
}

/// Truncated, immutable enumeration of the modes of `L_A` on `M × S¹`.
///
/// On the torus the spatial cutoff bounds every coordinate frequency
/// (`max_i |k_i| ≤ k_max`); on the sphere it bounds the degree. The temporal
/// cutoff bounds `|l|`.
#[derive(Debug, Clone)]
pub struct SpectralCatalog {
    domain: Domain,
    operator: Operator,
    k_max: u32,
    l_max: u32,
    modes: Vec<Mode>,
    plus: Vec<usize>,
    zero: Vec<usize>,
    minus: Vec<usize>,
}

impl SpectralCatalog {
    pub fn build(domain: Domain, operator: Operator, k_max: u32, l_max: u32) -> Result<Self> {
        domain.validate()?;
        let spatial = match domain {
            Domain::Torus { dim } => torus_spatial_modes(dim, k_max),
            Domain::Sphere { dim } => {
                let mut out = Vec::new();
                for degree in 0..=k_max {
                    let rho = sphere_multiplicity(dim, degree);
                    if rho > 1 << 24 {
                        return Err(Error::InvalidArgument(format!(
                            "degree {degree} on S^{dim} has {rho} harmonics; cutoff too large"
                        )));
                    }
                    out.extend((1..=rho as u64).map(|i| SpatialMode::sphere(degree, i)));
                }
                out
            }
        };

        let l_max_i = l_max as i64;
        let mut keys: Vec<ModeKey> = Vec::with_capacity(spatial.len() * (2 * l_max as usize + 1));
        for l in -l_max_i..=l_max_i {
            for s in &spatial {
                keys.push(ModeKey {
                    spatial: s.clone(),
                    l,
                });
            }
        }
        keys.sort_by(|a, b| {
            let ka = (a.l.unsigned_abs(), a.spatial.sort_key(), a.l < 0);
            let kb = (b.l.unsigned_abs(), b.spatial.sort_key(), b.l < 0);
            ka.cmp(&kb)
        });

        let mut modes = Vec::with_capacity(keys.len());
        let (mut plus, mut zero, mut minus) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, key) in keys.into_iter().enumerate() {
            let lambda = eigenvalue(&operator, &domain, &key.spatial, key.l)?;
            let class = SpectralClass::of(&lambda);
            match class {
                SpectralClass::Plus => plus.push(idx),
                SpectralClass::Zero => zero.push(idx),
                SpectralClass::Minus => minus.push(idx),
            }
            modes.push(Mode {
                key,
                eigenvalue: lambda,
                class,
            });
        }

        Ok(SpectralCatalog {
            domain,
            operator,
            k_max,
            l_max,
            modes,
            plus,
            zero,
            minus,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, idx: usize) -> &Mode {
        &self.modes[idx]
    }

    pub fn position(&self, key: &ModeKey) -> Option<usize> {
        self.modes.iter().position(|m| &m.key == key)
    }

    /// Indices of the modes in `class`, in catalog order.
    pub fn indices(&self, class: SpectralClass) -> &[usize] {
        match class {
            SpectralClass::Plus => &self.plus,
            SpectralClass::Zero => &self.zero,
            SpectralClass::Minus => &self.minus,
        }
    }

    pub fn kernel_dim(&self) -> usize {
        self.zero.len()
    }

    /// Float images of the eigenvalues, in catalog order.
    pub fn eigenvalues_f64(&self) -> Vec<f64> {
        self.modes.iter().map(Mode::eigenvalue_f64).collect()
    }

    pub fn export(&self) -> CatalogExport {
        CatalogExport {
            domain: self.domain,
            operator: self
                .operator
                .coeffs
                .iter()
                .map(RationalPair::from)
                .collect(),
            k_max: self.k_max,
            l_max: self.l_max,
            modes: self
                .modes
                .iter()
                .map(|m| ModeExport {
                    key: m.key.clone(),
                    eigenvalue: RationalPair::from(&m.eigenvalue),
                    class: m.class,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.export())?)
    }

    /// Short content hash identifying this catalog in exported fields.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.export()).expect("catalog export is serializable");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }
}

fn torus_spatial_modes(dim: usize, k_max: u32) -> Vec<SpatialMode> {
    // Per-coordinate real factors: constant, then cos/sin for each frequency.
    let mut axis = vec![(0u32, Parity::Cos)];
    for k in 1..=k_max {
        axis.push((k, Parity::Cos));
        axis.push((k, Parity::Sin));
    }
    let mut out: Vec<(Vec<u32>, Vec<Parity>)> = vec![(vec![], vec![])];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|(f, p)| {
                axis.iter().map(move |&(k, par)| {
                    let mut f = f.clone();
                    let mut p = p.clone();
                    f.push(k);
                    p.push(par);
                    (f, p)
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|(freq, parity)| SpatialMode::Torus { freq, parity })
        .collect()
}

/// `numerator / denominator` pair used in JSON exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPair(pub i128, pub i128);

impl From<&Rational> for RationalPair {
    fn from(r: &Rational) -> Self {
        RationalPair(*r.numer(), *r.denom())
    }
}

impl From<RationalPair> for Rational {
    fn from(p: RationalPair) -> Self {
        Rational::new(p.0, p.1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeExport {
    pub key: ModeKey,
    pub eigenvalue: RationalPair,
    pub class: SpectralClass,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogExport {
    pub domain: Domain,
    pub operator: Vec<RationalPair>,
    pub k_max: u32,
    pub l_max: u32,
    pub modes: Vec<ModeExport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn eigenvalue_examples() {
        let beam = Operator::polyharmonic(2).unwrap();
        let t2 = Domain::torus(2).unwrap();
        let k11 = SpatialMode::torus_cos(vec![1, 1]);
        assert_eq!(eigenvalue(&beam, &t2, &k11, 2).unwrap(), r(0));

        let wave = Operator::polyharmonic(1).unwrap();
        let k3 = SpatialMode::torus_cos(vec![3]);
        assert_eq!(eigenvalue(&wave, &Domain::circle(), &k3, 2).unwrap(), r(5));

        let kg = Operator::klein_gordon(3);
        assert_eq!(kg.laplacian_shift(), Some(r(1)));
        let s3 = Domain::sphere(3).unwrap();
        let y2 = SpatialMode::sphere(2, 1);
        assert_eq!(eigenvalue(&kg, &s3, &y2, 3).unwrap(), r(0));
    }

    #[test]
    fn invalid_modes_are_rejected() {
        let op = Operator::polyharmonic(1).unwrap();
        let c = Domain::circle();
        assert!(eigenvalue(&op, &c, &SpatialMode::torus_cos(vec![1, 1]), 0).is_err());
        let sin0 = SpatialMode::torus(vec![0], vec![Parity::Sin]);
        assert!(eigenvalue(&op, &c, &sin0, 0).is_err());
        let s2 = Domain::sphere(2).unwrap();
        assert!(eigenvalue(&op, &s2, &SpatialMode::sphere(1, 4), 0).is_err());
        assert!(eigenvalue(&op, &s2, &SpatialMode::sphere(1, 0), 0).is_err());
        assert!(eigenvalue(&op, &c, &SpatialMode::sphere(1, 1), 0).is_err());
    }

    #[test]
    fn operator_validation() {
        assert!(Operator::from_coeffs(vec![r(1)]).is_err());
        assert!(Operator::from_coeffs(vec![r(0), r(-1)]).is_err());
        assert!(Operator::from_coeffs(vec![r(0), r(1), r(0)]).is_ok());
        assert!(Operator::polyharmonic(0).is_err());
        assert_eq!(Operator::polyharmonic(3).unwrap().monomial_power(), Some(3));
        assert_eq!(Operator::klein_gordon(5).eval(r(0)), r(4));
    }

    #[test]
    fn multiplicities() {
        assert_eq!(sphere_multiplicity(2, 0), 1);
        assert_eq!(sphere_multiplicity(2, 2), 5);
        assert_eq!(sphere_multiplicity(3, 3), 16);
        // S^1: constant, then cos/sin pairs.
        assert_eq!(sphere_multiplicity(1, 0), 1);
        assert_eq!(sphere_multiplicity(1, 4), 2);
        for k in 0..20 {
            assert_eq!(sphere_multiplicity(2, k), 2 * k as u128 + 1);
            assert_eq!(sphere_multiplicity(3, k), (k as u128 + 1).pow(2));
        }
    }

    #[test]
    fn circle_beam_kernel() {
        let cat =
            SpectralCatalog::build(Domain::circle(), Operator::polyharmonic(2).unwrap(), 2, 4)
                .unwrap();
        let mut found: Vec<(u32, u64)> = cat
            .indices(SpectralClass::Zero)
            .iter()
            .map(|&i| match &cat.mode(i).key.spatial {
                SpatialMode::Torus { freq, .. } => (freq[0], cat.mode(i).key.l.unsigned_abs()),
                _ => unreachable!(),
            })
            .collect();
        found.dedup();
        assert_eq!(found, vec![(0, 0), (1, 1), (2, 4)]);
        // constant: 1; k=1: 2 spatial × 2 temporal; k=2: same.
        assert_eq!(cat.kernel_dim(), 9);
        assert_eq!(cat.len(), 5 * 9);
    }

    #[test]
    fn torus_remark_mode_is_plus() {
        let cat = SpectralCatalog::build(
            Domain::torus(2).unwrap(),
            Operator::polyharmonic(1).unwrap(),
            3,
            3,
        )
        .unwrap();
        let key = ModeKey {
            spatial: SpatialMode::torus_cos(vec![3, 1]),
            l: 3,
        };
        let m = cat.mode(cat.position(&key).unwrap());
        assert_eq!(m.eigenvalue, r(1));
        assert_eq!(m.class, SpectralClass::Plus);
        assert_eq!(cat.len(), 49 * 7);
    }

    #[test]
    fn static_spectrum_is_positive() {
        let op = Operator::shifted_laplacian(r(1));
        for domain in [
            Domain::circle(),
            Domain::torus(2).unwrap(),
            Domain::sphere(3).unwrap(),
        ] {
            let cat = SpectralCatalog::build(domain, op.clone(), 3, 0).unwrap();
            assert_eq!(cat.kernel_dim(), 0);
            assert!(cat.indices(SpectralClass::Minus).is_empty());
            assert_eq!(cat.indices(SpectralClass::Plus).len(), cat.len());
        }
    }

    #[test]
    fn ordering_starts_with_lowest_temporal_frequency() {
        let cat =
            SpectralCatalog::build(Domain::circle(), Operator::polyharmonic(1).unwrap(), 1, 1)
                .unwrap();
        let ls: Vec<i64> = cat.modes().iter().map(|m| m.key.l).collect();
        assert_eq!(ls, vec![0, 0, 0, 1, -1, 1, -1, 1, -1]);
    }

    #[test]
    fn rational_coefficients_classify_exactly() {
        // P(τ) = τ + 1/2 never resonates.
        let op = Operator::shifted_laplacian(Rational::new(1, 2));
        let cat = SpectralCatalog::build(Domain::circle(), op, 4, 4).unwrap();
        assert_eq!(cat.kernel_dim(), 0);
    }

    #[test]
    fn json_export_has_rational_pairs() {
        let op = Operator::shifted_laplacian(Rational::new(1, 2));
        let cat = SpectralCatalog::build(Domain::circle(), op, 0, 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cat.to_json().unwrap()).unwrap();
        assert_eq!(v["modes"][0]["eigenvalue"], serde_json::json!([1, 2]));
        assert_eq!(v["modes"][0]["class"], "plus");
        assert_eq!(v["domain"]["kind"], "torus");
        assert_eq!(cat.content_hash().len(), 16);
    }
}
