//! Eigenvalue-gap series that decide whether the nonresonant part of the
//! energy space embeds compactly into `L^p`, together with the mode-shift
//! bookkeeping on spheres and the bounded-gap witnesses on tori.
//!
//! All gaps `|ν − l²|` are formed in exact integer arithmetic before any
//! power is taken. Verdicts are heuristic tail fits and are always reported
//! next to the theoretical threshold `p*`.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Domain, Operator, Rational};
use crate::error::{Error, Result};

/// Upper end of the admissible range `2 < p < p*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Every `p > 2` is admissible.
    Unbounded,
    Finite(f64),
    /// No `p` is admissible: a bounded-gap family exists.
    Fails,
    /// Not covered by the known results.
    Unknown,
}

impl Threshold {
    /// `Some(true)` when `p` lies below the threshold.
    pub fn admits(&self, p: f64) -> Option<bool> {
        match self {
            Threshold::Unbounded => Some(true),
            Threshold::Finite(ps) => Some(p < *ps),
            Threshold::Fails => Some(false),
            Threshold::Unknown => None,
        }
    }
}

fn ratio_threshold(num: f64, den: i64) -> Threshold {
    if den <= 0 {
        Threshold::Unbounded
    } else {
        Threshold::Finite(num / den as f64)
    }
}

/// Critical exponent for the embedding of `E⁺ ⊕ E⁻` into `L^p`.
pub fn critical_exponent(domain: &Domain, operator: &Operator) -> Threshold {
    let n = domain.dim() as i64;
    match (domain, operator.monomial_power()) {
        (Domain::Torus { .. }, Some(_)) if n == 1 => Threshold::Unbounded,
        (Domain::Torus { .. }, Some(m)) if m % 2 == 0 => {
            ratio_threshold(2.0 * n as f64, n - m as i64)
        }
        (Domain::Torus { .. }, Some(1)) => Threshold::Fails,
        (Domain::Sphere { .. }, Some(m)) if m % 2 == 0 || n == 1 => {
            ratio_threshold(2.0 * (n + 1) as f64, n - m as i64)
        }
        (Domain::Sphere { .. }, None)
            if n % 2 == 1 && n >= 3 && *operator == Operator::klein_gordon(n as usize) =>
        {
            ratio_threshold(2.0 * (n + 1) as f64, n - 1)
        }
        _ => Threshold::Unknown,
    }
}

/// Sogge's exponent `σ_p` for spectral projectors on `S^N`.
pub fn sogge_exponent(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if n == 1 || p <= 2.0 * (nf + 1.0) / (nf - 1.0) {
        (nf - 1.0) * (p - 2.0) / (4.0 * p)
    } else {
        (p * (nf - 1.0) - 2.0 * nf) / (2.0 * p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    TorusGap,
    SpherePolyharmonic,
    SphereKleinGordon,
}

/// `k = (l, 1, 0, …)` with `λ = |k|² − l² = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessTuple {
    pub k: Vec<i64>,
    pub l: i64,
    pub lambda: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub index: i64,
    pub term: f64,
    pub partial_sum: f64,
}

/// Mean term over the dyadic index block `[start, 2·start)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicBlock {
    pub start: u64,
    pub mean_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub n: usize,
    pub m: Option<u32>,
    pub p: f64,
    pub sogge_sigma: Option<f64>,
    /// Spatial radius for tori, `j_max` for spheres.
    pub index_cutoff: u64,
    pub l_cutoff: u64,
    /// Radial shells `⌊|k|⌋` for tori, offsets `j` for spheres.
    pub terms: Vec<SeriesTerm>,
    pub total: f64,
    pub blocks: Vec<DyadicBlock>,
    /// Slopes of `log(mean term)` against `log(index)` between consecutive blocks.
    pub block_slopes: Vec<f64>,
    /// Least-squares slope over the last three blocks.
    pub tail_exponent: Option<f64>,
    pub verdict: Verdict,
    pub p_star: Threshold,
    pub witness: Vec<WitnessTuple>,
}

impl SeriesReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with columns `index,term,partial_sum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,term,partial_sum\n");
        for t in &self.terms {
            let _ = writeln!(out, "{},{},{}", t.index, t.term, t.partial_sum);
        }
        out
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 2.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "exponent p must exceed 2, got {p}"
        )))
    }
}

/// Dyadic blocks over the magnitudes `1..=len` of `by_magnitude[1..]`; only
/// complete blocks are used.
fn dyadic_blocks(by_magnitude: &[f64]) -> Vec<DyadicBlock> {
    let top = by_magnitude.len().saturating_sub(1);
    let mut blocks = Vec::new();
    let mut start = 1usize;
    while 2 * start - 1 <= top {
        let slice = &by_magnitude[start..2 * start];
        blocks.push(DyadicBlock {
            start: start as u64,
            mean_term: slice.iter().sum::<f64>() / slice.len() as f64,
        });
        start *= 2;
    }
    blocks
}

fn fit_tail(blocks: &[DyadicBlock], certified_divergent: bool) -> (Vec<f64>, Option<f64>, Verdict) {
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .map(|b| ((b.start as f64).ln(), b.mean_term.ln()))
        .collect();
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let tail = if pts.len() >= 3 {
        let last = &pts[pts.len() - 3..];
        let mx = last.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = last.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let sxy: f64 = last.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = last.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    let verdict = if certified_divergent {
        Verdict::Diverges
    } else if slopes.len() < 2 || slopes.iter().any(|s| !s.is_finite()) {
        Verdict::Inconclusive
    } else {
        let last = &slopes[slopes.len() - 2..];
        if last.iter().all(|&s| s < -1.1) {
            Verdict::Converges
        } else if last.iter().all(|&s| s >= -0.9) {
            Verdict::Diverges
        } else {
            Verdict::Inconclusive
        }
    };
    (slopes, tail, verdict)
}

/// Number of `k ∈ ℤ^N` with `|k|² = s`, for `s < len`.
fn lattice_counts(n: usize, len: usize) -> Vec<f64> {
    let mut counts = vec![0.0; len];
    counts[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; len];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut a = 0usize;
            while s + a * a < len {
                next[s + a * a] += if a == 0 { c } else { 2.0 * c };
                a += 1;
            }
        }
        counts = next;
    }
    counts
}

/// The bounded-gap family `k = (l, 1, 0, …)`, `l = 1..=count`, on which the
/// wave operator on `T^N` has eigenvalue exactly 1.
pub fn noncompact_witness(n: usize, m: u32, count: usize) -> Result<Vec<WitnessTuple>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the bounded-gap family needs N >= 2".into(),
        ));
    }
    if m != 1 {
        return Err(Error::Unsupported(format!(
            "no bounded-gap family for m = {m}: for m >= 2 only finitely many modes share a gap"
        )));
    }
    Ok((1..=count as i64)
        .map(|l| {
            let mut k = vec![0i64; n];
            k[0] = l;
            k[1] = 1;
            let norm: i128 = k.iter().map(|&v| (v as i128) * (v as i128)).sum();
            WitnessTuple {
                k,
                l,
                lambda: norm - (l as i128) * (l as i128),
            }
        })
        .collect())
}

/// `Σ |(|k|²)^m − l²|^{−p/(p−2)}` over nonresonant `(k, l)` with `|k| < radius`
/// and `|l| ≤ 2|k|^m + 1`, grouped into radial shells `⌊|k|⌋`.
pub fn torus_gap_series(n: usize, m: u32, p: f64, radius: u32) -> Result<SeriesReport> {
    check_p(p)?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need N >= 1 and m >= 1".into()));
    }
    if n >= 2 && m % 2 == 1 && m > 1 {
        return Err(Error::Unsupported(format!(
            "odd m = {m} >= 3 on T^{n} is not covered by the known results"
        )));
    }
    if radius < 2 {
        return Err(Error::InvalidArgument("radius must be at least 2".into()));
    }
    let e = p / (p - 2.0);
    let len = (radius as usize).pow(2);
    let counts = lattice_counts(n, len);
    let shell_of = |s: usize| (s as f64).sqrt().floor() as usize;
    let per_norm: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|s| {
            if counts[s] == 0.0 {
                return 0.0;
            }
            let nu = (s as i128).pow(m);
            let root = (nu as f64).sqrt();
            let lmax = 2 * root.ceil() as i128 + 1;
            let mut acc = 0.0;
            for l in 0..=lmax {
                let gap = (nu - l * l).abs();
                if gap == 0 {
                    continue;
                }
                let t = (gap as f64).powf(-e);
                acc += if l == 0 { t } else { 2.0 * t };
            }
            counts[s] * acc
        })
        .collect();
    let mut shells = vec![0.0; radius as usize];
    for (s, v) in per_norm.iter().enumerate() {
        shells[shell_of(s)] += v;
    }
    let witness = if n >= 2 && m == 1 {
        noncompact_witness(n, 1, 3)?
    } else {
        Vec::new()
    };
    let blocks = dyadic_blocks(&shells);
    let (block_slopes, tail_exponent, verdict) = fit_tail(&blocks, !witness.is_empty());
    let mut partial = 0.0;
    let terms = shells
        .iter()
        .enumerate()
        .map(|(r, &t)| {
            partial += t;
            SeriesTerm {
                index: r as i64,
                term: t,
                partial_sum: partial,
            }
        })
        .collect();
    let p_star = critical_exponent(&Domain::torus(n)?, &Operator::polyharmonic(m)?);
    Ok(SeriesReport {
        kind: SeriesKind::TorusGap,
        n,
        m: Some(m),
        p,
        sogge_sigma: None,
        index_cutoff: radius as u64,
        l_cutoff: 2 * (len as f64).powf(m as f64 / 2.0).ceil() as u64 + 1,
        terms,
        total: partial,
        blocks,
        block_slopes,
        tail_exponent,
        verdict,
        p_star,
        witness,
    })
}

/// `(k_l*, k_l)`: the nonnegative root of `k^m (k+N−1)^m = l²` and its
/// nearest integer.
pub fn sphere_mode_shift(n: usize, m: u32, l: i64) -> Result<(f64, u64)> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need N >= 1 and m >= 1".into()));
    }
    let h = (n as f64 - 1.0) / 2.0;
    let star = -h + ((l.unsigned_abs() as f64).powf(2.0 / m as f64) + h * h).sqrt();
    let star = star.max(0.0);
    Ok((star, star.round() as u64))
}

/// `s*(r) = −r^m + (r² − (N−1)²/4)^{m/2}`: the offset for which `l = r^m + s*`
/// has a mode shift with no rounding.
pub fn resonant_offset(n: usize, m: u32, r: u64) -> Result<f64> {
    let h2 = Rational::new(((n as i128) - 1).pow(2), 4);
    let base = Rational::from_integer((r as i128).pow(2)) - h2;
    if base <= Rational::zero() {
        return Err(Error::InvalidArgument(format!(
            "r = {r} too small for N = {n}"
        )));
    }
    let rm = (r as f64).powi(m as i32);
    if m.is_multiple_of(2) {
        let mut pow = Rational::one();
        for _ in 0..m / 2 {
            pow *= base;
        }
        let s = pow - Rational::from_integer((r as i128).pow(m));
        Ok(*s.numer() as f64 / *s.denom() as f64)
    } else {
        let b = *base.numer() as f64 / *base.denom() as f64;
        Ok(b.powf(m as f64 / 2.0) - rm)
    }
}

/// The resonant pair `(k, l)` attached to `r` when `s*(r)` is an integer and
/// `k = r − (N−1)/2` is a nonnegative integer, checked exactly:
/// `(k(k+N−1))^m = l²`.
pub fn resonant_pair(n: usize, m: u32, r: u64) -> Result<Option<(u64, i128)>> {
    let s = resonant_offset(n, m, r)?;
    if n.is_multiple_of(2) || s.fract() != 0.0 {
        return Ok(None);
    }
    let h = (n as i128 - 1) / 2;
    let k = r as i128 - h;
    if k < 0 {
        return Ok(None);
    }
    let l = (r as i128).pow(m) + s as i128;
    let nu = (k * (k + n as i128 - 1)).pow(m);
    Ok((nu == l * l).then_some((k as u64, l)))
}

/// Spatial operator of a sphere series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereOperator {
    /// `(−Δ)^m`, with `m` even or `N = 1`.
    Polyharmonic(u32),
    /// `−Δ + ((N−1)/2)²` with `N` odd and at least 3.
    KleinGordon,
}

impl SphereOperator {
    fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("need N >= 1".into()));
        }
        match *self {
            SphereOperator::Polyharmonic(0) => {
                Err(Error::InvalidArgument("m must be positive".into()))
            }
            SphereOperator::Polyharmonic(m) if m % 2 == 1 && n > 1 => Err(Error::Unsupported(
                format!("odd m = {m} on S^{n} is not covered by the known results"),
            )),
            SphereOperator::KleinGordon if n.is_multiple_of(2) || n < 3 => Err(Error::InvalidArgument(
                "the Klein-Gordon series needs odd N >= 3".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `ν_k` as an exact integer.
    fn nu(&self, n: usize, k: i128) -> i128 {
        match *self {
            SphereOperator::Polyharmonic(m) => (k * (k + n as i128 - 1)).pow(m),
            SphereOperator::KleinGordon => (k + (n as i128 - 1) / 2).pow(2),
        }
    }

    fn shift(&self, n: usize, l: i64) -> i128 {
        match *self {
            SphereOperator::Polyharmonic(m) => {
                sphere_mode_shift(n, m, l).expect("validated").1 as i128
            }
            SphereOperator::KleinGordon => (l.unsigned_abs() as i128 - (n as i128 - 1) / 2).max(0),
        }
    }

    fn p_star(&self, n: usize) -> Threshold {
        match *self {
            SphereOperator::Polyharmonic(m) => {
                ratio_threshold(2.0 * (n + 1) as f64, n as i64 - m as i64)
            }
            SphereOperator::KleinGordon => ratio_threshold(2.0 * (n + 1) as f64, n as i64 - 1),
        }
    }
}

/// `Σ_j ( Σ_{l ∈ Z_j} |ν_{k_l+j} − l²|^{−p/(p−2)} (1+k_l+j)^{2pσ_p/(p−2)} )^{(p−2)/p}`
/// over `|j| ≤ j_max` and `|l| ≤ l_max`, where `Z_j` collects the `l` with
/// `k_l + j ≥ 0` and a nonzero gap.
pub fn sphere_embedding_series(
    n: usize,
    op: SphereOperator,
    p: f64,
    j_max: u32,
    l_max: u64,
) -> Result<SeriesReport> {
    check_p(p)?;
    op.validate(n)?;
    if j_max < 3 || l_max == 0 {
        return Err(Error::InvalidArgument(
            "need j_max >= 3 and l_max >= 1".into(),
        ));
    }
    let e = p / (p - 2.0);
    let sigma = sogge_exponent(n, p);
    let wexp = 2.0 * p * sigma / (p - 2.0);
    let outer = (p - 2.0) / p;
    let shifts: Vec<i128> = (0..=l_max as i64).map(|l| op.shift(n, l)).collect();
    let js: Vec<i64> = (-(j_max as i64)..=j_max as i64).collect();
    let inner: Vec<f64> = js
        .par_iter()
        .map(|&j| {
            let mut acc = 0.0;
            for (l, &kl) in shifts.iter().enumerate() {
                let k = kl + j as i128;
                if k < 0 {
                    continue;
                }
                let l = l as i128;
                let gap = (op.nu(n, k) - l * l).abs();
                if gap == 0 {
                    continue;
                }
                let t = (gap as f64).powf(-e) * ((1 + k) as f64).powf(wexp);
                acc += if l == 0 { t } else { 2.0 * t };
            }
            acc
        })
        .collect();
    let term_of = |j: i64| inner[(j + j_max as i64) as usize].powf(outer);
    let mut order: Vec<i64> = vec![0];
    for j in 1..=j_max as i64 {
        order.push(j);
        order.push(-j);
    }
    let mut partial = 0.0;
    let terms: Vec<SeriesTerm> = order
        .iter()
        .map(|&j| {
            let t = term_of(j);
            partial += t;
            SeriesTerm {
                index: j,
                term: t,
                partial_sum: partial,
            }
        })
        .collect();
    let by_magnitude: Vec<f64> = (0..=j_max as i64)
        .map(|j| {
            if j == 0 {
                term_of(0)
            } else {
                term_of(j) + term_of(-j)
            }
        })
        .collect();
    let blocks = dyadic_blocks(&by_magnitude);
    let (block_slopes, tail_exponent, verdict) = fit_tail(&blocks, false);
    let (kind, m) = match op {
        SphereOperator::Polyharmonic(m) => (SeriesKind::SpherePolyharmonic, Some(m)),
        SphereOperator::KleinGordon => (SeriesKind::SphereKleinGordon, None),
    };
    Ok(SeriesReport {
        kind,
        n,
        m,
        p,
        sogge_sigma: Some(sigma),
        index_cutoff: j_max as u64,
        l_cutoff: l_max,
        terms,
        total: partial,
        blocks,
        block_slopes,
        tail_exponent,
        verdict,
        p_star: op.p_star(n),
        witness: Vec::new(),
    })
}

/// Extremes of `|ν_{k_l+j} − l²| / (|l|^{(2m−1)/m} |j|)` over
/// `1 ≤ |l| ≤ l_max`, `1 ≤ |j| ≤ |l|^{1/m}` with `k_l + j ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapBracket {
    pub n: usize,
    pub m: u32,
    pub l_max: u64,
    pub samples: u64,
    pub min_ratio: f64,
    /// `(l, j)` attaining the minimum.
    pub argmin: (i64, i64),
    pub max_ratio: f64,
    pub argmax: (i64, i64),
}

/// Per-`l` sample count, minimum with its `(l, j)`, maximum with its `(l, j)`.
type BracketRow = (u64, f64, (i64, i64), f64, (i64, i64));

pub fn gap_ratio_bracket(n: usize, m: u32, l_max: u64) -> Result<GapBracket> {
    let op = SphereOperator::Polyharmonic(m);
    op.validate(n)?;
    let expo = (2.0 * m as f64 - 1.0) / m as f64;
    let rows: Vec<BracketRow> = (1..=l_max as i64)
        .into_par_iter()
        .map(|l| {
            let kl = op.shift(n, l);
            let jmax = (l as f64).powf(1.0 / m as f64).floor() as i64;
            let scale = (l as f64).powf(expo);
            let mut row = (0u64, f64::INFINITY, (0, 0), f64::NEG_INFINITY, (0, 0));
            for j in (-jmax..=jmax).filter(|&j| j != 0) {
                let k = kl + j as i128;
                if k < 0 {
                    continue;
                }
                let gap = (op.nu(n, k) - (l as i128) * (l as i128)).abs() as f64;
                let r = gap / (scale * j.unsigned_abs() as f64);
                row.0 += 1;
                if r < row.1 {
                    row.1 = r;
                    row.2 = (l, j);
                }
                if r > row.3 {
                    row.3 = r;
                    row.4 = (l, j);
                }
            }
            row
        })
        .collect();
    let mut out = GapBracket {
        n,
        m,
        l_max,
        samples: 0,
        min_ratio: f64::INFINITY,
        argmin: (0, 0),
        max_ratio: f64::NEG_INFINITY,
        argmax: (0, 0),
    };
    for r in rows {
        out.samples += r.0;
        if r.1 < out.min_ratio {
            out.min_ratio = r.1;
            out.argmin = r.2;
        }
        if r.3 > out.max_ratio {
            out.max_ratio = r.3;
            out.argmax = r.4;
        }
    }
    Ok(out)
}
