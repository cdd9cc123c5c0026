//! Asymmetric L_p moment bodies and L_p centroid bodies.
//!
//! For p ≥ 1 and ε ∈ [0, 1] the asymmetric bracket is
//! ⟨y, z⟩_ε^p = (1-ε) max(⟨y, z⟩, 0)^p + ε max(-⟨y, z⟩, 0)^p.
//! The moment body M_{ε,p} f of a density has support function
//! h(M f, y)^p = ∫ f(z) ⟨y, z⟩_ε^p dz; for a star body K the volume
//! integral collapses to the spherical form
//! h(M K, y)^p = (1/(n+p)) ∫ r(K, ξ)^{n+p} ⟨y, ξ⟩_ε^p dξ.
//! The L_p centroid body Γ_p K uses the symmetric kernel |⟨y, z⟩|^p and
//! is normalized with c_{n,p} so that Γ_p of the unit ball is the unit
//! ball.
//!
//! At ε = 0 (or 1) a density supported in a closed halfspace gives
//! h(M f, y) = 0 for the outward normal; the polar moment body is then
//! unbounded and its volume is reported as `f64::INFINITY`.

use crate::bodies::{unit_ball_volume, volume, SupportBody};
use crate::error::{Error, Result};
use crate::quadrature::{Density, DirectionGrid};
use crate::{bodies::StarBody, Vector};

/// `x^p` for x ≥ 0 with fast paths for the common integer exponents.
#[inline]
pub(crate) fn powp(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 1.0 {
        x
    } else if p == 3.0 {
        x * x * x
    } else {
        x.powf(p)
    }
}

/// Moment exponent p ≥ 1 together with the asymmetry weight ε ∈ [0, 1].
/// ε = 1/2 recovers the symmetric kernel |⟨y, z⟩|^p / 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymParams {
    p: f64,
    eps: f64,
}

impl AsymParams {
    pub fn new(p: f64, eps: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::BadExponent { p });
        }
        if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
            return Err(Error::BadEpsilon { eps });
        }
        Ok(AsymParams { p, eps })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Same exponent with the reflected weight 1 - ε; satisfies
    /// ⟨y, z⟩_{1-ε}^p = ⟨-y, z⟩_ε^p.
    pub fn reflected(&self) -> AsymParams {
        AsymParams { p: self.p, eps: 1.0 - self.eps }
    }
}

/// ⟨s⟩_ε^p = (1-ε) max(s, 0)^p + ε max(-s, 0)^p applied to a scalar
/// product value `s`.
#[inline]
pub fn asym_bracket(s: f64, prm: &AsymParams) -> f64 {
    if s > 0.0 {
        (1.0 - prm.eps) * powp(s, prm.p)
    } else if s < 0.0 {
        prm.eps * powp(-s, prm.p)
    } else {
        0.0
    }
}

/// Normalization c_{n,p} = ω_{n+p} / (ω_2 ω_n ω_{p-1}); the constant
/// that makes the L_p centroid body of the unit ball the unit ball.
pub fn centroid_normalization(dim: usize, p: f64) -> Result<f64> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension { dim });
    }
    if !p.is_finite() || p < 1.0 {
        return Err(Error::BadExponent { p });
    }
    let n = dim as f64;
    Ok(unit_ball_volume(n + p)
        / (unit_ball_volume(2.0) * unit_ball_volume(n) * unit_ball_volume(p - 1.0)))
}

/// Precomputed weighted quadrature nodes (wᵢ f(xᵢ), xᵢ) of a density.
///
/// Moment supports of all translates of `f` reduce to sums over these
/// fixed nodes, so translation scans cost no re-quadrature.
pub struct MomentCache {
    dim: usize,
    points: Vec<Vector>,
    weighted: Vec<f64>,
}

impl MomentCache {
    pub fn new(f: &Density, subdivisions: usize) -> Result<Self> {
        let samples = f.samples(subdivisions)?;
        let mut points = Vec::with_capacity(samples.len());
        let mut weighted = Vec::with_capacity(samples.len());
        for s in &samples {
            points.push(s.point);
            weighted.push(s.weight * s.value);
        }
        Ok(MomentCache { dim: f.dim(), points, weighted })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// ∫ f(z) dz over the cached rule.
    pub fn mass(&self) -> f64 {
        self.weighted.iter().sum()
    }

    /// Quadrature nodes of the underlying rule.
    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// Weight × density value at each node.
    pub fn weighted(&self) -> &[f64] {
        &self.weighted
    }

    /// h(M_{ε,p} f_t, y)^p for the translate f_t = f(· - t):
    /// Σ wᵢ f(xᵢ) ⟨y, xᵢ + t⟩_ε^p.
    pub fn support_p(&self, prm: &AsymParams, y: &Vector, t: &Vector) -> f64 {
        let mut acc = 0.0;
        for (x, wf) in self.points.iter().zip(&self.weighted) {
            acc += wf * asym_bracket(y.dot(x) + y.dot(t), prm);
        }
        acc
    }

    /// `support_p` on every grid node.
    pub fn support_grid_p(&self, prm: &AsymParams, grid: &DirectionGrid, t: &Vector) -> Vec<f64> {
        grid.nodes().iter().map(|xi| self.support_p(prm, xi, t)).collect()
    }
}

/// h(M_{ε,p} f, y) = (∫ f(z) ⟨y, z⟩_ε^p dz)^{1/p}; `y` need not be a
/// unit vector (the result is 1-homogeneous in y).
pub fn moment_support_f(
    f: &Density,
    prm: &AsymParams,
    y: &Vector,
    subdivisions: usize,
) -> Result<f64> {
    let cache = MomentCache::new(f, subdivisions)?;
    Ok(cache.support_p(prm, y, &Vector::zeros()).powf(1.0 / prm.p))
}

/// Moment body of a density sampled on `grid`.
pub fn moment_body_f(
    f: &Density,
    prm: &AsymParams,
    grid: &DirectionGrid,
    subdivisions: usize,
) -> Result<SupportBody> {
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: grid.dim() });
    }
    let cache = MomentCache::new(f, subdivisions)?;
    let hp = cache.support_grid_p(prm, grid, &Vector::zeros());
    let inv_p = 1.0 / prm.p;
    let values = hp.into_iter().map(|v| v.powf(inv_p)).collect();
    SupportBody::from_grid(grid, values)
}

/// Moment body of a star body through the spherical representation
/// h(M K, ξ)^p = (1/(n+p)) Σ w r^{n+p} ⟨ξ, ·⟩_ε^p.
pub fn moment_body_k(
    k: &StarBody,
    prm: &AsymParams,
    grid: &DirectionGrid,
) -> Result<SupportBody> {
    let r = k.sample(grid)?;
    let n = k.dim() as f64;
    let scale = 1.0 / (n + prm.p);
    let powed: Vec<f64> = r.iter().map(|r| r.powf(n + prm.p)).collect();
    let mut values = Vec::with_capacity(grid.len());
    let inv_p = 1.0 / prm.p;
    for xi in grid.nodes() {
        let mut acc = 0.0;
        for ((ri, w), node) in powed.iter().zip(grid.weights()).zip(grid.nodes()) {
            acc += w * ri * asym_bracket(xi.dot(node), prm);
        }
        values.push((scale * acc).powf(inv_p));
    }
    SupportBody::from_grid(grid, values)
}

/// L_p centroid body Γ_p K: the symmetric-kernel moment body normalized
/// by c_{n,p} vol(K), so Γ_p of the unit ball is the unit ball.
pub fn centroid_body(k: &StarBody, p: f64, grid: &DirectionGrid) -> Result<SupportBody> {
    let c = centroid_normalization(k.dim(), p)?;
    let vol = volume(k, grid)?;
    if !(vol > 0.0) {
        return Err(Error::BadRadialValue { direction: Vector::zeros(), value: vol });
    }
    let r = k.sample(grid)?;
    let n = k.dim() as f64;
    let scale = 1.0 / ((n + p) * c * vol);
    let powed: Vec<f64> = r.iter().map(|r| r.powf(n + p)).collect();
    let mut values = Vec::with_capacity(grid.len());
    for xi in grid.nodes() {
        let mut acc = 0.0;
        for ((ri, w), node) in powed.iter().zip(grid.weights()).zip(grid.nodes()) {
            acc += w * ri * powp(xi.dot(node).abs(), p);
        }
        values.push((scale * acc).powf(1.0 / p));
    }
    SupportBody::from_grid(grid, values)
}

/// vol((M_{ε,p} f)°) = (1/n) ∫ h(M f, ξ)^{-n} dξ; `INFINITY` when the
/// moment support vanishes in some direction (possible only at ε ∈ {0, 1}
/// with `f` supported in a halfspace).
pub fn polar_moment_volume(
    f: &Density,
    prm: &AsymParams,
    grid: &DirectionGrid,
    subdivisions: usize,
) -> Result<f64> {
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: grid.dim() });
    }
    let cache = MomentCache::new(f, subdivisions)?;
    polar_moment_volume_cached(&cache, prm, grid, &Vector::zeros())
}

/// Polar moment volume of a translate from a prebuilt cache.
pub(crate) fn polar_moment_volume_cached(
    cache: &MomentCache,
    prm: &AsymParams,
    grid: &DirectionGrid,
    t: &Vector,
) -> Result<f64> {
    let n = cache.dim() as f64;
    let np = n / prm.p;
    let mut acc = 0.0;
    for (xi, w) in grid.nodes().iter().zip(grid.weights()) {
        let hp = cache.support_p(prm, xi, t);
        if !hp.is_finite() {
            return Err(Error::NonFiniteSample { location: *xi, value: hp });
        }
        if hp <= 0.0 {
            return Ok(f64::INFINITY);
        }
        // h^{-n} = (h^p)^{-n/p}
        acc += w * hp.powf(-np);
    }
    Ok(acc / n)
}
