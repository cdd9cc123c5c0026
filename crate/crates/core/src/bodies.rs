//! Star bodies, support-function bodies, ellipsoids, and polarity.
//!
//! A [`StarBody`] is described by its radial function r(K, ξ) = max{t :
//! tξ ∈ K}, a [`SupportBody`] by its support function h(K, y) =
//! max_{z ∈ K} ⟨y, z⟩. Both store closures; grid-sampled bodies wrap an
//! interpolating closure. For convex K with the origin interior the two
//! descriptions are linked through polarity: the gauge of K is the
//! support function of K°, and r(K°, ξ) = 1/h(K, ξ).
//!
//! Volumes use the polar-coordinate formula vol(K) = (1/n) ∫ r^n dξ and
//! its polar counterpart vol(K°) = (1/n) ∫ h^{-n} dξ. A direction with
//! h ≤ 0 means the origin is not interior, the polar is unbounded, and
//! the polar volume is reported as `f64::INFINITY` rather than an error.

use crate::error::{Error, Result};
use crate::quadrature::{weighted_sum, DirectionGrid};
use crate::{sphere_grid, vec2, Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

type ShapeFn = dyn Fn(&Vector) -> f64 + Send + Sync;

macro_rules! opaque_debug {
    ($ty:ident) => {
        impl std::fmt::Debug for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.debug_struct(stringify!($ty)).field("dim", &self.dim).finish_non_exhaustive()
            }
        }
    };
}

/// Volume of the unit ball in `R^s` for real s ≥ 0: π^{s/2} / Γ(s/2 + 1).
pub fn unit_ball_volume(s: f64) -> f64 {
    assert!(s >= 0.0, "dimension parameter must be nonnegative");
    PI.powf(s / 2.0) / libm::tgamma(s / 2.0 + 1.0)
}

/// Body given by its radial function on unit directions; the origin is
/// an interior point, so the radial function is positive.
#[derive(Clone)]
pub struct StarBody {
    dim: usize,
    radial: Arc<ShapeFn>,
}

opaque_debug!(StarBody);

impl StarBody {
    pub fn new<F>(dim: usize, radial: F) -> Result<Self>
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension { dim });
        }
        Ok(StarBody { dim, radial: Arc::new(radial) })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::BadRadialValue { direction: Vector::zeros(), value: radius });
        }
        StarBody::new(dim, move |_: &Vector| radius)
    }

    /// Interpolating body from radial samples on `grid`.
    pub fn from_grid(grid: &DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                reason: format!("{} values for a {}-node grid", values.len(), grid.len()),
            });
        }
        for (v, d) in values.iter().zip(grid.nodes()) {
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::BadRadialValue { direction: *d, value: *v });
            }
        }
        let g = grid.clone();
        let vals = values;
        StarBody::new(grid.dim(), move |dir: &Vector| g.interpolate(&vals, dir))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// r(K, dir); `dir` must be a unit vector.
    pub fn radial(&self, dir: &Vector) -> f64 {
        (self.radial)(dir)
    }

    /// Gauge (Minkowski functional) at an arbitrary point: |x| / r(K, x̂),
    /// zero at the origin.
    pub fn gauge(&self, x: &Vector) -> f64 {
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        n / self.radial(&(x / n))
    }

    /// Radial values at the grid nodes, validated positive and finite.
    pub fn sample(&self, grid: &DirectionGrid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        let mut out = Vec::with_capacity(grid.len());
        for d in grid.nodes() {
            let v = self.radial(d);
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::BadRadialValue { direction: *d, value: v });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Linear image `AK` (radial pulled back through `A⁻¹`).
    pub fn linear_image(&self, a: &Matrix) -> Result<StarBody> {
        let inv = a.try_inverse().ok_or(Error::SingularMatrix)?;
        let inner = Arc::clone(&self.radial);
        StarBody::new(self.dim, move |dir: &Vector| {
            let back = inv * dir;
            let norm = back.norm();
            // r_{AK}(θ) = r_K(A⁻¹θ / |A⁻¹θ|) / |A⁻¹θ|
            inner(&(back / norm)) / norm
        })
    }

    /// Random smooth perturbation of the unit ball; positive by
    /// construction for `amplitude < 1`. With `symmetric` the body is
    /// origin-symmetric.
    pub fn random_fourier(dim: usize, seed: u64, amplitude: f64, symmetric: bool) -> Result<Self> {
        random_shape(dim, seed, amplitude, symmetric, false)
    }
}

/// Body given by its support function on unit directions.
#[derive(Clone)]
pub struct SupportBody {
    dim: usize,
    support: Arc<ShapeFn>,
}

opaque_debug!(SupportBody);

impl SupportBody {
    pub fn new<F>(dim: usize, support: F) -> Result<Self>
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension { dim });
        }
        Ok(SupportBody { dim, support: Arc::new(support) })
    }

    /// Support function of the convex hull of `vertices`.
    pub fn polytope(dim: usize, vertices: Vec<Vector>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::BadSupportBox { reason: "polytope needs at least one vertex" });
        }
        SupportBody::new(dim, move |y: &Vector| {
            vertices.iter().map(|v| v.dot(y)).fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// Interpolating body from support samples on `grid`.
    pub fn from_grid(grid: &DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                reason: format!("{} values for a {}-node grid", values.len(), grid.len()),
            });
        }
        for (v, d) in values.iter().zip(grid.nodes()) {
            if !v.is_finite() {
                return Err(Error::BadSupportValue { direction: *d, value: *v });
            }
        }
        let g = grid.clone();
        let vals = values;
        SupportBody::new(grid.dim(), move |dir: &Vector| g.interpolate(&vals, dir))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// h(K, dir); `dir` must be a unit vector.
    pub fn support(&self, dir: &Vector) -> f64 {
        (self.support)(dir)
    }

    /// Support values at the grid nodes, validated finite (sign free:
    /// the origin need not be inside).
    pub fn sample(&self, grid: &DirectionGrid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: grid.dim() });
        }
        let mut out = Vec::with_capacity(grid.len());
        for d in grid.nodes() {
            let v = self.support(d);
            if !v.is_finite() {
                return Err(Error::BadSupportValue { direction: *d, value: v });
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Exact translate `K + t`: h(K + t, y) = h(K, y) + ⟨t, y⟩.
pub fn translate_support(k: &SupportBody, t: &Vector) -> SupportBody {
    let inner = Arc::clone(&k.support);
    let t = *t;
    SupportBody { dim: k.dim, support: Arc::new(move |y: &Vector| inner(y) + t.dot(y)) }
}

/// Translate `K + t` of a star body, re-sampled on `grid` by solving the
/// ray equation g_K(sξ - t) = 1 per node (first crossing). Errors if the
/// origin is not interior to `K + t`.
pub fn translate_star(k: &StarBody, t: &Vector, grid: &DirectionGrid) -> Result<StarBody> {
    if grid.dim() != k.dim {
        return Err(Error::DimensionMismatch { expected: k.dim, got: grid.dim() });
    }
    if k.gauge(&-t) >= 1.0 - 1e-9 {
        return Err(Error::PointNotInterior { point: -t });
    }
    let radials = k.sample(grid)?;
    let max_r = radials.iter().cloned().fold(0.0, f64::max);
    let reach = t.norm() + 1.5 * max_r;
    let mut values = Vec::with_capacity(grid.len());
    for xi in grid.nodes() {
        let psi = |s: f64| k.gauge(&(xi * s - t)) - 1.0;
        // march to bracket the first crossing, then bisect
        let cells = 256;
        let step = reach / cells as f64;
        let mut lo = 0.0;
        let mut hi = None;
        for c in 1..=cells {
            let s = step * c as f64;
            if psi(s) >= 0.0 {
                lo = step * (c - 1) as f64;
                hi = Some(s);
                break;
            }
        }
        let mut hi = match hi {
            Some(h) => h,
            None => {
                return Err(Error::NoConvergence {
                    context: "translate_star bracket",
                    iterations: cells,
                    residual: psi(reach),
                    best: *xi * reach,
                })
            }
        };
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if psi(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        values.push(0.5 * (lo + hi));
    }
    StarBody::from_grid(grid, values)
}

/// Support function of the polar body: h(K°, y) = g_K(y) = |y| / r(K, ŷ).
pub fn polar_support_from_gauge(k: &StarBody) -> SupportBody {
    let inner = Arc::clone(&k.radial);
    SupportBody {
        dim: k.dim,
        support: Arc::new(move |y: &Vector| {
            let n = y.norm();
            if n == 0.0 {
                return 0.0;
            }
            n / inner(&(y / n))
        }),
    }
}

/// Radial function of the polar body: r(K°, ξ) = 1 / h(K, ξ). Only
/// meaningful where h > 0.
pub fn polar_star_from_support(k: &SupportBody) -> StarBody {
    let inner = Arc::clone(&k.support);
    StarBody { dim: k.dim, radial: Arc::new(move |xi: &Vector| 1.0 / inner(xi)) }
}

/// vol(K) = (1/n) ∫_{S^{n-1}} r(K, ξ)^n dξ.
pub fn volume(k: &StarBody, grid: &DirectionGrid) -> Result<f64> {
    let r = k.sample(grid)?;
    let n = k.dim as i32;
    let powed: Vec<f64> = r.iter().map(|r| r.powi(n)).collect();
    Ok(weighted_sum(grid, &powed) / k.dim as f64)
}

/// vol(K°) = (1/n) ∫ h(K, ξ)^{-n} dξ; `INFINITY` when some h ≤ 0 (the
/// origin is not interior, so the polar is unbounded).
pub fn polar_volume(k: &SupportBody, grid: &DirectionGrid) -> Result<f64> {
    let h = k.sample(grid)?;
    let n = k.dim as i32;
    let mut acc = 0.0;
    for (hi, w) in h.iter().zip(grid.weights()) {
        if *hi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += w * hi.powi(-n);
    }
    Ok(acc / k.dim as f64)
}

/// Radial function of ∩ᵢ {x : ⟨x, ξᵢ⟩ ≤ h(ξᵢ)} at `dir`: the outer
/// polytope of K cut by the grid's tangent halfspaces. Converges to
/// r(K, dir) from above as the grid refines (K convex, origin interior).
pub fn support_to_radial(k: &SupportBody, dir: &Vector, grid: &DirectionGrid) -> Result<f64> {
    let h = k.sample(grid)?;
    radial_from_support_samples(&h, grid, dir)
}

pub(crate) fn radial_from_support_samples(
    h: &[f64],
    grid: &DirectionGrid,
    dir: &Vector,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (hi, xi) in h.iter().zip(grid.nodes()) {
        let d = dir.dot(xi);
        if d > 1e-9 {
            best = best.min(hi / d);
        }
    }
    if !best.is_finite() || best <= 0.0 {
        return Err(Error::BadSupportValue { direction: *dir, value: best });
    }
    Ok(best)
}

/// Support function of conv(K ∪ -K) at `y`: max over grid nodes of
/// r(K, ξ) |⟨y, ξ⟩|.
pub fn convex_hull_sym_support(k: &StarBody, y: &Vector, grid: &DirectionGrid) -> Result<f64> {
    let r = k.sample(grid)?;
    let mut best = f64::NEG_INFINITY;
    for (ri, xi) in r.iter().zip(grid.nodes()) {
        best = best.max(ri * y.dot(xi).abs());
    }
    Ok(best)
}

/// Ellipsoid {x : |B(x - c)| ≤ 1} with exact support and radial data.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    dim: usize,
    matrix: Matrix,
    center: Vector,
}

impl Ellipsoid {
    /// `matrix` must be invertible; in dimension 2 it must be the
    /// embedded block-diagonal form with last row and column (0, 0, 1),
    /// and the center must lie in the z = 0 plane.
    pub fn new(dim: usize, matrix: Matrix, center: Vector) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if dim == 2 {
            let embedded = matrix.m13 == 0.0
                && matrix.m23 == 0.0
                && matrix.m31 == 0.0
                && matrix.m32 == 0.0
                && matrix.m33 == 1.0
                && center.z == 0.0;
            if !embedded {
                return Err(Error::BadSupportBox {
                    reason: "dimension-2 ellipsoid must embed with m33 = 1 and center.z = 0",
                });
            }
        }
        if matrix.try_inverse().is_none() {
            return Err(Error::SingularMatrix);
        }
        Ok(Ellipsoid { dim, matrix, center })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Ellipsoid::new(dim, Matrix::identity(), Vector::zeros())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn center(&self) -> Vector {
        self.center
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim as f64) / self.matrix.determinant().abs()
    }

    /// h(E, y) = ⟨c, y⟩ + |B^{-T} y|.
    pub fn support_at(&self, y: &Vector) -> f64 {
        let bt_inv = self.matrix.transpose().try_inverse().expect("validated invertible");
        self.center.dot(y) + (bt_inv * y).norm()
    }

    /// Solves |B(rξ - c)| = 1 for the positive root; requires the origin
    /// interior (|Bc| < 1).
    pub fn radial_at(&self, xi: &Vector) -> Result<f64> {
        let bx = self.matrix * xi;
        let bc = self.matrix * self.center;
        let a = bx.norm_squared();
        let b = bx.dot(&bc);
        let c = bc.norm_squared() - 1.0;
        if c >= 0.0 {
            return Err(Error::PointNotInterior { point: Vector::zeros() });
        }
        let disc = b * b - a * c;
        Ok((b + disc.sqrt()) / a)
    }

    /// Polar of a centered ellipsoid: gauge |B^{-T} y| ≤ 1.
    pub fn polar(&self) -> Result<Ellipsoid> {
        if self.center.norm() > 1e-14 {
            return Err(Error::PointNotInterior { point: self.center });
        }
        let m = self.matrix.transpose().try_inverse().ok_or(Error::SingularMatrix)?;
        Ellipsoid::new(self.dim, m, Vector::zeros())
    }

    pub fn translate(&self, t: &Vector) -> Result<Ellipsoid> {
        Ellipsoid::new(self.dim, self.matrix, self.center + t)
    }

    /// Exact star/support pair; requires the origin interior.
    pub fn to_convex(&self) -> Result<ConvexBody> {
        if (self.matrix * self.center).norm() >= 1.0 {
            return Err(Error::PointNotInterior { point: Vector::zeros() });
        }
        let e1 = self.clone();
        let bt_inv = self.matrix.transpose().try_inverse().ok_or(Error::SingularMatrix)?;
        let center = self.center;
        let star = StarBody::new(self.dim, move |xi: &Vector| {
            e1.radial_at(xi).expect("origin interior validated")
        })?;
        let support =
            SupportBody::new(self.dim, move |y: &Vector| center.dot(y) + (bt_inv * y).norm())?;
        Ok(ConvexBody { dim: self.dim, star, support })
    }
}

/// Coherent radial/support pair for a convex body with interior origin.
///
/// Exact for ellipsoids; bodies built from one representation get the
/// other side from grid samples (hull formula or halfspace
/// intersection), with O(grid spacing²) error.
#[derive(Clone)]
pub struct ConvexBody {
    dim: usize,
    star: StarBody,
    support: SupportBody,
}

opaque_debug!(ConvexBody);

impl ConvexBody {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn star(&self) -> &StarBody {
        &self.star
    }

    pub fn support(&self) -> &SupportBody {
        &self.support
    }

    pub fn from_ellipsoid(e: &Ellipsoid) -> Result<Self> {
        e.to_convex()
    }

    /// Support side from the hull formula h(y) = maxᵢ r(ξᵢ) ⟨y, ξᵢ⟩ over
    /// grid nodes (tight for convex K as the grid refines).
    pub fn from_star(star: &StarBody, grid: &DirectionGrid) -> Result<Self> {
        if grid.dim() != star.dim {
            return Err(Error::DimensionMismatch { expected: star.dim, got: grid.dim() });
        }
        let r = star.sample(grid)?;
        let nodes: Vec<Vector> = grid.nodes().to_vec();
        let support = SupportBody::new(star.dim, move |y: &Vector| {
            let mut best = f64::NEG_INFINITY;
            for (ri, xi) in r.iter().zip(&nodes) {
                best = best.max(ri * y.dot(xi));
            }
            best
        })?;
        Ok(ConvexBody { dim: star.dim, star: star.clone(), support })
    }

    /// Radial side from the halfspace-intersection formula; requires
    /// h > 0 at every node (origin interior).
    pub fn from_support(sup: &SupportBody, grid: &DirectionGrid) -> Result<Self> {
        if grid.dim() != sup.dim {
            return Err(Error::DimensionMismatch { expected: sup.dim, got: grid.dim() });
        }
        let h = sup.sample(grid)?;
        for (hi, d) in h.iter().zip(grid.nodes()) {
            if *hi <= 0.0 {
                return Err(Error::BadSupportValue { direction: *d, value: *hi });
            }
        }
        let g = grid.clone();
        let star = StarBody::new(sup.dim, move |xi: &Vector| {
            radial_from_support_samples(&h, &g, xi).unwrap_or(f64::NAN)
        })?;
        Ok(ConvexBody { dim: sup.dim, star, support: sup.clone() })
    }

    /// Random convex perturbation of the unit ball built on the support
    /// side, so convexity is certified analytically (dimension 2) or by
    /// keeping the amplitude below the curvature budget (dimension 3).
    pub fn random_support_fourier(
        dim: usize,
        seed: u64,
        amplitude: f64,
        symmetric: bool,
        grid: &DirectionGrid,
    ) -> Result<Self> {
        let sup_star = random_shape(dim, seed, amplitude, symmetric, true)?;
        let inner = Arc::clone(&sup_star.radial);
        let support = SupportBody { dim, support: inner };
        ConvexBody::from_support(&support, grid)
    }

    pub fn volume(&self, grid: &DirectionGrid) -> Result<f64> {
        volume(&self.star, grid)
    }

    pub fn polar_volume(&self, grid: &DirectionGrid) -> Result<f64> {
        polar_volume(&self.support, grid)
    }

    /// Translate: exact on the support side, ray-resolved on the radial
    /// side; errors if the origin leaves the interior.
    pub fn translate(&self, t: &Vector, grid: &DirectionGrid) -> Result<ConvexBody> {
        let star = translate_star(&self.star, t, grid)?;
        let support = translate_support(&self.support, t);
        Ok(ConvexBody { dim: self.dim, star, support })
    }
}

/// One perturbation mode on the sphere, paired with its sup bound.
type Harmonic = fn(&Vector) -> f64;

/// Shared generator for random radial/support perturbations of the unit
/// ball: 1 + Σ c_j φ_j with Σ |c_j| max|φ_j| = amplitude. With `convex`
/// the dimension-2 coefficients are additionally scaled so that
/// h + h'' > 0, certifying a convex support function.
fn random_shape(
    dim: usize,
    seed: u64,
    amplitude: f64,
    symmetric: bool,
    convex: bool,
) -> Result<StarBody> {
    if !(0.0..1.0).contains(&amplitude) {
        return Err(Error::BadSupportBox { reason: "amplitude must lie in [0, 1)" });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match dim {
        2 => {
            // harmonics 2..=6; odd ones dropped for symmetric bodies
            let orders: Vec<usize> =
                if symmetric { vec![2, 4, 6] } else { vec![2, 3, 4, 5, 6] };
            let mut coefs = Vec::new();
            for &k in &orders {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                coefs.push((k, a, b));
            }
            let mut l1: f64 = coefs.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
            if convex {
                // h + h'' = 1 - Σ (k² - 1)(a_k cos + b_k sin) stays positive
                l1 = coefs
                    .iter()
                    .map(|(k, a, b)| ((k * k - 1) as f64) * (a.abs() + b.abs()))
                    .sum();
            }
            let scale = if l1 > 0.0 { amplitude / l1 } else { 0.0 };
            StarBody::new(2, move |d: &Vector| {
                let theta = d.y.atan2(d.x);
                let mut v = 1.0;
                for (k, a, b) in &coefs {
                    let kt = *k as f64 * theta;
                    v += scale * (a * kt.cos() + b * kt.sin());
                }
                v
            })
        }
        3 => {
            // low-order polynomial harmonics with known sup bounds
            let even: [(Harmonic, f64); 5] = [
                (|d| d.x * d.y, 0.5),
                (|d| d.y * d.z, 0.5),
                (|d| d.x * d.z, 0.5),
                (|d| d.x * d.x - d.y * d.y, 1.0),
                (|d| 1.5 * d.z * d.z - 0.5, 1.0),
            ];
            let odd: [(Harmonic, f64); 3] = [(|d| d.x, 1.0), (|d| d.y, 1.0), (|d| d.z, 1.0)];
            let mut terms: Vec<(Harmonic, f64, f64)> = Vec::new();
            for (f, m) in even {
                terms.push((f, m, rng.gen_range(-1.0..1.0)));
            }
            if !symmetric {
                for (f, m) in odd {
                    terms.push((f, m, rng.gen_range(-1.0..1.0)));
                }
            }
            let weight = if convex { 4.0 } else { 1.0 };
            let l1: f64 = terms.iter().map(|(_, m, c)| weight * m * c.abs()).sum();
            let scale = if l1 > 0.0 { amplitude / l1 } else { 0.0 };
            StarBody::new(3, move |d: &Vector| {
                let mut v = 1.0;
                for (f, _, c) in &terms {
                    v += scale * c * f(d);
                }
                v
            })
        }
        _ => Err(Error::UnsupportedDimension { dim }),
    }
}

/// Serialized body: grid directions and sampled values.
#[derive(Serialize, Deserialize)]
struct BodyRecord {
    n: usize,
    kind: String,
    grid: Vec<Vec<f64>>,
    values: Vec<f64>,
}

/// A body deserialized from JSON.
#[derive(Debug)]
pub enum LoadedBody {
    Star(StarBody),
    Support(SupportBody),
}

fn grid_to_records(grid: &DirectionGrid) -> Vec<Vec<f64>> {
    grid.nodes()
        .iter()
        .map(|n| {
            if grid.dim() == 2 {
                vec![n.x, n.y]
            } else {
                vec![n.x, n.y, n.z]
            }
        })
        .collect()
}

/// Serializes radial samples of `k` on `grid`.
pub fn star_to_json(k: &StarBody, grid: &DirectionGrid) -> Result<String> {
    let values = k.sample(grid)?;
    let rec = BodyRecord {
        n: k.dim,
        kind: "radial".to_string(),
        grid: grid_to_records(grid),
        values,
    };
    Ok(serde_json::to_string_pretty(&rec)?)
}

/// Serializes support samples of `k` on `grid`.
pub fn support_to_json(k: &SupportBody, grid: &DirectionGrid) -> Result<String> {
    let values = k.sample(grid)?;
    let rec = BodyRecord {
        n: k.dim,
        kind: "support".to_string(),
        grid: grid_to_records(grid),
        values,
    };
    Ok(serde_json::to_string_pretty(&rec)?)
}

/// Restores a body serialized by [`star_to_json`] / [`support_to_json`].
/// The stored directions must reproduce a canonical grid layout of this
/// build; otherwise the record is rejected.
pub fn body_from_json(s: &str) -> Result<LoadedBody> {
    let rec: BodyRecord = serde_json::from_str(s)?;
    if rec.n != 2 && rec.n != 3 {
        return Err(Error::UnsupportedDimension { dim: rec.n });
    }
    if rec.values.len() != rec.grid.len() {
        return Err(Error::GridMismatch {
            reason: format!("{} values for {} directions", rec.values.len(), rec.grid.len()),
        });
    }
    let resolution = match rec.n {
        2 => rec.grid.len(),
        _ => {
            let r = (rec.grid.len() as f64).sqrt().round() as usize;
            if r * r != rec.grid.len() {
                return Err(Error::GridMismatch {
                    reason: format!("{} directions is not a square product grid", rec.grid.len()),
                });
            }
            r
        }
    };
    let grid = sphere_grid(rec.n, resolution).map_err(|_| Error::GridMismatch {
        reason: format!("cannot rebuild a dimension-{} grid with {} nodes", rec.n, rec.grid.len()),
    })?;
    for (stored, node) in rec.grid.iter().zip(grid.nodes()) {
        if stored.len() != rec.n {
            return Err(Error::GridMismatch {
                reason: format!("direction with {} components in dimension {}", stored.len(), rec.n),
            });
        }
        let v = if rec.n == 2 {
            vec2(stored[0], stored[1])
        } else {
            Vector::new(stored[0], stored[1], stored[2])
        };
        if (v - node).norm() > 1e-9 {
            return Err(Error::GridMismatch {
                reason: "stored directions do not match the canonical layout".to_string(),
            });
        }
    }
    match rec.kind.as_str() {
        "radial" => Ok(LoadedBody::Star(StarBody::from_grid(&grid, rec.values)?)),
        "support" => Ok(LoadedBody::Support(SupportBody::from_grid(&grid, rec.values)?)),
        other => Err(Error::GridMismatch { reason: format!("unknown body kind {other:?}") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3;
    use approx::assert_abs_diff_eq;

    fn grid2() -> DirectionGrid {
        sphere_grid(2, 1024).unwrap()
    }

    #[test]
    fn unit_ball_volumes() {
        assert_abs_diff_eq!(unit_ball_volume(0.0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(1.0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(2.0), PI, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(3.0), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(4.0), PI * PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn ball_volume_both_dimensions() {
        let g = grid2();
        let b = StarBody::ball(2, 1.0).unwrap();
        assert_abs_diff_eq!(volume(&b, &g).unwrap(), PI, epsilon = 1e-12);
        let g3 = sphere_grid(3, 64).unwrap();
        let b3 = StarBody::ball(3, 2.0).unwrap();
        assert_abs_diff_eq!(volume(&b3, &g3).unwrap(), 32.0 * PI / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn ellipsoid_quadrature_matches_closed_form() {
        let g = grid2();
        let m = Matrix::new(0.5, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0);
        let e = Ellipsoid::new(2, m, Vector::zeros()).unwrap();
        let k = e.to_convex().unwrap();
        assert_abs_diff_eq!(k.volume(&g).unwrap(), e.volume(), epsilon = 1e-10);
        assert_abs_diff_eq!(e.volume(), PI, epsilon = 1e-14);
    }

    #[test]
    fn volume_product_of_centered_ellipsoid_is_sharp() {
        let g = grid2();
        let m = Matrix::new(1.7, 0.3, 0.0, 0.2, 0.8, 0.0, 0.0, 0.0, 1.0);
        let e = Ellipsoid::new(2, m, Vector::zeros()).unwrap();
        let k = e.to_convex().unwrap();
        let prod = k.volume(&g).unwrap() * k.polar_volume(&g).unwrap();
        assert_abs_diff_eq!(prod, PI * PI, epsilon = 1e-9);
        // exact polar ellipsoid agrees with the quadrature polar volume
        assert_abs_diff_eq!(e.polar().unwrap().volume(), k.polar_volume(&g).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn polar_volume_unbounded_when_origin_leaves() {
        let g = grid2();
        let ball = SupportBody::new(2, |y: &Vector| y.norm()).unwrap();
        let far = translate_support(&ball, &vec2(1.5, 0.0));
        assert!(polar_volume(&far, &g).unwrap().is_infinite());
    }

    #[test]
    fn support_to_radial_recovers_ellipsoid() {
        let g = grid2();
        let m = Matrix::new(0.8, 0.1, 0.0, 0.0, 1.4, 0.0, 0.0, 0.0, 1.0);
        let e = Ellipsoid::new(2, m, Vector::zeros()).unwrap();
        let k = e.to_convex().unwrap();
        for &t in &[0.3f64, 1.2, 2.8, 4.4] {
            let d = vec2(t.cos(), t.sin());
            let got = support_to_radial(k.support(), &d, &g).unwrap();
            let want = e.radial_at(&d).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 2e-5);
            assert!(got >= want - 1e-12, "halfspace intersection must overestimate");
        }
    }

    #[test]
    fn triangle_volume_from_support_samples() {
        let g = grid2();
        // unit right triangle shifted so the origin is interior
        let verts = vec![vec2(-0.25, -0.25), vec2(0.75, -0.25), vec2(-0.25, 0.75)];
        let tri = SupportBody::polytope(2, verts).unwrap();
        let k = ConvexBody::from_support(&tri, &g).unwrap();
        assert_abs_diff_eq!(k.volume(&g).unwrap(), 0.5, epsilon = 1e-4);
    }

    #[test]
    fn hull_of_symmetrized_ellipse_is_the_ellipse() {
        let g = grid2();
        let m = Matrix::new(0.5, 0.0, 0.0, 0.0, 1.25, 0.0, 0.0, 0.0, 1.0);
        let e = Ellipsoid::new(2, m, Vector::zeros()).unwrap();
        let k = e.to_convex().unwrap();
        for &t in &[0.2f64, 1.0, 2.2] {
            let y = vec2(t.cos(), t.sin());
            let h = convex_hull_sym_support(k.star(), &y, &g).unwrap();
            assert_abs_diff_eq!(h, e.support_at(&y), epsilon = 3e-5);
        }
    }

    #[test]
    fn translate_star_matches_closed_form_for_ball() {
        let g = grid2();
        let b = StarBody::ball(2, 1.0).unwrap();
        let t = vec2(0.3, -0.1);
        let moved = translate_star(&b, &t, &g).unwrap();
        let closed_form = |d: &Vector| {
            let proj = t.dot(d);
            proj + (1.0 - t.norm_squared() + proj * proj).sqrt()
        };
        // exact at grid nodes (bisection accuracy) ...
        for i in [0usize, 113, 400, 777] {
            let d = g.node(i);
            assert_abs_diff_eq!(moved.radial(d), closed_form(d), epsilon = 1e-8);
        }
        // ... piecewise-linear between them
        let off = vec2(0.31f64.cos(), 0.31f64.sin());
        assert_abs_diff_eq!(moved.radial(&off), closed_form(&off), epsilon = 1e-5);
        assert_abs_diff_eq!(volume(&moved, &g).unwrap(), PI, epsilon = 1e-8);
    }

    #[test]
    fn translate_star_rejects_origin_exit() {
        let g = grid2();
        let b = StarBody::ball(2, 1.0).unwrap();
        let err = translate_star(&b, &vec2(1.2, 0.0), &g).unwrap_err();
        assert!(matches!(err, Error::PointNotInterior { .. }));
    }

    #[test]
    fn random_convex_support_is_subadditive() {
        let g = grid2();
        let k = ConvexBody::random_support_fourier(2, 7, 0.25, false, &g).unwrap();
        let dirs: Vec<Vector> = (0..24).map(|i| {
            let t = 2.0 * PI * i as f64 / 24.0;
            vec2(t.cos(), t.sin())
        }).collect();
        for a in &dirs {
            for b in &dirs {
                let s = a + b;
                if s.norm() < 1e-9 {
                    continue;
                }
                let lhs = k.support().support(&s.normalize()) * s.norm();
                let rhs = k.support().support(a) + k.support().support(b);
                assert!(lhs <= rhs + 1e-10, "support function must be subadditive");
            }
        }
    }

    #[test]
    fn random_star_is_positive_and_seed_stable(){
        let k1 = StarBody::random_fourier(2, 42, 0.6, false).unwrap();
        let k2 = StarBody::random_fourier(2, 42, 0.6, false).unwrap();
        let k3 = StarBody::random_fourier(3, 9, 0.5, true).unwrap();
        for i in 0..64 {
            let t = 2.0 * PI * i as f64 / 64.0;
            let d = vec2(t.cos(), t.sin());
            let r = k1.radial(&d);
            assert!(r > 0.0);
            assert_eq!(r, k2.radial(&d), "same seed must reproduce the body");
        }
        for i in 0..32 {
            let t = PI * (i as f64 + 0.5) / 32.0;
            let d = vec3(t.sin(), 0.3, t.cos()).normalize();
            assert!(k3.radial(&d) > 0.0);
            assert_abs_diff_eq!(k3.radial(&d), k3.radial(&-d), epsilon = 1e-14);
        }
    }

    #[test]
    fn linear_image_of_ball_is_ellipsoid() {
        let g = grid2();
        let b = StarBody::ball(2, 1.0).unwrap();
        let m = Matrix::new(2.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0);
        let k = b.linear_image(&m).unwrap();
        let e = Ellipsoid::new(2, m.try_inverse().unwrap(), Vector::zeros()).unwrap();
        for &t in &[0.1f64, 1.3, 2.6] {
            let d = vec2(t.cos(), t.sin());
            assert_abs_diff_eq!(k.radial(&d), e.radial_at(&d).unwrap(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(volume(&k, &g).unwrap(), PI, epsilon = 1e-10);
    }

    #[test]
    fn body_json_roundtrip_is_bitwise() {
        let g = sphere_grid(2, 64).unwrap();
        let k = StarBody::random_fourier(2, 3, 0.4, false).unwrap();
        let json = star_to_json(&k, &g).unwrap();
        let loaded = match body_from_json(&json).unwrap() {
            LoadedBody::Star(s) => s,
            _ => panic!("expected a radial body"),
        };
        let orig = k.sample(&g).unwrap();
        let back = loaded.sample(&g).unwrap();
        assert_eq!(orig, back, "node values must survive the roundtrip bitwise");
        let json2 = star_to_json(&loaded, &g).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn body_json_rejects_foreign_grid() {
        let g = sphere_grid(2, 64).unwrap();
        let k = StarBody::ball(2, 1.0).unwrap();
        let json = star_to_json(&k, &g).unwrap();
        let mut rec: serde_json::Value = serde_json::from_str(&json).unwrap();
        rec["grid"][0][0] = serde_json::json!(0.123);
        let err = body_from_json(&rec.to_string()).unwrap_err();
        assert!(matches!(err, Error::GridMismatch { .. }));
        rec["kind"] = serde_json::json!("weird");
        assert!(body_from_json(&rec.to_string()).is_err());
    }

    #[test]
    fn support_json_roundtrip() {
        let g = sphere_grid(3, 16).unwrap();
        let e = Ellipsoid::new(
            3,
            Matrix::new(1.2, 0.0, 0.0, 0.0, 0.9, 0.1, 0.0, 0.0, 0.8),
            Vector::zeros(),
        )
        .unwrap();
        let k = e.to_convex().unwrap();
        let json = support_to_json(k.support(), &g).unwrap();
        match body_from_json(&json).unwrap() {
            LoadedBody::Support(s) => {
                let d = vec3(0.6, -0.64, 0.48).normalize();
                assert_abs_diff_eq!(s.support(&d), e.support_at(&d), epsilon = 1e-2);
            }
            _ => panic!("expected a support body"),
        }
    }
}
