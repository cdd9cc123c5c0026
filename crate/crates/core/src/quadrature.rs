//! Sphere grids, spherical quadrature, and volume quadrature for densities.
//!
//! Directions are unit vectors in `R³` with `z = 0` in dimension 2. A
//! [`DirectionGrid`] stores nodes and positive weights with Σ wᵢ equal to
//! the surface measure of the sphere, so spherical integrals are weighted
//! sums. Dimension 2 uses equally spaced angles (trapezoidal rule,
//! spectrally accurate for smooth periodic integrands); dimension 3 uses
//! Gauss–Legendre nodes in cos(polar angle) crossed with uniform azimuth.
//!
//! Volume integrals of a [`Density`] run on a tensor-product composite
//! Gauss–Legendre grid over the support box, or in polar coordinates when
//! the density carries a [`PolarHint`] describing its support exactly. The
//! polar route keeps discontinuous indicators (balls, ellipsoids,
//! truncated profiles) integrable to full quadrature accuracy, which the
//! box route cannot do for a boundary that crosses cells.

use crate::error::{Error, Result};
use crate::{vec2, Vector};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order as f64;
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for k in 0..order {
        // Chebyshev-angle initial guess, then Newton on P_n(x) = 0.
        let mut x = (PI * (k as f64 + 0.75) / (n + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre_pair(order, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// `(P_n(x), P'_n(x))` by the three-term recurrence; `|x| < 1`.
fn legendre_pair(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if order == 0 {
        return (1.0, 0.0);
    }
    let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Node layout of a sphere grid, kept for interpolation and for checking
/// that serialized bodies were sampled on a layout this build reproduces.
#[derive(Clone, Debug, PartialEq)]
pub enum GridLayout {
    /// Dimension 2: `count` angles θᵢ = 2πi/count.
    Circle { count: usize },
    /// Dimension 3: Gauss–Legendre values of cos(polar angle) crossed
    /// with `azimuth` uniform angles; `polar` holds the cosine nodes
    /// ascending.
    Sphere { polar: Vec<f64>, azimuth: usize },
}

/// Quadrature nodes on the unit sphere with Σ wᵢ = |S^{n-1}|.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
    layout: GridLayout,
}

/// Builds the standard grid for the dimension: equally spaced angles for
/// `dim = 2` (resolution = node count), a Gauss–Legendre × uniform product
/// for `dim = 3` (resolution nodes per factor, resolution² total). The
/// count must be even so the grid is antipodally balanced.
pub fn sphere_grid(dim: usize, resolution: usize) -> Result<DirectionGrid> {
    match dim {
        2 => {
            if resolution < 16 || !resolution.is_multiple_of(2) {
                return Err(Error::BadResolution {
                    dim,
                    resolution,
                    reason: "need an even angle count >= 16",
                });
            }
            let w = 2.0 * PI / resolution as f64;
            let nodes = (0..resolution)
                .map(|i| {
                    let t = w * i as f64;
                    vec2(t.cos(), t.sin())
                })
                .collect();
            Ok(DirectionGrid {
                dim,
                nodes,
                weights: vec![w; resolution],
                layout: GridLayout::Circle { count: resolution },
            })
        }
        3 => {
            if resolution < 8 || !resolution.is_multiple_of(2) {
                return Err(Error::BadResolution {
                    dim,
                    resolution,
                    reason: "need an even node count >= 8 per factor",
                });
            }
            let (u, v) = gauss_legendre(resolution);
            let dphi = 2.0 * PI / resolution as f64;
            let mut nodes = Vec::with_capacity(resolution * resolution);
            let mut weights = Vec::with_capacity(resolution * resolution);
            for k in 0..resolution {
                let s = (1.0 - u[k] * u[k]).max(0.0).sqrt();
                for j in 0..resolution {
                    let phi = dphi * j as f64;
                    nodes.push(Vector::new(s * phi.cos(), s * phi.sin(), u[k]));
                    weights.push(v[k] * dphi);
                }
            }
            Ok(DirectionGrid {
                dim,
                nodes,
                weights,
                layout: GridLayout::Sphere { polar: u, azimuth: resolution },
            })
        }
        _ => Err(Error::UnsupportedDimension { dim }),
    }
}

impl DirectionGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Generating resolution: angle count in dimension 2, nodes per
    /// factor in dimension 3.
    pub fn resolution(&self) -> usize {
        match &self.layout {
            GridLayout::Circle { count } => *count,
            GridLayout::Sphere { azimuth, .. } => *azimuth,
        }
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &Vector {
        &self.nodes[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    /// Σ wᵢ; equals 2π (dim 2) or 4π (dim 3) up to roundoff.
    pub fn surface_area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Interpolates node values at an arbitrary direction: piecewise
    /// linear in angle (dim 2), bilinear in (cos polar, azimuth) with
    /// constant extension beyond the outermost rings (dim 3).
    pub fn interpolate(&self, values: &[f64], dir: &Vector) -> f64 {
        assert_eq!(values.len(), self.nodes.len(), "value count must match grid");
        match &self.layout {
            GridLayout::Circle { count } => {
                let n = *count;
                let theta = dir.y.atan2(dir.x).rem_euclid(2.0 * PI);
                let t = theta / (2.0 * PI) * n as f64;
                let i0 = (t.floor() as usize) % n;
                let frac = t - t.floor();
                // snap so node directions return node values exactly
                if frac < 1e-9 {
                    return values[i0];
                }
                if frac > 1.0 - 1e-9 {
                    return values[(i0 + 1) % n];
                }
                let a = values[i0];
                let b = values[(i0 + 1) % n];
                a + (b - a) * frac
            }
            GridLayout::Sphere { polar, azimuth } => {
                let m = *azimuth;
                let ring = |k: usize, t: f64| {
                    let j0 = (t.floor() as usize) % m;
                    let frac = t - t.floor();
                    if frac < 1e-9 {
                        return values[k * m + j0];
                    }
                    if frac > 1.0 - 1e-9 {
                        return values[k * m + (j0 + 1) % m];
                    }
                    let a = values[k * m + j0];
                    let b = values[k * m + (j0 + 1) % m];
                    a + (b - a) * frac
                };
                let s = (dir.x * dir.x + dir.y * dir.y).sqrt();
                let phi = if s > 0.0 { dir.y.atan2(dir.x).rem_euclid(2.0 * PI) } else { 0.0 };
                let t = phi / (2.0 * PI) * m as f64;
                let u = (dir.z / dir.norm()).clamp(-1.0, 1.0);
                let l = polar.len();
                if u <= polar[0] {
                    return ring(0, t);
                }
                if u >= polar[l - 1] {
                    return ring(l - 1, t);
                }
                let hi = polar.partition_point(|&p| p < u).min(l - 1);
                let lo = hi - 1;
                let frac = (u - polar[lo]) / (polar[hi] - polar[lo]);
                if frac < 1e-9 {
                    return ring(lo, t);
                }
                if frac > 1.0 - 1e-9 {
                    return ring(hi, t);
                }
                let a = ring(lo, t);
                let b = ring(hi, t);
                a + (b - a) * frac
            }
        }
    }
}

/// Σ wᵢ · valuesᵢ over the grid.
pub(crate) fn weighted_sum(grid: &DirectionGrid, values: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), grid.len());
    let mut acc = 0.0;
    for (w, v) in grid.weights.iter().zip(values) {
        acc += w * v;
    }
    acc
}

/// ∫_{S^{n-1}} φ(ξ) dξ as a weighted sum; errors on a non-finite sample.
pub fn integrate_sphere<F>(grid: &DirectionGrid, integrand: F) -> Result<f64>
where
    F: Fn(&Vector) -> f64,
{
    let mut acc = 0.0;
    for (xi, w) in grid.nodes.iter().zip(&grid.weights) {
        let v = integrand(xi);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { location: *xi, value: v });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Axis-aligned box; dimension-2 boxes are flat in `z`.
#[derive(Clone, Copy, Debug)]
pub struct BoundingBox {
    dim: usize,
    min: Vector,
    max: Vector,
}

impl BoundingBox {
    /// Validates `min < max` on every live axis; the `z` extent is forced
    /// to zero in dimension 2.
    pub fn new(dim: usize, mut min: Vector, mut max: Vector) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if dim == 2 {
            min.z = 0.0;
            max.z = 0.0;
        }
        let axes = if dim == 2 { 2 } else { 3 };
        for a in 0..axes {
            if !(min[a] < max[a]) || !min[a].is_finite() || !max[a].is_finite() {
                return Err(Error::BadSupportBox { reason: "need finite min < max per axis" });
            }
        }
        Ok(BoundingBox { dim, min, max })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min(&self) -> Vector {
        self.min
    }

    pub fn max(&self) -> Vector {
        self.max
    }

    pub fn contains(&self, x: &Vector) -> bool {
        let axes = if self.dim == 2 { 2 } else { 3 };
        (0..axes).all(|a| x[a] >= self.min[a] && x[a] <= self.max[a])
            && (self.dim == 3 || x.z == 0.0)
    }

    pub fn center(&self) -> Vector {
        (self.min + self.max) * 0.5
    }

    pub fn volume(&self) -> f64 {
        let d = self.max - self.min;
        if self.dim == 2 {
            d.x * d.y
        } else {
            d.x * d.y * d.z
        }
    }

    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }

    /// Largest |corner|; bounds |z| over the box.
    pub fn corner_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        for &x in &[self.min.x, self.max.x] {
            for &y in &[self.min.y, self.max.y] {
                for &z in &[self.min.z, self.max.z] {
                    r = r.max(Vector::new(x, y, z).norm());
                }
            }
        }
        r
    }

    pub fn translate(&self, t: &Vector) -> Self {
        let mut out = *self;
        out.min += t;
        out.max += t;
        if self.dim == 2 {
            out.min.z = 0.0;
            out.max.z = 0.0;
        }
        out
    }
}

type EvalFn = dyn Fn(&Vector) -> f64 + Send + Sync;

/// Exact polar description of a density's support: every ray from
/// `center` leaves the support at radius `extent(direction)`. Lets the
/// quadrature place radial nodes up to the true boundary, which is what
/// makes indicator densities integrable to near machine accuracy.
#[derive(Clone)]
pub struct PolarHint {
    center: Vector,
    extent: Arc<EvalFn>,
    breakpoints: Vec<f64>,
}

impl PolarHint {
    pub fn new<F>(center: Vector, extent: F) -> Self
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        PolarHint { center, extent: Arc::new(extent), breakpoints: Vec::new() }
    }

    /// Angles (dimension 2) where the extent has kinks; the angular rule
    /// then integrates each smooth arc separately.
    pub fn with_breakpoints(mut self, mut angles: Vec<f64>) -> Self {
        for a in &mut angles {
            *a = a.rem_euclid(2.0 * PI);
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        self.breakpoints = angles;
        self
    }

    pub fn center(&self) -> Vector {
        self.center
    }

    pub fn extent(&self, dir: &Vector) -> f64 {
        (self.extent)(dir)
    }
}

/// Nonnegative integrable function with compact support.
///
/// Evaluation outside the support box is clamped to zero, so the stored
/// closure only needs to be correct inside. `sup_bound` is any finite
/// upper bound for the values (it scales search radii; it need not be
/// attained).
#[derive(Clone)]
pub struct Density {
    dim: usize,
    eval: Arc<EvalFn>,
    support: BoundingBox,
    sup_bound: f64,
    hint: Option<PolarHint>,
}

/// One node of a volume quadrature rule: `weight` is the bare quadrature
/// weight (Jacobian included), `value` the density there.
#[derive(Clone, Copy, Debug)]
pub(crate) struct VolumeSample {
    pub point: Vector,
    pub weight: f64,
    pub value: f64,
}

impl Density {
    pub fn new<F>(dim: usize, support: BoundingBox, sup_bound: f64, eval: F) -> Result<Self>
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if support.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: support.dim() });
        }
        if !(sup_bound > 0.0) || !sup_bound.is_finite() {
            return Err(Error::BadSupportBox { reason: "sup bound must be positive and finite" });
        }
        Ok(Density { dim, eval: Arc::new(eval), support, sup_bound, hint: None })
    }

    /// Attaches an exact polar description of the support.
    pub fn with_polar_hint(mut self, hint: PolarHint) -> Self {
        self.hint = Some(hint);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_box(&self) -> &BoundingBox {
        &self.support
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn polar_hint(&self) -> Option<&PolarHint> {
        self.hint.as_ref()
    }

    /// Density value; zero outside the support box.
    pub fn eval(&self, x: &Vector) -> f64 {
        if self.support.contains(x) {
            (self.eval)(x)
        } else {
            0.0
        }
    }

    /// The density `x ↦ f(x - t)`.
    pub fn translate(&self, t: &Vector) -> Density {
        let mut t = *t;
        if self.dim == 2 {
            t.z = 0.0;
        }
        let inner = Arc::clone(&self.eval);
        let shifted = move |x: &Vector| inner(&(x - t));
        let hint = self.hint.as_ref().map(|h| PolarHint {
            center: h.center + t,
            extent: Arc::clone(&h.extent),
            breakpoints: h.breakpoints.clone(),
        });
        Density {
            dim: self.dim,
            eval: Arc::new(shifted),
            support: self.support.translate(&t),
            sup_bound: self.sup_bound,
            hint,
        }
    }

    /// The push-forward `x ↦ f(A⁻¹x)` (indicator of `AK` for `f = χ_K`;
    /// not volume-normalized). `A` must be invertible and, in dimension 2,
    /// block-diagonal with `m33 = 1`.
    pub fn linear_image(&self, a: &crate::Matrix) -> Result<Density> {
        let inv = a.try_inverse().ok_or(Error::SingularMatrix)?;
        let inner = Arc::clone(&self.eval);
        let dim = self.dim;
        let mapped = move |x: &Vector| inner(&(inv * x));
        // Axis-aligned hull of the mapped corner set.
        let (bmin, bmax) = (self.support.min(), self.support.max());
        let mut lo = Vector::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for &x in &[bmin.x, bmax.x] {
            for &y in &[bmin.y, bmax.y] {
                for &z in &[bmin.z, bmax.z] {
                    let c = a * Vector::new(x, y, z);
                    lo = lo.inf(&c);
                    hi = hi.sup(&c);
                }
            }
        }
        if dim == 2 {
            lo.z = 0.0;
            hi.z = 0.0;
        }
        let support = BoundingBox::new(dim, lo, hi)?;
        let hint = match self.hint.as_ref() {
            None => None,
            Some(h) => {
                let extent = Arc::clone(&h.extent);
                let inv_h = inv;
                let new_extent = move |dir: &Vector| {
                    let back = inv_h * dir;
                    let norm = back.norm();
                    if norm <= 0.0 {
                        return 0.0;
                    }
                    extent(&(back / norm)) / norm
                };
                let breakpoints = h
                    .breakpoints
                    .iter()
                    .map(|&b| {
                        let v = a * vec2(b.cos(), b.sin());
                        v.y.atan2(v.x)
                    })
                    .collect();
                Some(
                    PolarHint::new(a * h.center, new_extent).with_breakpoints(breakpoints),
                )
            }
        };
        Ok(Density { dim, eval: Arc::new(mapped), support, sup_bound: self.sup_bound, hint })
    }

    /// Pointwise scaling `x ↦ amp · f(x)`.
    pub fn scale_values(&self, amp: f64) -> Result<Density> {
        if !(amp > 0.0) || !amp.is_finite() {
            return Err(Error::BadSupportBox { reason: "amplitude must be positive and finite" });
        }
        let inner = Arc::clone(&self.eval);
        Ok(Density {
            dim: self.dim,
            eval: Arc::new(move |x: &Vector| amp * inner(x)),
            support: self.support,
            sup_bound: self.sup_bound * amp,
            hint: self.hint.clone(),
        })
    }

    /// Quadrature rule adapted to this density; samples with value zero
    /// are omitted. Deterministic for fixed subdivisions.
    pub(crate) fn samples(&self, subdivisions: usize) -> Result<Vec<VolumeSample>> {
        if subdivisions < 4 {
            return Err(Error::BadResolution {
                dim: self.dim,
                resolution: subdivisions,
                reason: "need at least 4 subdivisions",
            });
        }
        match self.hint.as_ref() {
            Some(hint) => self.polar_samples(hint, subdivisions),
            None => self.box_samples(subdivisions),
        }
    }

    fn box_samples(&self, subdivisions: usize) -> Result<Vec<VolumeSample>> {
        let axis_rule = |lo: f64, hi: f64| -> (Vec<f64>, Vec<f64>) {
            let cells = subdivisions.div_ceil(8);
            let (gx, gw) = gauss_legendre(8);
            let step = (hi - lo) / cells as f64;
            let mut pos = Vec::with_capacity(cells * 8);
            let mut wts = Vec::with_capacity(cells * 8);
            for c in 0..cells {
                let a = lo + step * c as f64;
                for (x, w) in gx.iter().zip(&gw) {
                    pos.push(a + 0.5 * step * (x + 1.0));
                    wts.push(0.5 * step * w);
                }
            }
            (pos, wts)
        };
        let (lo, hi) = (self.support.min(), self.support.max());
        let (xs, xw) = axis_rule(lo.x, hi.x);
        let (ys, yw) = axis_rule(lo.y, hi.y);
        let mut out = Vec::new();
        if self.dim == 2 {
            for (x, wx) in xs.iter().zip(&xw) {
                for (y, wy) in ys.iter().zip(&yw) {
                    let p = vec2(*x, *y);
                    let v = self.eval(&p);
                    if !v.is_finite() {
                        return Err(Error::NonFiniteSample { location: p, value: v });
                    }
                    if v != 0.0 {
                        out.push(VolumeSample { point: p, weight: wx * wy, value: v });
                    }
                }
            }
        } else {
            let (zs, zw) = axis_rule(lo.z, hi.z);
            for (x, wx) in xs.iter().zip(&xw) {
                for (y, wy) in ys.iter().zip(&yw) {
                    for (z, wz) in zs.iter().zip(&zw) {
                        let p = Vector::new(*x, *y, *z);
                        let v = self.eval(&p);
                        if !v.is_finite() {
                            return Err(Error::NonFiniteSample { location: p, value: v });
                        }
                        if v != 0.0 {
                            out.push(VolumeSample { point: p, weight: wx * wy * wz, value: v });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn polar_samples(&self, hint: &PolarHint, subdivisions: usize) -> Result<Vec<VolumeSample>> {
        let (gl_r, gl_w) = gauss_legendre(16);
        let mut out = Vec::new();
        let shell = |dir: Vector, w_ang: f64, out: &mut Vec<VolumeSample>| -> Result<()> {
            let e = hint.extent(&dir);
            if !e.is_finite() || e < 0.0 {
                return Err(Error::NonFiniteSample { location: dir, value: e });
            }
            if e <= 1e-300 {
                return Ok(());
            }
            // Dyadic segments toward zero so a unit-scale core stays
            // resolved even when the extent is large (truncated tails).
            let m = ((e.max(1.0)).log2().ceil() as i64 + 2).clamp(3, 12) as usize;
            let mut prev = 0.0;
            for j in 1..=m {
                let cur = e * (2.0f64).powi(j as i32 - m as i32);
                let half = 0.5 * (cur - prev);
                let mid = 0.5 * (cur + prev);
                for (x, w) in gl_r.iter().zip(&gl_w) {
                    let r = mid + half * x;
                    let p = hint.center + dir * r;
                    let v = self.eval(&p);
                    if !v.is_finite() {
                        return Err(Error::NonFiniteSample { location: p, value: v });
                    }
                    if v != 0.0 {
                        let jac = if self.dim == 2 { r } else { r * r };
                        out.push(VolumeSample { point: p, weight: w_ang * half * w * jac, value: v });
                    }
                }
                prev = cur;
            }
            Ok(())
        };
        if self.dim == 2 {
            let m_ang = (4 * subdivisions).clamp(64, 8192);
            if hint.breakpoints.is_empty() {
                let w = 2.0 * PI / m_ang as f64;
                for i in 0..m_ang {
                    let t = w * (i as f64 + 0.5);
                    shell(vec2(t.cos(), t.sin()), w, &mut out)?;
                }
            } else {
                // Composite Gauss–Legendre on each smooth arc.
                let bp = &hint.breakpoints;
                let (ga, gw) = gauss_legendre(16);
                for (i, &start) in bp.iter().enumerate() {
                    let end = if i + 1 < bp.len() { bp[i + 1] } else { bp[0] + 2.0 * PI };
                    let arc = end - start;
                    if arc <= 1e-12 {
                        continue;
                    }
                    let cells = ((arc / (2.0 * PI) * m_ang as f64 / 16.0).ceil() as usize).max(1);
                    let step = arc / cells as f64;
                    for c in 0..cells {
                        let a = start + step * c as f64;
                        for (x, w) in ga.iter().zip(&gw) {
                            let t = a + 0.5 * step * (x + 1.0);
                            shell(vec2(t.cos(), t.sin()), 0.5 * step * w, &mut out)?;
                        }
                    }
                }
            }
        } else {
            let res = {
                let r = subdivisions.clamp(16, 96);
                if r.is_multiple_of(2) { r } else { r + 1 }
            };
            let grid = sphere_grid(3, res)?;
            for (dir, w) in grid.nodes().iter().zip(grid.weights()) {
                shell(*dir, *w, &mut out)?;
            }
        }
        Ok(out)
    }

    /// Best value found by a shrinking local grid search around the best
    /// quadrature sample; exact for densities that attain their sup on a
    /// plateau, curvature-accurate for smooth peaks.
    fn refined_sup(&self, subdivisions: usize) -> Result<f64> {
        let samples = self.samples(subdivisions)?;
        let mut best_x = self.support.center();
        let mut best = self.eval(&best_x);
        for s in &samples {
            if s.value > best {
                best = s.value;
                best_x = s.point;
            }
        }
        let ext = self.support.max() - self.support.min();
        let mut window = ext / subdivisions as f64;
        let axes = if self.dim == 2 { 2 } else { 3 };
        for _ in 0..8 {
            let mut local_best = best;
            let mut local_x = best_x;
            let steps = [-1.0, -0.5, 0.0, 0.5, 1.0];
            let zr: &[f64] = if axes == 2 { &[0.0] } else { &steps };
            for &sx in &steps {
                for &sy in &steps {
                    for &sz in zr {
                        let p = best_x + Vector::new(sx * window.x, sy * window.y, sz * window.z);
                        let v = self.eval(&p);
                        if v > local_best {
                            local_best = v;
                            local_x = p;
                        }
                    }
                }
            }
            best = local_best;
            best_x = local_x;
            window *= 0.35;
        }
        Ok(best)
    }
}

/// ∫ f(z) · kernel(z) dz over the support of `f`.
pub fn integrate_density<F>(f: &Density, kernel: F, subdivisions: usize) -> Result<f64>
where
    F: Fn(&Vector) -> f64,
{
    let samples = f.samples(subdivisions)?;
    let mut acc = 0.0;
    for s in &samples {
        let k = kernel(&s.point);
        if !k.is_finite() {
            return Err(Error::NonFiniteSample { location: s.point, value: k });
        }
        acc += s.weight * s.value * k;
    }
    Ok(acc)
}

/// L_λ exponent: a finite positive value (≠ 1) or ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lambda {
    Finite(f64),
    Infinity,
}

impl Lambda {
    /// Rejects non-finite, non-positive, and λ = 1 values.
    pub fn validate(self) -> Result<Self> {
        match self {
            Lambda::Infinity => Ok(self),
            Lambda::Finite(l) => {
                if !l.is_finite() || l <= 0.0 {
                    Err(Error::BadLambda { lambda: l, reason: "need a positive finite value" })
                } else if l == 1.0 {
                    Err(Error::BadLambda { lambda: l, reason: "lambda = 1 is excluded" })
                } else {
                    Ok(self)
                }
            }
        }
    }

    /// Hölder-type conjugate λ' = λ/(λ-1); equals 1 at λ = ∞. Negative
    /// for λ < 1, which the moment inequalities rely on.
    pub fn dual(self) -> f64 {
        match self {
            Lambda::Infinity => 1.0,
            Lambda::Finite(l) => l / (l - 1.0),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Lambda::Finite(_))
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Infinity => write!(f, "inf"),
            Lambda::Finite(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Lambda::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::BadLambda { lambda: f64::NAN, reason: "unparseable value" })?;
        if v.is_infinite() && v > 0.0 {
            return Ok(Lambda::Infinity);
        }
        Ok(Lambda::Finite(v))
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lambda::Infinity => serializer.serialize_str("inf"),
            Lambda::Finite(l) => serializer.serialize_f64(*l),
        }
    }
}

struct LambdaVisitor;

impl<'de> Visitor<'de> for LambdaVisitor {
    type Value = Lambda;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Lambda, E> {
        if v.is_infinite() && v > 0.0 {
            Ok(Lambda::Infinity)
        } else {
            Ok(Lambda::Finite(v))
        }
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Lambda, E> {
        Ok(Lambda::Finite(v as f64))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Lambda, E> {
        Ok(Lambda::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Lambda, E> {
        Lambda::from_str(v).map_err(|_| E::custom(format!("bad lambda {v:?}")))
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Lambda, D::Error> {
        d.deserialize_any(LambdaVisitor)
    }
}

/// ‖f‖_λ: the L_λ norm for finite λ (a quasi-norm for λ < 1), the
/// essential sup for λ = ∞ (located by refined grid search).
pub fn lp_integral(f: &Density, lambda: Lambda, subdivisions: usize) -> Result<f64> {
    match lambda.validate()? {
        Lambda::Finite(l) => {
            let samples = f.samples(subdivisions)?;
            let mut acc = 0.0;
            for s in &samples {
                acc += s.weight * s.value.powf(l);
            }
            Ok(acc.powf(1.0 / l))
        }
        Lambda::Infinity => f.refined_sup(subdivisions),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3;
    use approx::assert_abs_diff_eq;

    fn unit_disc() -> Density {
        let b = BoundingBox::new(2, vec2(-1.0, -1.0), vec2(1.0, 1.0)).unwrap();
        Density::new(2, b, 1.0, |x: &Vector| if x.norm() <= 1.0 { 1.0 } else { 0.0 })
            .unwrap()
            .with_polar_hint(PolarHint::new(Vector::zeros(), |_: &Vector| 1.0))
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is the highest exact degree for 8 nodes
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_abs_diff_eq!(int, 2.0 / 15.0, epsilon = 1e-14);
        let sum: f64 = w.iter().sum();
        assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn circle_grid_weights_sum_to_circumference() {
        let g = sphere_grid(2, 512).unwrap();
        assert_eq!(g.len(), 512);
        assert_abs_diff_eq!(g.surface_area(), 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn sphere_grid_weights_sum_to_surface_area() {
        let g = sphere_grid(3, 64).unwrap();
        assert_eq!(g.len(), 64 * 64);
        assert_abs_diff_eq!(g.surface_area(), 4.0 * PI, epsilon = 1e-10);
    }

    #[test]
    fn grids_are_antipodally_balanced() {
        for (dim, res) in [(2usize, 64usize), (3, 16)] {
            let g = sphere_grid(dim, res).unwrap();
            for node in g.nodes() {
                let flipped = -node;
                let hit = g.nodes().iter().any(|m| (m - flipped).norm() < 1e-9);
                assert!(hit, "missing antipode in dim {dim}");
            }
        }
    }

    #[test]
    fn rejects_bad_grid_requests() {
        assert!(matches!(sphere_grid(4, 64), Err(Error::UnsupportedDimension { .. })));
        assert!(matches!(sphere_grid(2, 15), Err(Error::BadResolution { .. })));
        assert!(matches!(sphere_grid(2, 8), Err(Error::BadResolution { .. })));
        assert!(matches!(sphere_grid(3, 6), Err(Error::BadResolution { .. })));
    }

    #[test]
    fn half_cosine_squared_moment_on_circle() {
        let g = sphere_grid(2, 1024).unwrap();
        let e1 = vec2(1.0, 0.0);
        let v = integrate_sphere(&g, |xi| xi.dot(&e1).max(0.0).powi(2)).unwrap();
        assert_abs_diff_eq!(v, PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn second_moment_on_sphere() {
        let g = sphere_grid(3, 96).unwrap();
        let v = integrate_sphere(&g, |xi| xi.z * xi.z).unwrap();
        assert_abs_diff_eq!(v, 4.0 * PI / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let g = sphere_grid(2, 64).unwrap();
        let err = integrate_sphere(&g, |xi| 1.0 / (xi.x - 1.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn circle_interpolation_recovers_linear_data() {
        let g = sphere_grid(2, 256).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|n| 2.0 + n.x).collect();
        let d = vec2(0.6, 0.8);
        assert_abs_diff_eq!(g.interpolate(&vals, &d), 2.6, epsilon = 1e-4);
    }

    #[test]
    fn sphere_interpolation_recovers_smooth_data() {
        let g = sphere_grid(3, 48).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|n| 1.0 + 0.3 * n.z + 0.2 * n.x).collect();
        let d = vec3(0.48, 0.6, 0.64).normalize();
        let want = 1.0 + 0.3 * d.z + 0.2 * d.x;
        assert_abs_diff_eq!(g.interpolate(&vals, &d), want, epsilon = 1e-3);
    }

    #[test]
    fn disc_indicator_integrates_to_area() {
        let f = unit_disc();
        let v = integrate_density(&f, |_| 1.0, 128).unwrap();
        assert_abs_diff_eq!(v, PI, epsilon = 1e-6);
    }

    #[test]
    fn disc_second_moment_kernel() {
        let f = unit_disc();
        let e1 = vec2(1.0, 0.0);
        let v = integrate_density(&f, |z| z.dot(&e1).powi(2), 128).unwrap();
        assert_abs_diff_eq!(v, PI / 4.0, epsilon = 1e-6);
    }

    #[test]
    fn box_route_handles_smooth_density() {
        let b = BoundingBox::new(2, vec2(-6.0, -6.0), vec2(6.0, 6.0)).unwrap();
        let f = Density::new(2, b, 1.0, |x: &Vector| (-x.norm_squared()).exp()).unwrap();
        let v = integrate_density(&f, |_| 1.0, 128).unwrap();
        assert_abs_diff_eq!(v, PI, epsilon = 1e-9);
    }

    #[test]
    fn ball_indicator_in_dimension_three() {
        let b = BoundingBox::new(3, vec3(-1.0, -1.0, -1.0), vec3(1.0, 1.0, 1.0)).unwrap();
        let f = Density::new(3, b, 1.0, |x: &Vector| if x.norm() <= 1.0 { 1.0 } else { 0.0 })
            .unwrap()
            .with_polar_hint(PolarHint::new(Vector::zeros(), |_: &Vector| 1.0));
        let v = integrate_density(&f, |_| 1.0, 64).unwrap();
        assert_abs_diff_eq!(v, 4.0 * PI / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn translation_shifts_support_and_values() {
        let f = unit_disc();
        let t = vec2(0.3, -0.2);
        let g = f.translate(&t);
        assert_eq!(g.eval(&vec2(1.2, -0.2)), 1.0);
        assert_eq!(g.eval(&vec2(-0.9, -0.2)), 0.0);
        let area = integrate_density(&g, |_| 1.0, 128).unwrap();
        assert_abs_diff_eq!(area, PI, epsilon = 1e-6);
        // first moment moves with the translation
        let mx = integrate_density(&g, |z| z.x, 128).unwrap();
        assert_abs_diff_eq!(mx, PI * 0.3, epsilon = 1e-6);
    }

    #[test]
    fn linear_image_scales_area_by_determinant() {
        let f = unit_disc();
        let a = crate::Matrix::new(2.0, 0.3, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0);
        let g = f.linear_image(&a).unwrap();
        let v = integrate_density(&g, |_| 1.0, 128).unwrap();
        assert_abs_diff_eq!(v, PI * 1.0, epsilon = 1e-6);
    }

    #[test]
    fn lp_norms_of_scaled_indicator() {
        let f = unit_disc().scale_values(2.0).unwrap();
        let l2 = lp_integral(&f, Lambda::Finite(2.0), 128).unwrap();
        assert_abs_diff_eq!(l2, 2.0 * PI.sqrt(), epsilon = 1e-6);
        let sup = lp_integral(&f, Lambda::Infinity, 128).unwrap();
        assert_abs_diff_eq!(sup, 2.0, epsilon = 1e-9);
        let half = lp_integral(&f, Lambda::Finite(0.5), 128).unwrap();
        // (∫ (2χ)^{1/2})² = (√2 π)²
        assert_abs_diff_eq!(half, 2.0 * PI * PI, epsilon = 1e-5);
    }

    #[test]
    fn lambda_validation_rejects_bad_values() {
        assert!(Lambda::Finite(1.0).validate().is_err());
        assert!(Lambda::Finite(0.0).validate().is_err());
        assert!(Lambda::Finite(-2.0).validate().is_err());
        assert!(Lambda::Infinity.validate().is_ok());
        let f = unit_disc();
        assert!(lp_integral(&f, Lambda::Finite(1.0), 64).is_err());
    }

    #[test]
    fn lambda_parses_and_serializes() {
        assert_eq!(Lambda::from_str("inf").unwrap(), Lambda::Infinity);
        assert_eq!(Lambda::from_str("2.5").unwrap(), Lambda::Finite(2.5));
        let j = serde_json::to_string(&Lambda::Infinity).unwrap();
        assert_eq!(j, "\"inf\"");
        let back: Lambda = serde_json::from_str("0.7").unwrap();
        assert_eq!(back, Lambda::Finite(0.7));
        let back: Lambda = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, Lambda::Infinity);
    }

    #[test]
    fn dual_exponent_values() {
        assert_abs_diff_eq!(Lambda::Finite(2.0).dual(), 2.0);
        assert_abs_diff_eq!(Lambda::Infinity.dual(), 1.0);
        assert_abs_diff_eq!(Lambda::Finite(0.7).dual(), 0.7 / (0.7 - 1.0), epsilon = 1e-15);
    }

    #[test]
    fn breakpoint_arcs_integrate_kinked_extent() {
        // Half-disc {|x| <= 1, x <= 0}: extent has kinks at ±π/2.
        let b = BoundingBox::new(2, vec2(-1.0, -1.0), vec2(0.0, 1.0)).unwrap();
        let f = Density::new(2, b, 1.0, |x: &Vector| {
            if x.norm() <= 1.0 && x.x <= 0.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
        .with_polar_hint(
            PolarHint::new(Vector::zeros(), |d: &Vector| if d.x <= 0.0 { 1.0 } else { 0.0 })
                .with_breakpoints(vec![PI / 2.0, 3.0 * PI / 2.0]),
        );
        let v = integrate_density(&f, |_| 1.0, 128).unwrap();
        assert_abs_diff_eq!(v, PI / 2.0, epsilon = 1e-9);
    }
}
