//! Ready-made densities for experiments and tests: indicators of balls,
//! ellipsoids, polygons and star bodies, the extremal radial profiles of
//! the moment inequalities, and reproducible random bump mixtures.
//!
//! Indicator densities carry exact polar support hints, so their
//! integrals converge at quadrature speed rather than being limited by
//! the jump at the boundary.

use crate::bodies::{Ellipsoid, StarBody};
use crate::error::{Error, Result};
use crate::inequalities::{extremal_profile, validate_lambda, validate_np};
use crate::quadrature::{BoundingBox, Density, Lambda, PolarHint};
use crate::{sphere_grid, vec2, Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

/// Indicator of the ball of the given radius about `center`.
pub fn ball_density(dim: usize, radius: f64, center: Vector) -> Result<Density> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::BadSupportBox { reason: "ball radius must be positive and finite" });
    }
    let mut center = center;
    if dim == 2 {
        center.z = 0.0;
    }
    let off = Vector::new(radius, radius, radius);
    let support = BoundingBox::new(dim, center - off, center + off)?;
    let r2 = radius * radius;
    let value = move |x: &Vector| if (x - center).norm_squared() <= r2 { 1.0 } else { 0.0 };
    Ok(Density::new(dim, support, 1.0, value)?
        .with_polar_hint(PolarHint::new(center, move |_: &Vector| radius)))
}

/// Indicator of an ellipsoid {x : |B(x − c)| ≤ 1}.
pub fn ellipsoid_density(e: &Ellipsoid) -> Result<Density> {
    let dim = e.dim();
    let b = *e.matrix();
    let c = e.center();
    let inv = b.try_inverse().ok_or(Error::SingularMatrix)?;
    // axis extent of B⁻¹(unit ball) along eᵢ is the i-th row norm of B⁻¹
    let row = |i: usize| Vector::new(inv[(i, 0)], inv[(i, 1)], inv[(i, 2)]).norm();
    let off = Vector::new(row(0), row(1), row(2));
    let support = BoundingBox::new(dim, c - off, c + off)?;
    let value = move |x: &Vector| if (b * (x - c)).norm_squared() <= 1.0 { 1.0 } else { 0.0 };
    let extent = move |dir: &Vector| {
        let n = (b * dir).norm();
        if n <= 0.0 {
            0.0
        } else {
            1.0 / n
        }
    };
    Ok(Density::new(dim, support, 1.0, value)?.with_polar_hint(PolarHint::new(c, extent)))
}

/// Indicator of a strictly convex polygon (dimension 2). Vertices may
/// come in either orientation; the hint is centered at the area
/// centroid with breakpoints at the vertex angles, so every smooth
/// boundary arc is integrated separately.
pub fn polygon_density(vertices: &[Vector]) -> Result<Density> {
    if vertices.len() < 3 {
        return Err(Error::BadSupportBox { reason: "polygon needs at least 3 vertices" });
    }
    let mut verts: Vec<Vector> = vertices.iter().map(|v| vec2(v.x, v.y)).collect();
    let m = verts.len();
    let shoelace = |vs: &[Vector]| -> f64 {
        let mut acc = 0.0;
        for i in 0..vs.len() {
            let a = vs[i];
            let b = vs[(i + 1) % vs.len()];
            acc += a.x * b.y - a.y * b.x;
        }
        acc
    };
    let mut twice_area = shoelace(&verts);
    if twice_area < 0.0 {
        verts.reverse();
        twice_area = -twice_area;
    }
    let scale = verts.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    if twice_area <= 1e-12 * scale * scale {
        return Err(Error::BadSupportBox { reason: "polygon is degenerate" });
    }
    // strict convexity: every corner of the counter-clockwise walk
    // turns left
    for i in 0..m {
        let a = verts[i];
        let b = verts[(i + 1) % m];
        let c = verts[(i + 2) % m];
        let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if cross <= 1e-12 * scale * scale {
            return Err(Error::BadSupportBox { reason: "polygon must be strictly convex" });
        }
    }
    let mut centroid = Vector::zeros();
    for i in 0..m {
        let a = verts[i];
        let b = verts[(i + 1) % m];
        centroid += (a + b) * (a.x * b.y - a.y * b.x);
    }
    centroid /= 3.0 * twice_area;
    // outward halfspaces n·x ≤ d of the counter-clockwise edges
    let mut halves = Vec::with_capacity(m);
    for i in 0..m {
        let a = verts[i];
        let b = verts[(i + 1) % m];
        let n = vec2(b.y - a.y, a.x - b.x);
        halves.push((n, n.dot(&a)));
    }
    let mut lo = verts[0];
    let mut hi = verts[0];
    for v in &verts {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    let support = BoundingBox::new(2, lo, hi)?;
    let slack = 1e-12 * scale;
    let ind_halves = halves.clone();
    let value = move |x: &Vector| {
        if ind_halves.iter().all(|(n, d)| n.dot(x) <= d + slack) {
            1.0
        } else {
            0.0
        }
    };
    let c0 = centroid;
    let extent = move |dir: &Vector| {
        // distance from the centroid to the nearest edge line along dir
        let mut t = f64::INFINITY;
        for (n, d) in &halves {
            let denom = n.dot(dir);
            if denom > 1e-14 {
                t = t.min((d - n.dot(&c0)) / denom);
            }
        }
        t
    };
    let breakpoints = verts
        .iter()
        .map(|v| {
            let r = v - c0;
            r.y.atan2(r.x)
        })
        .collect();
    Ok(Density::new(2, support, 1.0, value)?
        .with_polar_hint(PolarHint::new(c0, extent).with_breakpoints(breakpoints)))
}

/// Indicator of the right half-disc {|x| ≤ radius, x₁ ≥ 0}: a strongly
/// asymmetric density whose support touches its own center point.
pub fn half_ball_density(radius: f64) -> Result<Density> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::BadSupportBox { reason: "ball radius must be positive and finite" });
    }
    let support = BoundingBox::new(2, vec2(0.0, -radius), vec2(radius, radius))?;
    let r2 = radius * radius;
    let value = move |x: &Vector| {
        if x.x >= 0.0 && x.norm_squared() <= r2 {
            1.0
        } else {
            0.0
        }
    };
    let extent = move |dir: &Vector| if dir.x > 1e-12 { radius } else { 0.0 };
    Ok(Density::new(2, support, 1.0, value)?.with_polar_hint(
        PolarHint::new(Vector::zeros(), extent).with_breakpoints(vec![0.5 * PI, 1.5 * PI]),
    ))
}

/// The extremal density p_λ(|B(x − v)|) of the moment inequalities: an
/// ellipsoid indicator at λ = ∞, a compactly supported power profile
/// for λ > 1, and a heavy-tailed profile for admissible λ < 1. The
/// heavy tail is cut at a gauge radius large enough that the discarded
/// share sits far below desk-scale tolerances.
pub fn profile_density(
    dim: usize,
    lambda: Lambda,
    p: f64,
    matrix: &Matrix,
    shift: Vector,
) -> Result<Density> {
    validate_np(dim, p)?;
    let lambda = validate_lambda(dim, p, lambda)?;
    let b = *matrix;
    if dim == 2 {
        let embedded = b.m13 == 0.0
            && b.m23 == 0.0
            && b.m31 == 0.0
            && b.m32 == 0.0
            && b.m33 == 1.0
            && shift.z == 0.0;
        if !embedded {
            return Err(Error::BadSupportBox {
                reason: "dimension-2 profile must embed with m33 = 1 and shift.z = 0",
            });
        }
    }
    let inv = b.try_inverse().ok_or(Error::SingularMatrix)?;
    let cutoff = profile_cutoff(dim, lambda, p);
    let row = |i: usize| Vector::new(inv[(i, 0)], inv[(i, 1)], inv[(i, 2)]).norm();
    let off = Vector::new(row(0), row(1), row(2)) * cutoff;
    let support = BoundingBox::new(dim, shift - off, shift + off)?;
    let value = move |x: &Vector| {
        let t = (b * (x - shift)).norm();
        if t >= cutoff {
            0.0
        } else {
            extremal_profile(lambda, p, t)
        }
    };
    let extent = move |dir: &Vector| {
        let n = (b * dir).norm();
        if n <= 0.0 {
            0.0
        } else {
            cutoff / n
        }
    };
    Ok(Density::new(dim, support, 1.0, value)?.with_polar_hint(PolarHint::new(shift, extent)))
}

/// Radius beyond which a profile is cut: 1 for compactly supported
/// branches, otherwise where the λ-norm integrand t^{n-1-λp/(1-λ)} has
/// discarded share ~1e-10 (this exponent decays slower than the mass
/// integrand's, so it is the binding one).
fn profile_cutoff(dim: usize, lambda: Lambda, p: f64) -> f64 {
    match lambda {
        Lambda::Infinity => 1.0,
        Lambda::Finite(l) if l > 1.0 => 1.0,
        Lambda::Finite(l) => {
            let kappa = l * p / (1.0 - l) - dim as f64;
            10f64.powf(10.0 / kappa).clamp(20.0, 2000.0)
        }
    }
}

/// Extremal density of the gauge-moment inequality for a star body K:
/// the profile composed with the gauge of K, so the bound is saturated
/// on (K, this density) for the same λ and p.
pub fn gauge_profile_density(k: &StarBody, lambda: Lambda, p: f64) -> Result<Density> {
    let dim = k.dim();
    validate_np(dim, p)?;
    let lambda = validate_lambda(dim, p, lambda)?;
    let cutoff = profile_cutoff(dim, lambda, p);
    let probe = sphere_grid(dim, if dim == 2 { 512 } else { 48 })?;
    let mut outer: f64 = 0.0;
    for xi in probe.nodes() {
        outer = outer.max(k.radial(xi));
    }
    // the box only bounds the support; the hint is exact
    let pad = 1.05 * outer * cutoff;
    let off = Vector::new(pad, pad, pad);
    let support = BoundingBox::new(dim, -off, off)?;
    let k_val = k.clone();
    let k_ext = k.clone();
    let value = move |x: &Vector| {
        let t = k_val.gauge(x);
        if t >= cutoff {
            0.0
        } else {
            extremal_profile(lambda, p, t)
        }
    };
    let extent = move |dir: &Vector| cutoff * k_ext.radial(dir);
    Ok(Density::new(dim, support, 1.0, value)?
        .with_polar_hint(PolarHint::new(Vector::zeros(), extent)))
}

/// Multiplies a density by 1 + amplitude·sin(frequency·x₁): a strictly
/// positive modulation that keeps the support and pushes the input off
/// every equality family.
pub fn perturbed_density(base: &Density, amplitude: f64, frequency: f64) -> Result<Density> {
    if !(amplitude.abs() < 1.0) {
        return Err(Error::BadSupportBox { reason: "perturbation amplitude must stay below 1" });
    }
    if !frequency.is_finite() {
        return Err(Error::BadSupportBox { reason: "perturbation frequency must be finite" });
    }
    let inner = base.clone();
    let value =
        move |x: &Vector| inner.eval(x) * (1.0 + amplitude * (frequency * x.x).sin());
    let out = Density::new(
        base.dim(),
        *base.support_box(),
        base.sup_bound() * (1.0 + amplitude.abs()),
        value,
    )?;
    Ok(match base.polar_hint() {
        Some(h) => out.with_polar_hint(h.clone()),
        None => out,
    })
}

/// One smooth radial bump a·(1 − |x − c|²/r²)₊⁴.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub center: Vector,
    pub radius: f64,
    pub amplitude: f64,
}

/// Sum of smooth bumps: a C³ density with compact support and no
/// symmetry, the default generic test input.
pub fn bump_density(dim: usize, bumps: &[Bump]) -> Result<Density> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension { dim });
    }
    if bumps.is_empty() {
        return Err(Error::BadSupportBox { reason: "need at least one bump" });
    }
    let mut sup = 0.0;
    let mut lo = Vector::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for bump in bumps {
        if !(bump.radius > 0.0) || !(bump.amplitude > 0.0) {
            return Err(Error::BadSupportBox {
                reason: "bump radius and amplitude must be positive",
            });
        }
        if dim == 2 && bump.center.z != 0.0 {
            return Err(Error::BadSupportBox {
                reason: "dimension-2 bump centers must lie in the z = 0 plane",
            });
        }
        let r = Vector::new(bump.radius, bump.radius, bump.radius);
        lo = lo.inf(&(bump.center - r));
        hi = hi.sup(&(bump.center + r));
        sup += bump.amplitude;
    }
    let support = BoundingBox::new(dim, lo, hi)?;
    let list = bumps.to_vec();
    let value = move |x: &Vector| {
        let mut acc = 0.0;
        for bump in &list {
            let u = 1.0 - (x - bump.center).norm_squared() / (bump.radius * bump.radius);
            if u > 0.0 {
                let u2 = u * u;
                acc += bump.amplitude * u2 * u2;
            }
        }
        acc
    };
    Density::new(dim, support, sup, value)
}

/// Reproducible random bump mixture: 3–6 bumps with centers in
/// [−0.8, 0.8]ⁿ, radii in [0.25, 0.6] and amplitudes in [0.5, 1.5],
/// drawn from a counter-based generator so equal seeds give equal
/// densities on every platform.
pub fn seeded_bumps(dim: usize, seed: u64) -> Result<(Density, Vec<Bump>)> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension { dim });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let count = rng.gen_range(3..=6);
    let axes = if dim == 2 { 2 } else { 3 };
    let mut bumps = Vec::with_capacity(count);
    for _ in 0..count {
        let mut center = Vector::zeros();
        for a in 0..axes {
            center[a] = rng.gen_range(-0.8..0.8);
        }
        bumps.push(Bump {
            center,
            radius: rng.gen_range(0.25..0.6),
            amplitude: rng.gen_range(0.5..1.5),
        });
    }
    let f = bump_density(dim, &bumps)?;
    Ok((f, bumps))
}

/// Indicator density of a star body about the origin; the polar hint
/// carries the exact radial boundary.
pub fn indicator_of_star(k: &StarBody) -> Result<Density> {
    let dim = k.dim();
    let probe = sphere_grid(dim, if dim == 2 { 512 } else { 48 })?;
    let mut outer: f64 = 0.0;
    for xi in probe.nodes() {
        outer = outer.max(k.radial(xi));
    }
    // the box only bounds the support; the hint is exact
    let pad = 1.05 * outer;
    let off = Vector::new(pad, pad, pad);
    let support = BoundingBox::new(dim, -off, off)?;
    let k_ind = k.clone();
    let k_ext = k.clone();
    let value = move |x: &Vector| if k_ind.gauge(x) <= 1.0 { 1.0 } else { 0.0 };
    let extent = move |dir: &Vector| k_ext.radial(dir);
    Ok(Density::new(dim, support, 1.0, value)?
        .with_polar_hint(PolarHint::new(Vector::zeros(), extent)))
}

/// Whether `point` lies in the convex hull of the union of the bump
/// supports, up to `slack`, tested against the hull's support function
/// over a dense direction set.
pub fn within_bump_hull(dim: usize, point: &Vector, bumps: &[Bump], slack: f64) -> Result<bool> {
    if bumps.is_empty() {
        return Ok(false);
    }
    let grid = sphere_grid(dim, if dim == 2 { 1024 } else { 64 })?;
    for xi in grid.nodes() {
        let h = bumps
            .iter()
            .map(|b| xi.dot(&b.center) + b.radius)
            .fold(f64::NEG_INFINITY, f64::max);
        if xi.dot(point) > h + slack {
            return Ok(false);
        }
    }
    Ok(true)
}
