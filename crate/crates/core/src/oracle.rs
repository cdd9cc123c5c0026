//! Independent Monte-Carlo and brute-force estimators.
//!
//! Nothing here shares code with the quadrature pipeline: integrals are
//! estimated by uniform sampling over the support box, polar volumes by
//! rejection sampling against the halfspace description, and minimizing
//! translations by exhaustive lattice search. Agreement within a few
//! standard errors validates the fast path end to end.

use crate::bodies::{self, SupportBody};
use crate::error::{Error, Result};
use crate::quadrature::{Density, DirectionGrid};
use crate::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// A Monte-Carlo estimate with its one-standard-error spread.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 1000 {
        return Err(Error::TooFewSamples { samples });
    }
    Ok(())
}

/// Unbiased estimate of ∫ f(z)·kernel(z) dz by uniform sampling over
/// the density's support box. Deterministic for a fixed seed.
pub fn mc_integral<F>(f: &Density, kernel: F, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&Vector) -> f64,
{
    check_samples(samples)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (lo, hi) = (f.support_box().min(), f.support_box().max());
    let dim = f.dim();
    let axes = if dim == 2 { 2 } else { 3 };
    let cell = f.support_box().volume();
    // streaming mean and second moment (Welford)
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let mut x = Vector::zeros();
        for a in 0..axes {
            x[a] = rng.gen_range(lo[a]..hi[a]);
        }
        let v = f.eval(&x) * kernel(&x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { location: x, value: v });
        }
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let variance = m2 / (samples as f64 - 1.0);
    Ok(McEstimate {
        value: cell * mean,
        stderr: cell * (variance / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Rejection-sampling estimate of the polar volume: a point y lies in
/// K° exactly when |y|·h(K, ŷ) ≤ 1, and K° sits inside the cube of
/// half-width 1/min h (K contains the ball of radius min h), which is
/// where the samples are drawn. The grid supplies the dense direction
/// set that pins the bounding radius and validates positivity of h.
pub fn mc_polar_volume(
    k: &SupportBody,
    grid: &DirectionGrid,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    if grid.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: grid.dim() });
    }
    let h = k.sample(grid)?;
    let h_min = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = 1.0 / h_min;
    let dim = k.dim();
    let axes = if dim == 2 { 2 } else { 3 };
    let cube = (2.0 * bound).powi(axes as i32);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut y = Vector::zeros();
        for a in 0..axes {
            y[a] = rng.gen_range(-bound..bound);
        }
        let r = y.norm();
        if r <= 1e-300 || r * k.support(&(y / r)) <= 1.0 {
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(Error::Inconclusive { context: "polar volume estimate" });
    }
    let q = hits as f64 / samples as f64;
    Ok(McEstimate {
        value: cube * q,
        stderr: cube * (q * (1.0 - q) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Exhaustive lattice search for the translation minimizing the polar
/// volume of `K − s`: every interior lattice point of spacing
/// `grid_step` is evaluated and the argmin returned. Slow and
/// unconditional — the oracle for the solver-based minimizers.
pub fn grid_minimize_polar(
    k: &SupportBody,
    grid_step: f64,
    grid: &DirectionGrid,
) -> Result<Vector> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::BadSupportBox { reason: "grid step must be positive and finite" });
    }
    if grid.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: grid.dim() });
    }
    let h = k.sample(grid)?;
    let dim = k.dim();
    let axes = if dim == 2 { 2 } else { 3 };
    // axis-aligned bounds of the body: -h(-e) ≤ s·e ≤ h(e)
    let mut lo = Vector::zeros();
    let mut hi = Vector::zeros();
    for a in 0..axes {
        let mut e = Vector::zeros();
        e[a] = 1.0;
        hi[a] = k.support(&e);
        lo[a] = -k.support(&-e);
    }
    let steps = |a: usize| ((hi[a] - lo[a]) / grid_step).ceil() as i64 + 1;
    let margin = |s: &Vector| -> f64 {
        grid.nodes()
            .iter()
            .zip(&h)
            .map(|(xi, hx)| hx - s.dot(xi))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best: Option<(Vector, f64)> = None;
    let mut scan = |s: Vector| -> Result<()> {
        if margin(&s) <= 1e-9 {
            return Ok(());
        }
        let shifted = bodies::translate_support(k, &-s);
        let vol = bodies::polar_volume(&shifted, grid)?;
        if best.map(|(_, v)| vol < v).unwrap_or(true) {
            best = Some((s, vol));
        }
        Ok(())
    };
    if dim == 2 {
        for i in 0..steps(0) {
            for j in 0..steps(1) {
                let s = Vector::new(lo.x + i as f64 * grid_step, lo.y + j as f64 * grid_step, 0.0);
                scan(s)?;
            }
        }
    } else {
        for i in 0..steps(0) {
            for j in 0..steps(1) {
                for l in 0..steps(2) {
                    let s = Vector::new(
                        lo.x + i as f64 * grid_step,
                        lo.y + j as f64 * grid_step,
                        lo.z + l as f64 * grid_step,
                    );
                    scan(s)?;
                }
            }
        }
    }
    best.map(|(s, _)| s).ok_or(Error::Inconclusive { context: "translation lattice search" })
}
