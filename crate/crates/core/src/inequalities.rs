//! Sharp constants, extremal profiles, and LHS/RHS evaluators for the
//! affine volume-product and moment inequalities.
//!
//! Every evaluator produces an [`IneqReport`] with both sides of the
//! inequality oriented so that `ratio = lhs / rhs ≤ 1` for admissible
//! inputs, with equality exactly on the extremal family. Identifiers
//! name the inequalities by role:
//!
//! - `"bs"`: volume product of a symmetric convex body and its polar.
//! - `"bs-santalo"`: volume product about the Santaló point.
//! - `"bs-centroid"`: volume product about the center of mass.
//! - `"bs-centroid-body"`: volume product with the polar centroid body.
//! - `"busemann-petty"`: centroid-body volume domination.
//! - `"moment-polar"` / `"moment-volume"`: moment-body versions with
//!   the one-sided kernel and their sharp constants.
//! - `"moment-polar-translate"`: moment-polar volume minimized over
//!   translations.
//! - `"gauge-moment"`: the gauge-weighted moment bound for densities.
//! - `"bs-functional-symmetric"` / `"bs-functional"`: the functional
//!   volume-product bounds (symmetric kernel, and the asymmetric kernel
//!   translated to the density's center point).
//! - `"moment-product"`: the two-density moment lower bound.

use crate::bodies::{self, ConvexBody, StarBody};
use crate::error::{Error, Result};
use crate::lp_bodies::{
    centroid_body, centroid_normalization, moment_body_k, AsymParams, MomentCache,
};
use crate::quadrature::{integrate_density, lp_integral, Density, DirectionGrid, Lambda};
use crate::santalo::{self, find_lp_center};
use crate::Vector;
use serde::{Deserialize, Serialize};

fn beta(m: f64, l: f64) -> f64 {
    libm::tgamma(m) * libm::tgamma(l) / libm::tgamma(m + l)
}

pub(crate) fn validate_np(n: usize, p: f64) -> Result<()> {
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension { dim: n });
    }
    if !p.is_finite() || p < 1.0 {
        return Err(Error::BadExponent { p });
    }
    Ok(())
}

/// Validates the moment-inequality admissibility window
/// λ ∈ (n/(n+p), 1) ∪ (1, ∞].
pub(crate) fn validate_lambda(n: usize, p: f64, lambda: Lambda) -> Result<Lambda> {
    let lambda = lambda.validate()?;
    if let Lambda::Finite(l) = lambda {
        if l <= n as f64 / (n as f64 + p) {
            return Err(Error::BadLambda {
                lambda: l,
                reason: "need lambda above n/(n+p), or infinity",
            });
        }
    }
    Ok(lambda)
}

/// Sharp constant of the gauge-weighted moment inequality; three
/// closed-form branches in λ.
pub fn constant_a(n: usize, p: f64, lambda: Lambda) -> Result<f64> {
    validate_np(n, p)?;
    let lambda = validate_lambda(n, p, lambda)?;
    let nf = n as f64;
    Ok(match lambda {
        Lambda::Infinity => (nf / (nf + p)).powi(-(n as i32)),
        Lambda::Finite(l) => {
            let ld = l / (l - 1.0);
            let base = if l > 1.0 {
                (nf / p)
                    * (nf / (ld * p) + 1.0).powf(ld - 1.0)
                    * (ld * p / nf + 1.0).powf(nf / p)
                    * beta(nf / p, ld)
            } else {
                (nf / p)
                    * (nf / (ld * p) + 1.0).powf(ld - 1.0)
                    * (l * p / ((1.0 - l) * nf) - 1.0).powf(nf / p)
                    * beta(nf / p, -ld - nf / p + 1.0)
            };
            base.powf(p)
        }
    })
}

/// Sharp bound of the moment-polar volume product (its value on the
/// unit ball).
pub fn constant_big_r(n: usize, p: f64) -> Result<f64> {
    validate_np(n, p)?;
    let nf = n as f64;
    use libm::tgamma;
    use std::f64::consts::PI;
    let core = 2.0 * tgamma(0.5 * (nf + p + 2.0))
        / (tgamma(0.5 * (nf + 2.0)) * tgamma(0.5 * (p + 1.0)));
    Ok(PI.powf(nf / (2.0 * p) + nf) * tgamma(0.5 * (nf + 2.0)).powi(-2) * core.powf(nf / p))
}

/// Sharp bound of the normalized moment-body volume (its value on the
/// unit ball).
pub fn constant_small_r(n: usize, p: f64) -> Result<f64> {
    validate_np(n, p)?;
    let nf = n as f64;
    use libm::tgamma;
    use std::f64::consts::PI;
    let core = 2.0 * tgamma(0.5 * (nf + p + 2.0))
        / (tgamma(0.5 * (nf + 2.0)) * tgamma(0.5 * (p + 1.0)));
    Ok(PI.powf(-nf / (2.0 * p)) * core.powf(-nf / p))
}

/// Sharp constant of the functional volume-product bound:
/// (n/(n+p))ⁿ · a · Rᵖ · nᵖ.
pub fn constant_b(n: usize, p: f64, lambda: Lambda) -> Result<f64> {
    let a = constant_a(n, p, lambda)?;
    let big_r = constant_big_r(n, p)?;
    let nf = n as f64;
    Ok((nf / (nf + p)).powi(n as i32) * a * big_r.powf(p) * nf.powf(p))
}

/// Sharp constant of the two-density moment bound: a · b · n^{−p}.
pub fn constant_d(n: usize, p: f64, lambda: Lambda) -> Result<f64> {
    let a = constant_a(n, p, lambda)?;
    let b = constant_b(n, p, lambda)?;
    Ok(a * b * (n as f64).powf(-p))
}

/// Centroid-body normalization making the unit ball a fixed point.
pub fn constant_c(n: usize, p: f64) -> Result<f64> {
    validate_np(n, p)?;
    centroid_normalization(n, p)
}

/// The extremal radial profile of the moment inequality; maximum 1 at
/// s = 0 in every branch.
pub fn extremal_profile(lambda: Lambda, p: f64, s: f64) -> f64 {
    match lambda {
        Lambda::Infinity => {
            if s.abs() <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        Lambda::Finite(l) => {
            let sp = s.abs().powf(p);
            if l > 1.0 {
                (1.0 - sp).max(0.0).powf(1.0 / (l - 1.0))
            } else {
                (1.0 + sp).powf(1.0 / (l - 1.0))
            }
        }
    }
}

/// Exponent pair with every sharp constant derived from it.
#[derive(Clone, Copy, Debug)]
pub struct Constants {
    pub n: usize,
    pub p: f64,
    pub lambda: Lambda,
    /// λ' = λ/(λ−1); 1 at λ = ∞, negative for λ < 1.
    pub lambda_dual: f64,
    /// Gauge-moment sharp constant.
    pub moment: f64,
    /// Functional volume-product sharp constant.
    pub functional: f64,
    /// Two-density moment sharp constant.
    pub product: f64,
    /// Moment-polar volume product bound.
    pub polar_product: f64,
    /// Normalized moment-volume bound.
    pub volume_ratio: f64,
    /// Centroid-body normalization.
    pub centroid_norm: f64,
    /// Unit-ball volume ω_n.
    pub ball_volume: f64,
}

impl Constants {
    pub fn new(n: usize, p: f64, lambda: Lambda) -> Result<Self> {
        let lambda = validate_lambda(n, p, lambda)?;
        Ok(Constants {
            n,
            p,
            lambda,
            lambda_dual: lambda.dual(),
            moment: constant_a(n, p, lambda)?,
            functional: constant_b(n, p, lambda)?,
            product: constant_d(n, p, lambda)?,
            polar_product: constant_big_r(n, p)?,
            volume_ratio: constant_small_r(n, p)?,
            centroid_norm: constant_c(n, p)?,
            ball_volume: bodies::unit_ball_volume(n as f64),
        })
    }
}

/// Quadrature settings recorded in every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dim: usize,
    pub resolution: usize,
    pub subdivisions: usize,
}

/// One evaluated inequality: both sides, their ratio, and whether the
/// input saturates the bound. `ratio` is absent when the right-hand
/// side degenerates to zero (unbounded polar moment body), in which
/// case `degenerate` is set and the bound holds vacuously.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IneqReport {
    pub ineq: String,
    pub n: usize,
    pub p: Option<f64>,
    pub lambda: Option<Lambda>,
    pub eps: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub saturated: bool,
    pub degenerate: bool,
    /// Center point used to translate the density, when the inequality
    /// involves one (the translate minimizer for the translated
    /// moment-polar case).
    pub cfp: Option<Vec<f64>>,
    pub grid: GridMeta,
}

impl IneqReport {
    #[allow(clippy::too_many_arguments)]
    fn build(
        ineq: &str,
        n: usize,
        p: Option<f64>,
        lambda: Option<Lambda>,
        eps: Option<f64>,
        lhs: f64,
        rhs: f64,
        sat_tol: f64,
        cfp: Option<Vec<f64>>,
        grid: GridMeta,
    ) -> IneqReport {
        let degenerate = !(rhs > 0.0) || !rhs.is_finite();
        let ratio = if degenerate { None } else { Some(lhs / rhs) };
        let saturated = ratio.map(|r| (r - 1.0).abs() <= sat_tol).unwrap_or(false);
        IneqReport {
            ineq: ineq.to_string(),
            n,
            p,
            lambda,
            eps,
            lhs,
            rhs,
            ratio,
            saturated,
            degenerate,
            cfp,
            grid,
        }
    }
}

fn point_coords(v: &Vector, dim: usize) -> Vec<f64> {
    if dim == 2 {
        vec![v.x, v.y]
    } else {
        vec![v.x, v.y, v.z]
    }
}

/// ‖f‖₁ and ‖f‖_λ at the given quadrature.
fn density_norms(f: &Density, lambda: Lambda, subdivisions: usize) -> Result<(f64, f64)> {
    let mass = integrate_density(f, |_| 1.0, subdivisions)?;
    if !(mass > 0.0) {
        return Err(Error::BadSupportBox { reason: "density has no mass" });
    }
    let norm_l = lp_integral(f, lambda, subdivisions)?;
    Ok((mass, norm_l))
}

/// Gauge-weighted moment bound: ‖f‖₁^{n+pλ'} against
/// a · (∫ f gᵖ)ⁿ · ‖f‖_λ^{pλ'} · vol(K)ᵖ. The sharp-constant claim
/// needs K convex with the origin interior; the evaluation itself only
/// uses the radial description.
pub fn eval_moment_ineq(
    f: &Density,
    k: &StarBody,
    lambda: Lambda,
    p: f64,
    grid: &DirectionGrid,
    subdivisions: usize,
    sat_tol: f64,
) -> Result<IneqReport> {
    if f.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: k.dim() });
    }
    let n = f.dim();
    let consts = Constants::new(n, p, lambda)?;
    let (norm1, norm_l) = density_norms(f, lambda, subdivisions)?;
    let moment = integrate_density(f, |z| k.gauge(z).powf(p), subdivisions)?;
    let vol = bodies::volume(k, grid)?;
    let ld = consts.lambda_dual;
    let lhs = norm1.powf(n as f64 + p * ld);
    let rhs = consts.moment * moment.powi(n as i32) * norm_l.powf(p * ld) * vol.powf(p);
    Ok(IneqReport::build(
        "gauge-moment",
        n,
        Some(p),
        Some(lambda),
        None,
        lhs,
        rhs,
        sat_tol,
        None,
        GridMeta { dim: n, resolution: grid.resolution(), subdivisions },
    ))
}

/// Functional volume-product bound with the symmetric kernel |⟨x,ξ⟩|ᵖ
/// and constant 2⁻ⁿ·b.
pub fn eval_bs_symmetric(
    f: &Density,
    lambda: Lambda,
    p: f64,
    grid: &DirectionGrid,
    subdivisions: usize,
    sat_tol: f64,
) -> Result<IneqReport> {
    let n = f.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.dim() });
    }
    let consts = Constants::new(n, p, lambda)?;
    let cache = MomentCache::new(f, subdivisions)?;
    let norm1 = cache.mass();
    if !(norm1 > 0.0) {
        return Err(Error::BadSupportBox { reason: "density has no mass" });
    }
    let norm_l = lp_integral(f, lambda, subdivisions)?;
    // |s|^p is twice the balanced bracket
    let half = AsymParams::new(p, 0.5)?;
    let hp = cache.support_grid_p(&half, grid, &Vector::zeros());
    let nf = n as f64;
    let mut spherical = 0.0;
    let mut degenerate = false;
    for (h, w) in hp.iter().zip(grid.weights()) {
        let m = 2.0 * h;
        if m <= 0.0 {
            degenerate = true;
            break;
        }
        spherical += w * m.powf(-nf / p);
    }
    let ld = consts.lambda_dual;
    let lhs = norm1.powf(nf + ld * p);
    let rhs = if degenerate {
        0.0
    } else {
        0.5f64.powi(n as i32) * consts.functional * norm_l.powf(ld * p) * spherical.powf(-p)
    };
    Ok(IneqReport::build(
        "bs-functional-symmetric",
        n,
        Some(p),
        Some(lambda),
        None,
        lhs,
        rhs,
        sat_tol,
        None,
        GridMeta { dim: n, resolution: grid.resolution(), subdivisions },
    ))
}

/// Functional volume-product bound with the one-sided kernel: the
/// density is translated by −c (c its center point, located at the
/// symmetric-map zero) and the spherical integral uses ⟨x,ξ⟩_ε^p,
/// ε ∈ [0, 1/2). The center is always computed from the one-sided map,
/// for which the right-hand side is smallest.
pub fn eval_bs_asymmetric(
    f: &Density,
    lambda: Lambda,
    p: f64,
    eps: f64,
    grid: &DirectionGrid,
    subdivisions: usize,
    sat_tol: f64,
) -> Result<IneqReport> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::BadEpsilon { eps });
    }
    let n = f.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.dim() });
    }
    let consts = Constants::new(n, p, lambda)?;
    let cache = MomentCache::new(f, subdivisions)?;
    let norm1 = cache.mass();
    if !(norm1 > 0.0) {
        return Err(Error::BadSupportBox { reason: "density has no mass" });
    }
    let norm_l = lp_integral(f, lambda, subdivisions)?;
    let center = find_lp_center(f, &AsymParams::new(p, 0.0)?, grid, subdivisions, 1e-7)?.center;
    let prm = AsymParams::new(p, eps)?;
    let hp = cache.support_grid_p(&prm, grid, &-center);
    let nf = n as f64;
    let mut spherical = 0.0;
    let mut degenerate = false;
    for (h, w) in hp.iter().zip(grid.weights()) {
        if *h <= 0.0 {
            degenerate = true;
            break;
        }
        spherical += w * h.powf(-nf / p);
    }
    let ld = consts.lambda_dual;
    let lhs = norm1.powf(nf + ld * p);
    let rhs = if degenerate {
        0.0
    } else {
        consts.functional * norm_l.powf(ld * p) * spherical.powf(-p)
    };
    Ok(IneqReport::build(
        "bs-functional",
        n,
        Some(p),
        Some(lambda),
        Some(eps),
        lhs,
        rhs,
        sat_tol,
        Some(point_coords(&center, n)),
        GridMeta { dim: n, resolution: grid.resolution(), subdivisions },
    ))
}

/// Two-density moment lower bound: (‖f‖₁‖g‖₁)^{n+λ'p} against
/// d · (‖f‖_λ‖g‖_λ)^{λ'p} · (∬ f(x)g(y)⟨x+c,y⟩_ε^p)ⁿ with f's mass
/// translated by −c; ε ∈ [0, 1/2]. The center comes from the one-sided
/// map except at ε = 1/2, where symmetry puts it at the origin.
#[allow(clippy::too_many_arguments)]
pub fn eval_renyi(
    f: &Density,
    g: &Density,
    lambda: Lambda,
    p: f64,
    eps: f64,
    grid: &DirectionGrid,
    subdivisions: usize,
    sat_tol: f64,
) -> Result<IneqReport> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::BadEpsilon { eps });
    }
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    let consts = Constants::new(n, p, lambda)?;
    let cache_f = MomentCache::new(f, subdivisions)?;
    let cache_g = MomentCache::new(g, subdivisions)?;
    let (f1, g1) = (cache_f.mass(), cache_g.mass());
    if !(f1 > 0.0) || !(g1 > 0.0) {
        return Err(Error::BadSupportBox { reason: "density has no mass" });
    }
    let fl = lp_integral(f, lambda, subdivisions)?;
    let gl = lp_integral(g, lambda, subdivisions)?;
    let center = if (eps - 0.5).abs() < 1e-12 {
        Vector::zeros()
    } else {
        find_lp_center(f, &AsymParams::new(p, 0.0)?, grid, subdivisions, 1e-7)?.center
    };
    let prm = AsymParams::new(p, eps)?;
    let zero = Vector::zeros();
    let mut double = 0.0;
    for (x, wf) in cache_f.points().iter().zip(cache_f.weighted()) {
        double += wf * cache_g.support_p(&prm, &(x - center), &zero);
    }
    let ld = consts.lambda_dual;
    let nf = n as f64;
    let lhs = (f1 * g1).powf(nf + ld * p);
    let rhs = if double > 0.0 {
        consts.product * (fl * gl).powf(ld * p) * double.powi(n as i32)
    } else {
        0.0
    };
    Ok(IneqReport::build(
        "moment-product",
        n,
        Some(p),
        Some(lambda),
        Some(eps),
        lhs,
        rhs,
        sat_tol,
        Some(point_coords(&center, n)),
        GridMeta { dim: n, resolution: grid.resolution(), subdivisions },
    ))
}

/// Geometric volume-product and moment-body inequalities on a body
/// given by its radial description.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometricCase {
    /// vol(K)·vol(K°) ≤ ω²; stated for origin-symmetric convex K.
    VolumeProduct,
    /// Volume product about the Santaló point; any convex K.
    VolumeProductSantalo,
    /// Volume product about the center of mass; any convex K.
    VolumeProductCentroid,
    /// vol(K)·vol of the polar centroid body; any star K.
    CentroidBodyProduct { p: f64 },
    /// Centroid body dominates in volume; any star K.
    CentroidVolume { p: f64 },
    /// Moment-polar product about the moment body's Santaló point.
    MomentPolar { p: f64, eps: f64 },
    /// Normalized moment-body volume bound.
    MomentVolume { p: f64, eps: f64 },
    /// Moment-polar volume minimized over translations of K
    /// (one-sided kernel).
    MomentPolarTranslate { p: f64 },
}

impl GeometricCase {
    pub fn id(&self) -> &'static str {
        match self {
            GeometricCase::VolumeProduct => "bs",
            GeometricCase::VolumeProductSantalo => "bs-santalo",
            GeometricCase::VolumeProductCentroid => "bs-centroid",
            GeometricCase::CentroidBodyProduct { .. } => "bs-centroid-body",
            GeometricCase::CentroidVolume { .. } => "busemann-petty",
            GeometricCase::MomentPolar { .. } => "moment-polar",
            GeometricCase::MomentVolume { .. } => "moment-volume",
            GeometricCase::MomentPolarTranslate { .. } => "moment-polar-translate",
        }
    }

    fn p(&self) -> Option<f64> {
        match self {
            GeometricCase::VolumeProduct
            | GeometricCase::VolumeProductSantalo
            | GeometricCase::VolumeProductCentroid => None,
            GeometricCase::CentroidBodyProduct { p }
            | GeometricCase::CentroidVolume { p }
            | GeometricCase::MomentPolar { p, .. }
            | GeometricCase::MomentVolume { p, .. }
            | GeometricCase::MomentPolarTranslate { p } => Some(*p),
        }
    }

    fn eps(&self) -> Option<f64> {
        match self {
            GeometricCase::MomentPolar { eps, .. } | GeometricCase::MomentVolume { eps, .. } => {
                Some(*eps)
            }
            GeometricCase::MomentPolarTranslate { .. } => Some(0.0),
            _ => None,
        }
    }
}

/// Downhill-simplex minimization; adequate for the smooth low-dimension
/// translate objectives used here.
fn nelder_mead<F>(objective: F, start: Vector, scale: f64, dim: usize, iters: usize) -> (Vector, f64)
where
    F: Fn(&Vector) -> f64,
{
    let axes = if dim == 2 { 2 } else { 3 };
    let mut simplex: Vec<(Vector, f64)> = Vec::with_capacity(axes + 1);
    simplex.push((start, objective(&start)));
    for a in 0..axes {
        let mut v = start;
        v[a] += scale;
        simplex.push((v, objective(&v)));
    }
    for _ in 0..iters {
        simplex.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[axes].1;
        if (worst - best).abs() <= 1e-12 * best.abs().max(1e-12) {
            break;
        }
        let mut centroid = Vector::zeros();
        for s in &simplex[..axes] {
            centroid += s.0;
        }
        centroid /= axes as f64;
        let reflect = centroid + (centroid - simplex[axes].0);
        let fr = objective(&reflect);
        if fr < simplex[0].1 {
            let expand = centroid + (reflect - centroid) * 2.0;
            let fe = objective(&expand);
            simplex[axes] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[axes - 1].1 {
            simplex[axes] = (reflect, fr);
        } else {
            let contract = centroid + (simplex[axes].0 - centroid) * 0.5;
            let fc = objective(&contract);
            if fc < simplex[axes].1 {
                simplex[axes] = (contract, fc);
            } else {
                let anchor = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = anchor + (s.0 - anchor) * 0.5;
                    s.1 = objective(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    simplex[0]
}

/// Evaluates one geometric inequality for the body `k`.
///
/// `subdivisions` only matters for the translated moment-polar case,
/// which integrates the body's indicator density.
pub fn eval_geometric(
    k: &StarBody,
    case: GeometricCase,
    grid: &DirectionGrid,
    subdivisions: usize,
    sat_tol: f64,
) -> Result<IneqReport> {
    let n = k.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.dim() });
    }
    let nf = n as f64;
    let omega = bodies::unit_ball_volume(nf);
    let vol = bodies::volume(k, grid)?;
    let mut cfp = None;
    let (lhs, rhs) = match case {
        GeometricCase::VolumeProduct => {
            let support = ConvexBody::from_star(k, grid)?;
            (vol * bodies::polar_volume(support.support(), grid)?, omega * omega)
        }
        GeometricCase::VolumeProductSantalo => {
            let support = ConvexBody::from_star(k, grid)?;
            let s = santalo::santalo_point(support.support(), grid, 1e-8)?.point;
            let shifted = bodies::translate_support(support.support(), &-s);
            cfp = Some(point_coords(&s, n));
            (vol * bodies::polar_volume(&shifted, grid)?, omega * omega)
        }
        GeometricCase::VolumeProductCentroid => {
            let support = ConvexBody::from_star(k, grid)?;
            let c = santalo::centroid_star(k, grid)?;
            let shifted = bodies::translate_support(support.support(), &-c);
            cfp = Some(point_coords(&c, n));
            (vol * bodies::polar_volume(&shifted, grid)?, omega * omega)
        }
        GeometricCase::CentroidBodyProduct { p } => {
            validate_np(n, p)?;
            let gamma = centroid_body(k, p, grid)?;
            (vol * bodies::polar_volume(&gamma, grid)?, omega * omega)
        }
        GeometricCase::CentroidVolume { p } => {
            validate_np(n, p)?;
            let gamma = centroid_body(k, p, grid)?;
            let gamma_star = ConvexBody::from_support(&gamma, grid)?;
            (vol, gamma_star.volume(grid)?)
        }
        GeometricCase::MomentPolar { p, eps } => {
            validate_np(n, p)?;
            let prm = AsymParams::new(p, eps)?;
            let m = moment_body_k(k, &prm, grid)?;
            let s = santalo::santalo_point(&m, grid, 1e-8)?.point;
            cfp = Some(point_coords(&s, n));
            let shifted = bodies::translate_support(&m, &-s);
            let pv = bodies::polar_volume(&shifted, grid)?;
            (vol.powf(nf / p + 1.0) * pv, constant_big_r(n, p)?)
        }
        GeometricCase::MomentVolume { p, eps } => {
            validate_np(n, p)?;
            let prm = AsymParams::new(p, eps)?;
            let m = moment_body_k(k, &prm, grid)?;
            let m_star = ConvexBody::from_support(&m, grid)?;
            (constant_small_r(n, p)?, vol.powf(-nf / p - 1.0) * m_star.volume(grid)?)
        }
        GeometricCase::MomentPolarTranslate { p } => {
            validate_np(n, p)?;
            let prm = AsymParams::new(p, 0.0)?;
            let f = crate::library::indicator_of_star(k)?;
            let cache = MomentCache::new(&f, subdivisions)?;
            let objective = |s: &Vector| {
                crate::lp_bodies::polar_moment_volume_cached(&cache, &prm, grid, &-s)
                    .unwrap_or(f64::INFINITY)
            };
            let start = santalo::centroid_star(k, grid)?;
            let scale = 0.25 * f.support_box().corner_radius().max(1e-3);
            let (minimizer, min_value) = nelder_mead(objective, start, scale, n, 220);
            cfp = Some(point_coords(&minimizer, n));
            (vol.powf(nf / p + 1.0) * min_value, constant_big_r(n, p)?)
        }
    };
    Ok(IneqReport::build(
        case.id(),
        n,
        case.p(),
        None,
        case.eps(),
        lhs,
        rhs,
        sat_tol,
        cfp,
        GridMeta { dim: n, resolution: grid.resolution(), subdivisions },
    ))
}

/// Both sides of the moment-pipeline identity
/// ∫ f(x) h(M M°f, x)^p dx = (n/(n+p)) vol(M°f),
/// computed through different code paths: the left via the constructed
/// moment body of the polar moment star body, interpolated at the
/// density's own sample directions, the right via the radial volume
/// formula. Agreement is a consistency check of the whole moment-body
/// pipeline.
pub fn moment_cycle_identity(
    f: &Density,
    prm: &AsymParams,
    grid: &DirectionGrid,
    subdivisions: usize,
) -> Result<(f64, f64)> {
    let n = f.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.dim() });
    }
    let cache = MomentCache::new(f, subdivisions)?;
    let p = prm.p();
    // polar moment body with radius evaluated exactly in any direction,
    // so no grid interpolation enters the right-hand side
    let radial_cache = MomentCache::new(f, subdivisions)?;
    let prm_r = *prm;
    let polar = StarBody::new(n, move |xi: &Vector| {
        radial_cache.support_p(&prm_r, xi, &Vector::zeros()).powf(-1.0 / prm_r.p())
    })?;
    // the constructed body is sampled on a finer internal grid so its
    // interpolation error sits well below the identity tolerance
    let fine = crate::sphere_grid(n, if n == 2 { 8192 } else { 96 })?;
    let mm = moment_body_k(&polar, prm, &fine)?;
    let mut lhs = 0.0;
    for (x, wf) in cache.points().iter().zip(cache.weighted()) {
        let r = x.norm();
        if r <= 1e-14 {
            continue;
        }
        let h = mm.support(&(x / r));
        lhs += wf * (r * h).powf(p);
    }
    let nf = n as f64;
    let rhs = nf / (nf + p) * bodies::volume(&polar, grid)?;
    Ok((lhs, rhs))
}
