//! Turns validated input specs into densities and star bodies.
//!
//! Seeded inputs (fourier shapes, bump mixtures) draw their seed from the
//! scenario, so a config re-run is bit-reproducible; the command-line
//! seed override replaces every scenario seed at once.

use crate::config::{parse_matrix, parse_point, BodySpec, DensitySpec};
use affineq::bodies::{body_from_json, ConvexBody, Ellipsoid, LoadedBody, StarBody, SupportBody};
use affineq::library::{
    ball_density, ellipsoid_density, gauge_profile_density, half_ball_density, perturbed_density,
    polygon_density, profile_density, seeded_bumps,
};
use affineq::quadrature::Density;
use affineq::{vec2, DirectionGrid, Matrix, Vector};

/// Vertices of the built-in centered triangle: equilateral with
/// circumradius 1 and centroid at the origin.
fn triangle_vertices() -> Vec<Vector> {
    let h = 3f64.sqrt() / 2.0;
    vec![vec2(1.0, 0.0), vec2(-0.5, h), vec2(-0.5, -h)]
}

fn points(dim: usize, raw: &[Vec<f64>]) -> Result<Vec<Vector>, String> {
    raw.iter().map(|v| parse_point(dim, v)).collect()
}

fn matrix_or_identity(dim: usize, rows: &Option<Vec<Vec<f64>>>) -> Result<Matrix, String> {
    match rows {
        Some(rows) => parse_matrix(dim, rows),
        None => Ok(Matrix::identity()),
    }
}

/// Builds the density for a scenario; `seed` feeds the seeded kinds.
pub fn build_density(
    spec: &DensitySpec,
    dim: usize,
    seed: u64,
    grid: &DirectionGrid,
) -> Result<Density, String> {
    let lib = |e: affineq::Error| e.to_string();
    match spec {
        DensitySpec::Ball { radius, center } => {
            let c = parse_point(dim, center)?;
            ball_density(dim, *radius, c).map_err(lib)
        }
        DensitySpec::Ellipsoid { matrix, center } => {
            let m = parse_matrix(dim, matrix)?;
            let c = parse_point(dim, center)?;
            let e = Ellipsoid::new(dim, m, c).map_err(lib)?;
            ellipsoid_density(&e).map_err(lib)
        }
        DensitySpec::Triangle => polygon_density(&triangle_vertices()).map_err(lib),
        DensitySpec::Polygon { vertices } => {
            polygon_density(&points(dim, vertices)?).map_err(lib)
        }
        DensitySpec::HalfBall { radius } => half_ball_density(*radius).map_err(lib),
        DensitySpec::Profile { lambda, p, matrix, shift } => {
            let m = matrix_or_identity(dim, matrix)?;
            let s = parse_point(dim, shift)?;
            profile_density(dim, *lambda, *p, &m, s).map_err(lib)
        }
        DensitySpec::PerturbedProfile { lambda, p, matrix, shift, amplitude, frequency } => {
            let m = matrix_or_identity(dim, matrix)?;
            let s = parse_point(dim, shift)?;
            let base = profile_density(dim, *lambda, *p, &m, s).map_err(lib)?;
            perturbed_density(&base, *amplitude, *frequency).map_err(lib)
        }
        DensitySpec::GaugeProfile { lambda, p, body } => {
            let k = build_body(body, dim, seed, grid)?;
            gauge_profile_density(&k, *lambda, *p).map_err(lib)
        }
        DensitySpec::Bumps => seeded_bumps(dim, seed).map(|(f, _)| f).map_err(lib),
    }
}

/// Builds the star body for a scenario; `seed` feeds the fourier kind.
pub fn build_body(
    spec: &BodySpec,
    dim: usize,
    seed: u64,
    grid: &DirectionGrid,
) -> Result<StarBody, String> {
    let lib = |e: affineq::Error| e.to_string();
    match spec {
        BodySpec::Ball { radius } => StarBody::ball(dim, *radius).map_err(lib),
        BodySpec::Ellipsoid { matrix, center } => {
            let m = parse_matrix(dim, matrix)?;
            let c = parse_point(dim, center)?;
            let e = Ellipsoid::new(dim, m, c).map_err(lib)?;
            Ok(ConvexBody::from_ellipsoid(&e).map_err(lib)?.star().clone())
        }
        BodySpec::Polytope { vertices } => {
            let sup = SupportBody::polytope(dim, points(dim, vertices)?).map_err(lib)?;
            Ok(ConvexBody::from_support(&sup, grid).map_err(lib)?.star().clone())
        }
        BodySpec::Fourier { amplitude, symmetric } => {
            StarBody::random_fourier(dim, seed, *amplitude, *symmetric).map_err(lib)
        }
        BodySpec::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read body file {path:?}: {e}"))?;
            match body_from_json(&text).map_err(lib)? {
                LoadedBody::Star(k) => Ok(k),
                LoadedBody::Support(s) => {
                    Ok(ConvexBody::from_support(&s, grid).map_err(lib)?.star().clone())
                }
            }
        }
    }
}
