//! Scenario configuration: the JSON model, its defaults, and the
//! admissibility validation that runs before any numerical work.
//!
//! A config is an object with a `scenarios` array and an optional
//! `sweeps` array. Every scenario names an inequality id, a dimension,
//! the parameters that inequality needs, and its inputs from the
//! built-in library (balls, ellipsoids, polygons, the half-ball, radial
//! profiles, perturbed profiles, seeded bump mixtures, serialized body
//! files).

use affineq::inequalities::constant_a;
use affineq::{Lambda, Matrix, Vector};
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub sweeps: Vec<Sweep>,
}

/// One evaluator invocation: inequality id, parameters, inputs and
/// quadrature settings. Missing settings fall back to per-dimension
/// defaults, then to command-line or environment overrides.
#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub ineq: String,
    pub n: usize,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub lambda: Option<Lambda>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    /// Second density of the two-density moment-product inequality.
    #[serde(default)]
    pub density2: Option<DensitySpec>,
    #[serde(default)]
    pub body: Option<BodySpec>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub subdivisions: Option<usize>,
    /// Saturation tolerance for the report's `saturated` flag and the
    /// exit-code gate.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Seed for seeded inputs (fourier shapes, bump mixtures).
    #[serde(default)]
    pub seed: Option<u64>,
    /// When set, a mismatch with the report's `saturated` flag fails the
    /// run.
    #[serde(default)]
    pub expect_saturated: Option<bool>,
}

/// Parameter sweep over copies of a base scenario; emits one CSV of
/// (value, ratio) rows for plotting.
#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub name: String,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub scenario: Scenario,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Eps,
    P,
}

/// Built-in densities.
#[derive(Deserialize, Clone)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    /// Indicator of a ball; radius 1 about the origin by default.
    Ball {
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// Indicator of {x : |B(x-c)| <= 1}.
    Ellipsoid {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// Indicator of the built-in centered triangle (dimension 2).
    Triangle,
    /// Indicator of a convex polygon (dimension 2).
    Polygon { vertices: Vec<Vec<f64>> },
    /// Indicator of the right half of a disc (dimension 2).
    HalfBall {
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// Extremal radial profile composed with |B(x - shift)|.
    Profile {
        lambda: Lambda,
        p: f64,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        shift: Vec<f64>,
    },
    /// Profile times 1 + amplitude*sin(frequency*x1): strictly off every
    /// equality family.
    PerturbedProfile {
        lambda: Lambda,
        p: f64,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        shift: Vec<f64>,
        amplitude: f64,
        frequency: f64,
    },
    /// Profile composed with the gauge of a star body.
    GaugeProfile {
        lambda: Lambda,
        p: f64,
        body: Box<BodySpec>,
    },
    /// Reproducible random bump mixture from the scenario seed.
    Bumps,
}

/// Built-in bodies.
#[derive(Deserialize, Clone)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// {x : |B(x-c)| <= 1}.
    Ellipsoid {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// Convex hull of vertices.
    Polytope { vertices: Vec<Vec<f64>> },
    /// Smooth random support body from the scenario seed.
    Fourier {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        symmetric: bool,
    },
    /// Body serialized by the library's JSON writer.
    File { path: String },
}

fn default_radius() -> f64 {
    1.0
}

fn default_amplitude() -> f64 {
    0.25
}

/// Inequality ids the runner understands, with the inputs each one
/// consumes.
pub const INEQ_IDS: &[&str] = &[
    "gauge-moment",
    "bs-functional-symmetric",
    "bs-functional",
    "moment-product",
    "bs",
    "bs-santalo",
    "bs-centroid",
    "bs-centroid-body",
    "busemann-petty",
    "moment-polar",
    "moment-volume",
    "moment-polar-translate",
];

fn needs_density(ineq: &str) -> bool {
    matches!(
        ineq,
        "gauge-moment" | "bs-functional-symmetric" | "bs-functional" | "moment-product"
    )
}

fn needs_body(ineq: &str) -> bool {
    !matches!(
        ineq,
        "bs-functional-symmetric" | "bs-functional" | "moment-product"
    )
}

fn needs_lambda(ineq: &str) -> bool {
    matches!(
        ineq,
        "gauge-moment" | "bs-functional-symmetric" | "bs-functional" | "moment-product"
    )
}

fn needs_p(ineq: &str) -> bool {
    !matches!(ineq, "bs" | "bs-santalo" | "bs-centroid")
}

pub fn takes_eps(ineq: &str) -> bool {
    matches!(
        ineq,
        "bs-functional" | "moment-product" | "moment-polar" | "moment-volume"
    )
}

/// Reads a coordinate list as a point of the scenario dimension.
pub fn parse_point(dim: usize, v: &[f64]) -> Result<Vector, String> {
    match (dim, v.len()) {
        (_, 0) => Ok(Vector::zeros()),
        (2, 2) => Ok(Vector::new(v[0], v[1], 0.0)),
        (3, 3) => Ok(Vector::new(v[0], v[1], v[2])),
        _ => Err(format!("expected {dim} coordinates, got {}", v.len())),
    }
}

/// Reads a row-major matrix of the scenario dimension, embedding 2x2
/// blocks into the fixed 3x3 representation.
pub fn parse_matrix(dim: usize, rows: &[Vec<f64>]) -> Result<Matrix, String> {
    let square = rows.len() == dim && rows.iter().all(|r| r.len() == dim);
    if !square {
        return Err(format!("expected a {dim}x{dim} row-major matrix"));
    }
    let mut m = Matrix::identity();
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

impl DensitySpec {
    fn validate(&self, dim: usize, context: &str) -> Result<(), String> {
        let planar_only = |label: &str| {
            if dim == 2 {
                Ok(())
            } else {
                Err(format!("{context}: {label} inputs exist in dimension 2 only"))
            }
        };
        match self {
            DensitySpec::Ball { radius, center } => {
                if !(*radius > 0.0) {
                    return Err(format!("{context}: ball radius must be positive"));
                }
                parse_point(dim, center).map_err(|e| format!("{context}: {e}"))?;
                Ok(())
            }
            DensitySpec::Ellipsoid { matrix, center } => {
                parse_matrix(dim, matrix).map_err(|e| format!("{context}: {e}"))?;
                parse_point(dim, center).map_err(|e| format!("{context}: {e}"))?;
                Ok(())
            }
            DensitySpec::Triangle => planar_only("triangle"),
            DensitySpec::Polygon { vertices } => {
                planar_only("polygon")?;
                if vertices.len() < 3 {
                    return Err(format!("{context}: polygon needs at least 3 vertices"));
                }
                for v in vertices {
                    parse_point(dim, v).map_err(|e| format!("{context}: {e}"))?;
                }
                Ok(())
            }
            DensitySpec::HalfBall { radius } => {
                planar_only("half-ball")?;
                if !(*radius > 0.0) {
                    return Err(format!("{context}: half-ball radius must be positive"));
                }
                Ok(())
            }
            DensitySpec::Profile { lambda, p, matrix, shift }
            | DensitySpec::PerturbedProfile { lambda, p, matrix, shift, .. } => {
                check_lambda(dim, *p, Some(*lambda), context)?;
                if let Some(rows) = matrix {
                    parse_matrix(dim, rows).map_err(|e| format!("{context}: {e}"))?;
                }
                parse_point(dim, shift).map_err(|e| format!("{context}: {e}"))?;
                if let DensitySpec::PerturbedProfile { amplitude, .. } = self {
                    if !(amplitude.abs() < 1.0) {
                        return Err(format!(
                            "{context}: perturbation amplitude must lie in (-1, 1)"
                        ));
                    }
                }
                Ok(())
            }
            DensitySpec::GaugeProfile { lambda, p, body } => {
                check_lambda(dim, *p, Some(*lambda), context)?;
                body.validate(dim, context)
            }
            DensitySpec::Bumps => Ok(()),
        }
    }
}

impl BodySpec {
    fn validate(&self, dim: usize, context: &str) -> Result<(), String> {
        match self {
            BodySpec::Ball { radius } => {
                if !(*radius > 0.0) {
                    return Err(format!("{context}: ball radius must be positive"));
                }
                Ok(())
            }
            BodySpec::Ellipsoid { matrix, center } => {
                parse_matrix(dim, matrix).map_err(|e| format!("{context}: {e}"))?;
                parse_point(dim, center).map_err(|e| format!("{context}: {e}"))?;
                Ok(())
            }
            BodySpec::Polytope { vertices } => {
                if vertices.len() <= dim {
                    return Err(format!(
                        "{context}: a full-dimensional polytope needs more than {dim} vertices"
                    ));
                }
                for v in vertices {
                    parse_point(dim, v).map_err(|e| format!("{context}: {e}"))?;
                }
                Ok(())
            }
            BodySpec::Fourier { amplitude, .. } => {
                if !(*amplitude > 0.0 && *amplitude < 1.0) {
                    return Err(format!("{context}: fourier amplitude must lie in (0, 1)"));
                }
                Ok(())
            }
            BodySpec::File { path } => {
                if Path::new(path).is_file() {
                    Ok(())
                } else {
                    Err(format!("{context}: body file {path:?} does not exist"))
                }
            }
        }
    }
}

/// λ admissibility, reported with the full admissible range so a bad
/// config is self-explanatory.
fn check_lambda(n: usize, p: f64, lambda: Option<Lambda>, context: &str) -> Result<(), String> {
    let Some(lambda) = lambda else {
        return Err(format!("{context}: lambda is required"));
    };
    constant_a(n, p, lambda).map(|_| ()).map_err(|e| {
        format!(
            "{context}: {e}; admissible: lambda > n/(n+p) = {:.4} or \"inf\", excluding 1",
            n as f64 / (n as f64 + p)
        )
    })
}

impl Scenario {
    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("{}-{index:02}", self.ineq))
    }

    /// Full admissibility check; messages carry the scenario label.
    pub fn validate(&self, index: usize) -> Result<(), String> {
        let label = self.label(index);
        let context = label.as_str();
        if !INEQ_IDS.contains(&self.ineq.as_str()) {
            return Err(format!(
                "{context}: unknown inequality {:?}; known: {}",
                self.ineq,
                INEQ_IDS.join(", ")
            ));
        }
        if self.n != 2 && self.n != 3 {
            return Err(format!("{context}: dimension must be 2 or 3, got {}", self.n));
        }
        if needs_p(&self.ineq) {
            match self.p {
                Some(p) if p.is_finite() && p >= 1.0 => {}
                Some(p) => return Err(format!("{context}: need finite p >= 1, got {p}")),
                None => return Err(format!("{context}: p is required")),
            }
        }
        if needs_lambda(&self.ineq) {
            check_lambda(self.n, self.p.unwrap_or(1.0), self.lambda, context)?;
        }
        if let Some(eps) = self.eps {
            if !takes_eps(&self.ineq) {
                return Err(format!("{context}: {} takes no eps parameter", self.ineq));
            }
            if !(0.0..=1.0).contains(&eps) {
                return Err(format!("{context}: eps must lie in [0, 1], got {eps}"));
            }
        }
        if needs_density(&self.ineq) {
            let Some(d) = &self.density else {
                return Err(format!("{context}: {} needs a density input", self.ineq));
            };
            d.validate(self.n, context)?;
        }
        if self.ineq == "moment-product" {
            let Some(d) = &self.density2 else {
                return Err(format!("{context}: moment-product needs a second density"));
            };
            d.validate(self.n, context)?;
        } else if self.density2.is_some() {
            return Err(format!("{context}: only moment-product takes a second density"));
        }
        if needs_body(&self.ineq) {
            let Some(b) = &self.body else {
                return Err(format!("{context}: {} needs a body input", self.ineq));
            };
            b.validate(self.n, context)?;
        }
        if let Some(r) = self.resolution {
            if r < 16 || r % 2 != 0 {
                return Err(format!("{context}: resolution must be even and >= 16, got {r}"));
            }
        }
        if let Some(s) = self.subdivisions {
            if s == 0 {
                return Err(format!("{context}: subdivisions must be positive"));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(format!("{context}: tol must be positive and finite"));
            }
        }
        Ok(())
    }
}

impl Config {
    /// Validates every scenario and sweep; returns all messages at once
    /// so a bad config is fixed in one pass.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        for (i, sc) in self.scenarios.iter().enumerate() {
            if let Err(e) = sc.validate(i) {
                errors.push(e);
            }
        }
        for sweep in &self.sweeps {
            if let Err(e) = sweep.scenario.validate(0) {
                errors.push(format!("sweep {}: {e}", sweep.name));
            }
            if sweep.parameter == SweepParameter::Eps && !takes_eps(&sweep.scenario.ineq) {
                errors.push(format!(
                    "sweep {}: {} cannot be swept in eps",
                    sweep.name, sweep.scenario.ineq
                ));
            }
            for v in &sweep.values {
                if !v.is_finite() {
                    errors.push(format!("sweep {}: non-finite value {v}", sweep.name));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}
