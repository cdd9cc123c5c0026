//! Randomized structural invariants: direction grids carry the sphere
//! measure, star and support data stay dual and sublinear, the closed-form
//! constants satisfy their cross relations, evaluated ratios never exceed
//! the bound beyond quadrature slack, and seeded oracles are reproducible.

use affineq::bodies::{unit_ball_volume, ConvexBody, Ellipsoid, StarBody};
use affineq::inequalities::{
    constant_a, constant_b, constant_big_r, constant_c, constant_d, constant_small_r,
    eval_bs_asymmetric, eval_bs_symmetric, eval_moment_ineq,
};
use affineq::library::seeded_bumps;
use affineq::lp_bodies::{asym_bracket, AsymParams, MomentCache};
use affineq::oracle::mc_integral;
use affineq::santalo::santalo_point;
use affineq::{sphere_grid, vec2, Lambda, Matrix, Vector};
use proptest::prelude::*;
use std::f64::consts::PI;

const L2: Lambda = Lambda::Finite(2.0);

fn rot2(t: f64) -> Matrix {
    Matrix::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Unit nodes, positive weights, total weight = length of the circle.
    #[test]
    fn circle_grids_carry_the_circle_measure(half in 32usize..1024) {
        let g = sphere_grid(2, 2 * half).unwrap();
        let mut total = 0.0;
        for (xi, w) in g.nodes().iter().zip(g.weights()) {
            prop_assert!((xi.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(*w > 0.0);
            total += w;
        }
        prop_assert!((total - 2.0 * PI).abs() <= 1e-10);
    }

    /// Same for the two-sphere: total weight = its surface area.
    #[test]
    fn sphere_grids_carry_the_sphere_measure(half in 8usize..64) {
        let g = sphere_grid(3, 2 * half).unwrap();
        let mut total = 0.0;
        for (xi, w) in g.nodes().iter().zip(g.weights()) {
            prop_assert!((xi.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(*w > 0.0);
            total += w;
        }
        prop_assert!((total - 4.0 * PI).abs() <= 1e-10);
    }

    /// Gauge and radial function are exact reciprocals, and the gauge is
    /// degree-1 homogeneous.
    #[test]
    fn gauge_and_radial_are_reciprocal(
        seed in 0u64..10_000,
        amp in 0.05f64..0.45,
        symmetric in any::<bool>(),
        theta in 0.0f64..(2.0 * PI),
        scale in 0.01f64..50.0,
    ) {
        let k = StarBody::random_fourier(2, seed, amp, symmetric).unwrap();
        let xi = vec2(theta.cos(), theta.sin());
        let r = k.radial(&xi);
        prop_assert!(r > 0.0);
        let g = k.gauge(&(xi * scale));
        prop_assert!((g - scale / r).abs() <= 1e-12 * (scale / r));
    }

    /// The bracket matches its displayed closed form and is nonnegative.
    #[test]
    fn bracket_matches_the_displayed_form(
        s in -10.0f64..10.0,
        p in 1.0f64..4.0,
        eps in 0.0f64..1.0,
    ) {
        let prm = AsymParams::new(p, eps).unwrap();
        let direct = (1.0 - eps) * s.max(0.0).powf(p) + eps * (-s).max(0.0).powf(p);
        let got = asym_bracket(s, &prm);
        prop_assert!(got >= 0.0);
        prop_assert!((got - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        // reflecting the weight mirrors the argument
        let mirrored = asym_bracket(-s, &prm.reflected());
        prop_assert!((got - mirrored).abs() <= 1e-12 * got.abs().max(1.0));
    }

    /// A centered ellipsoid is recovered by polarizing twice.
    #[test]
    fn ellipsoid_double_polar_is_the_identity(
        seed in 0u64..10_000,
        theta in 0.0f64..(2.0 * PI),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let m = rot2(rng.gen_range(0.0..PI))
            * Matrix::new(
                rng.gen_range(0.4..2.5), 0.0, 0.0,
                0.0, rng.gen_range(0.4..2.5), 0.0,
                0.0, 0.0, 1.0,
            )
            * rot2(rng.gen_range(0.0..PI));
        let e = Ellipsoid::new(2, m, Vector::zeros()).unwrap();
        let back = e.polar().unwrap().polar().unwrap();
        let y = vec2(theta.cos(), theta.sin());
        let h0 = e.support_at(&y);
        let h1 = back.support_at(&y);
        prop_assert!((h0 - h1).abs() <= 1e-10 * h0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The density moment support is sublinear: positive parts are
    /// sublinear pointwise and the p-norm is subadditive.
    #[test]
    fn moment_support_is_subadditive(
        seed in 0u64..5_000,
        eps in 0.0f64..1.0,
        ya in -1.0f64..1.0, yb in -1.0f64..1.0,
        za in -1.0f64..1.0, zb in -1.0f64..1.0,
    ) {
        let y = vec2(ya, yb);
        let z = vec2(za, zb);
        prop_assume!(y.norm() > 0.1 && z.norm() > 0.1);
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let prm = AsymParams::new(2.0, eps).unwrap();
        let cache = MomentCache::new(&f, 48).unwrap();
        let origin = Vector::zeros();
        let h = |v: &Vector| cache.support_p(&prm, v, &origin).powf(0.5);
        let sum = h(&y) + h(&z);
        prop_assert!(h(&(y + z)) <= sum + 1e-9 * sum.max(1.0));
    }

    /// Densities honor their declared support box and bound.
    #[test]
    fn bump_densities_respect_box_and_bound(
        seed in 0u64..10_000,
        xa in -2.0f64..2.0,
        xb in -2.0f64..2.0,
    ) {
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let x = vec2(xa, xb);
        let v = f.eval(&x);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= f.sup_bound());
        if !f.support_box().contains(&x) {
            prop_assert!(v == 0.0);
        }
    }

    /// Cross relations between the closed-form constants, for random
    /// admissible parameters in every branch of λ.
    #[test]
    fn constant_relations_hold_across_branches(
        n in prop::sample::select(vec![2usize, 3]),
        p in 1.0f64..4.0,
        branch in 0u8..3,
        t in 0.05f64..0.95,
    ) {
        let nf = n as f64;
        let lambda = match branch {
            0 => {
                let lo = nf / (nf + p) + 0.05;
                Lambda::Finite(lo + t * (0.93 - lo).max(0.01))
            }
            1 => Lambda::Finite(1.05 + 3.0 * t),
            _ => Lambda::Infinity,
        };
        if let Lambda::Finite(l) = lambda {
            prop_assume!(l > nf / (nf + p) + 0.04 && (l - 1.0).abs() > 0.04);
        }
        let a = constant_a(n, p, lambda).unwrap();
        let b = constant_b(n, p, lambda).unwrap();
        let d = constant_d(n, p, lambda).unwrap();
        let big = constant_big_r(n, p).unwrap();
        let small = constant_small_r(n, p).unwrap();
        let cnorm = constant_c(n, p).unwrap();
        for v in [a, b, d, big, small, cnorm] {
            prop_assert!(v.is_finite() && v > 0.0);
        }
        let ratio = nf / (nf + p);
        let b_from_a = ratio.powf(nf) * a * big.powf(p) * nf.powf(p);
        prop_assert!((b - b_from_a).abs() <= 1e-11 * b);
        let d_from_ab = a * b * nf.powf(-p);
        prop_assert!((d - d_from_ab).abs() <= 1e-11 * d);
        // the two volume-ratio constants multiply to ω_n² and the lower
        // one is a power of the centroid normalization
        let omega = unit_ball_volume(nf);
        prop_assert!((big * small - omega * omega).abs() <= 1e-10 * omega * omega);
        let r_from_c = (cnorm / 2.0).powf(nf / p);
        prop_assert!((small - r_from_c).abs() <= 1e-11 * small);
    }

    /// Seeded Monte-Carlo estimates are bit-reproducible with a
    /// nonnegative standard error.
    #[test]
    fn monte_carlo_estimates_are_reproducible(seed in 0u64..10_000, mc_seed in 0u64..1_000) {
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let first = mc_integral(&f, |_| 1.0, 2000, mc_seed).unwrap();
        let second = mc_integral(&f, |_| 1.0, 2000, mc_seed).unwrap();
        prop_assert!(first.stderr >= 0.0);
        prop_assert_eq!(first, second);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Evaluated gauge-moment ratios never exceed the bound beyond
    /// quadrature slack, across branches, shapes and densities.
    #[test]
    fn moment_ratios_stay_below_the_bound(
        seed in 0u64..5_000,
        shape_seed in 0u64..5_000,
        branch in 0u8..3,
        round in any::<bool>(),
    ) {
        let grid = sphere_grid(2, 384).unwrap();
        let lambda = match branch {
            0 => Lambda::Finite(0.75),
            1 => Lambda::Finite(2.5),
            _ => Lambda::Infinity,
        };
        let k = if round {
            StarBody::ball(2, 1.0).unwrap()
        } else {
            StarBody::random_fourier(2, shape_seed, 0.3, false).unwrap()
        };
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let rep = eval_moment_ineq(&f, &k, lambda, 2.0, &grid, 48, 1e-3).unwrap();
        let ratio = rep.ratio.unwrap();
        prop_assert!(ratio <= 1.0 + 5e-4, "ratio {}", ratio);
    }

    /// Rescaling the density values leaves every ratio unchanged.
    #[test]
    fn ratios_ignore_the_density_amplitude(
        seed in 0u64..5_000,
        amp in 0.05f64..20.0,
    ) {
        let grid = sphere_grid(2, 384).unwrap();
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let scaled = f.scale_values(amp).unwrap();
        let ball = StarBody::ball(2, 1.0).unwrap();
        let r1 = eval_moment_ineq(&f, &ball, L2, 2.0, &grid, 48, 1e-3).unwrap().ratio.unwrap();
        let r2 = eval_moment_ineq(&scaled, &ball, L2, 2.0, &grid, 48, 1e-3).unwrap().ratio.unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-8 * r1.abs().max(1.0));
    }

    /// The optimal-center solver meets its advertised residual and lands
    /// inside the body.
    #[test]
    fn optimal_center_is_interior_with_small_residual(seed in 0u64..5_000) {
        let grid = sphere_grid(2, 256).unwrap();
        let body = ConvexBody::random_support_fourier(2, seed, 0.25, false, &grid).unwrap();
        let sp = santalo_point(body.support(), &grid, 1e-7).unwrap();
        prop_assert!(sp.centroid_residual <= 1e-6);
        prop_assert!(body.star().gauge(&sp.point) < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    /// The symmetric functional ratio is invariant under linear images of
    /// the density, up to quadrature drift.
    #[test]
    fn symmetric_ratio_is_affine_invariant(
        seed in 0u64..2_000,
        a11 in 0.7f64..1.4, a12 in -0.3f64..0.3,
        a21 in -0.3f64..0.3, a22 in 0.7f64..1.4,
    ) {
        let m = Matrix::new(a11, a12, 0.0, a21, a22, 0.0, 0.0, 0.0, 1.0);
        prop_assume!(m.determinant().abs() > 0.3);
        let grid = sphere_grid(2, 512).unwrap();
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let fa = f.linear_image(&m).unwrap();
        let r1 = eval_bs_symmetric(&f, L2, 2.0, &grid, 128, 1e-3).unwrap().ratio.unwrap();
        let r2 = eval_bs_symmetric(&fa, L2, 2.0, &grid, 128, 1e-3).unwrap().ratio.unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-4, "drift {}", (r1 - r2).abs());
    }

    /// Increasing the asymmetry weight toward the symmetric kernel never
    /// increases the functional ratio.
    #[test]
    fn asymmetric_ratio_is_monotone_in_the_weight(
        seed in 0u64..2_000,
        e1 in 0.05f64..0.25,
        gap in 0.05f64..0.2,
    ) {
        let grid = sphere_grid(2, 384).unwrap();
        let (f, _) = seeded_bumps(2, seed).unwrap();
        let eps = [0.0, e1, (e1 + gap).min(0.45)];
        let mut prev = f64::INFINITY;
        for e in eps {
            let r = eval_bs_asymmetric(&f, L2, 2.0, e, &grid, 48, 1e-3)
                .unwrap()
                .ratio
                .unwrap();
            prop_assert!(r <= prev + 1e-6, "ratio rose from {prev} to {r} at eps {e}");
            prev = r;
        }
    }
}

/// The finite high-λ branch approaches the indicator branch.
#[test]
fn moment_constant_is_continuous_at_infinite_lambda() {
    let finite = constant_a(2, 2.0, Lambda::Finite(1_000.0)).unwrap();
    let limit = constant_a(2, 2.0, Lambda::Infinity).unwrap();
    assert!(
        (finite / limit - 1.0).abs() <= 0.01,
        "a(λ=1000) = {finite} vs a(∞) = {limit}"
    );
}
