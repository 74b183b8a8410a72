//! Cross-module invariants: solver diagnostics, scale laws, hull
//! idempotence, and the concavity consequences of the Brunn-Minkowski
//! inequality on random bodies.

use conevol::geom::Polytope;
use conevol::isotropic::{self, IsotropyOptions};
use conevol::measure::cone_volume_measure_with;
use conevol::{corpus, scc, sections};
use conevol::{Subspace, Tolerances};
use nalgebra::DVector;
use proptest::prelude::*;

const TOL: Tolerances = Tolerances::DEFAULT;

fn random_body(dim: usize, seed: u64) -> Polytope {
    corpus::random_bodies(dim, 1, seed, &TOL).unwrap()[0]
        .body
        .clone()
}

/// The residual sequence never rises after the first step on strict
/// concentration inputs; the trace is what makes NoConvergence diagnosable,
/// so it has to stay trustworthy.
#[test]
fn residual_trace_monotone_on_strict_corpus() {
    let opts = IsotropyOptions::default();
    let mut strict = 0usize;
    for entry in corpus::standard_corpus(&TOL).unwrap() {
        let mu = cone_volume_measure_with(&entry.body, &TOL).unwrap();
        let rep = scc::check_concentration(&mu, &TOL).unwrap();
        if !rep.holds || !rep.equality_cases.is_empty() {
            continue;
        }
        strict += 1;
        let res = isotropic::isotropize(&mu, &opts, &TOL).unwrap();
        for pair in res.residual_trace.windows(2).skip(1) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "{}: residual rose {:e} -> {:e}",
                entry.name,
                pair[0],
                pair[1]
            );
        }
    }
    assert!(strict > 80, "corpus lost its strict majority: {strict}");
}

/// Rescaling the measure must not change the solve at all: the iteration
/// renormalizes mass every step.
#[test]
fn isotropize_ignores_measure_scale() {
    let opts = IsotropyOptions::default();
    for (dim, seed) in [(2usize, 11u64), (3, 5), (3, 23), (4, 7)] {
        let body = random_body(dim, seed);
        let mu = cone_volume_measure_with(&body, &TOL).unwrap();
        let base = isotropic::isotropize(&mu, &opts, &TOL).unwrap();
        for c in [0.2, 3.7e3] {
            let scaled = isotropic::isotropize(&mu.scaled(c), &opts, &TOL).unwrap();
            assert!((scaled.residual - base.residual).abs() <= 1e-12);
            let drift = (&scaled.transform - &base.transform).norm();
            assert!(drift <= 1e-12, "transform moved by {drift:e} under scale {c}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Re-hulling a hull's vertices is a no-op up to arithmetic noise.
    #[test]
    fn hull_idempotent(seed in 0u64..1000, dim in 2usize..=4) {
        let body = random_body(dim, seed);
        let again = Polytope::from_points(dim, body.vertices().to_vec()).unwrap();
        let rel = (again.volume() - body.volume()).abs() / body.volume();
        prop_assert!(rel <= 1e-10);
        prop_assert_eq!(again.facets().len(), body.facets().len());
    }

    /// Cone-volume mass is homogeneous of degree n; directions are fixed, so
    /// the second moment scales with the total.
    #[test]
    fn cone_volume_scales_with_degree_n(seed in 0u64..1000, dim in 2usize..=4) {
        let body = random_body(dim, seed);
        let t = 1.0 + (seed % 7) as f64 * 0.35;
        let mu = cone_volume_measure_with(&body, &TOL).unwrap();
        let mu_t = cone_volume_measure_with(&body.scale(t), &TOL).unwrap();
        let factor = t.powi(dim as i32);
        let rel = (mu_t.total_mass() - factor * mu.total_mass()).abs() / mu_t.total_mass();
        prop_assert!(rel <= 1e-10);
        let moment_drift = (mu_t.second_moment() - mu.second_moment() * factor).norm()
            / mu_t.total_mass();
        prop_assert!(moment_drift <= 1e-9);
    }

    /// V(A+B)^(1/n) >= V(A)^(1/n) + V(B)^(1/n) on random pairs.
    #[test]
    fn minkowski_sum_volume_superadditive(seed in 0u64..1000, dim in 2usize..=3) {
        let a = random_body(dim, seed);
        let b = random_body(dim, seed ^ 0xABCD);
        let sum = a.minkowski_sum(&b).unwrap();
        let lhs = sum.volume().powf(1.0 / dim as f64);
        let rhs = a.volume().powf(1.0 / dim as f64) + b.volume().powf(1.0 / dim as f64);
        prop_assert!(lhs >= rhs - 1e-9 * rhs);
    }

    /// Slice areas along a line: the (n-1)-th root of the exact section
    /// profile is concave across interior cells.
    #[test]
    fn section_profile_root_is_concave(seed in 0u64..1000) {
        let body = random_body(3, seed);
        let axis = Subspace::line(&DVector::from_column_slice(&[0.0, 0.0, 1.0])).unwrap();
        let profile = sections::build_profile(&body, &axis, 41, &TOL).unwrap();
        let roots: Vec<f64> = profile.samples.iter().map(|s| s.value.sqrt()).collect();
        for w in roots.windows(3) {
            if w.iter().all(|&g| g > 1e-6) {
                prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
            }
        }
    }
}
