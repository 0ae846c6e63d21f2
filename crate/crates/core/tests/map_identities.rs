//! Scaling-factor identities for composites, inverses and conjugates, checked
//! against Jacobians computed independently.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use contact_sphere::maps::*;
use contact_sphere::moebius::{build_conjugator, closed_form_scaling, MoebiusMap};
use contact_sphere::sphere::*;

fn point(n: usize) -> impl Strategy<Value = SpherePoint> {
    proptest::collection::vec(-1.0f64..1.0, 2 * n)
        .prop_filter("away from the origin", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|x| SpherePoint::from_real(&x).unwrap())
}

fn focal(a: f64, axis: usize) -> ContactMap {
    MoebiusMap::canonical(a, 2, axis).unwrap().to_contact_map()
}

fn psi(a: f64, b: f64) -> ContactMap {
    let c = build_conjugator(b, 2).unwrap();
    conjugate(&focal(a, 1), &c.map).unwrap()
}

/// Central difference of `φ` along the great circle through `z` in
/// direction `v`.
fn finite_difference(map: &ContactMap, z: &SpherePoint, v: &TangentVector, h: f64) -> Vec<num_complex::Complex64> {
    let step = |s: f64| {
        let moved: Vec<_> = z
            .coords()
            .iter()
            .zip(v.vec())
            .map(|(zi, vi)| zi * s.cos() + vi * s.sin())
            .collect();
        map.apply(&SpherePoint::new(moved).unwrap())
    };
    let (plus, minus) = (step(h), step(-h));
    plus.coords()
        .iter()
        .zip(minus.coords())
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect()
}

fn unit(v: TangentVector) -> TangentVector {
    let r = v.norm();
    TangentVector::project(v.base().clone(), &v.vec().iter().map(|c| c / r).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_matches_finite_differences(
        z in point(2),
        v in proptest::collection::vec(-1.0f64..1.0, 4),
        a in 0.3f64..0.9,
    ) {
        let phi = psi(a, 0.5);
        let t = TangentVector::project(z.clone(), &from_real(&v));
        prop_assume!(t.norm() > 1e-2);
        let t = unit(t);
        let exact = phi.pushforward(&t);
        let fd = finite_difference(&phi, &z, &t, 1e-6);
        let scale = norm(exact.vec()).max(1.0);
        let err = exact.vec().iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err / scale <= 1e-6, "relative error {}", err / scale);
    }

    #[test]
    fn scaling_factor_of_moebius_matches_closed_form(z in point(2), a in 0.05f64..0.95, axis in 1usize..=2) {
        let m = MoebiusMap::canonical(a, 2, axis).unwrap();
        let g = scaling_factor(&m.to_contact_map(), &z).unwrap().value();
        assert_abs_diff_eq!(g, closed_form_scaling(&m, &z), epsilon = 1e-11);
    }

    #[test]
    fn cocycle_matches_direct_scaling(z in point(2), k in 1usize..=12) {
        let phi = psi(0.5, 0.5);
        let direct = scaling_factor_direct(&iterate(&phi, k), &z).unwrap().value();
        let sum = cocycle_scaling(&phi, k, &z).unwrap().value();
        prop_assert!((direct - sum).abs() <= 1e-8 * direct.abs().max(1.0));
    }

    #[test]
    fn composition_adds_along_orbit(z in point(2), a in 0.2f64..0.9, b in 0.2f64..0.9) {
        let (phi, chi) = (focal(a, 1), focal(b, 2));
        let comp = compose(&phi, &chi).unwrap();
        let g = scaling_factor(&comp, &z).unwrap().value();
        let expected = scaling_factor(&chi, &z).unwrap().value()
            + scaling_factor(&phi, &chi.apply(&z)).unwrap().value();
        assert_abs_diff_eq!(g, expected, epsilon = 1e-11);
        assert_abs_diff_eq!(g, scaling_factor_direct(&comp, &z).unwrap().value(), epsilon = 1e-10);
    }

    #[test]
    fn inverse_negates_at_image(z in point(2), a in 0.2f64..0.9) {
        let phi = psi(a, 0.5);
        let inv = phi.inverse();
        let w = phi.apply(&z);
        prop_assert!(ambient_distance(&inv.apply(&w), &z) <= 1e-12);
        let g = scaling_factor(&phi, &z).unwrap().value();
        assert_abs_diff_eq!(scaling_factor(&inv, &w).unwrap().value(), -g, epsilon = 1e-11);
    }

    #[test]
    fn conjugate_scaling_is_three_terms(z in point(2), a in 0.2f64..0.9, b in 0.2f64..0.9) {
        let phi = focal(a, 1);
        let sigma = focal(b, 2);
        let sigma_inv = sigma.inverse();
        let conj = conjugate(&phi, &sigma).unwrap();
        let x = sigma_inv.apply(&z);
        let y = phi.apply(&x);
        let expected = scaling_factor(&sigma_inv, &z).unwrap().value()
            + scaling_factor(&phi, &x).unwrap().value()
            + scaling_factor(&sigma, &y).unwrap().value();
        assert_abs_diff_eq!(scaling_factor(&conj, &z).unwrap().value(), expected, epsilon = 1e-10);
    }

    #[test]
    fn volume_is_exponential_of_scaling(z in point(2), a in 0.3f64..0.9) {
        let phi = psi(a, 0.5);
        let g = scaling_factor(&phi, &z).unwrap().value();
        let vol = volume_distortion(&phi, &z);
        let expected = (2.0 * g).exp();
        prop_assert!((vol - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn contact_condition_holds(z in point(2), a in 0.3f64..0.9) {
        let phi = psi(a, 0.5);
        let residual = verify_contact(&phi, &z, &tangent_frame(&z)).unwrap();
        prop_assert!(residual <= 1e-9);
    }
}

#[test]
fn image_of_zero_set_is_zero_set_of_inverse() {
    // g_n(z) = 0 exactly when the inverse iterate has zero scaling at φ_n(z).
    let phi = psi(0.5, 0.5);
    for n in [1usize, 3, 6] {
        let sample = contact_sphere::translated::extract_zero_set(&phi, n, 4_000, 2).unwrap();
        assert!(!sample.points.is_empty());
        let phi_n = iterate(&phi, n);
        let inv = phi_n.inverse();
        for z in &sample.points {
            let w = phi_n.apply(z);
            let g_inv = scaling_factor(&inv, &w).unwrap().value();
            assert!(g_inv.abs() <= 1e-9, "n = {n}: {g_inv}");
        }
    }
}

#[test]
fn orientation_reversal_is_not_contact() {
    let conj = ContactMap::complex_conjugation(2);
    let z = sample_sphere(2, 1, 4).remove(0);
    let residual = verify_contact(&conj, &z, &tangent_frame(&z)).unwrap();
    assert!(residual >= 0.1);
}

#[test]
fn iterate_edge_cases() {
    let phi = focal(0.5, 1);
    let z = sample_sphere(2, 1, 8).remove(0);
    assert_eq!(iterate(&phi, 0).apply(&z), z);
    assert_eq!(iterate(&phi, 1).apply(&z), phi.apply(&z));
    assert!(cocycle_scaling(&phi, 0, &z).is_err());
    assert!(compose(&phi, &ContactMap::identity(3)).is_err());
}
