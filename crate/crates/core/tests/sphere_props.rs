//! Property tests for sphere points, the contact form and the fibre distance.

use std::f64::consts::FRAC_PI_2;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use contact_sphere::sphere::*;

fn point(n: usize) -> impl Strategy<Value = SpherePoint> {
    proptest::collection::vec(-1.0f64..1.0, 2 * n)
        .prop_filter("away from the origin", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|x| SpherePoint::from_real(&x).unwrap())
}

fn pair(n: usize) -> impl Strategy<Value = (SpherePoint, SpherePoint)> {
    (point(n), point(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn construction_normalizes(z in point(3)) {
        prop_assert!(z.norm_residual() <= 1e-15);
        let back = SpherePoint::from_real(&z.real_coords()).unwrap();
        prop_assert!(ambient_distance(&back, &z) <= 1e-15);
    }

    #[test]
    fn reeb_vector_has_unit_contact_value(z in point(2)) {
        let r = reeb_vector(&z);
        assert_abs_diff_eq!(contact_form(&z, &r).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(contact_form_real(&z, &r).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn contact_forms_agree(z in point(3), v in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let t = TangentVector::project(z.clone(), &from_real(&v));
        assert_abs_diff_eq!(
            contact_form(&z, &t).unwrap(),
            contact_form_real(&z, &t).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn fiber_distance_is_a_metric_on_fibres((z, w) in pair(2), t in -10.0f64..10.0, s in -10.0f64..10.0) {
        let d = fiber_distance(&z, &w).value();
        prop_assert!((0.0..=FRAC_PI_2).contains(&d));
        assert_abs_diff_eq!(d, fiber_distance(&w, &z).value(), epsilon = 1e-14);
        assert_abs_diff_eq!(d, fiber_distance(&z.rotate_phase(t), &w.rotate_phase(s)).value(), epsilon = 1e-13);
        prop_assert!(fiber_distance(&z, &z.rotate_phase(t)).value() <= 1e-7);
        // The Hopf projection does not increase distances.
        let geodesic = 2.0 * (ambient_distance(&z, &w) / 2.0).asin();
        prop_assert!(d <= geodesic + 1e-12);
    }

    #[test]
    fn fiber_distance_matches_arccos((z, w) in pair(3)) {
        let c = hermitian(z.coords(), w.coords()).norm().min(1.0);
        assert_abs_diff_eq!(fiber_distance(&z, &w).value(), c.acos(), epsilon = 1e-7);
    }

    #[test]
    fn tangent_frame_orthonormal(z in point(3)) {
        let frame = tangent_frame(&z);
        prop_assert_eq!(frame.len(), 5);
        for (i, a) in frame.iter().enumerate() {
            assert_abs_diff_eq!(hermitian(a.vec(), z.coords()).re, 0.0, epsilon = 1e-13);
            for (j, b) in frame.iter().enumerate() {
                let ip = hermitian(a.vec(), b.vec()).re;
                assert_abs_diff_eq!(ip, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-13);
            }
            if i > 0 {
                assert_abs_diff_eq!(contact_form(&z, a).unwrap(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn projection_is_tangent(z in point(2), v in proptest::collection::vec(-5.0f64..5.0, 4)) {
        let t = TangentVector::project(z.clone(), &from_real(&v));
        prop_assert!(hermitian(t.vec(), z.coords()).re.abs() <= 1e-13);
        prop_assert!(TangentVector::new(z, t.vec().to_vec()).is_ok());
    }
}

#[test]
fn sampling_is_deterministic_and_spread() {
    let a = sample_sphere(2, 2000, 11);
    let b = sample_sphere(2, 2000, 11);
    assert_eq!(a, b);
    assert_ne!(a, sample_sphere(2, 2000, 12));
    // Mean of |z₁|² is 1/n for the uniform measure.
    let mean: f64 = a.iter().map(|z| z.coords()[0].norm_sqr()).sum::<f64>() / a.len() as f64;
    assert_abs_diff_eq!(mean, 0.5, epsilon = 0.03);
}

#[test]
fn degenerate_points_rejected() {
    assert!(SpherePoint::new(vec![Complex64::new(0.0, 0.0); 2]).is_err());
    assert!(SpherePoint::new(vec![]).is_err());
    assert!(SpherePoint::from_pairs(&[(f64::NAN, 0.0), (1.0, 0.0)]).is_err());
}
