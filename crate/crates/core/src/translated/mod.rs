//! Translated points: the defect functional, extraction of the zero set of an
//! iterate's scaling factor, its localization, the multistart search and the
//! two-ball separation certificate.
//!
//! A point `z` is translated for `φ` when `g(z) = 0` and `φ(z)` lies on the
//! Reeb orbit through `z`. Both conditions are measured by
//! `D(z) = g(z)² + d_FS([z], [φ(z)])²`, which vanishes exactly on translated
//! points.

mod certificate;
mod decay;
mod search;
mod zero_set;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::maps::ContactMap;
use crate::sphere::{fiber_angle, hermitian, norm, tangent_frame, SpherePoint};

pub use certificate::{
    lemma_constants, separation_certificate, separation_certificate_with, CertificateCondition,
    CertificateOptions, LemmaConstants, SeparationCertificate,
};
pub use decay::{check_focal, decay_table, decay_table_with_samples, DecayReport, DecayRow, FocalCheck};
pub use search::{search_translated, search_translated_with, DefectReport, SearchOptions};
pub use zero_set::{
    extract_zero_set, extract_zero_set_with, UnresolvedRoot, ZeroSetOptions, ZeroSetSample,
};

/// The two residuals of the translated-point conditions at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectValue {
    /// Scaling factor `g(z)`.
    pub g_component: f64,
    /// `d_FS([z], [φ(z)])` in radians.
    pub fiber_component: f64,
    /// `g² + d_FS²`.
    pub total: f64,
}

impl DefectValue {
    fn new(g: f64, d: f64) -> Self {
        Self {
            g_component: g,
            fiber_component: d,
            total: g * g + d * d,
        }
    }
}

/// `D(z)` for the map `φ`.
pub fn defect(map: &ContactMap, z: &SpherePoint) -> Result<DefectValue> {
    let (g, d) = defect_parts(map, z.coords())?;
    Ok(DefectValue::new(g, d))
}

pub(crate) fn defect_parts(map: &ContactMap, z: &[Complex64]) -> Result<(f64, f64)> {
    let (w, g) = map.eval_scaling(z)?;
    Ok((g, fiber_angle(z, &w)))
}

/// A local chart `x ↦ normalize(z₀ + Σ xⱼ eⱼ)` around `z₀`, with `eⱼ` an
/// orthonormal frame of `T_{z₀} S`.
pub(crate) struct TangentChart {
    center: Vec<Complex64>,
    frame: Vec<Vec<Complex64>>,
}

impl TangentChart {
    pub(crate) fn new(center: &SpherePoint) -> Self {
        Self {
            center: center.coords().to_vec(),
            frame: tangent_frame(center)
                .into_iter()
                .map(|v| v.into_vec())
                .collect(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.frame.len()
    }

    pub(crate) fn point(&self, x: &[f64]) -> Vec<Complex64> {
        let mut v = self.center.clone();
        for (e, &xj) in self.frame.iter().zip(x) {
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi += ei * xj;
            }
        }
        let r = norm(&v);
        v.into_iter().map(|c| c / r).collect()
    }
}

/// Volume of `S^{2n-1}`: `2πⁿ / (n−1)!`.
pub(crate) fn sphere_volume(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * std::f64::consts::PI.powi(n as i32) / fact
}

/// Typical nearest-neighbour spacing of `count` uniform points on `S^{2n-1}`.
pub(crate) fn grid_spacing(n: usize, count: usize) -> f64 {
    (sphere_volume(n) / count.max(1) as f64).powf(1.0 / (2 * n - 1) as f64)
}

/// Deterministic sample of the chordal ball `B(center, radius) ∩ S^{2n-1}`;
/// the centre itself is always the first point.
pub(crate) fn sample_ball(center: &SpherePoint, radius: f64, count: usize, seed: u64) -> Vec<SpherePoint> {
    let mut out = vec![center.clone()];
    if radius <= 0.0 || count <= 1 {
        return out;
    }
    let n = center.dim();
    let z = center.coords();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Chordal radius r corresponds to the geodesic radius 2 asin(r/2).
    let max_angle = 2.0 * (radius.min(2.0) / 2.0).asin();
    let dim = (2 * n - 1) as f64;
    while out.len() < count {
        let g: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let normal = hermitian(&g, z).re;
        let u: Vec<Complex64> = g.iter().zip(z).map(|(gi, zi)| gi - zi * normal).collect();
        let un = norm(&u);
        if un == 0.0 {
            continue;
        }
        let t: f64 = rand::Rng::random(&mut rng);
        let angle = max_angle * t.powf(1.0 / dim);
        let (s, c) = angle.sin_cos();
        let coords = z.iter().zip(&u).map(|(zi, ui)| zi * c + ui * (s / un)).collect();
        if let Ok(p) = SpherePoint::new(coords) {
            if crate::sphere::ambient_distance(&p, center) <= radius {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;
    use crate::sphere::{ambient_distance, sample_sphere};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_and_reeb_flow_have_zero_defect() {
        let id = ContactMap::identity(2);
        let reeb = ContactMap::diagonal_unitary(&[0.8, 0.8]);
        for z in sample_sphere(2, 50, 4) {
            assert!(defect(&id, &z).unwrap().total <= 1e-30);
            assert!(defect(&reeb, &z).unwrap().total <= 1e-28);
        }
    }

    #[test]
    fn diagonal_unitary_translated_only_on_coordinate_circles() {
        let u = ContactMap::diagonal_unitary(&[0.3, 0.7]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mixed = defect(&u, &SpherePoint::from_pairs(&[(h, 0.0), (h, 0.0)]).unwrap()).unwrap();
        assert!(mixed.g_component.abs() < 1e-15);
        // |⟨z, Uz⟩| = |e^{0.3i} + e^{0.7i}| / 2 = cos(0.2).
        assert_abs_diff_eq!(mixed.fiber_component, 0.2, epsilon = 1e-12);
        assert!(mixed.total > 0.0);
        let axis = defect(&u, &SpherePoint::axis_point(2, 1, 1.0)).unwrap();
        assert!(axis.total <= 1e-30);
    }

    #[test]
    fn chart_and_ball_sampling() {
        let z = sample_sphere(3, 1, 2).remove(0);
        let chart = TangentChart::new(&z);
        assert_eq!(chart.dim(), 5);
        assert!(crate::sphere::chordal(&chart.point(&[0.0; 5]), z.coords()) < 1e-15);
        let ball = sample_ball(&z, 0.2, 500, 1);
        assert_eq!(ball.len(), 500);
        assert_eq!(ball[0], z);
        assert!(ball.iter().all(|w| ambient_distance(w, &z) <= 0.2));
        let far = ball.iter().map(|w| ambient_distance(w, &z)).fold(0.0, f64::max);
        assert!(far > 0.15);
        assert_eq!(sample_ball(&z, 0.0, 100, 1).len(), 1);
    }

    #[test]
    fn sphere_volume_values() {
        assert_abs_diff_eq!(sphere_volume(1), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(sphere_volume(2), 2.0 * std::f64::consts::PI.powi(2), epsilon = 1e-12);
        assert!(grid_spacing(2, 200_000) < 0.05);
    }

    #[test]
    fn focal_map_defect_at_fixed_points() {
        let phi = MoebiusMap::canonical(0.5, 2, 1).unwrap().to_contact_map();
        let p = defect(&phi, &SpherePoint::axis_point(2, 1, -1.0)).unwrap();
        assert!(p.fiber_component < 1e-15);
        assert_abs_diff_eq!(p.g_component, 2.0 * 2f64.ln(), epsilon = 1e-12);
    }
}
