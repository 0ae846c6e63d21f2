//! Sampled two-ball separation certificate.
//!
//! If `Σ_n ⊂ B(p, r_p)`, `ψ_n(Σ_n) ⊂ B(q, r_q)` and no Hopf fibre meets both
//! balls, `ψ_n` has no translated points. Each condition is checked on
//! samples; the result is numerical evidence, not a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample_ball;
use super::zero_set::{extract_zero_set, ZeroSetSample};
use crate::error::{ContactError, Result};
use crate::maps::{iterate, ContactMap};
use crate::sphere::{ambient_distance, fiber_distance, hermitian, sample_sphere, SpherePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateCondition {
    /// `g_n` keeps the sign of `g_n(q)` outside `B(p, r_p)` and the sampled
    /// `Σ_n` lies inside it.
    ZeroSetLocalization,
    /// `ψ_n` maps the sampled `Σ_n` into `B(q, r_q)`; ball points whose image
    /// escapes `B(q, r_q)` lie strictly on the repelling side of `Σ_n`.
    ImageContainment,
    /// Positive lower bound on the fibre distance between the balls.
    FiberSeparation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    pub grid: usize,
    pub seed: u64,
    pub ball_samples: usize,
    pub pair_samples: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            grid: 200_000,
            seed: 1,
            ball_samples: 20_000,
            pair_samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub n: usize,
    pub r_p: f64,
    pub r_q: f64,
    pub holds: bool,
    /// First condition that failed, in the order listed on the enum.
    pub failing: Option<CertificateCondition>,
    pub localization: bool,
    pub containment: bool,
    pub separation: bool,
    /// Grid points outside `B(p, r_p)`.
    pub outside_samples: usize,
    /// Grid points outside `B(p, r_p)` with the wrong sign of `g_n`.
    pub outside_violations: usize,
    /// `min |g_n|` over grid points outside `B(p, r_p)`.
    pub outside_min_abs_g: Option<f64>,
    pub zero_set_size: usize,
    pub zero_set_outside_ball: usize,
    pub zero_set_image_outside: usize,
    pub ball_escapes: usize,
    pub ball_escape_violations: usize,
    /// `d_FS([p], [q])`.
    pub fiber_distance_pq: f64,
    /// Empirical Lipschitz constant of `d_FS` near `(p, q)`.
    pub lipschitz: f64,
    /// `π/2 / √(1 − |⟨p,q⟩|²)`.
    pub lipschitz_bound: f64,
    /// `d_FS(p, q) − Lip·(r_p + r_q)`.
    pub margin: f64,
    /// Smallest sampled `d_FS(w, w')` over `w ∈ B(p), w' ∈ B(q)`.
    pub sampled_infimum: f64,
}

/// Empirical surrogates for the constants in the localization argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    /// Sampled `sup |g|` over the sphere.
    pub m: f64,
    /// Sampled `inf |g|` over `B(p, r_p) ∪ B(q, r_q)`.
    pub delta: f64,
    /// First iterate mapping every sampled point outside `B(p, r_p)` into
    /// `B(q, r_q)`, if any up to the search limit.
    pub n: Option<usize>,
    pub n_limit: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn separation_certificate(
    psi: &ContactMap,
    n: usize,
    p: &SpherePoint,
    q: &SpherePoint,
    r_p: f64,
    r_q: f64,
    grid: usize,
    seed: u64,
) -> Result<SeparationCertificate> {
    let opts = CertificateOptions {
        grid,
        seed,
        ..CertificateOptions::default()
    };
    separation_certificate_with(psi, n, p, q, r_p, r_q, &opts, None)
}

/// Like [`separation_certificate`]; reuses `sigma` when a zero-set sample
/// of `ψ_n` is already available.
#[allow(clippy::too_many_arguments)]
pub fn separation_certificate_with(
    psi: &ContactMap,
    n: usize,
    p: &SpherePoint,
    q: &SpherePoint,
    r_p: f64,
    r_q: f64,
    opts: &CertificateOptions,
    sigma: Option<&ZeroSetSample>,
) -> Result<SeparationCertificate> {
    if !(r_p >= 0.0 && r_q >= 0.0) {
        return Err(ContactError::Parameter(format!(
            "certificate radii must be non-negative, got {r_p}, {r_q}"
        )));
    }
    if n == 0 {
        return Err(ContactError::Parameter("certificate needs n >= 1".into()));
    }
    if let Some(s) = sigma {
        if s.iterate_index != n {
            return Err(ContactError::Parameter(format!(
                "zero-set sample is for n = {}, not {n}",
                s.iterate_index
            )));
        }
    }
    let psi_n = iterate(psi, n);
    let g_n = |z: &SpherePoint| psi_n.eval_scaling(z.coords()).map(|(_, g)| g);
    let g_p = g_n(p)?;
    let g_q = g_n(q)?;
    let repelling_sign = g_p.signum();
    let attracting_sign = g_q.signum();

    // (1) Localization of Σ_n.
    let grid_points = sample_sphere(psi.dim(), opts.grid, opts.seed);
    let outside: Vec<f64> = grid_points
        .par_iter()
        .filter(|z| ambient_distance(z, p) > r_p)
        .map(|z| g_n(z).unwrap_or(f64::NAN))
        .collect();
    let outside_violations = outside
        .iter()
        .filter(|g| !(g.signum() == attracting_sign && **g != 0.0))
        .count();
    let outside_min_abs_g = outside.iter().map(|g| g.abs()).reduce(f64::min);
    let owned;
    let sigma = match sigma {
        Some(s) => s,
        None => {
            owned = extract_zero_set(psi, n, opts.grid, opts.seed)?;
            &owned
        }
    };
    let zero_set_outside_ball = sigma.all_points().filter(|z| ambient_distance(z, p) > r_p).count();
    let localization = g_p > 0.0 && g_q < 0.0 && outside_violations == 0 && zero_set_outside_ball == 0;

    // (2) Image containment.
    let zero_set_image_outside = sigma
        .all_points()
        .filter(|z| ambient_distance(&psi_n.apply(z), q) > r_q)
        .count();
    let ball = sample_ball(p, r_p, opts.ball_samples, opts.seed ^ 0x5eed_0001);
    let escapes: Vec<f64> = ball
        .par_iter()
        .filter_map(|z| {
            let (w, g) = psi_n.eval_scaling(z.coords()).ok()?;
            let w = SpherePoint::new(w).ok()?;
            (ambient_distance(&w, q) > r_q).then_some(g)
        })
        .collect();
    let ball_escape_violations = escapes
        .iter()
        .filter(|g| !(g.signum() == repelling_sign && **g != 0.0))
        .count();
    let containment = zero_set_image_outside == 0 && ball_escape_violations == 0;

    // (3) Fibre separation.
    let fd_pq = fiber_distance(p, q).value();
    let overlap = hermitian(p.coords(), q.coords()).norm().min(1.0);
    let lipschitz_bound = std::f64::consts::FRAC_PI_2 / (1.0 - overlap * overlap).sqrt();
    let ball_p = sample_ball(p, r_p, opts.pair_samples, opts.seed ^ 0x5eed_0002);
    let ball_q = sample_ball(q, r_q, opts.pair_samples, opts.seed ^ 0x5eed_0003);
    let (lipschitz, sampled_infimum) = ball_p
        .par_iter()
        .zip(ball_q.par_iter())
        .map(|(w, w2)| {
            let d = fiber_distance(w, w2).value();
            let moved = ambient_distance(w, p) + ambient_distance(w2, q);
            let lip = if moved > 0.0 { (d - fd_pq).abs() / moved } else { 0.0 };
            (lip, d)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0f64, f64::INFINITY), |(l, m), (lip, d)| (l.max(lip), m.min(d)));
    let margin = fd_pq - lipschitz * (r_p + r_q);
    let separation = margin > 0.0 && lipschitz <= lipschitz_bound && sampled_infimum >= margin;

    let failing = if !localization {
        Some(CertificateCondition::ZeroSetLocalization)
    } else if !containment {
        Some(CertificateCondition::ImageContainment)
    } else if !separation {
        Some(CertificateCondition::FiberSeparation)
    } else {
        None
    };
    Ok(SeparationCertificate {
        n,
        r_p,
        r_q,
        holds: failing.is_none(),
        failing,
        localization,
        containment,
        separation,
        outside_samples: outside.len(),
        outside_violations,
        outside_min_abs_g,
        zero_set_size: sigma.len(),
        zero_set_outside_ball,
        zero_set_image_outside,
        ball_escapes: escapes.len(),
        ball_escape_violations,
        fiber_distance_pq: fd_pq,
        lipschitz,
        lipschitz_bound,
        margin,
        sampled_infimum,
    })
}

/// Measures `M`, `δ` and `N` on `grid` samples; `N` is searched up to
/// `n_limit`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_constants(
    psi: &ContactMap,
    p: &SpherePoint,
    q: &SpherePoint,
    r_p: f64,
    r_q: f64,
    grid: usize,
    seed: u64,
    n_limit: usize,
) -> Result<LemmaConstants> {
    let points = sample_sphere(psi.dim(), grid, seed);
    let g = |z: &[num_complex::Complex64]| psi.eval_scaling(z).map(|(_, g)| g.abs()).unwrap_or(f64::NAN);
    let m = points.par_iter().map(|z| g(z.coords())).reduce(|| 0.0, f64::max);
    let balls: Vec<SpherePoint> = sample_ball(p, r_p, grid / 2 + 1, seed ^ 0x5eed_0004)
        .into_iter()
        .chain(sample_ball(q, r_q, grid / 2 + 1, seed ^ 0x5eed_0005))
        .collect();
    let delta = balls.par_iter().map(|z| g(z.coords())).reduce(|| f64::INFINITY, f64::min);

    let mut current: Vec<Vec<num_complex::Complex64>> = points
        .iter()
        .filter(|z| ambient_distance(z, p) > r_p)
        .map(|z| z.coords().to_vec())
        .collect();
    let mut first = None;
    for k in 1..=n_limit {
        current = current.par_iter().map(|z| psi.eval(z)).collect();
        let inside = current
            .par_iter()
            .all(|w| crate::sphere::chordal(w, q.coords()) <= r_q);
        if inside {
            first = Some(k);
            break;
        }
    }
    Ok(LemmaConstants {
        m,
        delta,
        n: first,
        n_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::conjugate;
    use crate::moebius::{build_conjugator, MoebiusMap};

    fn psi() -> (ContactMap, SpherePoint, SpherePoint) {
        let phi = MoebiusMap::canonical(0.5, 2, 1).unwrap().to_contact_map();
        let c = build_conjugator(0.5, 2).unwrap();
        (conjugate(&phi, &c.map).unwrap(), c.p, c.q)
    }

    #[test]
    fn zero_radius_margin_is_fibre_distance() {
        let (psi, p, q) = psi();
        let c = separation_certificate(&psi, 1, &p, &q, 0.0, 0.0, 2_000, 1).unwrap();
        assert!((c.margin - (7.0f64 / 25.0).acos()).abs() < 1e-12);
        assert!(!c.localization);
    }

    #[test]
    fn margin_with_small_balls() {
        let (psi, p, q) = psi();
        let c = separation_certificate(&psi, 1, &p, &q, 0.1, 0.1, 2_000, 1).unwrap();
        assert!(c.margin > 1.0, "{}", c.margin);
        assert!(c.lipschitz <= c.lipschitz_bound);
        assert!(c.sampled_infimum >= c.margin);
    }

    #[test]
    fn first_iterate_not_localized() {
        let (psi, p, q) = psi();
        let c = separation_certificate(&psi, 1, &p, &q, 0.1, 0.1, 5_000, 2).unwrap();
        assert!(!c.holds);
        assert_eq!(c.failing, Some(CertificateCondition::ZeroSetLocalization));
    }

    #[test]
    fn later_iterate_certified() {
        let (psi, p, q) = psi();
        let c = separation_certificate(&psi, 16, &p, &q, 0.1, 0.1, 5_000, 2).unwrap();
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn constants_are_positive() {
        let (psi, p, q) = psi();
        let k = lemma_constants(&psi, &p, &q, 0.1, 0.1, 2_000, 3, 256).unwrap();
        assert!(k.m > 0.0 && k.delta > 0.0 && k.delta <= k.m);
        assert!(k.n.is_some());
    }
}
