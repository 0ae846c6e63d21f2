//! Localization of `Σ_n` near the repelling point and of its image near the
//! attracting point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::zero_set::{extract_zero_set_with, ZeroSetOptions, ZeroSetSample};
use crate::error::{ContactError, Result};
use crate::maps::{iterate, scaling_factor, ContactMap};
use crate::sphere::{ambient_distance, sample_sphere, SpherePoint};

/// Sampled evidence that `ψ` is focal for `(p, q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocalCheck {
    pub p_fixed: f64,
    pub q_fixed: f64,
    pub g_p: f64,
    pub g_q: f64,
    pub samples: usize,
    /// Samples within `attraction_radius` of `q` after `attraction_steps`.
    pub attracted: usize,
    pub attraction_steps: usize,
    pub attraction_radius: f64,
    pub holds: bool,
}

const ATTRACTION_STEPS: usize = 64;
const ATTRACTION_RADIUS: f64 = 1e-3;
const FIXED_TOLERANCE: f64 = 1e-9;

/// Checks `ψ(p) = p`, `ψ(q) = q`, `g(p) > 0 > g(q)` and that random orbits
/// approach `q`.
pub fn check_focal(psi: &ContactMap, p: &SpherePoint, q: &SpherePoint, samples: usize, seed: u64) -> Result<FocalCheck> {
    let p_fixed = ambient_distance(&psi.apply(p), p);
    let q_fixed = ambient_distance(&psi.apply(q), q);
    let g_p = scaling_factor(psi, p)?.value();
    let g_q = scaling_factor(psi, q)?.value();
    let orbit = iterate(psi, ATTRACTION_STEPS);
    let attracted = sample_sphere(psi.dim(), samples, seed)
        .par_iter()
        .filter(|z| ambient_distance(&orbit.apply(z), q) <= ATTRACTION_RADIUS)
        .count();
    let holds = p_fixed <= FIXED_TOLERANCE
        && q_fixed <= FIXED_TOLERANCE
        && g_p > 0.0
        && g_q < 0.0
        && attracted == samples;
    Ok(FocalCheck {
        p_fixed,
        q_fixed,
        g_p,
        g_q,
        samples,
        attracted,
        attraction_steps: ATTRACTION_STEPS,
        attraction_radius: ATTRACTION_RADIUS,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    /// Sampled `sup_{z ∈ Σ_n} |z − p|`; `None` when the sample is empty.
    pub sup_dist_sigma_to_p: Option<f64>,
    /// Sampled `sup_{z ∈ Σ_n} |ψ_n(z) − q|`.
    pub sup_dist_image_to_q: Option<f64>,
    pub sample_size: usize,
    pub resolved: usize,
    /// Roots bracketed at float resolution without reaching the tolerance.
    pub unresolved: usize,
    /// Largest `|g_n|` among unresolved roots.
    pub max_unresolved_residual: Option<f64>,
    /// No sign change was detected.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub focal: FocalCheck,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn row(&self, n: usize) -> Option<&DecayRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

pub fn decay_table(
    psi: &ContactMap,
    p: &SpherePoint,
    q: &SpherePoint,
    n_list: &[usize],
    grid: usize,
    seed: u64,
) -> Result<DecayReport> {
    decay_table_with_samples(psi, p, q, n_list, grid, seed, &ZeroSetOptions::default()).map(|(r, _)| r)
}

/// Like [`decay_table`], also returning the zero-set samples per row.
pub fn decay_table_with_samples(
    psi: &ContactMap,
    p: &SpherePoint,
    q: &SpherePoint,
    n_list: &[usize],
    grid: usize,
    seed: u64,
    opts: &ZeroSetOptions,
) -> Result<(DecayReport, Vec<ZeroSetSample>)> {
    let focal = check_focal(psi, p, q, 256, seed)?;
    if !focal.holds {
        return Err(ContactError::ContractViolation(format!(
            "map is not focal for (p, q): g(p) = {}, g(q) = {}, {} of {} orbits attracted",
            focal.g_p, focal.g_q, focal.attracted, focal.samples
        )));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    let mut samples = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let sample = extract_zero_set_with(psi, n, grid, seed, opts)?;
        let psi_n = iterate(psi, n);
        let (to_p, to_q) = sample
            .all_points()
            .map(|z| (ambient_distance(z, p), ambient_distance(&psi_n.apply(z), q)))
            .fold((None::<f64>, None::<f64>), |(a, b), (x, y)| {
                (Some(a.map_or(x, |a| a.max(x))), Some(b.map_or(y, |b| b.max(y))))
            });
        rows.push(DecayRow {
            n,
            sup_dist_sigma_to_p: to_p,
            sup_dist_image_to_q: to_q,
            sample_size: sample.len(),
            resolved: sample.points.len(),
            unresolved: sample.unresolved.len(),
            max_unresolved_residual: sample.unresolved.iter().map(|r| r.residual).reduce(f64::max),
            flagged: sample.is_empty(),
        });
        samples.push(sample);
    }
    Ok((DecayReport { focal, rows }, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;

    #[test]
    fn unconjugated_focal_map_localizes() {
        let m = MoebiusMap::canonical(0.5, 2, 1).unwrap();
        let (p, q) = m.fixed_points().unwrap();
        let phi = m.to_contact_map();
        let report = decay_table(&phi, &p, &q, &[1, 8], 5_000, 3).unwrap();
        assert!(report.focal.holds);
        let first = report.row(1).unwrap();
        assert!(first.sup_dist_sigma_to_p.unwrap() <= 2.0);
        let late = report.row(8).unwrap();
        assert!(late.sup_dist_sigma_to_p.unwrap() < first.sup_dist_sigma_to_p.unwrap());
        assert!(late.sup_dist_image_to_q.unwrap() < 0.2);
    }

    #[test]
    fn non_focal_map_rejected() {
        let u = ContactMap::diagonal_unitary(&[0.1, 0.2]);
        let p = SpherePoint::axis_point(2, 1, 1.0);
        let q = SpherePoint::axis_point(2, 2, 1.0);
        assert!(decay_table(&u, &p, &q, &[1], 100, 1).is_err());
    }
}
