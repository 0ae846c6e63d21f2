//! Point-cloud approximation of `Σ_n = {g_n = 0}`.
//!
//! `g_n` is evaluated (cocycle sum) on a random grid. Every great-circle arc
//! between nearest neighbours whose endpoints have strictly opposite signs is
//! bisected to `|g_n| ≤ tol`.
//!
//! For large `n` the region `{g_n > 0}` around the repelling point shrinks
//! far below the grid spacing, so a uniform grid alone stops seeing sign
//! changes. Each run therefore also climbs toward the minority sign with a
//! simplex search from the extreme grid values; an extremum of that sign
//! becomes an anchor linked by arcs to its nearest grid points.
//!
//! Very close to the repelling point `g_n` varies faster than adjacent
//! `f64` points can resolve; arcs whose bracket collapses before reaching the
//! tolerance are reported separately as [`UnresolvedRoot`]s.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TangentChart;
use crate::error::{ContactError, Result};
use crate::maps::{iterate, ContactMap};
use crate::neighbors::KdTree;
use crate::simplex::{nelder_mead, SimplexOptions};
use crate::sphere::{chordal, sample_sphere, slerp, to_real, SpherePoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetOptions {
    /// Nearest neighbours per grid point used to form arcs.
    pub neighbors: usize,
    /// Bisection stops at `|g_n| ≤ tolerance`.
    pub tolerance: f64,
    /// Grid points linked to each anchor.
    pub anchor_links: usize,
    /// Simplex climbs started when looking for an anchor.
    pub anchor_starts: usize,
    pub max_bisections: usize,
}

impl Default for ZeroSetOptions {
    fn default() -> Self {
        Self {
            neighbors: 8,
            tolerance: 1e-10,
            anchor_links: 64,
            anchor_starts: 4,
            max_bisections: 200,
        }
    }
}

/// A sign change localized to adjacent representable points without reaching
/// the residual tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedRoot {
    pub point: SpherePoint,
    pub residual: f64,
    /// Chordal width of the final bracket.
    pub bracket: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetSample {
    pub iterate_index: usize,
    /// Roots with `|g_n| ≤ tolerance`.
    pub points: Vec<SpherePoint>,
    /// `|g_n|` at each entry of `points`.
    pub residuals: Vec<f64>,
    pub unresolved: Vec<UnresolvedRoot>,
    pub anchors: Vec<SpherePoint>,
    pub sign_changing_arcs: usize,
    /// No sign change was found anywhere; the grid may be too coarse, or
    /// `g_n` has constant sign (e.g. `g ≡ 0` for unitaries).
    pub under_sampled: bool,
}

impl ZeroSetSample {
    pub fn len(&self) -> usize {
        self.points.len() + self.unresolved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Resolved roots followed by unresolved ones.
    pub fn all_points(&self) -> impl Iterator<Item = &SpherePoint> {
        self.points
            .iter()
            .chain(self.unresolved.iter().map(|r| &r.point))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sign {
    Pos,
    Neg,
    Zero,
}

fn classify(g: f64, tol: f64) -> Sign {
    if g > tol {
        Sign::Pos
    } else if g < -tol {
        Sign::Neg
    } else {
        Sign::Zero
    }
}

const CLIMB_ROUNDS: usize = 8;

enum ArcRoot {
    Resolved(Vec<Complex64>, f64),
    Unresolved(Vec<Complex64>, f64, f64),
}

/// Samples `Σ_n` for `φ` with default options.
pub fn extract_zero_set(map: &ContactMap, n: usize, grid: usize, seed: u64) -> Result<ZeroSetSample> {
    extract_zero_set_with(map, n, grid, seed, &ZeroSetOptions::default())
}

pub fn extract_zero_set_with(
    map: &ContactMap,
    n: usize,
    grid: usize,
    seed: u64,
    opts: &ZeroSetOptions,
) -> Result<ZeroSetSample> {
    if n == 0 {
        return Err(ContactError::Parameter("extract_zero_set needs n >= 1".into()));
    }
    let iterate_map = iterate(map, n);
    let g_n = |z: &[Complex64]| -> f64 {
        iterate_map
            .eval_scaling(z)
            .map(|(_, g)| g)
            .unwrap_or(f64::NAN)
    };
    let tol = opts.tolerance;

    let mut cloud: Vec<Vec<Complex64>> = sample_sphere(map.dim(), grid, seed)
        .into_iter()
        .map(|p| p.coords().to_vec())
        .collect();
    let mut values: Vec<f64> = cloud.par_iter().map(|z| g_n(z)).collect();
    let grid_len = cloud.len();

    let dim = 2 * map.dim();
    let flat: Vec<f64> = cloud.iter().flat_map(|z| to_real(z)).collect();
    let tree = KdTree::new(&flat, dim);

    let mut pairs: Vec<(usize, usize)> = (0..grid_len)
        .into_par_iter()
        .flat_map_iter(|i| {
            tree.nearest(&flat[i * dim..(i + 1) * dim], opts.neighbors, Some(i))
                .into_iter()
                .map(move |j| (i.min(j), i.max(j)))
        })
        .collect();

    // Anchors: an extremum of the minority sign, to catch a region of that
    // sign the grid barely sees.
    let mut anchors = Vec::new();
    let positive = values.iter().filter(|&&g| classify(g, tol) == Sign::Pos).count();
    let negative = values.iter().filter(|&&g| classify(g, tol) == Sign::Neg).count();
    if positive + negative > 0 {
        let sign = if positive < negative { 1.0 } else { -1.0 };
        if let Some((z, g)) = climb(&g_n, &cloud[..grid_len], &values, sign, opts.anchor_starts) {
            if classify(sign * g, tol) == Sign::Pos {
                let idx = cloud.len();
                let links = tree.nearest(&to_real(&z), opts.anchor_links, None);
                pairs.extend(links.into_iter().map(|j| (j, idx)));
                anchors.push(SpherePoint::new(z.clone())?);
                cloud.push(z);
                values.push(g);
            }
        }
    }

    pairs.sort_unstable();
    pairs.dedup();
    let arcs: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|&(i, j)| {
            let (a, b) = (classify(values[i], tol), classify(values[j], tol));
            matches!((a, b), (Sign::Pos, Sign::Neg) | (Sign::Neg, Sign::Pos))
        })
        .collect();

    let roots: Vec<ArcRoot> = arcs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (pos, neg) = if values[i] > 0.0 { (i, j) } else { (j, i) };
            bisect_arc(&g_n, &cloud[pos], &cloud[neg], values[pos], values[neg], opts)
        })
        .collect();

    let mut sample = ZeroSetSample {
        iterate_index: n,
        points: Vec::new(),
        residuals: Vec::new(),
        unresolved: Vec::new(),
        anchors,
        sign_changing_arcs: arcs.len(),
        under_sampled: arcs.is_empty(),
    };
    for root in roots {
        match root {
            ArcRoot::Resolved(z, r) => {
                sample.points.push(SpherePoint::new(z)?);
                sample.residuals.push(r);
            }
            ArcRoot::Unresolved(z, r, bracket) => sample.unresolved.push(UnresolvedRoot {
                point: SpherePoint::new(z)?,
                residual: r,
                bracket,
            }),
        }
    }
    Ok(sample)
}

/// Maximizes `sign · g_n` by simplex climbs from the `starts` best grid
/// points; returns the best point found.
fn climb<F>(
    g_n: &F,
    cloud: &[Vec<Complex64>],
    values: &[f64],
    sign: f64,
    starts: usize,
) -> Option<(Vec<Complex64>, f64)>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    order.sort_by(|&i, &j| (sign * values[j]).total_cmp(&(sign * values[i])).then(i.cmp(&j)));
    order.truncate(starts);
    let spacing = {
        let n = cloud.first()?.len();
        super::grid_spacing(n, values.len())
    };
    let results: Vec<(Vec<Complex64>, f64)> = order
        .par_iter()
        .map(|&i| {
            let mut z = cloud[i].clone();
            let mut g = values[i];
            let mut step = spacing;
            // Re-centre the chart on each improvement so that regions far
            // smaller than the grid spacing stay resolvable.
            for _ in 0..CLIMB_ROUNDS {
                let centre = SpherePoint::new(z.clone()).expect("climb stays on the sphere");
                let chart = TangentChart::new(&centre);
                let res = nelder_mead(
                    |x: &[f64]| -sign * g_n(&chart.point(x)),
                    &vec![0.0; chart.dim()],
                    SimplexOptions {
                        initial_step: step,
                        tolerance: 1e-15,
                        max_evaluations: 2000,
                    },
                );
                let candidate = chart.point(&res.x);
                let value = g_n(&candidate);
                if !(sign * value > sign * g) {
                    break;
                }
                z = candidate;
                g = value;
                step = (10.0 * res.diameter).clamp(1e-14, step);
            }
            (z, g)
        })
        .collect();
    results
        .into_iter()
        .filter(|(_, g)| g.is_finite())
        .max_by(|a, b| (sign * a.1).total_cmp(&(sign * b.1)))
}

fn bisect_arc<F>(
    g_n: &F,
    pos: &[Complex64],
    neg: &[Complex64],
    g_pos: f64,
    g_neg: f64,
    opts: &ZeroSetOptions,
) -> Option<ArcRoot>
where
    F: Fn(&[Complex64]) -> f64,
{
    let (mut s_pos, mut s_neg) = (0.0f64, 1.0f64);
    let (mut z_pos, mut z_neg) = (pos.to_vec(), neg.to_vec());
    let (mut g_lo, mut g_hi) = (g_pos, g_neg);
    for _ in 0..opts.max_bisections {
        let s = 0.5 * (s_pos + s_neg);
        let z = slerp(pos, neg, s);
        if z == z_pos || z == z_neg {
            break;
        }
        let g = g_n(&z);
        if !g.is_finite() {
            return None;
        }
        if g.abs() <= opts.tolerance {
            return Some(ArcRoot::Resolved(z, g.abs()));
        }
        if g > 0.0 {
            s_pos = s;
            z_pos = z;
            g_lo = g;
        } else {
            s_neg = s;
            z_neg = z;
            g_hi = g;
        }
    }
    let bracket = chordal(&z_pos, &z_neg);
    Some(if g_lo.abs() <= g_hi.abs() {
        ArcRoot::Unresolved(z_pos, g_lo.abs(), bracket)
    } else {
        ArcRoot::Unresolved(z_neg, g_hi.abs(), bracket)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::cocycle_scaling;
    use crate::moebius::MoebiusMap;
    use crate::sphere::ambient_distance;

    fn focal() -> ContactMap {
        MoebiusMap::canonical(0.5, 2, 1).unwrap().to_contact_map()
    }

    #[test]
    fn single_focal_map_has_nonempty_zero_set() {
        let phi = focal();
        let s = extract_zero_set(&phi, 1, 10_000, 3).unwrap();
        assert!(!s.under_sampled);
        assert!(s.points.len() > 100, "only {} roots", s.points.len());
        for (z, r) in s.points.iter().zip(&s.residuals) {
            assert!(*r <= 1e-10);
            let g = cocycle_scaling(&phi, 1, z).unwrap().value();
            assert!(g.abs() <= 1e-10);
            // Closed form: |u₀| = 1 ⇔ |5/4 + 3/4 z₁| = 1.
            let u0 = (num_complex::Complex64::new(1.25, 0.0) + z.coords()[0] * 0.75).norm();
            assert!((u0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_is_flagged() {
        let u = ContactMap::diagonal_unitary(&[0.2, 1.1]);
        let s = extract_zero_set(&u, 3, 2_000, 1).unwrap();
        assert!(s.under_sampled);
        assert!(s.is_empty());
        assert!(s.anchors.is_empty());
    }

    #[test]
    fn anchor_recovers_tiny_positive_region() {
        // For n = 16 the set {g_16 > 0} has radius ~1e-2 around P, far
        // smaller than a 2000-point grid resolves.
        let phi = focal();
        let s = extract_zero_set(&phi, 16, 2_000, 5).unwrap();
        assert_eq!(s.anchors.len(), 1);
        assert!(!s.is_empty());
        let p = SpherePoint::axis_point(2, 1, -1.0);
        assert!(ambient_distance(&s.anchors[0], &p) < 1e-2);
        for z in s.all_points() {
            assert!(ambient_distance(z, &p) < 0.05);
        }
    }

    #[test]
    fn deterministic() {
        let phi = focal();
        let a = extract_zero_set(&phi, 2, 3_000, 9).unwrap();
        let b = extract_zero_set(&phi, 2, 3_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_iterate() {
        assert!(extract_zero_set(&focal(), 0, 100, 1).is_err());
    }
}
