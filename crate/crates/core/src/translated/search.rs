//! Multistart minimization of the defect functional.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{defect_parts, grid_spacing, TangentChart};
use crate::error::{ContactError, Result};
use crate::maps::ContactMap;
use crate::simplex::{nelder_mead, SimplexOptions};
use crate::sphere::{sample_sphere, SpherePoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub starts: usize,
    pub grid: usize,
    pub seed: u64,
    /// Simplex diameter (chart coordinates) at which refinement stops.
    pub tolerance: f64,
    /// Evaluation budget per simplex run.
    pub max_evaluations: usize,
    /// Simplex restarts from the current best point after the first run.
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            grid: 200_000,
            seed: 1,
            tolerance: 1e-10,
            max_evaluations: 4_000,
            restarts: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub min_total: f64,
    pub argmin: SpherePoint,
    pub g_component: f64,
    pub fiber_component: f64,
    pub starts: usize,
    pub refinement_tolerance: f64,
    pub grid_size: usize,
    /// Smallest defect on the raw grid.
    pub grid_min: f64,
    /// Every refinement reached the diameter tolerance within budget.
    pub converged: bool,
    pub evaluations: usize,
    /// Set by the caller once a separation certificate also holds.
    pub certified: bool,
}

struct Refined {
    z: Vec<Complex64>,
    total: f64,
    evaluations: usize,
    converged: bool,
}

fn total(map: &ContactMap, z: &[Complex64]) -> f64 {
    match defect_parts(map, z) {
        Ok((g, d)) => g * g + d * d,
        Err(_) => f64::NAN,
    }
}

/// Multistart search for the minimum of `D` over the sphere.
pub fn search_translated(map: &ContactMap, starts: usize, grid: usize, seed: u64, tol: f64) -> Result<DefectReport> {
    search_translated_with(
        map,
        &SearchOptions {
            starts,
            grid,
            seed,
            tolerance: tol,
            ..SearchOptions::default()
        },
    )
}

pub fn search_translated_with(map: &ContactMap, opts: &SearchOptions) -> Result<DefectReport> {
    if opts.starts == 0 {
        return Err(ContactError::Parameter("search needs at least one start".into()));
    }
    if opts.grid == 0 {
        return Err(ContactError::Parameter("search needs a nonempty grid".into()));
    }
    let n = map.dim();
    let cloud: Vec<Vec<Complex64>> = sample_sphere(n, opts.grid, opts.seed)
        .into_iter()
        .map(|p| p.coords().to_vec())
        .collect();
    let values: Vec<f64> = cloud.par_iter().map(|z| total(map, z)).collect();

    let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    if order.is_empty() {
        return Err(ContactError::Consistency("defect is non-finite on the whole grid".into()));
    }
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let grid_best = order[0];
    order.truncate(opts.starts);

    let step = grid_spacing(n, opts.grid);
    let refined: Vec<Refined> = order
        .par_iter()
        .map(|&i| refine(map, &cloud[i], values[i], step, opts))
        .collect();

    let mut best = Refined {
        z: cloud[grid_best].clone(),
        total: values[grid_best],
        evaluations: 0,
        converged: true,
    };
    let mut evaluations = opts.grid;
    let mut converged = true;
    for r in refined {
        evaluations += r.evaluations;
        converged &= r.converged;
        if r.total < best.total {
            best.z = r.z;
            best.total = r.total;
        }
    }
    let argmin = SpherePoint::new(best.z)?;
    let (g, d) = defect_parts(map, argmin.coords())?;
    Ok(DefectReport {
        min_total: best.total,
        argmin,
        g_component: g,
        fiber_component: d,
        starts: order.len(),
        refinement_tolerance: opts.tolerance,
        grid_size: opts.grid,
        grid_min: values[grid_best],
        converged,
        evaluations,
        certified: false,
    })
}

fn refine(map: &ContactMap, start: &[Complex64], start_value: f64, step: f64, opts: &SearchOptions) -> Refined {
    let mut z = start.to_vec();
    let mut value = start_value;
    let mut evaluations = 0;
    let mut converged = false;
    let mut step = step;
    for _ in 0..=opts.restarts {
        let centre = SpherePoint::new(z.clone()).expect("iterate stays on the sphere");
        let chart = TangentChart::new(&centre);
        let res = nelder_mead(
            |x| total(map, &chart.point(x)),
            &vec![0.0; chart.dim()],
            SimplexOptions {
                initial_step: step,
                tolerance: opts.tolerance,
                max_evaluations: opts.max_evaluations,
            },
        );
        evaluations += res.evaluations;
        converged = res.converged;
        if res.value < value {
            z = chart.point(&res.x);
            value = res.value;
        }
        // Restart with a simplex a little larger than the one we ended on.
        step = (10.0 * res.diameter).max(1e3 * opts.tolerance).min(step);
    }
    Refined {
        z,
        total: value,
        evaluations,
        converged,
    }
}
