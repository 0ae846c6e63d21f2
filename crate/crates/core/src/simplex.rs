//! Derivative-free Nelder–Mead minimization in `ℝ^d`.

/// Outcome of a simplex run.
#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Largest distance from the best vertex to any other vertex at exit.
    pub diameter: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Edge length of the initial right-angled simplex.
    pub initial_step: f64,
    /// Stop once the simplex diameter is at most this.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(&simplex[0])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+∞`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let d = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut evaluations = d + 1;

    loop {
        // Order vertices by value; ties keep their previous order.
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let diam = diameter(&simplex);
        if diam <= opts.tolerance || evaluations >= opts.max_evaluations {
            return SimplexResult {
                x: simplex[0].clone(),
                value: values[0],
                evaluations,
                diameter: diam,
                converged: diam <= opts.tolerance,
            };
        }

        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = &simplex[d];
        let reflected = affine(&centroid, worst, -REFLECT);
        let f_r = eval(&reflected);
        evaluations += 1;

        if f_r < values[0] {
            let expanded = affine(&centroid, worst, -EXPAND);
            let f_e = eval(&expanded);
            evaluations += 1;
            if f_e < f_r {
                simplex[d] = expanded;
                values[d] = f_e;
            } else {
                simplex[d] = reflected;
                values[d] = f_r;
            }
            continue;
        }
        if f_r < values[d - 1] {
            simplex[d] = reflected;
            values[d] = f_r;
            continue;
        }
        let (candidate, f_c) = if f_r < values[d] {
            let c = affine(&centroid, &reflected, CONTRACT);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = affine(&centroid, worst, CONTRACT);
            let fc = eval(&c);
            (c, fc)
        };
        evaluations += 1;
        if f_c < values[d].min(f_r) {
            simplex[d] = candidate;
            values[d] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=d {
            simplex[i] = affine(&best, &simplex[i], SHRINK);
            values[i] = eval(&simplex[i]);
        }
        evaluations += d;
    }
}
