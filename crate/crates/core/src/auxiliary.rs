//! Two elementary cases where translated points always exist: circle
//! diffeomorphisms and flows of Reeb-invariant quadratic Hamiltonians.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ContactError, Result};
use crate::maps::ContactMap;
use crate::sphere::SpherePoint;
use crate::translated::defect;

/// Points at which the derivative of a [`CircleMap`] is checked.
pub const DERIVATIVE_SAMPLES: usize = 10_000;

/// Orientation-preserving circle diffeomorphism with lift
/// `θ ↦ θ + shift + Σₖ (εₖ sin kθ + ηₖ cos kθ)`, `k = 1, 2, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    shift: f64,
    eps: Vec<f64>,
    eta: Vec<f64>,
}

impl CircleMap {
    pub fn new(shift: f64, eps: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if eps.len() != eta.len() {
            return Err(ContactError::DimensionMismatch {
                expected: eps.len(),
                got: eta.len(),
            });
        }
        let map = Self { shift, eps, eta };
        for i in 0..DERIVATIVE_SAMPLES {
            let theta = TAU * i as f64 / DERIVATIVE_SAMPLES as f64;
            let value = map.derivative(theta);
            if !(value > 0.0) {
                return Err(ContactError::InvalidDiffeomorphism { theta, value });
            }
        }
        Ok(map)
    }

    pub fn rotation(shift: f64) -> Self {
        Self {
            shift,
            eps: Vec::new(),
            eta: Vec::new(),
        }
    }

    /// Random map with `modes` Fourier modes and `Σ k(|εₖ| + |ηₖ|) ≤ 0.9`,
    /// which keeps the derivative above 0.1.
    pub fn random(modes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = rng.random_range(0.0..TAU);
        let raw: Vec<(f64, f64)> = (0..modes)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let weight: f64 = raw
            .iter()
            .enumerate()
            .map(|(k, (e, h))| (k + 1) as f64 * (e.abs() + h.abs()))
            .sum();
        let budget: f64 = rng.random_range(0.05..0.9);
        let scale = if weight > 0.0 { budget / weight } else { 0.0 };
        Self {
            shift,
            eps: raw.iter().map(|(e, _)| e * scale).collect(),
            eta: raw.iter().map(|(_, h)| h * scale).collect(),
        }
    }

    pub fn lift(&self, theta: f64) -> f64 {
        let wave: f64 = self
            .eps
            .iter()
            .zip(&self.eta)
            .enumerate()
            .map(|(k, (e, h))| {
                let (s, c) = ((k + 1) as f64 * theta).sin_cos();
                e * s + h * c
            })
            .sum();
        theta + self.shift + wave
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let wave: f64 = self
            .eps
            .iter()
            .zip(&self.eta)
            .enumerate()
            .map(|(k, (e, h))| {
                let k = (k + 1) as f64;
                let (s, c) = (k * theta).sin_cos();
                k * (e * c - h * s)
            })
            .sum();
        1.0 + wave
    }

    /// Scaling factor `g = ln φ′` for the form `dθ`.
    pub fn scaling(&self, theta: f64) -> f64 {
        self.derivative(theta).ln()
    }

    pub fn is_rotation(&self) -> bool {
        self.eps.iter().chain(&self.eta).all(|c| *c == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleZeros {
    pub count: usize,
    pub zeros: Vec<f64>,
    /// `g ≡ 0` on the grid: every point is translated.
    pub degenerate: bool,
}

/// Zeros of `g = ln φ′` on `[0, 2π)`, located by sign changes on a uniform
/// grid and bisected to `1e−12`.
pub fn circle_zero_count(map: &CircleMap, resolution: usize) -> Result<CircleZeros> {
    if resolution < 16 {
        return Err(ContactError::Parameter(format!(
            "circle_zero_count needs resolution >= 16, got {resolution}"
        )));
    }
    let step = TAU / resolution as f64;
    let mut values = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let theta = step * i as f64;
        let d = map.derivative(theta);
        if !(d > 0.0) {
            return Err(ContactError::InvalidDiffeomorphism { theta, value: d });
        }
        values.push(d.ln());
    }
    if values.iter().all(|g| g.abs() <= 1e-14) {
        return Ok(CircleZeros {
            count: 0,
            zeros: Vec::new(),
            degenerate: true,
        });
    }
    let mut zeros = Vec::new();
    for i in 0..resolution {
        let (g0, g1) = (values[i], values[(i + 1) % resolution]);
        let lo = step * i as f64;
        if g0 == 0.0 {
            zeros.push(lo);
        } else if g0 * g1 < 0.0 {
            zeros.push(bisect(|t| map.scaling(t), lo, lo + step, g0));
        }
    }
    Ok(CircleZeros {
        count: zeros.len(),
        zeros,
        degenerate: false,
    })
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let sign = f_lo.signum();
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid.rem_euclid(TAU);
        }
        if v.signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).rem_euclid(TAU)
}

/// Periodic trapezoid rule for `∫₀^{2π} e^{g} dθ = ∫ φ′ dθ`.
pub fn circle_integral(map: &CircleMap, resolution: usize) -> f64 {
    let step = TAU / resolution as f64;
    (0..resolution)
        .map(|i| map.scaling(step * i as f64).exp())
        .sum::<f64>()
        * step
}

/// `H(z) = Σ aᵢ |zᵢ|²`, constant along Reeb orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantHamiltonian {
    pub weights: Vec<f64>,
}

impl InvariantHamiltonian {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn value(&self, z: &SpherePoint) -> f64 {
        self.weights
            .iter()
            .zip(z.coords())
            .map(|(a, c)| a * c.norm_sqr())
            .sum()
    }

    /// Coordinate indices grouped by equal weight, in first-appearance order.
    pub fn weight_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &w) in self.weights.iter().enumerate() {
            match groups.iter_mut().find(|(v, _)| *v == w) {
                Some((_, g)) => g.push(i),
                None => groups.push((w, vec![i])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }
}

/// Time-`t` flow of `H`: `zᵢ ↦ e^{i aᵢ t} zᵢ`.
pub fn invariant_flow(h: &InvariantHamiltonian, t: f64) -> ContactMap {
    let phases: Vec<f64> = h.weights.iter().map(|a| a * t).collect();
    ContactMap::diagonal_unitary(&phases)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub groups: Vec<Vec<usize>>,
    pub times: Vec<f64>,
    /// Critical points checked per group.
    pub samples_per_group: usize,
    pub max_defect: f64,
    pub holds: bool,
}

/// Samples critical points of `H` (unit vectors supported on one weight
/// group) and checks each is a translated point of every `φ_t`.
pub fn critical_points_are_translated(
    h: &InvariantHamiltonian,
    t_list: &[f64],
    tol: f64,
    samples_per_group: usize,
    seed: u64,
) -> Result<CriticalPointReport> {
    let n = h.dim();
    let groups = h.weight_groups();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    for group in &groups {
        for _ in 0..samples_per_group {
            let mut coords = vec![Complex64::new(0.0, 0.0); n];
            for &i in group {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                coords[i] = Complex64::new(re, im);
            }
            points.push(SpherePoint::new(coords)?);
        }
    }
    let mut max_defect: f64 = 0.0;
    for &t in t_list {
        let flow = invariant_flow(h, t);
        for z in &points {
            max_defect = max_defect.max(defect(&flow, z)?.total);
        }
    }
    Ok(CriticalPointReport {
        groups,
        times: t_list.to_vec(),
        samples_per_group,
        max_defect,
        holds: max_defect <= tol,
    })
}

/// Default times at which the Hamiltonian check is run.
pub const DEFAULT_TIMES: [f64; 3] = [0.1, 1.0, PI];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rotation_is_degenerate() {
        let r = circle_zero_count(&CircleMap::rotation(0.7), 64).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn single_mode_zeros() {
        let m = CircleMap::new(0.0, vec![0.3], vec![0.0]).unwrap();
        let r = circle_zero_count(&m, 1000).unwrap();
        assert_eq!(r.count, 2);
        assert_abs_diff_eq!(r.zeros[0], PI / 2.0, epsilon = 1e-11);
        assert_abs_diff_eq!(r.zeros[1], 3.0 * PI / 2.0, epsilon = 1e-11);
        // Grid points land exactly on the zeros here.
        let r = circle_zero_count(&m, 16).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn invalid_maps_rejected() {
        assert!(matches!(
            CircleMap::new(0.0, vec![1.5], vec![0.0]),
            Err(ContactError::InvalidDiffeomorphism { .. })
        ));
        assert!(CircleMap::new(0.0, vec![0.1], vec![]).is_err());
        assert!(circle_zero_count(&CircleMap::rotation(0.0), 8).is_err());
    }

    #[test]
    fn integral_of_derivative() {
        for seed in 0..10 {
            let m = CircleMap::random(5, seed);
            assert_abs_diff_eq!(circle_integral(&m, 4096), TAU, epsilon = 1e-10);
            assert_abs_diff_eq!(m.lift(TAU) - m.lift(0.0), TAU, epsilon = 1e-12);
        }
    }

    #[test]
    fn flow_examples() {
        let h = InvariantHamiltonian::new(vec![1.0, 2.0]);
        let z = SpherePoint::from_pairs(&[(0.6, 0.0), (0.0, 0.8)]).unwrap();
        let w = invariant_flow(&h, PI).apply(&z);
        assert_abs_diff_eq!(w.coords()[0].re, -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(w.coords()[1].im, 0.8, epsilon = 1e-15);
        let id = invariant_flow(&h, 0.0).apply(&z);
        assert_eq!(id, z);
        let reeb = invariant_flow(&InvariantHamiltonian::new(vec![1.0, 1.0]), 0.4).apply(&z);
        assert!(crate::sphere::ambient_distance(&reeb, &z.rotate_phase(0.4)) < 1e-15);
    }

    #[test]
    fn critical_points() {
        let h = InvariantHamiltonian::new(vec![1.0, 2.0]);
        let r = critical_points_are_translated(&h, &DEFAULT_TIMES, 1e-10, 20, 1).unwrap();
        assert!(r.holds);
        assert_eq!(r.groups, vec![vec![0], vec![1]]);
        let equal = InvariantHamiltonian::new(vec![3.0, 3.0]);
        let r = critical_points_are_translated(&equal, &DEFAULT_TIMES, 1e-10, 20, 1).unwrap();
        assert_eq!(r.groups, vec![vec![0, 1]]);
        assert!(r.holds);
    }
}
