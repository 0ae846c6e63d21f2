//! Points, tangent vectors and the standard contact structure of the unit
//! sphere `S^{2n-1} ⊂ ℂⁿ`.
//!
//! Conventions used throughout the crate:
//!
//! * Hermitian product `⟨u, v⟩ = Σ uᵢ v̄ᵢ`; the real inner product on `ℝ^{2n}`
//!   is `Re⟨u, v⟩`.
//! * The contact form is `α = Σ (xᵢ dyᵢ − yᵢ dxᵢ)`, which in complex notation
//!   reads `α_z(v) = Im⟨v, z⟩`.
//! * The Reeb field is `R_z = i z`; its orbits `t ↦ e^{it} z` are the Hopf
//!   fibres.
//! * Real coordinates are interleaved: `(x₁, y₁, x₂, y₂, …)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ContactError, Result};

/// Tolerance used when comparing base points of tangent vectors.
const BASE_POINT_TOL: f64 = 1e-12;
/// Tangency tolerance for [`TangentVector`].
const TANGENCY_TOL: f64 = 1e-10;

/// Hermitian inner product `Σ uᵢ v̄ᵢ`.
#[inline]
pub fn hermitian(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

/// Euclidean norm of a complex vector viewed in `ℝ^{2n}`.
#[inline]
pub fn norm(u: &[Complex64]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Interleaved real coordinates `(re₁, im₁, re₂, im₂, …)`.
pub fn to_real(u: &[Complex64]) -> Vec<f64> {
    u.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Inverse of [`to_real`].
pub fn from_real(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// A point of the unit sphere `S^{2n-1} ⊂ ℂⁿ`.
///
/// Coordinates are renormalized on every construction, so long chains of map
/// evaluations stay on the sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct SpherePoint {
    coords: Vec<Complex64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let r = norm(&coords);
        if coords.is_empty() || !r.is_finite() || r == 0.0 {
            return Err(ContactError::DegeneratePoint);
        }
        let mut coords = coords;
        for c in coords.iter_mut() {
            *c /= r;
        }
        Ok(Self { coords })
    }

    /// Builds a point from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Builds a point from interleaved real coordinates.
    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(from_real(x))
    }

    /// The point `±e_axis` (1-based axis).
    pub fn axis_point(n: usize, axis: usize, sign: f64) -> Self {
        assert!(axis >= 1 && axis <= n, "axis {axis} out of range 1..={n}");
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[axis - 1] = Complex64::new(sign.signum(), 0.0);
        Self { coords }
    }

    /// Complex dimension `n` of the ambient space.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn real_coords(&self) -> Vec<f64> {
        to_real(&self.coords)
    }

    /// Moves the point along its Reeb orbit: `e^{it} z`.
    pub fn rotate_phase(&self, t: f64) -> Self {
        let phase = Complex64::from_polar(1.0, t);
        Self {
            coords: self.coords.iter().map(|c| c * phase).collect(),
        }
    }

    /// `|‖z‖ − 1|`, useful for checking drift in long computations.
    pub fn norm_residual(&self) -> f64 {
        (norm(&self.coords) - 1.0).abs()
    }

    pub(crate) fn from_normalized_unchecked(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }
}

impl TryFrom<Vec<Complex64>> for SpherePoint {
    type Error = ContactError;

    fn try_from(value: Vec<Complex64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<SpherePoint> for Vec<Complex64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

/// A tangent vector `v ∈ T_z S^{2n-1}`, i.e. `Re⟨v, z⟩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    vec: Vec<Complex64>,
}

impl TangentVector {
    /// Validates tangency to within `1e-10` (scaled by `‖v‖` for long vectors).
    pub fn new(base: SpherePoint, vec: Vec<Complex64>) -> Result<Self> {
        if vec.len() != base.dim() {
            return Err(ContactError::DimensionMismatch {
                expected: base.dim(),
                got: vec.len(),
            });
        }
        let normal = hermitian(&vec, base.coords()).re;
        if normal.abs() > TANGENCY_TOL * norm(&vec).max(1.0) {
            return Err(ContactError::ContractViolation(format!(
                "vector is not tangent to the sphere (Re<v,z> = {normal:.3e})"
            )));
        }
        Ok(Self { base, vec })
    }

    /// Orthogonal projection of an ambient vector onto `T_z S`.
    pub fn project(base: SpherePoint, vec: &[Complex64]) -> Self {
        let normal = hermitian(vec, base.coords()).re;
        let vec = vec
            .iter()
            .zip(base.coords())
            .map(|(v, z)| v - z * normal)
            .collect();
        Self { base, vec }
    }

    pub(crate) fn from_parts_unchecked(base: SpherePoint, vec: Vec<Complex64>) -> Self {
        Self { base, vec }
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vec(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.vec
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vec)
    }
}

/// Fubini–Study distance between two Hopf fibres, in radians, in `[0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FiberDistance(f64);

impl FiberDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn same_base(z: &SpherePoint, v: &TangentVector) -> Result<()> {
    if z.dim() != v.base.dim() {
        return Err(ContactError::DimensionMismatch {
            expected: z.dim(),
            got: v.base.dim(),
        });
    }
    let gap = z
        .coords()
        .iter()
        .zip(v.base.coords())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if gap > BASE_POINT_TOL {
        return Err(ContactError::ContractViolation(format!(
            "tangent vector is based at a different point (gap {gap:.3e})"
        )));
    }
    Ok(())
}

/// `α_z(v) = Im⟨v, z⟩`.
pub fn contact_form(z: &SpherePoint, v: &TangentVector) -> Result<f64> {
    same_base(z, v)?;
    Ok(alpha(z.coords(), v.vec()))
}

/// `α_z(v)` evaluated literally as `Σ (xᵢ dyᵢ − yᵢ dxᵢ)` in real coordinates.
pub fn contact_form_real(z: &SpherePoint, v: &TangentVector) -> Result<f64> {
    same_base(z, v)?;
    Ok(z
        .coords()
        .iter()
        .zip(v.vec())
        .map(|(zi, vi)| zi.re * vi.im - zi.im * vi.re)
        .sum())
}

/// Raw contact form on coordinate slices; no base-point check.
#[inline]
pub(crate) fn alpha(z: &[Complex64], v: &[Complex64]) -> f64 {
    hermitian(v, z).im
}

/// The Reeb vector `R_z = i z`.
pub fn reeb_vector(z: &SpherePoint) -> TangentVector {
    let i = Complex64::i();
    TangentVector {
        base: z.clone(),
        vec: z.coords().iter().map(|c| c * i).collect(),
    }
}

/// Fubini–Study distance `arccos |⟨z, w⟩|` between the fibres through `z` and `w`.
///
/// Evaluated as `atan2(‖w − ⟨w,z⟩ z‖, |⟨w, z⟩|)`, which equals the arccos form
/// on the sphere but keeps full relative precision near `0` and `π/2`.
pub fn fiber_distance(z: &SpherePoint, w: &SpherePoint) -> FiberDistance {
    assert_eq!(z.dim(), w.dim(), "fiber_distance: dimension mismatch");
    FiberDistance(fiber_angle(z.coords(), w.coords()))
}

#[inline]
pub(crate) fn fiber_angle(z: &[Complex64], w: &[Complex64]) -> f64 {
    let c = hermitian(w, z);
    let perp = w
        .iter()
        .zip(z)
        .map(|(wi, zi)| (wi - c * zi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp.atan2(c.norm()).clamp(0.0, PI / 2.0)
}

/// Chordal distance `‖z − w‖` in `ℝ^{2n}`.
pub fn ambient_distance(z: &SpherePoint, w: &SpherePoint) -> f64 {
    assert_eq!(z.dim(), w.dim(), "ambient_distance: dimension mismatch");
    chordal(z.coords(), w.coords())
}

#[inline]
pub(crate) fn chordal(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter()
        .zip(w)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Deterministic, approximately uniform sample of `S^{2n-1}` (normalized
/// Gaussian vectors drawn from a ChaCha stream seeded with `seed`).
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        // A zero draw has probability zero; skip it rather than fail.
        if let Ok(p) = SpherePoint::new(coords) {
            out.push(p);
        }
    }
    out
}

/// Orthonormal (real inner product) frame of `T_z S^{2n-1}`.
///
/// The first vector is the Reeb vector `i z`; the remaining `2n − 2` span the
/// contact hyperplane `ξ_z = {v : ⟨v, z⟩ = 0}`.
pub fn tangent_frame(z: &SpherePoint) -> Vec<TangentVector> {
    let n = z.dim();
    let zc = z.coords();
    let mut frame: Vec<Vec<Complex64>> = vec![reeb_vector(z).vec];
    let mut candidates: Vec<(usize, Complex64)> = Vec::with_capacity(2 * n);
    // Prefer the coordinate directions where z is small: they are closest to ξ_z.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| zc[a].norm().total_cmp(&zc[b].norm()));
    for k in order {
        candidates.push((k, Complex64::new(1.0, 0.0)));
        candidates.push((k, Complex64::i()));
    }
    for (k, unit) in candidates {
        if frame.len() == 2 * n - 1 {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = unit;
        // Two Gram–Schmidt passes against z (normal) and the current frame.
        for _ in 0..2 {
            let c = hermitian(&v, zc).re;
            for (vi, zi) in v.iter_mut().zip(zc) {
                *vi -= zi * c;
            }
            for f in &frame {
                let c = hermitian(&v, f).re;
                for (vi, fi) in v.iter_mut().zip(f) {
                    *vi -= fi * c;
                }
            }
        }
        let r = norm(&v);
        if r > 0.3 {
            for vi in v.iter_mut() {
                *vi /= r;
            }
            frame.push(v);
        }
    }
    debug_assert_eq!(frame.len(), 2 * n - 1);
    frame
        .into_iter()
        .map(|vec| TangentVector {
            base: z.clone(),
            vec,
        })
        .collect()
}

/// Great-circle interpolation between two points of the sphere.
pub(crate) fn slerp(z: &[Complex64], w: &[Complex64], s: f64) -> Vec<Complex64> {
    let cos = hermitian(z, w).re.clamp(-1.0, 1.0);
    let theta = cos.acos();
    let (a, b) = if theta < 1e-12 {
        (1.0 - s, s)
    } else {
        let sin = theta.sin();
        (((1.0 - s) * theta).sin() / sin, (s * theta).sin() / sin)
    };
    let v: Vec<Complex64> = z.iter().zip(w).map(|(p, q)| p * a + q * b).collect();
    let r = norm(&v);
    v.into_iter().map(|c| c / r).collect()
}
