//! Projective action of `U(n,1)` on the sphere and the canonical focal family.
//!
//! A matrix `M` preserving `q(u) = −|u₀|² + Σ|uᵢ|²` maps the null cone to
//! itself, so lifting `z ↦ (1, z)`, applying `M` and dehomogenizing by the
//! zeroth coordinate is a self-map of `S^{2n-1}`. It is holomorphic on the
//! closed ball and preserves the complex tangencies, hence a contactomorphism.
//!
//! The canonical family `M_a`, `0 < a < 1`, is a hyperbolic boost in the
//! `(u₀, u_axis)` plane. Its sphere map fixes exactly `P = −e_axis`
//! (repelling) and `Q = +e_axis` (attracting) and tends to the identity as
//! `a → 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ContactError, Result};
use crate::maps::{ContactMap, TangentMap};
use crate::sphere::{
    alpha, fiber_distance, hermitian, norm, reeb_vector, tangent_frame, SpherePoint,
    TangentVector,
};

const ETA_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `η = diag(−1, 1, …, 1)`, the Gram matrix of the signature form.
pub fn eta(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => c(-1.0),
        _ if i == j => c(1.0),
        _ => c(0.0),
    })
}

/// An element of `U(n,1)`: `M* η M = η`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignatureMatrix {
    entries: DMatrix<Complex64>,
}

impl SignatureMatrix {
    /// Validates `M* η M = η` to `1e-12` (relative to `‖M‖²` for large boosts).
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(ContactError::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let m = Self { entries };
        let scale = m.entries.iter().map(|x| x.norm_sqr()).fold(1.0, f64::max);
        let residual = m.eta_residual();
        if residual > ETA_TOL * scale {
            return Err(ContactError::NotInUnitaryGroup(residual));
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// Complex dimension `n` of the sphere it acts on.
    pub fn dim(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `max |M* η M − η|` entrywise.
    pub fn eta_residual(&self) -> f64 {
        let e = eta(self.dim());
        (self.entries.adjoint() * &e * &self.entries - e)
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &SignatureMatrix) -> SignatureMatrix {
        Self {
            entries: &self.entries * &other.entries,
        }
    }

    /// Exact inverse `η M* η`.
    pub fn inverse(&self) -> SignatureMatrix {
        let e = eta(self.dim());
        Self {
            entries: &e * self.entries.adjoint() * &e,
        }
    }

    /// `e^{it} M`; acts identically on the sphere.
    pub fn with_phase(&self, t: f64) -> SignatureMatrix {
        let phase = Complex64::from_polar(1.0, t);
        Self {
            entries: self.entries.map(|x| x * phase),
        }
    }
}

/// The boost `M_a` acting on `(u₀, u_axis)`, identity elsewhere.
///
/// Built on axis 1 and moved to `axis` by conjugating with the coordinate
/// swap `u₁ ↔ u_axis`, so a single formula serves every axis.
pub fn canonical_matrix(a: f64, n: usize, axis: usize) -> Result<SignatureMatrix> {
    if !(a > 0.0 && a < 1.0) {
        return Err(ContactError::Parameter(format!("a = {a} is not in (0, 1)")));
    }
    if n < 1 || axis < 1 || axis > n {
        return Err(ContactError::Parameter(format!(
            "axis {axis} is not in 1..={n}"
        )));
    }
    let scale = 1.0 / (2.0 * a);
    let mut m = DMatrix::<Complex64>::identity(n + 1, n + 1);
    m[(0, 0)] = c((1.0 + a * a) * scale);
    m[(0, 1)] = c((1.0 - a * a) * scale);
    m[(1, 0)] = c((1.0 - a * a) * scale);
    m[(1, 1)] = c((1.0 + a * a) * scale);
    if axis != 1 {
        let mut swap = DMatrix::<Complex64>::identity(n + 1, n + 1);
        swap.swap_rows(1, axis);
        m = &swap * m * &swap;
    }
    SignatureMatrix::new(m)
}

/// Lifts `z` to `(1, z)`, applies `M` and returns `(u₀, (u₁, …, u_n))`.
fn lift_apply(m: &DMatrix<Complex64>, z: &[Complex64]) -> (Complex64, Vec<Complex64>) {
    let n = z.len();
    let row = |i: usize| m[(i, 0)] + (0..n).map(|j| m[(i, j + 1)] * z[j]).sum::<Complex64>();
    (row(0), (1..=n).map(row).collect())
}

/// Lower bound for `|u₀|` over the unit sphere: `|M₀₀| − ‖(M₀₁, …, M₀ₙ)‖`.
fn denominator_floor(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows() - 1;
    let tail = (1..=n).map(|j| m[(0, j)].norm_sqr()).sum::<f64>().sqrt();
    m[(0, 0)].norm() - tail
}

/// Projective action `z ↦ (M(1,z))_{1..n} / (M(1,z))₀`.
pub fn apply_projective(m: &SignatureMatrix, z: &SpherePoint) -> Result<SpherePoint> {
    if m.dim() != z.dim() {
        return Err(ContactError::DimensionMismatch {
            expected: m.dim(),
            got: z.dim(),
        });
    }
    let (u0, u) = lift_apply(&m.entries, z.coords());
    let scale = norm(&u).max(1.0);
    if u0.norm() <= 1e-14 * scale {
        return Err(ContactError::VanishingDenominator(u0.norm()));
    }
    SpherePoint::new(u.into_iter().map(|x| x / u0).collect())
}

/// A sphere map induced by a [`SignatureMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap {
    matrix: SignatureMatrix,
    axis: Option<usize>,
    parameter: Option<f64>,
    floor: f64,
}

impl MoebiusMap {
    pub fn from_matrix(matrix: SignatureMatrix) -> Self {
        let floor = denominator_floor(&matrix.entries);
        Self {
            matrix,
            axis: None,
            parameter: None,
            floor,
        }
    }

    /// The focal map `φ_a` along coordinate `axis`.
    pub fn canonical(a: f64, n: usize, axis: usize) -> Result<Self> {
        let matrix = canonical_matrix(a, n, axis)?;
        Ok(Self {
            axis: Some(axis),
            parameter: Some(a),
            ..Self::from_matrix(matrix)
        })
    }

    pub fn matrix(&self) -> &SignatureMatrix {
        &self.matrix
    }

    /// `σ ∘ φ ∘ σ⁻¹` as a single matrix map.
    pub fn conjugated_by(&self, sigma: &MoebiusMap) -> MoebiusMap {
        Self::from_matrix(sigma.matrix.compose(&self.matrix).compose(&sigma.matrix.inverse()))
    }

    /// `φ^k` as a single matrix map, by `k` successive products.
    pub fn power(&self, k: usize) -> MoebiusMap {
        let mut m = SignatureMatrix::identity(self.dim());
        for _ in 0..k {
            m = m.compose(&self.matrix);
        }
        Self::from_matrix(m)
    }

    pub fn axis(&self) -> Option<usize> {
        self.axis
    }

    pub fn parameter(&self) -> Option<f64> {
        self.parameter
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::from_matrix(self.matrix.inverse())
    }

    /// The repelling and attracting fixed points `(P, Q) = (−e_axis, +e_axis)`
    /// of a canonical map.
    pub fn fixed_points(&self) -> Option<(SpherePoint, SpherePoint)> {
        let axis = self.axis?;
        let n = self.dim();
        Some((
            SpherePoint::axis_point(n, axis, -1.0),
            SpherePoint::axis_point(n, axis, 1.0),
        ))
    }

    pub fn to_contact_map(&self) -> ContactMap {
        ContactMap::moebius(self.clone())
    }

    fn denominator(&self, z: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        let (u0, u) = lift_apply(&self.matrix.entries, z);
        // On the sphere |u₀| ≥ |M₀₀| − ‖M₀,rest‖ > 0 (for M_a this is 2a²/(2a)).
        // Off by more than rounding means z left the sphere.
        let slack = 1e-9 * self.matrix.entries[(0, 0)].norm();
        assert!(
            u0.norm() >= self.floor - slack && u0.norm() > 0.0,
            "Möbius denominator {} below its lower bound {} (input off the sphere?)",
            u0.norm(),
            self.floor
        );
        (u0, u)
    }

    pub(crate) fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (u0, u) = self.denominator(z);
        let w: Vec<Complex64> = u.into_iter().map(|x| x / u0).collect();
        crate::maps::normalized(w)
    }

    /// Image and quotient-rule derivative `(B v ℓ − L (γ·v)) / ℓ²`, where
    /// `ℓ = u₀`, `L = (u₁, …, u_n)`, `B` the lower-right block and `γ` the
    /// top row of the matrix.
    pub(crate) fn push(&self, z: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = z.len();
        let m = &self.matrix.entries;
        let (l, big_l) = self.denominator(z);
        let gamma_v: Complex64 = (0..n).map(|j| m[(0, j + 1)] * v[j]).sum();
        let l2 = l * l;
        let du: Vec<Complex64> = (0..n)
            .map(|i| {
                let bv: Complex64 = (0..n).map(|j| m[(i + 1, j + 1)] * v[j]).sum();
                (bv * l - big_l[i] * gamma_v) / l2
            })
            .collect();
        let w = crate::maps::normalized(big_l.iter().map(|x| x / l).collect());
        // The derivative is tangent at w in exact arithmetic; remove rounding.
        let normal = hermitian(&du, &w).re;
        let du = du.iter().zip(&w).map(|(d, wi)| d - wi * normal).collect();
        (w, du)
    }

    /// Complex derivative `dΦ_z` as an `n × n` matrix.
    pub fn complex_derivative(&self, z: &SpherePoint) -> DMatrix<Complex64> {
        let n = z.dim();
        let m = &self.matrix.entries;
        let (l, big_l) = self.denominator(z.coords());
        DMatrix::from_fn(n, n, |i, j| {
            (m[(i + 1, j + 1)] * l - big_l[i] * m[(0, j + 1)]) / (l * l)
        })
    }
}

/// The tangent map of a Möbius map at `z`, from the quotient rule.
pub fn moebius_jacobian(phi: &MoebiusMap, z: &SpherePoint) -> TangentMap {
    let frame = tangent_frame(z);
    let mut image = None;
    let columns = frame
        .iter()
        .map(|v| {
            let (w, u) = phi.push(z.coords(), v.vec());
            let w = SpherePoint::new(w).expect("image on the sphere");
            image.get_or_insert_with(|| w.clone());
            TangentVector::project(w, &u)
        })
        .collect();
    TangentMap {
        base: z.clone(),
        image: image.expect("frame is nonempty"),
        frame,
        columns,
    }
}

/// Eigenvalues of `dφ` at a fixed point on the Reeb line and on the contact
/// hyperplane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSpectrum {
    pub point: SpherePoint,
    pub reeb_multiplier: f64,
    pub contact_multiplier: f64,
}

const SPECTRUM_TOL: f64 = 1e-8;

fn spectrum_at(phi: &MoebiusMap, point: SpherePoint) -> Result<FixedPointSpectrum> {
    let image = phi.to_contact_map().apply(&point);
    let drift = crate::sphere::ambient_distance(&image, &point);
    if drift > SPECTRUM_TOL {
        return Err(ContactError::Consistency(format!(
            "expected a fixed point, moved by {drift:.3e}"
        )));
    }
    let jac = moebius_jacobian(phi, &point);
    let reeb = reeb_vector(&point);
    let r_img = jac.apply(&reeb);
    let reeb_multiplier = hermitian(&r_img, reeb.vec()).re;
    let mut worst = (0..r_img.len())
        .map(|i| (r_img[i] - reeb.vec()[i] * reeb_multiplier).norm())
        .fold(0.0, f64::max);

    // On the contact hyperplane dφ must act as one real scalar.
    let contact: Vec<&TangentVector> = jac.frame[1..].iter().collect();
    let mut multipliers = Vec::with_capacity(contact.len());
    for v in &contact {
        let img = jac.apply(v);
        let lambda = hermitian(&img, v.vec()).re;
        worst = worst.max(
            img.iter()
                .zip(v.vec())
                .map(|(a, b)| (a - b * lambda).norm())
                .fold(0.0, f64::max),
        );
        multipliers.push(lambda);
    }
    let contact_multiplier = multipliers.iter().sum::<f64>() / multipliers.len() as f64;
    let spread = multipliers
        .iter()
        .map(|m| (m - contact_multiplier).abs())
        .fold(0.0, f64::max);
    let structure = (reeb_multiplier - contact_multiplier * contact_multiplier).abs();
    if worst > SPECTRUM_TOL || spread > SPECTRUM_TOL || structure > SPECTRUM_TOL {
        return Err(ContactError::Consistency(format!(
            "derivative at fixed point is not c² on the Reeb line and c on the contact plane \
             (eigvec residual {worst:.3e}, spread {spread:.3e}, |λ_R − λ_ξ²| = {structure:.3e})"
        )));
    }
    Ok(FixedPointSpectrum {
        point,
        reeb_multiplier,
        contact_multiplier,
    })
}

/// Spectra at the repelling fixed point `P` and the attracting fixed point `Q`.
pub fn fixed_point_spectrum(phi: &MoebiusMap) -> Result<(FixedPointSpectrum, FixedPointSpectrum)> {
    let (p, q) = phi.fixed_points().ok_or_else(|| {
        ContactError::Parameter("fixed_point_spectrum needs a canonical map".into())
    })?;
    Ok((spectrum_at(phi, p)?, spectrum_at(phi, q)?))
}

/// Smallest Fubini–Study separation accepted between `σ(P)` and `σ(Q)`.
pub const DEFAULT_FIBER_MARGIN: f64 = 0.5;

/// The conjugating map `σ` and the focal pair it produces.
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub moebius: MoebiusMap,
    pub map: ContactMap,
    /// `σ(P)`, the new repelling point.
    pub p: SpherePoint,
    /// `σ(Q)`, the new attracting point.
    pub q: SpherePoint,
    pub fiber_distance: f64,
}

/// `σ = φ_b` along axis 2, with the default fibre margin.
pub fn build_conjugator(b: f64, n: usize) -> Result<Conjugator> {
    build_conjugator_with_margin(b, n, DEFAULT_FIBER_MARGIN)
}

/// `σ = φ_b` along axis 2; fails unless `σ(P)` and `σ(Q)` lie on Hopf fibres
/// more than `margin` radians apart.
pub fn build_conjugator_with_margin(b: f64, n: usize, margin: f64) -> Result<Conjugator> {
    if n < 2 {
        return Err(ContactError::Parameter(
            "conjugator needs n >= 2 (on S^1 every pair shares a fibre)".into(),
        ));
    }
    let moebius = MoebiusMap::canonical(b, n, 2)?;
    let map = moebius.to_contact_map();
    let p = map.apply(&SpherePoint::axis_point(n, 1, -1.0));
    let q = map.apply(&SpherePoint::axis_point(n, 1, 1.0));
    let fd = fiber_distance(&p, &q).value();
    if fd <= margin {
        return Err(ContactError::Parameter(format!(
            "sigma(P), sigma(Q) are only {fd:.4} rad apart in CP^(n-1); need > {margin}"
        )));
    }
    Ok(Conjugator {
        moebius,
        map,
        p,
        q,
        fiber_distance: fd,
    })
}

/// Offset from `a = 1` used for the first map of the isotopy path.
pub const ISOTOPY_START_OFFSET: f64 = 1e-6;

/// `φ_{a(t)}` for `a(t)` linear from `1 − 1e−6` down to `a_end`.
pub fn isotopy_path(a_end: f64, steps: usize, n: usize) -> Result<Vec<MoebiusMap>> {
    if !(a_end > 0.0 && a_end < 1.0 - ISOTOPY_START_OFFSET) {
        return Err(ContactError::Parameter(format!(
            "a_end = {a_end} is not in (0, 1)"
        )));
    }
    if steps < 2 {
        return Err(ContactError::Parameter("isotopy_path needs steps >= 2".into()));
    }
    let start = 1.0 - ISOTOPY_START_OFFSET;
    (0..steps)
        .map(|i| {
            let a = if i == steps - 1 {
                a_end
            } else {
                start + (a_end - start) * i as f64 / (steps - 1) as f64
            };
            MoebiusMap::canonical(a, n, 1)
        })
        .collect()
}

/// Closed-form scaling factor `−2 ln |u₀(z)|` of a projective map.
pub fn closed_form_scaling(phi: &MoebiusMap, z: &SpherePoint) -> f64 {
    let (u0, _) = lift_apply(&phi.matrix.entries, z.coords());
    -2.0 * u0.norm().ln()
}

/// `α_{φ(z)}(dφ_z R_z)` for a Möbius map; the Reeb stretch `e^{g(z)}`.
pub fn reeb_stretch(phi: &MoebiusMap, z: &SpherePoint) -> f64 {
    let r = reeb_vector(z);
    let (w, u) = phi.push(z.coords(), r.vec());
    alpha(&w, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::scaling_factor;
    use crate::sphere::{ambient_distance, sample_sphere};
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_matrix_half() {
        let m = canonical_matrix(0.5, 2, 1).unwrap();
        let expect = [[1.25, 0.75, 0.0], [0.75, 1.25, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.entries()[(i, j)], c(expect[i][j]));
            }
        }
        assert!(m.eta_residual() <= 1e-15);
    }

    #[test]
    fn power_and_conjugation_match_composites() {
        let phi = MoebiusMap::canonical(0.5, 2, 1).unwrap();
        let sigma = MoebiusMap::canonical(0.5, 2, 2).unwrap();
        let psi = phi.conjugated_by(&sigma);
        let composite = crate::maps::conjugate(&phi.to_contact_map(), &sigma.to_contact_map()).unwrap();
        let psi5 = psi.power(5).to_contact_map();
        let iter5 = crate::maps::iterate(&composite, 5);
        for z in sample_sphere(2, 50, 8) {
            assert!(ambient_distance(&psi.to_contact_map().apply(&z), &composite.apply(&z)) < 1e-14);
            assert!(ambient_distance(&psi5.apply(&z), &iter5.apply(&z)) < 1e-13);
        }
        assert_eq!(phi.power(0).matrix(), &SignatureMatrix::identity(2));
    }

    #[test]
    fn canonical_matrix_rejects_bad_parameters() {
        for a in [0.0, 1.0, -0.3, 1.5, f64::NAN] {
            assert!(matches!(canonical_matrix(a, 2, 1), Err(ContactError::Parameter(_))));
        }
        assert!(canonical_matrix(0.5, 2, 3).is_err());
        assert!(canonical_matrix(0.5, 2, 0).is_err());
    }

    #[test]
    fn canonical_matrix_tends_to_identity() {
        let m = canonical_matrix(1.0 - 1e-7, 3, 2).unwrap();
        let dist = (m.entries() - DMatrix::<Complex64>::identity(4, 4))
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(dist <= 1e-6);
    }

    #[test]
    fn signature_matrix_rejects_non_members() {
        let mut m = DMatrix::<Complex64>::identity(3, 3);
        m[(0, 1)] = c(0.5);
        assert!(matches!(
            SignatureMatrix::new(m),
            Err(ContactError::NotInUnitaryGroup(_))
        ));
    }

    #[test]
    fn projective_examples() {
        let m = canonical_matrix(0.5, 2, 1).unwrap();
        let z = SpherePoint::axis_point(2, 2, 1.0);
        let w = apply_projective(&m, &z).unwrap();
        assert_abs_diff_eq!(w.coords()[0].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(w.coords()[1].re, 0.8, epsilon = 1e-15);
        for sign in [-1.0, 1.0] {
            let fixed = SpherePoint::axis_point(2, 1, sign);
            assert!(ambient_distance(&apply_projective(&m, &fixed).unwrap(), &fixed) < 1e-15);
        }
        let id = SignatureMatrix::identity(2);
        for z in sample_sphere(2, 10, 3) {
            assert!(ambient_distance(&apply_projective(&id, &z).unwrap(), &z) < 1e-15);
        }
    }

    #[test]
    fn projective_rejects_off_cone_denominator() {
        // A non-U(n,1) matrix whose first row kills (1, −1, 0).
        let mut e = DMatrix::<Complex64>::identity(3, 3);
        e[(0, 1)] = c(1.0);
        let m = SignatureMatrix { entries: e };
        let z = SpherePoint::axis_point(2, 1, -1.0);
        assert!(matches!(
            apply_projective(&m, &z),
            Err(ContactError::VanishingDenominator(_))
        ));
    }

    #[test]
    fn axis_permutation_matches_swapped_coordinates() {
        let phi1 = MoebiusMap::canonical(0.4, 3, 1).unwrap().to_contact_map();
        let phi3 = MoebiusMap::canonical(0.4, 3, 3).unwrap().to_contact_map();
        for z in sample_sphere(3, 20, 8) {
            let mut swapped = z.coords().to_vec();
            swapped.swap(0, 2);
            let zs = SpherePoint::new(swapped).unwrap();
            let mut a = phi1.apply(&zs).coords().to_vec();
            a.swap(0, 2);
            let b = phi3.apply(&z);
            assert!(crate::sphere::chordal(&a, b.coords()) < 1e-14);
        }
    }

    #[test]
    fn spectrum_half() {
        let phi = MoebiusMap::canonical(0.5, 2, 1).unwrap();
        let (p, q) = fixed_point_spectrum(&phi).unwrap();
        assert_abs_diff_eq!(p.reeb_multiplier, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.contact_multiplier, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.reeb_multiplier, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(q.contact_multiplier, 0.5, epsilon = 1e-12);

        let map = phi.to_contact_map();
        let gp = scaling_factor(&map, &p.point).unwrap().value();
        let gq = scaling_factor(&map, &q.point).unwrap().value();
        assert_abs_diff_eq!(gp, 2.0 * 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(gq, 2.0 * 0.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn spectrum_point_nine_and_higher_dimension() {
        let phi = MoebiusMap::canonical(0.9, 2, 1).unwrap();
        let (p, _) = fixed_point_spectrum(&phi).unwrap();
        assert_abs_diff_eq!(p.reeb_multiplier, 1.0 / 0.81, epsilon = 1e-10);
        assert_abs_diff_eq!(p.contact_multiplier, 1.0 / 0.9, epsilon = 1e-10);
        let phi = MoebiusMap::canonical(0.3, 4, 2).unwrap();
        let (p, q) = fixed_point_spectrum(&phi).unwrap();
        assert_abs_diff_eq!(p.contact_multiplier, 1.0 / 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(q.reeb_multiplier, 0.09, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_requires_canonical() {
        let m = MoebiusMap::from_matrix(canonical_matrix(0.5, 2, 1).unwrap());
        assert!(fixed_point_spectrum(&m).is_err());
    }

    #[test]
    fn conjugator_half() {
        let s = build_conjugator(0.5, 2).unwrap();
        let p = s.p.coords();
        let q = s.q.coords();
        assert_abs_diff_eq!(p[0].re, -0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(q[0].re, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(q[1].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s.fiber_distance, (7.0f64 / 25.0).acos(), epsilon = 1e-12);
        assert!(s.fiber_distance > DEFAULT_FIBER_MARGIN);
    }

    #[test]
    fn conjugator_fails_near_identity() {
        assert!(matches!(
            build_conjugator(0.999, 2),
            Err(ContactError::Parameter(_))
        ));
        assert!(build_conjugator(0.5, 1).is_err());
    }

    #[test]
    fn closed_form_agrees_with_reeb_normalization() {
        let phi = MoebiusMap::canonical(0.35, 3, 2).unwrap();
        for z in sample_sphere(3, 50, 6) {
            let direct = reeb_stretch(&phi, &z).ln();
            assert_abs_diff_eq!(direct, closed_form_scaling(&phi, &z), epsilon = 1e-12);
        }
    }

    #[test]
    fn isotopy_endpoints() {
        let path = isotopy_path(0.5, 100, 2).unwrap();
        assert_eq!(path.len(), 100);
        assert_eq!(path.last().unwrap().parameter(), Some(0.5));
        assert_eq!(path[0].parameter(), Some(1.0 - ISOTOPY_START_OFFSET));
        assert!(isotopy_path(0.5, 1, 2).is_err());
        assert!(isotopy_path(1.2, 10, 2).is_err());
    }
}
