//! Contactomorphisms of the standard sphere: evaluation, tangent maps,
//! scaling factors and the algebra of composition, inversion, iteration and
//! conjugation.
//!
//! A [`ContactMap`] is an immutable expression tree over a few primitive maps
//! (identity, unitaries, projective `U(n,1)` actions and complex conjugation).
//! Every node is exactly invertible, so inverses never need root finding.
//!
//! The scaling factor `g` of `φ` (defined by `φ*α = e^g α`) is computed at
//! primitive nodes from the Reeb direction, `g(z) = ln α_{φ(z)}(dφ_z R_z)`,
//! and is propagated through composite nodes with the cocycle rule
//! `g_{φ∘ψ} = g_φ∘ψ + g_ψ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ContactError, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::{
    alpha, hermitian, norm, tangent_frame, to_real, SpherePoint, TangentVector,
};

/// Logarithmic conformal factor `g` with `φ*α = e^g α`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScalingFactor(f64);

impl ScalingFactor {
    pub fn new(value: f64) -> Self {
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Structural description of how a map was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Identity,
    Unitary,
    Moebius {
        axis: Option<usize>,
        parameter: Option<f64>,
    },
    ComplexConjugation,
    Composition {
        outer: Box<Provenance>,
        inner: Box<Provenance>,
    },
    Inverse {
        of: Box<Provenance>,
    },
    Iterate {
        base: Box<Provenance>,
        k: usize,
    },
    Conjugate {
        map: Box<Provenance>,
        by: Box<Provenance>,
    },
}

enum Node {
    Identity,
    Unitary(DMatrix<Complex64>),
    Moebius(MoebiusMap),
    /// `z ↦ z̄`: anti-contact (`φ*α = −α`), kept as a negative control.
    ComplexConjugation,
    Compose {
        outer: ContactMap,
        inner: ContactMap,
    },
    Iterate {
        base: ContactMap,
        k: usize,
    },
    Conjugate {
        map: ContactMap,
        by: ContactMap,
        by_inv: ContactMap,
    },
    Inverse {
        of: ContactMap,
        resolved: ContactMap,
    },
}

/// A smooth self-map of `S^{2n-1}` together with its exact tangent map.
#[derive(Clone)]
pub struct ContactMap {
    dim: usize,
    node: Arc<Node>,
}

impl fmt::Debug for ContactMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContactMap")
            .field("dim", &self.dim)
            .field("provenance", &self.provenance())
            .finish()
    }
}

impl ContactMap {
    fn from_node(dim: usize, node: Node) -> Self {
        Self {
            dim,
            node: Arc::new(node),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_node(n, Node::Identity)
    }

    /// Restriction of a unitary `U ∈ U(n)` to the sphere.
    pub fn unitary(u: DMatrix<Complex64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || n == 0 {
            return Err(ContactError::DimensionMismatch {
                expected: n,
                got: u.ncols(),
            });
        }
        let defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(ContactError::Parameter(format!(
                "matrix is not unitary (|U*U - I| = {defect:.3e})"
            )));
        }
        Ok(Self::from_node(n, Node::Unitary(u)))
    }

    /// The diagonal unitary `zₖ ↦ e^{i θₖ} zₖ`.
    pub fn diagonal_unitary(phases: &[f64]) -> Self {
        let n = phases.len();
        let u = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, phases[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_node(n, Node::Unitary(u))
    }

    pub fn moebius(m: MoebiusMap) -> Self {
        Self::from_node(m.dim(), Node::Moebius(m))
    }

    /// Complex conjugation `z ↦ z̄`. Orientation-reversing on the contact
    /// structure (`φ*α = −α`), so it is *not* a contactomorphism in the sense
    /// used here; useful as a negative control.
    pub fn complex_conjugation(n: usize) -> Self {
        Self::from_node(n, Node::ComplexConjugation)
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        match &*self.node {
            Node::Identity => Provenance::Identity,
            Node::Unitary(_) => Provenance::Unitary,
            Node::Moebius(m) => Provenance::Moebius {
                axis: m.axis(),
                parameter: m.parameter(),
            },
            Node::ComplexConjugation => Provenance::ComplexConjugation,
            Node::Compose { outer, inner } => Provenance::Composition {
                outer: Box::new(outer.provenance()),
                inner: Box::new(inner.provenance()),
            },
            Node::Iterate { base, k } => Provenance::Iterate {
                base: Box::new(base.provenance()),
                k: *k,
            },
            Node::Conjugate { map, by, .. } => Provenance::Conjugate {
                map: Box::new(map.provenance()),
                by: Box::new(by.provenance()),
            },
            Node::Inverse { of, .. } => Provenance::Inverse {
                of: Box::new(of.provenance()),
            },
        }
    }

    /// The underlying Möbius map, if this node is one.
    pub fn as_moebius(&self) -> Option<&MoebiusMap> {
        match &*self.node {
            Node::Moebius(m) => Some(m),
            _ => None,
        }
    }

    /// Exact inverse, built structurally.
    pub fn inverse(&self) -> ContactMap {
        let resolved = match &*self.node {
            Node::Identity => return self.clone(),
            Node::ComplexConjugation => return self.clone(),
            Node::Inverse { of, .. } => return of.clone(),
            Node::Unitary(u) => Self::from_node(self.dim, Node::Unitary(u.adjoint())),
            Node::Moebius(m) => Self::moebius(m.inverse()),
            Node::Compose { outer, inner } => Self::from_node(
                self.dim,
                Node::Compose {
                    outer: inner.inverse(),
                    inner: outer.inverse(),
                },
            ),
            Node::Iterate { base, k } => Self::from_node(
                self.dim,
                Node::Iterate {
                    base: base.inverse(),
                    k: *k,
                },
            ),
            Node::Conjugate { map, by, by_inv } => Self::from_node(
                self.dim,
                Node::Conjugate {
                    map: map.inverse(),
                    by: by.clone(),
                    by_inv: by_inv.clone(),
                },
            ),
        };
        Self::from_node(
            self.dim,
            Node::Inverse {
                of: self.clone(),
                resolved,
            },
        )
    }

    fn check_dim(&self, z: &[Complex64]) {
        assert_eq!(
            z.len(),
            self.dim,
            "point of dimension {} passed to a map on S^{}",
            z.len(),
            2 * self.dim - 1
        );
    }

    /// `φ(z)`.
    pub fn apply(&self, z: &SpherePoint) -> SpherePoint {
        self.check_dim(z.coords());
        SpherePoint::from_normalized_unchecked(self.eval(z.coords()))
    }

    /// `(φ(z), dφ_z v)`.
    pub fn pushforward(&self, v: &TangentVector) -> TangentVector {
        self.check_dim(v.vec());
        let (w, u) = self.push(v.base().coords(), v.vec());
        TangentVector::from_parts_unchecked(SpherePoint::from_normalized_unchecked(w), u)
    }

    /// `(φ(z), g(z))` in one pass; `g` follows the cocycle rule through
    /// composite nodes.
    pub fn evaluate(&self, z: &SpherePoint) -> Result<(SpherePoint, ScalingFactor)> {
        self.check_dim(z.coords());
        let (w, g) = self.eval_scaling(z.coords())?;
        Ok((SpherePoint::from_normalized_unchecked(w), ScalingFactor(g)))
    }

    /// Tangent map `dφ_z` on the orthonormal frame of [`tangent_frame`].
    pub fn jacobian(&self, z: &SpherePoint) -> TangentMap {
        let frame = tangent_frame(z);
        let mut image = None;
        let columns = frame
            .iter()
            .map(|v| {
                let out = self.pushforward(v);
                image.get_or_insert_with(|| out.base().clone());
                out
            })
            .collect();
        TangentMap {
            base: z.clone(),
            image: image.unwrap_or_else(|| self.apply(z)),
            frame,
            columns,
        }
    }

    pub(crate) fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        match &*self.node {
            Node::Identity => z.to_vec(),
            Node::Unitary(u) => normalized(mat_vec(u, z)),
            Node::Moebius(m) => m.eval(z),
            Node::ComplexConjugation => z.iter().map(|c| c.conj()).collect(),
            Node::Compose { outer, inner } => outer.eval(&inner.eval(z)),
            Node::Iterate { base, k } => {
                let mut w = z.to_vec();
                for _ in 0..*k {
                    w = base.eval(&w);
                }
                w
            }
            Node::Conjugate { map, by, by_inv } => by.eval(&map.eval(&by_inv.eval(z))),
            Node::Inverse { resolved, .. } => resolved.eval(z),
        }
    }

    pub(crate) fn push(&self, z: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        match &*self.node {
            Node::Identity => (z.to_vec(), v.to_vec()),
            Node::Unitary(u) => (normalized(mat_vec(u, z)), mat_vec(u, v)),
            Node::Moebius(m) => m.push(z, v),
            Node::ComplexConjugation => (
                z.iter().map(|c| c.conj()).collect(),
                v.iter().map(|c| c.conj()).collect(),
            ),
            Node::Compose { outer, inner } => {
                let (w, u) = inner.push(z, v);
                outer.push(&w, &u)
            }
            Node::Iterate { base, k } => {
                let (mut w, mut u) = (z.to_vec(), v.to_vec());
                for _ in 0..*k {
                    (w, u) = base.push(&w, &u);
                }
                (w, u)
            }
            Node::Conjugate { map, by, by_inv } => {
                let (w, u) = by_inv.push(z, v);
                let (w, u) = map.push(&w, &u);
                by.push(&w, &u)
            }
            Node::Inverse { resolved, .. } => resolved.push(z, v),
        }
    }

    pub(crate) fn eval_scaling(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        match &*self.node {
            Node::Identity => Ok((z.to_vec(), 0.0)),
            Node::Compose { outer, inner } => {
                let (w, g_inner) = inner.eval_scaling(z)?;
                let (w, g_outer) = outer.eval_scaling(&w)?;
                Ok((w, g_inner + g_outer))
            }
            Node::Iterate { base, k } => {
                let mut w = z.to_vec();
                let mut total = 0.0;
                for _ in 0..*k {
                    let (next, g) = base.eval_scaling(&w)?;
                    total += g;
                    w = next;
                }
                Ok((w, total))
            }
            Node::Conjugate { map, by, by_inv } => {
                let (w, g0) = by_inv.eval_scaling(z)?;
                let (w, g1) = map.eval_scaling(&w)?;
                let (w, g2) = by.eval_scaling(&w)?;
                Ok((w, g0 + g1 + g2))
            }
            Node::Inverse { resolved, .. } => resolved.eval_scaling(z),
            Node::Unitary(_) | Node::Moebius(_) | Node::ComplexConjugation => {
                let (w, g) = reeb_scaling(self, z)?;
                Ok((w, g))
            }
        }
    }
}

/// `ln α_{φ(z)}(dφ_z R_z)` through a single (possibly long) pushforward.
fn reeb_scaling(map: &ContactMap, z: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let reeb: Vec<Complex64> = z.iter().map(|c| c * Complex64::i()).collect();
    let (w, u) = map.push(z, &reeb);
    let lambda = alpha(&w, &u);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ContactError::NotOrientationPreserving(lambda));
    }
    Ok((w, lambda.ln()))
}

fn mat_vec(m: &DMatrix<Complex64>, z: &[Complex64]) -> Vec<Complex64> {
    (m * DVector::from_column_slice(z)).as_slice().to_vec()
}

pub(crate) fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let r = norm(&v);
    for c in v.iter_mut() {
        *c /= r;
    }
    v
}

/// The real-linear map `dφ_z : T_z S → T_{φ(z)} S`, stored as the images of an
/// orthonormal frame of `T_z S`.
#[derive(Clone, Debug)]
pub struct TangentMap {
    pub base: SpherePoint,
    pub image: SpherePoint,
    /// Orthonormal frame of `T_z S`, Reeb vector first.
    pub frame: Vec<TangentVector>,
    /// `dφ_z` applied to each frame vector.
    pub columns: Vec<TangentVector>,
}

impl TangentMap {
    /// `2n × (2n−1)` real matrix: columns are the frame images in interleaved
    /// real coordinates of `ℝ^{2n}`.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        let rows = 2 * self.base.dim();
        let cols: Vec<f64> = self.columns.iter().flat_map(|c| to_real(c.vec())).collect();
        DMatrix::from_column_slice(rows, self.columns.len(), &cols)
    }

    /// `√det(JᵀJ)`: the volume distortion between orthonormal frames.
    pub fn gram_determinant(&self) -> f64 {
        let j = self.real_matrix();
        (j.transpose() * &j).determinant().max(0.0).sqrt()
    }

    /// `dφ_z` applied to an arbitrary tangent vector at the base point.
    pub fn apply(&self, v: &TangentVector) -> Vec<Complex64> {
        let n = self.base.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (f, c) in self.frame.iter().zip(&self.columns) {
            let coeff = hermitian(v.vec(), f.vec()).re;
            for (o, ci) in out.iter_mut().zip(c.vec()) {
                *o += ci * coeff;
            }
        }
        out
    }
}

/// Scaling factor `g(z)` of `φ` (Reeb-normalized at primitive nodes, cocycle
/// sums through composites).
pub fn scaling_factor(map: &ContactMap, z: &SpherePoint) -> Result<ScalingFactor> {
    Ok(map.evaluate(z)?.1)
}

/// `ln α_{φ(z)}(dφ_z R_z)` evaluated through the full Jacobian chain, without
/// using the cocycle rule. Used to cross-check [`scaling_factor`].
///
/// The chain loses relative accuracy roughly like the ratio of the largest
/// to the smallest contraction rate along the orbit; for long iterates of a
/// map with distinct Reeb and contact multipliers this exceeds `1/ε` and the
/// result is meaningless (or an error when the sign is lost).
pub fn scaling_factor_direct(map: &ContactMap, z: &SpherePoint) -> Result<ScalingFactor> {
    map.check_dim(z.coords());
    Ok(ScalingFactor(reeb_scaling(map, z.coords())?.1))
}

/// Largest relative deviation from `(φ*α)_z = e^{g(z)} α_z` over a tangent basis.
///
/// The conformal factor is taken as `|α_{φ(z)}(dφ_z R_z)|`, so an
/// orientation-reversing map (`φ*α = −e^g α`) produces a residual of order
/// `e^g` instead of an error.
pub fn verify_contact(map: &ContactMap, z: &SpherePoint, basis: &[TangentVector]) -> Result<f64> {
    let n = z.dim();
    if map.dim() != n {
        return Err(ContactError::DimensionMismatch {
            expected: map.dim(),
            got: n,
        });
    }
    if basis.len() != 2 * n - 1 {
        return Err(ContactError::DegenerateBasis(0.0));
    }
    for v in basis {
        crate::sphere::contact_form(z, v)?;
    }
    let cols: Vec<f64> = basis.iter().flat_map(|v| to_real(v.vec())).collect();
    let b = DMatrix::from_column_slice(2 * n, basis.len(), &cols);
    let sv = b.singular_values();
    let (smin, smax) = sv
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if !(smin > 1e-8 * smax.max(1e-300)) {
        return Err(ContactError::DegenerateBasis(smin));
    }

    let reeb: Vec<Complex64> = z.coords().iter().map(|c| c * Complex64::i()).collect();
    let (w, u) = map.push(z.coords(), &reeb);
    let conformal = alpha(&w, &u).abs();
    let mut residual = 0.0f64;
    for v in basis {
        let (w, u) = map.push(z.coords(), v.vec());
        let lhs = alpha(&w, &u);
        let rhs = conformal * alpha(z.coords(), v.vec());
        residual = residual.max((lhs - rhs).abs() / (1.0 + alpha(z.coords(), v.vec()).abs()));
    }
    Ok(residual)
}

/// `φ ∘ ψ`.
pub fn compose(phi: &ContactMap, psi: &ContactMap) -> Result<ContactMap> {
    if phi.dim() != psi.dim() {
        return Err(ContactError::DimensionMismatch {
            expected: phi.dim(),
            got: psi.dim(),
        });
    }
    Ok(ContactMap::from_node(
        phi.dim(),
        Node::Compose {
            outer: phi.clone(),
            inner: psi.clone(),
        },
    ))
}

/// `φ_k = φ ∘ ⋯ ∘ φ` (`k` factors); `k = 0` is the identity.
pub fn iterate(phi: &ContactMap, k: usize) -> ContactMap {
    match k {
        0 => ContactMap::identity(phi.dim()),
        1 => phi.clone(),
        _ => ContactMap::from_node(
            phi.dim(),
            Node::Iterate {
                base: phi.clone(),
                k,
            },
        ),
    }
}

/// `g_k(z) = Σ_{j<k} g(φ_j(z))`, accumulated along the forward orbit.
pub fn cocycle_scaling(phi: &ContactMap, k: usize, z: &SpherePoint) -> Result<ScalingFactor> {
    if k == 0 {
        return Err(ContactError::Parameter("cocycle_scaling needs k >= 1".into()));
    }
    phi.check_dim(z.coords());
    let mut w = z.coords().to_vec();
    let mut total = 0.0;
    for _ in 0..k {
        let (next, g) = phi.eval_scaling(&w)?;
        total += g;
        w = next;
    }
    Ok(ScalingFactor(total))
}

/// `σ ∘ φ ∘ σ⁻¹`.
pub fn conjugate(phi: &ContactMap, sigma: &ContactMap) -> Result<ContactMap> {
    if phi.dim() != sigma.dim() {
        return Err(ContactError::DimensionMismatch {
            expected: phi.dim(),
            got: sigma.dim(),
        });
    }
    Ok(ContactMap::from_node(
        phi.dim(),
        Node::Conjugate {
            map: phi.clone(),
            by: sigma.clone(),
            by_inv: sigma.inverse(),
        },
    ))
}

/// `|det dφ_z|` between orthonormal frames, `√det(JᵀJ)`; equals `e^{n g(z)}`
/// for a contactomorphism.
pub fn volume_distortion(map: &ContactMap, z: &SpherePoint) -> f64 {
    map.jacobian(z).gram_determinant()
}
