//! Group and algebra element types with tag and frame discipline.
//!
//! A [`GroupElement`] is a square invertible matrix together with the group
//! it belongs to and the ordered pair of coordinate frames it relates. An
//! [`AlgebraElement`] is a matrix in the corresponding Lie algebra carrying
//! the single frame it is expressed in. Frame labels are checked when
//! elements are composed: `(A,B) · (B,C) -> (A,C)`, and inversion swaps the
//! pair. The checks catch transposed-argument bugs that type signatures
//! alone cannot.

use std::fmt;

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{LieError, Result};
use crate::matrix::Mat;

/// Default tolerance for group/algebra membership residuals.
pub const TAU_MEM: f64 = 1e-9;

/// Supported families of matrix Lie groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    /// Special orthogonal group: real, `gᵀg = I`, `det g = 1`.
    SO,
    /// Special Euclidean group in homogeneous form: `[R, p; 0, 1]`.
    SE,
    /// Special unitary group: complex, `g*g = I`, `det g = 1`.
    SU,
    /// Identity component of the real general linear group: `det g > 0`.
    GL0,
    /// Complex general linear group: `det g ≠ 0`.
    GLC,
}

/// A group family together with its dimension parameter `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupTag {
    pub family: GroupFamily,
    pub n: usize,
}

impl GroupTag {
    pub fn so(n: usize) -> GroupTag {
        GroupTag { family: GroupFamily::SO, n }
    }

    pub fn se(n: usize) -> GroupTag {
        GroupTag { family: GroupFamily::SE, n }
    }

    pub fn su(n: usize) -> GroupTag {
        GroupTag { family: GroupFamily::SU, n }
    }

    pub fn gl0(n: usize) -> GroupTag {
        GroupTag { family: GroupFamily::GL0, n }
    }

    pub fn glc(n: usize) -> GroupTag {
        GroupTag { family: GroupFamily::GLC, n }
    }

    /// Side length of the ambient matrix: `n + 1` for SE(n), `n` otherwise.
    pub fn matrix_dim(&self) -> usize {
        match self.family {
            GroupFamily::SE => self.n + 1,
            _ => self.n,
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.family, GroupFamily::SU | GroupFamily::GLC)
    }

    /// Dimension of the Lie algebra as a real vector space.
    pub fn algebra_dim(&self) -> usize {
        let n = self.n;
        match self.family {
            GroupFamily::SO => n * (n - 1) / 2,
            GroupFamily::SE => n * (n - 1) / 2 + n,
            GroupFamily::SU => n * n - 1,
            GroupFamily::GL0 => n * n,
            GroupFamily::GLC => 2 * n * n,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            GroupFamily::SO => write!(f, "SO({})", self.n),
            GroupFamily::SE => write!(f, "SE({})", self.n),
            GroupFamily::SU => write!(f, "SU({})", self.n),
            GroupFamily::GL0 => write!(f, "GL0({},R)", self.n),
            GroupFamily::GLC => write!(f, "GL({},C)", self.n),
        }
    }
}

/// A coordinate-frame label, e.g. `S` (world), `T` (tool), `D` (desired).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frame(pub String);

impl Frame {
    pub fn new(label: impl Into<String>) -> Frame {
        Frame(label.into())
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Coordinate vector of an so(3) or se(3) element.
///
/// The rigid variant stacks translation first: `(v, ω) ∈ ℝ⁶`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Twist {
    Rotation { omega: Vector3<f64> },
    Rigid { v: Vector3<f64>, omega: Vector3<f64> },
}

impl Twist {
    pub fn rotation(omega: Vector3<f64>) -> Twist {
        Twist::Rotation { omega }
    }

    pub fn rigid(v: Vector3<f64>, omega: Vector3<f64>) -> Twist {
        Twist::Rigid { v, omega }
    }

    /// Stacked coordinates: `ω ∈ ℝ³` or `(v, ω) ∈ ℝ⁶`.
    pub fn as_vector(&self) -> DVector<f64> {
        match self {
            Twist::Rotation { omega } => DVector::from_column_slice(omega.as_slice()),
            Twist::Rigid { v, omega } => {
                DVector::from_iterator(6, v.iter().chain(omega.iter()).copied())
            }
        }
    }

    pub fn from_vector(x: &DVector<f64>) -> Result<Twist> {
        match x.len() {
            3 => Ok(Twist::Rotation { omega: Vector3::new(x[0], x[1], x[2]) }),
            6 => Ok(Twist::Rigid {
                v: Vector3::new(x[0], x[1], x[2]),
                omega: Vector3::new(x[3], x[4], x[5]),
            }),
            other => Err(LieError::DimensionMismatch { expected: 6, found: other }),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Twist::Rotation { omega } => omega.norm(),
            Twist::Rigid { v, omega } => (v.norm_squared() + omega.norm_squared()).sqrt(),
        }
    }
}

/// The skew matrix `ω̂` with `ω̂ x = ω × x`.
pub fn skew3(omega: &Vector3<f64>) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(
        0.0, -omega.z, omega.y, //
        omega.z, 0.0, -omega.x, //
        -omega.y, omega.x, 0.0,
    )
}

/// An element of a matrix Lie group relating two frames.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupElement {
    pub tag: GroupTag,
    /// Ordered `(from, to)` pair: the element maps `to`-frame coordinates
    /// into the `from` frame.
    pub frames: (Frame, Frame),
    pub matrix: Mat,
}

impl GroupElement {
    /// Validated constructor: checks shape, finiteness, membership within
    /// [`TAU_MEM`], and that the determinant is bounded away from zero.
    pub fn new(tag: GroupTag, frames: (Frame, Frame), matrix: Mat) -> Result<GroupElement> {
        let dim = tag.matrix_dim();
        if matrix.dim() != dim {
            return Err(LieError::DimensionMismatch { expected: dim, found: matrix.dim() });
        }
        if !matrix.is_finite() {
            return Err(LieError::NonFinite);
        }
        if !check_membership(&matrix, &tag, TAU_MEM) {
            let residual = membership_residual(&matrix, &tag);
            return Err(LieError::NotInGroup { tag, residual });
        }
        let det = matrix.determinant().norm();
        if det < TAU_MEM {
            return Err(LieError::NearSingular { determinant_modulus: det });
        }
        Ok(GroupElement { tag, frames, matrix })
    }

    /// Constructor that skips the membership checks. For internal hot paths
    /// where the matrix is a product or exponential of validated inputs.
    pub fn new_unchecked(tag: GroupTag, frames: (Frame, Frame), matrix: Mat) -> GroupElement {
        GroupElement { tag, frames, matrix }
    }

    pub fn identity(tag: GroupTag, frames: (Frame, Frame)) -> GroupElement {
        let matrix = Mat::identity(tag.matrix_dim(), tag.is_complex());
        GroupElement { tag, frames, matrix }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.matrix.distance_from_identity() <= tol
    }

    /// Same matrix under new frame labels. Exponentials of algebra
    /// elements come out self-framed `(F, F)`; this assigns the pair the
    /// caller actually means.
    pub fn with_frames(mut self, frames: (Frame, Frame)) -> GroupElement {
        self.frames = frames;
        self
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            tag: GroupTag,
            frames: (Frame, Frame),
            matrix: Mat,
        }
        let raw = Raw::deserialize(deserializer)?;
        GroupElement::new(raw.tag, raw.frames, raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// An element of the Lie algebra of a tagged group, expressed in one frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraElement {
    pub tag: GroupTag,
    pub frame: Frame,
    pub matrix: Mat,
}

impl AlgebraElement {
    /// Validated constructor: checks shape, finiteness, and the algebra
    /// constraint of the tag within [`TAU_MEM`].
    pub fn new(tag: GroupTag, frame: Frame, matrix: Mat) -> Result<AlgebraElement> {
        let dim = tag.matrix_dim();
        if matrix.dim() != dim {
            return Err(LieError::DimensionMismatch { expected: dim, found: matrix.dim() });
        }
        if !matrix.is_finite() {
            return Err(LieError::NonFinite);
        }
        if !check_algebra_membership(&matrix, &tag, TAU_MEM) {
            let residual = algebra_residual(&matrix, &tag);
            return Err(LieError::NotInAlgebra { tag, residual });
        }
        Ok(AlgebraElement { tag, frame, matrix })
    }

    pub fn new_unchecked(tag: GroupTag, frame: Frame, matrix: Mat) -> AlgebraElement {
        AlgebraElement { tag, frame, matrix }
    }

    pub fn zero(tag: GroupTag, frame: Frame) -> AlgebraElement {
        let matrix = Mat::zeros(tag.matrix_dim(), tag.is_complex());
        AlgebraElement { tag, frame, matrix }
    }

    pub fn norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> AlgebraElement {
        AlgebraElement {
            tag: self.tag,
            frame: self.frame.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        if self.tag != rhs.tag {
            return Err(LieError::TagMismatch { left: self.tag, right: rhs.tag });
        }
        Ok(AlgebraElement {
            tag: self.tag,
            frame: self.frame.clone(),
            matrix: self.matrix.add(&rhs.matrix),
        })
    }

    pub fn sub(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        if self.tag != rhs.tag {
            return Err(LieError::TagMismatch { left: self.tag, right: rhs.tag });
        }
        Ok(AlgebraElement {
            tag: self.tag,
            frame: self.frame.clone(),
            matrix: self.matrix.sub(&rhs.matrix),
        })
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            tag: GroupTag,
            frame: Frame,
            matrix: Mat,
        }
        let raw = Raw::deserialize(deserializer)?;
        AlgebraElement::new(raw.tag, raw.frame, raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Group product with frame chaining: `(A,B) · (B,C) -> (A,C)`.
pub fn compose(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    if a.tag != b.tag {
        return Err(LieError::TagMismatch { left: a.tag, right: b.tag });
    }
    if a.frames.1 != b.frames.0 {
        return Err(LieError::FrameMismatch {
            expected: a.frames.1.to_string(),
            found: b.frames.0.to_string(),
        });
    }
    Ok(compose_unchecked(a, b))
}

/// Group product without tag/frame validation, for hot loops where the
/// caller has already established compatibility. Frames still chain.
pub fn compose_unchecked(a: &GroupElement, b: &GroupElement) -> GroupElement {
    GroupElement {
        tag: a.tag,
        frames: (a.frames.0.clone(), b.frames.1.clone()),
        matrix: a.matrix.mul(&b.matrix),
    }
}

/// Group inverse with frames swapped: `(A,B) -> (B,A)`.
///
/// Uses the transpose for SO(n), the conjugate transpose for SU(n), the
/// block formula `[Rᵀ, −Rᵀp; 0, 1]` for SE(n), and LU inversion for the
/// general linear families.
pub fn inverse(g: &GroupElement) -> Result<GroupElement> {
    let frames = (g.frames.1.clone(), g.frames.0.clone());
    let matrix = match g.tag.family {
        GroupFamily::SO => g.matrix.adjoint(),
        GroupFamily::SU => g.matrix.adjoint(),
        GroupFamily::SE => {
            let m = g.matrix.as_real().expect("SE stores real matrices");
            Mat::Real(se_inverse(m, g.tag.n))
        }
        GroupFamily::GL0 | GroupFamily::GLC => {
            let det = g.matrix.determinant().norm();
            if det < TAU_MEM {
                return Err(LieError::NearSingular { determinant_modulus: det });
            }
            g.matrix
                .try_inverse()
                .ok_or(LieError::NearSingular { determinant_modulus: det })?
        }
    };
    Ok(GroupElement { tag: g.tag, frames, matrix })
}

fn se_inverse(m: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let r = m.view((0, 0), (n, n));
    let p = m.view((0, n), (n, 1));
    let rt = r.transpose();
    let mut out = DMatrix::<f64>::identity(n + 1, n + 1);
    out.view_mut((0, 0), (n, n)).copy_from(&rt);
    out.view_mut((0, n), (n, 1)).copy_from(&(-(&rt * p)));
    out
}

/// Conjugation `g · X · g⁻¹`, moving an algebra element between frames.
///
/// With `g` relating `(A, B)` and `X` expressed in frame `B`, the result is
/// expressed in frame `A`. The result is verified to still satisfy the
/// algebra constraint within [`TAU_MEM`].
pub fn adjoint_conjugate(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    if g.tag != x.tag {
        return Err(LieError::TagMismatch { left: g.tag, right: x.tag });
    }
    if g.frames.1 != x.frame {
        return Err(LieError::FrameMismatch {
            expected: g.frames.1.to_string(),
            found: x.frame.to_string(),
        });
    }
    let g_inv = inverse(g)?;
    let m = g.matrix.mul(&x.matrix).mul(&g_inv.matrix);
    if !check_algebra_membership(&m, &g.tag, TAU_MEM) {
        return Err(LieError::NumericalDrift { residual: algebra_residual(&m, &g.tag) });
    }
    Ok(AlgebraElement { tag: g.tag, frame: g.frames.0.clone(), matrix: m })
}

/// Coordinate vector to algebra matrix, for SO(3) and SE(3).
///
/// `ω -> ω̂` (the skew matrix), and `(v, ω) -> [ω̂, v; 0, 0]`.
pub fn hat(tag: &GroupTag, x: &Twist, frame: Frame) -> Result<AlgebraElement> {
    match (tag.family, tag.n, x) {
        (GroupFamily::SO, 3, Twist::Rotation { omega }) => {
            let m = DMatrix::from_fn(3, 3, |i, j| skew3(omega)[(i, j)]);
            Ok(AlgebraElement { tag: *tag, frame, matrix: Mat::Real(m) })
        }
        (GroupFamily::SE, 3, Twist::Rigid { v, omega }) => {
            let mut m = DMatrix::<f64>::zeros(4, 4);
            let w = skew3(omega);
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] = w[(i, j)];
                }
                m[(i, 3)] = v[i];
            }
            Ok(AlgebraElement { tag: *tag, frame, matrix: Mat::Real(m) })
        }
        (GroupFamily::SO, 3, _) | (GroupFamily::SE, 3, _) => {
            Err(LieError::DimensionMismatch {
                expected: if tag.family == GroupFamily::SE { 6 } else { 3 },
                found: x.as_vector().len(),
            })
        }
        _ => Err(LieError::NoCanonicalCoordinates { tag: *tag }),
    }
}

/// Algebra matrix to coordinate vector; exact inverse of [`hat`].
///
/// Reads the canonical entries directly, so `vee(hat(x)) == x` with no
/// rounding. Inputs whose skew part is asymmetric beyond `TAU_MEM` are
/// rejected.
pub fn vee(tag: &GroupTag, x: &AlgebraElement) -> Result<Twist> {
    if *tag != x.tag {
        return Err(LieError::TagMismatch { left: *tag, right: x.tag });
    }
    match (tag.family, tag.n) {
        (GroupFamily::SO, 3) | (GroupFamily::SE, 3) => {}
        _ => return Err(LieError::NoCanonicalCoordinates { tag: *tag }),
    }
    if !check_algebra_membership(&x.matrix, tag, TAU_MEM) {
        return Err(LieError::NotInAlgebra {
            tag: *tag,
            residual: algebra_residual(&x.matrix, tag),
        });
    }
    // Averaging the mirrored entries is exact on true hat matrices
    // ((a − (−a))/2 = a in binary floating point) and centers any
    // sub-tolerance asymmetry on drifted ones.
    let m = x.matrix.as_real().expect("SO/SE store real matrices");
    let omega = Vector3::new(
        (m[(2, 1)] - m[(1, 2)]) * 0.5,
        (m[(0, 2)] - m[(2, 0)]) * 0.5,
        (m[(1, 0)] - m[(0, 1)]) * 0.5,
    );
    match tag.family {
        GroupFamily::SO => Ok(Twist::Rotation { omega }),
        GroupFamily::SE => {
            let v = Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]);
            Ok(Twist::Rigid { v, omega })
        }
        _ => unreachable!(),
    }
}

/// True iff `m` satisfies the defining relations of `tag`'s group within
/// `tau` (Frobenius norm on the constraint residuals, sign conditions on
/// determinants).
pub fn check_membership(m: &Mat, tag: &GroupTag, tau: f64) -> bool {
    if m.dim() != tag.matrix_dim() || !m.is_finite() {
        return false;
    }
    match tag.family {
        GroupFamily::SO => {
            let Some(r) = m.as_real() else { return false };
            orthogonality_residual(r) <= tau && r.determinant() > 0.0
        }
        GroupFamily::SE => {
            let Some(g) = m.as_real() else { return false };
            let n = tag.n;
            let mut bottom = 0.0f64;
            for j in 0..n {
                bottom += g[(n, j)] * g[(n, j)];
            }
            bottom += (g[(n, n)] - 1.0) * (g[(n, n)] - 1.0);
            let r = g.view((0, 0), (n, n)).into_owned();
            bottom.sqrt() <= tau && orthogonality_residual(&r) <= tau && r.determinant() > 0.0
        }
        GroupFamily::SU => {
            let Some(u) = m.as_complex() else { return false };
            let n = tag.n;
            let residual = (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm();
            residual <= tau && (u.determinant() - Complex64::new(1.0, 0.0)).norm() <= tau
        }
        GroupFamily::GL0 => match m.as_real() {
            Some(r) => r.determinant() > tau,
            None => false,
        },
        GroupFamily::GLC => match m.as_complex() {
            Some(c) => c.determinant().norm() > tau,
            None => false,
        },
    }
}

fn orthogonality_residual(r: &DMatrix<f64>) -> f64 {
    let n = r.nrows();
    (r.transpose() * r - DMatrix::<f64>::identity(n, n)).norm()
}

/// Constraint residual used in membership error reports; 0 for the general
/// linear families where membership is a determinant sign/size condition.
pub(crate) fn membership_residual(m: &Mat, tag: &GroupTag) -> f64 {
    match (tag.family, m.as_real(), m.as_complex()) {
        (GroupFamily::SO, Some(r), _) => orthogonality_residual(r),
        (GroupFamily::SE, Some(g), _) => {
            let n = tag.n;
            let r = g.view((0, 0), (n, n)).into_owned();
            orthogonality_residual(&r)
        }
        (GroupFamily::SU, _, Some(u)) => {
            let n = tag.n;
            (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm()
        }
        _ => 0.0,
    }
}

/// True iff `m` lies in the Lie algebra of `tag` within `tau`:
/// skew-symmetry for so(n), skew-symmetric block plus zero bottom row for
/// se(n), skew-Hermitian and traceless for su(n), anything finite for the
/// general linear algebras.
pub fn check_algebra_membership(m: &Mat, tag: &GroupTag, tau: f64) -> bool {
    if m.dim() != tag.matrix_dim() || !m.is_finite() {
        return false;
    }
    algebra_residual(m, tag) <= tau
}

pub(crate) fn algebra_residual(m: &Mat, tag: &GroupTag) -> f64 {
    match tag.family {
        GroupFamily::SO => match m.as_real() {
            Some(x) => (x + x.transpose()).norm(),
            None => f64::INFINITY,
        },
        GroupFamily::SE => match m.as_real() {
            Some(x) => {
                let n = tag.n;
                let b = x.view((0, 0), (n, n));
                let skew = (b + b.transpose()).norm();
                let mut bottom = 0.0f64;
                for j in 0..=n {
                    bottom += x[(n, j)] * x[(n, j)];
                }
                (skew * skew + bottom).sqrt()
            }
            None => f64::INFINITY,
        },
        GroupFamily::SU => match m.as_complex() {
            Some(x) => {
                let herm = (x + x.adjoint()).norm();
                let trace = x.trace().norm();
                (herm * herm + trace * trace).sqrt()
            }
            None => f64::INFINITY,
        },
        GroupFamily::GL0 => {
            if m.as_real().is_some() {
                0.0
            } else {
                f64::INFINITY
            }
        }
        GroupFamily::GLC => {
            if m.as_complex().is_some() {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

/// `(‖g − I‖_F, spectral radius of g − I)` — the two deviation metrics
/// reported by tracking runs.
pub fn identity_deviation(g: &GroupElement) -> Result<(f64, f64)> {
    let frob = g.matrix.distance_from_identity();
    let spectral = g.matrix.spectral_radius_from_identity()?;
    Ok((frob, spectral))
}

/// Project a drifted element back onto its group.
///
/// SO(n)/SU(n) use the polar factor (nearest orthogonal/unitary matrix,
/// with the SU determinant phase removed); SE(n) reprojects its rotation
/// block and pins the bottom row; the general linear families are returned
/// unchanged. Long simulations apply this periodically to bound roundoff
/// accumulation.
pub fn reproject(g: &GroupElement) -> Result<GroupElement> {
    let matrix = match g.tag.family {
        GroupFamily::SO => g.matrix.polar_factor()?,
        GroupFamily::SU => {
            let q = g.matrix.polar_factor()?;
            let u = q.as_complex().expect("SU stores complex matrices");
            // The polar factor is unitary but its determinant carries the
            // accumulated phase drift; divide out det^(1/n) to land back on
            // det = 1.
            let phase = u.determinant().arg();
            let correction = Complex64::from_polar(1.0, -phase / g.tag.n as f64);
            Mat::Complex(u * correction)
        }
        GroupFamily::SE => {
            let m = g.matrix.as_real().expect("SE stores real matrices");
            let n = g.tag.n;
            let r = m.view((0, 0), (n, n)).into_owned();
            let q = Mat::Real(r).polar_factor()?;
            let q = q.as_real().expect("polar factor of real input is real");
            let mut out = DMatrix::<f64>::identity(n + 1, n + 1);
            out.view_mut((0, 0), (n, n)).copy_from(q);
            out.view_mut((0, n), (n, 1)).copy_from(&m.view((0, n), (n, 1)));
            Mat::Real(out)
        }
        GroupFamily::GL0 | GroupFamily::GLC => g.matrix.clone(),
    };
    Ok(GroupElement { tag: g.tag, frames: g.frames.clone(), matrix })
}

/// Draw an algebra element with independent coordinates uniform in
/// `[-bound, bound]` from the caller's generator.
///
/// The coordinate basis per family: strict upper-triangle entries for
/// so(n); the same plus the translation column for se(n); upper-triangle
/// real/imaginary parts plus mean-centered imaginary diagonal for su(n);
/// all entries for the general linear algebras. Draw order is fixed
/// (row-major) so a seeded generator reproduces the same element.
pub fn random_algebra<R: Rng>(
    tag: &GroupTag,
    frame: Frame,
    bound: f64,
    rng: &mut R,
) -> AlgebraElement {
    let matrix = match tag.family {
        GroupFamily::SO => {
            let n = tag.n;
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = rng.random_range(-bound..=bound);
                    m[(i, j)] = x;
                    m[(j, i)] = -x;
                }
            }
            Mat::Real(m)
        }
        GroupFamily::SE => {
            let n = tag.n;
            let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = rng.random_range(-bound..=bound);
                    m[(i, j)] = x;
                    m[(j, i)] = -x;
                }
            }
            for i in 0..n {
                m[(i, n)] = rng.random_range(-bound..=bound);
            }
            Mat::Real(m)
        }
        GroupFamily::SU => {
            let n = tag.n;
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let re = rng.random_range(-bound..=bound);
                    let im = rng.random_range(-bound..=bound);
                    m[(i, j)] = Complex64::new(re, im);
                    m[(j, i)] = Complex64::new(-re, im);
                }
            }
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
            let mean = diag.iter().sum::<f64>() / n as f64;
            for i in 0..n {
                m[(i, i)] = Complex64::new(0.0, diag[i] - mean);
            }
            Mat::Complex(m)
        }
        GroupFamily::GL0 => {
            let n = tag.n;
            Mat::Real(DMatrix::from_fn(n, n, |_, _| rng.random_range(-bound..=bound)))
        }
        GroupFamily::GLC => {
            let n = tag.n;
            Mat::Complex(DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.random_range(-bound..=bound), rng.random_range(-bound..=bound))
            }))
        }
    };
    AlgebraElement { tag: *tag, frame, matrix }
}
