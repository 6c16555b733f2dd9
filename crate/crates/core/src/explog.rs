//! Exponential and logarithmic maps between a group and its algebra.
//!
//! SO(3) and SE(3) get closed forms (Rodrigues' rotation formula and the
//! left-Jacobian translation coupling); every tag is also served by the
//! generic scaling-and-squaring exponential and the inverse
//! scaling-and-squaring principal logarithm. [`exp_map`] and [`log_map`]
//! dispatch to the closed forms where they exist.
//!
//! Frame convention: `exp` of an algebra element expressed in frame `F`
//! returns a group element labeled `(F, F)` (relabel with
//! [`GroupElement::with_frames`] when the motion's target frame has its own
//! name); `log` of a group element labeled `(A, B)` is expressed in `A`.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{LieError, Result};
use crate::group::{
    check_membership, membership_residual, skew3, AlgebraElement, Frame, GroupElement,
    GroupFamily, GroupTag, Twist, TAU_MEM,
};
use crate::matrix::Mat;

/// Below this rotation angle the closed-form coefficients switch to their
/// Taylor expansions to dodge `sin θ / θ`-style cancellation.
pub const EPS_SMALL: f64 = 1e-8;

/// How a rotation angle of exactly π resolves its axis-sign ambiguity.
///
/// Both modes return some ω with `exp(ω̂) = R`; they differ only in which
/// of the two opposite axes is reported, and only on the π locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBranchPolicy {
    /// Flip the axis so its first component that exceeds 1e−12 in
    /// magnitude is positive.
    #[default]
    Principal,
    /// Keep the sign produced by the largest-magnitude axis component,
    /// i.e. that component is made positive.
    LimitAtPi,
}

// ---------------------------------------------------------------------------
// Fixed-size SO(3)/SE(3) kernels
// ---------------------------------------------------------------------------

/// `(sin θ / θ, (1 − cos θ)/θ²)` with Taylor fallback below [`EPS_SMALL`].
/// The second coefficient uses the half-angle form `2 sin²(θ/2)/θ²`, which
/// has no cancellation at any angle.
fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < EPS_SMALL {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        let s_half = (0.5 * theta).sin() / theta;
        (theta.sin() / theta, 2.0 * s_half * s_half)
    }
}

/// `(θ − sin θ)/θ³` with Taylor fallback.
fn cubic_coefficient(theta: f64) -> f64 {
    if theta < EPS_SMALL {
        1.0 / 6.0 - theta * theta / 120.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}

/// Rodrigues' formula: `exp(ω̂) = I + (sin θ/θ) ω̂ + ((1 − cos θ)/θ²) ω̂²`.
pub(crate) fn so3_exp_mat(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let w = skew3(omega);
    let (a, b) = rodrigues_coefficients(theta);
    Matrix3::identity() + w * a + w * w * b
}

/// Left Jacobian `V = I + ((1 − cos θ)/θ²) ω̂ + ((θ − sin θ)/θ³) ω̂²`,
/// which maps the translational twist coordinate to the actual
/// translation: `p = V v`.
pub(crate) fn so3_left_jacobian(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let w = skew3(omega);
    let (_, b) = rodrigues_coefficients(theta);
    Matrix3::identity() + w * b + w * w * cubic_coefficient(theta)
}

/// Inverse left Jacobian
/// `V⁻¹ = I − ω̂/2 + (1/θ²)(1 − (θ/2)·cot(θ/2)) ω̂²`.
pub(crate) fn so3_left_jacobian_inv(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let w = skew3(omega);
    let c2 = if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half * half.cos() / half.sin()) / (theta * theta)
    };
    Matrix3::identity() - w * 0.5 + w * w * c2
}

pub(crate) fn se3_exp_mat(v: &Vector3<f64>, omega: &Vector3<f64>) -> Matrix4<f64> {
    let r = so3_exp_mat(omega);
    let p = so3_left_jacobian(omega) * v;
    let mut out = Matrix4::identity();
    out.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    out.fixed_view_mut::<3, 1>(0, 3).copy_from(&p);
    out
}

/// Unit quaternion `(w, xyz)` of a rotation matrix via the
/// largest-pivot extraction, which is numerically stable at every angle
/// including θ = π.
fn rotation_quaternion(r: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let t = r.trace();
    if t > 0.0 {
        let s = (t + 1.0).sqrt() * 2.0;
        (
            0.25 * s,
            Vector3::new(
                (r[(2, 1)] - r[(1, 2)]) / s,
                (r[(0, 2)] - r[(2, 0)]) / s,
                (r[(1, 0)] - r[(0, 1)]) / s,
            ),
        )
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        (
            (r[(2, 1)] - r[(1, 2)]) / s,
            Vector3::new(
                0.25 * s,
                (r[(0, 1)] + r[(1, 0)]) / s,
                (r[(0, 2)] + r[(2, 0)]) / s,
            ),
        )
    } else if r[(1, 1)] >= r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        (
            (r[(0, 2)] - r[(2, 0)]) / s,
            Vector3::new(
                (r[(0, 1)] + r[(1, 0)]) / s,
                0.25 * s,
                (r[(1, 2)] + r[(2, 1)]) / s,
            ),
        )
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        (
            (r[(1, 0)] - r[(0, 1)]) / s,
            Vector3::new(
                (r[(0, 2)] + r[(2, 0)]) / s,
                (r[(1, 2)] + r[(2, 1)]) / s,
                0.25 * s,
            ),
        )
    }
}

/// Rotation log with `‖ω‖ ≤ π`, resolving the θ = π axis sign by `policy`.
pub(crate) fn so3_log_vec(r: &Matrix3<f64>, policy: LogBranchPolicy) -> Vector3<f64> {
    let (mut qw, mut qv) = rotation_quaternion(r);
    if qw < 0.0 {
        qw = -qw;
        qv = -qv;
    }
    let s = qv.norm();
    if qw <= 1e-9 {
        // θ within ~2e−9 of π: the two antipodal axes are numerically
        // indistinguishable, so apply the deterministic sign convention.
        let mut axis = qv / s;
        match policy {
            LogBranchPolicy::Principal => {
                if let Some(first) = axis.iter().find(|x| x.abs() > 1e-12) {
                    if *first < 0.0 {
                        axis = -axis;
                    }
                }
            }
            LogBranchPolicy::LimitAtPi => {
                let k = (0..3).max_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs())).unwrap();
                if axis[k] < 0.0 {
                    axis = -axis;
                }
            }
        }
        let theta = 2.0 * s.atan2(qw);
        return axis * theta;
    }
    // ω = 2 atan2(s, qw)/s · qv, with the ratio expanded for small s.
    let factor = if s < 1e-9 {
        (2.0 / qw) * (1.0 - s * s / (3.0 * qw * qw))
    } else {
        2.0 * s.atan2(qw) / s
    };
    qv * factor
}

pub(crate) fn se3_log_vec(
    g: &Matrix4<f64>,
    policy: LogBranchPolicy,
) -> (Vector3<f64>, Vector3<f64>) {
    let r = g.fixed_view::<3, 3>(0, 0).into_owned();
    let p = g.fixed_view::<3, 1>(0, 3).into_owned();
    let omega = so3_log_vec(&r, policy);
    let v = so3_left_jacobian_inv(&omega) * p;
    (v, omega)
}

// ---------------------------------------------------------------------------
// Public maps
// ---------------------------------------------------------------------------

/// Exponential map via scaling-and-squaring, valid for every tag.
///
/// `exp(0) = I` exactly; the result is a group member by construction.
pub fn exp_generic(x: &AlgebraElement) -> Result<GroupElement> {
    if !x.matrix.is_finite() {
        return Err(LieError::NonFinite);
    }
    Ok(GroupElement::new_unchecked(
        x.tag,
        (x.frame.clone(), x.frame.clone()),
        x.matrix.exp(),
    ))
}

/// Closed-form SO(3) exponential (Rodrigues).
pub fn exp_closed_so3(x: &Twist, frame: Frame) -> Result<GroupElement> {
    let Twist::Rotation { omega } = x else {
        return Err(LieError::DimensionMismatch { expected: 3, found: x.as_vector().len() });
    };
    let r = so3_exp_mat(omega);
    let m = DMatrix::from_fn(3, 3, |i, j| r[(i, j)]);
    Ok(GroupElement::new_unchecked(GroupTag::so(3), (frame.clone(), frame), Mat::Real(m)))
}

/// Closed-form SE(3) exponential: rotation by Rodrigues, translation
/// through the left Jacobian; a pure translation when ω = 0.
pub fn exp_closed_se3(x: &Twist, frame: Frame) -> Result<GroupElement> {
    let Twist::Rigid { v, omega } = x else {
        return Err(LieError::DimensionMismatch { expected: 6, found: x.as_vector().len() });
    };
    let g = se3_exp_mat(v, omega);
    let m = DMatrix::from_fn(4, 4, |i, j| g[(i, j)]);
    Ok(GroupElement::new_unchecked(GroupTag::se(3), (frame.clone(), frame), Mat::Real(m)))
}

/// Closed-form SO(3) logarithm with `‖ω‖ ≤ π`.
pub fn log_closed_so3(g: &GroupElement, policy: LogBranchPolicy) -> Result<AlgebraElement> {
    expect_tag(g, GroupTag::so(3))?;
    require_membership(g)?;
    let m = g.matrix.as_real().expect("SO stores real matrices");
    let r = Matrix3::from_fn(|i, j| m[(i, j)]);
    let omega = so3_log_vec(&r, policy);
    let w = skew3(&omega);
    Ok(AlgebraElement::new_unchecked(
        g.tag,
        g.frames.0.clone(),
        Mat::Real(DMatrix::from_fn(3, 3, |i, j| w[(i, j)])),
    ))
}

/// Closed-form SE(3) logarithm: ω from the rotation block, v by applying
/// the inverse left Jacobian to the translation.
pub fn log_closed_se3(g: &GroupElement, policy: LogBranchPolicy) -> Result<AlgebraElement> {
    expect_tag(g, GroupTag::se(3))?;
    require_membership(g)?;
    let m = g.matrix.as_real().expect("SE stores real matrices");
    let h = Matrix4::from_fn(|i, j| m[(i, j)]);
    let (v, omega) = se3_log_vec(&h, policy);
    let w = skew3(&omega);
    let mut out = DMatrix::<f64>::zeros(4, 4);
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] = w[(i, j)];
        }
        out[(i, 3)] = v[i];
    }
    Ok(AlgebraElement::new_unchecked(g.tag, g.frames.0.clone(), Mat::Real(out)))
}

/// Principal matrix logarithm for any tag.
///
/// Pre-checks that the spectrum avoids the closed non-positive real axis
/// (where the principal branch is undefined), then runs inverse
/// scaling-and-squaring: repeated principal square roots until the iterate
/// is within 0.5 of the identity, the log power series, and a doubling per
/// square root taken.
pub fn log_generic(g: &GroupElement) -> Result<AlgebraElement> {
    if !g.matrix.is_finite() {
        return Err(LieError::NonFinite);
    }
    let scale = g
        .matrix
        .eigenvalues()?
        .into_iter()
        .map(|l| l.norm())
        .fold(1.0f64, f64::max);
    for lambda in g.matrix.eigenvalues()? {
        if lambda.re <= BRANCH_AXIS_TOL * scale && lambda.im.abs() <= BRANCH_AXIS_TOL * scale {
            return Err(LieError::BranchDomain { eigenvalue: (lambda.re, lambda.im) });
        }
        if lambda.re < 0.0 && lambda.im.abs() <= BRANCH_AXIS_TOL * scale {
            return Err(LieError::BranchDomain { eigenvalue: (lambda.re, lambda.im) });
        }
    }
    let x = g.matrix.log_principal()?;
    let residual = crate::group::algebra_residual(&x, &g.tag);
    if residual > TAU_MEM {
        return Err(LieError::LogEscapesAlgebra { residual });
    }
    Ok(AlgebraElement::new_unchecked(g.tag, g.frames.0.clone(), x))
}

/// Absolute tolerance (relative to the spectral radius) for deciding an
/// eigenvalue sits on the non-positive real axis.
const BRANCH_AXIS_TOL: f64 = 1e-12;

/// Partial sum of `log(g) = Σ (−1)^{k+1} (g − I)^k / k`, kept as an
/// independent oracle for the production log.
pub fn log_series_truncated(g: &GroupElement, terms: usize) -> Result<AlgebraElement> {
    if terms < 1 {
        return Err(LieError::InvalidScenario("log series needs at least one term".into()));
    }
    let distance = g.matrix.distance_from_identity();
    if distance >= 1.0 {
        return Err(LieError::OutOfConvergenceRegion { distance_from_identity: distance });
    }
    Ok(AlgebraElement::new_unchecked(
        g.tag,
        g.frames.0.clone(),
        g.matrix.log_series(terms),
    ))
}

/// Exponential dispatch: closed forms for SO(3)/SE(3), generic otherwise.
pub fn exp_map(x: &AlgebraElement) -> Result<GroupElement> {
    match (x.tag.family, x.tag.n) {
        (GroupFamily::SO, 3) => {
            let t = crate::group::vee(&x.tag, x)?;
            exp_closed_so3(&t, x.frame.clone())
        }
        (GroupFamily::SE, 3) => {
            let t = crate::group::vee(&x.tag, x)?;
            exp_closed_se3(&t, x.frame.clone())
        }
        _ => exp_generic(x),
    }
}

/// Logarithm dispatch: closed forms for SO(3)/SE(3) (which also handle the
/// θ = π locus via `policy`), generic principal log otherwise.
pub fn log_map(g: &GroupElement, policy: LogBranchPolicy) -> Result<AlgebraElement> {
    match (g.tag.family, g.tag.n) {
        (GroupFamily::SO, 3) => log_closed_so3(g, policy),
        (GroupFamily::SE, 3) => log_closed_se3(g, policy),
        _ => log_generic(g),
    }
}

fn expect_tag(g: &GroupElement, tag: GroupTag) -> Result<()> {
    if g.tag != tag {
        return Err(LieError::TagMismatch { left: g.tag, right: tag });
    }
    Ok(())
}

fn require_membership(g: &GroupElement) -> Result<()> {
    if !check_membership(&g.matrix, &g.tag, TAU_MEM) {
        return Err(LieError::NotInGroup {
            tag: g.tag,
            residual: membership_residual(&g.matrix, &g.tag),
        });
    }
    Ok(())
}
