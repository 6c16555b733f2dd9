//! Kinematic chain control: product-of-exponentials forward kinematics,
//! spatial Jacobian, Cartesian-to-joint velocity mapping, and a
//! closed-loop arm tracking run.
//!
//! The chain is described by its joint twists at zero configuration plus
//! the zero-configuration tool pose. Joint integration is explicit Euler
//! on the angle vector — matching a velocity-command hardware interface —
//! so a running loop carries an O(dt) defect relative to the ideal
//! group-valued plant.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Deserialize;

use crate::control::{
    control_law, reference_body_velocity_discrete, tracking_error, ControllerConfig,
};
use crate::error::{LieError, Result};
use crate::explog::exp_closed_se3;
use crate::group::{
    adjoint_conjugate, compose, hat, identity_deviation, vee, AlgebraElement, Frame,
    GroupElement, GroupTag, Twist,
};
use crate::matrix::Mat;
use crate::sim::{ReferenceTrajectory, SimRecord, SimRow, DEFAULT_REPROJECT_EVERY};

/// Smallest singular value tolerated by the undamped velocity mapping.
pub const SIGMA_MIN: f64 = 1e-4;

const UNIT_AXIS_TOL: f64 = 1e-9;

/// Joint twist for a revolute axis `omega` through the point `q`:
/// `(q × ω, ω)`.
pub fn revolute_joint_twist(axis: Vector3<f64>, point: Vector3<f64>) -> Twist {
    Twist::rigid(point.cross(&axis), axis)
}

/// Joint twist for a prismatic direction: `(v, 0)`.
pub fn prismatic_joint_twist(axis: Vector3<f64>) -> Twist {
    Twist::rigid(axis, Vector3::zeros())
}

/// An open kinematic chain in product-of-exponentials form.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicChain {
    /// Spatial joint twists at zero configuration, base to tool.
    pub joint_twists: Vec<Twist>,
    /// Tool pose at zero configuration, frames `(S, T)`.
    pub g_st0: GroupElement,
    /// Optional per-joint angle bounds in radians.
    pub joint_limits: Option<Vec<(f64, f64)>>,
}

impl KinematicChain {
    pub fn new(
        joint_twists: Vec<Twist>,
        g_st0: GroupElement,
        joint_limits: Option<Vec<(f64, f64)>>,
    ) -> Result<KinematicChain> {
        if joint_twists.is_empty() {
            return Err(LieError::InvalidScenario("a chain needs at least one joint".into()));
        }
        if g_st0.tag != GroupTag::se(3) {
            return Err(LieError::TagMismatch { left: g_st0.tag, right: GroupTag::se(3) });
        }
        for (i, twist) in joint_twists.iter().enumerate() {
            let Twist::Rigid { v, omega } = twist else {
                return Err(LieError::DimensionMismatch { expected: 6, found: 3 });
            };
            let revolute = (omega.norm() - 1.0).abs() <= UNIT_AXIS_TOL;
            let prismatic = omega.norm() <= UNIT_AXIS_TOL && (v.norm() - 1.0).abs() <= UNIT_AXIS_TOL;
            if !revolute && !prismatic {
                return Err(LieError::InvalidScenario(format!(
                    "joint {i} twist must carry a unit rotation axis or be a unit prismatic direction"
                )));
            }
        }
        if let Some(limits) = &joint_limits {
            if limits.len() != joint_twists.len() {
                return Err(LieError::DimensionMismatch {
                    expected: joint_twists.len(),
                    found: limits.len(),
                });
            }
            for (i, (lo, hi)) in limits.iter().enumerate() {
                let ordered = lo.is_finite() && hi.is_finite() && lo < hi;
                if !ordered {
                    return Err(LieError::InvalidScenario(format!(
                        "joint {i} limits must satisfy lo < hi, got ({lo}, {hi})"
                    )));
                }
            }
        }
        Ok(KinematicChain { joint_twists, g_st0, joint_limits })
    }

    pub fn n_joints(&self) -> usize {
        self.joint_twists.len()
    }

    pub fn base_frame(&self) -> &Frame {
        &self.g_st0.frames.0
    }

    pub fn within_limits(&self, theta: &DVector<f64>) -> bool {
        match &self.joint_limits {
            None => true,
            Some(limits) => limits
                .iter()
                .zip(theta.iter())
                .all(|((lo, hi), th)| lo <= th && th <= hi),
        }
    }

    /// Parse a chain fixture of the form
    /// `{"joints": [{"type": "revolute", "axis": [..], "point": [..]}, ...],
    ///   "tool_zero_pose": [[..4 rows of 4..]]}`.
    /// Axes must arrive unit-normalized; frames default to `S` and `T`.
    pub fn from_json_str(text: &str) -> Result<KinematicChain> {
        #[derive(Deserialize)]
        struct JointFixture {
            #[serde(rename = "type")]
            kind: String,
            axis: [f64; 3],
            #[serde(default)]
            point: [f64; 3],
        }
        #[derive(Deserialize)]
        struct ChainFixture {
            joints: Vec<JointFixture>,
            tool_zero_pose: serde_json::Value,
            #[serde(default)]
            joint_limits: Option<Vec<(f64, f64)>>,
        }
        let fixture: ChainFixture = serde_json::from_str(text)
            .map_err(|e| LieError::InvalidScenario(format!("chain fixture does not parse: {e}")))?;
        let mut joint_twists = Vec::with_capacity(fixture.joints.len());
        for joint in &fixture.joints {
            let axis = Vector3::from(joint.axis);
            let twist = match joint.kind.as_str() {
                "revolute" => revolute_joint_twist(axis, Vector3::from(joint.point)),
                "prismatic" => prismatic_joint_twist(axis),
                other => {
                    return Err(LieError::InvalidScenario(format!(
                        "unknown joint type {other:?}"
                    )))
                }
            };
            joint_twists.push(twist);
        }
        let pose = Mat::from_json(&fixture.tool_zero_pose)
            .map_err(|e| LieError::InvalidScenario(format!("bad tool_zero_pose: {e}")))?;
        let g_st0 = GroupElement::new(GroupTag::se(3), (Frame::new("S"), Frame::new("T")), pose)?;
        KinematicChain::new(joint_twists, g_st0, fixture.joint_limits)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<KinematicChain> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            LieError::InvalidScenario(format!("cannot read chain fixture {}: {e}", path.display()))
        })?;
        KinematicChain::from_json_str(&text)
    }

    /// Synthetic 7-DOF arm with alternating roll/pitch axes, shoulder
    /// lifted 0.3 above the base, links reaching to x = 1.1 at zero
    /// configuration. The zero configuration itself is a stretched-arm
    /// singularity; use [`default_home_angles`] for a regular start.
    pub fn default_seven_dof() -> KinematicChain {
        let z = Vector3::z();
        let y = Vector3::y();
        let x = Vector3::x();
        let joints = vec![
            revolute_joint_twist(z, Vector3::new(0.0, 0.0, 0.3)),
            revolute_joint_twist(y, Vector3::new(0.1, 0.0, 0.3)),
            revolute_joint_twist(x, Vector3::new(0.3, 0.0, 0.3)),
            revolute_joint_twist(y, Vector3::new(0.5, 0.0, 0.3)),
            revolute_joint_twist(x, Vector3::new(0.7, 0.0, 0.3)),
            revolute_joint_twist(y, Vector3::new(0.9, 0.0, 0.3)),
            revolute_joint_twist(x, Vector3::new(1.0, 0.0, 0.3)),
        ];
        let mut pose = DMatrix::<f64>::identity(4, 4);
        pose[(0, 3)] = 1.1;
        pose[(2, 3)] = 0.3;
        let g_st0 = GroupElement::new_unchecked(
            GroupTag::se(3),
            (Frame::new("S"), Frame::new("T")),
            Mat::Real(pose),
        );
        KinematicChain { joint_twists: joints, g_st0, joint_limits: None }
    }
}

/// Elbow-bent start for the default chain, comfortably away from the
/// stretched-arm singularity.
pub fn default_home_angles() -> DVector<f64> {
    DVector::from_column_slice(&[0.2, 0.5, 0.1, -0.9, 0.2, 0.7, 0.1])
}

/// Joint-space state of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub theta: DVector<f64>,
    pub theta_dot: DVector<f64>,
}

impl JointState {
    pub fn new(
        chain: &KinematicChain,
        theta: DVector<f64>,
        theta_dot: DVector<f64>,
    ) -> Result<JointState> {
        let n = chain.n_joints();
        if theta.len() != n {
            return Err(LieError::DimensionMismatch { expected: n, found: theta.len() });
        }
        if theta_dot.len() != n {
            return Err(LieError::DimensionMismatch { expected: n, found: theta_dot.len() });
        }
        Ok(JointState { theta, theta_dot })
    }

    pub fn at_rest(chain: &KinematicChain, theta: DVector<f64>) -> Result<JointState> {
        let n = chain.n_joints();
        JointState::new(chain, theta, DVector::zeros(n))
    }
}

fn scale_twist(t: &Twist, s: f64) -> Twist {
    match t {
        Twist::Rotation { omega } => Twist::rotation(omega * s),
        Twist::Rigid { v, omega } => Twist::rigid(v * s, omega * s),
    }
}

fn check_dims(chain: &KinematicChain, theta: &DVector<f64>) -> Result<()> {
    if theta.len() != chain.n_joints() {
        return Err(LieError::DimensionMismatch {
            expected: chain.n_joints(),
            found: theta.len(),
        });
    }
    Ok(())
}

/// Tool pose `exp(ξ̂₁θ₁)·…·exp(ξ̂ₙθₙ)·g_st0`, frames `(S, T)`.
pub fn forward_kinematics(chain: &KinematicChain, theta: &DVector<f64>) -> Result<GroupElement> {
    check_dims(chain, theta)?;
    let s = chain.base_frame().clone();
    let mut partial = GroupElement::identity(GroupTag::se(3), (s.clone(), s.clone()));
    for (twist, th) in chain.joint_twists.iter().zip(theta.iter()) {
        let step = exp_closed_se3(&scale_twist(twist, *th), s.clone())?;
        partial = compose(&partial, &step)?;
    }
    compose(&partial, &chain.g_st0)
}

/// Spatial Jacobian: column `i` is the i-th joint twist transported by
/// the partial product of the preceding joints, so `V̂ˢ = (J θ̇)^∧` along
/// the forward-kinematics flow.
pub fn spatial_jacobian(chain: &KinematicChain, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_dims(chain, theta)?;
    let s = chain.base_frame().clone();
    let tag = GroupTag::se(3);
    let mut partial = GroupElement::identity(tag, (s.clone(), s.clone()));
    let mut j = DMatrix::<f64>::zeros(6, chain.n_joints());
    for (i, (twist, th)) in chain.joint_twists.iter().zip(theta.iter()).enumerate() {
        let xi = hat(&tag, twist, s.clone())?;
        let transported = if i == 0 { xi.clone() } else { adjoint_conjugate(&partial, &xi)? };
        let col = vee(&tag, &transported)?.as_vector();
        j.set_column(i, &col);
        let step = exp_closed_se3(&scale_twist(twist, *th), s.clone())?;
        partial = compose(&partial, &step)?;
    }
    Ok(j)
}

/// Spatial twist of the body velocity: `Vˢ = (g V̂ᵇ g⁻¹)∨`.
pub fn body_to_spatial(g_st: &GroupElement, vb: &AlgebraElement) -> Result<Twist> {
    let vs = adjoint_conjugate(g_st, vb)?;
    vee(&g_st.tag, &vs)
}

/// Map a commanded spatial twist to joint velocities.
///
/// With `damping = 0` this is the SVD pseudoinverse `θ̇ = J†Vˢ` — the
/// minimum-norm exact solution when the chain is redundant — guarded by
/// [`SIGMA_MIN`]. With `damping = λ > 0` it is the damped least-squares
/// solution `θ̇ = Jᵀ(JJᵀ + λ²I)⁻¹Vˢ`, finite at singularities.
pub fn joint_velocity_command(
    j: &DMatrix<f64>,
    vs: &Twist,
    damping: f64,
) -> Result<DVector<f64>> {
    if j.nrows() != 6 {
        return Err(LieError::DimensionMismatch { expected: 6, found: j.nrows() });
    }
    let b = vs.as_vector();
    if b.len() != 6 {
        return Err(LieError::DimensionMismatch { expected: 6, found: b.len() });
    }
    if !(damping >= 0.0 && damping.is_finite()) {
        return Err(LieError::InvalidScenario(format!(
            "damping must be non-negative and finite, got {damping}"
        )));
    }
    if damping == 0.0 {
        let svd = j.clone().svd(true, true);
        let sigma_min = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if sigma_min < SIGMA_MIN {
            return Err(LieError::NearSingularity { sigma_min });
        }
        svd.solve(&b, SIGMA_MIN * 1e-3)
            .map_err(|_| LieError::IterationFailed { kernel: "jacobian svd" })
    } else {
        let n = j.nrows();
        let a = j * j.transpose() + DMatrix::identity(n, n) * (damping * damping);
        let y = a
            .clone()
            .cholesky()
            .map(|c| c.solve(&b))
            .or_else(|| a.lu().solve(&b))
            .ok_or(LieError::IterationFailed { kernel: "damped least squares" })?;
        Ok(j.transpose() * y)
    }
}

/// Translation column of an SE(3) pose.
pub fn tool_position(g: &GroupElement) -> [f64; 3] {
    [g.matrix.entry(0, 3).re, g.matrix.entry(1, 3).re, g.matrix.entry(2, 3).re]
}

/// Pose samples for a helix with fixed orientation: the rotation stays at
/// the start pose's value while the translation follows a circle of
/// `radius` at `angular_rate`, climbing at `climb_rate`, passing through
/// the start position at t = 0. Returns a sampled reference labeled
/// `(start.frames.0, desired)`.
pub fn helix_reference_about(
    start: &GroupElement,
    desired: Frame,
    radius: f64,
    angular_rate: f64,
    climb_rate: f64,
    count: usize,
    dt: f64,
) -> Result<ReferenceTrajectory> {
    if start.tag != GroupTag::se(3) {
        return Err(LieError::TagMismatch { left: start.tag, right: GroupTag::se(3) });
    }
    for (name, value) in [("radius", radius), ("angular_rate", angular_rate), ("climb_rate", climb_rate), ("dt", dt)] {
        if !value.is_finite() {
            return Err(LieError::InvalidScenario(format!("{name} must be finite, got {value}")));
        }
    }
    let base = start
        .matrix
        .as_real()
        .expect("SE(3) elements are stored as real matrices")
        .clone();
    let frames = (start.frames.0.clone(), desired);
    let mut poses = Vec::with_capacity(count);
    for n in 0..count {
        let t = n as f64 * dt;
        let mut m = base.clone();
        m[(0, 3)] = base[(0, 3)] + radius * ((angular_rate * t).cos() - 1.0);
        m[(1, 3)] = base[(1, 3)] + radius * (angular_rate * t).sin();
        m[(2, 3)] = base[(2, 3)] + climb_rate * t;
        poses.push(GroupElement::new_unchecked(
            GroupTag::se(3),
            frames.clone(),
            Mat::Real(m),
        ));
    }
    ReferenceTrajectory::sampled(poses)
}

/// Closed-loop kinematic tracking: per step, forward kinematics →
/// tracking error → control law → spatial twist → pseudoinverse joint
/// velocities → Euler update of θ. Records the simulation metrics plus
/// joint angles and tool position. A singular-value collapse aborts the
/// run with the step index attached.
pub fn run_arm_tracking(
    chain: &KinematicChain,
    reference: &ReferenceTrajectory,
    cfg: &ControllerConfig,
    theta0: &DVector<f64>,
    duration: f64,
    damping: f64,
) -> Result<SimRecord> {
    cfg.validate()?;
    check_dims(chain, theta0)?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(LieError::InvalidScenario(format!(
            "duration must be positive and finite, got {duration}"
        )));
    }
    let g0 = reference.initial_pose();
    if g0.tag != GroupTag::se(3) {
        return Err(LieError::TagMismatch { left: g0.tag, right: GroupTag::se(3) });
    }
    if g0.frames.0 != *chain.base_frame() {
        return Err(LieError::FrameMismatch {
            expected: chain.base_frame().to_string(),
            found: g0.frames.0.to_string(),
        });
    }
    let dt = cfg.dt;
    let n_steps = ((duration / dt) + 1e-9).floor() as usize;
    let poses = reference.poses(n_steps + 2, dt, DEFAULT_REPROJECT_EVERY)?;
    let analytic_vb = match reference {
        ReferenceTrajectory::ConstantTwist { vb, .. } => Some(vb),
        _ => None,
    };

    let mut theta = theta0.clone();
    let mut rows = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        let step_err = |e: LieError| e.at_step(n);
        let g_st = forward_kinematics(chain, &theta).map_err(step_err)?;
        let err = tracking_error(&g_st, &poses[n], cfg.branch).map_err(step_err)?;
        let vb = match analytic_vb {
            Some(vb) => vb.clone(),
            None => reference_body_velocity_discrete(&poses[n], &poses[n + 1], dt)
                .map_err(step_err)?,
        };
        let u = control_law(&err, &vb, cfg).map_err(step_err)?;
        let vs = body_to_spatial(&g_st, &u).map_err(step_err)?;
        let jac = spatial_jacobian(chain, &theta).map_err(step_err)?;
        let theta_dot = joint_velocity_command(&jac, &vs, damping).map_err(step_err)?;
        let (err_frobenius, err_spectral) = identity_deviation(&err.g_td).map_err(step_err)?;
        rows.push(SimRow {
            t: n as f64 * dt,
            state: g_st.clone(),
            control: u,
            err_frobenius,
            err_log_norm: err.xi_td.norm(),
            err_spectral,
            joint_angles: Some(theta.iter().copied().collect()),
            tool_position: Some(tool_position(&g_st)),
        });
        theta += theta_dot * dt;
    }
    Ok(SimRecord { rows })
}
