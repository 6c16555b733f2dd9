//! Numerical toolkit for first-order trajectory-tracking control on
//! matrix Lie groups.
//!
//! The crate provides:
//!
//! - tagged group/algebra elements over SO(n), SE(n), SU(n), GL₀(n,ℝ) and
//!   GL(n,ℂ) with runtime frame labels ([`group`]),
//! - exponential and principal-logarithm maps, closed forms for SO(3) and
//!   SE(3), dense kernels for the rest ([`explog`], [`linalg`]),
//! - truncated Baker–Campbell–Hausdorff combination and the commutator
//!   series for the error-coordinate flow ([`bch`]),
//! - the tracking controller `u = k·ξ̂ + Ad_g V̂ᵇ` with its discrete decay
//!   model ([`control`]),
//! - a left-invariant closed-loop simulator with reference generators,
//!   offset sampling, and decay-rate fitting ([`sim`]),
//! - product-of-exponentials kinematics and pseudoinverse velocity
//!   control for an open chain ([`arm`]).
//!
//! Everything is deterministic: seeded runs reproduce their metrics to
//! the byte.

pub mod arm;
pub mod bch;
pub mod control;
pub mod error;
pub mod explog;
pub mod group;
pub mod linalg;
pub mod matrix;
pub mod sim;

pub use arm::{
    body_to_spatial, default_home_angles, forward_kinematics, helix_reference_about,
    joint_velocity_command, prismatic_joint_twist, revolute_joint_twist, run_arm_tracking,
    spatial_jacobian, tool_position, JointState, KinematicChain, SIGMA_MIN,
};
pub use bch::{bch_truncated, commutator, xi_dot_series, BchOrder};
pub use control::{
    control_law, predicted_error_decay, reference_body_velocity_discrete, tracking_error,
    ControllerConfig, DecayMode, TrackingError,
};
pub use error::{LieError, Result};
pub use explog::{exp_map, log_map, log_series_truncated, LogBranchPolicy, EPS_SMALL};
pub use group::{
    adjoint_conjugate, check_algebra_membership, check_membership, compose, hat,
    identity_deviation, inverse, random_algebra, reproject, vee, AlgebraElement, Frame,
    GroupElement, GroupFamily, GroupTag, Twist, TAU_MEM,
};
pub use matrix::Mat;
pub use sim::{
    fit_decay_rate, fit_decay_rate_with, initial_state_with_offset, make_offset_initial_state,
    run_tracking, step_left_invariant, ReferenceTrajectory, Scenario, SimRecord, SimRow,
    DEFAULT_REPROJECT_EVERY,
};
