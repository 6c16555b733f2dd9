//! Built-in experiment roster and scenario assembly.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use lietrack_core::{
    compose, default_home_angles, exp_map, forward_kinematics, hat, helix_reference_about,
    initial_state_with_offset, make_offset_initial_state, random_algebra, run_arm_tracking,
    run_tracking, ControllerConfig, Frame, GroupElement, GroupTag, KinematicChain, LieError,
    LogBranchPolicy, ReferenceTrajectory, Scenario, SimRecord, Twist, DEFAULT_REPROJECT_EVERY,
};

/// The experiment roster. `Custom` runs a full scenario object from the
/// config file; the others ship defaults that the config can override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Se3Helix,
    Su4Constant,
    Gl4RandomWalk,
    ArmHelix,
    Custom,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Se3Helix => "se3_helix",
            ExperimentKind::Su4Constant => "su4_constant",
            ExperimentKind::Gl4RandomWalk => "gl4_random_walk",
            ExperimentKind::ArmHelix => "arm_helix",
            ExperimentKind::Custom => "custom",
        }
    }

    pub const BUILT_INS: [ExperimentKind; 4] = [
        ExperimentKind::Se3Helix,
        ExperimentKind::Su4Constant,
        ExperimentKind::Gl4RandomWalk,
        ExperimentKind::ArmHelix,
    ];

    pub fn description(&self) -> &'static str {
        match self {
            ExperimentKind::Se3Helix => {
                "SE(3) rigid-body helix: constant-twist reference, offset start"
            }
            ExperimentKind::Su4Constant => {
                "SU(4) unitary flow: seeded constant-velocity reference, offset start"
            }
            ExperimentKind::Gl4RandomWalk => {
                "GL0(4,R) random walk: seeded per-step reference velocities, offset start"
            }
            ExperimentKind::ArmHelix => {
                "7-DOF kinematic arm tracking a fixed-orientation helix"
            }
            ExperimentKind::Custom => "scenario object supplied verbatim in the config file",
        }
    }
}

/// Tolerances a finished run is judged against.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    /// Target exponential rate (usually −k).
    pub rate: f64,
    /// Allowed deviation from the target rate.
    pub rate_tol: f64,
    /// Minimum coefficient of determination of the decay fit.
    pub r2_min: f64,
    /// Time window the fit runs over.
    pub window: (f64, f64),
    /// Ceiling on the final log-error norm.
    pub final_err_max: f64,
}

/// Fully resolved run parameters: built-in defaults, overridden by the
/// config file, overridden by command-line flags.
#[derive(Debug, Clone)]
pub struct RunParams {
    pub k: f64,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub min_spectral_radius: f64,
    pub damping: f64,
    pub expect: Option<ExpectSpec>,
}

pub fn default_params(kind: ExperimentKind) -> RunParams {
    let sim_expect = ExpectSpec {
        rate: -1.0,
        rate_tol: 0.05,
        r2_min: 0.999,
        window: (0.0, 5.0),
        final_err_max: 1e-3,
    };
    match kind {
        ExperimentKind::Se3Helix | ExperimentKind::Su4Constant => RunParams {
            k: 1.0,
            dt: 0.01,
            duration: 10.0,
            seed: 1,
            min_spectral_radius: 1.0,
            damping: 0.0,
            expect: Some(sim_expect),
        },
        ExperimentKind::Gl4RandomWalk => RunParams {
            k: 1.0,
            dt: 0.01,
            duration: 10.0,
            seed: 1,
            min_spectral_radius: 1.0,
            damping: 0.0,
            expect: Some(ExpectSpec { r2_min: 0.99, ..sim_expect }),
        },
        ExperimentKind::ArmHelix => RunParams {
            k: 1.0,
            dt: 0.005,
            duration: 10.0,
            seed: 1,
            min_spectral_radius: 0.0,
            damping: 0.0,
            expect: Some(ExpectSpec {
                rate: -1.0,
                rate_tol: 0.1,
                r2_min: 0.99,
                window: (0.0, 4.0),
                final_err_max: 1e-3,
            }),
        },
        ExperimentKind::Custom => RunParams {
            k: 1.0,
            dt: 0.01,
            duration: 10.0,
            seed: 1,
            min_spectral_radius: 1.0,
            damping: 0.0,
            expect: None,
        },
    }
}

/// Derive an independent stream seed from the master seed.
fn sub_seed(master: u64, stream: u64) -> u64 {
    master
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream)
}

fn sd_frames() -> (Frame, Frame) {
    (Frame::new("S"), Frame::new("D"))
}

fn helix_twist(tag: &GroupTag) -> lietrack_core::AlgebraElement {
    hat(
        tag,
        &Twist::rigid(Vector3::new(0.5, 0.5, 0.3), Vector3::new(0.5, 0.3, 0.7)),
        Frame::new("D"),
    )
    .expect("the helix twist is a valid SE(3) coordinate vector")
}

fn offset_scenario(
    tag: GroupTag,
    reference: ReferenceTrajectory,
    p: &RunParams,
) -> Result<Scenario, LieError> {
    let offset = make_offset_initial_state(&tag, sub_seed(p.seed, 0), p.min_spectral_radius)?;
    let initial_state = initial_state_with_offset(reference.initial_pose(), &offset)?;
    Ok(Scenario {
        tag,
        reference,
        initial_state,
        cfg: ControllerConfig::new(p.k, p.dt, LogBranchPolicy::Principal)?,
        duration: p.duration,
        seed: p.seed,
        reproject_every: DEFAULT_REPROJECT_EVERY,
    })
}

pub fn build_se3_helix(p: &RunParams) -> Result<Scenario, LieError> {
    let tag = GroupTag::se(3);
    let reference = ReferenceTrajectory::constant_twist(
        GroupElement::identity(tag, sd_frames()),
        helix_twist(&tag),
    )?;
    offset_scenario(tag, reference, p)
}

pub fn build_su4_constant(p: &RunParams) -> Result<Scenario, LieError> {
    let tag = GroupTag::su(4);
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(p.seed, 1));
    let vb = random_algebra(&tag, Frame::new("D"), 0.5, &mut rng);
    let reference =
        ReferenceTrajectory::constant_twist(GroupElement::identity(tag, sd_frames()), vb)?;
    offset_scenario(tag, reference, p)
}

pub fn build_gl4_random_walk(p: &RunParams) -> Result<Scenario, LieError> {
    let tag = GroupTag::gl0(4);
    let reference = ReferenceTrajectory::random_walk(
        GroupElement::identity(tag, sd_frames()),
        1.0,
        sub_seed(p.seed, 1),
    )?;
    offset_scenario(tag, reference, p)
}

/// Assemble and run the arm experiment: elbow-bent home start, helix
/// through a small offset of the starting tool pose.
pub fn run_arm_helix(p: &RunParams) -> Result<SimRecord, LieError> {
    let chain = KinematicChain::default_seven_dof();
    let theta0 = default_home_angles();
    let tool = forward_kinematics(&chain, &theta0)?;
    let offset = exp_map(&hat(
        &GroupTag::se(3),
        &Twist::rigid(Vector3::new(0.06, -0.05, 0.04), Vector3::new(0.12, -0.09, 0.15)),
        Frame::new("T"),
    )?)?
    .with_frames((Frame::new("T"), Frame::new("D")));
    let start = compose(&tool, &offset)?;
    let steps = ((p.duration / p.dt) + 1e-9).floor() as usize;
    let reference =
        helix_reference_about(&start, Frame::new("D"), 0.1, 0.8, 0.02, steps + 2, p.dt)?;
    let cfg = ControllerConfig::new(p.k, p.dt, LogBranchPolicy::Principal)?;
    run_arm_tracking(&chain, &reference, &cfg, &theta0, p.duration, p.damping)
}

/// Execute a built-in simulator experiment (everything except the arm
/// and custom runs).
pub fn run_simulator_builtin(
    kind: ExperimentKind,
    p: &RunParams,
) -> Result<(SimRecord, GroupTag), LieError> {
    let scenario = match kind {
        ExperimentKind::Se3Helix => build_se3_helix(p)?,
        ExperimentKind::Su4Constant => build_su4_constant(p)?,
        ExperimentKind::Gl4RandomWalk => build_gl4_random_walk(p)?,
        _ => unreachable!("not a simulator built-in"),
    };
    let tag = scenario.tag;
    Ok((run_tracking(&scenario)?, tag))
}
