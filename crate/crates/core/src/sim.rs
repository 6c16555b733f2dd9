//! Discrete-time closed-loop tracking simulation.
//!
//! The plant is left-invariant and integrates by exponential stepping,
//! `g(n+1) = g(n) · exp(u·dt)`, so the state never leaves the group. The
//! reference is a pose sequence with a per-step body velocity: analytic
//! for constant-twist references, the discrete log-based estimate for
//! random walks and sampled lists. Runs are deterministic given the
//! scenario (including its seed), down to the metric bytes.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{
    control_law, reference_body_velocity_discrete, tracking_error, ControllerConfig,
};
use crate::error::{LieError, Result};
use crate::explog::exp_map;
use crate::group::{
    compose, identity_deviation, inverse, random_algebra, reproject, AlgebraElement, Frame,
    GroupElement, GroupTag,
};

/// How often (in steps) simulated states are projected back onto the
/// group; 0 disables it. Applied to the plant and to incrementally
/// generated references at the same cadence, so a perfectly tracking loop
/// stays bitwise on the reference.
pub const DEFAULT_REPROJECT_EVERY: usize = 100;

/// A reference trajectory: initial pose plus a body-velocity source.
///
/// Poses carry frames `(S, D)`. Velocities are expressed in `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceTrajectory {
    /// `g(t) = g₀ · exp(t V̂ᵇ)`; the controller receives the analytic V̂ᵇ.
    ConstantTwist { g0: GroupElement, vb: AlgebraElement },
    /// Per-step body velocity with algebra coordinates drawn i.i.d.
    /// uniform on `[−v_max, v_max]` from a generator seeded with `seed`;
    /// the controller receives the discrete log-based velocity estimate.
    RandomWalk { g0: GroupElement, v_max: f64, seed: u64 },
    /// Explicit pose samples spaced `dt` apart; discrete velocity
    /// estimate. Must hold at least two more samples than run steps.
    Sampled { poses: Vec<GroupElement> },
}

impl ReferenceTrajectory {
    pub fn constant_twist(g0: GroupElement, vb: AlgebraElement) -> Result<ReferenceTrajectory> {
        if g0.tag != vb.tag {
            return Err(LieError::TagMismatch { left: g0.tag, right: vb.tag });
        }
        if g0.frames.1 != vb.frame {
            return Err(LieError::FrameMismatch {
                expected: g0.frames.1.to_string(),
                found: vb.frame.to_string(),
            });
        }
        Ok(ReferenceTrajectory::ConstantTwist { g0, vb })
    }

    pub fn random_walk(g0: GroupElement, v_max: f64, seed: u64) -> Result<ReferenceTrajectory> {
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(LieError::InvalidScenario(format!(
                "random walk velocity bound must be positive, got {v_max}"
            )));
        }
        Ok(ReferenceTrajectory::RandomWalk { g0, v_max, seed })
    }

    pub fn sampled(poses: Vec<GroupElement>) -> Result<ReferenceTrajectory> {
        if poses.len() < 2 {
            return Err(LieError::InvalidScenario(
                "sampled reference needs at least two poses".into(),
            ));
        }
        Ok(ReferenceTrajectory::Sampled { poses })
    }

    pub fn initial_pose(&self) -> &GroupElement {
        match self {
            ReferenceTrajectory::ConstantTwist { g0, .. } => g0,
            ReferenceTrajectory::RandomWalk { g0, .. } => g0,
            ReferenceTrajectory::Sampled { poses } => &poses[0],
        }
    }

    /// Materialize `count` poses spaced `dt` apart, reprojecting generated
    /// ones every `reproject_every` steps (0 = never).
    pub fn poses(
        &self,
        count: usize,
        dt: f64,
        reproject_every: usize,
    ) -> Result<Vec<GroupElement>> {
        match self {
            ReferenceTrajectory::ConstantTwist { g0, vb } => {
                let frames = (g0.frames.1.clone(), g0.frames.1.clone());
                let step = exp_map(&vb.scale(dt))?.with_frames(frames);
                let mut out = Vec::with_capacity(count);
                out.push(g0.clone());
                for i in 1..count {
                    let mut next = compose(&out[i - 1], &step)?;
                    if reproject_every > 0 && i % reproject_every == 0 {
                        next = reproject(&next)?;
                    }
                    out.push(next);
                }
                Ok(out)
            }
            ReferenceTrajectory::RandomWalk { g0, v_max, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let frame = g0.frames.1.clone();
                let mut out = Vec::with_capacity(count);
                out.push(g0.clone());
                for i in 1..count {
                    let vb = random_algebra(&g0.tag, frame.clone(), *v_max, &mut rng);
                    let step =
                        exp_map(&vb.scale(dt))?.with_frames((frame.clone(), frame.clone()));
                    let mut next = compose(&out[i - 1], &step)?;
                    if reproject_every > 0 && i % reproject_every == 0 {
                        next = reproject(&next)?;
                    }
                    out.push(next);
                }
                Ok(out)
            }
            ReferenceTrajectory::Sampled { poses } => {
                if poses.len() < count {
                    return Err(LieError::InvalidScenario(format!(
                        "sampled reference holds {} poses but the run needs {count}",
                        poses.len()
                    )));
                }
                Ok(poses[..count].to_vec())
            }
        }
    }
}

/// A complete closed-loop tracking experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub tag: GroupTag,
    pub reference: ReferenceTrajectory,
    /// Plant start `g_ST(0)`, frames `(S, T)`.
    pub initial_state: GroupElement,
    pub cfg: ControllerConfig,
    /// Run length in time units; the step count is `⌊duration/dt⌋`.
    pub duration: f64,
    /// Master seed recorded with the scenario; reference randomness uses
    /// the seed embedded in the reference itself.
    pub seed: u64,
    #[serde(default = "default_reproject_every")]
    pub reproject_every: usize,
}

fn default_reproject_every() -> usize {
    DEFAULT_REPROJECT_EVERY
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(LieError::InvalidScenario(format!(
                "duration must be positive and finite, got {}",
                self.duration
            )));
        }
        if self.initial_state.tag != self.tag {
            return Err(LieError::TagMismatch {
                left: self.initial_state.tag,
                right: self.tag,
            });
        }
        let g0 = self.reference.initial_pose();
        if g0.tag != self.tag {
            return Err(LieError::TagMismatch { left: g0.tag, right: self.tag });
        }
        if self.initial_state.frames.0 != g0.frames.0 {
            return Err(LieError::FrameMismatch {
                expected: self.initial_state.frames.0.to_string(),
                found: g0.frames.0.to_string(),
            });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.duration / self.cfg.dt) + 1e-9).floor() as usize
    }
}

/// One recorded instant of a tracking run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub t: f64,
    pub state: GroupElement,
    pub control: AlgebraElement,
    /// `‖g_TD − I‖_F`
    pub err_frobenius: f64,
    /// `‖log(g_TD)‖_F`, the metric the controller contracts
    pub err_log_norm: f64,
    /// spectral radius of `g_TD − I`
    pub err_spectral: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_angles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_position: Option<[f64; 3]>,
}

/// Time series produced by a tracking run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub rows: Vec<SimRow>,
}

impl SimRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_row(&self) -> &SimRow {
        self.rows.last().expect("a run records at least one row")
    }

    /// `(t, ‖log g_TD‖_F)` pairs, the series decay fitting works on.
    pub fn log_norm_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.err_log_norm)).collect()
    }

    /// Metric CSV: `t,err_frobenius,err_log_norm,err_spectral`, plus tool
    /// position and joint angle columns when the rows carry them. Numbers
    /// use the shortest round-trippable decimal form, so identical runs
    /// emit identical bytes.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("t,err_frobenius,err_log_norm,err_spectral");
        let with_tool = self.rows.first().is_some_and(|r| r.tool_position.is_some());
        let joint_count = self
            .rows
            .first()
            .and_then(|r| r.joint_angles.as_ref().map(Vec::len))
            .unwrap_or(0);
        if with_tool {
            header.push_str(",x,y,z");
        }
        for j in 0..joint_count {
            header.push_str(&format!(",theta{j}"));
        }
        let mut out = header;
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}",
                row.t, row.err_frobenius, row.err_log_norm, row.err_spectral
            ));
            if let Some(p) = row.tool_position {
                out.push_str(&format!(",{},{},{}", p[0], p[1], p[2]));
            }
            if let Some(theta) = &row.joint_angles {
                for v in theta {
                    out.push_str(&format!(",{v}"));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Full record (states, controls, metrics) as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialization cannot fail")
    }
}

/// One exact step of the left-invariant plant: `g · exp(u·dt)`.
pub fn step_left_invariant(g: &GroupElement, u: &AlgebraElement, dt: f64) -> Result<GroupElement> {
    if g.tag != u.tag {
        return Err(LieError::TagMismatch { left: g.tag, right: u.tag });
    }
    let step = exp_map(&u.scale(dt))?;
    compose(g, &step)
}

/// Run the closed loop over the scenario and record every step.
///
/// Per step: tracking error, reference body velocity (analytic for
/// constant-twist references, discrete estimate otherwise), control law,
/// exponential plant step. Row `n` holds the state and metrics at time
/// `n·dt` together with the control applied over `[n·dt, (n+1)·dt)`.
pub fn run_tracking(scenario: &Scenario) -> Result<SimRecord> {
    scenario.validate()?;
    let dt = scenario.cfg.dt;
    let n_steps = scenario.steps();
    // Poses 0..=n_steps+1: the control at the final recorded row still
    // needs the next reference sample for its velocity estimate.
    let poses = scenario
        .reference
        .poses(n_steps + 2, dt, scenario.reproject_every)?;
    let analytic_vb = match &scenario.reference {
        ReferenceTrajectory::ConstantTwist { vb, .. } => Some(vb),
        _ => None,
    };

    let mut g_st = scenario.initial_state.clone();
    let mut rows = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        let step_err = |e: LieError| e.at_step(n);
        let err =
            tracking_error(&g_st, &poses[n], scenario.cfg.branch).map_err(step_err)?;
        let vb = match analytic_vb {
            Some(vb) => vb.clone(),
            None => reference_body_velocity_discrete(&poses[n], &poses[n + 1], dt)
                .map_err(step_err)?,
        };
        let u = control_law(&err, &vb, &scenario.cfg).map_err(step_err)?;
        let (err_frobenius, err_spectral) = identity_deviation(&err.g_td).map_err(step_err)?;
        rows.push(SimRow {
            t: n as f64 * dt,
            state: g_st.clone(),
            control: u.clone(),
            err_frobenius,
            err_log_norm: err.xi_td.norm(),
            err_spectral,
            joint_angles: None,
            tool_position: None,
        });
        g_st = step_left_invariant(&g_st, &u, dt).map_err(step_err)?;
        if scenario.reproject_every > 0 && (n + 1) % scenario.reproject_every == 0 {
            g_st = reproject(&g_st).map_err(step_err)?;
        }
    }
    Ok(SimRecord { rows })
}

/// Maximum candidate states examined before offset sampling gives up.
pub const OFFSET_MAX_ATTEMPTS: usize = 1000;

/// Sample a configuration error `d = exp(X)` whose deviation from the
/// identity has spectral radius above `min_spectral_radius`, while the
/// state stays safely inside the principal-log domain (every eigenvalue
/// imaginary part of `X` at most `π − 0.1`).
///
/// Draws start small and are scaled up until the deviation target is met;
/// draws that leave the safe domain are rejected. The result carries
/// frames `(T, D)`: it is the initial configuration error itself. Combine
/// with [`initial_state_with_offset`] to place the plant.
pub fn make_offset_initial_state(
    tag: &GroupTag,
    seed: u64,
    min_spectral_radius: f64,
) -> Result<GroupElement> {
    let radius_ok = min_spectral_radius.is_finite() && min_spectral_radius >= 0.0;
    if !radius_ok {
        return Err(LieError::InvalidScenario(format!(
            "minimum spectral radius must be non-negative, got {min_spectral_radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = (Frame::new("T"), Frame::new("D"));
    let mut attempts = 0;
    while attempts < OFFSET_MAX_ATTEMPTS {
        let mut x = random_algebra(tag, frames.0.clone(), 0.3, &mut rng);
        loop {
            attempts += 1;
            if attempts > OFFSET_MAX_ATTEMPTS {
                break;
            }
            if !within_log_safe_domain(&x)? {
                break; // grew out of the safe domain; fresh draw
            }
            let g = exp_map(&x)?.with_frames(frames.clone());
            let (_, spectral) = identity_deviation(&g)?;
            if spectral > min_spectral_radius {
                return Ok(g);
            }
            x = x.scale(1.15);
        }
    }
    Err(LieError::InfeasibleOffset { attempts })
}

/// True iff every eigenvalue of `x` has imaginary part of magnitude at
/// most `π − 0.1`, which keeps `exp(x)` clear of the principal branch cut
/// and inside the empirical log/exp roundtrip region.
fn within_log_safe_domain(x: &AlgebraElement) -> Result<bool> {
    let margin = std::f64::consts::PI - 0.1;
    Ok(x.matrix.eigenvalues()?.iter().all(|l| l.im.abs() <= margin))
}

/// Place the plant so its initial configuration error equals `offset`:
/// `g_ST(0) = g_SD(0) · offset⁻¹`, labeled `(S, T)`.
pub fn initial_state_with_offset(
    reference_start: &GroupElement,
    offset: &GroupElement,
) -> Result<GroupElement> {
    let d_inv = inverse(offset)?;
    let matrix = reference_start.matrix.mul(&d_inv.matrix);
    Ok(GroupElement::new_unchecked(
        reference_start.tag,
        (reference_start.frames.0.clone(), offset.frames.0.clone()),
        matrix,
    ))
}

/// Least-squares slope of `ln ‖log g_TD‖_F` against time over `window`,
/// with the coefficient of determination of the fit. A clean exponential
/// decay at rate k yields `(−k, ~1.0)`.
pub fn fit_decay_rate(record: &SimRecord, window: (f64, f64)) -> Result<(f64, f64)> {
    fit_decay_rate_with(record, window, |r| r.err_log_norm)
}

/// [`fit_decay_rate`] over an arbitrary per-row metric (e.g. the
/// Frobenius deviation instead of the log norm).
pub fn fit_decay_rate_with(
    record: &SimRecord,
    window: (f64, f64),
    metric: impl Fn(&SimRow) -> f64,
) -> Result<(f64, f64)> {
    let floor = 10.0 * f64::EPSILON;
    let pts: Vec<(f64, f64)> = record
        .rows
        .iter()
        .filter(|r| r.t >= window.0 && r.t <= window.1 && metric(r) > floor)
        .map(|r| (r.t, metric(r).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(LieError::InsufficientSignal);
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (t, y) in &pts {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if stt == 0.0 {
        return Err(LieError::InsufficientSignal);
    }
    let slope = sty / stt;
    let ss_res = syy - sty * sty / stt;
    let r_squared = if syy <= f64::EPSILON * n {
        if ss_res.abs() <= f64::EPSILON * n {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / syy
    };
    Ok((slope, r_squared))
}

/// Convenience: a `DVector` of the per-row log-error norms.
pub fn log_norm_vector(record: &SimRecord) -> DVector<f64> {
    DVector::from_iterator(record.len(), record.rows.iter().map(|r| r.err_log_norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explog::LogBranchPolicy;
    use crate::group::{check_membership, hat, Twist, TAU_MEM};
    use nalgebra::Vector3;

    fn sd() -> (Frame, Frame) {
        (Frame::new("S"), Frame::new("D"))
    }

    fn st() -> (Frame, Frame) {
        (Frame::new("S"), Frame::new("T"))
    }

    fn helix_reference() -> ReferenceTrajectory {
        let tag = GroupTag::se(3);
        let vb = hat(
            &tag,
            &Twist::rigid(Vector3::new(0.5, 0.5, 0.3), Vector3::new(0.5, 0.3, 0.7)),
            Frame::new("D"),
        )
        .unwrap();
        ReferenceTrajectory::constant_twist(GroupElement::identity(tag, sd()), vb).unwrap()
    }

    fn helix_scenario(k: f64, dt: f64, duration: f64, offset_seed: u64) -> Scenario {
        let tag = GroupTag::se(3);
        let reference = helix_reference();
        let offset = make_offset_initial_state(&tag, offset_seed, 1.0).unwrap();
        let initial_state =
            initial_state_with_offset(reference.initial_pose(), &offset).unwrap();
        Scenario {
            tag,
            reference,
            initial_state,
            cfg: ControllerConfig::new(k, dt, LogBranchPolicy::Principal).unwrap(),
            duration,
            seed: offset_seed,
            reproject_every: DEFAULT_REPROJECT_EVERY,
        }
    }

    #[test]
    fn zero_input_leaves_state_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let x = random_algebra(&GroupTag::se(3), Frame::new("S"), 0.5, &mut rng);
        let g = exp_map(&x).unwrap().with_frames(st());
        let u = AlgebraElement::zero(GroupTag::se(3), Frame::new("T"));
        let next = step_left_invariant(&g, &u, 0.01).unwrap();
        assert_eq!(next.matrix, g.matrix);
    }

    #[test]
    fn unit_step_from_identity_is_the_exponential() {
        let tag = GroupTag::se(3);
        let xi = hat(
            &tag,
            &Twist::rigid(Vector3::new(0.1, 0.2, 0.3), Vector3::new(0.3, -0.2, 0.1)),
            Frame::new("T"),
        )
        .unwrap();
        let g = GroupElement::identity(tag, (Frame::new("S"), Frame::new("T")));
        let next = step_left_invariant(&g, &xi, 1.0).unwrap();
        let expected = exp_map(&xi).unwrap();
        assert_eq!(next.matrix, expected.matrix);
    }

    #[test]
    fn two_half_steps_equal_one_full_step() {
        let tag = GroupTag::su(4);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let u = random_algebra(&tag, Frame::new("T"), 0.8, &mut rng);
        let g0 = exp_map(&random_algebra(&tag, Frame::new("S"), 0.5, &mut rng))
            .unwrap()
            .with_frames(st());
        let full = step_left_invariant(&g0, &u, 0.2).unwrap();
        let half = step_left_invariant(&g0, &u, 0.1).unwrap();
        let two = step_left_invariant(&half, &u, 0.1).unwrap();
        let diff = full.matrix.sub(&two.matrix).frobenius_norm();
        assert!(diff < 1e-12, "semigroup residual {diff}");
    }

    #[test]
    fn feedforward_run_stays_exactly_on_reference() {
        let reference = helix_reference();
        let initial_state = GroupElement::new_unchecked(
            GroupTag::se(3),
            st(),
            reference.initial_pose().matrix.clone(),
        );
        let scenario = Scenario {
            tag: GroupTag::se(3),
            reference,
            initial_state,
            cfg: ControllerConfig::new(1.0, 0.01, LogBranchPolicy::Principal).unwrap(),
            duration: 10.0,
            seed: 0,
            reproject_every: DEFAULT_REPROJECT_EVERY,
        };
        let record = run_tracking(&scenario).unwrap();
        assert_eq!(record.len(), 1001);
        for row in &record.rows {
            assert_eq!(row.err_log_norm, 0.0, "t = {}", row.t);
            assert_eq!(row.err_frobenius, 0.0, "t = {}", row.t);
        }
    }

    #[test]
    fn helix_error_decays_at_the_gain_rate() {
        let scenario = helix_scenario(1.0, 0.01, 4.0, 1);
        let record = run_tracking(&scenario).unwrap();
        let first = &record.rows[0];
        assert!(first.err_spectral > 1.0, "offset start radius {}", first.err_spectral);
        let (rate, r2) = fit_decay_rate(&record, (0.0, 4.0)).unwrap();
        assert!((rate + 1.0).abs() < 0.05, "fitted rate {rate}");
        assert!(r2 > 0.999, "fit quality {r2}");
        // error must actually shrink over four time constants
        let last = record.final_row();
        assert!(last.err_log_norm < first.err_log_norm * 0.05);
    }

    #[test]
    fn static_reference_contracts_by_the_discrete_factor() {
        let tag = GroupTag::se(3);
        let vb = AlgebraElement::zero(tag, Frame::new("D"));
        let reference =
            ReferenceTrajectory::constant_twist(GroupElement::identity(tag, sd()), vb).unwrap();
        let offset = make_offset_initial_state(&tag, 7, 0.5).unwrap();
        let initial_state = initial_state_with_offset(reference.initial_pose(), &offset).unwrap();
        let k = 1.0;
        let dt = 0.01;
        let scenario = Scenario {
            tag,
            reference,
            initial_state,
            cfg: ControllerConfig::new(k, dt, LogBranchPolicy::Principal).unwrap(),
            duration: 2.0,
            seed: 7,
            reproject_every: 0,
        };
        let record = run_tracking(&scenario).unwrap();
        let factor = 1.0 - k * dt;
        for pair in record.rows.windows(2) {
            let ratio = pair[1].err_log_norm / pair[0].err_log_norm;
            assert!(
                (ratio - factor).abs() < 1e-10,
                "per-step ratio {ratio} at t = {}",
                pair[0].t
            );
        }
    }

    #[test]
    fn random_walk_is_deterministic_and_stays_on_the_group() {
        let tag = GroupTag::gl0(4);
        let reference = ReferenceTrajectory::random_walk(
            GroupElement::identity(tag, sd()),
            1.0,
            99,
        )
        .unwrap();
        let offset = make_offset_initial_state(&tag, 3, 1.0).unwrap();
        let initial_state = initial_state_with_offset(reference.initial_pose(), &offset).unwrap();
        let scenario = Scenario {
            tag,
            reference,
            initial_state,
            cfg: ControllerConfig::new(1.0, 0.01, LogBranchPolicy::Principal).unwrap(),
            duration: 2.0,
            seed: 99,
            reproject_every: DEFAULT_REPROJECT_EVERY,
        };
        let a = run_tracking(&scenario).unwrap();
        let b = run_tracking(&scenario).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        for row in &a.rows {
            assert!(check_membership(&row.state.matrix, &tag, TAU_MEM * 10.0));
        }
        let (rate, _) = fit_decay_rate(&a, (0.0, 2.0)).unwrap();
        assert!((rate + 1.0).abs() < 0.15, "fitted rate {rate}");
    }

    #[test]
    fn offset_sampling_meets_its_contract() {
        for (tag, seed) in [
            (GroupTag::se(3), 5u64),
            (GroupTag::su(4), 6),
            (GroupTag::gl0(4), 7),
        ] {
            let d = make_offset_initial_state(&tag, seed, 1.0).unwrap();
            let (_, spectral) = identity_deviation(&d).unwrap();
            assert!(spectral > 1.0, "{tag}: spectral {spectral}");
            assert!(check_membership(&d.matrix, &tag, TAU_MEM));
            // the log must succeed: the sample stays in the principal domain
            let xi = crate::explog::log_map(&d, LogBranchPolicy::Principal).unwrap();
            let back = exp_map(&xi).unwrap();
            let diff = back.matrix.sub(&d.matrix).frobenius_norm();
            assert!(diff < 1e-9, "{tag}: reconstruction residual {diff}");
        }
    }

    #[test]
    fn decay_fit_on_synthetic_exponential() {
        let tag = GroupTag::se(3);
        let rows: Vec<SimRow> = (0..200)
            .map(|n| {
                let t = n as f64 * 0.01;
                SimRow {
                    t,
                    state: GroupElement::identity(tag, st()),
                    control: AlgebraElement::zero(tag, Frame::new("T")),
                    err_frobenius: (-t).exp(),
                    err_log_norm: (-t).exp(),
                    err_spectral: (-t).exp(),
                    joint_angles: None,
                    tool_position: None,
                }
            })
            .collect();
        let record = SimRecord { rows };
        let (rate, r2) = fit_decay_rate(&record, (0.0, 2.0)).unwrap();
        assert!((rate + 1.0).abs() < 1e-12, "rate {rate}");
        assert!((r2 - 1.0).abs() < 1e-12, "r² {r2}");
    }

    #[test]
    fn decay_fit_rejects_flatlined_records() {
        let tag = GroupTag::se(3);
        let rows: Vec<SimRow> = (0..10)
            .map(|n| SimRow {
                t: n as f64 * 0.01,
                state: GroupElement::identity(tag, st()),
                control: AlgebraElement::zero(tag, Frame::new("T")),
                err_frobenius: 0.0,
                err_log_norm: 0.0,
                err_spectral: 0.0,
                joint_angles: None,
                tool_position: None,
            })
            .collect();
        let record = SimRecord { rows };
        assert!(matches!(
            fit_decay_rate(&record, (0.0, 1.0)),
            Err(LieError::InsufficientSignal)
        ));
    }

    #[test]
    fn csv_layout_and_determinism() {
        let scenario = helix_scenario(1.0, 0.01, 0.05, 2);
        let record = run_tracking(&scenario).unwrap();
        let csv = record.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,err_frobenius,err_log_norm,err_spectral");
        assert_eq!(csv.lines().count(), record.len() + 1);
        let json = record.to_json();
        assert!(json.contains("\"err_log_norm\""));
    }

    #[test]
    fn row_count_matches_duration_over_dt() {
        let scenario = helix_scenario(1.0, 0.01, 1.0, 3);
        let record = run_tracking(&scenario).unwrap();
        assert_eq!(record.len(), 101);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let mut scenario = helix_scenario(1.0, 0.01, 1.0, 4);
        scenario.duration = 0.0;
        assert!(matches!(run_tracking(&scenario), Err(LieError::InvalidScenario(_))));
    }
}
