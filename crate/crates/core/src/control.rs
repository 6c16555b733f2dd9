//! Tracking error and the exponentially stabilizing first-order control
//! law `u = k ξ̂ + g V̂ᵇ g⁻¹`.
//!
//! The same formula serves continuous analysis and the discrete-time
//! plant; the discretization lives entirely in the simulator's stepping.
//! With the error at the identity the conjugation passes the reference
//! velocity through bit-for-bit, which keeps feedforward tracking exact.

use serde::{Deserialize, Serialize};

use crate::error::{LieError, Result};
use crate::explog::{log_map, LogBranchPolicy};
use crate::group::{
    adjoint_conjugate, compose, inverse, AlgebraElement, GroupElement,
};

/// Gain and discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Feedback gain (1/time). The closed-loop error contracts at this
    /// exponential rate.
    pub k: f64,
    /// Step size for discrete-time use. Stability requires `k·dt < 2`.
    pub dt: f64,
    #[serde(default)]
    pub branch: LogBranchPolicy,
}

impl ControllerConfig {
    pub fn new(k: f64, dt: f64, branch: LogBranchPolicy) -> Result<ControllerConfig> {
        let cfg = ControllerConfig { k, dt, branch };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(LieError::InvalidScenario(format!(
                "gain must be positive and finite, got {}",
                self.k
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LieError::InvalidScenario(format!(
                "step size must be positive and finite, got {}",
                self.dt
            )));
        }
        if self.k * self.dt >= 2.0 {
            return Err(LieError::InvalidScenario(format!(
                "k·dt = {} is not < 2; the discrete error recursion would not contract",
                self.k * self.dt
            )));
        }
        Ok(())
    }
}

/// Configuration error, its exponential coordinate, and whether the state
/// sits inside the locally-proven contraction region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingError {
    /// `g_TD = g_ST⁻¹ g_SD`, frames `(T, D)`; identity means on-track.
    pub g_td: GroupElement,
    /// `ξ̂_TD = log(g_TD)`, expressed in frame `T`.
    pub xi_td: AlgebraElement,
    /// True iff the spectral radius of `g_TD − I` is below 1.
    pub in_local_region: bool,
}

/// Compute the configuration and state error between the current pose
/// `g_ST` and the desired pose `g_SD` (same tag, shared first frame `S`).
///
/// Bitwise-equal poses short-circuit to an exact identity error, so a
/// perfectly tracking loop reports exactly zero rather than inversion
/// noise.
pub fn tracking_error(
    g_st: &GroupElement,
    g_sd: &GroupElement,
    branch: LogBranchPolicy,
) -> Result<TrackingError> {
    if g_st.tag != g_sd.tag {
        return Err(LieError::TagMismatch { left: g_st.tag, right: g_sd.tag });
    }
    if g_st.frames.0 != g_sd.frames.0 {
        return Err(LieError::FrameMismatch {
            expected: g_st.frames.0.to_string(),
            found: g_sd.frames.0.to_string(),
        });
    }
    let frames = (g_st.frames.1.clone(), g_sd.frames.1.clone());
    if g_st.matrix == g_sd.matrix {
        let g_td = GroupElement::identity(g_st.tag, frames);
        let xi_td = AlgebraElement::zero(g_st.tag, g_td.frames.0.clone());
        return Ok(TrackingError { g_td, xi_td, in_local_region: true });
    }
    let g_td = compose(&inverse(g_st)?, g_sd)?;
    let xi_td = log_map(&g_td, branch)?;
    let in_local_region = g_td.matrix.spectral_radius_from_identity()? < 1.0;
    Ok(TrackingError { g_td, xi_td, in_local_region })
}

/// The control law `u = k ξ̂_TD + g_TD V̂ᵇ_SD g_TD⁻¹`.
///
/// `vb_sd` is the reference body velocity expressed in frame `D`; the
/// output is the commanded body velocity of the plant, expressed in frame
/// `T`. The first term is pure feedback (vanishes on track), the second is
/// pure feedforward (passes the reference velocity through unchanged when
/// the error is the identity).
pub fn control_law(
    err: &TrackingError,
    vb_sd: &AlgebraElement,
    cfg: &ControllerConfig,
) -> Result<AlgebraElement> {
    if err.g_td.tag != vb_sd.tag {
        return Err(LieError::TagMismatch { left: err.g_td.tag, right: vb_sd.tag });
    }
    let feedforward = adjoint_conjugate(&err.g_td, vb_sd)?;
    err.xi_td.scale(cfg.k).add(&feedforward)
}

/// Body velocity recovered from two consecutive reference samples:
/// `(1/dt) log(g_now⁻¹ g_next)`, which satisfies
/// `g_next = g_now · exp(V̂ᵇ · dt)` by construction.
///
/// Bitwise-identical samples return exactly zero. A step that moves the
/// reference beyond the principal-log domain (a rotation of π or more in
/// one sample) surfaces as a branch-domain error.
pub fn reference_body_velocity_discrete(
    g_now: &GroupElement,
    g_next: &GroupElement,
    dt: f64,
) -> Result<AlgebraElement> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LieError::InvalidScenario(format!(
            "sample spacing must be positive and finite, got {dt}"
        )));
    }
    if g_now.matrix == g_next.matrix {
        return Ok(AlgebraElement::zero(g_now.tag, g_now.frames.1.clone()));
    }
    let rel = compose(&inverse(g_now)?, g_next)?;
    let xi = log_map(&rel, LogBranchPolicy::Principal)?;
    Ok(xi.scale(1.0 / dt))
}

/// Time argument for the analytic decay prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayMode {
    /// Continuous prediction `e^{−k t} · ξ̂(0)` at time `t`.
    Continuous { t: f64 },
    /// Discrete prediction `(1 − k·dt)ⁿ · ξ̂(0)` after `n` steps.
    Discrete { steps: u64 },
}

/// Analytic closed-loop prediction of the state error, used as the oracle
/// simulated runs are checked against.
pub fn predicted_error_decay(
    xi0: &AlgebraElement,
    cfg: &ControllerConfig,
    mode: DecayMode,
) -> AlgebraElement {
    let factor = match mode {
        DecayMode::Continuous { t } => (-cfg.k * t).exp(),
        DecayMode::Discrete { steps } => {
            let per_step = 1.0 - cfg.k * cfg.dt;
            per_step.powi(steps.min(i32::MAX as u64) as i32)
        }
    };
    xi0.scale(factor)
}
