use serde::Serialize;

use super::{FlowEntropy, FlowTrajectory};
use crate::error::{Error, Result};
use crate::inequality::{constant_ji, constant_ode, RangePolicy};

/// Normalized ODE residuals must stay below this.
pub const ODE_TOLERANCE: f64 = 1e-7;

/// Decay samples may exceed `e^{−Ct}E(0)` by this relative factor.
pub const DECAY_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct OdeCheckResult {
    pub constant: f64,
    /// Largest `(d2T + C·dT) / max(|d2T|, |C·dT|, 1)` over the samples.
    pub worst_residual: f64,
    pub time_of_worst: f64,
    /// Normalized residual at the first sample.
    pub initial_residual: f64,
    pub tolerance: f64,
    pub exploratory: bool,
    pub pass: bool,
}

fn ode_check(traj: &FlowTrajectory, constant: f64, exploratory: bool) -> Result<OdeCheckResult> {
    let first = traj
        .records
        .first()
        .ok_or_else(|| Error::Parameter("empty trajectory".into()))?;
    let normalized = |r: &super::FlowRecord| {
        let res = r.d2_analytic + constant * r.d1_analytic;
        res / r
            .d2_analytic
            .abs()
            .max((constant * r.d1_analytic).abs())
            .max(1.0)
    };
    let (mut worst, mut at) = (f64::NEG_INFINITY, first.t);
    for r in &traj.records {
        let v = normalized(r);
        if v > worst {
            worst = v;
            at = r.t;
        }
    }
    Ok(OdeCheckResult {
        constant,
        worst_residual: worst,
        time_of_worst: at,
        initial_residual: normalized(first),
        tolerance: ODE_TOLERANCE,
        exploratory,
        pass: worst <= ODE_TOLERANCE,
    })
}

/// `d²T/dt² + C(n,p) dT/dt ≤ 0` along a Tsallis trajectory.
pub fn check_ode_inequality(traj: &FlowTrajectory, policy: RangePolicy) -> Result<OdeCheckResult> {
    let FlowEntropy::Tsallis { p } = traj.entropy else {
        return Err(Error::Parameter(
            "ODE check needs a Tsallis trajectory".into(),
        ));
    };
    let constant = constant_ode(traj.n, traj.lambda1, p, policy)?;
    let exploratory = !crate::inequality::ode_admissible(traj.n, p);
    ode_check(traj, constant, exploratory)
}

/// `d²S/dt² + 2C dS/dt ≤ 0` with the Ji constant, along a Shannon trajectory.
pub fn check_shannon_ode(traj: &FlowTrajectory) -> Result<OdeCheckResult> {
    if traj.entropy != FlowEntropy::Shannon {
        return Err(Error::Parameter(
            "Shannon check needs a Shannon trajectory".into(),
        ));
    }
    ode_check(traj, 2.0 * constant_ji(traj.n, traj.lambda1)?, false)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCheck {
    pub constant: f64,
    /// `max_t E(t) e^{Ct} / E(0)`.
    pub worst_ratio: f64,
    pub time_of_worst: f64,
    pub bound_holds: bool,
    /// Slope of `log E` on the second half of the time window.
    pub fitted_slope: Option<f64>,
    /// `−λ₁`: the energy cannot decay slower than this asymptotically.
    pub lower_bound_slope: f64,
    /// `fitted_slope ≤ −0.95 λ₁`.
    pub slope_ok: bool,
    pub pass: bool,
}

/// `E(t) ≤ e^{−C(n,p)t} E(0)` at every sample, plus the late-time rate.
pub fn check_decay(traj: &FlowTrajectory) -> Result<DecayCheck> {
    let first = traj
        .records
        .first()
        .ok_or_else(|| Error::Parameter("empty trajectory".into()))?;
    let c = traj.constant;
    let e0 = first.dirichlet_energy;
    let lower_bound_slope = -traj.lambda1;
    if e0 == 0.0 {
        let holds = traj.records.iter().all(|r| r.dirichlet_energy == 0.0);
        return Ok(DecayCheck {
            constant: c,
            worst_ratio: 0.0,
            time_of_worst: first.t,
            bound_holds: holds,
            fitted_slope: None,
            lower_bound_slope,
            slope_ok: true,
            pass: holds,
        });
    }
    let (mut worst, mut at) = (0.0f64, first.t);
    for r in &traj.records {
        let ratio = r.dirichlet_energy * ((c * (r.t - first.t)).exp()) / e0;
        if ratio > worst {
            worst = ratio;
            at = r.t;
        }
    }
    let bound_holds = worst <= 1.0 + DECAY_SLACK;

    let t_end = traj.records.last().map_or(0.0, |r| r.t);
    let tail: Vec<(f64, f64)> = traj
        .records
        .iter()
        .filter(|r| r.t >= 0.5 * t_end && r.dirichlet_energy > 0.0)
        .map(|r| (r.t, r.dirichlet_energy.ln()))
        .collect();
    let fitted_slope = linear_slope(&tail);
    let slope_ok = fitted_slope.is_none_or(|s| s <= 0.95 * lower_bound_slope);
    Ok(DecayCheck {
        constant: c,
        worst_ratio: worst,
        time_of_worst: at,
        bound_holds,
        fitted_slope,
        lower_bound_slope,
        slope_ok,
        pass: bound_holds && slope_ok,
    })
}

fn linear_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
