//! Default tolerances, in one place so that reports can echo them.

use serde::{Deserialize, Serialize};

/// Smallest denominator used by relative comparisons. Quantities below it
/// are roundoff on a (nearly) constant density and compare absolutely.
pub const SCALE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative deviation allowed in the integral identities.
    pub identity: f64,
    /// Most negative relative margin still counted as "holds".
    pub margin: f64,
    /// Normalized ODE residual ceiling.
    pub ode: f64,
    /// Analytic vs finite-difference agreement, first derivative.
    pub fd_first: f64,
    /// Analytic vs finite-difference agreement, second derivative.
    pub fd_second: f64,
    /// Slack factor on the energy decay bound, `E(t) ≤ e^{−Ct}E(0)(1 + decay)`.
    pub decay: f64,
    /// Agreement of the two Sobolev routes.
    pub sobolev_routes: f64,
    /// Probe minima may undershoot the theorem constant by this much.
    pub probe_lower: f64,
    /// Relative drift of the conserved mass.
    pub mass: f64,
    /// Lower bound on `dT/dt`.
    pub monotone: f64,
    /// Counterexample margin must exceed this multiple of the refinement error.
    pub resolution_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            margin: 1e-8,
            ode: 1e-7,
            fd_first: 1e-6,
            fd_second: 1e-5,
            decay: 1e-7,
            sobolev_routes: 1e-4,
            probe_lower: 1e-6,
            mass: 1e-12,
            monotone: 1e-12,
            resolution_factor: 10.0,
        }
    }
}
