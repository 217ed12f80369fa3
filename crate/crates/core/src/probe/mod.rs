//! Numerical estimates of optimal constants: minimize Rayleigh-type ratios
//! over positive zonal fields `v = exp(Σ_{k=0..K} w_k φ_k)`.
//!
//! The log-parameterization keeps every trial field strictly positive, so
//! the ratio functionals never see clamped data.

mod bfgs;
mod sharpness;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::exp_of_modes;
use crate::entropy::{
    fisher_log, gamma2_log, modified_weighted_gamma2, weighted_dirichlet, weighted_gamma2,
};
use crate::error::{Error, Result};
use crate::inequality::{
    constant_ji, constant_modified, constant_weighted, modified_admissible, weighted_admissible,
    RangePolicy,
};
use crate::spectral::lambda1;
use crate::zonal::{SphereDim, ZonalSpace};

pub use bfgs::{minimize_from, minimize_ratio, ProbeOptions, ProbeResult, StartOutcome};
pub use sharpness::{sharpness_report, SharpnessRow, SharpnessTable};

/// Ratio returned for degenerate denominators is `PENALTY·(1 + ‖w‖)`.
pub const PENALTY: f64 = 1e12;

/// Denominators below this fraction of the numerator scale are degenerate.
const DEGENERATE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "functional", rename_all = "lowercase")]
pub enum ProbeFunctional {
    /// `∫ f Γ₂(log f) / ∫ f |∇ log f|²`
    Ji,
    /// `∫ v^s Γ₂(v) / ∫ v^s |∇v|²`
    Weighted { s: f64 },
    /// `∫ v^s (Γ₂(v) − v⁻¹|∇v|²Δv) / ∫ v^s |∇v|²`
    Modified { s: f64 },
}

impl ProbeFunctional {
    pub fn parameter(self) -> Option<f64> {
        match self {
            Self::Ji => None,
            Self::Weighted { s } | Self::Modified { s } => Some(s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ji => "ji",
            Self::Weighted { .. } => "weighted",
            Self::Modified { .. } => "modified",
        }
    }

    pub fn admissible(self, n: usize) -> bool {
        match self {
            Self::Ji => true,
            Self::Weighted { s } => weighted_admissible(n, s),
            Self::Modified { s } => modified_admissible(n, s),
        }
    }

    /// The theorem's lower bound for the infimum.
    pub fn constant(self, n: usize, lambda1: f64, policy: RangePolicy) -> Result<f64> {
        match self {
            Self::Ji => constant_ji(n, lambda1),
            Self::Weighted { s } => constant_weighted(n, lambda1, s, policy),
            Self::Modified { s } => constant_modified(n, lambda1, s, policy),
        }
    }
}

/// A ratio to minimize on `S^n` with `K + 1` log-coefficients `w_0..w_K`.
#[derive(Debug, Clone)]
pub struct RatioProblem {
    pub functional: ProbeFunctional,
    pub space: Arc<ZonalSpace>,
    pub modes: usize,
    pub policy: RangePolicy,
    /// Theorem constant for the functional on this sphere.
    pub constant: f64,
}

impl RatioProblem {
    pub fn new(
        functional: ProbeFunctional,
        n: usize,
        order: usize,
        modes: usize,
        policy: RangePolicy,
    ) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        if modes == 0 || modes > order / 4 {
            return Err(Error::Parameter(format!(
                "basis truncation K must satisfy 1 <= K <= order/4 = {}, got {modes}",
                order / 4
            )));
        }
        let constant = functional.constant(n, lambda1(dim), policy)?;
        Ok(Self {
            functional,
            space: ZonalSpace::new(dim, order)?,
            modes,
            policy,
            constant,
        })
    }

    pub fn n(&self) -> usize {
        self.space.dim().get()
    }

    pub fn dimension(&self) -> usize {
        self.modes + 1
    }

    pub fn exploratory(&self) -> bool {
        !self.functional.admissible(self.n())
    }
}

fn penalty(w: &[f64]) -> f64 {
    PENALTY * (1.0 + w.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Numerator over denominator at `v = exp(Σ w_k φ_k)`; penalized when the
/// denominator degenerates (e.g. `w = 0`) or the evaluation fails.
pub fn rayleigh_ratio(problem: &RatioProblem, w: &[f64]) -> f64 {
    if w.len() != problem.dimension() || w.iter().any(|x| !x.is_finite()) {
        return penalty(&[f64::INFINITY]);
    }
    let terms = || -> Result<(f64, f64)> {
        let v = exp_of_modes(&problem.space, w)?;
        Ok(match problem.functional {
            ProbeFunctional::Ji => (gamma2_log(&v)?, fisher_log(&v)?),
            ProbeFunctional::Weighted { s } => {
                (weighted_gamma2(&v, s)?, weighted_dirichlet(&v, s)?)
            }
            ProbeFunctional::Modified { s } => {
                (modified_weighted_gamma2(&v, s)?, weighted_dirichlet(&v, s)?)
            }
        })
    };
    match terms() {
        Ok((num, den))
            if den.is_finite() && num.is_finite() && den > DEGENERATE * num.abs() && den > 0.0 =>
        {
            num / den
        }
        _ => penalty(w),
    }
}
