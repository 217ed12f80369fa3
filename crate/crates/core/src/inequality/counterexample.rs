//! The explicit failure of the modified inequality inside the gap
//! `s ∈ (−2(2n²+1)/(4n−1), −2)`.
//!
//! With `t = s + 2`, `u = (c + cos r)^{1−n}` and `v = u^{2/t}`, the completed
//! square in the `u`-form of the modified integrand vanishes identically and
//! what remains is `(2/t)²(1 − (n−1)α/n)(∫(Δu)² − λ₁∫|∇u|²)`, which is negative
//! because the coefficient is negative while the bracket is positive.

use std::sync::Arc;

use serde::Serialize;

use super::checks::{check_modified_gamma2, MarginReport};
use super::constants::{modified_gap_start, RangePolicy};
use crate::error::{Error, Result};
use crate::spectral::lambda1;
use crate::zonal::{
    calculus::integrate_jets, frame::DiagTensor, grad_norm_sq, integrate, laplacian, SphereDim,
    ZonalField, ZonalSpace,
};

/// The base `c` in `(c + cos r)^{1−n}` used unless overridden.
pub const COUNTEREXAMPLE_BASE: f64 = 2.0;

/// A failure must exceed the order-doubling error estimate by this factor.
const RESOLUTION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct AuxiliaryCheck {
    pub alpha: f64,
    /// `1 − (n−1)α/n`
    pub coefficient: f64,
    /// `coefficient · ∫(Δu)²`
    pub lhs: f64,
    /// `coefficient · λ₁ ∫|∇u|²`
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub report: MarginReport,
    /// Margin recomputed at twice the grid order.
    pub refined_margin: f64,
    /// `|margin(2N) − margin(N)|`
    pub error_estimate: f64,
    pub sign_stable: bool,
    /// Negative, stable, and `|margin| > 10 × error_estimate`.
    pub resolved: bool,
    /// Margin predicted by the reduced `u`-form; an independent route.
    pub reduced_margin: f64,
    /// `∫|square term|² / ∫α|∇²u − (Δu/n)g|²`
    pub square_residual: f64,
    pub auxiliary: AuxiliaryCheck,
    pub base: f64,
}

/// `u = (c + cos r)^{1−n}` with exact derivatives.
pub fn counterexample_field(space: &Arc<ZonalSpace>, base: f64) -> Result<ZonalField> {
    if !(base > 1.0) {
        return Err(Error::Parameter(format!("base must exceed 1, got {base}")));
    }
    let e = 1.0 - space.n();
    ZonalField::from_fn(space, |x| {
        let b = base + x;
        [
            b.powf(e),
            e * b.powf(e - 1.0),
            e * (e - 1.0) * b.powf(e - 2.0),
        ]
    })
}

pub fn run_counterexample(n: usize, s: f64, order: usize) -> Result<CounterexampleReport> {
    run_counterexample_with_base(n, s, order, COUNTEREXAMPLE_BASE)
}

pub fn run_counterexample_with_base(
    n: usize,
    s: f64,
    order: usize,
    base: f64,
) -> Result<CounterexampleReport> {
    let dim = SphereDim::new(n)?;
    let lo = modified_gap_start(n);
    if !(s > lo && s < -2.0) {
        return Err(Error::Range {
            what: "s",
            value: s,
            range: format!("({lo}, -2)"),
        });
    }
    let coarse = ZonalSpace::new(dim, order)?;
    let fine = ZonalSpace::new(dim, 2 * order)?;
    let t = s + 2.0;

    let margin_at = |space: &Arc<ZonalSpace>| -> Result<(MarginReport, ZonalField)> {
        let u = counterexample_field(space, base)?;
        let v = u.powf(2.0 / t)?;
        Ok((check_modified_gamma2(&v, s, RangePolicy::Exploratory)?, u))
    };
    let (report, u) = margin_at(&coarse)?;
    let (refined, _) = margin_at(&fine)?;
    let error_estimate = (refined.margin - report.margin).abs();
    let sign_stable = report.margin < 0.0 && refined.margin < 0.0;

    let nf = n as f64;
    let l1 = lambda1(dim);
    let alpha = (nf - 1.0) / (nf + 2.0) * (1.0 - 4.0 / t);
    let coefficient = 1.0 - (nf - 1.0) * alpha / nf;
    let lap_sq = integrate(&laplacian(&u).map_values(|x| x * x))?;
    let grad = integrate(&grad_norm_sq(&u))?;
    let auxiliary = AuxiliaryCheck {
        alpha,
        coefficient,
        lhs: coefficient * lap_sq,
        rhs: coefficient * l1 * grad,
        holds: coefficient * lap_sq < coefficient * l1 * grad,
    };
    let reduced_margin = (2.0 / t).powi(2) * coefficient * (lap_sq - l1 * grad);

    Ok(CounterexampleReport {
        resolved: sign_stable && report.margin.abs() > RESOLUTION_FACTOR * error_estimate,
        refined_margin: refined.margin,
        error_estimate,
        sign_stable,
        reduced_margin,
        square_residual: square_residual(&u, t, alpha)?,
        auxiliary,
        report,
        base,
    })
}

/// Relative size of `√α T(∇²u) + (n/(n+2))(4/t − 1)α^{−1/2} T(du⊗du/u)`,
/// `T` the traceless part.
fn square_residual(u: &ZonalField, t: f64, alpha: f64) -> Result<f64> {
    let n = u.space().n();
    let k = n / (n + 2.0) * (4.0 / t - 1.0) / alpha.sqrt();
    let parts = |j: &crate::zonal::PointJet| {
        let h = DiagTensor::hessian(j).traceless(n).scaled(alpha.sqrt());
        let g = DiagTensor::grad_outer_over_value(j).traceless(n).scaled(k);
        (h, g)
    };
    let square = integrate_jets(u, |j| {
        let (h, g) = parts(j);
        h.plus(&g).norm_sq(n)
    })?;
    let scale = integrate_jets(u, |j| parts(j).0.norm_sq(n))?;
    Ok(if scale > 0.0 { square / scale } else { 0.0 })
}
