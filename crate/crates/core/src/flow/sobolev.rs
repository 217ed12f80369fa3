//! The Sobolev family recovered by integrating the flow inequality over
//! `[0, ∞)`: with `p = 2/q` and `u₀ = v^q`,
//! `∫₀^∞ (T'' + C T') dt = −T'(0) + C (T_∞ − T(0)) ≤ 0`.

use rayon::prelude::*;
use serde::Serialize;

use super::field_at;
use crate::entropy::{
    tsallis_excess, tsallis_first_derivative, tsallis_second_derivative, EntropyParams,
};
use crate::error::{Error, Result};
use crate::inequality::{
    check_sobolev, constant_ode, constant_sobolev, MarginReport, RangePolicy, TheoremId,
};
use crate::spectral::{flow_to_equilibrium, forward_transform, geometric_times, lambda1};
use crate::zonal::{build_grid, mean, SphereDim, ZonalField};

/// Gauss–Legendre points per time panel.
const PANEL_POINTS: usize = 12;
/// Equilibrium tolerance that ends the numerical time integral.
const HORIZON_TOL: f64 = 1e-7;
const FIRST_PANEL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct SobolevFlowReport {
    /// Flow-route margin, rescaled to the units of the direct check.
    pub report: MarginReport,
    /// The direct check on `v`.
    pub direct: MarginReport,
    /// `|margin_flow − margin_direct| / max(|lhs|, |rhs|)`.
    pub agreement: f64,
    /// `T'(0) − C(T_∞ − T(0))` from the endpoint values alone, rescaled.
    pub closed_form_margin: f64,
    /// End of the numerical integral.
    pub horizon: f64,
    /// Single-slowest-mode estimate of the integral beyond the horizon, rescaled.
    pub tail: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre rule on `[−1, 1]`; the `S²` rule has unit weight function.
fn legendre_rule(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = build_grid(SphereDim::new(2)?, points)?;
    let scale = 2.0 / g.volume();
    Ok((
        g.nodes().to_vec(),
        g.weights().iter().map(|w| w * scale).collect(),
    ))
}

pub fn derive_sobolev_from_flow(
    v: &ZonalField,
    q: f64,
    policy: RangePolicy,
) -> Result<SobolevFlowReport> {
    let space = v.space().clone();
    let dim = space.dim();
    let n = dim.get();
    let l1 = lambda1(dim);
    let c_sob = constant_sobolev(n, l1, q, policy)?;
    let direct = check_sobolev(v, q, policy)?;
    let p = 2.0 / q;
    let params = EntropyParams::new(p)?;
    let c = constant_ode(n, l1, p, RangePolicy::Exploratory)?;

    let u0 = v.powf(q)?;
    let c0 = forward_transform(&u0);
    let horizon = flow_to_equilibrium(&c0, &space, HORIZON_TOL)?;
    let edges = if horizon > 0.0 {
        geometric_times(FIRST_PANEL, 2.0, horizon)?
    } else {
        vec![0.0]
    };
    let (x, w) = legendre_rule(PANEL_POINTS)?;
    let nodes: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|e| {
            let (a, b) = (e[0], e[1]);
            x.iter()
                .zip(&w)
                .map(move |(xi, wi)| (0.5 * (a + b) + 0.5 * (b - a) * xi, 0.5 * (b - a) * wi))
                .collect::<Vec<_>>()
        })
        .collect();
    let integral: f64 = nodes
        .par_iter()
        .map(|&(t, wt)| {
            let u = field_at(&c0, &space, t)?;
            let d1 = tsallis_first_derivative(&u, params)?.direct;
            let d2 = tsallis_second_derivative(&u, params)?;
            Ok(wt * (d2 + c * d1))
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();

    // Beyond the horizon u is one slow mode away from its mean:
    // T' ≈ T'(T) e^{−2λ₁(t−T)} and T'' ≈ −2λ₁ T'.
    let t_end = *edges.last().unwrap_or(&0.0);
    let d1_end = tsallis_first_derivative(&field_at(&c0, &space, t_end)?, params)?.direct;
    let tail = (c - 2.0 * l1) * d1_end / (2.0 * l1);

    let u_start = field_at(&c0, &space, 0.0)?;
    let d1_0 = tsallis_first_derivative(&u_start, params)?.direct;
    // T_∞ − T(0) = −excess(u₀)
    let closed = d1_0 + c * tsallis_excess(&u_start, params)?;

    // T'(0) = 2q ∫|∇v|², so dividing by 2q·Vol gives the units of the direct check.
    let unit = 2.0 * q * space.volume();
    let margin = -(integral + tail) / unit;
    let lhs = d1_0 / unit;
    let report = MarginReport::new(
        TheoremId::Sobolev,
        v,
        Some(q),
        lhs,
        c_sob,
        lhs - margin,
        direct.exploratory,
    )?;
    // The direct right side subtracts two averages of size ⨏v², so roundoff
    // is measured against that size when both sides vanish.
    let scale = direct
        .lhs
        .abs()
        .max(direct.rhs.abs())
        .max(1e-9 * mean(&v.mul(v)?)?);
    let agreement = (report.margin - direct.margin).abs() / scale;
    if !agreement.is_finite() {
        return Err(Error::Numeric(
            "Sobolev route comparison is not finite".into(),
        ));
    }
    Ok(SobolevFlowReport {
        report,
        direct,
        agreement,
        closed_form_margin: closed / unit,
        horizon: t_end,
        tail: tail / unit,
        evaluations: nodes.len(),
    })
}
