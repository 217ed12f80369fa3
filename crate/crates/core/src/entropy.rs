//! Entropies, Fisher-type energies, weighted Γ₂ integrals and the Tsallis
//! derivative formulas along the heat flow.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::zonal::calculus::{integrate_jets, jets};
use crate::zonal::{integrate, ZonalField, ZonalSpace};

/// Tsallis exponent `p`; `p = 1` is the Shannon case and has its own path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyParams {
    p: f64,
}

impl EntropyParams {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 1.0 {
            return Err(Error::Parameter(format!(
                "Tsallis exponent must be finite and != 1 (use the Shannon path), got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    /// Exponent `(p − 1)/2` of `U = u^{(p−1)/2}`.
    pub fn half_exponent(self) -> f64 {
        0.5 * (self.p - 1.0)
    }

    /// Weight exponent `s = 2/(p − 1)` for which `u = U^s`.
    pub fn weight_exponent(self) -> f64 {
        2.0 / (self.p - 1.0)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FunctionalValue {
    pub functional: &'static str,
    pub value: f64,
    pub parameter: Option<f64>,
    pub order: usize,
}

impl FunctionalValue {
    pub fn new(
        functional: &'static str,
        value: f64,
        parameter: Option<f64>,
        order: usize,
    ) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Numeric(format!("{functional} is not finite")));
        }
        Ok(Self {
            functional,
            value,
            parameter,
            order,
        })
    }
}

/// `S(f) = −∫ f log f`.
pub fn shannon_entropy(f: &ZonalField) -> Result<f64> {
    f.ensure_positive()?;
    Ok(-integrate(&f.map_values(|x| x * x.ln()))?)
}

/// `(1 + x) ln(1 + x) − x`, accurate for small `x`.
fn shannon_kernel(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // Σ_{k≥2} (−1)^k x^k / (k(k−1))
        let mut term = x * x;
        let mut sum = 0.0;
        for k in 2..40 {
            let kf = k as f64;
            let add = term / (kf * (kf - 1.0));
            sum += if k % 2 == 0 { add } else { -add };
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= x;
        }
        sum
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// `(1 + x)^p − 1 − p x`, accurate for small `x`.
fn tsallis_kernel(x: f64, p: f64) -> f64 {
    if x.abs() < 0.05 {
        // Σ_{k≥2} C(p, k) x^k
        let mut coef = p * (p - 1.0) / 2.0;
        let mut power = x * x;
        let mut sum = 0.0;
        for k in 2..60 {
            let add = coef * power;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coef *= (p - k as f64) / (k as f64 + 1.0);
            power *= x;
        }
        sum
    } else {
        (p * x.ln_1p()).exp_m1() - p * x
    }
}

/// `S(f) − S(⨏f)`, free of the cancellation between the two entropies.
pub fn shannon_excess(f: &ZonalField) -> Result<f64> {
    f.ensure_positive()?;
    let m = integrate(f)? / f.space().volume();
    let dev: Vec<f64> = f.values().iter().map(|v| v - m).collect();
    shannon_excess_split(f.space(), m, &dev)
}

/// [`shannon_excess`] from the mean and the nodal deviation `f − m`, for
/// callers that hold the deviation without cancellation.
pub fn shannon_excess_split(space: &ZonalSpace, m: f64, deviation: &[f64]) -> Result<f64> {
    let total = split_sum(space, m, deviation, shannon_kernel)?;
    finite(-m * total, "Shannon excess")
}

fn split_sum(
    space: &ZonalSpace,
    m: f64,
    deviation: &[f64],
    kernel: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(m > 0.0) || deviation.len() != space.order() {
        return Err(Error::Parameter(
            "split excess needs m > 0 and one deviation per node".into(),
        ));
    }
    if deviation.iter().any(|d| !(m + d > 0.0)) {
        return Err(Error::Numeric(
            "split excess: density is not positive".into(),
        ));
    }
    Ok(space
        .weights()
        .iter()
        .zip(deviation)
        .map(|(w, d)| w * kernel(d / m))
        .sum())
}

/// `T_p(u) = (∫u^p − ∫u)/(1 − p)`.
pub fn tsallis_entropy(u: &ZonalField, params: EntropyParams) -> Result<f64> {
    u.ensure_positive()?;
    let p = params.p();
    let up = integrate(&u.map_values(|x| (p * x.ln()).exp()))?;
    Ok((up - integrate(u)?) / (1.0 - p))
}

/// `T_p(u) − T_p(⨏u)`, free of cancellation; differences of it along the
/// flow are differences of `T_p` because the mass is conserved.
pub fn tsallis_excess(u: &ZonalField, params: EntropyParams) -> Result<f64> {
    u.ensure_positive()?;
    let m = integrate(u)? / u.space().volume();
    let dev: Vec<f64> = u.values().iter().map(|v| v - m).collect();
    tsallis_excess_split(u.space(), m, &dev, params)
}

/// [`tsallis_excess`] from the mean and the nodal deviation `u − m`.
pub fn tsallis_excess_split(
    space: &ZonalSpace,
    m: f64,
    deviation: &[f64],
    params: EntropyParams,
) -> Result<f64> {
    let p = params.p();
    let total = split_sum(space, m, deviation, |x| tsallis_kernel(x, p))?;
    finite(m.powf(p) * total / (1.0 - p), "Tsallis excess")
}

/// `∫ f |∇ log f|² = ∫ |∇f|²/f`.
pub fn fisher_log(f: &ZonalField) -> Result<f64> {
    f.ensure_positive()?;
    integrate_jets(f, |j| j.grad_sq() / j.f)
}

/// `∫ f (|∇² log f|² + Ric(∇ log f, ∇ log f))`.
pub fn gamma2_log(f: &ZonalField) -> Result<f64> {
    let log_f = f.ln()?;
    let n = f.space().n();
    let w = f.space().weights();
    let v: f64 = jets(&log_f)
        .iter()
        .zip(f.values())
        .zip(w)
        .map(|((j, fv), w)| w * fv * j.gamma2(n))
        .sum();
    finite(v, "gamma2_log")
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("{what} is not finite")))
    }
}

fn weighted_sum(
    v: &ZonalField,
    s: f64,
    integrand: impl Fn(&crate::zonal::PointJet) -> f64,
) -> Result<f64> {
    v.ensure_positive()?;
    let w = v.space().weights();
    let total: f64 = jets(v)
        .iter()
        .zip(w)
        .map(|(j, w)| w * (s * j.f.ln()).exp() * integrand(j))
        .sum();
    finite(total, "weighted integral")
}

/// `∫ v^s (|∇²v|² + Ric(∇v, ∇v))`.
pub fn weighted_gamma2(v: &ZonalField, s: f64) -> Result<f64> {
    let n = v.space().n();
    weighted_sum(v, s, |j| j.gamma2(n))
}

/// `∫ v^s |∇v|²`.
pub fn weighted_dirichlet(v: &ZonalField, s: f64) -> Result<f64> {
    weighted_sum(v, s, |j| j.grad_sq())
}

/// `∫ v^s (|∇²v|² + Ric(∇v, ∇v) − v⁻¹|∇v|²Δv)`.
pub fn modified_weighted_gamma2(v: &ZonalField, s: f64) -> Result<f64> {
    let n = v.space().n();
    weighted_sum(v, s, |j| j.gamma2(n) - j.grad_sq() * j.laplacian(n) / j.f)
}

/// `−∫ v^{s−1}|∇v|²Δv`, the correction separating the modified from the
/// plain weighted integral.
pub fn modified_correction(v: &ZonalField, s: f64) -> Result<f64> {
    let n = v.space().n();
    weighted_sum(v, s, |j| -j.grad_sq() * j.laplacian(n) / j.f)
}

/// Both printed forms of `dT_p/dt` along the heat flow.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct FirstDerivative {
    /// `p ∫ u^{p−2}|∇u|²`
    pub direct: f64,
    /// `p (2/(p−1))² ∫ u |∇U|²`, `U = u^{(p−1)/2}`
    pub via_u: f64,
    /// `|direct − via_u| / max(|direct|, |via_u|)`
    pub discrepancy: f64,
}

pub fn tsallis_first_derivative(u: &ZonalField, params: EntropyParams) -> Result<FirstDerivative> {
    u.ensure_positive()?;
    let p = params.p();
    let direct = p * integrate_jets(u, |j| (j.f.ln() * (p - 2.0)).exp() * j.grad_sq())?;
    let via_u = p * params.weight_exponent().powi(2) * weighted_dirichlet_energy(u, params)?;
    let scale = direct.abs().max(via_u.abs());
    Ok(FirstDerivative {
        direct,
        via_u,
        discrepancy: if scale > 0.0 {
            (direct - via_u).abs() / scale
        } else {
            0.0
        },
    })
}

/// `E = ∫ u |∇U|²` with `U = u^{(p−1)/2}`.
pub fn weighted_dirichlet_energy(u: &ZonalField, params: EntropyParams) -> Result<f64> {
    let big_u = u.powf(params.half_exponent())?;
    let w = u.space().weights();
    let v: f64 = jets(&big_u)
        .iter()
        .zip(u.values())
        .zip(w)
        .map(|((j, uv), w)| w * uv * j.grad_sq())
        .sum();
    finite(v, "weighted Dirichlet energy")
}

/// `d²T_p/dt² = −2p (2/(p−1))² ∫ u (|∇²U|² + Ric(∇U,∇U) − U⁻¹|∇U|²ΔU)`.
pub fn tsallis_second_derivative(u: &ZonalField, params: EntropyParams) -> Result<f64> {
    let p = params.p();
    let big_u = u.powf(params.half_exponent())?;
    let n = u.space().n();
    let w = u.space().weights();
    let integral: f64 = jets(&big_u)
        .iter()
        .zip(u.values())
        .zip(w)
        .map(|((j, uv), w)| w * uv * (j.gamma2(n) - j.grad_sq() * j.laplacian(n) / j.f))
        .sum();
    finite(
        -2.0 * p * params.weight_exponent().powi(2) * integral,
        "second derivative",
    )
}

/// `dS/dt = ∫ f|∇ log f|²` along the heat flow.
pub fn shannon_first_derivative(f: &ZonalField) -> Result<f64> {
    fisher_log(f)
}

/// `d²S/dt² = −2 ∫ f (|∇² log f|² + Ric(∇ log f, ∇ log f))`.
pub fn shannon_second_derivative(f: &ZonalField) -> Result<f64> {
    Ok(-2.0 * gamma2_log(f)?)
}
