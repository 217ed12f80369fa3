//! Bound constants and admissible parameter sets.
//!
//! Every constant takes `λ₁` explicitly. On the round sphere `λ₁ = n` and
//! all of them collapse to `n` (or `2n` for the flow constant).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether out-of-range parameters are rejected or accepted for probing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangePolicy {
    #[default]
    Enforce,
    Exploratory,
}

impl RangePolicy {
    pub fn from_flag(exploratory: bool) -> Self {
        if exploratory {
            Self::Exploratory
        } else {
            Self::Enforce
        }
    }

    pub fn is_exploratory(self) -> bool {
        self == Self::Exploratory
    }
}

/// Slack on closed endpoints, so that a value typed as a rounded decimal
/// of the endpoint is still accepted.
const ENDPOINT_SLACK: f64 = 1e-12;

fn at_most(x: f64, end: f64) -> bool {
    x <= end + ENDPOINT_SLACK * end.abs().max(1.0)
}

fn at_least(x: f64, end: f64) -> bool {
    x >= end - ENDPOINT_SLACK * end.abs().max(1.0)
}

fn range_error(what: &'static str, value: f64, range: String) -> Error {
    Error::Range { what, value, range }
}

fn check_dim(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("dimension must be >= 2, got {n}")));
    }
    Ok(n as f64)
}

/// Right end `4(n+2)/(4n−1)` of the gap in the weighted range.
pub fn weighted_gap_end(n: usize) -> f64 {
    let n = n as f64;
    4.0 * (n + 2.0) / (4.0 * n - 1.0)
}

/// Left end `−2(2n²+1)/(4n−1)` of the gap in the modified range.
pub fn modified_gap_start(n: usize) -> f64 {
    let n = n as f64;
    -2.0 * (2.0 * n * n + 1.0) / (4.0 * n - 1.0)
}

/// Upper Sobolev exponent `(2n²+1)/(n−1)²`.
pub fn sobolev_q_max(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * n * n + 1.0) / ((n - 1.0) * (n - 1.0))
}

/// Lower flow exponent `2(n−1)²/(2n²+1)`.
pub fn ode_p_min(n: usize) -> f64 {
    2.0 / sobolev_q_max(n)
}

pub fn weighted_admissible(n: usize, s: f64) -> bool {
    at_most(s, 0.0) || at_least(s, weighted_gap_end(n))
}

pub fn modified_admissible(n: usize, s: f64) -> bool {
    at_most(s, modified_gap_start(n)) || at_least(s, 2.0)
}

pub fn sobolev_admissible(n: usize, q: f64) -> bool {
    (at_least(q, 1.0) && q < 2.0) || (q > 2.0 && at_most(q, sobolev_q_max(n)))
}

pub fn del14_admissible(n: usize, q: f64) -> bool {
    if n < 3 {
        return false;
    }
    let nf = n as f64;
    (at_least(q, 1.0) && q < 2.0) || (q > 2.0 && at_most(q, 2.0 * nf / (nf - 2.0)))
}

pub fn ode_admissible(n: usize, p: f64) -> bool {
    (at_least(p, ode_p_min(n)) && p < 1.0) || (p > 1.0 && at_most(p, 2.0))
}

/// `(1 − (n−1)²s/((n+2)(ns−4)))λ₁ + (n−1)²ns/((n+2)(ns−4))`.
pub fn constant_weighted(n: usize, lambda1: f64, s: f64, policy: RangePolicy) -> Result<f64> {
    let nf = check_dim(n)?;
    if !s.is_finite() {
        return Err(Error::Parameter(format!(
            "weight exponent must be finite, got {s}"
        )));
    }
    if !weighted_admissible(n, s) && !policy.is_exploratory() {
        return Err(range_error(
            "s",
            s,
            format!("(-inf, 0] U [{}, inf)", weighted_gap_end(n)),
        ));
    }
    let denom = (nf + 2.0) * (nf * s - 4.0);
    if denom == 0.0 {
        return Err(range_error("s", s, "s != 4/n".into()));
    }
    let a = (nf - 1.0).powi(2) * s / denom;
    Ok((1.0 - a) * lambda1 + nf * a)
}

/// `(1 − (n−1)²(s−2)/(n(n+2)(s+2)))λ₁ + (n−1)²(s−2)/((n+2)(s+2))`.
pub fn constant_modified(n: usize, lambda1: f64, s: f64, policy: RangePolicy) -> Result<f64> {
    let nf = check_dim(n)?;
    if !s.is_finite() {
        return Err(Error::Parameter(format!(
            "weight exponent must be finite, got {s}"
        )));
    }
    if !modified_admissible(n, s) && !policy.is_exploratory() {
        return Err(range_error(
            "s",
            s,
            format!("(-inf, {}] U [2, inf)", modified_gap_start(n)),
        ));
    }
    if s == -2.0 {
        return Err(range_error("s", s, "s != -2".into()));
    }
    let b = (nf - 1.0).powi(2) * (s - 2.0) / ((nf + 2.0) * (s + 2.0));
    Ok((1.0 - b / nf) * lambda1 + b)
}

/// `((4n−1)/(n(n+2)))λ₁ + ((n−1)²/(n(n+2)))·n`.
pub fn constant_ji(n: usize, lambda1: f64) -> Result<f64> {
    let nf = check_dim(n)?;
    let d = nf * (nf + 2.0);
    Ok((4.0 * nf - 1.0) / d * lambda1 + (nf - 1.0).powi(2) / d * nf)
}

/// `(4n/(n+1)²)λ₁ + ((n−1)²/(n+1)²)·n`.
pub fn constant_rothaus(n: usize, lambda1: f64) -> Result<f64> {
    let nf = check_dim(n)?;
    let d = (nf + 1.0).powi(2);
    Ok(4.0 * nf / d * lambda1 + (nf - 1.0).powi(2) / d * nf)
}

/// Bracketed Sobolev constant `(1 − (n−1)²(q−1)/(n(n+2)))λ₁ + (n−1)²(q−1)/(n+2)`;
/// the `1/(q−2)` prefactor belongs to the checker.
pub fn constant_sobolev(n: usize, lambda1: f64, q: f64, policy: RangePolicy) -> Result<f64> {
    let nf = check_dim(n)?;
    if !q.is_finite() || q == 2.0 {
        return Err(range_error("q", q, "finite, q != 2".into()));
    }
    if !sobolev_admissible(n, q) && !policy.is_exploratory() {
        return Err(range_error(
            "q",
            q,
            format!("[1, 2) U (2, {}]", sobolev_q_max(n)),
        ));
    }
    let c = (nf - 1.0).powi(2) * (q - 1.0) / (nf + 2.0);
    Ok((1.0 - c / nf) * lambda1 + c)
}

/// Comparison constant for `n ≥ 3`, as printed:
/// `(1 − (n−1)²(q−1)/((q−2)+(n+1)²))λ₁ + ((n−1)²(q−1)/((q−2)+(n+1)²))·n`.
pub fn constant_del14(n: usize, lambda1: f64, q: f64, policy: RangePolicy) -> Result<f64> {
    let nf = check_dim(n)?;
    if n < 3 {
        return Err(Error::Parameter("comparison constant needs n >= 3".into()));
    }
    if !q.is_finite() || q == 2.0 {
        return Err(range_error("q", q, "finite, q != 2".into()));
    }
    if !del14_admissible(n, q) && !policy.is_exploratory() {
        return Err(range_error(
            "q",
            q,
            format!("[1, 2) U (2, {}]", 2.0 * nf / (nf - 2.0)),
        ));
    }
    let c = (nf - 1.0).powi(2) * (q - 1.0) / ((q - 2.0) + (nf + 1.0).powi(2));
    Ok((1.0 - c) * lambda1 + c * nf)
}

/// `C(n,p) = 2[(1 − (n−1)²(2/p−1)/(n(n+2)))λ₁ + (n−1)²(2/p−1)/(n+2)]`.
pub fn constant_ode(n: usize, lambda1: f64, p: f64, policy: RangePolicy) -> Result<f64> {
    let nf = check_dim(n)?;
    if !p.is_finite() || p == 0.0 || p == 1.0 {
        return Err(range_error("p", p, "finite, p not in {0, 1}".into()));
    }
    if !ode_admissible(n, p) && !policy.is_exploratory() {
        return Err(range_error(
            "p",
            p,
            format!("[{}, 1) U (1, 2]", ode_p_min(n)),
        ));
    }
    let c = (nf - 1.0).powi(2) * (2.0 / p - 1.0) / (nf + 2.0);
    Ok(2.0 * ((1.0 - c / nf) * lambda1 + c))
}
