//! Integral and pointwise identities of the zonal calculus, evaluated on a
//! single field. Each returns the two sides and a normalized deviation.
//!
//! Integral identities are normalized by the largest magnitude among the
//! terms that enter them, so that cancellation between terms cannot
//! inflate the reported deviation.

use serde::Serialize;

use super::calculus::{integrate_jets, jets, PointJet};
use super::field::ZonalField;
use super::frame::DiagTensor;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

fn normalized(name: &'static str, lhs: f64, rhs: f64, terms: &[f64]) -> IdentityCheck {
    let scale = terms
        .iter()
        .fold(lhs.abs().max(rhs.abs()), |m, t| m.max(t.abs()));
    let deviation = if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    };
    IdentityCheck {
        name,
        lhs,
        rhs,
        deviation,
    }
}

/// `∫ ΔF = 0`, normalized by `‖ΔF‖∞ · Vol`.
pub fn divergence(field: &ZonalField) -> Result<IdentityCheck> {
    let n = field.space().n();
    let lhs = integrate_jets(field, |j| j.laplacian(n))?;
    let sup = jets(field)
        .iter()
        .fold(0.0f64, |m, j| m.max(j.laplacian(n).abs()));
    let scale = sup * field.space().volume();
    Ok(IdentityCheck {
        name: "divergence",
        lhs,
        rhs: 0.0,
        deviation: if scale > 0.0 { lhs.abs() / scale } else { 0.0 },
    })
}

/// `∫ F ΔF = −∫ |∇F|²`.
pub fn integration_by_parts(field: &ZonalField) -> Result<IdentityCheck> {
    let n = field.space().n();
    let lhs = integrate_jets(field, |j| j.f * j.laplacian(n))?;
    let rhs = -integrate_jets(field, PointJet::grad_sq)?;
    Ok(normalized("integration_by_parts", lhs, rhs, &[]))
}

/// `∫ (ΔF)² = ∫ (|∇²F|² + Ric(∇F, ∇F))`.
pub fn bochner(field: &ZonalField) -> Result<IdentityCheck> {
    let n = field.space().n();
    let lhs = integrate_jets(field, |j| j.laplacian(n).powi(2))?;
    let rhs = integrate_jets(field, |j| j.gamma2(n))?;
    Ok(normalized("bochner", lhs, rhs, &[]))
}

fn traceless_by_frame(j: &PointJet, n: f64) -> f64 {
    let a = DiagTensor::hessian(j).traceless(n);
    let b = DiagTensor::grad_outer_over_value(j).traceless(n);
    a.inner(&b, n)
}

/// `∫F⁻¹|∇F|²ΔF = (n/(n+2))∫F⁻²|∇F|⁴ − (2n/(n+2))∫⟨T(∇²F), T(dF⊗dF/F)⟩`,
/// with `T` the traceless part, contracted in the adapted frame.
pub fn weighted_laplacian_identity(field: &ZonalField) -> Result<IdentityCheck> {
    field.ensure_positive()?;
    let n = field.space().n();
    let lhs = integrate_jets(field, |j| j.grad_sq() * j.laplacian(n) / j.f)?;
    let quartic = integrate_jets(field, |j| (j.grad_sq() / j.f).powi(2))?;
    let traceless = integrate_jets(field, |j| traceless_by_frame(j, n))?;
    let a = n / (n + 2.0) * quartic;
    let b = 2.0 * n / (n + 2.0) * traceless;
    Ok(normalized("weighted_laplacian", lhs, a - b, &[a, b]))
}

/// `∫⟨∇²F, dF⊗dF/F⟩ = (1/(n+2))∫F⁻²|∇F|⁴ + (n/(n+2))∫⟨T(∇²F), T(dF⊗dF/F)⟩`.
pub fn hessian_pairing_identity(field: &ZonalField) -> Result<IdentityCheck> {
    field.ensure_positive()?;
    let n = field.space().n();
    let lhs = integrate_jets(field, |j| {
        DiagTensor::hessian(j).inner(&DiagTensor::grad_outer_over_value(j), n)
    })?;
    let quartic = integrate_jets(field, |j| (j.grad_sq() / j.f).powi(2))?;
    let traceless = integrate_jets(field, |j| traceless_by_frame(j, n))?;
    let a = quartic / (n + 2.0);
    let b = n / (n + 2.0) * traceless;
    Ok(normalized("hessian_pairing", lhs, a + b, &[a, b]))
}

fn pointwise_max(name: &'static str, pairs: impl Iterator<Item = (f64, f64)>) -> IdentityCheck {
    let pairs: Vec<_> = pairs.collect();
    let scale = pairs
        .iter()
        .fold(0.0f64, |m, (a, b)| m.max(a.abs()).max(b.abs()));
    let (mut worst, mut at) = (0.0f64, (0.0, 0.0));
    for &(a, b) in &pairs {
        if (a - b).abs() >= worst {
            worst = (a - b).abs();
            at = (a, b);
        }
    }
    IdentityCheck {
        name,
        lhs: at.0,
        rhs: at.1,
        deviation: if scale > 0.0 { worst / scale } else { 0.0 },
    }
}

/// Nodewise `⟨∇²F, dF⊗dF/F⟩ = ⟨T(∇²F), T(dF⊗dF/F)⟩ + (1/n)F⁻¹|∇F|²ΔF`:
/// frame contraction against the closed `s`-form.
pub fn pointwise_traceless_split(field: &ZonalField) -> Result<IdentityCheck> {
    field.ensure_positive()?;
    let n = field.space().n();
    let js = jets(field);
    Ok(pointwise_max(
        "pointwise_traceless_split",
        js.iter().map(|j| {
            let lhs = j.hessian_grad_pairing();
            let rhs = traceless_by_frame(j, n) + j.grad_sq() * j.laplacian(n) / (n * j.f);
            (lhs, rhs)
        }),
    ))
}

/// Nodewise `|T(dF⊗dF/F)|² = ((n−1)/n) F⁻²|∇F|⁴`.
pub fn pointwise_traceless_norm(field: &ZonalField) -> Result<IdentityCheck> {
    field.ensure_positive()?;
    let n = field.space().n();
    let js = jets(field);
    Ok(pointwise_max(
        "pointwise_traceless_norm",
        js.iter().map(|j| {
            let b = DiagTensor::grad_outer_over_value(j).traceless(n);
            (b.norm_sq(n), (n - 1.0) / n * (j.grad_sq() / j.f).powi(2))
        }),
    ))
}

/// All identities on one positive field.
pub fn all_identities(field: &ZonalField) -> Result<Vec<IdentityCheck>> {
    Ok(vec![
        divergence(field)?,
        integration_by_parts(field)?,
        bochner(field)?,
        weighted_laplacian_identity(field)?,
        hessian_pairing_identity(field)?,
        pointwise_traceless_split(field)?,
        pointwise_traceless_norm(field)?,
    ])
}
