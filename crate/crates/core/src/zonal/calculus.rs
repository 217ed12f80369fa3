//! Pointwise geometric quantities of zonal functions, in `s = cos r`.
//!
//! With `σ = 1 − s²` and `F' = dF/ds`:
//!
//! | quantity            | s-form                                  |
//! |---------------------|-----------------------------------------|
//! | `|∇F|²`             | `σ F'²`                                 |
//! | `ΔF`                | `σ F'' − n s F'`                        |
//! | `∇²F` radial        | `σ F'' − s F'`                          |
//! | `∇²F` tangential    | `−s F'` (each of the `n − 1` directions)|
//!
//! None of these has a pole at `s = ±1`, and all nodes are interior anyway.

use super::field::ZonalField;
use crate::error::{Error, Result};

/// Value and `s`-derivatives of a zonal function at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub s: f64,
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

impl PointJet {
    #[inline]
    pub fn sigma(&self) -> f64 {
        1.0 - self.s * self.s
    }

    #[inline]
    pub fn grad_sq(&self) -> f64 {
        self.sigma() * self.d1 * self.d1
    }

    #[inline]
    pub fn laplacian(&self, n: f64) -> f64 {
        self.sigma() * self.d2 - n * self.s * self.d1
    }

    /// Hessian eigenvalue along `∂_r` (`f''(r)`).
    #[inline]
    pub fn hessian_radial(&self) -> f64 {
        self.sigma() * self.d2 - self.s * self.d1
    }

    /// Hessian eigenvalue along the `n − 1` tangential directions (`cot r · f'(r)`).
    #[inline]
    pub fn hessian_tangential(&self) -> f64 {
        -self.s * self.d1
    }

    #[inline]
    pub fn hessian_sq(&self, n: f64) -> f64 {
        let (hr, ht) = (self.hessian_radial(), self.hessian_tangential());
        hr * hr + (n - 1.0) * ht * ht
    }

    /// `|∇²F|² + Ric(∇F, ∇F)` with `Ric = (n − 1)g`.
    #[inline]
    pub fn gamma2(&self, n: f64) -> f64 {
        self.hessian_sq(n) + (n - 1.0) * self.grad_sq()
    }

    /// `∇²F(∇F, ∇F) / F`.
    #[inline]
    pub fn hessian_grad_pairing(&self) -> f64 {
        self.hessian_radial() * self.grad_sq() / self.f
    }
}

/// Iterates the node jets of a field.
pub fn jets(field: &ZonalField) -> Vec<PointJet> {
    let d = field.derivatives();
    field
        .space()
        .nodes()
        .iter()
        .zip(field.values())
        .zip(d.d1.iter().zip(&d.d2))
        .map(|((&s, &f), (&d1, &d2))| PointJet { s, f, d1, d2 })
        .collect()
}

fn from_jets(field: &ZonalField, f: impl Fn(&PointJet) -> f64) -> ZonalField {
    let values = jets(field).iter().map(f).collect();
    ZonalField::from_parts(field.space(), values)
}

/// `∫_{Sⁿ} F`.
pub fn integrate(field: &ZonalField) -> Result<f64> {
    let v = field.space().grid().integrate_values(field.values());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric("integral is not finite".into()))
    }
}

/// `⨏_{Sⁿ} F = ∫F / Vol(Sⁿ)`.
pub fn mean(field: &ZonalField) -> Result<f64> {
    Ok(integrate(field)? / field.space().volume())
}

/// Weighted node sum of `f(jet)` without materializing a field.
pub(crate) fn integrate_jets(field: &ZonalField, f: impl Fn(&PointJet) -> f64) -> Result<f64> {
    let w = field.space().weights();
    let v: f64 = jets(field).iter().zip(w).map(|(j, w)| w * f(j)).sum();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric("integral is not finite".into()))
    }
}

pub fn laplacian(field: &ZonalField) -> ZonalField {
    let n = field.space().n();
    from_jets(field, |j| j.laplacian(n))
}

pub fn grad_norm_sq(field: &ZonalField) -> ZonalField {
    from_jets(field, PointJet::grad_sq)
}

pub fn hessian_norm_sq(field: &ZonalField) -> ZonalField {
    let n = field.space().n();
    from_jets(field, |j| j.hessian_sq(n))
}

/// `Ric(∇F, ∇F) = (n − 1)|∇F|²` on the unit sphere.
pub fn ricci_term(field: &ZonalField) -> ZonalField {
    let ric = field.space().n() - 1.0;
    from_jets(field, |j| ric * j.grad_sq())
}

/// `∇²F(∇F, ∇F)/F`; requires `F > 0`.
pub fn hessian_grad_pairing(field: &ZonalField) -> Result<ZonalField> {
    field.ensure_positive()?;
    Ok(from_jets(field, PointJet::hessian_grad_pairing))
}

/// `⟨∇²F − (ΔF/n)g, dF⊗dF/F − (|∇F|²/(nF))g⟩`, assembled as
/// `hessian_grad_pairing − ΔF·|∇F|²/(nF)`.
pub fn traceless_pairing(field: &ZonalField) -> Result<ZonalField> {
    field.ensure_positive()?;
    let n = field.space().n();
    Ok(from_jets(field, |j| {
        j.hessian_grad_pairing() - j.laplacian(n) * j.grad_sq() / (n * j.f)
    }))
}
