use std::sync::Arc;

use serde::Serialize;

use super::geometry::SphereDim;
use super::space::ZonalSpace;
use crate::error::Result;

pub const DEFAULT_ORDER: usize = 64;
pub const MAX_ORDER: usize = 512;
pub const REFINE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Refined {
    pub value: f64,
    /// Grid order of the accepted value.
    pub order: usize,
    /// `|value(order) − value(order/2)|`, the doubling error estimate.
    pub error_estimate: f64,
    pub converged: bool,
}

/// Evaluates `f` on grids of order 64, 128, … until two successive values
/// agree to [`REFINE_RTOL`] relative, capped at [`MAX_ORDER`].
pub fn refine<F>(dim: SphereDim, start: usize, f: F) -> Result<Refined>
where
    F: Fn(&Arc<ZonalSpace>) -> Result<f64>,
{
    let mut order = start.max(super::quadrature::MIN_ORDER);
    let mut prev = f(&ZonalSpace::new(dim, order)?)?;
    loop {
        let next_order = order * 2;
        if next_order > MAX_ORDER {
            return Ok(Refined {
                value: prev,
                order,
                error_estimate: f64::NAN,
                converged: false,
            });
        }
        let next = f(&ZonalSpace::new(dim, next_order)?)?;
        let err = (next - prev).abs();
        if err <= REFINE_RTOL * next.abs().max(prev.abs()) || err == 0.0 {
            return Ok(Refined {
                value: next,
                order: next_order,
                error_estimate: err,
                converged: true,
            });
        }
        prev = next;
        order = next_order;
    }
}
