//! Exact-geometry calculus for zonal functions on the round sphere `Sⁿ`.

mod adaptive;
mod basis;
pub mod calculus;
mod field;
pub mod frame;
mod geometry;
pub mod identities;
mod quadrature;
mod space;

pub use adaptive::{refine, Refined, DEFAULT_ORDER, MAX_ORDER, REFINE_RTOL};
pub use basis::GegenbauerBasis;
pub use calculus::{
    grad_norm_sq, hessian_grad_pairing, hessian_norm_sq, integrate, laplacian, mean, ricci_term,
    traceless_pairing, PointJet,
};
pub use field::{pointwise, Derivatives, PointwiseOp, ZonalField, EPS_POS};
pub use geometry::{sphere_area, SphereDim};
pub use quadrature::{build_grid, QuadratureGrid, MIN_ORDER};
pub use space::{DiffOperators, ZonalSpace};
