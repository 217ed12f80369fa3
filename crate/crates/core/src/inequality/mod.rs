//! Bound constants, admissible ranges and signed-margin checkers.
//!
//! Sign convention: `margin = lhs − rhs`, so a nonnegative margin means the
//! inequality holds for the field under test.

mod checks;
mod constants;
mod counterexample;
mod ji_limit;

pub use checks::{
    check_del14, check_ji, check_logsobolev, check_modified_gamma2, check_poincare, check_rothaus,
    check_sobolev, check_weighted_gamma2, InequalityCase, MarginReport, TheoremId, MARGIN_FLOOR,
};
pub use constants::{
    constant_del14, constant_ji, constant_modified, constant_ode, constant_rothaus,
    constant_sobolev, constant_weighted, del14_admissible, modified_admissible, modified_gap_start,
    ode_admissible, ode_p_min, sobolev_admissible, sobolev_q_max, weighted_admissible,
    weighted_gap_end, RangePolicy,
};
pub use counterexample::{
    counterexample_field, run_counterexample, run_counterexample_with_base, AuxiliaryCheck,
    CounterexampleReport, COUNTEREXAMPLE_BASE,
};
pub use ji_limit::{ji_limit_convergence, JiLimitRow, JiLimitTable};
