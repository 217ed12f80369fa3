//! Randomized invariants across the public API.

use gamma2lab_core::corpus::{exp_of_modes, log_coefficients, CorpusSpec};
use gamma2lab_core::flow::run_flow;
use gamma2lab_core::inequality::{InequalityCase, RangePolicy, TheoremId};
use gamma2lab_core::{SphereDim, ZonalSpace};
use proptest::prelude::*;

fn field(n: usize, seed: u64) -> gamma2lab_core::ZonalField {
    let space = ZonalSpace::new(SphereDim::new(n).unwrap(), 48).unwrap();
    let coeffs = log_coefficients(&CorpusSpec::with_seed(seed), 0);
    exp_of_modes(&space, &coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_conserves_mass_and_entropy_is_monotone(seed in any::<u64>(), n in 2usize..5, p in 1.05f64..2.0) {
        let u0 = field(n, seed);
        let traj = run_flow(&u0, p, &[0.0, 0.01, 0.1, 0.5, 1.0]).unwrap();
        prop_assert!(traj.mass_drift() < 1e-12);
        prop_assert!(traj.min_first_derivative() >= -1e-12);
        let ts: Vec<f64> = traj.records.iter().map(|r| r.entropy).collect();
        prop_assert!(ts.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }

    #[test]
    fn admissible_margins_are_nonnegative(seed in any::<u64>(), n in 2usize..5, s in -3.0f64..0.0) {
        let v = field(n, seed);
        let case = InequalityCase::new(TheoremId::Weighted, n, Some(s), RangePolicy::Enforce).unwrap();
        let r = case.evaluate(&v).unwrap();
        prop_assert!(r.relative_margin >= -1e-8, "{r:?}");
    }

    #[test]
    fn margins_are_scale_invariant(seed in any::<u64>(), c in 0.1f64..10.0) {
        let v = field(3, seed);
        let case = InequalityCase::new(TheoremId::Poincare, 3, None, RangePolicy::Enforce).unwrap();
        let a = case.evaluate(&v).unwrap().relative_margin;
        let b = case.evaluate(&v.scale(c).unwrap()).unwrap().relative_margin;
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }
}
