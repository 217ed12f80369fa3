use serde::Serialize;

use super::{minimize_ratio, ProbeFunctional, ProbeOptions, ProbeResult, RatioProblem};
use crate::error::Result;
use crate::inequality::RangePolicy;

/// Admissible minima may undershoot the constant by at most this much.
pub const LOWER_BOUND_SLACK: f64 = 1e-6;
/// Relative gap still called sharp.
pub const SHARP_GAP: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessRow {
    pub functional: &'static str,
    pub parameter: Option<f64>,
    pub constant: f64,
    pub min_ratio: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub exploratory: bool,
    /// `gap ≥ −1e-6`; only meaningful when not exploratory.
    pub lower_bound_ok: bool,
    pub sharp: bool,
    pub result: ProbeResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessTable {
    pub n: usize,
    pub rows: Vec<SharpnessRow>,
    /// Every admissible row respects the lower bound.
    pub pass: bool,
}

/// Minimizes each functional in `sweep` and tabulates the gap to the
/// theorem constant, sorted by functional then parameter.
pub fn sharpness_report(
    n: usize,
    sweep: &[ProbeFunctional],
    order: usize,
    modes: usize,
    policy: RangePolicy,
    options: &ProbeOptions,
) -> Result<SharpnessTable> {
    let mut rows = Vec::with_capacity(sweep.len());
    for &f in sweep {
        let problem = RatioProblem::new(f, n, order, modes, policy)?;
        let result = minimize_ratio(&problem, options)?;
        let gap = result.min_ratio - result.constant;
        let relative_gap = gap / result.constant.abs().max(1e-300);
        rows.push(SharpnessRow {
            functional: f.name(),
            parameter: f.parameter(),
            constant: result.constant,
            min_ratio: result.min_ratio,
            gap,
            relative_gap,
            exploratory: result.exploratory,
            lower_bound_ok: gap >= -LOWER_BOUND_SLACK,
            sharp: relative_gap.abs() <= SHARP_GAP,
            result,
        });
    }
    rows.sort_by(|a, b| {
        a.functional.cmp(b.functional).then(
            a.parameter
                .unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&b.parameter.unwrap_or(f64::NEG_INFINITY)),
        )
    });
    let pass = rows.iter().all(|r| r.exploratory || r.lower_bound_ok);
    Ok(SharpnessTable { n, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep_is_an_empty_passing_table() {
        let t = sharpness_report(
            2,
            &[],
            64,
            8,
            RangePolicy::Enforce,
            &ProbeOptions::default(),
        )
        .unwrap();
        assert!(t.rows.is_empty() && t.pass);
    }

    #[test]
    fn rows_are_sorted_and_constants_collapse() {
        let sweep = [
            ProbeFunctional::Weighted { s: 3.0 },
            ProbeFunctional::Weighted { s: -4.0 },
            ProbeFunctional::Weighted { s: 0.0 },
        ];
        let o = ProbeOptions {
            multistarts: 2,
            max_iter: 60,
            seed: 1,
        };
        let t = sharpness_report(2, &sweep, 64, 6, RangePolicy::Enforce, &o).unwrap();
        let params: Vec<f64> = t.rows.iter().map(|r| r.parameter.unwrap()).collect();
        assert_eq!(params, vec![-4.0, 0.0, 3.0]);
        for r in &t.rows {
            assert!((r.constant - 2.0).abs() < 1e-12);
            assert!(r.lower_bound_ok, "{r:?}");
        }
        assert!(t.pass);
    }
}
