//! Recovery of the Ji bound from the weighted family as `s → −∞`: apply the
//! weighted inequality to `w_s = 1 − v/s` with `v = −log f` and multiply
//! through by `s²`.

use serde::Serialize;

use super::constants::{constant_ji, constant_weighted, RangePolicy};
use crate::entropy::{fisher_log, gamma2_log, weighted_dirichlet, weighted_gamma2};
use crate::error::{Error, Result};
use crate::zonal::ZonalField;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JiLimitRow {
    pub s: f64,
    /// `s² ∫ w^s Γ₂(w)`
    pub lhs: f64,
    /// `s² ∫ w^s |∇w|²`
    pub dirichlet: f64,
    pub constant: f64,
    /// `(n−1)²ns/((n+2)(ns−4))`
    pub factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JiLimitTable {
    pub lambda1: f64,
    pub rows: Vec<JiLimitRow>,
    /// The `s = −∞` column: `gamma2_log`, `fisher_log`, Ji constant, `(n−1)²/(n+2)`.
    pub limit: JiLimitRow,
    /// Fitted `κ` in `|X(s) − X(−∞)| ~ |s|^{−κ}`; `None` when the
    /// differences vanish.
    pub lhs_rate: Option<f64>,
    pub dirichlet_rate: Option<f64>,
    pub constant_rate: Option<f64>,
    pub factor_rate: Option<f64>,
}

pub fn ji_limit_convergence(f: &ZonalField, s_list: &[f64], lambda1: f64) -> Result<JiLimitTable> {
    f.ensure_positive()?;
    let n = f.space().dim().get();
    let nf = n as f64;
    let log_f = f.ln()?;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        if !(s < 0.0) || !s.is_finite() {
            return Err(Error::Parameter(format!(
                "limit sequence needs finite s < 0, got {s}"
            )));
        }
        // w = 1 − v/s = 1 + log f / s
        let w = log_f.affine(1.0, 1.0 / s)?;
        if w.values().iter().any(|&x| x <= 0.0) {
            return Err(Error::Range {
                what: "s",
                value: s,
                range: "1 + log f / s > 0 everywhere".into(),
            });
        }
        rows.push(JiLimitRow {
            s,
            lhs: s * s * weighted_gamma2(&w, s)?,
            dirichlet: s * s * weighted_dirichlet(&w, s)?,
            constant: constant_weighted(n, lambda1, s, RangePolicy::Enforce)?,
            factor: (nf - 1.0).powi(2) * nf * s / ((nf + 2.0) * (nf * s - 4.0)),
        });
    }
    let limit = JiLimitRow {
        s: f64::NEG_INFINITY,
        lhs: gamma2_log(f)?,
        dirichlet: fisher_log(f)?,
        constant: constant_ji(n, lambda1)?,
        factor: (nf - 1.0).powi(2) / (nf + 2.0),
    };
    let rate = |pick: fn(&JiLimitRow) -> f64| fit_rate(&rows, pick(&limit), pick);
    Ok(JiLimitTable {
        lambda1,
        lhs_rate: rate(|r| r.lhs),
        dirichlet_rate: rate(|r| r.dirichlet),
        constant_rate: rate(|r| r.constant),
        factor_rate: rate(|r| r.factor),
        rows,
        limit,
    })
}

/// Least-squares slope of `log|X − X∞|` against `log|s|`, negated.
fn fit_rate(rows: &[JiLimitRow], target: f64, pick: fn(&JiLimitRow) -> f64) -> Option<f64> {
    let scale = target.abs().max(1e-300);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let d = (pick(r) - target).abs();
            (d > 1e-14 * scale).then(|| (r.s.abs().ln(), d.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonal::{SphereDim, ZonalSpace};

    const S_LIST: [f64; 4] = [-10.0, -100.0, -1000.0, -10000.0];

    #[test]
    fn constant_density_gives_zero_rows() {
        let sp = ZonalSpace::new(SphereDim::new(2).unwrap(), 32).unwrap();
        let f = ZonalField::constant(&sp, 1.0).unwrap();
        let t = ji_limit_convergence(&f, &S_LIST, 2.0).unwrap();
        for r in &t.rows {
            assert!(r.lhs.abs() < 1e-12 && r.dirichlet.abs() < 1e-12);
        }
        assert!(t.lhs_rate.is_none());
    }

    #[test]
    fn first_order_convergence() {
        for n in [2, 3] {
            let sp = ZonalSpace::new(SphereDim::new(n).unwrap(), 64).unwrap();
            let f = ZonalField::from_fn(&sp, |x| {
                let e = (0.5 * x).exp();
                [e, 0.5 * e, 0.25 * e]
            })
            .unwrap();
            let t = ji_limit_convergence(&f, &S_LIST, n as f64).unwrap();
            for rate in [t.lhs_rate, t.dirichlet_rate, t.factor_rate] {
                let r = rate.unwrap();
                assert!((r - 1.0).abs() < 0.05, "rate {r}");
            }
            // sphere collapse: every weighted constant already equals n
            assert!(t.constant_rate.is_none());
            let last = t.rows.last().unwrap();
            assert!((last.lhs - t.limit.lhs).abs() < 1e-3 * t.limit.lhs.abs());

            let generic = ji_limit_convergence(&f, &S_LIST, n as f64 + 1.0).unwrap();
            assert!((generic.constant_rate.unwrap() - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn rejects_nonpositive_weight() {
        let sp = ZonalSpace::new(SphereDim::new(2).unwrap(), 32).unwrap();
        let f = ZonalField::from_fn(&sp, |x| {
            let e = (20.0 * x).exp();
            [e, 20.0 * e, 400.0 * e]
        })
        .unwrap();
        assert!(ji_limit_convergence(&f, &[-5.0], 2.0).is_err());
        assert!(ji_limit_convergence(&f, &[3.0], 2.0).is_err());
    }
}
