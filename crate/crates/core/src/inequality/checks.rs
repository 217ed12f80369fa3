use serde::{Deserialize, Serialize};

use super::constants::*;
use crate::entropy::{
    fisher_log, gamma2_log, modified_weighted_gamma2, shannon_excess, weighted_dirichlet,
    weighted_gamma2,
};
use crate::error::{Error, Result};
use crate::spectral::lambda1;
use crate::tolerances::SCALE_FLOOR;
use crate::zonal::{grad_norm_sq, mean, ZonalField};

/// Admissible cases are expected to keep `relative_margin ≥ MARGIN_FLOOR`.
pub const MARGIN_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Ji,
    Weighted,
    Modified,
    Sobolev,
    Logsob,
    Poincare,
    Rothaus,
    Del14,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        Self::Ji,
        Self::Weighted,
        Self::Modified,
        Self::Sobolev,
        Self::Logsob,
        Self::Poincare,
        Self::Rothaus,
        Self::Del14,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ji => "ji",
            Self::Weighted => "weighted",
            Self::Modified => "modified",
            Self::Sobolev => "sobolev",
            Self::Logsob => "logsob",
            Self::Poincare => "poincare",
            Self::Rothaus => "rothaus",
            Self::Del14 => "del14",
        }
    }

    /// Whether the theorem is indexed by a real parameter (`s` or `q`).
    pub fn takes_parameter(self) -> bool {
        matches!(
            self,
            Self::Weighted | Self::Modified | Self::Sobolev | Self::Del14
        )
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parameter(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub theorem: TheoremId,
    pub n: usize,
    pub parameter: Option<f64>,
    pub lhs: f64,
    pub constant: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relative_margin: f64,
    pub exploratory: bool,
    pub order: usize,
    pub seed: Option<u64>,
}

impl MarginReport {
    pub(crate) fn new(
        theorem: TheoremId,
        field: &ZonalField,
        parameter: Option<f64>,
        lhs: f64,
        constant: f64,
        rhs: f64,
        exploratory: bool,
    ) -> Result<Self> {
        let margin = lhs - rhs;
        if !margin.is_finite() {
            return Err(Error::Numeric(format!("{theorem} margin is not finite")));
        }
        let scale = lhs.abs().max(rhs.abs()).max(SCALE_FLOOR);
        Ok(Self {
            theorem,
            n: field.space().dim().get(),
            parameter,
            lhs,
            constant,
            rhs,
            margin,
            relative_margin: margin / scale,
            exploratory,
            order: field.space().order(),
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// `relative_margin ≥ MARGIN_FLOOR`.
    pub fn holds(&self) -> bool {
        self.relative_margin >= MARGIN_FLOOR
    }
}

/// One theorem instance; the field under test is supplied at evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCase {
    pub theorem: TheoremId,
    pub n: usize,
    pub lambda1: f64,
    pub parameter: Option<f64>,
    pub policy: RangePolicy,
}

impl InequalityCase {
    pub fn new(
        theorem: TheoremId,
        n: usize,
        parameter: Option<f64>,
        policy: RangePolicy,
    ) -> Result<Self> {
        if theorem.takes_parameter() && parameter.is_none() {
            return Err(Error::Parameter(format!("{theorem} needs a parameter")));
        }
        let case = Self {
            theorem,
            n,
            lambda1: n as f64,
            parameter: if theorem.takes_parameter() {
                parameter
            } else {
                None
            },
            policy,
        };
        case.constant()?;
        Ok(case)
    }

    /// The bound constant, after range validation.
    pub fn constant(&self) -> Result<f64> {
        let (n, l, pol) = (self.n, self.lambda1, self.policy);
        let x = self.parameter.unwrap_or(f64::NAN);
        match self.theorem {
            TheoremId::Ji | TheoremId::Logsob => constant_ji(n, l),
            TheoremId::Rothaus => constant_rothaus(n, l),
            TheoremId::Weighted => constant_weighted(n, l, x, pol),
            TheoremId::Modified => constant_modified(n, l, x, pol),
            TheoremId::Sobolev => constant_sobolev(n, l, x, pol),
            TheoremId::Poincare => constant_sobolev(n, l, 1.0, pol),
            TheoremId::Del14 => constant_del14(n, l, x, pol),
        }
    }

    pub fn evaluate(&self, field: &ZonalField) -> Result<MarginReport> {
        let got = field.space().dim().get();
        if got != self.n {
            return Err(Error::Parameter(format!(
                "case is on S^{}, field on S^{got}",
                self.n
            )));
        }
        let x = self.parameter.unwrap_or(f64::NAN);
        match self.theorem {
            TheoremId::Ji => check_ji(field),
            TheoremId::Logsob => check_logsobolev(field),
            TheoremId::Rothaus => check_rothaus(field),
            TheoremId::Weighted => check_weighted_gamma2(field, x, self.policy),
            TheoremId::Modified => check_modified_gamma2(field, x, self.policy),
            TheoremId::Sobolev => check_sobolev(field, x, self.policy),
            TheoremId::Poincare => check_poincare(field),
            TheoremId::Del14 => check_del14(field, x, self.policy),
        }
    }
}

fn sphere(field: &ZonalField) -> (usize, f64) {
    let dim = field.space().dim();
    (dim.get(), lambda1(dim))
}

/// `∫ v^s Γ₂(v) ≥ C ∫ v^s |∇v|²`.
pub fn check_weighted_gamma2(v: &ZonalField, s: f64, policy: RangePolicy) -> Result<MarginReport> {
    let (n, l1) = sphere(v);
    let c = constant_weighted(n, l1, s, policy)?;
    let lhs = weighted_gamma2(v, s)?;
    let rhs = c * weighted_dirichlet(v, s)?;
    let exploratory = !weighted_admissible(n, s);
    MarginReport::new(TheoremId::Weighted, v, Some(s), lhs, c, rhs, exploratory)
}

/// `∫ v^s (Γ₂(v) − v⁻¹|∇v|²Δv) ≥ C ∫ v^s |∇v|²`.
pub fn check_modified_gamma2(v: &ZonalField, s: f64, policy: RangePolicy) -> Result<MarginReport> {
    let (n, l1) = sphere(v);
    let c = constant_modified(n, l1, s, policy)?;
    let lhs = modified_weighted_gamma2(v, s)?;
    let rhs = c * weighted_dirichlet(v, s)?;
    let exploratory = !modified_admissible(n, s);
    MarginReport::new(TheoremId::Modified, v, Some(s), lhs, c, rhs, exploratory)
}

/// `∫ f Γ₂(log f) ≥ C_Ji ∫ f |∇ log f|²`.
pub fn check_ji(f: &ZonalField) -> Result<MarginReport> {
    let (n, l1) = sphere(f);
    let c = constant_ji(n, l1)?;
    let lhs = gamma2_log(f)?;
    let rhs = c * fisher_log(f)?;
    MarginReport::new(TheoremId::Ji, f, None, lhs, c, rhs, false)
}

/// `⨏|∇v|² ≥ C/(q−2)·((⨏v^q)^{2/q} − ⨏v²)`.
pub fn check_sobolev(v: &ZonalField, q: f64, policy: RangePolicy) -> Result<MarginReport> {
    let (n, l1) = sphere(v);
    let c = constant_sobolev(n, l1, q, policy)?;
    let (lhs, gap) = sobolev_terms(v, q)?;
    let exploratory = !sobolev_admissible(n, q);
    MarginReport::new(
        TheoremId::Sobolev,
        v,
        Some(q),
        lhs,
        c,
        c / (q - 2.0) * gap,
        exploratory,
    )
}

/// The `q = 1` member: `⨏|∇v|² ≥ λ₁ (⨏v² − (⨏v)²)`.
pub fn check_poincare(v: &ZonalField) -> Result<MarginReport> {
    let (n, l1) = sphere(v);
    let c = constant_sobolev(n, l1, 1.0, RangePolicy::Enforce)?;
    let (lhs, gap) = sobolev_terms(v, 1.0)?;
    MarginReport::new(TheoremId::Poincare, v, Some(1.0), lhs, c, -c * gap, false)
}

/// Same left side and bracket as the Sobolev family, with the comparison
/// constant; the bracket uses `⨏v²` as in every sibling inequality.
pub fn check_del14(v: &ZonalField, q: f64, policy: RangePolicy) -> Result<MarginReport> {
    let (n, l1) = sphere(v);
    let c = constant_del14(n, l1, q, policy)?;
    let (lhs, gap) = sobolev_terms(v, q)?;
    let exploratory = !del14_admissible(n, q);
    MarginReport::new(
        TheoremId::Del14,
        v,
        Some(q),
        lhs,
        c,
        c / (q - 2.0) * gap,
        exploratory,
    )
}

/// `(⨏|∇v|², (⨏v^q)^{2/q} − ⨏v²)`.
fn sobolev_terms(v: &ZonalField, q: f64) -> Result<(f64, f64)> {
    v.ensure_positive()?;
    let grad = mean(&grad_norm_sq(v))?;
    let lq = mean(&v.powf(q)?)?.powf(2.0 / q);
    let l2 = mean(&v.map_values(|x| x * x))?;
    Ok((grad, lq - l2))
}

/// `⨏ f|∇log f|² ≥ 2C (⨏ f log f − ⨏f log ⨏f)` at the Ji constant.
pub fn check_logsobolev(f: &ZonalField) -> Result<MarginReport> {
    let (n, l1) = sphere(f);
    logsobolev_at(f, TheoremId::Logsob, constant_ji(n, l1)?)
}

/// Log-Sobolev form at the Rothaus constant.
pub fn check_rothaus(f: &ZonalField) -> Result<MarginReport> {
    let (n, l1) = sphere(f);
    logsobolev_at(f, TheoremId::Rothaus, constant_rothaus(n, l1)?)
}

fn logsobolev_at(f: &ZonalField, theorem: TheoremId, c: f64) -> Result<MarginReport> {
    let vol = f.space().volume();
    let lhs = fisher_log(f)? / vol;
    // ⨏ f log f − m log m, free of the cancellation in the difference
    let ent = -shannon_excess(f)? / vol;
    MarginReport::new(theorem, f, None, lhs, c, 2.0 * c * ent, false)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corpus::{corpus, CorpusSpec};
    use crate::zonal::{SphereDim, ZonalSpace};

    const E: RangePolicy = RangePolicy::Enforce;

    fn space(n: usize) -> Arc<ZonalSpace> {
        ZonalSpace::new(SphereDim::new(n).unwrap(), 64).unwrap()
    }

    #[test]
    fn constants_give_zero_margin() {
        let sp = space(3);
        let one = ZonalField::constant(&sp, 1.0).unwrap();
        for r in [
            check_ji(&one).unwrap(),
            check_weighted_gamma2(&one, -3.0, E).unwrap(),
            check_modified_gamma2(&one, 4.0, E).unwrap(),
            check_sobolev(&one, 1.5, E).unwrap(),
            check_logsobolev(&one).unwrap(),
            check_poincare(&one).unwrap(),
            check_del14(&one, 5.0, E).unwrap(),
        ] {
            assert!(r.margin.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn first_eigenmode_is_an_equality_case() {
        for n in [2, 3, 5] {
            let sp = space(n);
            let v = ZonalField::eigenmode(&sp, 2.0, 0.7).unwrap();
            let r = check_weighted_gamma2(&v, 0.0, E).unwrap();
            assert!(r.relative_margin.abs() < 1e-8, "{r:?}");
            let v = ZonalField::eigenmode(&sp, 1.0, 0.01).unwrap();
            let r = check_sobolev(&v, 1.0, E).unwrap();
            assert!(r.relative_margin.abs() < 1e-8, "{r:?}");
            let r = check_poincare(&v).unwrap();
            assert!(r.relative_margin.abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn corpus_margins_are_nonnegative() {
        for n in [2, 3] {
            let sp = space(n);
            let fields = corpus(&sp, &CorpusSpec::default(), 12).unwrap();
            for v in &fields {
                assert!(check_ji(v).unwrap().holds());
                assert!(check_logsobolev(v).unwrap().holds());
                assert!(check_rothaus(v).unwrap().holds());
                for s in [-8.0, -1.0, 0.0, weighted_gap_end(n), 5.0] {
                    assert!(check_weighted_gamma2(v, s, E).unwrap().holds());
                }
                for s in [modified_gap_start(n) - 1.0, 2.0, 6.0] {
                    assert!(check_modified_gamma2(v, s, E).unwrap().holds());
                }
                for q in [1.0, 1.5, 2.5, sobolev_q_max(n)] {
                    assert!(check_sobolev(v, q, E).unwrap().holds());
                }
            }
        }
    }

    #[test]
    fn ji_margin_is_homogeneous() {
        let sp = space(2);
        let f = corpus(&sp, &CorpusSpec::with_seed(3), 1).unwrap().remove(0);
        let base = check_ji(&f).unwrap().margin;
        for c in [0.1, 3.0, 250.0] {
            let scaled = check_ji(&f.scale(c).unwrap()).unwrap().margin;
            assert!(
                (scaled - c * base).abs() <= 1e-10 * (c * base).abs(),
                "{scaled} vs {}",
                c * base
            );
        }
    }

    #[test]
    fn sobolev_approaches_logsobolev_as_q_tends_to_two() {
        let sp = space(3);
        let v = corpus(&sp, &CorpusSpec::with_seed(11), 1)
            .unwrap()
            .remove(0);
        let f = v.map_values(|x| x * x);
        let f = ZonalField::from_values(&sp, f.values().to_vec()).unwrap();
        // With f = v², the logarithmic form is four times the q → 2 Sobolev form.
        let target = check_logsobolev(&f).unwrap().rhs / 4.0;
        let mut errs = Vec::new();
        for h in [1e-2, 1e-3] {
            let up = check_sobolev(&v, 2.0 + h, E).unwrap().rhs;
            let down = check_sobolev(&v, 2.0 - h, E).unwrap().rhs;
            errs.push(
                ((up - target) / target)
                    .abs()
                    .max(((down - target) / target).abs()),
            );
        }
        assert!(errs[0] < 0.05 && errs[1] < errs[0] / 5.0, "{errs:?}");
    }

    #[test]
    fn case_dispatch_and_parsing() {
        assert_eq!("Del14".parse::<TheoremId>().unwrap(), TheoremId::Del14);
        assert!("nope".parse::<TheoremId>().is_err());
        assert!(InequalityCase::new(TheoremId::Weighted, 2, None, E).is_err());
        assert!(InequalityCase::new(TheoremId::Weighted, 2, Some(1.0), E).is_err());
        let case = InequalityCase::new(TheoremId::Weighted, 2, Some(1.0), RangePolicy::Exploratory)
            .unwrap();
        let sp = space(2);
        let v = ZonalField::eigenmode(&sp, 2.0, 0.5).unwrap();
        let r = case.evaluate(&v).unwrap();
        assert!(r.exploratory);
        assert!(case
            .evaluate(&ZonalField::constant(&space(3), 1.0).unwrap())
            .is_err());
    }
}
