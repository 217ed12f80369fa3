use std::borrow::Cow;
use std::sync::Arc;

use super::space::ZonalSpace;
use crate::error::{Error, Result};

/// Relative positivity threshold: powers and logarithms demand
/// `min(F) > EPS_POS · max|F|`.
pub const EPS_POS: f64 = 1e-8;

/// First and second `s`-derivatives at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// A zonal function on `Sⁿ`, stored as node values in `s = cos r`.
///
/// When the derivatives are known exactly (closed forms, spectral synthesis,
/// chain rule through pointwise maps) they travel with the field; otherwise
/// they are recovered from the values by the differentiation matrices.
#[derive(Debug, Clone)]
pub struct ZonalField {
    space: Arc<ZonalSpace>,
    values: Vec<f64>,
    derivs: Option<Derivatives>,
    min_value: f64,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Numeric(format!(
            "non-finite field value at node {i}"
        ))),
        None => Ok(()),
    }
}

impl ZonalField {
    pub fn from_values(space: &Arc<ZonalSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.order() {
            return Err(Error::Parameter(format!(
                "expected {} node values, got {}",
                space.order(),
                values.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self::build(space.clone(), values, None))
    }

    pub fn from_jet(
        space: &Arc<ZonalSpace>,
        values: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
    ) -> Result<Self> {
        let m = space.order();
        if values.len() != m || d1.len() != m || d2.len() != m {
            return Err(Error::Parameter(
                "jet length does not match grid order".into(),
            ));
        }
        check_finite(&values)?;
        check_finite(&d1)?;
        check_finite(&d2)?;
        Ok(Self::build(
            space.clone(),
            values,
            Some(Derivatives { d1, d2 }),
        ))
    }

    /// Samples `f(s) = [F, F', F'']` at the nodes.
    pub fn from_fn(space: &Arc<ZonalSpace>, f: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let m = space.order();
        let (mut v, mut d1, mut d2) = (
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
        );
        for &s in space.nodes() {
            let [a, b, c] = f(s);
            v.push(a);
            d1.push(b);
            d2.push(c);
        }
        Self::from_jet(space, v, d1, d2)
    }

    /// `Σ a_k φ_k` with exact derivatives.
    pub fn from_coefficients(space: &Arc<ZonalSpace>, coeffs: &[f64]) -> Result<Self> {
        let (v, d1, d2) = space.synthesize(coeffs);
        Self::from_jet(space, v, d1, d2)
    }

    pub fn constant(space: &Arc<ZonalSpace>, c: f64) -> Result<Self> {
        let m = space.order();
        Self::from_jet(space, vec![c; m], vec![0.0; m], vec![0.0; m])
    }

    /// `a + b·cos r`.
    pub fn eigenmode(space: &Arc<ZonalSpace>, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(space, |s| [a + b * s, b, 0.0])
    }

    fn build(space: Arc<ZonalSpace>, values: Vec<f64>, derivs: Option<Derivatives>) -> Self {
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            space,
            values,
            derivs,
            min_value,
        }
    }

    pub(crate) fn from_parts(space: &Arc<ZonalSpace>, values: Vec<f64>) -> Self {
        Self::build(space.clone(), values, None)
    }

    pub fn space(&self) -> &Arc<ZonalSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cached minimum node value.
    pub fn positivity_floor(&self) -> f64 {
        self.min_value
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn has_exact_derivatives(&self) -> bool {
        self.derivs.is_some()
    }

    pub fn derivatives(&self) -> Cow<'_, Derivatives> {
        match &self.derivs {
            Some(d) => Cow::Borrowed(d),
            None => {
                let ops = self.space.operators();
                Cow::Owned(Derivatives {
                    d1: ZonalSpace::apply(&ops.d1, &self.values),
                    d2: ZonalSpace::apply(&ops.d2, &self.values),
                })
            }
        }
    }

    /// Positivity test with the relative floor [`EPS_POS`].
    pub fn ensure_positive(&self) -> Result<()> {
        let floor = EPS_POS * self.max_abs();
        if self.min_value > floor && self.min_value > 0.0 {
            Ok(())
        } else {
            Err(Error::Positivity {
                min: self.min_value,
                floor,
            })
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::Parameter("fields live on different grids".into()))
        }
    }

    /// Nodewise `g(F)` given `[g, g', g'']` evaluated at `F`; chain rule on the jet.
    fn compose(&self, g: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let d = self.derivatives();
        let m = self.len();
        let (mut v, mut d1, mut d2) = (
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
        );
        for i in 0..m {
            let [g0, g1, g2] = g(self.values[i]);
            let f1 = d.d1[i];
            v.push(g0);
            d1.push(g1 * f1);
            d2.push(g1 * d.d2[i] + g2 * f1 * f1);
        }
        Self::from_jet(&self.space, v, d1, d2)
    }

    /// `F^a`, via `exp(a·ln F)`.
    pub fn powf(&self, a: f64) -> Result<Self> {
        self.ensure_positive()?;
        self.compose(|x| {
            let y = (a * x.ln()).exp();
            [y, a * y / x, a * (a - 1.0) * y / (x * x)]
        })
    }

    pub fn ln(&self) -> Result<Self> {
        self.ensure_positive()?;
        self.compose(|x| [x.ln(), 1.0 / x, -1.0 / (x * x)])
    }

    pub fn exp(&self) -> Result<Self> {
        self.compose(|x| {
            let y = x.exp();
            [y, y, y]
        })
    }

    /// `a + b·F`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        self.compose(|x| [a + b * x, b, 0.0])
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.affine(0.0, c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let (da, db) = (self.derivatives(), other.derivatives());
        let m = self.len();
        let (mut v, mut d1, mut d2) = (
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
        );
        for i in 0..m {
            let (a, b) = (self.values[i], other.values[i]);
            v.push(a * b);
            d1.push(da.d1[i] * b + a * db.d1[i]);
            d2.push(da.d2[i] * b + 2.0 * da.d1[i] * db.d1[i] + a * db.d2[i]);
        }
        Self::from_jet(&self.space, v, d1, d2)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        other.ensure_positive()?;
        self.mul(&other.powf(-1.0)?)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let (da, db) = (self.derivatives(), other.derivatives());
        let sum = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>();
        Self::from_jet(
            &self.space,
            sum(&self.values, &other.values),
            sum(&da.d1, &db.d1),
            sum(&da.d2, &db.d2),
        )
    }

    /// Nodewise map without derivative tracking, for integrands.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(&self.space, self.values.iter().map(|&x| f(x)).collect())
    }
}

/// Nodewise maps selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointwiseOp {
    Power(f64),
    Log,
    Exp,
}

/// Applies `op` nodewise; `Power` and `Log` demand positivity.
pub fn pointwise(field: &ZonalField, op: PointwiseOp) -> Result<ZonalField> {
    match op {
        PointwiseOp::Power(a) => field.powf(a),
        PointwiseOp::Log => field.ln(),
        PointwiseOp::Exp => field.exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonal::SphereDim;

    fn space(n: usize, order: usize) -> Arc<ZonalSpace> {
        ZonalSpace::new(SphereDim::new(n).unwrap(), order).unwrap()
    }

    #[test]
    fn power_of_one_is_one() {
        let sp = space(2, 16);
        let one = ZonalField::constant(&sp, 1.0).unwrap();
        for a in [-3.7, -1.0, 0.0, 0.5, 11.0] {
            let p = one.powf(a).unwrap();
            assert!(p.values().iter().all(|&x| (x - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn log_inverts_exp() {
        let sp = space(3, 32);
        let f = ZonalField::from_fn(&sp, |s| [s.sin(), s.cos(), -s.sin()]).unwrap();
        let back = f.exp().unwrap().ln().unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let (da, db) = (back.derivatives(), f.derivatives());
        for i in 0..32 {
            assert!((da.d1[i] - db.d1[i]).abs() < 1e-12);
            assert!((da.d2[i] - db.d2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn exponent_one_is_identity() {
        let sp = space(2, 24);
        let u = ZonalField::eigenmode(&sp, 2.0, 1.0).unwrap();
        let big_u = u.powf((3.0 - 1.0) / 2.0).unwrap();
        for (a, &s) in big_u.values().iter().zip(sp.nodes()) {
            assert!((a - (2.0 + s)).abs() < 1e-14);
        }
    }

    #[test]
    fn positivity_is_rejected_not_clamped() {
        let sp = space(2, 16);
        let f = ZonalField::eigenmode(&sp, 0.5, 1.0).unwrap();
        assert!(matches!(f.powf(0.5), Err(Error::Positivity { .. })));
        assert!(matches!(f.ln(), Err(Error::Positivity { .. })));
        let mut v = vec![1.0; 16];
        v[0] = 5e-9;
        let tiny = ZonalField::from_values(&sp, v).unwrap();
        assert!(tiny.ln().is_err());
        assert!(ZonalField::constant(&sp, 0.0).unwrap().ln().is_err());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let sp = space(2, 8);
        let mut v = vec![1.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(
            ZonalField::from_values(&sp, v),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn chain_rule_matches_matrix_derivatives() {
        let sp = space(3, 64);
        let u = ZonalField::from_fn(&sp, |s| [2.0 + s + 0.3 * s * s, 1.0 + 0.6 * s, 0.6]).unwrap();
        let p = u.powf(-1.7).unwrap();
        let exact = p.derivatives().into_owned();
        let raw = ZonalField::from_values(&sp, p.values().to_vec()).unwrap();
        let approx = raw.derivatives();
        for i in 0..64 {
            assert!((exact.d1[i] - approx.d1[i]).abs() < 1e-9 * exact.d1[i].abs().max(1.0));
            assert!((exact.d2[i] - approx.d2[i]).abs() < 1e-7 * exact.d2[i].abs().max(1.0));
        }
    }

    #[test]
    fn product_and_quotient() {
        let sp = space(2, 32);
        let a = ZonalField::eigenmode(&sp, 3.0, 1.0).unwrap();
        let b = ZonalField::eigenmode(&sp, 2.0, -1.0).unwrap();
        let q = a.mul(&b).unwrap().div(&b).unwrap();
        for (x, y) in q.values().iter().zip(a.values()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(q.derivatives().d2.iter().all(|x| x.abs() < 1e-12));
    }
}
