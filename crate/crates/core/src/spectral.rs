//! Gegenbauer transforms and the exact heat propagator `e^{tΔ}`.
//!
//! The zonal Laplacian is diagonal in the orthonormal Gegenbauer basis with
//! eigenvalues `−k(k + n − 1)`, so the heat flow is a per-mode decay and no
//! time stepping is involved.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::zonal::{SphereDim, ZonalField, ZonalSpace};

/// Fraction of spectral energy allowed in the upper half of the modes
/// before a transform is flagged as under-resolved.
pub const TAIL_ENERGY_WARN: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectralCoeffs {
    pub dim: SphereDim,
    pub coeffs: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ a_k²`, equal to `∫F²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum()
    }

    /// Share of the energy carried by modes `k ≥ len/2`.
    pub fn tail_fraction(&self) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        self.coeffs[self.len() / 2..]
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            / total
    }

    /// Mean value `a₀ φ₀ = a₀ / √Vol`.
    pub fn mean(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0) / self.dim.volume().sqrt()
    }

    pub fn unit(dim: SphereDim, len: usize, k: usize) -> Self {
        let mut coeffs = vec![0.0; len];
        coeffs[k] = 1.0;
        Self { dim, coeffs }
    }
}

/// `λ_k = k(k + n − 1)`, the spectrum of `−Δ` on zonal functions.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EigenTable {
    pub eigenvalues: Vec<f64>,
}

impl EigenTable {
    pub fn new(dim: SphereDim, len: usize) -> Self {
        let n = dim.as_f64();
        Self {
            eigenvalues: (0..len).map(|k| k as f64 * (k as f64 + n - 1.0)).collect(),
        }
    }
}

/// First nonzero eigenvalue of `−Δ` on `Sⁿ`, which is `n`.
pub fn lambda1(dim: SphereDim) -> f64 {
    dim.as_f64()
}

/// Coefficients by quadrature projection; all `order` modes are kept.
pub fn forward_transform(field: &ZonalField) -> SpectralCoeffs {
    let space = field.space();
    let c = SpectralCoeffs {
        dim: space.dim(),
        coeffs: space.project(field.values()),
    };
    let tail = c.tail_fraction();
    if tail > TAIL_ENERGY_WARN {
        log::warn!(
            "field under-resolved on order {} grid: tail energy fraction {tail:e}",
            space.order()
        );
    }
    c
}

/// Synthesis at the nodes with exact derivatives.
pub fn inverse_transform(c: &SpectralCoeffs, space: &Arc<ZonalSpace>) -> Result<ZonalField> {
    if c.dim != space.dim() {
        return Err(Error::Parameter(
            "coefficient dimension does not match grid".into(),
        ));
    }
    ZonalField::from_coefficients(space, &c.coeffs)
}

/// `a_k ↦ a_k e^{−λ_k t}`.
pub fn heat_propagate(c: &SpectralCoeffs, t: f64) -> Result<SpectralCoeffs> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Parameter(format!(
            "flow time must be finite and >= 0, got {t}"
        )));
    }
    let table = EigenTable::new(c.dim, c.len());
    Ok(SpectralCoeffs {
        dim: c.dim,
        coeffs: c
            .coeffs
            .iter()
            .zip(&table.eigenvalues)
            .map(|(a, l)| if t == 0.0 { *a } else { a * (-l * t).exp() })
            .collect(),
    })
}

/// `max_i |u(t, s_i) − mean|`.
fn deviation(c: &SpectralCoeffs, space: &Arc<ZonalSpace>, t: f64) -> Result<f64> {
    let mut p = heat_propagate(c, t)?;
    p.coeffs[0] = 0.0;
    let (v, _, _) = space.synthesize(&p.coeffs);
    Ok(v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Smallest time with `‖u(T) − mean‖∞ < tol·mean` at the nodes.
///
/// The single-slowest-mode estimate `ln(‖u₀ − mean‖/(tol·mean))/λ₁` seeds a
/// bracket that is then bisected to relative precision `1e-10`.
pub fn flow_to_equilibrium(u0: &SpectralCoeffs, space: &Arc<ZonalSpace>, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!(
            "equilibrium tolerance must be > 0, got {tol}"
        )));
    }
    let mean = u0.mean();
    if !(mean > 0.0) {
        return Err(Error::Parameter(
            "equilibrium horizon needs positive mean".into(),
        ));
    }
    let target = tol * mean;
    let dev0 = deviation(u0, space, 0.0)?;
    if dev0 < target {
        return Ok(0.0);
    }
    let lambda = lambda1(u0.dim);
    let mut hi = ((dev0 / target).ln() / lambda).max(1e-6);
    let mut lo = 0.0;
    while deviation(u0, space, hi)? >= target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numeric("heat flow does not equilibrate".into()));
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if deviation(u0, space, mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Sampling times `0, t_min, t_min ρ, t_min ρ², …` up to and including the
/// first point at or beyond `horizon`.
pub fn geometric_times(t_min: f64, ratio: f64, horizon: f64) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(ratio > 1.0) {
        return Err(Error::Parameter(
            "time grid needs t_min > 0 and ratio > 1".into(),
        ));
    }
    let mut times = vec![0.0];
    if horizon <= 0.0 {
        return Ok(times);
    }
    let mut t = t_min;
    loop {
        times.push(t);
        if t >= horizon {
            break;
        }
        t *= ratio;
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonal::{calculus, integrate, laplacian};

    fn space(n: usize, order: usize) -> Arc<ZonalSpace> {
        ZonalSpace::new(SphereDim::new(n).unwrap(), order).unwrap()
    }

    #[test]
    fn lambda1_is_dimension() {
        for n in [2, 3, 10] {
            assert_eq!(lambda1(SphereDim::new(n).unwrap()), n as f64);
        }
        let t = EigenTable::new(SphereDim::new(4).unwrap(), 6);
        assert_eq!(t.eigenvalues[0], 0.0);
        assert_eq!(t.eigenvalues[1], 4.0);
        assert!(t.eigenvalues.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn transform_examples() {
        let sp = space(2, 32);
        let one = ZonalField::constant(&sp, 1.0).unwrap();
        let c = forward_transform(&one);
        assert!((c.coeffs[0] - sp.volume().sqrt()).abs() < 1e-13);
        assert!(c.coeffs[1..].iter().all(|a| a.abs() < 1e-13));
        let s = ZonalField::eigenmode(&sp, 0.0, 1.0).unwrap();
        let c = forward_transform(&s);
        assert!(c.coeffs[1].abs() > 0.1);
        for (k, a) in c.coeffs.iter().enumerate() {
            if k != 1 {
                assert!(a.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parseval_for_band_limited_fields() {
        let sp = space(3, 48);
        let c = SpectralCoeffs {
            dim: sp.dim(),
            coeffs: (0..48)
                .map(|k| if k < 20 { 1.0 / (k as f64 + 1.0) } else { 0.0 })
                .collect(),
        };
        let f = inverse_transform(&c, &sp).unwrap();
        let sq = f.map_values(|x| x * x);
        let int = integrate(&sq).unwrap();
        assert!((c.energy() - int).abs() < 1e-9 * int);
    }

    #[test]
    fn eigen_relation() {
        for n in [2usize, 3, 5] {
            let sp = space(n, 64);
            for k in 0..=32 {
                let e = inverse_transform(&SpectralCoeffs::unit(sp.dim(), 64, k), &sp).unwrap();
                let lap = laplacian(&e);
                let lam = (k * (k + n - 1)) as f64;
                let scale = e.max_abs() * lam.max(1.0);
                for (a, b) in lap.values().iter().zip(e.values()) {
                    assert!((a + lam * b).abs() <= 1e-8 * scale, "n={n} k={k}");
                }
                // and through the differentiation matrices
                let raw = ZonalField::from_values(&sp, e.values().to_vec()).unwrap();
                let lap_raw = laplacian(&raw);
                for (a, b) in lap_raw.values().iter().zip(e.values()) {
                    assert!((a + lam * b).abs() <= 1e-8 * scale, "raw n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn propagation_examples() {
        let sp = space(2, 32);
        let u0 = ZonalField::eigenmode(&sp, 1.0, 0.5).unwrap();
        let c = forward_transform(&u0);
        assert_eq!(heat_propagate(&c, 0.0).unwrap(), c);
        let u1 = inverse_transform(&heat_propagate(&c, 1.0).unwrap(), &sp).unwrap();
        for (v, &s) in u1.values().iter().zip(sp.nodes()) {
            assert!((v - (1.0 + 0.5 * (-2.0f64).exp() * s)).abs() < 1e-14);
        }
        for t in [0.1, 3.0, 50.0] {
            assert_eq!(heat_propagate(&c, t).unwrap().coeffs[0], c.coeffs[0]);
        }
        assert!(heat_propagate(&c, -1e-3).is_err());
        assert!(heat_propagate(&c, f64::NAN).is_err());
    }

    #[test]
    fn semigroup_and_mass() {
        let sp = space(3, 32);
        let u0 = ZonalField::from_fn(&sp, |s| [(1.3 * s).exp(), 0.0, 0.0]).unwrap();
        let c = forward_transform(&u0);
        let a = heat_propagate(&heat_propagate(&c, 0.3).unwrap(), 0.45).unwrap();
        let b = heat_propagate(&c, 0.75).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            // exp(−λt) carries rounding proportional to λt for the high modes
            assert!((x - y).abs() <= 1e-12 * x.abs() + 1e-300, "{x} {y}");
        }
        let m0 = integrate(&u0).unwrap();
        for t in [0.01, 0.5, 4.0] {
            let u = inverse_transform(&heat_propagate(&c, t).unwrap(), &sp).unwrap();
            assert!((integrate(&u).unwrap() - m0).abs() < 1e-12 * m0);
            assert!(u.positivity_floor() >= u0.positivity_floor() - 1e-9 * u0.max_abs());
        }
        let _ = calculus::jets(&u0);
    }

    #[test]
    fn equilibrium_horizon() {
        let sp = space(2, 32);
        let c = forward_transform(&ZonalField::constant(&sp, 2.0).unwrap());
        assert_eq!(flow_to_equilibrium(&c, &sp, 1e-6).unwrap(), 0.0);
        let (eps, tau) = (0.3, 1e-7);
        let c = forward_transform(&ZonalField::eigenmode(&sp, 1.0, eps).unwrap());
        let t = flow_to_equilibrium(&c, &sp, tau).unwrap();
        let smax = sp.nodes().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((t - (eps * smax / tau).ln() / 2.0).abs() < 1e-8);
        assert!((t - (eps / tau).ln() / 2.0).abs() < 0.05);
        let u = inverse_transform(&heat_propagate(&c, t).unwrap(), &sp).unwrap();
        let m0 = integrate(&inverse_transform(&c, &sp).unwrap()).unwrap();
        assert!((integrate(&u).unwrap() - m0).abs() < 1e-12 * m0);
    }

    #[test]
    fn geometric_time_grid() {
        let t = geometric_times(1e-3, 1.25, 1.0).unwrap();
        assert_eq!(t[0], 0.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(*t.last().unwrap() >= 1.0);
        assert!(t[t.len() - 2] < 1.0);
        assert_eq!(geometric_times(1e-3, 1.25, 0.0).unwrap(), vec![0.0]);
    }

    proptest::proptest! {
        #[test]
        fn roundtrip(coeffs in proptest::collection::vec(-1.0f64..1.0, 24)) {
            let sp = space(2, 32);
            let c = SpectralCoeffs { dim: sp.dim(), coeffs: coeffs.iter().copied().chain(std::iter::repeat(0.0)).take(32).collect() };
            let f = inverse_transform(&c, &sp).unwrap();
            let back = forward_transform(&f);
            let g = inverse_transform(&back, &sp).unwrap();
            for (a, b) in f.values().iter().zip(g.values()) {
                proptest::prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
