//! Gauss–Jacobi quadrature for the zonal measure on `Sⁿ`.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the
//! Gegenbauer recurrence (Golub–Welsch), polished by Newton steps on the
//! degree-`order` orthonormal polynomial. Weights use the Christoffel form
//! `w_i = 1 / Σ_{k<order} φ_k(s_i)²`, which carries the full `Vol(Sⁿ)`
//! normalization of the orthonormal basis.

use nalgebra::DMatrix;
use serde::Serialize;

use super::basis::GegenbauerBasis;
use super::geometry::SphereDim;
use crate::error::{Error, Result};

/// Smallest accepted node count.
pub const MIN_ORDER: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    dim: SphereDim,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Vol(Sⁿ)` from the closed form.
    pub fn volume(&self) -> f64 {
        self.dim.volume()
    }

    /// `Σ w_i F(s_i)`.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, &s)| w * f(s))
            .sum()
    }
}

/// Gauss–Jacobi rule with weight `ω_{n−1}(1 − s²)^{(n−2)/2}`, exact for
/// polynomials of degree `≤ 2·order − 1`.
pub fn build_grid(dim: SphereDim, order: usize) -> Result<QuadratureGrid> {
    if order < MIN_ORDER {
        return Err(Error::Parameter(format!(
            "grid order must be >= {MIN_ORDER}, got {order}"
        )));
    }
    let basis = GegenbauerBasis::new(dim, order);

    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = basis.recurrence(k);
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    for s in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = basis.eval_mode(order, *s);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *s -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
    }

    let mut values = vec![0.0; order];
    let mut d1 = vec![0.0; order];
    let mut d2 = vec![0.0; order];
    let weights = nodes
        .iter()
        .map(|&s| {
            basis.eval_jet(s, &mut values, &mut d1, &mut d2);
            values.iter().map(|v| v * v).sum::<f64>().recip()
        })
        .collect::<Vec<_>>();

    let ok = nodes.windows(2).all(|w| w[0] < w[1])
        && nodes.first().is_some_and(|&s| s > -1.0)
        && nodes.last().is_some_and(|&s| s < 1.0)
        && weights.iter().all(|&w| w > 0.0 && w.is_finite());
    if !ok {
        return Err(Error::Numeric(format!(
            "quadrature construction failed for n = {}, order = {order}",
            dim.get()
        )));
    }
    Ok(QuadratureGrid {
        dim,
        nodes,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn grid(n: usize, order: usize) -> QuadratureGrid {
        build_grid(SphereDim::new(n).unwrap(), order).unwrap()
    }

    #[test]
    fn total_weight_is_volume() {
        let g2 = grid(2, 32);
        let sum2: f64 = g2.weights().iter().sum();
        assert!((sum2 / (4.0 * PI) - 1.0).abs() < 1e-12);
        let g3 = grid(3, 32);
        let sum3: f64 = g3.weights().iter().sum();
        assert!((sum3 / (2.0 * PI * PI) - 1.0).abs() < 1e-12);
        for n in [4, 5, 7, 10] {
            for order in [8, 64, 256] {
                let g = grid(n, order);
                let sum: f64 = g.weights().iter().sum();
                assert!(
                    (sum / g.volume() - 1.0).abs() < 1e-12,
                    "n={n} order={order}"
                );
            }
        }
    }

    #[test]
    fn second_moment_on_s2() {
        // 2π ∫₀^π cos²r sin r dr = 4π/3
        let g = grid(2, 16);
        let m2 = g.integrate_fn(|s| s * s);
        assert!((m2 - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(g.integrate_fn(|s| s).abs() < 1e-14);
    }

    #[test]
    fn exact_to_degree_two_order_minus_one() {
        // On S³ the weight is 4π√(1−s²)... compare against r-quadrature oracle
        // ∫ s^{2j} = 4π ∫₀^π cos^{2j} r sin² r dr, computed by a fine midpoint rule.
        let g = grid(3, 12);
        for j in 0..12 {
            let exact = {
                let m = 200_000;
                let h = PI / m as f64;
                (0..m)
                    .map(|i| {
                        let r = (i as f64 + 0.5) * h;
                        r.cos().powi(2 * j) * r.sin().powi(2)
                    })
                    .sum::<f64>()
                    * h
                    * 4.0
                    * PI
            };
            let got = g.integrate_fn(|s| s.powi(2 * j as i32));
            assert!(
                (got - exact).abs() < 1e-9 * exact.max(1.0),
                "j={j}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn nodes_are_interior_and_sorted() {
        for n in [2, 3, 6] {
            let g = grid(n, 128);
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(g.nodes()[0] > -1.0 && g.nodes()[127] < 1.0);
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn rejects_small_order() {
        assert!(build_grid(SphereDim::new(2).unwrap(), 7).is_err());
    }
}
