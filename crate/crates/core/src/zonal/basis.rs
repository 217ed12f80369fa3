//! Orthonormal zonal eigenbasis.
//!
//! The Gegenbauer polynomials `C_k^{(n−1)/2}(s)` are orthogonal for the
//! weight `(1 − s²)^{(n−2)/2}`, which is the push-forward of the volume of
//! `Sⁿ` to `s = cos r` up to the factor `ω_{n−1}`. We carry them normalized
//! so that `∫_{Sⁿ} φ_j φ_k = δ_jk`, evaluated by the symmetric three-term
//! recurrence `s φ_k = b_{k+1} φ_{k+1} + b_k φ_{k−1}`.

use super::geometry::SphereDim;

#[derive(Debug, Clone)]
pub struct GegenbauerBasis {
    dim: SphereDim,
    /// `b_k` for `k = 1..=len`; index 0 is unused.
    offdiag: Vec<f64>,
    phi0: f64,
}

impl GegenbauerBasis {
    /// Basis able to evaluate modes `0..=max_degree`.
    pub fn new(dim: SphereDim, max_degree: usize) -> Self {
        let lambda = (dim.as_f64() - 1.0) / 2.0;
        let mut offdiag = vec![0.0; max_degree + 2];
        for (k, b) in offdiag.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            *b = (kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0)))
                .sqrt();
        }
        Self {
            dim,
            offdiag,
            phi0: dim.volume().sqrt().recip(),
        }
    }

    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    /// Largest degree this basis can evaluate.
    pub fn max_degree(&self) -> usize {
        self.offdiag.len() - 2
    }

    /// Recurrence coefficient `b_k`, `k ≥ 1`.
    pub fn recurrence(&self, k: usize) -> f64 {
        self.offdiag[k]
    }

    /// Eigenvalue `k(k + n − 1)` of `−Δ` on mode `k`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let k = k as f64;
        k * (k + self.dim.as_f64() - 1.0)
    }

    /// Values, first and second `s`-derivatives of modes `0..values.len()` at `s`.
    pub fn eval_jet(&self, s: f64, values: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let m = values.len();
        debug_assert!(d1.len() == m && d2.len() == m);
        debug_assert!(m <= self.max_degree() + 1);
        if m == 0 {
            return;
        }
        values[0] = self.phi0;
        d1[0] = 0.0;
        d2[0] = 0.0;
        if m == 1 {
            return;
        }
        let b1 = self.offdiag[1];
        values[1] = s * self.phi0 / b1;
        d1[1] = self.phi0 / b1;
        d2[1] = 0.0;
        for k in 1..m - 1 {
            let (bk, bk1) = (self.offdiag[k], self.offdiag[k + 1]);
            values[k + 1] = (s * values[k] - bk * values[k - 1]) / bk1;
            d1[k + 1] = (values[k] + s * d1[k] - bk * d1[k - 1]) / bk1;
            d2[k + 1] = (2.0 * d1[k] + s * d2[k] - bk * d2[k - 1]) / bk1;
        }
    }

    /// Value and derivative of the single mode `k` at `s`.
    pub fn eval_mode(&self, k: usize, s: f64) -> (f64, f64) {
        let mut prev = (0.0, 0.0);
        let mut cur = (self.phi0, 0.0);
        for j in 0..k {
            let bj1 = self.offdiag[j + 1];
            let bj = self.offdiag[j];
            let next = (
                (s * cur.0 - bj * prev.0) / bj1,
                (cur.0 + s * cur.1 - bj * prev.1) / bj1,
            );
            prev = cur;
            cur = next;
        }
        cur
    }
}
