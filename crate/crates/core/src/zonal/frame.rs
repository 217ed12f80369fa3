//! Symmetric 2-tensors of zonal functions in the adapted orthonormal frame
//! `(∂_r, e_2, …, e_n)`, where they are diagonal with one radial entry and
//! `n − 1` equal tangential entries. Used as a second, component-wise route
//! for the tensor contractions in the integral identities.

use super::calculus::PointJet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagTensor {
    pub radial: f64,
    pub tangential: f64,
}

impl DiagTensor {
    pub fn metric() -> Self {
        Self {
            radial: 1.0,
            tangential: 1.0,
        }
    }

    pub fn trace(&self, n: f64) -> f64 {
        self.radial + (n - 1.0) * self.tangential
    }

    pub fn inner(&self, other: &Self, n: f64) -> f64 {
        self.radial * other.radial + (n - 1.0) * self.tangential * other.tangential
    }

    pub fn norm_sq(&self, n: f64) -> f64 {
        self.inner(self, n)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            radial: c * self.radial,
            tangential: c * self.tangential,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            radial: self.radial + other.radial,
            tangential: self.tangential + other.tangential,
        }
    }

    /// `A − (tr A / n) g`.
    pub fn traceless(&self, n: f64) -> Self {
        self.plus(&Self::metric().scaled(-self.trace(n) / n))
    }

    /// `∇²F` at the node.
    pub fn hessian(j: &PointJet) -> Self {
        Self {
            radial: j.hessian_radial(),
            tangential: j.hessian_tangential(),
        }
    }

    /// `dF⊗dF / F`; `dF` is purely radial.
    pub fn grad_outer_over_value(j: &PointJet) -> Self {
        Self {
            radial: j.grad_sq() / j.f,
            tangential: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traceless_part_has_zero_trace() {
        let a = DiagTensor {
            radial: 3.0,
            tangential: -1.25,
        };
        for n in [2.0, 3.0, 7.0] {
            assert!(a.traceless(n).trace(n).abs() < 1e-14);
        }
    }

    #[test]
    fn hessian_trace_is_laplacian() {
        let j = PointJet {
            s: 0.3,
            f: 1.7,
            d1: -0.4,
            d2: 2.2,
        };
        for n in [2.0, 5.0] {
            assert!((DiagTensor::hessian(&j).trace(n) - j.laplacian(n)).abs() < 1e-15);
            assert!((DiagTensor::hessian(&j).norm_sq(n) - j.hessian_sq(n)).abs() < 1e-14);
        }
    }
}
