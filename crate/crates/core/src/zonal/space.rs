use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::basis::GegenbauerBasis;
use super::geometry::SphereDim;
use super::quadrature::{build_grid, QuadratureGrid};
use crate::error::Result;

/// Dense `s`-differentiation matrices on a quadrature grid.
///
/// Built in coefficient space: project onto the orthonormal basis, then
/// evaluate the differentiated basis at the nodes.
#[derive(Debug, Clone)]
pub struct DiffOperators {
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
}

/// Immutable discretization shared by all fields on one grid: nodes and
/// weights, basis tables and differentiation matrices.
#[derive(Debug)]
pub struct ZonalSpace {
    grid: QuadratureGrid,
    basis: GegenbauerBasis,
    /// `φ_k(s_i)`, rows are nodes, columns modes.
    phi: DMatrix<f64>,
    dphi: DMatrix<f64>,
    ddphi: DMatrix<f64>,
    /// `Φᵀ W`: node values to coefficients.
    projector: DMatrix<f64>,
    ops: DiffOperators,
}

impl ZonalSpace {
    pub fn new(dim: SphereDim, order: usize) -> Result<Arc<Self>> {
        let grid = build_grid(dim, order)?;
        let modes = order;
        let basis = GegenbauerBasis::new(dim, modes);
        let mut phi = DMatrix::zeros(order, modes);
        let mut dphi = DMatrix::zeros(order, modes);
        let mut ddphi = DMatrix::zeros(order, modes);
        let (mut v, mut d1, mut d2) = (vec![0.0; modes], vec![0.0; modes], vec![0.0; modes]);
        for (i, &s) in grid.nodes().iter().enumerate() {
            basis.eval_jet(s, &mut v, &mut d1, &mut d2);
            for k in 0..modes {
                phi[(i, k)] = v[k];
                dphi[(i, k)] = d1[k];
                ddphi[(i, k)] = d2[k];
            }
        }
        let mut projector = phi.transpose();
        for (j, &w) in grid.weights().iter().enumerate() {
            projector.column_mut(j).scale_mut(w);
        }
        let ops = DiffOperators {
            d1: &dphi * &projector,
            d2: &ddphi * &projector,
        };
        Ok(Arc::new(Self {
            grid,
            basis,
            phi,
            dphi,
            ddphi,
            projector,
            ops,
        }))
    }

    pub fn dim(&self) -> SphereDim {
        self.grid.dim()
    }

    pub fn n(&self) -> f64 {
        self.grid.dim().as_f64()
    }

    pub fn order(&self) -> usize {
        self.grid.order()
    }

    /// Number of spectral modes, `k = 0..modes()`.
    pub fn modes(&self) -> usize {
        self.phi.ncols()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn weights(&self) -> &[f64] {
        self.grid.weights()
    }

    pub fn volume(&self) -> f64 {
        self.grid.volume()
    }

    pub fn basis(&self) -> &GegenbauerBasis {
        &self.basis
    }

    pub fn operators(&self) -> &DiffOperators {
        &self.ops
    }

    pub(crate) fn apply(matrix: &DMatrix<f64>, values: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(values);
        (matrix * x).as_slice().to_vec()
    }

    pub(crate) fn project(&self, values: &[f64]) -> Vec<f64> {
        Self::apply(&self.projector, values)
    }

    /// Node values and both `s`-derivatives of `Σ a_k φ_k`.
    pub(crate) fn synthesize(&self, coeffs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = coeffs.len().min(self.modes());
        let a = DVector::from_column_slice(&coeffs[..m]);
        let cols = |mat: &DMatrix<f64>| (mat.columns(0, m) * &a).as_slice().to_vec();
        (cols(&self.phi), cols(&self.dphi), cols(&self.ddphi))
    }
}
