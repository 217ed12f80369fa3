use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `n` of the round sphere `Sⁿ` (so `n ≥ 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct SphereDim(usize);

impl SphereDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "sphere dimension must be >= 2, got {n}"
            )));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Ricci lower bound `n − 1` of the unit sphere.
    #[inline]
    pub fn ricci(self) -> f64 {
        (self.0 - 1) as f64
    }

    /// Total volume `2π^{(n+1)/2} / Γ((n+1)/2)`.
    pub fn volume(self) -> f64 {
        sphere_area(self.0)
    }
}

impl TryFrom<usize> for SphereDim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<SphereDim> for usize {
    fn from(d: SphereDim) -> usize {
        d.0
    }
}

impl std::fmt::Display for SphereDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S^{}", self.0)
    }
}

/// `Γ(m/2)` for a positive integer `m`, by the half-integer recursion.
pub(crate) fn gamma_half(m: usize) -> f64 {
    debug_assert!(m > 0);
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, PI.sqrt())
    };
    let target = m as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere `S^k ⊂ R^{k+1}` for `k ≥ 0`.
pub fn sphere_area(k: usize) -> f64 {
    2.0 * PI.powf((k as f64 + 1.0) / 2.0) / gamma_half(k + 1)
}
