//! Seeded corpus of smooth positive zonal fields
//! `v = exp(Σ_{k=1..K} a_k φ_k)`, `a_k ~ U(−σ/k², σ/k²)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::zonal::{ZonalField, ZonalSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub modes: usize,
    pub sigma: f64,
    pub root_seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            modes: 8,
            sigma: 1.0,
            root_seed: 42,
        }
    }
}

impl CorpusSpec {
    pub fn with_seed(root_seed: u64) -> Self {
        Self {
            root_seed,
            ..Self::default()
        }
    }
}

/// SplitMix64 finalizer; decorrelates per-case seeds drawn from one root.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Log-coefficients `[0, a_1, …, a_K]` of corpus member `index`.
pub fn log_coefficients(spec: &CorpusSpec, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.root_seed, index));
    let mut a = vec![0.0; spec.modes + 1];
    for (k, ak) in a.iter_mut().enumerate().skip(1) {
        let bound = spec.sigma / (k * k) as f64;
        *ak = if bound > 0.0 {
            rng.random_range(-bound..bound)
        } else {
            0.0
        };
    }
    a
}

/// `exp(Σ w_k φ_k)` with exact derivatives.
pub fn exp_of_modes(space: &Arc<ZonalSpace>, log_coeffs: &[f64]) -> Result<ZonalField> {
    ZonalField::from_coefficients(space, log_coeffs)?.exp()
}

pub fn random_positive_field(
    space: &Arc<ZonalSpace>,
    spec: &CorpusSpec,
    index: u64,
) -> Result<ZonalField> {
    exp_of_modes(space, &log_coefficients(spec, index))
}

/// Corpus members `0..count`, in index order.
pub fn corpus(space: &Arc<ZonalSpace>, spec: &CorpusSpec, count: usize) -> Result<Vec<ZonalField>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| random_positive_field(space, spec, i))
        .collect()
}
