//! Multistart quasi-Newton descent with central-difference gradients.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::{rayleigh_ratio, RatioProblem};
use crate::corpus::derive_seed;
use crate::error::{Error, Result};

/// Central-difference step per coordinate.
const FD_STEP: f64 = 1e-5;
const GRAD_TOL: f64 = 1e-7;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
/// Random starts are rescaled to at least this norm.
const AMPLITUDE_FLOOR: f64 = 0.05;
/// The dedicated linearized start is this multiple of the first mode.
const SMALL_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeOptions {
    /// Number of random starts; one small-amplitude start is added.
    pub multistarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            multistarts: 20,
            max_iter: 200,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartOutcome {
    pub start: usize,
    pub ratio: f64,
    pub w: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub functional: super::ProbeFunctional,
    pub n: usize,
    pub order: usize,
    pub modes: usize,
    pub exploratory: bool,
    pub constant: f64,
    pub min_ratio: f64,
    pub argmin: Vec<f64>,
    pub iterations: usize,
    pub start_index: usize,
    pub converged: bool,
    pub starts: usize,
    pub starts_converged: usize,
    /// `min_ratio − constant`
    pub gap: f64,
}

fn gradient(problem: &RatioProblem, w: &DVector<f64>) -> DVector<f64> {
    let mut probe = w.clone();
    DVector::from_fn(w.len(), |i, _| {
        let x = w[i];
        probe[i] = x + FD_STEP;
        let up = rayleigh_ratio(problem, probe.as_slice());
        probe[i] = x - FD_STEP;
        let down = rayleigh_ratio(problem, probe.as_slice());
        probe[i] = x;
        (up - down) / (2.0 * FD_STEP)
    })
}

/// BFGS from `w0`. Converged means the gradient norm fell below `1e-7` or
/// the line search could no longer decrease the ratio; hitting `max_iter`
/// is reported as not converged.
pub fn minimize_from(
    problem: &RatioProblem,
    w0: &[f64],
    max_iter: usize,
    start: usize,
) -> Result<StartOutcome> {
    let dim = problem.dimension();
    if w0.len() != dim {
        return Err(Error::Parameter(format!(
            "start has {} coefficients, expected {dim}",
            w0.len()
        )));
    }
    let mut w = DVector::from_column_slice(w0);
    let mut f = rayleigh_ratio(problem, w.as_slice());
    let mut g = gradient(problem, &w);
    let mut h = DMatrix::<f64>::identity(dim, dim);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        if g.norm() < GRAD_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let mut d = -(&h * &g);
        let mut slope = g.dot(&d);
        if !(slope < 0.0) {
            h = DMatrix::identity(dim, dim);
            d = -g.clone();
            slope = -g.norm_squared();
        }
        let mut alpha = 1.0;
        let accepted = loop {
            let trial = &w + alpha * &d;
            let ft = rayleigh_ratio(problem, trial.as_slice());
            if ft <= f + ARMIJO * alpha * slope {
                break Some((trial, ft));
            }
            alpha *= 0.5;
            if alpha * d.norm() < MIN_STEP * (1.0 + w.norm()) {
                break None;
            }
        };
        let Some((w_new, f_new)) = accepted else {
            converged = true;
            break;
        };
        let g_new = gradient(problem, &w_new);
        let s = &w_new - &w;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(dim, dim);
            let left = &i - rho * &s * y.transpose();
            let right = &i - rho * &y * s.transpose();
            h = &left * &h * &right + rho * &s * s.transpose();
        }
        w = w_new;
        f = f_new;
        g = g_new;
    }
    Ok(StartOutcome {
        start,
        ratio: f,
        w: w.as_slice().to_vec(),
        iterations,
        converged,
    })
}

/// Start 0 is `10⁻³·e₁` (the linearized regime); starts `1..=multistarts`
/// are Gaussian with standard deviation `0.5/k` on mode `k`, rescaled to
/// norm at least `0.05`, from per-start seeds derived from `seed`.
fn starting_point(dim: usize, seed: u64, start: usize) -> Vec<f64> {
    let mut w = vec![0.0; dim];
    if start == 0 {
        w[1] = SMALL_AMPLITUDE;
        return w;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, start as u64));
    for (k, wk) in w.iter_mut().enumerate().skip(1) {
        *wk = Normal::new(0.0, 0.5 / k as f64)
            .expect("positive deviation")
            .sample(&mut rng);
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < AMPLITUDE_FLOOR {
        let scale = if norm > 0.0 {
            AMPLITUDE_FLOOR / norm
        } else {
            0.0
        };
        w.iter_mut().for_each(|x| *x *= scale);
        if norm == 0.0 {
            w[1] = AMPLITUDE_FLOOR;
        }
    }
    w
}

/// Best of all starts, ties broken by the lower start index. Fails only if
/// no start converged.
pub fn minimize_ratio(problem: &RatioProblem, options: &ProbeOptions) -> Result<ProbeResult> {
    let dim = problem.dimension();
    let outcomes = (0..=options.multistarts)
        .into_par_iter()
        .map(|i| {
            minimize_from(
                problem,
                &starting_point(dim, options.seed, i),
                options.max_iter,
                i,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio).then(a.start.cmp(&b.start)))
        .expect("at least one start");
    let starts_converged = outcomes.iter().filter(|o| o.converged).count();
    if starts_converged == 0 {
        return Err(Error::Convergence {
            best_ratio: best.ratio,
        });
    }
    Ok(ProbeResult {
        functional: problem.functional,
        n: problem.n(),
        order: problem.space.order(),
        modes: problem.modes,
        exploratory: problem.exploratory(),
        constant: problem.constant,
        min_ratio: best.ratio,
        argmin: best.w.clone(),
        iterations: best.iterations,
        start_index: best.start,
        converged: best.converged,
        starts: outcomes.len(),
        starts_converged,
        gap: best.ratio - problem.constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::RangePolicy;
    use crate::probe::ProbeFunctional;

    fn problem(f: ProbeFunctional, n: usize, policy: RangePolicy) -> RatioProblem {
        RatioProblem::new(f, n, 64, 8, policy).unwrap()
    }

    #[test]
    fn ji_on_the_two_sphere_is_sharp() {
        let p = problem(ProbeFunctional::Ji, 2, RangePolicy::Enforce);
        let r = minimize_ratio(
            &p,
            &ProbeOptions {
                multistarts: 6,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.min_ratio >= 2.0 - 1e-6 && r.min_ratio <= 2.1, "{r:?}");
    }

    #[test]
    fn weighted_zero_on_the_three_sphere() {
        let p = problem(
            ProbeFunctional::Weighted { s: 0.0 },
            3,
            RangePolicy::Enforce,
        );
        let r = minimize_ratio(
            &p,
            &ProbeOptions {
                multistarts: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.min_ratio >= 3.0 - 1e-6 && r.min_ratio < 3.05, "{r:?}");
    }

    #[test]
    fn modified_inside_the_gap_goes_below_the_constant() {
        let p = problem(
            ProbeFunctional::Modified { s: -2.3 },
            2,
            RangePolicy::Exploratory,
        );
        let r = minimize_ratio(
            &p,
            &ProbeOptions {
                multistarts: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.exploratory);
        assert!(r.min_ratio < p.constant, "{r:?}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let p = problem(
            ProbeFunctional::Weighted { s: -2.0 },
            2,
            RangePolicy::Enforce,
        );
        let o = ProbeOptions {
            multistarts: 3,
            max_iter: 50,
            seed: 7,
        };
        let a = minimize_ratio(&p, &o).unwrap();
        let b = minimize_ratio(&p, &o).unwrap();
        assert_eq!(a.min_ratio.to_bits(), b.min_ratio.to_bits());
        assert_eq!(a.argmin, b.argmin);
    }

    #[test]
    fn mean_shift_leaves_the_minimum_unchanged() {
        for f in [ProbeFunctional::Ji, ProbeFunctional::Weighted { s: -5.0 }] {
            let p = problem(f, 2, RangePolicy::Enforce);
            let w0 = starting_point(p.dimension(), 3, 2);
            let mut shifted = w0.clone();
            shifted[0] += 0.8;
            let a = minimize_from(&p, &w0, 100, 0).unwrap();
            let b = minimize_from(&p, &shifted, 100, 0).unwrap();
            assert!(
                (a.ratio - b.ratio).abs() <= 1e-8 * a.ratio.abs(),
                "{f:?}: {} vs {}",
                a.ratio,
                b.ratio
            );
        }
    }

    #[test]
    fn starts_respect_the_amplitude_floor() {
        for i in 1..50 {
            let w = starting_point(9, 11, i);
            assert!(w.iter().map(|x| x * x).sum::<f64>().sqrt() >= AMPLITUDE_FLOOR - 1e-15);
            assert_eq!(w[0], 0.0);
        }
    }
}
