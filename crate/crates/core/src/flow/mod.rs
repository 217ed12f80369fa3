//! Exact heat flow of a positive zonal density, the entropy trajectory along
//! it, and the checks built on that trajectory.
//!
//! Every sample is computed independently from the spectral propagator, so
//! trajectories parallelize over time and carry no stepping error.

mod checks;
mod sobolev;

use crate::tolerances::SCALE_FLOOR;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{
    fisher_log, gamma2_log, shannon_entropy, shannon_excess_split, tsallis_entropy,
    tsallis_excess_split, tsallis_first_derivative, tsallis_second_derivative,
    weighted_dirichlet_energy, EntropyParams,
};
use crate::error::{Error, Result};
use crate::inequality::{constant_ji, constant_ode, RangePolicy};
use crate::spectral::{
    flow_to_equilibrium, forward_transform, geometric_times, heat_propagate, inverse_transform,
    lambda1, SpectralCoeffs,
};
use crate::zonal::{integrate, ZonalField, ZonalSpace};

pub use checks::{
    check_decay, check_ode_inequality, check_shannon_ode, DecayCheck, OdeCheckResult,
};
pub use sobolev::{derive_sobolev_from_flow, SobolevFlowReport};

/// Largest finite-difference step in flow time.
const FD_STEP: f64 = 1e-3;

/// Which entropy the trajectory follows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "entropy", rename_all = "lowercase")]
pub enum FlowEntropy {
    Tsallis { p: f64 },
    Shannon,
}

/// One time sample. Column names double as the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRecord {
    pub t: f64,
    #[serde(rename = "T")]
    pub entropy: f64,
    #[serde(rename = "dT_analytic")]
    pub d1_analytic: f64,
    #[serde(rename = "dT_fd")]
    pub d1_fd: Option<f64>,
    #[serde(rename = "d2T_analytic")]
    pub d2_analytic: f64,
    #[serde(rename = "d2T_fd")]
    pub d2_fd: Option<f64>,
    /// `d2T + C·dT` with the trajectory's constant.
    pub ode_residual: f64,
    pub dirichlet_energy: f64,
    pub mass: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrajectory {
    #[serde(flatten)]
    pub entropy: FlowEntropy,
    pub n: usize,
    pub order: usize,
    pub lambda1: f64,
    /// `C(n,p)` for Tsallis, twice the Ji constant for Shannon.
    pub constant: f64,
    pub records: Vec<FlowRecord>,
}

/// Worst analytic vs finite-difference discrepancies along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdAgreement {
    pub first: f64,
    pub second: f64,
}

impl FlowTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// `max |mass(t) − mass(0)| / |mass(0)|`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.records.first().map_or(0.0, |r| r.mass);
        self.records
            .iter()
            .map(|r| (r.mass - m0).abs() / m0.abs().max(1e-300))
            .fold(0.0, f64::max)
    }

    pub fn min_first_derivative(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.d1_analytic)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_value(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.min_value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn fd_agreement(&self) -> FdAgreement {
        let rel =
            |a: f64, b: Option<f64>| b.map_or(0.0, |b| (a - b).abs() / a.abs().max(SCALE_FLOOR));
        self.records.iter().fold(
            FdAgreement {
                first: 0.0,
                second: 0.0,
            },
            |acc, r| FdAgreement {
                first: acc.first.max(rel(r.d1_analytic, r.d1_fd)),
                second: acc.second.max(rel(r.d2_analytic, r.d2_fd)),
            },
        )
    }

    /// Header row, one row per sample, empty cells for missing FD values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)
                .map_err(|e| Error::Numeric(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
        Ok(())
    }
}

struct Snapshot {
    entropy: f64,
    d1: f64,
    d2: f64,
    energy: f64,
    mass: f64,
    min: f64,
}

impl FlowEntropy {
    fn snapshot(self, u: &ZonalField) -> Result<Snapshot> {
        let min = u.values().iter().copied().fold(f64::INFINITY, f64::min);
        let mass = integrate(u)?;
        Ok(match self {
            Self::Tsallis { p } => {
                let params = EntropyParams::new(p)?;
                Snapshot {
                    entropy: tsallis_entropy(u, params)?,
                    d1: tsallis_first_derivative(u, params)?.direct,
                    d2: tsallis_second_derivative(u, params)?,
                    energy: weighted_dirichlet_energy(u, params)?,
                    mass,
                    min,
                }
            }
            Self::Shannon => {
                let fisher = fisher_log(u)?;
                Snapshot {
                    entropy: shannon_entropy(u)?,
                    d1: fisher,
                    d2: -2.0 * gamma2_log(u)?,
                    energy: fisher,
                    mass,
                    min,
                }
            }
        })
    }

    /// Entropy minus its equilibrium value at time `t`; differences of it
    /// are differences of the entropy because mass is conserved. The
    /// deviation from the mean is synthesized from modes `k ≥ 1` alone, so
    /// late samples keep full relative precision.
    fn excess_at(self, c0: &SpectralCoeffs, space: &Arc<ZonalSpace>, t: f64) -> Result<f64> {
        let mut c = heat_propagate(c0, t)?;
        let m = c.mean();
        c.coeffs[0] = 0.0;
        let (dev, _, _) = space.synthesize(&c.coeffs);
        match self {
            Self::Tsallis { p } => tsallis_excess_split(space, m, &dev, EntropyParams::new(p)?),
            Self::Shannon => shannon_excess_split(space, m, &dev),
        }
    }

    fn constant(self, n: usize, l1: f64) -> Result<f64> {
        match self {
            Self::Tsallis { p } => constant_ode(n, l1, p, RangePolicy::Exploratory),
            Self::Shannon => Ok(2.0 * constant_ji(n, l1)?),
        }
    }
}

/// `u(t)` from the initial coefficients.
pub(crate) fn field_at(c0: &SpectralCoeffs, space: &Arc<ZonalSpace>, t: f64) -> Result<ZonalField> {
    let u = inverse_transform(&heat_propagate(c0, t)?, space)?;
    if u.values().iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Numeric(format!(
            "positivity lost at t = {t}; the initial density is under-resolved"
        )));
    }
    Ok(u)
}

/// Richardson-refined central differences `(first, second)` of the excess at `t > 0`.
fn finite_differences(
    kind: FlowEntropy,
    c0: &SpectralCoeffs,
    space: &Arc<ZonalSpace>,
    t: f64,
) -> Result<(f64, f64)> {
    let h = FD_STEP.min(0.5 * t);
    let e = |dt: f64| kind.excess_at(c0, space, t + dt);
    let e0 = e(0.0)?;
    let (p1, m1, p2, m2) = (e(h)?, e(-h)?, e(0.5 * h)?, e(-0.5 * h)?);
    let d1_h = (p1 - m1) / (2.0 * h);
    let d1_h2 = (p2 - m2) / h;
    let d2_h = (p1 - 2.0 * e0 + m1) / (h * h);
    let d2_h2 = (p2 - 2.0 * e0 + m2) / (0.25 * h * h);
    Ok(((4.0 * d1_h2 - d1_h) / 3.0, (4.0 * d2_h2 - d2_h) / 3.0))
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Parameter("time grid is empty".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::Parameter(
            "flow times must be finite and >= 0".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter(
            "flow times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Trajectory of `kind` along the heat flow from `u0`, sampled at `times`.
pub fn run_entropy_flow(
    u0: &ZonalField,
    kind: FlowEntropy,
    times: &[f64],
) -> Result<FlowTrajectory> {
    u0.ensure_positive()?;
    validate_times(times)?;
    let space = u0.space().clone();
    let dim = space.dim();
    let l1 = lambda1(dim);
    let constant = kind.constant(dim.get(), l1)?;
    let c0 = forward_transform(u0);
    let records = times
        .par_iter()
        .map(|&t| {
            let u = field_at(&c0, &space, t)?;
            let snap = kind.snapshot(&u)?;
            let (d1_fd, d2_fd) = if t > 0.0 {
                let (a, b) = finite_differences(kind, &c0, &space, t)?;
                (Some(a), Some(b))
            } else {
                (None, None)
            };
            Ok(FlowRecord {
                t,
                entropy: snap.entropy,
                d1_analytic: snap.d1,
                d1_fd,
                d2_analytic: snap.d2,
                d2_fd,
                ode_residual: snap.d2 + constant * snap.d1,
                dirichlet_energy: snap.energy,
                mass: snap.mass,
                min_value: snap.min,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowTrajectory {
        entropy: kind,
        n: dim.get(),
        order: space.order(),
        lambda1: l1,
        constant,
        records,
    })
}

/// Tsallis trajectory `T_p(u(t))`.
pub fn run_flow(u0: &ZonalField, p: f64, times: &[f64]) -> Result<FlowTrajectory> {
    EntropyParams::new(p)?;
    run_entropy_flow(u0, FlowEntropy::Tsallis { p }, times)
}

/// Shannon trajectory `S(f(t))`.
pub fn run_shannon_flow(f0: &ZonalField, times: &[f64]) -> Result<FlowTrajectory> {
    run_entropy_flow(f0, FlowEntropy::Shannon, times)
}

/// `0, 10⁻³, 2·10⁻³, …` up to the time at which `u` is within `1e-6` of
/// its mean; a unit horizon if it already is.
pub fn default_times(u0: &ZonalField) -> Result<Vec<f64>> {
    let horizon = flow_to_equilibrium(&forward_transform(u0), u0.space(), 1e-6)?;
    geometric_times(FD_STEP, 2.0, if horizon > 0.0 { horizon } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{corpus, CorpusSpec};
    use crate::zonal::SphereDim;

    fn space(n: usize) -> Arc<ZonalSpace> {
        ZonalSpace::new(SphereDim::new(n).unwrap(), 64).unwrap()
    }

    #[test]
    fn constant_initial_data_is_stationary() {
        let sp = space(2);
        let u0 = ZonalField::constant(&sp, 3.0).unwrap();
        let traj = run_flow(&u0, 1.5, &default_times(&u0).unwrap()).unwrap();
        let t0 = traj.records[0].entropy;
        for r in &traj.records {
            assert!(r.d1_analytic.abs() < 1e-14 && r.d2_analytic.abs() < 1e-14);
            assert!(r.d1_fd.unwrap_or(0.0).abs() < 1e-9);
            assert!((r.entropy - t0).abs() < 1e-12 * t0.abs());
        }
    }

    #[test]
    fn single_mode_quadratic_entropy() {
        // p = 2: T(t) − T(∞) = −∫(u − m)² = −b² e^{−4t} ∫cos² r on S².
        let sp = space(2);
        let u0 = ZonalField::eigenmode(&sp, 1.0, 0.4).unwrap();
        let times = [0.0, 0.1, 0.5, 1.0, 2.0];
        let traj = run_flow(&u0, 2.0, &times).unwrap();
        let vol = sp.volume();
        let t_inf = 0.0; // ∫m − ∫m² with m = 1
        for r in &traj.records {
            let expected = -0.16 * (-4.0 * r.t).exp() * vol / 3.0;
            assert!((r.entropy - t_inf - expected).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn corpus_trajectories_are_consistent() {
        let sp = space(2);
        for u0 in corpus(&sp, &CorpusSpec::with_seed(5), 4).unwrap() {
            let times = default_times(&u0).unwrap();
            for p in [0.5, 1.5, 2.0] {
                let traj = run_flow(&u0, p, &times).unwrap();
                assert!(
                    traj.mass_drift() < 1e-12,
                    "mass drift {}",
                    traj.mass_drift()
                );
                assert!(traj.min_first_derivative() >= -1e-12);
                let fd = traj.fd_agreement();
                assert!(fd.first < 1e-6 && fd.second < 1e-5, "p = {p}: {fd:?}");
            }
            let traj = run_shannon_flow(&u0, &times).unwrap();
            let fd = traj.fd_agreement();
            assert!(fd.first < 1e-6 && fd.second < 1e-5, "shannon: {fd:?}");
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sp = space(2);
        let u0 = ZonalField::eigenmode(&sp, 1.0, 0.3).unwrap();
        let traj = run_flow(&u0, 1.5, &[0.0, 0.01, 0.1]).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("t,T,dT_analytic,dT_fd,d2T_analytic"));
        assert!(lines[1].contains(",,"));
    }

    #[test]
    fn rejects_bad_time_grids() {
        let sp = space(2);
        let u0 = ZonalField::constant(&sp, 1.0).unwrap();
        assert!(run_flow(&u0, 1.5, &[]).is_err());
        assert!(run_flow(&u0, 1.5, &[0.0, 0.0]).is_err());
        assert!(run_flow(&u0, 1.5, &[-1.0]).is_err());
        assert!(run_flow(&u0, 1.0, &[0.0]).is_err());
    }
}
