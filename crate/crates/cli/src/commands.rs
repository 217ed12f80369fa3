//! Subcommand bodies. Each validates its parameters before running any
//! numerics, so range problems surface as configuration errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use gamma2lab_core::corpus::{corpus, derive_seed, CorpusSpec};
use gamma2lab_core::entropy::EntropyParams;
use gamma2lab_core::flow::{
    check_decay, check_ode_inequality, check_shannon_ode, default_times, derive_sobolev_from_flow,
    run_flow, run_shannon_flow, DecayCheck, FdAgreement, OdeCheckResult, SobolevFlowReport,
};
use gamma2lab_core::inequality::{
    constant_ode, counterexample_field, modified_gap_start, ode_admissible, run_counterexample,
    CounterexampleReport, InequalityCase, MarginReport, RangePolicy, TheoremId,
    COUNTEREXAMPLE_BASE,
};
use gamma2lab_core::probe::{sharpness_report, ProbeFunctional, ProbeOptions, SharpnessTable};
use gamma2lab_core::zonal::identities::all_identities;
use gamma2lab_core::{SphereDim, ZonalField, ZonalSpace};

use crate::config::{FunctionalKind, RunConfig, U0Spec};
use crate::error::{CliError, CliResult};
use crate::report::ReportDocument;

fn policy(cfg: &RunConfig) -> RangePolicy {
    RangePolicy::from_flag(cfg.exploratory)
}

fn space(cfg: &RunConfig, order: usize) -> CliResult<Arc<ZonalSpace>> {
    Ok(ZonalSpace::new(SphereDim::new(cfg.dimension)?, order)?)
}

/// Fields under test with their per-case seeds.
fn fields(
    cfg: &RunConfig,
    sp: &Arc<ZonalSpace>,
    count: usize,
) -> CliResult<Vec<(Option<u64>, ZonalField)>> {
    Ok(match cfg.u0 {
        U0Spec::Random => corpus(sp, &CorpusSpec::with_seed(cfg.seed), count)?
            .into_iter()
            .enumerate()
            .map(|(i, f)| (Some(derive_seed(cfg.seed, i as u64)), f))
            .collect(),
        U0Spec::Eigenmode { a, b } => vec![(None, ZonalField::eigenmode(sp, a, b)?)],
        U0Spec::Counterexample => vec![(None, counterexample_field(sp, COUNTEREXAMPLE_BASE)?)],
    })
}

#[derive(Debug, Serialize)]
pub struct IdentitySummary {
    pub name: &'static str,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ConvergenceRow {
    pub order: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct IdentityResults {
    pub fields: usize,
    pub identities: Vec<IdentitySummary>,
    /// The same fields resolved on coarser and finer grids.
    pub convergence: Vec<ConvergenceRow>,
}

fn identity_maxima(cfg: &RunConfig, order: usize) -> CliResult<(usize, Vec<(&'static str, f64)>)> {
    let sp = space(cfg, order)?;
    let list = fields(cfg, &sp, cfg.trials)?;
    let mut maxima: Vec<(&'static str, f64)> = Vec::new();
    for (_, f) in &list {
        for (i, c) in all_identities(f)?.into_iter().enumerate() {
            match maxima.get_mut(i) {
                Some(slot) => slot.1 = slot.1.max(c.deviation),
                None => maxima.push((c.name, c.deviation)),
            }
        }
    }
    Ok((list.len(), maxima))
}

pub fn cmd_verify_identities(cfg: &RunConfig) -> CliResult<ReportDocument<IdentityResults>> {
    let (count, maxima) = identity_maxima(cfg, cfg.grid_order)?;
    let identities: Vec<IdentitySummary> = maxima
        .into_iter()
        .map(|(name, max_deviation)| IdentitySummary {
            name,
            max_deviation,
            pass: max_deviation <= cfg.tolerances.identity,
        })
        .collect();
    let mut orders = vec![16, 32, 64, cfg.grid_order];
    orders.sort_unstable();
    orders.dedup();
    let mut convergence = Vec::with_capacity(orders.len());
    for order in orders {
        let (_, m) = identity_maxima(cfg, order)?;
        convergence.push(ConvergenceRow {
            order,
            max_deviation: m.iter().map(|x| x.1).fold(0.0, f64::max),
        });
    }
    let pass = identities.iter().all(|i| i.pass);
    Ok(ReportDocument::new(
        "verify-identities",
        cfg,
        pass,
        IdentityResults {
            fields: count,
            identities,
            convergence,
        },
    ))
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    #[serde(flatten)]
    pub report: MarginReport,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckResults {
    pub theorem: TheoremId,
    pub cases: Vec<CheckEntry>,
    pub failures: usize,
    pub exploratory_cases: usize,
    pub min_relative_margin: Option<f64>,
}

fn check_parameters(cfg: &RunConfig, theorem: TheoremId) -> CliResult<Vec<Option<f64>>> {
    let list = match theorem {
        TheoremId::Weighted | TheoremId::Modified => &cfg.param_s,
        TheoremId::Sobolev | TheoremId::Del14 => &cfg.param_q,
        _ => return Ok(vec![None]),
    };
    if list.is_empty() {
        let name = if theorem.takes_parameter()
            && matches!(theorem, TheoremId::Sobolev | TheoremId::Del14)
        {
            "--param-q"
        } else {
            "--param-s"
        };
        return Err(CliError::Config(format!(
            "{theorem} needs a parameter sweep via {name}"
        )));
    }
    Ok(list.iter().copied().map(Some).collect())
}

pub fn cmd_check(cfg: &RunConfig) -> CliResult<ReportDocument<CheckResults>> {
    let theorem = cfg
        .theorem
        .ok_or_else(|| CliError::Config("check needs --theorem".into()))?;
    let params = check_parameters(cfg, theorem)?;
    let cases = params
        .iter()
        .map(|&x| InequalityCase::new(theorem, cfg.dimension, x, policy(cfg)))
        .collect::<gamma2lab_core::Result<Vec<_>>>()?;
    let sp = space(cfg, cfg.grid_order)?;
    let list = fields(cfg, &sp, cfg.trials)?;
    let mut entries = Vec::with_capacity(list.len() * cases.len());
    for (seed, field) in &list {
        for case in &cases {
            // The counterexample density enters the modified inequality through v = u^{2/(s+2)}.
            let v = match (cfg.u0, case.theorem, case.parameter) {
                (U0Spec::Counterexample, TheoremId::Modified, Some(s)) if s != -2.0 => {
                    field.powf(2.0 / (s + 2.0))?
                }
                _ => field.clone(),
            };
            let mut report = case.evaluate(&v)?;
            if let Some(seed) = seed {
                report = report.with_seed(*seed);
            }
            let pass = report.exploratory || report.relative_margin >= -cfg.tolerances.margin;
            entries.push(CheckEntry { report, pass });
        }
    }
    let failures = entries.iter().filter(|e| !e.pass).count();
    let exploratory_cases = entries.iter().filter(|e| e.report.exploratory).count();
    let min_relative_margin = entries
        .iter()
        .filter(|e| !e.report.exploratory)
        .map(|e| e.report.relative_margin)
        .reduce(f64::min);
    Ok(ReportDocument::new(
        "check",
        cfg,
        failures == 0,
        CheckResults {
            theorem,
            cases: entries,
            failures,
            exploratory_cases,
            min_relative_margin,
        },
    ))
}

#[derive(Debug, Serialize)]
pub struct FlowEntry {
    pub p: f64,
    pub exploratory: bool,
    pub constant: f64,
    pub samples: usize,
    pub horizon: f64,
    pub ode: OdeCheckResult,
    pub decay: Option<DecayCheck>,
    pub fd_agreement: FdAgreement,
    pub mass_drift: f64,
    pub min_first_derivative: f64,
    pub min_value: f64,
    pub sobolev: Option<SobolevFlowReport>,
    pub csv: Option<PathBuf>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct FlowResults {
    pub seed: Option<u64>,
    pub trajectories: Vec<FlowEntry>,
    pub shannon: OdeCheckResult,
}

/// `traj.csv` for a single exponent, `traj_p1.5.csv` and so on for several.
fn csv_path(base: &Path, p: f64, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map_or("trajectory".into(), |s| s.to_string_lossy().into_owned());
    let ext = base
        .extension()
        .map_or("csv".into(), |s| s.to_string_lossy().into_owned());
    base.with_file_name(format!("{stem}_p{p}.{ext}"))
}

pub fn cmd_flow(cfg: &RunConfig) -> CliResult<ReportDocument<FlowResults>> {
    let ps = if cfg.param_p.is_empty() {
        vec![1.5]
    } else {
        cfg.param_p.clone()
    };
    let n = cfg.dimension;
    for &p in &ps {
        EntropyParams::new(p)?;
        constant_ode(n, n as f64, p, policy(cfg))?;
    }
    let sp = space(cfg, cfg.grid_order)?;
    let (seed, u0) = fields(cfg, &sp, 1)?.remove(0);
    let times = default_times(&u0)?;
    let tol = &cfg.tolerances;
    let mut trajectories = Vec::with_capacity(ps.len());
    for &p in &ps {
        let traj = run_flow(&u0, p, &times)?;
        let admissible = ode_admissible(n, p);
        let ode = check_ode_inequality(&traj, policy(cfg))?;
        let decay = admissible.then(|| check_decay(&traj)).transpose()?;
        let sobolev = if admissible {
            Some(derive_sobolev_from_flow(
                &u0.powf(0.5 * p)?,
                2.0 / p,
                RangePolicy::Enforce,
            )?)
        } else {
            None
        };
        let fd = traj.fd_agreement();
        let csv = match &cfg.csv {
            Some(base) => {
                let path = csv_path(base, p, ps.len() > 1);
                let file = std::fs::File::create(&path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                traj.write_csv(std::io::BufWriter::new(file))?;
                Some(path)
            }
            None => None,
        };
        let pass = !admissible
            || (ode.worst_residual <= tol.ode
                && decay
                    .as_ref()
                    .is_some_and(|d| d.worst_ratio <= 1.0 + tol.decay && d.slope_ok)
                && fd.first <= tol.fd_first
                && fd.second <= tol.fd_second
                && traj.mass_drift() <= tol.mass
                && traj.min_first_derivative() >= -tol.monotone
                && sobolev
                    .as_ref()
                    .is_some_and(|s| s.agreement <= tol.sobolev_routes));
        trajectories.push(FlowEntry {
            p,
            exploratory: !admissible,
            constant: traj.constant,
            samples: traj.records.len(),
            horizon: times.last().copied().unwrap_or(0.0),
            mass_drift: traj.mass_drift(),
            min_first_derivative: traj.min_first_derivative(),
            min_value: traj.min_value(),
            fd_agreement: fd,
            ode,
            decay,
            sobolev,
            csv,
            pass,
        });
    }
    let shannon = check_shannon_ode(&run_shannon_flow(&u0, &times)?)?;
    let pass = trajectories.iter().all(|t| t.pass) && shannon.worst_residual <= tol.ode;
    Ok(ReportDocument::new(
        "flow",
        cfg,
        pass,
        FlowResults {
            seed,
            trajectories,
            shannon,
        },
    ))
}

pub fn cmd_probe(cfg: &RunConfig) -> CliResult<ReportDocument<SharpnessTable>> {
    let sweep: Vec<ProbeFunctional> = match cfg.functional {
        FunctionalKind::Ji => vec![ProbeFunctional::Ji],
        FunctionalKind::Weighted => cfg
            .param_s
            .iter()
            .map(|&s| ProbeFunctional::Weighted { s })
            .collect(),
        FunctionalKind::Modified => cfg
            .param_s
            .iter()
            .map(|&s| ProbeFunctional::Modified { s })
            .collect(),
    };
    let n = cfg.dimension;
    for f in &sweep {
        f.constant(n, n as f64, policy(cfg))?;
    }
    if cfg.modes == 0 || cfg.modes > cfg.grid_order / 4 {
        return Err(CliError::Config(format!(
            "modes must lie in [1, grid_order/4 = {}], got {}",
            cfg.grid_order / 4,
            cfg.modes
        )));
    }
    let options = ProbeOptions {
        multistarts: cfg.multistarts,
        max_iter: cfg.max_iter,
        seed: cfg.seed,
    };
    let table = sharpness_report(n, &sweep, cfg.grid_order, cfg.modes, policy(cfg), &options)?;
    let pass = table
        .rows
        .iter()
        .all(|r| r.exploratory || r.gap >= -cfg.tolerances.probe_lower);
    Ok(ReportDocument::new("probe", cfg, pass, table))
}

#[derive(Debug, Serialize)]
pub struct CounterexampleEntry {
    #[serde(flatten)]
    pub result: CounterexampleReport,
    /// `|refined − margin| / |margin|`
    pub relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleResults {
    pub cases: Vec<CounterexampleEntry>,
}

pub fn cmd_counterexample(cfg: &RunConfig) -> CliResult<ReportDocument<CounterexampleResults>> {
    let n = cfg.dimension;
    let lo = modified_gap_start(n);
    let ss = if cfg.param_s.is_empty() {
        vec![0.5 * (lo - 2.0)]
    } else {
        cfg.param_s.clone()
    };
    if let Some(&s) = ss.iter().find(|&&s| !(s > lo && s < -2.0)) {
        return Err(CliError::Config(format!(
            "s = {s} lies outside the window ({lo}, -2)"
        )));
    }
    let mut cases = Vec::with_capacity(ss.len());
    for s in ss {
        let result = run_counterexample(n, s, cfg.grid_order)?;
        let m = result.report.margin;
        let relative_change = (result.refined_margin - m).abs() / m.abs().max(1e-300);
        let pass = m < 0.0
            && relative_change < 0.01
            && result.sign_stable
            && m.abs() > cfg.tolerances.resolution_factor * result.error_estimate
            && result.auxiliary.holds;
        cases.push(CounterexampleEntry {
            relative_change,
            result,
            pass,
        });
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(ReportDocument::new(
        "counterexample",
        cfg,
        pass,
        CounterexampleResults { cases },
    ))
}
