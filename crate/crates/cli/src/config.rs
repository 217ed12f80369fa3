//! Effective run configuration: built-in defaults, then a flat `key = value`
//! file, then command-line flags. The seed falls back to `GAMMA2LAB_SEED`
//! when neither the file nor the flags set it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Serialize;

use gamma2lab_core::inequality::TheoremId;
use gamma2lab_core::zonal::{MAX_ORDER, MIN_ORDER};
use gamma2lab_core::Tolerances;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "GAMMA2LAB_SEED";
pub const DEFAULT_SEED: u64 = 42;

/// Initial density for flow runs and single-field checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum U0Spec {
    /// Seeded corpus member(s).
    Random,
    /// `a + b cos r`
    Eigenmode { a: f64, b: f64 },
    /// `(2 + cos r)^{1−n}`
    Counterexample,
}

impl FromStr for U0Spec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s == "random" {
            return Ok(Self::Random);
        }
        if s == "counterexample" {
            return Ok(Self::Counterexample);
        }
        if let Some(rest) = s.strip_prefix("eigenmode:") {
            let parts = parse_list(rest)?;
            if let [a, b] = parts[..] {
                if !(a > b.abs()) {
                    return Err(CliError::Config(format!(
                        "eigenmode needs a > |b| for positivity, got a={a}, b={b}"
                    )));
                }
                return Ok(Self::Eigenmode { a, b });
            }
        }
        Err(CliError::Config(format!(
            "u0 must be 'random', 'eigenmode:a,b' or 'counterexample', got '{s}'"
        )))
    }
}

/// Probe functional family; the sweep parameter comes from `param_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalKind {
    Ji,
    Weighted,
    Modified,
}

impl FromStr for FunctionalKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ji" => Ok(Self::Ji),
            "weighted" => Ok(Self::Weighted),
            "modified" => Ok(Self::Modified),
            other => Err(CliError::Config(format!("unknown functional '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub dimension: usize,
    pub grid_order: usize,
    pub seed: u64,
    pub trials: usize,
    pub theorem: Option<TheoremId>,
    pub functional: FunctionalKind,
    pub param_s: Vec<f64>,
    pub param_p: Vec<f64>,
    pub param_q: Vec<f64>,
    pub exploratory: bool,
    pub u0: U0Spec,
    pub multistarts: usize,
    pub max_iter: usize,
    pub modes: usize,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            grid_order: 64,
            seed: DEFAULT_SEED,
            trials: 20,
            theorem: None,
            functional: FunctionalKind::Ji,
            param_s: Vec::new(),
            param_p: Vec::new(),
            param_q: Vec::new(),
            exploratory: false,
            u0: U0Spec::Random,
            multistarts: 20,
            max_iter: 200,
            modes: 8,
            output: None,
            csv: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// Long-form flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat key = value configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sphere dimension n (>= 2).
    #[arg(long, global = true)]
    pub dimension: Option<usize>,
    /// Quadrature order.
    #[arg(long, global = true)]
    pub grid_order: Option<usize>,
    /// Root seed for corpora and multistarts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Theorem id: ji, weighted, modified, sobolev, logsob, poincare, rothaus, del14.
    #[arg(long, global = true)]
    pub theorem: Option<String>,
    /// Probe functional: ji, weighted or modified.
    #[arg(long, global = true)]
    pub functional: Option<String>,
    /// Comma-separated weight exponents; fractions like 16/7 are accepted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub param_s: Option<String>,
    /// Comma-separated Tsallis exponents.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub param_p: Option<String>,
    /// Comma-separated Sobolev exponents.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub param_q: Option<String>,
    /// Number of corpus fields.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Accept parameters outside the admissible ranges; such cases never fail a run.
    #[arg(long, global = true)]
    pub exploratory: bool,
    /// Initial density: random, eigenmode:a,b or counterexample.
    #[arg(long, global = true)]
    pub u0: Option<String>,
    /// Random starts per probe (one small-amplitude start is added).
    #[arg(long, global = true)]
    pub multistarts: Option<usize>,
    /// Iteration cap per probe start.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Log-basis truncation K for probes.
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    /// JSON report path (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Trajectory CSV path for the flow command.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Tolerance override NAME=VALUE, repeatable (e.g. margin=1e-9).
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

fn parse_real(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (parse_plain(a)?, parse_plain(b)?);
            a / b
        }
        None => parse_plain(s)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!("'{s}' is not a finite number")))
    }
}

fn parse_plain(s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("'{s}' is not a number")))
}

/// `"-5, 0, 16/7"` → `[-5, 0, 2.2857…]`; an empty string is an empty list.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_real)
        .collect()
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: '{v}' is not a valid integer")))
}

fn parse_bool(key: &str, v: &str) -> CliResult<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: '{v}' is not a boolean"))),
    }
}

fn set_tolerance(tol: &mut Tolerances, name: &str, v: &str) -> CliResult<()> {
    let value = parse_real(v)?;
    if !(value >= 0.0) {
        return Err(CliError::Config(format!("tolerance {name} must be >= 0")));
    }
    let slot = match name.trim().replace('-', "_").as_str() {
        "identity" => &mut tol.identity,
        "margin" => &mut tol.margin,
        "ode" => &mut tol.ode,
        "fd_first" => &mut tol.fd_first,
        "fd_second" => &mut tol.fd_second,
        "decay" => &mut tol.decay,
        "sobolev_routes" => &mut tol.sobolev_routes,
        "probe_lower" => &mut tol.probe_lower,
        "mass" => &mut tol.mass,
        "monotone" => &mut tol.monotone,
        "resolution_factor" => &mut tol.resolution_factor,
        other => return Err(CliError::Config(format!("unknown tolerance '{other}'"))),
    };
    *slot = value;
    Ok(())
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    fn apply(&mut self, key: &str, v: &str) -> CliResult<()> {
        match key {
            "dimension" => self.dimension = parse_int(key, v)?,
            "grid_order" => self.grid_order = parse_int(key, v)?,
            "seed" => self.seed = parse_int(key, v)?,
            "trials" => self.trials = parse_int(key, v)?,
            "theorem" => {
                self.theorem = Some(
                    v.parse()
                        .map_err(|e: gamma2lab_core::Error| CliError::Config(e.to_string()))?,
                )
            }
            "functional" => self.functional = v.parse()?,
            "param_s" => self.param_s = parse_list(v)?,
            "param_p" => self.param_p = parse_list(v)?,
            "param_q" => self.param_q = parse_list(v)?,
            "exploratory" => self.exploratory = parse_bool(key, v)?,
            "u0" => self.u0 = v.parse()?,
            "multistarts" => self.multistarts = parse_int(key, v)?,
            "max_iter" => self.max_iter = parse_int(key, v)?,
            "modes" => self.modes = parse_int(key, v)?,
            "output" => self.output = Some(PathBuf::from(v)),
            "csv" => self.csv = Some(PathBuf::from(v)),
            _ => match key
                .strip_prefix("tol.")
                .or_else(|| key.strip_prefix("tolerance."))
            {
                Some(name) => set_tolerance(&mut self.tolerances, name, v)?,
                None => {
                    return Err(CliError::Config(format!(
                        "unknown configuration key '{key}'"
                    )))
                }
            },
        }
        Ok(())
    }

    /// Defaults, then the file named by `--config`, then flags, then the
    /// environment seed fallback.
    pub fn resolve(flags: &Overrides, env_seed: Option<String>) -> CliResult<Self> {
        let mut cfg = Self::default();
        let mut seed_set = false;
        if let Some(path) = &flags.config {
            let file = read_config_file(path)?;
            seed_set = file.contains_key("seed");
            for (k, v) in &file {
                cfg.apply(k, v)?;
            }
        }
        let pairs: [(&str, Option<String>); 15] = [
            ("dimension", flags.dimension.map(|x| x.to_string())),
            ("grid_order", flags.grid_order.map(|x| x.to_string())),
            ("seed", flags.seed.map(|x| x.to_string())),
            ("trials", flags.trials.map(|x| x.to_string())),
            ("theorem", flags.theorem.clone()),
            ("functional", flags.functional.clone()),
            ("param_s", flags.param_s.clone()),
            ("param_p", flags.param_p.clone()),
            ("param_q", flags.param_q.clone()),
            ("u0", flags.u0.clone()),
            ("multistarts", flags.multistarts.map(|x| x.to_string())),
            ("max_iter", flags.max_iter.map(|x| x.to_string())),
            ("modes", flags.modes.map(|x| x.to_string())),
            (
                "output",
                flags.output.as_ref().map(|p| p.display().to_string()),
            ),
            ("csv", flags.csv.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.apply(k, &v)?;
            }
        }
        seed_set |= flags.seed.is_some();
        if flags.exploratory {
            cfg.exploratory = true;
        }
        for t in &flags.tolerances {
            let (name, v) = t.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--tolerance expects NAME=VALUE, got '{t}'"))
            })?;
            set_tolerance(&mut cfg.tolerances, name, v)?;
        }
        if !seed_set {
            if let Some(s) = env_seed {
                cfg.seed = parse_int(SEED_ENV, &s)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> CliResult<()> {
        if self.dimension < 2 {
            return Err(CliError::Config(format!(
                "dimension must be >= 2, got {}",
                self.dimension
            )));
        }
        if !(MIN_ORDER..=MAX_ORDER).contains(&self.grid_order) {
            return Err(CliError::Config(format!(
                "grid order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {}",
                self.grid_order
            )));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_accept_fractions_and_negatives() {
        assert_eq!(
            parse_list("-5, 0,16/7").unwrap(),
            vec![-5.0, 0.0, 16.0 / 7.0]
        );
        assert!(parse_list("").unwrap().is_empty());
        assert!(parse_list("1,x").is_err());
        assert!(parse_list("1/0").is_err());
    }

    #[test]
    fn u0_mini_language() {
        assert_eq!("random".parse::<U0Spec>().unwrap(), U0Spec::Random);
        assert_eq!(
            "eigenmode:1,0.5".parse::<U0Spec>().unwrap(),
            U0Spec::Eigenmode { a: 1.0, b: 0.5 }
        );
        assert_eq!(
            "counterexample".parse::<U0Spec>().unwrap(),
            U0Spec::Counterexample
        );
        assert!("eigenmode:0.5,1".parse::<U0Spec>().is_err());
        assert!("gaussian".parse::<U0Spec>().is_err());
    }

    #[test]
    fn file_then_flags_then_env() {
        let dir = std::env::temp_dir().join(format!("g2l-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(
            &path,
            "# sweep\ndimension = 3\nparam-s = -5, 0\ntol.margin = 1e-9\ntrials=4\n",
        )
        .unwrap();
        let flags = Overrides {
            config: Some(path.clone()),
            trials: Some(7),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&flags, Some("99".into())).unwrap();
        assert_eq!(cfg.dimension, 3);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.param_s, vec![-5.0, 0.0]);
        assert_eq!(cfg.tolerances.margin, 1e-9);
        assert_eq!(cfg.seed, 99);

        std::fs::write(&path, "seed = 5\n").unwrap();
        let cfg = RunConfig::resolve(&flags, Some("99".into())).unwrap();
        assert_eq!(cfg.seed, 5);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_config_text("dimension 3").is_err());
        let flags = Overrides {
            dimension: Some(1),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&flags, None).is_err());
        let flags = Overrides {
            tolerances: vec!["nope=1".into()],
            ..Default::default()
        };
        assert!(RunConfig::resolve(&flags, None).is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.apply("colour", "red").is_err());
    }
}
