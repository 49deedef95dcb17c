//! Run configuration in a flat `key = value` format.
//!
//! ```text
//! # breather pulse, proposed scheme
//! method.scheme = proposed_avg
//! method.points = 117
//! method.dt = 0.1
//! method.t_end = 60
//! initial.family = breather
//! initial.xi = 0.38
//! initial.S = 70
//! ```
//!
//! Lines starting with `#` are comments. Keys not listed in [`KEYS`] are
//! rejected. [`RunConfig::to_text`] writes every key, and parsing that text
//! gives back the same configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::hodograph::Summation;
use crate::solver::{Damping, JacobianMode, SolverConfig};

pub const KEYS: &[&str] = &[
    "method.scheme",
    "method.points",
    "method.dt",
    "method.t_end",
    "method.stride",
    "method.summation",
    "initial.family",
    "initial.xi",
    "initial.v",
    "initial.x0",
    "initial.sign",
    "initial.periods",
    "initial.S",
    "initial.L",
    "initial.path",
    "initial.theta_init",
    "solver.tol",
    "solver.max_iter",
    "solver.jacobian",
    "solver.fd_epsilon",
    "solver.damping",
    "run.seed",
    "run.label",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ProposedAvg,
    ProposedCentral,
    NormPreserving,
    Multisymplectic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ProposedAvg => "proposed_avg",
            Method::ProposedCentral => "proposed_central",
            Method::NormPreserving => "norm_preserving",
            Method::Multisymplectic => "multisymplectic",
        }
    }

    pub fn is_moving_mesh(self) -> bool {
        matches!(self, Method::ProposedAvg | Method::ProposedCentral)
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "proposed_avg" => Method::ProposedAvg,
            "proposed_central" => Method::ProposedCentral,
            "norm_preserving" => Method::NormPreserving,
            "multisymplectic" => Method::Multisymplectic,
            _ => return Err(Error::Config(format!("unknown method.scheme '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Breather,
    LoopAntiloop,
    Hump,
    UprightLoop,
    Alternating,
    CsvCurve,
    CsvProfile,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Breather => "breather",
            Family::LoopAntiloop => "loop_antiloop",
            Family::Hump => "hump",
            Family::UprightLoop => "upright_loop",
            Family::Alternating => "alternating",
            Family::CsvCurve => "csv_curve",
            Family::CsvProfile => "csv_profile",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "breather" => Family::Breather,
            "loop_antiloop" => Family::LoopAntiloop,
            "hump" => Family::Hump,
            "upright_loop" => Family::UprightLoop,
            "alternating" => Family::Alternating,
            "csv_curve" => Family::CsvCurve,
            "csv_profile" => Family::CsvProfile,
            _ => return Err(Error::Config(format!("unknown initial.family '{s}'"))),
        })
    }
}

/// How `θ^0` is obtained from the initial curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaInit {
    /// Chord angles between consecutive samples.
    Chord,
    /// Tangent angle at the grid nodes.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub family: Family,
    pub xi: f64,
    pub v: f64,
    pub x0: f64,
    pub sign: f64,
    pub periods: usize,
    /// Computational period in `s`; breathers default to 70 (80 for the
    /// loop/anti-loop pair), periodic families to a whole number of periods.
    pub s_len: Option<f64>,
    /// Physical window for fixed-mesh runs and sampled profiles.
    pub window: Option<f64>,
    pub path: Option<PathBuf>,
    pub theta_init: Option<ThetaInit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    /// `K` for moving-mesh runs, `N` for fixed-mesh runs.
    pub points: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Snapshot every `stride` levels.
    pub stride: usize,
    pub summation: Summation,
    pub initial: InitialConfig,
    pub solver: SolverConfig,
    pub seed: u64,
    pub label: String,
}

impl RunConfig {
    /// Number of time steps, `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.points < 3 {
            return bad(format!(
                "method.points must be at least 3, got {}",
                self.points
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("method.dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!(
                "method.t_end must be non-negative, got {}",
                self.t_end
            ));
        }
        if self.stride == 0 {
            return bad("method.stride must be at least 1".into());
        }
        self.solver.validate().map_err(Error::Config)?;
        let ini = &self.initial;
        if ini.sign != 1.0 && ini.sign != -1.0 {
            return bad(format!("initial.sign must be 1 or -1, got {}", ini.sign));
        }
        if ini.periods == 0 {
            return bad("initial.periods must be at least 1".into());
        }
        if matches!(ini.family, Family::CsvCurve | Family::CsvProfile) && ini.path.is_none() {
            return bad(format!(
                "initial.family = {} needs initial.path",
                ini.family.name()
            ));
        }
        if ini.family == Family::CsvProfile && ini.window.is_none() {
            return bad("initial.family = csv_profile needs the period initial.L".into());
        }
        if !self.method.is_moving_mesh() {
            let multi = match ini.family {
                Family::LoopAntiloop | Family::UprightLoop | Family::Alternating => true,
                Family::Breather => ini.xi >= crate::exact::XI_CRITICAL,
                _ => false,
            };
            if multi {
                return bad(format!(
                    "{} initial data is multi-valued and cannot be used with {}",
                    ini.family.name(),
                    self.method.name()
                ));
            }
            if ini.family == Family::CsvCurve && ini.window.is_none() {
                return bad("a csv_curve on a fixed mesh needs the period initial.L".into());
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key '{k}'", no + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{k}'",
                    no + 1
                )));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> {
            get(k).map_or(Ok(default), |v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("{k}: '{v}' is not a number")))
            })
        };
        let opt_num = |k: &str| -> Result<Option<f64>> {
            get(k).map_or(Ok(None), |v| {
                v.parse()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("{k}: '{v}' is not a number")))
            })
        };
        let int = |k: &str, default: usize| -> Result<usize> {
            get(k).map_or(Ok(default), |v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("{k}: '{v}' is not a non-negative integer")))
            })
        };
        let method = Method::parse(get("method.scheme").unwrap_or("proposed_avg"))?;
        let family = Family::parse(
            get("initial.family")
                .ok_or_else(|| Error::Config("initial.family is required".into()))?,
        )?;
        let summation = match get("method.summation").unwrap_or("plain") {
            "plain" => Summation::Plain,
            "compensated" => Summation::Compensated,
            s => return Err(Error::Config(format!("unknown method.summation '{s}'"))),
        };
        let theta_init = match get("initial.theta_init") {
            None | Some("auto") => None,
            Some("chord") => Some(ThetaInit::Chord),
            Some("analytic") => Some(ThetaInit::Analytic),
            Some(s) => return Err(Error::Config(format!("unknown initial.theta_init '{s}'"))),
        };
        let defaults = SolverConfig::default();
        let jacobian_mode = match get("solver.jacobian").unwrap_or("analytic") {
            "analytic" => JacobianMode::Analytic,
            "finite_difference" => JacobianMode::FiniteDifference,
            s => return Err(Error::Config(format!("unknown solver.jacobian '{s}'"))),
        };
        let damping = match get("solver.damping").unwrap_or("backtracking") {
            "none" => Damping::None,
            "backtracking" => Damping::Backtracking,
            s => return Err(Error::Config(format!("unknown solver.damping '{s}'"))),
        };
        let cfg = RunConfig {
            method,
            points: int("method.points", 0)?,
            dt: num("method.dt", f64::NAN)?,
            t_end: num("method.t_end", f64::NAN)?,
            stride: int("method.stride", 10)?,
            summation,
            initial: InitialConfig {
                family,
                xi: num("initial.xi", f64::NAN)?,
                v: num("initial.v", 1.0)?,
                x0: num("initial.x0", 0.0)?,
                sign: num("initial.sign", 1.0)?,
                periods: int("initial.periods", 1)?,
                s_len: opt_num("initial.S")?,
                window: opt_num("initial.L")?,
                path: get("initial.path").map(PathBuf::from),
                theta_init,
            },
            solver: SolverConfig {
                tol_residual: num("solver.tol", defaults.tol_residual)?,
                max_iter: int("solver.max_iter", defaults.max_iter)?,
                jacobian_mode,
                fd_epsilon: num("solver.fd_epsilon", defaults.fd_epsilon)?,
                damping,
            },
            seed: int("run.seed", 0)? as u64,
            label: get("run.label").unwrap_or("run").to_string(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every key with full round-trip precision.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let ini = &self.initial;
        let _ = writeln!(s, "method.scheme = {}", self.method.name());
        let _ = writeln!(s, "method.points = {}", self.points);
        let _ = writeln!(s, "method.dt = {:e}", self.dt);
        let _ = writeln!(s, "method.t_end = {:e}", self.t_end);
        let _ = writeln!(s, "method.stride = {}", self.stride);
        let summation = match self.summation {
            Summation::Plain => "plain",
            Summation::Compensated => "compensated",
        };
        let _ = writeln!(s, "method.summation = {summation}");
        let _ = writeln!(s, "initial.family = {}", ini.family.name());
        let _ = writeln!(s, "initial.xi = {:e}", ini.xi);
        let _ = writeln!(s, "initial.v = {:e}", ini.v);
        let _ = writeln!(s, "initial.x0 = {:e}", ini.x0);
        let _ = writeln!(s, "initial.sign = {:e}", ini.sign);
        let _ = writeln!(s, "initial.periods = {}", ini.periods);
        if let Some(v) = ini.s_len {
            let _ = writeln!(s, "initial.S = {v:e}");
        }
        if let Some(v) = ini.window {
            let _ = writeln!(s, "initial.L = {v:e}");
        }
        if let Some(p) = &ini.path {
            let _ = writeln!(s, "initial.path = {}", p.display());
        }
        let theta = match ini.theta_init {
            None => "auto",
            Some(ThetaInit::Chord) => "chord",
            Some(ThetaInit::Analytic) => "analytic",
        };
        let _ = writeln!(s, "initial.theta_init = {theta}");
        let _ = writeln!(s, "solver.tol = {:e}", self.solver.tol_residual);
        let _ = writeln!(s, "solver.max_iter = {}", self.solver.max_iter);
        let jac = match self.solver.jacobian_mode {
            JacobianMode::Analytic => "analytic",
            JacobianMode::FiniteDifference => "finite_difference",
        };
        let _ = writeln!(s, "solver.jacobian = {jac}");
        let _ = writeln!(s, "solver.fd_epsilon = {:e}", self.solver.fd_epsilon);
        let damping = match self.solver.damping {
            Damping::None => "none",
            Damping::Backtracking => "backtracking",
        };
        let _ = writeln!(s, "solver.damping = {damping}");
        let _ = writeln!(s, "run.seed = {}", self.seed);
        let _ = writeln!(s, "run.label = {}", self.label);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BREATHER: &str = "
        # comment
        method.scheme = proposed_avg
        method.points = 117
        method.dt = 0.1
        method.t_end = 60
        initial.family = breather
        initial.xi = 0.38
        initial.S = 70
    ";

    #[test]
    fn parse_and_roundtrip() {
        let cfg = RunConfig::parse(BREATHER).unwrap();
        assert_eq!(cfg.method, Method::ProposedAvg);
        assert_eq!(cfg.points, 117);
        assert_eq!(cfg.steps(), 600);
        assert_eq!(cfg.initial.s_len, Some(70.0));
        assert_eq!(cfg.solver, SolverConfig::default());
        let again = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejections() {
        assert!(RunConfig::parse(&format!("{BREATHER}\nmethod.bogus = 1")).is_err());
        assert!(RunConfig::parse(&format!("{BREATHER}\nmethod.dt = 0.2")).is_err());
        assert!(RunConfig::parse(&BREATHER.replace("0.1", "fast")).is_err());
        assert!(RunConfig::parse(&BREATHER.replace("proposed_avg", "norm_preserving")).is_ok());
        let lp = BREATHER
            .replace("breather", "loop_antiloop")
            .replace("0.38", "1.2");
        assert!(RunConfig::parse(&lp).is_ok());
        assert!(RunConfig::parse(&lp.replace("proposed_avg", "multisymplectic")).is_err());
        assert!(RunConfig::parse(&BREATHER.replace("117", "2")).is_err());
        assert!(RunConfig::parse("method.points = 5").is_err());
    }
}
