//! Complete simulations: initial data, time stepping, reconstruction,
//! invariant records and file output.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::baselines::{FixedIntegrator, FixedScheme};
use crate::config::{Family, Method, RunConfig, ThetaInit};
use crate::diagnostics::{self, curve_error, drift, error_vs_exact_theta, fmt17, InvariantRecord};
use crate::error::{Error, Result};
use crate::exact::{BreatherParams, ExactSolution, TravelingWaveParams, WaveFamily};
use crate::fields::{CurveState, GridSpec, ThetaField, UniformField};
use crate::hodograph::{naive_base_u, BaseRule, Reconstructor};
use crate::init::{
    arclength_total_piecewise, equidistribute_piecewise, read_curve_csv, read_profile_csv,
    tangent_angle, theta_from_analytic, theta_from_samples, uniform_from_curve, SampledProfile,
};
use crate::parallel::{self, Execution};
use crate::sg_dvdm::{Integrator, Scheme};

/// Relative `H_d` drift allowed by [`invariants_report`] for the proposed schemes.
pub const HAMILTONIAN_GATE: f64 = 1e-8;
/// Relative `I` drift allowed by [`invariants_report`] for the norm-preserving scheme.
pub const NORM_GATE: f64 = 1e-8;

const BREATHER_S: f64 = 70.0;
const LOOP_S: f64 = 80.0;

/// Initial data for a moving-mesh run.
#[derive(Debug, Clone)]
pub struct MovingStart {
    pub theta: ThetaField,
    pub base_x: f64,
    /// Arc-length label of node 0.
    pub s_start: f64,
    pub exact: Option<ExactSolution>,
}

/// Initial data for a fixed-mesh run.
#[derive(Debug, Clone)]
pub struct FixedStart {
    pub u: UniformField,
    pub x_start: f64,
}

#[derive(Debug, Clone)]
pub enum Start {
    Moving(MovingStart),
    Fixed(FixedStart),
}

/// One output level handed to the observer of [`simulate_with`].
#[derive(Debug, Clone, Copy)]
pub enum Level<'a> {
    Moving {
        theta: &'a ThetaField,
        next: &'a ThetaField,
        curve: &'a CurveState,
    },
    Fixed {
        u: &'a UniformField,
    },
}

/// Rows of one `snapshots_####.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub level: usize,
    pub time: f64,
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub records: Vec<InvariantRecord>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub newton_iterations: usize,
    /// Largest accepted Newton residual.
    pub max_residual: f64,
    pub max_abs_u: f64,
    /// `max |u_K − u_0|` over levels with `u_0` from the constraint.
    pub max_closure_gap: f64,
    /// `max |Σ u_k(x_k − x_{k−1})|` over levels.
    pub max_constraint: f64,
    /// The same constraint with `u_0 = δ⁺_τ θ_0`.
    pub max_naive_constraint: f64,
    /// Physical-plane error at the last level, after base alignment.
    pub curve_error: Option<f64>,
    /// `θ` error at the last level, for families with a closed-form angle.
    pub theta_error: Option<f64>,
}

fn exact_for(cfg: &RunConfig) -> Result<Option<ExactSolution>> {
    let ini = &cfg.initial;
    let wave = |family| {
        TravelingWaveParams::new(family, ini.v, ini.x0, ini.xi, ini.sign).map(ExactSolution::Wave)
    };
    Ok(Some(match ini.family {
        Family::Breather => ExactSolution::Breather(BreatherParams::pulse(ini.xi)?),
        Family::LoopAntiloop => ExactSolution::Breather(BreatherParams::loop_antiloop(ini.xi)?),
        Family::Hump => wave(WaveFamily::Hump)?,
        Family::UprightLoop => wave(WaveFamily::UprightLoop)?,
        Family::Alternating => wave(WaveFamily::Alternating)?,
        Family::CsvCurve | Family::CsvProfile => return Ok(None),
    }))
}

/// Arc-length window and first label for an exact family.
fn exact_window(cfg: &RunConfig, exact: &ExactSolution) -> (f64, f64) {
    match exact {
        ExactSolution::Breather(p) => {
            let default = match p.mode() {
                crate::exact::BreatherMode::Pulse => BREATHER_S,
                crate::exact::BreatherMode::LoopAntiloop => LOOP_S,
            };
            let s = cfg.initial.s_len.unwrap_or(default);
            (s, -0.5 * s)
        }
        ExactSolution::Wave(p) => (
            cfg.initial
                .s_len
                .unwrap_or(cfg.initial.periods as f64 * p.period()),
            0.0,
        ),
    }
}

/// Builds the starting level described by `cfg`.
pub fn prepare(cfg: &RunConfig) -> Result<Start> {
    cfg.validate()?;
    let exact = exact_for(cfg)?;
    if cfg.method.is_moving_mesh() {
        prepare_moving(cfg, exact).map(Start::Moving)
    } else {
        prepare_fixed(cfg, exact).map(Start::Fixed)
    }
}

fn prepare_moving(cfg: &RunConfig, exact: Option<ExactSolution>) -> Result<MovingStart> {
    let k = cfg.points;
    let levels = cfg.steps() + 1;
    if let Some(sol) = exact {
        let (s_len, s_start) = exact_window(cfg, &sol);
        let grid = GridSpec::with_period(k, s_len, cfg.dt, levels)?;
        let ds = grid.ds();
        let mode = cfg.initial.theta_init.unwrap_or(if sol.is_periodic() {
            ThetaInit::Analytic
        } else {
            ThetaInit::Chord
        });
        let theta = match mode {
            ThetaInit::Chord => {
                let (x, u): (Vec<f64>, Vec<f64>) = (0..=k)
                    .map(|i| sol.eval(0.0, s_start + i as f64 * ds))
                    .unzip();
                theta_from_samples(&x, &u, grid)?
            }
            ThetaInit::Analytic => match sol.theta(0.0, s_start) {
                Some(_) => {
                    theta_from_analytic(|s| sol.theta(0.0, s).unwrap_or(f64::NAN), s_start, grid)?
                }
                None => {
                    theta_from_analytic(|s| tangent_angle(&|s| sol.eval(0.0, s), s), s_start, grid)?
                }
            },
        };
        return Ok(MovingStart {
            theta,
            base_x: sol.eval(0.0, s_start).0,
            s_start,
            exact,
        });
    }
    let path = cfg.initial.path.as_deref().unwrap_or(Path::new(""));
    let (x, u, s_len) = match cfg.initial.family {
        Family::CsvCurve => {
            let (x, u) = read_curve_csv(path)?;
            if x.len() != k + 1 {
                return Err(Error::Config(format!(
                    "{} has {} points but method.points = {k} needs {}",
                    path.display(),
                    x.len(),
                    k + 1
                )));
            }
            let chords = (1..=k)
                .map(|i| (x[i] - x[i - 1]).hypot(u[i] - u[i - 1]))
                .sum();
            (x, u, cfg.initial.s_len.unwrap_or(chords))
        }
        _ => {
            let (px, pu) = read_profile_csv(path)?;
            let l = cfg.initial.window.unwrap_or(f64::NAN);
            let profile = SampledProfile::new(px, pu, l)?;
            let x0 = profile.start();
            let knots = profile.knots();
            let slope = |x| profile.derivative(x0 + x);
            let (xs, us) =
                equidistribute_piecewise(|x| profile.value(x0 + x), slope, l, k, &knots)?;
            let s_len = arclength_total_piecewise(slope, l, &knots)?;
            (xs.iter().map(|v| v + x0).collect(), us, s_len)
        }
    };
    let grid = GridSpec::with_period(k, s_len, cfg.dt, levels)?;
    Ok(MovingStart {
        theta: theta_from_samples(&x, &u, grid)?,
        base_x: x[0],
        s_start: 0.0,
        exact: None,
    })
}

fn prepare_fixed(cfg: &RunConfig, exact: Option<ExactSolution>) -> Result<FixedStart> {
    let n = cfg.points;
    if let Some(sol) = exact {
        let (s_len, s_start) = exact_window(cfg, &sol);
        let (l, x_start, s_lo, s_hi) = match sol {
            ExactSolution::Breather(p) => {
                let l = cfg.initial.window.unwrap_or(p.window_length(s_len));
                (l, -0.5 * l, -s_len, s_len)
            }
            ExactSolution::Wave(p) => {
                let l = cfg
                    .initial
                    .window
                    .unwrap_or(cfg.initial.periods as f64 * p.window_per_period());
                (
                    l,
                    sol.eval(0.0, s_start).0,
                    s_start - s_len,
                    s_start + 2.0 * s_len,
                )
            }
        };
        let dx = l / n as f64;
        let u = uniform_from_curve(|s| sol.eval(0.0, s), s_lo, s_hi, x_start, dx, n)?;
        return Ok(FixedStart { u, x_start });
    }
    let path = cfg.initial.path.as_deref().unwrap_or(Path::new(""));
    let (px, pu) = match cfg.initial.family {
        Family::CsvCurve => {
            let (mut x, mut u) = read_curve_csv(path)?;
            let l = cfg.initial.window.unwrap_or(f64::NAN);
            // a closing sample one period on is dropped
            if x.len() > 1 && (x[x.len() - 1] - x[0] - l).abs() <= 1e-12 * l.abs() {
                x.pop();
                u.pop();
            }
            (x, u)
        }
        _ => read_profile_csv(path)?,
    };
    let l = cfg.initial.window.unwrap_or(f64::NAN);
    let profile = SampledProfile::new(px, pu, l).map_err(|_| {
        Error::Config(format!(
            "{} is not a single-valued profile over one period and cannot be used with {}",
            path.display(),
            cfg.method.name()
        ))
    })?;
    let x_start = profile.start();
    let dx = l / n as f64;
    let mut u: Vec<f64> = (0..n)
        .map(|j| profile.value(x_start + j as f64 * dx))
        .collect();
    let mean = u.iter().sum::<f64>() / n as f64;
    u.iter_mut().for_each(|v| *v -= mean);
    Ok(FixedStart {
        u: UniformField::new(u, dx, 0)?,
        x_start,
    })
}

/// Runs `cfg` in memory.
pub fn simulate(cfg: &RunConfig) -> Result<RunSummary> {
    simulate_with(cfg, |_| {})
}

/// Runs `cfg` and calls `observe` on every level `0..=M`.
pub fn simulate_with<F: FnMut(Level<'_>)>(cfg: &RunConfig, observe: F) -> Result<RunSummary> {
    match prepare(cfg)? {
        Start::Moving(start) => simulate_moving(cfg, start, observe),
        Start::Fixed(start) => simulate_fixed(cfg, start, observe),
    }
}

fn wants_snapshot(cfg: &RunConfig, m: usize, last: usize) -> bool {
    m.is_multiple_of(cfg.stride) || m == last
}

/// Runs from an explicit starting level.
pub fn simulate_moving<F: FnMut(Level<'_>)>(
    cfg: &RunConfig,
    start: MovingStart,
    mut observe: F,
) -> Result<RunSummary> {
    let scheme = match cfg.method {
        Method::ProposedCentral => Scheme::CentralDifference,
        _ => Scheme::AverageDifference,
    };
    let steps = cfg.steps();
    let MovingStart {
        theta,
        base_x,
        s_start,
        exact,
    } = start;
    let ds = theta.grid().ds();
    let dtau = theta.grid().dtau();
    let branch = exact.and_then(|sol| {
        sol.theta(0.0, s_start).map(|_| {
            diagnostics::branch_offset(&theta, |s| sol.theta(0.0, s).unwrap_or(f64::NAN), s_start)
        })
    });
    let mut integ = Integrator::new(theta, scheme, cfg.solver);
    let mut recon = Reconstructor::new(base_x, 0, BaseRule::Constraint, cfg.summation);
    let mut out = RunSummary {
        steps,
        ..RunSummary::default()
    };
    for m in 0..=steps {
        let curr = integ.current().clone();
        let next = integ.advance()?;
        let curve = recon.next_curve(&curr, next)?;
        let time = m as f64 * dtau;
        let rec = InvariantRecord::moving(time, &curr, &curve);
        let window = curve.window_length();
        let naive = rec.constraint_residual + (naive_base_u(&curr, next)? - curve.base_u) * window;
        out.max_abs_u = out.max_abs_u.max(curve.max_abs_u());
        out.max_closure_gap = out.max_closure_gap.max(rec.closure_gap.abs());
        out.max_constraint = out.max_constraint.max(rec.constraint_residual.abs());
        out.max_naive_constraint = out.max_naive_constraint.max(naive.abs());
        out.records.push(rec);
        if wants_snapshot(cfg, m, steps) {
            let k = curve.k();
            let mut th = Vec::with_capacity(k + 1);
            th.push(curr.values()[k - 1] - std::f64::consts::TAU * curr.winding() as f64);
            th.extend_from_slice(curr.values());
            out.snapshots.push(Snapshot {
                level: m,
                time,
                s: (0..=k).map(|i| s_start + i as f64 * ds).collect(),
                x: curve.x.clone(),
                u: curve.u.clone(),
                theta: Some(th),
            });
        }
        if m == steps {
            if let Some(sol) = exact {
                out.curve_error = Some(curve_error(
                    &curve,
                    |t, s| sol.eval(t, s),
                    time,
                    dtau,
                    s_start,
                    ds,
                ));
                out.theta_error = branch.map(|b| {
                    error_vs_exact_theta(
                        &curr,
                        |s| sol.theta(time, s).unwrap_or(f64::NAN),
                        s_start,
                        b,
                    )
                });
            }
        }
        observe(Level::Moving {
            theta: &curr,
            next,
            curve: &curve,
        });
    }
    out.newton_iterations = integ.iterations();
    out.max_residual = integ.max_residual();
    Ok(out)
}

pub fn simulate_fixed<F: FnMut(Level<'_>)>(
    cfg: &RunConfig,
    start: FixedStart,
    mut observe: F,
) -> Result<RunSummary> {
    let scheme = match cfg.method {
        Method::NormPreserving => FixedScheme::NormPreserving,
        _ => FixedScheme::Multisymplectic,
    };
    let steps = cfg.steps();
    let FixedStart { u, x_start } = start;
    let dx = u.dx;
    let mut integ = FixedIntegrator::new(u, cfg.dt, scheme, cfg.solver);
    let mut out = RunSummary {
        steps,
        ..RunSummary::default()
    };
    for m in 0..=steps {
        if m > 0 {
            integ.advance()?;
        }
        let curr = integ.current();
        let time = m as f64 * cfg.dt;
        let rec = InvariantRecord::fixed(time, curr);
        out.max_abs_u = out.max_abs_u.max(curr.max_abs());
        out.max_constraint = out.max_constraint.max(rec.constraint_residual.abs());
        out.records.push(rec);
        if wants_snapshot(cfg, m, steps) {
            let x: Vec<f64> = (0..curr.n()).map(|j| x_start + j as f64 * dx).collect();
            out.snapshots.push(Snapshot {
                level: m,
                time,
                s: x.clone(),
                x,
                u: curr.u.clone(),
                theta: None,
            });
        }
        observe(Level::Fixed { u: curr });
    }
    out.newton_iterations = integ.iterations();
    out.max_residual = integ.max_residual();
    Ok(out)
}

fn snapshot_csv(snap: &Snapshot) -> String {
    let mut s = String::from(if snap.theta.is_some() {
        "k,s,x,u,theta\n"
    } else {
        "k,s,x,u\n"
    });
    for k in 0..snap.x.len() {
        let _ = write!(
            s,
            "{k},{},{},{}",
            fmt17(snap.s[k]),
            fmt17(snap.x[k]),
            fmt17(snap.u[k])
        );
        if let Some(th) = &snap.theta {
            let _ = write!(s, ",{}", fmt17(th[k]));
        }
        s.push('\n');
    }
    s
}

fn plot_script(cfg: &RunConfig, summary: &RunSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# profiles of '{}' ({}, {})",
        cfg.label,
        cfg.method.name(),
        cfg.initial.family.name()
    );
    s.push_str("set datafile separator ','\n");
    s.push_str("set key off\nset xlabel 'x'\nset ylabel 'u'\nset grid\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    for snap in &summary.snapshots {
        let _ = writeln!(s, "set output 'profile_{:04}.png'", snap.level);
        let _ = writeln!(s, "set title 't = {}'", snap.time);
        let _ = writeln!(
            s,
            "plot 'snapshots_{:04}.csv' using 3:4 with lines lw 1.5, '' using 3:4 every 4 with points pt 7 ps 0.5",
            snap.level
        );
    }
    s.push_str("set output 'waterfall.png'\nset title 'profiles'\n");
    let files: Vec<String> = summary
        .snapshots
        .iter()
        .map(|snap| {
            format!(
                "'snapshots_{:04}.csv' using 3:($4 + {}) with lines",
                snap.level, snap.time
            )
        })
        .collect();
    if !files.is_empty() {
        let _ = writeln!(s, "set ylabel 'u + t'\nplot {}", files.join(", \\\n     "));
    }
    s.push_str("set output 'invariants.png'\nset title 'invariants'\nset xlabel 't'\nset ylabel 'value'\nset key on\n");
    s.push_str("plot 'invariants.csv' using 1:5 with lines title 'I', '' using 1:8 with lines title 'roughness'\n");
    s
}

/// Runs `cfg` and writes all artifacts into `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunSummary> {
    let summary = simulate(cfg)?;
    write_artifacts(cfg, &summary, dir)?;
    Ok(summary)
}

pub fn write_artifacts(cfg: &RunConfig, summary: &RunSummary, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for snap in &summary.snapshots {
        fs::write(
            dir.join(format!("snapshots_{:04}.csv", snap.level)),
            snapshot_csv(snap),
        )?;
    }
    let mut inv = String::from(InvariantRecord::HEADER);
    inv.push('\n');
    for r in &summary.records {
        inv.push_str(&r.to_csv_row());
        inv.push('\n');
    }
    fs::write(dir.join("invariants.csv"), inv)?;
    let meta = format!("# spmm {}\n{}", env!("CARGO_PKG_VERSION"), cfg.to_text());
    fs::write(dir.join("meta.txt"), meta)?;
    fs::write(dir.join("plot.gp"), plot_script(cfg, summary))?;
    Ok(())
}

/// Output directory for `cfg` under `root`.
pub fn artifact_dir(root: &Path, cfg: &RunConfig) -> PathBuf {
    root.join(&cfg.label)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub points: usize,
    pub dt: f64,
    pub curve_error: f64,
    pub theta_error: Option<f64>,
    pub max_closure_gap: f64,
    pub max_constraint: f64,
    pub max_naive_constraint: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// `log2(e_i / e_{i+1})` of the physical-plane error.
    pub fn curve_orders(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (w[0].curve_error / w[1].curve_error).log2())
            .collect()
    }

    pub fn theta_orders(&self) -> Vec<Option<f64>> {
        self.rows
            .windows(2)
            .map(|w| Some((w[0].theta_error? / w[1].theta_error?).log2()))
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].curve_error < w[0].curve_error)
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>10} {:>12} {:>7} {:>12} {:>7} {:>11} {:>11} {:>11}",
            "K",
            "dt",
            "curve_err",
            "order",
            "theta_err",
            "order",
            "closure",
            "constraint",
            "naive_u0"
        )?;
        let orders = self.curve_orders();
        let torders = self.theta_orders();
        for (i, r) in self.rows.iter().enumerate() {
            let o = if i == 0 {
                "-".to_string()
            } else {
                format!("{:.3}", orders[i - 1])
            };
            let t = r
                .theta_error
                .map_or("-".to_string(), |e| format!("{e:.4e}"));
            let to = match i {
                0 => "-".to_string(),
                _ => torders[i - 1].map_or("-".to_string(), |v| format!("{v:.3}")),
            };
            writeln!(
                f,
                "{:>6} {:>10.3e} {:>12.4e} {:>7} {:>12} {:>7} {:>11.3e} {:>11.3e} {:>11.3e}",
                r.points,
                r.dt,
                r.curve_error,
                o,
                t,
                to,
                r.max_closure_gap,
                r.max_constraint,
                r.max_naive_constraint
            )?;
        }
        Ok(())
    }
}

/// Configuration of refinement level `i`: `K_i = (K − 1)·2^i + 1` over the
/// same window with `Δτ_i = Δτ / 2^i`, so that `Δs` halves with `Δτ`.
pub fn refined(cfg: &RunConfig, i: usize) -> RunConfig {
    let mut c = cfg.clone();
    c.points = (cfg.points - 1) * (1 << i) + 1;
    c.dt = cfg.dt / (1 << i) as f64;
    c.stride = usize::MAX;
    c
}

/// Runs `levels` refinement levels of an exact-family configuration.
pub fn convergence(cfg: &RunConfig, levels: usize, exec: Execution) -> Result<ConvergenceTable> {
    if !cfg.method.is_moving_mesh() {
        return Err(Error::Config(
            "convergence needs a moving-mesh method".into(),
        ));
    }
    if exact_for(cfg)?.is_none() {
        return Err(Error::Config(
            "convergence needs an initial family with an exact solution".into(),
        ));
    }
    if levels == 0 {
        return Err(Error::Config("convergence needs at least one level".into()));
    }
    let configs: Vec<RunConfig> = (0..levels).map(|i| refined(cfg, i)).collect();
    let results = parallel::map(exec, &configs, |c| simulate(c).map(|s| (c.points, c.dt, s)));
    let mut rows = Vec::with_capacity(levels);
    for r in results {
        let (points, dt, s) = r?;
        rows.push(ConvergenceRow {
            points,
            dt,
            curve_error: s.curve_error.unwrap_or(f64::NAN),
            theta_error: s.theta_error,
            max_closure_gap: s.max_closure_gap,
            max_constraint: s.max_constraint,
            max_naive_constraint: s.max_naive_constraint,
        });
    }
    Ok(ConvergenceTable { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftLine {
    pub name: &'static str,
    pub abs: f64,
    pub rel: f64,
    /// `Some(passed)` when the quantity is gated.
    pub gate: Option<(f64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantsReport {
    pub method: Method,
    pub levels: usize,
    pub lines: Vec<DriftLine>,
    pub max_constraint: f64,
}

impl InvariantsReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.gate.is_none_or(|(_, ok)| ok))
    }
}

impl fmt::Display for InvariantsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "method {} over {} levels",
            self.method.name(),
            self.levels
        )?;
        for l in &self.lines {
            let gate = match l.gate {
                None => "reported".to_string(),
                Some((g, true)) => format!("PASS (gate {g:e})"),
                Some((g, false)) => format!("FAIL (gate {g:e})"),
            };
            writeln!(
                f,
                "{:<22} abs {:>11.3e}  rel {:>11.3e}  {gate}",
                l.name, l.abs, l.rel
            )?;
        }
        writeln!(
            f,
            "{:<22} max {:>11.3e}",
            "constraint residual", self.max_constraint
        )
    }
}

/// Drift summary of a run directory written by [`run`].
pub fn invariants_report(dir: &Path) -> Result<InvariantsReport> {
    let meta = fs::read_to_string(dir.join("meta.txt"))?;
    let cfg = RunConfig::parse(&meta)?;
    let text = fs::read_to_string(dir.join("invariants.csv"))?;
    let mut records = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        records.push(InvariantRecord::from_csv_row(line).ok_or_else(|| {
            Error::Config(format!("invariants.csv line {}: malformed row", no + 1))
        })?);
    }
    let series = |f: fn(&InvariantRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let energies: Vec<f64> = records.iter().filter_map(|r| r.energy_e).collect();
    let mut lines = Vec::new();
    let mut push = |name, values: &[f64], gate: Option<f64>| {
        let (abs, rel) = drift(values);
        lines.push(DriftLine {
            name,
            abs,
            rel,
            gate: gate.map(|g| (g, rel <= g)),
        });
    };
    let (h_gate, i_gate) = match cfg.method {
        Method::ProposedAvg | Method::ProposedCentral => (Some(HAMILTONIAN_GATE), None),
        Method::NormPreserving => (None, Some(NORM_GATE)),
        Method::Multisymplectic => (None, None),
    };
    if cfg.method.is_moving_mesh() {
        push("H_d", &series(|r| r.h_d), h_gate);
    }
    push("norm I", &series(|r| r.norm_i), i_gate);
    if energies.len() == records.len() {
        push("energy E", &energies, None);
    }
    let max_constraint = records
        .iter()
        .map(|r| r.constraint_residual.abs())
        .fold(0.0, f64::max);
    Ok(InvariantsReport {
        method: cfg.method,
        levels: records.len(),
        lines,
        max_constraint,
    })
}
