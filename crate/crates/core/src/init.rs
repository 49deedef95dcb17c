//! Initial data for the sine-Gordon stage: `θ^0` from sampled or analytic
//! curves, arc-length equidistribution of a profile `u0(x)`, and fixed-mesh
//! samples for the baseline schemes.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ThetaField, UniformField};
use crate::quad;

/// Largest accepted angle change between neighbouring cells is `π − BRANCH_TOL`.
pub const BRANCH_TOL: f64 = 1e-2;
const WINDING_TOL: f64 = 1e-6;

fn lift_near(angle: f64, near: f64) -> f64 {
    angle + TAU * ((near - angle) / TAU).round()
}

/// `θ` from chord angles of `K + 1` samples `(x_k, u_k)`, `k = 0..K`.
///
/// `θ_k` is the angle of the chord from point `k − 1` to point `k`, lifted
/// continuously. The chord before point 0 is taken to be chord `K`, which
/// fixes the winding.
pub fn theta_from_samples(x: &[f64], u: &[f64], grid: GridSpec) -> Result<ThetaField> {
    let k = grid.k();
    if x.len() != k + 1 || u.len() != k + 1 {
        return Err(Error::Mismatch(format!(
            "expected {} samples for K = {k}, got {} and {}",
            k + 1,
            x.len(),
            u.len()
        )));
    }
    let mut theta = Vec::with_capacity(k);
    for i in 1..=k {
        let (dx, du) = (x[i] - x[i - 1], u[i] - u[i - 1]);
        if dx * dx + du * du == 0.0 {
            return Err(Error::CoincidentPoints { cell: i });
        }
        let raw = du.atan2(dx);
        let t = match theta.last() {
            None => raw,
            Some(&prev) => {
                let t = lift_near(raw, prev);
                check_jump(i, t - prev)?;
                t
            }
        };
        theta.push(t);
    }
    let theta0 = lift_near(theta[k - 1], theta[0]);
    check_jump(1, theta[0] - theta0)?;
    let winding = winding_of(theta[k - 1] - theta0)?;
    ThetaField::new(theta, winding, grid, 0)
}

fn check_jump(cell: usize, jump: f64) -> Result<()> {
    if jump.abs() >= PI - BRANCH_TOL {
        return Err(Error::AmbiguousBranch { cell, jump });
    }
    Ok(())
}

fn winding_of(total: f64) -> Result<i64> {
    let estimate = total / TAU;
    let n = estimate.round();
    if (estimate - n).abs() > WINDING_TOL {
        return Err(Error::NonIntegerWinding { estimate });
    }
    Ok(n as i64)
}

/// `θ_k = angle(s_start + kΔs)`, `k = 1..K`, lifted to a continuous branch.
///
/// `angle` may return any branch; the winding follows from its value at
/// `s_start`, which must describe the same tangent as at `s_start + S`.
pub fn theta_from_analytic<F: Fn(f64) -> f64>(
    angle: F,
    s_start: f64,
    grid: GridSpec,
) -> Result<ThetaField> {
    let k = grid.k();
    let ds = grid.ds();
    let mut prev = angle(s_start);
    let theta0 = prev;
    let mut theta = Vec::with_capacity(k);
    for i in 1..=k {
        let t = lift_near(angle(s_start + i as f64 * ds), prev);
        check_jump(i, t - prev)?;
        theta.push(t);
        prev = t;
    }
    let winding = winding_of(theta[k - 1] - theta0)?;
    ThetaField::new(theta, winding, grid, 0)
}

/// Tangent angle of an arc-length sampler by central differences.
pub fn tangent_angle<F: Fn(f64) -> (f64, f64)>(sampler: &F, s: f64) -> f64 {
    let h = 1e-6;
    let (xp, up) = sampler(s + h);
    let (xm, um) = sampler(s - h);
    (up - um).atan2(xp - xm)
}

/// `∫₀ᴸ √(1 + u0′²) dx` for a profile with slope `slope`.
pub fn arclength_total<F: Fn(f64) -> f64>(slope: F, length: f64) -> Result<f64> {
    arclength_total_piecewise(slope, length, &[])
}

/// [`arclength_total`] for a slope that is smooth between `breaks`.
pub fn arclength_total_piecewise<F: Fn(f64) -> f64>(
    slope: F,
    length: f64,
    breaks: &[f64],
) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::InvalidParams(format!(
            "period must be positive, got {length}"
        )));
    }
    quad::integrate_piecewise(
        |x| (1.0 + slope(x).powi(2)).sqrt(),
        breaks,
        0.0,
        length,
        1e-13,
    )
}

/// Points `x_0 = 0 < x_1 < … < x_K = L` at equal arc-length spacing along
/// the graph of `value`, with the matching `u_k`.
pub fn equidistribute<V, D>(
    value: V,
    slope: D,
    length: f64,
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    V: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    equidistribute_piecewise(value, slope, length, k, &[])
}

/// [`equidistribute`] for a slope that is smooth between the sorted `breaks`.
pub fn equidistribute_piecewise<V, D>(
    value: V,
    slope: D,
    length: f64,
    k: usize,
    breaks: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)>
where
    V: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if k < 3 {
        return Err(Error::InvalidGrid(format!("K = {k} < 3")));
    }
    let density = |x: f64| (1.0 + slope(x).powi(2)).sqrt();
    let total = arclength_total_piecewise(&slope, length, breaks)?;
    let ds = total / k as f64;
    let mut xs = vec![0.0];
    let mut left = 0.0;
    // carried so that rounding in each cell does not accumulate
    let mut deficit = 0.0;
    for node in 1..k {
        let target = ds + deficit;
        let g = |x: f64| -> Result<f64> {
            Ok(quad::integrate_piecewise(density, breaks, left, x, 1e-14)? - target)
        };
        let (mut lo, mut hi) = (left, (left + target).min(length));
        let mut x = left + target / density(left).max(1.0);
        x = x.clamp(lo, hi);
        let mut converged = false;
        for _ in 0..100 {
            let gx = g(x)?;
            if gx.abs() <= 1e-14 * total {
                converged = true;
                break;
            }
            if gx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - gx / density(x);
            x = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * length.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFind { node });
        }
        deficit = target - quad::integrate_piecewise(density, breaks, left, x, 1e-14)?;
        xs.push(x);
        left = x;
    }
    xs.push(length);
    let us = xs.iter().map(|&x| value(x)).collect();
    Ok((xs, us))
}

/// Samples a single-valued arc-length curve on the uniform mesh
/// `x_j = x_start + jΔx`, `j = 0..N − 1`, by inverting `x(s)` on
/// `[s_lo, s_hi]`. The mean is removed so that the baseline schemes start from
/// zero-mean data.
pub fn uniform_from_curve<F: Fn(f64) -> (f64, f64)>(
    sampler: F,
    s_lo: f64,
    s_hi: f64,
    x_start: f64,
    dx: f64,
    n: usize,
) -> Result<UniformField> {
    let mut u = Vec::with_capacity(n);
    for j in 0..n {
        let target = x_start + j as f64 * dx;
        let (mut lo, mut hi) = (s_lo, s_hi);
        if sampler(lo).0 > target || sampler(hi).0 < target {
            return Err(Error::RootFind { node: j });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sampler(mid).0 < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * (1.0 + s_hi.abs().max(s_lo.abs())) {
                break;
            }
        }
        let s = 0.5 * (lo + hi);
        u.push(sampler(s).1);
    }
    let mean = u.iter().sum::<f64>() / n as f64;
    for v in &mut u {
        *v -= mean;
    }
    UniformField::new(u, dx, 0)
}

/// Periodic cubic Hermite interpolant with Catmull-Rom slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    x: Vec<f64>,
    u: Vec<f64>,
    slope: Vec<f64>,
    period: f64,
}

impl SampledProfile {
    /// `x` strictly increasing within one period `[x_0, x_0 + period)`.
    pub fn new(x: Vec<f64>, u: Vec<f64>, period: f64) -> Result<Self> {
        let n = x.len();
        if n < 3 || u.len() != n {
            return Err(Error::InvalidParams(
                "profile needs at least 3 matching samples".into(),
            ));
        }
        if !x.windows(2).all(|w| w[1] > w[0]) || x[n - 1] >= x[0] + period {
            return Err(Error::InvalidParams(
                "profile abscissae must increase within one period".into(),
            ));
        }
        let slope = (0..n)
            .map(|i| {
                let (xm, um) = if i == 0 {
                    (x[n - 1] - period, u[n - 1])
                } else {
                    (x[i - 1], u[i - 1])
                };
                let (xp, up) = if i + 1 == n {
                    (x[0] + period, u[0])
                } else {
                    (x[i + 1], u[i + 1])
                };
                (up - um) / (xp - xm)
            })
            .collect();
        Ok(Self {
            x,
            u,
            slope,
            period,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn start(&self) -> f64 {
        self.x[0]
    }

    /// Sample abscissae relative to the start, where the slope has kinks.
    pub fn knots(&self) -> Vec<f64> {
        self.x.iter().map(|x| x - self.x[0]).collect()
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.x.len();
        let y = self.x[0] + (x - self.x[0]).rem_euclid(self.period);
        let i = match self
            .x
            .binary_search_by(|v| v.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let right = if i + 1 == n {
            self.x[0] + self.period
        } else {
            self.x[i + 1]
        };
        let h = right - self.x[i];
        (i, (y - self.x[i]) / h, h)
    }

    fn ends(&self, i: usize) -> (f64, f64, f64, f64) {
        let j = (i + 1) % self.x.len();
        (self.u[i], self.u[j], self.slope[i], self.slope[j])
    }

    pub fn value(&self, x: f64) -> f64 {
        let (i, t, h) = self.locate(x);
        let (p0, p1, m0, m1) = self.ends(i);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * h * m1
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, t, h) = self.locate(x);
        let (p0, p1, m0, m1) = self.ends(i);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * p0 + (-6.0 * t2 + 6.0 * t) * p1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (3.0 * t2 - 2.0 * t) * m1
    }
}

fn read_columns(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
        {
            Ok(vals) => rows.push(vals),
            Err(_) if rows.is_empty() => continue,
            Err(e) => {
                return Err(Error::Config(format!(
                    "{}:{}: {e}",
                    path.display(),
                    line_no + 1
                )))
            }
        }
    }
    Ok(rows)
}

/// Reads `x,u` or `s,x,u` rows (optional header) and returns `(x, u)`.
pub fn read_curve_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = read_columns(path)?;
    let mut x = Vec::with_capacity(rows.len());
    let mut u = Vec::with_capacity(rows.len());
    for r in &rows {
        match r.len() {
            2 => {
                x.push(r[0]);
                u.push(r[1]);
            }
            3 => {
                x.push(r[1]);
                u.push(r[2]);
            }
            c => {
                return Err(Error::Config(format!(
                    "{}: expected 2 or 3 columns, got {c}",
                    path.display()
                )))
            }
        }
    }
    Ok((x, u))
}

/// Reads `x,u` rows of a single-valued profile.
pub fn read_profile_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = read_columns(path)?;
    if rows.iter().any(|r| r.len() != 2) {
        return Err(Error::Config(format!(
            "{}: profile rows must have 2 columns",
            path.display()
        )));
    }
    Ok(rows.iter().map(|r| (r[0], r[1])).unzip())
}
