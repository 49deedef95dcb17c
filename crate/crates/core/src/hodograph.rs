//! Discrete hodograph transformation: physical samples `(x_k, u_k)` from two
//! consecutive levels of `θ`.
//!
//! `x` advances by `cos θ^m_k Δs`. `u` advances by the backward average of
//! the discrete variational derivative rather than by `sin θ^m_k Δs`, which
//! closes the curve periodically at every converged level. The base point
//! moves by `x_0^{m+1} = x_0^m − (Δτ/2)(u_0^m)²`, with `u_0^m` chosen so that
//! the discrete constraint `Σ u_k (x_k − x_{k−1}) = 0` holds.

use crate::error::{Error, Result};
use crate::fields::{CurveState, ThetaField};
use crate::sg_dvdm::{check_compatible, dvd};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint {
    pub x0: f64,
    pub u0: f64,
    pub time_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Left-to-right.
    #[default]
    Plain,
    /// Neumaier compensated summation, for very long periods.
    Compensated,
}

/// How `u_0^m` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseRule {
    /// Enforces the discrete constraint.
    #[default]
    Constraint,
    /// `u_0 = δ⁺_τ θ_0` alone, for comparison.
    Naive,
}

fn cumulative(start: f64, incr: impl Iterator<Item = f64>, mode: Summation) -> Vec<f64> {
    let mut out = vec![start];
    match mode {
        Summation::Plain => {
            let mut acc = start;
            for v in incr {
                acc += v;
                out.push(acc);
            }
        }
        Summation::Compensated => {
            let (mut acc, mut comp) = (start, 0.0);
            for v in incr {
                let t = acc + v;
                if acc.abs() >= v.abs() {
                    comp += (acc - t) + v;
                } else {
                    comp += (v - t) + acc;
                }
                acc = t;
                out.push(acc + comp);
            }
        }
    }
    out
}

fn window_sum(curr: &ThetaField) -> Result<f64> {
    let g = curr.grid();
    let sum: f64 = curr.values().iter().map(|t| t.cos()).sum::<f64>() * g.ds();
    if sum.abs() < 1e-12 * g.period() {
        return Err(Error::ZeroWindow(sum));
    }
    Ok(sum)
}

/// `δ⁺_τ θ_0`, using `θ_0 = θ_K − 2πn` on both levels.
fn base_rate(curr: &ThetaField, next: &ThetaField) -> f64 {
    let k = curr.values().len() - 1;
    (next.values()[k] - curr.values()[k]) / curr.grid().dtau()
}

/// `u_0^m` that makes the discrete constraint vanish.
pub fn base_u(curr: &ThetaField, next: &ThetaField) -> Result<f64> {
    check_compatible(next, curr)?;
    let g = curr.grid();
    let window = window_sum(curr)?;
    let dtau = g.dtau();
    let weighted: f64 = curr
        .values()
        .iter()
        .zip(next.values())
        .map(|(&c, &n)| (n - c) / dtau * c.cos())
        .sum::<f64>()
        * g.ds();
    Ok(base_rate(curr, next) - weighted / window)
}

pub fn naive_base_u(curr: &ThetaField, next: &ThetaField) -> Result<f64> {
    check_compatible(next, curr)?;
    Ok(base_rate(curr, next))
}

pub fn advance_base_x(base: &BasePoint, dtau: f64) -> f64 {
    base.x0 - 0.5 * dtau * base.u0 * base.u0
}

/// Curve at level `m` from `θ^m`, `θ^{m+1}` and the base point at level `m`.
pub fn reconstruct_curve(
    curr: &ThetaField,
    next: &ThetaField,
    base: &BasePoint,
    mode: Summation,
) -> Result<CurveState> {
    check_compatible(next, curr)?;
    let ds = curr.grid().ds();
    let a: Vec<f64> = curr
        .values()
        .iter()
        .zip(next.values())
        .map(|(&c, &n)| dvd(n, c))
        .collect();
    let k = a.len();
    let x = cumulative(base.x0, curr.values().iter().map(|t| t.cos() * ds), mode);
    let u = cumulative(
        base.u0,
        (0..k).map(|i| 0.5 * (a[i] + a[(i + k - 1) % k]) * ds),
        mode,
    );
    Ok(CurveState {
        x,
        u,
        base_x: base.x0,
        base_u: base.u0,
        time_index: curr.time_index(),
    })
}

/// Curve with `u` increments `sin θ^m_k Δs`; it need not close.
pub fn reconstruct_curve_naive(curr: &ThetaField, base: &BasePoint, mode: Summation) -> CurveState {
    let ds = curr.grid().ds();
    CurveState {
        x: cumulative(base.x0, curr.values().iter().map(|t| t.cos() * ds), mode),
        u: cumulative(base.u0, curr.values().iter().map(|t| t.sin() * ds), mode),
        base_x: base.x0,
        base_u: base.u0,
        time_index: curr.time_index(),
    }
}

/// Produces the curve level by level while carrying the base point.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    base_x: f64,
    level: usize,
    rule: BaseRule,
    mode: Summation,
}

impl Reconstructor {
    /// Starts at level `level` with base position `x0`.
    pub fn new(x0: f64, level: usize, rule: BaseRule, mode: Summation) -> Self {
        Self {
            base_x: x0,
            level,
            rule,
            mode,
        }
    }

    pub fn base_x(&self) -> f64 {
        self.base_x
    }

    /// Curve at the level of `curr`, which must be the tracker's level.
    /// Advances the base point to the next level.
    pub fn next_curve(&mut self, curr: &ThetaField, next: &ThetaField) -> Result<CurveState> {
        if curr.time_index() != self.level || next.time_index() != self.level + 1 {
            return Err(Error::Mismatch(format!(
                "expected levels {} and {}, got {} and {}",
                self.level,
                self.level + 1,
                curr.time_index(),
                next.time_index()
            )));
        }
        let u0 = match self.rule {
            BaseRule::Constraint => base_u(curr, next)?,
            BaseRule::Naive => naive_base_u(curr, next)?,
        };
        let base = BasePoint {
            x0: self.base_x,
            u0,
            time_index: self.level,
        };
        let curve = reconstruct_curve(curr, next, &base, self.mode)?;
        self.base_x = advance_base_x(&base, curr.grid().dtau());
        self.level += 1;
        Ok(curve)
    }
}
