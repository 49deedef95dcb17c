//! Grid and field types plus the finite-difference/average operator algebra.
//!
//! Indices follow the `k = 1..K` convention of the computational grid. Every
//! out-of-range access goes through [`PeriodicSequence::at`], which applies the
//! extension rule `a_{k+K} = a_k + shift` (for the angle field the shift is
//! `2πn` with winding number `n`; for plain periodic data it is zero). No ghost
//! cells are stored anywhere.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Uniform computational grid in the arc-length variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    k: usize,
    ds: f64,
    dtau: f64,
    levels: usize,
    period: f64,
}

impl GridSpec {
    pub fn new(k: usize, ds: f64, dtau: f64, levels: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidGrid(format!("K = {k} < 3")));
        }
        if !(ds > 0.0 && ds.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "delta_s = {ds} must be positive"
            )));
        }
        if !(dtau > 0.0 && dtau.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "delta_tau = {dtau} must be positive"
            )));
        }
        if levels == 0 {
            return Err(Error::InvalidGrid("M must be at least 1".into()));
        }
        Ok(Self {
            k,
            ds,
            dtau,
            levels,
            period: k as f64 * ds,
        })
    }

    /// Grid with `K` cells covering a computational period `S`.
    pub fn with_period(k: usize, period: f64, dtau: f64, levels: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGrid("K = 0".into()));
        }
        Self::new(k, period / k as f64, dtau, levels)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `S = K·Δs`.
    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Read access to a bi-infinite sequence defined by one stored period.
pub trait PeriodicSequence {
    fn len(&self) -> usize;

    /// Value at the 1-based index `k` (any integer).
    fn at(&self, k: i64) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A stored period `a_1..a_K` with the extension rule `a_{k+K} = a_k + shift`.
#[derive(Debug, Clone, Copy)]
pub struct Periodic<'a> {
    values: &'a [f64],
    shift: f64,
}

impl<'a> Periodic<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self { values, shift: 0.0 }
    }

    pub fn with_shift(values: &'a [f64], shift: f64) -> Self {
        Self { values, shift }
    }
}

impl PeriodicSequence for Periodic<'_> {
    fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    fn at(&self, k: i64) -> f64 {
        let n = self.values.len() as i64;
        let q = (k - 1).div_euclid(n);
        let r = (k - 1).rem_euclid(n) as usize;
        if q == 0 {
            self.values[r]
        } else {
            self.values[r] + self.shift * q as f64
        }
    }
}

/// One time level of the sine-Gordon angle on the computational grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaField {
    theta: Vec<f64>,
    winding: i64,
    grid: GridSpec,
    time_index: usize,
}

impl ThetaField {
    pub fn new(theta: Vec<f64>, winding: i64, grid: GridSpec, time_index: usize) -> Result<Self> {
        if theta.len() != grid.k() {
            return Err(Error::Mismatch(format!(
                "theta has {} values but the grid has K = {}",
                theta.len(),
                grid.k()
            )));
        }
        Ok(Self {
            theta,
            winding,
            grid,
            time_index,
        })
    }

    /// Stored values `θ_1..θ_K` (0-based slice).
    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn time(&self) -> f64 {
        self.time_index as f64 * self.grid.dtau()
    }

    pub fn sequence(&self) -> Periodic<'_> {
        Periodic::with_shift(&self.theta, TAU * self.winding as f64)
    }
}

impl PeriodicSequence for ThetaField {
    fn len(&self) -> usize {
        self.theta.len()
    }

    fn at(&self, k: i64) -> f64 {
        extend_periodic(self, k)
    }
}

/// `θ_k` for any integer `k` using `θ_{k+K} = θ_k + 2πn`.
pub fn extend_periodic(field: &ThetaField, k: i64) -> f64 {
    field.sequence().at(k)
}

/// Physical-plane samples `(x_k, u_k)`, `k = 0..K`, for one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub base_x: f64,
    pub base_u: f64,
    pub time_index: usize,
}

impl CurveState {
    pub fn k(&self) -> usize {
        self.x.len() - 1
    }

    /// `x_K − x_0`.
    pub fn window_length(&self) -> f64 {
        self.x[self.k()] - self.x[0]
    }

    /// `x_k` is strictly increasing (the curve is the graph of a function).
    pub fn is_single_valued(&self) -> bool {
        self.x.windows(2).all(|w| w[1] > w[0])
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Fixed uniform-mesh solution `u_1..u_N` with `u_{k+N} = u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformField {
    pub u: Vec<f64>,
    pub dx: f64,
    pub time_index: usize,
}

impl UniformField {
    pub fn new(u: Vec<f64>, dx: f64, time_index: usize) -> Result<Self> {
        if u.len() < 3 {
            return Err(Error::InvalidGrid(format!("N = {} < 3", u.len())));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "delta_x = {dx} must be positive"
            )));
        }
        Ok(Self { u, dx, time_index })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// `L = N·Δx`.
    pub fn length(&self) -> f64 {
        self.u.len() as f64 * self.dx
    }

    pub fn sequence(&self) -> Periodic<'_> {
        Periodic::new(&self.u)
    }

    pub fn sum(&self) -> f64 {
        self.u.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(a_{k+1} − a_k)/h`
    FwdDiff,
    /// `(a_k − a_{k−1})/h`
    BwdDiff,
    /// `(a_{k+1} + a_k)/2`
    FwdAvg,
    /// `(a_k + a_{k−1})/2`
    BwdAvg,
    /// `(a_{k+1} − a_{k−1})/(2h)`
    CentralDiff,
    /// `(a_{k+1} − 2a_k + a_{k−1})/h²`
    SecondDiff,
    /// `(a_{k+1} + 2a_k + a_{k−1})/4`
    WideAvg,
}

#[inline]
pub fn stencil<S: PeriodicSequence + ?Sized>(kind: Stencil, seq: &S, k: i64, h: f64) -> f64 {
    match kind {
        Stencil::FwdDiff => (seq.at(k + 1) - seq.at(k)) / h,
        Stencil::BwdDiff => (seq.at(k) - seq.at(k - 1)) / h,
        Stencil::FwdAvg => 0.5 * (seq.at(k + 1) + seq.at(k)),
        Stencil::BwdAvg => 0.5 * (seq.at(k) + seq.at(k - 1)),
        Stencil::CentralDiff => (seq.at(k + 1) - seq.at(k - 1)) / (2.0 * h),
        Stencil::SecondDiff => (seq.at(k + 1) - 2.0 * seq.at(k) + seq.at(k - 1)) / (h * h),
        Stencil::WideAvg => 0.25 * (seq.at(k + 1) + 2.0 * seq.at(k) + seq.at(k - 1)),
    }
}

/// Applies `kind` at every `k = 1..len`, returning a new period.
pub fn apply<S: PeriodicSequence + ?Sized>(kind: Stencil, seq: &S, h: f64) -> Vec<f64> {
    (1..=seq.len() as i64)
        .map(|k| stencil(kind, seq, k, h))
        .collect()
}
