//! Fixed uniform-mesh schemes for the short pulse equation.
//!
//! * Norm-preserving scheme, in the local stencil form
//!   `δ⁺_x δ⁺_t u = μ⁺_x μ⁺_t u + δ⁺_x((δ⟨1⟩_x μ⁺_t u)·μ⁺_x[(μ⁺_t u_k)(μ⁺_t u_{k−1})/2])`.
//!   It conserves `I_d = ½ Σ u_k² Δx` and flips the sign of `Σ u_k` every
//!   step, so zero-mean data stays zero-mean.
//! * Multi-symplectic box scheme, reduced to
//!   `δ⟨1⟩_x δ⁺_t u = μ⁺_t μ⟨2⟩_x u + ⅙ δ⟨2⟩_x (μ⁺_t u)³` with the symmetric
//!   three-point stencils.
//!
//! Both are solved by Newton's method for the increment `e = u^{m+1} − u^m`.

use crate::error::{Error, Result};
use crate::fields::UniformField;
use crate::solver::{self, CyclicBanded, NonlinearSystem, Solution, SolverConfig};

/// Tolerance of the zero-mean precondition, relative to `N·max|v|`.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

fn check_zero_mean(v: &[f64]) -> Result<()> {
    let sum: f64 = v.iter().sum();
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sum.abs() > ZERO_MEAN_TOL * v.len() as f64 * max {
        return Err(Error::NonZeroMean { sum });
    }
    Ok(())
}

/// Discrete antiderivative of a zero-mean periodic sequence, normalized to
/// zero mean. It satisfies `δ⁺_x (δ⁻¹ v) = μ⁺_x v`.
pub fn discrete_antiderivative(v: &[f64], dx: f64) -> Result<Vec<f64>> {
    check_zero_mean(v)?;
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    let mut run = 0.0;
    for k in 0..n {
        out.push(dx * (0.5 * v[n - 1] + run + 0.5 * v[k]));
        run += v[k];
    }
    let mean = out.iter().sum::<f64>() / n as f64;
    for t in &mut out {
        *t -= mean;
    }
    Ok(out)
}

pub fn norm_d(u: &UniformField) -> f64 {
    0.5 * u.u.iter().map(|v| v * v).sum::<f64>() * u.dx
}

pub fn energy_d(u: &UniformField) -> Result<f64> {
    let w = discrete_antiderivative(&u.u, u.dx)?;
    Ok(u.u
        .iter()
        .zip(&w)
        .map(|(v, a)| v.powi(4) / 24.0 - 0.5 * a * a)
        .sum::<f64>()
        * u.dx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedScheme {
    NormPreserving,
    Multisymplectic,
}

/// One implicit step of a fixed-mesh scheme, in the increment `e`.
pub struct FixedStepSystem<'a> {
    u: &'a [f64],
    dx: f64,
    dt: f64,
    scheme: FixedScheme,
}

impl<'a> FixedStepSystem<'a> {
    pub fn new(u: &'a [f64], dx: f64, dt: f64, scheme: FixedScheme) -> Self {
        Self { u, dx, dt, scheme }
    }

    fn midpoint(&self, e: &[f64]) -> Vec<f64> {
        self.u.iter().zip(e).map(|(u, e)| u + 0.5 * e).collect()
    }
}

impl NonlinearSystem for FixedStepSystem<'_> {
    fn dim(&self) -> usize {
        self.u.len()
    }

    fn jacobian_offsets(&self) -> Vec<i64> {
        match self.scheme {
            FixedScheme::NormPreserving => vec![-1, 0, 1, 2],
            FixedScheme::Multisymplectic => vec![-1, 0, 1],
        }
    }

    fn residual(&self, e: &[f64], out: &mut [f64]) {
        let n = e.len();
        let v = self.midpoint(e);
        let (dx, dt) = (self.dx, self.dt);
        match self.scheme {
            FixedScheme::NormPreserving => {
                let w: Vec<f64> = (0..n)
                    .map(|k| {
                        let (vm, vk, vp) = (v[(k + n - 1) % n], v[k], v[(k + 1) % n]);
                        (vp - vm) / (2.0 * dx) * vk * (vp + vm) / 4.0
                    })
                    .collect();
                for k in 0..n {
                    let kp = (k + 1) % n;
                    out[k] =
                        (e[kp] - e[k]) / (dx * dt) - 0.5 * (v[kp] + v[k]) - (w[kp] - w[k]) / dx;
                }
            }
            FixedScheme::Multisymplectic => {
                for k in 0..n {
                    let (km, kp) = ((k + n - 1) % n, (k + 1) % n);
                    let cube = |x: f64| x * x * x;
                    out[k] = (e[kp] - e[km]) / (2.0 * dx * dt)
                        - 0.25 * (v[kp] + 2.0 * v[k] + v[km])
                        - (cube(v[kp]) - 2.0 * cube(v[k]) + cube(v[km])) / (6.0 * dx * dx);
                }
            }
        }
    }

    fn jacobian(&self, e: &[f64]) -> Option<CyclicBanded> {
        let n = e.len();
        let v = self.midpoint(e);
        let (dx, dt) = (self.dx, self.dt);
        let mut jac = CyclicBanded::zeros(n, &self.jacobian_offsets());
        match self.scheme {
            FixedScheme::NormPreserving => {
                // ∂w_k/∂v_{k−1}, ∂w_k/∂v_k, ∂w_k/∂v_{k+1}
                let dw: Vec<[f64; 3]> = (0..n)
                    .map(|k| {
                        let (vm, vk, vp) = (v[(k + n - 1) % n], v[k], v[(k + 1) % n]);
                        let c = (vp - vm) / (2.0 * dx);
                        let g = vk * (vp + vm) / 4.0;
                        [
                            c * vk / 4.0 - g / (2.0 * dx),
                            c * (vp + vm) / 4.0,
                            c * vk / 4.0 + g / (2.0 * dx),
                        ]
                    })
                    .collect();
                for k in 0..n {
                    let kp = (k + 1) % n;
                    let row = jac.row_mut(k);
                    // offsets −1, 0, +1, +2; the v-derivatives carry ∂v/∂e = ½
                    row[0] = 0.5 * (dw[k][0] / dx);
                    row[1] = -1.0 / (dx * dt) - 0.25 + 0.5 * (-dw[kp][0] + dw[k][1]) / dx;
                    row[2] = 1.0 / (dx * dt) - 0.25 + 0.5 * (-dw[kp][1] + dw[k][2]) / dx;
                    row[3] = 0.5 * (-dw[kp][2] / dx);
                }
            }
            FixedScheme::Multisymplectic => {
                let h2 = dx * dx;
                for k in 0..n {
                    let (km, kp) = ((k + n - 1) % n, (k + 1) % n);
                    let row = jac.row_mut(k);
                    row[0] = -1.0 / (2.0 * dx * dt) - 0.125 - v[km] * v[km] / (4.0 * h2);
                    row[1] = -0.25 + v[k] * v[k] / (2.0 * h2);
                    row[2] = 1.0 / (2.0 * dx * dt) - 0.125 - v[kp] * v[kp] / (4.0 * h2);
                }
            }
        }
        Some(jac)
    }
}

/// Advances one level; `prev` seeds the Newton guess by extrapolation.
pub fn step_fixed(
    curr: &UniformField,
    prev: Option<&UniformField>,
    dt: f64,
    scheme: FixedScheme,
    cfg: &SolverConfig,
) -> Result<(UniformField, Solution)> {
    if let FixedScheme::NormPreserving = scheme {
        if curr.time_index == 0 {
            check_zero_mean(&curr.u)?;
        }
    }
    let guess: Vec<f64> = match prev {
        Some(p) if p.n() == curr.n() => curr.u.iter().zip(&p.u).map(|(a, b)| a - b).collect(),
        Some(_) => {
            return Err(Error::Mismatch(
                "previous level has a different size".into(),
            ))
        }
        None => vec![0.0; curr.n()],
    };
    let sys = FixedStepSystem::new(&curr.u, curr.dx, dt, scheme);
    let sol = solver::solve(&sys, &guess, cfg).map_err(|source| Error::Step {
        step: curr.time_index,
        source,
    })?;
    let u = curr.u.iter().zip(&sol.z).map(|(u, e)| u + e).collect();
    Ok((UniformField::new(u, curr.dx, curr.time_index + 1)?, sol))
}

pub fn step_norm_preserving(
    curr: &UniformField,
    dt: f64,
    cfg: &SolverConfig,
) -> Result<UniformField> {
    step_fixed(curr, None, dt, FixedScheme::NormPreserving, cfg).map(|(u, _)| u)
}

pub fn step_multisymplectic(
    curr: &UniformField,
    dt: f64,
    cfg: &SolverConfig,
) -> Result<UniformField> {
    step_fixed(curr, None, dt, FixedScheme::Multisymplectic, cfg).map(|(u, _)| u)
}

/// Sequential driver for a fixed-mesh run.
#[derive(Debug, Clone)]
pub struct FixedIntegrator {
    scheme: FixedScheme,
    dt: f64,
    cfg: SolverConfig,
    prev: Option<UniformField>,
    curr: UniformField,
    iterations: usize,
    max_residual: f64,
}

impl FixedIntegrator {
    pub fn new(initial: UniformField, dt: f64, scheme: FixedScheme, cfg: SolverConfig) -> Self {
        Self {
            scheme,
            dt,
            cfg,
            prev: None,
            curr: initial,
            iterations: 0,
            max_residual: 0.0,
        }
    }

    pub fn current(&self) -> &UniformField {
        &self.curr
    }

    /// Total Newton iterations so far.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn time(&self) -> f64 {
        self.curr.time_index as f64 * self.dt
    }

    pub fn advance(&mut self) -> Result<&UniformField> {
        let (next, _) = step_fixed(
            &self.curr,
            self.prev.as_ref(),
            self.dt,
            self.scheme,
            &self.cfg,
        )?;
        self.prev = Some(std::mem::replace(&mut self.curr, next));
        Ok(&self.curr)
    }
}
