//! Damped Newton iteration for the implicit steps, with a direct solver for
//! cyclic banded Jacobians.
//!
//! A [`CyclicBanded`] matrix stores, for each row `i`, the entries in columns
//! `(i + off) mod n` for a fixed list of offsets. Small systems are solved by
//! dense LU. Larger ones are reordered by the interleaving permutation
//! `0, n−1, 1, n−2, …`, which turns the cyclic band of half-width `b` into an
//! ordinary band of half-width at most `2b + 1`, and then factored by banded
//! LU with partial pivoting.

use crate::error::SolverError;

const DENSE_LIMIT: usize = 64;
const MAX_CONDITION: f64 = 1e14;
const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianMode {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Damping {
    None,
    #[default]
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol_residual: f64,
    pub max_iter: usize,
    pub jacobian_mode: JacobianMode,
    /// Relative perturbation; column `j` uses `fd_epsilon·(1 + |z_j|)`.
    pub fd_epsilon: f64,
    pub damping: Damping,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-12,
            max_iter: 50,
            jacobian_mode: JacobianMode::Analytic,
            fd_epsilon: 1e-7,
            damping: Damping::Backtracking,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tol_residual > 0.0) {
            return Err(format!(
                "solver tolerance must be positive, got {}",
                self.tol_residual
            ));
        }
        if self.max_iter == 0 {
            return Err("solver max_iter must be at least 1".into());
        }
        if !(self.fd_epsilon > 0.0) {
            return Err(format!(
                "fd_epsilon must be positive, got {}",
                self.fd_epsilon
            ));
        }
        Ok(())
    }
}

/// Square matrix with entries on a fixed set of cyclic diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicBanded {
    n: usize,
    offsets: Vec<i64>,
    data: Vec<f64>,
}

impl CyclicBanded {
    pub fn zeros(n: usize, offsets: &[i64]) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            offsets: offsets.to_vec(),
            data: vec![0.0; n * offsets.len()],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, &[0]);
        m.data.fill(1.0);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    fn column(&self, row: usize, slot: usize) -> usize {
        (row as i64 + self.offsets[slot]).rem_euclid(self.n as i64) as usize
    }

    /// Entries of row `i`, one per offset.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.offsets.len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.offsets.len();
        &mut self.data[i * w..(i + 1) * w]
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for (slot, v) in self.row(i).iter().enumerate() {
                a[i * n + self.column(i, slot)] += v;
            }
        }
        a
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .map(|(slot, v)| v * x[self.column(i, slot)])
                    .sum()
            })
            .collect()
    }

    /// Solves `A z = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        assert_eq!(rhs.len(), self.n);
        if self.n <= DENSE_LIMIT {
            return solve_dense(self.n, self.to_dense(), rhs);
        }
        self.solve_interleaved(rhs)
    }

    fn solve_interleaved(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        let (mut lo, mut hi) = (0usize, n - 1);
        while lo <= hi {
            order.push(lo);
            if lo != hi {
                order.push(hi);
            }
            lo += 1;
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        let mut pos = vec![0usize; n];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let (mut kl, mut ku) = (0usize, 0usize);
        for i in 0..n {
            for slot in 0..self.offsets.len() {
                let (r, c) = (pos[i], pos[self.column(i, slot)]);
                if r > c {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        let mut band = Band::zeros(n, kl, ku);
        for i in 0..n {
            for (slot, v) in self.row(i).iter().enumerate() {
                band.add(pos[i], pos[self.column(i, slot)], *v);
            }
        }
        let mut b: Vec<f64> = order.iter().map(|&i| rhs[i]).collect();
        band.factor_solve(&mut b)?;
        let mut z = vec![0.0; n];
        for (p, &i) in order.iter().enumerate() {
            z[i] = b[p];
        }
        Ok(z)
    }
}

/// Banded storage in the LAPACK layout, with room for pivoting fill-in.
struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    data: Vec<f64>,
}

impl Band {
    fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ld,
            data: vec![0.0; ld * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ld
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn factor_solve(&mut self, b: &mut [f64]) -> Result<(), SolverError> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.data[self.idx(j, j)].abs();
            for i in j + 1..=last {
                let v = self.data[self.idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            ipiv[j] = p;
            pmax = pmax.max(best);
            pmin = pmin.min(best);
            if best == 0.0 || !best.is_finite() {
                return Err(SolverError::SingularJacobian {
                    condition_estimate: f64::INFINITY,
                });
            }
            let cmax = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=cmax {
                    let (a, bidx) = (self.idx(j, c), self.idx(p, c));
                    self.data.swap(a, bidx);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            for i in j + 1..=last {
                let li = self.idx(i, j);
                let l = self.data[li] / pivot;
                self.data[li] = l;
                if l != 0.0 {
                    for c in j + 1..=cmax {
                        let u = self.data[self.idx(j, c)];
                        let t = self.idx(i, c);
                        self.data[t] -= l * u;
                    }
                }
            }
        }
        check_condition(pmax, pmin)?;
        for j in 0..n {
            b.swap(j, ipiv[j]);
            let bj = b[j];
            for i in j + 1..=(j + kl).min(n - 1) {
                b[i] -= self.data[self.idx(i, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            let mut acc = b[j];
            for c in j + 1..=(j + kl + ku).min(n - 1) {
                acc -= self.data[self.idx(j, c)] * b[c];
            }
            b[j] = acc / self.data[self.idx(j, j)];
        }
        Ok(())
    }
}

fn check_condition(pmax: f64, pmin: f64) -> Result<(), SolverError> {
    let cond = pmax / pmin;
    if !(cond <= MAX_CONDITION) {
        return Err(SolverError::SingularJacobian {
            condition_estimate: cond,
        });
    }
    Ok(())
}

/// Dense LU with partial pivoting; `a` is row-major `n × n`.
pub fn solve_dense(n: usize, mut a: Vec<f64>, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    let mut b = rhs.to_vec();
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for j in 0..n {
        let mut p = j;
        for i in j + 1..n {
            if a[i * n + j].abs() > a[p * n + j].abs() {
                p = i;
            }
        }
        let best = a[p * n + j].abs();
        pmax = pmax.max(best);
        pmin = pmin.min(best);
        if best == 0.0 || !best.is_finite() {
            return Err(SolverError::SingularJacobian {
                condition_estimate: f64::INFINITY,
            });
        }
        if p != j {
            for c in 0..n {
                a.swap(j * n + c, p * n + c);
            }
            b.swap(j, p);
        }
        for i in j + 1..n {
            let l = a[i * n + j] / a[j * n + j];
            if l != 0.0 {
                for c in j..n {
                    a[i * n + c] -= l * a[j * n + c];
                }
                b[i] -= l * b[j];
            }
        }
    }
    check_condition(pmax, pmin)?;
    for j in (0..n).rev() {
        let mut acc = b[j];
        for c in j + 1..n {
            acc -= a[j * n + c] * b[c];
        }
        b[j] = acc / a[j * n + j];
    }
    Ok(b)
}

/// A square nonlinear system `R(z) = 0` with a cyclic banded Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;

    /// Cyclic diagonals on which the Jacobian may be nonzero.
    fn jacobian_offsets(&self) -> Vec<i64>;

    fn residual(&self, z: &[f64], out: &mut [f64]);

    /// Analytic Jacobian, if the system provides one.
    fn jacobian(&self, _z: &[f64]) -> Option<CyclicBanded> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub z: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Sup-norm residual before each iteration and at the end.
    pub history: Vec<f64>,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(
        0.0f64,
        |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) },
    )
}

/// Jacobian by forward differences, filled only on the system's diagonals.
pub fn finite_difference_jacobian<S: NonlinearSystem + ?Sized>(
    sys: &S,
    z: &[f64],
    eps: f64,
) -> CyclicBanded {
    let n = sys.dim();
    let offsets = sys.jacobian_offsets();
    let mut jac = CyclicBanded::zeros(n, &offsets);
    let mut base = vec![0.0; n];
    sys.residual(z, &mut base);
    let mut zp = z.to_vec();
    let mut rp = vec![0.0; n];
    let mut cols = vec![vec![0.0; n]; 0];
    cols.reserve(n);
    for j in 0..n {
        let h = eps * (1.0 + z[j].abs());
        zp[j] = z[j] + h;
        sys.residual(&zp, &mut rp);
        zp[j] = z[j];
        cols.push(rp.iter().zip(&base).map(|(a, b)| (a - b) / h).collect());
    }
    for i in 0..n {
        let mut seen = Vec::with_capacity(offsets.len());
        for (slot, off) in offsets.iter().enumerate() {
            let j = (i as i64 + off).rem_euclid(n as i64) as usize;
            if !seen.contains(&j) {
                seen.push(j);
                jac.row_mut(i)[slot] = cols[j][i];
            }
        }
    }
    jac
}

/// Newton iteration from `guess` until the sup-norm residual is at most `tol`.
pub fn solve<S: NonlinearSystem + ?Sized>(
    sys: &S,
    guess: &[f64],
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    let n = sys.dim();
    assert_eq!(guess.len(), n);
    let mut z = guess.to_vec();
    let mut r = vec![0.0; n];
    sys.residual(&z, &mut r);
    let mut norm = sup(&r);
    if !norm.is_finite() {
        return Err(SolverError::NonFinite);
    }
    let mut history = vec![norm];
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];
    for it in 0..cfg.max_iter {
        if norm <= cfg.tol_residual {
            return Ok(Solution {
                z,
                iterations: it,
                residual: norm,
                history,
            });
        }
        let jac = match cfg.jacobian_mode {
            JacobianMode::Analytic => sys.jacobian(&z),
            JacobianMode::FiniteDifference => None,
        }
        .unwrap_or_else(|| finite_difference_jacobian(sys, &z, cfg.fd_epsilon));
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let dz = jac.solve(&neg)?;
        let mut lambda = 1.0;
        let halvings = match cfg.damping {
            Damping::None => 0,
            Damping::Backtracking => MAX_HALVINGS,
        };
        let mut trial_norm;
        let mut tries = 0;
        loop {
            for k in 0..n {
                trial[k] = z[k] + lambda * dz[k];
            }
            sys.residual(&trial, &mut r_trial);
            trial_norm = sup(&r_trial);
            if (trial_norm.is_finite() && trial_norm < norm) || tries >= halvings {
                break;
            }
            lambda *= 0.5;
            tries += 1;
        }
        if !trial_norm.is_finite() {
            return Err(SolverError::NonFinite);
        }
        std::mem::swap(&mut z, &mut trial);
        std::mem::swap(&mut r, &mut r_trial);
        norm = trial_norm;
        history.push(norm);
    }
    if norm <= cfg.tol_residual {
        return Ok(Solution {
            z,
            iterations: cfg.max_iter,
            residual: norm,
            history,
        });
    }
    Err(SolverError::NewtonDivergence {
        iterations: cfg.max_iter,
        residual: norm,
        history,
    })
}
