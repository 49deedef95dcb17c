//! Self-adaptive moving mesh integration of the short pulse equation
//! `u_tx = u + (u³)_xx / 6`.
//!
//! The solution curve is represented through its tangent angle `θ(τ, s)` in
//! arc-length coordinates, which satisfies the sine-Gordon equation
//! `θ_τs = sin θ`. A conservative finite-difference scheme advances `θ` on a
//! uniform `s` grid ([`sg_dvdm`]), and a discrete hodograph transformation
//! maps each level back to physical samples `(x_k, u_k)` ([`hodograph`]).
//! Because the physical points follow arc-length, the mesh concentrates where
//! the solution is steep.
//!
//! Two fixed-mesh schemes ([`baselines`]), closed-form exact solutions
//! ([`exact`]), and invariant checks ([`diagnostics`]) are included for
//! comparison and verification. [`run`] drives complete simulations and
//! [`config`] parses the flat `key = value` run description.

pub mod baselines;
pub mod config;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod fields;
pub mod hodograph;
pub mod init;
pub mod parallel;
pub mod quad;
pub mod run;
pub mod sg_dvdm;
pub mod solver;

pub use error::{Error, Result, SolverError};
pub use fields::{CurveState, GridSpec, ThetaField, UniformField};
