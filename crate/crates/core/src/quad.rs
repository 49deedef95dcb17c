//! Composite double-exponential quadrature.
//!
//! The interval is split into equal panels and each panel is integrated with
//! the tanh-sinh rule from the `quadrature` crate. The panel count doubles
//! until two successive composite values agree to the requested relative
//! tolerance.

use crate::error::{Error, Result};

const MAX_PANELS: usize = 1 << 14;
/// Panel weights are accurate to a few ulps, so successive sums cannot agree
/// more closely than this.
const AGREEMENT_FLOOR: f64 = 5e-14;

/// `∫ₐᵇ f` to relative tolerance `rel_tol` (absolute near zero).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 4;
    let (mut last, _) = composite(&f, a, b, panels, rel_tol);
    loop {
        panels *= 2;
        let (value, estimate) = composite(&f, a, b, panels, rel_tol);
        if !value.is_finite() {
            return Err(Error::Quadrature { estimate });
        }
        if (value - last).abs() <= rel_tol.max(AGREEMENT_FLOOR) * value.abs().max(1.0) {
            return Ok(value);
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature {
                estimate: (value - last).abs().max(estimate),
            });
        }
        last = value;
    }
}

/// `∫ₐᵇ f` for `f` smooth between the points of `breaks`, which are sorted.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut sum = 0.0;
    let mut left = lo;
    for &p in breaks.iter().filter(|&&p| p > lo && p < hi) {
        sum += integrate(&f, left, p, rel_tol)?;
        left = p;
    }
    sum += integrate(&f, left, hi, rel_tol)?;
    Ok(sign * sum)
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, rel_tol: f64) -> (f64, f64) {
    let h = (b - a) / panels as f64;
    let target = (rel_tol * 1e-2).max(1e-15) * h.abs();
    let mut sum = 0.0;
    let mut err = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == panels { b } else { lo + h };
        let out = quadrature::integrate(f, lo, hi, target);
        sum += out.integral;
        err += out.error_estimate;
    }
    (sum, err)
}
