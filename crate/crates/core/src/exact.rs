//! Closed-form solutions of the short pulse equation in hodograph form.
//!
//! Every solution is evaluated as a curve `s ↦ (x(τ, s), u(τ, s))` in
//! arc-length parametrization, so `x_s² + u_s² = 1`. At `s = 0` each family
//! satisfies the base-point relations `u = θ_τ` and `x_τ = −u²/2`.

use std::f64::consts::PI;

use crate::elliptic::{
    complete_e_unchecked, complete_k_unchecked, incomplete_e_unchecked, jacobi_unchecked,
};
use crate::error::{Error, Result};

/// Threshold `sin(π/8)` above which the breather pulse becomes multi-valued.
pub const XI_CRITICAL: f64 = 0.382_683_432_365_089_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreatherMode {
    Pulse,
    LoopAntiloop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreatherParams {
    xi: f64,
    zeta: f64,
    mode: BreatherMode,
}

impl BreatherParams {
    /// Pulse for `0 < ξ < 1`, loop/anti-loop pair for `ξ > 1`.
    pub fn new(xi: f64) -> Result<Self> {
        if xi > 0.0 && xi < 1.0 {
            Self::pulse(xi)
        } else {
            Self::loop_antiloop(xi)
        }
    }

    pub fn pulse(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::InvalidParams(format!(
                "pulse needs 0 < xi < 1, got {xi}"
            )));
        }
        Ok(Self {
            xi,
            zeta: (1.0 - xi * xi).sqrt(),
            mode: BreatherMode::Pulse,
        })
    }

    pub fn loop_antiloop(xi: f64) -> Result<Self> {
        if !(xi > 1.0 && xi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "loop/anti-loop needs xi > 1, got {xi}"
            )));
        }
        Ok(Self {
            xi,
            zeta: (xi * xi - 1.0).sqrt(),
            mode: BreatherMode::LoopAntiloop,
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn mode(&self) -> BreatherMode {
        self.mode
    }

    /// `x(τ, s) − s` tends to `∓4ξ` as `s → ±∞` (pulse), so the physical
    /// window covered by an `s` interval of length `S` is `S − 8ξ`.
    pub fn window_length(&self, s_len: f64) -> f64 {
        s_len - 8.0 * self.xi
    }
}

pub fn breather_pulse(p: &BreatherParams, tau: f64, s: f64) -> (f64, f64) {
    let (xi, zeta) = (p.xi, p.zeta);
    let phi = xi * (s + tau);
    let psi = zeta * (s - tau);
    let (sp, cp) = psi.sin_cos();
    let (sh, ch) = (phi.sinh(), phi.cosh());
    let den = xi * xi * sp * sp + zeta * zeta * ch * ch;
    // grouped so that u(0, 0) = 4ξ without rounding
    let u = 4.0 * xi * (zeta * (xi * sp * sh + zeta * cp * ch) / den);
    let x = s + 2.0 * xi * zeta * (xi * (2.0 * psi).sin() - zeta * (2.0 * phi).sinh()) / den;
    (x, u)
}

pub fn loop_antiloop(p: &BreatherParams, tau: f64, s: f64) -> (f64, f64) {
    let (xi, zeta) = (p.xi, p.zeta);
    let phi = xi * (s + tau);
    let psi = zeta * (s - tau);
    let den = xi * xi * psi.sinh().powi(2) + zeta * zeta * phi.cosh().powi(2);
    let u = 4.0 * xi * zeta * (xi * psi.sinh() * phi.sinh() + zeta * psi.cosh() * phi.cosh()) / den;
    let x = s + 2.0 * xi * zeta * (xi * (2.0 * psi).sinh() - zeta * (2.0 * phi).sinh()) / den;
    (x, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFamily {
    Hump,
    UprightLoop,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveParams {
    family: WaveFamily,
    v: f64,
    x0: f64,
    xi: f64,
    sign: f64,
    alpha: f64,
}

impl TravelingWaveParams {
    pub fn new(family: WaveFamily, v: f64, x0: f64, xi: f64, sign: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "wave speed must be positive, got {v}"
            )));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParams(format!(
                "sign must be +1 or -1, got {sign}"
            )));
        }
        let (lo, hi) = match family {
            WaveFamily::Hump => (0.0, 0.5),
            WaveFamily::UprightLoop => (0.0, 1.0),
            WaveFamily::Alternating => (0.5, 1.0),
        };
        if !(xi > lo && xi < hi) {
            return Err(Error::InvalidParams(format!(
                "{family:?} needs {lo} < xi < {hi}, got {xi}"
            )));
        }
        let alpha = match family {
            WaveFamily::Hump => ((1.0 - 2.0 * xi) / v).sqrt(),
            WaveFamily::UprightLoop => ((2.0 - xi) / (xi * xi * v)).sqrt(),
            WaveFamily::Alternating => ((2.0 * xi - 1.0) / v).sqrt(),
        };
        Ok(Self {
            family,
            v,
            x0,
            xi,
            sign,
            alpha,
        })
    }

    pub fn family(&self) -> WaveFamily {
        self.family
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn sign(&self) -> f64 {
        self.sign
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Elliptic argument `αs + f(τ)`.
    fn arg(&self, tau: f64, s: f64) -> f64 {
        let f = match self.family {
            WaveFamily::Hump | WaveFamily::Alternating => -tau / self.alpha,
            WaveFamily::UprightLoop => -tau / (self.xi * self.alpha),
        };
        self.alpha * s + f
    }

    /// Smallest `s`-period of the curve shape.
    pub fn period(&self) -> f64 {
        let k = complete_k_unchecked(self.xi);
        match self.family {
            WaveFamily::Hump | WaveFamily::Alternating => 4.0 * k / self.alpha,
            WaveFamily::UprightLoop => 2.0 * k / self.alpha,
        }
    }

    /// Physical advance `x(τ, s + period) − x(τ, s)`.
    pub fn window_per_period(&self) -> f64 {
        let (k, e) = (complete_k_unchecked(self.xi), complete_e_unchecked(self.xi));
        match self.family {
            WaveFamily::Hump | WaveFamily::Alternating => (8.0 * e - 4.0 * k) / self.alpha,
            WaveFamily::UprightLoop => {
                let a = self.alpha;
                -self.xi * a * a * self.v * self.period() + 4.0 * e / (self.xi * a)
            }
        }
    }

    /// Winding of `θ` over one period.
    pub fn winding_per_period(&self) -> i64 {
        match self.family {
            WaveFamily::UprightLoop => -(self.sign as i64),
            _ => 0,
        }
    }
}

pub fn periodic_hump(p: &TravelingWaveParams, tau: f64, s: f64) -> (f64, f64) {
    cn_wave(p, p.v, tau, s)
}

pub fn periodic_alternating(p: &TravelingWaveParams, tau: f64, s: f64) -> (f64, f64) {
    cn_wave(p, -p.v, tau, s)
}

fn cn_wave(p: &TravelingWaveParams, drift: f64, tau: f64, s: f64) -> (f64, f64) {
    let a = p.alpha;
    let w = p.arg(tau, s);
    let j = jacobi_unchecked(w, p.xi);
    let x = drift * tau + p.x0 - s + tau / (a * a) + 2.0 / a * incomplete_e_unchecked(w, p.xi);
    let u = p.sign * 2.0 * p.xi.sqrt() / a * j.cn;
    (x, u)
}

pub fn periodic_loop(p: &TravelingWaveParams, tau: f64, s: f64) -> (f64, f64) {
    let a = p.alpha;
    let w = p.arg(tau, s);
    let j = jacobi_unchecked(w, p.xi);
    let x = p.x0 - p.xi * a * a * p.v * s + 2.0 / (p.xi * a) * incomplete_e_unchecked(w, p.xi);
    let u = p.sign * 2.0 / (p.xi * a) * j.dn;
    (x, u)
}

/// Tangent angle for the hump family, continuous in `s` with values in `(−π, π)`.
pub fn periodic_hump_theta(p: &TravelingWaveParams, tau: f64, s: f64) -> f64 {
    cn_theta(p, tau, s)
}

fn cn_theta(p: &TravelingWaveParams, tau: f64, s: f64) -> f64 {
    let j = jacobi_unchecked(p.arg(tau, s), p.xi);
    let num = -p.sign * 2.0 * p.xi.sqrt() * j.sn * j.dn;
    let den = 2.0 * j.dn * j.dn - 1.0;
    num.atan2(den)
}

fn loop_theta(p: &TravelingWaveParams, tau: f64, s: f64) -> f64 {
    -p.sign * 2.0 * jacobi_unchecked(p.arg(tau, s), p.xi).am
}

/// Any of the closed-form solutions, with its natural computational window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    Breather(BreatherParams),
    Wave(TravelingWaveParams),
}

impl ExactSolution {
    pub fn eval(&self, tau: f64, s: f64) -> (f64, f64) {
        match self {
            ExactSolution::Breather(p) => match p.mode {
                BreatherMode::Pulse => breather_pulse(p, tau, s),
                BreatherMode::LoopAntiloop => loop_antiloop(p, tau, s),
            },
            ExactSolution::Wave(p) => match p.family {
                WaveFamily::Hump => periodic_hump(p, tau, s),
                WaveFamily::Alternating => periodic_alternating(p, tau, s),
                WaveFamily::UprightLoop => periodic_loop(p, tau, s),
            },
        }
    }

    /// Tangent angle in closed form, where one exists.
    pub fn theta(&self, tau: f64, s: f64) -> Option<f64> {
        match self {
            ExactSolution::Breather(_) => None,
            ExactSolution::Wave(p) => Some(match p.family {
                WaveFamily::UprightLoop => loop_theta(p, tau, s),
                _ => cn_theta(p, tau, s),
            }),
        }
    }

    /// `(x_s, u_s)` by central differences.
    pub fn tangent(&self, tau: f64, s: f64, h: f64) -> (f64, f64) {
        let (xp, up) = self.eval(tau, s + h);
        let (xm, um) = self.eval(tau, s - h);
        ((xp - xm) / (2.0 * h), (up - um) / (2.0 * h))
    }

    /// Tangent angle, from the closed form or else from finite differences
    /// lifted to the branch nearest `near`.
    pub fn theta_near(&self, tau: f64, s: f64, near: f64) -> f64 {
        if let Some(t) = self.theta(tau, s) {
            return t + 2.0 * PI * ((near - t) / (2.0 * PI)).round();
        }
        let (xs, us) = self.tangent(tau, s, 1e-6);
        let t = us.atan2(xs);
        t + 2.0 * PI * ((near - t) / (2.0 * PI)).round()
    }

    /// Whether the tangent angle is periodic in `s` up to winding, so the
    /// window can be any whole number of periods.
    pub fn is_periodic(&self) -> bool {
        matches!(self, ExactSolution::Wave(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breather_origin_values() {
        for &xi in &[0.3, 0.38] {
            let p = BreatherParams::pulse(xi).unwrap();
            let (x, u) = breather_pulse(&p, 0.0, 0.0);
            assert_eq!(x, 0.0);
            assert_eq!(u, 4.0 * xi);
        }
        let p = BreatherParams::loop_antiloop(1.2).unwrap();
        let (x, u) = loop_antiloop(&p, 0.0, 0.0);
        assert_eq!(x, 0.0);
        assert!((u - 4.8).abs() < 1e-14);
        for &s in &[-40.0, 40.0] {
            let (x, u) = loop_antiloop(&p, 0.0, s);
            assert!(u.abs() < 1e-8);
            // x − s approaches ∓4ξ·(ζ/ξ) type constants; check it is bounded and settled
            let (x2, _) = loop_antiloop(&p, 0.0, s * 1.1);
            assert!(((x - s) - (x2 - 1.1 * s)).abs() < 1e-8);
        }
        assert!(BreatherParams::pulse(1.2).is_err());
        assert!(BreatherParams::loop_antiloop(0.5).is_err());
        assert!(BreatherParams::new(1.0).is_err());
    }

    #[test]
    fn critical_value() {
        assert!((XI_CRITICAL - (PI / 8.0).sin()).abs() < 1e-16);
    }

    #[test]
    fn wave_origin_values() {
        let p = TravelingWaveParams::new(WaveFamily::Hump, 1.0, 0.0, 0.25, 1.0).unwrap();
        let (x, u) = periodic_hump(&p, 0.0, 0.0);
        assert_eq!(x, 0.0);
        assert!((u - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(periodic_hump_theta(&p, 0.0, 0.0), 0.0);

        let p = TravelingWaveParams::new(WaveFamily::UprightLoop, 1.0, 0.0, 0.75, 1.0).unwrap();
        let alpha = ((2.0 - 0.75) / 0.5625f64).sqrt();
        assert!((p.alpha() - alpha).abs() < 1e-15);
        let (_, u) = periodic_loop(&p, 0.0, 0.0);
        assert!((u - 2.0 / (0.75 * alpha)).abs() < 1e-14);

        let p = TravelingWaveParams::new(WaveFamily::Alternating, 1.0, 0.0, 0.75, 1.0).unwrap();
        let (_, u) = periodic_alternating(&p, 0.0, 0.0);
        assert!((u - 2.0 * 0.75f64.sqrt() / 0.5f64.sqrt()).abs() < 1e-14);
        let half = p.period() / 2.0;
        let (_, uh) = periodic_alternating(&p, 0.0, half);
        assert!((uh + u).abs() < 1e-12);
    }

    #[test]
    fn parameter_ranges() {
        assert!(TravelingWaveParams::new(WaveFamily::Hump, 1.0, 0.0, 0.6, 1.0).is_err());
        assert!(TravelingWaveParams::new(WaveFamily::Alternating, 1.0, 0.0, 0.25, 1.0).is_err());
        assert!(TravelingWaveParams::new(WaveFamily::UprightLoop, -1.0, 0.0, 0.5, 1.0).is_err());
        assert!(TravelingWaveParams::new(WaveFamily::UprightLoop, 1.0, 0.0, 0.5, 0.5).is_err());
    }

    fn families() -> Vec<ExactSolution> {
        let mut out = vec![
            ExactSolution::Breather(BreatherParams::pulse(0.3).unwrap()),
            ExactSolution::Breather(BreatherParams::pulse(0.38).unwrap()),
            ExactSolution::Breather(BreatherParams::loop_antiloop(1.2).unwrap()),
        ];
        for &(fam, xi) in &[
            (WaveFamily::Hump, 0.25),
            (WaveFamily::UprightLoop, 0.75),
            (WaveFamily::Alternating, 0.75),
        ] {
            for &sign in &[1.0, -1.0] {
                for &v in &[1.0, 1.7] {
                    out.push(ExactSolution::Wave(
                        TravelingWaveParams::new(fam, v, 0.3, xi, sign).unwrap(),
                    ));
                }
            }
        }
        out
    }

    #[test]
    fn period_advance_is_constant() {
        for sol in families() {
            if let ExactSolution::Wave(p) = sol {
                let per = p.period();
                for &s in &[0.0, 0.7, 3.1] {
                    let (x0, u0) = sol.eval(1.3, s);
                    let (x1, u1) = sol.eval(1.3, s + per);
                    assert!((x1 - x0 - p.window_per_period()).abs() < 1e-10, "{p:?}");
                    assert!((u1 - u0).abs() < 1e-10);
                    let t0 = sol.theta(1.3, s).unwrap();
                    let t1 = sol.theta(1.3, s + per).unwrap();
                    let wind = p.winding_per_period() as f64;
                    // the principal-branch formula repeats; the lifted angle gains 2πn
                    let gap = t1 - t0 - 2.0 * PI * wind;
                    let gap = gap - 2.0 * PI * (gap / (2.0 * PI)).round();
                    assert!(gap.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn theta_agrees_with_tangent() {
        for sol in families() {
            if let ExactSolution::Wave(p) = sol {
                for i in 0..25 {
                    let s = -3.0 + 0.37 * i as f64;
                    let th = sol.theta(2.0, s).unwrap();
                    let (xs, us) = sol.tangent(2.0, s, 1e-5);
                    assert!((th.cos() - xs).abs() < 1e-6, "{p:?} s={s}");
                    assert!((th.sin() - us).abs() < 1e-6, "{p:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn loop_theta_winds_once_per_period() {
        let p = TravelingWaveParams::new(WaveFamily::UprightLoop, 1.0, 0.0, 0.75, 1.0).unwrap();
        let sol = ExactSolution::Wave(p);
        let a = sol.theta(0.0, 0.0).unwrap();
        let b = sol.theta(0.0, p.period()).unwrap();
        assert!((b - a + 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn arc_length_parametrization() {
        for sol in families() {
            for &tau in &[0.0, 1.1, 16.0] {
                for i in 0..40 {
                    let s = -12.0 + 0.61 * i as f64;
                    let (xs, us) = sol.tangent(tau, s, 1e-5);
                    assert!(
                        (xs * xs + us * us - 1.0).abs() < 1e-6,
                        "{sol:?} τ={tau} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn base_point_conditions() {
        let h = 1e-5;
        for sol in families() {
            for &tau in &[0.0, 0.8, 5.0] {
                let (_, u) = sol.eval(tau, 0.0);
                let (xp, _) = sol.eval(tau + h, 0.0);
                let (xm, _) = sol.eval(tau - h, 0.0);
                let x_tau = (xp - xm) / (2.0 * h);
                assert!((x_tau + 0.5 * u * u).abs() < 1e-6, "{sol:?} τ={tau}");
                // θ_τ = x_s u_sτ − u_s x_sτ for an arc-length curve
                let g = 1e-4;
                let (xs, us) = sol.tangent(tau, 0.0, g);
                let (xsp, usp) = sol.tangent(tau + g, 0.0, g);
                let (xsm, usm) = sol.tangent(tau - g, 0.0, g);
                let theta_tau = xs * (usp - usm) / (2.0 * g) - us * (xsp - xsm) / (2.0 * g);
                assert!(
                    (theta_tau - u).abs() < 1e-6,
                    "{sol:?} τ={tau}: {theta_tau} vs {u}"
                );
            }
        }
    }

    #[test]
    fn pulse_below_critical_is_single_valued() {
        let sol = ExactSolution::Breather(BreatherParams::pulse(0.3).unwrap());
        for i in 0..400 {
            let s = -35.0 + 0.175 * i as f64;
            for &tau in &[0.0, 3.0] {
                assert!(sol.tangent(tau, s, 1e-5).0 > 0.0);
            }
        }
    }
}
