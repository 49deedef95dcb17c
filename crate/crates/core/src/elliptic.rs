//! Jacobi elliptic functions and elliptic integrals (parameter convention
//! `m = k²`).
//!
//! Argument convention: every function here takes the *elliptic argument*
//! `w`, not the amplitude angle. In particular [`incomplete_e`] returns
//! `E(w|m) = ∫₀ʷ dn²(t|m) dt` (Jacobi's epsilon function), which equals the
//! Legendre integral of the second kind evaluated at the amplitude `am(w|m)`.
//! With this convention the traveling-wave positions built from `αs + f(τ)`
//! advance by a constant over each period in `s`.
//!
//! `sn`, `cn`, `dn` and `am` use the descending Landen (arithmetic-geometric
//! mean) recursion after reducing `w` modulo `4K(m)`. The complete integrals
//! come from the same AGM sequence. The incomplete second-kind integral is
//! evaluated with Carlson's symmetric forms on the reduced argument.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const AGM_MAX_STEPS: usize = 40;

/// A validated parameter `0 ≤ m ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParam(f64);

impl EllipticParam {
    pub fn new(m: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::EllipticDomain(m))
        }
    }

    pub fn m(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    /// Continuous amplitude `am(w|m)`, so that `sn = sin am`, `cn = cos am`.
    pub am: f64,
}

struct Agm {
    a: [f64; AGM_MAX_STEPS + 1],
    c: [f64; AGM_MAX_STEPS + 1],
    steps: usize,
}

fn agm(m: f64) -> Agm {
    let mut a = [0.0; AGM_MAX_STEPS + 1];
    let mut c = [0.0; AGM_MAX_STEPS + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut steps = 0;
    while steps < AGM_MAX_STEPS && c[steps].abs() > f64::EPSILON * a[steps] {
        let (an, bn) = (a[steps], b);
        a[steps + 1] = 0.5 * (an + bn);
        c[steps + 1] = 0.5 * (an - bn);
        b = (an * bn).sqrt();
        steps += 1;
    }
    Agm { a, c, steps }
}

/// Complete integral of the first kind `K(m)`, `0 ≤ m < 1`.
pub fn complete_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::EllipticDomain(m));
    }
    Ok(PI / (2.0 * agm_limit(m)))
}

/// `K(m)` for a parameter already known to lie in `[0, 1)`.
pub(crate) fn complete_k_unchecked(m: f64) -> f64 {
    PI / (2.0 * agm_limit(m))
}

fn agm_limit(m: f64) -> f64 {
    let g = agm(m);
    g.a[g.steps]
}

/// Complete integral of the second kind `E(m)`, `0 ≤ m ≤ 1`.
pub fn complete_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::EllipticDomain(m));
    }
    Ok(complete_e_unchecked(m))
}

pub(crate) fn complete_e_unchecked(m: f64) -> f64 {
    if m == 1.0 {
        return 1.0;
    }
    let g = agm(m);
    let mut sum = 0.5 * g.c[0] * g.c[0];
    let mut pow = 0.5;
    for n in 1..=g.steps {
        pow *= 2.0;
        sum += pow * g.c[n] * g.c[n];
    }
    PI / (2.0 * g.a[g.steps]) * (1.0 - sum)
}

/// Amplitude for `|w| ≤ 2K`, by the descending Landen recursion.
fn amplitude_reduced(w: f64, m: f64) -> f64 {
    let g = agm(m);
    let n = g.steps;
    let mut phi = 2f64.powi(n as i32) * g.a[n] * w;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (g.c[i] / g.a[i] * phi.sin()).asin());
    }
    phi
}

/// `sn`, `cn`, `dn` and the continuous amplitude at elliptic argument `w`.
pub fn jacobi(w: f64, m: f64) -> Result<Jacobi> {
    EllipticParam::new(m)?;
    Ok(jacobi_unchecked(w, m))
}

pub(crate) fn jacobi_unchecked(w: f64, m: f64) -> Jacobi {
    if m == 1.0 {
        let sech = 1.0 / w.cosh();
        return Jacobi {
            sn: w.tanh(),
            cn: sech,
            dn: sech,
            am: w.sinh().atan(),
        };
    }
    if m == 0.0 {
        return Jacobi {
            sn: w.sin(),
            cn: w.cos(),
            dn: 1.0,
            am: w,
        };
    }
    let quarter = PI / (2.0 * agm_limit(m));
    let half_period = 2.0 * quarter;
    // am(w + 2K) = am(w) + π
    let j = (w / half_period).round();
    let r = w - j * half_period;
    let phi = amplitude_reduced(r, m);
    let sign = if (j as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let sn = sign * phi.sin();
    let cn = sign * phi.cos();
    let dn = (1.0 - m * sn * sn).max(0.0).sqrt();
    Jacobi {
        sn,
        cn,
        dn,
        am: phi + j * PI,
    }
}

/// Continuous amplitude `am(w|m)`.
pub fn amplitude(w: f64, m: f64) -> Result<f64> {
    jacobi(w, m).map(|j| j.am)
}

/// `E(w|m) = ∫₀ʷ dn²(t|m) dt` (elliptic argument convention).
pub fn incomplete_e(w: f64, m: f64) -> Result<f64> {
    EllipticParam::new(m)?;
    Ok(incomplete_e_unchecked(w, m))
}

pub(crate) fn incomplete_e_unchecked(w: f64, m: f64) -> f64 {
    if m == 1.0 {
        return w.tanh();
    }
    if m == 0.0 {
        return w;
    }
    let quarter = PI / (2.0 * agm_limit(m));
    // E(w + 2K) = E(w) + 2E(m); reduce to |r| ≤ K so that |am(r)| ≤ π/2.
    let j = (w / (2.0 * quarter)).round();
    let r = w - j * 2.0 * quarter;
    let phi = amplitude_reduced(r, m).clamp(-FRAC_PI_2, FRAC_PI_2);
    let base = legendre_e(phi, m);
    base + 2.0 * j * complete_e_unchecked(m)
}

/// Legendre `E(φ|m)` for `|φ| ≤ π/2`.
fn legendre_e(phi: f64, m: f64) -> f64 {
    let s = phi.sin();
    let c = phi.cos();
    let q = 1.0 - m * s * s;
    let cc = c * c;
    s * carlson_rf(cc, q, 1.0) - m / 3.0 * s * s * s * carlson_rd(cc, q, 1.0)
}

fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const ERRTOL: f64 = 0.0008;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = (x + y + z) / 3.0;
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= ERRTOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 / 44.0 * e3) * e2 + e3 / 14.0) / ave.sqrt();
        }
    }
}

fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const ERRTOL: f64 = 0.0005;
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = 0.2 * (x + y + 3.0 * z);
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= ERRTOL {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            return 3.0 * sum
                + fac
                    * (1.0
                        + ed * (-C1 + C5 * ed - C6 * dz * ee)
                        + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
                    / (ave * ave.sqrt());
        }
    }
}
