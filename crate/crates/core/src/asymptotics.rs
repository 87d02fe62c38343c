//! Limiting shape functions and constants for generalized Kac polynomials
//! with `|c_j| ~ C1 j^tau`.
//!
//! With `L = 2 tau + 1`:
//!
//! * `Delta_tau(u) = u^(tau+1/2) (u (1 - u^L) - L (1 - u)) / (1 - u^L - L u^L (1 - u))`
//! * `Sigma_tau(u) = (1 - u^L - L u^L (1 - u)) / (1 - u^L)^(3/2)`
//! * `f_tau(u) = Lambda(Delta_tau(u)) Sigma_tau(u) - 1`, `Lambda(d) = sqrt(1 - d^2) + d asin d`
//! * `kappa_tau = ((L/pi) int_0^inf f_tau(sech^2 v) dv + sqrt(L)/2) / pi`
//!
//! Numerator and denominator of `Delta_tau` both vanish to second order at
//! `u = 1`; for `s = 1 - u < 1/2` they are evaluated as power series in `s`
//! whose leading terms cancel analytically.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

const SERIES_SWITCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauParams {
    pub tau: f64,
}

impl TauParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > -0.5) {
            return Err(Error::InvalidArgument(format!("tau must exceed -1/2, got {tau}")));
        }
        Ok(TauParams { tau })
    }

    pub fn l(&self) -> f64 {
        2.0 * self.tau + 1.0
    }
}

fn check_unit(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("u must lie in [0, 1], got {u}")));
    }
    Ok(())
}

/// `(N/s^2, D/s^2, A/s)` where `A = 1 - u^L`, `N` and `D` as in the module docs.
fn series_parts(l: f64, s: f64) -> (f64, f64, f64) {
    // b_k = (-1)^(k+1) C(L, k), so that A = sum_{k>=1} b_k s^k
    let (mut n, mut d, mut a) = (0.0, 0.0, l);
    let mut b_prev = l;
    let mut binom = l; // C(L, k) for the current k
    let mut sp = 1.0; // s^(k-2)
    for k in 2..400 {
        binom *= (l - (k - 1) as f64) / k as f64;
        let b = if k % 2 == 0 { -binom } else { binom };
        let tn = (b - b_prev) * sp;
        let td = (b + l * b_prev) * sp;
        n += tn;
        d += td;
        a += b * sp * s;
        b_prev = b;
        sp *= s;
        if tn.abs() <= 1e-18 * n.abs() && td.abs() <= 1e-18 * d.abs() && binom.abs() * sp < 1e-300 + 1e-18 * d.abs() {
            break;
        }
        if binom == 0.0 {
            break;
        }
    }
    (n, d, a)
}

/// `(Delta, Sigma)` at `u`.
fn delta_sigma(tau: f64, u: f64) -> (f64, f64) {
    let l = 2.0 * tau + 1.0;
    let s = 1.0 - u;
    if s == 0.0 {
        return (-1.0, 0.0);
    }
    if u == 0.0 {
        return (0.0, 1.0);
    }
    if s < SERIES_SWITCH {
        let pre = ((tau + 0.5) * (-s).ln_1p()).exp();
        let (n, d, _) = series_parts(l, s);
        let a = -(l * (-s).ln_1p()).exp_m1();
        // Sigma = D / A^(3/2) = s^2 d / A^(3/2)
        (pre * n / d, s * s * d / a.powf(1.5))
    } else {
        let ul = u.powf(l);
        let a = 1.0 - ul;
        let n = u * a - l * s;
        let d = a - l * ul * s;
        (u.powf(tau + 0.5) * n / d, d / a.powf(1.5))
    }
}

pub fn delta_tau(tau: f64, u: f64) -> Result<f64> {
    TauParams::new(tau)?;
    check_unit(u)?;
    Ok(delta_sigma(tau, u).0.clamp(-1.0, 0.0))
}

pub fn sigma_tau(tau: f64, u: f64) -> Result<f64> {
    TauParams::new(tau)?;
    check_unit(u)?;
    Ok(delta_sigma(tau, u).1)
}

fn lambda_raw(d: f64) -> f64 {
    let d = d.clamp(-1.0, 1.0);
    (1.0 - d * d).sqrt() + d * d.asin()
}

/// `Lambda(d) = sqrt(1 - d^2) + d asin(d)`; even, increasing in `|d|`,
/// with range `[1, pi/2]`.
pub fn lambda_fn(d: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&d) {
        return Err(Error::InvalidArgument(format!("|delta| must not exceed 1, got {d}")));
    }
    Ok(lambda_raw(d))
}

fn f_raw(tau: f64, u: f64) -> f64 {
    if u >= 1.0 {
        return -1.0;
    }
    let (d, s) = delta_sigma(tau, u);
    lambda_raw(d) * s - 1.0
}

pub fn f_tau(tau: f64, u: f64) -> Result<f64> {
    TauParams::new(tau)?;
    check_unit(u)?;
    Ok(f_raw(tau, u))
}

/// `sech^2 v`, without overflow for large `v`.
pub fn sech2(v: f64) -> f64 {
    let e = (-2.0 * v.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaResult {
    pub kappa: f64,
    /// Error bound on `kappa`: quadrature estimate plus truncated tail.
    pub error: f64,
    /// `int_0^inf f_tau(sech^2 v) dv`
    pub integral: f64,
    pub v_max: f64,
    pub evaluations: usize,
}

/// `kappa_tau` with an error bound at most `tol` (or an error).
pub fn kappa_tau(tau: f64, tol: f64) -> Result<KappaResult> {
    let p = TauParams::new(tau)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let l = p.l();
    // f_tau(u) ~ 2 tau^2 u^L as u -> 0 (u^2/6 when tau = 0); the tail of the
    // integrand beyond v is then about c sech(v)^(2q) / (2q).
    let q = if tau == 0.0 { 2.0 } else { l.min(2.0) };
    let c = (2.0 * tau * tau).max(1.0 / 6.0) * 4.0;
    let itol = tol * PI * PI / l / 4.0;
    let v_max = ((c * 4f64.powf(q) / (2.0 * q)) / (itol / 10.0)).ln() / (2.0 * q);
    let v_max = v_max.max(4.0);
    let tail = 2.0 * f_raw(tau, sech2(v_max)).abs() / (2.0 * q) + c * 4f64.powf(q) * (-2.0 * q * v_max).exp() / (2.0 * q);
    let opts = QuadOptions { abs_tol: itol / 2.0, rel_tol: 0.0, max_panels: 4000 };
    let breaks: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        .into_iter()
        .filter(|b| *b < v_max)
        .chain(std::iter::once(v_max))
        .collect();
    let r = integrate(|v| f_raw(tau, sech2(v)), &breaks, &opts);
    let scale = l / PI / PI;
    let error = scale * (r.error + tail);
    if !(error <= tol) {
        return Err(Error::ToleranceNotMet { tol, estimate: error });
    }
    Ok(KappaResult {
        kappa: (l / PI * r.value + l.sqrt() / 2.0) / PI,
        error,
        integral: r.value,
        v_max,
        evaluations: r.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    pub tau: f64,
    pub kappa: f64,
    pub kappa_error: f64,
    /// `(1 + sqrt(2 tau + 1)) / pi`, slope of `E N(R)` in `log n`.
    pub mean_slope: f64,
    /// `2 kappa + (2/pi)(1 - 2/pi)`, slope of `Var N(R)`.
    pub var_slope_total: f64,
    /// `kappa`, slope of the variance over each inner band.
    pub var_slope_inner: f64,
    /// `(1/pi)(1 - 2/pi)`, slope over each outer band.
    pub var_slope_outer: f64,
    /// `(4/pi)(1 - 2/pi)`, the Kac value.
    pub maslova_slope: f64,
}

pub const OUTER_SLOPE: f64 = (1.0 - 2.0 / PI) / PI;

pub fn predicted_stats(tau: f64) -> Result<AsymptoticConstants> {
    predicted_stats_tol(tau, 1e-10)
}

pub fn predicted_stats_tol(tau: f64, tol: f64) -> Result<AsymptoticConstants> {
    let k = kappa_tau(tau, tol)?;
    let l = 2.0 * tau + 1.0;
    Ok(AsymptoticConstants {
        tau,
        kappa: k.kappa,
        kappa_error: k.error,
        mean_slope: (1.0 + l.sqrt()) / PI,
        var_slope_total: 2.0 * k.kappa + 2.0 * OUTER_SLOPE,
        var_slope_inner: k.kappa,
        var_slope_outer: OUTER_SLOPE,
        maslova_slope: 4.0 * OUTER_SLOPE,
    })
}

/// `(alpha, rho)` with `alpha = (1-x^2)(1-y^2)/(1-xy)^2` and
/// `rho = |x-y| / |1-xy|`, the pseudo-hyperbolic distance.
pub fn alpha_rho(x: f64, y: f64) -> Result<(f64, f64)> {
    let den = 1.0 - x * y;
    if den == 0.0 {
        return Err(Error::InvalidArgument(format!("x y = 1 at ({x}, {y})")));
    }
    let rho = ((x - y) / den).abs();
    let alpha = (1.0 - x * x) * (1.0 - y * y) / (den * den);
    Ok((alpha, rho))
}

/// Upper bound `rho / (1 - 2 rho / sqrt(1 - c^2))` for the pseudo-hyperbolic
/// distance of two points between `x` and `y` (same sign, `rho(x,y) <= c`).
pub fn contraction_bound(rho: f64, c: f64) -> Option<f64> {
    let den = 1.0 - 2.0 * rho / (1.0 - c * c).sqrt();
    (rho <= c && den > 0.0).then(|| rho / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub u: f64,
    pub delta: f64,
    pub sigma: f64,
    pub f: f64,
}

/// `Delta_tau`, `Sigma_tau` and `f_tau` on `steps` equispaced points of `[u0, u1]`.
pub fn shape_table(tau: f64, u0: f64, u1: f64, steps: usize) -> Result<Vec<TableRow>> {
    TauParams::new(tau)?;
    check_unit(u0)?;
    check_unit(u1)?;
    if steps < 2 || u1 < u0 {
        return Err(Error::InvalidArgument(format!("bad table range {u0},{u1},{steps}")));
    }
    Ok((0..steps)
        .map(|i| {
            let u = if i + 1 == steps { u1 } else { u0 + (u1 - u0) * i as f64 / (steps - 1) as f64 };
            let (d, s) = if u >= 1.0 { (-1.0, 0.0) } else { delta_sigma(tau, u) };
            TableRow { u, delta: d.clamp(-1.0, 0.0), sigma: s, f: f_raw(tau, u) }
        })
        .collect())
}
