//! Kac–Rice integrals over unions of intervals.
//!
//! Every region is cut into pieces, each carried by a chart `p -> x(p)`:
//!
//! * `Band`: `x = s tanh p`, the inner bands in hyperbolic coordinates;
//! * `RecipBand`: `x = s coth p`, the outer bands; self-terms are integrated
//!   for the reciprocal polynomial on the inner band instead;
//! * `Log`: `x = s exp(sinh(p)/n)`, a chart of a half-line that resolves the
//!   `1/n` scale around `|x| = 1` and the bulk on either side.
//!
//! Self-terms use the band form `2 int dp int_0^V g(p, p+v) dv` (the pair
//! integrand decays quickly off the diagonal); cross terms are plain
//! rectangles.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::quadrature::{breakpoints, integrate, integrate_par, QuadOptions, QuadResult};

use super::frame::Kernel;

/// Self-terms only integrate `|p - q| <= BAND_WIDTH`.
pub const BAND_WIDTH: f64 = 40.0;
/// `Log` charts stop at `|log|x|| = LOG_CUTOFF`.
pub const LOG_CUTOFF: f64 = 40.0;
const INNER_BREAKS: [f64; 10] = [0.0, 0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, BAND_WIDTH];

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Chart {
    Band,
    RecipBand,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub sign: f64,
    pub chart: Chart,
    pub lo: f64,
    pub hi: f64,
}

fn sech2(p: f64) -> f64 {
    let c = p.cosh();
    1.0 / (c * c)
}

impl Piece {
    /// Point and Jacobian in the original variable.
    fn map(&self, p: f64, scale: f64) -> (f64, f64) {
        match self.chart {
            Chart::Band => (self.sign * p.tanh(), sech2(p)),
            Chart::RecipBand => {
                let s = p.sinh();
                (self.sign / p.tanh(), 1.0 / (s * s))
            }
            Chart::Log => {
                let th = p.sinh() / scale;
                let x = th.exp();
                (self.sign * x, x * p.cosh() / scale)
            }
        }
    }

    /// Point and Jacobian for the self-term; outer bands are mapped to the
    /// reciprocal polynomial's inner band.
    fn map_self(&self, p: f64, scale: f64) -> (f64, f64) {
        match self.chart {
            Chart::RecipBand => (self.sign * p.tanh(), sech2(p)),
            _ => self.map(p, scale),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        let mut v = vec![self.lo];
        let mut x = self.lo.floor() + 1.0;
        while x < self.hi {
            if x - self.lo > 1e-3 && self.hi - x > 1e-3 {
                v.push(x);
            }
            x += 1.0;
        }
        v.push(self.hi);
        v
    }

    fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Parameter of `|x|` in the `Log` chart.
pub(crate) fn log_param(ax: f64, scale: f64) -> f64 {
    let cap = (LOG_CUTOFF * scale).asinh();
    if ax <= 0.0 {
        return -cap;
    }
    (scale * ax.ln()).asinh().clamp(-cap, cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations (one frame or density each).
    pub evaluations: usize,
    /// Outer quadrature panels.
    pub panels: usize,
}

impl Estimate {
    fn add(self, o: Estimate, weight: f64) -> Estimate {
        Estimate {
            value: self.value + weight * o.value,
            error: self.error + weight.abs() * o.error,
            evaluations: self.evaluations + o.evaluations,
            panels: self.panels + o.panels,
        }
    }
}

pub(crate) struct Integrator<'a> {
    pub p: &'a Kernel,
    pub q: &'a Kernel,
    /// Scale of the `Log` chart (the degree).
    pub scale: f64,
}

fn check(r: QuadResult, tol: f64, inner_err: f64) -> Result<Estimate> {
    let error = r.error + inner_err;
    if !r.converged || !(error <= tol) || !r.value.is_finite() {
        return Err(Error::ToleranceNotMet { tol, estimate: error });
    }
    Ok(Estimate { value: r.value, error, evaluations: r.evaluations, panels: r.panels })
}

impl Integrator<'_> {
    pub fn expectation(&self, piece: &Piece, tol: f64) -> Result<Estimate> {
        let opts = QuadOptions { abs_tol: tol, rel_tol: 0.0, max_panels: 2000 };
        let r = integrate(
            |p| {
                let (x, j) = piece.map(p, self.scale);
                self.p.rho1(x) * j
            },
            &piece.breaks(),
            &opts,
        );
        check(r, tol, 0.0)
    }

    /// `int int_{piece^2} (rho2 - rho1 rho1)`.
    pub fn self_term(&self, piece: &Piece, tol: f64) -> Result<Estimate> {
        let k = if piece.chart == Chart::RecipBand { self.q } else { self.p };
        let outer_tol = 0.5 * tol;
        // error budget per unit of the outer variable; the inner error is
        // weighted by the outer Jacobian
        let inner_tol = 0.25 * tol / piece.len().max(1e-300);
        let count = AtomicUsize::new(0);
        let inner_failed = AtomicBool::new(false);
        let r = integrate_par(
            |p| {
                let vmax = (piece.hi - p).min(BAND_WIDTH);
                if vmax <= 0.0 || inner_failed.load(Ordering::Relaxed) {
                    return 0.0;
                }
                let (x, jx) = piece.map_self(p, self.scale);
                let inner_opts = QuadOptions { abs_tol: inner_tol / (2.0 * jx), rel_tol: 0.0, max_panels: 400 };
                let inner = integrate(
                    |v| {
                        let (y, jy) = piece.map_self(p + v, self.scale);
                        count.fetch_add(1, Ordering::Relaxed);
                        k.connected(x, y) * jy
                    },
                    &breakpoints(0.0, vmax, &INNER_BREAKS[1..]),
                    &inner_opts,
                );
                if !inner.converged {
                    inner_failed.store(true, Ordering::Relaxed);
                }
                2.0 * jx * inner.value
            },
            &piece.breaks(),
            &QuadOptions { abs_tol: outer_tol, rel_tol: 0.0, max_panels: 400 },
        );
        let inner_err = piece.len() * inner_tol;
        if inner_failed.load(Ordering::Relaxed) {
            return Err(Error::ToleranceNotMet { tol, estimate: f64::INFINITY });
        }
        check(r, tol, inner_err).map(|e| Estimate { evaluations: count.load(Ordering::Relaxed), ..e })
    }

    /// `int_A int_B (rho2 - rho1 rho1)` for disjoint pieces.
    pub fn cross_term(&self, a: &Piece, b: &Piece, tol: f64) -> Result<Estimate> {
        let inner_tol = 0.25 * tol / a.len().max(1e-300);
        let count = AtomicUsize::new(0);
        let inner_failed = AtomicBool::new(false);
        let bb = b.breaks();
        let r = integrate_par(
            |p| {
                if inner_failed.load(Ordering::Relaxed) {
                    return 0.0;
                }
                let (x, jx) = a.map(p, self.scale);
                let inner_opts = QuadOptions { abs_tol: inner_tol / jx, rel_tol: 0.0, max_panels: 400 };
                let inner = integrate(
                    |q| {
                        let (y, jy) = b.map(q, self.scale);
                        count.fetch_add(1, Ordering::Relaxed);
                        self.p.connected(x, y) * jy
                    },
                    &bb,
                    &inner_opts,
                );
                if !inner.converged {
                    inner_failed.store(true, Ordering::Relaxed);
                }
                jx * inner.value
            },
            &a.breaks(),
            &QuadOptions { abs_tol: 0.5 * tol, rel_tol: 0.0, max_panels: 400 },
        );
        let inner_err = a.len() * inner_tol;
        if inner_failed.load(Ordering::Relaxed) {
            return Err(Error::ToleranceNotMet { tol, estimate: f64::INFINITY });
        }
        check(r, tol, inner_err).map(|e| Estimate { evaluations: count.load(Ordering::Relaxed), ..e })
    }

    pub fn expectation_sum(&self, pieces: &[Piece], tol: f64) -> Result<Estimate> {
        let t = tol / pieces.len().max(1) as f64;
        pieces.iter().try_fold(Estimate::default(), |acc, p| Ok(acc.add(self.expectation(p, t)?, 1.0)))
    }

    pub fn variance_sum(&self, pieces: &[Piece], tol: f64) -> Result<Estimate> {
        let m = pieces.len();
        if m == 0 {
            return Ok(Estimate::default());
        }
        let blocks = (m + m * (m - 1) / 2).max(1) as f64;
        let t = tol / (blocks + m as f64);
        let mut acc = Estimate::default();
        for (i, a) in pieces.iter().enumerate() {
            acc = acc.add(self.self_term(a, t)?, 1.0);
            acc = acc.add(self.expectation(a, t)?, 1.0);
            for b in &pieces[i + 1..] {
                acc = acc.add(self.cross_term(a, b, t / 2.0)?, 2.0);
            }
        }
        Ok(acc)
    }

    pub fn covariance_sum(&self, a: &[Piece], b: &[Piece], tol: f64) -> Result<Estimate> {
        let t = tol / (a.len() * b.len()).max(1) as f64;
        let mut acc = Estimate::default();
        for pa in a {
            for pb in b {
                acc = acc.add(self.cross_term(pa, pb, t)?, 1.0);
            }
        }
        Ok(acc)
    }
}
