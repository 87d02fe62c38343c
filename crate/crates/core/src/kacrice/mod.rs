//! Kac–Rice densities and integrals for the Gaussian analogue `P~_n` of a
//! generalized Kac polynomial.
//!
//! With `k(u) = sum_j c_j^2 u^j` and `r(x,y) = k(xy)/sqrt(k(x^2) k(y^2))`:
//!
//! * `rho1(x) = (1/pi) sqrt(d2l/dxdy (x,x))`, `l = log|r|`;
//! * `rho2(x,y) = (sqrt(1-delta^2) + delta asin(delta)) sigma / (pi^2 sqrt(1-r^2))`;
//! * `E N(I) = int_I rho1`, `Var N(I) = int int_{I^2} (rho2 - rho1 rho1) + E N(I)`.

mod frame;
mod integrals;
mod series;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regions::{Region, RegionSpec, DEFAULT_D};

pub use frame::{Precision, TwoPointFrame, DD_FLOOR, DOUBLE_FLOOR};
pub use integrals::{Estimate, BAND_WIDTH, LOG_CUTOFF};

use frame::Kernel;
use integrals::{log_param, Chart, Integrator, Piece};
use series::KnSeries;

/// `k_n` and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorState {
    pub u: f64,
    pub max_order: usize,
    /// `k^(i)(u) = exp(log_scale) * k[i]`; zero unless `|u| > 1`.
    pub log_scale: f64,
    pub k: [f64; 5],
}

impl CorrelatorState {
    /// `k^(i)(u)` unscaled; may overflow for large `|u|`.
    pub fn value(&self, i: usize) -> f64 {
        self.k[i] * self.log_scale.exp()
    }
}

pub fn kn_derivatives(coeffs: &[f64], u: f64, max_order: usize) -> Result<CorrelatorState> {
    if max_order > 4 {
        return Err(Error::InvalidArgument(format!("derivative order {max_order} exceeds 4")));
    }
    if !u.is_finite() {
        return Err(Error::InvalidArgument(format!("u must be finite, got {u}")));
    }
    let (log_scale, k) = KnSeries::derivatives(coeffs, u, max_order);
    Ok(CorrelatorState { u, max_order, log_scale, k })
}

fn kernel(coeffs: &[f64]) -> Result<Kernel> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    Kernel::new(coeffs).ok_or(Error::DegenerateVariance(0.0))
}

pub fn rho1(coeffs: &[f64], x: f64) -> Result<f64> {
    Ok(kernel(coeffs)?.rho1(x))
}

/// Frame at `(x, y)`; `DegenerateFrame` when `1 - r^2` is below the
/// double-double floor (use [`two_point_frame_limit`] there).
pub fn two_point_frame(coeffs: &[f64], x: f64, y: f64) -> Result<TwoPointFrame> {
    let k = kernel(coeffs)?;
    k.frame(x, y).ok_or_else(|| {
        let one_minus_r2 = if x == y { 0.0 } else { k.forced_limit(x, y).one_minus_r2 };
        Error::DegenerateFrame { x, y, one_minus_r2 }
    })
}

/// Frame at `(x, y)` falling back to the diagonal limit; with `force` the
/// limit path is used even where a direct frame is available.
pub fn two_point_frame_limit(coeffs: &[f64], x: f64, y: f64, force: bool) -> Result<TwoPointFrame> {
    let k = kernel(coeffs)?;
    Ok(if force { k.forced_limit(x, y) } else { k.frame_or_limit(x, y) })
}

/// `Q_n(x) = x^n P_n(1/x) / c_n`: reversed coefficients over `c_n`.
pub fn reciprocal_coefficients(coeffs: &[f64]) -> Result<Vec<f64>> {
    let cn = *coeffs.last().ok_or(Error::ZeroPolynomial)?;
    if cn == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient c_n vanishes".into()));
    }
    Ok(coeffs.iter().rev().map(|c| c / cn).collect())
}

/// Integration domain: a standard region or a bounded interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    Region(Region),
    Interval(f64, f64),
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Region(r) => write!(f, "{r}"),
            Domain::Interval(a, b) => write!(f, "{a},{b}"),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some((a, b)) = s.split_once(',') {
            let p = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{t}`: {e}")));
            let (a, b) = (p(a)?, p(b)?);
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Parse(format!("bad interval `{s}`")));
            }
            return Ok(Domain::Interval(a, b));
        }
        Ok(Domain::Region(s.parse()?))
    }
}

/// Kac–Rice integrals for one coefficient vector.
pub struct KacRice {
    p: Kernel,
    q: Kernel,
    n: usize,
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KacRiceResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

impl From<Estimate> for KacRiceResult {
    fn from(e: Estimate) -> Self {
        KacRiceResult { value: e.value, error: e.error, evaluations: e.evaluations, panels: e.panels }
    }
}

impl KacRice {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        Self::with_d(coeffs, DEFAULT_D)
    }

    pub fn with_d(coeffs: &[f64], d: f64) -> Result<Self> {
        let p = kernel(coeffs)?;
        let rev: Vec<f64> = coeffs.iter().rev().copied().collect();
        let q = kernel(&rev)?;
        Ok(KacRice { p, q, n: coeffs.len() - 1, d })
    }

    fn scale(&self) -> f64 {
        self.n.max(1) as f64
    }

    fn spec(&self) -> Result<RegionSpec> {
        RegionSpec::new(self.n, self.d)
    }

    fn log_piece(&self, sign: f64, a: f64, b: f64) -> Option<Piece> {
        let s = self.scale();
        let (lo, hi) = (log_param(a, s), log_param(b, s));
        (hi > lo).then_some(Piece { sign, chart: Chart::Log, lo, hi })
    }

    fn pieces(&self, dom: &Domain) -> Result<Vec<Piece>> {
        let band = |sign: f64, chart: Chart| -> Result<Piece> {
            let sp = self.spec()?;
            Ok(Piece { sign, chart, lo: sp.alpha.atanh(), hi: sp.beta.atanh() })
        };
        Ok(match dom {
            Domain::Region(Region::Inner) => vec![band(1.0, Chart::Band)?],
            Domain::Region(Region::NegInner) => vec![band(-1.0, Chart::Band)?],
            Domain::Region(Region::Outer) => vec![band(1.0, Chart::RecipBand)?],
            Domain::Region(Region::NegOuter) => vec![band(-1.0, Chart::RecipBand)?],
            Domain::Region(Region::Core) => vec![
                band(1.0, Chart::Band)?,
                band(-1.0, Chart::Band)?,
                band(1.0, Chart::RecipBand)?,
                band(-1.0, Chart::RecipBand)?,
            ],
            Domain::Region(Region::Real) => {
                [1.0, -1.0].iter().filter_map(|s| self.log_piece(*s, 0.0, f64::INFINITY)).collect()
            }
            Domain::Region(Region::Rest) => {
                let sp = self.spec()?;
                let mut v = Vec::new();
                for s in [1.0, -1.0] {
                    v.extend(self.log_piece(s, 0.0, sp.alpha));
                    v.extend(self.log_piece(s, sp.beta, 1.0 / sp.beta));
                    v.extend(self.log_piece(s, 1.0 / sp.alpha, f64::INFINITY));
                }
                v
            }
            Domain::Interval(a, b) => {
                let mut v = Vec::new();
                if *b > 0.0 {
                    v.extend(self.log_piece(1.0, a.max(0.0), *b));
                }
                if *a < 0.0 {
                    v.extend(self.log_piece(-1.0, (-b).max(0.0), -a));
                }
                v
            }
        })
    }

    fn integrator(&self) -> Integrator<'_> {
        Integrator { p: &self.p, q: &self.q, scale: self.scale() }
    }

    fn check_tol(tol: f64) -> Result<()> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        Ok(())
    }

    pub fn rho1(&self, x: f64) -> f64 {
        self.p.rho1(x)
    }

    pub fn frame(&self, x: f64, y: f64) -> TwoPointFrame {
        self.p.frame_or_limit(x, y)
    }

    pub fn expectation(&self, dom: &Domain, tol: f64) -> Result<KacRiceResult> {
        Self::check_tol(tol)?;
        self.integrator().expectation_sum(&self.pieces(dom)?, tol).map(Into::into)
    }

    pub fn variance(&self, dom: &Domain, tol: f64) -> Result<KacRiceResult> {
        Self::check_tol(tol)?;
        self.integrator().variance_sum(&self.pieces(dom)?, tol).map(Into::into)
    }

    pub fn covariance(&self, a: &Domain, b: &Domain, tol: f64) -> Result<KacRiceResult> {
        Self::check_tol(tol)?;
        let overlap = match (a, b) {
            (Domain::Region(x), Domain::Region(y)) => !x.disjoint(*y),
            _ => {
                let (pa, pb) = (self.pieces(a)?, self.pieces(b)?);
                pa.iter().any(|p| pb.iter().any(|q| p.sign == q.sign && p.lo < q.hi && q.lo < p.hi))
            }
        };
        if overlap {
            return Err(Error::OverlappingRegions(a.to_string(), b.to_string()));
        }
        let (pa, pb) = (self.pieces(a)?, self.pieces(b)?);
        self.integrator().covariance_sum(&pa, &pb, tol).map(Into::into)
    }
}

pub fn expectation_quadrature(coeffs: &[f64], dom: &Domain, tol: f64) -> Result<KacRiceResult> {
    KacRice::new(coeffs)?.expectation(dom, tol)
}

pub fn variance_quadrature(coeffs: &[f64], dom: &Domain, tol: f64) -> Result<KacRiceResult> {
    KacRice::new(coeffs)?.variance(dom, tol)
}

pub fn covariance_quadrature(coeffs: &[f64], a: &Domain, b: &Domain, tol: f64) -> Result<KacRiceResult> {
    KacRice::new(coeffs)?.covariance(a, b, tol)
}
