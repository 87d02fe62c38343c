//! One- and two-point correlation functions of the zeros of the Gaussian
//! polynomial with variance function `k`.
//!
//! Everything is expressed through `l(x,y) = log|r(x,y)|`:
//! `l_x = y K1(xy) - x K1(x^2)`, `l_xy = M(xy)` with `K1 = k'/k` and
//! `M(u) = d/du (u K1(u))`. Near the diagonal `1 - r^2`, the conditional
//! variance factors and the bracket in `delta` all cancel to `O(h^2)`, so
//! frames are recomputed in double-double when `1 - r^2 < 1e-3`, and below
//! `1e-10` the pair density is extrapolated from wider offsets.

use std::f64::consts::PI;

use serde::Serialize;
use twofloat::TwoFloat;

use super::series::{KnSeries, PointEval, Real};

/// Above this `1 - r^2` plain doubles are accurate enough.
pub const DOUBLE_FLOOR: f64 = 1e-3;
/// Below this `1 - r^2` even double-double frames are not trusted.
pub const DD_FLOOR: f64 = 1e-10;
/// Series are summed unscaled while `D |log|u|| <= SCALE_LIMIT`.
const SCALE_LIMIT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    DoubleDouble,
    DiagonalLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPointFrame {
    pub x: f64,
    pub y: f64,
    pub r: f64,
    pub one_minus_r2: f64,
    /// `dl/dx (x, y)`
    pub lx: f64,
    /// `dl/dy (x, y)`
    pub ly: f64,
    /// `d2l/dxdy` at `(x, y)`, `(x, x)`, `(y, y)`
    pub lxy: f64,
    pub lxx: f64,
    pub lyy: f64,
    pub sigma: f64,
    pub delta: f64,
    pub rho1_x: f64,
    pub rho1_y: f64,
    pub rho2: f64,
    pub precision: Precision,
}

impl TwoPointFrame {
    /// `rho2 - rho1(x) rho1(y)`, the Kac–Rice pair integrand.
    pub fn connected(&self) -> f64 {
        self.rho2 - self.rho1_x * self.rho1_y
    }
}

pub(crate) fn lambda(d: f64) -> f64 {
    let d = d.clamp(-1.0, 1.0);
    (1.0 - d * d).sqrt() + d * d.asin()
}

/// Normalization of the three evaluations `xy`, `x^2`, `y^2`.
#[derive(Debug, Clone, Copy)]
struct Modes {
    xy: bool,
    xx: bool,
    yy: bool,
}

fn modes(x: f64, y: f64, degree: usize) -> Modes {
    let lim = SCALE_LIMIT / degree.max(1) as f64;
    let (lx, ly) = (x.abs().ln(), y.abs().ln());
    if 2.0 * lx.max(ly) <= lim {
        Modes { xy: false, xx: false, yy: false }
    } else if 2.0 * lx.min(ly) >= -lim {
        Modes { xy: true, xx: true, yy: true }
    } else {
        Modes { xy: lx + ly > 0.0, xx: lx > 0.0, yy: ly > 0.0 }
    }
}

fn coef_ln(c: i32, x: f64) -> f64 {
    if c == 0 {
        0.0
    } else {
        c as f64 * x.abs().ln()
    }
}

struct Raw<T> {
    r: T,
    om: T,
    lx: T,
    ly: T,
    pxy: PointEval<T>,
    pxx: PointEval<T>,
    pyy: PointEval<T>,
}

/// `l_x` from the evaluations at `xy` and `x^2`.
fn l_partial<T: Real>(x: f64, y: f64, pxy: &PointEval<T>, pxx: &PointEval<T>, degree: usize) -> T {
    if !pxy.scaled && !pxx.scaled {
        pxy.k1 * y - pxx.k1 * x
    } else {
        let c = pxy.scaled as i32 - pxx.scaled as i32;
        (pxy.a - pxx.a + (c as f64 * degree as f64)).quo(T::of(x))
    }
}

pub(crate) struct Kernel {
    pub(crate) series: KnSeries,
    /// Kernel of the reciprocal polynomial, for pairs near `(inf, -inf)`.
    recip: Option<Box<Kernel>>,
}

impl Kernel {
    pub fn new(coeffs: &[f64]) -> Option<Self> {
        let mut k = Self::single(coeffs)?;
        let rev: Vec<f64> = coeffs.iter().rev().copied().collect();
        k.recip = Self::single(&rev).map(Box::new);
        Some(k)
    }

    fn single(coeffs: &[f64]) -> Option<Self> {
        KnSeries::new(coeffs).map(|series| Kernel { series, recip: None })
    }

    /// `rho1(x) = sqrt(M(x^2)) / pi`
    pub fn rho1(&self, x: f64) -> f64 {
        let p: PointEval<f64> = self.series.point(x, x, KnSeries::scale_single(x));
        p.m.max(0.0).sqrt() / PI
    }

    fn raw<T: Real>(&self, x: f64, y: f64) -> Raw<T> {
        let s = &self.series;
        let md = modes(x, y, s.degree);
        let pxy: PointEval<T> = s.point(x, y, md.xy);
        let pxx: PointEval<T> = s.point(x, x, md.xx);
        let pyy: PointEval<T> = s.point(y, y, md.yy);
        // log of the normalizations that do not cancel between numerator
        // and denominator of r
        let cx = md.xy as i32 - md.xx as i32;
        let cy = md.xy as i32 - md.yy as i32;
        let e = s.degree as f64 * (coef_ln(cx, x) + coef_ln(cy, y));
        let sign = if x * y < 0.0 && s.shift % 2 == 1 { -1.0 } else { 1.0 };
        let r = pxy.kv.quo((pxx.kv * pyy.kv).sqrt()) * (sign * e.exp());
        let om = T::of(1.0) - r * r;
        let lx = l_partial(x, y, &pxy, &pxx, s.degree);
        let ly = l_partial(y, x, &pxy, &pyy, s.degree);
        Raw { r, om, lx, ly, pxy, pxx, pyy }
    }

    fn assemble<T: Real>(&self, x: f64, y: f64, w: &Raw<T>, precision: Precision) -> TwoPointFrame {
        let (mxx, myy, mxy) = (w.pxx.m, w.pyy.m, w.pxy.m);
        let rlx = w.r * w.lx;
        let rly = w.r * w.ly;
        let fx = T::of(1.0) - (rlx * rlx).quo(w.om * mxx);
        let fy = T::of(1.0) - (rly * rly).quo(w.om * myy);
        // conditional variance ratios; negative only through rounding
        let ok = fx.val() > 0.0 && fy.val() > 0.0 && mxx.val() > 0.0 && myy.val() > 0.0;
        let sigma_t = if ok { (mxx * myy * fx * fy).sqrt() } else { T::of(0.0) };
        let sigma = sigma_t.val();
        let delta = if sigma > 0.0 {
            (w.r.quo(sigma_t) * (mxy + (w.lx * w.ly).quo(w.om))).val().clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let om = w.om.val();
        let rho2 = if sigma > 0.0 { lambda(delta) * sigma_t.quo(w.om.sqrt()).val() / (PI * PI) } else { 0.0 };
        TwoPointFrame {
            x,
            y,
            r: w.r.val(),
            one_minus_r2: om,
            lx: w.lx.val(),
            ly: w.ly.val(),
            lxy: mxy.val(),
            lxx: mxx.val(),
            lyy: myy.val(),
            sigma,
            delta,
            rho1_x: mxx.val().max(0.0).sqrt() / PI,
            rho1_y: myy.val().max(0.0).sqrt() / PI,
            rho2,
            precision,
        }
    }

    /// Frame at `x <= y` in the cheapest precision that is trusted;
    /// `None` when `1 - r^2 < DD_FLOOR`.
    fn ordered(&self, x: f64, y: f64) -> Option<TwoPointFrame> {
        let w: Raw<f64> = self.raw(x, y);
        if w.om >= DOUBLE_FLOOR {
            return Some(self.assemble(x, y, &w, Precision::Double));
        }
        let w: Raw<TwoFloat> = self.raw(x, y);
        if w.om.val() >= DD_FLOOR {
            return Some(self.assemble(x, y, &w, Precision::DoubleDouble));
        }
        None
    }

    fn swap(f: TwoPointFrame) -> TwoPointFrame {
        TwoPointFrame {
            x: f.y,
            y: f.x,
            lx: f.ly,
            ly: f.lx,
            lxx: f.lyy,
            lyy: f.lxx,
            rho1_x: f.rho1_y,
            rho1_y: f.rho1_x,
            ..f
        }
    }

    /// `None` on the degenerate diagonal band.
    pub fn frame(&self, x: f64, y: f64) -> Option<TwoPointFrame> {
        if x <= y {
            self.ordered(x, y)
        } else {
            self.ordered(y, x).map(Self::swap)
        }
    }

    /// Pair density near the diagonal: Neville interpolation of `rho2`
    /// through `h = 0` (where it vanishes) and five double-double frames at
    /// offsets `h0 / 2^k` centred on the midpoint.
    fn diagonal_limit(&self, x: f64, y: f64) -> TwoPointFrame {
        let rho2 = self.limit_rho2(x, y);
        self.with_rho2(x, y, rho2)
    }

    fn limit_rho2(&self, x: f64, y: f64) -> f64 {
        let c = 0.5 * (x + y);
        let h = (y - x).abs();
        let mc: PointEval<f64> = self.series.point(c, c, KnSeries::scale_single(c));
        let h0 = 1e-3 / mc.m.sqrt();
        let mut hs = vec![0.0];
        let mut vs = vec![0.0];
        for k in 0..5 {
            let d = 0.5 * h0 / (1u32 << k) as f64;
            let (a, b) = (c - d, c + d);
            let w: Raw<TwoFloat> = self.raw(a, b);
            hs.push(b - a);
            vs.push(self.assemble(a, b, &w, Precision::DoubleDouble).rho2);
        }
        neville(&hs, &vs, h).max(0.0)
    }

    fn with_rho2(&self, x: f64, y: f64, rho2: f64) -> TwoPointFrame {
        let w: Raw<f64> = self.raw(x, y);
        let mut f = self.assemble(x, y, &w, Precision::DiagonalLimit);
        f.rho2 = rho2;
        f.sigma = f64::NAN;
        f.delta = f64::NAN;
        f
    }

    /// Degenerate pair. For `|xy| > 1` the leading coefficient dominates
    /// (this includes the far anti-diagonal `y ~ -x`), and the pair is
    /// close to the diagonal only for the reciprocal polynomial at
    /// `(1/x, 1/y)`; otherwise it is near the diagonal as it stands.
    fn degenerate_limit(&self, x: f64, y: f64) -> TwoPointFrame {
        match &self.recip {
            Some(q) if (x * y).abs() > 1.0 => {
                let rho2 = q.limit_rho2(1.0 / y, 1.0 / x) / (x * x * y * y);
                self.with_rho2(x, y, rho2)
            }
            _ => self.diagonal_limit(x, y),
        }
    }

    /// Frame with the diagonal-limit fallback; never fails for finite input.
    pub fn frame_or_limit(&self, x: f64, y: f64) -> TwoPointFrame {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let f = if a == b {
            let mut f = self.diagonal_limit(a, a);
            f.rho2 = 0.0;
            f
        } else {
            self.ordered(a, b).unwrap_or_else(|| self.degenerate_limit(a, b))
        };
        if x <= y {
            f
        } else {
            Self::swap(f)
        }
    }

    /// As [`Kernel::frame_or_limit`] but always through the limit path.
    pub fn forced_limit(&self, x: f64, y: f64) -> TwoPointFrame {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let f = self.diagonal_limit(a, b);
        if x <= y {
            f
        } else {
            Self::swap(f)
        }
    }

    /// `rho2(x, y) - rho1(x) rho1(y)`.
    pub fn connected(&self, x: f64, y: f64) -> f64 {
        self.frame_or_limit(x, y).connected()
    }
}

/// Value at `t` of the polynomial through `(xs, ys)`.
pub(crate) fn neville(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let mut p = ys.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = ((t - xs[i + k]) * p[i] + (xs[i] - t) * p[i + 1]) / (xs[i] - xs[i + k]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_is_exact_on_cubics() {
        let xs = [0.0, 1.0, 2.0, 4.0];
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
        assert!((neville(&xs, &ys, 3.0) - f(3.0)).abs() < 1e-13);
    }

    #[test]
    fn cauchy_density_for_linear_kac() {
        let k = Kernel::new(&[1.0, 1.0]).unwrap();
        assert!((k.rho1(0.0) - 1.0 / PI).abs() < 1e-15);
        assert!((k.rho1(1.0) - 0.5 / PI).abs() < 1e-15);
        assert!((k.rho1(3.0) - 0.1 / PI).abs() < 1e-15);
        // a linear polynomial has one zero, so the pair density vanishes
        let f = k.frame(0.2, 0.9).unwrap();
        assert!(f.rho2.abs() < 1e-12, "{f:?}");
    }

    #[test]
    fn frame_is_symmetric() {
        let c: Vec<f64> = (0..50).map(|j| (j as f64 + 1.0).powf(0.7)).collect();
        let k = Kernel::new(&c).unwrap();
        for (x, y) in [(0.3, 0.9), (-0.95, 0.97), (0.99, 1.02), (1.5, -3.0), (0.9, 0.9001)] {
            let a = k.frame_or_limit(x, y);
            let b = k.frame_or_limit(y, x);
            assert_eq!(a.rho2.to_bits(), b.rho2.to_bits());
            assert_eq!(a.rho1_x, b.rho1_y);
        }
    }

    #[test]
    fn precision_ladder() {
        let k = Kernel::new(&[1.0; 30]).unwrap();
        assert_eq!(k.frame(0.5, 0.9).unwrap().precision, Precision::Double);
        assert_eq!(k.frame(0.5, 0.51).unwrap().precision, Precision::DoubleDouble);
        assert!(k.frame(0.5, 0.5 + 1e-9).is_none());
        assert_eq!(k.frame_or_limit(0.5, 0.5 + 1e-9).precision, Precision::DiagonalLimit);
        assert_eq!(k.frame_or_limit(0.5, 0.5).rho2, 0.0);
    }
}
