//! The variance function `k(u) = sum_j w_j u^j`, `w_j = c_j^2`, and the
//! per-point quantities the two-point algebra is built from.
//!
//! Evaluation is generic over `f64` and double-double. For `|u| > 1` the
//! series is summed in `1/u` over the reversed weights, which keeps the
//! values finite and avoids cancellation in the mixed log-derivative.

use std::ops::{Add, Mul, Neg, Sub};

use twofloat::TwoFloat;

pub(crate) trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
{
    /// Relative truncation target for series tails.
    const EPS: f64;
    fn of(x: f64) -> Self;
    /// `a * b`, exactly when the type allows it.
    fn prod(a: f64, b: f64) -> Self;
    /// `self / o` to the working precision.
    fn quo(self, o: Self) -> Self;
    fn sqrt(self) -> Self;
    fn val(self) -> f64;
}

impl Real for f64 {
    const EPS: f64 = 1e-17;
    fn of(x: f64) -> Self {
        x
    }
    fn prod(a: f64, b: f64) -> Self {
        a * b
    }
    fn quo(self, o: Self) -> Self {
        self / o
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn val(self) -> f64 {
        self
    }
}

impl Real for TwoFloat {
    const EPS: f64 = 1e-33;
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn prod(a: f64, b: f64) -> Self {
        TwoFloat::new_mul(a, b)
    }
    // twofloat's own division is only good to about one double ulp; this is
    // long division with three partial quotients
    fn quo(self, o: Self) -> Self {
        let q1 = self.hi() / o.hi();
        let r = self - o * q1;
        let q2 = r.hi() / o.hi();
        let r = r - o * q2;
        let q3 = r.hi() / o.hi();
        TwoFloat::new_add(q1, q2) + q3
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    fn val(self) -> f64 {
        self.hi() + self.lo()
    }
}

/// `S_i = sum_{j>=i} a_j j(j-1)..(j-i+1) z^(j-i)` for `i < K`, truncated once
/// the tail bound from the suffix envelope falls below `EPS |S_i|`.
pub(crate) fn forward<T: Real, const K: usize>(a: &[f64], env: &[f64], z: T, zabs: f64) -> [T; K] {
    let mut s = [T::of(0.0); K];
    // p[i] = z^(j-i); zero while j < i (the falling factorial vanishes there)
    let mut p = [T::of(0.0); K];
    p[0] = T::of(1.0);
    let nn = a.len() as f64;
    for (j, &aj) in a.iter().enumerate() {
        if aj != 0.0 {
            let mut ff = aj;
            for i in 0..K {
                s[i] = s[i] + p[i] * ff;
                ff *= (j - i.min(j)) as f64;
            }
        }
        for i in (1..K).rev() {
            p[i] = p[i - 1];
        }
        p[0] = p[0] * z;
        if j % 32 == 31 && zabs < 1.0 && j + 1 < a.len() {
            let tail_w = env[j + 1] / (1.0 - zabs);
            let mut done = true;
            let mut pw = 1.0;
            for i in 0..K {
                let bound = tail_w * pw * p[i].val().abs();
                if bound > T::EPS * s[i].val().abs() || !bound.is_finite() {
                    done = false;
                    break;
                }
                pw *= nn;
            }
            if done {
                break;
            }
        }
    }
    s
}

/// Suffix maxima: `env[j] = max_{i >= j} a_i`.
fn envelope(a: &[f64]) -> Vec<f64> {
    let mut env = a.to_vec();
    for j in (0..env.len().saturating_sub(1)).rev() {
        env[j] = env[j].max(env[j + 1]);
    }
    env
}

#[derive(Debug, Clone)]
pub(crate) struct KnSeries {
    /// Number of vanishing leading coefficients that were stripped; the
    /// stripped factor `u^m` only contributes a sign to the correlator.
    pub shift: usize,
    /// Degree `D` of the stripped series.
    pub degree: usize,
    w: Vec<f64>,
    w_env: Vec<f64>,
    q: Vec<f64>,
    q_env: Vec<f64>,
}

/// Quantities of `k` at one argument `u`, in one of two normalizations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointEval<T> {
    pub scaled: bool,
    /// `k(u)` (unscaled) or `k(u) / |u|^D` (scaled).
    pub kv: T,
    /// `u k'(u)/k(u)`, minus `D` when scaled.
    pub a: T,
    /// `k'(u)/k(u)`; only set when unscaled.
    pub k1: T,
    /// `d/du (u k'(u)/k(u))`.
    pub m: T,
}

impl KnSeries {
    /// `None` when every coefficient vanishes.
    pub fn new(coeffs: &[f64]) -> Option<Self> {
        let first = coeffs.iter().position(|c| *c != 0.0)?;
        let last = coeffs.iter().rposition(|c| *c != 0.0)?;
        let w: Vec<f64> = coeffs[first..=last].iter().map(|c| c * c).collect();
        let q: Vec<f64> = w.iter().rev().copied().collect();
        Some(KnSeries {
            shift: first,
            degree: w.len() - 1,
            w_env: envelope(&w),
            q_env: envelope(&q),
            w,
            q,
        })
    }

    /// Quantities at `u = x y` (computed exactly in double-double).
    pub fn point<T: Real>(&self, x: f64, y: f64, scaled: bool) -> PointEval<T> {
        let u = T::prod(x, y);
        let uabs = (x * y).abs();
        if !scaled || self.degree == 0 {
            let [v0, v1, v2] = forward::<T, 3>(&self.w, &self.w_env, u, uabs);
            let k1 = v1.quo(v0);
            PointEval { scaled: false, kv: v0, a: u * k1, k1, m: k1 + u * v2.quo(v0) - u * k1 * k1 }
        } else {
            // k(u) = u^D G(1/u) with G(z) = sum_m w_{D-m} z^m
            let z = T::of(1.0).quo(u);
            let [g0, g1, g2] = forward::<T, 3>(&self.q, &self.q_env, z, 1.0 / uabs);
            let h1 = g1.quo(g0);
            let sign = if x * y < 0.0 && self.degree % 2 == 1 { -1.0 } else { 1.0 };
            PointEval {
                scaled: true,
                kv: g0 * sign,
                a: -(z * h1),
                k1: T::of(f64::NAN),
                m: z * z * (h1 + z * g2.quo(g0) - z * h1 * h1),
            }
        }
    }

    /// Which normalization to use for a single point `x^2`.
    pub fn scale_single(x: f64) -> bool {
        x.abs() > 1.0
    }

    /// `k^(i)(u)` for `i <= order` without stripping, as values times
    /// `exp(log_scale)`.
    pub fn derivatives(coeffs: &[f64], u: f64, order: usize) -> (f64, [f64; 5]) {
        let w: Vec<f64> = coeffs.iter().map(|c| c * c).collect();
        let n = w.len().saturating_sub(1);
        let mut out = [0.0; 5];
        if u.abs() <= 1.0 || n == 0 {
            let env = envelope(&w);
            let s = forward::<f64, 5>(&w, &env, u, u.abs());
            out[..=order].copy_from_slice(&s[..=order]);
            return (0.0, out);
        }
        // k^(i)(u) = u^(n-i) sum_m w_{n-m} (n-m)_i u^(-m)
        let z = 1.0 / u;
        for (i, o) in out.iter_mut().enumerate().take(order + 1) {
            let mut s = 0.0;
            let mut p = 1.0;
            for m in 0..=n {
                let j = n - m;
                if j >= i {
                    let ff: f64 = (0..i).map(|t| (j - t) as f64).product();
                    s += w[j] * ff * p;
                }
                p *= z;
            }
            let sign = if u < 0.0 && (n - i) % 2 == 1 { -1.0 } else { 1.0 };
            *o = sign * s * u.abs().powi(-(i as i32));
        }
        (n as f64 * u.abs().ln(), out)
    }
}
