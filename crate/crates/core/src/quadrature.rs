//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are bisected worst-first until the summed error estimate meets the
//! tolerance. Node evaluations of a panel may run in parallel, but results
//! are always combined in a fixed order, so the value is bit-identical for
//! any thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on the number of panels kept after bisection.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_panels: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// Panels in the final partition.
    pub panels: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        // largest error first, ties broken by position
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [c; 15];
    for k in 0..7 {
        x[2 * k] = c - h * XGK[k];
        x[2 * k + 1] = c + h * XGK[k];
    }
    x
}

fn combine(a: f64, b: f64, fx: &[f64; 15]) -> Panel {
    let h = 0.5 * (b - a);
    let fc = fx[14];
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for k in 0..7 {
        let s = fx[2 * k] + fx[2 * k + 1];
        rk += WGK[k] * s;
        if k % 2 == 1 {
            rg += WG[k / 2] * s;
        }
    }
    let mean = 0.5 * rk;
    let mut asc = WGK[7] * (fc - mean).abs();
    for k in 0..7 {
        asc += WGK[k] * ((fx[2 * k] - mean).abs() + (fx[2 * k + 1] - mean).abs());
    }
    let asc = asc * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let value = rk * h;
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel { a, b, value, error: err.max(50.0 * f64::EPSILON * value.abs()) }
}

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let x = nodes(a, b);
    let fx = x.map(f);
    combine(a, b, &fx)
}

fn rule_par<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64) -> Panel {
    let x = nodes(a, b);
    let v: Vec<f64> = x.par_iter().map(|x| f(*x)).collect();
    let mut fx = [0.0; 15];
    fx.copy_from_slice(&v);
    combine(a, b, &fx)
}

fn adapt(breaks: &[f64], opts: &QuadOptions, eval: &dyn Fn(f64, f64) -> Panel) -> QuadResult {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(eval(w[0], w[1]));
        }
    }
    let mut evaluations = 15 * heap.len();
    let tol = |v: f64| opts.abs_tol.max(opts.rel_tol * v.abs());
    let total = |h: &BinaryHeap<Panel>| {
        let mut ps: Vec<&Panel> = h.iter().collect();
        ps.sort_by(|p, q| p.a.total_cmp(&q.a));
        ps.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = total(&heap);
    while error > tol(value) && heap.len() < opts.max_panels {
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(Panel { error: 0.0, ..worst });
            break;
        }
        heap.push(eval(worst.a, m));
        heap.push(eval(m, worst.b));
        evaluations += 30;
        (value, error) = total(&heap);
    }
    QuadResult { value, error, evaluations, panels: heap.len(), converged: error <= tol(value) }
}

/// Integral of `f` over `[breaks[0], breaks[last]]`, starting from the given
/// panels. Breakpoints must be increasing.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: &QuadOptions) -> QuadResult {
    adapt(breaks, opts, &|a, b| rule(&f, a, b))
}

/// As [`integrate`], evaluating the 15 nodes of each panel on the rayon pool.
/// Worth it when one evaluation of `f` is itself an integral.
pub fn integrate_par<F: Fn(f64) -> f64 + Sync>(f: F, breaks: &[f64], opts: &QuadOptions) -> QuadResult {
    adapt(breaks, opts, &|a, b| rule_par(&f, a, b))
}

/// `[lo, lo + p_1, lo + p_2, ..., hi]` keeping only the offsets inside `(lo, hi)`.
pub fn breakpoints(lo: f64, hi: f64, offsets: &[f64]) -> Vec<f64> {
    let mut v = vec![lo];
    v.extend(offsets.iter().map(|o| lo + o).filter(|x| *x > lo && *x < hi));
    v.push(hi);
    v
}
