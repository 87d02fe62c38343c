//! Sweeps over the degree: Monte Carlo, quadrature and asymptotic
//! predictions joined into one table, written as CSV and SVG.
//!
//! Plan files are flat UTF-8 `key = value` lines; `#` starts a comment.
//!
//! ```text
//! model = deriv:k=1:kac
//! dist = gaussian, rademacher      # list; default gaussian
//! n = 128, 256, 512                # or: n_grid = 128:1024:4 (geometric)
//! samples = 4000                   # 0 = quadrature only
//! seed = 7
//! d = 0.25                         # optional
//! regions = real, core             # optional; default real
//! quadrature = true                # optional; default false
//! tol = 1e-6                       # quadrature tolerance
//! outputs = table, fig1, fig2, fig3
//! budget_seconds = 3600            # optional wall-clock cap
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::predicted_stats;
use crate::coeff_models::CoefficientModel;
use crate::error::{Error, Result};
use crate::kacrice::{Domain, KacRice};
use crate::montecarlo::{env_threads, run_simulation_in_pool, SimulationConfig};
use crate::regions::{Region, RegionSpec, DEFAULT_D};
use crate::sampling::XiDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Table,
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub model: CoefficientModel,
    pub dists: Vec<XiDistribution>,
    pub n_values: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub d: f64,
    pub regions: Vec<Region>,
    pub quadrature: bool,
    pub tol: f64,
    pub outputs: Vec<Output>,
    pub budget_seconds: Option<f64>,
    /// The plan text as read; embedded in every output.
    pub source: String,
}

fn cfg_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Geometric grid `lo:hi:count`, rounded and deduplicated.
fn geometric_grid(spec: &str) -> Option<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [lo, hi, k] = parts[..] else { return None };
    let (lo, hi, k): (usize, usize, usize) = (lo.parse().ok()?, hi.parse().ok()?, k.parse().ok()?);
    if lo == 0 || hi < lo || k == 0 || (k == 1 && hi != lo) {
        return None;
    }
    if k == 1 {
        return Some(vec![lo]);
    }
    let r = (hi as f64 / lo as f64).ln() / (k - 1) as f64;
    let mut v: Vec<usize> = (0..k).map(|i| (lo as f64 * (r * i as f64).exp()).round() as usize).collect();
    v[k - 1] = hi;
    v.dedup();
    Some(v)
}

impl SweepPlan {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| cfg_err(i + 1, "expected `key = value`"))?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(cfg_err(i + 1, format!("duplicate key `{k}`")));
            }
        }
        const KEYS: [&str; 12] = [
            "model", "dist", "n", "n_grid", "samples", "seed", "d", "regions", "quadrature", "tol", "outputs",
            "budget_seconds",
        ];
        if let Some((k, (l, _))) = kv.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(cfg_err(*l, format!("unknown key `{k}`")));
        }
        let get = |k: &str| kv.get(k).map(|(l, v)| (*l, v.as_str()));
        let need = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key `{k}`")));
        fn num<T: std::str::FromStr>(l: usize, k: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| cfg_err(l, format!("bad value for `{k}`: `{v}`")))
        }

        let (l, v) = need("model")?;
        let model: CoefficientModel = v.parse().map_err(|e| cfg_err(l, e))?;
        let dists = match get("dist") {
            Some((l, v)) => list(v).map(|s| s.parse().map_err(|e| cfg_err(l, e))).collect::<Result<Vec<_>>>()?,
            None => vec![XiDistribution::Gaussian],
        };
        let n_values = match (get("n"), get("n_grid")) {
            (Some(_), Some((l, _))) => return Err(cfg_err(l, "give either `n` or `n_grid`, not both")),
            (Some((l, v)), None) => list(v).map(|s| num::<usize>(l, "n", s)).collect::<Result<Vec<_>>>()?,
            (None, Some((l, v))) => geometric_grid(v).ok_or_else(|| cfg_err(l, format!("bad grid `{v}`")))?,
            (None, None) => return Err(Error::Config("missing key `n` or `n_grid`".into())),
        };
        let (l, v) = need("samples")?;
        let samples: u64 = num(l, "samples", v)?;
        let (l, v) = need("seed")?;
        let seed: u64 = num(l, "seed", v)?;
        let d = match get("d") {
            Some((l, v)) => num(l, "d", v)?,
            None => DEFAULT_D,
        };
        let regions = match get("regions") {
            Some((l, v)) => list(v).map(|s| s.parse().map_err(|e| cfg_err(l, e))).collect::<Result<Vec<_>>>()?,
            None => vec![Region::Real],
        };
        let quadrature = match get("quadrature") {
            Some((l, v)) => num(l, "quadrature", v)?,
            None => false,
        };
        let tol = match get("tol") {
            Some((l, v)) => num(l, "tol", v)?,
            None => 1e-6,
        };
        let outputs = match get("outputs") {
            Some((l, v)) => list(v)
                .map(|s| match s {
                    "table" => Ok(Output::Table),
                    "fig1" => Ok(Output::Fig1),
                    "fig2" => Ok(Output::Fig2),
                    "fig3" => Ok(Output::Fig3),
                    o => Err(cfg_err(l, format!("unknown output `{o}`"))),
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![Output::Table],
        };
        let budget_seconds = match get("budget_seconds") {
            Some((l, v)) => Some(num(l, "budget_seconds", v)?),
            None => None,
        };
        let plan = SweepPlan {
            model,
            dists,
            n_values,
            samples,
            seed,
            d,
            regions,
            quadrature,
            tol,
            outputs,
            budget_seconds,
            source: text.to_string(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_values.is_empty() || self.dists.is_empty() || self.regions.is_empty() {
            return bad("n, dist and regions must be nonempty".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n grid must be strictly increasing: {:?}", self.n_values));
        }
        for &n in &self.n_values {
            let degree = n
                .checked_sub(self.model.degree_reduction())
                .ok_or_else(|| Error::Config(format!("n = {n} is below the derivative order")))?;
            if let Err(e) = RegionSpec::new(degree, self.d) {
                return bad(format!("n = {n}: {e}"));
            }
        }
        if self.samples == 1 {
            return bad("samples must be 0 or at least 2".into());
        }
        if self.samples == 0 && !self.quadrature {
            return bad("nothing to do: samples = 0 and quadrature = false".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if let Some(b) = self.budget_seconds {
            if !(b > 0.0) {
                return bad(format!("budget_seconds must be positive, got {b}"));
            }
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.source.as_bytes()))
    }

    /// Seed of the Monte Carlo stream for one sweep point; all randomness
    /// derives from the plan seed.
    pub fn point_seed(&self, dist_index: usize, n: usize) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update((dist_index as u64).to_le_bytes());
        h.update((n as u64).to_le_bytes());
        u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
    }
}

/// One row per (distribution, n, region). Monte Carlo columns are empty
/// when `samples = 0`, quadrature columns when quadrature is off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dist: String,
    pub n: usize,
    pub degree: usize,
    pub region: String,
    pub seed: u64,
    pub samples: u64,
    pub mc_mean: Option<f64>,
    pub mc_variance: Option<f64>,
    pub mc_se_mean: Option<f64>,
    pub mc_se_variance: Option<f64>,
    pub mc_var_ci_lo: Option<f64>,
    pub mc_var_ci_hi: Option<f64>,
    pub quad_mean: Option<f64>,
    pub quad_mean_err: Option<f64>,
    pub quad_variance: Option<f64>,
    pub quad_variance_err: Option<f64>,
    pub predicted_mean_slope: Option<f64>,
    pub predicted_var_slope: Option<f64>,
    /// Variance (Monte Carlo if present, else quadrature) over `log n`.
    pub var_over_log_n: Option<f64>,
    /// Variance minus `predicted_var_slope * log n`.
    pub residual: Option<f64>,
}

pub const COLUMNS: [&str; 20] = [
    "dist",
    "n",
    "degree",
    "region",
    "seed",
    "samples",
    "mc_mean",
    "mc_variance",
    "mc_se_mean",
    "mc_se_variance",
    "mc_var_ci_lo",
    "mc_var_ci_hi",
    "quad_mean",
    "quad_mean_err",
    "quad_variance",
    "quad_variance_err",
    "predicted_mean_slope",
    "predicted_var_slope",
    "var_over_log_n",
    "residual",
];

impl SweepRow {
    /// Numeric column by name; `Ok(None)` for an empty cell.
    pub fn column(&self, name: &str) -> Result<Option<f64>> {
        Ok(match name {
            "n" => Some(self.n as f64),
            "degree" => Some(self.degree as f64),
            "seed" => Some(self.seed as f64),
            "samples" => Some(self.samples as f64),
            "mc_mean" => self.mc_mean,
            "mc_variance" => self.mc_variance,
            "mc_se_mean" => self.mc_se_mean,
            "mc_se_variance" => self.mc_se_variance,
            "mc_var_ci_lo" => self.mc_var_ci_lo,
            "mc_var_ci_hi" => self.mc_var_ci_hi,
            "quad_mean" => self.quad_mean,
            "quad_mean_err" => self.quad_mean_err,
            "quad_variance" => self.quad_variance,
            "quad_variance_err" => self.quad_variance_err,
            "predicted_mean_slope" => self.predicted_mean_slope,
            "predicted_var_slope" => self.predicted_var_slope,
            "var_over_log_n" => self.var_over_log_n,
            "residual" => self.residual,
            "" => return Err(Error::UnknownColumn("(empty)".into())),
            other => return Err(Error::UnknownColumn(other.into())),
        })
    }
}

/// Asymptotic `(mean, variance)` slopes in `log n` for one region.
pub fn predicted_slopes(tau: f64, region: Region) -> Result<(f64, f64)> {
    let s = predicted_stats(tau)?;
    let inner_mean = (2.0 * tau + 1.0).sqrt() / (2.0 * std::f64::consts::PI);
    let outer_mean = 1.0 / (2.0 * std::f64::consts::PI);
    Ok(match region {
        Region::Real | Region::Core => (s.mean_slope, s.var_slope_total),
        Region::Inner | Region::NegInner => (inner_mean, s.var_slope_inner),
        Region::Outer | Region::NegOuter => (outer_mean, s.var_slope_outer),
        Region::Rest => (0.0, 0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares of `ys` on `xs` (the `log n` values).
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("xs and ys differ in length".into()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {}", xs.len())));
    }
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let spread = xs.iter().fold(0.0f64, |a, x| a.max((x - xbar).abs()));
    if !(sxx > 0.0) || spread <= 1e-12 * xbar.abs().max(1.0) {
        return Err(Error::InvalidArgument("degenerate xs: all values equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals = xs.iter().zip(ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(SlopeFit { slope, intercept, residuals })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub dist: String,
    pub region: String,
    /// `mc` or `quad`.
    pub source: String,
    pub fit: SlopeFit,
    pub predicted: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub plan: SweepPlan,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<FitRow>,
    pub wall_seconds: f64,
}

struct QuadPoint {
    mean: (f64, f64),
    var: (f64, f64),
}

enum Job {
    Quad { n: usize },
    Mc { dist: usize, n: usize },
}

enum JobOut {
    Quad(Vec<QuadPoint>),
    Mc(crate::montecarlo::SimulationResult),
}

fn check_budget(plan: &SweepPlan, start: &Instant) -> Result<()> {
    match plan.budget_seconds {
        Some(b) if start.elapsed().as_secs_f64() > b => {
            Err(Error::BudgetExceeded(format!("wall-clock budget of {b} s used up")))
        }
        _ => Ok(()),
    }
}

fn quadrature_point(plan: &SweepPlan, n: usize) -> Result<Vec<QuadPoint>> {
    let c = plan.model.build(n)?;
    let kr = KacRice::with_d(&c.values, plan.d)?;
    plan.regions
        .iter()
        .map(|r| {
            let dom = Domain::Region(*r);
            let e = kr.expectation(&dom, plan.tol)?;
            let v = kr.variance(&dom, plan.tol)?;
            Ok(QuadPoint { mean: (e.value, e.error), var: (v.value, v.error) })
        })
        .collect()
}

/// Runs every sweep point (in parallel, capped by `ROOTVAR_THREADS`) and
/// assembles the table in plan order.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = env_threads() {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| sweep_in_pool(plan))
}

fn sweep_in_pool(plan: &SweepPlan) -> Result<SweepResult> {
    let start = Instant::now();
    let mut jobs = Vec::new();
    if plan.quadrature {
        jobs.extend(plan.n_values.iter().map(|&n| Job::Quad { n }));
    }
    if plan.samples > 0 {
        for dist in 0..plan.dists.len() {
            jobs.extend(plan.n_values.iter().map(|&n| Job::Mc { dist, n }));
        }
    }
    let outs: Vec<Result<JobOut>> = jobs
        .par_iter()
        .map(|job| {
            check_budget(plan, &start)?;
            match *job {
                Job::Quad { n } => quadrature_point(plan, n).map(JobOut::Quad),
                Job::Mc { dist, n } => {
                    let mut cfg = SimulationConfig::new(
                        plan.model.clone(),
                        n,
                        plan.dists[dist],
                        plan.samples,
                        plan.point_seed(dist, n),
                    )
                    .with_regions(&plan.regions);
                    cfg.d = plan.d;
                    run_simulation_in_pool(&cfg).map(JobOut::Mc)
                }
            }
        })
        .collect();
    let outs = outs.into_iter().collect::<Result<Vec<_>>>()?;
    check_budget(plan, &start)?;

    let mut quad: BTreeMap<usize, Vec<QuadPoint>> = BTreeMap::new();
    let mut mc = BTreeMap::new();
    for (job, out) in jobs.iter().zip(outs) {
        match (job, out) {
            (Job::Quad { n }, JobOut::Quad(q)) => {
                quad.insert(*n, q);
            }
            (Job::Mc { dist, n }, JobOut::Mc(r)) => {
                mc.insert((*dist, *n), r);
            }
            _ => unreachable!("job and output kinds match"),
        }
    }

    let tau = plan.model.declared_tau();
    let dist_labels: Vec<(usize, String)> = if plan.samples > 0 {
        plan.dists.iter().enumerate().map(|(i, d)| (i, d.name().to_string())).collect()
    } else {
        vec![(0, "none".to_string())]
    };
    let mut rows = Vec::new();
    for (di, label) in &dist_labels {
        for &n in &plan.n_values {
            let degree = n - plan.model.degree_reduction();
            for (ri, region) in plan.regions.iter().enumerate() {
                let pred = tau.map(|t| predicted_slopes(t, *region)).transpose()?;
                let s = mc.get(&(*di, n)).and_then(|r| r.get(*region));
                let q = quad.get(&n).map(|v| &v[ri]);
                let variance = s.map(|s| s.variance).or(q.map(|q| q.var.0));
                let ln = (n as f64).ln();
                rows.push(SweepRow {
                    dist: label.clone(),
                    n,
                    degree,
                    region: region.name().to_string(),
                    seed: if plan.samples > 0 { plan.point_seed(*di, n) } else { plan.seed },
                    samples: plan.samples,
                    mc_mean: s.map(|s| s.mean),
                    mc_variance: s.map(|s| s.variance),
                    mc_se_mean: s.map(|s| s.se_mean),
                    mc_se_variance: s.map(|s| s.se_variance),
                    mc_var_ci_lo: s.and_then(|s| s.var_ci.map(|c| c.0)),
                    mc_var_ci_hi: s.and_then(|s| s.var_ci.map(|c| c.1)),
                    quad_mean: q.map(|q| q.mean.0),
                    quad_mean_err: q.map(|q| q.mean.1),
                    quad_variance: q.map(|q| q.var.0),
                    quad_variance_err: q.map(|q| q.var.1),
                    predicted_mean_slope: pred.map(|p| p.0),
                    predicted_var_slope: pred.map(|p| p.1),
                    var_over_log_n: variance.map(|v| v / ln),
                    residual: variance.zip(pred).map(|(v, p)| v - p.1 * ln),
                });
            }
        }
    }
    let fits = fits(plan, &rows)?;
    Ok(SweepResult { plan: plan.clone(), rows, fits, wall_seconds: start.elapsed().as_secs_f64() })
}

fn fits(plan: &SweepPlan, rows: &[SweepRow]) -> Result<Vec<FitRow>> {
    let mut out = Vec::new();
    if plan.n_values.len() < 3 {
        return Ok(out);
    }
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let k = (r.dist.clone(), r.region.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    for (dist, region) in keys {
        let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.dist == dist && r.region == region).collect();
        for (source, col) in [("mc", "mc_variance"), ("quad", "quad_variance")] {
            let pts: Vec<(f64, f64)> = sel
                .iter()
                .filter_map(|r| r.column(col).ok().flatten().map(|v| ((r.n as f64).ln(), v)))
                .collect();
            if pts.len() < 3 {
                continue;
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            out.push(FitRow {
                dist: dist.clone(),
                region: region.clone(),
                source: source.into(),
                fit: fit_slope(&xs, &ys)?,
                predicted: sel[0].predicted_var_slope.unwrap_or(f64::NAN),
            });
        }
    }
    Ok(out)
}

impl SweepResult {
    /// Provenance header: tool version, plan hash, seed, fits and the plan
    /// itself, all as `#` comment lines.
    pub fn header(&self) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "# rootvar {}", crate::VERSION);
        let _ = writeln!(h, "# plan_sha256 = {}", self.plan.hash());
        let _ = writeln!(h, "# seed = {}", self.plan.seed);
        for f in &self.fits {
            let _ = writeln!(
                h,
                "# fit {} {} {}: slope = {} intercept = {} predicted = {}",
                f.dist, f.region, f.source, f.fit.slope, f.fit.intercept, f.predicted
            );
        }
        let _ = writeln!(h, "# plan:");
        for l in self.plan.source.lines() {
            let _ = writeln!(h, "#   {l}");
        }
        h
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = self.header();
        out.push_str(&rows_to_csv(&self.rows)?);
        Ok(out)
    }

    /// Writes `results.csv` and the requested figures into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<String>> {
        fs::create_dir_all(dir)?;
        let mut written = vec!["results.csv".to_string()];
        fs::write(dir.join("results.csv"), self.to_csv()?)?;
        let region = self.plan.regions[0].name();
        for o in &self.plan.outputs {
            let (name, spec) = match o {
                Output::Table => continue,
                Output::Fig1 => {
                    let col = if self.plan.samples > 0 { "mc_variance" } else { "quad_variance" };
                    ("fig1.svg", PlotSpec::new(col, region, "variance vs n"))
                }
                Output::Fig2 => ("fig2.svg", PlotSpec::new("var_over_log_n", region, "variance / log n")),
                Output::Fig3 => ("fig3.svg", PlotSpec::new("residual", region, "variance - C log n")),
            };
            let svg = emit_svg(&self.rows, &spec)?;
            let mut svg = svg;
            // the plan travels with every artifact
            let plan = self.plan.source.replace("--", "- -");
            svg.push_str(&format!("<!-- plan_sha256 {}\n{}-->\n", self.plan.hash(), plan));
            fs::write(dir.join(name), svg)?;
            written.push(name.to_string());
        }
        Ok(written)
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a table written by [`SweepResult::to_csv`]; comment lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub column: String,
    pub region: String,
    pub title: String,
}

impl PlotSpec {
    pub fn new(column: &str, region: &str, title: &str) -> Self {
        PlotSpec { column: column.into(), region: region.into(), title: title.into() }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const W: f64 = 640.0;
const H: f64 = 400.0;
const ML: f64 = 70.0;
const MR: f64 = 130.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

/// Plots `spec.column` against `n` (log scale) for the rows of one region,
/// one polyline per distribution. Fixed canvas, no timestamps: the same
/// table always gives the same bytes.
pub fn emit_svg(rows: &[SweepRow], spec: &PlotSpec) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("empty table".into()));
    }
    rows[0].column(&spec.column)?;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in rows.iter().filter(|r| r.region == spec.region) {
        let Some(v) = r.column(&spec.column)? else { continue };
        if !v.is_finite() {
            continue;
        }
        match series.iter_mut().find(|(d, _)| *d == r.dist) {
            Some((_, pts)) => pts.push(((r.n as f64).ln(), v)),
            None => series.push((r.dist.clone(), vec![((r.n as f64).ln(), v)])),
        }
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let (x0, x1) = span(all.iter().map(|p| p.0));
    let (y0, y1) = span(all.iter().map(|p| p.1));
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" font-size="14" text-anchor="middle">{} ({})</text>"#, (W - MR + ML) / 2.0, esc(&spec.title), esc(&spec.region));
    let _ = writeln!(
        s,
        r#"<path d="M{ML} {MT} L{ML} {:.2} L{:.2} {:.2}" fill="none" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    );
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let x = sx((n as f64).ln());
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, H - MB, H - MB + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#, H - MB + 16.0);
    }
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{ML}" y2="{y:.2}" stroke="black"/>"#, ML - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, ML - 6.0, y + 4.0, tick(v));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n (log scale)</text>"#, (W - MR + ML) / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#, H / 2.0, H / 2.0, esc(&spec.column));
    for (i, (dist, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(*x), sy(*y));
        }
        let ly = MT + 14.0 + 16.0 * i as f64;
        let lx = W - MR + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 22.0, ly + 4.0, esc(dist));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn span(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
