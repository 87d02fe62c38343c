//! Monte Carlo estimates of the mean and variance of real-root counts.
//!
//! Samples are processed in fixed-size blocks; each block owns one
//! accumulator per region and blocks are merged in ascending order, so the
//! result is bit-identical for any number of worker threads.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::coeff_models::CoefficientModel;
use crate::error::{Error, Result};
use crate::regions::{Region, RegionSpec, DEFAULT_D};
use crate::rootcount::{count_regions, count_roots, RealInterval};
use crate::sampling::{sample_coefficients, XiDistribution};

pub const DEFAULT_BLOCK: u64 = 256;

/// Streaming count, mean and central moments up to order four, mergeable
/// with the pairwise update formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for MomentAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl MomentAccumulator {
    pub fn new() -> Self {
        MomentAccumulator {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            m3: 0.0,
            m4: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&mut self, o: &MomentAccumulator) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3 + o.m3 + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.count += o.count;
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64).max(0.0)
    }

    pub fn se_mean(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    /// Large-sample standard error of the sample variance,
    /// `sqrt((mu4 - sigma^4 (N-3)/(N-1)) / N)`.
    pub fn se_variance(&self) -> f64 {
        if self.count < 4 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let s2 = self.variance();
        let mu4 = self.m4 / n;
        ((mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

/// Normal-approximation interval `Var +- z Var sqrt(2/(N-1))`. This is the
/// Gaussian fourth-moment formula and is only approximate for counts.
pub fn variance_ci(acc: &MomentAccumulator, level: f64) -> Result<(f64, f64)> {
    if acc.count < 30 {
        return Err(Error::InvalidArgument(format!(
            "variance interval needs at least 30 samples, got {}",
            acc.count
        )));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("level must lie in [0, 1), got {level}")));
    }
    let v = acc.variance();
    if level == 0.0 {
        return Ok((v, v));
    }
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.5 + level / 2.0);
    let h = z * v * (2.0 / (acc.count - 1) as f64).sqrt();
    Ok((v - h, v + h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    #[serde(serialize_with = "display")]
    pub model: CoefficientModel,
    pub n: usize,
    pub dist: XiDistribution,
    pub d: f64,
    pub sample_count: u64,
    pub master_seed: u64,
    pub regions: Vec<Region>,
    pub block_size: u64,
    pub ci_level: f64,
}

fn display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl SimulationConfig {
    pub fn new(model: CoefficientModel, n: usize, dist: XiDistribution, sample_count: u64, master_seed: u64) -> Self {
        SimulationConfig {
            model,
            n,
            dist,
            d: DEFAULT_D,
            sample_count,
            master_seed,
            regions: vec![Region::Real],
            block_size: DEFAULT_BLOCK,
            ci_level: 0.95,
        }
    }

    pub fn with_regions(mut self, regions: &[Region]) -> Self {
        self.regions = regions.to_vec();
        self
    }

    fn needs_bands(&self) -> bool {
        self.regions.iter().any(|r| *r != Region::Real)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionStats {
    pub region: Region,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub var_ci: Option<(f64, f64)>,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub stats: Vec<RegionStats>,
    pub accumulators: BTreeMap<Region, MomentAccumulator>,
    /// Samples whose polynomial had a repeated factor.
    pub non_squarefree: u64,
    /// Samples that needed big-integer arithmetic.
    pub exact_fallbacks: u64,
    pub wall_seconds: f64,
}

impl SimulationResult {
    pub fn get(&self, r: Region) -> Option<&RegionStats> {
        self.stats.iter().find(|s| s.region == r)
    }
}

#[derive(Debug, Clone)]
struct Block {
    acc: Vec<MomentAccumulator>,
    non_squarefree: u64,
    exact_fallbacks: u64,
}

fn run_block(cfg: &SimulationConfig, c: &[f64], spec: Option<&RegionSpec>, block: u64) -> Result<Block> {
    let lo = block * cfg.block_size;
    let hi = (lo + cfg.block_size).min(cfg.sample_count);
    let mut out = Block {
        acc: vec![MomentAccumulator::new(); cfg.regions.len()],
        non_squarefree: 0,
        exact_fallbacks: 0,
    };
    for idx in lo..hi {
        let p = sample_coefficients(c, cfg.dist, cfg.master_seed, idx);
        match spec {
            Some(spec) => {
                let rc = count_regions(&p, spec)?;
                debug_assert_eq!(rc.get(Region::Core), rc.inner + rc.neg_inner + rc.outer + rc.neg_outer);
                out.non_squarefree += u64::from(!rc.squarefree);
                out.exact_fallbacks += u64::from(rc.exact_fallback);
                for (a, r) in out.acc.iter_mut().zip(&cfg.regions) {
                    a.push(rc.get(*r) as f64);
                }
            }
            None => {
                let rc = count_roots(&p, &RealInterval::real())?;
                out.non_squarefree += u64::from(!rc.squarefree);
                for a in out.acc.iter_mut() {
                    a.push(rc.count as f64);
                }
            }
        }
    }
    Ok(out)
}

/// Worker count from `ROOTVAR_THREADS`, if set.
pub fn env_threads() -> Option<usize> {
    std::env::var("ROOTVAR_THREADS").ok()?.trim().parse().ok().filter(|t| *t > 0)
}

pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult> {
    run_simulation_with_threads(cfg, env_threads())
}

pub fn run_simulation_with_threads(cfg: &SimulationConfig, threads: Option<usize>) -> Result<SimulationResult> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| run_simulation_in_pool(cfg))
}

/// As [`run_simulation`], on whatever rayon pool the caller is running in.
pub fn run_simulation_in_pool(cfg: &SimulationConfig) -> Result<SimulationResult> {
    if cfg.sample_count < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if cfg.block_size == 0 || cfg.regions.is_empty() {
        return Err(Error::InvalidArgument("block size and region list must be nonempty".into()));
    }
    let start = Instant::now();
    let c = cfg.model.build(cfg.n)?;
    let spec = if cfg.needs_bands() { Some(RegionSpec::new(c.degree, cfg.d)?) } else { None };
    let blocks = cfg.sample_count.div_ceil(cfg.block_size);
    let results: Vec<Result<Block>> =
        (0..blocks).into_par_iter().map(|b| run_block(cfg, &c.values, spec.as_ref(), b)).collect();
    let mut acc = vec![MomentAccumulator::new(); cfg.regions.len()];
    let (mut nsf, mut fb) = (0, 0);
    for r in results {
        let b = r?;
        for (a, x) in acc.iter_mut().zip(&b.acc) {
            a.merge(x);
        }
        nsf += b.non_squarefree;
        fb += b.exact_fallbacks;
    }
    let stats = cfg
        .regions
        .iter()
        .zip(&acc)
        .map(|(r, a)| RegionStats {
            region: *r,
            samples: a.count,
            mean: a.mean,
            variance: a.variance(),
            se_mean: a.se_mean(),
            se_variance: a.se_variance(),
            var_ci: variance_ci(a, cfg.ci_level).ok(),
            min: a.min,
            max: a.max,
        })
        .collect();
    Ok(SimulationResult {
        config: cfg.clone(),
        stats,
        accumulators: cfg.regions.iter().copied().zip(acc).collect(),
        non_squarefree: nsf,
        exact_fallbacks: fb,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
