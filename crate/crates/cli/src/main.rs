use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use rootvar::asymptotics::{predicted_stats_tol, shape_table};
use rootvar::experiments::{run_sweep, SweepPlan};
use rootvar::kacrice::{Domain, KacRice};
use rootvar::montecarlo::{env_threads, run_simulation, SimulationConfig};
use rootvar::regions::DEFAULT_D;
use rootvar::rootcount::{count_roots_exact, parse_exact, sturm, Endpoint, IntPoly};
use rootvar::sampling::XiDistribution;
use rootvar::{CoefficientModel, Error, Region, RegionSpec};

#[derive(Parser)]
#[command(name = "rootvar", version, about = "Real roots of generalized Kac random polynomials")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    Mean,
    Var,
    Cov,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMethod {
    Descartes,
    Sturm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the coefficient conditions (A2 and OV) of a model at degree n.
    CheckConditions {
        #[arg(long)]
        model: CoefficientModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_D)]
        d: f64,
    },
    /// Count the distinct real roots of a polynomial in a closed interval.
    Count {
        /// One coefficient per line (decimal, p/q or hex-float), lowest degree first.
        #[arg(long)]
        poly: PathBuf,
        /// `lo,hi`; either end may be `-inf`/`inf`.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long, value_enum, default_value_t = CountMethod::Descartes)]
        method: CountMethod,
    },
    /// Monte Carlo mean and variance of the number of real roots.
    Simulate {
        #[arg(long)]
        model: CoefficientModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "gaussian")]
        dist: XiDistribution,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_D)]
        d: f64,
        /// Comma-separated regions; default: every region when the bands exist, else `real`.
        #[arg(long)]
        regions: Option<String>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kac-Rice quadrature of the mean, variance or covariance of the root count.
    Kacrice {
        #[arg(long)]
        model: CoefficientModel,
        #[arg(long)]
        n: usize,
        /// Region name or `lo,hi`.
        #[arg(long, allow_hyphen_values = true)]
        region: Domain,
        /// Second domain for `--stat cov`.
        #[arg(long, allow_hyphen_values = true)]
        with: Option<Domain>,
        #[arg(long, value_enum)]
        stat: Stat,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_D)]
        d: f64,
    },
    /// Limiting constants for a given tau; optionally a table of the shape functions.
    Asymptotics {
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// `u0,u1,steps`: print the grid as CSV instead.
        #[arg(long)]
        table: Option<String>,
    },
    /// Run a plan of simulations and quadratures over n.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::InvalidModel(_) | Error::InvalidArgument(_) => 2,
        Error::DegenerateRegion { .. } | Error::OverlappingRegions(..) | Error::UnknownColumn(_) => 2,
        Error::BudgetExceeded(_) | Error::ToleranceNotMet { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = env_threads() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli.cmd) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rootvar: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Cmd) -> rootvar::Result<String> {
    match cmd {
        Cmd::CheckConditions { model, n, d } => {
            let r = model.check_conditions(n, d)?;
            let v = serde_json::to_value(&r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let mut s = format!("model: \"{model}\"\n");
            for (k, v) in v.as_object().expect("report is a struct") {
                let _ = writeln!(s, "{k}: {v}");
            }
            Ok(s)
        }
        Cmd::Count { poly, interval, method } => count(&poly, &interval, method),
        Cmd::Simulate { model, n, dist, samples, seed, d, regions, out } => {
            let regions: Vec<Region> = match regions {
                Some(r) => r.split(',').map(str::parse).collect::<rootvar::Result<_>>()?,
                None => {
                    let degree = model.build(n)?.degree;
                    if RegionSpec::new(degree, d).is_ok() {
                        Region::ALL.to_vec()
                    } else {
                        vec![Region::Real]
                    }
                }
            };
            let mut cfg = SimulationConfig::new(model, n, dist, samples, seed).with_regions(&regions);
            cfg.d = d;
            let res = run_simulation(&cfg)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["region", "n", "samples", "mean", "variance", "se_mean", "var_ci_lo", "var_ci_hi", "seed"])?;
            for s in &res.stats {
                let (lo, hi) = s.var_ci.map_or((String::new(), String::new()), |c| (c.0.to_string(), c.1.to_string()));
                w.write_record([
                    s.region.name().to_string(),
                    n.to_string(),
                    s.samples.to_string(),
                    s.mean.to_string(),
                    s.variance.to_string(),
                    s.se_mean.to_string(),
                    lo,
                    hi,
                    seed.to_string(),
                ])?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                .expect("csv output is utf-8");
            match out {
                Some(p) => {
                    fs::write(&p, &text)?;
                    Ok(format!("wrote {} ({} rows, {:.1} s)\n", p.display(), res.stats.len(), res.wall_seconds))
                }
                None => Ok(text),
            }
        }
        Cmd::Kacrice { model, n, region, with, stat, tol, d } => {
            let c = model.build(n)?;
            let kr = KacRice::with_d(&c.values, d)?;
            let r = match (stat, with) {
                (Stat::Mean, _) => kr.expectation(&region, tol)?,
                (Stat::Var, _) => kr.variance(&region, tol)?,
                (Stat::Cov, Some(b)) => kr.covariance(&region, &b, tol)?,
                (Stat::Cov, None) => return Err(Error::InvalidArgument("--stat cov needs --with <domain>".into())),
            };
            Ok(format!(
                "model = {model}\nn = {n}\ndegree = {}\ndomain = {region}\nvalue = {}\nerror = {:e}\npanels = {}\nevaluations = {}\n",
                c.degree, r.value, r.error, r.panels, r.evaluations
            ))
        }
        Cmd::Asymptotics { tau, tol, table } => match table {
            Some(t) => {
                let parts: Vec<&str> = t.split(',').map(str::trim).collect();
                let [u0, u1, steps] = parts[..] else {
                    return Err(Error::Parse(format!("--table wants u0,u1,steps, got `{t}`")));
                };
                let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
                let steps: usize = steps.parse().map_err(|_| Error::Parse(format!("bad step count `{steps}`")))?;
                let rows = shape_table(tau, num(u0)?, num(u1)?, steps)?;
                let mut s = String::from("u,delta,sigma,f\n");
                for r in rows {
                    let _ = writeln!(s, "{},{},{},{}", r.u, r.delta, r.sigma, r.f);
                }
                Ok(s)
            }
            None => {
                let a = predicted_stats_tol(tau, tol)?;
                Ok(format!(
                    "tau = {}\nkappa = {}\nkappa_error = {:e}\nmean_slope = {}\nvar_slope_total = {}\nvar_slope_inner = {}\nvar_slope_outer = {}\nmaslova_slope = {}\n",
                    a.tau, a.kappa, a.kappa_error, a.mean_slope, a.var_slope_total, a.var_slope_inner, a.var_slope_outer, a.maslova_slope
                ))
            }
        },
        Cmd::Sweep { plan, out } => {
            let text = fs::read_to_string(&plan).map_err(|e| Error::Config(format!("{}: {e}", plan.display())))?;
            let plan = SweepPlan::parse(&text)?;
            let res = run_sweep(&plan)?;
            let files = res.write(&out)?;
            let mut s = format!("wrote {} in {:.1} s:", out.display(), res.wall_seconds);
            for f in files {
                let _ = write!(s, " {f}");
            }
            s.push('\n');
            for f in &res.fits {
                let _ = writeln!(
                    s,
                    "fit {} {} {}: slope {:.6} (predicted {:.6})",
                    f.dist, f.region, f.source, f.fit.slope, f.predicted
                );
            }
            Ok(s)
        }
    }
}

fn endpoint(s: &str) -> rootvar::Result<Endpoint> {
    Ok(match s.trim() {
        "inf" | "+inf" => Endpoint::PosInf,
        "-inf" => Endpoint::NegInf,
        t => Endpoint::Finite(parse_exact(t)?),
    })
}

fn count(path: &PathBuf, interval: &str, method: CountMethod) -> rootvar::Result<String> {
    let text = fs::read_to_string(path)?;
    let coeffs: Vec<BigRational> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_exact)
        .collect::<rootvar::Result<_>>()?;
    let p = IntPoly::from_rationals(&coeffs);
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (lo, hi) = interval
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("--interval wants lo,hi, got `{interval}`")))?;
    let (lo, hi) = (endpoint(lo)?, endpoint(hi)?);
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty interval `{interval}`")));
    }
    let lo_closed = matches!(lo, Endpoint::Finite(_));
    let hi_closed = matches!(hi, Endpoint::Finite(_));
    let (n, label) = match method {
        CountMethod::Descartes => (count_roots_exact(&p, &lo, lo_closed, &hi, hi_closed)?.count, "descartes"),
        CountMethod::Sturm => (sturm::sturm_count(&p, &lo, lo_closed, &hi, hi_closed)?, "sturm"),
    };
    Ok(format!("degree = {}\ninterval = {interval}\ncount = {n}\nmethod = {label}\n", p.degree()))
}
