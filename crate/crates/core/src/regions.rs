//! The bands near `+-1` where almost all real roots live.
//!
//! With `d_n = exp(log(n)^(d/4))`, `a_n = 1/d_n` and `b_n = d_n/n`, the inner
//! band is `I_n = [1 - a_n, 1 - b_n]`. The four bands are `I_n`, `-I_n`, and
//! their images under `x -> 1/x`. Together they form the core region.
//!
//! All four bands are described by one band `[alpha, beta)` in a local
//! coordinate `y in (0, 1)`: `x = y`, `x = -y`, `x = 1/y` and `x = -1/y`.
//! `alpha` and `beta` are the rounded doubles of `1 - a_n` and `1 - b_n`; they
//! are used as exact dyadic endpoints everywhere, so the outer bands are exactly
//! the reciprocal images of the inner ones and the four bands are disjoint.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_D: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `I_n`
    Inner,
    /// `-I_n`
    NegInner,
    /// `I_n^{-1}`
    Outer,
    /// `-I_n^{-1}`
    NegOuter,
    /// Union of the four bands.
    Core,
    /// The real line minus the core region.
    Rest,
    Real,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::Inner,
        Region::NegInner,
        Region::Outer,
        Region::NegOuter,
        Region::Core,
        Region::Rest,
        Region::Real,
    ];

    pub const BANDS: [Region; 4] = [Region::Inner, Region::NegInner, Region::Outer, Region::NegOuter];

    pub fn name(self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::NegInner => "neg_inner",
            Region::Outer => "outer",
            Region::NegOuter => "neg_outer",
            Region::Core => "core",
            Region::Rest => "rest",
            Region::Real => "real",
        }
    }

    /// Whether the two regions share no points.
    pub fn disjoint(self, other: Region) -> bool {
        use Region::*;
        if self == other {
            return false;
        }
        match (self, other) {
            (Real, _) | (_, Real) => false,
            (Core, Rest) | (Rest, Core) => true,
            (Core, _) | (_, Core) => false,
            (Rest, _) | (_, Rest) => false,
            _ => true,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "inner" | "I_n" => Region::Inner,
            "neg_inner" | "-I_n" => Region::NegInner,
            "outer" | "I_n^-1" => Region::Outer,
            "neg_outer" | "-I_n^-1" => Region::NegOuter,
            "core" => Region::Core,
            "rest" => Region::Rest,
            "real" | "R" => Region::Real,
            other => return Err(Error::Parse(format!("unknown region `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSpec {
    pub n: usize,
    pub d: f64,
    pub d_n: f64,
    pub a_n: f64,
    pub b_n: f64,
    /// `1 - a_n`, the lower band edge in local coordinates.
    pub alpha: f64,
    /// `1 - b_n`, the upper band edge in local coordinates.
    pub beta: f64,
}

impl RegionSpec {
    pub fn new(n: usize, d: f64) -> Result<Self> {
        let d_n = Self::d_n_for(n, d)?;
        let a_n = 1.0 / d_n;
        let b_n = d_n / n as f64;
        let (alpha, beta) = (1.0 - a_n, 1.0 - b_n);
        if !(alpha < beta) {
            return Err(Error::DegenerateRegion { n, d });
        }
        Ok(RegionSpec { n, d, d_n, a_n, b_n, alpha, beta })
    }

    pub fn with_default_d(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_D)
    }

    pub fn d_n_for(n: usize, d: f64) -> Result<f64> {
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::InvalidArgument(format!("d must lie in (0, 1/2), got {d}")));
        }
        if n < 3 {
            return Err(Error::DegenerateRegion { n, d });
        }
        Ok((n as f64).ln().powf(d / 4.0).exp())
    }

    pub fn a_n_for(n: usize, d: f64) -> Result<f64> {
        Ok(1.0 / Self::d_n_for(n, d)?)
    }

    /// Smallest degree for which `I_n` is nonempty.
    pub fn min_degree(d: f64) -> Result<usize> {
        let mut n = 3;
        while Self::new(n, d).is_err() {
            Self::d_n_for(n, d)?;
            n += 1;
        }
        Ok(n)
    }

    /// Closed x-interval covered by a band (`None` for composite regions).
    pub fn band_interval(&self, region: Region) -> Option<(f64, f64)> {
        let (a, b) = (self.alpha, self.beta);
        match region {
            Region::Inner => Some((a, b)),
            Region::NegInner => Some((-b, -a)),
            Region::Outer => Some((1.0 / b, 1.0 / a)),
            Region::NegOuter => Some((-1.0 / a, -1.0 / b)),
            _ => None,
        }
    }

    /// Whether `x` lies in a region, using the local-coordinate convention
    /// `y in [alpha, beta)`.
    pub fn contains(&self, region: Region, x: f64) -> bool {
        let in_band = |y: f64| y >= self.alpha && y < self.beta;
        match region {
            Region::Inner => x > 0.0 && x < 1.0 && in_band(x),
            Region::NegInner => x < 0.0 && x > -1.0 && in_band(-x),
            Region::Outer => x > 1.0 && in_band(1.0 / x),
            Region::NegOuter => x < -1.0 && in_band(-1.0 / x),
            Region::Core => Region::BANDS.iter().any(|r| self.contains(*r, x)),
            Region::Rest => !self.contains(Region::Core, x),
            Region::Real => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_degree() {
        assert!(RegionSpec::new(8, 0.25).is_err());
        assert!(RegionSpec::new(16, 0.25).is_ok());
        let m = RegionSpec::min_degree(0.25).unwrap();
        assert!(RegionSpec::new(m, 0.25).is_ok());
        assert!(RegionSpec::new(m - 1, 0.25).is_err());
    }

    #[test]
    fn band_values() {
        let r = RegionSpec::new(10_000, 0.25).unwrap();
        let d_n = (10_000f64).ln().powf(0.0625).exp();
        assert!((r.d_n - d_n).abs() < 1e-15);
        assert!((r.alpha - (1.0 - 1.0 / d_n)).abs() < 1e-15);
        assert!((r.beta - (1.0 - d_n / 1e4)).abs() < 1e-15);
        assert!(RegionSpec::new(100, 0.5).is_err());
    }

    #[test]
    fn membership_partitions() {
        let r = RegionSpec::new(1000, 0.25).unwrap();
        for i in -400..400 {
            let x = i as f64 * 0.0137;
            let hits = Region::BANDS.iter().filter(|b| r.contains(**b, x)).count();
            assert!(hits <= 1);
            assert_eq!(r.contains(Region::Core, x), hits == 1);
        }
    }

    #[test]
    fn disjointness() {
        assert!(Region::Inner.disjoint(Region::Outer));
        assert!(!Region::Inner.disjoint(Region::Core));
        assert!(Region::Core.disjoint(Region::Rest));
        assert!(!Region::Real.disjoint(Region::Inner));
    }

    #[test]
    fn names_round_trip() {
        for r in Region::ALL {
            assert_eq!(r.name().parse::<Region>().unwrap(), r);
        }
    }
}
