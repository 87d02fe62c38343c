//! Reproducible realizations of `P_n(x) = sum_j xi_j c_j x^j`.
//!
//! Randomness is counter-based: `xi_j` of sample `i` under master seed `s` is
//! read from ChaCha8 keyed by `s`, stream `i`, at word offset `4j`. Any
//! coefficient of any sample can be regenerated on its own, so results do not
//! depend on how samples are spread over threads.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff_models::CoefficientModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiDistribution {
    Gaussian,
    Rademacher,
    /// Uniform on `[-sqrt 3, sqrt 3)`.
    Uniform,
}

impl XiDistribution {
    pub const ALL: [XiDistribution; 3] = [Self::Gaussian, Self::Rademacher, Self::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
        }
    }

    /// Every supported law has moments of all orders.
    pub fn moment_exponent_ok(self) -> bool {
        true
    }

    /// One draw from two independent 64-bit words.
    fn from_words(self, w1: u64, w2: u64) -> f64 {
        match self {
            Self::Gaussian => {
                // Box-Muller; u1 in (0, 1], u2 in [0, 1)
                let u1 = ((w1 >> 11) + 1) as f64 * TWO_M53;
                let u2 = (w2 >> 11) as f64 * TWO_M53;
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            }
            Self::Rademacher => {
                if w1 >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Uniform => 3f64.sqrt() * (2.0 * (w1 >> 11) as f64 * TWO_M53 - 1.0),
        }
    }
}

const TWO_M53: f64 = 1.0 / (1u64 << 53) as f64;

impl fmt::Display for XiDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for XiDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "rademacher" | "sign" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
        }
    }
}

fn stream(master_seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(sample_index);
    rng
}

/// `xi_j` for one `(seed, sample, j)` triple.
pub fn xi(dist: XiDistribution, master_seed: u64, sample_index: u64, j: usize) -> f64 {
    let mut rng = stream(master_seed, sample_index);
    rng.set_word_pos(4 * j as u128);
    let (w1, w2) = (rng.next_u64(), rng.next_u64());
    dist.from_words(w1, w2)
}

/// `xi_0 .. xi_{len-1}` of one sample, identical to calling [`xi`] per index.
pub fn xi_vector(dist: XiDistribution, master_seed: u64, sample_index: u64, len: usize) -> Vec<f64> {
    let mut rng = stream(master_seed, sample_index);
    (0..len)
        .map(|_| {
            let (w1, w2) = (rng.next_u64(), rng.next_u64());
            dist.from_words(w1, w2)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub model: String,
    pub n: usize,
    pub master_seed: u64,
    pub sample_index: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPolynomial {
    /// `xi_j c_j` rounded to double; these doubles are the exact coefficients.
    pub coeffs: Vec<f64>,
    pub degree: usize,
    pub provenance: Provenance,
}

/// Coefficients `xi_j c_j` for a prebuilt coefficient vector.
pub fn sample_coefficients(c: &[f64], dist: XiDistribution, master_seed: u64, sample_index: u64) -> Vec<f64> {
    xi_vector(dist, master_seed, sample_index, c.len())
        .into_iter()
        .zip(c)
        .map(|(x, c)| x * c)
        .collect()
}

pub fn sample_polynomial(
    model: &CoefficientModel,
    n: usize,
    dist: XiDistribution,
    master_seed: u64,
    sample_index: u64,
) -> Result<SampledPolynomial> {
    let c = model.build(n)?;
    Ok(SampledPolynomial {
        coeffs: sample_coefficients(&c.values, dist, master_seed, sample_index),
        degree: c.degree,
        provenance: Provenance { model: model.to_string(), n, master_seed, sample_index },
    })
}
