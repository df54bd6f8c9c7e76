use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dist::Distribution;
use crate::classes::{StateId, StateSystem};
use crate::error::{Error, Result};
use crate::tree::{poisson, NodeKey};

/// Largest accumulator space for which psi is computed exactly.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Sample count of the Monte Carlo estimate used above the limit.
pub const MC_SAMPLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct PsiConfig {
    pub enumeration_limit: u64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig {
            enumeration_limit: ENUMERATION_LIMIT,
            mc_samples: MC_SAMPLES,
            seed: 1,
        }
    }
}

impl PsiConfig {
    pub fn is_exact(&self, sys: &StateSystem) -> bool {
        sys.acc_space() <= self.enumeration_limit
    }
}

/// Probabilities of `0, .., kappa - 1` and of `>= kappa` under Poisson(`lambda`).
pub fn capped_poisson(lambda: f64, kappa: u32) -> Vec<f64> {
    let kappa = kappa as usize;
    let mut p = Vec::with_capacity(kappa + 1);
    let mut term = (-lambda).exp();
    for u in 0..kappa {
        p.push(term);
        term *= lambda / (u + 1) as f64;
    }
    // For small means the tail is summed directly: the complement would lose
    // all relative precision.
    let tail = if lambda < 1.0 {
        let mut sum = 0.0;
        let mut u = kappa;
        while term > 0.0 && term > sum * 1e-18 {
            sum += term;
            u += 1;
            term *= lambda / u as f64;
        }
        sum
    } else {
        1.0 - p.iter().sum::<f64>()
    };
    p.push(tail.clamp(0.0, 1.0));
    p
}

fn check(sys: &StateSystem, c: f64, x: &Distribution) -> Result<()> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must be a nonnegative real"
        )));
    }
    if x.len() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Root-class distribution when the root has Poisson(`c`) children with
/// classes drawn independently from `x`.
pub fn psi(sys: &StateSystem, c: f64, x: &Distribution) -> Result<Distribution> {
    Ok(psi_with(sys, c, x, &PsiConfig::default())?.0)
}

/// Like [`psi`]; the flag is true when the result is a Monte Carlo estimate.
pub fn psi_with(
    sys: &StateSystem,
    c: f64,
    x: &Distribution,
    cfg: &PsiConfig,
) -> Result<(Distribution, bool)> {
    check(sys, c, x)?;
    if cfg.is_exact(sys) {
        Ok((psi_exact(sys, c, x), false))
    } else {
        Ok((psi_mc(sys, c, x, cfg.mc_samples, cfg.seed), true))
    }
}

/// Distribution over accumulators after processing the states one at a
/// time; each state `j` contributes a capped Poisson(`c x_j`) count.
fn psi_exact(sys: &StateSystem, c: f64, x: &Distribution) -> Distribution {
    let space = sys.acc_space() as usize;
    let kappa = sys.cap().threshold();
    let mut prob = vec![0.0; space];
    prob[sys.acc_empty() as usize] = 1.0;
    let mut next = vec![0.0; space];
    for j in sys.states() {
        let p = capped_poisson(c * x.get(j.0), kappa);
        next.iter_mut().for_each(|v| *v = 0.0);
        for (acc, &w) in prob.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (u, &pu) in p.iter().enumerate() {
                if pu > 0.0 {
                    next[sys.acc_add(acc as u64, j, u as u32) as usize] += w * pu;
                }
            }
        }
        std::mem::swap(&mut prob, &mut next);
    }
    let mut y = vec![0.0; sys.len()];
    for (acc, &w) in prob.iter().enumerate() {
        if w > 0.0 {
            y[sys.acc_finish(acc as u64).0] += w;
        }
    }
    Distribution::from_raw(y.into_iter().map(|v| v.max(0.0)).collect())
}

const MC_CHUNK: usize = 10_000;

fn psi_mc(sys: &StateSystem, c: f64, x: &Distribution, samples: usize, seed: u64) -> Distribution {
    let cdf: Vec<f64> = x
        .weights()
        .iter()
        .scan(0.0, |s, &w| {
            *s += w;
            Some(*s)
        })
        .collect();
    let chunks = samples.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = NodeKey::root(seed, chunk as u64).rng();
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut counts = vec![0u64; sys.len()];
            for _ in 0..n {
                counts[one_root(sys, c, &cdf, &mut rng).0] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; sys.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(a, b)| *a += b);
                a
            },
        );
    Distribution::from_raw(
        counts
            .into_iter()
            .map(|k| k as f64 / samples as f64)
            .collect(),
    )
}

fn one_root(sys: &StateSystem, c: f64, cdf: &[f64], rng: &mut ChaCha8Rng) -> StateId {
    let n = poisson(c, rng);
    let mut acc = sys.acc_empty();
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        let j = cdf.partition_point(|&t| t <= u).min(cdf.len() - 1);
        acc = sys.acc_add(acc, StateId(j), 1);
    }
    sys.acc_finish(acc)
}

/// Monte Carlo estimate of psi with a caller-chosen sample count.
pub fn psi_monte_carlo(
    sys: &StateSystem,
    c: f64,
    x: &Distribution,
    samples: usize,
    seed: u64,
) -> Result<Distribution> {
    check(sys, c, x)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    Ok(psi_mc(sys, c, x, samples, seed))
}
