use std::fmt;

use rand::Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::error::{Error, Result};

/// Weights below this are treated as rounding noise and clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-14;

/// Allowed deviation of the total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A point of the probability simplex over the states of a system.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        for w in &mut weights {
            if !w.is_finite() || *w < -NEGATIVE_SLACK {
                return Err(Error::InvalidDistribution(format!("weight {w}")));
            }
            *w = w.max(0.0);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Distribution(weights))
    }

    /// Skips validation; for outputs of maps known to preserve the simplex.
    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Distribution(weights)
    }

    pub fn uniform(m: usize) -> Self {
        Distribution(vec![1.0 / m as f64; m])
    }

    pub fn vertex(m: usize, j: usize) -> Self {
        let mut w = vec![0.0; m];
        w[j] = 1.0;
        Distribution(w)
    }

    /// Uniform on the simplex: normalized independent exponentials.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = e.iter().sum();
        Distribution(e.into_iter().map(|v: f64| v / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.0
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

/// Total variation distance, half the L1 distance.
pub fn tv(x: &Distribution, y: &Distribution) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(0.5
        * x.0
            .iter()
            .zip(&y.0)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}
