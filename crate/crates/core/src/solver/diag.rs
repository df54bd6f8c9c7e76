use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dist::{tv, Distribution};
use super::fixed::{iterate_fixed_point, SolveOptions, SweepRow};
use super::psi::{psi_with, PsiConfig};
use crate::classes::StateSystem;
use crate::error::{Error, Result};

/// Relative slack when matching grid points.
const GRID_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Differences {
    pub c: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneSided {
    pub c: f64,
    pub left: f64,
    pub right: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeReport {
    pub h: f64,
    /// Central differences of `f_A` at interior grid points.
    pub interior: Vec<Differences>,
    pub breakpoint: Option<OneSided>,
}

/// Finite differences of `f_A` over a uniform grid of step `h`, with
/// one-sided slopes at `breakpoint` if given.
pub fn derivative_report(
    rows: &[SweepRow],
    h: f64,
    breakpoint: Option<f64>,
) -> Result<DerivativeReport> {
    if rows.len() < 3 {
        return Err(Error::GridTooShort {
            needed: 3,
            got: rows.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step h = {h}")));
    }
    if rows
        .windows(2)
        .any(|w| ((w[1].c - w[0].c) - h).abs() > GRID_SLACK * h)
    {
        return Err(Error::NonUniformGrid(h));
    }
    let f: Vec<f64> = rows.iter().map(|r| r.f_a).collect();
    let interior = (1..rows.len() - 1)
        .map(|i| Differences {
            c: rows[i].c,
            first: (f[i + 1] - f[i - 1]) / (2.0 * h),
            second: (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h),
        })
        .collect();
    let breakpoint = match breakpoint {
        None => None,
        Some(b) => {
            let i = (1..rows.len() - 1)
                .find(|&i| (rows[i].c - b).abs() <= GRID_SLACK * h)
                .ok_or(Error::BreakpointNotOnGrid(b))?;
            Some(OneSided {
                c: rows[i].c,
                left: (f[i] - f[i - 1]) / h,
                right: (f[i + 1] - f[i]) / h,
            })
        }
    };
    Ok(DerivativeReport {
        h,
        interior,
        breakpoint,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    /// Largest `tv(psi^s x, psi^s y) / tv(x, y)` seen.
    pub max_ratio: f64,
    pub evaluated: usize,
    /// Pairs at distance zero.
    pub skipped: usize,
}

fn psi_power(sys: &StateSystem, c: f64, x: &Distribution, s: usize) -> Result<Distribution> {
    let cfg = PsiConfig::default();
    let mut x = x.clone();
    for _ in 0..s {
        x = psi_with(sys, c, &x, &cfg)?.0;
    }
    Ok(x)
}

/// Applies psi `s` times to `pairs` random pairs plus `extra` and reports
/// the largest distance ratio. Needs exact psi.
pub fn contraction_probe(
    sys: &StateSystem,
    c: f64,
    s: usize,
    pairs: usize,
    seed: u64,
    extra: &[(Distribution, Distribution)],
) -> Result<ContractionReport> {
    if !PsiConfig::default().is_exact(sys) {
        return Err(Error::McFallbackActive);
    }
    if s == 0 {
        return Err(Error::InvalidParameter("power s must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sys.len();
    let mut all: Vec<(Distribution, Distribution)> = (0..pairs)
        .map(|_| {
            (
                Distribution::random(m, &mut rng),
                Distribution::random(m, &mut rng),
            )
        })
        .collect();
    all.extend(extra.iter().cloned());
    let ratios = all
        .par_iter()
        .map(|(x, y)| {
            let d = tv(x, y)?;
            if d == 0.0 {
                return Ok(None);
            }
            let (px, py) = (psi_power(sys, c, x, s)?, psi_power(sys, c, y, s)?);
            Ok(Some(tv(&px, &py)? / d))
        })
        .collect::<Result<Vec<Option<f64>>>>()?;
    let evaluated: Vec<f64> = ratios.iter().flatten().copied().collect();
    if evaluated.is_empty() {
        return Err(Error::InvalidParameter(
            "every pair is at distance zero".into(),
        ));
    }
    Ok(ContractionReport {
        max_ratio: evaluated.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        evaluated: evaluated.len(),
        skipped: ratios.len() - evaluated.len(),
    })
}

/// Points closer than this in TV count as the same fixed point.
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    /// Largest TV distance between two converged runs.
    pub max_pairwise_tv: f64,
    pub converged: usize,
    pub runs: usize,
    /// Distinct limits, each the first converged run of its cluster.
    pub clusters: Vec<Distribution>,
}

impl UniquenessReport {
    pub fn unique(&self, tol: f64) -> bool {
        self.max_pairwise_tv < tol
    }
}

/// Solves from `starts` initial points: the simplex vertices first, then
/// uniform random points.
pub fn multi_start_uniqueness(
    sys: &StateSystem,
    c: f64,
    starts: usize,
    opts: &SolveOptions,
    seed: u64,
) -> Result<UniquenessReport> {
    if starts < 2 {
        return Err(Error::InvalidParameter("need at least 2 starts".into()));
    }
    let m = sys.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Distribution> = (0..starts)
        .map(|i| {
            if i < m {
                Distribution::vertex(m, i)
            } else {
                Distribution::random(m, &mut rng)
            }
        })
        .collect();
    let results = points
        .par_iter()
        .map(|x0| iterate_fixed_point(sys, c, x0, opts))
        .collect::<Result<Vec<_>>>()?;
    let limits: Vec<&Distribution> = results
        .iter()
        .filter(|r| r.converged)
        .map(|r| &r.x)
        .collect();
    if limits.is_empty() {
        return Err(Error::AllRunsDiverged);
    }
    let mut max = 0.0f64;
    for (i, a) in limits.iter().enumerate() {
        for b in &limits[..i] {
            max = max.max(tv(a, b)?);
        }
    }
    let mut clusters: Vec<Distribution> = Vec::new();
    for x in &limits {
        if clusters
            .iter()
            .all(|c| tv(c, x).unwrap_or(1.0) >= CLUSTER_RADIUS)
        {
            clusters.push((*x).clone());
        }
    }
    Ok(UniquenessReport {
        max_pairwise_tv: max,
        converged: limits.len(),
        runs: results.len(),
        clusters,
    })
}
