use std::io::{self, Write};

use rayon::prelude::*;

use super::dist::{tv, Distribution};
use super::psi::{psi_with, PsiConfig};
use crate::classes::{StateSet, StateSystem};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Weight of the uniform distribution mixed into warm starts. A fixed point
/// on the boundary can turn repelling as `c` grows (the dead state of the
/// infinite-tree system at `c = 1`); the nudge lets the iteration leave it.
pub const WARM_START_NUDGE: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Stop once consecutive iterates are closer than this in TV.
    pub tol: f64,
    pub max_iter: usize,
    pub psi: PsiConfig,
    /// Sweeps start each row from the previous fixed point. Without it rows
    /// start from the uniform distribution and run in parallel.
    pub warm_start: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            psi: PsiConfig::default(),
            warm_start: true,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    /// The last iterate.
    pub x: Distribution,
    pub iterations: usize,
    /// TV distance between the last two iterates.
    pub residual_tv: f64,
    pub converged: bool,
    /// Psi was estimated by Monte Carlo.
    pub estimated: bool,
}

/// Iterates psi from `x0` until a step is shorter than `tol` and the step
/// after it is no longer, so that iterates resting near a repelling fixed
/// point are not mistaken for converged. Running out of iterations is
/// reported through `converged`, not as an error.
pub fn iterate_fixed_point(
    sys: &StateSystem,
    c: f64,
    x0: &Distribution,
    opts: &SolveOptions,
) -> Result<FixedPoint> {
    opts.validate()?;
    let mut estimated = false;
    let mut step = |x: &Distribution| -> Result<(Distribution, f64)> {
        let (y, flag) = psi_with(sys, c, x, &opts.psi)?;
        estimated |= flag;
        let d = tv(&y, x)?;
        Ok((y, d))
    };
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut prev = f64::INFINITY;
    while iterations < opts.max_iter {
        let (y, d) = step(&x)?;
        iterations += 1;
        x = y;
        residual = d;
        if prev < opts.tol && d <= prev {
            converged = true;
            break;
        }
        prev = d;
    }
    Ok(FixedPoint {
        x,
        iterations,
        residual_tv: residual,
        converged,
        estimated,
    })
}

/// Total weight of the accepting states.
pub fn f_of_a(accept: &StateSet, x: &Distribution) -> Result<f64> {
    if accept.universe() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: accept.universe(),
        });
    }
    Ok(accept.iter().map(|j| x.get(j.0)).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub fixed_point: Distribution,
    pub f_a: f64,
    pub iterations: usize,
    pub residual_tv: f64,
    pub converged: bool,
    pub estimated: bool,
}

impl SweepRow {
    fn new(c: f64, fp: FixedPoint, accept: &StateSet) -> Result<Self> {
        Ok(SweepRow {
            c,
            f_a: f_of_a(accept, &fp.x)?,
            fixed_point: fp.x,
            iterations: fp.iterations,
            residual_tv: fp.residual_tv,
            converged: fp.converged,
            estimated: fp.estimated,
        })
    }
}

/// `n` points `from + i * step` covering `[from, to]`.
pub fn uniform_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite() && from.is_finite() && to.is_finite() && to >= from) {
        return Err(Error::InvalidParameter(format!(
            "grid from {from} to {to} step {step}"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| from + i as f64 * step).collect())
}

/// Solves at every `c` of a strictly increasing grid.
pub fn sweep(
    sys: &StateSystem,
    accept: &StateSet,
    grid: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<SweepRow>> {
    opts.validate()?;
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "grid must be nonempty and strictly increasing".into(),
        ));
    }
    let start = Distribution::uniform(sys.len());
    if opts.warm_start {
        let mut rows: Vec<SweepRow> = Vec::with_capacity(grid.len());
        let mut x = start;
        for &c in grid {
            let fp = iterate_fixed_point(sys, c, &x, opts)?;
            x = nudge(&fp.x);
            rows.push(SweepRow::new(c, fp, accept)?);
        }
        Ok(rows)
    } else {
        grid.par_iter()
            .map(|&c| SweepRow::new(c, iterate_fixed_point(sys, c, &start, opts)?, accept))
            .collect()
    }
}

fn nudge(x: &Distribution) -> Distribution {
    let u = 1.0 / x.len() as f64;
    Distribution::from_raw(
        x.weights()
            .iter()
            .map(|&w| (1.0 - WARM_START_NUDGE) * w + WARM_START_NUDGE * u)
            .collect(),
    )
}

pub fn sweep_csv_header(sys: &StateSystem) -> String {
    let mut h = String::from("c,iterations,residual_tv,converged");
    for n in sys.names() {
        h.push_str(",x_");
        h.push_str(n);
    }
    h.push_str(",f_A");
    h
}

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sweep_csv<W: Write>(mut w: W, sys: &StateSystem, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{}", sweep_csv_header(sys))?;
    for r in rows {
        write!(
            w,
            "{},{},{},{}",
            fmt_real(r.c),
            r.iterations,
            fmt_real(r.residual_tv),
            r.converged
        )?;
        for &x in r.fixed_point.weights() {
            write!(w, ",{}", fmt_real(x))?;
        }
        writeln!(w, ",{}", fmt_real(r.f_a))?;
    }
    Ok(())
}
