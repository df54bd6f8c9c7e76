use std::io::{self, Write};

use rayon::prelude::*;

use super::propagate::{PossibleValues, Propagator, DEFAULT_SET_LIMIT};
use crate::classes::{StateId, StateSet, StateSystem};
use crate::error::{Error, Result};
use crate::solver::fmt_real;
use crate::tree::{GwSampler, SampleOutcome, DEFAULT_MAX_NODES};

#[derive(Clone, Copy, Debug)]
pub struct EstimateOptions {
    /// Widening threshold for a node's reach set.
    pub set_limit: usize,
    /// Nodes read per sample before failing with a budget error.
    pub max_nodes: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            set_limit: DEFAULT_SET_LIMIT,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Bounds on `P(root class in A)` from samples truncated at depth `depth`.
///
/// `lower` counts samples whose every possible class accepts, `upper` those
/// with some accepting possible class.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalEstimate {
    pub c: f64,
    pub depth: usize,
    pub samples: usize,
    pub lower_count: usize,
    pub upper_count: usize,
    pub undetermined_count: usize,
    pub over_approx_count: usize,
    pub lower: f64,
    pub upper: f64,
    pub undetermined_fraction: f64,
    pub over_approx_fraction: f64,
}

#[derive(Clone, Copy, Default)]
struct Tally {
    lower: usize,
    upper: usize,
    undetermined: usize,
    over: usize,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            lower: self.lower + o.lower,
            upper: self.upper + o.upper,
            undetermined: self.undetermined + o.undetermined,
            over: self.over + o.over,
        }
    }

    fn of(pv: &PossibleValues, accept: &StateSet) -> Tally {
        Tally {
            lower: pv.states.is_subset(accept) as usize,
            upper: pv.states.intersects(accept) as usize,
            undetermined: (pv.states.len() > 1) as usize,
            over: pv.over_approx as usize,
        }
    }
}

fn check_accept(sys: &StateSystem, accept: &StateSet) -> Result<()> {
    if accept.universe() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            got: accept.universe(),
        });
    }
    Ok(())
}

/// Interval estimate from `n` samples. Sample `i` depends only on
/// `(seed, i)`, so the result does not depend on the thread count.
pub fn estimate_interval(
    sys: &StateSystem,
    accept: &StateSet,
    c: f64,
    s: usize,
    n: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<IntervalEstimate> {
    check_accept(sys, accept)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be positive".into(),
        ));
    }
    let sampler = GwSampler::new(c, seed)?;
    let prop = Propagator::new(sys, s, opts.set_limit)?;
    let t = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            Ok(Tally::of(
                &prop.evaluate(&sampler, i, opts.max_nodes)?,
                accept,
            ))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;
    let f = |k: usize| k as f64 / n as f64;
    Ok(IntervalEstimate {
        c,
        depth: s,
        samples: n,
        lower_count: t.lower,
        upper_count: t.upper,
        undetermined_count: t.undetermined,
        over_approx_count: t.over,
        lower: f(t.lower),
        upper: f(t.upper),
        undetermined_fraction: f(t.undetermined),
        over_approx_fraction: f(t.over),
    })
}

/// Fraction of samples whose root class is not yet determined, for each
/// depth. Every depth reuses the same trees.
pub fn rapid_determination_curve(
    sys: &StateSystem,
    c: f64,
    depths: &[usize],
    n: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<Vec<(usize, f64)>> {
    let all = sys.all_states();
    depths
        .iter()
        .map(|&s| {
            Ok((
                s,
                estimate_interval(sys, &all, c, s, n, seed, opts)?.undetermined_fraction,
            ))
        })
        .collect()
}

/// Fraction of samples whose root class is determined at depth `s`.
pub fn universality_fraction(
    sys: &StateSystem,
    c: f64,
    s: usize,
    n: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<f64> {
    let est = estimate_interval(sys, &sys.all_states(), c, s, n, seed, opts)?;
    Ok(1.0 - est.undetermined_fraction)
}

/// Folds the recursion over a truncated sample with frontier node
/// `sample.frontier[i]` given class `label(i)`.
pub fn fold_with_frontier(
    sys: &StateSystem,
    sample: &SampleOutcome,
    mut label: impl FnMut(usize) -> StateId,
) -> StateId {
    let t = &sample.tree;
    let mut state: Vec<Option<StateId>> = vec![None; t.len()];
    for (i, &v) in sample.frontier.iter().enumerate() {
        state[v] = Some(label(i));
    }
    for v in t.bfs_order().into_iter().rev() {
        if state[v].is_some() {
            continue;
        }
        let acc = t.children(v).iter().fold(sys.acc_empty(), |acc, &c| {
            sys.acc_add(acc, state[c].expect("children first"), 1)
        });
        state[v] = Some(sys.acc_finish(acc));
    }
    state[t.root()].expect("root state")
}

pub const SIMULATE_CSV_HEADER: &str =
    "c,s,n,lower,upper,undetermined_fraction,over_approx_fraction";

pub fn write_simulate_csv<W: Write>(mut w: W, rows: &[IntervalEstimate]) -> io::Result<()> {
    writeln!(w, "{SIMULATE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_real(r.c),
            r.depth,
            r.samples,
            fmt_real(r.lower),
            fmt_real(r.upper),
            fmt_real(r.undetermined_fraction),
            fmt_real(r.over_approx_fraction)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::bundled;

    #[test]
    fn zero_mean_is_fully_determined() {
        let sys = bundled::example2();
        let est =
            estimate_interval(&sys, sys.accept(), 0.0, 10, 1000, 1, &Default::default()).unwrap();
        assert_eq!(est.undetermined_fraction, 0.0);
        assert_eq!(est.lower, est.upper);
        // A lone root does not satisfy the example-2 property.
        assert_eq!(est.upper, 0.0);
        assert_eq!(
            universality_fraction(&sys, 0.0, 3, 100, 1, &Default::default()).unwrap(),
            1.0
        );
    }

    #[test]
    fn depth_zero_knows_nothing() {
        let sys = bundled::example1();
        let est =
            estimate_interval(&sys, sys.accept(), 1.0, 0, 100, 1, &Default::default()).unwrap();
        assert_eq!(
            (est.lower, est.upper, est.undetermined_fraction),
            (0.0, 1.0, 1.0)
        );
    }

    #[test]
    fn csv_row() {
        let sys = bundled::example1();
        let est =
            estimate_interval(&sys, sys.accept(), 1.0, 4, 50, 2, &Default::default()).unwrap();
        let mut out = Vec::new();
        write_simulate_csv(&mut out, &[est]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SIMULATE_CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..3], &["1.0000000000000000e0", "4", "50"]);
    }

    #[test]
    fn accept_dimension_checked() {
        let sys = bundled::example1();
        let err = estimate_interval(
            &sys,
            &StateSet::empty(3),
            1.0,
            2,
            10,
            1,
            &Default::default(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
