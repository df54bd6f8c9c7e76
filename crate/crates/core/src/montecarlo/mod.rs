//! Simulation of truncated Galton-Watson trees and the set-propagation
//! bounds they give on acceptance probabilities.

mod coupling;
mod estimate;
mod propagate;

pub use coupling::{coupled_pair, CoupledPair};
pub use estimate::{
    estimate_interval, fold_with_frontier, rapid_determination_curve, universality_fraction,
    write_simulate_csv, EstimateOptions, IntervalEstimate, SIMULATE_CSV_HEADER,
};
pub use propagate::{possible_values, PossibleValues, Propagator, DEFAULT_SET_LIMIT, MAX_DEPTH};
