//! The map psi on the simplex of class distributions and its fixed points.

mod diag;
mod dist;
mod fixed;
mod psi;

pub use diag::{
    contraction_probe, derivative_report, multi_start_uniqueness, ContractionReport,
    DerivativeReport, Differences, OneSided, UniquenessReport, CLUSTER_RADIUS,
};
pub use dist::{tv, Distribution, MASS_TOLERANCE, NEGATIVE_SLACK};
pub use fixed::{
    f_of_a, fmt_real, iterate_fixed_point, sweep, sweep_csv_header, uniform_grid, write_sweep_csv,
    FixedPoint, SolveOptions, SweepRow, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use psi::{
    capped_poisson, psi, psi_monte_carlo, psi_with, PsiConfig, ENUMERATION_LIMIT, MC_SAMPLES,
};
