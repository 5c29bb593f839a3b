//! Numerical experiments: approximate-solution families and their residue,
//! non-uniform dependence sweeps, peakon checks, time-Taylor series,
//! dependence probes and exponent fitting.

mod approx;
mod dependence;
mod fit;
mod nonuniform;
mod peakon;
mod steep;
mod taylor;
mod verdict;

pub use approx::{
    alpha_exponent, approximate_solution, beta_exponent, residue_by_terms, residue_field,
    ApproxSolutionSpec, Branch,
};
pub use dependence::{dependence_probe, DependenceReport};
pub use fit::{fit_decay_exponent, DecayFit};
pub use nonuniform::{nonuniform_experiment, NonuniformConfig, NonuniformReport, NonuniformRow};
pub use peakon::{
    crest_position, peakon_propagation, peakon_residual, periodized_peakon, PeakonRun,
    CREST_EXCLUSION,
};
pub use steep::{steep_data_run, SteepRun};
pub use taylor::{es_norm, spatial_derivatives, taylor_time_series, TaylorSeries};
pub use verdict::{Check, Verdict};
