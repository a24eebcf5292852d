//! Coupled simulation of the normalized Quicksort comparison count `Y_n` and its
//! almost-sure limit `Y`, with exact oracles and closed forms to check it against.
//!
//! * [`oracle`]: direct Quicksort counts and exact enumeration for small `n`.
//! * [`formulas`]: harmonic numbers, `mu(n)`, the toll functions, `sigma^2(n)`.
//! * [`tree`] and [`coupling`]: the random search tree embedding, the truncated
//!   limit series and the pathwise recurrences.
//! * [`stats`]: streaming moments and Kolmogorov–Smirnov distances.
//! * [`experiments`]: batch runs behind the `qslab` command line tool.

pub mod coupling;
pub mod error;
pub mod experiments;
pub mod formulas;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod tree;

pub use coupling::{
    coefficient_error, coefficients, decomposition_residuals, default_delta, extend_and_truncate,
    martingale_step_residual, perturbation_b, resample_fixed_point, sample_coupled,
    sample_coupled_with, sample_limit, CouplingOutcome, Residuals, TailCompletion,
};
pub use error::{Error, Result};
pub use formulas::ExactValues;
pub use oracle::{enumerate_exact, partition, quicksort_comparisons, ExactDistribution};
pub use rng::{substream, MasterSeed, UniformSource, UniformStream};
pub use stats::{EmpiricalCdf, MomentAccumulator};
pub use tree::{FringeSlot, RootSide, SearchTree};
