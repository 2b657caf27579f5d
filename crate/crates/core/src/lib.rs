//! Counting, component statistics and variance bounds for random assemblies.
//!
//! An assembly class is described by its component weights
//! `lambda_j = g_j / j!`. From these the crate computes
//!
//! * the partition-weighted sums `Q(n)` and the restricted sums `Q^{j}(n)`,
//!   `Q^{i,j}(n)` ([`counting`]),
//! * laws of the component counts `k_j` and the mean and variance of additive
//!   functions, together with the two Turán–Kubilius-type bounds and their
//!   ratios ([`moments`]),
//! * checks of the logarithmic growth conditions ([`registry`]),
//! * brute-force references ([`oracle`]) and a conditioned-Poisson sampler
//!   ([`sampler`]).
//!
//! Every engine runs either in exact rational arithmetic (`BigRational`) or
//! in floating point scaled by `rho^n` (`f64`).

pub mod additive;
pub mod counting;
pub mod error;
pub mod moments;
pub mod number;
pub mod oracle;
pub mod registry;
pub mod sampler;

pub use num_rational::BigRational;

pub use additive::{AdditiveFunction, Family, FunctionKind};
pub use counting::{
    g_of_n, q_excl_table, q_table, ClassScalar, QTable, TableCache, TableMode, Tables,
};
pub use error::{Error, Result};
pub use moments::{
    comp_count_pmf, mean_additive, tk_ratio_sweep, tk_rhs_complete, tk_rhs_general,
    variance_additive, MomentEngine, MomentReport, SpectrumPmf, SweepDocument, SweepSummary,
};
pub use number::{Real, Scalar};
pub use registry::{
    builtin_class, check_condition, class_from_config, suggest_constants, AssemblyClass,
    ClassConfig, ConditionId, ConditionVerdict, WeaklyLogParams,
};
