//! Distribution-free, non-asymptotic concentration bounds for randomized
//! functions of bounded variation, with the Kolmogorov–Smirnov style tests
//! they support for clustered samples and Lipschitz-in-time processes.
//!
//! * [`bounds`]: the denominator `L(x)`, one-sided shift `S(x)`, tail bounds
//!   and their inversions.
//! * [`coefficients`]: McDiarmid and downward-variation coefficients.
//! * [`empirical`]: step CDFs, exact sup distances, trajectory panels.
//! * [`hypothesis`]: the tests themselves.
//! * [`montecarlo`]: exact enumeration and simulation checks.
//! * [`cli`]: command-line front end.

pub mod bounds;
pub mod cli;
pub mod coefficients;
pub mod empirical;
pub mod error;
pub mod hypothesis;
pub mod montecarlo;
pub mod numeric;

pub use bounds::{
    critical_statistic, denominator, entropy_exact_expfamily, one_sided_shift, residual,
    residual_star, tail_bound, BoundParams, TailSide,
};
pub use coefficients::{ClusterSpec, RangeSpec};
pub use empirical::{ClusteredSample, StepCdf, TrajectoryPanel};
pub use error::{Error, Result};
pub use hypothesis::{KsOutcome, TimeMode};
pub use montecarlo::{SimConfig, SimReport, SimRow};
