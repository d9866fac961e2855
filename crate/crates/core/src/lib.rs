//! Rested bandits whose expected losses decay as `alpha / tau^rho + beta`
//! in the pull count `tau`.
//!
//! * [`env`] holds ground-truth instances and the seeded sampling state.
//! * [`estimation`] turns an arm's loss history into `(alpha, beta)`
//!   estimates and confidence widths.
//! * [`policies`] implements explore-then-commit, REST-SURE and two
//!   baselines against a pull-only handle.
//! * [`theory`] computes exploration-length bounds and their regret values.
//! * [`harness`] scores outcomes, runs seeded Monte Carlo experiments and
//!   writes CSV and SVG output.

pub mod env;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod policies;
pub mod theory;

pub use env::{ArmSpec, BanditInstance, EnvState, NoiseModel, PullHandle};
pub use error::{BanditError, Result};
pub use estimation::{ArmSamples, BoundConstants, Estimator, ParamEstimate, SplitEstimate};

pub use harness::{regret, AggregateStats, ExperimentConfig, RunRecord};
pub use policies::{run_policy, CommitReason, PolicyKind, PolicyOutcome};
pub use theory::{BoundKind, BoundReport, Witness};
