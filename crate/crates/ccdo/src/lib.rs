//! Set-oriented optimization for dynamic constrained problems.
//!
//! The crate implements a two-phase method: an offline competitive
//! coevolution between a solution set and an adversarial population of
//! environments, followed by an online phase that restarts budgeted local
//! search from the archived set whenever a change is detected. The dynamic
//! G24 benchmark family, modified-offline-error metrics and a reproducible
//! experiment harness round out the toolkit.
//!
//! Modules:
//! - [`problem`]: decision/environment vectors, evaluation semantics and
//!   the function-evaluation budget clock.
//! - [`g24`]: the nine dynamic G24 variants, change schedules and
//!   per-environment best/worst calibration.
//! - [`coevolution`]: offline set search (solution population vs
//!   environment population).
//! - [`local_search`]: budgeted descent and Gaussian improvement steps.
//! - [`online`]: the online optimization loop with change detection.
//! - [`metrics`]: modified offline error and solution-set quality.
//! - [`harness`]: experiment driver, statistics and CSV emission.

pub mod coevolution;
pub mod error;
pub mod g24;
pub mod harness;
pub mod local_search;
pub mod metrics;
pub mod online;
pub mod problem;

pub use error::{CcdoError, Result};
pub use g24::{make_schedule, make_variant, problem_from_name, VariantId};
pub use problem::{compare_solutions, DcopProblem, EnvVector, Evaluation, SolutionVector};
