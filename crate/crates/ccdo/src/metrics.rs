//! Modified-offline-error aggregates and the solution-set quality score.
//!
//! Errors are measured against per-environment calibrations: a feasible
//! best contributes its gap to the best feasible value; when no feasible
//! solution is known the worst-to-best feasible gap is charged instead.

use crate::error::{CcdoError, Result};
use crate::g24::Calibration;
use crate::problem::{compare_solutions, DcopProblem, EnvVector, Evaluation};
use crate::coevolution::SolutionSet;

/// Granularity of an error trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSource {
    PerFe,
    PerGen,
}

/// Best-feasible-error trace, one entry per evaluation or per generation.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTrace {
    pub values: Vec<f64>,
    pub source: TraceSource,
}

impl ErrorTrace {
    pub fn per_fe(values: Vec<f64>) -> Self {
        Self {
            values,
            source: TraceSource::PerFe,
        }
    }

    pub fn per_gen(values: Vec<f64>) -> Self {
        Self {
            values,
            source: TraceSource::PerGen,
        }
    }
}

/// Modified offline error: the arithmetic mean of the trace.
pub fn e_mo(trace: &ErrorTrace) -> Result<f64> {
    if trace.values.is_empty() {
        return Err(CcdoError::EmptyTrace);
    }
    Ok(trace.values.iter().sum::<f64>() / trace.values.len() as f64)
}

/// Error charged for one environment: the gap between the best feasible
/// solution found and the calibrated best, or the calibrated worst-to-best
/// gap when nothing feasible was found. Calibration defects (a found value
/// beating the calibrated best) surface as negative results by design.
pub fn error_at(best_feasible_found: Option<&Evaluation>, cal: &Calibration) -> f64 {
    match best_feasible_found {
        Some(ev) => {
            debug_assert!(ev.feasible, "error_at expects a feasible evaluation");
            ev.objective - cal.best
        }
        None => cal.worst - cal.best,
    }
}

/// Mean error of the set's best member across a sample of environments
/// (`envs` and `cals` are index-aligned). Evaluations here are measurement,
/// not search, and are never charged to a budget.
pub fn set_quality(
    set: &SolutionSet,
    envs: &[EnvVector],
    cals: &[Calibration],
    problem: &DcopProblem,
) -> f64 {
    assert_eq!(envs.len(), cals.len());
    assert!(!envs.is_empty());
    let mut total = 0.0;
    for (env, cal) in envs.iter().zip(cals) {
        let mut best: Option<Evaluation> = None;
        for x in &set.members {
            let ev = problem.evaluate(x, env, None);
            if best
                .as_ref()
                .map_or(true, |b| compare_solutions(&ev, b) == std::cmp::Ordering::Less)
            {
                best = Some(ev);
            }
        }
        let best = best.expect("non-empty set");
        let found = if best.feasible { Some(&best) } else { None };
        total += error_at(found, cal);
    }
    total / envs.len() as f64
}
