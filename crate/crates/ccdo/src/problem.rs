//! Core abstractions for dynamic constrained optimization problems:
//! decision/environment vectors, evaluation semantics with feasibility-first
//! comparison, and the function-evaluation budget clock shared by all
//! optimizer components.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use rand::Rng;

/// Axis-aligned box bounds for a real vector space.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "bound dimension mismatch");
        assert!(
            lo.iter().zip(&hi).all(|(l, h)| l <= h),
            "lower bound exceeds upper bound"
        );
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lower(&self, c: usize) -> f64 {
        self.lo[c]
    }

    pub fn upper(&self, c: usize) -> f64 {
        self.hi[c]
    }

    pub fn range(&self, c: usize) -> f64 {
        self.hi[c] - self.lo[c]
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dim()
            && v.iter()
                .enumerate()
                .all(|(c, &x)| x >= self.lo[c] && x <= self.hi[c])
    }

    /// Clamps every coordinate into the box.
    pub fn clamp(&self, v: &mut [f64]) {
        for (c, x) in v.iter_mut().enumerate() {
            *x = x.clamp(self.lo[c], self.hi[c]);
        }
    }

    /// Uniform sample from the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim())
            .map(|c| rng.gen_range(self.lo[c]..=self.hi[c]))
            .collect()
    }
}

/// A point in decision space.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionVector {
    pub coords: Vec<f64>,
}

impl SolutionVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean distance in decision space.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for SolutionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A point in environment-parameter space; one concrete instance of a
/// dynamic problem.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvVector {
    pub params: Vec<f64>,
}

impl EnvVector {
    pub fn new(params: Vec<f64>) -> Self {
        Self { params }
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }
}

impl fmt::Display for EnvVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Result of evaluating a solution under one environment.
///
/// `violation` is the sum of positive parts of the inequality constraint
/// values; a point is feasible exactly when that sum is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub constraint_values: Vec<f64>,
    pub violation: f64,
    pub feasible: bool,
}

impl Evaluation {
    pub fn from_parts(objective: f64, constraint_values: Vec<f64>) -> Self {
        let violation: f64 = constraint_values.iter().map(|g| g.max(0.0)).sum();
        let feasible = violation == 0.0;
        Self {
            objective,
            constraint_values,
            violation,
            feasible,
        }
    }

    /// Scalar used after the feasibility class in comparisons: objective for
    /// feasible points, violation sum otherwise.
    pub fn score(&self) -> f64 {
        if self.feasible {
            self.objective
        } else {
            self.violation
        }
    }

    /// True when objective and every constraint value agree within `tol`.
    /// With `tol == 0` this is an exact comparison.
    pub fn same_outcome(&self, other: &Self, tol: f64) -> bool {
        if self.constraint_values.len() != other.constraint_values.len() {
            return false;
        }
        (self.objective - other.objective).abs() <= tol
            && self
                .constraint_values
                .iter()
                .zip(&other.constraint_values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Feasibility-first ordering: a feasible point beats any infeasible one,
/// two feasible points compare by objective (lower is better), two
/// infeasible points compare by violation sum (lower is better).
///
/// `Ordering::Less` means the first argument is preferred, so sorting with
/// this comparator puts the best evaluation first.
pub fn compare_solutions(a: &Evaluation, b: &Evaluation) -> Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a.objective.total_cmp(&b.objective),
        (false, false) => a.violation.total_cmp(&b.violation),
    }
}

/// Counts objective-function evaluations against a change schedule.
///
/// Every evaluator call made with a clock attached increments the counter by
/// exactly one; the current environment index is `total / change_frequency`
/// capped at `num_changes - 1`.
#[derive(Debug)]
pub struct FeBudgetClock {
    total: AtomicU64,
    change_frequency: u64,
    num_changes: u64,
}

impl FeBudgetClock {
    pub fn new(change_frequency: u64, num_changes: u64) -> Self {
        assert!(change_frequency > 0, "change frequency must be positive");
        assert!(num_changes > 0, "number of changes must be positive");
        Self {
            total: AtomicU64::new(0),
            change_frequency,
            num_changes,
        }
    }

    /// A clock used purely to count evaluations, with no meaningful
    /// schedule attached (offline phases).
    pub fn counter_only() -> Self {
        Self::new(u64::MAX, 1)
    }

    pub fn change_frequency(&self) -> u64 {
        self.change_frequency
    }

    pub fn num_changes(&self) -> u64 {
        self.num_changes
    }

    /// Records one evaluation; returns the new total.
    pub fn tick(&self) -> u64 {
        self.total.fetch_add(1, AtomicOrdering::Relaxed) + 1
    }

    pub fn total_fes(&self) -> u64 {
        self.total.load(AtomicOrdering::Relaxed)
    }

    /// Index of the environment the next evaluation belongs to.
    pub fn env_index(&self) -> usize {
        let idx = self.total_fes() / self.change_frequency;
        idx.min(self.num_changes - 1) as usize
    }

    /// Total budget of the full run.
    pub fn budget(&self) -> u64 {
        self.change_frequency.saturating_mul(self.num_changes)
    }

    pub fn remaining(&self) -> u64 {
        self.budget().saturating_sub(self.total_fes())
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }
}

/// Raw evaluator signature: writes constraint values into the provided
/// buffer and returns the objective. Implementations must be pure.
pub type RawEvalFn = dyn Fn(&[f64], &[f64], &mut Vec<f64>) -> f64 + Send + Sync;

/// A dynamic constrained optimization problem: a pure evaluator over
/// (decision vector, environment vector) plus the two box-bounded spaces.
#[derive(Clone)]
pub struct DcopProblem {
    name: String,
    x_bounds: BoxBounds,
    env_ranges: BoxBounds,
    eval_fn: Arc<RawEvalFn>,
}

impl fmt::Debug for DcopProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DcopProblem")
            .field("name", &self.name)
            .field("dim_x", &self.dim_x())
            .field("dim_env", &self.dim_env())
            .finish()
    }
}

impl DcopProblem {
    pub fn new(
        name: impl Into<String>,
        x_bounds: BoxBounds,
        env_ranges: BoxBounds,
        eval_fn: Arc<RawEvalFn>,
    ) -> Self {
        Self {
            name: name.into(),
            x_bounds,
            env_ranges,
            eval_fn,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_x(&self) -> usize {
        self.x_bounds.dim()
    }

    pub fn dim_env(&self) -> usize {
        self.env_ranges.dim()
    }

    pub fn x_bounds(&self) -> &BoxBounds {
        &self.x_bounds
    }

    pub fn env_ranges(&self) -> &BoxBounds {
        &self.env_ranges
    }

    /// Evaluates a solution under an environment. Charges one evaluation to
    /// `clock` when present. Dimension mismatches are programming bugs and
    /// panic.
    pub fn evaluate(
        &self,
        x: &SolutionVector,
        env: &EnvVector,
        clock: Option<&FeBudgetClock>,
    ) -> Evaluation {
        let mut constraints = Vec::new();
        let objective = self.evaluate_raw(&x.coords, &env.params, &mut constraints, clock);
        Evaluation::from_parts(objective, constraints)
    }

    /// Allocation-free evaluation path for hot loops (grid scans). Clears
    /// and fills `constraints`, returns the objective.
    pub fn evaluate_raw(
        &self,
        x: &[f64],
        env: &[f64],
        constraints: &mut Vec<f64>,
        clock: Option<&FeBudgetClock>,
    ) -> f64 {
        assert_eq!(x.len(), self.dim_x(), "decision vector dimension mismatch");
        assert_eq!(
            env.len(),
            self.dim_env(),
            "environment vector dimension mismatch"
        );
        constraints.clear();
        let objective = (self.eval_fn)(x, env, constraints);
        if let Some(c) = clock {
            c.tick();
        }
        objective
    }
}
