//! Budgeted constrained local search used by the online phase: a
//! penalty-merit projected descent with forward-difference gradients plus a
//! single-step Gaussian improvement operator, and a mutation-only
//! hill-climber as the pluggable fallback strategy. Every evaluation is
//! charged to the caller's budget clock.

use std::cmp::Ordering;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::CcdoError;
use crate::problem::{
    compare_solutions, BoxBounds, DcopProblem, EnvVector, Evaluation, FeBudgetClock,
    SolutionVector,
};

/// Penalty weight applied to the constraint violation sum in the descent
/// merit; large relative to the O(1)-O(10) objective scale of the suite.
pub const PENALTY_COEFF: f64 = 1e6;
/// Relative forward-difference step.
pub const FD_STEP: f64 = 1e-6;
/// Line-search steps below this size terminate the descent.
pub const STEP_UNDERFLOW: f64 = 1e-10;
/// Points closer than this to a remembered start skip the descent.
pub const SKIP_RADIUS: f64 = 1e-2;

/// Configuration of one local-search invocation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalSearchConfig {
    /// Evaluation budget per invocation.
    pub max_fes: u64,
    pub constraint_tolerance: f64,
    pub honor_bounds: bool,
    pub mutation_scale: f64,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            max_fes: 20,
            constraint_tolerance: 0.0,
            honor_bounds: true,
            mutation_scale: 0.1,
        }
    }
}

/// Selectable local-search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalSearchKind {
    SqpLike,
    MutationOnly,
}

impl Default for LocalSearchKind {
    fn default() -> Self {
        LocalSearchKind::SqpLike
    }
}

impl FromStr for LocalSearchKind {
    type Err = CcdoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sqp_like" => Ok(LocalSearchKind::SqpLike),
            "mutation_only" => Ok(LocalSearchKind::MutationOnly),
            other => Err(CcdoError::Parse(format!(
                "unknown local search kind: {other}"
            ))),
        }
    }
}

/// Memory of points local search already started from.
#[derive(Clone, Debug, Default)]
pub struct LsMemory {
    entries: Vec<SolutionVector>,
}

impl LsMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, x: SolutionVector) {
        self.entries.push(x);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn min_distance(&self, x: &SolutionVector) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.distance(x))
            .min_by(f64::total_cmp)
    }

    /// True when `x` lies strictly within [`SKIP_RADIUS`] of a remembered
    /// start point.
    pub fn should_skip(&self, x: &SolutionVector) -> bool {
        self.min_distance(x).map_or(false, |d| d < SKIP_RADIUS)
    }
}

fn merit(ev: &Evaluation) -> f64 {
    ev.objective + PENALTY_COEFF * ev.violation
}

/// Descent core over an arbitrary evaluation closure. Spends at most
/// `budget` evaluations (at least one, on the start point) and returns the
/// best point seen under the feasibility-first comparison, which therefore
/// never loses to the start.
pub(crate) fn descend_core(
    x0: &SolutionVector,
    bounds: &BoxBounds,
    budget: u64,
    eval: &mut dyn FnMut(&SolutionVector) -> Evaluation,
) -> (SolutionVector, Evaluation) {
    assert!(budget >= 1, "descent needs at least one evaluation");
    let dim = bounds.dim();
    let mut used: u64 = 0;

    let mut best_x = x0.clone();
    let mut best_ev = eval(x0);
    used += 1;

    let mut cur_x = x0.clone();
    let mut cur_merit = merit(&best_ev);

    let mut step = 0.25
        * (0..dim)
            .map(|c| bounds.range(c))
            .fold(f64::INFINITY, f64::min);

    macro_rules! consider {
        ($x:expr, $ev:expr) => {
            if compare_solutions(&$ev, &best_ev) == Ordering::Less {
                best_x = $x.clone();
                best_ev = $ev.clone();
            }
        };
    }

    // each iteration needs the gradient probes plus at least one trial step
    while used + dim as u64 + 1 <= budget && step >= STEP_UNDERFLOW {
        let mut grad = vec![0.0; dim];
        for (c, slot) in grad.iter_mut().enumerate() {
            let mut h = FD_STEP * cur_x.coords[c].abs().max(1.0);
            if cur_x.coords[c] + h > bounds.upper(c) {
                h = -h; // stay inside the box at the upper edge
            }
            let mut probe = cur_x.clone();
            probe.coords[c] += h;
            let pev = eval(&probe);
            used += 1;
            consider!(probe, pev);
            *slot = (merit(&pev) - cur_merit) / h;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-14 {
            break;
        }
        let dir: Vec<f64> = grad.iter().map(|g| -g / norm).collect();

        let try_at = |t: f64| {
            let mut cand = cur_x.clone();
            for c in 0..dim {
                cand.coords[c] += t * dir[c];
            }
            bounds.clamp(&mut cand.coords);
            cand
        };

        // backtracking until the merit drops
        let mut t = step;
        let mut accepted: Option<(f64, f64, SolutionVector)> = None;
        while used < budget && t >= STEP_UNDERFLOW {
            let cand = try_at(t);
            let cev = eval(&cand);
            used += 1;
            let cm = merit(&cev);
            consider!(cand, cev);
            if cm < cur_merit {
                accepted = Some((t, cm, cand));
                break;
            }
            t *= 0.5;
        }

        let Some((t1, m1, x1)) = accepted else {
            step *= 0.5;
            continue;
        };

        let m0 = cur_merit;
        let mut chosen = (t1, m1, x1);
        if used < budget {
            // expansion sample, then the parabola vertex through
            // (0, m0), (t1, m1), (2 t1, m2) - exact for quadratic merits
            let t2 = 2.0 * t1;
            let cand2 = try_at(t2);
            let ev2 = eval(&cand2);
            used += 1;
            let m2 = merit(&ev2);
            consider!(cand2, ev2);
            if m2 < chosen.1 {
                chosen = (t2, m2, cand2);
            }
            let curvature = m0 + m2 - 2.0 * m1;
            if curvature > 0.0 && used < budget {
                let tv = t1 * (3.0 * m0 + m2 - 4.0 * m1) / (2.0 * curvature);
                if tv > 0.0 && tv < 4.0 * t1 && tv.is_finite() {
                    let candv = try_at(tv);
                    let evv = eval(&candv);
                    used += 1;
                    let mv = merit(&evv);
                    consider!(candv, evv);
                    if mv < chosen.1 {
                        chosen = (tv, mv, candv);
                    }
                }
            }
        }

        cur_x = chosen.2;
        cur_merit = chosen.1;
        step = chosen.0;
    }

    (best_x, best_ev)
}

/// One elitist Gaussian perturbation over an arbitrary evaluation closure.
/// Costs exactly one evaluation; keeps the incumbent unless the candidate
/// is strictly better.
pub(crate) fn mutation_step_core<R: Rng + ?Sized>(
    x: &SolutionVector,
    x_eval: &Evaluation,
    bounds: &BoxBounds,
    scale: f64,
    eval: &mut dyn FnMut(&SolutionVector) -> Evaluation,
    rng: &mut R,
) -> (SolutionVector, Evaluation) {
    let mut cand = x.clone();
    for c in 0..bounds.dim() {
        let std = scale * bounds.range(c);
        cand.coords[c] += Normal::new(0.0, std).unwrap().sample(rng);
    }
    bounds.clamp(&mut cand.coords);
    let cev = eval(&cand);
    if compare_solutions(&cev, x_eval) == Ordering::Less {
        (cand, cev)
    } else {
        (x.clone(), x_eval.clone())
    }
}

/// Mutation-only hill climb: repeated elitist Gaussian steps until the
/// budget runs out (the first evaluation scores the start point).
pub(crate) fn mutation_climb_core<R: Rng + ?Sized>(
    x0: &SolutionVector,
    bounds: &BoxBounds,
    scale: f64,
    budget: u64,
    eval: &mut dyn FnMut(&SolutionVector) -> Evaluation,
    rng: &mut R,
) -> (SolutionVector, Evaluation) {
    assert!(budget >= 1);
    let mut best_x = x0.clone();
    let mut best_ev = eval(x0);
    let mut used = 1;
    while used < budget {
        let (nx, nev) = mutation_step_core(&best_x, &best_ev, bounds, scale, eval, rng);
        used += 1;
        best_x = nx;
        best_ev = nev;
    }
    (best_x, best_ev)
}

/// Budgeted descent on one problem instance; see [`descend_core`] for the
/// search mechanics. The returned point never loses to `x0` under the
/// feasibility-first comparison.
pub fn local_descent(
    x0: &SolutionVector,
    problem: &DcopProblem,
    env: &EnvVector,
    config: &LocalSearchConfig,
    clock: Option<&FeBudgetClock>,
) -> SolutionVector {
    let mut eval = |x: &SolutionVector| problem.evaluate(x, env, clock);
    descend_core(x0, problem.x_bounds(), config.max_fes, &mut eval).0
}

/// One elitist Gaussian improvement step on a problem instance; costs
/// exactly one evaluation.
pub fn mutation_step<R: Rng + ?Sized>(
    x: &SolutionVector,
    x_eval: &Evaluation,
    problem: &DcopProblem,
    env: &EnvVector,
    config: &LocalSearchConfig,
    clock: Option<&FeBudgetClock>,
    rng: &mut R,
) -> (SolutionVector, Evaluation) {
    let mut eval = |p: &SolutionVector| problem.evaluate(p, env, clock);
    mutation_step_core(
        x,
        x_eval,
        problem.x_bounds(),
        config.mutation_scale,
        &mut eval,
        rng,
    )
}
