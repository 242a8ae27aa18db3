//! Online optimization: the population restarts from the archived solution
//! set whenever a change is detected. Per individual each generation the
//! loop re-evaluates (detection), runs a budgeted local search unless the
//! start point sits too close to an already-searched one, then applies one
//! elitist Gaussian step; sentinel re-evaluations close each generation.
//! Every evaluation is charged to the run's budget clock and appends one
//! entry to the per-evaluation error trace.

use std::cmp::Ordering;
use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coevolution::SolutionSet;
use crate::error::Result;
use crate::g24::{Calibration, CalibrationCache, ChangeSchedule};
use crate::local_search::{
    descend_core, mutation_climb_core, mutation_step_core, LocalSearchConfig, LocalSearchKind,
    LsMemory,
};
use crate::problem::{
    compare_solutions, DcopProblem, Evaluation, FeBudgetClock, SolutionVector,
};

/// Points closer than this are treated as duplicates when populations are
/// rebuilt and when the archive absorbs a period's best solution.
pub const DEDUP_RADIUS: f64 = 1e-2;

/// Online-phase settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnlineConfig {
    /// Number of sentinel points re-evaluated each generation.
    pub detect_k: usize,
    /// Detection compares objective and constraint values within this
    /// tolerance; zero means exact.
    pub detection_tolerance: f64,
    pub ls_kind: LocalSearchKind,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        Self {
            detect_k: 4,
            detection_tolerance: 0.0,
            ls_kind: LocalSearchKind::SqpLike,
        }
    }
}

/// Where each evaluation of a run went.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FeBreakdown {
    pub detection: u64,
    pub sentinel: u64,
    pub local_search: u64,
    pub mutation: u64,
}

impl FeBreakdown {
    pub fn total(&self) -> u64 {
        self.detection + self.sentinel + self.local_search + self.mutation
    }
}

#[derive(Clone, Copy)]
enum FeKind {
    Detection,
    Sentinel,
    LocalSearch,
    Mutation,
}

/// Full trace of one online run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub change_frequency: u64,
    pub num_changes: u64,
    /// Error of the best feasible solution since the last true environment
    /// boundary, one entry per evaluation.
    pub per_fe_error: Vec<f64>,
    /// The same error sampled at the end of each completed generation.
    pub per_gen_error: Vec<f64>,
    /// 1-based evaluation indices at which a change was detected.
    pub detections: Vec<u64>,
    pub breakdown: FeBreakdown,
}

impl RunRecord {
    /// Environment index a 1-based evaluation index belongs to.
    pub fn env_index_of_fe(&self, fe: u64) -> u64 {
        ((fe - 1) / self.change_frequency).min(self.num_changes - 1)
    }

    /// One entry per true boundary: the evaluation index at which the
    /// environment actually switched, and whether a detection event
    /// occurred inside the period that follows it.
    pub fn change_log(&self) -> Vec<(u64, bool)> {
        (1..self.num_changes)
            .map(|b| {
                let fe = b * self.change_frequency;
                let detected = self
                    .detections
                    .iter()
                    .any(|&d| d > fe && (d - 1) / self.change_frequency == b);
                (fe, detected)
            })
            .collect()
    }

    /// CSV with columns `fe_index,env_index,best_feasible_error,change_detected_flag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "fe_index,env_index,best_feasible_error,change_detected_flag")?;
        for (i, err) in self.per_fe_error.iter().enumerate() {
            let fe = i as u64 + 1;
            let flag = if self.detections.contains(&fe) { 1 } else { 0 };
            writeln!(w, "{},{},{},{}", fe, self.env_index_of_fe(fe), err, flag)?;
        }
        Ok(())
    }
}

/// Re-evaluates a tracked point under the current environment (one
/// evaluation) and reports whether its outcome moved beyond the tolerance.
pub fn detect_change(
    point: &SolutionVector,
    stored: &Evaluation,
    problem: &DcopProblem,
    env: &crate::problem::EnvVector,
    tolerance: f64,
    clock: Option<&FeBudgetClock>,
) -> bool {
    let fresh = problem.evaluate(point, env, clock);
    !fresh.same_outcome(stored, tolerance)
}

/// Drops points lying strictly within [`DEDUP_RADIUS`] of an
/// earlier-listed point.
fn dedup(points: Vec<SolutionVector>) -> Vec<SolutionVector> {
    let mut kept: Vec<SolutionVector> = Vec::with_capacity(points.len());
    for p in points {
        if kept.iter().all(|k| k.distance(&p) >= DEDUP_RADIUS) {
            kept.push(p);
        }
    }
    kept
}

/// Evaluation front-end of one run: charges the clock, maintains the
/// per-evaluation error trace against the true environment schedule, and
/// tracks the best point found since the last detected change (the archive
/// update candidate).
struct OnlineCtx<'a> {
    problem: &'a DcopProblem,
    schedule: &'a ChangeSchedule,
    clock: FeBudgetClock,
    cals: Vec<Calibration>,
    per_fe_error: Vec<f64>,
    per_gen_error: Vec<f64>,
    detections: Vec<u64>,
    breakdown: FeBreakdown,
    gt_env: usize,
    best_err: Option<f64>,
    period_best: Option<(SolutionVector, Evaluation)>,
}

impl<'a> OnlineCtx<'a> {
    fn worst_gap(&self, env: usize) -> f64 {
        self.cals[env].worst - self.cals[env].best
    }

    /// Evaluates `x` under the scheduled environment of the next
    /// evaluation index; exactly one trace entry per call.
    fn eval(&mut self, x: &SolutionVector, kind: FeKind) -> Evaluation {
        debug_assert!(!self.clock.is_exhausted(), "evaluation past the budget");
        let env_idx = self.clock.env_index();
        if env_idx != self.gt_env {
            // true boundary: the best-so-far error resets here
            self.gt_env = env_idx;
            self.best_err = None;
        }
        let ev = self
            .problem
            .evaluate(x, &self.schedule.envs[env_idx], Some(&self.clock));
        match kind {
            FeKind::Detection => self.breakdown.detection += 1,
            FeKind::Sentinel => self.breakdown.sentinel += 1,
            FeKind::LocalSearch => self.breakdown.local_search += 1,
            FeKind::Mutation => self.breakdown.mutation += 1,
        }
        if ev.feasible {
            let err = ev.objective - self.cals[env_idx].best;
            debug_assert!(
                err > -1e-6,
                "feasible value {} beats calibrated best {}",
                ev.objective,
                self.cals[env_idx].best
            );
            let err = err.max(0.0);
            self.best_err = Some(self.best_err.map_or(err, |b| b.min(err)));
        }
        let entry = self.best_err.unwrap_or_else(|| self.worst_gap(env_idx));
        self.per_fe_error.push(entry);
        ev
    }

    /// Evaluation plus candidacy for the period-best tracker.
    fn eval_noted(&mut self, x: &SolutionVector, kind: FeKind) -> Evaluation {
        let ev = self.eval(x, kind);
        self.note_candidate(x, &ev);
        ev
    }

    fn note_candidate(&mut self, x: &SolutionVector, ev: &Evaluation) {
        let better = self
            .period_best
            .as_ref()
            .map_or(true, |(_, b)| compare_solutions(ev, b) == Ordering::Less);
        if better {
            self.period_best = Some((x.clone(), ev.clone()));
        }
    }

    fn take_period_best(&mut self) -> Option<(SolutionVector, Evaluation)> {
        self.period_best.take()
    }

    fn sample_generation(&mut self) {
        let entry = self.best_err.unwrap_or_else(|| self.worst_gap(self.gt_env));
        self.per_gen_error.push(entry);
    }

    fn mark_detection(&mut self) {
        self.detections.push(self.clock.total_fes());
    }
}

/// Runs the online loop until `num_changes * change_frequency` evaluations
/// are spent. `archive0` seeds both the archive and the initial population;
/// calibrations for the schedule's environments come from `cache` and are
/// not charged to the budget.
#[allow(clippy::too_many_arguments)]
pub fn run_online(
    problem: &DcopProblem,
    schedule: &ChangeSchedule,
    archive0: &SolutionSet,
    change_frequency: u64,
    ls_config: &LocalSearchConfig,
    online_config: &OnlineConfig,
    seed: u64,
    cache: &CalibrationCache,
) -> Result<RunRecord> {
    assert!(!archive0.is_empty(), "online phase needs a non-empty archive");
    let num_changes = schedule.num_changes() as u64;
    let cals = schedule
        .envs
        .iter()
        .map(|env| cache.get_or_compute(problem, env))
        .collect::<Result<Vec<_>>>()?;

    let mut ctx = OnlineCtx {
        problem,
        schedule,
        clock: FeBudgetClock::new(change_frequency, num_changes),
        cals,
        per_fe_error: Vec::with_capacity((change_frequency * num_changes) as usize),
        per_gen_error: Vec::new(),
        detections: Vec::new(),
        breakdown: FeBreakdown::default(),
        gt_env: 0,
        best_err: None,
        period_best: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = problem.x_bounds();
    let tol = online_config.detection_tolerance;

    let mut archive: Vec<SolutionVector> = archive0.members.clone();
    let mut pop = dedup(archive.clone());
    let mut stored: Vec<Option<Evaluation>> = vec![None; pop.len()];
    let mut mem_ls = LsMemory::new();
    let mut ls_best: Vec<SolutionVector> = Vec::new();

    // initial evaluation of the population
    for (p, s) in pop.iter().zip(stored.iter_mut()) {
        if ctx.clock.is_exhausted() {
            break;
        }
        let ev = ctx.eval_noted(p, FeKind::Detection);
        *s = Some(ev);
    }
    let mut sentinels: Vec<(SolutionVector, Option<Evaluation>)> = Vec::new();
    draw_sentinels(&mut sentinels, online_config.detect_k, &mut ctx, &mut rng);

    'generations: while !ctx.clock.is_exhausted() {
        // per-individual pass
        for i in 0..pop.len() {
            if ctx.clock.is_exhausted() {
                break;
            }
            let point = pop[i].clone();
            let ev = ctx.eval(&point, FeKind::Detection);
            let changed = stored[i]
                .as_ref()
                .map_or(false, |s| !ev.same_outcome(s, tol));
            if changed {
                ctx.mark_detection();
                on_change(
                    &mut ctx,
                    &mut rng,
                    &mut archive,
                    &mut pop,
                    &mut stored,
                    &mut mem_ls,
                    &mut ls_best,
                    &mut sentinels,
                    online_config.detect_k,
                );
                ctx.note_candidate(&point, &ev);
                continue 'generations;
            }
            ctx.note_candidate(&point, &ev);
            stored[i] = Some(ev);

            if !mem_ls.should_skip(&pop[i]) {
                let allowance = ls_config.max_fes.min(ctx.clock.remaining());
                if allowance >= 1 {
                    let start = pop[i].clone();
                    let (bx, bev) = {
                        let mut eval_fn =
                            |p: &SolutionVector| ctx.eval_noted(p, FeKind::LocalSearch);
                        match online_config.ls_kind {
                            LocalSearchKind::SqpLike => {
                                descend_core(&start, bounds, allowance, &mut eval_fn)
                            }
                            LocalSearchKind::MutationOnly => mutation_climb_core(
                                &start,
                                bounds,
                                ls_config.mutation_scale,
                                allowance,
                                &mut eval_fn,
                                &mut rng,
                            ),
                        }
                    };
                    mem_ls.push(start);
                    ls_best.push(bx.clone());
                    pop[i] = bx;
                    stored[i] = Some(bev);
                }
            }

            if !ctx.clock.is_exhausted() {
                let cur_ev = stored[i].clone().expect("tracked point must be evaluated");
                let (nx, nev) = {
                    let mut eval_fn = |p: &SolutionVector| ctx.eval_noted(p, FeKind::Mutation);
                    mutation_step_core(
                        &pop[i],
                        &cur_ev,
                        bounds,
                        ls_config.mutation_scale,
                        &mut eval_fn,
                        &mut rng,
                    )
                };
                pop[i] = nx;
                stored[i] = Some(nev);
            }
        }

        // sentinel pass
        for s in 0..sentinels.len() {
            if ctx.clock.is_exhausted() {
                break;
            }
            let point = sentinels[s].0.clone();
            let ev = ctx.eval(&point, FeKind::Sentinel);
            let changed = sentinels[s]
                .1
                .as_ref()
                .map_or(false, |st| !ev.same_outcome(st, tol));
            if changed {
                ctx.mark_detection();
                on_change(
                    &mut ctx,
                    &mut rng,
                    &mut archive,
                    &mut pop,
                    &mut stored,
                    &mut mem_ls,
                    &mut ls_best,
                    &mut sentinels,
                    online_config.detect_k,
                );
                ctx.note_candidate(&point, &ev);
                continue 'generations;
            }
            ctx.note_candidate(&point, &ev);
            sentinels[s].1 = Some(ev);
        }

        // crowding control: points that drifted onto searched starts are
        // replaced by random individuals
        for (p, s) in pop.iter_mut().zip(stored.iter_mut()) {
            if mem_ls.should_skip(p) {
                *p = SolutionVector::new(bounds.sample(&mut rng));
                *s = None;
            }
            debug_assert!(bounds.contains(&p.coords));
        }

        ctx.sample_generation();
    }

    Ok(RunRecord {
        change_frequency,
        num_changes,
        per_fe_error: ctx.per_fe_error,
        per_gen_error: ctx.per_gen_error,
        detections: ctx.detections,
        breakdown: ctx.breakdown,
    })
}

fn draw_sentinels(
    sentinels: &mut Vec<(SolutionVector, Option<Evaluation>)>,
    detect_k: usize,
    ctx: &mut OnlineCtx,
    rng: &mut ChaCha8Rng,
) {
    let bounds = ctx.problem.x_bounds();
    *sentinels = (0..detect_k)
        .map(|_| (SolutionVector::new(bounds.sample(rng)), None))
        .collect();
    for (point, slot) in sentinels.iter_mut() {
        if ctx.clock.is_exhausted() {
            break;
        }
        let ev = ctx.eval(point, FeKind::Sentinel);
        ctx.note_candidate(point, &ev);
        *slot = Some(ev);
    }
}

/// Reaction to a detected change: the archive absorbs the best solution of
/// the ended period (unless a near-duplicate is already present), the
/// population restarts from archive plus local-search results, and all
/// per-period state is dropped.
#[allow(clippy::too_many_arguments)]
fn on_change(
    ctx: &mut OnlineCtx,
    rng: &mut ChaCha8Rng,
    archive: &mut Vec<SolutionVector>,
    pop: &mut Vec<SolutionVector>,
    stored: &mut Vec<Option<Evaluation>>,
    mem_ls: &mut LsMemory,
    ls_best: &mut Vec<SolutionVector>,
    sentinels: &mut Vec<(SolutionVector, Option<Evaluation>)>,
    detect_k: usize,
) {
    if let Some((best_point, _)) = ctx.take_period_best() {
        if archive
            .iter()
            .all(|m| m.distance(&best_point) >= DEDUP_RADIUS)
        {
            archive.push(best_point);
        }
    }
    let mut pool = archive.clone();
    pool.extend(ls_best.iter().cloned());
    *pop = dedup(pool);
    *stored = vec![None; pop.len()];
    mem_ls.clear();
    ls_best.clear();
    draw_sentinels(sentinels, detect_k, ctx, rng);
}
