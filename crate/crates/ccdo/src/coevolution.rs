//! Offline set search: a solution population (SP) and an adversarial
//! environment population (EP) evolve against each other. SP members are
//! scored by deletion impact (how many environments lose their best-of-set
//! outcome if the member is removed); EP members are scored by a four-case
//! challenging degree against a freshly sampled baseline set.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::problem::{
    compare_solutions, BoxBounds, DcopProblem, EnvVector, Evaluation, FeBudgetClock,
    SolutionVector,
};

/// The evolving candidate solution set.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub members: Vec<SolutionVector>,
}

impl SolutionSet {
    pub fn new(members: Vec<SolutionVector>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The evolving set of adversarial environment-parameter vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvPopulation {
    pub members: Vec<EnvVector>,
}

impl EnvPopulation {
    pub fn new(members: Vec<EnvVector>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Parameters of the offline coevolutionary search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoevoConfig {
    pub g_max: u32,
    pub sp_size: usize,
    pub ep_size: usize,
    /// Size of the random baseline set used to score environments.
    pub i_size: usize,
    pub sp_mutation_scale: f64,
    pub sp_mutation_rate: f64,
    pub sp_crossover_rate: f64,
    pub ep_mutation_scale: f64,
    pub ep_mutation_rate: f64,
    pub rng_seed: u64,
}

impl Default for CoevoConfig {
    fn default() -> Self {
        Self {
            g_max: 50,
            sp_size: 10,
            ep_size: 10,
            i_size: 5,
            sp_mutation_scale: 0.1,
            sp_mutation_rate: 0.5,
            sp_crossover_rate: 0.5,
            ep_mutation_scale: 0.05,
            ep_mutation_rate: 0.5,
            rng_seed: 0,
        }
    }
}

/// The four challenging-degree cases for an environment, ordered by how
/// hard the environment is for the current solution set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpCase {
    /// Best of SP is infeasible under this environment.
    SpBestInfeasible,
    /// Best of SP is feasible but loses to the baseline's best.
    TrailsBaseline,
    /// Best of SP is feasible while the baseline's best is infeasible.
    BaselineInfeasible,
    /// Both feasible and SP's best is at least as good as the baseline's.
    LeadsBaseline,
}

impl EpCase {
    /// Precedence tier: lower is more challenging. The last two cases share
    /// a tier and tie-break by coin flip.
    fn tier(&self) -> u8 {
        match self {
            EpCase::SpBestInfeasible => 1,
            EpCase::TrailsBaseline => 2,
            EpCase::BaselineInfeasible | EpCase::LeadsBaseline => 3,
        }
    }
}

/// Challenging degree of one environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpFitness {
    pub case: EpCase,
    pub value: f64,
}

/// Classifies an environment from the best-of-SP and best-of-baseline
/// evaluations.
///
/// Values per case: the violation sum (infeasible SP best), the normalized
/// improvement `(min_SP - min_I) / max(|min_I|, |min_SP|)` (positive when
/// the baseline leads, negative when SP leads, zero when the denominator
/// vanishes), or the raw SP objective (infeasible baseline best).
pub fn classify_challenge(best_sp: &Evaluation, best_baseline: &Evaluation) -> EpFitness {
    if !best_sp.feasible {
        return EpFitness {
            case: EpCase::SpBestInfeasible,
            value: best_sp.violation,
        };
    }
    if !best_baseline.feasible {
        return EpFitness {
            case: EpCase::BaselineInfeasible,
            value: best_sp.objective,
        };
    }
    let num = best_sp.objective - best_baseline.objective;
    let den = best_baseline.objective.abs().max(best_sp.objective.abs());
    let value = if den == 0.0 { 0.0 } else { num / den };
    let case = if best_sp.objective > best_baseline.objective {
        EpCase::TrailsBaseline
    } else {
        EpCase::LeadsBaseline
    };
    EpFitness { case, value }
}

/// True when `a` is strictly more challenging than `b`. Within a case a
/// larger value wins; across the two lowest cases a fair coin decides.
pub fn more_challenging<R: Rng + ?Sized>(a: &EpFitness, b: &EpFitness, rng: &mut R) -> bool {
    let (ta, tb) = (a.case.tier(), b.case.tier());
    if ta != tb {
        return ta < tb;
    }
    if a.case != b.case {
        return rng.gen_bool(0.5);
    }
    a.value > b.value
}

/// Best evaluation attainable by the set under one environment (ties keep
/// the earliest member).
pub fn set_performance(
    sp: &SolutionSet,
    env: &EnvVector,
    problem: &DcopProblem,
    clock: Option<&FeBudgetClock>,
) -> Evaluation {
    assert!(!sp.is_empty(), "set performance of an empty set");
    let mut best: Option<Evaluation> = None;
    for x in &sp.members {
        let ev = problem.evaluate(x, env, clock);
        if best
            .as_ref()
            .map_or(true, |b| compare_solutions(&ev, b) == Ordering::Less)
        {
            best = Some(ev);
        }
    }
    best.unwrap()
}

/// Outcome pair used when testing whether a deletion changes set
/// performance: feasibility class plus score, compared exactly.
fn outcome_eq(a: &Evaluation, b: &Evaluation) -> bool {
    a.feasible == b.feasible && a.score() == b.score()
}

fn best_of<'a>(evals: impl Iterator<Item = &'a Evaluation>) -> &'a Evaluation {
    let mut best: Option<&Evaluation> = None;
    for ev in evals {
        if best.map_or(true, |b| compare_solutions(ev, b) == Ordering::Less) {
            best = Some(ev);
        }
    }
    best.expect("best_of on empty iterator")
}

/// Deletion-impact fitness of every member given the full member-by-env
/// evaluation matrix (`rows[i][j]` = member `i` on environment `j`).
fn deletion_impact(rows: &[Vec<Evaluation>]) -> Vec<usize> {
    let members = rows.len();
    assert!(members >= 2);
    let envs = rows[0].len();
    let mut fits = vec![0usize; members];
    for j in 0..envs {
        let mut best_i = 0;
        for i in 1..members {
            if compare_solutions(&rows[i][j], &rows[best_i][j]) == Ordering::Less {
                best_i = i;
            }
        }
        let runner_up = best_of(
            rows.iter()
                .enumerate()
                .filter(|(i, _)| *i != best_i)
                .map(|(_, r)| &r[j]),
        );
        // only the incumbent's deletion can change the outcome, and only
        // when no other member reproduces it exactly
        if !outcome_eq(&rows[best_i][j], runner_up) {
            fits[best_i] += 1;
        }
    }
    fits
}

/// Number of environments whose best-of-set outcome changes when `member`
/// is deleted. Standalone operation; the search loop uses a shared
/// evaluation matrix instead.
pub fn sp_fitness(
    sp: &SolutionSet,
    member: usize,
    ep: &EnvPopulation,
    problem: &DcopProblem,
    clock: Option<&FeBudgetClock>,
) -> usize {
    assert!(sp.len() >= 2, "deletion impact needs at least two members");
    assert!(member < sp.len());
    let mut count = 0;
    for env in &ep.members {
        let full = set_performance(sp, env, problem, clock);
        let reduced = SolutionSet::new(
            sp.members
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != member)
                .map(|(_, x)| x.clone())
                .collect(),
        );
        let without = set_performance(&reduced, env, problem, clock);
        if !outcome_eq(&full, &without) {
            count += 1;
        }
    }
    count
}

/// Intermediate crossover of two uniformly chosen distinct parents followed
/// by rate-gated per-coordinate Gaussian mutation, clamped to bounds.
fn breed_solution<R: Rng + ?Sized>(
    sp: &SolutionSet,
    bounds: &BoxBounds,
    config: &CoevoConfig,
    rng: &mut R,
) -> SolutionVector {
    let m = sp.len();
    let a = rng.gen_range(0..m);
    let b = if m > 1 {
        let mut b = rng.gen_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        b
    } else {
        a
    };
    let (p1, p2) = (&sp.members[a], &sp.members[b]);
    let dim = bounds.dim();
    let mut child: Vec<f64> = (0..dim)
        .map(|c| {
            if rng.gen::<f64>() < config.sp_crossover_rate {
                let w = rng.gen::<f64>();
                w * p1.coords[c] + (1.0 - w) * p2.coords[c]
            } else {
                p1.coords[c]
            }
        })
        .collect();
    for (c, coord) in child.iter_mut().enumerate() {
        if rng.gen::<f64>() < config.sp_mutation_rate {
            let std = config.sp_mutation_scale * bounds.range(c);
            *coord += Normal::new(0.0, std).unwrap().sample(rng);
        }
    }
    bounds.clamp(&mut child);
    SolutionVector::new(child)
}

/// Rate-gated per-coordinate Gaussian mutation of an environment vector,
/// clamped to the parameter ranges.
fn mutate_env<R: Rng + ?Sized>(
    parent: &EnvVector,
    ranges: &BoxBounds,
    config: &CoevoConfig,
    rng: &mut R,
) -> EnvVector {
    let mut params = parent.params.clone();
    for (c, p) in params.iter_mut().enumerate() {
        if rng.gen::<f64>() < config.ep_mutation_rate {
            let std = config.ep_mutation_scale * ranges.range(c);
            *p += Normal::new(0.0, std).unwrap().sample(rng);
        }
    }
    ranges.clamp(&mut params);
    EnvVector::new(params)
}

/// One steady-state generation of the solution population: one offspring
/// enters, the member with the smallest deletion impact leaves (ties broken
/// uniformly at random). Returns the survivors and their evaluation rows
/// against `ep`.
fn sp_phase<R: Rng + ?Sized>(
    sp: &SolutionSet,
    ep: &EnvPopulation,
    problem: &DcopProblem,
    config: &CoevoConfig,
    rng: &mut R,
    clock: Option<&FeBudgetClock>,
) -> (SolutionSet, Vec<Vec<Evaluation>>) {
    let offspring = breed_solution(sp, problem.x_bounds(), config, rng);
    let mut pool: Vec<SolutionVector> = sp.members.clone();
    pool.push(offspring);
    let mut rows: Vec<Vec<Evaluation>> = pool
        .iter()
        .map(|x| {
            ep.members
                .iter()
                .map(|env| problem.evaluate(x, env, clock))
                .collect()
        })
        .collect();
    let fits = deletion_impact(&rows);
    let min_fit = *fits.iter().min().unwrap();
    let candidates: Vec<usize> = (0..pool.len()).filter(|&i| fits[i] == min_fit).collect();
    let doomed = candidates[rng.gen_range(0..candidates.len())];
    pool.remove(doomed);
    rows.remove(doomed);
    (SolutionSet::new(pool), rows)
}

/// Public steady-state SP generation (see [`sp_phase`]).
pub fn sp_evolve_one_generation<R: Rng + ?Sized>(
    sp: &SolutionSet,
    ep: &EnvPopulation,
    problem: &DcopProblem,
    config: &CoevoConfig,
    rng: &mut R,
    clock: Option<&FeBudgetClock>,
) -> SolutionSet {
    sp_phase(sp, ep, problem, config, rng, clock).0
}

/// Challenging degree of one environment against the current solution set,
/// using the provided baseline set.
pub fn ep_fitness(
    env: &EnvVector,
    sp: &SolutionSet,
    baseline: &[SolutionVector],
    problem: &DcopProblem,
    clock: Option<&FeBudgetClock>,
) -> EpFitness {
    assert!(!baseline.is_empty(), "baseline set must be non-empty");
    let best_sp = set_performance(sp, env, problem, clock);
    let baseline_evals: Vec<Evaluation> = baseline
        .iter()
        .map(|x| problem.evaluate(x, env, clock))
        .collect();
    let best_baseline = best_of(baseline_evals.iter()).clone();
    classify_challenge(&best_sp, &best_baseline)
}

fn sample_baseline<R: Rng + ?Sized>(
    bounds: &BoxBounds,
    i_size: usize,
    rng: &mut R,
) -> Vec<SolutionVector> {
    (0..i_size)
        .map(|_| SolutionVector::new(bounds.sample(rng)))
        .collect()
}

/// Pairwise-replacement EP generation. `sp_rows`, when present, holds the
/// survivors' evaluations on the parent environments (`rows[i][j]`) so the
/// parents' best-of-SP need not be recomputed.
fn ep_phase<R: Rng + ?Sized>(
    ep: &EnvPopulation,
    sp: &SolutionSet,
    sp_rows: Option<&[Vec<Evaluation>]>,
    problem: &DcopProblem,
    config: &CoevoConfig,
    rng: &mut R,
    clock: Option<&FeBudgetClock>,
) -> EnvPopulation {
    let ranges = problem.env_ranges();
    let bounds = problem.x_bounds();
    let mut next = Vec::with_capacity(ep.len());
    for (j, parent) in ep.members.iter().enumerate() {
        let child = mutate_env(parent, ranges, config, rng);

        let parent_best_sp = match sp_rows {
            Some(rows) => best_of(rows.iter().map(|r| &r[j])).clone(),
            None => set_performance(sp, parent, problem, clock),
        };
        let child_best_sp = set_performance(sp, &child, problem, clock);

        let parent_baseline = sample_baseline(bounds, config.i_size, rng);
        let parent_best_i = best_of(
            parent_baseline
                .iter()
                .map(|x| problem.evaluate(x, parent, clock))
                .collect::<Vec<_>>()
                .iter(),
        )
        .clone();
        let child_baseline = sample_baseline(bounds, config.i_size, rng);
        let child_best_i = best_of(
            child_baseline
                .iter()
                .map(|x| problem.evaluate(x, &child, clock))
                .collect::<Vec<_>>()
                .iter(),
        )
        .clone();

        let pf = classify_challenge(&parent_best_sp, &parent_best_i);
        let cf = classify_challenge(&child_best_sp, &child_best_i);
        next.push(if more_challenging(&pf, &cf, rng) {
            parent.clone()
        } else {
            child
        });
    }
    EnvPopulation::new(next)
}

/// Public pairwise-replacement EP generation (see [`ep_phase`]).
pub fn ep_evolve_one_generation<R: Rng + ?Sized>(
    ep: &EnvPopulation,
    sp: &SolutionSet,
    problem: &DcopProblem,
    config: &CoevoConfig,
    rng: &mut R,
    clock: Option<&FeBudgetClock>,
) -> EnvPopulation {
    ep_phase(ep, sp, None, problem, config, rng, clock)
}

/// Whether the environment population evolves or stays frozen at its random
/// initialization (the fixed-environment ablation arm).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpMode {
    Coevolve,
    Frozen,
}

/// Result of the offline phase.
#[derive(Clone, Debug)]
pub struct OfflineResult {
    pub set: SolutionSet,
    pub final_ep: EnvPopulation,
    pub offline_fes: u64,
    pub generations: u32,
}

/// Evaluator calls one offline run performs under the per-generation
/// memoization policy: the SP phase evaluates the (m+1)-member pool on all
/// n environments; the EP phase reuses the survivors' rows for the parents
/// and pays m evaluations per child plus one fresh baseline per individual.
pub fn predicted_offline_fes(config: &CoevoConfig, mode: EpMode) -> u64 {
    let g = config.g_max as u64;
    let m = config.sp_size as u64;
    let n = config.ep_size as u64;
    let i = config.i_size as u64;
    match mode {
        EpMode::Coevolve => g * n * (2 * m + 2 * i + 1),
        EpMode::Frozen => g * n * (m + 1),
    }
}

fn stream_rng(seed: u64, generation: u64, role: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation * 4 + role);
    rng
}

/// Runs the offline set search: random initialization of both populations,
/// then `g_max` alternating generations (SP first, then EP against the new
/// SP). Returns the final solution set and the evaluation count.
pub fn run_offline_search(problem: &DcopProblem, config: &CoevoConfig) -> OfflineResult {
    run_offline_search_with_mode(problem, config, EpMode::Coevolve)
}

/// Offline search with a selectable EP policy (see [`EpMode`]).
pub fn run_offline_search_with_mode(
    problem: &DcopProblem,
    config: &CoevoConfig,
    mode: EpMode,
) -> OfflineResult {
    assert!(config.sp_size >= 2, "solution population needs >= 2 members");
    assert!(config.ep_size >= 1);
    assert!(config.i_size >= 1);
    let clock = FeBudgetClock::counter_only();

    let mut init_rng = stream_rng(config.rng_seed, 0, 0);
    let mut sp = SolutionSet::new(
        (0..config.sp_size)
            .map(|_| SolutionVector::new(problem.x_bounds().sample(&mut init_rng)))
            .collect(),
    );
    let mut ep = EnvPopulation::new(
        (0..config.ep_size)
            .map(|_| EnvVector::new(problem.env_ranges().sample(&mut init_rng)))
            .collect(),
    );

    for gen in 0..config.g_max {
        let mut sp_rng = stream_rng(config.rng_seed, gen as u64 + 1, 1);
        let (next_sp, rows) = sp_phase(&sp, &ep, problem, config, &mut sp_rng, Some(&clock));
        sp = next_sp;
        if mode == EpMode::Coevolve {
            let mut ep_rng = stream_rng(config.rng_seed, gen as u64 + 1, 2);
            ep = ep_phase(
                &ep,
                &sp,
                Some(&rows),
                problem,
                config,
                &mut ep_rng,
                Some(&clock),
            );
        }
    }

    OfflineResult {
        set: sp,
        final_ep: ep,
        offline_fes: clock.total_fes(),
        generations: config.g_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g24::{make_variant, VariantId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_set<R: Rng>(problem: &DcopProblem, size: usize, rng: &mut R) -> SolutionSet {
        SolutionSet::new(
            (0..size)
                .map(|_| SolutionVector::new(problem.x_bounds().sample(rng)))
                .collect(),
        )
    }

    fn random_envs<R: Rng>(problem: &DcopProblem, size: usize, rng: &mut R) -> EnvPopulation {
        EnvPopulation::new(
            (0..size)
                .map(|_| EnvVector::new(problem.env_ranges().sample(rng)))
                .collect(),
        )
    }

    /// Independent oracle: F(SP, env) as a plain scan sorted by the
    /// feasibility-first key.
    fn oracle_set_performance(
        sp: &SolutionSet,
        env: &EnvVector,
        problem: &DcopProblem,
    ) -> (bool, f64) {
        let mut keyed: Vec<(bool, f64)> = sp
            .members
            .iter()
            .map(|x| {
                let ev = problem.evaluate(x, env, None);
                (ev.feasible, ev.score())
            })
            .collect();
        keyed.sort_by(|a, b| {
            b.0.cmp(&a.0) // feasible first
                .then(a.1.total_cmp(&b.1))
        });
        keyed[0]
    }

    #[test]
    fn set_performance_matches_exhaustive_scan() {
        let problem = make_variant(VariantId::G24_1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let sp = random_set(&problem, 5, &mut rng);
            let env = EnvVector::new(problem.env_ranges().sample(&mut rng));
            let got = set_performance(&sp, &env, &problem, None);
            let want = oracle_set_performance(&sp, &env, &problem);
            assert_eq!((got.feasible, got.score()), want);
        }
    }

    #[test]
    fn sp_fitness_matches_brute_force() {
        for id in [VariantId::G24_1, VariantId::G24_3] {
            let problem = make_variant(id);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..30 {
                let m = rng.gen_range(3..=6);
                let n = rng.gen_range(3..=8);
                let sp = random_set(&problem, m, &mut rng);
                let ep = random_envs(&problem, n, &mut rng);
                for i in 0..m {
                    let got = sp_fitness(&sp, i, &ep, &problem, None);
                    // brute force: recompute both F values per environment
                    let mut want = 0;
                    for env in &ep.members {
                        let full = oracle_set_performance(&sp, env, &problem);
                        let reduced = SolutionSet::new(
                            sp.members
                                .iter()
                                .enumerate()
                                .filter(|(k, _)| *k != i)
                                .map(|(_, x)| x.clone())
                                .collect(),
                        );
                        let without = oracle_set_performance(&reduced, env, &problem);
                        if full != without {
                            want += 1;
                        }
                    }
                    assert_eq!(got, want, "{id} member {i}");
                    assert!(got <= ep.len());
                }
            }
        }
    }

    #[test]
    fn duplicate_members_have_zero_deletion_impact() {
        let problem = make_variant(VariantId::G24_1);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut sp = random_set(&problem, 4, &mut rng);
        let dup = sp.members[0].clone();
        sp.members.push(dup);
        let ep = random_envs(&problem, 6, &mut rng);
        assert_eq!(sp_fitness(&sp, 0, &ep, &problem, None), 0);
        assert_eq!(sp_fitness(&sp, 4, &ep, &problem, None), 0);
    }

    #[test]
    fn zero_impact_member_removal_preserves_all_outcomes() {
        let problem = make_variant(VariantId::G24_3);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let sp = random_set(&problem, 5, &mut rng);
            let ep = random_envs(&problem, 6, &mut rng);
            for i in 0..sp.len() {
                if sp_fitness(&sp, i, &ep, &problem, None) == 0 {
                    let reduced = SolutionSet::new(
                        sp.members
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| *k != i)
                            .map(|(_, x)| x.clone())
                            .collect(),
                    );
                    for env in &ep.members {
                        let a = set_performance(&sp, env, &problem, None);
                        let b = set_performance(&reduced, env, &problem, None);
                        assert!(outcome_eq(&a, &b));
                    }
                }
            }
        }
    }

    #[test]
    fn classify_challenge_four_cases() {
        let infeasible = |v: f64| Evaluation::from_parts(0.0, vec![v]);
        let feasible = |obj: f64| Evaluation::from_parts(obj, vec![-1.0]);

        let f = classify_challenge(&infeasible(0.7), &feasible(1.0));
        assert_eq!(f.case, EpCase::SpBestInfeasible);
        assert_eq!(f.value, 0.7);

        let f = classify_challenge(&feasible(2.0), &feasible(1.0));
        assert_eq!(f.case, EpCase::TrailsBaseline);
        assert_eq!(f.value, 0.5);

        let f = classify_challenge(&feasible(1.0), &feasible(2.0));
        assert_eq!(f.case, EpCase::LeadsBaseline);
        assert_eq!(f.value, -0.5);

        let f = classify_challenge(&feasible(3.0), &infeasible(0.1));
        assert_eq!(f.case, EpCase::BaselineInfeasible);
        assert_eq!(f.value, 3.0);

        // removable singularity: both objectives exactly zero
        let f = classify_challenge(&feasible(0.0), &feasible(0.0));
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn challenge_ordering_covers_all_case_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fit = |case, value| EpFitness { case, value };
        use EpCase::*;
        // strict tiers
        for low in [TrailsBaseline, BaselineInfeasible, LeadsBaseline] {
            assert!(more_challenging(
                &fit(SpBestInfeasible, -5.0),
                &fit(low, 100.0),
                &mut rng
            ));
            assert!(!more_challenging(
                &fit(low, 100.0),
                &fit(SpBestInfeasible, -5.0),
                &mut rng
            ));
        }
        for low in [BaselineInfeasible, LeadsBaseline] {
            assert!(more_challenging(
                &fit(TrailsBaseline, -5.0),
                &fit(low, 100.0),
                &mut rng
            ));
        }
        // within-case: larger value wins, equal is not strictly more
        for case in [SpBestInfeasible, TrailsBaseline, BaselineInfeasible, LeadsBaseline] {
            assert!(more_challenging(&fit(case, 2.0), &fit(case, 1.0), &mut rng));
            assert!(!more_challenging(&fit(case, 1.0), &fit(case, 2.0), &mut rng));
            assert!(!more_challenging(&fit(case, 1.0), &fit(case, 1.0), &mut rng));
        }
        // the bottom-tier pair resolves by coin: both outcomes occur
        let mut wins = 0;
        for _ in 0..200 {
            if more_challenging(
                &fit(BaselineInfeasible, 0.0),
                &fit(LeadsBaseline, 0.0),
                &mut rng,
            ) {
                wins += 1;
            }
        }
        assert!(wins > 50 && wins < 150, "coin flip looks biased: {wins}");
    }

    #[test]
    fn sp_generation_keeps_size_and_bounds() {
        let problem = make_variant(VariantId::G24_2);
        let config = CoevoConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut sp = random_set(&problem, config.sp_size, &mut rng);
        let ep = random_envs(&problem, config.ep_size, &mut rng);
        for _ in 0..10 {
            sp = sp_evolve_one_generation(&sp, &ep, &problem, &config, &mut rng, None);
            assert_eq!(sp.len(), config.sp_size);
            for x in &sp.members {
                assert!(problem.x_bounds().contains(&x.coords));
            }
        }
    }

    #[test]
    fn ep_generation_keeps_size_and_ranges() {
        let problem = make_variant(VariantId::G24_5);
        let config = CoevoConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sp = random_set(&problem, config.sp_size, &mut rng);
        let mut ep = random_envs(&problem, config.ep_size, &mut rng);
        for _ in 0..10 {
            ep = ep_evolve_one_generation(&ep, &sp, &problem, &config, &mut rng, None);
            assert_eq!(ep.len(), config.ep_size);
            for env in &ep.members {
                assert!(problem.env_ranges().contains(&env.params));
            }
        }
    }

    #[test]
    fn evolution_is_deterministic_per_seed() {
        let problem = make_variant(VariantId::G24_1);
        let config = CoevoConfig::default();
        let mut rng_a = ChaCha8Rng::seed_from_u64(77);
        let mut rng_b = ChaCha8Rng::seed_from_u64(77);
        let sp = random_set(&problem, 6, &mut rng_a);
        let sp_b = random_set(&problem, 6, &mut rng_b);
        assert_eq!(sp, sp_b);
        let ep = random_envs(&problem, 5, &mut rng_a);
        let ep_b = random_envs(&problem, 5, &mut rng_b);
        let a = sp_evolve_one_generation(&sp, &ep, &problem, &config, &mut rng_a, None);
        let b = sp_evolve_one_generation(&sp_b, &ep_b, &problem, &config, &mut rng_b, None);
        assert_eq!(a, b);
    }

    #[test]
    fn offline_search_counts_match_prediction() {
        let problem = make_variant(VariantId::G24_1);
        for (g_max, mode) in [(0u32, EpMode::Coevolve), (7, EpMode::Coevolve), (7, EpMode::Frozen)]
        {
            let config = CoevoConfig {
                g_max,
                rng_seed: 123,
                ..CoevoConfig::default()
            };
            let result = run_offline_search_with_mode(&problem, &config, mode);
            assert_eq!(
                result.offline_fes,
                predicted_offline_fes(&config, mode),
                "mode {mode:?} g_max {g_max}"
            );
            assert_eq!(result.set.len(), config.sp_size);
        }
    }

    #[test]
    fn zero_generations_returns_initial_random_set() {
        let problem = make_variant(VariantId::G24_7);
        let config = CoevoConfig {
            g_max: 0,
            rng_seed: 9,
            ..CoevoConfig::default()
        };
        let a = run_offline_search(&problem, &config);
        let b = run_offline_search(&problem, &config);
        assert_eq!(a.set, b.set);
        assert_eq!(a.offline_fes, 0);
    }

    #[test]
    fn offline_search_same_seed_same_output() {
        let problem = make_variant(VariantId::G24_3b);
        let config = CoevoConfig {
            g_max: 12,
            rng_seed: 31,
            ..CoevoConfig::default()
        };
        let a = run_offline_search(&problem, &config);
        let b = run_offline_search(&problem, &config);
        assert_eq!(a.set, b.set);
        assert_eq!(a.final_ep, b.final_ep);
    }

    #[test]
    fn frozen_mode_keeps_initial_environments() {
        let problem = make_variant(VariantId::G24_3);
        let config = CoevoConfig {
            g_max: 5,
            rng_seed: 40,
            ..CoevoConfig::default()
        };
        let frozen = run_offline_search_with_mode(&problem, &config, EpMode::Frozen);
        let zero = CoevoConfig {
            g_max: 0,
            ..config.clone()
        };
        let init = run_offline_search_with_mode(&problem, &zero, EpMode::Frozen);
        assert_eq!(frozen.final_ep, init.final_ep);
    }
}
