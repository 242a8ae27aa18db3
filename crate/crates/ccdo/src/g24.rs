//! The dynamic G24 benchmark family: nine variants whose objective and/or
//! constraints are driven by environment parameters, plus change schedules
//! and per-environment best/worst feasible calibration.
//!
//! All variants share the decision box `x1 ∈ [0,3], x2 ∈ [0,4]`. The
//! dynamics are expressed through up to three environment parameters:
//! `p1`, `p2` scale the objective terms and `s2` shifts the second
//! constraint coordinate. A variant's environment vector holds exactly the
//! parameters it varies, in the order reported by [`VariantId::param_names`].

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::sync::RwLock;

use crate::error::{CcdoError, Result};
use crate::problem::{BoxBounds, DcopProblem, EnvVector, SolutionVector};

/// Points per axis of the calibration grid (step = range / (points - 1)).
pub const CALIBRATION_GRID_POINTS: usize = 1001;
/// Maximum pattern-search iterations when refining the best grid cell.
pub const CALIBRATION_REFINE_ITERS: usize = 200;

/// Identifier of one dynamic G24 variant.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantId {
    G24_1,
    G24_2,
    G24_3,
    G24_3b,
    G24_4,
    G24_5,
    G24_6a,
    G24_6c,
    G24_7,
}

/// Solution-size grouping from the benchmark characterization: variants
/// whose ideal solution set has a small fixed size versus those where it is
/// effectively unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeGroup {
    Limited,
    Many,
}

impl VariantId {
    pub fn all() -> [VariantId; 9] {
        use VariantId::*;
        [
            G24_1, G24_2, G24_3, G24_3b, G24_4, G24_5, G24_6a, G24_6c, G24_7,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        use VariantId::*;
        match self {
            G24_1 => "g24_1",
            G24_2 => "g24_2",
            G24_3 => "g24_3",
            G24_3b => "g24_3b",
            G24_4 => "g24_4",
            G24_5 => "g24_5",
            G24_6a => "g24_6a",
            G24_6c => "g24_6c",
            G24_7 => "g24_7",
        }
    }

    /// True when the objective depends on the environment ("dF").
    pub fn objective_dynamic(&self) -> bool {
        use VariantId::*;
        !matches!(self, G24_3 | G24_7)
    }

    /// True when the constraints depend on the environment ("dC").
    pub fn constraint_dynamic(&self) -> bool {
        use VariantId::*;
        matches!(self, G24_3 | G24_3b | G24_4 | G24_5 | G24_7)
    }

    /// Names of the environment parameters this variant varies, in the
    /// order they appear in its environment vector.
    pub fn param_names(&self) -> &'static [&'static str] {
        use VariantId::*;
        match self {
            G24_1 | G24_6a | G24_6c => &["p1"],
            G24_2 => &["p1", "p2"],
            G24_3 | G24_7 => &["s2"],
            G24_3b | G24_4 => &["p1", "s2"],
            G24_5 => &["p1", "p2", "s2"],
        }
    }

    /// Ranges of the environment parameters (the EP search box).
    pub fn env_ranges(&self) -> BoxBounds {
        use VariantId::*;
        let (lo, hi): (Vec<f64>, Vec<f64>) = match self {
            G24_1 | G24_6a | G24_6c => (vec![-1.0], vec![1.0]),
            G24_2 => (vec![-1.0, -1.0], vec![1.0, 1.0]),
            G24_3 => (vec![-0.2], vec![2.0]),
            G24_3b => (vec![-1.0, -0.2], vec![1.0, 2.0]),
            G24_4 => (vec![-1.0, 0.0], vec![1.0, 2.2]),
            G24_5 => (vec![-1.0, -1.0, 0.0], vec![1.0, 1.0, 2.2]),
            G24_7 => (vec![0.0], vec![2.2]),
        };
        BoxBounds::new(lo, hi)
    }

    /// Size of the smallest ideal solution set, when it is limited.
    pub fn ideal_set_size(&self) -> Option<usize> {
        use VariantId::*;
        match self {
            G24_1 | G24_6a | G24_6c => Some(2),
            G24_2 => Some(5),
            _ => None,
        }
    }

    pub fn size_group(&self) -> SizeGroup {
        if self.ideal_set_size().is_some() {
            SizeGroup::Limited
        } else {
            SizeGroup::Many
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantId {
    type Err = CcdoError;

    fn from_str(s: &str) -> Result<Self> {
        VariantId::all()
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| CcdoError::UnknownVariant(s.to_string()))
    }
}

/// Decision-space box shared by all variants.
fn decision_bounds() -> BoxBounds {
    BoxBounds::new(vec![0.0, 0.0], vec![3.0, 4.0])
}

/// Maps a variant's environment vector onto the full parameter triple
/// (p1, p2, s2), filling unused slots with their static defaults.
fn decode_env(id: VariantId, env: &[f64]) -> (f64, f64, f64) {
    use VariantId::*;
    match id {
        G24_1 | G24_6a | G24_6c => (env[0], 1.0, 0.0),
        G24_2 => (env[0], env[1], 0.0),
        G24_3 | G24_7 => (1.0, 1.0, env[0]),
        G24_3b | G24_4 => (env[0], 1.0, env[1]),
        G24_5 => (env[0], env[1], env[2]),
    }
}

/// g <= 0 exactly on the two strips x1 <= 1 or x1 >= 2.
fn strip_constraint(x1: f64) -> f64 {
    -((x1 - 1.0) * (x1 - 2.0))
}

/// Instantiates the evaluator for one variant.
pub fn make_variant(id: VariantId) -> DcopProblem {
    let eval: Arc<crate::problem::RawEvalFn> = Arc::new(move |x, env, cons| {
        let (p1, p2, s2) = decode_env(id, env);
        let objective = -(p1 * x[0] + p2 * x[1]);
        match id {
            VariantId::G24_6a => {
                cons.push(strip_constraint(x[0]));
            }
            VariantId::G24_6c => {
                // bottom corridor x2 <= 1 connects the two strips
                cons.push(strip_constraint(x[0]).min(x[1] - 1.0));
            }
            _ => {
                let y1 = x[0];
                let y2 = x[1] + s2;
                let y1_2 = y1 * y1;
                let y1_3 = y1_2 * y1;
                let y1_4 = y1_2 * y1_2;
                cons.push(-2.0 * y1_4 + 8.0 * y1_3 - 8.0 * y1_2 + y2 - 2.0);
                cons.push(-4.0 * y1_4 + 32.0 * y1_3 - 88.0 * y1_2 + 96.0 * y1 + y2 - 36.0);
            }
        }
        objective
    });
    DcopProblem::new(id.as_str(), decision_bounds(), id.env_ranges(), eval)
}

/// Registry lookup by string name, e.g. `"g24_3b"`.
pub fn problem_from_name(name: &str) -> Result<DcopProblem> {
    Ok(make_variant(name.parse()?))
}

/// Change severity: `k` drives the sinusoidal objective dynamics, `s` the
/// linear constraint drift (larger `s` means smaller steps).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Severity {
    pub k: f64,
    pub s: f64,
}

impl Severity {
    /// The medium setting used throughout the experiments.
    pub fn medium() -> Self {
        Self { k: 0.5, s: 20.0 }
    }
}

impl Default for Severity {
    fn default() -> Self {
        Self::medium()
    }
}

/// A deterministic sequence of environments, one per change period.
#[derive(Clone, Debug)]
pub struct ChangeSchedule {
    pub variant: VariantId,
    pub severity: Severity,
    pub envs: Vec<EnvVector>,
}

impl ChangeSchedule {
    pub fn num_changes(&self) -> usize {
        self.envs.len()
    }
}

/// Environment at change index `t` (closed form; the alternating variants
/// update p1 on even steps and p2 on odd steps, with p2 starting at 0).
fn env_at(id: VariantId, t: u64, sev: Severity) -> Vec<f64> {
    use std::f64::consts::PI;
    use VariantId::*;
    let k = sev.k;
    let s = sev.s;
    let tf = t as f64;
    let p1_sine = (k * PI * tf + PI / 2.0).sin();
    let p1_alt = {
        let e = (t - t % 2) as f64;
        (k * PI * e / 2.0 + PI / 2.0).sin()
    };
    let p2_alt = if t == 0 {
        0.0
    } else {
        let o = if t % 2 == 1 { t } else { t - 1 } as f64;
        (k * PI * (o - 1.0) / 2.0 + PI / 2.0).sin()
    };
    let s2_shrinking = 2.2 * tf / s; // feasible region tightens over time
    let s2_enlarging = 2.0 - 2.2 * tf / s;
    match id {
        G24_1 | G24_6a | G24_6c => vec![p1_sine],
        G24_2 => vec![p1_alt, p2_alt],
        G24_3 => vec![s2_enlarging],
        G24_3b => vec![p1_sine, s2_enlarging],
        G24_4 => vec![p1_sine, s2_shrinking],
        G24_5 => vec![p1_alt, p2_alt, s2_shrinking],
        G24_7 => vec![s2_shrinking],
    }
}

/// Builds the change schedule for `num_changes` periods at the given
/// severity. The sequence is a deterministic function of
/// (variant, severity, num_changes); entries are clamped into the declared
/// parameter ranges.
pub fn make_schedule(id: VariantId, num_changes: u64, severity: Severity) -> ChangeSchedule {
    assert!(num_changes >= 1, "schedule needs at least one environment");
    let ranges = id.env_ranges();
    let envs = (0..num_changes)
        .map(|t| {
            let mut params = env_at(id, t, severity);
            ranges.clamp(&mut params);
            EnvVector::new(params)
        })
        .collect();
    ChangeSchedule {
        variant: id,
        severity,
        envs,
    }
}

/// Best/worst feasible objective values for one fixed environment,
/// estimated by a dense grid scan plus feasible pattern-search refinement
/// of the best cell. Never charged to any evaluation budget.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub best: f64,
    pub worst: f64,
    /// Argmin of the refined best value; absent for entries loaded from a
    /// persisted cache file.
    pub best_point: Option<SolutionVector>,
    pub grid_points: usize,
}

/// Dense-grid calibration of one environment.
///
/// `grid_points` is the number of samples per axis. Ties on the grid keep
/// the first point in scan order; refinement only accepts strictly better
/// feasible points, so degenerate (flat) objectives stay at the grid argmin.
pub fn calibrate(
    problem: &DcopProblem,
    env: &EnvVector,
    grid_points: usize,
) -> Result<Calibration> {
    assert!(grid_points >= 2);
    let bounds = problem.x_bounds();
    let dim = bounds.dim();
    assert_eq!(dim, 2, "grid calibration supports 2-D decision spaces");

    let step0 = bounds.range(0) / (grid_points - 1) as f64;
    let step1 = bounds.range(1) / (grid_points - 1) as f64;

    let mut cons = Vec::new();
    let mut best: Option<(f64, [f64; 2])> = None;
    let mut worst: Option<f64> = None;
    let mut x = [0.0f64; 2];
    for i in 0..grid_points {
        x[0] = bounds.lower(0) + step0 * i as f64;
        for j in 0..grid_points {
            x[1] = bounds.lower(1) + step1 * j as f64;
            let obj = problem.evaluate_raw(&x, &env.params, &mut cons, None);
            let violation: f64 = cons.iter().map(|g| g.max(0.0)).sum();
            if violation == 0.0 {
                if best.map_or(true, |(b, _)| obj < b) {
                    best = Some((obj, x));
                }
                if worst.map_or(true, |w| obj > w) {
                    worst = Some(obj);
                }
            }
        }
    }

    let (grid_best, start) = best.ok_or_else(|| CcdoError::NoFeasiblePoint {
        problem: problem.name().to_string(),
        env: env.to_string(),
    })?;
    let worst = worst.expect("worst exists whenever best exists");

    // Pattern-search refinement from the best grid cell, staying feasible.
    let mut current = start;
    let mut current_obj = grid_best;
    let mut steps = [step0, step1];
    let tol = 1e-12 * bounds.range(0).max(bounds.range(1));
    for _ in 0..CALIBRATION_REFINE_ITERS {
        let mut improved = false;
        for c in 0..2 {
            for dir in [-1.0, 1.0] {
                let mut cand = current;
                cand[c] = (cand[c] + dir * steps[c]).clamp(bounds.lower(c), bounds.upper(c));
                if cand[c] == current[c] {
                    continue;
                }
                let obj = problem.evaluate_raw(&cand, &env.params, &mut cons, None);
                let violation: f64 = cons.iter().map(|g| g.max(0.0)).sum();
                if violation == 0.0 && obj < current_obj {
                    current = cand;
                    current_obj = obj;
                    improved = true;
                }
            }
        }
        if !improved {
            steps[0] *= 0.5;
            steps[1] *= 0.5;
            if steps[0] < tol && steps[1] < tol {
                break;
            }
        }
    }

    Ok(Calibration {
        best: current_obj,
        worst,
        best_point: Some(SolutionVector::new(current.to_vec())),
        grid_points,
    })
}

fn cache_key(problem_name: &str, env: &EnvVector) -> String {
    let mut key = String::from(problem_name);
    for &p in &env.params {
        let mut r = (p * 1e12).round() / 1e12;
        if r == 0.0 {
            r = 0.0; // normalize -0.0
        }
        key.push(' ');
        key.push_str(&format!("{r:.12}"));
    }
    key
}

/// Concurrent-read calibration cache keyed by (variant name, environment
/// rounded to 12 decimals), with optional flat-text persistence.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    inner: RwLock<HashMap<String, Calibration>>,
}

impl CalibrationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, problem_name: &str, env: &EnvVector) -> Option<Calibration> {
        self.inner
            .read()
            .unwrap()
            .get(&cache_key(problem_name, env))
            .cloned()
    }

    pub fn insert(&self, problem_name: &str, env: &EnvVector, cal: Calibration) {
        self.inner
            .write()
            .unwrap()
            .insert(cache_key(problem_name, env), cal);
    }

    /// Returns the cached calibration or computes and stores it at the
    /// default grid resolution.
    pub fn get_or_compute(&self, problem: &DcopProblem, env: &EnvVector) -> Result<Calibration> {
        if let Some(hit) = self.get(problem.name(), env) {
            return Ok(hit);
        }
        let cal = calibrate(problem, env, CALIBRATION_GRID_POINTS)?;
        self.insert(problem.name(), env, cal.clone());
        Ok(cal)
    }

    /// Writes the cache as text, one record per line:
    /// `<variant> <param...> <best> <worst>`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.inner.read().unwrap();
        let mut keys: Vec<&String> = map.keys().collect();
        keys.sort();
        let mut out = fs::File::create(path)?;
        writeln!(
            out,
            "# calibration cache: grid_points={CALIBRATION_GRID_POINTS} refine_iters={CALIBRATION_REFINE_ITERS}"
        )?;
        for k in keys {
            let cal = &map[k];
            writeln!(out, "{} {} {}", k, cal.best, cal.worst)?;
        }
        Ok(())
    }

    /// Loads records produced by [`CalibrationCache::save`]. Loaded entries
    /// carry no argmin point.
    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path)?;
        let mut map = HashMap::new();
        for line in BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(CcdoError::Parse(format!(
                    "calibration record needs at least 4 fields: {line}"
                )));
            }
            let key = fields[..fields.len() - 2].join(" ");
            let best: f64 = fields[fields.len() - 2]
                .parse()
                .map_err(|_| CcdoError::Parse(format!("bad best value in: {line}")))?;
            let worst: f64 = fields[fields.len() - 1]
                .parse()
                .map_err(|_| CcdoError::Parse(format!("bad worst value in: {line}")))?;
            map.insert(
                key,
                Calibration {
                    best,
                    worst,
                    best_point: None,
                    grid_points: CALIBRATION_GRID_POINTS,
                },
            );
        }
        Ok(Self {
            inner: RwLock::new(map),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::EnvVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent brute-force best/worst feasible scan, kept free of the
    /// calibrate() code path so it can serve as its oracle.
    fn brute_best_worst(
        problem: &DcopProblem,
        env: &EnvVector,
        n: usize,
    ) -> Option<(f64, f64, Vec<f64>)> {
        let b = problem.x_bounds();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut worst: Option<f64> = None;
        let mut cons = Vec::new();
        for i in 0..n {
            let x0 = b.lower(0) + b.range(0) * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let x1 = b.lower(1) + b.range(1) * j as f64 / (n - 1) as f64;
                let xs = [x0, x1];
                let obj = problem.evaluate_raw(&xs, &env.params, &mut cons, None);
                if cons.iter().all(|&g| g <= 0.0) {
                    if best.as_ref().map_or(true, |(bv, _)| obj < *bv) {
                        best = Some((obj, xs.to_vec()));
                    }
                    if worst.map_or(true, |w| obj > w) {
                        worst = Some(obj);
                    }
                }
            }
        }
        best.map(|(bv, bp)| (bv, worst.unwrap(), bp))
    }

    #[test]
    fn static_base_optimum_matches_known_value() {
        // G24_1 at p1 = 1 reduces to the static base problem.
        let p = make_variant(VariantId::G24_1);
        let env = EnvVector::new(vec![1.0]);
        let cal = calibrate(&p, &env, CALIBRATION_GRID_POINTS).unwrap();
        assert!(
            (cal.best - (-5.508013)).abs() < 1e-4,
            "best feasible {} should match the known static optimum",
            cal.best
        );
        let point = cal.best_point.unwrap();
        assert!((point.coords[0] - 2.329520).abs() < 1e-3);
        assert!((point.coords[1] - 3.178493).abs() < 1e-3);
        assert!(cal.best <= cal.worst);
    }

    #[test]
    fn calibrate_agrees_with_independent_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for id in [VariantId::G24_1, VariantId::G24_4, VariantId::G24_6c] {
            let p = make_variant(id);
            let env = EnvVector::new(p.env_ranges().sample(&mut rng));
            let cal = calibrate(&p, &env, CALIBRATION_GRID_POINTS).unwrap();
            let (b, w, _) = brute_best_worst(&p, &env, 700).unwrap();
            // the oracle grid is coarser; agreement within its cell scale
            assert!(
                cal.best <= b + 1e-9,
                "{id}: refined best {} must not lose to oracle {}",
                cal.best,
                b
            );
            assert!((cal.best - b).abs() < 2e-2, "{id}: best mismatch");
            assert!((cal.worst - w).abs() < 2e-2, "{id}: worst mismatch");
        }
    }

    #[test]
    fn calibrate_is_deterministic() {
        let p = make_variant(VariantId::G24_3);
        let env = EnvVector::new(vec![0.9]);
        let a = calibrate(&p, &env, 501).unwrap();
        let b = calibrate(&p, &env, 501).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schedule_length_and_ranges() {
        for id in VariantId::all() {
            let sched = make_schedule(id, 12, Severity::medium());
            assert_eq!(sched.envs.len(), 12);
            let ranges = id.env_ranges();
            for env in &sched.envs {
                assert!(
                    ranges.contains(&env.params),
                    "{id}: schedule entry {env} outside declared ranges"
                );
            }
        }
        let single = make_schedule(VariantId::G24_1, 1, Severity::medium());
        assert_eq!(single.envs.len(), 1);
    }

    #[test]
    fn consecutive_schedule_entries_differ() {
        for id in VariantId::all() {
            let sched = make_schedule(id, 12, Severity::medium());
            for w in sched.envs.windows(2) {
                assert_ne!(w[0], w[1], "{id}: degenerate consecutive environments");
            }
        }
    }

    #[test]
    fn fixed_objective_variants_ignore_env_in_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in VariantId::all().into_iter().filter(|v| !v.objective_dynamic()) {
            let p = make_variant(id);
            for _ in 0..100 {
                let x = SolutionVector::new(p.x_bounds().sample(&mut rng));
                let e1 = EnvVector::new(p.env_ranges().sample(&mut rng));
                let e2 = EnvVector::new(p.env_ranges().sample(&mut rng));
                let a = p.evaluate(&x, &e1, None);
                let b = p.evaluate(&x, &e2, None);
                assert_eq!(a.objective, b.objective, "{id}: objective not fixed");
            }
        }
    }

    #[test]
    fn fixed_constraint_variants_ignore_env_in_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for id in VariantId::all()
            .into_iter()
            .filter(|v| !v.constraint_dynamic())
        {
            let p = make_variant(id);
            for _ in 0..100 {
                let x = SolutionVector::new(p.x_bounds().sample(&mut rng));
                let e1 = EnvVector::new(p.env_ranges().sample(&mut rng));
                let e2 = EnvVector::new(p.env_ranges().sample(&mut rng));
                let a = p.evaluate(&x, &e1, None);
                let b = p.evaluate(&x, &e2, None);
                assert_eq!(
                    a.constraint_values, b.constraint_values,
                    "{id}: constraints not fixed"
                );
            }
        }
    }

    #[test]
    fn random_envs_evaluate_within_ranges() {
        // spot check of the 1e5-sample containment invariant (full volume
        // exercised in the acceptance suite)
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for id in VariantId::all() {
            let p = make_variant(id);
            let ranges = p.env_ranges();
            for _ in 0..2000 {
                let env = EnvVector::new(ranges.sample(&mut rng));
                assert!(ranges.contains(&env.params));
                let x = SolutionVector::new(p.x_bounds().sample(&mut rng));
                let ev = p.evaluate(&x, &env, None);
                assert!(ev.objective.is_finite());
                assert!(ev.constraint_values.iter().all(|g| g.is_finite()));
            }
        }
    }

    #[test]
    fn unknown_variant_is_configuration_error() {
        assert!(problem_from_name("g24_9000").is_err());
        assert!(problem_from_name("g24_3b").is_ok());
    }

    #[test]
    fn alternating_dynamics_move_one_parameter_per_step() {
        let sched = make_schedule(VariantId::G24_2, 12, Severity::medium());
        for (t, w) in sched.envs.windows(2).enumerate() {
            let moved: Vec<usize> = (0..2)
                .filter(|&c| w[0].params[c] != w[1].params[c])
                .collect();
            assert_eq!(moved.len(), 1, "step {t} moved {moved:?}");
        }
    }

    #[test]
    fn cache_roundtrip() {
        let cache = CalibrationCache::new();
        let p = make_variant(VariantId::G24_7);
        let env = EnvVector::new(vec![0.55]);
        let a = cache.get_or_compute(&p, &env).unwrap();
        let b = cache.get_or_compute(&p, &env).unwrap();
        assert_eq!(a, b);
        assert_eq!(cache.len(), 1);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cal.txt");
        cache.save(&path).unwrap();
        let loaded = CalibrationCache::load(&path).unwrap();
        let c = loaded.get(p.name(), &env).unwrap();
        assert_eq!(c.best, a.best);
        assert_eq!(c.worst, a.worst);
    }

    #[test]
    fn strip_variants_have_disconnected_feasible_strips() {
        let p = make_variant(VariantId::G24_6a);
        let env = EnvVector::new(vec![0.3]);
        let feasible = |x1: f64, x2: f64| {
            p.evaluate(&SolutionVector::new(vec![x1, x2]), &env, None)
                .feasible
        };
        assert!(feasible(0.5, 3.0));
        assert!(feasible(2.5, 3.0));
        assert!(!feasible(1.5, 3.0));
        // the corridor variant opens the gap at low x2 only
        let pc = make_variant(VariantId::G24_6c);
        let feasible_c = |x1: f64, x2: f64| {
            pc.evaluate(&SolutionVector::new(vec![x1, x2]), &env, None)
                .feasible
        };
        assert!(feasible_c(1.5, 0.5));
        assert!(!feasible_c(1.5, 3.0));
    }

    #[test]
    fn g24_7_objective_fixed_under_s2() {
        let p = make_variant(VariantId::G24_7);
        let x = SolutionVector::new(vec![1.7, 2.2]);
        let a = p.evaluate(&x, &EnvVector::new(vec![0.1]), None);
        let b = p.evaluate(&x, &EnvVector::new(vec![1.9]), None);
        assert_eq!(a.objective, b.objective);
        assert_ne!(a.constraint_values, b.constraint_values);
    }

    #[test]
    fn schedule_is_pure_function_of_inputs() {
        let a = make_schedule(VariantId::G24_5, 10, Severity::medium());
        let b = make_schedule(VariantId::G24_5, 10, Severity::medium());
        assert_eq!(a.envs, b.envs);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let _ = rng.gen::<u64>(); // unrelated RNG state must not matter
        let c = make_schedule(VariantId::G24_5, 10, Severity::medium());
        assert_eq!(a.envs, c.envs);
    }
}
