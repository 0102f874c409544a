//! Job-driven list scheduling on identical machines.
//!
//! A schedule is produced in two steps. First an order key `M_j` is derived
//! from the LP solution:
//!
//! * general sizes: `M_j = C_j - (1 - θ) p_j` with `θ` uniform on `(0, 1/2]`;
//! * unit sizes: `M_j` is the first `t` where job `j`'s cumulative LP mass
//!   reaches `θ`, with `θ` uniform on `(0, 1]`.
//!
//! Then [`list_schedule`] inserts jobs in key order, each at the earliest
//! integer start after its predecessors finish that keeps at most `m` jobs
//! running at once, and assigns machines greedily.
//!
//! Equal keys are broken by precedence depth and then job id; jobs are only
//! taken once all their predecessors are placed.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::instance::{depth, intervals_to_machines, objective, Instance, Interval, IntervalSet, Model, Rational, Schedule};
use crate::lp::FracIdentical;
use crate::seed::{rng_from_seed, split_seed, unit_open_closed};

/// Tolerance for comparing order keys across an edge.
const KEY_TOL: f64 = 1e-9;

pub fn mtheta_general(inst: &Instance, frac: &FracIdentical, theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::ThetaOutOfRange { theta, range: "(0, 1/2]" });
    }
    Ok((0..inst.n())
        .map(|j| frac.completion[j] - (1.0 - theta) * inst.size(j) as f64)
        .collect())
}

/// Quantile keys for unit-size jobs; cumulative mass is compared against
/// `θ - eps`.
pub fn mtheta_unit(inst: &Instance, frac: &FracIdentical, theta: f64, eps: f64) -> Result<Vec<f64>> {
    if let Some(j) = (0..inst.n()).find(|&j| inst.size(j) != 1) {
        return Err(Error::NonUnitSize { job: j, size: inst.size(j) });
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::ThetaOutOfRange { theta, range: "(0, 1]" });
    }
    (0..inst.n())
        .map(|j| {
            let row = &frac.x[j];
            let mut acc = 0.0;
            for (t, v) in row.iter().enumerate() {
                acc += v;
                if acc >= theta - eps {
                    return Ok(t as f64);
                }
            }
            row.iter().rposition(|&v| v > 0.0).map(|t| t as f64).ok_or(Error::EmptyJob { job: j })
        })
        .collect()
}

/// Runs job-driven list scheduling and returns the placed intervals.
pub fn list_schedule_intervals(inst: &Instance, keys: &[f64]) -> Result<IntervalSet> {
    inst.require_model(Model::Identical)?;
    let n = inst.n();
    let m = inst.machines;
    for &(a, b) in inst.dag.edges() {
        if keys[a] > keys[b] + KEY_TOL {
            return Err(Error::OrderContract { from: a, to: b, key_from: keys[a], key_to: keys[b] });
        }
    }
    let depth = depth(&inst.dag)?;
    let mut missing: Vec<usize> = (0..n).map(|j| inst.dag.preds(j).len()).collect();
    let mut done = vec![false; n];
    let mut end = vec![0i64; n];
    // occupancy[u] counts placed intervals covering the slot (u, u+1].
    let mut occupancy: Vec<usize> = Vec::new();
    let mut intervals = Vec::with_capacity(n);

    for _ in 0..n {
        let j = (0..n)
            .filter(|&j| !done[j] && missing[j] == 0)
            .min_by(|&a, &b| {
                keys[a]
                    .partial_cmp(&keys[b])
                    .unwrap_or(Ordering::Equal)
                    .then(depth[a].cmp(&depth[b]))
                    .then(a.cmp(&b))
            })
            .ok_or(Error::Cycle)?;
        let p = inst.size(j);
        let release = inst.dag.preds(j).iter().map(|&k| end[k]).max().unwrap_or(0);
        let mut s = release;
        while let Some(u) = (s..s + p).find(|&u| occupancy.get(u as usize).copied().unwrap_or(0) >= m) {
            s = u + 1;
        }
        if occupancy.len() < (s + p) as usize {
            occupancy.resize((s + p) as usize, 0);
        }
        for u in s..s + p {
            occupancy[u as usize] += 1;
        }
        end[j] = s + p;
        done[j] = true;
        for &k in inst.dag.succs(j) {
            missing[k] -= 1;
        }
        intervals.push(Interval { job: j, start: s, end: s + p });
    }
    Ok(IntervalSet::new(intervals))
}

/// Job-driven list scheduling followed by greedy machine assignment.
pub fn list_schedule(inst: &Instance, keys: &[f64]) -> Result<Schedule> {
    let ivals = list_schedule_intervals(inst, keys)?;
    intervals_to_machines(&ivals, inst.machines)
}

/// How θ is drawn across trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaMode {
    /// Independent uniform draws from the trial seeds.
    Random,
    /// `θ_k = range · (k + 1) / trials` for trial `k`.
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub mode: ThetaMode,
}

impl TrialConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        TrialConfig { seed, trials, mode: ThetaMode::Random }
    }

    fn theta(&self, trial: usize, range: f64) -> f64 {
        match self.mode {
            ThetaMode::Random => {
                let mut rng = rng_from_seed(split_seed(self.seed, trial as u64));
                range * unit_open_closed(&mut rng)
            }
            ThetaMode::Grid => range * (trial + 1) as f64 / self.trials as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaTrial {
    pub trial: usize,
    pub theta: f64,
    pub cost: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaOutcome {
    /// Cheapest schedule, earliest trial on ties.
    pub best: Schedule,
    pub best_cost: Rational,
    pub trials: Vec<ThetaTrial>,
}

impl ThetaOutcome {
    pub fn mean_cost(&self) -> f64 {
        let total: f64 = self.trials.iter().map(|t| to_f64(t.cost)).sum();
        total / self.trials.len() as f64
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn run_trials(
    inst: &Instance,
    cfg: &TrialConfig,
    range: f64,
    keys_for: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<ThetaOutcome> {
    if cfg.trials == 0 {
        return Err(Error::Internal("at least one trial is required".into()));
    }
    let mut best: Option<(Schedule, Rational)> = None;
    let mut trials = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let theta = cfg.theta(trial, range);
        let sched = list_schedule(inst, &keys_for(theta)?)?;
        let cost = objective(inst, &sched);
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((sched, cost));
        }
        trials.push(ThetaTrial { trial, theta, cost });
    }
    let (best, best_cost) = best.expect("trials > 0");
    Ok(ThetaOutcome { best, best_cost, trials })
}

/// Randomized rounding for general sizes: `θ` on `(0, 1/2]`, keys
/// `C_j - (1 - θ) p_j`.
pub fn schedule_identical_wc(inst: &Instance, frac: &FracIdentical, cfg: &TrialConfig) -> Result<ThetaOutcome> {
    inst.require_model(Model::Identical)?;
    run_trials(inst, cfg, 0.5, |theta| mtheta_general(inst, frac, theta))
}

/// Randomized rounding for unit sizes: `θ` on `(0, 1]`, quantile keys.
pub fn schedule_identical_unit_wc(
    inst: &Instance,
    frac: &FracIdentical,
    cfg: &TrialConfig,
    eps: f64,
) -> Result<ThetaOutcome> {
    inst.require_model(Model::Identical)?;
    if let Some(j) = (0..inst.n()).find(|&j| inst.size(j) != 1) {
        return Err(Error::NonUnitSize { job: j, size: inst.size(j) });
    }
    run_trials(inst, cfg, 1.0, |theta| mtheta_unit(inst, frac, theta, eps))
}

/// Edges `(j, j')` with `C_j + p_{j'} > C_{j'} + tol`.
pub fn completion_gap_violations(inst: &Instance, frac: &FracIdentical, tol: f64) -> Vec<(usize, usize)> {
    inst.dag
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| frac.completion[a] + inst.size(b) as f64 > frac.completion[b] + tol)
        .collect()
}

/// Positions `(j, t)` with `t < a_j` and `x_{j,t} > tol`, where `a_j` is the
/// precedence depth of `j`. Empty on every solution of a unit-size instance.
pub fn depth_violations(inst: &Instance, frac: &FracIdentical, tol: f64) -> Result<Vec<(usize, usize)>> {
    let a = depth(&inst.dag)?;
    let mut out = Vec::new();
    for (j, row) in frac.x.iter().enumerate() {
        for (t, &v) in row.iter().enumerate().take(a[j]) {
            if v > tol {
                out.push((j, t));
            }
        }
    }
    Ok(out)
}
