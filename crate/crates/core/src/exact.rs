//! Exact optima for small instances.
//!
//! * Identical machines: depth-first branch and bound over precedence-feasible
//!   job orders. Each job is inserted at the earliest integer start that keeps
//!   at most `m` jobs running. Inserting the jobs of any optimal schedule in
//!   order of their start times never starts a job later than in that
//!   schedule, so the search is exact.
//! * Related machines: the same search over `(job, machine)` choices, each job
//!   appended to its machine as early as its predecessors allow.
//! * Unrelated machines: every job-to-machine map, each machine sequenced by
//!   Smith's rule.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::instance::{intervals_to_machines, objective, Instance, Interval, IntervalSet, Model, Rational, Schedule, ScheduledJob};

pub const DEFAULT_CAP_IDENTICAL: usize = 9;
pub const DEFAULT_CAP_RELATED: usize = 8;
pub const DEFAULT_CAP_UNRELATED: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub opt_value: Rational,
    pub witness: Schedule,
    pub nodes_explored: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Makespan,
    WeightedCompletion,
}

fn check_cap(inst: &Instance, cap: usize) -> Result<()> {
    if inst.n() > cap {
        Err(Error::CapExceeded { n: inst.n(), cap })
    } else {
        Ok(())
    }
}

/// Longest chain of predecessor sizes ending right before each job.
fn heads(inst: &Instance, dur: impl Fn(usize) -> i128) -> Result<Vec<i128>> {
    let mut head = vec![0i128; inst.n()];
    for j in inst.dag.topological_order()? {
        for &k in inst.dag.succs(j) {
            head[k] = head[k].max(head[j] + dur(j));
        }
    }
    Ok(head)
}

/// Smallest integer `s >= release` with fewer than `m` jobs in every slot of
/// `(s, s + p]`; `occ[u]` counts jobs in slot `(u, u + 1]`.
fn earliest_start(occ: &[usize], m: usize, release: i64, p: i64) -> i64 {
    let mut s = release;
    while let Some(u) = (s..s + p).find(|&u| occ.get(u as usize).copied().unwrap_or(0) >= m) {
        s = u + 1;
    }
    s
}

struct IdenticalSearch<'a> {
    inst: &'a Instance,
    head: Vec<i128>,
    order: Vec<usize>,
    best: i128,
    best_starts: Vec<i64>,
    nodes: u64,
}

impl IdenticalSearch<'_> {
    fn run(&mut self, starts: &mut Vec<Option<i64>>, occ: &mut Vec<usize>, cost: i128, placed: usize) {
        self.nodes += 1;
        let inst = self.inst;
        let n = inst.n();
        if placed == n {
            if cost < self.best {
                self.best = cost;
                self.best_starts = starts.iter().map(|s| s.expect("all placed")).collect();
            }
            return;
        }
        let end = |k: usize, starts: &Vec<Option<i64>>| starts[k].map(|s| s + inst.size(k));
        let mut bound = cost;
        for j in 0..n {
            if starts[j].is_none() {
                let placed_pred = inst.dag.preds(j).iter().filter_map(|&k| end(k, starts)).max().unwrap_or(0);
                let r = self.head[j].max(placed_pred as i128);
                bound += inst.weight(j) as i128 * (r + inst.size(j) as i128);
            }
        }
        if bound >= self.best {
            return;
        }
        for idx in 0..n {
            let j = self.order[idx];
            if starts[j].is_some() || inst.dag.preds(j).iter().any(|&k| starts[k].is_none()) {
                continue;
            }
            let p = inst.size(j);
            let release = inst.dag.preds(j).iter().filter_map(|&k| end(k, starts)).max().unwrap_or(0);
            let s = earliest_start(occ, inst.machines, release, p);
            if occ.len() < (s + p) as usize {
                occ.resize((s + p) as usize, 0);
            }
            for u in s..s + p {
                occ[u as usize] += 1;
            }
            starts[j] = Some(s);
            self.run(starts, occ, cost + inst.weight(j) as i128 * (s + p) as i128, placed + 1);
            starts[j] = None;
            for u in s..s + p {
                occ[u as usize] -= 1;
            }
        }
    }
}

/// Smith order: decreasing `w/p`, ties by id.
fn smith_cmp(wa: i64, pa: i64, a: usize, wb: i64, pb: i64, b: usize) -> Ordering {
    (wb as i128 * pa as i128).cmp(&(wa as i128 * pb as i128)).then(a.cmp(&b))
}

fn schedule_from_starts(inst: &Instance, starts: &[i64]) -> Result<Schedule> {
    let ivals = IntervalSet::new(
        starts
            .iter()
            .enumerate()
            .map(|(j, &s)| Interval { job: j, start: s, end: s + inst.size(j) })
            .collect(),
    );
    intervals_to_machines(&ivals, inst.machines)
}

pub fn exact_identical(inst: &Instance, cap: usize) -> Result<ExactResult> {
    inst.require_model(Model::Identical)?;
    check_cap(inst, cap)?;
    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| smith_cmp(inst.weight(a), inst.size(a), a, inst.weight(b), inst.size(b), b));
    let mut search = IdenticalSearch {
        inst,
        head: heads(inst, |j| inst.size(j) as i128)?,
        order,
        best: i128::MAX,
        best_starts: Vec::new(),
        nodes: 0,
    };
    search.run(&mut vec![None; n], &mut Vec::new(), 0, 0);
    let witness = schedule_from_starts(inst, &search.best_starts)?;
    Ok(ExactResult { opt_value: Rational::from_integer(search.best), witness, nodes_explored: search.nodes })
}

/// Optimum over every tuple of integer starts in `[0, T - p_j]`, found by
/// depth-first search in topological order. Used to cross-check
/// [`exact_identical`]; exponential in `T`, intended for `n <= 6`.
pub fn exact_identical_by_starts(inst: &Instance) -> Result<Rational> {
    inst.require_model(Model::Identical)?;
    let topo = inst.dag.topological_order()?;
    let n = inst.n();
    let mut starts = vec![0i64; n];
    let mut occ = vec![0usize; inst.horizon.max(0) as usize];
    let mut best = i128::MAX;
    let suffix_min: Vec<i128> = (0..=n)
        .map(|k| topo[k..].iter().map(|&j| inst.weight(j) as i128 * inst.size(j) as i128).sum())
        .collect();

    fn go(
        inst: &Instance,
        topo: &[usize],
        k: usize,
        starts: &mut [i64],
        occ: &mut [usize],
        cost: i128,
        suffix_min: &[i128],
        best: &mut i128,
    ) {
        if cost + suffix_min[k] >= *best {
            return;
        }
        if k == topo.len() {
            *best = cost;
            return;
        }
        let j = topo[k];
        let p = inst.size(j);
        let release = inst.dag.preds(j).iter().map(|&q| starts[q] + inst.size(q)).max().unwrap_or(0);
        for s in release..=inst.horizon - p {
            if (s..s + p).any(|u| occ[u as usize] >= inst.machines) {
                continue;
            }
            for u in s..s + p {
                occ[u as usize] += 1;
            }
            starts[j] = s;
            go(inst, topo, k + 1, starts, occ, cost + inst.weight(j) as i128 * (s + p) as i128, suffix_min, best);
            for u in s..s + p {
                occ[u as usize] -= 1;
            }
        }
    }
    go(inst, &topo, 0, &mut starts, &mut occ, 0, &suffix_min, &mut best);
    Ok(Rational::from_integer(best))
}

struct RelatedSearch<'a> {
    inst: &'a Instance,
    objective: Objective,
    /// `dur[i][j]` in ticks of `1 / scale`.
    dur: &'a [Vec<i128>],
    min_dur: Vec<i128>,
    head: Vec<i128>,
    order: Vec<usize>,
    best: i128,
    best_plan: Vec<(usize, i128)>,
    nodes: u64,
}

impl RelatedSearch<'_> {
    fn value(&self, cost: i128, makespan: i128) -> i128 {
        match self.objective {
            Objective::Makespan => makespan,
            Objective::WeightedCompletion => cost,
        }
    }

    fn run(&mut self, plan: &mut Vec<Option<(usize, i128)>>, free: &mut Vec<i128>, cost: i128, makespan: i128, placed: usize) {
        self.nodes += 1;
        let inst = self.inst;
        let n = inst.n();
        if placed == n {
            let v = self.value(cost, makespan);
            if v < self.best {
                self.best = v;
                self.best_plan = plan.iter().map(|e| e.expect("all placed")).collect();
            }
            return;
        }
        let dur = self.dur;
        let end_of = |k: usize, plan: &Vec<Option<(usize, i128)>>| plan[k].map(|(i, s)| s + dur[i][k]);
        let mut wc_bound = cost;
        let mut cmax_bound = makespan;
        for j in 0..n {
            if plan[j].is_none() {
                let placed_pred = inst.dag.preds(j).iter().filter_map(|&k| end_of(k, plan)).max().unwrap_or(0);
                let c = self.head[j].max(placed_pred) + self.min_dur[j];
                wc_bound += inst.weight(j) as i128 * c;
                cmax_bound = cmax_bound.max(c);
            }
        }
        if self.value(wc_bound, cmax_bound) >= self.best {
            return;
        }
        for idx in 0..n {
            let j = self.order[idx];
            if plan[j].is_some() || inst.dag.preds(j).iter().any(|&k| plan[k].is_none()) {
                continue;
            }
            let release = inst.dag.preds(j).iter().filter_map(|&k| end_of(k, plan)).max().unwrap_or(0);
            for i in 0..inst.machines {
                // Empty machines of equal speed are interchangeable.
                if free[i] == 0 && (0..i).any(|q| free[q] == 0 && inst.speeds[q] == inst.speeds[i]) {
                    continue;
                }
                let s = free[i].max(release);
                let e = s + self.dur[i][j];
                let saved = free[i];
                free[i] = e;
                plan[j] = Some((i, s));
                self.run(plan, free, cost + inst.weight(j) as i128 * e, makespan.max(e), placed + 1);
                plan[j] = None;
                free[i] = saved;
            }
        }
    }
}

pub fn exact_related(inst: &Instance, objective: Objective, cap: usize) -> Result<ExactResult> {
    inst.require_model(Model::Related)?;
    check_cap(inst, cap)?;
    let n = inst.n();
    let m = inst.machines;
    let scale = inst.speeds.iter().fold(1i128, |acc, s| acc.lcm(s.numer()));
    let dur: Vec<Vec<i128>> = (0..m)
        .map(|i| {
            let s = inst.speeds[i];
            (0..n).map(|j| inst.size(j) as i128 * s.denom() * (scale / s.numer())).collect()
        })
        .collect();
    let min_dur: Vec<i128> = (0..n).map(|j| (0..m).map(|i| dur[i][j]).min().unwrap_or(0)).collect();
    let head = heads(inst, |j| min_dur[j])?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| smith_cmp(inst.weight(a), inst.size(a), a, inst.weight(b), inst.size(b), b));
    let mut search = RelatedSearch {
        inst,
        objective,
        dur: &dur,
        min_dur,
        head,
        order,
        best: i128::MAX,
        best_plan: Vec::new(),
        nodes: 0,
    };
    search.run(&mut vec![None; n], &mut vec![0; m], 0, 0, 0);
    let witness = Schedule {
        entries: search
            .best_plan
            .iter()
            .enumerate()
            .map(|(j, &(i, s))| ScheduledJob {
                job: j,
                machine: i,
                start: Rational::new(s, scale),
                end: Rational::new(s + dur[i][j], scale),
            })
            .collect(),
    };
    Ok(ExactResult { opt_value: Rational::new(search.best, scale), witness, nodes_explored: search.nodes })
}

/// Jobs sorted by Smith's rule: decreasing `w/p`, ties by id.
pub fn smith_order(weights: &[i64], sizes: &[i64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| smith_cmp(weights[a], sizes[a], a, weights[b], sizes[b], b));
    order
}

/// `Σ w_j C_j` of running jobs back to back in `order` from time 0.
pub fn sequence_cost(weights: &[i64], sizes: &[i64], order: &[usize]) -> i128 {
    let mut t = 0i128;
    let mut cost = 0i128;
    for &j in order {
        t += sizes[j] as i128;
        cost += weights[j] as i128 * t;
    }
    cost
}

/// Single-machine optimum by trying every permutation.
pub fn single_machine_by_permutations(weights: &[i64], sizes: &[i64]) -> i128 {
    fn go(weights: &[i64], sizes: &[i64], used: &mut Vec<bool>, t: i128, cost: i128, best: &mut i128) {
        if used.iter().all(|&u| u) {
            *best = (*best).min(cost);
            return;
        }
        for j in 0..weights.len() {
            if !used[j] {
                used[j] = true;
                let e = t + sizes[j] as i128;
                go(weights, sizes, used, e, cost + weights[j] as i128 * e, best);
                used[j] = false;
            }
        }
    }
    let mut best = i128::MAX;
    go(weights, sizes, &mut vec![false; weights.len()], 0, 0, &mut best);
    if weights.is_empty() {
        0
    } else {
        best
    }
}

pub fn exact_unrelated(inst: &Instance, cap: usize) -> Result<ExactResult> {
    inst.require_model(Model::Unrelated)?;
    check_cap(inst, cap)?;
    let n = inst.n();
    let m = inst.machines;
    let mut choice = vec![0usize; n];
    let mut best: Option<(i128, Vec<usize>)> = None;
    let mut nodes = 0u64;
    let options: Vec<Vec<usize>> = (0..n).map(|j| (0..m).filter(|&i| inst.pmatrix[i][j].is_some()).collect()).collect();
    if options.iter().any(Vec::is_empty) {
        let j = options.iter().position(Vec::is_empty).expect("checked");
        return Err(Error::InvalidInstance(vec![crate::instance::InstanceViolation::JobUnschedulable { job: j }]));
    }
    let mut idx = vec![0usize; n];
    loop {
        nodes += 1;
        for j in 0..n {
            choice[j] = options[j][idx[j]];
        }
        let cost: i128 = (0..m)
            .map(|i| {
                let jobs: Vec<usize> = (0..n).filter(|&j| choice[j] == i).collect();
                let w: Vec<i64> = jobs.iter().map(|&j| inst.weight(j)).collect();
                let p: Vec<i64> = jobs.iter().map(|&j| inst.pmatrix[i][j].expect("allowed")).collect();
                sequence_cost(&w, &p, &smith_order(&w, &p))
            })
            .sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, choice.clone()));
        }
        // Odometer increment.
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let (cost, machine_of) = best.unwrap_or((0, Vec::new()));
    let witness = crate::unrelated::pack(inst, &machine_of, |i, j| {
        // Position in the Smith order of machine i.
        let jobs: Vec<usize> = (0..n).filter(|&k| machine_of[k] == i).collect();
        let w: Vec<i64> = jobs.iter().map(|&k| inst.weight(k)).collect();
        let p: Vec<i64> = jobs.iter().map(|&k| inst.pmatrix[i][k].expect("allowed")).collect();
        let order = smith_order(&w, &p);
        order.iter().position(|&o| jobs[o] == j).expect("job on machine") as f64
    });
    debug_assert_eq!(objective(inst, &witness), Rational::from_integer(cost));
    Ok(ExactResult { opt_value: Rational::from_integer(cost), witness, nodes_explored: nodes })
}

/// Dispatches to the oracle of the instance's model; related instances use
/// the weighted-completion objective.
pub fn exact(inst: &Instance) -> Result<ExactResult> {
    match inst.model {
        Model::Identical => exact_identical(inst, DEFAULT_CAP_IDENTICAL),
        Model::Related => exact_related(inst, Objective::WeightedCompletion, DEFAULT_CAP_RELATED),
        Model::Unrelated => exact_unrelated(inst, DEFAULT_CAP_UNRELATED),
    }
}
