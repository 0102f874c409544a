//! Unrelated machines without precedence constraints.
//!
//! Each LP solution is read as a set of rectangles: job `j` occupies
//! `(s, s + p_ij]` on machine `i` at height `x_{i,j,s}`. A trial of the
//! dependent-rounding algorithm
//!
//! 1. samples, for every edge `(i, j)` with `y_ij > 0`, a start `s_ij` with
//!    probability `x_{i,j,s} / y_ij`, a point `τ_ij` uniform in
//!    `(s_ij, s_ij + p_ij]` and a shift `θ_ij = 0.2(s_ij + φ_ij) + 0.4 y_ij p_ij`;
//! 2. marks an edge bad when `φ_ij + y_ij p_ij < 0.01 p_ij`;
//! 3. attaches a bad edge to the basic block `(2^a, 2^{a+1}]` (`a >= -2`) that
//!    contains `τ_ij`, lies inside `(10 φ_ij, p_ij]` and starts no earlier than
//!    `s_ij + θ_ij`;
//! 4. splits each block's edges into at most ten sets of weight about 1/9,
//!    drops two of ten at random and merges the rest into one group;
//! 5. rounds `y` to one machine per job, keeping every marginal and pairing
//!    edges of the same group so that they are anti-correlated;
//! 6. runs the jobs of each machine back to back in order of `τ + θ`.
//!
//! [`independent_round`] is the simpler baseline: one rectangle per job,
//! sampled with probability `x`, jobs ordered by `τ`.

use std::fmt::Write as _;

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{objective, Instance, Model, Rational, Schedule, ScheduledJob};
use crate::lp::FracUnrelated;
use crate::seed::{rng_from_seed, split_seed, unit_open_closed};

const SNAP: f64 = 1e-12;

/// Randomness drawn for one edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeDraw {
    pub start: i64,
    pub tau: f64,
    pub theta: f64,
}

/// `draws[i][j]` is set for every edge with `y_ij > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RectSample {
    pub draws: Vec<Vec<Option<EdgeDraw>>>,
}

pub fn theta_of(start: i64, phi: f64, y: f64, p: f64) -> f64 {
    0.2 * (start as f64 + phi) + 0.4 * y * p
}

pub fn sample_rects<R: Rng + ?Sized>(inst: &Instance, frac: &FracUnrelated, rng: &mut R) -> RectSample {
    let (m, n) = (inst.machines, inst.n());
    let mut draws = vec![vec![None; n]; m];
    let mut k = 0;
    while k < frac.rects.len() {
        let (i, j) = (frac.rects[k].machine, frac.rects[k].job);
        let end = k + frac.rects[k..].iter().take_while(|r| r.machine == i && r.job == j).count();
        let y = frac.y[i][j];
        let mut target = rng.gen::<f64>() * y;
        let mut start = frac.rects[end - 1].start;
        for r in &frac.rects[k..end] {
            if target < r.x {
                start = r.start;
                break;
            }
            target -= r.x;
        }
        let p = inst.pmatrix[i][j].expect("rectangle on an allowed machine") as f64;
        let tau = start as f64 + p * unit_open_closed(rng);
        draws[i][j] = Some(EdgeDraw { start, tau, theta: theta_of(start, frac.phi[i][j], y, p) });
        k = end;
    }
    RectSample { draws }
}

/// `φ + y·p >= 0.01·p`.
pub fn is_good(phi: f64, y: f64, p: f64) -> bool {
    phi + y * p >= 0.01 * p
}

/// `Some(good)` for every edge with positive `y`.
pub fn classify(inst: &Instance, frac: &FracUnrelated) -> Vec<Vec<Option<bool>>> {
    (0..inst.machines)
        .map(|i| {
            (0..inst.n())
                .map(|j| {
                    (frac.y[i][j] > 0.0).then(|| {
                        let p = inst.pmatrix[i][j].expect("positive y on an allowed machine") as f64;
                        is_good(frac.phi[i][j], frac.y[i][j], p)
                    })
                })
                .collect()
        })
        .collect()
}

/// The block exponent `a >= -2` with `τ ∈ (2^a, 2^{a+1}] ⊆ (10φ, p]` and
/// `s + θ <= 2^a`, if any.
pub fn block_for(p: f64, phi: f64, draw: &EdgeDraw) -> Option<i32> {
    let mut a = -2i32;
    let mut lo = 0.25;
    if draw.tau <= lo {
        return None;
    }
    while draw.tau > 2.0 * lo {
        a += 1;
        lo *= 2.0;
    }
    let fits = lo >= 10.0 * phi && 2.0 * lo <= p;
    let late_enough = draw.start as f64 + draw.theta <= lo;
    (fits && late_enough).then_some(a)
}

/// Block exponent of every bad edge that has one.
pub fn assign_blocks(
    inst: &Instance,
    frac: &FracUnrelated,
    sample: &RectSample,
    flags: &[Vec<Option<bool>>],
) -> Vec<Vec<Option<i32>>> {
    (0..inst.machines)
        .map(|i| {
            (0..inst.n())
                .map(|j| match (flags[i][j], sample.draws[i][j]) {
                    (Some(false), Some(d)) => {
                        block_for(inst.pmatrix[i][j].expect("allowed machine") as f64, frac.phi[i][j], &d)
                    }
                    _ => None,
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub machine: usize,
    pub block: i32,
    pub jobs: Vec<usize>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingScheme {
    pub groups: Vec<Group>,
    /// `(machine, block, weight)` of every nonempty block before dropping.
    pub block_weights: Vec<(usize, i32, f64)>,
    /// `group_of[i][j]`: index into `groups`, `None` when ungrouped.
    pub group_of: Vec<Vec<Option<usize>>>,
}

impl GroupingScheme {
    pub fn empty(m: usize, n: usize) -> Self {
        GroupingScheme { groups: Vec::new(), block_weights: Vec::new(), group_of: vec![vec![None; n]; m] }
    }
}

/// Greedy fill over `(job, weight)` items in the given order: a set is closed
/// as soon as its weight reaches 1/9. Returns the nonempty sets.
pub fn greedy_sets(items: &[(usize, f64)]) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    let mut cur = Vec::new();
    let mut weight = 0.0;
    for &(j, w) in items {
        cur.push(j);
        weight += w;
        if weight >= 1.0 / 9.0 {
            sets.push(std::mem::take(&mut cur));
            weight = 0.0;
        }
    }
    if !cur.is_empty() {
        sets.push(cur);
    }
    sets
}

pub fn build_grouping<R: Rng + ?Sized>(
    inst: &Instance,
    frac: &FracUnrelated,
    blocks: &[Vec<Option<i32>>],
    rng: &mut R,
) -> Result<GroupingScheme> {
    let (m, n) = (inst.machines, inst.n());
    let mut scheme = GroupingScheme::empty(m, n);
    for i in 0..m {
        let mut exps: Vec<i32> = blocks[i].iter().flatten().copied().collect();
        exps.sort_unstable();
        exps.dedup();
        for a in exps {
            let items: Vec<(usize, f64)> =
                (0..n).filter(|&j| blocks[i][j] == Some(a)).map(|j| (j, frac.y[i][j])).collect();
            let total: f64 = items.iter().map(|&(_, w)| w).sum();
            scheme.block_weights.push((i, a, total));
            let mut sets = greedy_sets(&items);
            if sets.len() > 10 {
                return Err(Error::Internal(format!(
                    "block {a} on machine {i} has weight {total} and needs {} sets",
                    sets.len()
                )));
            }
            sets.resize(10, Vec::new());
            let dropped = sample_indices(rng, 10, 2);
            let jobs: Vec<usize> = sets
                .into_iter()
                .enumerate()
                .filter(|(k, _)| !dropped.iter().any(|d| d == *k))
                .flat_map(|(_, s)| s)
                .collect();
            if jobs.is_empty() {
                continue;
            }
            let weight: f64 = jobs.iter().map(|&j| frac.y[i][j]).sum();
            if weight > 1.0 + SNAP {
                return Err(Error::Internal(format!("group on machine {i}, block {a} has weight {weight}")));
            }
            let g = scheme.groups.len();
            for &j in &jobs {
                scheme.group_of[i][j] = Some(g);
            }
            scheme.groups.push(Group { machine: i, block: a, jobs, weight });
        }
    }
    Ok(scheme)
}

/// Rounds `y` (`m × n`, every column summing to one) to one machine per job.
///
/// Repeatedly takes a cycle or maximal path of fractional edges, alternates
/// `+`/`-` along it and moves by `+α` or `-β` with probabilities
/// `β/(α+β)` and `α/(α+β)`, so every marginal is preserved and at least one
/// edge becomes integral. At a machine, the walk leaves through an edge of
/// the entering edge's group when one exists, which makes such pairs move in
/// opposite directions.
pub fn dependent_round<R: Rng + ?Sized>(y: &[Vec<f64>], grouping: &GroupingScheme, rng: &mut R) -> Result<Vec<usize>> {
    let m = y.len();
    let n = y.first().map_or(0, Vec::len);
    let mut v: Vec<Vec<f64>> = y.to_vec();
    for row in v.iter_mut() {
        for e in row.iter_mut() {
            snap(e);
        }
    }
    let fractional = |v: &Vec<Vec<f64>>, i: usize, j: usize| v[i][j] > 0.0 && v[i][j] < 1.0;

    loop {
        let Some(j0) = (0..n).find(|&j| (0..m).any(|i| fractional(&v, i, j))) else { break };
        let path = find_path(&v, grouping, j0, &fractional);
        let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut alpha = f64::INFINITY;
        let mut beta = f64::INFINITY;
        for (k, &(i, j)) in path.iter().enumerate() {
            if sign(k) > 0.0 {
                alpha = alpha.min(1.0 - v[i][j]);
                beta = beta.min(v[i][j]);
            } else {
                alpha = alpha.min(v[i][j]);
                beta = beta.min(1.0 - v[i][j]);
            }
        }
        let step = if rng.gen::<f64>() * (alpha + beta) < beta { alpha } else { -beta };
        for (k, &(i, j)) in path.iter().enumerate() {
            v[i][j] += sign(k) * step;
            snap(&mut v[i][j]);
        }
        for &(_, j) in &path {
            let sum: f64 = (0..m).map(|i| v[i][j]).sum();
            if (sum - 1.0).abs() > SNAP {
                return Err(Error::Internal(format!("job {j} mass drifted to {sum}")));
            }
        }
    }
    (0..n)
        .map(|j| {
            let chosen: Vec<usize> = (0..m).filter(|&i| v[i][j] == 1.0).collect();
            match chosen.as_slice() {
                [i] => Ok(*i),
                _ => Err(Error::Internal(format!("job {j} rounded to machines {chosen:?}"))),
            }
        })
        .collect()
}

fn snap(e: &mut f64) {
    if *e < SNAP {
        *e = 0.0;
    } else if *e > 1.0 - SNAP {
        *e = 1.0;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Node {
    Job(usize),
    Machine(usize),
}

/// Edge sequence of a cycle or a maximal path through job `j0`, as
/// `(machine, job)` pairs in walk order.
fn find_path(
    v: &Vec<Vec<f64>>,
    grouping: &GroupingScheme,
    j0: usize,
    fractional: &impl Fn(&Vec<Vec<f64>>, usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    let m = v.len();
    let n = v[0].len();
    let next_edge = |node: Node, via: Option<(usize, usize)>, used: &[(usize, usize)]| -> Option<(usize, usize)> {
        match node {
            Node::Job(j) => (0..m).map(|i| (i, j)).find(|&e| Some(e) != via && !used.contains(&e) && fractional(v, e.0, e.1)),
            Node::Machine(i) => {
                let candidates: Vec<(usize, usize)> = (0..n)
                    .map(|j| (i, j))
                    .filter(|&e| Some(e) != via && !used.contains(&e) && fractional(v, e.0, e.1))
                    .collect();
                let group = via.and_then(|(vi, vj)| grouping.group_of.get(vi).and_then(|r| r[vj]));
                candidates
                    .iter()
                    .copied()
                    .find(|&(ci, cj)| group.is_some() && grouping.group_of[ci][cj] == group)
                    .or_else(|| candidates.first().copied())
            }
        }
    };
    let other = |e: (usize, usize), from: Node| match from {
        Node::Job(_) => Node::Machine(e.0),
        Node::Machine(_) => Node::Job(e.1),
    };

    // nodes[k] and nodes[k+1] are the endpoints of edges[k].
    let mut nodes = vec![Node::Job(j0)];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Forward walk.
    loop {
        let tail = *nodes.last().expect("nonempty");
        let Some(e) = next_edge(tail, edges.last().copied(), &edges) else { break };
        let nxt = other(e, tail);
        edges.push(e);
        if let Some(pos) = nodes.iter().position(|&x| x == nxt) {
            return edges[pos..].to_vec();
        }
        nodes.push(nxt);
    }
    // Backward walk from the start job, prepending.
    loop {
        let head = nodes[0];
        let Some(e) = next_edge(head, edges.first().copied(), &edges) else { break };
        let nxt = other(e, head);
        edges.insert(0, e);
        if let Some(pos) = nodes.iter().position(|&x| x == nxt) {
            // Cycle closes between the new head edge and edges[..=pos].
            return edges[..=pos].to_vec();
        }
        nodes.insert(0, nxt);
    }
    edges
}

/// Runs each machine's jobs back to back from time 0 in ascending `key`,
/// ties by job id.
pub fn pack(inst: &Instance, machine_of: &[usize], key: impl Fn(usize, usize) -> f64) -> Schedule {
    let n = inst.n();
    let mut entries: Vec<Option<ScheduledJob>> = vec![None; n];
    for i in 0..inst.machines {
        let mut jobs: Vec<usize> = (0..n).filter(|&j| machine_of[j] == i).collect();
        jobs.sort_by(|&a, &b| key(i, a).total_cmp(&key(i, b)).then(a.cmp(&b)));
        let mut t = 0i64;
        for j in jobs {
            let p = inst.pmatrix[i][j].expect("job packed on an allowed machine");
            entries[j] = Some(ScheduledJob {
                job: j,
                machine: i,
                start: Rational::from_integer(t as i128),
                end: Rational::from_integer((t + p) as i128),
            });
            t += p;
        }
    }
    Schedule { entries: entries.into_iter().map(|e| e.expect("every job packed")).collect() }
}

/// Independent rounding: one rectangle per job with probability `x`, jobs
/// ordered on each machine by a uniform point inside their rectangle.
pub fn independent_round<R: Rng + ?Sized>(inst: &Instance, frac: &FracUnrelated, rng: &mut R) -> Result<Schedule> {
    inst.require_model(Model::Unrelated)?;
    let n = inst.n();
    let mut machine_of = vec![0; n];
    let mut tau = vec![0.0; n];
    for j in 0..n {
        let rects: Vec<_> = frac.rects.iter().filter(|r| r.job == j).collect();
        let last = *rects.last().ok_or(Error::EmptyJob { job: j })?;
        let mut target = rng.gen::<f64>();
        let mut pick = last;
        for r in &rects {
            if target < r.x {
                pick = r;
                break;
            }
            target -= r.x;
        }
        let p = inst.pmatrix[pick.machine][j].expect("allowed machine") as f64;
        machine_of[j] = pick.machine;
        tau[j] = pick.start as f64 + p * unit_open_closed(rng);
    }
    Ok(pack(inst, &machine_of, |_, j| tau[j]))
}

/// Everything one dependent-rounding trial produced.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialDetail {
    pub sample: RectSample,
    pub flags: Vec<Vec<Option<bool>>>,
    pub blocks: Vec<Vec<Option<i32>>>,
    pub grouping: GroupingScheme,
    pub machine_of: Vec<usize>,
    pub schedule: Schedule,
}

impl TrialDetail {
    pub fn num_bad_edges(&self) -> usize {
        self.flags.iter().flatten().filter(|f| **f == Some(false)).count()
    }
}

pub fn dependent_trial(inst: &Instance, frac: &FracUnrelated, seed: u64) -> Result<TrialDetail> {
    inst.require_model(Model::Unrelated)?;
    let mut rng = rng_from_seed(seed);
    let sample = sample_rects(inst, frac, &mut rng);
    let flags = classify(inst, frac);
    let blocks = assign_blocks(inst, frac, &sample, &flags);
    let grouping = build_grouping(inst, frac, &blocks, &mut rng)?;
    let machine_of = dependent_round(&frac.y, &grouping, &mut rng)?;
    let schedule = pack(inst, &machine_of, |i, j| {
        let d = sample.draws[i][j].expect("rounded edge has positive y");
        d.tau + d.theta
    });
    Ok(TrialDetail { sample, flags, blocks, grouping, machine_of, schedule })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnrelatedTrial {
    pub trial: usize,
    pub cost: Rational,
    pub num_bad_edges: usize,
    pub num_groups: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnrelatedOutcome {
    pub best: Schedule,
    pub best_cost: Rational,
    pub trials: Vec<UnrelatedTrial>,
}

impl UnrelatedOutcome {
    pub fn mean_cost(&self) -> f64 {
        let total: f64 = self.trials.iter().map(|t| crate::identical::to_f64(t.cost)).sum();
        total / self.trials.len() as f64
    }

    /// CSV with columns `trial,cost,num_bad_edges,num_groups,seed`.
    pub fn trial_log_csv(&self) -> String {
        let mut out = String::from("trial,cost,num_bad_edges,num_groups,seed\n");
        for t in &self.trials {
            let _ = writeln!(out, "{},{},{},{},{}", t.trial, t.cost, t.num_bad_edges, t.num_groups, t.seed);
        }
        out
    }
}

/// Runs `trials` dependent-rounding trials with seeds `split_seed(seed, k)`
/// and keeps the cheapest schedule (earliest trial on ties).
pub fn schedule_unrelated_wc(inst: &Instance, frac: &FracUnrelated, seed: u64, trials: usize) -> Result<UnrelatedOutcome> {
    run_unrelated(inst, seed, trials, |s| {
        let d = dependent_trial(inst, frac, s)?;
        let stats = (d.num_bad_edges(), d.grouping.groups.len());
        Ok((d.schedule, stats))
    })
}

/// Same protocol with [`independent_round`].
pub fn schedule_unrelated_independent(
    inst: &Instance,
    frac: &FracUnrelated,
    seed: u64,
    trials: usize,
) -> Result<UnrelatedOutcome> {
    run_unrelated(inst, seed, trials, |s| Ok((independent_round(inst, frac, &mut rng_from_seed(s))?, (0, 0))))
}

fn run_unrelated(
    inst: &Instance,
    seed: u64,
    trials: usize,
    trial: impl Fn(u64) -> Result<(Schedule, (usize, usize))>,
) -> Result<UnrelatedOutcome> {
    inst.require_model(Model::Unrelated)?;
    if trials == 0 {
        return Err(Error::Internal("at least one trial is required".into()));
    }
    let mut best: Option<(Schedule, Rational)> = None;
    let mut log = Vec::with_capacity(trials);
    for k in 0..trials {
        let s = split_seed(seed, k as u64);
        let (sched, (num_bad_edges, num_groups)) = trial(s)?;
        let cost = objective(inst, &sched);
        if best.as_ref().map_or(true, |(_, c)| cost < *c) {
            best = Some((sched, cost));
        }
        log.push(UnrelatedTrial { trial: k, cost, num_bad_edges, num_groups, seed: s });
    }
    let (best, best_cost) = best.expect("trials > 0");
    Ok(UnrelatedOutcome { best, best_cost, trials: log })
}

/// Total rectangle area on machine `i` inside `(0, τ]`.
pub fn area_before(inst: &Instance, frac: &FracUnrelated, machine: usize, tau: f64) -> f64 {
    frac.rects
        .iter()
        .filter(|r| r.machine == machine)
        .map(|r| {
            let p = inst.pmatrix[machine][r.job].expect("allowed machine") as f64;
            let s = r.start as f64;
            r.x * (tau.min(s + p) - s).max(0.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorConfig};
    use crate::instance::validate_schedule;
    use crate::lp::{relax_unrelated, BundledSimplex, Rect, SolverConfig};
    use proptest::prelude::*;

    fn solve(inst: &Instance) -> FracUnrelated {
        relax_unrelated(inst, &BundledSimplex, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn classification_threshold() {
        assert!(is_good(2.5, 0.4, 10.0));
        assert!(!is_good(0.001 * 100.0, 0.005, 100.0));
        assert!(is_good(0.5, 0.005, 100.0));
    }

    #[test]
    fn block_examples() {
        let d = EdgeDraw { start: 0, tau: 10.0, theta: 8.0 };
        assert_eq!(block_for(100.0, 0.5, &d), Some(3));
        let late = EdgeDraw { start: 0, tau: 10.0, theta: 8.5 };
        assert_eq!(block_for(100.0, 0.5, &late), None);
        assert_eq!(block_for(100.0, 10.0, &EdgeDraw { start: 0, tau: 60.0, theta: 0.0 }), None);
        assert_eq!(block_for(100.0, 0.5, &EdgeDraw { start: 0, tau: 80.0, theta: 0.0 }), None);
        assert_eq!(block_for(100.0, 0.0, &EdgeDraw { start: 0, tau: 0.2, theta: 0.0 }), None);
        assert_eq!(block_for(100.0, 0.0, &EdgeDraw { start: 0, tau: 0.3, theta: 0.0 }), Some(-2));
    }

    #[test]
    fn greedy_fill_trace() {
        let items: Vec<(usize, f64)> = (0..5).map(|j| (j, 0.05)).collect();
        assert_eq!(greedy_sets(&items), vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(greedy_sets(&[]).is_empty());
    }

    #[test]
    fn no_bad_edges_gives_empty_grouping() {
        let inst = Instance::unrelated(&[1, 1], vec![vec![Some(2), Some(3)]]);
        let frac = solve(&inst);
        let mut rng = rng_from_seed(0);
        let sample = sample_rects(&inst, &frac, &mut rng);
        let flags = classify(&inst, &frac);
        let blocks = assign_blocks(&inst, &frac, &sample, &flags);
        let g = build_grouping(&inst, &frac, &blocks, &mut rng).unwrap();
        assert!(g.groups.is_empty() && g.block_weights.is_empty());
    }

    #[test]
    fn integral_y_is_deterministic() {
        let y = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let g = GroupingScheme::empty(2, 2);
        for s in 0..5 {
            assert_eq!(dependent_round(&y, &g, &mut rng_from_seed(s)).unwrap(), vec![0, 1]);
        }
    }

    #[test]
    fn split_job_marginal() {
        let y = vec![vec![0.5], vec![0.5]];
        let g = GroupingScheme::empty(2, 1);
        let mut rng = rng_from_seed(11);
        let trials = 10_000;
        let on0 = (0..trials).filter(|_| dependent_round(&y, &g, &mut rng).unwrap()[0] == 0).count();
        let freq = on0 as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "{freq}");
    }

    #[test]
    fn grouped_pair_is_anticorrelated() {
        // Two jobs, each half on machine 0 (same group) and half elsewhere.
        let y = vec![vec![0.5, 0.5], vec![0.5, 0.0], vec![0.0, 0.5]];
        let mut g = GroupingScheme::empty(3, 2);
        g.groups.push(Group { machine: 0, block: 0, jobs: vec![0, 1], weight: 1.0 });
        g.group_of[0][0] = Some(0);
        g.group_of[0][1] = Some(0);
        let mut rng = rng_from_seed(5);
        let trials = 100_000;
        let both = (0..trials)
            .filter(|_| dependent_round(&y, &g, &mut rng).unwrap() == vec![0, 0])
            .count();
        let p = both as f64 / trials as f64;
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!(p <= 0.25 * (1.0 - 1.0 / 108.0) + 3.0 * se, "{p}");
    }

    #[test]
    fn independent_single_job() {
        let inst = Instance::unrelated(&[1], vec![vec![Some(3)]]);
        let frac = solve(&inst);
        let s = independent_round(&inst, &frac, &mut rng_from_seed(0)).unwrap();
        assert_eq!(s.entries[0].end, Rational::from_integer(3));
    }

    #[test]
    fn independent_keeps_lp_order_for_stacked_unit_jobs() {
        let inst = Instance::unrelated(&[1, 1], vec![vec![Some(1), Some(1)]]);
        let frac = FracUnrelated::from_rects(
            &inst,
            vec![Rect { machine: 0, job: 0, start: 0, x: 1.0 }, Rect { machine: 0, job: 1, start: 1, x: 1.0 }],
        );
        for s in 0..50 {
            let sched = independent_round(&inst, &frac, &mut rng_from_seed(s)).unwrap();
            assert_eq!(objective(&inst, &sched), Rational::from_integer(3));
            assert_eq!(sched.entries[0].start, Rational::from_integer(0));
        }
    }

    #[test]
    fn single_job_cost_is_lp_value() {
        let inst = Instance::unrelated(&[2], vec![vec![Some(4)], vec![Some(2)]]);
        let frac = solve(&inst);
        let out = schedule_unrelated_wc(&inst, &frac, 9, 20).unwrap();
        assert!(out.trials.iter().all(|t| t.cost == Rational::from_integer(4)));
        assert_eq!(frac.lp_value, 4.0);
        assert!(out.trial_log_csv().starts_with("trial,cost,num_bad_edges,num_groups,seed\n0,4,0,0,"));
    }

    #[test]
    fn area_never_exceeds_time() {
        let inst = Instance::unrelated(&[1, 2, 3], vec![vec![Some(2), Some(3), Some(1)], vec![Some(4), Some(1), Some(2)]]);
        let frac = solve(&inst);
        for i in 0..2 {
            for k in 0..=40 {
                let tau = k as f64 * 0.25;
                assert!(area_before(&inst, &frac, i, tau) <= tau + 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn trials_are_feasible_and_groups_light(n in 1usize..7, m in 1usize..4, seed in any::<u64>()) {
            let mut cfg = GeneratorConfig::new(Model::Unrelated, n, m);
            cfg.size_range = (1, 30);
            cfg.sparsity = 0.7;
            let inst = generate(&cfg, seed).unwrap();
            let frac = solve(&inst);
            for t in 0..5u64 {
                let d = dependent_trial(&inst, &frac, split_seed(seed, t)).unwrap();
                prop_assert!(validate_schedule(&inst, &d.schedule).is_empty());
                for j in 0..n {
                    prop_assert!(frac.y[d.machine_of[j]][j] > 0.0);
                }
                for g in &d.grouping.groups {
                    prop_assert!(g.weight <= 1.0 + 1e-12);
                }
                for &(_, _, w) in &d.grouping.block_weights {
                    prop_assert!(w <= 10.0 / 9.0 + 1e-9);
                }
                let s = independent_round(&inst, &frac, &mut rng_from_seed(t)).unwrap();
                prop_assert!(validate_schedule(&inst, &s).is_empty());
            }
        }
    }
}
