//! Related machines with precedence constraints.
//!
//! The makespan pipeline solves the assignment relaxation, drops machines
//! slower than `s_max / m` (moving their mass to the fastest machine and
//! doubling `D`), groups the remaining machines into geometric speed bands of
//! ratio `γ = max(2, ln m / ln ln m)`, and sends each job to the fastest band
//! among those that jointly hold at least half of its LP mass. Machines then
//! pull available jobs of their own band whenever they are idle. The achieved
//! makespan is certified against `2(γ + K)·D'`.
//!
//! For `Σ w_j C_j`, jobs are split by LP completion time into classes
//! `(2^{u-1}, 2^u]`; each class is scheduled with the makespan pipeline and
//! the resulting blocks are concatenated.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::identical::to_f64;
use crate::instance::{objective, validate_schedule, Instance, Model, Rational, Schedule, ScheduledJob};
use crate::lp::{check_related_constraints, relax_related_cmax, relax_related_wc, FracRelated, LpSolver, SolverConfig};

/// Result of discarding slow machines.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub retained: Vec<bool>,
    /// Fastest machine, lowest id on ties; always retained.
    pub fastest: usize,
    /// Speeds divided by the slowest retained speed; `None` for discarded
    /// machines.
    pub scaled_speeds: Vec<Option<Rational>>,
    /// Solution with discarded mass moved to `fastest` and `makespan = 2·D`.
    pub frac: FracRelated,
}

pub fn preprocess(inst: &Instance, frac: &FracRelated) -> Result<Prepared> {
    inst.require_model(Model::Related)?;
    let m = inst.machines;
    let n = inst.n();
    let mut fastest = 0;
    for i in 1..m {
        if inst.speeds[i] > inst.speeds[fastest] {
            fastest = i;
        }
    }
    let threshold = inst.speeds[fastest] / Rational::from_integer(m as i128);
    let retained: Vec<bool> = (0..m).map(|i| i == fastest || inst.speeds[i] > threshold).collect();

    let mut x = frac.x.clone();
    for i in 0..m {
        if !retained[i] {
            for j in 0..n {
                let moved = std::mem::take(&mut x[i][j]);
                x[fastest][j] += moved;
            }
        }
    }
    let slowest = (0..m)
        .filter(|&i| retained[i])
        .map(|i| inst.speeds[i])
        .min()
        .expect("fastest machine is retained");
    let scaled_speeds = (0..m).map(|i| retained[i].then(|| inst.speeds[i] / slowest)).collect();
    let out = FracRelated { x, completion: frac.completion.clone(), makespan: 2.0 * frac.makespan };

    let problems = check_related_constraints(inst, &out, 1e-6);
    if !problems.is_empty() {
        return Err(Error::TooInfeasible(format!("preprocessed solution: {}", problems.join("; "))));
    }
    Ok(Prepared { retained, fastest, scaled_speeds, frac: out })
}

/// `max(2, ln m / ln ln m)`; 2 whenever `m < 3`.
pub fn gamma_for(m: usize) -> f64 {
    if m < 3 {
        return 2.0;
    }
    let lm = (m as f64).ln();
    (lm / lm.ln()).max(2.0)
}

/// Speed bands `[γ^{k-1}, γ^k)`, `k = 1..=K`, over scaled speeds `>= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedGroups {
    pub gamma: f64,
    /// Highest band index in use.
    pub k_max: usize,
    /// `members[k - 1]` lists the machines of band `k`; may be empty.
    pub members: Vec<Vec<usize>>,
    /// Band of each machine, `None` for discarded machines.
    pub band_of: Vec<Option<usize>>,
}

impl SpeedGroups {
    /// Total scaled speed `s(M_k)` of every band.
    pub fn band_speeds(&self, scaled: &[Option<Rational>]) -> Vec<f64> {
        self.members
            .iter()
            .map(|ms| ms.iter().map(|&i| to_f64(scaled[i].expect("grouped machine is retained"))).sum())
            .collect()
    }
}

/// Band index of a speed `s >= 1`: the smallest `k` with `s < γ^k`.
pub fn band_index(speed: f64, gamma: f64) -> usize {
    let mut k = 1;
    let mut upper = gamma;
    while speed >= upper {
        k += 1;
        upper *= gamma;
    }
    k
}

pub fn make_groups(scaled: &[Option<Rational>], m: usize) -> SpeedGroups {
    make_groups_with_gamma(scaled, gamma_for(m))
}

pub fn make_groups_with_gamma(scaled: &[Option<Rational>], gamma: f64) -> SpeedGroups {
    let band_of: Vec<Option<usize>> = scaled.iter().map(|s| s.map(|s| band_index(to_f64(s), gamma))).collect();
    let k_max = band_of.iter().flatten().copied().max().unwrap_or(1);
    let mut members = vec![Vec::new(); k_max];
    for (i, b) in band_of.iter().enumerate() {
        if let Some(k) = b {
            members[k - 1].push(i);
        }
    }
    SpeedGroups { gamma, k_max, members, band_of }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAssignment {
    /// `ell[j]`: largest band `ℓ` whose suffix `ℓ..=K` holds half of `j`'s mass.
    pub ell: Vec<usize>,
    /// `band[j]`: fastest band in `ell[j]..=K`, lower index on ties.
    pub band: Vec<usize>,
}

/// Threshold band and chosen band from per-band masses and total band speeds
/// (both indexed from band 1).
pub fn choose_band(masses: &[f64], band_speed: &[f64], eps: f64) -> Option<(usize, usize)> {
    let mut suffix = 0.0;
    let mut ell = None;
    for k in (0..masses.len()).rev() {
        suffix += masses[k];
        if suffix >= 0.5 - eps {
            ell = Some(k);
            break;
        }
    }
    let ell = ell?;
    let mut best = ell;
    for k in ell + 1..masses.len() {
        if band_speed[k] > band_speed[best] {
            best = k;
        }
    }
    Some((ell + 1, best + 1))
}

pub fn assign_groups(prep: &Prepared, groups: &SpeedGroups, eps: f64) -> Result<GroupAssignment> {
    let n = prep.frac.completion.len();
    let band_speed = groups.band_speeds(&prep.scaled_speeds);
    let mut ell = Vec::with_capacity(n);
    let mut band = Vec::with_capacity(n);
    for j in 0..n {
        let masses: Vec<f64> = groups
            .members
            .iter()
            .map(|ms| ms.iter().map(|&i| prep.frac.x[i][j]).sum())
            .collect();
        let (l, k) = choose_band(&masses, &band_speed, eps).ok_or(Error::EmptyJob { job: j })?;
        if groups.members[k - 1].is_empty() {
            return Err(Error::EmptyGroup { job: j });
        }
        ell.push(l);
        band.push(k);
    }
    Ok(GroupAssignment { ell, band })
}

/// Machine-driven list scheduling with exact times. At time 0 and at every
/// completion, idle machines in ascending `(speed, id)` order each take the
/// lowest-id available job assigned to their band.
pub fn machine_list_schedule(inst: &Instance, groups: &SpeedGroups, assign: &GroupAssignment) -> Result<Schedule> {
    inst.require_model(Model::Related)?;
    let n = inst.n();
    let mut machine_order: Vec<usize> = (0..inst.machines).filter(|&i| groups.band_of[i].is_some()).collect();
    machine_order.sort_by(|&a, &b| inst.speeds[a].cmp(&inst.speeds[b]).then(a.cmp(&b)));
    for j in 0..n {
        if groups.members.get(assign.band[j] - 1).map_or(true, Vec::is_empty) {
            return Err(Error::EmptyGroup { job: j });
        }
    }

    let mut running: Vec<Option<usize>> = vec![None; inst.machines];
    let mut missing: Vec<usize> = (0..n).map(|j| inst.dag.preds(j).len()).collect();
    let mut started = vec![false; n];
    let mut entries: Vec<Option<ScheduledJob>> = vec![None; n];
    let mut now = Rational::zero();
    let mut finished = 0;
    while finished < n {
        for &i in &machine_order {
            if running[i].is_some() {
                continue;
            }
            let band = groups.band_of[i];
            if let Some(j) = (0..n).find(|&j| !started[j] && missing[j] == 0 && Some(assign.band[j]) == band) {
                let end = now + inst.processing_time(i, j).expect("related processing time");
                started[j] = true;
                running[i] = Some(j);
                entries[j] = Some(ScheduledJob { job: j, machine: i, start: now, end });
            }
        }
        let next = running
            .iter()
            .flatten()
            .map(|&j| entries[j].as_ref().expect("running job has an entry").end)
            .min()
            .ok_or_else(|| Error::Internal("no runnable job while jobs remain".into()))?;
        now = next;
        for slot in running.iter_mut() {
            if let Some(j) = *slot {
                if entries[j].as_ref().expect("running job has an entry").end == now {
                    *slot = None;
                    finished += 1;
                    for &k in inst.dag.succs(j) {
                        missing[k] -= 1;
                    }
                }
            }
        }
    }
    Ok(Schedule { entries: entries.into_iter().map(|e| e.expect("every job finished")).collect() })
}

/// Times at which a machine was idle although an available job of its band
/// was waiting, as `(time, machine, job)`.
pub fn unforced_idleness(
    inst: &Instance,
    groups: &SpeedGroups,
    assign: &GroupAssignment,
    sched: &Schedule,
) -> Vec<(Rational, usize, usize)> {
    let n = inst.n();
    let by_job = sched.by_job(n);
    let mut times: Vec<Rational> = sched.entries.iter().flat_map(|e| [e.start, e.end]).collect();
    times.sort();
    times.dedup();
    let mut out = Vec::new();
    for &t in &times {
        for i in 0..inst.machines {
            let Some(band) = groups.band_of[i] else { continue };
            let busy = sched.entries.iter().any(|e| e.machine == i && e.start <= t && t < e.end);
            if busy {
                continue;
            }
            for j in 0..n {
                let e = by_job[j].expect("schedule covers every job");
                let ready = inst.dag.preds(j).iter().all(|&k| by_job[k].expect("schedule covers every job").end <= t);
                if assign.band[j] == band && ready && e.start > t {
                    out.push((t, i, j));
                }
            }
        }
    }
    out
}

/// Record tying the achieved makespan to the LP bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub d_lp: f64,
    pub gamma: f64,
    pub k_max: usize,
    pub makespan: Rational,
    /// `2(γ + K)·2·D_lp`.
    pub bound: f64,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D_lp={:.12} gamma={:.12} K={} makespan={:.12} bound={:.12}",
            self.d_lp,
            self.gamma,
            self.k_max,
            to_f64(self.makespan),
            self.bound
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelatedCmaxOutcome {
    pub schedule: Schedule,
    pub certificate: Certificate,
    pub groups: SpeedGroups,
    pub assignment: GroupAssignment,
}

/// Rounds an extracted makespan solution.
pub fn round_related_cmax(inst: &Instance, frac: &FracRelated, eps: f64) -> Result<RelatedCmaxOutcome> {
    let prep = preprocess(inst, frac)?;
    let groups = make_groups(&prep.scaled_speeds, inst.machines);
    let assignment = assign_groups(&prep, &groups, eps)?;
    let schedule = machine_list_schedule(inst, &groups, &assignment)?;
    let makespan = schedule.makespan();
    let bound = 2.0 * (groups.gamma + groups.k_max as f64) * prep.frac.makespan;
    let certificate = Certificate { d_lp: frac.makespan, gamma: groups.gamma, k_max: groups.k_max, makespan, bound };
    if to_f64(makespan) > bound * (1.0 + 1e-9) {
        return Err(Error::CertificateViolated { makespan: to_f64(makespan), bound });
    }
    Ok(RelatedCmaxOutcome { schedule, certificate, groups, assignment })
}

pub fn schedule_related_cmax(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> Result<RelatedCmaxOutcome> {
    let frac = relax_related_cmax(inst, solver, cfg)?;
    round_related_cmax(inst, &frac, cfg.feas_tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelatedBlock {
    /// Jobs in the block have LP completion in `(2^{u-1}, 2^u]` (or were
    /// raised to a predecessor's class).
    pub u: i32,
    pub jobs: Vec<usize>,
    pub offset: Rational,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelatedWcOutcome {
    pub schedule: Schedule,
    pub cost: Rational,
    /// Value of the weighted-completion LP, a lower bound on the optimum.
    pub lp_value: f64,
    pub blocks: Vec<RelatedBlock>,
}

/// Smallest `u` with `c <= 2^u`.
fn class_of(c: f64) -> i32 {
    let mut u = 0i32;
    while c > 2f64.powi(u) * (1.0 + 1e-12) {
        u += 1;
    }
    while u > -60 && c <= 2f64.powi(u - 1) * (1.0 + 1e-12) {
        u -= 1;
    }
    u
}

/// Interval-doubling wrapper for `Q|prec|Σ w_j C_j`.
pub fn schedule_related_wc(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> Result<RelatedWcOutcome> {
    inst.require_model(Model::Related)?;
    let n = inst.n();
    let (frac, lp_value) = relax_related_wc(inst, solver, cfg)?;
    let mut class: Vec<i32> = frac.completion.iter().map(|&c| class_of(c)).collect();
    for j in inst.dag.topological_order()? {
        for &k in inst.dag.succs(j) {
            class[k] = class[k].max(class[j]);
        }
    }
    let mut classes = class.clone();
    classes.sort_unstable();
    classes.dedup();

    let mut entries: Vec<Option<ScheduledJob>> = vec![None; n];
    let mut offset = Rational::zero();
    let mut blocks = Vec::with_capacity(classes.len());
    for u in classes {
        let jobs: Vec<usize> = (0..n).filter(|&j| class[j] == u).collect();
        let mut local = vec![usize::MAX; n];
        for (k, &j) in jobs.iter().enumerate() {
            local[j] = k;
        }
        let edges: Vec<(usize, usize)> = inst
            .dag
            .edges()
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]))
            .collect();
        let weights: Vec<i64> = jobs.iter().map(|&j| inst.weight(j)).collect();
        let sizes: Vec<i64> = jobs.iter().map(|&j| inst.size(j)).collect();
        let sub = Instance::related(&weights, &sizes, &inst.speeds, &edges);
        let out = schedule_related_cmax(&sub, solver, cfg)?;
        for e in &out.schedule.entries {
            let j = jobs[e.job];
            entries[j] = Some(ScheduledJob { job: j, machine: e.machine, start: e.start + offset, end: e.end + offset });
        }
        blocks.push(RelatedBlock { u, jobs, offset, certificate: out.certificate });
        offset += out.schedule.makespan();
    }
    let schedule = Schedule { entries: entries.into_iter().map(|e| e.expect("every job is in a block")).collect() };
    let violations = validate_schedule(inst, &schedule);
    if !violations.is_empty() {
        return Err(Error::Internal(format!("block concatenation produced {violations:?}")));
    }
    let cost = objective(inst, &schedule);
    Ok(RelatedWcOutcome { schedule, cost, lp_value, blocks })
}
