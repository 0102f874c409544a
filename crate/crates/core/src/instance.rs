//! Instances, schedules and their validation.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact time and speed values. Related-machine schedules need fractions
/// `p_j / s_i`; identical and unrelated schedules only use integers.
pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Identical,
    Related,
    Unrelated,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Identical => "identical",
            Model::Related => "related",
            Model::Unrelated => "unrelated",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identical" => Ok(Model::Identical),
            "related" => Ok(Model::Related),
            "unrelated" => Ok(Model::Unrelated),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: usize,
    pub weight: i64,
    /// `None` for unrelated instances, whose sizes live in the processing matrix.
    pub size: Option<i64>,
}

/// Edges `(j, j')` meaning `j` must complete before `j'` starts.
///
/// Edges are kept sorted and deduplicated. Out-of-range endpoints are stored
/// as given so that [`validate_instance`] can report them, but they are left
/// out of the adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrecedenceDag {
    n: usize,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl PrecedenceDag {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a < n && b < n {
                succs[a].push(b);
                preds[b].push(a);
            }
        }
        PrecedenceDag {
            n,
            edges,
            preds,
            succs,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, [])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn preds(&self, j: usize) -> &[usize] {
        &self.preds[j]
    }

    pub fn succs(&self, j: usize) -> &[usize] {
        &self.succs[j]
    }

    /// Kahn's algorithm, always releasing the smallest available job id.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..self.n)
            .filter(|&j| indeg[j] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(j)) = heap.pop() {
            order.push(j);
            for &k in &self.succs[j] {
                indeg[k] -= 1;
                if indeg[k] == 0 {
                    heap.push(Reverse(k));
                }
            }
        }
        if order.len() == self.n {
            Ok(order)
        } else {
            Err(Error::Cycle)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub model: Model,
    pub jobs: Vec<Job>,
    pub dag: PrecedenceDag,
    pub machines: usize,
    /// Machine speeds, related model only.
    pub speeds: Vec<Rational>,
    /// `pmatrix[i][j]` is the processing time of job `j` on machine `i`;
    /// `None` means the job cannot run there. Unrelated model only.
    pub pmatrix: Vec<Vec<Option<i64>>>,
    pub horizon: i64,
}

impl Instance {
    pub fn identical(weights: &[i64], sizes: &[i64], machines: usize, edges: &[(usize, usize)]) -> Self {
        let mut inst = Instance {
            model: Model::Identical,
            jobs: make_jobs(weights, Some(sizes)),
            dag: PrecedenceDag::new(weights.len(), edges.iter().copied()),
            machines,
            speeds: Vec::new(),
            pmatrix: Vec::new(),
            horizon: 0,
        };
        inst.horizon = inst.expected_horizon();
        inst
    }

    pub fn related(weights: &[i64], sizes: &[i64], speeds: &[Rational], edges: &[(usize, usize)]) -> Self {
        let mut inst = Instance {
            model: Model::Related,
            jobs: make_jobs(weights, Some(sizes)),
            dag: PrecedenceDag::new(weights.len(), edges.iter().copied()),
            machines: speeds.len(),
            speeds: speeds.to_vec(),
            pmatrix: Vec::new(),
            horizon: 0,
        };
        inst.horizon = inst.expected_horizon();
        inst
    }

    pub fn unrelated(weights: &[i64], pmatrix: Vec<Vec<Option<i64>>>) -> Self {
        let mut inst = Instance {
            model: Model::Unrelated,
            jobs: make_jobs(weights, None),
            dag: PrecedenceDag::empty(weights.len()),
            machines: pmatrix.len(),
            speeds: Vec::new(),
            pmatrix,
            horizon: 0,
        };
        inst.horizon = inst.expected_horizon();
        inst
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn weight(&self, j: usize) -> i64 {
        self.jobs[j].weight
    }

    /// Size `p_j` of an identical or related job.
    ///
    /// Panics on unrelated instances.
    pub fn size(&self, j: usize) -> i64 {
        self.jobs[j]
            .size
            .expect("job size is only defined for identical and related instances")
    }

    /// Processing time of `j` on machine `i`, `None` when the pair is forbidden.
    pub fn processing_time(&self, i: usize, j: usize) -> Option<Rational> {
        match self.model {
            Model::Identical => self.jobs[j].size.map(Rational::from_integer_i64),
            Model::Related => {
                let s = *self.speeds.get(i)?;
                self.jobs[j]
                    .size
                    .map(|p| Rational::from_integer(p as i128) / s)
            }
            Model::Unrelated => self
                .pmatrix
                .get(i)
                .and_then(|row| row.get(j).copied().flatten())
                .map(Rational::from_integer_i64),
        }
    }

    /// The horizon the instance should carry: `Σ p_j`, or for unrelated
    /// instances `Σ_j max_i p_ij` over finite entries.
    pub fn expected_horizon(&self) -> i64 {
        match self.model {
            Model::Identical | Model::Related => self.jobs.iter().filter_map(|j| j.size).sum(),
            Model::Unrelated => (0..self.n())
                .map(|j| {
                    self.pmatrix
                        .iter()
                        .filter_map(|row| row.get(j).copied().flatten())
                        .max()
                        .unwrap_or(0)
                })
                .sum(),
        }
    }

    pub(crate) fn require_model(&self, expected: Model) -> Result<()> {
        if self.model == expected {
            Ok(())
        } else {
            Err(Error::WrongModel {
                expected: expected.name(),
                found: self.model.name(),
            })
        }
    }
}

trait FromI64 {
    fn from_integer_i64(v: i64) -> Self;
}

impl FromI64 for Rational {
    fn from_integer_i64(v: i64) -> Self {
        Rational::from_integer(v as i128)
    }
}

fn make_jobs(weights: &[i64], sizes: Option<&[i64]>) -> Vec<Job> {
    weights
        .iter()
        .enumerate()
        .map(|(id, &weight)| Job {
            id,
            weight,
            size: sizes.map(|s| s[id]),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceViolation {
    Cycle,
    SelfLoop { job: usize },
    EdgeOutOfRange { from: usize, to: usize },
    NonPositiveWeight { job: usize, weight: i64 },
    NonPositiveSize { job: usize, size: i64 },
    MissingSize { job: usize },
    JobIdMismatch { position: usize, id: usize },
    NoMachines,
    SpeedCount { expected: usize, found: usize },
    NonPositiveSpeed { machine: usize },
    MatrixShape,
    NonPositiveEntry { machine: usize, job: usize },
    JobUnschedulable { job: usize },
    UnrelatedWithEdges,
    BadHorizon { expected: i64, found: i64 },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            Cycle => write!(f, "cycle in precedence graph"),
            SelfLoop { job } => write!(f, "self loop on job {job}"),
            EdgeOutOfRange { from, to } => write!(f, "edge ({from}, {to}) index out of range"),
            NonPositiveWeight { job, weight } => write!(f, "job {job} has nonpositive weight {weight}"),
            NonPositiveSize { job, size } => write!(f, "job {job} has nonpositive size {size}"),
            MissingSize { job } => write!(f, "job {job} has no size"),
            JobIdMismatch { position, id } => write!(f, "job at position {position} has id {id}"),
            NoMachines => write!(f, "no machines"),
            SpeedCount { expected, found } => write!(f, "expected {expected} speeds, found {found}"),
            NonPositiveSpeed { machine } => write!(f, "machine {machine} has nonpositive speed"),
            MatrixShape => write!(f, "processing matrix shape does not match m x n"),
            NonPositiveEntry { machine, job } => {
                write!(f, "nonpositive processing time for job {job} on machine {machine}")
            }
            JobUnschedulable { job } => write!(f, "job {job} unschedulable: no finite processing time"),
            UnrelatedWithEdges => write!(f, "unrelated instance with precedence edges"),
            BadHorizon { expected, found } => write!(f, "bad horizon T = {found}, expected {expected}"),
        }
    }
}

/// Returns every invariant violation of `inst`; an empty list means valid.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    use InstanceViolation as V;
    let mut out = Vec::new();
    let n = inst.n();
    if inst.machines == 0 {
        out.push(V::NoMachines);
    }
    for (pos, job) in inst.jobs.iter().enumerate() {
        if job.id != pos {
            out.push(V::JobIdMismatch { position: pos, id: job.id });
        }
        if job.weight < 1 {
            out.push(V::NonPositiveWeight { job: pos, weight: job.weight });
        }
        match (inst.model, job.size) {
            (Model::Unrelated, _) => {}
            (_, None) => out.push(V::MissingSize { job: pos }),
            (_, Some(p)) if p < 1 => out.push(V::NonPositiveSize { job: pos, size: p }),
            _ => {}
        }
    }
    let mut edges_ok = true;
    for &(a, b) in inst.dag.edges() {
        if a >= n || b >= n {
            out.push(V::EdgeOutOfRange { from: a, to: b });
            edges_ok = false;
        } else if a == b {
            out.push(V::SelfLoop { job: a });
        }
    }
    if edges_ok && inst.dag.len() == n && inst.dag.topological_order().is_err() {
        out.push(V::Cycle);
    }
    match inst.model {
        Model::Identical => {}
        Model::Related => {
            if inst.speeds.len() != inst.machines {
                out.push(V::SpeedCount { expected: inst.machines, found: inst.speeds.len() });
            }
            for (i, s) in inst.speeds.iter().enumerate() {
                if *s <= Rational::zero() {
                    out.push(V::NonPositiveSpeed { machine: i });
                }
            }
        }
        Model::Unrelated => {
            if !inst.dag.is_empty() {
                out.push(V::UnrelatedWithEdges);
            }
            if inst.pmatrix.len() != inst.machines || inst.pmatrix.iter().any(|r| r.len() != n) {
                out.push(V::MatrixShape);
            } else {
                for j in 0..n {
                    let mut any = false;
                    for i in 0..inst.machines {
                        if let Some(p) = inst.pmatrix[i][j] {
                            any = true;
                            if p < 1 {
                                out.push(V::NonPositiveEntry { machine: i, job: j });
                            }
                        }
                    }
                    if !any {
                        out.push(V::JobUnschedulable { job: j });
                    }
                }
            }
        }
    }
    let expected = inst.expected_horizon();
    if inst.horizon != expected {
        out.push(V::BadHorizon { expected, found: inst.horizon });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduledJob {
    pub job: usize,
    pub machine: usize,
    pub start: Rational,
    pub end: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Schedule {
    pub entries: Vec<ScheduledJob>,
}

impl Schedule {
    /// Builds a schedule from per-job `(machine, start, end)` triples.
    pub fn from_assignments(assignments: impl IntoIterator<Item = (usize, Rational, Rational)>) -> Self {
        Schedule {
            entries: assignments
                .into_iter()
                .enumerate()
                .map(|(job, (machine, start, end))| ScheduledJob { job, machine, start, end })
                .collect(),
        }
    }

    /// Entry of each job, `None` when the job is absent.
    pub fn by_job(&self, n: usize) -> Vec<Option<&ScheduledJob>> {
        let mut out = vec![None; n];
        for e in &self.entries {
            if e.job < n {
                out[e.job] = Some(e);
            }
        }
        out
    }

    /// Completion times indexed by job id. Panics if a job is missing.
    pub fn completion_times(&self, n: usize) -> Vec<Rational> {
        self.by_job(n)
            .into_iter()
            .enumerate()
            .map(|(j, e)| e.unwrap_or_else(|| panic!("job {j} missing from schedule")).end)
            .collect()
    }

    pub fn makespan(&self) -> Rational {
        self.entries
            .iter()
            .map(|e| e.end)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleViolation {
    MissingJob { job: usize },
    DuplicateJob { job: usize },
    UnknownJob { job: usize },
    MachineOutOfRange { job: usize, machine: usize },
    ForbiddenMachine { job: usize, machine: usize },
    NegativeStart { job: usize },
    Duration { job: usize, expected: Rational, found: Rational },
    Overlap { machine: usize, first: usize, second: usize },
    Precedence { from: usize, to: usize },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ScheduleViolation::*;
        match self {
            MissingJob { job } => write!(f, "missing job {job}"),
            DuplicateJob { job } => write!(f, "duplicate job {job}"),
            UnknownJob { job } => write!(f, "unknown job {job}"),
            MachineOutOfRange { job, machine } => write!(f, "job {job} on machine {machine} out of range"),
            ForbiddenMachine { job, machine } => write!(f, "job {job} cannot run on machine {machine}"),
            NegativeStart { job } => write!(f, "job {job} starts before 0"),
            Duration { job, expected, found } => {
                write!(f, "duration of job {job} is {found}, expected {expected}")
            }
            Overlap { machine, first, second } => {
                write!(f, "overlap of jobs {first} and {second} on machine {machine}")
            }
            Precedence { from, to } => write!(f, "precedence {from} -> {to} violated"),
        }
    }
}

/// Checks coverage, durations, machine exclusivity and precedence.
///
/// Intervals are half-open `(start, end]`, so back-to-back jobs on one
/// machine are legal. An empty result means the schedule is feasible.
pub fn validate_schedule(inst: &Instance, sched: &Schedule) -> Vec<ScheduleViolation> {
    use ScheduleViolation as V;
    let n = inst.n();
    let mut out = Vec::new();
    let mut seen: Vec<Option<&ScheduledJob>> = vec![None; n];
    for e in &sched.entries {
        if e.job >= n {
            out.push(V::UnknownJob { job: e.job });
            continue;
        }
        if seen[e.job].is_some() {
            out.push(V::DuplicateJob { job: e.job });
            continue;
        }
        seen[e.job] = Some(e);
        if e.machine >= inst.machines {
            out.push(V::MachineOutOfRange { job: e.job, machine: e.machine });
            continue;
        }
        if e.start < Rational::zero() {
            out.push(V::NegativeStart { job: e.job });
        }
        match inst.processing_time(e.machine, e.job) {
            None => out.push(V::ForbiddenMachine { job: e.job, machine: e.machine }),
            Some(p) => {
                let found = e.end - e.start;
                if found != p {
                    out.push(V::Duration { job: e.job, expected: p, found });
                }
            }
        }
    }
    for (j, e) in seen.iter().enumerate() {
        if e.is_none() {
            out.push(V::MissingJob { job: j });
        }
    }

    let mut per_machine: Vec<Vec<&ScheduledJob>> = vec![Vec::new(); inst.machines];
    for e in seen.iter().flatten() {
        if e.machine < inst.machines {
            per_machine[e.machine].push(e);
        }
    }
    for (i, list) in per_machine.iter_mut().enumerate() {
        list.sort_by(|a, b| a.start.cmp(&b.start).then(a.job.cmp(&b.job)));
        let mut reach: Option<&ScheduledJob> = None;
        for e in list.iter() {
            if let Some(r) = reach {
                if e.start < r.end {
                    out.push(V::Overlap { machine: i, first: r.job, second: e.job });
                }
                if e.end > r.end {
                    reach = Some(e);
                }
            } else {
                reach = Some(e);
            }
        }
    }

    for &(a, b) in inst.dag.edges() {
        if let (Some(Some(ea)), Some(Some(eb))) = (seen.get(a), seen.get(b)) {
            if ea.end > eb.start {
                out.push(V::Precedence { from: a, to: b });
            }
        }
    }
    out
}

/// Total weighted completion time `Σ_j w_j C_j` of a valid schedule.
pub fn objective(inst: &Instance, sched: &Schedule) -> Rational {
    sched
        .entries
        .iter()
        .map(|e| Rational::from_integer(inst.weight(e.job) as i128) * e.end)
        .fold(Rational::zero(), |a, b| a + b)
}

/// Length (in jobs) of the longest precedence chain ending at each job.
pub fn depth(dag: &PrecedenceDag) -> Result<Vec<usize>> {
    let order = dag.topological_order()?;
    let mut a = vec![1usize; dag.len()];
    for &j in &order {
        for &k in dag.succs(j) {
            a[k] = a[k].max(a[j] + 1);
        }
    }
    Ok(a)
}

/// A scheduling interval `(start, end]` not yet bound to a machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub job: usize,
    pub start: i64,
    pub end: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<Interval>) -> Self {
        IntervalSet { intervals }
    }

    /// Maximum number of intervals whose interiors share a point.
    pub fn congestion(&self) -> usize {
        // Ends sort before starts at equal times: (0,2] and (2,3] do not meet.
        let mut events: Vec<(i64, i32)> = Vec::with_capacity(2 * self.intervals.len());
        for iv in &self.intervals {
            if iv.end > iv.start {
                events.push((iv.start, 1));
                events.push((iv.end, -1));
            }
        }
        events.sort_unstable();
        let mut cur = 0i32;
        let mut best = 0i32;
        for (_, d) in events {
            cur += d;
            best = best.max(cur);
        }
        best as usize
    }
}

/// Greedy machine assignment: sweep intervals by `(start, job)` and put each on
/// the lowest-indexed machine that is free at its start.
pub fn intervals_to_machines(ivals: &IntervalSet, machines: usize) -> Result<Schedule> {
    let mut order: Vec<&Interval> = ivals.intervals.iter().collect();
    order.sort_by_key(|iv| (iv.start, iv.job));
    let mut free_at = vec![i64::MIN; machines];
    let mut entries = Vec::with_capacity(order.len());
    for iv in order {
        let Some(i) = free_at.iter().position(|&f| f <= iv.start) else {
            return Err(Error::CongestionExceeded { machines, time: iv.start });
        };
        free_at[i] = iv.end;
        entries.push(ScheduledJob {
            job: iv.job,
            machine: i,
            start: Rational::from_integer(iv.start as i128),
            end: Rational::from_integer(iv.end as i128),
        });
    }
    entries.sort_by_key(|e| e.job);
    Ok(Schedule { entries })
}
