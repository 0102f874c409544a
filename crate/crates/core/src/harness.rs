//! Reproducible experiments: generate instances, solve the relaxation, run a
//! rounding algorithm for a number of trials, optionally solve exactly, and
//! emit one CSV row per instance.
//!
//! Seeds: instance `k` is generated from `split_seed(master, k)`; that seed is
//! also the trial seed of the algorithms, which derive per-trial seeds with
//! another `split_seed` on the trial index.
//!
//! Instances run on a rayon pool. `TILP_WORKERS` overrides its size. Rows
//! are always written in instance order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_identical, exact_related, exact_unrelated, ExactResult, Objective};
use crate::generate::{generate, GeneratorConfig};
use crate::identical::{schedule_identical_unit_wc, schedule_identical_wc, to_f64, TrialConfig};
use crate::instance::{validate_schedule, Instance, Model, Rational, Schedule};
use crate::lp::{relax_identical, relax_unrelated, BundledSimplex, SolverConfig};
use crate::related::{schedule_related_cmax, schedule_related_wc, Certificate};
use crate::seed::split_seed;
use crate::unrelated::{schedule_unrelated_independent, schedule_unrelated_wc};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    IdenticalWc,
    IdenticalUnit,
    RelatedCmax,
    RelatedWc,
    UnrelatedIndep,
    UnrelatedDep,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::IdenticalWc,
        Algorithm::IdenticalUnit,
        Algorithm::RelatedCmax,
        Algorithm::RelatedWc,
        Algorithm::UnrelatedIndep,
        Algorithm::UnrelatedDep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::IdenticalWc => "identical-wc",
            Algorithm::IdenticalUnit => "identical-unit",
            Algorithm::RelatedCmax => "related-cmax",
            Algorithm::RelatedWc => "related-wc",
            Algorithm::UnrelatedIndep => "unrelated-indep",
            Algorithm::UnrelatedDep => "unrelated-dep",
        }
    }

    pub fn model(self) -> Model {
        match self {
            Algorithm::IdenticalWc | Algorithm::IdenticalUnit => Model::Identical,
            Algorithm::RelatedCmax | Algorithm::RelatedWc => Model::Related,
            Algorithm::UnrelatedIndep | Algorithm::UnrelatedDep => Model::Unrelated,
        }
    }

    /// Default algorithm for a model.
    pub fn for_model(model: Model) -> Self {
        match model {
            Model::Identical => Algorithm::IdenticalWc,
            Model::Related => Algorithm::RelatedWc,
            Model::Unrelated => Algorithm::UnrelatedDep,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Result of running one algorithm on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// LP bound matching the algorithm's objective.
    pub lp_value: f64,
    pub best: Schedule,
    pub best_cost: Rational,
    /// Cost of every trial, in trial order.
    pub costs: Vec<Rational>,
    /// Makespan certificate, `related-cmax` only.
    pub certificate: Option<Certificate>,
}

impl RunOutcome {
    pub fn mean_cost(&self) -> f64 {
        self.costs.iter().map(|&c| to_f64(c)).sum::<f64>() / self.costs.len() as f64
    }
}

/// Solves the relaxation and runs `alg` for `trials` trials (deterministic
/// algorithms run once). The best schedule is validated.
pub fn run_algorithm(inst: &Instance, alg: Algorithm, trials: usize, seed: u64, solver: &SolverConfig) -> Result<RunOutcome> {
    inst.require_model(alg.model())?;
    let lp = BundledSimplex;
    let tc = TrialConfig::new(seed, trials);
    let out = match alg {
        Algorithm::IdenticalWc | Algorithm::IdenticalUnit => {
            let frac = relax_identical(inst, &lp, solver)?;
            let o = if alg == Algorithm::IdenticalWc {
                schedule_identical_wc(inst, &frac, &tc)?
            } else {
                schedule_identical_unit_wc(inst, &frac, &tc, solver.feas_tol)?
            };
            RunOutcome {
                lp_value: frac.lp_value,
                costs: o.trials.iter().map(|t| t.cost).collect(),
                best: o.best,
                best_cost: o.best_cost,
                certificate: None,
            }
        }
        Algorithm::RelatedCmax => {
            let o = schedule_related_cmax(inst, &lp, solver)?;
            let c = o.schedule.makespan();
            RunOutcome { lp_value: o.certificate.d_lp, best: o.schedule, best_cost: c, costs: vec![c], certificate: Some(o.certificate) }
        }
        Algorithm::RelatedWc => {
            let o = schedule_related_wc(inst, &lp, solver)?;
            RunOutcome { lp_value: o.lp_value, best: o.schedule, best_cost: o.cost, costs: vec![o.cost], certificate: None }
        }
        Algorithm::UnrelatedIndep | Algorithm::UnrelatedDep => {
            let frac = relax_unrelated(inst, &lp, solver)?;
            let o = if alg == Algorithm::UnrelatedDep {
                schedule_unrelated_wc(inst, &frac, seed, trials)?
            } else {
                schedule_unrelated_independent(inst, &frac, seed, trials)?
            };
            RunOutcome {
                lp_value: frac.lp_value,
                costs: o.trials.iter().map(|t| t.cost).collect(),
                best: o.best,
                best_cost: o.best_cost,
                certificate: None,
            }
        }
    };
    let violations = validate_schedule(inst, &out.best);
    if !violations.is_empty() {
        return Err(Error::Internal(format!("{alg} produced an invalid schedule: {violations:?}")));
    }
    Ok(out)
}

/// Exact optimum and witness for the algorithm's objective.
pub fn exact_result(inst: &Instance, alg: Algorithm, cap: usize) -> Result<ExactResult> {
    inst.require_model(alg.model())?;
    match alg.model() {
        Model::Identical => exact_identical(inst, cap),
        Model::Related if alg == Algorithm::RelatedCmax => exact_related(inst, Objective::Makespan, cap),
        Model::Related => exact_related(inst, Objective::WeightedCompletion, cap),
        Model::Unrelated => exact_unrelated(inst, cap),
    }
}

/// Exact optimum for the algorithm's objective.
pub fn exact_for(inst: &Instance, alg: Algorithm, cap: usize) -> Result<Rational> {
    Ok(exact_result(inst, alg, cap)?.opt_value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorConfig,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub instances: usize,
    pub seed: u64,
    /// Solve each instance exactly when `n <= exact_cap`.
    pub exact: bool,
    pub exact_cap: usize,
    /// Fill the `wall_time` column; off by default so reports are
    /// byte-identical across runs.
    pub timing: bool,
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    pub fn new(generator: GeneratorConfig, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            generator,
            algorithm,
            trials: 100,
            instances: 10,
            seed: 0,
            exact: false,
            exact_cap: 8,
            timing: false,
            solver: SolverConfig::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Generator("trials must be positive".into()));
        }
        if self.algorithm.model() != self.generator.model {
            return Err(Error::WrongModel { expected: self.algorithm.model().name(), found: self.generator.model.name() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance: usize,
    pub n: usize,
    pub m: usize,
    pub lp_value: Option<f64>,
    pub opt_value: Option<Rational>,
    pub alg_cost_mean: Option<f64>,
    pub alg_cost_best: Option<Rational>,
    pub seed: u64,
    pub wall_time: Option<f64>,
    pub error: Option<String>,
}

impl ReportRow {
    /// Mean algorithm cost over the LP value.
    pub fn ratio_vs_lp(&self) -> Option<f64> {
        Some(self.alg_cost_mean? / self.lp_value?)
    }

    /// Best algorithm cost over the optimum.
    pub fn ratio_vs_opt(&self) -> Option<f64> {
        Some(to_f64(self.alg_cost_best?) / to_f64(self.opt_value?))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

/// Column order of the CSV report.
pub const REPORT_COLUMNS: [&str; 14] = [
    "instance",
    "n",
    "m",
    "lp_value",
    "opt_value",
    "opt_value_exact",
    "alg_cost_mean",
    "alg_cost_best",
    "alg_cost_best_exact",
    "ratio_vs_lp",
    "ratio_vs_opt",
    "seed",
    "wall_time",
    "error",
];

/// Decimal with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn exact_text(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl ExperimentReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_COLUMNS)?;
        let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.instance.to_string(),
                r.n.to_string(),
                r.m.to_string(),
                opt(r.lp_value),
                opt(r.opt_value.map(to_f64)),
                r.opt_value.as_ref().map(exact_text).unwrap_or_default(),
                opt(r.alg_cost_mean),
                opt(r.alg_cost_best.map(to_f64)),
                r.alg_cost_best.as_ref().map(exact_text).unwrap_or_default(),
                opt(r.ratio_vs_lp()),
                opt(r.ratio_vs_opt()),
                r.seed.to_string(),
                r.wall_time.map(|t| format!("{t:.6}")).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

fn run_row(cfg: &ExperimentConfig, index: usize) -> ReportRow {
    let seed = split_seed(cfg.seed, index as u64);
    let started = Instant::now();
    let mut row = ReportRow {
        instance: index,
        n: cfg.generator.n,
        m: cfg.generator.m,
        lp_value: None,
        opt_value: None,
        alg_cost_mean: None,
        alg_cost_best: None,
        seed,
        wall_time: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let inst = generate(&cfg.generator, seed)?;
        let out = run_algorithm(&inst, cfg.algorithm, cfg.trials, seed, &cfg.solver)?;
        row.lp_value = Some(out.lp_value);
        row.alg_cost_mean = Some(out.mean_cost());
        row.alg_cost_best = Some(out.best_cost);
        if cfg.exact && inst.n() <= cfg.exact_cap {
            row.opt_value = Some(exact_for(&inst, cfg.algorithm, cfg.exact_cap)?);
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    if cfg.timing {
        row.wall_time = Some(started.elapsed().as_secs_f64());
    }
    row
}

/// Worker count from `TILP_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("TILP_WORKERS").ok()?.trim().parse().ok().filter(|&w| w > 0)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.check()?;
    let rows = || (0..cfg.instances).into_par_iter().map(|k| run_row(cfg, k)).collect::<Vec<_>>();
    let rows = match workers_from_env() {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(rows),
        None => rows(),
    };
    Ok(ExperimentReport { rows })
}
