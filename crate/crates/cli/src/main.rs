//! `tilp`: generate instances, solve relaxations, round, solve exactly, run
//! experiments and validate schedules.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tilp_core::harness::{exact_text, format_sig};
use tilp_core::identical::to_f64;
use tilp_core::{
    exact_for, exact_result, generate, read_instance, read_schedule, relax_identical, relax_related_cmax,
    relax_related_wc, relax_unrelated, run_algorithm, run_experiment, validate_schedule,
    write_instance, write_schedule, Algorithm, BundledSimplex, DagShape, ExperimentConfig,
    GeneratorConfig, Instance, Model, SolverConfig,
};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "tilp", version, about = "Time-indexed LP scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the LP relaxation and print its value.
    Lp {
        #[arg(long)]
        instance: PathBuf,
        /// Related model only.
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Wc)]
        objective: ObjectiveArg,
        /// Also print the nonzero fractional variables.
        #[arg(long)]
        fractional: bool,
    },
    /// Run a rounding algorithm.
    Round {
        #[arg(long)]
        alg: Algorithm,
        /// Instance file; a random instance of the algorithm's model is
        /// generated from `--seed` if omitted.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Schedule output file; printed after the summary if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a small instance exactly.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Wc)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 9)]
        cap: usize,
        /// Also print an optimal schedule.
        #[arg(long)]
        witness: bool,
    },
    /// Run a batch of random instances and write a CSV report.
    Experiment {
        #[command(flatten)]
        gen: GenArgs,
        /// Defaults to `identical-wc`, `related-wc` or `unrelated-dep`.
        #[arg(long)]
        alg: Option<Algorithm>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solve every instance with at most `--exact-cap` jobs exactly.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 7)]
        exact_cap: usize,
        /// Fill the wall_time column.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schedule against an instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Wc,
    Cmax,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    model: Option<Model>,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    size_min: i64,
    #[arg(long, default_value_t = 3)]
    size_max: i64,
    /// Shorthand for `--size-min 1 --size-max 1`.
    #[arg(long)]
    unit: bool,
    #[arg(long, default_value_t = 1)]
    weight_min: i64,
    #[arg(long, default_value_t = 5)]
    weight_max: i64,
    /// Edge probability; ignored for the unrelated model.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Restrict edges to adjacent layers.
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long, default_value_t = 1)]
    speed_min: i64,
    #[arg(long, default_value_t = 8)]
    speed_max: i64,
    /// Probability that an unrelated entry is finite.
    #[arg(long, default_value_t = 1.0)]
    sparsity: f64,
}

impl GenArgs {
    fn config(&self, model: Model) -> GeneratorConfig {
        let mut cfg = GeneratorConfig::new(model, self.n, self.m);
        cfg.size_range = if self.unit { (1, 1) } else { (self.size_min, self.size_max) };
        cfg.weight_range = (self.weight_min, self.weight_max);
        cfg.speed_range = (self.speed_min, self.speed_max);
        cfg.sparsity = self.sparsity;
        cfg.dag = match (model, self.layers) {
            (Model::Unrelated, _) => DagShape::None,
            (_, Some(layers)) => DagShape::Layered { layers, density: self.density },
            (_, None) => DagShape::Density(self.density),
        };
        cfg
    }
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(read_instance(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rational_line(label: &str, r: tilp_core::Rational) -> String {
    format!("{label}={} ({})\n", format_sig(to_f64(r)), exact_text(&r))
}

fn cmd_lp(path: &Path, objective: ObjectiveArg, fractional: bool) -> CliResult<String> {
    let inst = load_instance(path)?;
    let cfg = SolverConfig::default();
    let lp = BundledSimplex;
    let mut out = String::new();
    let mut nonzero = |label: String, v: f64| {
        if v.abs() > cfg.feas_tol {
            out.push_str(&format!("{label} {}\n", format_sig(v)));
        }
    };
    let value = match (inst.model, objective) {
        (Model::Identical, _) => {
            let frac = relax_identical(&inst, &lp, &cfg)?;
            if fractional {
                for (j, row) in frac.x.iter().enumerate() {
                    for (t, &v) in row.iter().enumerate() {
                        nonzero(format!("x job={j} t={t}"), v);
                    }
                }
            }
            frac.lp_value
        }
        (Model::Related, obj) => {
            let (frac, value) = match obj {
                ObjectiveArg::Cmax => {
                    let f = relax_related_cmax(&inst, &lp, &cfg)?;
                    let d = f.makespan;
                    (f, d)
                }
                ObjectiveArg::Wc => relax_related_wc(&inst, &lp, &cfg)?,
            };
            if fractional {
                for (i, row) in frac.x.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        nonzero(format!("x machine={i} job={j}"), v);
                    }
                }
                for (j, &c) in frac.completion.iter().enumerate() {
                    nonzero(format!("C job={j}"), c);
                }
            }
            value
        }
        (Model::Unrelated, _) => {
            let frac = relax_unrelated(&inst, &lp, &cfg)?;
            if fractional {
                for r in &frac.rects {
                    nonzero(format!("x machine={} job={} start={}", r.machine, r.job, r.start), r.x);
                }
            }
            frac.lp_value
        }
    };
    Ok(format!("lp_value={}\n{out}", format_sig(value)))
}

fn run() -> CliResult<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { gen, seed, out } => {
            let model = gen.model.ok_or("--model is required")?;
            let inst = generate(&gen.config(model), seed)?;
            emit(out.as_deref(), &write_instance(&inst))?;
        }
        Command::Lp { instance, objective, fractional } => {
            print!("{}", cmd_lp(&instance, objective, fractional)?);
        }
        Command::Round { alg, instance, gen, seed, trials, out } => {
            let inst = match instance {
                Some(p) => load_instance(&p)?,
                None => {
                    let mut cfg = gen.config(gen.model.unwrap_or(alg.model()));
                    if alg == Algorithm::IdenticalUnit {
                        cfg.size_range = (1, 1);
                    }
                    generate(&cfg, seed)?
                }
            };
            let res = run_algorithm(&inst, alg, trials, seed, &SolverConfig::default())?;
            let mut summary = format!(
                "alg={alg}\nseed={seed}\ntrials={}\nlp_value={}\ncost_mean={}\n",
                res.costs.len(),
                format_sig(res.lp_value),
                format_sig(res.mean_cost()),
            );
            summary.push_str(&rational_line("cost_best", res.best_cost));
            if let Some(c) = &res.certificate {
                summary.push_str(&format!("certificate {c}\n"));
            }
            print!("{summary}");
            match out {
                Some(p) => emit(Some(&p), &write_schedule(&res.best))?,
                None => print!("{}", write_schedule(&res.best)),
            }
        }
        Command::Exact { instance, objective, cap, witness } => {
            let inst = load_instance(&instance)?;
            let alg = match (inst.model, objective) {
                (Model::Related, ObjectiveArg::Cmax) => Algorithm::RelatedCmax,
                (model, _) => Algorithm::for_model(model),
            };
            if witness {
                let r = exact_result(&inst, alg, cap)?;
                print!("{}", rational_line("opt", r.opt_value));
                println!("nodes={}", r.nodes_explored);
                print!("{}", write_schedule(&r.witness));
            } else {
                print!("{}", rational_line("opt", exact_for(&inst, alg, cap)?));
            }
        }
        Command::Experiment { gen, alg, instances, trials, seed, exact, exact_cap, timing, out } => {
            let model = match (gen.model, alg) {
                (Some(m), _) => m,
                (None, Some(a)) => a.model(),
                (None, None) => return Err("--model or --alg is required".into()),
            };
            let mut cfg = ExperimentConfig::new(gen.config(model), alg.unwrap_or(Algorithm::for_model(model)));
            cfg.instances = instances;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.exact = exact;
            cfg.exact_cap = exact_cap;
            cfg.timing = timing;
            let report = run_experiment(&cfg)?;
            emit(out.as_deref(), &report.to_csv()?)?;
            let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {instances} instances failed; see the error column");
            }
        }
        Command::Validate { instance, schedule } => {
            let inst = load_instance(&instance)?;
            let text = fs::read_to_string(&schedule).map_err(|e| format!("{}: {e}", schedule.display()))?;
            let sched = read_schedule(&text)?;
            let violations = validate_schedule(&inst, &sched);
            if violations.is_empty() {
                println!("ok");
            } else {
                for v in &violations {
                    println!("{v}");
                }
                eprintln!("{} violation(s)", violations.len());
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
