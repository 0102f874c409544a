//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any criterion fails.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use tilp_core::exact::{
    exact_identical, exact_identical_by_starts, exact_related, exact_unrelated, sequence_cost,
    single_machine_by_permutations, smith_order,
};
use tilp_core::identical::{
    completion_gap_violations, depth_violations, schedule_identical_unit_wc, schedule_identical_wc, to_f64,
    TrialConfig,
};
use tilp_core::lp::Rect;
use tilp_core::related::{schedule_related_cmax, schedule_related_wc, Certificate};
use tilp_core::seed::rng_from_seed;
use tilp_core::unrelated::{area_before, assign_blocks, build_grouping, classify, dependent_trial, sample_rects};
use tilp_core::{
    generate, objective, relax_identical, relax_related_cmax, relax_related_wc, relax_unrelated, split_seed,
    validate_schedule, BundledSimplex, DagShape, FracUnrelated, GeneratorConfig, Instance, Model, Objective,
    SolverConfig,
};

const LP: BundledSimplex = BundledSimplex;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn solver() -> SolverConfig {
    SolverConfig::default()
}

fn instance(model: Model, n: usize, m: usize, seed: u64, tweak: impl FnOnce(&mut GeneratorConfig)) -> Instance {
    let mut cfg = GeneratorConfig::new(model, n, m);
    tweak(&mut cfg);
    generate(&cfg, seed).expect("generator")
}

fn dag_for(k: usize) -> DagShape {
    match k % 4 {
        0 => DagShape::None,
        1 => DagShape::Density(0.2),
        2 => DagShape::Density(0.5),
        _ => DagShape::Layered { layers: 3, density: 0.6 },
    }
}

/// Within `rel` of `b` from below: `a <= b + rel·|b|`.
fn le_rel(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * b.abs()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn relaxation_validity() -> Outcome {
    const PER_MODEL: usize = 120;
    let check = |model: Model| -> (usize, Vec<String>, f64) {
        let results: Vec<(Vec<String>, f64)> = (0..PER_MODEL)
            .into_par_iter()
            .map(|k| {
                let seed = split_seed(0xC1 + model as u64, k as u64);
                let n = 2 + k % 6;
                let m = 1 + k % 3;
                let inst = instance(model, n, m, seed, |c| {
                    if model != Model::Unrelated {
                        c.dag = dag_for(k / 3);
                    } else {
                        c.size_range = (1, 6);
                        c.sparsity = 0.8;
                    }
                });
                let mut bad = Vec::new();
                let mut worst = 0.0f64;
                let mut cmp = |what: &str, lp: f64, opt: f64| {
                    worst = worst.max(lp / opt);
                    if !le_rel(lp, opt, 1e-6) {
                        bad.push(format!("{model} #{k} {what}: lp {lp} > opt {opt}"));
                    }
                };
                match model {
                    Model::Identical => {
                        let lp = relax_identical(&inst, &LP, &solver()).unwrap().lp_value;
                        cmp("wc", lp, to_f64(exact_identical(&inst, 9).unwrap().opt_value));
                    }
                    Model::Related => {
                        let d = relax_related_cmax(&inst, &LP, &solver()).unwrap().makespan;
                        cmp("cmax", d, to_f64(exact_related(&inst, Objective::Makespan, 8).unwrap().opt_value));
                        let (_, wc) = relax_related_wc(&inst, &LP, &solver()).unwrap();
                        let opt = exact_related(&inst, Objective::WeightedCompletion, 8).unwrap().opt_value;
                        cmp("wc", wc, to_f64(opt));
                    }
                    Model::Unrelated => {
                        let lp = relax_unrelated(&inst, &LP, &solver()).unwrap().lp_value;
                        cmp("wc", lp, to_f64(exact_unrelated(&inst, 10).unwrap().opt_value));
                    }
                }
                (bad, worst)
            })
            .collect();
        let worst = max_of(results.iter().map(|r| r.1));
        (PER_MODEL, results.into_iter().flat_map(|r| r.0).collect(), worst)
    };
    let mut detail = String::new();
    let mut failures = Vec::new();
    for model in [Model::Identical, Model::Related, Model::Unrelated] {
        let (count, bad, worst) = check(model);
        let _ = write!(detail, "{model}: {count} instances, max lp/opt {worst:.6}; ");
        failures.extend(bad);
    }
    let pass = failures.is_empty();
    if !pass {
        let _ = write!(detail, "violations: {failures:?}");
    }
    outcome(pass, detail)
}

struct RatioStats {
    instances: usize,
    max_mean_vs_lp: f64,
    avg_mean_vs_lp: f64,
    max_best_vs_opt: f64,
    invalid: usize,
}

fn identical_ratios(unit: bool, count: usize, draws: usize, base: u64) -> RatioStats {
    let rows: Vec<(f64, f64, bool)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(base, k as u64);
            let n = 4 + k % 5;
            let m = 1 + k % 3;
            let inst = instance(Model::Identical, n, m, seed, |c| {
                c.dag = dag_for(k / 3);
                c.size_range = if unit { (1, 1) } else if k % 2 == 0 { (1, 4) } else { (1, 9) };
            });
            let frac = relax_identical(&inst, &LP, &solver()).unwrap();
            let tc = TrialConfig::new(seed, draws);
            let out = if unit {
                schedule_identical_unit_wc(&inst, &frac, &tc, 1e-7).unwrap()
            } else {
                schedule_identical_wc(&inst, &frac, &tc).unwrap()
            };
            assert_eq!(out.trials.len(), draws);
            let opt = exact_identical(&inst, 9).unwrap().opt_value;
            let valid = validate_schedule(&inst, &out.best).is_empty() && objective(&inst, &out.best) == out.best_cost;
            (out.mean_cost() / frac.lp_value, to_f64(out.best_cost) / to_f64(opt), valid)
        })
        .collect();
    RatioStats {
        instances: rows.len(),
        max_mean_vs_lp: max_of(rows.iter().map(|r| r.0)),
        avg_mean_vs_lp: rows.iter().map(|r| r.0).sum::<f64>() / rows.len() as f64,
        max_best_vs_opt: max_of(rows.iter().map(|r| r.1)),
        invalid: rows.iter().filter(|r| !r.2).count(),
    }
}

fn ratio_criterion(unit: bool, mean_limit: f64, best_limit: f64, base: u64) -> Outcome {
    let s = identical_ratios(unit, 60, 200, base);
    let pass = s.max_mean_vs_lp <= mean_limit && s.max_best_vs_opt <= best_limit && s.invalid == 0;
    outcome(
        pass,
        format!(
            "{} instances x 200 draws: max mean/lp {:.4} (avg {:.4}, limit {mean_limit:.4}), max best/opt {:.4} (limit {best_limit:.4}), invalid {}",
            s.instances, s.max_mean_vs_lp, s.avg_mean_vs_lp, s.max_best_vs_opt, s.invalid
        ),
    )
}

fn certificate_ok(c: &Certificate, tol: f64) -> bool {
    let bound = 2.0 * (c.gamma + c.k_max as f64) * 2.0 * c.d_lp;
    (bound - c.bound).abs() <= 1e-9 * bound && to_f64(c.makespan) <= bound * (1.0 + tol)
}

fn related_certificate() -> Outcome {
    const COUNT: usize = 200;
    let rows: Vec<(f64, bool, usize, String)> = (0..COUNT)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC4, k as u64);
            let m = 1 + k % 8;
            let n = 3 + k % 12;
            let inst = instance(Model::Related, n, m, seed, |c| {
                c.dag = dag_for(k / 8);
                c.size_range = (1, 6);
                c.speed_range = if k % 2 == 0 { (1, 8) } else { (1, 40) };
            });
            let mut note = String::new();
            let cmax = match schedule_related_cmax(&inst, &LP, &solver()) {
                Ok(o) => o,
                Err(e) => return (f64::INFINITY, false, 0, format!("#{k} cmax: {e}")),
            };
            let mut ok = certificate_ok(&cmax.certificate, 1e-9)
                && validate_schedule(&inst, &cmax.schedule).is_empty()
                && cmax.schedule.makespan() == cmax.certificate.makespan;
            if !ok {
                note = format!("#{k} cmax certificate {}", cmax.certificate);
            }
            let mut blocks = 0;
            match schedule_related_wc(&inst, &LP, &solver()) {
                Ok(wc) => {
                    blocks = wc.blocks.len();
                    for b in &wc.blocks {
                        if !certificate_ok(&b.certificate, 1e-9) {
                            ok = false;
                            note = format!("#{k} wc block u={} certificate {}", b.u, b.certificate);
                        }
                    }
                    if !validate_schedule(&inst, &wc.schedule).is_empty() {
                        ok = false;
                        note = format!("#{k} wc schedule invalid");
                    }
                }
                Err(e) => {
                    ok = false;
                    note = format!("#{k} wc: {e}");
                }
            }
            (to_f64(cmax.certificate.makespan) / cmax.certificate.d_lp, ok, blocks, note)
        })
        .collect();
    let failures: Vec<&String> = rows.iter().filter(|r| !r.1).map(|r| &r.3).collect();
    let worst = max_of(rows.iter().map(|r| r.0));
    let blocks: usize = rows.iter().map(|r| r.2).sum();
    let pass = failures.is_empty() && worst <= 6.0;
    let mut detail = format!(
        "{COUNT} instances (m <= 8), {blocks} weighted-completion blocks: every makespan within 2(gamma+K)*2*D_lp; max makespan/D_lp {worst:.4} (observed limit 6)"
    );
    if !failures.is_empty() {
        let _ = write!(detail, "; failures: {failures:?}");
    }
    outcome(pass, detail)
}

/// Random unrelated instance; machine 0 holds long jobs, the others a mix of
/// short and long ones.
fn mixed_unrelated(n: usize, m: usize, seed: u64) -> Instance {
    let mut rng = rng_from_seed(seed);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let pmatrix = (0..m)
        .map(|i| {
            (0..n)
                .map(|_| {
                    Some(if i > 0 && rng.gen_bool(0.5) { rng.gen_range(1..=3) } else { rng.gen_range(16..=256) })
                })
                .collect()
        })
        .collect();
    Instance::unrelated(&weights, pmatrix)
}

/// Packs the jobs of each machine in the given order from time 0.
fn packed_rects(inst: &Instance, machine_of: &[usize], order: &[usize], height: f64) -> Vec<Rect> {
    let mut free = vec![0i64; inst.machines];
    order
        .iter()
        .map(|&j| {
            let i = machine_of[j];
            let start = free[i];
            free[i] += inst.pmatrix[i][j].unwrap();
            Rect { machine: i, job: j, start, x: height }
        })
        .collect()
}

fn shuffled(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.gen_range(0..=k));
    }
    order
}

fn merged(mut rects: Vec<Rect>) -> Vec<Rect> {
    rects.sort_by_key(|r| (r.machine, r.job, r.start));
    let mut out: Vec<Rect> = Vec::new();
    for r in rects {
        match out.last_mut() {
            Some(last) if (last.machine, last.job, last.start) == (r.machine, r.job, r.start) => last.x += r.x,
            _ => out.push(r),
        }
    }
    out
}

/// Convex combination of a heavy base schedule and light copies of it in
/// which one job is moved to the front of a random machine. The moved edges
/// get tiny `y` and start at 0, so they are bad.
fn perturbed_solution(inst: &Instance, seed: u64) -> FracUnrelated {
    let mut rng = rng_from_seed(seed);
    let (n, m) = (inst.n(), inst.machines);
    let light = rng.gen_range(20..=120);
    let delta: f64 = rng.gen_range(0.05..0.6);
    let base_m: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let base_o = shuffled(n, &mut rng);
    let mut rects = packed_rects(inst, &base_m, &base_o, 1.0 - delta);
    for _ in 0..light {
        let j = rng.gen_range(0..n);
        let mut mo = base_m.clone();
        mo[j] = rng.gen_range(0..m);
        let mut o: Vec<usize> = vec![j];
        o.extend(base_o.iter().copied().filter(|&k| k != j));
        rects.extend(packed_rects(inst, &mo, &o, delta / light as f64));
    }
    FracUnrelated::from_rects(inst, merged(rects))
}

/// Uniform mixture of `n` schedules; in schedule `k` job `k` runs alone on
/// machine 0 and the rest are packed on the other machines. Every edge on
/// machine 0 has `y = 1/n < 0.01` and starts at 0.
fn front_solution(inst: &Instance, seed: u64) -> FracUnrelated {
    let mut rng = rng_from_seed(seed);
    let (n, m) = (inst.n(), inst.machines);
    let mut rects = Vec::new();
    for k in 0..n {
        let mo: Vec<usize> = (0..n).map(|j| if j == k { 0 } else { rng.gen_range(1..m) }).collect();
        rects.extend(packed_rects(inst, &mo, &shuffled(n, &mut rng), 1.0 / n as f64));
    }
    FracUnrelated::from_rects(inst, merged(rects))
}

/// Synthetic fractional solution number `k`, alternating both families.
fn synthetic(k: usize, seed: u64) -> (Instance, FracUnrelated) {
    if k % 2 == 0 {
        let inst = mixed_unrelated(6 + k % 10, 2 + k % 2, seed);
        let frac = perturbed_solution(&inst, seed);
        (inst, frac)
    } else {
        let inst = mixed_unrelated(101 + k % 60, 2 + k % 2, seed);
        let frac = front_solution(&inst, seed);
        (inst, frac)
    }
}

fn unrelated_rounding() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;

    // Feasibility of every trial and the mean cost against 1.5 times the LP.
    const COST_INSTANCES: usize = 20;
    const COST_TRIALS: usize = 600;
    let cost_rows: Vec<(usize, f64, bool)> = (0..COST_INSTANCES)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC5, k as u64);
            let inst = instance(Model::Unrelated, 4 + k % 5, 2 + k % 2, seed, |c| {
                c.size_range = (1, 8);
                c.sparsity = 0.85;
            });
            let frac = relax_unrelated(&inst, &LP, &solver()).unwrap();
            let mut invalid = 0;
            let costs: Vec<f64> = (0..COST_TRIALS)
                .map(|t| {
                    let d = dependent_trial(&inst, &frac, split_seed(seed, t as u64)).unwrap();
                    if !validate_schedule(&inst, &d.schedule).is_empty() {
                        invalid += 1;
                    }
                    to_f64(objective(&inst, &d.schedule))
                })
                .collect();
            let mean = costs.iter().sum::<f64>() / costs.len() as f64;
            let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (costs.len() - 1) as f64;
            let se = (var / costs.len() as f64).sqrt();
            (invalid, mean / frac.lp_value, mean <= 1.5 * frac.lp_value + 2.0 * se)
        })
        .collect();
    let invalid: usize = cost_rows.iter().map(|r| r.0).sum();
    let cost_ok = cost_rows.iter().all(|r| r.2);
    pass &= invalid == 0 && cost_ok;
    lines.push(format!(
        "(i) {} invalid of {} trials; (iv) mean <= 1.5*lp + 2SE on {}/{} instances, max mean/lp {:.4}",
        invalid,
        COST_INSTANCES * COST_TRIALS,
        cost_rows.iter().filter(|r| r.2).count(),
        COST_INSTANCES,
        max_of(cost_rows.iter().map(|r| r.1))
    ));

    // Marginals: selection frequency of every edge against y.
    const MARGINAL_TRIALS: usize = 10_000;
    let marginal_rows: Vec<(usize, usize, f64)> = (0..10)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC5A, k as u64);
            let inst = instance(Model::Unrelated, 6, 3, seed, |c| c.size_range = (1, 6));
            let frac = relax_unrelated(&inst, &LP, &solver()).unwrap();
            let (m, n) = (inst.machines, inst.n());
            let mut hits = vec![vec![0usize; n]; m];
            for t in 0..MARGINAL_TRIALS {
                let d = dependent_trial(&inst, &frac, split_seed(seed, t as u64)).unwrap();
                for (j, &i) in d.machine_of.iter().enumerate() {
                    hits[i][j] += 1;
                }
            }
            let mut edges = 0;
            let mut outside = 0;
            let mut worst = 0.0f64;
            for i in 0..m {
                for j in 0..n {
                    let y = frac.y[i][j];
                    let freq = hits[i][j] as f64 / MARGINAL_TRIALS as f64;
                    let se = (y * (1.0 - y) / MARGINAL_TRIALS as f64).sqrt();
                    edges += 1;
                    let z = if se > 0.0 { (freq - y).abs() / se } else { 0.0 };
                    worst = worst.max(z);
                    if (freq - y).abs() > 3.0 * se + 1e-9 {
                        outside += 1;
                    }
                }
            }
            (edges, outside, worst)
        })
        .collect();
    let outside: usize = marginal_rows.iter().map(|r| r.1).sum();
    pass &= outside == 0;
    lines.push(format!(
        "(ii) {} edges on 10 instances x {MARGINAL_TRIALS} trials, {} outside 3 SE, max |z| {:.2}",
        marginal_rows.iter().map(|r| r.0).sum::<usize>(),
        outside,
        max_of(marginal_rows.iter().map(|r| r.2))
    ));

    // Block weights before dropping, on LP and synthetic fractional solutions.
    const SOLUTIONS: usize = 100;
    const SAMPLES: usize = 10;
    let block_rows: Vec<(usize, usize, usize, f64, usize)> = (0..SOLUTIONS)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC5B, k as u64);
            let (inst, frac) = if k % 4 == 0 {
                let inst = instance(Model::Unrelated, 5 + k % 4, 2 + k % 2, seed, |c| c.size_range = (1, 30));
                let frac = relax_unrelated(&inst, &LP, &solver()).unwrap();
                (inst, frac)
            } else {
                synthetic(k, seed)
            };
            let flags = classify(&inst, &frac);
            let bad = flags.iter().flatten().filter(|f| **f == Some(false)).count();
            let mut violations = 0;
            let mut blocks = 0;
            let mut worst = 0.0f64;
            let mut rng = rng_from_seed(split_seed(seed, 1));
            for _ in 0..SAMPLES {
                let sample = sample_rects(&inst, &frac, &mut rng);
                let assigned = assign_blocks(&inst, &frac, &sample, &flags);
                match build_grouping(&inst, &frac, &assigned, &mut rng) {
                    Ok(g) => {
                        for &(_, _, w) in &g.block_weights {
                            blocks += 1;
                            worst = worst.max(w);
                            if w > 10.0 / 9.0 + 1e-9 {
                                violations += 1;
                            }
                        }
                    }
                    Err(_) => violations += 1,
                }
            }
            (SAMPLES, bad, blocks, worst, violations)
        })
        .collect();
    let violations: usize = block_rows.iter().map(|r| r.4).sum();
    pass &= violations == 0;
    lines.push(format!(
        "(iii) {} (solution, sample) pairs, {} bad edges, {} nonempty blocks, max block weight {:.4} (limit 10/9), {} violations",
        block_rows.iter().map(|r| r.0).sum::<usize>(),
        block_rows.iter().map(|r| r.1).sum::<usize>(),
        block_rows.iter().map(|r| r.2).sum::<usize>(),
        max_of(block_rows.iter().map(|r| r.3).chain([0.0])),
        violations
    ));

    // Within-group correlation, reported against a soft target.
    let (both, expected, pairs, se) = within_group_correlation();
    let soft = both <= (1.0 - 1.0 / 108.0) * expected + 3.0 * se;
    lines.push(format!(
        "within-group pairs: {pairs} observed, Pr[both] sum {both:.1} vs (1-1/108)*y*y' sum {:.1} (soft target {})",
        (1.0 - 1.0 / 108.0) * expected,
        if soft { "met" } else { "not met" }
    ));
    outcome(pass, lines.join("; "))
}

/// Sums, over trials and within-group edge pairs on synthetic solutions, the
/// indicator that both edges were selected and the product `y_e·y_e'`.
fn within_group_correlation() -> (f64, f64, usize, f64) {
    let rows: Vec<(f64, f64, usize)> = (0..20)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC5C, k as u64);
            let (inst, frac) = synthetic(k, seed);
            let (mut both, mut expected, mut pairs) = (0.0, 0.0, 0);
            for t in 0..200 {
                let d = dependent_trial(&inst, &frac, split_seed(seed, t)).unwrap();
                for g in &d.grouping.groups {
                    let i = g.machine;
                    for (a, &j) in g.jobs.iter().enumerate() {
                        for &j2 in &g.jobs[a + 1..] {
                            pairs += 1;
                            expected += frac.y[i][j] * frac.y[i][j2];
                            if d.machine_of[j] == i && d.machine_of[j2] == i {
                                both += 1.0;
                            }
                        }
                    }
                }
            }
            (both, expected, pairs)
        })
        .collect();
    let both: f64 = rows.iter().map(|r| r.0).sum();
    let expected: f64 = rows.iter().map(|r| r.1).sum();
    let pairs = rows.iter().map(|r| r.2).sum();
    // Indicators are nearly independent Bernoulli draws with small means.
    (both, expected, pairs, expected.sqrt())
}

fn structural_checks() -> Outcome {
    const COUNT: usize = 150;
    let rows: Vec<(usize, usize, usize, usize)> = (0..COUNT)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC6, k as u64);
            let n = 3 + k % 8;
            let m = 1 + k % 3;
            let general = instance(Model::Identical, n, m, seed, |c| {
                c.dag = dag_for(k);
                c.size_range = (1, 5);
            });
            let frac = relax_identical(&general, &LP, &solver()).unwrap();
            let gap = completion_gap_violations(&general, &frac, 1e-6).len();

            let unit = instance(Model::Identical, n, m, seed ^ 1, |c| {
                c.dag = dag_for(k + 1);
                c.size_range = (1, 1);
            });
            let ufrac = relax_identical(&unit, &LP, &solver()).unwrap();
            let depth = depth_violations(&unit, &ufrac, 1e-7).unwrap().len();

            let unrel = instance(Model::Unrelated, n, 1 + (k + 1) % 3, seed ^ 2, |c| c.size_range = (1, 8));
            let rfrac = relax_unrelated(&unrel, &LP, &solver()).unwrap();
            let mut rng = rng_from_seed(seed);
            let mut area = 0;
            let mut samples = 0;
            for i in 0..unrel.machines {
                for _ in 0..100 {
                    let tau = rng.gen_range(0.0..=unrel.horizon as f64);
                    samples += 1;
                    if area_before(&unrel, &rfrac, i, tau) > tau + 1e-6 {
                        area += 1;
                    }
                }
            }
            (gap, depth, area, samples)
        })
        .collect();
    let gap: usize = rows.iter().map(|r| r.0).sum();
    let depth: usize = rows.iter().map(|r| r.1).sum();
    let area: usize = rows.iter().map(|r| r.2).sum();
    let samples: usize = rows.iter().map(|r| r.3).sum();
    outcome(
        gap + depth + area == 0,
        format!(
            "{COUNT} solutions per check: completion-gap violations {gap}, unit depth violations {depth}, area violations {area} of {samples} sampled tau"
        ),
    )
}

fn oracle_cross_checks() -> Outcome {
    let list: Vec<bool> = (0..20)
        .into_par_iter()
        .map(|k| {
            let seed = split_seed(0xC7, k);
            let inst = instance(Model::Identical, 3 + (k as usize) % 4, 1 + (k as usize) % 3, seed, |c| {
                c.dag = dag_for(k as usize);
            });
            exact_identical(&inst, 9).unwrap().opt_value == exact_identical_by_starts(&inst).unwrap()
        })
        .collect();
    let smith: Vec<bool> = (0..20u64)
        .map(|k| {
            let mut rng = rng_from_seed(split_seed(0xC7A, k));
            let n = 2 + (k as usize) % 6;
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            let p: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            sequence_cost(&w, &p, &smith_order(&w, &p)) == single_machine_by_permutations(&w, &p)
        })
        .collect();
    let l = list.iter().filter(|b| **b).count();
    let s = smith.iter().filter(|b| **b).count();
    outcome(l == 20 && s == 20, format!("list restriction = start enumeration {l}/20; Smith order = permutation enumeration {s}/20"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn build_cli() -> Result<PathBuf, String> {
    let root = workspace_root();
    let status = Command::new(env!("CARGO"))
        .current_dir(&root)
        .args(["build", "--quiet", "-p", "tilp-cli", "--bin", "tilp"])
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("building the CLI failed: {status}"));
    }
    let target = std::env::var_os("CARGO_TARGET_DIR").map(PathBuf::from).unwrap_or_else(|| root.join("target"));
    Ok(target.join("debug").join(format!("tilp{}", std::env::consts::EXE_SUFFIX)))
}

fn determinism() -> Outcome {
    let bin = match build_cli() {
        Ok(b) => b,
        Err(e) => return outcome(false, e),
    };
    let dir = std::env::temp_dir().join(format!("tilp-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();

    // Each command writes `out-<run>` (if any) and returns stdout.
    let mut commands: Vec<(String, Vec<String>)> = Vec::new();
    let mut add = |name: &str, args: Vec<String>| commands.push((name.to_string(), args));
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    for model in ["identical", "related", "unrelated"] {
        add(&format!("generate-{model}"), s(&["generate", "--model", model, "--n", "6", "--m", "3", "--seed", "5"]));
    }
    for model in ["identical", "related", "unrelated"] {
        let inst = p(&format!("inst-{model}.txt"));
        fs::write(&inst, Command::new(&bin).args(["generate", "--model", model, "--n", "6", "--m", "2", "--seed", "8"]).output().unwrap().stdout).unwrap();
        add(&format!("lp-{model}"), s(&["lp", "--instance", &inst, "--fractional"]));
        add(&format!("exact-{model}"), s(&["exact", "--instance", &inst, "--witness"]));
    }
    let unit = p("inst-unit.txt");
    fs::write(&unit, Command::new(&bin).args(["generate", "--model", "identical", "--unit", "--n", "7", "--seed", "8"]).output().unwrap().stdout).unwrap();
    for (alg, model) in [
        ("identical-wc", "identical"),
        ("identical-unit", "unit"),
        ("related-cmax", "related"),
        ("related-wc", "related"),
        ("unrelated-indep", "unrelated"),
        ("unrelated-dep", "unrelated"),
    ] {
        let inst = p(&format!("inst-{model}.txt"));
        add(&format!("round-{alg}"), s(&["round", "--alg", alg, "--instance", &inst, "--seed", "1", "--trials", "50"]));
        add(&format!("round-gen-{alg}"), s(&["round", "--alg", alg, "--seed", "1", "--trials", "50"]));
    }
    add("validate", s(&["validate", "--instance", &p("inst-identical.txt"), "--schedule", &p("sched.txt")]));
    for model in ["identical", "related", "unrelated"] {
        add(
            &format!("experiment-{model}"),
            s(&["experiment", "--model", model, "--n", "5", "--m", "2", "--instances", "12", "--trials", "20", "--seed", "3", "--exact"]),
        );
    }
    let sched = Command::new(&bin)
        .args(["round", "--alg", "identical-wc", "--instance", &p("inst-identical.txt"), "--seed", "2", "--out", &p("sched.txt")])
        .output()
        .unwrap();
    assert!(sched.status.success());

    let run = |args: &[String], run: usize, workers: &str| -> (Vec<u8>, Vec<u8>, bool) {
        let out_file = p(&format!("out-{run}"));
        let _ = fs::remove_file(&out_file);
        let mut args = args.to_vec();
        if !matches!(args[0].as_str(), "lp" | "exact" | "validate") {
            args.extend(["--out".to_string(), out_file.clone()]);
        }
        let mut cmd = Command::new(&bin);
        cmd.args(&args);
        if !workers.is_empty() {
            cmd.env("TILP_WORKERS", workers);
        }
        let o = cmd.output().unwrap();
        (o.stdout, fs::read(&out_file).unwrap_or_default(), o.status.success())
    };
    let mut mismatched = Vec::new();
    let mut failed = Vec::new();
    for (name, args) in &commands {
        let a = run(args, 0, "1");
        let b = run(args, 1, "4");
        if !a.2 || !b.2 {
            failed.push(name.clone());
        }
        if a.0 != b.0 || a.1 != b.1 {
            mismatched.push(name.clone());
        }
    }
    let _ = fs::remove_dir_all(&dir);
    let pass = mismatched.is_empty() && failed.is_empty();
    let mut detail = format!(
        "{} commands run twice (1 vs 4 workers), {} with differing output",
        commands.len(),
        mismatched.len()
    );
    if !pass {
        let _ = write!(detail, "; mismatched {mismatched:?}; failed {failed:?}");
    }
    outcome(pass, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("relaxation validity", relaxation_validity),
        ("identical ratio", || ratio_criterion(false, 2.0 + 2.0 * 2f64.ln() + 0.05, 2.0 + 2.0 * 2f64.ln(), 0xC2)),
        ("unit-size ratio", || ratio_criterion(true, 1.0 + 2f64.sqrt() + 0.05, 1.0 + 2f64.sqrt(), 0xC3)),
        ("related makespan certificate", related_certificate),
        ("unrelated dependent rounding", unrelated_rounding),
        ("structural LP checks", structural_checks),
        ("oracle cross-checks", oracle_cross_checks),
        ("determinism", determinism),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "criterion {} [{}] {name} ({:.1}s): {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
