use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, Model};

use super::{LinearProgram, Relation};

/// The identical-machine relaxation with its variable map.
///
/// Variable `k` is `x_{j,t}` with `(j, t) = index[k]`: job `j` occupies the
/// interval `(t - p_j, t]`.
#[derive(Clone, Debug)]
pub struct IdenticalLp {
    pub lp: LinearProgram,
    pub index: Vec<(usize, i64)>,
}

/// The related-machine makespan relaxation.
#[derive(Clone, Debug)]
pub struct RelatedLp {
    pub lp: LinearProgram,
    /// `x_var[i][j]` is the variable of `x_{i,j}`.
    pub x_var: Vec<Vec<usize>>,
    pub c_var: Vec<usize>,
    pub d_var: usize,
}

/// The unrelated-machine relaxation; `index[k] = (i, j, s)` means job `j`
/// starts at `s` on machine `i`.
#[derive(Clone, Debug)]
pub struct UnrelatedLp {
    pub lp: LinearProgram,
    pub index: Vec<(usize, usize, i64)>,
}

fn require_valid(inst: &Instance, model: Model) -> Result<()> {
    inst.require_model(model)?;
    let v = validate_instance(inst);
    if !v.is_empty() {
        return Err(Error::InvalidInstance(v));
    }
    Ok(())
}

/// Time-indexed relaxation for `P|prec|ΣwC`:
///
/// ```text
/// min Σ_j w_j Σ_t t·x_{j,t}
///   Σ_t x_{j,t} = 1                                   every job j
///   Σ_j Σ_{t ∈ [t', t'+p_j)} x_{j,t} <= m              every t' in 1..=T
///   Σ_{t < t'+p_j'} x_{j',t} <= Σ_{t < t'} x_{j,t}      every j ≺ j', t' in 1..=T
///   x_{j,t} = 0 for t < p_j  (variables omitted),  x >= 0
/// ```
pub fn build_lp_identical(inst: &Instance) -> Result<IdenticalLp> {
    require_valid(inst, Model::Identical)?;
    let n = inst.n();
    let horizon = inst.horizon;
    let pmax = (0..n).map(|j| inst.size(j)).max().unwrap_or(0);
    if horizon < pmax {
        return Err(Error::Internal(format!("horizon {horizon} shorter than largest job {pmax}")));
    }

    let mut lp = LinearProgram::new();
    let mut index = Vec::new();
    // first[j] is the variable of x_{j, p_j}; x_{j,t} is first[j] + t - p_j.
    let mut first = Vec::with_capacity(n);
    for j in 0..n {
        let p = inst.size(j);
        first.push(lp.num_vars());
        for t in p..=horizon {
            lp.add_var(0.0, f64::INFINITY, (inst.weight(j) * t) as f64, format!("x_j{j}_t{t}"));
            index.push((j, t));
        }
    }
    let var = |j: usize, t: i64| -> Option<usize> {
        let p = inst.size(j);
        (t >= p && t <= horizon).then(|| first[j] + (t - p) as usize)
    };

    for j in 0..n {
        let coeffs = (inst.size(j)..=horizon).filter_map(|t| var(j, t)).map(|v| (v, 1.0)).collect();
        lp.add_row(coeffs, Relation::Eq, 1.0, format!("assign_j{j}"));
    }
    for tp in 1..=horizon {
        let mut coeffs = Vec::new();
        for j in 0..n {
            for t in tp..tp + inst.size(j) {
                if let Some(v) = var(j, t) {
                    coeffs.push((v, 1.0));
                }
            }
        }
        lp.add_row(coeffs, Relation::Le, inst.machines as f64, format!("cong_t{tp}"));
    }
    for &(a, b) in inst.dag.edges() {
        let pb = inst.size(b);
        for tp in 1..=horizon {
            let mut coeffs: Vec<(usize, f64)> =
                (1..tp + pb).filter_map(|t| var(b, t)).map(|v| (v, 1.0)).collect();
            coeffs.extend((1..tp).filter_map(|t| var(a, t)).map(|v| (v, -1.0)));
            lp.add_row(coeffs, Relation::Le, 0.0, format!("prec_{a}_{b}_t{tp}"));
        }
    }
    Ok(IdenticalLp { lp, index })
}

fn related_common(inst: &Instance, minimize_makespan: bool) -> Result<RelatedLp> {
    require_valid(inst, Model::Related)?;
    let n = inst.n();
    let m = inst.machines;
    let inv_speed: Vec<f64> = inst
        .speeds
        .iter()
        .map(|s| *s.denom() as f64 / *s.numer() as f64)
        .collect();

    let mut lp = LinearProgram::new();
    let mut x_var = vec![Vec::with_capacity(n); m];
    for (i, row) in x_var.iter_mut().enumerate() {
        for j in 0..n {
            row.push(lp.add_var(0.0, f64::INFINITY, 0.0, format!("x_i{i}_j{j}")));
        }
    }
    let c_var: Vec<usize> = (0..n)
        .map(|j| {
            let cost = if minimize_makespan { 0.0 } else { inst.weight(j) as f64 };
            lp.add_var(0.0, f64::INFINITY, cost, format!("C_j{j}"))
        })
        .collect();
    let d_var = lp.add_var(0.0, f64::INFINITY, if minimize_makespan { 1.0 } else { 0.0 }, "D");

    let load = |j: usize| -> Vec<(usize, f64)> {
        let p = inst.size(j) as f64;
        (0..m).map(|i| (x_var[i][j], p * inv_speed[i])).collect()
    };
    for j in 0..n {
        lp.add_row((0..m).map(|i| (x_var[i][j], 1.0)).collect(), Relation::Eq, 1.0, format!("assign_j{j}"));
    }
    for j in 0..n {
        let mut coeffs = load(j);
        coeffs.push((c_var[j], -1.0));
        lp.add_row(coeffs, Relation::Le, 0.0, format!("proc_j{j}"));
    }
    for &(a, b) in inst.dag.edges() {
        let mut coeffs = load(b);
        coeffs.push((c_var[a], 1.0));
        coeffs.push((c_var[b], -1.0));
        lp.add_row(coeffs, Relation::Le, 0.0, format!("prec_{a}_{b}"));
    }
    for i in 0..m {
        let mut coeffs: Vec<(usize, f64)> =
            (0..n).map(|j| (x_var[i][j], inst.size(j) as f64 * inv_speed[i])).collect();
        coeffs.push((d_var, -1.0));
        lp.add_row(coeffs, Relation::Le, 0.0, format!("cap_i{i}"));
    }
    for j in 0..n {
        lp.add_row(vec![(c_var[j], 1.0), (d_var, -1.0)], Relation::Le, 0.0, format!("cmax_j{j}"));
    }
    Ok(RelatedLp { lp, x_var, c_var, d_var })
}

/// Makespan relaxation for `Q|prec|Cmax`: minimize `D` subject to
/// assignment, processing-time, chain, machine-capacity and `C_j <= D` rows.
///
/// Integral solutions of this LP need not be schedulable; it only bounds the
/// optimal makespan from below.
pub fn build_lp_related_cmax(inst: &Instance) -> Result<RelatedLp> {
    related_common(inst, true)
}

/// Same constraint set with objective `Σ_j w_j C_j`. Used to split jobs into
/// geometric completion-time classes for the weighted-completion wrapper; its
/// value is a lower bound on the optimal `ΣwC`.
pub fn build_lp_related_wc(inst: &Instance) -> Result<RelatedLp> {
    related_common(inst, false)
}

/// Time-indexed relaxation for `R||ΣwC`:
///
/// ```text
/// min Σ_j w_j Σ_{i,s} x_{i,j,s} (s + p_ij)
///   Σ_{i,s} x_{i,j,s} = 1                              every job j
///   Σ_j Σ_{s : (s, s+p_ij] ⊇ (t-1, t]} x_{i,j,s} <= 1    every machine i, t in 1..=T
///   variables only for finite p_ij and s <= T - p_ij,  x >= 0
/// ```
pub fn build_lp_unrelated(inst: &Instance) -> Result<UnrelatedLp> {
    require_valid(inst, Model::Unrelated)?;
    let n = inst.n();
    let m = inst.machines;
    let horizon = inst.horizon;

    let mut lp = LinearProgram::new();
    let mut index = Vec::new();
    // first[i][j] is the variable of x_{i,j,0}.
    let mut first = vec![vec![None; n]; m];
    for i in 0..m {
        for j in 0..n {
            if let Some(p) = inst.pmatrix[i][j] {
                if p > horizon {
                    continue;
                }
                first[i][j] = Some(lp.num_vars());
                for s in 0..=horizon - p {
                    lp.add_var(0.0, f64::INFINITY, (inst.weight(j) * (s + p)) as f64, format!("x_i{i}_j{j}_s{s}"));
                    index.push((i, j, s));
                }
            }
        }
    }
    for j in 0..n {
        let mut coeffs = Vec::new();
        for i in 0..m {
            if let (Some(f), Some(p)) = (first[i][j], inst.pmatrix[i][j]) {
                coeffs.extend((0..=(horizon - p) as usize).map(|s| (f + s, 1.0)));
            }
        }
        lp.add_row(coeffs, Relation::Eq, 1.0, format!("assign_j{j}"));
    }
    for i in 0..m {
        for t in 1..=horizon {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if let (Some(f), Some(p)) = (first[i][j], inst.pmatrix[i][j]) {
                    // (s, s+p] covers (t-1, t] iff t - p <= s <= t - 1.
                    let lo = (t - p).max(0);
                    let hi = (t - 1).min(horizon - p);
                    coeffs.extend((lo..=hi).map(|s| (f + s as usize, 1.0)));
                }
            }
            lp.add_row(coeffs, Relation::Le, 1.0, format!("cong_i{i}_t{t}"));
        }
    }
    Ok(UnrelatedLp { lp, index })
}
