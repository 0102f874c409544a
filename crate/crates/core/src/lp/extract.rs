use crate::error::{Error, Result};
use crate::instance::Instance;

use super::build::{IdenticalLp, RelatedLp, UnrelatedLp};
use super::SolverConfig;

/// Repaired fractional solution of the identical-machine relaxation.
#[derive(Clone, Debug, PartialEq)]
pub struct FracIdentical {
    /// `x[j][t]` for `t` in `0..=T`; entries with `t < p_j` are zero.
    pub x: Vec<Vec<f64>>,
    /// `C_j = Σ_t t·x_{j,t}`.
    pub completion: Vec<f64>,
    pub lp_value: f64,
}

impl FracIdentical {
    /// Builds the derived quantities from explicit masses `x[j][t]`.
    pub fn from_x(inst: &Instance, x: Vec<Vec<f64>>) -> Self {
        let completion: Vec<f64> = x
            .iter()
            .map(|row| row.iter().enumerate().map(|(t, v)| t as f64 * v).sum())
            .collect();
        let lp_value = completion.iter().enumerate().map(|(j, c)| inst.weight(j) as f64 * c).sum();
        FracIdentical { x, completion, lp_value }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FracRelated {
    /// `x[i][j]`: fraction of job `j` on machine `i`.
    pub x: Vec<Vec<f64>>,
    pub completion: Vec<f64>,
    /// The makespan bound `D`.
    pub makespan: f64,
}

/// One rectangle `R_{i,j,s}`: job `j` starts at `s` on machine `i` with height `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub machine: usize,
    pub job: usize,
    pub start: i64,
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FracUnrelated {
    /// Positive rectangles sorted by `(machine, job, start)`.
    pub rects: Vec<Rect>,
    /// `y[i][j] = Σ_s x_{i,j,s}`.
    pub y: Vec<Vec<f64>>,
    /// `phi[i][j]`: mass-weighted mean start on `i`; zero where `y` is zero.
    pub phi: Vec<Vec<f64>>,
    pub completion: Vec<f64>,
    pub lp_value: f64,
}

impl FracUnrelated {
    pub fn from_rects(inst: &Instance, mut rects: Vec<Rect>) -> Self {
        rects.sort_by_key(|r| (r.machine, r.job, r.start));
        let (m, n) = (inst.machines, inst.n());
        let mut y = vec![vec![0.0; n]; m];
        let mut phi = vec![vec![0.0; n]; m];
        let mut completion = vec![0.0; n];
        for r in &rects {
            let p = inst.pmatrix[r.machine][r.job].expect("rectangle on a forbidden machine");
            y[r.machine][r.job] += r.x;
            phi[r.machine][r.job] += r.x * r.start as f64;
            completion[r.job] += r.x * (r.start + p) as f64;
        }
        for i in 0..m {
            for j in 0..n {
                if y[i][j] > 0.0 {
                    phi[i][j] /= y[i][j];
                }
            }
        }
        let lp_value = completion.iter().enumerate().map(|(j, c)| inst.weight(j) as f64 * c).sum();
        FracUnrelated { rects, y, phi, completion, lp_value }
    }

    pub fn rects_of(&self, machine: usize, job: usize) -> impl Iterator<Item = &Rect> {
        self.rects.iter().filter(move |r| r.machine == machine && r.job == job)
    }
}

/// Clamps small negatives and rescales each group of entries to sum to one.
/// `groups[g]` lists the positions of one job's variables inside `vals`.
fn repair(vals: &mut [f64], groups: &[Vec<usize>], cfg: &SolverConfig) -> Result<()> {
    let limit = 10.0 * cfg.feas_tol;
    for (g, members) in groups.iter().enumerate() {
        let mut sum = 0.0;
        for &k in members {
            if vals[k] < -limit {
                return Err(Error::TooInfeasible(format!("job {g} has entry {}", vals[k])));
            }
            vals[k] = vals[k].max(0.0);
            sum += vals[k];
        }
        if (sum - 1.0).abs() > limit {
            return Err(Error::TooInfeasible(format!("job {g} has total mass {sum}")));
        }
        for &k in members {
            vals[k] /= sum;
        }
    }
    Ok(())
}

pub fn extract_identical(inst: &Instance, lp: &IdenticalLp, point: &[f64], cfg: &SolverConfig) -> Result<FracIdentical> {
    let n = inst.n();
    let mut vals = point[..lp.index.len()].to_vec();
    let mut groups = vec![Vec::new(); n];
    for (k, &(j, _)) in lp.index.iter().enumerate() {
        groups[j].push(k);
    }
    repair(&mut vals, &groups, cfg)?;
    let mut x = vec![vec![0.0; inst.horizon as usize + 1]; n];
    for (k, &(j, t)) in lp.index.iter().enumerate() {
        x[j][t as usize] = vals[k];
    }
    let frac = FracIdentical::from_x(inst, x);
    let tol = n as f64 * cfg.feas_tol;
    for &(a, b) in inst.dag.edges() {
        let (ca, cb) = (frac.completion[a], frac.completion[b]);
        if ca + inst.size(b) as f64 > cb + tol {
            return Err(Error::Internal(format!(
                "extracted completions violate C_{a} + p_{b} <= C_{b}: {ca} + {} > {cb}",
                inst.size(b)
            )));
        }
    }
    Ok(frac)
}

pub fn extract_related(inst: &Instance, lp: &RelatedLp, point: &[f64], cfg: &SolverConfig) -> Result<FracRelated> {
    let (m, n) = (inst.machines, inst.n());
    let mut vals: Vec<f64> = Vec::with_capacity(m * n);
    let mut groups = vec![Vec::with_capacity(m); n];
    for j in 0..n {
        for i in 0..m {
            groups[j].push(vals.len());
            vals.push(point[lp.x_var[i][j]]);
        }
    }
    repair(&mut vals, &groups, cfg)?;
    let mut x = vec![vec![0.0; n]; m];
    for j in 0..n {
        for i in 0..m {
            x[i][j] = vals[j * m + i];
        }
    }
    let completion = lp.c_var.iter().map(|&v| point[v].max(0.0)).collect();
    Ok(FracRelated { x, completion, makespan: point[lp.d_var].max(0.0) })
}

/// Lists every violated row of the related-machine relaxation for `frac`,
/// each beyond `tol` relative to the row's scale.
pub fn check_related_constraints(inst: &Instance, frac: &FracRelated, tol: f64) -> Vec<String> {
    let (m, n) = (inst.machines, inst.n());
    let inv: Vec<f64> = inst.speeds.iter().map(|s| *s.denom() as f64 / *s.numer() as f64).collect();
    let load = |j: usize| -> f64 { (0..m).map(|i| frac.x[i][j] * inv[i]).sum::<f64>() * inst.size(j) as f64 };
    let mut out = Vec::new();
    for j in 0..n {
        let mass: f64 = (0..m).map(|i| frac.x[i][j]).sum();
        if (mass - 1.0).abs() > tol {
            out.push(format!("job {j} total mass {mass}"));
        }
        if (0..m).any(|i| frac.x[i][j] < -tol) {
            out.push(format!("job {j} has a negative entry"));
        }
        if load(j) > frac.completion[j] + tol * frac.completion[j].max(1.0) {
            out.push(format!("job {j} processing time exceeds C_{j}"));
        }
        if frac.completion[j] > frac.makespan + tol * frac.makespan.max(1.0) {
            out.push(format!("C_{j} exceeds D"));
        }
    }
    for &(a, b) in inst.dag.edges() {
        if frac.completion[a] + load(b) > frac.completion[b] + tol * frac.completion[b].max(1.0) {
            out.push(format!("precedence {a} -> {b} violated"));
        }
    }
    for i in 0..m {
        let total: f64 = (0..n).map(|j| inst.size(j) as f64 * frac.x[i][j] * inv[i]).sum();
        if total > frac.makespan + tol * frac.makespan.max(1.0) {
            out.push(format!("machine {i} load {total} exceeds D"));
        }
    }
    out
}

pub fn extract_unrelated(inst: &Instance, lp: &UnrelatedLp, point: &[f64], cfg: &SolverConfig) -> Result<FracUnrelated> {
    let n = inst.n();
    let mut vals = point[..lp.index.len()].to_vec();
    let mut groups = vec![Vec::new(); n];
    for (k, &(_, j, _)) in lp.index.iter().enumerate() {
        groups[j].push(k);
    }
    repair(&mut vals, &groups, cfg)?;
    let rects = lp
        .index
        .iter()
        .zip(&vals)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&(machine, job, start), &x)| Rect { machine, job, start, x })
        .collect();
    Ok(FracUnrelated::from_rects(inst, rects))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{build_lp_identical, build_lp_unrelated};

    #[test]
    fn integral_point_unchanged() {
        let inst = Instance::identical(&[1, 1], &[1, 2], 1, &[(0, 1)]);
        let lp = build_lp_identical(&inst).unwrap();
        let mut point = vec![0.0; lp.lp.num_vars()];
        for (k, &(j, t)) in lp.index.iter().enumerate() {
            if (j, t) == (0, 1) || (j, t) == (1, 3) {
                point[k] = 1.0;
            }
        }
        let frac = extract_identical(&inst, &lp, &point, &SolverConfig::default()).unwrap();
        assert_eq!(frac.completion, vec![1.0, 3.0]);
        assert_eq!(frac.lp_value, 4.0);
    }

    #[test]
    fn tiny_negative_clamped_and_renormalized() {
        let inst = Instance::identical(&[1], &[1], 1, &[]);
        let lp = build_lp_identical(&inst).unwrap();
        assert_eq!(lp.index, vec![(0, 1)]);
        let inst2 = Instance::identical(&[1, 1], &[1, 1], 2, &[]);
        let lp2 = build_lp_identical(&inst2).unwrap();
        // index: (0,1), (0,2), (1,1), (1,2)
        let point = vec![1.0 + 1e-9, -1e-9, 0.5, 0.5];
        let frac = extract_identical(&inst2, &lp2, &point, &SolverConfig::default()).unwrap();
        assert_eq!(frac.x[0][2], 0.0);
        assert_eq!(frac.x[0][1], 1.0);
        let point = vec![1.0, -1e-3, 0.5, 0.5];
        assert!(matches!(
            extract_identical(&inst2, &lp2, &point, &SolverConfig::default()),
            Err(Error::TooInfeasible(_))
        ));
    }

    #[test]
    fn phi_is_mean_start() {
        let inst = Instance::unrelated(&[1], vec![vec![Some(1)], vec![Some(1)]]);
        let frac = FracUnrelated::from_rects(
            &inst,
            vec![
                Rect { machine: 0, job: 0, start: 0, x: 0.2 },
                Rect { machine: 0, job: 0, start: 5, x: 0.2 },
                Rect { machine: 1, job: 0, start: 0, x: 0.6 },
            ],
        );
        assert!((frac.y[0][0] - 0.4).abs() < 1e-15);
        assert!((frac.phi[0][0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn unrelated_extraction_drops_zeros() {
        let inst = Instance::unrelated(&[1], vec![vec![Some(2)]]);
        let lp = build_lp_unrelated(&inst).unwrap();
        let point = vec![1.0, 0.0, 0.0];
        let frac = extract_unrelated(&inst, &lp, &point, &SolverConfig::default()).unwrap();
        assert_eq!(frac.rects.len(), 1);
        assert_eq!(frac.completion, vec![2.0]);
    }
}
