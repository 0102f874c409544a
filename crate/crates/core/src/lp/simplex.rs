//! Bounded-variable revised simplex.
//!
//! The LP is brought into the computational form `A x = b, 0 <= x <= u` by
//! shifting lower bounds and adding one slack per inequality row. Rows whose
//! slack cannot start basic get an artificial column, and phase one minimizes
//! the artificials. The basis inverse is kept dense and updated by pivoting;
//! it is rebuilt from scratch every `REFACTOR_EVERY` pivots.

use super::{LinearProgram, LpError, LpOutcome, LpSolution, Relation, SolverConfig};

const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const DEGENERATE_LIMIT: usize = 40;
const REFACTOR_EVERY: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
}

struct Standard {
    rows: usize,
    cols: Vec<Vec<(usize, f64)>>,
    upper: Vec<f64>,
    b: Vec<f64>,
    num_struct: usize,
    first_artificial: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    sf: &'a Standard,
    upper: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    max_iterations: usize,
}

pub(super) fn solve(lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome, LpError> {
    lp.check_well_formed()?;
    let n = lp.num_vars();
    let m = lp.rows.len();

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut b: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();
    for (r, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            if a != 0.0 {
                cols[j].push((r, a));
                b[r] -= a * lp.lower[j];
            }
        }
    }
    // Merge duplicate (row, var) coefficients.
    for col in cols.iter_mut() {
        col.sort_by_key(|&(r, _)| r);
        col.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
    }
    let mut upper: Vec<f64> = (0..n).map(|j| lp.upper[j] - lp.lower[j]).collect();

    let mut basis = vec![usize::MAX; m];
    let mut basic_coef = vec![0.0; m];
    for (r, row) in lp.rows.iter().enumerate() {
        let sign = match row.relation {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
            Relation::Eq => continue,
        };
        let j = cols.len();
        cols.push(vec![(r, sign)]);
        upper.push(f64::INFINITY);
        if sign * b[r] >= 0.0 {
            basis[r] = j;
            basic_coef[r] = sign;
        }
    }
    let first_artificial = cols.len();
    for r in 0..m {
        if basis[r] == usize::MAX {
            let sign = if b[r] >= 0.0 { 1.0 } else { -1.0 };
            basis[r] = cols.len();
            basic_coef[r] = sign;
            cols.push(vec![(r, sign)]);
            upper.push(f64::INFINITY);
        }
    }
    let total = cols.len();
    let sf = Standard { rows: m, cols, upper, b, num_struct: n, first_artificial };

    let mut state = vec![VarState::Lower; total];
    for (r, &j) in basis.iter().enumerate() {
        state[j] = VarState::Basic(r);
    }
    let mut binv = vec![0.0; m * m];
    for r in 0..m {
        binv[r * m + r] = 1.0 / basic_coef[r];
    }
    let xb: Vec<f64> = (0..m).map(|r| sf.b[r] / basic_coef[r]).collect();

    let mut spx = Simplex {
        sf: &sf,
        upper: sf.upper.clone(),
        basis,
        state,
        binv,
        xb,
        iterations: 0,
        since_refactor: 0,
        max_iterations: cfg.max_iterations,
    };

    let scale = 1.0 + sf.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if first_artificial < total {
        let phase1: Vec<f64> = (0..total)
            .map(|j| if j >= first_artificial { 1.0 } else { 0.0 })
            .collect();
        match spx.run(&phase1, cfg.opt_tol, false) {
            Ok(_) => {}
            Err(LpError::IterationLimit { iterations, .. }) => {
                return Err(LpError::IterationLimit { iterations, best: None })
            }
            Err(e) => return Err(e),
        }
        let infeas: f64 = (first_artificial..total).map(|j| spx.value(j)).sum();
        if infeas > cfg.feas_tol * scale {
            return Ok(LpOutcome::Infeasible);
        }
        for j in first_artificial..total {
            spx.upper[j] = 0.0;
        }
    }

    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&lp.cost);
    let phase = spx.run(&cost, cfg.opt_tol, true)?;
    if let Phase::Unbounded = phase {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = spx.structural(lp);
    if lp.max_violation(&x) > cfg.feas_tol {
        spx.refactor()?;
        x = spx.structural(lp);
        let v = lp.max_violation(&x);
        if v > cfg.feas_tol {
            return Err(LpError::Numerical(format!("final point violates constraints by {v:e}")));
        }
    }
    let value = lp.objective_value(&x);
    Ok(LpOutcome::Optimal(LpSolution { x, value, iterations: spx.iterations }))
}

impl<'a> Simplex<'a> {
    fn m(&self) -> usize {
        self.sf.rows
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic(r) => self.xb[r],
            VarState::Lower => 0.0,
            VarState::Upper => self.upper[j],
        }
    }

    fn structural(&self, lp: &LinearProgram) -> Vec<f64> {
        (0..self.sf.num_struct)
            .map(|j| {
                let v = self.value(j).max(0.0).min(self.upper[j]);
                lp.lower[j] + v
            })
            .collect()
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut pi = vec![0.0; m];
        for r in 0..m {
            let c = cost[self.basis[r]];
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (p, v) in pi.iter_mut().zip(row) {
                    *p += c * v;
                }
            }
        }
        pi
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        let mut alpha = vec![0.0; m];
        for &(k, a) in &self.sf.cols[j] {
            for (r, out) in alpha.iter_mut().enumerate() {
                *out += self.binv[r * m + k] * a;
            }
        }
        alpha
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m();
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // Gauss-Jordan with partial pivoting on [B | I].
        let mut a = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.sf.cols[j] {
                a[r * m + c] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for c in 0..m {
            let (piv, best) = (c..m)
                .map(|r| (r, a[r * m + c].abs()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < 1e-12 {
                return Err(LpError::Numerical("singular basis".into()));
            }
            if piv != c {
                for k in 0..m {
                    a.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = a[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        // Row c of `inv` now belongs to basis column c.
        self.binv = inv;

        let mut rhs = self.sf.b.clone();
        for (j, st) in self.state.iter().enumerate() {
            if *st == VarState::Upper {
                for &(r, v) in &self.sf.cols[j] {
                    rhs[r] -= v * self.upper[j];
                }
            }
        }
        for r in 0..m {
            self.xb[r] = (0..m).map(|k| self.binv[r * m + k] * rhs[k]).sum();
        }
        Ok(())
    }

    fn pivot(&mut self, p: usize, alpha: &[f64]) {
        let m = self.m();
        let d = alpha[p];
        for k in 0..m {
            self.binv[p * m + k] /= d;
        }
        let (before, rest) = self.binv.split_at_mut(p * m);
        let (prow, after) = rest.split_at_mut(m);
        for (r, chunk) in before.chunks_mut(m).enumerate() {
            let f = alpha[r];
            if f != 0.0 {
                for (x, y) in chunk.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
            }
        }
        for (off, chunk) in after.chunks_mut(m).enumerate() {
            let f = alpha[p + 1 + off];
            if f != 0.0 {
                for (x, y) in chunk.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
            }
        }
    }

    fn run(&mut self, cost: &[f64], opt_tol: f64, phase_two: bool) -> Result<Phase, LpError> {
        let total = self.sf.cols.len();
        let m = self.m();
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.max_iterations {
                let best = phase_two.then(|| {
                    (0..self.sf.num_struct).map(|j| self.value(j)).collect::<Vec<_>>()
                });
                return Err(LpError::IterationLimit { iterations: self.iterations, best });
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }

            let pi = self.duals(cost);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..total {
                let st = self.state[j];
                if matches!(st, VarState::Basic(_)) || self.upper[j] <= 0.0 {
                    continue;
                }
                if !phase_two || j < self.sf.first_artificial {
                    let d = cost[j] - self.sf.cols[j].iter().map(|&(r, a)| pi[r] * a).sum::<f64>();
                    let eligible = match st {
                        VarState::Lower => d < -opt_tol,
                        VarState::Upper => d > opt_tol,
                        VarState::Basic(_) => false,
                    };
                    if eligible {
                        if bland {
                            entering = Some((j, d));
                            break;
                        }
                        if entering.map_or(true, |(_, best)| d.abs() > best.abs()) {
                            entering = Some((j, d));
                        }
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(Phase::Optimal);
            };

            let alpha = self.ftran(q);
            let dir = if self.state[q] == VarState::Lower { 1.0 } else { -1.0 };

            // Ratio test: basic r moves by -t * dir * alpha[r].
            let mut best_t = f64::INFINITY;
            let mut leave: Option<usize> = None;
            for r in 0..m {
                let delta = dir * alpha[r];
                if delta.abs() <= PIVOT_TOL {
                    continue;
                }
                let ub = self.upper[self.basis[r]];
                let t = if delta > 0.0 {
                    self.xb[r].max(0.0) / delta
                } else if ub.is_finite() {
                    (ub - self.xb[r]).max(0.0) / -delta
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some(l) => {
                        if t < best_t - DEGENERATE_STEP {
                            true
                        } else if t <= best_t + DEGENERATE_STEP {
                            if bland {
                                self.basis[r] < self.basis[l]
                            } else {
                                alpha[r].abs() > alpha[l].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some(r);
                }
                best_t = best_t.min(t);
            }
            // The step is taken from the chosen row so that it lands exactly on its bound.
            if let Some(l) = leave {
                let delta = dir * alpha[l];
                let ub = self.upper[self.basis[l]];
                best_t = if delta > 0.0 {
                    self.xb[l].max(0.0) / delta
                } else {
                    (ub - self.xb[l]).max(0.0) / -delta
                };
            }

            let uq = self.upper[q];
            self.iterations += 1;
            if uq.is_finite() && uq <= best_t {
                // Bound flip, basis unchanged.
                for r in 0..m {
                    self.xb[r] -= uq * dir * alpha[r];
                }
                self.state[q] = if dir > 0.0 { VarState::Upper } else { VarState::Lower };
                degenerate = 0;
                bland = false;
                continue;
            }
            let Some(p) = leave else {
                return Ok(Phase::Unbounded);
            };

            let t = best_t;
            for r in 0..m {
                self.xb[r] -= t * dir * alpha[r];
            }
            let leaving = self.basis[p];
            let leaving_hits_lower = dir * alpha[p] > 0.0;
            let entering_value = if dir > 0.0 { t } else { uq - t };
            self.pivot(p, &alpha);
            self.basis[p] = q;
            self.state[q] = VarState::Basic(p);
            self.xb[p] = entering_value;
            self.state[leaving] = if leaving_hits_lower { VarState::Lower } else { VarState::Upper };
            self.since_refactor += 1;

            if t <= DEGENERATE_STEP {
                degenerate += 1;
                if degenerate > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            // Snap tiny drift so that ratio tests stay well defined.
            for r in 0..m {
                if self.xb[r] < 0.0 && self.xb[r] > -PRIMAL_TOL {
                    self.xb[r] = 0.0;
                }
            }
        }
    }
}
