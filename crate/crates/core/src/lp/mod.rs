//! Linear programs, the bundled simplex solver, and the three time-indexed
//! relaxations together with solution extraction.

mod build;
mod extract;
mod mps;
mod simplex;

use thiserror::Error;

use crate::instance::Instance;

pub use build::{
    build_lp_identical, build_lp_related_cmax, build_lp_related_wc, build_lp_unrelated, IdenticalLp,
    RelatedLp, UnrelatedLp,
};
pub use extract::{
    check_related_constraints, extract_identical, extract_related, extract_unrelated, FracIdentical,
    FracRelated, FracUnrelated, Rect,
};
pub use mps::write_mps;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub name: String,
}

/// `min c·x` subject to sparse rows and `lower <= x <= upper`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cost: Vec<f64>,
    pub names: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    /// Adds a variable with bounds `[lower, upper]` (`upper` may be infinite).
    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64, name: impl Into<String>) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.push(cost);
        self.names.push(name.into());
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64, name: impl Into<String>) {
        self.rows.push(Row { coeffs, relation, rhs, name: name.into() });
    }

    pub fn check_well_formed(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n || self.names.len() != n {
            return Err(LpError::Malformed("variable arrays differ in length".into()));
        }
        for j in 0..n {
            if !self.lower[j].is_finite() || !self.cost[j].is_finite() || self.upper[j].is_nan() {
                return Err(LpError::Malformed(format!("variable {j} has non-finite data")));
            }
            if self.upper[j] < self.lower[j] {
                return Err(LpError::Malformed(format!("variable {j} has empty bounds")));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {r} has non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::Malformed(format!("row {r} references variable {j}")));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!("row {r} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.num_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Every returned point satisfies all rows and bounds within this slack.
    pub feas_tol: f64,
    /// Reduced-cost tolerance for optimality.
    pub opt_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { feas_tol: 1e-7, opt_tol: 1e-9, max_iterations: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<LpSolution, LpError> {
        match self {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible => Err(LpError::Infeasible),
            LpOutcome::Unbounded => Err(LpError::Unbounded),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("iteration limit {iterations} reached")]
    IterationLimit {
        iterations: usize,
        /// Last primal-feasible point, if phase one had finished.
        best: Option<Vec<f64>>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
}

/// Anything that can solve a [`LinearProgram`]. The relaxation builders and
/// rounding pipelines only talk to this trait.
pub trait LpSolver {
    fn solve(&self, lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome, LpError>;
}

/// Dense-inverse bounded-variable revised simplex with Bland's rule as an
/// anti-cycling fallback.
#[derive(Clone, Copy, Debug, Default)]
pub struct BundledSimplex;

impl LpSolver for BundledSimplex {
    fn solve(&self, lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome, LpError> {
        simplex::solve(lp, cfg)
    }
}

pub fn solve_lp(lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome, LpError> {
    BundledSimplex.solve(lp, cfg)
}

fn solve_point(solver: &dyn LpSolver, lp: &LinearProgram, cfg: &SolverConfig) -> crate::Result<Vec<f64>> {
    Ok(solver.solve(lp, cfg)?.optimal()?.x)
}

/// Builds, solves and extracts the identical-machine relaxation.
pub fn relax_identical(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> crate::Result<FracIdentical> {
    let built = build_lp_identical(inst)?;
    let x = solve_point(solver, &built.lp, cfg)?;
    extract_identical(inst, &built, &x, cfg)
}

/// Builds, solves and extracts the related-machine makespan relaxation.
pub fn relax_related_cmax(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> crate::Result<FracRelated> {
    let built = build_lp_related_cmax(inst)?;
    let x = solve_point(solver, &built.lp, cfg)?;
    extract_related(inst, &built, &x, cfg)
}

/// Same as [`relax_related_cmax`] with the `Σ w_j C_j` objective. Returns the
/// extracted solution and the LP value.
pub fn relax_related_wc(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> crate::Result<(FracRelated, f64)> {
    let built = build_lp_related_wc(inst)?;
    let x = solve_point(solver, &built.lp, cfg)?;
    let value = built.lp.objective_value(&x);
    Ok((extract_related(inst, &built, &x, cfg)?, value))
}

/// Builds, solves and extracts the unrelated-machine relaxation.
pub fn relax_unrelated(inst: &Instance, solver: &dyn LpSolver, cfg: &SolverConfig) -> crate::Result<FracUnrelated> {
    let built = build_lp_unrelated(inst)?;
    let x = solve_point(solver, &built.lp, cfg)?;
    extract_unrelated(inst, &built, &x, cfg)
}
