//! Sparse standard-form LPs and a pluggable solver interface.
//!
//! A [`StandardLp`] is `min c'x` subject to rows `a'x {<=,=,>=} b` and
//! variable bounds. Every variable and row carries a stable string label;
//! labels are part of the test contract for problems assembled by
//! [`crate::builder`].
//!
//! Dual sign convention: `dual(row) = d(objective)/d(rhs)` for the
//! minimization as written. Duals of `<=` rows are therefore `<= 0` and
//! duals of `>=` rows are `>= 0`; equality rows are unrestricted. This is
//! the convention under which Benders cuts built from fixing-row duals are
//! valid lower supports of the subproblem value function.

mod simplex;
mod text;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

pub use simplex::{DenseSimplex, SolveOptions};

#[derive(Debug, Error)]
pub enum LpError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("variable `{0}` fixed twice")]
    DuplicateFix(String),
    #[error("solution is not optimal (status {0:?})")]
    NotOptimal(LpStatus),
    #[error("numerical failure in `{problem}`: {detail}")]
    Numerical { problem: String, detail: String },
    #[error("iteration limit ({0}) exhausted")]
    IterationLimit(u64),
    #[error("wall-time limit exceeded")]
    TimeLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct VarDef {
    pub cost: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct RowDef {
    pub sense: Sense,
    pub rhs: f64,
    /// Sorted by variable index, no duplicate entries.
    pub terms: Vec<(u32, f64)>,
}

/// Label tables shared between a problem and its solutions.
#[derive(Debug, Default, Clone)]
pub struct Labels {
    pub(crate) var_names: Vec<String>,
    pub(crate) row_names: Vec<String>,
    pub(crate) var_index: HashMap<String, u32>,
    pub(crate) row_index: HashMap<String, u32>,
}

/// Sparse standard-form LP with stable labels.
#[derive(Debug, Clone, Default)]
pub struct StandardLp {
    pub name: String,
    pub(crate) labels: Arc<Labels>,
    pub(crate) vars: Vec<VarDef>,
    pub(crate) rows: Vec<RowDef>,
}

impl StandardLp {
    pub fn new(name: impl Into<String>) -> Self {
        StandardLp {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable; returns its index.
    pub fn add_var(
        &mut self,
        label: impl Into<String>,
        cost: f64,
        lower: f64,
        upper: f64,
    ) -> Result<u32, LpError> {
        let label = label.into();
        let idx = self.vars.len() as u32;
        let labels = Arc::make_mut(&mut self.labels);
        if labels.var_index.insert(label.clone(), idx).is_some() {
            return Err(LpError::DuplicateLabel(label));
        }
        labels.var_names.push(label);
        self.vars.push(VarDef { cost, lower, upper });
        Ok(idx)
    }

    /// Adds a row. Terms referencing the same variable are merged by
    /// summing their coefficients, so the stored row has no duplicates.
    pub fn add_row(
        &mut self,
        label: impl Into<String>,
        sense: Sense,
        rhs: f64,
        terms: Vec<(u32, f64)>,
    ) -> Result<u32, LpError> {
        let label = label.into();
        let idx = self.rows.len() as u32;
        let labels = Arc::make_mut(&mut self.labels);
        if labels.row_index.insert(label.clone(), idx).is_some() {
            return Err(LpError::DuplicateLabel(label));
        }
        labels.row_names.push(label);
        let mut terms = terms;
        terms.sort_by_key(|&(v, _)| v);
        terms.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        self.rows.push(RowDef { sense, rhs, terms });
        Ok(idx)
    }

    /// Adds `cost` to the objective coefficient of an existing variable.
    pub fn add_cost(&mut self, var: u32, cost: f64) {
        self.vars[var as usize].cost += cost;
    }

    pub fn var_index(&self, label: &str) -> Result<u32, LpError> {
        self.labels
            .var_index
            .get(label)
            .copied()
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))
    }

    pub fn row_index(&self, label: &str) -> Result<u32, LpError> {
        self.labels
            .row_index
            .get(label)
            .copied()
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))
    }

    pub fn has_var(&self, label: &str) -> bool {
        self.labels.var_index.contains_key(label)
    }

    pub fn has_row(&self, label: &str) -> bool {
        self.labels.row_index.contains_key(label)
    }

    pub fn var_label(&self, idx: u32) -> &str {
        &self.labels.var_names[idx as usize]
    }

    pub fn row_label(&self, idx: u32) -> &str {
        &self.labels.row_names[idx as usize]
    }

    pub fn var_labels(&self) -> impl Iterator<Item = &str> {
        self.labels.var_names.iter().map(|s| s.as_str())
    }

    pub fn row_labels(&self) -> impl Iterator<Item = &str> {
        self.labels.row_names.iter().map(|s| s.as_str())
    }

    pub fn bounds(&self, var: u32) -> (f64, f64) {
        let v = &self.vars[var as usize];
        (v.lower, v.upper)
    }

    pub fn set_bounds(&mut self, var: u32, lower: f64, upper: f64) {
        let v = &mut self.vars[var as usize];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn cost(&self, var: u32) -> f64 {
        self.vars[var as usize].cost
    }

    pub fn rhs(&self, row: u32) -> f64 {
        self.rows[row as usize].rhs
    }

    pub fn row_terms(&self, row: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.rows[row as usize].terms.iter().copied()
    }

    /// Fixes variables by adding one equality row `var = value` per entry,
    /// labelled `fix_y(<var label>)`. Original rows are untouched.
    pub fn fix_variables(&self, assignments: &[(&str, f64)]) -> Result<StandardLp, LpError> {
        let mut out = self.clone();
        let mut seen = HashMap::new();
        for &(label, value) in assignments {
            if seen.insert(label.to_string(), ()).is_some() {
                return Err(LpError::DuplicateFix(label.to_string()));
            }
            out.fix_variable_as(label, value, format!("fix_y({label})"))?;
        }
        Ok(out)
    }

    /// Fixes a single variable with an explicit row label (used for the
    /// `fix_q(...)` budget rows whose duals enter cut gradients).
    ///
    /// The variable's own bounds are widened to free: the fixing row
    /// replaces them, so the full sensitivity `d(objective)/d(value)` is
    /// carried by the row's dual instead of leaking into bound duals at
    /// degenerate points such as `value == lower`.
    pub fn fix_variable_as(
        &mut self,
        var_label: &str,
        value: f64,
        row_label: impl Into<String>,
    ) -> Result<u32, LpError> {
        let var = self.var_index(var_label)?;
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
        self.add_row(row_label, Sense::Eq, value, vec![(var, 1.0)])
    }

    /// Evaluates `c'x` for a primal vector.
    pub fn objective_value(&self, primal: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(primal)
            .map(|(v, &x)| v.cost * x)
            .sum()
    }

    /// Solves with the reference backend and default options.
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.solve_with(&SolveOptions::default())
    }

    pub fn solve_with(&self, options: &SolveOptions) -> Result<LpSolution, LpError> {
        DenseSimplex.solve(self, options)
    }
}

/// A solver backend. Implementations must return valid duals for optimal
/// solutions; the reference implementation is [`DenseSimplex`].
pub trait LpBackend {
    fn solve(&self, problem: &StandardLp, options: &SolveOptions) -> Result<LpSolution, LpError>;
}

/// Solution of a [`StandardLp`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One multiplier per row, `d(objective)/d(rhs)`.
    pub duals: Vec<f64>,
    pub iterations: u64,
    /// max violation of rows and bounds at the reported primal point.
    pub feasibility_residual: f64,
    /// max over rows of |dual * slack|.
    pub complementarity_residual: f64,
    /// |c'x - dual objective|, the strong-duality certificate.
    pub duality_residual: f64,
    labels: Arc<Labels>,
}

impl LpSolution {
    pub(crate) fn new(labels: Arc<Labels>) -> Self {
        LpSolution {
            status: LpStatus::Optimal,
            objective: 0.0,
            primal: Vec::new(),
            duals: Vec::new(),
            iterations: 0,
            feasibility_residual: 0.0,
            complementarity_residual: 0.0,
            duality_residual: 0.0,
            labels,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Primal value of a labelled variable.
    pub fn value(&self, label: &str) -> Result<f64, LpError> {
        let idx = self
            .labels
            .var_index
            .get(label)
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))?;
        Ok(self.primal[*idx as usize])
    }

    /// All (label, primal value) pairs in variable order.
    pub fn values(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels
            .var_names
            .iter()
            .map(|s| s.as_str())
            .zip(self.primal.iter().copied())
    }

    /// Dual multiplier of a labelled row; the cut-building accessor.
    pub fn dual(&self, label: &str) -> Result<f64, LpError> {
        if self.status != LpStatus::Optimal {
            return Err(LpError::NotOptimal(self.status));
        }
        let idx = self
            .labels
            .row_index
            .get(label)
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))?;
        Ok(self.duals[*idx as usize])
    }
}

/// `dual_of` from the solver contract: multiplier of a fixing row.
pub fn dual_of(solution: &LpSolution, row_label: &str) -> Result<f64, LpError> {
    solution.dual(row_label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_rejected() {
        let mut lp = StandardLp::new("t");
        lp.add_var("x", 1.0, 0.0, f64::INFINITY).unwrap();
        assert!(matches!(
            lp.add_var("x", 0.0, 0.0, 1.0),
            Err(LpError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn row_terms_are_merged() {
        let mut lp = StandardLp::new("t");
        let x = lp.add_var("x", 1.0, 0.0, f64::INFINITY).unwrap();
        let r = lp
            .add_row("r", Sense::Le, 1.0, vec![(x, 1.0), (x, 2.0)])
            .unwrap();
        let terms: Vec<_> = lp.row_terms(r).collect();
        assert_eq!(terms, vec![(x, 3.0)]);
    }

    #[test]
    fn fixing_same_label_twice_errors() {
        let mut lp = StandardLp::new("t");
        lp.add_var("y", 5.0, 0.0, f64::INFINITY).unwrap();
        let err = lp.fix_variables(&[("y", 0.0), ("y", 1.0)]).unwrap_err();
        assert!(matches!(err, LpError::DuplicateFix(_)));
    }
}
