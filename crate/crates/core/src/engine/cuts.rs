//! Benders cuts and their pool.

use crate::builder::BlockKey;
use crate::lp::LpSolution;

/// One optimality cut: in the master problem it reads
///
/// ```text
/// theta(block) + sum(coef * var) >= rhs
/// ```
///
/// where `terms` carries `-pi` on the y labels and `-lambda` on the
/// block's emission budget label, and
/// `rhs = g - pi'y_j - lambda q_j` for the generating iterate j.
#[derive(Debug, Clone)]
pub struct Cut {
    pub block: BlockKey,
    /// Generating iterate index; part of the row label.
    pub iterate: usize,
    pub terms: Vec<(String, f64)>,
    pub rhs: f64,
    /// Subproblem objective at the generating iterate.
    pub intercept: f64,
    /// Emission-budget multiplier at the generating iterate.
    pub lambda: f64,
    /// Slack observed at the most recent master solution.
    pub last_slack: f64,
}

impl Cut {
    /// The cut's lower estimate of the block cost at a point given by
    /// label lookups: `rhs - sum(coef * value)`.
    pub fn estimate_at(&self, mut value_of: impl FnMut(&str) -> f64) -> f64 {
        let correction: f64 = self.terms.iter().map(|(l, c)| c * value_of(l)).sum();
        self.rhs - correction
    }

    /// Slack of the cut row at a master solution (nonnegative when the
    /// solution satisfies the cut; zero when binding).
    pub fn slack_at(&self, theta_value: f64, solution: &LpSolution) -> f64 {
        let lhs: f64 = theta_value
            + self
                .terms
                .iter()
                .map(|(l, c)| c * solution.value(l).unwrap_or(0.0))
                .sum::<f64>();
        lhs - self.rhs
    }
}

/// Indexed cut collection with binding/slack bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn push(&mut self, cut: Cut) {
        self.cuts.push(cut);
    }

    /// Removes cuts whose recorded slack exceeds the threshold; returns
    /// how many were dropped. Pruned cuts are discarded permanently.
    pub fn prune(&mut self, slack_threshold: f64) -> usize {
        let before = self.cuts.len();
        self.cuts.retain(|c| c.last_slack <= slack_threshold);
        before - self.cuts.len()
    }
}
