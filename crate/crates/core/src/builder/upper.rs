//! Upper (master) problems and the level-set regularization problem.

use std::collections::HashMap;

use crate::engine::cuts::CutPool;
use crate::lp::{LpError, Sense, StandardLp};
use crate::model::{labels, System};

use super::assemble::Assembler;
use super::{ComplicatingLayout, DecompositionMode, YKind};

const INF: f64 = f64::INFINITY;

/// Stage-1 material carried into a two-stage second-stage master: the
/// stage-1 layout (whose budget variables and rows are rebuilt so that the
/// surviving stage-1 cuts stay well-defined) and the capacity bounds
/// derived from the stage-1 solution.
#[derive(Debug, Clone)]
pub struct StageCarryover {
    pub stage1_layout: ComplicatingLayout,
}

/// Knobs shared by the upper and regularization builders.
#[derive(Debug, Clone, Default)]
pub struct UpperOptions {
    /// Lower bound on every theta variable.
    pub theta_floor: f64,
    /// Bound overrides by variable label (two-stage capacity margins).
    pub bounds: HashMap<String, (f64, f64)>,
    pub carryover: Option<StageCarryover>,
}

/// Builds the master problem: investment costs plus one theta per block,
/// cut rows for the whole pool, per-block emission budgets summing to the
/// cap, investment rows, and the mode's budget machinery.
pub fn build_upper_problem(
    system: &System,
    layout: &ComplicatingLayout,
    pool: &CutPool,
    options: &UpperOptions,
) -> Result<StandardLp, LpError> {
    build_master(system, layout, pool, options, None)
}

/// Builds the level-set regularization problem: the master's feasible set,
/// a constant objective, and the level row
/// `c_y'y + sum(theta) <= lb + alpha (ub - lb)`.
pub fn build_regularization_problem(
    system: &System,
    layout: &ComplicatingLayout,
    pool: &CutPool,
    options: &UpperOptions,
    lb: f64,
    ub: f64,
    alpha: f64,
) -> Result<StandardLp, LpError> {
    build_master(system, layout, pool, options, Some(lb + alpha * (ub - lb)))
}

fn build_master(
    system: &System,
    layout: &ComplicatingLayout,
    pool: &CutPool,
    options: &UpperOptions,
    level: Option<f64>,
) -> Result<StandardLp, LpError> {
    let feasibility_only = level.is_some();
    let name = if feasibility_only {
        format!("regularization({})", layout.mode.as_str())
    } else {
        format!("upper({})", layout.mode.as_str())
    };
    let mut asm = Assembler::new(system, name);
    asm.add_complicating_vars(layout, !feasibility_only)?;
    asm.add_storage_linking_rows()?;
    match layout.mode {
        DecompositionMode::Temporal => {}
        DecompositionMode::TemporalSectoral => asm.add_sectoral_budget_rows()?,
        DecompositionMode::TemporalSpatial => asm.add_spatial_budget_rows()?,
    }

    let mut lp = asm.lp;
    for (label, &(lo, hi)) in &options.bounds {
        let var = lp.var_index(label)?;
        lp.set_bounds(var, lo, hi);
    }

    // Emission budgets and theta variables of the mode's own blocks.
    let theta_cost = if feasibility_only { 0.0 } else { 1.0 };
    let mut q_sum = Vec::new();
    for block in &layout.blocks {
        let q = lp.add_var(block.q_label(system), 0.0, 0.0, INF)?;
        q_sum.push((q, 1.0));
        lp.add_var(
            block.theta_label(system),
            theta_cost,
            options.theta_floor,
            INF,
        )?;
    }
    lp.add_row(labels::EMIS_GLOBAL, Sense::Le, system.emission_cap(), q_sum)?;

    // Two-stage handoff: rebuild the stage-1 budget variables and rows,
    // stage-1 per-block budgets and thetas, and the linking rows
    // theta(w) >= sum over delta theta(w,delta), q(w) = sum q(w,delta).
    if let Some(carry) = &options.carryover {
        let s1 = &carry.stage1_layout;
        let mut asm = Assembler { sys: system, lp, emission_terms: Vec::new() };
        for entry in &s1.entries {
            if matches!(entry.kind, YKind::ExportBudget { .. } | YKind::TransportBudget { .. }) {
                let (lo, hi) = s1.natural_bounds(system, entry);
                asm.lp.add_var(entry.label.clone(), 0.0, lo, hi)?;
            }
        }
        match s1.mode {
            DecompositionMode::Temporal => {}
            DecompositionMode::TemporalSectoral => asm.add_sectoral_budget_rows()?,
            DecompositionMode::TemporalSpatial => asm.add_spatial_budget_rows()?,
        }
        lp = asm.lp;
        for block in &s1.blocks {
            lp.add_var(block.q_label(system), 0.0, 0.0, INF)?;
            lp.add_var(block.theta_label(system), 0.0, options.theta_floor, INF)?;
        }
        for (w, sp) in system.subperiods().iter().enumerate() {
            let theta_w = lp.var_index(&labels::theta_period(&sp.id))?;
            let q_w = lp.var_index(&labels::q_period(&sp.id))?;
            let mut theta_row = vec![(theta_w, 1.0)];
            let mut q_row = vec![(q_w, -1.0)];
            for block in s1.blocks.iter().filter(|b| b.w() == w) {
                theta_row.push((lp.var_index(&block.theta_label(system))?, -1.0));
                q_row.push((lp.var_index(&block.q_label(system))?, 1.0));
            }
            lp.add_row(labels::theta_link(&sp.id), Sense::Ge, 0.0, theta_row)?;
            lp.add_row(labels::q_link(&sp.id), Sense::Eq, 0.0, q_row)?;
        }
    }

    // Cut rows.
    for cut in &pool.cuts {
        let theta = lp.var_index(&cut.block.theta_label(system))?;
        let mut row = vec![(theta, 1.0)];
        for (label, coef) in &cut.terms {
            row.push((lp.var_index(label)?, *coef));
        }
        lp.add_row(
            cut.block.cut_label(system, cut.iterate),
            Sense::Ge,
            cut.rhs,
            row,
        )?;
    }

    // Level-set row over the true master objective.
    if let Some(level) = level {
        let mut row = Vec::new();
        for entry in &layout.entries {
            if entry.invest_cost != 0.0 {
                row.push((lp.var_index(&entry.label)?, entry.invest_cost));
            }
        }
        for block in &layout.blocks {
            row.push((lp.var_index(&block.theta_label(system))?, 1.0));
        }
        lp.add_row(labels::LEVELSET, Sense::Le, level, row)?;
    }
    Ok(lp)
}
