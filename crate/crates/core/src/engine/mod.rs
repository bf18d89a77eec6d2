//! The decomposition drivers: iteration loop, bound tracking, cut
//! management, level-set regularization and the two-stage algorithms.

pub mod cuts;

pub use cuts::{Cut, CutPool};

use std::collections::HashMap;
use std::time::Instant;

use thiserror::Error;

use crate::builder::{
    build_budget_subproblem, build_monolithic, build_regularization_problem,
    build_upper_problem, capacities_of, bound_in_stage2, BlockKey, ComplicatingLayout,
    ComplicatingVector, DecompositionMode, StageCarryover, UpperOptions, YKind,
};
use crate::executor::{solve_batch, Batch, BlockResult, ExecutorError};
use crate::lp::{LpError, LpSolution, LpStatus, SolveOptions};
use crate::model::{labels, System};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("subproblem failure: {0}")]
    Subproblem(#[from] ExecutorError),
    #[error("{problem} failed: {source}")]
    Master {
        problem: String,
        #[source]
        source: LpError,
    },
    #[error("master problem `{problem}` terminated with status {status:?}")]
    MasterNotOptimal { problem: String, status: LpStatus },
    #[error("level-set problem infeasible at LB={lb}, UB={ub}; cuts or bounds are inconsistent")]
    LevelSetInfeasible { lb: f64, ub: f64 },
}

/// When non-binding cuts are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneCadence {
    /// Spatial mode prunes every 10 iterations; other modes only at the
    /// two-stage handoff.
    ModeDefault,
    Never,
    Every(usize),
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Relative convergence tolerance (UB - LB) / LB.
    pub eps_tol: f64,
    /// Coarser tolerance for the second stage of two-stage runs.
    pub stage2_tol: f64,
    pub max_iters: usize,
    /// Level-set parameter.
    pub alpha: f64,
    /// Absolute currency slack above which a cut counts as non-binding.
    pub slack_threshold: f64,
    /// Optional relative alternative: when set, the prune threshold is
    /// this fraction of the current upper bound instead.
    pub relative_slack_threshold: Option<f64>,
    pub prune_cadence: PruneCadence,
    /// Lower bound on every theta variable.
    pub theta_floor: f64,
    /// Capacity margin applied above stage-1 values in stage 2.
    pub stage2_margin: f64,
    pub workers: usize,
    pub solve_options: SolveOptions,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            eps_tol: 1e-3,
            stage2_tol: 1e-2,
            max_iters: 500,
            alpha: 0.5,
            slack_threshold: 10.0,
            relative_slack_threshold: None,
            prune_cadence: PruneCadence::ModeDefault,
            theta_floor: 0.0,
            stage2_margin: 0.05,
            workers: 1,
            solve_options: SolveOptions::default(),
        }
    }
}

/// Resolves the configured prune cadence for a mode: spatial defaults to
/// every 10 iterations, other modes to handoff-only pruning.
pub fn effective_prune_cadence(
    config: &EngineConfig,
    mode: DecompositionMode,
) -> Option<usize> {
    config.effective_cadence(mode)
}

impl EngineConfig {
    fn effective_slack_threshold(&self, ub: f64) -> f64 {
        match self.relative_slack_threshold {
            Some(r) if ub.is_finite() => r * ub.abs().max(1.0),
            _ => self.slack_threshold,
        }
    }

    fn effective_cadence(&self, mode: DecompositionMode) -> Option<usize> {
        match self.prune_cadence {
            PruneCadence::Never => None,
            PruneCadence::Every(n) if n > 0 => Some(n),
            PruneCadence::Every(_) => None,
            PruneCadence::ModeDefault => match mode {
                DecompositionMode::TemporalSpatial => Some(10),
                _ => None,
            },
        }
    }
}

/// One bounds-trace row.
#[derive(Debug, Clone)]
pub struct IterRow {
    pub k: usize,
    pub stage: u8,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
    pub cuts_added: usize,
    pub cuts_pruned: usize,
    pub wall_ms: u64,
}

/// Outcome of a run: bounds trace, incumbent point, capacities and the
/// incumbent's per-block dispatch solutions.
#[derive(Debug)]
pub struct SolveReport {
    pub algorithm: String,
    pub case: String,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub trace: Vec<IterRow>,
    pub capacities: Vec<(String, f64)>,
    pub incumbent: ComplicatingVector,
    pub last_iterate: ComplicatingVector,
    /// Index into `trace` where stage 2 begins, for two-stage runs.
    pub stage2_start: Option<usize>,
    pub wall_ms: u64,
    pub block_count: usize,
    /// Final cut pool (post-pruning where applicable).
    pub pool: CutPool,
    /// Dispatch of the incumbent iterate, one solution per block.
    pub dispatch: Vec<(BlockKey, LpSolution)>,
}

impl SolveReport {
    pub fn cut_pool_size(&self) -> usize {
        self.pool.len()
    }

    pub fn cut_pool(&self) -> &CutPool {
        &self.pool
    }
}

/// Convergence check: gap = (UB - LB) / max(|LB|, 1).
pub fn check_convergence(ub: f64, lb: f64, tol: f64) -> (bool, f64) {
    let gap = (ub - lb) / lb.abs().max(1.0);
    (gap <= tol, gap)
}

/// Best-upper-bound candidate of one iterate: investment cost plus the
/// block objectives.
pub fn upper_bound_candidate(
    layout: &ComplicatingLayout,
    iterate: &ComplicatingVector,
    results: &[BlockResult],
) -> f64 {
    layout.invest_cost(&iterate.y)
        + results.iter().map(|r| r.solution.objective).sum::<f64>()
}

/// Builds one cut per block from the fixing-row duals.
pub fn register_cuts(
    system: &System,
    layout: &ComplicatingLayout,
    iterate: &ComplicatingVector,
    iterate_idx: usize,
    results: &[BlockResult],
) -> Vec<Cut> {
    results
        .iter()
        .zip(&layout.blocks)
        .map(|(res, block)| {
            let g = res.solution.objective;
            let mut terms = Vec::new();
            let mut correction = 0.0;
            for (entry, &value) in layout.entries.iter().zip(&iterate.y) {
                let pi = res
                    .solution
                    .dual(&labels::fix_y(&entry.label))
                    .unwrap_or(0.0);
                if pi != 0.0 {
                    terms.push((entry.label.clone(), -pi));
                    correction += pi * value;
                }
            }
            let block_pos = layout.blocks.iter().position(|b| b == block).unwrap();
            let lambda = res
                .solution
                .dual(&block.fix_q_label(system))
                .unwrap_or(0.0);
            if lambda != 0.0 {
                terms.push((block.q_label(system), -lambda));
                correction += lambda * iterate.q[block_pos];
            }
            Cut {
                block: *block,
                iterate: iterate_idx,
                terms,
                rhs: g - correction,
                intercept: g,
                lambda,
                last_slack: 0.0,
            }
        })
        .collect()
}

/// Records each cut's slack at a master solution.
pub fn mark_slacks(pool: &mut CutPool, system: &System, master: &LpSolution) {
    for cut in &mut pool.cuts {
        let theta = master.value(&cut.block.theta_label(system)).unwrap_or(0.0);
        cut.last_slack = cut.slack_at(theta, master);
    }
}

struct LoopOutcome {
    converged: bool,
    ub: f64,
    lb: f64,
    gap: f64,
    incumbent: ComplicatingVector,
    incumbent_dispatch: Vec<(BlockKey, LpSolution)>,
    last_iterate: ComplicatingVector,
    pool: CutPool,
    trace: Vec<IterRow>,
    final_master: Option<LpSolution>,
}

#[allow(clippy::too_many_arguments)]
fn run_loop(
    system: &System,
    config: &EngineConfig,
    layout: &ComplicatingLayout,
    mut pool: CutPool,
    upper_opts: &UpperOptions,
    tol: f64,
    stage: u8,
    start: ComplicatingVector,
) -> Result<LoopOutcome, EngineError> {
    let mut iterate = start;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut incumbent = iterate.clone();
    let mut incumbent_dispatch = Vec::new();
    let mut trace = Vec::new();
    let cadence = config.effective_cadence(layout.mode);

    let master_err = |problem: &str, e: LpError| EngineError::Master {
        problem: problem.to_string(),
        source: e,
    };

    for k in 0..config.max_iters {
        let t0 = Instant::now();

        // Parallel block phase.
        let problems = layout
            .blocks
            .iter()
            .map(|b| build_budget_subproblem(system, b, layout, &iterate).map(|lp| (*b, lp)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| master_err("subproblem assembly", e))?;
        let results = solve_batch(&Batch {
            problems,
            workers: config.workers,
            options: config.solve_options.clone(),
        })?;

        // Upper bound: best over all evaluated iterates.
        let candidate = upper_bound_candidate(layout, &iterate, &results);
        if candidate < ub {
            ub = candidate;
            incumbent = iterate.clone();
            incumbent_dispatch = results
                .iter()
                .map(|r| (r.key, r.solution.clone()))
                .collect();
        }

        // One cut per block.
        let new_cuts = register_cuts(system, layout, &iterate, k, &results);
        let cuts_added = new_cuts.len();
        for c in new_cuts {
            pool.push(c);
        }

        // Lower bound from the master problem.
        let upper_lp = build_upper_problem(system, layout, &pool, upper_opts)
            .map_err(|e| master_err("upper problem assembly", e))?;
        let upper_sol = upper_lp
            .solve_with(&config.solve_options)
            .map_err(|e| master_err(&upper_lp.name, e))?;
        if upper_sol.status != LpStatus::Optimal {
            return Err(EngineError::MasterNotOptimal {
                problem: upper_lp.name.clone(),
                status: upper_sol.status,
            });
        }
        lb = lb.max(upper_sol.objective);

        // Periodic pruning of non-binding cuts.
        let mut cuts_pruned = 0;
        if let Some(every) = cadence {
            if (k + 1) % every == 0 {
                mark_slacks(&mut pool, system, &upper_sol);
                cuts_pruned = pool.prune(config.effective_slack_threshold(ub));
            }
        }

        let (converged, gap) = check_convergence(ub, lb, tol);
        trace.push(IterRow {
            k,
            stage,
            lb,
            ub,
            gap,
            cuts_added,
            cuts_pruned,
            wall_ms: t0.elapsed().as_millis() as u64,
        });

        if converged {
            return Ok(LoopOutcome {
                converged: true,
                ub,
                lb,
                gap,
                incumbent,
                incumbent_dispatch,
                last_iterate: iterate,
                pool,
                trace,
                final_master: Some(upper_sol),
            });
        }

        // Next iterate from the regularization problem. With no finite
        // upper bound or an empty pool the level set is degenerate and the
        // plain master optimum is used instead.
        let argmin = extract_iterate(layout, system, &upper_sol);
        iterate = if !ub.is_finite() || (pool.is_empty() && lb <= 0.0) {
            argmin
        } else if k % 2 == 1 {
            // Exploit step: evaluate the master optimum itself (a point of
            // the level set, since its cost is LB).
            argmin
        } else {
            let reg_lp = build_regularization_problem(
                system, layout, &pool, upper_opts, lb, ub, config.alpha,
            )
            .map_err(|e| master_err("regularization assembly", e))?;
            let reg_sol = reg_lp
                .solve_with(&config.solve_options)
                .map_err(|e| master_err(&reg_lp.name, e))?;
            match reg_sol.status {
                LpStatus::Optimal => {
                    let interior = extract_iterate(layout, system, &reg_sol);
                    midpoint(&interior, &argmin)
                }
                LpStatus::Infeasible => {
                    return Err(EngineError::LevelSetInfeasible { lb, ub });
                }
                status => {
                    return Err(EngineError::MasterNotOptimal {
                        problem: reg_lp.name.clone(),
                        status,
                    });
                }
            }
        };
    }

    let (_, gap) = check_convergence(ub, lb, tol);
    Ok(LoopOutcome {
        converged: false,
        ub,
        lb,
        gap,
        incumbent,
        incumbent_dispatch,
        last_iterate: iterate,
        pool,
        trace,
        final_master: None,
    })
}

fn extract_iterate(
    layout: &ComplicatingLayout,
    system: &System,
    master: &LpSolution,
) -> ComplicatingVector {
    ComplicatingVector {
        y: layout
            .entries
            .iter()
            .map(|e| master.value(&e.label).unwrap_or(0.0))
            .collect(),
        q: layout
            .blocks
            .iter()
            .map(|b| master.value(&b.q_label(system)).unwrap_or(0.0))
            .collect(),
    }
}

/// Both inputs satisfy every master row, so their midpoint does too; it
/// serves as the deterministic interior point of the level set.
fn midpoint(a: &ComplicatingVector, b: &ComplicatingVector) -> ComplicatingVector {
    ComplicatingVector {
        y: a.y.iter().zip(&b.y).map(|(x, y)| 0.5 * (x + y)).collect(),
        q: a.q.iter().zip(&b.q).map(|(x, y)| 0.5 * (x + y)).collect(),
    }
}

/// Runs one decomposition mode to convergence.
pub fn run(
    mode: DecompositionMode,
    system: &System,
    config: &EngineConfig,
) -> Result<SolveReport, EngineError> {
    let started = Instant::now();
    let layout = ComplicatingLayout::new(system, mode);
    let opts = UpperOptions {
        theta_floor: config.theta_floor,
        ..Default::default()
    };
    let start = ComplicatingVector::zeros(&layout);
    let out = run_loop(system, config, &layout, CutPool::new(), &opts, config.eps_tol, 1, start)?;
    Ok(report_from(mode.as_str(), system, &layout, out, None, started))
}

/// Two-stage algorithm: a budget-based stage warm-starts a temporal stage
/// whose non-storage capacities are bounded to [v, (1 + margin) v] around
/// the stage-1 values, restoring the storage sizing that budget linking
/// relaxes away.
pub fn run_two_stage(
    mode: DecompositionMode,
    system: &System,
    config: &EngineConfig,
) -> Result<SolveReport, EngineError> {
    assert!(
        mode != DecompositionMode::Temporal,
        "two-stage runs take a budget-based mode"
    );
    let started = Instant::now();
    let stage1_layout = ComplicatingLayout::new(system, mode);
    let stage1_opts = UpperOptions {
        theta_floor: config.theta_floor,
        ..Default::default()
    };
    let start = ComplicatingVector::zeros(&stage1_layout);
    let stage1 = run_loop(
        system,
        config,
        &stage1_layout,
        CutPool::new(),
        &stage1_opts,
        config.eps_tol,
        1,
        start,
    )?;
    if !stage1.converged {
        return Ok(report_from(
            &format!("two_stage_{}", mode.as_str()),
            system,
            &stage1_layout,
            stage1,
            None,
            started,
        ));
    }

    // Handoff: drop non-binding cuts, bound capacities, warm start.
    let mut pool = stage1.pool;
    if let Some(master) = &stage1.final_master {
        mark_slacks(&mut pool, system, master);
        pool.prune(config.effective_slack_threshold(stage1.ub));
    }

    let mut bounds = HashMap::new();
    for (entry, &value) in stage1_layout.entries.iter().zip(&stage1.incumbent.y) {
        if let YKind::Capacity { tech } = entry.kind {
            let value = value.max(0.0);
            if bound_in_stage2(system, tech, value) {
                // The margin stays within the technology's build limit.
                let natural = system.tech(tech).max_capacity.unwrap_or(f64::INFINITY);
                let hi = ((1.0 + config.stage2_margin) * value).min(natural);
                bounds.insert(entry.label.clone(), (value.min(hi), hi));
            }
        }
    }

    let stage2_layout = ComplicatingLayout::new(system, DecompositionMode::Temporal);
    let stage2_opts = UpperOptions {
        theta_floor: config.theta_floor,
        bounds,
        carryover: Some(StageCarryover {
            stage1_layout: stage1_layout.clone(),
        }),
    };
    // Warm start at the stage-1 incumbent: shared labels carry over, the
    // per-subperiod emission budgets are the stage-1 block sums.
    let y2: Vec<f64> = stage2_layout
        .entries
        .iter()
        .map(|e| {
            stage1_layout
                .position(&e.label)
                .map(|i| stage1.incumbent.y[i])
                .unwrap_or(0.0)
        })
        .collect();
    let q2: Vec<f64> = stage2_layout
        .blocks
        .iter()
        .map(|b| {
            stage1_layout
                .blocks
                .iter()
                .zip(&stage1.incumbent.q)
                .filter(|(sb, _)| sb.w() == b.w())
                .map(|(_, &q)| q)
                .sum()
        })
        .collect();

    let stage1_trace_len = stage1.trace.len();
    let stage2 = run_loop(
        system,
        config,
        &stage2_layout,
        pool,
        &stage2_opts,
        config.stage2_tol,
        2,
        ComplicatingVector { y: y2, q: q2 },
    )?;

    let mut merged = stage2;
    let mut trace = stage1.trace;
    trace.append(&mut merged.trace);
    merged.trace = trace;
    Ok(report_from(
        &format!("two_stage_{}", mode.as_str()),
        system,
        &stage2_layout,
        merged,
        Some(stage1_trace_len),
        started,
    ))
}

fn report_from(
    algorithm: &str,
    system: &System,
    layout: &ComplicatingLayout,
    out: LoopOutcome,
    stage2_start: Option<usize>,
    started: Instant,
) -> SolveReport {
    SolveReport {
        algorithm: algorithm.to_string(),
        case: system.name().to_string(),
        converged: out.converged,
        iterations: out.trace.len(),
        objective: out.ub,
        lower_bound: out.lb,
        gap: out.gap,
        capacities: capacities_of(layout, system, &out.incumbent.y),
        incumbent: out.incumbent,
        last_iterate: out.last_iterate,
        stage2_start,
        wall_ms: started.elapsed().as_millis() as u64,
        block_count: layout.blocks.len(),
        pool: out.pool,
        trace: out.trace,
        dispatch: out.incumbent_dispatch,
    }
}

/// Solves the monolithic problem directly and shapes the result like a
/// one-iteration report.
pub fn solve_monolithic(
    system: &System,
    config: &EngineConfig,
) -> Result<SolveReport, EngineError> {
    let started = Instant::now();
    let lp = build_monolithic(system).map_err(|e| EngineError::Master {
        problem: "monolithic assembly".into(),
        source: e,
    })?;
    let sol = lp
        .solve_with(&config.solve_options)
        .map_err(|e| EngineError::Master {
            problem: lp.name.clone(),
            source: e,
        })?;
    if sol.status != LpStatus::Optimal {
        return Err(EngineError::MasterNotOptimal {
            problem: lp.name.clone(),
            status: sol.status,
        });
    }
    let layout = ComplicatingLayout::new(system, DecompositionMode::Temporal);
    let y: Vec<f64> = layout
        .entries
        .iter()
        .map(|e| sol.value(&e.label).unwrap_or(0.0))
        .collect();
    let obj = sol.objective;
    let dispatch: Vec<(BlockKey, LpSolution)> = (0..system.subperiods().len())
        .map(|w| (BlockKey::Period { w }, sol.clone()))
        .collect();
    Ok(SolveReport {
        algorithm: "monolithic".into(),
        case: system.name().to_string(),
        converged: true,
        iterations: 1,
        objective: obj,
        lower_bound: obj,
        gap: 0.0,
        trace: vec![IterRow {
            k: 0,
            stage: 1,
            lb: obj,
            ub: obj,
            gap: 0.0,
            cuts_added: 0,
            cuts_pruned: 0,
            wall_ms: started.elapsed().as_millis() as u64,
        }],
        capacities: capacities_of(&layout, system, &y),
        incumbent: ComplicatingVector {
            y,
            q: vec![0.0; layout.blocks.len()],
        },
        last_iterate: ComplicatingVector::zeros(&layout),
        stage2_start: None,
        wall_ms: started.elapsed().as_millis() as u64,
        block_count: 1,
        pool: CutPool::new(),
        dispatch,
    })
}
