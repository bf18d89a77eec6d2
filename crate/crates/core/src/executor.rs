//! Bulk-synchronous parallel solution of independent subproblem batches.
//!
//! Workers share nothing mutable; results are reduced in batch order after
//! all solves complete, so objectives and duals are bitwise independent of
//! the worker count and of scheduling.

use rayon::prelude::*;
use thiserror::Error;

use crate::builder::BlockKey;
use crate::lp::{LpError, LpSolution, LpStatus, SolveOptions, StandardLp};

#[derive(Debug, Error)]
pub enum ExecutorError {
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("block `{key}` timed out")]
    Timeout { key: String },
    #[error("block `{key}` failed: {source}")]
    SolverFailure {
        key: String,
        #[source]
        source: LpError,
    },
    #[error("block `{key}` terminated with status {status:?}")]
    NotOptimal { key: String, status: LpStatus },
}

/// An ordered batch of independent LPs keyed by block.
pub struct Batch {
    pub problems: Vec<(BlockKey, StandardLp)>,
    pub workers: usize,
    pub options: SolveOptions,
}

#[derive(Debug)]
pub struct BlockResult {
    pub key: BlockKey,
    pub solution: LpSolution,
    pub wall_ms: u64,
}

/// Solves every problem of a batch on a dedicated pool; results come back
/// in batch order. A non-optimal or failed block fails the whole batch
/// with that block's key.
pub fn solve_batch(batch: &Batch) -> Result<Vec<BlockResult>, ExecutorError> {
    solve_batch_with(batch, |lp, opts| {
        lp.solve_with(opts)
    })
}

/// Generic driver: `solve` runs on worker threads.
pub fn solve_batch_with(
    batch: &Batch,
    solve: impl Fn(&StandardLp, &SolveOptions) -> Result<LpSolution, LpError> + Sync,
) -> Result<Vec<BlockResult>, ExecutorError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(batch.workers.max(1))
        .build()
        .map_err(|e| ExecutorError::Pool(e.to_string()))?;

    let results: Vec<Result<BlockResult, ExecutorError>> = pool.install(|| {
        batch
            .problems
            .par_iter()
            .map(|(key, lp)| {
                let start = std::time::Instant::now();
                match solve(lp, &batch.options) {
                    Ok(solution) if solution.status == LpStatus::Optimal => Ok(BlockResult {
                        key: *key,
                        solution,
                        wall_ms: start.elapsed().as_millis() as u64,
                    }),
                    Ok(solution) => Err(ExecutorError::NotOptimal {
                        key: lp.name.clone(),
                        status: solution.status,
                    }),
                    Err(LpError::TimeLimit) => Err(ExecutorError::Timeout {
                        key: lp.name.clone(),
                    }),
                    Err(e) => Err(ExecutorError::SolverFailure {
                        key: lp.name.clone(),
                        source: e,
                    }),
                }
            })
            .collect()
    });

    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Sense;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn tiny_lp(name: &str, rhs: f64) -> StandardLp {
        let mut lp = StandardLp::new(name);
        let x = lp.add_var("x", 1.0, 0.0, f64::INFINITY).unwrap();
        lp.add_row("r", Sense::Ge, rhs, vec![(x, 1.0)]).unwrap();
        lp
    }

    #[test]
    fn batch_of_one_matches_direct_solve() {
        let lp = tiny_lp("a", 3.0);
        let direct = lp.solve().unwrap();
        let batch = Batch {
            problems: vec![(BlockKey::Period { w: 0 }, lp)],
            workers: 1,
            options: SolveOptions::default(),
        };
        let out = solve_batch(&batch).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].solution.objective.to_bits(), direct.objective.to_bits());
    }

    #[test]
    fn identical_problems_identical_results() {
        let problems: Vec<_> = (0..12)
            .map(|w| (BlockKey::Period { w }, tiny_lp("same", 5.0)))
            .collect();
        let batch = Batch {
            problems,
            workers: 4,
            options: SolveOptions::default(),
        };
        let out = solve_batch(&batch).unwrap();
        assert_eq!(out.len(), 12);
        let first = out[0].solution.objective.to_bits();
        assert!(out.iter().all(|r| r.solution.objective.to_bits() == first));
        // Order preserved regardless of completion order.
        for (i, r) in out.iter().enumerate() {
            assert_eq!(r.key, BlockKey::Period { w: i });
        }
    }

    #[test]
    fn concurrency_stays_within_worker_count() {
        let problems: Vec<_> = (0..16)
            .map(|w| (BlockKey::Period { w }, tiny_lp("c", 1.0)))
            .collect();
        let batch = Batch {
            problems,
            workers: 2,
            options: SolveOptions::default(),
        };
        let live = AtomicUsize::new(0);
        let peak = AtomicUsize::new(0);
        solve_batch_with(&batch, |lp, opts| {
            let now = live.fetch_add(1, Ordering::SeqCst) + 1;
            peak.fetch_max(now, Ordering::SeqCst);
            std::thread::sleep(std::time::Duration::from_millis(2));
            let out = lp.solve_with(opts);
            live.fetch_sub(1, Ordering::SeqCst);
            out
        })
        .unwrap();
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }

    #[test]
    fn results_are_bitwise_identical_across_worker_counts() {
        let problems = |n: usize| -> Vec<(BlockKey, StandardLp)> {
            (0..n)
                .map(|w| (BlockKey::Period { w }, tiny_lp(&format!("p{w}"), 1.0 + w as f64)))
                .collect()
        };
        let solve = |workers: usize| {
            solve_batch(&Batch {
                problems: problems(6),
                workers,
                options: SolveOptions::default(),
            })
            .unwrap()
        };
        let one = solve(1);
        let eight = solve(8);
        for (a, b) in one.iter().zip(&eight) {
            assert_eq!(a.solution.objective.to_bits(), b.solution.objective.to_bits());
            for (x, y) in a.solution.duals.iter().zip(&b.solution.duals) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn exhausted_time_limit_reports_timeout() {
        let mut big = StandardLp::new("slow");
        // Enough structure that the solve cannot finish in zero time.
        let vars: Vec<u32> = (0..50)
            .map(|i| big.add_var(format!("x{i}"), 1.0, 0.0, f64::INFINITY).unwrap())
            .collect();
        for (i, &v) in vars.iter().enumerate() {
            big.add_row(format!("r{i}"), Sense::Ge, 1.0 + i as f64, vec![(v, 1.0)])
                .unwrap();
        }
        let batch = Batch {
            problems: vec![(BlockKey::Period { w: 0 }, big)],
            workers: 1,
            options: SolveOptions {
                time_limit_ms: Some(0),
                ..Default::default()
            },
        };
        match solve_batch(&batch) {
            Err(ExecutorError::Timeout { key }) => assert_eq!(key, "slow"),
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn failing_block_reports_its_key() {
        let mut bad = StandardLp::new("bad");
        let x = bad.add_var("x", 0.0, 0.0, f64::INFINITY).unwrap();
        bad.add_row("r", Sense::Le, -1.0, vec![(x, 1.0)]).unwrap();
        let batch = Batch {
            problems: vec![
                (BlockKey::Period { w: 0 }, tiny_lp("ok", 1.0)),
                (BlockKey::Period { w: 1 }, bad),
            ],
            workers: 2,
            options: SolveOptions::default(),
        };
        let err = solve_batch(&batch).unwrap_err();
        match err {
            ExecutorError::NotOptimal { key, status } => {
                assert_eq!(key, "bad");
                assert_eq!(status, LpStatus::Infeasible);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
