//! Builder contracts: master-problem examples, level-set arithmetic, cut
//! behavior at its generating iterate, block coverage, and the spatial
//! conservation property.

mod common;

use std::collections::HashSet;

use cem_core::builder::{
    build_budget_subproblem, build_monolithic, build_regularization_problem,
    build_relaxed_monolithic, build_upper_problem, BlockKey, ComplicatingLayout,
    ComplicatingVector, DecompositionMode, UpperOptions,
};
use cem_core::engine::{register_cuts, Cut, CutPool, EngineConfig};
use cem_core::executor::{solve_batch, Batch};
use cem_core::lp::SolveOptions;

fn upper_opts() -> UpperOptions {
    UpperOptions::default()
}

/// Empty pool, theta floor 0, zero investment costs: nothing constrains
/// the master, LB = 0.
#[test]
fn empty_pool_zero_costs_gives_zero_lower_bound() {
    let system = common::zero_demand();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::Temporal);
    let lp = build_upper_problem(&system, &layout, &CutPool::new(), &upper_opts()).unwrap();
    let sol = lp.solve().unwrap();
    assert!(sol.is_optimal());
    assert_eq!(sol.objective, 0.0);
}

/// One constant cut theta_w >= 5 lifts the bound to 5 plus the cheapest
/// investment (zero here).
#[test]
fn constant_cut_sets_lower_bound() {
    let system = common::zero_demand();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::Temporal);
    let mut pool = CutPool::new();
    pool.push(Cut {
        block: BlockKey::Period { w: 0 },
        iterate: 0,
        terms: Vec::new(),
        rhs: 5.0,
        intercept: 5.0,
        lambda: 0.0,
        last_slack: 0.0,
    });
    let lp = build_upper_problem(&system, &layout, &pool, &upper_opts()).unwrap();
    let sol = lp.solve().unwrap();
    assert!((sol.objective - 5.0).abs() < 1e-9);
}

/// LB = 100, UB = 110, alpha = 0.5 puts the level row at 105.
#[test]
fn level_set_rhs_arithmetic() {
    let system = common::zero_demand();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::Temporal);
    let lp = build_regularization_problem(
        &system,
        &layout,
        &CutPool::new(),
        &upper_opts(),
        100.0,
        110.0,
        0.5,
    )
    .unwrap();
    let row = lp.row_index("levelset").unwrap();
    assert_eq!(lp.rhs(row), 105.0);
    // Feasibility objective: every cost is zero.
    for j in 0..lp.num_vars() as u32 {
        assert_eq!(lp.cost(j), 0.0);
    }
}

/// With UB = LB the level row pins the master objective; the problem stays
/// feasible and any optimal master point satisfies it.
#[test]
fn degenerate_level_set_is_feasible() {
    let system = common::solar_gas_battery();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::Temporal);
    let iterate = ComplicatingVector::zeros(&layout);
    let problems = layout
        .blocks
        .iter()
        .map(|b| (*b, build_budget_subproblem(&system, b, &layout, &iterate).unwrap()))
        .collect();
    let results = solve_batch(&Batch {
        problems,
        workers: 2,
        options: SolveOptions::default(),
    })
    .unwrap();
    let mut pool = CutPool::new();
    for c in register_cuts(&system, &layout, &iterate, 0, &results) {
        pool.push(c);
    }
    let upper = build_upper_problem(&system, &layout, &pool, &upper_opts()).unwrap();
    let lb = upper.solve().unwrap().objective;
    let reg = build_regularization_problem(&system, &layout, &pool, &upper_opts(), lb, lb, 0.5)
        .unwrap();
    let sol = reg.solve().unwrap();
    assert!(sol.is_optimal());
}

/// A fresh cut evaluated at its own generating iterate reproduces the
/// subproblem objective exactly (all gradient terms vanish).
#[test]
fn cut_is_tight_at_generating_iterate() {
    let system = common::solar_gas_battery();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::Temporal);
    let iterate = ComplicatingVector::zeros(&layout);
    let problems = layout
        .blocks
        .iter()
        .map(|b| (*b, build_budget_subproblem(&system, b, &layout, &iterate).unwrap()))
        .collect();
    let results = solve_batch(&Batch {
        problems,
        workers: 1,
        options: SolveOptions::default(),
    })
    .unwrap();
    let cuts = register_cuts(&system, &layout, &iterate, 0, &results);
    for (cut, result) in cuts.iter().zip(&results) {
        let pos = layout.blocks.iter().position(|b| b == &cut.block).unwrap();
        let estimate = cut.estimate_at(|label| {
            layout
                .position(label)
                .map(|i| iterate.y[i])
                .unwrap_or(iterate.q[pos])
        });
        let g = result.solution.objective;
        assert!(
            (estimate - g).abs() <= 1e-9 * (1.0 + g.abs()),
            "estimate {estimate} vs g {g}"
        );
    }
}

fn operational_labels(lp: &cem_core::lp::StandardLp) -> HashSet<String> {
    lp.var_labels()
        .filter(|l| l.starts_with("x_") || l.starts_with("lvl"))
        .map(str::to_string)
        .collect()
}

/// Block coverage: the union of subproblem variables over all blocks of a
/// mode equals the monolithic variable set, modulo budget and auxiliary
/// variables (the spatial net-outflow aggregate).
#[test]
fn block_coverage_accounts_for_every_variable() {
    let system = common::two_zone_two_sector();
    let mono = build_monolithic(&system).unwrap();
    let mono_ops = operational_labels(&mono);
    for mode in [
        DecompositionMode::Temporal,
        DecompositionMode::TemporalSectoral,
        DecompositionMode::TemporalSpatial,
    ] {
        let layout = ComplicatingLayout::new(&system, mode);
        let iterate = ComplicatingVector::zeros(&layout);
        let mut union: HashSet<String> = HashSet::new();
        for b in &layout.blocks {
            let sub = build_budget_subproblem(&system, b, &layout, &iterate).unwrap();
            union.extend(operational_labels(&sub));
        }
        match mode {
            DecompositionMode::TemporalSpatial => {
                // Transport flows are replaced by the x_net aggregates in
                // the blocks and reappear as master-side translations.
                let upper =
                    build_upper_problem(&system, &layout, &CutPool::new(), &upper_opts()).unwrap();
                union.extend(operational_labels(&upper));
                let missing: Vec<_> = mono_ops
                    .iter()
                    .filter(|l| !union.contains(*l))
                    .collect();
                assert!(missing.is_empty(), "missing {missing:?}");
            }
            _ => {
                let missing: Vec<_> = mono_ops
                    .iter()
                    .filter(|l| !union.contains(*l))
                    .collect();
                assert!(missing.is_empty(), "{mode:?} missing {missing:?}");
                let extra: Vec<_> = union
                    .iter()
                    .filter(|l| !mono_ops.contains(*l))
                    .collect();
                assert!(extra.is_empty(), "{mode:?} extra {extra:?}");
            }
        }
    }
}

/// Sectoral subproblems contain no foreign-sector technology variables.
#[test]
fn sectoral_block_excludes_other_sectors() {
    let system = common::two_zone_two_sector();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::TemporalSectoral);
    let iterate = ComplicatingVector::zeros(&layout);
    let power = system.sector_index("power").unwrap();
    let block = BlockKey::PeriodSector { w: 0, s: power };
    let sub = build_budget_subproblem(&system, &block, &layout, &iterate).unwrap();
    // The electrolyzer lives in the hydrogen sector; its dispatch must not
    // appear in the power block (its capacity does, as a fixed variable).
    assert!(!sub.has_var("x_gen(electrolyzer_z1,0)"));
    assert!(sub.has_var("x_gen(gas_z1,0)"));
    assert!(sub.has_var("y_cap(electrolyzer_z1)"));
}

/// Spatial masters conserve transported energy: the translation variables
/// pair up so budgets sum to zero over zones.
#[test]
fn spatial_master_conserves_transport() {
    let system = common::two_zone_two_sector();
    let layout = ComplicatingLayout::new(&system, DecompositionMode::TemporalSpatial);
    let iterate = ComplicatingVector::zeros(&layout);
    let problems = layout
        .blocks
        .iter()
        .map(|b| (*b, build_budget_subproblem(&system, b, &layout, &iterate).unwrap()))
        .collect();
    let results = solve_batch(&Batch {
        problems,
        workers: 2,
        options: SolveOptions::default(),
    })
    .unwrap();
    let mut pool = CutPool::new();
    for c in register_cuts(&system, &layout, &iterate, 0, &results) {
        pool.push(c);
    }
    let upper = build_upper_problem(&system, &layout, &pool, &upper_opts()).unwrap();
    let sol = upper.solve().unwrap();
    for sp in system.subperiods() {
        let mut total = 0.0;
        for zone in system.zones() {
            if let Ok(v) = sol.value(&format!("y_trn(electricity,{zone},{})", sp.id)) {
                total += v;
            }
        }
        assert!(total.abs() <= 1e-7, "net transport {total} over zones");
    }
}

/// The relaxed monolithic oracle for the temporal mode reproduces the
/// monolithic optimum (the per-subperiod budget split is free).
#[test]
fn temporal_relaxation_is_exact() {
    let system = common::two_zone_two_sector();
    let mono = build_monolithic(&system).unwrap().solve().unwrap();
    let rel = build_relaxed_monolithic(&system, DecompositionMode::Temporal)
        .unwrap()
        .solve()
        .unwrap();
    assert!((mono.objective - rel.objective).abs() <= 1e-6 * (1.0 + mono.objective.abs()));
}

/// A worse iterate never raises the best upper bound.
#[test]
fn upper_bound_is_monotone_under_worse_iterates() {
    let system = common::solar_gas_battery();
    let config = EngineConfig {
        workers: 2,
        ..Default::default()
    };
    let report = cem_core::engine::run(DecompositionMode::Temporal, &system, &config).unwrap();
    let mut prev = f64::INFINITY;
    for row in &report.trace {
        assert!(row.ub <= prev + 1e-12);
        prev = row.ub;
    }
}

/// The canonical row labels of built problems are bit-exact contracts,
/// visible through the LP text export.
#[test]
fn canonical_labels_are_bit_exact() {
    let system = common::two_zone_two_sector();
    let mono = build_monolithic(&system).unwrap();
    let text = mono.to_lp_text();
    assert!(text.contains("\nbal(elec,z1,power,0): "));
    assert!(text.contains("\nemis: "));

    let layout = ComplicatingLayout::new(&system, DecompositionMode::TemporalSectoral);
    let iterate = ComplicatingVector::zeros(&layout);
    let s = system.sector_index("power").unwrap();
    let sub = build_budget_subproblem(
        &system,
        &BlockKey::PeriodSector { w: 0, s },
        &layout,
        &iterate,
    )
    .unwrap();
    let text = sub.to_lp_text();
    assert!(text.contains("\nemis(w0,power): "));
    assert!(text.contains("\nfix_y(y_cap(gas_z1)): "));
    assert!(text.contains("\nfix_q(w0,power): "));
    assert!(text.contains("\nbexp(elec,z1,power,hydrogen,w0): "));

    let mut pool = CutPool::new();
    pool.push(Cut {
        block: BlockKey::PeriodSector { w: 0, s },
        iterate: 3,
        terms: Vec::new(),
        rhs: 1.0,
        intercept: 1.0,
        lambda: 0.0,
        last_slack: 0.0,
    });
    let reg = build_regularization_problem(&system, &layout, &pool, &upper_opts(), 10.0, 20.0, 0.5)
        .unwrap();
    let text = reg.to_lp_text();
    assert!(text.contains("\ncut(3,w0,power): "));
    assert!(text.contains("\nlevelset: "));
    assert!(text.contains("\nbasym(elec,z1,power,hydrogen,w0): "));
    assert!(text.contains("\nbcap(elec,z1,power,hydrogen,w0): "));
}
