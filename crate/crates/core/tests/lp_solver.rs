//! Solver correctness: hand-checked duals, finite-difference sensitivity
//! oracles, and randomized KKT self-validation.

use cem_core::lp::{dual_of, LpStatus, Sense, SolveOptions, StandardLp};
use proptest::prelude::*;

const INF: f64 = f64::INFINITY;

/// min 5y + x, x >= 2, y fixed at 0: fixing-row dual is d(obj)/dy = 5.
#[test]
fn dual_of_accessor_matches_and_rejects_unknowns() {
    let mut lp = StandardLp::new("d");
    let x = lp.add_var("x", 1.0, 0.0, INF).unwrap();
    lp.add_row("r", Sense::Ge, 3.0, vec![(x, 1.0)]).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(dual_of(&sol, "r").unwrap(), sol.dual("r").unwrap());
    assert!(dual_of(&sol, "nope").is_err());
}

#[test]
fn fixing_row_dual_is_sensitivity() {
    let mut lp = StandardLp::new("fix");
    let y = lp.add_var("y", 5.0, 0.0, INF).unwrap();
    let x = lp.add_var("x", 1.0, 0.0, INF).unwrap();
    lp.add_row("demand", Sense::Ge, 2.0, vec![(x, 1.0)]).unwrap();
    let _ = y;
    let fixed = lp.fix_variables(&[("y", 0.0)]).unwrap();
    let sol = fixed.solve().unwrap();
    assert!(sol.is_optimal());
    assert!((sol.objective - 2.0).abs() < 1e-9);
    assert!((sol.dual("fix_y(y)").unwrap() - 5.0).abs() < 1e-9);
}

/// A variable fixed where it only feeds a slack row has multiplier zero.
#[test]
fn inactive_fixing_dual_is_zero() {
    // min 2a s.t. a >= 3, a + x <= 100; x fixed at 4 leaves the second
    // row slack, so the fixing row carries no sensitivity.
    let mut lp = StandardLp::new("inact");
    let a = lp.add_var("a", 2.0, 0.0, INF).unwrap();
    let x = lp.add_var("x", 0.0, 0.0, INF).unwrap();
    lp.add_row("need", Sense::Ge, 3.0, vec![(a, 1.0)]).unwrap();
    lp.add_row("room", Sense::Le, 100.0, vec![(a, 1.0), (x, 1.0)])
        .unwrap();
    lp.fix_variable_as("x", 4.0, "fix_y(x)").unwrap();
    let sol = lp.solve().unwrap();
    assert!((sol.objective - 6.0).abs() < 1e-9);
    assert!((sol.dual("fix_y(x)").unwrap()).abs() < 1e-9);
}

fn two_stage_lp(fix_at: f64) -> StandardLp {
    // min 3a + 2b s.t. a + b >= 4, a - b <= 1, capacity c fixed; b <= c.
    let mut lp = StandardLp::new("sens");
    let a = lp.add_var("a", 3.0, 0.0, INF).unwrap();
    let b = lp.add_var("b", 2.0, 0.0, INF).unwrap();
    let c = lp.add_var("c", 0.0, 0.0, INF).unwrap();
    lp.add_row("cover", Sense::Ge, 4.0, vec![(a, 1.0), (b, 1.0)])
        .unwrap();
    lp.add_row("ramp", Sense::Le, 1.0, vec![(a, 1.0), (b, -1.0)])
        .unwrap();
    lp.add_row("cap", Sense::Le, 0.0, vec![(b, 1.0), (c, -1.0)])
        .unwrap();
    lp.fix_variable_as("c", fix_at, "fix_y(c)").unwrap();
    lp
}

/// Central finite difference of the optimal value matches the fixing dual.
#[test]
fn finite_difference_dual_oracle() {
    let delta = 1e-4;
    let at = 2.0; // capacity binds, ramp slack: feasible and smooth both sides
    let base = two_stage_lp(at).solve().unwrap();
    let up = two_stage_lp(at + delta).solve().unwrap();
    let dn = two_stage_lp(at - delta).solve().unwrap();
    let fd = (up.objective - dn.objective) / (2.0 * delta);
    let dual = base.dual("fix_y(c)").unwrap();
    assert!(
        (fd - dual).abs() <= 1e-3,
        "finite difference {fd} vs dual {dual}"
    );
    // Relaxing a binding capacity must not increase cost.
    assert!(dual <= 1e-9);
}

/// Equality-heavy problem with free variables (the export-pair pattern).
#[test]
fn free_variable_pair() {
    // min |costs|: e1 free, e2 free, e1 + e2 = 0, supply side pays for e1.
    let mut lp = StandardLp::new("pair");
    let e1 = lp.add_var("e1", 0.0, -INF, INF).unwrap();
    let e2 = lp.add_var("e2", 0.0, -INF, INF).unwrap();
    let g = lp.add_var("g", 2.0, 0.0, INF).unwrap();
    let n = lp.add_var("n", 50.0, 0.0, INF).unwrap();
    lp.add_row("asym", Sense::Eq, 0.0, vec![(e1, 1.0), (e2, 1.0)])
        .unwrap();
    // sector 1: g - e1 = 0 (exports what it makes)
    lp.add_row("bal1", Sense::Eq, 0.0, vec![(g, 1.0), (e1, -1.0)])
        .unwrap();
    // sector 2: -e2 + n = 3 (imports -e2, NSE covers the rest)
    lp.add_row("bal2", Sense::Eq, 3.0, vec![(e2, -1.0), (n, 1.0)])
        .unwrap();
    let sol = lp.solve().unwrap();
    assert!(sol.is_optimal());
    assert!((sol.objective - 6.0).abs() < 1e-8);
    assert!((sol.value("e1").unwrap() - 3.0).abs() < 1e-8);
    assert!((sol.value("e2").unwrap() + 3.0).abs() < 1e-8);
}

#[test]
fn bounded_above_only_variable() {
    // min -x with x <= 7 and x >= -inf via row; optimum at 7.
    let mut lp = StandardLp::new("ub");
    let x = lp.add_var("x", -1.0, -INF, 7.0).unwrap();
    lp.add_row("floor", Sense::Ge, -100.0, vec![(x, 1.0)]).unwrap();
    let sol = lp.solve().unwrap();
    assert!(sol.is_optimal());
    assert!((sol.objective + 7.0).abs() < 1e-9);
}

#[test]
fn zero_rows_bounds_only() {
    let mut lp = StandardLp::new("boxed");
    lp.add_var("x", 2.0, 1.0, 5.0).unwrap();
    lp.add_var("y", -3.0, 0.0, 2.0).unwrap();
    let sol = lp.solve().unwrap();
    assert!(sol.is_optimal());
    assert!((sol.objective - (2.0 - 6.0)).abs() < 1e-9);
}

#[test]
fn empty_row_consistency() {
    let mut lp = StandardLp::new("empty");
    let x = lp.add_var("x", 1.0, 0.0, 1.0).unwrap();
    lp.add_row("zero", Sense::Le, -1.0, vec![(x, 0.0)]).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
}

#[test]
fn determinism_identical_runs() {
    let lp = two_stage_lp(1.5);
    let a = lp.solve().unwrap();
    let b = lp.solve().unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    for (x, y) in a.primal.iter().zip(&b.primal) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for (x, y) in a.duals.iter().zip(&b.duals) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

/// Strategy: small random LPs with bounded coefficients. Each solved
/// instance must self-certify: feasibility, complementarity and strong
/// duality within the documented tolerances.
fn arb_lp() -> impl Strategy<Value = StandardLp> {
    let dim = (1usize..6, 1usize..7);
    dim.prop_flat_map(|(n, m)| {
        let costs = prop::collection::vec(-5.0f64..5.0, n);
        let bounds = prop::collection::vec((0.0f64..2.0, 0.0f64..8.0), n);
        let rows = prop::collection::vec(
            (
                prop::collection::vec(-3.0f64..3.0, n),
                -6.0f64..6.0,
                0u8..3,
            ),
            m,
        );
        (Just(n), costs, bounds, rows).prop_map(|(n, costs, bounds, rows)| {
            let mut lp = StandardLp::new("prop");
            for j in 0..n {
                let (lo, span) = bounds[j];
                lp.add_var(format!("x{j}"), costs[j], lo, lo + span).unwrap();
            }
            for (i, (coefs, rhs, sense)) in rows.iter().enumerate() {
                let sense = match sense {
                    0 => Sense::Le,
                    1 => Sense::Ge,
                    _ => Sense::Eq,
                };
                let terms = coefs
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| (j as u32, c))
                    .collect();
                lp.add_row(format!("r{i}"), sense, *rhs, terms).unwrap();
            }
            lp
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn solved_instances_satisfy_kkt(lp in arb_lp()) {
        let opts = SolveOptions::default();
        match lp.solve_with(&opts) {
            Ok(sol) if sol.status == LpStatus::Optimal => {
                prop_assert!(sol.feasibility_residual <= 1e-6);
                prop_assert!(sol.complementarity_residual <= 1e-6 * (1.0 + sol.objective.abs()));
                prop_assert!(sol.duality_residual <= 1e-6 * (1.0 + sol.objective.abs()));
                // determinism
                let again = lp.solve_with(&opts).unwrap();
                prop_assert_eq!(sol.objective.to_bits(), again.objective.to_bits());
            }
            Ok(_) => {}
            Err(e) => return Err(TestCaseError::fail(format!("solver error: {e}"))),
        }
    }
}
