//! Results and benchmark-report emission.

use std::collections::BTreeMap;
use std::path::Path;

use super::CaseError;
use crate::engine::SolveReport;
use crate::model::{System, TechKind};

fn write_file(path: &Path, contents: &str) -> Result<(), CaseError> {
    std::fs::write(path, contents).map_err(|source| CaseError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes capacities, the bounds trace, a one-line summary and one
/// dispatch CSV per subperiod into `dir`.
pub fn write_results(report: &SolveReport, system: &System, dir: &Path) -> Result<(), CaseError> {
    std::fs::create_dir_all(dir).map_err(|source| CaseError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let mut caps = String::from("technology,capacity\n");
    for (id, v) in &report.capacities {
        caps.push_str(&format!("{id},{v:?}\n"));
    }
    write_file(&dir.join("capacities.csv"), &caps)?;

    let mut trace = String::from("k,stage,lb,ub,gap,cuts_added,cuts_pruned,wall_ms\n");
    for row in &report.trace {
        trace.push_str(&format!(
            "{},{},{:?},{:?},{:?},{},{},{}\n",
            row.k, row.stage, row.lb, row.ub, row.gap, row.cuts_added, row.cuts_pruned, row.wall_ms
        ));
    }
    write_file(&dir.join("bounds_trace.csv"), &trace)?;

    let summary = format!(
        "algorithm,case,converged,objective,lower_bound,gap,iterations,blocks,cuts,wall_ms\n{},{},{},{:?},{:?},{:?},{},{},{},{}\n",
        report.algorithm,
        report.case,
        report.converged,
        report.objective,
        report.lower_bound,
        report.gap,
        report.iterations,
        report.block_count,
        report.cut_pool_size(),
        report.wall_ms
    );
    write_file(&dir.join("summary.csv"), &summary)?;

    // Dispatch per subperiod: operational variables of each block keyed by
    // that block's subperiod, stable (block, declaration) order.
    for (w, sp) in system.subperiods().iter().enumerate() {
        let mut out = String::from("variable,value\n");
        for (key, solution) in &report.dispatch {
            if key.w() != w {
                continue;
            }
            for (label, value) in solution.values() {
                if label.starts_with("x_") || label.starts_with("lvl") {
                    out.push_str(&format!("{label},{value:?}\n"));
                }
            }
        }
        write_file(&dir.join(format!("dispatch_{}.csv", sp.id)), &out)?;
    }
    Ok(())
}

/// Reads a `capacities.csv` back as (technology, value) pairs.
pub fn read_capacities(path: &Path) -> Result<Vec<(String, f64)>, CaseError> {
    let text = std::fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "technology,capacity" {
                return Err(CaseError::Schema {
                    file,
                    message: "expected header `technology,capacity`".into(),
                });
            }
            continue;
        }
        let (id, raw) = line.split_once(',').ok_or_else(|| CaseError::Parse {
            file: file.clone(),
            row: i + 1,
            column: String::new(),
            message: "expected two columns".into(),
        })?;
        let value = raw.parse::<f64>().map_err(|_| CaseError::Parse {
            file: file.clone(),
            row: i + 1,
            column: "capacity".into(),
            message: format!("`{raw}` is not a number"),
        })?;
        out.push((id.to_string(), value));
    }
    Ok(out)
}

/// One benchmark entry: a completed run plus the capacity aggregates used
/// for relative-error reporting.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub algorithm: String,
    pub case: String,
    pub weeks: usize,
    pub runtime_ms: u64,
    pub iterations: usize,
    pub gap: f64,
    pub objective: f64,
    /// Capacity sums keyed by `kind.sector`.
    pub aggregates: BTreeMap<String, f64>,
}

impl BenchmarkRow {
    pub fn from_report(report: &SolveReport, system: &System, weeks: usize) -> Self {
        let mut aggregates = BTreeMap::new();
        for (id, value) in &report.capacities {
            if let Some(tech) = system.technologies().iter().find(|t| t.id == *id) {
                let key = format!("{}.{}", tech.kind.as_str(), tech.sector);
                *aggregates.entry(key).or_insert(0.0) += value;
            }
        }
        let _ = TechKind::Generation;
        BenchmarkRow {
            algorithm: report.algorithm.clone(),
            case: report.case.clone(),
            weeks,
            runtime_ms: report.wall_ms,
            iterations: report.iterations,
            gap: report.gap,
            objective: report.objective,
            aggregates,
        }
    }
}

/// Emits `benchmark.csv` (machine-readable) and `benchmark.txt` (aligned
/// table). The fastest algorithm per (case, weeks) configuration is
/// marked `*`; exact runtime ties are all marked. Relative capacity errors
/// are reported against the monolithic row of the same configuration when
/// present, as (value - monolithic) / monolithic per aggregate.
pub fn emit_benchmark(rows: &[BenchmarkRow], dir: &Path) -> Result<(), CaseError> {
    std::fs::create_dir_all(dir).map_err(|source| CaseError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let mut agg_keys: Vec<String> = Vec::new();
    for row in rows {
        for key in row.aggregates.keys() {
            if !agg_keys.contains(key) {
                agg_keys.push(key.clone());
            }
        }
    }
    agg_keys.sort();

    let reference = |case: &str, weeks: usize| -> Option<&BenchmarkRow> {
        rows.iter()
            .find(|r| r.algorithm == "monolithic" && r.case == case && r.weeks == weeks)
    };
    let best_ms = |case: &str, weeks: usize| -> u64 {
        rows.iter()
            .filter(|r| r.case == case && r.weeks == weeks)
            .map(|r| r.runtime_ms)
            .min()
            .unwrap_or(0)
    };

    let mut csv = String::from("case,weeks,algorithm,best,runtime_ms,iterations,ms_per_iter,gap,objective");
    for key in &agg_keys {
        csv.push_str(&format!(",cap[{key}],relerr[{key}]"));
    }
    csv.push('\n');

    let mut txt = String::new();
    txt.push_str(&format!(
        "{:<18} {:>5} {:<24} {:>4} {:>10} {:>6} {:>10} {:>9} {:>12}\n",
        "case", "weeks", "algorithm", "best", "runtime_ms", "iters", "ms/iter", "gap", "objective"
    ));

    for row in rows {
        let best = row.runtime_ms == best_ms(&row.case, row.weeks);
        let ms_per_iter = row.runtime_ms as f64 / row.iterations.max(1) as f64;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:.3},{:e},{:?}",
            row.case,
            row.weeks,
            row.algorithm,
            best,
            row.runtime_ms,
            row.iterations,
            ms_per_iter,
            row.gap,
            row.objective
        ));
        let reference = reference(&row.case, row.weeks);
        for key in &agg_keys {
            let value = row.aggregates.get(key).copied().unwrap_or(0.0);
            csv.push_str(&format!(",{value:?}"));
            match reference.and_then(|m| m.aggregates.get(key)) {
                Some(&mono) if mono != 0.0 => {
                    csv.push_str(&format!(",{:?}", (value - mono) / mono))
                }
                _ => csv.push(','),
            }
        }
        csv.push('\n');
        txt.push_str(&format!(
            "{:<18} {:>5} {:<24} {:>4} {:>10} {:>6} {:>10.2} {:>9.2e} {:>12.3}\n",
            row.case,
            row.weeks,
            row.algorithm,
            if best { "*" } else { "" },
            row.runtime_ms,
            row.iterations,
            ms_per_iter,
            row.gap,
            row.objective
        ));
    }

    write_file(&dir.join("benchmark.csv"), &csv)?;
    write_file(&dir.join("benchmark.txt"), &txt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(case: &str, algorithm: &str, ms: u64, obj: f64) -> BenchmarkRow {
        BenchmarkRow {
            algorithm: algorithm.into(),
            case: case.into(),
            weeks: 2,
            runtime_ms: ms,
            iterations: 10,
            gap: 1e-4,
            objective: obj,
            aggregates: BTreeMap::from([("generation.power".to_string(), obj / 10.0)]),
        }
    }

    #[test]
    fn benchmark_marks_fastest_per_case() {
        let rows = vec![
            row("a", "monolithic", 50, 100.0),
            row("a", "temporal", 30, 100.01),
            row("b", "monolithic", 10, 70.0),
            row("b", "temporal", 40, 70.0),
        ];
        let dir = tempfile::tempdir().unwrap();
        emit_benchmark(&rows, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].contains("monolithic,false"));
        assert!(lines[2].contains("temporal,true"));
        assert!(lines[3].contains("monolithic,true"));
        assert!(lines[4].contains("temporal,false"));
        // Relative error column present for the decomposed row.
        assert!(lines[2].contains(",0.0001000000000"), "{}", lines[2]);
    }

    #[test]
    fn best_marking_is_invariant_under_row_order() {
        let mut rows = vec![
            row("a", "monolithic", 50, 100.0),
            row("a", "temporal", 30, 100.01),
            row("b", "x", 10, 1.0),
        ];
        let dir = tempfile::tempdir().unwrap();
        emit_benchmark(&rows, dir.path()).unwrap();
        let fwd = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
        rows.reverse();
        emit_benchmark(&rows, dir.path()).unwrap();
        let rev = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
        let marked = |text: &str| -> Vec<String> {
            text.lines()
                .filter(|l| l.contains(",true,"))
                .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(","))
                .collect()
        };
        let mut a = marked(&fwd);
        let mut b = marked(&rev);
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn ties_are_all_marked() {
        let rows = vec![row("a", "x", 20, 1.0), row("a", "y", 20, 1.0)];
        let dir = tempfile::tempdir().unwrap();
        emit_benchmark(&rows, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
        assert_eq!(csv.matches(",true,").count(), 2);
    }
}
