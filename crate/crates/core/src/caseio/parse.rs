//! Strict parsers for the case-file formats. All take text so they can be
//! driven directly by the fuzz targets.

use serde::Deserialize;

use super::CaseError;
use crate::aggregate::Partition;
use crate::model::{CouplingLink, TechKind, TechnologySpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default)]
    pub name: String,
    pub zones: Vec<String>,
    pub sectors: Vec<String>,
    pub vectors: Vec<String>,
    pub hours_per_subperiod: usize,
    pub emission_cap: f64,
    #[serde(default = "default_nse")]
    pub nse_penalty: f64,
    #[serde(default)]
    pub nse_overrides: Vec<NseOverride>,
    #[serde(default)]
    pub demand: Vec<DemandBlock>,
}

fn default_nse() -> f64 {
    crate::model::DEFAULT_NSE_PENALTY
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NseOverride {
    pub vector: String,
    pub sector: String,
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandBlock {
    pub vector: String,
    #[serde(default)]
    pub sector: Option<String>,
    pub file: String,
}

pub fn parse_system_toml(text: &str) -> Result<SystemFile, CaseError> {
    toml::from_str(text).map_err(|e| CaseError::Schema {
        file: "system.toml".into(),
        message: e.to_string(),
    })
}

struct CsvTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(text: &str, file: &str, expected: &[&str]) -> Result<CsvTable, CaseError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CaseError::Schema {
            file: file.into(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if !expected.is_empty() && headers != expected {
        return Err(CaseError::Schema {
            file: file.into(),
            message: format!(
                "header mismatch: expected `{}`, found `{}`",
                expected.join(","),
                headers.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CaseError::Parse {
            file: file.into(),
            row: i + 2,
            column: String::new(),
            message: e.to_string(),
        })?;
        rows.push(record.iter().map(|c| c.to_string()).collect());
    }
    Ok(CsvTable { headers, rows })
}

fn cell_f64(table: &CsvTable, file: &str, row: usize, col: usize) -> Result<f64, CaseError> {
    let raw = &table.rows[row][col];
    raw.parse::<f64>().map_err(|_| CaseError::Parse {
        file: file.into(),
        row: row + 2,
        column: table.headers[col].clone(),
        message: format!("`{raw}` is not a number"),
    })
}

fn cell_opt_f64(
    table: &CsvTable,
    file: &str,
    row: usize,
    col: usize,
) -> Result<Option<f64>, CaseError> {
    if table.rows[row][col].is_empty() {
        Ok(None)
    } else {
        cell_f64(table, file, row, col).map(Some)
    }
}

fn cell_opt_str(table: &CsvTable, row: usize, col: usize) -> Option<String> {
    let raw = &table.rows[row][col];
    if raw.is_empty() {
        None
    } else {
        Some(raw.clone())
    }
}

const TECH_HEADER: &[&str] = &[
    "id",
    "kind",
    "zone",
    "zone_to",
    "sector",
    "vector",
    "vector_in",
    "invest_cost",
    "var_cost",
    "availability",
    "emission_rate",
    "max_capacity",
    "efficiency_out",
    "efficiency_in",
    "power_ratio",
    "long_duration",
];

pub fn parse_technologies_csv(text: &str) -> Result<Vec<TechnologySpec>, CaseError> {
    let file = "technologies.csv";
    let table = read_csv(text, file, TECH_HEADER)?;
    let mut out = Vec::new();
    for r in 0..table.rows.len() {
        let kind = match table.rows[r][1].as_str() {
            "generation" => TechKind::Generation,
            "storage" => TechKind::Storage,
            "conversion" => TechKind::Conversion,
            "transmission" => {
                return Err(CaseError::Schema {
                    file: file.into(),
                    message: format!(
                        "row {}: transmission belongs in links.csv",
                        r + 2
                    ),
                })
            }
            other => {
                return Err(CaseError::Parse {
                    file: file.into(),
                    row: r + 2,
                    column: "kind".into(),
                    message: format!("unknown kind `{other}`"),
                })
            }
        };
        let long_duration = match table.rows[r][15].as_str() {
            "" | "false" => false,
            "true" => true,
            other => {
                return Err(CaseError::Parse {
                    file: file.into(),
                    row: r + 2,
                    column: "long_duration".into(),
                    message: format!("`{other}` is not a boolean"),
                })
            }
        };
        out.push(TechnologySpec {
            id: table.rows[r][0].clone(),
            kind,
            zone: table.rows[r][2].clone(),
            zone_to: cell_opt_str(&table, r, 3),
            sector: table.rows[r][4].clone(),
            vector: table.rows[r][5].clone(),
            vector_in: cell_opt_str(&table, r, 6),
            invest_cost: cell_f64(&table, file, r, 7)?,
            var_cost: cell_f64(&table, file, r, 8)?,
            availability: cell_opt_str(&table, r, 9),
            emission_rate: cell_opt_f64(&table, file, r, 10)?.unwrap_or(0.0),
            max_capacity: cell_opt_f64(&table, file, r, 11)?,
            efficiency_out: cell_opt_f64(&table, file, r, 12)?,
            efficiency_in: cell_opt_f64(&table, file, r, 13)?,
            power_ratio: cell_opt_f64(&table, file, r, 14)?,
            long_duration,
        });
    }
    Ok(out)
}

const LINKS_HEADER: &[&str] = &[
    "id",
    "kind",
    "vector",
    "zone_a",
    "zone_b",
    "sector",
    "sector_a",
    "sector_b",
    "invest_cost",
    "var_cost",
    "max_capacity",
];

/// Parsed links table: transmission rows become transmission technologies,
/// coupling rows declare inter-sector exchange points.
#[derive(Debug, Default)]
pub struct LinksFile {
    pub transmissions: Vec<TechnologySpec>,
    pub couplings: Vec<CouplingLink>,
}

pub fn parse_links_csv(text: &str) -> Result<LinksFile, CaseError> {
    let file = "links.csv";
    let table = read_csv(text, file, LINKS_HEADER)?;
    let mut out = LinksFile::default();
    for r in 0..table.rows.len() {
        match table.rows[r][1].as_str() {
            "transmission" => {
                let mut tech = TechnologySpec::new(
                    &table.rows[r][0],
                    TechKind::Transmission,
                    &table.rows[r][3],
                    &table.rows[r][5],
                    &table.rows[r][2],
                );
                tech.zone_to = cell_opt_str(&table, r, 4);
                tech.invest_cost = cell_opt_f64(&table, file, r, 8)?.unwrap_or(0.0);
                tech.var_cost = cell_opt_f64(&table, file, r, 9)?.unwrap_or(0.0);
                tech.max_capacity = cell_opt_f64(&table, file, r, 10)?;
                if cell_opt_str(&table, r, 6).is_some() || cell_opt_str(&table, r, 7).is_some() {
                    return Err(CaseError::Schema {
                        file: file.into(),
                        message: format!(
                            "row {}: transmission rows take `sector`, not `sector_a`/`sector_b`",
                            r + 2
                        ),
                    });
                }
                out.transmissions.push(tech);
            }
            kind @ ("coupling" | "coupling_directed") => {
                for (col, idx) in [("zone_b", 4usize), ("sector", 5), ("invest_cost", 8), ("var_cost", 9), ("max_capacity", 10)] {
                    if !table.rows[r][idx].is_empty() {
                        return Err(CaseError::Schema {
                            file: file.into(),
                            message: format!("row {}: coupling rows leave `{col}` empty", r + 2),
                        });
                    }
                }
                out.couplings.push(CouplingLink {
                    id: table.rows[r][0].clone(),
                    vector: table.rows[r][2].clone(),
                    zone: table.rows[r][3].clone(),
                    sector_a: table.rows[r][6].clone(),
                    sector_b: table.rows[r][7].clone(),
                    directional: kind == "coupling_directed",
                });
            }
            other => {
                return Err(CaseError::Parse {
                    file: file.into(),
                    row: r + 2,
                    column: "kind".into(),
                    message: format!("unknown kind `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Parses an hourly series CSV: first column `hour` (0-based, dense and
/// ascending), remaining columns named by zone (or zone.sector).
pub fn parse_series_csv(text: &str, file: &str) -> Result<Vec<(String, Vec<f64>)>, CaseError> {
    let table = read_csv(text, file, &[])?;
    if table.headers.first().map(String::as_str) != Some("hour") {
        return Err(CaseError::Schema {
            file: file.into(),
            message: "first column must be `hour`".into(),
        });
    }
    if table.headers.len() < 2 {
        return Err(CaseError::Schema {
            file: file.into(),
            message: "series needs at least one value column".into(),
        });
    }
    let mut columns: Vec<(String, Vec<f64>)> = table.headers[1..]
        .iter()
        .map(|h| (h.clone(), Vec::with_capacity(table.rows.len())))
        .collect();
    for r in 0..table.rows.len() {
        let hour = cell_f64(&table, file, r, 0)?;
        if hour != r as f64 {
            return Err(CaseError::Parse {
                file: file.into(),
                row: r + 2,
                column: "hour".into(),
                message: format!("expected hour {r}, found {hour}"),
            });
        }
        for (c, (_, values)) in columns.iter_mut().enumerate() {
            values.push(cell_f64(&table, file, r, c + 1)?);
        }
    }
    Ok(columns)
}

/// Parses `partition.csv`: `week,representative,weight` per original week.
pub fn parse_partition_csv(text: &str) -> Result<Partition, CaseError> {
    let file = "partition.csv";
    let table = read_csv(text, file, &["week", "representative", "weight"])?;
    let n = table.rows.len();
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_weights: Vec<usize> = Vec::new();
    let mut assignment = Vec::with_capacity(n);
    for r in 0..n {
        let week = cell_f64(&table, file, r, 0)? as usize;
        if week != r {
            return Err(CaseError::Parse {
                file: file.into(),
                row: r + 2,
                column: "week".into(),
                message: format!("expected week {r}"),
            });
        }
        let rep = cell_f64(&table, file, r, 1)? as usize;
        let weight = cell_f64(&table, file, r, 2)? as usize;
        if rep >= n {
            return Err(CaseError::Parse {
                file: file.into(),
                row: r + 2,
                column: "representative".into(),
                message: format!("representative {rep} out of range"),
            });
        }
        let pos = match reps.iter().position(|&x| x == rep) {
            Some(p) => p,
            None => {
                reps.push(rep);
                rep_weights.push(weight);
                reps.len() - 1
            }
        };
        if rep_weights[pos] != weight {
            return Err(CaseError::Schema {
                file: file.into(),
                message: format!("inconsistent weight for representative {rep}"),
            });
        }
        assignment.push(pos);
    }
    // Canonical order: representatives ascending.
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&i| reps[i]);
    let mut remap = vec![0usize; reps.len()];
    for (new_i, &old_i) in order.iter().enumerate() {
        remap[old_i] = new_i;
    }
    let partition = Partition {
        representatives: order.iter().map(|&i| reps[i]).collect(),
        weights: order.iter().map(|&i| rep_weights[i]).collect(),
        assignment: assignment.iter().map(|&a| remap[a]).collect(),
    };
    let total: usize = partition.weights.iter().sum();
    if total != n {
        return Err(CaseError::Schema {
            file: file.into(),
            message: format!("weights sum to {total}, expected {n}"),
        });
    }
    for (i, &rep) in partition.representatives.iter().enumerate() {
        if partition.assignment.get(rep).copied() != Some(i) {
            return Err(CaseError::Schema {
                file: file.into(),
                message: format!("representative {rep} is not assigned to its own cluster"),
            });
        }
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let text = "hour,z1\n0,1.0\n1,oops\n";
        let err = parse_series_csv(text, "demand.csv").unwrap_err();
        match err {
            CaseError::Parse { file, row, column, .. } => {
                assert_eq!(file, "demand.csv");
                assert_eq!(row, 3);
                assert_eq!(column, "z1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_system_key_is_rejected() {
        let text = r#"
zones = ["z1"]
sectors = ["power"]
vectors = ["elec"]
hours_per_subperiod = 24
emission_cap = 10.0
frobnicate = 3
"#;
        let err = parse_system_toml(text).unwrap_err();
        assert!(err.to_string().contains("frobnicate"), "{err}");
    }

    #[test]
    fn coupling_rows_must_leave_transmission_fields_empty() {
        let text = "id,kind,vector,zone_a,zone_b,sector,sector_a,sector_b,invest_cost,var_cost,max_capacity\n\
                    c1,coupling,elec,z1,z9,,power,hydrogen,,,\n";
        let err = parse_links_csv(text).unwrap_err();
        assert!(err.to_string().contains("zone_b"), "{err}");
    }

    #[test]
    fn partition_roundtrip() {
        let p = parse_partition_csv("week,representative,weight\n0,0,2\n1,1,2\n2,0,2\n3,1,2\n").unwrap();
        assert_eq!(p.representatives, vec![0, 1]);
        assert_eq!(p.weights, vec![2, 2]);
        assert_eq!(p.assignment, vec![0, 1, 0, 1]);
    }
}
