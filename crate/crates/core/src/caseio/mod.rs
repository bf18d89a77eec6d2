//! Case-file ingestion and results emission.
//!
//! A case is a directory:
//!
//! ```text
//! case/
//!   system.toml          scalar config: ids, horizon, cap, penalties
//!   technologies.csv     generation | storage | conversion rows
//!   links.csv            transmission and sector-coupling rows (optional)
//!   <series>.csv         one hourly CSV per time series
//!   partition.csv        optional precomputed aggregation
//! ```
//!
//! All CSVs share the same hour count; see `docs/case-format.md` for the
//! full schema. Parsing is strict: unknown keys and columns are errors,
//! and every cell error names its file, row and column.

mod parse;
mod write;

pub use parse::{
    parse_links_csv, parse_partition_csv, parse_series_csv, parse_system_toml,
    parse_technologies_csv, LinksFile, SystemFile,
};
pub use write::{emit_benchmark, read_capacities, write_results, BenchmarkRow};

use std::path::Path;

use thiserror::Error;

use crate::aggregate::Partition;
use crate::model::{
    DemandSeries, IndexSets, NsePenalty, SeriesTable, SystemSpec, TechKind,
};

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {file} (row {row}, column {column}): {message}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        message: String,
    },
    #[error("schema violation in {file}: {message}")]
    Schema { file: String, message: String },
}

fn read(path: &Path) -> Result<String, CaseError> {
    std::fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a case directory into a full-horizon [`SystemSpec`]. Aggregation
/// (an explicit `partition.csv` or a fresh clustering) is applied by the
/// caller afterwards.
pub fn load_case(dir: &Path) -> Result<SystemSpec, CaseError> {
    let system_path = dir.join("system.toml");
    let system = parse_system_toml(&read(&system_path)?)?;

    let tech_path = dir.join("technologies.csv");
    let mut technologies = parse_technologies_csv(&read(&tech_path)?)?;

    let links_path = dir.join("links.csv");
    let mut couplings = Vec::new();
    if links_path.exists() {
        let links = parse_links_csv(&read(&links_path)?)?;
        technologies.extend(links.transmissions);
        couplings = links.couplings;
    }

    // Demand series.
    let mut demand: Vec<DemandSeries> = Vec::new();
    let mut horizon: Option<(usize, String)> = None;
    let check_len = |len: usize, file: &str, horizon: &mut Option<(usize, String)>| {
        match horizon {
            None => {
                *horizon = Some((len, file.to_string()));
                Ok(())
            }
            Some((h, first)) if *h != len => Err(CaseError::Schema {
                file: file.to_string(),
                message: format!("covers {len} hours but {first} covers {h}"),
            }),
            _ => Ok(()),
        }
    };
    for block in &system.demand {
        let path = dir.join(&block.file);
        let columns = parse_series_csv(&read(&path)?, &block.file)?;
        for (header, values) in columns {
            check_len(values.len(), &block.file, &mut horizon)?;
            let (zone, sector) = match header.split_once('.') {
                Some((z, s)) => (z.to_string(), s.to_string()),
                None => {
                    let sector = block.sector.clone().ok_or_else(|| CaseError::Schema {
                        file: block.file.clone(),
                        message: format!(
                            "column `{header}` names a bare zone but the demand block declares no sector"
                        ),
                    })?;
                    (header.clone(), sector)
                }
            };
            demand.push(DemandSeries {
                vector: block.vector.clone(),
                zone,
                sector,
                values,
            });
        }
    }

    // Availability series referenced by technologies, deduplicated.
    let mut series: Vec<SeriesTable> = Vec::new();
    for tech in &technologies {
        if let Some(name) = &tech.availability {
            if series.iter().any(|s| s.name == *name) {
                continue;
            }
            let file = format!("{name}.csv");
            let columns = parse_series_csv(&read(&dir.join(&file))?, &file)?;
            for (_, values) in &columns {
                check_len(values.len(), &file, &mut horizon)?;
            }
            series.push(SeriesTable {
                name: name.clone(),
                columns,
            });
        }
    }

    let horizon = horizon
        .map(|(h, _)| h)
        .ok_or_else(|| CaseError::Schema {
            file: "system.toml".into(),
            message: "case declares no demand series; the horizon is undefined".into(),
        })?;
    let len = system.hours_per_subperiod;
    if len == 0 || horizon % len != 0 {
        return Err(CaseError::Schema {
            file: "system.toml".into(),
            message: format!(
                "horizon of {horizon} hours is not a multiple of hours_per_subperiod = {len}"
            ),
        });
    }

    let name = if system.name.is_empty() {
        dir.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "case".into())
    } else {
        system.name.clone()
    };
    let mut spec = SystemSpec::new(
        &name,
        IndexSets {
            zones: system.zones.clone(),
            sectors: system.sectors.clone(),
            vectors: system.vectors.clone(),
            subperiods: SystemSpec::uniform_subperiods(horizon / len, len),
        },
    );
    spec.emission_cap = system.emission_cap;
    spec.default_nse_penalty = system.nse_penalty;
    spec.nse_penalties = system
        .nse_overrides
        .iter()
        .map(|o| NsePenalty {
            vector: o.vector.clone(),
            sector: o.sector.clone(),
            value: o.value,
        })
        .collect();
    spec.technologies = technologies;
    spec.couplings = couplings;
    spec.demand = demand;
    spec.series = series;
    Ok(spec)
}

/// Loads `partition.csv` from a case directory if present.
pub fn load_partition(dir: &Path) -> Result<Option<Partition>, CaseError> {
    let path = dir.join("partition.csv");
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(parse_partition_csv(&read(&path)?)?))
}

/// Round-trips a spec back to case files (used by the load-write-load
/// identity tests and `aggregate` output).
pub fn write_case(spec: &SystemSpec, dir: &Path) -> Result<(), CaseError> {
    let io_err = |path: &Path, source: std::io::Error| CaseError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut system = String::new();
    system.push_str(&format!("name = {:?}\n", spec.name));
    system.push_str(&format!("zones = {:?}\n", spec.index_sets.zones));
    system.push_str(&format!("sectors = {:?}\n", spec.index_sets.sectors));
    system.push_str(&format!("vectors = {:?}\n", spec.index_sets.vectors));
    let len = spec
        .index_sets
        .subperiods
        .first()
        .map(|sp| sp.hours.len())
        .unwrap_or(0);
    system.push_str(&format!("hours_per_subperiod = {len}\n"));
    system.push_str(&format!("emission_cap = {:?}\n", spec.emission_cap));
    system.push_str(&format!("nse_penalty = {:?}\n", spec.default_nse_penalty));
    for o in &spec.nse_penalties {
        system.push_str(&format!(
            "\n[[nse_overrides]]\nvector = {:?}\nsector = {:?}\nvalue = {:?}\n",
            o.vector, o.sector, o.value
        ));
    }
    // One demand file per (vector, sector) with zone columns.
    let mut demand_files: Vec<(String, String, Vec<&DemandSeries>)> = Vec::new();
    for d in &spec.demand {
        match demand_files
            .iter_mut()
            .find(|(v, s, _)| *v == d.vector && *s == d.sector)
        {
            Some((_, _, list)) => list.push(d),
            None => demand_files.push((d.vector.clone(), d.sector.clone(), vec![d])),
        }
    }
    for (vector, sector, _) in &demand_files {
        system.push_str(&format!(
            "\n[[demand]]\nvector = {vector:?}\nsector = {sector:?}\nfile = \"demand_{vector}_{sector}.csv\"\n"
        ));
    }
    let path = dir.join("system.toml");
    std::fs::write(&path, system).map_err(|e| io_err(&path, e))?;

    for (vector, sector, list) in &demand_files {
        let mut out = String::from("hour");
        for d in list {
            out.push_str(&format!(",{}", d.zone));
        }
        out.push('\n');
        let horizon = list[0].values.len();
        for t in 0..horizon {
            out.push_str(&t.to_string());
            for d in list {
                out.push_str(&format!(",{}", d.values[t]));
            }
            out.push('\n');
        }
        let path = dir.join(format!("demand_{vector}_{sector}.csv"));
        std::fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }

    let mut tech = String::from(
        "id,kind,zone,zone_to,sector,vector,vector_in,invest_cost,var_cost,availability,emission_rate,max_capacity,efficiency_out,efficiency_in,power_ratio,long_duration\n",
    );
    let opt_num = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
    let mut links = String::from(
        "id,kind,vector,zone_a,zone_b,sector,sector_a,sector_b,invest_cost,var_cost,max_capacity\n",
    );
    let mut have_links = !spec.couplings.is_empty();
    for t in &spec.technologies {
        if t.kind == TechKind::Transmission {
            have_links = true;
            links.push_str(&format!(
                "{},transmission,{},{},{},{},,,{:?},{:?},{}\n",
                t.id,
                t.vector,
                t.zone,
                t.zone_to.clone().unwrap_or_default(),
                t.sector,
                t.invest_cost,
                t.var_cost,
                opt_num(t.max_capacity),
            ));
        } else {
            tech.push_str(&format!(
                "{},{},{},,{},{},{},{:?},{:?},{},{:?},{},{},{},{},{}\n",
                t.id,
                t.kind.as_str(),
                t.zone,
                t.sector,
                t.vector,
                t.vector_in.clone().unwrap_or_default(),
                t.invest_cost,
                t.var_cost,
                t.availability.clone().unwrap_or_default(),
                t.emission_rate,
                opt_num(t.max_capacity),
                opt_num(t.efficiency_out),
                opt_num(t.efficiency_in),
                opt_num(t.power_ratio),
                t.long_duration,
            ));
        }
    }
    for l in &spec.couplings {
        let kind = if l.directional { "coupling_directed" } else { "coupling" };
        links.push_str(&format!(
            "{},{kind},{},{},,,{},{},,,\n",
            l.id, l.vector, l.zone, l.sector_a, l.sector_b
        ));
    }
    let path = dir.join("technologies.csv");
    std::fs::write(&path, tech).map_err(|e| io_err(&path, e))?;
    if have_links {
        let path = dir.join("links.csv");
        std::fs::write(&path, links).map_err(|e| io_err(&path, e))?;
    }
    for table in &spec.series {
        let mut out = String::from("hour");
        for (zone, _) in &table.columns {
            out.push_str(&format!(",{zone}"));
        }
        out.push('\n');
        let horizon = table.columns.first().map(|(_, v)| v.len()).unwrap_or(0);
        for t in 0..horizon {
            out.push_str(&t.to_string());
            for (_, vals) in &table.columns {
                out.push_str(&format!(",{}", vals[t]));
            }
            out.push('\n');
        }
        let path = dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
