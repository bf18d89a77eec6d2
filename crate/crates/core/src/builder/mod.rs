//! Assembly of every optimization problem in the framework: the monolithic
//! LP, per-block operational subproblems, budget-relaxed monolithic
//! oracles, upper (master) problems and level-set regularization problems.
//!
//! Builders are pure functions of an immutable [`System`] and may be called
//! concurrently. Row and variable labels follow [`crate::model::labels`]
//! and are part of the test contract.

mod assemble;
mod problems;
mod upper;

pub use problems::{
    build_budget_subproblem, build_monolithic, build_relaxed_monolithic,
    build_temporal_subproblem,
};
pub use upper::{build_regularization_problem, build_upper_problem, StageCarryover, UpperOptions};

use std::collections::HashMap;

use crate::model::{labels, System, TechKind};

/// Which domain the operational problem is decomposed over, in addition to
/// time. In the sectoral mode blocks are (subperiod, sector) pairs and the
/// linking flows are inter-sector exports; in the spatial mode blocks are
/// (subperiod, zone) pairs and the linking flows are inter-zone transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionMode {
    Temporal,
    TemporalSectoral,
    TemporalSpatial,
}

impl DecompositionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecompositionMode::Temporal => "temporal",
            DecompositionMode::TemporalSectoral => "temporal_sectoral",
            DecompositionMode::TemporalSpatial => "temporal_spatial",
        }
    }

    /// Block keys in deterministic order: subperiod-major.
    pub fn blocks(&self, system: &System) -> Vec<BlockKey> {
        let mut out = Vec::new();
        for w in 0..system.subperiods().len() {
            match self {
                DecompositionMode::Temporal => out.push(BlockKey::Period { w }),
                DecompositionMode::TemporalSectoral => {
                    for s in 0..system.sectors().len() {
                        out.push(BlockKey::PeriodSector { w, s });
                    }
                }
                DecompositionMode::TemporalSpatial => {
                    for z in 0..system.zones().len() {
                        out.push(BlockKey::PeriodZone { w, z });
                    }
                }
            }
        }
        out
    }
}

/// Key of one operational subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKey {
    Period { w: usize },
    PeriodSector { w: usize, s: usize },
    PeriodZone { w: usize, z: usize },
}

impl BlockKey {
    pub fn w(&self) -> usize {
        match *self {
            BlockKey::Period { w }
            | BlockKey::PeriodSector { w, .. }
            | BlockKey::PeriodZone { w, .. } => w,
        }
    }

    pub fn theta_label(&self, system: &System) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => labels::theta_period(w),
            BlockKey::PeriodSector { s, .. } => labels::theta_block(w, &system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => labels::theta_block(w, &system.zones()[z]),
        }
    }

    pub fn q_label(&self, system: &System) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => labels::q_period(w),
            BlockKey::PeriodSector { s, .. } => labels::q_block(w, &system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => labels::q_block(w, &system.zones()[z]),
        }
    }

    pub fn fix_q_label(&self, system: &System) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => labels::fix_q_period(w),
            BlockKey::PeriodSector { s, .. } => labels::fix_q_block(w, &system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => labels::fix_q_block(w, &system.zones()[z]),
        }
    }

    pub fn emis_label(&self, system: &System) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => labels::emis_period(w),
            BlockKey::PeriodSector { s, .. } => labels::emis_block(w, &system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => labels::emis_block(w, &system.zones()[z]),
        }
    }

    pub fn cut_label(&self, system: &System, j: usize) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => labels::cut_period(j, w),
            BlockKey::PeriodSector { s, .. } => labels::cut_block(j, w, &system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => labels::cut_block(j, w, &system.zones()[z]),
        }
    }

    /// Human-readable name for diagnostics.
    pub fn describe(&self, system: &System) -> String {
        let w = &system.subperiods()[self.w()].id;
        match *self {
            BlockKey::Period { .. } => format!("sub({w})"),
            BlockKey::PeriodSector { s, .. } => format!("sub({w},{})", system.sectors()[s]),
            BlockKey::PeriodZone { z, .. } => format!("sub({w},{})", system.zones()[z]),
        }
    }
}

/// One component of the complicating vector y.
#[derive(Debug, Clone, PartialEq)]
pub enum YKind {
    Capacity { tech: usize },
    StartLevel { tech: usize, w: usize },
    DeltaLevel { tech: usize, w: usize },
    /// Net weekly export budget for one directed coupling.
    ExportBudget { link: usize, from_a: bool, w: usize },
    /// Net weekly transport outflow budget of one (vector, zone).
    TransportBudget { v: usize, z: usize, w: usize },
}

#[derive(Debug, Clone)]
pub struct YEntry {
    pub label: String,
    pub invest_cost: f64,
    pub kind: YKind,
}

/// Ordered layout of the complicating variables of a decomposition mode:
/// technology capacities, long-duration storage linking variables, and the
/// mode's budget variables. The per-block emission budgets q are tracked
/// separately (one scalar per block).
#[derive(Debug, Clone)]
pub struct ComplicatingLayout {
    pub mode: DecompositionMode,
    pub entries: Vec<YEntry>,
    pub blocks: Vec<BlockKey>,
    index: HashMap<String, usize>,
}

impl ComplicatingLayout {
    pub fn new(system: &System, mode: DecompositionMode) -> Self {
        let mut entries = Vec::new();
        for &tech in &crate::model::vars::investment_order(system) {
            entries.push(YEntry {
                label: labels::y_cap(&system.tech(tech).id),
                invest_cost: system.tech(tech).invest_cost,
                kind: YKind::Capacity { tech },
            });
        }
        for tech in system.long_duration_storages() {
            for (w, sp) in system.subperiods().iter().enumerate() {
                entries.push(YEntry {
                    label: labels::y_start(&system.tech(tech).id, &sp.id),
                    invest_cost: 0.0,
                    kind: YKind::StartLevel { tech, w },
                });
                entries.push(YEntry {
                    label: labels::y_delta(&system.tech(tech).id, &sp.id),
                    invest_cost: 0.0,
                    kind: YKind::DeltaLevel { tech, w },
                });
            }
        }
        match mode {
            DecompositionMode::Temporal => {}
            DecompositionMode::TemporalSectoral => {
                for (w, sp) in system.subperiods().iter().enumerate() {
                    for (li, link) in system.couplings().iter().enumerate() {
                        for from_a in [true, false] {
                            let (from, to) = if from_a {
                                (&link.sector_a, &link.sector_b)
                            } else {
                                (&link.sector_b, &link.sector_a)
                            };
                            entries.push(YEntry {
                                label: labels::y_exp(&link.vector, &link.zone, from, to, &sp.id),
                                invest_cost: 0.0,
                                kind: YKind::ExportBudget { link: li, from_a, w },
                            });
                        }
                    }
                }
            }
            DecompositionMode::TemporalSpatial => {
                for (w, sp) in system.subperiods().iter().enumerate() {
                    for (v, vector) in system.vectors().iter().enumerate() {
                        for (z, zone) in system.zones().iter().enumerate() {
                            if system.transmissions_at(v, z).is_empty() {
                                continue;
                            }
                            entries.push(YEntry {
                                label: labels::y_trn(vector, zone, &sp.id),
                                invest_cost: 0.0,
                                kind: YKind::TransportBudget { v, z, w },
                            });
                        }
                    }
                }
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.label.clone(), i))
            .collect();
        ComplicatingLayout {
            mode,
            entries,
            blocks: mode.blocks(system),
            index,
        }
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Investment cost of a y vector.
    pub fn invest_cost(&self, y: &[f64]) -> f64 {
        self.entries
            .iter()
            .zip(y)
            .map(|(e, &v)| e.invest_cost * v)
            .sum()
    }

    /// Natural variable bounds of each entry in a master-side problem.
    pub fn natural_bounds(&self, system: &System, entry: &YEntry) -> (f64, f64) {
        match entry.kind {
            YKind::Capacity { tech } => (
                0.0,
                system.tech(tech).max_capacity.unwrap_or(f64::INFINITY),
            ),
            YKind::StartLevel { .. } => (0.0, f64::INFINITY),
            YKind::ExportBudget { link, from_a, .. } => {
                if !system.couplings()[link].directional {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if from_a {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            YKind::DeltaLevel { .. } | YKind::TransportBudget { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        }
    }
}

/// Values of the complicating variables at one iterate: the y vector in
/// layout order plus one emission budget per block.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplicatingVector {
    pub y: Vec<f64>,
    pub q: Vec<f64>,
}

impl ComplicatingVector {
    pub fn zeros(layout: &ComplicatingLayout) -> Self {
        ComplicatingVector {
            y: vec![0.0; layout.entries.len()],
            q: vec![0.0; layout.blocks.len()],
        }
    }
}

/// Capacity values keyed by technology id, extracted from a y vector.
/// Solver noise below zero is clamped away.
pub fn capacities_of(layout: &ComplicatingLayout, system: &System, y: &[f64]) -> Vec<(String, f64)> {
    layout
        .entries
        .iter()
        .zip(y)
        .filter_map(|(e, &v)| match e.kind {
            YKind::Capacity { tech } => Some((system.tech(tech).id.clone(), v.max(0.0))),
            _ => None,
        })
        .collect()
}

/// True if the technology's capacity should be bounded around its stage-1
/// value at the two-stage handoff: everything except storages whose
/// stage-1 capacity came out (numerically) zero, which stay free so the
/// second stage can size them.
pub fn bound_in_stage2(system: &System, tech: usize, stage1_value: f64) -> bool {
    system.tech(tech).kind != TechKind::Storage || stage1_value > 1e-6
}
