//! Deterministic enumeration of the monolithic variable space.
//!
//! The ordering is a pure function of the spec: investment variables first
//! (by kind, then declaration id), then storage linking variables, then
//! per-subperiod operational variables grouped by family. The monolithic
//! builder creates variables in exactly this order; a test pins the two
//! against each other.

use std::collections::HashMap;

use super::{labels, System, TechKind};

#[derive(Debug, Clone, PartialEq)]
pub enum VarClass {
    /// Capacity of any technology (energy capacity for storage).
    Capacity { tech: usize },
    /// Long-duration storage level at the start of a subperiod.
    StartLevel { tech: usize, w: usize },
    /// Long-duration storage net level change over a subperiod.
    DeltaLevel { tech: usize, w: usize },
    /// Boundary level of an original (chronological) subperiod.
    ChainLevel { tech: usize, original: usize },
    Generation { tech: usize, t: u32 },
    StorageOut { tech: usize, t: u32 },
    StorageIn { tech: usize, t: u32 },
    Level { tech: usize, t: u32 },
    /// Free within-subperiod anchor of short-duration storage.
    LevelAnchor { tech: usize, w: usize },
    NonServed { v: usize, z: usize, s: usize, t: u32 },
    Curtailment { v: usize, z: usize, s: usize, t: u32 },
    /// Net export, ordered (from, to) sector pair of a coupling.
    Export { link: usize, from_a: bool, t: u32 },
    /// Directional transmission flow.
    Transport { tech: usize, forward: bool, t: u32 },
}

#[derive(Debug, Clone)]
pub struct VarEntry {
    pub label: String,
    pub class: VarClass,
}

/// Ordered map of the monolithic variable space.
#[derive(Debug, Default)]
pub struct VariableMap {
    pub entries: Vec<VarEntry>,
    index: HashMap<String, usize>,
}

impl VariableMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// Ordered technology indices for investment enumeration: by kind, then id.
pub(crate) fn investment_order(system: &System) -> Vec<usize> {
    let mut order: Vec<usize> = (0..system.technologies().len()).collect();
    order.sort_by(|&a, &b| {
        let ta = system.tech(a);
        let tb = system.tech(b);
        (ta.kind, &ta.id).cmp(&(tb.kind, &tb.id))
    });
    order
}

/// Enumerates every monolithic variable in canonical order.
pub fn enumerate_variables(system: &System) -> VariableMap {
    let mut map = VariableMap::default();
    let mut push = |label: String, class: VarClass| {
        map.index.insert(label.clone(), map.entries.len());
        map.entries.push(VarEntry { label, class });
    };

    for_each_monolithic_var(system, &mut |label, class| push(label, class));
    map
}

/// Visits every monolithic variable in canonical order.
pub(crate) fn for_each_monolithic_var(
    system: &System,
    f: &mut impl FnMut(String, VarClass),
) {
    // Investments.
    for &tech in &investment_order(system) {
        f(labels::y_cap(&system.tech(tech).id), VarClass::Capacity { tech });
    }
    // Storage linking: start level and net change per subperiod.
    for tech in system.long_duration_storages() {
        for (w, sp) in system.subperiods().iter().enumerate() {
            f(
                labels::y_start(&system.tech(tech).id, &sp.id),
                VarClass::StartLevel { tech, w },
            );
            f(
                labels::y_delta(&system.tech(tech).id, &sp.id),
                VarClass::DeltaLevel { tech, w },
            );
        }
    }
    // Chronological boundary levels.
    for tech in system.long_duration_storages() {
        for original in 0..system.assignment().len() {
            f(
                labels::lvl_chain(&system.tech(tech).id, original),
                VarClass::ChainLevel { tech, original },
            );
        }
    }

    // Operational variables per subperiod.
    for (w, sp) in system.subperiods().iter().enumerate() {
        for (ti, tech) in system.technologies().iter().enumerate() {
            match tech.kind {
                TechKind::Generation | TechKind::Conversion => {
                    for &t in &sp.hours {
                        f(labels::x_gen(&tech.id, t), VarClass::Generation { tech: ti, t });
                    }
                }
                TechKind::Storage => {
                    for &t in &sp.hours {
                        f(labels::x_otp(&tech.id, t), VarClass::StorageOut { tech: ti, t });
                        f(labels::x_ipt(&tech.id, t), VarClass::StorageIn { tech: ti, t });
                        f(labels::lvl(&tech.id, t), VarClass::Level { tech: ti, t });
                    }
                    if !tech.long_duration {
                        f(
                            labels::lvl_anchor(&tech.id, &sp.id),
                            VarClass::LevelAnchor { tech: ti, w },
                        );
                    }
                }
                TechKind::Transmission => {
                    for &t in &sp.hours {
                        f(
                            labels::x_trn(&tech.id, true, t),
                            VarClass::Transport { tech: ti, forward: true, t },
                        );
                        f(
                            labels::x_trn(&tech.id, false, t),
                            VarClass::Transport { tech: ti, forward: false, t },
                        );
                    }
                }
            }
        }
        for (v, vector) in system.vectors().iter().enumerate() {
            for (z, zone) in system.zones().iter().enumerate() {
                for (s, sector) in system.sectors().iter().enumerate() {
                    for &t in &sp.hours {
                        f(
                            labels::x_nse(vector, zone, sector, t),
                            VarClass::NonServed { v, z, s, t },
                        );
                        f(
                            labels::x_crt(vector, zone, sector, t),
                            VarClass::Curtailment { v, z, s, t },
                        );
                    }
                }
            }
        }
        for (li, link) in system.couplings().iter().enumerate() {
            for from_a in [true, false] {
                let (from, to) = if from_a {
                    (&link.sector_a, &link.sector_b)
                } else {
                    (&link.sector_b, &link.sector_a)
                };
                for &t in &sp.hours {
                    f(
                        labels::x_exp(&link.vector, &link.zone, from, to, t),
                        VarClass::Export { link: li, from_a, t },
                    );
                }
            }
        }
    }
}
