//! Semantic data model of a multi-sector capacity expansion system.
//!
//! A [`SystemSpec`] is the declarative description (zones, sectors, energy
//! vectors, technologies, series, links, emission cap). Validation turns it
//! into an immutable [`System`] with resolved cross-references, which the
//! problem builders read. All id lists are ordered; everything derived from
//! them is deterministic.

pub mod labels;

pub(crate) mod balance;
pub(crate) mod vars;

mod system;

pub use balance::{assemble_balance, BalanceRow};
pub use system::{validate_system, System, ValidationError, ValidationReport};
pub use vars::{enumerate_variables, VariableMap};

/// One representative (or natural) subperiod: an ordered run of hours with
/// an aggregation weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Subperiod {
    pub id: String,
    /// Global hour ids, consecutive ascending.
    pub hours: Vec<u32>,
    /// Number of original subperiods this one stands for.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSets {
    pub zones: Vec<String>,
    pub sectors: Vec<String>,
    pub vectors: Vec<String>,
    pub subperiods: Vec<Subperiod>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TechKind {
    Generation,
    Storage,
    Conversion,
    Transmission,
}

impl TechKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TechKind::Generation => "generation",
            TechKind::Storage => "storage",
            TechKind::Conversion => "conversion",
            TechKind::Transmission => "transmission",
        }
    }
}

/// A technology. Transmission links are technologies too: `zone` is the
/// origin endpoint, `zone_to` the other, and `sector` the sector whose
/// balance carries the flow variables.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologySpec {
    pub id: String,
    pub kind: TechKind,
    pub zone: String,
    pub zone_to: Option<String>,
    pub sector: String,
    /// Produced (generation/conversion), stored (storage) or transported
    /// (transmission) energy vector.
    pub vector: String,
    /// Consumed vector; conversion only. Conversion is one-to-one.
    pub vector_in: Option<String>,
    /// Annualised, currency per MW (MWh for storage energy capacity).
    pub invest_cost: f64,
    /// Currency per MWh of activity.
    pub var_cost: f64,
    /// Name of an availability series; generation/conversion only.
    pub availability: Option<String>,
    /// Tonnes per MWh of activity.
    pub emission_rate: f64,
    pub max_capacity: Option<f64>,
    /// Storage only, in (0, 1].
    pub efficiency_out: Option<f64>,
    /// Storage only, in (0, 1].
    pub efficiency_in: Option<f64>,
    /// Storage only: charge/discharge power per unit of energy capacity.
    pub power_ratio: Option<f64>,
    /// Storage only: couples subperiods through start levels and net level
    /// changes treated as complicating variables.
    pub long_duration: bool,
}

impl TechnologySpec {
    /// A minimal well-formed technology; tests fill in the rest.
    pub fn new(id: &str, kind: TechKind, zone: &str, sector: &str, vector: &str) -> Self {
        TechnologySpec {
            id: id.to_string(),
            kind,
            zone: zone.to_string(),
            zone_to: None,
            sector: sector.to_string(),
            vector: vector.to_string(),
            vector_in: None,
            invest_cost: 0.0,
            var_cost: 0.0,
            availability: None,
            emission_rate: 0.0,
            max_capacity: None,
            efficiency_out: None,
            efficiency_in: None,
            power_ratio: None,
            long_duration: false,
        }
    }
}

/// Sector-coupling link: declares that `sector_a` and `sector_b` may
/// exchange `vector` at `zone` through a pair of net-export variables.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingLink {
    pub id: String,
    pub vector: String,
    pub zone: String,
    pub sector_a: String,
    pub sector_b: String,
    /// One-way coupling (e.g. power-to-gas): net exports flow only from
    /// `sector_a` to `sector_b`.
    pub directional: bool,
}

/// Demand for one (vector, zone, sector), hourly over the full horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSeries {
    pub vector: String,
    pub zone: String,
    pub sector: String,
    pub values: Vec<f64>,
}

/// A named profile table with one column per zone, e.g. renewable
/// availability, hourly over the full horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub name: String,
    pub columns: Vec<(String, Vec<f64>)>,
}

/// Override of the non-served-energy penalty for one (vector, sector).
#[derive(Debug, Clone, PartialEq)]
pub struct NsePenalty {
    pub vector: String,
    pub sector: String,
    pub value: f64,
}

/// Penalty applied when no override matches; must dominate variable costs
/// so non-served energy behaves as the feasibility slack.
pub const DEFAULT_NSE_PENALTY: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub index_sets: IndexSets,
    pub technologies: Vec<TechnologySpec>,
    pub couplings: Vec<CouplingLink>,
    pub demand: Vec<DemandSeries>,
    pub series: Vec<SeriesTable>,
    pub nse_penalties: Vec<NsePenalty>,
    pub default_nse_penalty: f64,
    /// Net emission cap in tonnes over the weighted horizon.
    pub emission_cap: f64,
    /// Chronological map: original subperiod position -> index into
    /// `index_sets.subperiods`. Identity when no aggregation is applied.
    pub assignment: Vec<usize>,
}

impl SystemSpec {
    /// An empty spec over the given index sets with an identity assignment.
    pub fn new(name: &str, index_sets: IndexSets) -> Self {
        let n = index_sets.subperiods.len();
        SystemSpec {
            name: name.to_string(),
            index_sets,
            technologies: Vec::new(),
            couplings: Vec::new(),
            demand: Vec::new(),
            series: Vec::new(),
            nse_penalties: Vec::new(),
            default_nse_penalty: DEFAULT_NSE_PENALTY,
            emission_cap: f64::INFINITY,
            assignment: (0..n).collect(),
        }
    }

    /// Builds contiguous subperiods `w0..w{count-1}` of `len` hours each.
    pub fn uniform_subperiods(count: usize, len: usize) -> Vec<Subperiod> {
        (0..count)
            .map(|w| Subperiod {
                id: format!("w{w}"),
                hours: ((w * len) as u32..((w + 1) * len) as u32).collect(),
                weight: 1.0,
            })
            .collect()
    }
}
