//! Model-level contracts: validation outcomes, balance-row structure,
//! deterministic variable enumeration and the transport-cancellation
//! property.

mod common;

use std::collections::HashMap;
use std::path::Path;

use cem_core::caseio::load_case;
use cem_core::model::{
    assemble_balance, enumerate_variables, validate_system, DemandSeries, IndexSets, SeriesTable,
    SystemSpec, TechKind, TechnologySpec, ValidationError,
};
use proptest::prelude::*;

fn minimal_spec() -> SystemSpec {
    let idx = IndexSets {
        zones: vec!["z1".into()],
        sectors: vec!["power".into()],
        vectors: vec!["elec".into()],
        subperiods: SystemSpec::uniform_subperiods(1, 4),
    };
    let mut spec = SystemSpec::new("minimal", idx);
    spec.emission_cap = 10.0;
    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z1".into(),
        sector: "power".into(),
        values: vec![1.0; 4],
    });
    spec
}

#[test]
fn minimal_spec_is_valid() {
    assert!(validate_system(&minimal_spec()).is_ok());
}

#[test]
fn short_series_is_missing_series() {
    let mut spec = minimal_spec();
    let mut wind = TechnologySpec::new("wind", TechKind::Generation, "z1", "power", "elec");
    wind.availability = Some("wind".into());
    spec.technologies.push(wind);
    // Profile covers 3 of 4 hours.
    spec.series.push(SeriesTable {
        name: "wind".into(),
        columns: vec![("z1".into(), vec![0.5; 3])],
    });
    let report = validate_system(&spec).unwrap_err();
    assert!(
        report
            .0
            .iter()
            .any(|e| matches!(e, ValidationError::MissingSeries(_))),
        "{report}"
    );
}

#[test]
fn dangling_and_negative_are_reported() {
    let mut spec = minimal_spec();
    let mut bad = TechnologySpec::new("bad", TechKind::Generation, "z9", "power", "elec");
    bad.invest_cost = -1.0;
    spec.technologies.push(bad);
    let report = validate_system(&spec).unwrap_err();
    assert!(report.0.iter().any(|e| matches!(e, ValidationError::DanglingReference(_))));
    assert!(report.0.iter().any(|e| matches!(e, ValidationError::NegativeCost(_))));
}

#[test]
fn efficiency_fields_are_storage_only() {
    let mut spec = minimal_spec();
    let mut gen = TechnologySpec::new("gen", TechKind::Generation, "z1", "power", "elec");
    gen.efficiency_out = Some(0.9);
    spec.technologies.push(gen);
    assert!(validate_system(&spec).is_err());

    let mut spec = minimal_spec();
    let mut stor = TechnologySpec::new("st", TechKind::Storage, "z1", "power", "elec");
    stor.efficiency_out = Some(0.9);
    // missing efficiency_in
    spec.technologies.push(stor);
    assert!(validate_system(&spec).is_err());
}

fn fixture(case: &str) -> cem_core::model::System {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases").join(case);
    validate_system(&load_case(&dir).unwrap()).unwrap()
}

/// The shipped 2-zone 2-sector fixture enumerates its full index product.
#[test]
fn toy_2z_2s_validates_with_full_index_sets() {
    let system = fixture("toy-2z-2s");
    assert_eq!(system.zones().len(), 2);
    assert_eq!(system.sectors().len(), 2);
    assert_eq!(system.vectors().len(), 2);
}

/// Electricity balance at z1 carries the coupling export term; the z1-z2
/// line contributes its directional pair.
#[test]
fn toy_2z_2s_balance_terms_at_hub() {
    let system = fixture("toy-2z-2s");
    let row = assemble_balance(&system, "electricity", "z1", "power", 0).unwrap();
    let labels: Vec<&str> = row.terms.iter().map(|(l, _)| l.as_str()).collect();
    let exports: Vec<_> = labels.iter().filter(|l| l.starts_with("x_exp(")).collect();
    assert_eq!(exports.len(), 1, "one export term to the hydrogen sector");
    assert!(labels.contains(&"x_exp(electricity,z1,power,hydrogen,0)"));
    // One neighbour: the directional pair of the single line.
    let transport: Vec<_> = labels.iter().filter(|l| l.starts_with("x_trn(")).collect();
    assert_eq!(transport.len(), 2);
    let fwd = row.terms.iter().find(|(l, _)| l == "x_trn(line_z1_z2,fwd,0)").unwrap();
    let bwd = row.terms.iter().find(|(l, _)| l == "x_trn(line_z1_z2,bwd,0)").unwrap();
    assert_eq!(fwd.1, -1.0);
    assert_eq!(bwd.1, 1.0);
}

/// Variable count of toy-2z-2s against the closed form documented in
/// cases/README.md.
#[test]
fn toy_2z_2s_variable_count_formula() {
    let system = fixture("toy-2z-2s");
    let map = enumerate_variables(&system);
    let w = system.subperiods().len();
    let h = 24;
    let (v, z, s) = (2, 2, 2);
    let gen_like = 4; // wind, gas_z1, gas_z2, electrolyzer
    let lines = 1;
    let couplings = 1;
    let caps = 5;
    let expected = caps + w * (gen_like * h + lines * 2 * h + 2 * v * z * s * h + couplings * 2 * h);
    assert_eq!(map.len(), expected);
}

#[test]
fn enumeration_is_deterministic_and_matches_monolithic() {
    let system = fixture("toy-2z-2s");
    let a = enumerate_variables(&system);
    let b = enumerate_variables(&system);
    let la: Vec<_> = a.entries.iter().map(|e| &e.label).collect();
    let lb: Vec<_> = b.entries.iter().map(|e| &e.label).collect();
    assert_eq!(la, lb);

    // The monolithic problem creates variables in exactly this order.
    let lp = cem_core::builder::build_monolithic(&system).unwrap();
    let mono: Vec<&str> = lp.var_labels().collect();
    assert_eq!(mono.len(), la.len());
    for (x, y) in mono.iter().zip(&la) {
        assert_eq!(x, *y);
    }
}

#[test]
fn empty_technology_list_enumerates_only_slacks() {
    let spec = minimal_spec();
    let system = validate_system(&spec).unwrap();
    let map = enumerate_variables(&system);
    assert_eq!(map.len(), 2 * 4); // nse + crt per hour
    assert!(map
        .entries
        .iter()
        .all(|e| e.label.starts_with("x_nse(") || e.label.starts_with("x_crt(")));
}

/// Summing the balance rows of all zones cancels every transport term.
#[test]
fn transport_terms_cancel_across_zones() {
    let system = fixture("ring-4z");
    let mut coefs: HashMap<String, f64> = HashMap::new();
    for zone in system.zones() {
        let row = assemble_balance(&system, "electricity", zone, "power", 0).unwrap();
        for (label, c) in row.terms {
            if label.starts_with("x_trn(") {
                *coefs.entry(label).or_insert(0.0) += c;
            }
        }
    }
    assert!(!coefs.is_empty());
    for (label, c) in coefs {
        assert_eq!(c, 0.0, "{label} does not cancel");
    }
}

/// Export variables come in negated pairs: the hourly antisymmetry rows of
/// the monolithic problem tie x_exp(a->b) and x_exp(b->a).
#[test]
fn exports_are_declared_as_negated_pairs() {
    let system = fixture("toy-2z-2s");
    let lp = cem_core::builder::build_monolithic(&system).unwrap();
    assert!(lp.has_var("x_exp(electricity,z1,power,hydrogen,0)"));
    assert!(lp.has_var("x_exp(electricity,z1,hydrogen,power,0)"));
    let row = lp.row_index("expasym(electricity,z1,power,hydrogen,0)").unwrap();
    let terms: Vec<(u32, f64)> = lp.row_terms(row).collect();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().all(|&(_, c)| c == 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random 2-zone topologies: one balance row per key, transport
    /// cancellation, determinism.
    #[test]
    fn balance_assembly_properties(
        n_gen in 0usize..3,
        with_line in proptest::bool::ANY,
        demand in 0.0f64..50.0,
    ) {
        let idx = IndexSets {
            zones: vec!["za".into(), "zb".into()],
            sectors: vec!["power".into()],
            vectors: vec!["elec".into()],
            subperiods: SystemSpec::uniform_subperiods(1, 2),
        };
        let mut spec = SystemSpec::new("prop", idx);
        spec.emission_cap = 100.0;
        for g in 0..n_gen {
            spec.technologies.push(TechnologySpec::new(
                &format!("g{g}"),
                TechKind::Generation,
                if g % 2 == 0 { "za" } else { "zb" },
                "power",
                "elec",
            ));
        }
        if with_line {
            let mut line = TechnologySpec::new("line", TechKind::Transmission, "za", "power", "elec");
            line.zone_to = Some("zb".into());
            spec.technologies.push(line);
        }
        spec.demand.push(DemandSeries {
            vector: "elec".into(),
            zone: "za".into(),
            sector: "power".into(),
            values: vec![demand; 2],
        });
        let system = validate_system(&spec).unwrap();
        let mut sums: HashMap<String, f64> = HashMap::new();
        for zone in ["za", "zb"] {
            let row = assemble_balance(&system, "elec", zone, "power", 1).unwrap();
            let again = assemble_balance(&system, "elec", zone, "power", 1).unwrap();
            prop_assert_eq!(&row, &again);
            for (label, c) in row.terms {
                if label.starts_with("x_trn(") {
                    *sums.entry(label).or_insert(0.0) += c;
                }
            }
        }
        for (_, c) in sums {
            prop_assert_eq!(c, 0.0);
        }
    }
}
