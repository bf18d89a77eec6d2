//! Hand-built systems shared by the integration tests.

#![allow(dead_code)]

use cem_core::model::{
    validate_system, CouplingLink, DemandSeries, IndexSets, NsePenalty, SeriesTable, Subperiod,
    System, SystemSpec, TechKind, TechnologySpec,
};

pub fn index_sets(zones: &[&str], sectors: &[&str], vectors: &[&str], weeks: usize, len: usize) -> IndexSets {
    IndexSets {
        zones: zones.iter().map(|z| z.to_string()).collect(),
        sectors: sectors.iter().map(|s| s.to_string()).collect(),
        vectors: vectors.iter().map(|v| v.to_string()).collect(),
        subperiods: SystemSpec::uniform_subperiods(weeks, len),
    }
}

/// Periodic day profile stretched over the horizon.
pub fn repeat_profile(day: &[f64], horizon: usize) -> Vec<f64> {
    (0..horizon).map(|t| day[t % day.len()]).collect()
}

/// 1 zone, 1 sector, 1 vector; solar (day-only), gas (emitting), and a
/// long-duration battery. Two subperiods with different solar strength so
/// the storage linking machinery binds.
pub fn solar_gas_battery() -> System {
    let weeks = 2;
    let len = 12;
    let horizon = weeks * len;
    let mut spec = SystemSpec::new(
        "solar-gas-battery",
        index_sets(&["z1"], &["power"], &["elec"], weeks, len),
    );
    spec.emission_cap = 60.0;

    let mut solar = TechnologySpec::new("solar", TechKind::Generation, "z1", "power", "elec");
    solar.invest_cost = 3.0;
    solar.var_cost = 0.1;
    solar.availability = Some("solar_profile".into());
    spec.technologies.push(solar);

    let mut gas = TechnologySpec::new("gas", TechKind::Generation, "z1", "power", "elec");
    gas.invest_cost = 1.5;
    gas.var_cost = 9.0;
    gas.emission_rate = 0.5;
    spec.technologies.push(gas);

    let mut batt = TechnologySpec::new("battery", TechKind::Storage, "z1", "power", "elec");
    batt.invest_cost = 0.8;
    batt.var_cost = 0.05;
    batt.efficiency_out = Some(0.95);
    batt.efficiency_in = Some(0.95);
    batt.power_ratio = Some(0.5);
    batt.long_duration = true;
    spec.technologies.push(batt);

    // Solar strong in week 0, weak in week 1.
    let mut profile = Vec::new();
    for w in 0..weeks {
        let strength: f64 = if w == 0 { 1.0 } else { 0.35 };
        for t in 0..len {
            let day = if (3..9).contains(&(t % len)) { 1.0 } else { 0.0 };
            profile.push(strength * day);
        }
    }
    spec.series.push(SeriesTable {
        name: "solar_profile".into(),
        columns: vec![("z1".into(), profile)],
    });

    let day = [30.0, 28.0, 27.0, 30.0, 34.0, 38.0, 40.0, 42.0, 41.0, 38.0, 34.0, 31.0];
    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z1".into(),
        sector: "power".into(),
        values: repeat_profile(&day, horizon),
    });

    validate_system(&spec).expect("solar_gas_battery validates")
}

/// 2 zones, 2 sectors (power, hydrogen), 2 vectors; wind+gas at z1, gas at
/// z2, one transmission line, an electrolyzer at z2 importing power across
/// the sector coupling. Wind is capped below local demand and the
/// cross-zone/cross-sector loads are flat, so gas sets a time-constant
/// marginal price and the budget relaxations are tight.
pub fn two_zone_two_sector() -> System {
    let weeks = 2;
    let len = 12;
    let horizon = weeks * len;
    let mut spec = SystemSpec::new(
        "two-zone-two-sector",
        index_sets(&["z1", "z2"], &["power", "hydrogen"], &["elec", "h2"], weeks, len),
    );
    spec.emission_cap = 700.0;
    spec.nse_penalties.push(NsePenalty {
        vector: "h2".into(),
        sector: "hydrogen".into(),
        value: 8000.0,
    });

    let mut wind = TechnologySpec::new("wind_z1", TechKind::Generation, "z1", "power", "elec");
    wind.invest_cost = 2.0;
    wind.var_cost = 0.1;
    wind.availability = Some("wind".into());
    wind.max_capacity = Some(8.0);
    spec.technologies.push(wind);

    let mut gas1 = TechnologySpec::new("gas_z1", TechKind::Generation, "z1", "power", "elec");
    gas1.invest_cost = 1.0;
    gas1.var_cost = 8.0;
    gas1.emission_rate = 0.4;
    spec.technologies.push(gas1);

    let mut gas2 = TechnologySpec::new("gas_z2", TechKind::Generation, "z2", "power", "elec");
    gas2.invest_cost = 1.0;
    gas2.var_cost = 8.3;
    gas2.emission_rate = 0.4;
    spec.technologies.push(gas2);

    let mut line = TechnologySpec::new("line_z1_z2", TechKind::Transmission, "z1", "power", "elec");
    line.zone_to = Some("z2".into());
    line.invest_cost = 0.05;
    line.var_cost = 0.0;
    line.max_capacity = Some(40.0);
    spec.technologies.push(line);

    let mut elz = TechnologySpec::new("electrolyzer_z1", TechKind::Conversion, "z1", "hydrogen", "h2");
    elz.vector_in = Some("elec".into());
    elz.invest_cost = 1.2;
    elz.var_cost = 0.2;
    spec.technologies.push(elz);

    spec.couplings.push(CouplingLink {
        id: "p2g_z1".into(),
        vector: "elec".into(),
        zone: "z1".into(),
        sector_a: "power".into(),
        sector_b: "hydrogen".into(),
        directional: true,
    });

    let mut wind_profile = Vec::new();
    for t in 0..horizon {
        let x = (t % len) as f64;
        wind_profile.push(0.35 + 0.3 * ((x / len as f64) * std::f64::consts::TAU).sin().abs());
    }
    spec.series.push(SeriesTable {
        name: "wind".into(),
        columns: vec![("z1".into(), wind_profile)],
    });

    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z1".into(),
        sector: "power".into(),
        values: vec![26.0; horizon],
    });
    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z2".into(),
        sector: "power".into(),
        values: vec![14.0; horizon],
    });
    spec.demand.push(DemandSeries {
        vector: "h2".into(),
        zone: "z1".into(),
        sector: "hydrogen".into(),
        values: vec![6.0; horizon],
    });

    validate_system(&spec).expect("two_zone_two_sector validates")
}

/// Empty demand everywhere; the optimum is zero.
pub fn zero_demand() -> System {
    let mut spec = SystemSpec::new(
        "zero-demand",
        index_sets(&["z1"], &["power"], &["elec"], 2, 4),
    );
    spec.emission_cap = 0.0;
    let mut gas = TechnologySpec::new("gas", TechKind::Generation, "z1", "power", "elec");
    gas.invest_cost = 2.0;
    gas.var_cost = 1.0;
    spec.technologies.push(gas);
    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z1".into(),
        sector: "power".into(),
        values: vec![0.0; 8],
    });
    validate_system(&spec).expect("zero_demand validates")
}

/// Demand with no technologies at all: NSE is the only supply.
pub fn nse_only(penalty: f64, demand: &[f64]) -> System {
    let weeks = 2;
    let len = demand.len() / weeks;
    let mut spec = SystemSpec::new(
        "nse-only",
        IndexSets {
            zones: vec!["z1".into()],
            sectors: vec!["power".into()],
            vectors: vec!["elec".into()],
            subperiods: (0..weeks)
                .map(|w| Subperiod {
                    id: format!("w{w}"),
                    hours: ((w * len) as u32..((w + 1) * len) as u32).collect(),
                    weight: 1.0,
                })
                .collect(),
        },
    );
    spec.emission_cap = 0.0;
    spec.default_nse_penalty = penalty;
    spec.demand.push(DemandSeries {
        vector: "elec".into(),
        zone: "z1".into(),
        sector: "power".into(),
        values: demand.to_vec(),
    });
    validate_system(&spec).expect("nse_only validates")
}
