//! Validation of a [`SystemSpec`] into an immutable, resolved [`System`].

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{SystemSpec, TechKind, TechnologySpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("missing series: {0}")]
    MissingSeries(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("negative cost: {0}")]
    NegativeCost(String),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("invalid index sets: {0}")]
    BadIndexSets(String),
    #[error("invalid field on `{0}`: {1}")]
    BadField(String, String),
}

/// All violations found while validating a spec.
#[derive(Debug, Error)]
#[error("{} validation error(s): {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationReport(pub Vec<ValidationError>);

/// A validated system: the spec plus resolved lookups. Immutable after
/// construction and safe to share across solver workers.
#[derive(Debug)]
pub struct System {
    spec: SystemSpec,
    zone_idx: HashMap<String, usize>,
    sector_idx: HashMap<String, usize>,
    vector_idx: HashMap<String, usize>,
    /// Modelled hours, concatenated over subperiods in order.
    hours: Vec<u32>,
    hour_pos: HashMap<u32, usize>,
    /// Demand per ((v * Z + z) * S + s) * H + hpos.
    demand: Vec<f64>,
    /// NSE penalty per v * S + s.
    nse: Vec<f64>,
    /// Availability per tech per hpos; `None` means constant 1.
    avail: Vec<Option<Vec<f64>>>,
    /// Tech indices per (v,z,s): generation + conversion producing v there.
    producers: Vec<Vec<usize>>,
    /// Tech indices per (v,z,s): conversions consuming v there.
    conv_consumers: Vec<Vec<usize>>,
    /// Tech indices per (v,z,s): storages of v there.
    storages: Vec<Vec<usize>>,
    /// All transmission tech indices, in declaration order.
    transmissions: Vec<usize>,
    /// Per (v,z): transmission links touching the zone, with origin flag.
    trn_at: Vec<Vec<(usize, bool)>>,
    /// Full original horizon in hours.
    horizon: usize,
    /// Hours per subperiod.
    subperiod_len: usize,
}

pub fn validate_system(spec: &SystemSpec) -> Result<System, ValidationReport> {
    let mut errs = Vec::new();
    let idx = &spec.index_sets;

    fn index_of(list: &[String], what: &str, errs: &mut Vec<ValidationError>) -> HashMap<String, usize> {
        let mut map = HashMap::new();
        if list.is_empty() {
            errs.push(ValidationError::BadIndexSets(format!("{what} list is empty")));
        }
        for (i, id) in list.iter().enumerate() {
            if map.insert(id.clone(), i).is_some() {
                errs.push(ValidationError::DuplicateId(format!("{what} `{id}`")));
            }
        }
        map
    }

    let zone_idx = index_of(&idx.zones, "zone", &mut errs);
    let sector_idx = index_of(&idx.sectors, "sector", &mut errs);
    let vector_idx = index_of(&idx.vectors, "vector", &mut errs);

    // Subperiod structure: uniform length, consecutive hours, aligned to
    // original slots, weights matching the assignment map.
    let mut subperiod_len = 0usize;
    let mut seen_sp = HashSet::new();
    for sp in &idx.subperiods {
        if !seen_sp.insert(sp.id.clone()) {
            errs.push(ValidationError::DuplicateId(format!("subperiod `{}`", sp.id)));
        }
        if sp.hours.is_empty() {
            errs.push(ValidationError::BadIndexSets(format!(
                "subperiod `{}` has no hours",
                sp.id
            )));
            continue;
        }
        if subperiod_len == 0 {
            subperiod_len = sp.hours.len();
        } else if sp.hours.len() != subperiod_len {
            errs.push(ValidationError::BadIndexSets(format!(
                "subperiod `{}` has {} hours, expected {}",
                sp.id,
                sp.hours.len(),
                subperiod_len
            )));
        }
        for pair in sp.hours.windows(2) {
            if pair[1] != pair[0] + 1 {
                errs.push(ValidationError::BadIndexSets(format!(
                    "subperiod `{}` hours are not consecutive",
                    sp.id
                )));
                break;
            }
        }
        if sp.weight <= 0.0 || sp.weight.fract() != 0.0 {
            errs.push(ValidationError::BadIndexSets(format!(
                "subperiod `{}` weight {} is not a positive integer",
                sp.id, sp.weight
            )));
        }
    }
    if idx.subperiods.is_empty() {
        errs.push(ValidationError::BadIndexSets("subperiod list is empty".into()));
    }

    let n_sub = idx.subperiods.len();
    if spec.assignment.len() < n_sub {
        errs.push(ValidationError::BadIndexSets(
            "assignment shorter than subperiod count".into(),
        ));
    }
    let mut counts = vec![0usize; n_sub];
    for &a in &spec.assignment {
        if a >= n_sub {
            errs.push(ValidationError::BadIndexSets(format!(
                "assignment entry {a} out of range"
            )));
        } else {
            counts[a] += 1;
        }
    }
    let horizon = spec.assignment.len() * subperiod_len.max(1);
    for (w, sp) in idx.subperiods.iter().enumerate() {
        if counts.get(w).copied().unwrap_or(0) as f64 != sp.weight {
            errs.push(ValidationError::BadIndexSets(format!(
                "subperiod `{}` weight {} does not match its {} assignment entries",
                sp.id, sp.weight, counts[w]
            )));
        }
        if let Some(&h0) = sp.hours.first() {
            let slot = h0 as usize / subperiod_len.max(1);
            if !(h0 as usize).is_multiple_of(subperiod_len.max(1))
                || slot >= spec.assignment.len()
                || spec.assignment[slot] != w
            {
                errs.push(ValidationError::BadIndexSets(format!(
                    "subperiod `{}` hours do not align with its own slot in the assignment",
                    sp.id
                )));
            }
        }
    }

    // Hour uniqueness across subperiods.
    let mut hours = Vec::new();
    let mut hour_pos = HashMap::new();
    for sp in &idx.subperiods {
        for &h in &sp.hours {
            if hour_pos.insert(h, hours.len()).is_some() {
                errs.push(ValidationError::BadIndexSets(format!(
                    "hour {h} appears in more than one subperiod"
                )));
            }
            hours.push(h);
        }
    }

    // Series tables.
    let mut series_idx: HashMap<&str, usize> = HashMap::new();
    for (i, table) in spec.series.iter().enumerate() {
        if series_idx.insert(&table.name, i).is_some() {
            errs.push(ValidationError::DuplicateId(format!("series `{}`", table.name)));
        }
        for (zone, vals) in &table.columns {
            if !zone_idx.contains_key(zone) {
                errs.push(ValidationError::DanglingReference(format!(
                    "series `{}` column references unknown zone `{zone}`",
                    table.name
                )));
            }
            if vals.len() != horizon {
                errs.push(ValidationError::MissingSeries(format!(
                    "series `{}` column `{zone}` covers {} of {horizon} hours",
                    table.name,
                    vals.len()
                )));
            }
            if vals.iter().any(|v| !(0.0..=1.0).contains(v)) {
                errs.push(ValidationError::BadField(
                    format!("series `{}`", table.name),
                    "availability values must lie in [0, 1]".into(),
                ));
            }
        }
    }

    // Technologies.
    let mut tech_ids = HashSet::new();
    for tech in &spec.technologies {
        validate_tech(
            tech,
            spec,
            &zone_idx,
            &sector_idx,
            &vector_idx,
            &series_idx,
            horizon,
            &mut tech_ids,
            &mut errs,
        );
    }

    // Couplings.
    let mut seen_links = HashSet::new();
    for link in &spec.couplings {
        if !tech_ids.insert(link.id.clone()) {
            errs.push(ValidationError::DuplicateId(format!("link `{}`", link.id)));
        }
        for (what, id, map) in [
            ("vector", &link.vector, &vector_idx),
            ("zone", &link.zone, &zone_idx),
            ("sector", &link.sector_a, &sector_idx),
            ("sector", &link.sector_b, &sector_idx),
        ] {
            if !map.contains_key(id) {
                errs.push(ValidationError::DanglingReference(format!(
                    "link `{}` references unknown {what} `{id}`",
                    link.id
                )));
            }
        }
        if link.sector_a == link.sector_b {
            errs.push(ValidationError::BadField(
                format!("link `{}`", link.id),
                "coupling must join two distinct sectors".into(),
            ));
        }
        let mut pair = [link.sector_a.clone(), link.sector_b.clone()];
        pair.sort();
        if !seen_links.insert((link.vector.clone(), link.zone.clone(), pair)) {
            errs.push(ValidationError::DuplicateId(format!(
                "coupling of `{}` at `{}` between `{}` and `{}`",
                link.vector, link.zone, link.sector_a, link.sector_b
            )));
        }
    }

    // Demand.
    let mut seen_demand = HashSet::new();
    for d in &spec.demand {
        for (what, id, map) in [
            ("vector", &d.vector, &vector_idx),
            ("zone", &d.zone, &zone_idx),
            ("sector", &d.sector, &sector_idx),
        ] {
            if !map.contains_key(id) {
                errs.push(ValidationError::DanglingReference(format!(
                    "demand references unknown {what} `{id}`"
                )));
            }
        }
        if !seen_demand.insert((d.vector.clone(), d.zone.clone(), d.sector.clone())) {
            errs.push(ValidationError::DuplicateId(format!(
                "demand for ({}, {}, {})",
                d.vector, d.zone, d.sector
            )));
        }
        if d.values.len() != horizon {
            errs.push(ValidationError::MissingSeries(format!(
                "demand for ({}, {}, {}) covers {} of {horizon} hours",
                d.vector,
                d.zone,
                d.sector,
                d.values.len()
            )));
        }
        if d.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            errs.push(ValidationError::BadField(
                format!("demand for ({}, {}, {})", d.vector, d.zone, d.sector),
                "values must be finite and nonnegative".into(),
            ));
        }
    }

    // NSE penalties.
    if spec.default_nse_penalty < 0.0 {
        errs.push(ValidationError::NegativeCost("default NSE penalty".into()));
    }
    for p in &spec.nse_penalties {
        if !vector_idx.contains_key(&p.vector) || !sector_idx.contains_key(&p.sector) {
            errs.push(ValidationError::DanglingReference(format!(
                "NSE penalty for ({}, {})",
                p.vector, p.sector
            )));
        }
        if p.value < 0.0 {
            errs.push(ValidationError::NegativeCost(format!(
                "NSE penalty for ({}, {})",
                p.vector, p.sector
            )));
        }
    }

    if spec.emission_cap < 0.0 {
        errs.push(ValidationError::BadField(
            "emission_cap".into(),
            "must be nonnegative".into(),
        ));
    }

    if !errs.is_empty() {
        return Err(ValidationReport(errs));
    }

    // ---- build resolved lookups ----
    let (nz, ns, nv, nh) = (idx.zones.len(), idx.sectors.len(), idx.vectors.len(), hours.len());
    let combo = |v: usize, z: usize, s: usize| (v * nz + z) * ns + s;

    let mut demand = vec![0.0; nv * nz * ns * nh];
    for d in &spec.demand {
        let v = vector_idx[&d.vector];
        let z = zone_idx[&d.zone];
        let s = sector_idx[&d.sector];
        for (pos, &h) in hours.iter().enumerate() {
            demand[combo(v, z, s) * nh + pos] = d.values[h as usize];
        }
    }

    let mut nse = vec![spec.default_nse_penalty; nv * ns];
    for p in &spec.nse_penalties {
        nse[vector_idx[&p.vector] * ns + sector_idx[&p.sector]] = p.value;
    }

    let mut avail = Vec::with_capacity(spec.technologies.len());
    for tech in &spec.technologies {
        match &tech.availability {
            None => avail.push(None),
            Some(name) => {
                let table = &spec.series[series_idx[name.as_str()]];
                let col = table
                    .columns
                    .iter()
                    .find(|(z, _)| *z == tech.zone)
                    .map(|(_, vals)| vals)
                    .expect("validated availability column");
                avail.push(Some(hours.iter().map(|&h| col[h as usize]).collect()));
            }
        }
    }

    let mut producers = vec![Vec::new(); nv * nz * ns];
    let mut conv_consumers = vec![Vec::new(); nv * nz * ns];
    let mut storages = vec![Vec::new(); nv * nz * ns];
    let mut transmissions = Vec::new();
    let mut trn_at = vec![Vec::new(); nv * nz];
    for (i, tech) in spec.technologies.iter().enumerate() {
        let v = vector_idx[&tech.vector];
        let z = zone_idx[&tech.zone];
        let s = sector_idx[&tech.sector];
        match tech.kind {
            TechKind::Generation => producers[combo(v, z, s)].push(i),
            TechKind::Conversion => {
                producers[combo(v, z, s)].push(i);
                let vin = vector_idx[tech.vector_in.as_ref().expect("validated")];
                conv_consumers[combo(vin, z, s)].push(i);
            }
            TechKind::Storage => storages[combo(v, z, s)].push(i),
            TechKind::Transmission => {
                let z2 = zone_idx[tech.zone_to.as_ref().expect("validated")];
                transmissions.push(i);
                trn_at[v * nz + z].push((i, true));
                trn_at[v * nz + z2].push((i, false));
            }
        }
    }

    Ok(System {
        spec: spec.clone(),
        zone_idx,
        sector_idx,
        vector_idx,
        hours,
        hour_pos,
        demand,
        nse,
        avail,
        producers,
        conv_consumers,
        storages,
        transmissions,
        trn_at,
        horizon,
        subperiod_len,
    })
}

#[allow(clippy::too_many_arguments)]
fn validate_tech(
    tech: &TechnologySpec,
    spec: &SystemSpec,
    zone_idx: &HashMap<String, usize>,
    sector_idx: &HashMap<String, usize>,
    vector_idx: &HashMap<String, usize>,
    series_idx: &HashMap<&str, usize>,
    horizon: usize,
    tech_ids: &mut HashSet<String>,
    errs: &mut Vec<ValidationError>,
) {
    let id = &tech.id;
    if !tech_ids.insert(id.clone()) {
        errs.push(ValidationError::DuplicateId(format!("technology `{id}`")));
    }
    let bad = |errs: &mut Vec<ValidationError>, msg: &str| {
        errs.push(ValidationError::BadField(format!("technology `{id}`"), msg.into()));
    };
    for (what, name, map) in [
        ("zone", Some(&tech.zone), zone_idx),
        ("zone", tech.zone_to.as_ref(), zone_idx),
        ("sector", Some(&tech.sector), sector_idx),
        ("vector", Some(&tech.vector), vector_idx),
        ("vector", tech.vector_in.as_ref(), vector_idx),
    ] {
        if let Some(name) = name {
            if !map.contains_key(name) {
                errs.push(ValidationError::DanglingReference(format!(
                    "technology `{id}` references unknown {what} `{name}`"
                )));
            }
        }
    }
    if tech.invest_cost < 0.0 || tech.var_cost < 0.0 {
        errs.push(ValidationError::NegativeCost(format!("technology `{id}`")));
    }
    if let Some(cap) = tech.max_capacity {
        if cap < 0.0 {
            bad(errs, "max_capacity must be nonnegative");
        }
    }

    let is_storage = tech.kind == TechKind::Storage;
    if is_storage {
        match (tech.efficiency_out, tech.efficiency_in) {
            (Some(o), Some(i)) => {
                if !(o > 0.0 && o <= 1.0 && i > 0.0 && i <= 1.0) {
                    bad(errs, "efficiencies must lie in (0, 1]");
                }
            }
            _ => bad(errs, "storage requires both efficiency_out and efficiency_in"),
        }
        if tech.power_ratio.is_some_and(|r| r <= 0.0) {
            bad(errs, "power_ratio must be positive");
        }
        if tech.availability.is_some() {
            bad(errs, "storage does not take an availability profile");
        }
    } else {
        if tech.efficiency_out.is_some() || tech.efficiency_in.is_some() {
            bad(errs, "efficiencies are storage-only fields");
        }
        if tech.power_ratio.is_some() {
            bad(errs, "power_ratio is a storage-only field");
        }
        if tech.long_duration {
            bad(errs, "long_duration is a storage-only field");
        }
    }
    match tech.kind {
        TechKind::Conversion => {
            if tech.vector_in.is_none() {
                bad(errs, "conversion requires vector_in");
            }
            if tech.vector_in.as_ref() == Some(&tech.vector) {
                bad(errs, "conversion must change the vector");
            }
        }
        TechKind::Transmission => {
            if tech.zone_to.is_none() {
                bad(errs, "transmission requires zone_to");
            }
            if tech.zone_to.as_ref() == Some(&tech.zone) {
                bad(errs, "transmission must join two distinct zones");
            }
            if tech.availability.is_some() {
                bad(errs, "transmission does not take an availability profile");
            }
            if tech.emission_rate != 0.0 {
                bad(errs, "transmission cannot emit");
            }
        }
        _ => {
            if tech.vector_in.is_some() {
                bad(errs, "vector_in is a conversion-only field");
            }
            if tech.zone_to.is_some() {
                bad(errs, "zone_to is a transmission-only field");
            }
        }
    }
    if is_storage && tech.emission_rate != 0.0 {
        bad(errs, "storage cannot emit");
    }

    if let Some(name) = &tech.availability {
        match series_idx.get(name.as_str()) {
            None => errs.push(ValidationError::MissingSeries(format!(
                "technology `{id}` references unknown series `{name}`"
            ))),
            Some(&si) => {
                let table = &spec.series[si];
                if !table.columns.iter().any(|(z, _)| *z == tech.zone) {
                    errs.push(ValidationError::MissingSeries(format!(
                        "series `{name}` has no column for zone `{}`",
                        tech.zone
                    )));
                }
                let _ = horizon;
            }
        }
    }
}

impl System {
    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn zones(&self) -> &[String] {
        &self.spec.index_sets.zones
    }

    pub fn sectors(&self) -> &[String] {
        &self.spec.index_sets.sectors
    }

    pub fn vectors(&self) -> &[String] {
        &self.spec.index_sets.vectors
    }

    pub fn subperiods(&self) -> &[super::Subperiod] {
        &self.spec.index_sets.subperiods
    }

    pub fn assignment(&self) -> &[usize] {
        &self.spec.assignment
    }

    pub fn emission_cap(&self) -> f64 {
        self.spec.emission_cap
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn subperiod_len(&self) -> usize {
        self.subperiod_len
    }

    pub fn technologies(&self) -> &[TechnologySpec] {
        &self.spec.technologies
    }

    pub fn tech(&self, idx: usize) -> &TechnologySpec {
        &self.spec.technologies[idx]
    }

    pub fn couplings(&self) -> &[super::CouplingLink] {
        &self.spec.couplings
    }

    pub fn zone_index(&self, id: &str) -> Option<usize> {
        self.zone_idx.get(id).copied()
    }

    pub fn sector_index(&self, id: &str) -> Option<usize> {
        self.sector_idx.get(id).copied()
    }

    pub fn vector_index(&self, id: &str) -> Option<usize> {
        self.vector_idx.get(id).copied()
    }

    pub fn hour_position(&self, hour: u32) -> Option<usize> {
        self.hour_pos.get(&hour).copied()
    }

    fn combo(&self, v: usize, z: usize, s: usize) -> usize {
        (v * self.zones().len() + z) * self.sectors().len() + s
    }

    pub fn demand_at(&self, v: usize, z: usize, s: usize, hpos: usize) -> f64 {
        self.demand[self.combo(v, z, s) * self.hours.len() + hpos]
    }

    pub fn nse_penalty(&self, v: usize, s: usize) -> f64 {
        self.nse[v * self.sectors().len() + s]
    }

    /// Availability factor of a technology at an hour position.
    pub fn availability(&self, tech: usize, hpos: usize) -> f64 {
        self.avail[tech].as_ref().map_or(1.0, |a| a[hpos])
    }

    pub fn producers_at(&self, v: usize, z: usize, s: usize) -> &[usize] {
        &self.producers[self.combo(v, z, s)]
    }

    pub fn conversion_consumers_at(&self, v: usize, z: usize, s: usize) -> &[usize] {
        &self.conv_consumers[self.combo(v, z, s)]
    }

    pub fn storages_at(&self, v: usize, z: usize, s: usize) -> &[usize] {
        &self.storages[self.combo(v, z, s)]
    }

    pub fn transmissions(&self) -> &[usize] {
        &self.transmissions
    }

    /// Transmission links of vector `v` touching zone `z`; the flag marks
    /// whether `z` is the link's origin (`zone`) endpoint.
    pub fn transmissions_at(&self, v: usize, z: usize) -> &[(usize, bool)] {
        &self.trn_at[v * self.zones().len() + z]
    }

    /// Storage power ratio with its default applied.
    pub fn power_ratio(&self, tech: usize) -> f64 {
        self.spec.technologies[tech].power_ratio.unwrap_or(1.0)
    }

    /// All storage tech indices, declaration order.
    pub fn storage_techs(&self) -> impl Iterator<Item = usize> + '_ {
        self.spec
            .technologies
            .iter()
            .enumerate()
            .filter(|(_, t)| t.kind == TechKind::Storage)
            .map(|(i, _)| i)
    }

    pub fn long_duration_storages(&self) -> impl Iterator<Item = usize> + '_ {
        self.storage_techs().filter(|&i| self.spec.technologies[i].long_duration)
    }

    /// Global hour ids modelled, subperiod-ordered.
    pub fn hours(&self) -> &[u32] {
        &self.hours
    }
}
