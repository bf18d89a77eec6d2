//! Shared LP assembly machinery for monolithic problems, operational
//! subproblems and the budget-relaxed monolithic oracles.
//!
//! Variable creation happens before row creation; rows reference variables
//! by canonical label. All iteration follows the ordered index sets, so
//! assembled problems are byte-identical across runs.

use crate::lp::{LpError, Sense, StandardLp};
use crate::model::balance::{balance_terms, TransportTerms};
use crate::model::{labels, System, TechKind};

use super::ComplicatingLayout;

const INF: f64 = f64::INFINITY;

/// How inter-sector exports appear in an operational block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ExportStyle {
    /// Both directions with hourly antisymmetry rows (exact coupling).
    PairedAntisym,
    /// Only the scope sector's directions, weekly sums pinned to budgets
    /// (sectoral subproblem).
    SingleSectorBudgeted,
}

/// How transport appears in an operational block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TransportStyle {
    /// Hourly directional link flows with capacity rows.
    Directional,
    /// Free net-outflow variable per (v, z, t); weekly sums pinned to
    /// transport budgets. Link capacities live in the master problem.
    NetBudgeted,
}

/// Scope of one operational block.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockScope {
    pub zone: Option<usize>,
    pub sector: Option<usize>,
    pub exports: ExportStyle,
    pub transport: TransportStyle,
}

impl BlockScope {
    fn has_zone(&self, z: usize) -> bool {
        self.zone.is_none_or(|zz| zz == z)
    }

    fn has_sector(&self, s: usize) -> bool {
        self.sector.is_none_or(|ss| ss == s)
    }
}

pub(crate) struct Assembler<'s> {
    pub sys: &'s System,
    pub lp: StandardLp,
    /// Accumulated weighted emission terms (var, coefficient).
    pub emission_terms: Vec<(u32, f64)>,
}

impl<'s> Assembler<'s> {
    pub fn new(sys: &'s System, name: impl Into<String>) -> Self {
        Assembler {
            sys,
            lp: StandardLp::new(name),
            emission_terms: Vec::new(),
        }
    }

    /// Creates every complicating variable of the layout. Costs are
    /// applied only in master-side problems; operational subproblems carry
    /// them at zero cost and pin them with fixing rows.
    pub fn add_complicating_vars(
        &mut self,
        layout: &ComplicatingLayout,
        with_costs: bool,
    ) -> Result<(), LpError> {
        for entry in &layout.entries {
            let (lo, hi) = layout.natural_bounds(self.sys, entry);
            let cost = if with_costs { entry.invest_cost } else { 0.0 };
            self.lp.add_var(entry.label.clone(), cost, lo, hi)?;
        }
        Ok(())
    }

    /// Creates the chronological boundary-level variables and the linking
    /// rows of long-duration storage (master-side and monolithic).
    pub fn add_storage_linking_rows(&mut self) -> Result<(), LpError> {
        let sys = self.sys;
        let n_original = sys.assignment().len();
        for tech in sys.long_duration_storages() {
            let id = &sys.tech(tech).id;
            let stor = sys.tech(tech);
            let eta_in = stor.efficiency_in.unwrap_or(1.0);
            let eta_out = stor.efficiency_out.unwrap_or(1.0);
            let ratio = sys.power_ratio(tech);
            let cap = self.lp.var_index(&labels::y_cap(id))?;
            if !self.lp.has_var(&labels::lvl_chain(id, 0)) {
                for original in 0..n_original {
                    self.lp
                        .add_var(labels::lvl_chain(id, original), 0.0, 0.0, INF)?;
                }
            }
            for original in 0..n_original {
                let here = self.lp.var_index(&labels::lvl_chain(id, original))?;
                let next = self
                    .lp
                    .var_index(&labels::lvl_chain(id, (original + 1) % n_original))?;
                let w = sys.assignment()[original];
                let sp_id = &sys.subperiods()[w].id;
                let delta = self.lp.var_index(&labels::y_delta(id, sp_id))?;
                // L_{i+1} - L_i - delta(rep(i)) = 0   (cyclic wrap)
                self.lp.add_row(
                    labels::chain(id, original),
                    Sense::Eq,
                    0.0,
                    vec![(next, 1.0), (here, -1.0), (delta, -1.0)],
                )?;
                self.lp.add_row(
                    labels::chain_max(id, original),
                    Sense::Le,
                    0.0,
                    vec![(here, 1.0), (cap, -1.0)],
                )?;
            }
            // First chronological occurrence of each representative pins
            // its within-subperiod anchor to the boundary level.
            for (w, sp) in sys.subperiods().iter().enumerate() {
                let start = self.lp.var_index(&labels::y_start(id, &sp.id))?;
                let delta = self.lp.var_index(&labels::y_delta(id, &sp.id))?;
                let first = sys
                    .assignment()
                    .iter()
                    .position(|&a| a == w)
                    .expect("validated weights imply a first occurrence");
                let anchor = self.lp.var_index(&labels::lvl_chain(id, first))?;
                self.lp.add_row(
                    labels::start_link(id, &sp.id),
                    Sense::Eq,
                    0.0,
                    vec![(start, 1.0), (anchor, -1.0)],
                )?;
                self.lp.add_row(
                    labels::start_max(id, &sp.id),
                    Sense::Le,
                    0.0,
                    vec![(start, 1.0), (cap, -1.0)],
                )?;
                self.lp.add_row(
                    labels::end_min(id, &sp.id),
                    Sense::Ge,
                    0.0,
                    vec![(start, 1.0), (delta, 1.0)],
                )?;
                self.lp.add_row(
                    labels::end_max(id, &sp.id),
                    Sense::Le,
                    0.0,
                    vec![(start, 1.0), (delta, 1.0), (cap, -1.0)],
                )?;
                let hours = sp.hours.len() as f64;
                self.lp.add_row(
                    labels::delta_up(id, &sp.id),
                    Sense::Le,
                    0.0,
                    vec![(delta, 1.0), (cap, -hours * eta_in * ratio)],
                )?;
                self.lp.add_row(
                    labels::delta_dn(id, &sp.id),
                    Sense::Le,
                    0.0,
                    vec![(delta, -1.0), (cap, -hours * ratio / eta_out)],
                )?;
            }
        }
        Ok(())
    }

    /// Creates operational variables and rows of one block and accumulates
    /// its weighted emission terms. The complicating variables referenced
    /// (capacities, storage anchors, budgets) must already exist.
    pub fn add_operational_block(
        &mut self,
        w: usize,
        scope: BlockScope,
    ) -> Result<(), LpError> {
        self.add_block_vars(w, scope)?;
        self.add_block_rows(w, scope)?;
        Ok(())
    }

    fn in_scope_tech(&self, tech: usize, scope: BlockScope) -> bool {
        let t = self.sys.tech(tech);
        let z = self.sys.zone_index(&t.zone).unwrap();
        let s = self.sys.sector_index(&t.sector).unwrap();
        if t.kind == TechKind::Transmission {
            // Transmission belongs to its owning sector; under a zone
            // scope it is replaced by the net-outflow variable.
            return scope.zone.is_none() && scope.has_sector(s);
        }
        scope.has_zone(z) && scope.has_sector(s)
    }

    fn add_block_vars(&mut self, w: usize, scope: BlockScope) -> Result<(), LpError> {
        let sys = self.sys;
        let sp = &sys.subperiods()[w];
        let weight = sp.weight;
        for (ti, tech) in sys.technologies().iter().enumerate() {
            if !self.in_scope_tech(ti, scope) {
                continue;
            }
            match tech.kind {
                TechKind::Generation | TechKind::Conversion => {
                    for &t in &sp.hours {
                        self.lp.add_var(
                            labels::x_gen(&tech.id, t),
                            weight * tech.var_cost,
                            0.0,
                            INF,
                        )?;
                    }
                }
                TechKind::Storage => {
                    for &t in &sp.hours {
                        self.lp.add_var(
                            labels::x_otp(&tech.id, t),
                            weight * tech.var_cost,
                            0.0,
                            INF,
                        )?;
                        self.lp.add_var(labels::x_ipt(&tech.id, t), 0.0, 0.0, INF)?;
                        self.lp.add_var(labels::lvl(&tech.id, t), 0.0, 0.0, INF)?;
                    }
                    if !tech.long_duration {
                        self.lp
                            .add_var(labels::lvl_anchor(&tech.id, &sp.id), 0.0, 0.0, INF)?;
                    }
                }
                TechKind::Transmission => {
                    for &t in &sp.hours {
                        self.lp.add_var(
                            labels::x_trn(&tech.id, true, t),
                            weight * tech.var_cost,
                            0.0,
                            INF,
                        )?;
                        self.lp.add_var(
                            labels::x_trn(&tech.id, false, t),
                            weight * tech.var_cost,
                            0.0,
                            INF,
                        )?;
                    }
                }
            }
        }
        for (v, vector) in sys.vectors().iter().enumerate() {
            for (z, zone) in sys.zones().iter().enumerate() {
                if !scope.has_zone(z) {
                    continue;
                }
                for (s, sector) in sys.sectors().iter().enumerate() {
                    if !scope.has_sector(s) {
                        continue;
                    }
                    let nse_cost = weight * sys.nse_penalty(v, s);
                    for &t in &sp.hours {
                        self.lp
                            .add_var(labels::x_nse(vector, zone, sector, t), nse_cost, 0.0, INF)?;
                        self.lp
                            .add_var(labels::x_crt(vector, zone, sector, t), 0.0, 0.0, INF)?;
                    }
                }
            }
        }
        // Exports.
        for link in sys.couplings() {
            let z = sys.zone_index(&link.zone).unwrap();
            if !scope.has_zone(z) {
                continue;
            }
            let sa = sys.sector_index(&link.sector_a).unwrap();
            let sb = sys.sector_index(&link.sector_b).unwrap();
            let dirs: Vec<(&str, &str)> = match scope.exports {
                ExportStyle::PairedAntisym => vec![
                    (&link.sector_a, &link.sector_b),
                    (&link.sector_b, &link.sector_a),
                ],
                ExportStyle::SingleSectorBudgeted => {
                    let mut d = Vec::new();
                    if scope.has_sector(sa) {
                        d.push((link.sector_a.as_str(), link.sector_b.as_str()));
                    }
                    if scope.has_sector(sb) {
                        d.push((link.sector_b.as_str(), link.sector_a.as_str()));
                    }
                    d
                }
            };
            for (from, to) in dirs {
                let (lo, hi) = if !link.directional {
                    (-INF, INF)
                } else if from == link.sector_a {
                    (0.0, INF)
                } else {
                    (-INF, 0.0)
                };
                for &t in &sp.hours {
                    self.lp.add_var(
                        labels::x_exp(&link.vector, &link.zone, from, to, t),
                        0.0,
                        lo,
                        hi,
                    )?;
                }
            }
        }
        // Net transport outflow variables for zone-scoped blocks.
        if scope.transport == TransportStyle::NetBudgeted {
            for (v, vector) in sys.vectors().iter().enumerate() {
                for (z, zone) in sys.zones().iter().enumerate() {
                    if !scope.has_zone(z) || sys.transmissions_at(v, z).is_empty() {
                        continue;
                    }
                    for &t in &sp.hours {
                        self.lp
                            .add_var(labels::x_net(vector, zone, t), 0.0, -INF, INF)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn add_block_rows(&mut self, w: usize, scope: BlockScope) -> Result<(), LpError> {
        let sys = self.sys;
        let sp = &sys.subperiods()[w];
        let weight = sp.weight;

        // Balance rows.
        let transport_terms = match scope.transport {
            TransportStyle::Directional => TransportTerms::Directional,
            TransportStyle::NetBudgeted => TransportTerms::NetVariable,
        };
        let mut terms = Vec::new();
        for (v, _) in sys.vectors().iter().enumerate() {
            for (z, zone) in sys.zones().iter().enumerate() {
                if !scope.has_zone(z) {
                    continue;
                }
                for (s, sector) in sys.sectors().iter().enumerate() {
                    if !scope.has_sector(s) {
                        continue;
                    }
                    for &t in &sp.hours {
                        terms.clear();
                        balance_terms(sys, v, z, s, t, transport_terms, &mut terms);
                        let hpos = sys.hour_position(t).unwrap();
                        let resolved = terms
                            .iter()
                            .map(|(l, c)| self.lp.var_index(l).map(|i| (i, *c)))
                            .collect::<Result<Vec<_>, _>>()?;
                        self.lp.add_row(
                            labels::bal(&sys.vectors()[v], zone, sector, t),
                            Sense::Eq,
                            sys.demand_at(v, z, s, hpos),
                            resolved,
                        )?;
                    }
                }
            }
        }

        // Capacity, storage and transmission rows; emission terms.
        for (ti, tech) in sys.technologies().iter().enumerate() {
            if !self.in_scope_tech(ti, scope) {
                continue;
            }
            match tech.kind {
                TechKind::Generation | TechKind::Conversion => {
                    let cap = self.lp.var_index(&labels::y_cap(&tech.id))?;
                    for &t in &sp.hours {
                        let hpos = sys.hour_position(t).unwrap();
                        let x = self.lp.var_index(&labels::x_gen(&tech.id, t))?;
                        self.lp.add_row(
                            labels::cap(&tech.id, t),
                            Sense::Le,
                            0.0,
                            vec![(x, 1.0), (cap, -sys.availability(ti, hpos))],
                        )?;
                        if tech.emission_rate != 0.0 {
                            self.emission_terms.push((x, weight * tech.emission_rate));
                        }
                    }
                }
                TechKind::Storage => self.add_storage_block_rows(ti, w)?,
                TechKind::Transmission => {
                    let cap = self.lp.var_index(&labels::y_cap(&tech.id))?;
                    for &t in &sp.hours {
                        for fwd in [true, false] {
                            let x = self.lp.var_index(&labels::x_trn(&tech.id, fwd, t))?;
                            self.lp.add_row(
                                labels::trn_cap(&tech.id, fwd, t),
                                Sense::Le,
                                0.0,
                                vec![(x, 1.0), (cap, -1.0)],
                            )?;
                        }
                    }
                }
            }
        }

        // Hourly export antisymmetry (exact coupling only).
        if scope.exports == ExportStyle::PairedAntisym {
            for link in sys.couplings() {
                let z = sys.zone_index(&link.zone).unwrap();
                if !scope.has_zone(z) {
                    continue;
                }
                for &t in &sp.hours {
                    let ab = self.lp.var_index(&labels::x_exp(
                        &link.vector,
                        &link.zone,
                        &link.sector_a,
                        &link.sector_b,
                        t,
                    ))?;
                    let ba = self.lp.var_index(&labels::x_exp(
                        &link.vector,
                        &link.zone,
                        &link.sector_b,
                        &link.sector_a,
                        t,
                    ))?;
                    self.lp.add_row(
                        labels::exp_asym(&link.vector, &link.zone, &link.sector_a, &link.sector_b, t),
                        Sense::Eq,
                        0.0,
                        vec![(ab, 1.0), (ba, 1.0)],
                    )?;
                }
            }
        }

        // Weekly budget-consistency rows.
        match scope.exports {
            ExportStyle::PairedAntisym => {}
            ExportStyle::SingleSectorBudgeted => {
                for link in sys.couplings() {
                    let z = sys.zone_index(&link.zone).unwrap();
                    if !scope.has_zone(z) {
                        continue;
                    }
                    for (from, to) in [
                        (&link.sector_a, &link.sector_b),
                        (&link.sector_b, &link.sector_a),
                    ] {
                        let first = labels::x_exp(&link.vector, &link.zone, from, to, sp.hours[0]);
                        let row_label =
                            labels::budget_exp(&link.vector, &link.zone, from, to, &sp.id);
                        if !self.lp.has_var(&first) || self.lp.has_row(&row_label) {
                            continue;
                        }
                        let budget = self
                            .lp
                            .var_index(&labels::y_exp(&link.vector, &link.zone, from, to, &sp.id))?;
                        let mut row: Vec<(u32, f64)> = sp
                            .hours
                            .iter()
                            .map(|&t| {
                                self.lp
                                    .var_index(&labels::x_exp(&link.vector, &link.zone, from, to, t))
                                    .map(|i| (i, 1.0))
                            })
                            .collect::<Result<_, _>>()?;
                        row.push((budget, -1.0));
                        self.lp.add_row(row_label, Sense::Eq, 0.0, row)?;
                    }
                }
            }
        }
        if scope.transport == TransportStyle::NetBudgeted {
            for (v, vector) in sys.vectors().iter().enumerate() {
                for (z, zone) in sys.zones().iter().enumerate() {
                    if !scope.has_zone(z) || sys.transmissions_at(v, z).is_empty() {
                        continue;
                    }
                    let budget = self.lp.var_index(&labels::y_trn(vector, zone, &sp.id))?;
                    let mut row: Vec<(u32, f64)> = sp
                        .hours
                        .iter()
                        .map(|&t| self.lp.var_index(&labels::x_net(vector, zone, t)).map(|i| (i, 1.0)))
                        .collect::<Result<_, _>>()?;
                    row.push((budget, -1.0));
                    self.lp.add_row(
                        labels::budget_trn(vector, zone, &sp.id),
                        Sense::Eq,
                        0.0,
                        row,
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Within-subperiod storage rows: level dynamics in bus-equivalent
    /// units, capacity and power limits, and the anchor condition (cyclic
    /// for short-duration storage, start/delta linking for long-duration).
    fn add_storage_block_rows(&mut self, ti: usize, w: usize) -> Result<(), LpError> {
        let sys = self.sys;
        let sp = &sys.subperiods()[w];
        let tech = sys.tech(ti);
        let id = &tech.id;
        let eta_in = tech.efficiency_in.unwrap_or(1.0);
        let eta_out = tech.efficiency_out.unwrap_or(1.0);
        let ratio = sys.power_ratio(ti);
        let cap = self.lp.var_index(&labels::y_cap(id))?;

        let anchor = if tech.long_duration {
            self.lp.var_index(&labels::y_start(id, &sp.id))?
        } else {
            self.lp.var_index(&labels::lvl_anchor(id, &sp.id))?
        };
        if !tech.long_duration {
            self.lp.add_row(
                labels::anchor_max(id, &sp.id),
                Sense::Le,
                0.0,
                vec![(anchor, 1.0), (cap, -1.0)],
            )?;
        }

        let mut prev = anchor;
        for (k, &t) in sp.hours.iter().enumerate() {
            let lvl = self.lp.var_index(&labels::lvl(id, t))?;
            let otp = self.lp.var_index(&labels::x_otp(id, t))?;
            let ipt = self.lp.var_index(&labels::x_ipt(id, t))?;
            // lvl_t - lvl_{t-1} - eta_in*ipt + otp/eta_out = 0
            self.lp.add_row(
                labels::soc(id, t),
                Sense::Eq,
                0.0,
                vec![(lvl, 1.0), (prev, -1.0), (ipt, -eta_in), (otp, 1.0 / eta_out)],
            )?;
            self.lp.add_row(
                labels::soc_max(id, t),
                Sense::Le,
                0.0,
                vec![(lvl, 1.0), (cap, -1.0)],
            )?;
            self.lp.add_row(
                labels::pow_in(id, t),
                Sense::Le,
                0.0,
                vec![(ipt, 1.0), (cap, -ratio)],
            )?;
            self.lp.add_row(
                labels::pow_out(id, t),
                Sense::Le,
                0.0,
                vec![(otp, 1.0), (cap, -ratio)],
            )?;
            let _ = k;
            prev = lvl;
        }

        let last = prev;
        if tech.long_duration {
            let start = anchor;
            let delta = self.lp.var_index(&labels::y_delta(id, &sp.id))?;
            // lvl(last) - start - delta = 0
            self.lp.add_row(
                labels::delta_def(id, &sp.id),
                Sense::Eq,
                0.0,
                vec![(last, 1.0), (start, -1.0), (delta, -1.0)],
            )?;
        } else {
            self.lp.add_row(
                labels::cyclic(id, &sp.id),
                Sense::Eq,
                0.0,
                vec![(last, 1.0), (anchor, -1.0)],
            )?;
        }
        Ok(())
    }

    /// Sectoral upper-problem budget rows: antisymmetry between the two
    /// directions of each coupling and the producer-capacity caps.
    pub fn add_sectoral_budget_rows(&mut self) -> Result<(), LpError> {
        let sys = self.sys;
        for sp in sys.subperiods() {
            let hours = sp.hours.len() as f64;
            for link in sys.couplings() {
                let ab = self.lp.var_index(&labels::y_exp(
                    &link.vector,
                    &link.zone,
                    &link.sector_a,
                    &link.sector_b,
                    &sp.id,
                ))?;
                let ba = self.lp.var_index(&labels::y_exp(
                    &link.vector,
                    &link.zone,
                    &link.sector_b,
                    &link.sector_a,
                    &sp.id,
                ))?;
                self.lp.add_row(
                    labels::budget_asym(&link.vector, &link.zone, &link.sector_a, &link.sector_b, &sp.id),
                    Sense::Eq,
                    0.0,
                    vec![(ab, 1.0), (ba, 1.0)],
                )?;
                // Cap each direction by the exporting sector's producer
                // capacities over the subperiod.
                for (budget, from) in [(ab, &link.sector_a), (ba, &link.sector_b)] {
                    let v = sys.vector_index(&link.vector).unwrap();
                    let z = sys.zone_index(&link.zone).unwrap();
                    let s = sys.sector_index(from).unwrap();
                    let mut row = vec![(budget, 1.0)];
                    for &g in sys.producers_at(v, z, s) {
                        let cap = self.lp.var_index(&labels::y_cap(&sys.tech(g).id))?;
                        row.push((cap, -hours));
                    }
                    let to = if from == &link.sector_a {
                        &link.sector_b
                    } else {
                        &link.sector_a
                    };
                    self.lp.add_row(
                        labels::budget_cap(&link.vector, &link.zone, from, to, &sp.id),
                        Sense::Le,
                        0.0,
                        row,
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Spatial upper-problem budget rows: hourly translation variables,
    /// directional link flows with capacity rows, network consistency and
    /// the weekly budget sums.
    pub fn add_spatial_budget_rows(&mut self) -> Result<(), LpError> {
        let sys = self.sys;
        for sp in sys.subperiods() {
            // Hourly directional flows bounded by link capacity.
            for &l in sys.transmissions() {
                let id = &sys.tech(l).id;
                let cap = self.lp.var_index(&labels::y_cap(id))?;
                for &t in &sp.hours {
                    for fwd in [true, false] {
                        let x = self.lp.add_var(labels::x_trn(id, fwd, t), 0.0, 0.0, INF)?;
                        self.lp.add_row(
                            labels::trn_cap(id, fwd, t),
                            Sense::Le,
                            0.0,
                            vec![(x, 1.0), (cap, -1.0)],
                        )?;
                    }
                }
            }
            for (v, vector) in sys.vectors().iter().enumerate() {
                for (z, zone) in sys.zones().iter().enumerate() {
                    let links = sys.transmissions_at(v, z);
                    if links.is_empty() {
                        continue;
                    }
                    let mut sum_row = Vec::with_capacity(sp.hours.len() + 1);
                    for &t in &sp.hours {
                        let h = self.lp.add_var(labels::y_trn_hourly(vector, zone, t), 0.0, -INF, INF)?;
                        sum_row.push((h, 1.0));
                        // y_trnh(v,z,t) = sum over links of (outgoing - incoming)
                        let mut row = vec![(h, 1.0)];
                        for &(l, is_origin) in links {
                            let id = &sys.tech(l).id;
                            let out = self.lp.var_index(&labels::x_trn(id, is_origin, t))?;
                            let inc = self.lp.var_index(&labels::x_trn(id, !is_origin, t))?;
                            row.push((out, -1.0));
                            row.push((inc, 1.0));
                        }
                        self.lp
                            .add_row(labels::budget_trn_net(vector, zone, t), Sense::Eq, 0.0, row)?;
                    }
                    let budget = self.lp.var_index(&labels::y_trn(vector, zone, &sp.id))?;
                    sum_row.push((budget, -1.0));
                    self.lp.add_row(
                        labels::budget_trn_sum(vector, zone, &sp.id),
                        Sense::Eq,
                        0.0,
                        sum_row,
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Adds the per-block emission accounting: `sum(Q x) - q_block <= 0`
    /// with `q_block` a fresh nonnegative variable; returns its index.
    /// `terms` must be the block's weighted emission terms.
    pub fn add_block_emission_row(
        &mut self,
        block: &super::BlockKey,
        terms: Vec<(u32, f64)>,
    ) -> Result<u32, LpError> {
        let q = self
            .lp
            .add_var(block.q_label(self.sys), 0.0, 0.0, INF)?;
        let mut row = terms;
        row.push((q, -1.0));
        self.lp
            .add_row(block.emis_label(self.sys), Sense::Le, 0.0, row)?;
        Ok(q)
    }
}

/// Ordered block scope used by subproblem and oracle builders.
pub(crate) fn scope_for(block: &super::BlockKey) -> BlockScope {
    match *block {
        super::BlockKey::Period { .. } => BlockScope {
            zone: None,
            sector: None,
            exports: ExportStyle::PairedAntisym,
            transport: TransportStyle::Directional,
        },
        super::BlockKey::PeriodSector { s, .. } => BlockScope {
            zone: None,
            sector: Some(s),
            exports: ExportStyle::SingleSectorBudgeted,
            transport: TransportStyle::Directional,
        },
        super::BlockKey::PeriodZone { z, .. } => BlockScope {
            zone: Some(z),
            sector: None,
            exports: ExportStyle::PairedAntisym,
            transport: TransportStyle::NetBudgeted,
        },
    }
}
