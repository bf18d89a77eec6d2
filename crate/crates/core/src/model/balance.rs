//! Energy-vector balance rows.
//!
//! For a key (vector v, zone z, sector s, hour t) the row reads, with
//! demand moved to the right-hand side:
//!
//! ```text
//!   sum_g x_gen + sum_sigma x_otp/eta_out + x_nse
//! - sum_sigma eta_in * x_ipt - x_crt - sum_conv x_gen(consuming v)
//! - sum_{s'!=s} x_exp(s->s') - net transport outflow  =  demand
//! ```
//!
//! Transport appears as two nonnegative directional variables per link:
//! the outgoing direction carries -1 at its origin and +1 at its
//! destination, so summing balances over zones cancels every transport
//! term.

use thiserror::Error;

use super::{labels, System};

#[derive(Debug, Error, PartialEq)]
pub enum BalanceError {
    #[error("unknown key component `{0}`")]
    UnknownKey(String),
}

/// One balance row: signed variable terms and the demand RHS.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceRow {
    pub vector: String,
    pub zone: String,
    pub sector: String,
    pub hour: u32,
    pub terms: Vec<(String, f64)>,
    pub rhs: f64,
}

/// Assembles the full (monolithic-style) balance row for a key.
pub fn assemble_balance(
    system: &System,
    vector: &str,
    zone: &str,
    sector: &str,
    hour: u32,
) -> Result<BalanceRow, BalanceError> {
    let v = system
        .vector_index(vector)
        .ok_or_else(|| BalanceError::UnknownKey(format!("vector `{vector}`")))?;
    let z = system
        .zone_index(zone)
        .ok_or_else(|| BalanceError::UnknownKey(format!("zone `{zone}`")))?;
    let s = system
        .sector_index(sector)
        .ok_or_else(|| BalanceError::UnknownKey(format!("sector `{sector}`")))?;
    let hpos = system
        .hour_position(hour)
        .ok_or_else(|| BalanceError::UnknownKey(format!("hour {hour}")))?;

    let mut terms = Vec::new();
    balance_terms(system, v, z, s, hour, TransportTerms::Directional, &mut terms);
    Ok(BalanceRow {
        vector: vector.to_string(),
        zone: zone.to_string(),
        sector: sector.to_string(),
        hour,
        terms,
        rhs: system.demand_at(v, z, s, hpos),
    })
}

/// How transport enters a balance row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportTerms {
    /// Hourly directional link flows (monolithic, temporal, sectoral).
    Directional,
    /// A single free net-outflow variable per (v, z, t): spatial blocks.
    NetVariable,
}

/// Shared term generator; also used by the problem builders.
pub(crate) fn balance_terms(
    system: &System,
    v: usize,
    z: usize,
    s: usize,
    hour: u32,
    transport: TransportTerms,
    terms: &mut Vec<(String, f64)>,
) {
    let vector = &system.vectors()[v];
    let zone = &system.zones()[z];
    let sector = &system.sectors()[s];

    for &g in system.producers_at(v, z, s) {
        terms.push((labels::x_gen(&system.tech(g).id, hour), 1.0));
    }
    for &c in system.conversion_consumers_at(v, z, s) {
        terms.push((labels::x_gen(&system.tech(c).id, hour), -1.0));
    }
    for &sg in system.storages_at(v, z, s) {
        let tech = system.tech(sg);
        let eta_out = tech.efficiency_out.unwrap_or(1.0);
        let eta_in = tech.efficiency_in.unwrap_or(1.0);
        terms.push((labels::x_otp(&tech.id, hour), 1.0 / eta_out));
        terms.push((labels::x_ipt(&tech.id, hour), -eta_in));
    }
    terms.push((labels::x_nse(vector, zone, sector, hour), 1.0));
    terms.push((labels::x_crt(vector, zone, sector, hour), -1.0));

    for link in system.couplings() {
        if link.vector != *vector || link.zone != *zone {
            continue;
        }
        if link.sector_a == *sector {
            terms.push((labels::x_exp(vector, zone, sector, &link.sector_b, hour), -1.0));
        } else if link.sector_b == *sector {
            terms.push((labels::x_exp(vector, zone, sector, &link.sector_a, hour), -1.0));
        }
    }

    match transport {
        TransportTerms::NetVariable => {
            if owns_transport(system, v, z, s) {
                terms.push((labels::x_net(vector, zone, hour), -1.0));
            }
        }
        TransportTerms::Directional => {
            if owns_any_transport_sector(system, v, s) {
                for &(l, is_origin) in system.transmissions_at(v, z) {
                    if system.tech(l).sector != *sector {
                        continue;
                    }
                    let id = &system.tech(l).id;
                    let (out_fwd, in_fwd) = if is_origin { (true, false) } else { (false, true) };
                    terms.push((labels::x_trn(id, out_fwd, hour), -1.0));
                    terms.push((labels::x_trn(id, in_fwd, hour), 1.0));
                }
            }
        }
    }
}

/// Whether (v, z) has any transmission owned by sector s.
pub(crate) fn owns_transport(system: &System, v: usize, z: usize, s: usize) -> bool {
    system
        .transmissions_at(v, z)
        .iter()
        .any(|&(l, _)| system.sector_index(&system.tech(l).sector) == Some(s))
}

fn owns_any_transport_sector(system: &System, v: usize, s: usize) -> bool {
    system
        .transmissions()
        .iter()
        .any(|&l| {
            let t = system.tech(l);
            system.vector_index(&t.vector) == Some(v)
                && system.sector_index(&t.sector) == Some(s)
        })
}
