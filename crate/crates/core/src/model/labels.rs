//! Canonical variable and row labels.
//!
//! Labels are bit-exact contracts: tests and the LP text export rely on
//! them, and cut gradients are keyed by them across problems.

// ---- investment-side variables ----

pub fn y_cap(tech: &str) -> String {
    format!("y_cap({tech})")
}

pub fn y_start(stor: &str, w: &str) -> String {
    format!("y_start({stor},{w})")
}

pub fn y_delta(stor: &str, w: &str) -> String {
    format!("y_delta({stor},{w})")
}

pub fn lvl_chain(stor: &str, original_week: usize) -> String {
    format!("lvl_chain({stor},{original_week})")
}

pub fn q_period(w: &str) -> String {
    format!("q({w})")
}

pub fn q_block(w: &str, delta: &str) -> String {
    format!("q({w},{delta})")
}

pub fn y_exp(vector: &str, zone: &str, from: &str, to: &str, w: &str) -> String {
    format!("y_exp({vector},{zone},{from},{to},{w})")
}

pub fn y_trn(vector: &str, zone: &str, w: &str) -> String {
    format!("y_trn({vector},{zone},{w})")
}

pub fn y_trn_hourly(vector: &str, zone: &str, t: u32) -> String {
    format!("y_trnh({vector},{zone},{t})")
}

pub fn theta_period(w: &str) -> String {
    format!("theta({w})")
}

pub fn theta_block(w: &str, delta: &str) -> String {
    format!("theta({w},{delta})")
}

// ---- operational variables ----

pub fn x_gen(tech: &str, t: u32) -> String {
    format!("x_gen({tech},{t})")
}

pub fn x_otp(stor: &str, t: u32) -> String {
    format!("x_otp({stor},{t})")
}

pub fn x_ipt(stor: &str, t: u32) -> String {
    format!("x_ipt({stor},{t})")
}

pub fn lvl(stor: &str, t: u32) -> String {
    format!("lvl({stor},{t})")
}

pub fn lvl_anchor(stor: &str, w: &str) -> String {
    format!("lvl0({stor},{w})")
}

pub fn x_nse(vector: &str, zone: &str, sector: &str, t: u32) -> String {
    format!("x_nse({vector},{zone},{sector},{t})")
}

pub fn x_crt(vector: &str, zone: &str, sector: &str, t: u32) -> String {
    format!("x_crt({vector},{zone},{sector},{t})")
}

pub fn x_exp(vector: &str, zone: &str, from: &str, to: &str, t: u32) -> String {
    format!("x_exp({vector},{zone},{from},{to},{t})")
}

/// Directional flow on a transmission link; `fwd` runs zone -> zone_to.
pub fn x_trn(link: &str, forward: bool, t: u32) -> String {
    let dir = if forward { "fwd" } else { "bwd" };
    format!("x_trn({link},{dir},{t})")
}

/// Net hourly transport outflow of a zone in a spatial subproblem.
pub fn x_net(vector: &str, zone: &str, t: u32) -> String {
    format!("x_net({vector},{zone},{t})")
}

// ---- rows ----

pub fn bal(vector: &str, zone: &str, sector: &str, t: u32) -> String {
    format!("bal({vector},{zone},{sector},{t})")
}

/// The single net-emission row of a monolithic problem.
pub const EMIS_GLOBAL: &str = "emis";

pub fn emis_period(w: &str) -> String {
    format!("emis({w})")
}

pub fn emis_block(w: &str, delta: &str) -> String {
    format!("emis({w},{delta})")
}

pub fn fix_y(var_label: &str) -> String {
    format!("fix_y({var_label})")
}

pub fn fix_q_period(w: &str) -> String {
    format!("fix_q({w})")
}

pub fn fix_q_block(w: &str, delta: &str) -> String {
    format!("fix_q({w},{delta})")
}

pub fn cut_period(j: usize, w: &str) -> String {
    format!("cut({j},{w})")
}

pub fn cut_block(j: usize, w: &str, delta: &str) -> String {
    format!("cut({j},{w},{delta})")
}

pub const LEVELSET: &str = "levelset";

pub fn cap(tech: &str, t: u32) -> String {
    format!("cap({tech},{t})")
}

pub fn pow_in(stor: &str, t: u32) -> String {
    format!("pow_i({stor},{t})")
}

pub fn pow_out(stor: &str, t: u32) -> String {
    format!("pow_o({stor},{t})")
}

pub fn soc(stor: &str, t: u32) -> String {
    format!("soc({stor},{t})")
}

pub fn soc_max(stor: &str, t: u32) -> String {
    format!("socmax({stor},{t})")
}

pub fn anchor_max(stor: &str, w: &str) -> String {
    format!("soc0max({stor},{w})")
}

pub fn cyclic(stor: &str, w: &str) -> String {
    format!("cyc({stor},{w})")
}

pub fn delta_def(stor: &str, w: &str) -> String {
    format!("delta_def({stor},{w})")
}

pub fn start_max(stor: &str, w: &str) -> String {
    format!("startmax({stor},{w})")
}

pub fn end_min(stor: &str, w: &str) -> String {
    format!("endmin({stor},{w})")
}

pub fn end_max(stor: &str, w: &str) -> String {
    format!("endmax({stor},{w})")
}

pub fn delta_up(stor: &str, w: &str) -> String {
    format!("dmax({stor},{w})")
}

pub fn delta_dn(stor: &str, w: &str) -> String {
    format!("dmin({stor},{w})")
}

pub fn chain(stor: &str, original_week: usize) -> String {
    format!("chain({stor},{original_week})")
}

pub fn chain_max(stor: &str, original_week: usize) -> String {
    format!("chainmax({stor},{original_week})")
}

pub fn start_link(stor: &str, w: &str) -> String {
    format!("startlink({stor},{w})")
}

/// Hourly export antisymmetry between two coupled sectors.
pub fn exp_asym(vector: &str, zone: &str, a: &str, b: &str, t: u32) -> String {
    format!("expasym({vector},{zone},{a},{b},{t})")
}

/// Budget consistency in a sectoral subproblem: weekly export sum.
pub fn budget_exp(vector: &str, zone: &str, from: &str, to: &str, w: &str) -> String {
    format!("bexp({vector},{zone},{from},{to},{w})")
}

/// Budget consistency in a spatial subproblem: weekly net transport sum.
pub fn budget_trn(vector: &str, zone: &str, w: &str) -> String {
    format!("btrn({vector},{zone},{w})")
}

/// Upper-problem budget antisymmetry.
pub fn budget_asym(vector: &str, zone: &str, a: &str, b: &str, w: &str) -> String {
    format!("basym({vector},{zone},{a},{b},{w})")
}

/// Upper-problem export budget cap.
pub fn budget_cap(vector: &str, zone: &str, from: &str, to: &str, w: &str) -> String {
    format!("bcap({vector},{zone},{from},{to},{w})")
}

/// Upper-problem weekly sum of hourly transport translation variables.
pub fn budget_trn_sum(vector: &str, zone: &str, w: &str) -> String {
    format!("btrnh({vector},{zone},{w})")
}

/// Upper-problem hourly network consistency for transport translation.
pub fn budget_trn_net(vector: &str, zone: &str, t: u32) -> String {
    format!("btrnnet({vector},{zone},{t})")
}

pub fn trn_cap(link: &str, forward: bool, t: u32) -> String {
    let dir = if forward { "fwd" } else { "bwd" };
    format!("trncap({link},{dir},{t})")
}

/// Two-stage handoff: theta(w) >= sum over delta of theta(w,delta).
pub fn theta_link(w: &str) -> String {
    format!("link({w})")
}

/// Two-stage handoff: q(w) = sum over delta of q(w,delta).
pub fn q_link(w: &str) -> String {
    format!("qlink({w})")
}
