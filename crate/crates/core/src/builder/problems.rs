//! Monolithic problems, operational subproblems and the budget-relaxed
//! monolithic oracles.

use crate::lp::{LpError, Sense, StandardLp};
use crate::model::{labels, System};

use super::assemble::{scope_for, Assembler, BlockScope, ExportStyle, TransportStyle};
use super::{BlockKey, ComplicatingLayout, ComplicatingVector, DecompositionMode};

/// The full capacity expansion LP: investment costs plus weighted
/// operational costs over every subperiod, with a single net-emission row.
pub fn build_monolithic(system: &System) -> Result<StandardLp, LpError> {
    let layout = ComplicatingLayout::new(system, DecompositionMode::Temporal);
    let mut asm = Assembler::new(system, format!("monolithic({})", system.name()));
    asm.add_complicating_vars(&layout, true)?;
    asm.add_storage_linking_rows()?;
    let scope = BlockScope {
        zone: None,
        sector: None,
        exports: ExportStyle::PairedAntisym,
        transport: TransportStyle::Directional,
    };
    for w in 0..system.subperiods().len() {
        asm.add_operational_block(w, scope)?;
    }
    let emission = std::mem::take(&mut asm.emission_terms);
    if !emission.is_empty() {
        asm.lp.add_row(
            labels::EMIS_GLOBAL,
            Sense::Le,
            system.emission_cap(),
            emission,
        )?;
    }
    Ok(asm.lp)
}

/// The decomposition-mode relaxation solved as one LP: hourly sector or
/// zone coupling replaced by the mode's weekly budget variables, emission
/// budgets split per block. Its optimum is the value the budget-based
/// algorithms converge to; for the temporal mode it equals the monolithic
/// optimum.
pub fn build_relaxed_monolithic(
    system: &System,
    mode: DecompositionMode,
) -> Result<StandardLp, LpError> {
    let layout = ComplicatingLayout::new(system, mode);
    let mut asm = Assembler::new(
        system,
        format!("relaxed({},{})", mode.as_str(), system.name()),
    );
    asm.add_complicating_vars(&layout, true)?;
    asm.add_storage_linking_rows()?;
    match mode {
        DecompositionMode::Temporal => {}
        DecompositionMode::TemporalSectoral => asm.add_sectoral_budget_rows()?,
        DecompositionMode::TemporalSpatial => asm.add_spatial_budget_rows()?,
    }
    let mut q_vars = Vec::new();
    for block in &layout.blocks {
        asm.add_operational_block(block.w(), scope_for(block))?;
        let terms = std::mem::take(&mut asm.emission_terms);
        q_vars.push(asm.add_block_emission_row(block, terms)?);
    }
    asm.lp.add_row(
        labels::EMIS_GLOBAL,
        Sense::Le,
        system.emission_cap(),
        q_vars.into_iter().map(|q| (q, 1.0)).collect(),
    )?;
    Ok(asm.lp)
}

/// Operational subproblem of one subperiod: weighted operational costs of
/// every zone and sector, all complicating variables pinned by `fix_y`
/// rows and the subperiod's emission budget pinned by `fix_q`.
pub fn build_temporal_subproblem(
    system: &System,
    w: usize,
    layout: &ComplicatingLayout,
    iterate: &ComplicatingVector,
) -> Result<StandardLp, LpError> {
    build_block_subproblem(system, &BlockKey::Period { w }, layout, iterate)
}

/// Operational subproblem of one (subperiod, sector) or (subperiod, zone)
/// block in a budget-based mode.
pub fn build_budget_subproblem(
    system: &System,
    block: &BlockKey,
    layout: &ComplicatingLayout,
    iterate: &ComplicatingVector,
) -> Result<StandardLp, LpError> {
    build_block_subproblem(system, block, layout, iterate)
}

fn build_block_subproblem(
    system: &System,
    block: &BlockKey,
    layout: &ComplicatingLayout,
    iterate: &ComplicatingVector,
) -> Result<StandardLp, LpError> {
    let block_pos = layout
        .blocks
        .iter()
        .position(|b| b == block)
        .ok_or_else(|| LpError::UnknownLabel(block.describe(system)))?;
    let mut asm = Assembler::new(system, block.describe(system));
    asm.add_complicating_vars(layout, false)?;
    asm.add_operational_block(block.w(), scope_for(block))?;
    let terms = std::mem::take(&mut asm.emission_terms);
    asm.add_block_emission_row(block, terms)?;

    let mut lp = asm.lp;
    for (entry, &value) in layout.entries.iter().zip(&iterate.y) {
        lp.fix_variable_as(&entry.label, value, labels::fix_y(&entry.label))?;
    }
    lp.fix_variable_as(
        &block.q_label(system),
        iterate.q[block_pos],
        block.fix_q_label(system),
    )?;
    Ok(lp)
}
