//! Deviations from the structural equations and orders that penalize them.

use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Value, VariableId, World};
use crate::normality::{ExtendedCausalModel, NormalityOrder, Ranking};

/// A variable whose value in a world differs from what its equation gives
/// when every other variable keeps its value in that world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationRecord {
    pub world: World,
    pub variable: VariableId,
    pub expected: Value,
    pub actual: Value,
}

pub fn deviating_variables(
    m: &CausalModel,
    ctx: &Context,
    world: &World,
) -> Result<Vec<DeviationRecord>> {
    m.check_context(ctx)?;
    m.check_world(world)?;
    Ok((0..m.num_endogenous())
        .filter_map(|i| {
            let expected = m.equation_value(i, ctx, world);
            let actual = world.values()[i];
            (expected != actual).then(|| DeviationRecord {
                world: world.clone(),
                variable: m.var_name(i).clone(),
                expected,
                actual,
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RespectReport {
    pub respects: bool,
    /// A world that deviates on one of the variables yet is at least as
    /// normal as the actual world.
    pub violation: Option<World>,
}

/// Whether every world in which some variable of `vars` deviates from its
/// equation fails to be at least as normal as the actual world.
pub fn respects_equations(
    m: &ExtendedCausalModel,
    ctx: &Context,
    vars: &[VariableId],
) -> Result<RespectReport> {
    let base = m.base();
    let idx = indices(base, vars)?;
    let actual = base.solve(ctx)?;
    for s in base.worlds() {
        let deviates = idx
            .iter()
            .any(|&i| base.equation_value(i, ctx, &s) != s.values()[i]);
        if deviates && m.at_least_as_normal(&s, &actual) {
            return Ok(RespectReport {
                respects: false,
                violation: Some(s),
            });
        }
    }
    Ok(RespectReport {
        respects: true,
        violation: None,
    })
}

/// Rank 0 for worlds where none of `vars` deviates in `ctx`, rank 1 for the
/// rest.
pub fn normality_from_respect(
    m: &CausalModel,
    ctx: &Context,
    vars: &[VariableId],
) -> Result<NormalityOrder> {
    m.check_context(ctx)?;
    indices(m, vars)?;
    Ok(NormalityOrder::Ranked(Ranking::RespectEquations {
        context: ctx.clone(),
        vars: vars.to_vec(),
    }))
}

fn indices(m: &CausalModel, vars: &[VariableId]) -> Result<Vec<usize>> {
    vars.iter()
        .map(|v| {
            m.endo_index(v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))
        })
        .collect()
}
