//! Adding variables that invalidate witnesses under the original rule.
//!
//! For a witness `(W, w, x')` to `X = x` causing `Y = y` in context `u`,
//! [`kill_witness`] adds a binary variable `NW` with `NW = (X = x & W = w)`
//! and overrides `Y`'s equation in two situations only:
//!
//! - `X = x`, `W = w`, `Z' = z[x, w]`, `NW = 0`: `Y` takes some `y' != y`;
//! - `X = x'`, `W = w`, `Z' = z[x', w]`, `NW = 1`: `Y = y`.
//!
//! Here `Z'` is the remaining variables other than `Y`, and `z[x'', w]` are
//! their values in context `u` after `X <- x'', W <- w`. Neither situation
//! can arise while `NW` follows its equation, so the result is a
//! conservative extension.

use crate::causality::{
    check_ac2a, check_ac2b, is_actual_cause, is_actual_cause_with, CandidateCause, RuleVariant,
    SearchConfig, Witness,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::formula::CausalFormula;
use crate::model::{CausalModel, Context, Range, Signature, Value, VarDecl, VariableId};

/// Upper bound on kill rounds before giving up.
const MAX_ROUNDS: usize = 64;

pub fn kill_witness(
    m: &CausalModel,
    ctx: &Context,
    cause: &CandidateCause,
    effect: (&VariableId, Value),
    w: &Witness,
    fresh: &VariableId,
) -> Result<CausalModel> {
    let [(x_var, x)] = cause.conjuncts() else {
        return Err(Error::PreconditionViolated(
            "witness killing needs a single-conjunct cause".into(),
        ));
    };
    let (y_var, y) = effect;
    let xi = m
        .endo_index(x_var)
        .ok_or_else(|| Error::UnknownVariable(x_var.to_string()))?;
    let yi = m
        .endo_index(y_var)
        .ok_or_else(|| Error::UnknownVariable(y_var.to_string()))?;
    if m.endo_index(fresh).is_some() || m.exo_index(fresh).is_some() {
        return Err(Error::DuplicateDefinition(fresh.to_string()));
    }
    let phi = CausalFormula::Event(y_var.clone(), y);
    let valid = check_ac2a(m, ctx, cause, &phi, w, RuleVariant::Original)?
        && check_ac2b(m, ctx, cause, &phi, w, RuleVariant::Original)?;
    if !valid {
        return Err(Error::NotAWitness(w.to_string()));
    }
    let actual = m.solve(ctx)?;
    let w_idx: Vec<usize> = w
        .contingency_vars
        .iter()
        .map(|v| m.endo_index(v).expect("checked by the witness test"))
        .collect();
    if w_idx
        .iter()
        .zip(&w.contingency_values)
        .all(|(&i, &v)| actual.values()[i] == v)
    {
        return Err(Error::WitnessEqualsActual);
    }
    let x_alt = w.alt_cause_values[0];

    let desc = descendants(m, yi);
    if let Some(&i) = w_idx.iter().chain([&xi]).find(|i| desc[**i]) {
        return Err(Error::PreconditionViolated(format!(
            "`{}` depends on the effect `{y_var}`",
            m.var_name(i)
        )));
    }
    let y_range = &m.endogenous()[yi].range;
    let y_other = *y_range.values().iter().find(|&&v| v != y).ok_or_else(|| {
        Error::PreconditionViolated(format!("`{y_var}` has no value other than {y}"))
    })?;

    // Z' leaves out descendants of Y: Y's new equation reads Z', so a
    // descendant there would close a cycle.
    let z: Vec<usize> = (0..m.num_endogenous())
        .filter(|&i| i != xi && i != yi && !w_idx.contains(&i) && !desc[i])
        .collect();
    let solve_at = |xv: Value| -> Result<Vec<Value>> {
        let mut over = vec![None; m.num_endogenous()];
        over[xi] = Some(xv);
        for (&i, &v) in w_idx.iter().zip(&w.contingency_values) {
            over[i] = Some(v);
        }
        let s = m.solve_dense(ctx, &over)?;
        Ok(z.iter().map(|&i| s.values()[i]).collect())
    };
    let z_x = solve_at(*x)?;
    let z_alt = solve_at(x_alt)?;

    let w_cond = || {
        w_idx
            .iter()
            .zip(&w.contingency_values)
            .map(|(&i, &v)| Expr::is(m.var_name(i), v))
    };
    let z_cond = |vals: &[Value]| {
        z.iter()
            .zip(vals)
            .map(|(&i, &v)| Expr::is(m.var_name(i), v))
            .collect::<Vec<_>>()
    };
    let nw_eq = Expr::all(std::iter::once(Expr::is(x_var, *x)).chain(w_cond()));
    let kill = Expr::all(
        std::iter::once(Expr::is(x_var, *x))
            .chain(w_cond())
            .chain(z_cond(&z_x))
            .chain([Expr::is(fresh, 0)]),
    );
    let block = Expr::all(
        std::iter::once(Expr::is(x_var, x_alt))
            .chain(w_cond())
            .chain(z_cond(&z_alt))
            .chain([Expr::is(fresh, 1)]),
    );

    let mut endo = m.endogenous().to_vec();
    endo.push(VarDecl {
        name: fresh.clone(),
        range: Range::binary(),
    });
    let signature = Signature::new(m.exogenous().to_vec(), endo)?;
    let mut equations: Vec<(VariableId, Expr)> = m
        .equations()
        .map(|(v, e)| {
            let e = if v == y_var {
                Expr::case(
                    vec![
                        (kill.clone(), Expr::Const(y_other)),
                        (block.clone(), Expr::Const(y)),
                    ],
                    e.clone(),
                )
            } else {
                e.clone()
            };
            (v.clone(), e)
        })
        .collect();
    equations.push((fresh.clone(), nw_eq));
    let mut out = CausalModel::new(m.name(), signature, equations)?;
    for note in m.notes() {
        out.add_note(note.clone());
    }
    out.add_note(format!(
        "{fresh} kills witness {w} for {cause} causing {y_var}={y} in context {}",
        m.describe_context(ctx)
    ));
    Ok(out)
}

/// `desc[i]` is true when variable `i` is `root` or reads it, directly or
/// through other variables.
fn descendants(m: &CausalModel, root: usize) -> Vec<bool> {
    let mut desc = vec![false; m.num_endogenous()];
    desc[root] = true;
    for v in m.order() {
        let i = m.endo_index(v).unwrap();
        let reads = m.equation(v).unwrap().variables();
        if reads
            .iter()
            .any(|r| m.endo_index(r).is_some_and(|j| desc[j]))
        {
            desc[i] = true;
        }
    }
    desc
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillOutcome {
    pub model: CausalModel,
    /// Witnesses killed, in order.
    pub killed: Vec<Witness>,
}

/// Repeatedly kills the first remaining witness under the original rule
/// until `cause` is no longer a cause of `effect`.
pub fn kill_all_witnesses(
    m: &CausalModel,
    ctx: &Context,
    cause: &CandidateCause,
    effect: (&VariableId, Value),
) -> Result<KillOutcome> {
    let phi = CausalFormula::Event(effect.0.clone(), effect.1);
    if is_actual_cause(m, ctx, cause, &phi, RuleVariant::Updated)?.is_cause {
        return Err(Error::PreconditionViolated(format!(
            "{cause} is a cause of {phi} under the updated rule"
        )));
    }
    let first_only = SearchConfig {
        collect_all: false,
        ..SearchConfig::default()
    };
    let mut current = m.clone();
    let mut killed = Vec::new();
    let mut counter = 1;
    loop {
        let verdict = is_actual_cause_with(
            &current,
            ctx,
            cause,
            &phi,
            RuleVariant::Original,
            &first_only,
        )?;
        if !verdict.is_cause {
            if killed.is_empty() {
                return Err(Error::PreconditionViolated(format!(
                    "{cause} is not a cause of {phi} under the original rule"
                )));
            }
            return Ok(KillOutcome {
                model: current,
                killed,
            });
        }
        if killed.len() >= MAX_ROUNDS {
            return Err(Error::PreconditionViolated(format!(
                "witnesses remain after {MAX_ROUNDS} rounds"
            )));
        }
        let fresh = loop {
            let name = VariableId::new(&format!("NW{counter}"))?;
            counter += 1;
            if current.endo_index(&name).is_none() && current.exo_index(&name).is_none() {
                break name;
            }
        };
        let w = verdict.witnesses[0].clone();
        current = kill_witness(&current, ctx, cause, effect, &w, &fresh)?;
        killed.push(w);
    }
}
