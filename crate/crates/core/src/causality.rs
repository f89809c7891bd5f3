//! Actual causality: AC1, AC2 under three rule variants, and AC3.
//!
//! A candidate cause `X = x` is checked against an intervention-free formula
//! `phi` in a context. AC2 is decided by searching witnesses `(W, w, x')` in
//! a fixed canonical order: `|W|` ascending, then variable subsets
//! lexicographically by declaration order, then `w` and `x'` as odometers
//! over the variables' ranges.
//!
//! - [`RuleVariant::Updated`]: for every `W' ⊆ W` and `Z' ⊆ Z`,
//!   `[X <- x, W' <- w, Z' <- z*] phi`.
//! - [`RuleVariant::Original`]: the same with `W' = W` only.
//! - [`RuleVariant::Extended`]: the updated clause, plus the witness world
//!   `s[X=x', W=w]` must be at least as normal as the actual world.

use std::fmt;

use serde::Serialize;

use crate::enumerate::{subsets, Combinations, Odometer};
use crate::error::{Error, Result};
use crate::formula::{CausalFormula, Phi};
use crate::model::{CausalModel, Context, Intervention, Value, VariableId, World};
use crate::normality::ExtendedCausalModel;

/// Cause indices, actual cause values, and a dense override per variable.
type Overrides = (Vec<usize>, Vec<Value>, Vec<Option<Value>>);

/// A conjunction of events `X1 = x1 & ... & Xk = xk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateCause(Vec<(VariableId, Value)>);

impl CandidateCause {
    pub fn new(conjuncts: impl IntoIterator<Item = (VariableId, Value)>) -> Result<Self> {
        let conjuncts: Vec<_> = conjuncts.into_iter().collect();
        if conjuncts.is_empty() {
            return Err(Error::InvalidModel("empty candidate cause".into()));
        }
        for (i, (v, _)) in conjuncts.iter().enumerate() {
            if conjuncts[..i].iter().any(|(u, _)| u == v) {
                return Err(Error::DuplicateDefinition(v.to_string()));
            }
        }
        Ok(CandidateCause(conjuncts))
    }

    /// Panics on an invalid name.
    pub fn single(name: &str, value: Value) -> Self {
        CandidateCause(vec![(
            VariableId::new(name).expect("invalid variable name"),
            value,
        )])
    }

    pub fn conjuncts(&self) -> &[(VariableId, Value)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_formula(&self) -> CausalFormula {
        CausalFormula::conjunction(self.0.iter().cloned())
    }

    /// Conjunct indices and values, sorted by declaration order.
    fn resolve(&self, model: &CausalModel) -> Result<Vec<(usize, Value)>> {
        let mut out = Vec::with_capacity(self.0.len());
        for (v, x) in &self.0 {
            let i = model
                .endo_index(v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            if !model.endogenous()[i].range.contains(*x) {
                return Err(Error::ValueOutOfRange {
                    variable: v.to_string(),
                    value: *x,
                });
            }
            out.push((i, *x));
        }
        out.sort();
        Ok(out)
    }

    fn from_indices(model: &CausalModel, items: &[(usize, Value)]) -> Self {
        CandidateCause(
            items
                .iter()
                .map(|&(i, x)| (model.var_name(i).clone(), x))
                .collect(),
        )
    }
}

impl fmt::Display for CandidateCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, x)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{v}={x}")?;
        }
        Ok(())
    }
}

/// A witness `(W, w, x')`. `alt_cause_values` follows the declaration order
/// of the cause's variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    pub contingency_vars: Vec<VariableId>,
    pub contingency_values: Vec<Value>,
    pub alt_cause_values: Vec<Value>,
}

impl Witness {
    pub fn new(
        contingency: impl IntoIterator<Item = (VariableId, Value)>,
        alt_cause_values: Vec<Value>,
    ) -> Self {
        let (contingency_vars, contingency_values) = contingency.into_iter().unzip();
        Witness {
            contingency_vars,
            contingency_values,
            alt_cause_values,
        }
    }

    /// The contingency `W <- w` as an intervention.
    pub fn contingency(&self) -> Intervention {
        self.contingency_vars
            .iter()
            .cloned()
            .zip(self.contingency_values.iter().copied())
            .collect()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(", ");
        let vars = join(
            self.contingency_vars
                .iter()
                .map(|v| v.to_string())
                .collect(),
        );
        let vals = join(
            self.contingency_values
                .iter()
                .map(|v| v.to_string())
                .collect(),
        );
        let alt = join(
            self.alt_cause_values
                .iter()
                .map(|v| v.to_string())
                .collect(),
        );
        if self.alt_cause_values.len() == 1 {
            write!(f, "({{{vars}}}, ({vals}), {alt})")
        } else {
            write!(f, "({{{vars}}}, ({vals}), ({alt}))")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleVariant {
    Updated,
    Original,
    Extended,
}

impl RuleVariant {
    pub fn name(self) -> &'static str {
        match self {
            RuleVariant::Updated => "updated",
            RuleVariant::Original => "original",
            RuleVariant::Extended => "extended",
        }
    }
}

impl std::str::FromStr for RuleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "updated" => Ok(RuleVariant::Updated),
            "original" => Ok(RuleVariant::Original),
            "extended" => Ok(RuleVariant::Extended),
            _ => Err(Error::InvalidModel(format!("unknown rule variant `{s}`"))),
        }
    }
}

impl fmt::Display for RuleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Ac1,
    Ac2a,
    Ac2aPlus,
    Ac2b,
    Ac2bPrime,
    Ac3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Ac1 => "AC1",
            Condition::Ac2a => "AC2(a)",
            Condition::Ac2aPlus => "AC2(a+)",
            Condition::Ac2b => "AC2(b)",
            Condition::Ac2bPrime => "AC2(b')",
            Condition::Ac3 => "AC3",
        })
    }
}

/// Why a candidate is not a cause. `subset` is set for AC3 failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub condition: Condition,
    pub subset: Option<CandidateCause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub is_cause: bool,
    /// Witnesses for the full candidate. Empty when AC1 or AC2 fails; an
    /// AC3 failure keeps the witnesses that were found.
    pub witnesses: Vec<Witness>,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of model solves per query.
    pub budget: u64,
    /// Keep searching after the first witness.
    pub collect_all: bool,
    /// Largest conjunct count `find_all_causes` tries.
    pub max_cause_size: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 10_000_000,
            collect_all: true,
            max_cause_size: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ModelRef<'a> {
    Bare(&'a CausalModel),
    Extended(&'a ExtendedCausalModel),
}

impl<'a> From<&'a CausalModel> for ModelRef<'a> {
    fn from(m: &'a CausalModel) -> Self {
        ModelRef::Bare(m)
    }
}

impl<'a> From<&'a ExtendedCausalModel> for ModelRef<'a> {
    fn from(m: &'a ExtendedCausalModel) -> Self {
        ModelRef::Extended(m)
    }
}

impl<'a> ModelRef<'a> {
    pub fn base(self) -> &'a CausalModel {
        match self {
            ModelRef::Bare(m) => m,
            ModelRef::Extended(e) => e.base(),
        }
    }

    fn for_variant(
        self,
        variant: RuleVariant,
    ) -> Result<(&'a CausalModel, Option<&'a ExtendedCausalModel>)> {
        match (self, variant) {
            (ModelRef::Bare(_), RuleVariant::Extended) => Err(Error::MissingNormalityOrder),
            (ModelRef::Extended(e), RuleVariant::Extended) => Ok((e.base(), Some(e))),
            (m, _) => Ok((m.base(), None)),
        }
    }
}

struct Found {
    w_vars: Vec<usize>,
    w_vals: Vec<Value>,
    x_alt: Vec<Value>,
    world: World,
}

#[derive(Default)]
struct Ac2Outcome {
    found: Vec<Found>,
    /// Some setting satisfied AC2(a).
    saw_a: bool,
    /// Some setting satisfied AC2(a) and AC2(b), ignoring normality.
    saw_ab: bool,
}

/// Shared state for one query: the model, context, compiled formula, the
/// actual world, and the solve budget.
struct Engine<'a> {
    model: &'a CausalModel,
    ext: Option<&'a ExtendedCausalModel>,
    ctx: &'a Context,
    phi: Phi,
    actual: World,
    budget: u64,
    solves: u64,
}

impl<'a> Engine<'a> {
    fn new(
        model: &'a CausalModel,
        ext: Option<&'a ExtendedCausalModel>,
        ctx: &'a Context,
        phi: &CausalFormula,
        budget: u64,
    ) -> Result<Self> {
        model.check_context(ctx)?;
        if phi.has_interventions() {
            return Err(Error::MalformedPhi(phi.to_string()));
        }
        let phi = phi.compile(model)?;
        let actual = model.solve(ctx)?;
        Ok(Engine {
            model,
            ext,
            ctx,
            phi,
            actual,
            budget,
            solves: 1,
        })
    }

    fn solve(&mut self, over: &[Option<Value>]) -> Result<World> {
        self.solves += 1;
        if self.solves > self.budget {
            return Err(Error::SearchBudgetExceeded(self.budget));
        }
        self.model.solve_dense(self.ctx, over)
    }

    fn ac1(&self, cause: &[(usize, Value)]) -> bool {
        cause.iter().all(|&(i, x)| self.actual.values()[i] == x)
            && self.phi.eval(self.actual.values())
    }

    /// First intervention `X <- x, W' <- w, Z' <- z*` under which `phi`
    /// fails, as dense overrides.
    fn ac2b_counterexample(
        &mut self,
        cause: &[(usize, Value)],
        w_vars: &[usize],
        w_vals: &[Value],
        variant: RuleVariant,
    ) -> Result<Option<Vec<Option<Value>>>> {
        let n = self.model.num_endogenous();
        let z_free: Vec<usize> = (0..n)
            .filter(|i| !cause.iter().any(|c| c.0 == *i) && !w_vars.contains(i))
            .collect();
        let w_subsets: Vec<Vec<usize>> = match variant {
            RuleVariant::Original => vec![(0..w_vars.len()).collect()],
            _ => subsets(w_vars.len()).collect(),
        };
        let mut over = vec![None; n];
        for w_sub in &w_subsets {
            for z_sub in subsets(z_free.len()) {
                over.iter_mut().for_each(|o| *o = None);
                for &(i, x) in cause {
                    over[i] = Some(x);
                }
                for &j in w_sub {
                    over[w_vars[j]] = Some(w_vals[j]);
                }
                for &j in &z_sub {
                    let z = z_free[j];
                    over[z] = Some(self.actual.values()[z]);
                }
                let s = self.solve(&over)?;
                if !self.phi.eval(s.values()) {
                    return Ok(Some(over));
                }
            }
        }
        Ok(None)
    }

    fn ac2(
        &mut self,
        cause: &[(usize, Value)],
        variant: RuleVariant,
        collect_all: bool,
    ) -> Result<Ac2Outcome> {
        let model = self.model;
        let n = model.num_endogenous();
        let others: Vec<usize> = (0..n)
            .filter(|i| !cause.iter().any(|c| c.0 == *i))
            .collect();
        let x_actual: Vec<Value> = cause.iter().map(|c| c.1).collect();
        let x_ranges: Vec<&[Value]> = cause
            .iter()
            .map(|c| model.endogenous()[c.0].range.values())
            .collect();
        let mut out = Ac2Outcome::default();
        let mut over = vec![None; n];
        for k in 0..=others.len() {
            for combo in Combinations::new(others.len(), k) {
                let w_vars: Vec<usize> = combo.iter().map(|&j| others[j]).collect();
                let w_ranges: Vec<&[Value]> = w_vars
                    .iter()
                    .map(|&i| model.endogenous()[i].range.values())
                    .collect();
                for w_vals in Odometer::new(w_ranges) {
                    let mut b_holds: Option<bool> = None;
                    for x_alt in Odometer::new(x_ranges.clone()) {
                        if x_alt == x_actual {
                            continue;
                        }
                        over.iter_mut().for_each(|o| *o = None);
                        for (c, &x) in cause.iter().zip(&x_alt) {
                            over[c.0] = Some(x);
                        }
                        for (&i, &w) in w_vars.iter().zip(&w_vals) {
                            over[i] = Some(w);
                        }
                        let s = self.solve(&over)?;
                        if self.phi.eval(s.values()) {
                            continue;
                        }
                        out.saw_a = true;
                        let b = match b_holds {
                            Some(b) => b,
                            None => {
                                let b = self
                                    .ac2b_counterexample(cause, &w_vars, &w_vals, variant)?
                                    .is_none();
                                b_holds = Some(b);
                                b
                            }
                        };
                        if !b {
                            continue;
                        }
                        out.saw_ab = true;
                        if let Some(ext) = self.ext {
                            if !ext.at_least_as_normal(&s, &self.actual) {
                                continue;
                            }
                        }
                        out.found.push(Found {
                            w_vars: w_vars.clone(),
                            w_vals: w_vals.clone(),
                            x_alt,
                            world: s,
                        });
                        if !collect_all {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn witness(&self, f: &Found) -> Witness {
        Witness::new(
            f.w_vars
                .iter()
                .map(|&i| self.model.var_name(i).clone())
                .zip(f.w_vals.iter().copied()),
            f.x_alt.clone(),
        )
    }

    fn verdict(
        &mut self,
        cause: &[(usize, Value)],
        variant: RuleVariant,
        collect_all: bool,
    ) -> Result<(Verdict, Vec<Found>)> {
        if !self.ac1(cause) {
            return Ok((not_cause(Condition::Ac1, None, Vec::new()), Vec::new()));
        }
        let outcome = self.ac2(cause, variant, collect_all)?;
        if outcome.found.is_empty() {
            let condition = if !outcome.saw_a {
                Condition::Ac2a
            } else if !outcome.saw_ab {
                match variant {
                    RuleVariant::Original => Condition::Ac2bPrime,
                    _ => Condition::Ac2b,
                }
            } else {
                Condition::Ac2aPlus
            };
            return Ok((not_cause(condition, None, Vec::new()), Vec::new()));
        }
        let witnesses: Vec<Witness> = outcome.found.iter().map(|f| self.witness(f)).collect();
        for k in 1..cause.len() {
            for combo in Combinations::new(cause.len(), k) {
                let sub: Vec<(usize, Value)> = combo.iter().map(|&j| cause[j]).collect();
                if !self.ac2(&sub, variant, false)?.found.is_empty() {
                    let subset = CandidateCause::from_indices(self.model, &sub);
                    return Ok((
                        not_cause(Condition::Ac3, Some(subset), witnesses),
                        outcome.found,
                    ));
                }
            }
        }
        Ok((
            Verdict {
                is_cause: true,
                witnesses,
                failure: None,
            },
            outcome.found,
        ))
    }

    /// Dense overrides for `X <- x', W <- w` from a public witness.
    fn witness_overrides(&self, cause: &[(usize, Value)], w: &Witness) -> Result<Overrides> {
        let model = self.model;
        if w.alt_cause_values.len() != cause.len()
            || w.contingency_vars.len() != w.contingency_values.len()
        {
            return Err(Error::InvalidModel(format!(
                "witness {w} does not match the cause's arity"
            )));
        }
        let mut over = vec![None; model.num_endogenous()];
        for (&(i, _), &x) in cause.iter().zip(&w.alt_cause_values) {
            if !model.endogenous()[i].range.contains(x) {
                return Err(Error::ValueOutOfRange {
                    variable: model.var_name(i).to_string(),
                    value: x,
                });
            }
            over[i] = Some(x);
        }
        let mut w_vars = Vec::new();
        for (v, &val) in w.contingency_vars.iter().zip(&w.contingency_values) {
            let i = model
                .endo_index(v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            if cause.iter().any(|c| c.0 == i) || w_vars.contains(&i) {
                return Err(Error::InvalidModel(format!(
                    "witness variable `{v}` overlaps the cause or repeats"
                )));
            }
            if !model.endogenous()[i].range.contains(val) {
                return Err(Error::ValueOutOfRange {
                    variable: v.to_string(),
                    value: val,
                });
            }
            over[i] = Some(val);
            w_vars.push(i);
        }
        Ok((w_vars, w.contingency_values.clone(), over))
    }
}

fn not_cause(
    condition: Condition,
    subset: Option<CandidateCause>,
    witnesses: Vec<Witness>,
) -> Verdict {
    Verdict {
        is_cause: false,
        witnesses,
        failure: Some(Failure { condition, subset }),
    }
}

/// AC1: the cause and `phi` both hold in the actual world.
pub fn check_ac1(
    model: &CausalModel,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
) -> Result<bool> {
    let engine = Engine::new(model, None, ctx, phi, u64::MAX)?;
    Ok(engine.ac1(&cause.resolve(model)?))
}

/// The world `s[X=x', W=w]` a witness leads to.
pub fn witness_world<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    w: &Witness,
) -> Result<World> {
    let model = model.into().base();
    model.check_context(ctx)?;
    let phi = cause.to_formula();
    let engine = Engine::new(model, None, ctx, &phi, u64::MAX)?;
    let (_, _, over) = engine.witness_overrides(&cause.resolve(model)?, w)?;
    model.solve_dense(ctx, &over)
}

/// AC2(a) for a given witness; the extended variant also requires the
/// witness world to be at least as normal as the actual world.
pub fn check_ac2a<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    w: &Witness,
    variant: RuleVariant,
) -> Result<bool> {
    let (base, ext) = model.into().for_variant(variant)?;
    let mut engine = Engine::new(base, ext, ctx, phi, u64::MAX)?;
    let (_, _, over) = engine.witness_overrides(&cause.resolve(base)?, w)?;
    let s = engine.solve(&over)?;
    if engine.phi.eval(s.values()) {
        return Ok(false);
    }
    Ok(ext.is_none_or(|e| e.at_least_as_normal(&s, &engine.actual)))
}

/// AC2(b) (or AC2(b') under the original variant) for a given witness.
pub fn check_ac2b<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    w: &Witness,
    variant: RuleVariant,
) -> Result<bool> {
    Ok(ac2b_counterexample(model, ctx, cause, phi, w, variant)?.is_none())
}

/// The first intervention `[X <- x, W' <- w, Z' <- z*]` under which `phi`
/// fails, or `None` when the witness passes AC2(b) (AC2(b') under the
/// original variant). Subsets are tried by size, then lexicographically.
pub fn ac2b_counterexample<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    w: &Witness,
    variant: RuleVariant,
) -> Result<Option<Intervention>> {
    let base = model.into().base();
    let mut engine = Engine::new(base, None, ctx, phi, u64::MAX)?;
    let cause = cause.resolve(base)?;
    let (w_vars, w_vals, _) = engine.witness_overrides(&cause, w)?;
    let over = engine.ac2b_counterexample(&cause, &w_vars, &w_vals, variant)?;
    Ok(over.map(|over| {
        over.iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (base.var_name(i).clone(), v)))
            .collect()
    }))
}

pub fn is_actual_cause<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    variant: RuleVariant,
) -> Result<Verdict> {
    is_actual_cause_with(model, ctx, cause, phi, variant, &SearchConfig::default())
}

pub fn is_actual_cause_with<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    variant: RuleVariant,
    config: &SearchConfig,
) -> Result<Verdict> {
    let (base, ext) = model.into().for_variant(variant)?;
    let mut engine = Engine::new(base, ext, ctx, phi, config.budget)?;
    let cause = cause.resolve(base)?;
    Ok(engine.verdict(&cause, variant, config.collect_all)?.0)
}

/// Every actual cause of `phi` whose conjuncts take their actual values,
/// smallest first. Variables mentioned by `phi` are candidates too, so an
/// effect `Y = y` is always reported as a cause of itself.
pub fn find_all_causes<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    phi: &CausalFormula,
    variant: RuleVariant,
) -> Result<Vec<(CandidateCause, Verdict)>> {
    find_all_causes_with(model, ctx, phi, variant, &SearchConfig::default())
}

pub fn find_all_causes_with<'a>(
    model: impl Into<ModelRef<'a>>,
    ctx: &Context,
    phi: &CausalFormula,
    variant: RuleVariant,
    config: &SearchConfig,
) -> Result<Vec<(CandidateCause, Verdict)>> {
    let (base, ext) = model.into().for_variant(variant)?;
    let mut engine = Engine::new(base, ext, ctx, phi, config.budget)?;
    let mut out = Vec::new();
    if !engine.phi.eval(engine.actual.values()) {
        return Ok(out);
    }
    let n = base.num_endogenous();
    let max = config.max_cause_size.unwrap_or(n).min(n);
    // Sets of variables already known to satisfy AC1 and AC2.
    let mut good: Vec<Vec<usize>> = Vec::new();
    for k in 1..=max {
        for combo in Combinations::new(n, k) {
            if good.iter().any(|g| g.iter().all(|i| combo.contains(i))) {
                continue;
            }
            let cause: Vec<(usize, Value)> = combo
                .iter()
                .map(|&i| (i, engine.actual.values()[i]))
                .collect();
            let outcome = engine.ac2(&cause, variant, config.collect_all)?;
            if outcome.found.is_empty() {
                continue;
            }
            let witnesses = outcome.found.iter().map(|f| engine.witness(f)).collect();
            out.push((
                CandidateCause::from_indices(base, &cause),
                Verdict {
                    is_cause: true,
                    witnesses,
                    failure: None,
                },
            ));
            good.push(combo);
        }
    }
    Ok(out)
}

/// Witnesses under the updated definition whose witness worlds are maximal
/// in the normality order: no other witness world is strictly more normal.
pub fn best_witnesses(
    model: &ExtendedCausalModel,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
) -> Result<Vec<(Witness, World)>> {
    let base = model.base();
    let mut engine = Engine::new(base, None, ctx, phi, SearchConfig::default().budget)?;
    let resolved = cause.resolve(base)?;
    let (verdict, found) = engine.verdict(&resolved, RuleVariant::Updated, true)?;
    if let Some(failure) = verdict.failure {
        return Err(match failure.condition {
            Condition::Ac2a | Condition::Ac2b => Error::NoWitness,
            c => Error::NotACause(c),
        });
    }
    let best = found
        .iter()
        .filter(|f| {
            !found
                .iter()
                .any(|g| model.strictly_more_normal(&g.world, &f.world))
        })
        .map(|f| (engine.witness(f), f.world.clone()))
        .collect();
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::{Range, Signature, VarDecl};

    fn id(s: &str) -> VariableId {
        VariableId::new(s).unwrap()
    }

    /// D = (A & B) | C with A, B, C read off three exogenous variables.
    fn hopkins_pearl() -> CausalModel {
        let b = Range::binary;
        let sig = Signature::new(
            vec![
                VarDecl::new("UA", b()).unwrap(),
                VarDecl::new("UB", b()).unwrap(),
                VarDecl::new("UC", b()).unwrap(),
            ],
            vec![
                VarDecl::new("A", b()).unwrap(),
                VarDecl::new("B", b()).unwrap(),
                VarDecl::new("C", b()).unwrap(),
                VarDecl::new("D", b()).unwrap(),
            ],
        )
        .unwrap();
        CausalModel::new(
            "hp",
            sig,
            vec![
                (id("A"), Expr::var("UA")),
                (id("B"), Expr::var("UB")),
                (id("C"), Expr::var("UC")),
                (
                    id("D"),
                    Expr::var("A").and(Expr::var("B")).or(Expr::var("C")),
                ),
            ],
        )
        .unwrap()
    }

    fn hp_ctx(m: &CausalModel) -> Context {
        m.context(&[("UA", 1), ("UB", 0), ("UC", 1)]).unwrap()
    }

    #[test]
    fn original_and_updated_disagree_on_hopkins_pearl() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let a = CandidateCause::single("A", 1);
        let d = CausalFormula::eq("D", 1);
        let orig = is_actual_cause(&m, &u, &a, &d, RuleVariant::Original).unwrap();
        assert!(orig.is_cause);
        let upd = is_actual_cause(&m, &u, &a, &d, RuleVariant::Updated).unwrap();
        assert!(!upd.is_cause);
        assert_eq!(upd.failure.unwrap().condition, Condition::Ac2b);
    }

    #[test]
    fn witness_detail_and_counterexample() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let a = CandidateCause::single("A", 1);
        let d = CausalFormula::eq("D", 1);
        let w = Witness::new([(id("B"), 1), (id("C"), 0)], vec![0]);
        assert_eq!(w.to_string(), "({B, C}, (1, 0), 0)");
        assert!(check_ac2a(&m, &u, &a, &d, &w, RuleVariant::Original).unwrap());
        assert!(check_ac2b(&m, &u, &a, &d, &w, RuleVariant::Original).unwrap());
        let cx = ac2b_counterexample(&m, &u, &a, &d, &w, RuleVariant::Updated)
            .unwrap()
            .unwrap();
        assert_eq!(cx.to_string(), "A<-1, C<-0");
    }

    #[test]
    fn ac1_failures() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let d = CausalFormula::eq("D", 1);
        assert!(!check_ac1(&m, &u, &CandidateCause::single("B", 1), &d).unwrap());
        let v = is_actual_cause(
            &m,
            &u,
            &CandidateCause::single("B", 1),
            &d,
            RuleVariant::Updated,
        )
        .unwrap();
        assert_eq!(v.failure.unwrap().condition, Condition::Ac1);
    }

    #[test]
    fn conjunction_with_redundant_part_fails_ac3() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let cause = CandidateCause::new([(id("B"), 0), (id("C"), 1)]).unwrap();
        let v = is_actual_cause(
            &m,
            &u,
            &cause,
            &CausalFormula::eq("D", 1),
            RuleVariant::Updated,
        )
        .unwrap();
        let failure = v.failure.unwrap();
        assert_eq!(failure.condition, Condition::Ac3);
        assert_eq!(failure.subset.unwrap().to_string(), "C=1");
        assert!(!v.witnesses.is_empty());
    }

    #[test]
    fn interventions_in_phi_are_rejected() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let phi = CausalFormula::held(Intervention::new(), CausalFormula::eq("D", 1)).unwrap();
        assert!(matches!(
            check_ac1(&m, &u, &CandidateCause::single("A", 1), &phi),
            Err(Error::MalformedPhi(_))
        ));
    }

    #[test]
    fn extended_needs_an_order() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        assert_eq!(
            is_actual_cause(
                &m,
                &u,
                &CandidateCause::single("C", 1),
                &CausalFormula::eq("D", 1),
                RuleVariant::Extended
            ),
            Err(Error::MissingNormalityOrder)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let config = SearchConfig {
            budget: 3,
            ..SearchConfig::default()
        };
        assert_eq!(
            is_actual_cause_with(
                &m,
                &u,
                &CandidateCause::single("A", 1),
                &CausalFormula::eq("D", 1),
                RuleVariant::Updated,
                &config
            ),
            Err(Error::SearchBudgetExceeded(3))
        );
    }

    #[test]
    fn all_causes_include_the_effect_itself() {
        let m = hopkins_pearl();
        let u = hp_ctx(&m);
        let causes =
            find_all_causes(&m, &u, &CausalFormula::eq("D", 1), RuleVariant::Updated).unwrap();
        let names: Vec<String> = causes.iter().map(|(c, _)| c.to_string()).collect();
        assert_eq!(names, ["C=1", "D=1"]);
    }
}
