//! Conservative extensions.
//!
//! `M'` conservatively extends `M` when they share exogenous variables,
//! every endogenous variable of `M` is in `M'` with the same range, and for
//! every context, every `X` in `V(M)`, and every setting of the rest of
//! `V(M)`, both models give `X` the same value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumerate::{subsets, Odometer};
use crate::error::{Error, Result};
use crate::formula::{eval_formula, CausalFormula};
use crate::model::{CausalModel, Context, Intervention, Value, VariableId};
use crate::normality::ExtendedCausalModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// Under `setting` (all of `V(M)` except `variable`), the two models
    /// give `variable` different values.
    Equation {
        context: Context,
        variable: VariableId,
        setting: Intervention,
        value_in_m: Value,
        value_in_m_prime: Value,
    },
    /// The worlds reached by `setting` compare differently against the
    /// actual world in the two orders.
    Normality {
        context: Context,
        setting: Intervention,
        normal_in_m: bool,
        normal_in_m_prime: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub is_conservative: bool,
    pub counterexample: Option<Counterexample>,
}

impl ExtensionReport {
    fn from(counterexample: Option<Counterexample>) -> Self {
        ExtensionReport {
            is_conservative: counterexample.is_none(),
            counterexample,
        }
    }
}

/// Index in `m_prime` of each endogenous variable of `m`.
fn embed(m_prime: &CausalModel, m: &CausalModel) -> Result<Vec<usize>> {
    let exo = m.exogenous();
    let exo_p = m_prime.exogenous();
    if exo != exo_p {
        return Err(Error::SignatureMismatch(
            "exogenous variables differ".into(),
        ));
    }
    m.endogenous()
        .iter()
        .map(|d| {
            let j = m_prime.endo_index(&d.name).ok_or_else(|| {
                Error::SignatureMismatch(format!("`{}` is missing from the extension", d.name))
            })?;
            if m_prime.endogenous()[j].range != d.range {
                return Err(Error::SignatureMismatch(format!(
                    "`{}` has a different range in the extension",
                    d.name
                )));
            }
            Ok(j)
        })
        .collect()
}

/// Exhaustive check; the counterexample is the first one in the order
/// context, then variable (declaration order of `m`), then setting.
pub fn is_conservative_extension(
    m_prime: &CausalModel,
    m: &CausalModel,
) -> Result<ExtensionReport> {
    let map = embed(m_prime, m)?;
    let n = m.num_endogenous();
    let mut over = vec![None; m.num_endogenous()];
    let mut over_p = vec![None; m_prime.num_endogenous()];
    for ctx in m.contexts() {
        for x in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&i| i != x).collect();
            let ranges = rest
                .iter()
                .map(|&i| m.endogenous()[i].range.values())
                .collect();
            for setting in Odometer::new(ranges) {
                over.iter_mut().for_each(|o| *o = None);
                over_p.iter_mut().for_each(|o| *o = None);
                for (&i, &v) in rest.iter().zip(&setting) {
                    over[i] = Some(v);
                    over_p[map[i]] = Some(v);
                }
                let a = m.solve_dense(&ctx, &over)?.values()[x];
                let b = m_prime.solve_dense(&ctx, &over_p)?.values()[map[x]];
                if a != b {
                    let setting = rest
                        .iter()
                        .map(|&i| m.var_name(i).clone())
                        .zip(setting)
                        .collect();
                    return Ok(ExtensionReport::from(Some(Counterexample::Equation {
                        context: ctx,
                        variable: m.var_name(x).clone(),
                        setting,
                        value_in_m: a,
                        value_in_m_prime: b,
                    })));
                }
            }
        }
    }
    Ok(ExtensionReport::from(None))
}

/// Conservative extension of extended models: the bases must be
/// conservative, and for every context and every setting `W <- w` of
/// variables of `m`, the reached world is at least as normal as the actual
/// world in `m` exactly when the same holds in `m_prime`.
pub fn is_conservative_extension_extended(
    m_prime: &ExtendedCausalModel,
    m: &ExtendedCausalModel,
) -> Result<ExtensionReport> {
    let base = is_conservative_extension(m_prime.base(), m.base())?;
    if !base.is_conservative {
        return Ok(base);
    }
    let (bm, bp) = (m.base(), m_prime.base());
    let map = embed(bp, bm)?;
    let n = bm.num_endogenous();
    let mut over = vec![None; n];
    let mut over_p = vec![None; bp.num_endogenous()];
    for ctx in bm.contexts() {
        let actual = bm.solve(&ctx)?;
        let actual_p = bp.solve(&ctx)?;
        for w_vars in subsets(n) {
            let ranges = w_vars
                .iter()
                .map(|&i| bm.endogenous()[i].range.values())
                .collect();
            for w in Odometer::new(ranges) {
                over.iter_mut().for_each(|o| *o = None);
                over_p.iter_mut().for_each(|o| *o = None);
                for (&i, &v) in w_vars.iter().zip(&w) {
                    over[i] = Some(v);
                    over_p[map[i]] = Some(v);
                }
                let s = bm.solve_dense(&ctx, &over)?;
                let s_p = bp.solve_dense(&ctx, &over_p)?;
                let a = m.at_least_as_normal(&s, &actual);
                let b = m_prime.at_least_as_normal(&s_p, &actual_p);
                if a != b {
                    let setting = w_vars
                        .iter()
                        .map(|&i| bm.var_name(i).clone())
                        .zip(w)
                        .collect();
                    return Ok(ExtensionReport::from(Some(Counterexample::Normality {
                        context: ctx,
                        setting,
                        normal_in_m: a,
                        normal_in_m_prime: b,
                    })));
                }
            }
        }
    }
    Ok(ExtensionReport::from(None))
}

/// A formula on which two models disagree in some context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub formula: CausalFormula,
    pub context: Context,
    pub value_in_m: bool,
    pub value_in_m_prime: bool,
}

/// Evaluates `samples` random formulas over the variables of `m` in every
/// context of both models and returns the first disagreement.
pub fn check_formula_agreement(
    m_prime: &CausalModel,
    m: &CausalModel,
    samples: usize,
    seed: u64,
) -> Result<Option<Disagreement>> {
    embed(m_prime, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = random_formula(m, &mut rng, 3);
        for ctx in m.contexts() {
            let a = eval_formula(m, &ctx, &f)?;
            let b = eval_formula(m_prime, &ctx, &f)?;
            if a != b {
                return Ok(Some(Disagreement {
                    formula: f,
                    context: ctx,
                    value_in_m: a,
                    value_in_m_prime: b,
                }));
            }
        }
    }
    Ok(None)
}

/// A random causal formula over the endogenous variables of `m`: a boolean
/// combination of primitive events and intervention prefixes, nested at
/// most `depth` connectives deep.
pub fn random_formula(m: &CausalModel, rng: &mut impl Rng, depth: u32) -> CausalFormula {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            let iv = random_intervention(m, rng);
            CausalFormula::Held(iv, Box::new(random_primitive(m, rng, depth.min(2))))
        } else {
            random_event(m, rng)
        };
    }
    match rng.gen_range(0..3) {
        0 => random_formula(m, rng, depth - 1).not(),
        1 => random_formula(m, rng, depth - 1).and(random_formula(m, rng, depth - 1)),
        _ => random_formula(m, rng, depth - 1).or(random_formula(m, rng, depth - 1)),
    }
}

fn random_event(m: &CausalModel, rng: &mut impl Rng) -> CausalFormula {
    let d = &m.endogenous()[rng.gen_range(0..m.num_endogenous())];
    let v = d.range.values()[rng.gen_range(0..d.range.len())];
    CausalFormula::Event(d.name.clone(), v)
}

fn random_primitive(m: &CausalModel, rng: &mut impl Rng, depth: u32) -> CausalFormula {
    if depth == 0 || rng.gen_bool(0.4) {
        return random_event(m, rng);
    }
    match rng.gen_range(0..3) {
        0 => random_primitive(m, rng, depth - 1).not(),
        1 => random_primitive(m, rng, depth - 1).and(random_primitive(m, rng, depth - 1)),
        _ => random_primitive(m, rng, depth - 1).or(random_primitive(m, rng, depth - 1)),
    }
}

fn random_intervention(m: &CausalModel, rng: &mut impl Rng) -> Intervention {
    let mut iv = Intervention::new();
    for d in m.endogenous() {
        if rng.gen_bool(0.35) {
            iv.insert(
                d.name.clone(),
                d.range.values()[rng.gen_range(0..d.range.len())],
            );
        }
    }
    iv
}
