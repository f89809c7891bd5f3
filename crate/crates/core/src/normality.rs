//! Normality orders on worlds and extended causal models.
//!
//! An order is a preorder `s ⪰ t` ("s is at least as normal as t"). Ranked
//! orders give each world an integer rank, lower meaning more normal, and
//! are total. Relation orders list pairs explicitly and are closed under
//! reflexivity and transitivity; worlds they do not relate are incomparable.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::expr::{Code, Expr, Slot};
use crate::model::{CausalModel, Context, VariableId, World};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ranking {
    /// Explicit ranks; unlisted worlds get `default`.
    Table {
        ranks: HashMap<World, i64>,
        default: i64,
    },
    /// The first rule whose condition holds in the world gives its rank.
    /// Conditions may only mention endogenous variables.
    Rules {
        rules: Vec<(Expr, i64)>,
        default: i64,
    },
    /// Rank 0 when none of `vars` deviates from its equation in `context`,
    /// rank 1 otherwise.
    RespectEquations {
        context: Context,
        vars: Vec<VariableId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalityOrder {
    Ranked(Ranking),
    /// Generating pairs `(s, t)` meaning `s ⪰ t`.
    Relation(Vec<(World, World)>),
}

impl NormalityOrder {
    /// Every world equally normal.
    pub fn flat() -> Self {
        NormalityOrder::Ranked(Ranking::Rules {
            rules: Vec::new(),
            default: 0,
        })
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    Table(HashMap<World, i64>, i64),
    Rules(Vec<(Code, i64)>, i64),
    Respect(Context, Vec<usize>),
    Relation {
        index: HashMap<World, usize>,
        reach: Vec<Vec<bool>>,
    },
}

/// A causal model together with a normality order over its worlds.
#[derive(Debug, Clone)]
pub struct ExtendedCausalModel {
    base: CausalModel,
    order: NormalityOrder,
    compiled: Compiled,
}

impl PartialEq for ExtendedCausalModel {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.order == other.order
    }
}

impl ExtendedCausalModel {
    pub fn new(base: CausalModel, order: NormalityOrder) -> Result<Self> {
        let compiled = compile(&base, &order)?;
        Ok(ExtendedCausalModel {
            base,
            order,
            compiled,
        })
    }

    pub fn flat(base: CausalModel) -> Self {
        Self::new(base, NormalityOrder::flat()).expect("flat order always compiles")
    }

    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn order(&self) -> &NormalityOrder {
        &self.order
    }

    /// Rank of a world under a ranked order; `None` for relation orders.
    pub fn rank(&self, world: &World) -> Option<i64> {
        match &self.compiled {
            Compiled::Table(t, d) => Some(t.get(world).copied().unwrap_or(*d)),
            Compiled::Rules(rules, d) => Some(
                rules
                    .iter()
                    .find(|(c, _)| c.eval(&[], world.values()) != 0)
                    .map_or(*d, |(_, r)| *r),
            ),
            Compiled::Respect(ctx, vars) => Some(
                vars.iter()
                    .any(|&i| self.base.equation_value(i, ctx, world) != world.values()[i])
                    as i64,
            ),
            Compiled::Relation { .. } => None,
        }
    }

    /// `s ⪰ t`.
    pub fn at_least_as_normal(&self, s: &World, t: &World) -> bool {
        if let Compiled::Relation { index, reach } = &self.compiled {
            if s == t {
                return true;
            }
            return match (index.get(s), index.get(t)) {
                (Some(&i), Some(&j)) => reach[i][j],
                _ => false,
            };
        }
        self.rank(s).unwrap() <= self.rank(t).unwrap()
    }

    /// `s ≻ t`: at least as normal and not conversely.
    pub fn strictly_more_normal(&self, s: &World, t: &World) -> bool {
        self.at_least_as_normal(s, t) && !self.at_least_as_normal(t, s)
    }
}

fn compile(base: &CausalModel, order: &NormalityOrder) -> Result<Compiled> {
    Ok(match order {
        NormalityOrder::Ranked(Ranking::Table { ranks, default }) => {
            for w in ranks.keys() {
                base.check_world(w)?;
            }
            Compiled::Table(ranks.clone(), *default)
        }
        NormalityOrder::Ranked(Ranking::Rules { rules, default }) => {
            let resolve = base.resolver();
            let endo_only = |v: &VariableId| match resolve(v) {
                Some(Slot::Endo(i)) => Some(Slot::Endo(i)),
                _ => None,
            };
            let mut out = Vec::with_capacity(rules.len());
            for (cond, rank) in rules {
                for v in cond.variables() {
                    if base.is_exogenous(&v) {
                        return Err(Error::InvalidModel(format!(
                            "normality rule mentions exogenous variable `{v}`"
                        )));
                    }
                }
                out.push((cond.compile(&endo_only)?, *rank));
            }
            Compiled::Rules(out, *default)
        }
        NormalityOrder::Ranked(Ranking::RespectEquations { context, vars }) => {
            base.check_context(context)?;
            let idx = vars
                .iter()
                .map(|v| {
                    base.endo_index(v)
                        .ok_or_else(|| Error::UnknownVariable(v.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            Compiled::Respect(context.clone(), idx)
        }
        NormalityOrder::Relation(pairs) => {
            let mut index: HashMap<World, usize> = HashMap::new();
            for (s, t) in pairs {
                for w in [s, t] {
                    base.check_world(w)?;
                    let n = index.len();
                    index.entry(w.clone()).or_insert(n);
                }
            }
            let n = index.len();
            let mut reach = vec![vec![false; n]; n];
            for (i, row) in reach.iter_mut().enumerate() {
                row[i] = true;
            }
            for (s, t) in pairs {
                reach[index[s]][index[t]] = true;
            }
            for k in 0..n {
                let via = reach[k].clone();
                for row in reach.iter_mut().filter(|row| row[k]) {
                    for (r, &v) in row.iter_mut().zip(&via) {
                        *r |= v;
                    }
                }
            }
            Compiled::Relation { index, reach }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Range, Signature, VarDecl};

    fn two() -> CausalModel {
        let sig = Signature::new(
            vec![],
            vec![
                VarDecl::new("A", Range::binary()).unwrap(),
                VarDecl::new("B", Range::binary()).unwrap(),
            ],
        )
        .unwrap();
        CausalModel::new(
            "two",
            sig,
            vec![
                (VariableId::new("A").unwrap(), Expr::int(1)),
                (VariableId::new("B").unwrap(), Expr::var("A")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn relation_is_transitively_closed_and_partial() {
        let m = two();
        let w = |a, b| m.world(&[("A", a), ("B", b)]).unwrap();
        let order = NormalityOrder::Relation(vec![(w(1, 1), w(1, 0)), (w(1, 0), w(0, 0))]);
        let e = ExtendedCausalModel::new(m.clone(), order).unwrap();
        assert!(e.at_least_as_normal(&w(1, 1), &w(0, 0)));
        assert!(!e.at_least_as_normal(&w(0, 0), &w(1, 1)));
        assert!(e.at_least_as_normal(&w(0, 1), &w(0, 1)));
        assert!(!e.at_least_as_normal(&w(0, 1), &w(1, 1)));
        assert!(!e.at_least_as_normal(&w(1, 1), &w(0, 1)));
    }

    #[test]
    fn rules_rank_first_match() {
        let m = two();
        let order = NormalityOrder::Ranked(Ranking::Rules {
            rules: vec![(Expr::var("A").equals(Expr::int(0)), 2)],
            default: 0,
        });
        let e = ExtendedCausalModel::new(m.clone(), order).unwrap();
        let w = m.world(&[("A", 0), ("B", 1)]).unwrap();
        assert_eq!(e.rank(&w), Some(2));
    }

    #[test]
    fn respect_ranks_deviations_abnormal() {
        let m = two();
        let ctx = m.context(&[]).unwrap();
        let order = NormalityOrder::Ranked(Ranking::RespectEquations {
            context: ctx,
            vars: vec![VariableId::new("B").unwrap()],
        });
        let e = ExtendedCausalModel::new(m.clone(), order).unwrap();
        assert_eq!(e.rank(&m.world(&[("A", 0), ("B", 0)]).unwrap()), Some(0));
        assert_eq!(e.rank(&m.world(&[("A", 0), ("B", 1)]).unwrap()), Some(1));
    }
}
