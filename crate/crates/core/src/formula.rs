//! Causal formulas and the satisfaction relation `(M, u) |= psi`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Intervention, Value, VariableId, World};

/// A causal formula: boolean combinations of primitive events `X = x` and
/// intervention prefixes `[Y <- y](phi)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalFormula {
    Event(VariableId, Value),
    Not(Box<CausalFormula>),
    And(Box<CausalFormula>, Box<CausalFormula>),
    Or(Box<CausalFormula>, Box<CausalFormula>),
    Held(Intervention, Box<CausalFormula>),
}

impl CausalFormula {
    pub fn event(var: VariableId, value: Value) -> Self {
        CausalFormula::Event(var, value)
    }

    /// Panics on an invalid name; meant for tests and examples.
    pub fn eq(name: &str, value: Value) -> Self {
        CausalFormula::Event(VariableId::new(name).expect("invalid variable name"), value)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CausalFormula::Not(Box::new(self))
    }

    pub fn and(self, other: CausalFormula) -> Self {
        CausalFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: CausalFormula) -> Self {
        CausalFormula::Or(Box::new(self), Box::new(other))
    }

    /// `[iv](body)`. Fails if `body` itself contains an intervention.
    pub fn held(iv: Intervention, body: CausalFormula) -> Result<Self> {
        if body.has_interventions() {
            return Err(Error::MalformedPhi(format!(
                "nested intervention in body `{body}`"
            )));
        }
        Ok(CausalFormula::Held(iv, Box::new(body)))
    }

    /// Conjunction of events `X1 = x1 & X2 = x2 & ...`; panics if empty.
    pub fn conjunction(events: impl IntoIterator<Item = (VariableId, Value)>) -> Self {
        events
            .into_iter()
            .map(|(v, x)| CausalFormula::Event(v, x))
            .reduce(|a, b| a.and(b))
            .expect("empty conjunction")
    }

    pub fn has_interventions(&self) -> bool {
        match self {
            CausalFormula::Event(..) => false,
            CausalFormula::Not(f) => f.has_interventions(),
            CausalFormula::And(a, b) | CausalFormula::Or(a, b) => {
                a.has_interventions() || b.has_interventions()
            }
            CausalFormula::Held(..) => true,
        }
    }

    /// Checks variables and values against the model.
    pub fn validate(&self, model: &CausalModel) -> Result<()> {
        match self {
            CausalFormula::Event(v, x) => check_event(model, v, *x).map(|_| ()),
            CausalFormula::Not(f) => f.validate(model),
            CausalFormula::And(a, b) | CausalFormula::Or(a, b) => {
                a.validate(model)?;
                b.validate(model)
            }
            CausalFormula::Held(iv, body) => {
                model.overrides(iv)?;
                body.validate(model)
            }
        }
    }

    /// Index-resolved form of an intervention-free formula.
    pub(crate) fn compile(&self, model: &CausalModel) -> Result<Phi> {
        Ok(match self {
            CausalFormula::Event(v, x) => Phi::Event(check_event(model, v, *x)?, *x),
            CausalFormula::Not(f) => Phi::Not(Box::new(f.compile(model)?)),
            CausalFormula::And(a, b) => {
                Phi::And(Box::new(a.compile(model)?), Box::new(b.compile(model)?))
            }
            CausalFormula::Or(a, b) => {
                Phi::Or(Box::new(a.compile(model)?), Box::new(b.compile(model)?))
            }
            CausalFormula::Held(..) => {
                return Err(Error::MalformedPhi(self.to_string()));
            }
        })
    }

    /// Truth of an intervention-free formula in a world.
    pub fn holds_in(&self, model: &CausalModel, world: &World) -> Result<bool> {
        model.check_world(world)?;
        Ok(self.compile(model)?.eval(world.values()))
    }

    fn precedence(&self) -> u8 {
        match self {
            CausalFormula::Or(..) => 1,
            CausalFormula::And(..) => 2,
            CausalFormula::Not(_) => 3,
            _ => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn check_event(model: &CausalModel, v: &VariableId, x: Value) -> Result<usize> {
    let i = match model.endo_index(v) {
        Some(i) => i,
        None if model.is_exogenous(v) => {
            return Err(Error::InvalidModel(format!(
                "formula mentions exogenous variable `{v}`"
            )))
        }
        None => return Err(Error::UnknownVariable(v.to_string())),
    };
    if !model.endogenous()[i].range.contains(x) {
        return Err(Error::ValueOutOfRange {
            variable: v.to_string(),
            value: x,
        });
    }
    Ok(i)
}

impl fmt::Display for CausalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalFormula::Event(v, x) => write!(f, "{v}={x}"),
            CausalFormula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_operand(f, 3)
            }
            CausalFormula::And(a, b) => {
                a.fmt_operand(f, 2)?;
                f.write_str(" & ")?;
                b.fmt_operand(f, 3)
            }
            CausalFormula::Or(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_operand(f, 2)
            }
            CausalFormula::Held(iv, body) => write!(f, "[{iv}]({body})"),
        }
    }
}

/// Compiled intervention-free formula over endogenous indices.
#[derive(Debug, Clone)]
pub(crate) enum Phi {
    Event(usize, Value),
    Not(Box<Phi>),
    And(Box<Phi>, Box<Phi>),
    Or(Box<Phi>, Box<Phi>),
}

impl Phi {
    pub(crate) fn eval(&self, world: &[Value]) -> bool {
        match self {
            Phi::Event(i, x) => world[*i] == *x,
            Phi::Not(f) => !f.eval(world),
            Phi::And(a, b) => a.eval(world) && b.eval(world),
            Phi::Or(a, b) => a.eval(world) || b.eval(world),
        }
    }
}

/// `(M, u) |= f`.
pub fn eval_formula(model: &CausalModel, ctx: &Context, f: &CausalFormula) -> Result<bool> {
    model.check_context(ctx)?;
    f.validate(model)?;
    let mut actual = None;
    eval_in(model, ctx, f, &mut actual)
}

fn eval_in(
    model: &CausalModel,
    ctx: &Context,
    f: &CausalFormula,
    actual: &mut Option<World>,
) -> Result<bool> {
    Ok(match f {
        CausalFormula::Event(v, x) => {
            if actual.is_none() {
                *actual = Some(model.solve(ctx)?);
            }
            let i = model.endo_index(v).expect("validated");
            actual.as_ref().unwrap().values()[i] == *x
        }
        CausalFormula::Not(g) => !eval_in(model, ctx, g, actual)?,
        CausalFormula::And(a, b) => {
            eval_in(model, ctx, a, actual)? && eval_in(model, ctx, b, actual)?
        }
        CausalFormula::Or(a, b) => {
            eval_in(model, ctx, a, actual)? || eval_in(model, ctx, b, actual)?
        }
        CausalFormula::Held(iv, body) => {
            let intervened = model.intervene(iv)?;
            let mut inner = None;
            eval_in(&intervened, ctx, body, &mut inner)?
        }
    })
}

/// `M |= f`: `f` holds in every context.
pub fn valid_in_model(model: &CausalModel, f: &CausalFormula) -> Result<bool> {
    f.validate(model)?;
    for ctx in model.contexts() {
        if !eval_formula(model, &ctx, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::{Range, Signature, VarDecl};

    fn id(s: &str) -> VariableId {
        VariableId::new(s).unwrap()
    }

    fn single() -> CausalModel {
        let sig = Signature::new(
            vec![VarDecl::new("U", Range::binary()).unwrap()],
            vec![VarDecl::new("A", Range::binary()).unwrap()],
        )
        .unwrap();
        CausalModel::new("a", sig, vec![(id("A"), Expr::var("U"))]).unwrap()
    }

    #[test]
    fn intervention_fixes_value_in_every_context() {
        let m = single();
        let f = CausalFormula::held(
            Intervention::new().set(id("A"), 1),
            CausalFormula::eq("A", 1),
        )
        .unwrap();
        assert!(valid_in_model(&m, &f).unwrap());
        assert!(!valid_in_model(&m, &CausalFormula::eq("A", 1)).unwrap());
    }

    #[test]
    fn exogenous_events_are_rejected() {
        let m = single();
        let ctx = m.context(&[("U", 1)]).unwrap();
        assert!(eval_formula(&m, &ctx, &CausalFormula::eq("U", 1)).is_err());
        assert_eq!(
            eval_formula(&m, &ctx, &CausalFormula::eq("Q", 1)),
            Err(Error::UnknownVariable("Q".into()))
        );
    }

    #[test]
    fn nested_interventions_are_rejected() {
        let inner = CausalFormula::held(Intervention::new(), CausalFormula::eq("A", 1)).unwrap();
        assert!(CausalFormula::held(Intervention::new(), inner).is_err());
    }

    #[test]
    fn display_uses_minimal_parentheses() {
        let f = CausalFormula::eq("A", 1)
            .or(CausalFormula::eq("B", 0))
            .and(CausalFormula::eq("C", 1).not());
        assert_eq!(f.to_string(), "(A=1 | B=0) & !C=1");
        let iv = Intervention::new().set(id("A"), 1).set(id("C"), 0);
        let f = CausalFormula::held(iv, CausalFormula::eq("D", 0)).unwrap();
        assert_eq!(f.to_string(), "[A<-1, C<-0](D=0)");
    }
}
