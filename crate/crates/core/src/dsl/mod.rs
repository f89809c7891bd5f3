//! Text format for models, formulas, and queries.
//!
//! ```text
//! model rock_throwing
//!
//! exogenous U: {0,1}
//!
//! endogenous ST: {0,1} = U
//! endogenous BT: {0,1} = U
//! endogenous BS: {0,1} = ST | BT
//!
//! context u1 { U = 1 }
//! ```
//!
//! Expressions use `|`, `&`, comparisons (`=`, `!=`, `<`, `<=`, `>`, `>=`),
//! `+` and `-`, unary `!` and `-`, parentheses, integer literals, and
//! `case { guard -> value; ...; default -> value }`, loosest first. A model
//! may carry one normality block, either
//! `normality respect_equations(u1) { D' }` or
//! `normality ranks { A = 0 -> 1; default -> 0 }`.
//! Newlines are not significant and `#` starts a line comment.

mod lexer;
mod parser;
mod printer;

use crate::causality::CandidateCause;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::formula::CausalFormula;
use crate::model::{CausalModel, Context, Value, VariableId};
use crate::normality::{ExtendedCausalModel, NormalityOrder, Ranking};

pub use printer::print_model;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalityDecl {
    RespectEquations {
        context: String,
        vars: Vec<VariableId>,
    },
    Ranks {
        rules: Vec<(Expr, i64)>,
        default: i64,
    },
}

/// A parsed model file: the model, its named contexts, and an optional
/// normality block.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub model: CausalModel,
    pub contexts: Vec<(String, Context)>,
    pub normality: Option<NormalityDecl>,
}

impl ModelDocument {
    pub fn new(model: CausalModel) -> Self {
        ModelDocument {
            model,
            contexts: Vec::new(),
            normality: None,
        }
    }

    pub fn context(&self, name: &str) -> Result<&Context> {
        self.contexts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::InvalidModel(format!("no context named `{name}`")))
    }

    /// The normality order the document declares, if any.
    pub fn order(&self) -> Result<Option<NormalityOrder>> {
        Ok(match &self.normality {
            None => None,
            Some(NormalityDecl::Ranks { rules, default }) => {
                Some(NormalityOrder::Ranked(Ranking::Rules {
                    rules: rules.clone(),
                    default: *default,
                }))
            }
            Some(NormalityDecl::RespectEquations { context, vars }) => {
                for v in vars {
                    if self.model.endo_index(v).is_none() {
                        return Err(Error::UnknownVariable(v.to_string()));
                    }
                }
                Some(NormalityOrder::Ranked(Ranking::RespectEquations {
                    context: self.context(context)?.clone(),
                    vars: vars.clone(),
                }))
            }
        })
    }

    /// The model with its declared normality order.
    pub fn extended(&self) -> Result<ExtendedCausalModel> {
        let order = self.order()?.ok_or(Error::MissingNormalityOrder)?;
        ExtendedCausalModel::new(self.model.clone(), order)
    }
}

pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let mut p = parser::Parser::new(text)?;
    let doc = p.document()?;
    p.finish()?;
    Ok(doc)
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = parser::Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// `[A<-1, C<-0](D=0)`, with `&`, `|`, `!`, parentheses, and `X!=x`.
pub fn parse_formula(text: &str) -> Result<CausalFormula> {
    let mut p = parser::Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// `A=1 & B=0` or `A=1, B=0`.
pub fn parse_cause(text: &str) -> Result<CandidateCause> {
    let mut p = parser::Parser::new(text)?;
    let c = p.cause()?;
    p.finish()?;
    Ok(c)
}

/// `A=1, B=0` (also accepts `A<-1`); may be empty.
pub fn parse_assignments(text: &str) -> Result<Vec<(VariableId, Value)>> {
    let mut p = parser::Parser::new(text)?;
    let a = p.assignments()?;
    p.finish()?;
    Ok(a)
}
