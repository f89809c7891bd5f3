//! Actual causality in finite structural causal models.
//!
//! Build or parse a [`CausalModel`], pick a [`Context`], and ask whether a
//! conjunction of events is an actual cause of a formula with
//! [`is_actual_cause`] under one of three [`RuleVariant`]s. The
//! [`transforms`] module checks and builds conservative extensions.
//!
//! ```
//! use actualcause::{dsl, is_actual_cause, CandidateCause, CausalFormula, RuleVariant};
//!
//! let doc = dsl::parse_model(
//!     "model rt
//!      exogenous U: {0,1}
//!      endogenous ST: {0,1} = U
//!      endogenous BT: {0,1} = U
//!      endogenous BS: {0,1} = ST | BT
//!      context u1 { U = 1 }",
//! )?;
//! let u1 = doc.context("u1")?;
//! let verdict = is_actual_cause(
//!     &doc.model,
//!     u1,
//!     &CandidateCause::single("ST", 1),
//!     &CausalFormula::eq("BS", 1),
//!     RuleVariant::Updated,
//! )?;
//! assert!(verdict.is_cause);
//! # Ok::<(), actualcause::Error>(())
//! ```

pub mod causality;
pub mod corpus;
pub mod dsl;
mod enumerate;
mod error;
pub mod expr;
pub mod formula;
pub mod model;
pub mod normality;
pub mod transforms;

pub use causality::{
    ac2b_counterexample, best_witnesses, check_ac1, check_ac2a, check_ac2b, find_all_causes,
    find_all_causes_with, is_actual_cause, is_actual_cause_with, witness_world, CandidateCause,
    Condition, Failure, ModelRef, RuleVariant, SearchConfig, Verdict, Witness,
};
pub use error::{Error, Result};
pub use expr::{BinOp, Expr};
pub use formula::{eval_formula, valid_in_model, CausalFormula};
pub use model::{
    check_recursive, CausalModel, Context, Intervention, Range, Signature, Value, VarDecl,
    VariableId, World,
};
pub use normality::{ExtendedCausalModel, NormalityOrder, Ranking};
