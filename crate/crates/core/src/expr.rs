//! Structural-equation expressions.
//!
//! Expressions are integer valued. Boolean connectives read any nonzero
//! value as true and produce `0` or `1`; comparisons produce `0` or `1`.
//! A `case` list is evaluated first-match-wins and always carries a default
//! arm, so every expression is total.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Value, VariableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    /// Binding strength; higher binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
        }
    }

    pub(crate) fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    fn apply(self, l: Value, r: Value) -> Value {
        match self {
            BinOp::Or => ((l != 0) || (r != 0)) as Value,
            BinOp::And => ((l != 0) && (r != 0)) as Value,
            BinOp::Eq => (l == r) as Value,
            BinOp::Ne => (l != r) as Value,
            BinOp::Lt => (l < r) as Value,
            BinOp::Le => (l <= r) as Value,
            BinOp::Gt => (l > r) as Value,
            BinOp::Ge => (l >= r) as Value,
            BinOp::Add => l.wrapping_add(r),
            BinOp::Sub => l.wrapping_sub(r),
        }
    }
}

/// Expression AST over variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(VariableId),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Case {
        arms: Vec<(Expr, Expr)>,
        default: Box<Expr>,
    },
}

impl Expr {
    pub fn int(v: Value) -> Self {
        Expr::Const(v)
    }

    /// Panics on an invalid name; meant for building models in code.
    pub fn var(name: &str) -> Self {
        Expr::Var(VariableId::new(name).expect("invalid variable name"))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn and(self, other: Expr) -> Self {
        Expr::binary(BinOp::And, self, other)
    }

    pub fn or(self, other: Expr) -> Self {
        Expr::binary(BinOp::Or, self, other)
    }

    pub fn equals(self, other: Expr) -> Self {
        Expr::binary(BinOp::Eq, self, other)
    }

    pub fn not_equals(self, other: Expr) -> Self {
        Expr::binary(BinOp::Ne, self, other)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Expr::Not(Box::new(self))
    }

    /// `name = value`
    pub fn is(name: &VariableId, value: Value) -> Self {
        Expr::Var(name.clone()).equals(Expr::Const(value))
    }

    /// Conjunction of `items`; the empty conjunction is `1`.
    pub fn all(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(|acc, e| acc.and(e))
            .unwrap_or(Expr::Const(1))
    }

    /// Disjunction of `items`; the empty disjunction is `0`.
    pub fn any(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(|acc, e| acc.or(e))
            .unwrap_or(Expr::Const(0))
    }

    pub fn case(arms: Vec<(Expr, Expr)>, default: Expr) -> Self {
        Expr::Case {
            arms,
            default: Box::new(default),
        }
    }

    /// Every variable mentioned anywhere in the expression, including
    /// inside case arms that can never fire.
    pub fn variables(&self) -> BTreeSet<VariableId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VariableId>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Not(e) | Expr::Neg(e) => e.collect_vars(out),
            Expr::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Case { arms, default } => {
                for (g, v) in arms {
                    g.collect_vars(out);
                    v.collect_vars(out);
                }
                default.collect_vars(out);
            }
        }
    }

    pub(crate) fn compile(&self, resolve: &dyn Fn(&VariableId) -> Option<Slot>) -> Result<Code> {
        Ok(match self {
            Expr::Const(v) => Code::Const(*v),
            Expr::Var(name) => match resolve(name) {
                Some(Slot::Exo(i)) => Code::Exo(i),
                Some(Slot::Endo(i)) => Code::Endo(i),
                None => return Err(Error::UnknownVariable(name.to_string())),
            },
            Expr::Not(e) => Code::Not(Box::new(e.compile(resolve)?)),
            Expr::Neg(e) => Code::Neg(Box::new(e.compile(resolve)?)),
            Expr::Binary(op, l, r) => Code::Bin(
                *op,
                Box::new(l.compile(resolve)?),
                Box::new(r.compile(resolve)?),
            ),
            Expr::Case { arms, default } => {
                let arms = arms
                    .iter()
                    .map(|(g, v)| Ok((g.compile(resolve)?, v.compile(resolve)?)))
                    .collect::<Result<Vec<_>>>()?;
                Code::Case(arms, Box::new(default.compile(resolve)?))
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Not(_) | Expr::Neg(_) => 5,
            _ => 6,
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

/// Canonical text form. Parenthesizes only where precedence requires it;
/// left-associative chains print without parentheses.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.fmt_operand(f, 5)
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                // `-1` reads back as a negative literal, so a negated
                // constant keeps its parentheses.
                match **e {
                    Expr::Const(_) | Expr::Neg(_) => write!(f, "({e})"),
                    _ => e.fmt_operand(f, 5),
                }
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                // Comparisons do not chain, so both sides need to bind tighter.
                let left_min = if op.is_comparison() { p + 1 } else { p };
                l.fmt_operand(f, left_min)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_operand(f, p + 1)
            }
            Expr::Case { arms, default } => {
                f.write_str("case { ")?;
                for (g, v) in arms {
                    write!(f, "{g} -> {v}; ")?;
                }
                write!(f, "default -> {default} }}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Exo(usize),
    Endo(usize),
}

/// Index-resolved expression used on the evaluation hot path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Code {
    Const(Value),
    Exo(usize),
    Endo(usize),
    Not(Box<Code>),
    Neg(Box<Code>),
    Bin(BinOp, Box<Code>, Box<Code>),
    Case(Vec<(Code, Code)>, Box<Code>),
}

impl Code {
    pub(crate) fn eval(&self, exo: &[Value], endo: &[Value]) -> Value {
        match self {
            Code::Const(v) => *v,
            Code::Exo(i) => exo[*i],
            Code::Endo(i) => endo[*i],
            Code::Not(e) => (e.eval(exo, endo) == 0) as Value,
            Code::Neg(e) => e.eval(exo, endo).wrapping_neg(),
            Code::Bin(BinOp::And, l, r) => {
                (l.eval(exo, endo) != 0 && r.eval(exo, endo) != 0) as Value
            }
            Code::Bin(BinOp::Or, l, r) => {
                (l.eval(exo, endo) != 0 || r.eval(exo, endo) != 0) as Value
            }
            Code::Bin(op, l, r) => op.apply(l.eval(exo, endo), r.eval(exo, endo)),
            Code::Case(arms, default) => {
                for (g, v) in arms {
                    if g.eval(exo, endo) != 0 {
                        return v.eval(exo, endo);
                    }
                }
                default.eval(exo, endo)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(e: &Expr, vals: &[(&str, Value)]) -> Value {
        let names: Vec<VariableId> = vals
            .iter()
            .map(|(n, _)| VariableId::new(n).unwrap())
            .collect();
        let endo: Vec<Value> = vals.iter().map(|(_, v)| *v).collect();
        let code = e
            .compile(&|n| names.iter().position(|m| m == n).map(Slot::Endo))
            .unwrap();
        code.eval(&[], &endo)
    }

    #[test]
    fn connectives_use_truthiness() {
        let e = Expr::var("A").and(Expr::var("B").not());
        assert_eq!(eval(&e, &[("A", 2), ("B", 0)]), 1);
        assert_eq!(eval(&e, &[("A", 1), ("B", 1)]), 0);
    }

    #[test]
    fn case_is_first_match() {
        let e = Expr::case(
            vec![
                (Expr::var("A").equals(Expr::int(1)), Expr::int(7)),
                (Expr::var("A").equals(Expr::int(1)), Expr::int(8)),
            ],
            Expr::int(-1),
        );
        assert_eq!(eval(&e, &[("A", 1)]), 7);
        assert_eq!(eval(&e, &[("A", 0)]), -1);
    }

    #[test]
    fn counts_with_addition() {
        let e = Expr::binary(
            BinOp::Ge,
            Expr::binary(
                BinOp::Add,
                Expr::var("A").equals(Expr::int(0)),
                Expr::var("B").equals(Expr::int(0)),
            ),
            Expr::int(2),
        );
        assert_eq!(eval(&e, &[("A", 0), ("B", 0)]), 1);
        assert_eq!(eval(&e, &[("A", 0), ("B", 1)]), 0);
    }

    #[test]
    fn dead_branches_still_count_as_references() {
        let e = Expr::case(vec![(Expr::int(0), Expr::var("Z"))], Expr::var("Y"));
        let vars: Vec<String> = e.variables().iter().map(|v| v.to_string()).collect();
        assert_eq!(vars, ["Y", "Z"]);
    }

    #[test]
    fn display_parenthesizes_by_precedence() {
        let e = Expr::var("A").or(Expr::var("B")).and(Expr::var("C"));
        assert_eq!(e.to_string(), "(A | B) & C");
        let e = Expr::var("A").and(Expr::var("B")).or(Expr::var("C"));
        assert_eq!(e.to_string(), "A & B | C");
        let e = Expr::var("S").not().and(Expr::var("A"));
        assert_eq!(e.to_string(), "!S & A");
        let e = Expr::var("A").equals(Expr::var("B")).not();
        assert_eq!(e.to_string(), "!(A = B)");
    }
}
