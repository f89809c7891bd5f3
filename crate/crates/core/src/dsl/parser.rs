use std::collections::HashSet;

use super::lexer::{tokenize, Tok, Token};
use super::{ModelDocument, NormalityDecl};
use crate::causality::CandidateCause;
use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::formula::CausalFormula;
use crate::model::{
    CausalModel, Intervention, Range, Signature, Value, VarDecl, VariableId, RESERVED,
};

/// Context name, assignments, and where the context was declared.
type RawContext = (String, Vec<(String, Value)>, (usize, usize));

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        self.error(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn variable(&mut self) -> Result<VariableId> {
        let s = self.name()?;
        VariableId::new(&s).or_else(|_| self.error(format!("invalid variable name `{s}`")))
    }

    fn int(&mut self) -> Result<Value> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.unexpected("an integer"),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    // Expressions, loosest first.

    pub(crate) fn expr(&mut self) -> Result<Expr> {
        let mut e = self.and_expr()?;
        while self.eat(&Tok::Or) {
            e = Expr::binary(BinOp::Or, e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut e = self.cmp_expr()?;
        while self.eat(&Tok::And) {
            e = Expr::binary(BinOp::And, e, self.cmp_expr()?);
        }
        Ok(e)
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt | Tok::LArrow => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> Result<Expr> {
        let l = self.add_expr()?;
        let Some(op) = self.cmp_op() else {
            return Ok(l);
        };
        // `A<-1` in an expression is `A < -1`.
        let negated = *self.peek() == Tok::LArrow;
        self.bump();
        let r = if negated {
            self.after_minus()?
        } else {
            self.add_expr()?
        };
        if self.cmp_op().is_some() {
            return self.error("comparisons do not chain; add parentheses");
        }
        Ok(Expr::binary(op, l, r))
    }

    fn add_expr(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::binary(op, e, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Minus => {
                self.bump();
                self.after_minus()
            }
            _ => self.primary(),
        }
    }

    /// A literal directly after `-` is a negative constant; anything else
    /// is negated.
    fn after_minus(&mut self) -> Result<Expr> {
        if let Tok::Int(v) = *self.peek() {
            self.bump();
            return Ok(Expr::Const(-v));
        }
        Ok(Expr::Neg(Box::new(self.unary()?)))
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "case" => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut arms = Vec::new();
                while !self.is_keyword("default") {
                    let g = self.expr()?;
                    self.expect(Tok::Arrow)?;
                    let v = self.expr()?;
                    self.expect(Tok::Semi)?;
                    arms.push((g, v));
                }
                self.bump();
                self.expect(Tok::Arrow)?;
                let d = self.expr()?;
                self.eat(&Tok::Semi);
                self.expect(Tok::RBrace)?;
                Ok(Expr::case(arms, d))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.variable()?)),
            _ => self.unexpected("an expression"),
        }
    }

    // Model documents.

    pub(crate) fn document(&mut self) -> Result<ModelDocument> {
        self.expect_keyword("model")?;
        let name = self.name()?;
        let mut exo = Vec::new();
        let mut endo = Vec::new();
        let mut equations = Vec::new();
        let mut contexts: Vec<RawContext> = Vec::new();
        let mut normality = None;
        let mut names = HashSet::new();
        loop {
            let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "exogenous" || kw == "endogenous" => {
                    self.bump();
                    let v = self.variable()?;
                    if !names.insert(v.clone()) {
                        return Err(Error::DuplicateDefinition(v.to_string()));
                    }
                    self.expect(Tok::Colon)?;
                    let range = self.range()?;
                    let decl = VarDecl {
                        name: v.clone(),
                        range,
                    };
                    if kw == "exogenous" {
                        exo.push(decl);
                    } else {
                        self.expect(Tok::Eq)?;
                        equations.push((v, self.expr()?));
                        endo.push(decl);
                    }
                }
                Tok::Ident(kw) if kw == "context" => {
                    self.bump();
                    let cname = self.name()?;
                    if contexts.iter().any(|c| c.0 == cname) {
                        return Err(Error::DuplicateDefinition(cname));
                    }
                    self.expect(Tok::LBrace)?;
                    let mut values = Vec::new();
                    if *self.peek() != Tok::RBrace {
                        loop {
                            let v = self.name()?;
                            self.expect(Tok::Eq)?;
                            values.push((v, self.int()?));
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBrace)?;
                    contexts.push((cname, values, (line, column)));
                }
                Tok::Ident(kw) if kw == "normality" => {
                    self.bump();
                    if normality.is_some() {
                        return Err(Error::DuplicateDefinition("normality".into()));
                    }
                    normality = Some(self.normality()?);
                }
                _ => return self.unexpected("a declaration"),
            }
        }
        let signature = Signature::new(exo, endo)?;
        let model = CausalModel::new(name, signature, equations)?;
        let mut ctxs = Vec::new();
        for (cname, values, (line, column)) in contexts {
            let refs: Vec<(&str, Value)> = values.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            let ctx = model.context(&refs).map_err(|e| match e {
                Error::InvalidModel(m) => Error::Parse {
                    line,
                    column,
                    message: format!("context `{cname}`: {m}"),
                },
                e => e,
            })?;
            ctxs.push((cname, ctx));
        }
        let doc = ModelDocument {
            model,
            contexts: ctxs,
            normality,
        };
        doc.order()?;
        Ok(doc)
    }

    fn range(&mut self) -> Result<Range> {
        self.expect(Tok::LBrace)?;
        let mut values = vec![self.int()?];
        while self.eat(&Tok::Comma) {
            values.push(self.int()?);
        }
        self.expect(Tok::RBrace)?;
        Range::new(values).or_else(|e| self.error(e.to_string()))
    }

    fn normality(&mut self) -> Result<NormalityDecl> {
        if self.is_keyword("respect_equations") {
            self.bump();
            self.expect(Tok::LParen)?;
            let context = self.name()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::LBrace)?;
            let mut vars = Vec::new();
            if *self.peek() != Tok::RBrace {
                loop {
                    vars.push(self.variable()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace)?;
            Ok(NormalityDecl::RespectEquations { context, vars })
        } else if self.is_keyword("ranks") {
            self.bump();
            self.expect(Tok::LBrace)?;
            let mut rules = Vec::new();
            while !self.is_keyword("default") {
                let cond = self.expr()?;
                self.expect(Tok::Arrow)?;
                let rank = self.int()?;
                self.expect(Tok::Semi)?;
                rules.push((cond, rank));
            }
            self.bump();
            self.expect(Tok::Arrow)?;
            let default = self.int()?;
            self.eat(&Tok::Semi);
            self.expect(Tok::RBrace)?;
            Ok(NormalityDecl::Ranks { rules, default })
        } else {
            self.unexpected("`respect_equations` or `ranks`")
        }
    }

    // Formulas and queries.

    pub(crate) fn formula(&mut self) -> Result<CausalFormula> {
        let mut f = self.formula_and()?;
        while self.eat(&Tok::Or) {
            f = f.or(self.formula_and()?);
        }
        Ok(f)
    }

    fn formula_and(&mut self) -> Result<CausalFormula> {
        let mut f = self.formula_unary()?;
        while self.eat(&Tok::And) {
            f = f.and(self.formula_unary()?);
        }
        Ok(f)
    }

    fn formula_unary(&mut self) -> Result<CausalFormula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(self.formula_unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBracket => {
                self.bump();
                let mut iv = Intervention::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        let v = self.variable()?;
                        self.expect(Tok::LArrow)?;
                        let x = self.int()?;
                        if iv.get(&v).is_some() {
                            return Err(Error::DuplicateDefinition(v.to_string()));
                        }
                        iv.insert(v, x);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let body = self.formula()?;
                self.expect(Tok::RParen)?;
                CausalFormula::held(iv, body).or_else(|e| self.error(e.to_string()))
            }
            _ => {
                let v = self.variable()?;
                let negated = match self.peek() {
                    Tok::Eq => false,
                    Tok::Ne => true,
                    _ => return self.unexpected("`=` or `!=`"),
                };
                self.bump();
                let f = CausalFormula::Event(v, self.int()?);
                Ok(if negated { f.not() } else { f })
            }
        }
    }

    /// `A=1, B=0`, `A<-1, B<-0`, or `A=1 & B=0`.
    pub(crate) fn assignments(&mut self) -> Result<Vec<(VariableId, Value)>> {
        let mut out: Vec<(VariableId, Value)> = Vec::new();
        if *self.peek() == Tok::Eof {
            return Ok(out);
        }
        loop {
            let v = self.variable()?;
            if !(self.eat(&Tok::Eq) || self.eat(&Tok::LArrow)) {
                return self.unexpected("`=`");
            }
            let x = self.int()?;
            if out.iter().any(|(u, _)| *u == v) {
                return Err(Error::DuplicateDefinition(v.to_string()));
            }
            out.push((v, x));
            if !(self.eat(&Tok::Comma) || self.eat(&Tok::And)) {
                break;
            }
        }
        Ok(out)
    }

    pub(crate) fn cause(&mut self) -> Result<CandidateCause> {
        if *self.peek() == Tok::Eof {
            return self.unexpected("a cause such as `A=1`");
        }
        CandidateCause::new(self.assignments()?)
    }
}
