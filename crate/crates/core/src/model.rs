//! Finite-domain structural causal models.
//!
//! A [`CausalModel`] is a signature (exogenous and endogenous variables with
//! finite integer ranges) plus one structural equation per endogenous
//! variable. Models are always recursive: construction fails with
//! [`Error::CyclicModel`] when the syntactic dependency graph has a cycle.
//!
//! [`Context`] and [`World`] are dense value vectors indexed by declaration
//! order of the exogenous and endogenous variables respectively, so they are
//! only meaningful relative to the model that produced them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::enumerate::Odometer;
use crate::error::{Error, Result};
use crate::expr::{Code, Expr, Slot};

pub type Value = i64;

/// Words the model language reserves; they cannot name variables.
pub const RESERVED: &[&str] = &[
    "model",
    "exogenous",
    "endogenous",
    "context",
    "normality",
    "case",
    "default",
    "ranks",
    "respect_equations",
];

/// A variable name: ASCII letter or `_` followed by letters, digits, `_` or
/// `'`, and not a reserved word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
            }
            _ => false,
        };
        if ok && !RESERVED.contains(&name) {
            Ok(VariableId(name.to_string()))
        } else {
            Err(Error::InvalidModel(format!(
                "invalid variable name `{name}`"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered finite set of values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Range(Vec<Value>);

impl Range {
    pub fn new(values: Vec<Value>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModel("empty range".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel(format!(
                "range {values:?} must be strictly increasing"
            )));
        }
        Ok(Range(values))
    }

    pub fn binary() -> Self {
        Range(vec![0, 1])
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Value) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn min(&self) -> Value {
        self.0[0]
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: VariableId,
    pub range: Range,
}

impl VarDecl {
    pub fn new(name: &str, range: Range) -> Result<Self> {
        Ok(VarDecl {
            name: VariableId::new(name)?,
            range,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    exogenous: Vec<VarDecl>,
    endogenous: Vec<VarDecl>,
}

impl Signature {
    pub fn new(exogenous: Vec<VarDecl>, endogenous: Vec<VarDecl>) -> Result<Self> {
        if endogenous.is_empty() {
            return Err(Error::InvalidModel("no endogenous variables".into()));
        }
        let mut seen = BTreeSet::new();
        for d in exogenous.iter().chain(&endogenous) {
            if !seen.insert(d.name.clone()) {
                return Err(Error::DuplicateDefinition(d.name.to_string()));
            }
        }
        Ok(Signature {
            exogenous,
            endogenous,
        })
    }

    pub fn exogenous(&self) -> &[VarDecl] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[VarDecl] {
        &self.endogenous
    }
}

/// Total assignment to the exogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Vec<Value>);

impl Context {
    pub fn values(&self) -> &[Value] {
        &self.0
    }
}

/// Total assignment to the endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World(Vec<Value>);

impl World {
    pub fn values(&self) -> &[Value] {
        &self.0
    }
}

/// Settings for a subset of the endogenous variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intervention(BTreeMap<VariableId, Value>);

impl Intervention {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, var: VariableId, value: Value) -> Self {
        self.0.insert(var, value);
        self
    }

    pub fn insert(&mut self, var: VariableId, value: Value) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: &VariableId) -> Option<Value> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, Value)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Combined settings; on a shared variable `other` wins.
    pub fn merged(&self, other: &Intervention) -> Intervention {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.insert(k.clone(), v);
        }
        out
    }
}

impl FromIterator<(VariableId, Value)> for Intervention {
    fn from_iter<T: IntoIterator<Item = (VariableId, Value)>>(iter: T) -> Self {
        Intervention(iter.into_iter().collect())
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}<-{v}")?;
        }
        Ok(())
    }
}

/// Dependency-ordered endogenous variables, or the cycle that prevents one.
///
/// `Y` depends on `X` whenever `Y`'s equation mentions `X`, even inside a
/// case arm that can never fire. Ties are broken by declaration order.
pub fn check_recursive(
    signature: &Signature,
    equations: &[(VariableId, Expr)],
) -> Result<Vec<VariableId>> {
    let endo = signature.endogenous();
    let index: HashMap<&VariableId, usize> =
        endo.iter().enumerate().map(|(i, d)| (&d.name, i)).collect();
    let mut deps = vec![Vec::new(); endo.len()];
    for (name, expr) in equations {
        let i = *index
            .get(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        deps[i] = expr
            .variables()
            .iter()
            .filter_map(|v| index.get(v).copied())
            .collect();
    }
    let order = topological_order(&deps).map_err(|cycle| {
        Error::CyclicModel(
            cycle
                .into_iter()
                .map(|i| endo[i].name.to_string())
                .collect(),
        )
    })?;
    Ok(order.into_iter().map(|i| endo[i].name.clone()).collect())
}

/// Kahn's algorithm; `deps[i]` lists the nodes `i` reads from.
fn topological_order(deps: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = deps.len();
    let mut indegree = vec![0usize; n];
    let mut readers = vec![Vec::new(); n];
    for (i, ds) in deps.iter().enumerate() {
        for &d in ds {
            indegree[i] += 1;
            readers[d].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &r in &readers[i] {
            indegree[r] -= 1;
            if indegree[r] == 0 {
                ready.insert(r);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover node reads from another leftover node, so walking
    // dependencies from the first leftover must revisit a node.
    let left: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] > 0).collect();
    let mut path = vec![*left.first().unwrap()];
    loop {
        let cur = *path.last().unwrap();
        let next = deps[cur]
            .iter()
            .copied()
            .filter(|d| left.contains(d))
            .min()
            .unwrap();
        if let Some(pos) = path.iter().position(|&p| p == next) {
            return Err(path.split_off(pos));
        }
        path.push(next);
    }
}

/// A recursive structural causal model.
#[derive(Debug, Clone)]
pub struct CausalModel {
    name: String,
    signature: Signature,
    equations: Vec<Expr>,
    code: Vec<Code>,
    order: Vec<usize>,
    slots: HashMap<VariableId, Slot>,
    notes: Vec<String>,
}

/// Equality ignores audit notes.
impl PartialEq for CausalModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.signature == other.signature
            && self.equations == other.equations
    }
}

impl Eq for CausalModel {}

impl CausalModel {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        equations: Vec<(VariableId, Expr)>,
    ) -> Result<Self> {
        let mut slots = HashMap::new();
        for (i, d) in signature.exogenous().iter().enumerate() {
            slots.insert(d.name.clone(), Slot::Exo(i));
        }
        for (i, d) in signature.endogenous().iter().enumerate() {
            slots.insert(d.name.clone(), Slot::Endo(i));
        }
        let n = signature.endogenous().len();
        let mut by_index: Vec<Option<Expr>> = vec![None; n];
        for (name, expr) in &equations {
            match slots.get(name) {
                Some(Slot::Endo(i)) => {
                    if by_index[*i].is_some() {
                        return Err(Error::DuplicateDefinition(name.to_string()));
                    }
                    by_index[*i] = Some(expr.clone());
                }
                Some(Slot::Exo(_)) => {
                    return Err(Error::InvalidModel(format!(
                        "exogenous variable `{name}` cannot have an equation"
                    )))
                }
                None => return Err(Error::UnknownVariable(name.to_string())),
            }
        }
        let mut exprs = Vec::with_capacity(n);
        for (i, e) in by_index.into_iter().enumerate() {
            match e {
                Some(e) => exprs.push(e),
                None => {
                    return Err(Error::InvalidModel(format!(
                        "missing equation for `{}`",
                        signature.endogenous()[i].name
                    )))
                }
            }
        }
        let resolve = |v: &VariableId| slots.get(v).copied();
        let code = exprs
            .iter()
            .map(|e| e.compile(&resolve))
            .collect::<Result<Vec<_>>>()?;
        let named: Vec<(VariableId, Expr)> = signature
            .endogenous()
            .iter()
            .map(|d| d.name.clone())
            .zip(exprs.iter().cloned())
            .collect();
        let order_names = check_recursive(&signature, &named)?;
        let order = order_names
            .iter()
            .map(|v| match slots[v] {
                Slot::Endo(i) => i,
                Slot::Exo(_) => unreachable!(),
            })
            .collect();
        Ok(CausalModel {
            name: name.into(),
            signature,
            equations: exprs,
            code,
            order,
            slots,
            notes: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn endogenous(&self) -> &[VarDecl] {
        self.signature.endogenous()
    }

    pub fn exogenous(&self) -> &[VarDecl] {
        self.signature.exogenous()
    }

    pub fn num_endogenous(&self) -> usize {
        self.signature.endogenous().len()
    }

    /// Equations in declaration order.
    pub fn equations(&self) -> impl Iterator<Item = (&VariableId, &Expr)> {
        self.endogenous()
            .iter()
            .map(|d| &d.name)
            .zip(self.equations.iter())
    }

    pub fn equation(&self, var: &VariableId) -> Option<&Expr> {
        self.endo_index(var).map(|i| &self.equations[i])
    }

    /// Variables in solve order.
    pub fn order(&self) -> Vec<&VariableId> {
        self.order
            .iter()
            .map(|&i| &self.endogenous()[i].name)
            .collect()
    }

    pub fn endo_index(&self, var: &VariableId) -> Option<usize> {
        match self.slots.get(var) {
            Some(Slot::Endo(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn exo_index(&self, var: &VariableId) -> Option<usize> {
        match self.slots.get(var) {
            Some(Slot::Exo(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn is_exogenous(&self, var: &VariableId) -> bool {
        matches!(self.slots.get(var), Some(Slot::Exo(_)))
    }

    /// Index of an endogenous variable given by name.
    pub fn endo(&self, name: &str) -> Result<usize> {
        VariableId::new(name)
            .ok()
            .and_then(|v| self.endo_index(&v))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn var_name(&self, endo_index: usize) -> &VariableId {
        &self.endogenous()[endo_index].name
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn add_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub(crate) fn resolver(&self) -> impl Fn(&VariableId) -> Option<Slot> + '_ {
        move |v| self.slots.get(v).copied()
    }

    /// Context from named values; every exogenous variable must be given.
    pub fn context(&self, values: &[(&str, Value)]) -> Result<Context> {
        let exo = self.exogenous();
        let mut out: Vec<Option<Value>> = vec![None; exo.len()];
        for (name, v) in values {
            let id = VariableId::new(name)?;
            let i = self
                .exo_index(&id)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if !exo[i].range.contains(*v) {
                return Err(Error::ValueOutOfRange {
                    variable: name.to_string(),
                    value: *v,
                });
            }
            if out[i].replace(*v).is_some() {
                return Err(Error::DuplicateDefinition(name.to_string()));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidModel(format!("context does not set `{}`", exo[i].name))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Context)
    }

    /// Context from a dense value vector in declaration order.
    pub fn context_from_values(&self, values: Vec<Value>) -> Result<Context> {
        let ctx = Context(values);
        self.check_context(&ctx)?;
        Ok(ctx)
    }

    pub fn check_context(&self, ctx: &Context) -> Result<()> {
        let exo = self.exogenous();
        if ctx.0.len() != exo.len() {
            return Err(Error::InvalidModel(format!(
                "context has {} values, model has {} exogenous variables",
                ctx.0.len(),
                exo.len()
            )));
        }
        for (d, v) in exo.iter().zip(&ctx.0) {
            if !d.range.contains(*v) {
                return Err(Error::ValueOutOfRange {
                    variable: d.name.to_string(),
                    value: *v,
                });
            }
        }
        Ok(())
    }

    /// Every context, in odometer order over declaration order.
    pub fn contexts(&self) -> impl Iterator<Item = Context> + '_ {
        let ranges: Vec<&[Value]> = self.exogenous().iter().map(|d| d.range.values()).collect();
        Odometer::new(ranges).map(Context)
    }

    /// Every world, in odometer order over declaration order.
    pub fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        let ranges: Vec<&[Value]> = self.endogenous().iter().map(|d| d.range.values()).collect();
        Odometer::new(ranges).map(World)
    }

    pub fn world(&self, values: &[(&str, Value)]) -> Result<World> {
        let n = self.num_endogenous();
        let mut out: Vec<Option<Value>> = vec![None; n];
        for (name, v) in values {
            let i = self.endo(name)?;
            if !self.endogenous()[i].range.contains(*v) {
                return Err(Error::ValueOutOfRange {
                    variable: name.to_string(),
                    value: *v,
                });
            }
            out[i] = Some(*v);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidModel(format!("world does not set `{}`", self.var_name(i)))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(World)
    }

    pub fn check_world(&self, world: &World) -> Result<()> {
        if world.0.len() != self.num_endogenous() {
            return Err(Error::InvalidModel("world arity mismatch".into()));
        }
        for (d, v) in self.endogenous().iter().zip(&world.0) {
            if !d.range.contains(*v) {
                return Err(Error::ValueOutOfRange {
                    variable: d.name.to_string(),
                    value: *v,
                });
            }
        }
        Ok(())
    }

    /// Value of a named endogenous variable in `world`.
    pub fn value(&self, world: &World, name: &str) -> Result<Value> {
        Ok(world.0[self.endo(name)?])
    }

    /// `A=1, B=0, ...` in declaration order.
    pub fn describe(&self, world: &World) -> String {
        self.endogenous()
            .iter()
            .zip(&world.0)
            .map(|(d, v)| format!("{}={v}", d.name))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn describe_context(&self, ctx: &Context) -> String {
        self.exogenous()
            .iter()
            .zip(&ctx.0)
            .map(|(d, v)| format!("{}={v}", d.name))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Dense per-variable overrides for an intervention.
    pub fn overrides(&self, iv: &Intervention) -> Result<Vec<Option<Value>>> {
        let mut out = vec![None; self.num_endogenous()];
        for (var, v) in iv.iter() {
            let i = match self.slots.get(var) {
                Some(Slot::Endo(i)) => *i,
                Some(Slot::Exo(_)) => {
                    return Err(Error::InvalidModel(format!(
                        "cannot intervene on exogenous variable `{var}`"
                    )))
                }
                None => return Err(Error::UnknownVariable(var.to_string())),
            };
            if !self.endogenous()[i].range.contains(v) {
                return Err(Error::ValueOutOfRange {
                    variable: var.to_string(),
                    value: v,
                });
            }
            out[i] = Some(v);
        }
        Ok(out)
    }

    /// The model with each intervened variable's equation replaced by the
    /// constant it is set to.
    pub fn intervene(&self, iv: &Intervention) -> Result<CausalModel> {
        let over = self.overrides(iv)?;
        let equations = self
            .equations()
            .zip(&over)
            .map(|((name, e), o)| {
                (
                    name.clone(),
                    match o {
                        Some(v) => Expr::Const(*v),
                        None => e.clone(),
                    },
                )
            })
            .collect();
        let mut m = CausalModel::new(self.name.clone(), self.signature.clone(), equations)?;
        m.notes = self.notes.clone();
        Ok(m)
    }

    pub fn solve(&self, ctx: &Context) -> Result<World> {
        self.check_context(ctx)?;
        self.solve_dense(ctx, &vec![None; self.num_endogenous()])
    }

    pub fn solve_under(&self, ctx: &Context, iv: &Intervention) -> Result<World> {
        self.check_context(ctx)?;
        let over = self.overrides(iv)?;
        self.solve_dense(ctx, &over)
    }

    /// Solve along the dependency order with `overrides[i]` replacing the
    /// equation of variable `i`. The context and override values are
    /// assumed valid.
    pub(crate) fn solve_dense(&self, ctx: &Context, overrides: &[Option<Value>]) -> Result<World> {
        let mut vals = vec![0; self.num_endogenous()];
        for &i in &self.order {
            vals[i] = match overrides[i] {
                Some(v) => v,
                None => {
                    let v = self.code[i].eval(&ctx.0, &vals);
                    if !self.endogenous()[i].range.contains(v) {
                        return Err(Error::ValueOutOfRange {
                            variable: self.var_name(i).to_string(),
                            value: v,
                        });
                    }
                    v
                }
            };
        }
        Ok(World(vals))
    }

    /// Value variable `i`'s equation assigns given the context and the
    /// values in `world` for every other variable.
    pub(crate) fn equation_value(&self, i: usize, ctx: &Context, world: &World) -> Value {
        self.code[i].eval(&ctx.0, &world.0)
    }
}
