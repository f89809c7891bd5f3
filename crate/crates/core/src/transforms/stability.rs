//! A chain of models in which "is `A=1` a cause of `B=1`?" alternates.
//!
//! `M_0` has `A = B = U`. `M_{2m+1}` adds `X_{m+1} = U` and `M_{2m+2}` adds
//! `Y_{m+1} = X_{m+1}`. In context `U = 0`, `B = 0`. In context `U = 1`,
//! `B = 1` unless
//!
//! - `A = 0` and some paired `X_j = Y_j = 0`, or, in odd models, the
//!   unpaired newest `X` is `0`; or
//! - `A = 1` and some paired `X_j != Y_j`.
//!
//! Each model conservatively extends the previous one; `A=1` causes `B=1`
//! in `(M_n, U=1)` exactly when `n` is odd.

use crate::dsl::ModelDocument;
use crate::error::Result;
use crate::expr::Expr;
use crate::model::{CausalModel, Range, Signature, VarDecl, VariableId};

/// `M_n` with contexts `u0` (`U = 0`) and `u1` (`U = 1`).
pub fn build_stability_model(n: usize) -> Result<ModelDocument> {
    let xs = n.div_ceil(2);
    let ys = n / 2;
    let name = |s: String| VariableId::new(&s).expect("generated name");
    let xname = |j: usize| name(format!("X{j}"));
    let yname = |j: usize| name(format!("Y{j}"));

    let mut decls = vec![name("A".into()), name("B".into())];
    decls.extend((1..=xs).map(xname));
    decls.extend((1..=ys).map(yname));

    let u = || Expr::var("U");
    let is = |v: VariableId, x| Expr::is(&v, x);
    let b_eq = if n == 0 {
        u()
    } else {
        // Pairs (X_j, Y_j) for j <= ys; in odd models X_xs is unpaired.
        let both_zero = (1..=ys).map(|j| is(xname(j), 0).and(is(yname(j), 0)));
        let differ =
            (1..=ys).map(|j| Expr::var(xname(j).as_str()).not_equals(Expr::var(yname(j).as_str())));
        let mut low = Vec::new();
        if n % 2 == 1 {
            low.push(is(xname(xs), 0));
        }
        low.extend(both_zero);
        let a0 = is(name("A".into()), 0).and(Expr::any(low));
        let a1 = is(name("A".into()), 1).and(Expr::any(differ));
        let cond = if ys == 0 { a0 } else { a0.or(a1) };
        Expr::case(
            vec![
                (u().equals(Expr::int(0)), Expr::int(0)),
                (cond, Expr::int(0)),
            ],
            Expr::int(1),
        )
    };

    let mut equations = Vec::new();
    for v in &decls {
        let e = match v.as_str() {
            "A" => u(),
            "B" => b_eq.clone(),
            s if s.starts_with('X') => u(),
            s => Expr::var(&format!("X{}", &s[1..])),
        };
        equations.push((v.clone(), e));
    }
    let signature = Signature::new(
        vec![VarDecl::new("U", Range::binary())?],
        decls
            .into_iter()
            .map(|name| VarDecl {
                name,
                range: Range::binary(),
            })
            .collect(),
    )?;
    let model = CausalModel::new(format!("stability_{n}"), signature, equations)?;
    let u0 = model.context(&[("U", 0)])?;
    let u1 = model.context(&[("U", 1)])?;
    Ok(ModelDocument {
        model,
        contexts: vec![("u0".into(), u0), ("u1".into(), u1)],
        normality: None,
    })
}
