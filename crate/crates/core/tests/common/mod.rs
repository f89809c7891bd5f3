//! Random small models and a brute-force cause checker that shares no code
//! with the search engine beyond solving under interventions.

#![allow(dead_code)]

use actualcause::{
    CandidateCause, CausalFormula, CausalModel, Context, Expr, Intervention, Range, Signature,
    Value, VarDecl, VariableId, World,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct RandomCase {
    pub model: CausalModel,
    pub context: Context,
    pub rng: ChaCha8Rng,
}

fn random_expr(rng: &mut impl Rng, inputs: &[String], depth: u32) -> Expr {
    if depth == 0 || inputs.is_empty() || rng.gen_bool(0.3) {
        return match (inputs.is_empty(), rng.gen_range(0..6)) {
            (true, _) | (false, 0) => Expr::int(rng.gen_range(0..2)),
            _ => Expr::var(inputs.choose(rng).unwrap()),
        };
    }
    let op = rng.gen_range(0..4);
    let mut sub = || random_expr(rng, inputs, depth - 1);
    match op {
        0 => sub().not(),
        1 => sub().and(sub()),
        2 => sub().or(sub()),
        _ => sub().equals(sub()),
    }
}

/// A binary model with `1..=max_endo` endogenous and `0..=max_exo`
/// exogenous variables. Each equation reads exogenous variables and
/// variables earlier in a random order; declaration order is shuffled so
/// the solver has to sort.
pub fn random_model(seed: u64, max_endo: usize, max_exo: usize) -> RandomCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_endo = rng.gen_range(1..=max_endo);
    let n_exo = rng.gen_range(0..=max_exo);
    let exo: Vec<String> = (0..n_exo).map(|i| format!("U{i}")).collect();
    let endo: Vec<String> = (0..n_endo).map(|i| format!("V{i}")).collect();
    let mut equations = Vec::new();
    for (i, name) in endo.iter().enumerate() {
        let inputs: Vec<String> = exo.iter().chain(&endo[..i]).cloned().collect();
        let e = random_expr(&mut rng, &inputs, 3);
        equations.push((VariableId::new(name).unwrap(), e));
    }
    equations.shuffle(&mut rng);
    let decls = |names: Vec<String>| -> Vec<VarDecl> {
        names
            .iter()
            .map(|n| VarDecl::new(n, Range::binary()).unwrap())
            .collect()
    };
    let declared: Vec<String> = equations.iter().map(|(v, _)| v.to_string()).collect();
    let signature = Signature::new(decls(exo), decls(declared)).unwrap();
    let model = CausalModel::new(format!("random_{seed}"), signature, equations).unwrap();
    let contexts: Vec<Context> = model.contexts().collect();
    let context = contexts[rng.gen_range(0..contexts.len())].clone();
    RandomCase {
        model,
        context,
        rng,
    }
}

/// Every assignment of values to `vars`, each from its range.
fn assignments(model: &CausalModel, vars: &[usize]) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    for &i in vars {
        let range = model.endogenous()[i].range.values().to_vec();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                range.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Every subset of `items`, as a bit mask walk.
fn all_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}

fn iv(model: &CausalModel, pairs: impl IntoIterator<Item = (usize, Value)>) -> Intervention {
    pairs
        .into_iter()
        .map(|(i, v)| (model.endogenous()[i].name.clone(), v))
        .collect()
}

fn holds(model: &CausalModel, ctx: &Context, setting: &Intervention, phi: &CausalFormula) -> bool {
    let w = model.solve_under(ctx, setting).unwrap();
    phi.holds_in(model, &w).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleRule {
    /// Every subset of the contingency may be reset.
    Updated,
    /// Only the full contingency.
    Original,
}

/// AC1 and AC2 read straight off the definition: some `W`, `w`, `x'` with
/// `[X<-x', W<-w] !phi` and `phi` under `[X<-x, W'<-w, Z'<-z*]` for the
/// required `W'` and every `Z'` outside `X` and `W`. `better` filters
/// witness worlds for the extended rule.
pub fn oracle_ac1_ac2(
    model: &CausalModel,
    ctx: &Context,
    cause: &[(usize, Value)],
    phi: &CausalFormula,
    rule: OracleRule,
    better: &dyn Fn(&World) -> bool,
) -> bool {
    let actual = model.solve(ctx).unwrap();
    let a = actual.values();
    if cause.iter().any(|&(i, x)| a[i] != x) || !phi.holds_in(model, &actual).unwrap() {
        return false;
    }
    let xs: Vec<usize> = cause.iter().map(|&(i, _)| i).collect();
    let rest: Vec<usize> = (0..model.num_endogenous())
        .filter(|i| !xs.contains(i))
        .collect();
    for w_set in all_subsets(&rest) {
        let z_set: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|i| !w_set.contains(i))
            .collect();
        for w in assignments(model, &w_set) {
            for x_alt in assignments(model, &xs) {
                let alt = iv(
                    model,
                    xs.iter()
                        .copied()
                        .zip(x_alt)
                        .chain(w_set.iter().copied().zip(w.clone())),
                );
                let alt_world = model.solve_under(ctx, &alt).unwrap();
                if phi.holds_in(model, &alt_world).unwrap() || !better(&alt_world) {
                    continue;
                }
                let w_primes = match rule {
                    OracleRule::Updated => all_subsets(&(0..w_set.len()).collect::<Vec<_>>()),
                    OracleRule::Original => vec![(0..w_set.len()).collect()],
                };
                let robust = w_primes.iter().all(|keep| {
                    all_subsets(&z_set).iter().all(|z_prime| {
                        let setting = iv(
                            model,
                            cause
                                .iter()
                                .copied()
                                .chain(keep.iter().map(|&k| (w_set[k], w[k])))
                                .chain(z_prime.iter().map(|&z| (z, a[z]))),
                        );
                        holds(model, ctx, &setting, phi)
                    })
                });
                if robust {
                    return true;
                }
            }
        }
    }
    false
}

/// The full definition for a conjunction, with AC3 checked over every
/// strict nonempty subset.
pub fn oracle_is_cause(
    model: &CausalModel,
    ctx: &Context,
    cause: &CandidateCause,
    phi: &CausalFormula,
    rule: OracleRule,
) -> bool {
    let resolved: Vec<(usize, Value)> = cause
        .conjuncts()
        .iter()
        .map(|(v, x)| (model.endo_index(v).unwrap(), *x))
        .collect();
    let any = |_: &World| true;
    if !oracle_ac1_ac2(model, ctx, &resolved, phi, rule, &any) {
        return false;
    }
    let n = resolved.len();
    (1..(1u32 << n) - 1).all(|mask| {
        let sub: Vec<(usize, Value)> = (0..n)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| resolved[k])
            .collect();
        !oracle_ac1_ac2(model, ctx, &sub, phi, rule, &any)
    })
}

/// A random effect: an actual event, or a small boolean combination.
pub fn random_effect(case: &mut RandomCase) -> CausalFormula {
    let model = &case.model;
    let actual = model.solve(&case.context).unwrap();
    let n = model.num_endogenous();
    let event = |rng: &mut ChaCha8Rng, actual_value: bool| {
        let i = rng.gen_range(0..n);
        let v = if actual_value {
            actual.values()[i]
        } else {
            rng.gen_range(0..2)
        };
        CausalFormula::Event(model.endogenous()[i].name.clone(), v)
    };
    match case.rng.gen_range(0..4) {
        0 => event(&mut case.rng, false).or(event(&mut case.rng, true)),
        1 => event(&mut case.rng, true).and(event(&mut case.rng, false).not()),
        _ => event(&mut case.rng, true),
    }
}
