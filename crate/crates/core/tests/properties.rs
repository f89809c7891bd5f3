mod common;

use actualcause::dsl::{self, print_model, ModelDocument};
use actualcause::transforms::{
    is_conservative_extension, kill_all_witnesses, kill_witness, normality_from_respect,
    random_formula, respects_equations,
};
use actualcause::{
    check_ac2a, check_ac2b, eval_formula, find_all_causes, is_actual_cause, BinOp, CandidateCause,
    CausalFormula, CausalModel, Context, Error, Expr, ExtendedCausalModel, RuleVariant, Signature,
    VariableId, Witness,
};
use common::{oracle_ac1_ac2, oracle_is_cause, random_effect, random_model, OracleRule};
use proptest::prelude::*;
use rand::Rng;

fn singletons(model: &CausalModel, ctx: &actualcause::Context) -> Vec<CandidateCause> {
    let actual = model.solve(ctx).unwrap();
    model
        .endogenous()
        .iter()
        .zip(actual.values())
        .map(|(d, &v)| CandidateCause::new([(d.name.clone(), v)]).unwrap())
        .collect()
}

/// The same model with its declarations in reverse order.
fn reversed(model: &CausalModel) -> CausalModel {
    let mut endo = model.endogenous().to_vec();
    endo.reverse();
    let mut eqs: Vec<_> = model
        .equations()
        .map(|(v, e)| (v.clone(), e.clone()))
        .collect();
    eqs.reverse();
    let sig = Signature::new(model.exogenous().to_vec(), endo).unwrap();
    CausalModel::new(model.name(), sig, eqs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairs_agree_with_the_oracle(seed in any::<u64>()) {
        let mut case = random_model(seed, 4, 2);
        let phi = random_effect(&mut case);
        let m = &case.model;
        let actual = m.solve(&case.context).unwrap();
        let n = m.num_endogenous();
        let i = case.rng.gen_range(0..n);
        let j = case.rng.gen_range(0..n);
        prop_assume!(i != j);
        let cause = CandidateCause::new([
            (m.endogenous()[i].name.clone(), actual.values()[i]),
            (m.endogenous()[j].name.clone(), actual.values()[j]),
        ]).unwrap();
        for (variant, rule) in [
            (RuleVariant::Updated, OracleRule::Updated),
            (RuleVariant::Original, OracleRule::Original),
        ] {
            let got = is_actual_cause(m, &case.context, &cause, &phi, variant).unwrap().is_cause;
            prop_assert_eq!(got, oracle_is_cause(m, &case.context, &cause, &phi, rule));
        }
    }

    #[test]
    fn extended_respects_the_order(seed in any::<u64>()) {
        // Rank each world by how many variables are 1; the oracle filters
        // witness worlds by the same ranks.
        let mut case = random_model(seed, 4, 2);
        let phi = random_effect(&mut case);
        let m = &case.model;
        let rules = dsl::parse_expr(
            &m.endogenous().iter().map(|d| d.name.to_string()).collect::<Vec<_>>().join(" + "),
        ).unwrap();
        let order = actualcause::NormalityOrder::Ranked(actualcause::Ranking::Rules {
            rules: (1..=m.num_endogenous() as i64)
                .rev()
                .map(|k| (Expr::binary(BinOp::Ge, rules.clone(), Expr::int(k)), k))
                .collect(),
            default: 0,
        });
        let ext = ExtendedCausalModel::new(m.clone(), order).unwrap();
        let actual = m.solve(&case.context).unwrap();
        for cause in singletons(m, &case.context) {
            let got = is_actual_cause(&ext, &case.context, &cause, &phi, RuleVariant::Extended)
                .unwrap()
                .is_cause;
            let idx = vec![(m.endo_index(&cause.conjuncts()[0].0).unwrap(), cause.conjuncts()[0].1)];
            let better = |s: &actualcause::World| ext.at_least_as_normal(s, &actual);
            let want = oracle_ac1_ac2(m, &case.context, &idx, &phi, OracleRule::Updated, &better);
            prop_assert_eq!(got, want, "{} on {}", cause, phi);
        }
    }

    #[test]
    fn flat_extended_matches_updated(seed in any::<u64>()) {
        let mut case = random_model(seed, 5, 2);
        let phi = random_effect(&mut case);
        let ext = ExtendedCausalModel::flat(case.model.clone());
        for cause in singletons(&case.model, &case.context) {
            let a = is_actual_cause(&case.model, &case.context, &cause, &phi, RuleVariant::Updated).unwrap();
            let b = is_actual_cause(&ext, &case.context, &cause, &phi, RuleVariant::Extended).unwrap();
            prop_assert_eq!(a.is_cause, b.is_cause);
            prop_assert_eq!(a.witnesses, b.witnesses);
        }
    }

    #[test]
    fn updated_causes_are_original_causes(seed in any::<u64>()) {
        let mut case = random_model(seed, 5, 2);
        let phi = random_effect(&mut case);
        let (m, u) = (&case.model, &case.context);
        for cause in singletons(m, u) {
            let v = is_actual_cause(m, u, &cause, &phi, RuleVariant::Updated).unwrap();
            if v.is_cause {
                prop_assert!(is_actual_cause(m, u, &cause, &phi, RuleVariant::Original).unwrap().is_cause);
                for w in &v.witnesses {
                    prop_assert!(check_ac2a(m, u, &cause, &phi, w, RuleVariant::Original).unwrap());
                    prop_assert!(check_ac2b(m, u, &cause, &phi, w, RuleVariant::Original).unwrap());
                }
            }
        }
    }

    #[test]
    fn found_causes_are_minimal(seed in any::<u64>()) {
        let mut case = random_model(seed, 5, 1);
        let phi = random_effect(&mut case);
        let (m, u) = (&case.model, &case.context);
        for variant in [RuleVariant::Updated, RuleVariant::Original] {
            let rule = if variant == RuleVariant::Updated { OracleRule::Updated } else { OracleRule::Original };
            for (cause, v) in find_all_causes(m, u, &phi, variant).unwrap() {
                prop_assert!(v.is_cause);
                let idx: Vec<_> = cause.conjuncts().iter()
                    .map(|(x, val)| (m.endo_index(x).unwrap(), *val))
                    .collect();
                let any = |_: &actualcause::World| true;
                for k in 0..idx.len() {
                    if idx.len() == 1 { break; }
                    let mut sub = idx.clone();
                    sub.remove(k);
                    prop_assert!(!oracle_ac1_ac2(m, u, &sub, &phi, rule, &any), "{} is not minimal", cause);
                }
                if variant == RuleVariant::Original {
                    prop_assert_eq!(cause.len(), 1);
                }
            }
        }
    }

    #[test]
    fn verdicts_ignore_declaration_order(seed in any::<u64>()) {
        let mut case = random_model(seed, 5, 2);
        let phi = random_effect(&mut case);
        let flipped = reversed(&case.model);
        for cause in singletons(&case.model, &case.context) {
            for variant in [RuleVariant::Updated, RuleVariant::Original] {
                let a = is_actual_cause(&case.model, &case.context, &cause, &phi, variant).unwrap();
                let b = is_actual_cause(&flipped, &case.context, &cause, &phi, variant).unwrap();
                prop_assert_eq!(a.is_cause, b.is_cause);
                prop_assert_eq!(a.failure.map(|f| f.condition), b.failure.map(|f| f.condition));
            }
        }
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let case = random_model(seed, 5, 2);
        let mut doc = ModelDocument::new(case.model.clone());
        doc.contexts.push(("u".into(), case.context.clone()));
        let text = print_model(&doc);
        let again = dsl::parse_model(&text).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(print_model(&again), text);
    }

    #[test]
    fn boolean_identities_hold(seed in any::<u64>()) {
        let mut case = random_model(seed, 5, 2);
        let m = case.model.clone();
        let f = random_formula(&m, &mut case.rng, 2);
        let g = random_formula(&m, &mut case.rng, 2);
        for u in m.contexts() {
            let e = |h: &CausalFormula| eval_formula(&m, &u, h).unwrap();
            prop_assert_eq!(e(&f.clone().and(g.clone()).not()), e(&f.clone().not().or(g.clone().not())));
            prop_assert_eq!(e(&f.clone().or(g.clone()).not()), e(&f.clone().not().and(g.clone().not())));
            prop_assert_eq!(e(&f.clone().not().not()), e(&f));
        }
    }

    #[test]
    fn killing_witnesses_is_conservative(seed in any::<u64>()) {
        let case = random_model(seed, 4, 1);
        for (m_prime, m, u, cause, phi, w) in kills(&case) {
            prop_assert!(is_conservative_extension(&m_prime, &m).unwrap().is_conservative);
            // The killed witness fails in the new model.
            prop_assert!(!check_ac2b(&m_prime, &u, &cause, &phi, &w, RuleVariant::Original).unwrap());
            // Witnesses for the same cause in the new model, restricted to
            // the old variables, are witnesses in the old model.
            let v = is_actual_cause(&m_prime, &u, &cause, &phi, RuleVariant::Original).unwrap();
            for w2 in &v.witnesses {
                let restricted = Witness::new(
                    w2.contingency().iter()
                        .filter(|(name, _)| m.endo_index(name).is_some())
                        .map(|(name, val)| (name.clone(), val)),
                    w2.alt_cause_values.clone(),
                );
                prop_assert!(check_ac2a(&m, &u, &cause, &phi, &restricted, RuleVariant::Original).unwrap());
                prop_assert!(check_ac2b(&m, &u, &cause, &phi, &restricted, RuleVariant::Original).unwrap());
            }
        }
    }

    #[test]
    fn respect_orders_respect(seed in any::<u64>(), mask in 1u32..32) {
        let case = random_model(seed, 5, 2);
        let m = &case.model;
        let vars: Vec<_> = m.endogenous().iter().enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, d)| d.name.clone())
            .collect();
        let order = normality_from_respect(m, &case.context, &vars).unwrap();
        let ext = ExtendedCausalModel::new(m.clone(), order).unwrap();
        prop_assert!(respects_equations(&ext, &case.context, &vars).unwrap().respects);
    }
}

type Kill = (
    CausalModel,
    CausalModel,
    Context,
    CandidateCause,
    CausalFormula,
    Witness,
);

/// Every single-witness kill the construction accepts on `case`, for each
/// actual event as the effect and each actual singleton as the cause.
fn kills(case: &common::RandomCase) -> Vec<Kill> {
    let (m, u) = (&case.model, &case.context);
    let actual = m.solve(u).unwrap();
    let fresh = VariableId::new("NW").unwrap();
    let mut out = Vec::new();
    for (yi, y) in m.endogenous().iter().enumerate() {
        let phi = CausalFormula::Event(y.name.clone(), actual.values()[yi]);
        for cause in singletons(m, u) {
            let v = is_actual_cause(m, u, &cause, &phi, RuleVariant::Original).unwrap();
            for w in v.witnesses {
                match kill_witness(m, u, &cause, (&y.name, actual.values()[yi]), &w, &fresh) {
                    Ok(m_prime) => {
                        out.push((m_prime, m.clone(), u.clone(), cause.clone(), phi.clone(), w));
                        break;
                    }
                    Err(Error::PreconditionViolated(_) | Error::WitnessEqualsActual) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
    out
}

#[test]
fn killing_applies_to_random_models() {
    let mut single = 0;
    let mut all = 0;
    for seed in 0..300 {
        let case = random_model(seed, 4, 1);
        single += kills(&case).len();
        let (m, u) = (&case.model, &case.context);
        let actual = m.solve(u).unwrap();
        for (yi, y) in m.endogenous().iter().enumerate() {
            let phi = CausalFormula::Event(y.name.clone(), actual.values()[yi]);
            for cause in singletons(m, u) {
                if let Ok(out) = kill_all_witnesses(m, u, &cause, (&y.name, actual.values()[yi])) {
                    all += 1;
                    assert!(
                        is_conservative_extension(&out.model, m)
                            .unwrap()
                            .is_conservative
                    );
                    assert!(
                        !is_actual_cause(&out.model, u, &cause, &phi, RuleVariant::Original)
                            .unwrap()
                            .is_cause
                    );
                }
            }
        }
    }
    assert!(single >= 50, "only {single} single kills");
    assert!(all >= 1, "no query reached the full construction");
}
