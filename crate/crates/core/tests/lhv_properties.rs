use proptest::prelude::*;
use std::collections::BTreeMap;

use eprlab::disturbance::{commutation_audit, prediction_stability};
use eprlab::lhv::{
    constraints_from_predictions, event_constraint, explain_contradiction, find_models,
    minimal_cores, Consequent, Constraint, ConstraintKind, Parity,
};
use eprlab::measurement::{CommutingContext, EventPredicate, Outcome};
use eprlab::quantum::StateVector;
use eprlab::scenarios::{build_cabello, build_ghz, build_hardy};

const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

type Values = BTreeMap<String, i8>;

/// `None` while some variable of the parity is still unassigned.
fn parity_holds(p: &Parity, v: &Values) -> Option<bool> {
    let mut prod = 1;
    for name in &p.vars {
        prod *= *v.get(name)?;
    }
    Some(prod == p.value.value())
}

fn all_hold(ps: &[Parity], v: &Values) -> Option<bool> {
    let mut out = true;
    for p in ps {
        out &= parity_holds(p, v)?;
    }
    Some(out)
}

fn constraint_holds(c: &Constraint, v: &Values) -> Option<bool> {
    match &c.kind {
        ConstraintKind::Event(ps) => all_hold(ps, v),
        ConstraintKind::Implication {
            antecedent,
            consequent,
        } => {
            let a = all_hold(antecedent, v)?;
            let b = match consequent {
                Consequent::All(ps) => all_hold(ps, v)?,
                Consequent::NotAll(ps) => !all_hold(ps, v)?,
            };
            Some(!a || b)
        }
    }
}

/// Depth-first assignment with pruning as soon as a fully assigned
/// constraint fails.
fn backtrack_count(names: &[String], constraints: &[Constraint]) -> u64 {
    fn go(names: &[String], cs: &[Constraint], v: &mut Values) -> u64 {
        if cs.iter().any(|c| constraint_holds(c, v) == Some(false)) {
            return 0;
        }
        let Some((first, rest)) = names.split_first() else {
            return 1;
        };
        let mut total = 0;
        for value in [1, -1] {
            v.insert(first.clone(), value);
            total += go(rest, cs, v);
        }
        v.remove(first);
        total
    }
    go(names, constraints, &mut Values::new())
}

fn parity() -> impl Strategy<Value = Parity> {
    (prop::collection::vec(0..NAMES.len(), 1..4), any::<bool>()).prop_map(|(idx, neg)| {
        Parity::new(
            idx.into_iter().map(|i| NAMES[i].to_string()).collect(),
            if neg { Outcome::Minus } else { Outcome::Plus },
        )
    })
}

fn constraint() -> impl Strategy<Value = Constraint> {
    let parities = || prop::collection::vec(parity(), 1..3);
    prop_oneof![
        parities().prop_map(|ps| Constraint::event("e", ps)),
        (prop::collection::vec(parity(), 0..3), parities(), any::<bool>()).prop_map(|(a, c, not)| {
            Constraint::implication("i", a, if not { Consequent::NotAll(c) } else { Consequent::All(c) })
        }),
    ]
}

fn constraints() -> impl Strategy<Value = Vec<Constraint>> {
    prop::collection::vec(constraint(), 0..7).prop_map(|cs| {
        cs.into_iter()
            .enumerate()
            .map(|(i, mut c)| {
                c.name = format!("c{i}");
                c
            })
            .collect()
    })
}

fn names() -> Vec<String> {
    NAMES.iter().map(|s| s.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_model_satisfies_every_constraint(cs in constraints()) {
        let r = find_models(&names(), &cs, None).unwrap();
        for m in &r.models {
            for c in &cs {
                prop_assert!(m.satisfies(c));
                let v: Values = m.0.iter().map(|(k, o)| (k.clone(), o.value())).collect();
                prop_assert_eq!(constraint_holds(c, &v), Some(true));
            }
        }
    }

    #[test]
    fn model_count_matches_backtracking(cs in constraints()) {
        let r = find_models(&names(), &cs, None).unwrap();
        prop_assert_eq!(r.searched, 64);
        prop_assert_eq!(r.models.len() as u64, backtrack_count(&names(), &cs));
        prop_assert_eq!(r.contradiction, r.models.is_empty());
    }

    #[test]
    fn adding_a_constraint_never_adds_models(cs in constraints(), extra in constraint()) {
        let before = find_models(&names(), &cs, None).unwrap().models;
        let mut more = cs.clone();
        more.push(extra);
        let after = find_models(&names(), &more, None).unwrap().models;
        prop_assert!(after.len() <= before.len());
        prop_assert!(after.iter().all(|m| before.contains(m)));
    }

    #[test]
    fn cores_are_minimal(cs in constraints()) {
        let r = find_models(&names(), &cs, None).unwrap();
        prop_assume!(r.contradiction);
        let items: Vec<&Constraint> = cs.iter().collect();
        let cores = minimal_cores(&names(), &items).unwrap();
        prop_assert!(!cores.is_empty());
        for core in &cores {
            let chosen: Vec<Constraint> = core.iter().map(|&i| cs[i].clone()).collect();
            prop_assert_eq!(backtrack_count(&names(), &chosen), 0);
            for skip in 0..chosen.len() {
                let mut fewer = chosen.clone();
                fewer.remove(skip);
                prop_assert!(backtrack_count(&names(), &fewer) > 0);
            }
        }
        let x = explain_contradiction(&r, &cs, None).unwrap();
        prop_assert!(x.verified);
        prop_assert!(!x.steps.is_empty());
    }

    #[test]
    fn disturbance_ignores_intervening_order(flip in any::<bool>(), alice in any::<bool>()) {
        let s = build_cabello();
        let (given, target, labels) = if alice {
            ("A1A3=+1", "B2=B4", ["B2b4", "b2B4"])
        } else {
            ("B2b4=+1", "A1=a3", ["A1A3", "a1a3"])
        };
        let order = if flip { [labels[1], labels[0]] } else { labels };
        let given: EventPredicate = given.parse().unwrap();
        let target: EventPredicate = target.parse().unwrap();
        let a = prediction_stability(&s, &given, &s.context_for(&labels).unwrap(), &target, None).unwrap();
        let b = prediction_stability(&s, &given, &s.context_for(&order).unwrap(), &target, None).unwrap();
        prop_assert!((a.p_after - b.p_after).abs() < 1e-12);
        let total: f64 = b.branches.iter().map(|br| br.probability).sum();
        prop_assert!((total - b.given_probability).abs() < 1e-12);
    }

    #[test]
    fn commuting_intervention_leaves_predictions_alone(
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        which in 0usize..3,
    ) {
        let mut s = build_cabello();
        let amps = amps.into_iter().map(|(a, b)| num_complex::Complex64::new(a, b)).collect();
        let Ok((state, _)) = StateVector::normalize(amps) else { return Ok(()) };
        s.state = state;
        let given: EventPredicate = "A1A3=+1".parse().unwrap();
        let target: EventPredicate = "B2=B4".parse().unwrap();
        // each commutes with A1, A3, B2 and B4
        let labels: &[&str] = match which {
            0 => &["B2", "B4"],
            1 => &["A1", "A3"],
            _ => &["A1A3"],
        };
        let ctx = s.context_for(labels).unwrap();
        let audit = commutation_audit(&s.quantities, &ctx).unwrap();
        for q in ["A1", "A3", "B2", "B4"] {
            for l in labels {
                prop_assert_eq!(audit.lookup(q, l), Some(true));
            }
        }
        match prediction_stability(&s, &given, &ctx, &target, None) {
            Ok(r) => prop_assert!((r.p_after - r.p_before).abs() < 1e-9, "{:?}", r),
            Err(eprlab::error::Error::ConditioningOnNull(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn scenario_constraint_sets_match_backtracking() {
    for s in [build_cabello(), build_ghz(), build_hardy()] {
        let mut cs = constraints_from_predictions(&s, &s.predictions).unwrap();
        if let Some(e) = &s.run_event {
            cs.push(event_constraint(&s, e).unwrap());
        }
        let names = s.quantity_names();
        let r = find_models(&names, &cs, None).unwrap();
        assert_eq!(r.models.len() as u64, backtrack_count(&names, &cs), "{}", s.name);
        assert!(r.contradiction, "{}", s.name);
    }
}

#[test]
fn empty_intervening_context_is_neutral() {
    let s = build_ghz();
    for row in s.predictions.rows.iter().filter(|r| r.given.is_some()) {
        let r = prediction_stability(
            &s,
            row.given.as_ref().unwrap(),
            &CommutingContext::empty(),
            &row.target,
            None,
        )
        .unwrap();
        assert!((r.p_after - r.p_before).abs() < 1e-12);
    }
}
