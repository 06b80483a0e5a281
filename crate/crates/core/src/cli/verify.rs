use super::report::{prob_text, Check, PREDICTION_TOLERANCE};
use crate::disturbance::loophole_matrix;
use crate::lhv::{constraints_from_predictions, event_constraint, find_models, reduced_cabello};
use crate::measurement::{branches, Outcome};
use crate::quantum::PauliString;
use crate::scenarios::{optimize_hardy_angle, Scenario, HARDY_OPTIMAL_PROBABILITY};

/// Agreement required between the frozen Hardy optimum and a fresh sweep.
pub const HARDY_FIXTURE_TOLERANCE: f64 = 1e-6;

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn failed(name: impl Into<String>, e: impl std::fmt::Display) -> Check {
    check(name, false, format!("error: {e}"))
}

/// Every check for one scenario: structure, each stored prediction, the
/// joint-context stabilizer, hidden-variable model counts, disturbance of
/// the certain predictions and, for Hardy, the frozen optimum.
pub fn verify_scenario(scenario: &Scenario) -> Vec<Check> {
    let mut out = Vec::new();

    let violations = scenario.structure_violations();
    out.push(check(
        "structure",
        violations.is_empty(),
        if violations.is_empty() {
            "every quantity is local and every composite is the product of its factors".to_string()
        } else {
            violations.join("; ")
        },
    ));

    for row in &scenario.predictions.rows {
        let name = format!("prediction {}", row.name);
        out.push(match scenario.evaluate_row(row) {
            Ok(p) => {
                let dev = (p - row.probability).abs();
                check(
                    name,
                    dev <= PREDICTION_TOLERANCE,
                    format!("{row} = {} (stored {})", prob_text(p), prob_text(row.probability)),
                )
            }
            Err(e) => failed(name, e),
        });
    }

    if let Some(c) = stabilizer_check(scenario) {
        out.push(c);
    }

    out.push(lhv_check(scenario));
    if scenario.name == "cabello" {
        out.push(match reduced_cabello(scenario).and_then(|(cs, ev)| {
            find_models(&scenario.quantity_names(), &cs, Some(&ev))
        }) {
            Ok(r) => check(
                "lhv reduced",
                r.models.len() == 16,
                format!("{} models of {} (expected 16)", r.models.len(), r.searched),
            ),
            Err(e) => failed("lhv reduced", e),
        });
    }

    match loophole_matrix(scenario) {
        Ok(reports) => {
            for r in reports {
                let pass = (r.p_before - 1.0).abs() <= PREDICTION_TOLERANCE
                    && r.p_after < r.p_before - PREDICTION_TOLERANCE;
                out.push(check(
                    format!("disturbance {}", r.prediction.split(' ').next().unwrap_or("")),
                    pass,
                    format!(
                        "before {}, after {}",
                        prob_text(r.p_before),
                        prob_text(r.p_after)
                    ),
                ));
            }
        }
        Err(e) => out.push(failed("disturbance", e)),
    }

    if scenario.name == "hardy" {
        let (angle, p) = optimize_hardy_angle();
        out.push(check(
            "hardy optimum",
            (p - HARDY_OPTIMAL_PROBABILITY).abs() <= HARDY_FIXTURE_TOLERANCE,
            format!("sweep {p} at angle {angle}, fixture {HARDY_OPTIMAL_PROBABILITY}"),
        ));
    }
    out
}

/// When the joint context is all Pauli strings, their product `P` must have
/// `<P> = ±1` and every observed tuple must multiply to that sign.
fn stabilizer_check(scenario: &Scenario) -> Option<Check> {
    let ctx = scenario.joint().ok()?;
    let mut product: Option<PauliString> = None;
    for o in ctx.observables() {
        let p = o.as_pauli()?;
        product = Some(match product {
            None => p,
            Some(acc) => acc.product(&p).ok()?,
        });
    }
    let product = product?;
    let name = "stabilizer";
    let e = match product.expectation(&scenario.state) {
        Ok(e) => e,
        Err(err) => return Some(failed(name, err)),
    };
    let sign = if e > 0.0 { Outcome::Plus } else { Outcome::Minus };
    let bs = match branches(&scenario.state, &ctx) {
        Ok(bs) => bs,
        Err(err) => return Some(failed(name, err)),
    };
    let agree = bs.iter().filter(|b| b.outcomes.product() == sign).count();
    Some(check(
        name,
        (e.abs() - 1.0).abs() <= PREDICTION_TOLERANCE && agree == bs.len(),
        format!(
            "<{product}> = {}, outcome product {sign} on {agree} of {} tuples",
            prob_text(e),
            bs.len()
        ),
    ))
}

fn lhv_check(scenario: &Scenario) -> Check {
    let name = "lhv";
    let run = || -> crate::error::Result<Check> {
        let cs = constraints_from_predictions(scenario, &scenario.predictions)?;
        let ev = scenario
            .run_event
            .as_ref()
            .map(|e| event_constraint(scenario, e))
            .transpose()?;
        let r = find_models(&scenario.quantity_names(), &cs, ev.as_ref())?;
        Ok(check(
            name,
            r.models.is_empty(),
            format!("{} models of {} (expected 0)", r.models.len(), r.searched),
        ))
    };
    run().unwrap_or_else(|e| failed(name, e))
}
