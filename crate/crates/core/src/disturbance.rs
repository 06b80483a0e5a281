//! How an intervening joint measurement changes a conditional prediction.
//!
//! `p_before` is the prediction evaluated in one commuting context holding
//! both the given and the target observables. `p_after` first measures the
//! given observables together with the intervening context on every branch,
//! keeps the branches consistent with the given event, and only then
//! measures the target on each collapsed state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{
    branches, conditional_probability, event_probability, CommutingContext, EventPredicate,
    OutcomeTuple, NULL_PROBABILITY,
};
use crate::scenarios::{LocalQuantity, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub quantity: String,
    pub observable: String,
    pub commutes: bool,
}

/// Commutation of each local quantity with each observable of a context.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CommutationAudit {
    pub entries: Vec<AuditEntry>,
}

impl CommutationAudit {
    pub fn lookup(&self, quantity: &str, observable: &str) -> Option<bool> {
        self.entries
            .iter()
            .find(|e| e.quantity == quantity && e.observable == observable)
            .map(|e| e.commutes)
    }
}

pub fn commutation_audit(
    quantities: &[LocalQuantity],
    ctx: &CommutingContext,
) -> Result<CommutationAudit> {
    let mut entries = Vec::with_capacity(quantities.len() * ctx.len());
    for q in quantities {
        for (label, o) in ctx.labels().iter().zip(ctx.observables()) {
            entries.push(AuditEntry {
                quantity: q.name.clone(),
                observable: label.clone(),
                commutes: q.observable.commutes(o)?,
            });
        }
    }
    Ok(CommutationAudit { entries })
}

/// One first-stage outcome consistent with the given event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchEntry {
    /// Outcomes of the first stage, in `DisturbanceReport::stage_labels` order.
    pub outcomes: OutcomeTuple,
    pub probability: f64,
    /// Probability of the target on this branch's collapsed state.
    pub target_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisturbanceReport {
    pub prediction: String,
    pub p_before: f64,
    pub p_after: f64,
    pub ordering: String,
    pub stage_labels: Vec<String>,
    /// Probability of the given event (and the optional filter) in the first stage.
    pub given_probability: f64,
    pub branches: Vec<BranchEntry>,
}

impl DisturbanceReport {
    pub fn disturbed(&self) -> bool {
        (self.p_before - self.p_after).abs() > 1e-12
    }
}

/// Compares `P(target | given)` before and after an intervening joint
/// measurement. `filter`, when present, keeps only intervening outcomes
/// satisfying it (selective conditioning on the intervening observer's
/// results); without it the intervening stage is non-selective.
pub fn prediction_stability(
    scenario: &Scenario,
    given: &EventPredicate,
    intervening: &CommutingContext,
    target: &EventPredicate,
    filter: Option<&EventPredicate>,
) -> Result<DisturbanceReport> {
    let before_ctx = scenario.context_for(&given.and(target).labels())?;
    let p_before = conditional_probability(&scenario.state, &before_ctx, target, given)?;

    let stage = scenario.context_for(&given.labels())?.extended(intervening)?;
    let given_check = given.compile(&stage)?;
    let filter_check = match filter {
        Some(f) => {
            if let Some(l) = f.labels().into_iter().find(|l| intervening.index_of(l).is_none()) {
                return Err(Error::FilterOutsideContext(l));
            }
            Some(f.compile(&stage)?)
        }
        None => None,
    };
    let target_ctx = scenario.context_for(&target.labels())?;

    let mut entries = Vec::new();
    let mut weight = 0.0;
    let mut weighted = 0.0;
    for b in branches(&scenario.state, &stage)? {
        if !given_check.holds(&b.outcomes) {
            continue;
        }
        if filter_check.as_ref().is_some_and(|f| !f.holds(&b.outcomes)) {
            continue;
        }
        let p_target = event_probability(&b.state, &target_ctx, target)?;
        weight += b.probability;
        weighted += b.probability * p_target;
        entries.push(BranchEntry {
            outcomes: b.outcomes,
            probability: b.probability,
            target_probability: p_target,
        });
    }
    if weight <= NULL_PROBABILITY {
        return Err(Error::ConditioningOnNull(weight));
    }

    let ordering = if intervening.is_empty() {
        format!("measure {{{}}}, then {{{}}}", given.labels().join(", "), target.labels().join(", "))
    } else {
        format!(
            "measure {{{}}} jointly, keep branches with {given}{}, then measure {{{}}}",
            stage.labels().join(", "),
            filter.map(|f| format!(" and {f}")).unwrap_or_default(),
            target_ctx.labels().join(", ")
        )
    };
    Ok(DisturbanceReport {
        prediction: format!("P({target} | {given})"),
        p_before,
        p_after: weighted / weight,
        ordering,
        stage_labels: stage.labels().to_vec(),
        given_probability: weight,
        branches: entries,
    })
}

/// One report per certain conditional prediction that names an intervening
/// measurement.
pub fn loophole_matrix(scenario: &Scenario) -> Result<Vec<DisturbanceReport>> {
    let mut out = Vec::new();
    for row in &scenario.predictions.rows {
        let Some(given) = &row.given else { continue };
        if (row.probability - 1.0).abs() > 1e-12 || row.intervening.is_empty() {
            continue;
        }
        let intervening = scenario.context_for(&row.intervening)?;
        let mut report = prediction_stability(scenario, given, &intervening, &row.target, None)?;
        report.prediction = format!("{} {}", row.name, report.prediction);
        out.push(report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_cabello, build_ghz, build_hardy};

    fn pred(s: &str) -> EventPredicate {
        s.parse().unwrap()
    }

    #[test]
    fn audit_matches_text_claims() {
        let s = build_cabello();
        let bob = s.context_for(&["B2b4", "b2B4"]).unwrap();
        let qs: Vec<LocalQuantity> = ["B2", "B4", "A1"]
            .iter()
            .map(|n| s.quantity(n).unwrap().clone())
            .collect();
        let audit = commutation_audit(&qs, &bob).unwrap();
        assert_eq!(audit.entries.len(), 6);
        assert_eq!(audit.lookup("B2", "B2b4"), Some(true));
        assert_eq!(audit.lookup("B2", "b2B4"), Some(false));
        assert_eq!(audit.lookup("B4", "B2b4"), Some(false));
        assert_eq!(audit.lookup("B4", "b2B4"), Some(true));
        assert_eq!(audit.lookup("A1", "B2b4"), Some(true));
        assert_eq!(audit.lookup("A1", "b2B4"), Some(true));
    }

    #[test]
    fn alice_zz_is_disturbed() {
        let s = build_cabello();
        let bob = s.context_for(&["B2b4", "b2B4"]).unwrap();
        let r = prediction_stability(&s, &pred("A1A3=+1"), &bob, &pred("B2=B4"), None).unwrap();
        assert!((r.p_before - 1.0).abs() < 1e-12);
        assert!((r.p_after - 0.5).abs() < 1e-12);
        assert!((r.given_probability - 0.5).abs() < 1e-12);
        let total: f64 = r.branches.iter().map(|b| b.probability).sum();
        assert!((total - 0.5).abs() < 1e-12);
        assert_eq!(r.branches.len(), 4);
        assert!(r.disturbed());
    }

    #[test]
    fn alice_xx_is_disturbed() {
        let s = build_cabello();
        let bob = s.context_for(&["B2b4", "b2B4"]).unwrap();
        let r = prediction_stability(&s, &pred("a1a3=+1"), &bob, &pred("b2=b4"), None).unwrap();
        assert!((r.p_before - 1.0).abs() < 1e-12);
        assert!((r.p_after - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_intervening_changes_nothing() {
        let s = build_cabello();
        let r = prediction_stability(
            &s,
            &pred("A1A3=+1"),
            &CommutingContext::empty(),
            &pred("B2=B4"),
            None,
        )
        .unwrap();
        assert!((r.p_after - r.p_before).abs() < 1e-12);
        assert!(!r.disturbed());
    }

    #[test]
    fn commuting_intervention_changes_nothing() {
        let s = build_cabello();
        // Z2 and Z4 on Bob's side commute with the target
        let bob = s.context_for(&["B2", "B4"]).unwrap();
        let r = prediction_stability(&s, &pred("A1A3=+1"), &bob, &pred("B2=B4"), None).unwrap();
        assert!((r.p_after - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selective_filter() {
        let s = build_cabello();
        let bob = s.context_for(&["B2b4", "b2B4"]).unwrap();
        let r = prediction_stability(
            &s,
            &pred("A1A3=+1"),
            &bob,
            &pred("B2=B4"),
            Some(&pred("B2b4=+1,b2B4=-1")),
        )
        .unwrap();
        assert_eq!(r.branches.len(), 1);
        assert!((r.p_after - 0.5).abs() < 1e-12);
        assert_eq!(
            prediction_stability(&s, &pred("A1A3=+1"), &bob, &pred("B2=B4"), Some(&pred("A1A3=+1"))),
            Err(Error::FilterOutsideContext("A1A3".into()))
        );
    }

    #[test]
    fn non_commuting_stage_is_rejected() {
        let s = build_cabello();
        let bad = s.context_for(&["B2"]).unwrap();
        assert!(matches!(
            prediction_stability(&s, &pred("b2B4=-1"), &bad, &pred("a1=-A3"), None),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn matrices() {
        let reports = loophole_matrix(&build_cabello()).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert!((r.p_before - 1.0).abs() < 1e-12, "{r:?}");
            assert!((r.p_after - 0.5).abs() < 1e-12, "{r:?}");
        }
        let reports = loophole_matrix(&build_ghz()).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.p_after < 1.0 - 1e-12));
        assert!(loophole_matrix(&build_hardy()).unwrap().is_empty());
    }
}
