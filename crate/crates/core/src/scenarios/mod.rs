//! Canonical states, local quantities and prediction tables for the
//! Cabello, GHZ and Hardy arguments.

mod cabello;
mod ghz;
mod hardy;

pub use cabello::build_cabello;
pub use ghz::build_ghz;
pub use hardy::{
    build_hardy, hardy_at_angle, hardy_probability, optimize_hardy_angle, HARDY_OPTIMAL_ANGLE,
    HARDY_OPTIMAL_PROBABILITY, HARDY_SWEEP_STEP,
};

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::measurement::{conditional_probability, event_probability, CommutingContext, EventPredicate};
use crate::quantum::{Observable, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A `±1`-valued single-site quantity measured by one party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalQuantity {
    pub name: String,
    pub party: Party,
    pub observable: Observable,
}

/// A product of local quantities measured as one observable, e.g.
/// `A1A3 = A1·A3 ↦ Z⊗I⊗Z⊗I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Composite {
    pub label: String,
    pub factors: Vec<String>,
    pub observable: Observable,
}

/// `P(target | given) = probability`; unconditional when `given` is `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub name: String,
    pub target: EventPredicate,
    pub given: Option<EventPredicate>,
    pub probability: f64,
    /// Labels the other parties measure in the joint run this prediction is
    /// used in. Empty when the row is not tied to such a run.
    pub intervening: Vec<String>,
}

impl PredictionRow {
    pub fn new(name: &str, target: &str, given: Option<&str>, probability: f64) -> Self {
        Self {
            name: name.to_string(),
            target: target.parse().expect("static predicate"),
            given: given.map(|g| g.parse().expect("static predicate")),
            probability,
            intervening: Vec::new(),
        }
    }

    pub fn with_intervening(mut self, labels: &[&str]) -> Self {
        self.intervening = labels.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Given-event labels first, then any new target labels.
    pub fn labels(&self) -> Vec<String> {
        let given = self.given.clone().unwrap_or_default();
        given.and(&self.target).labels()
    }
}

impl fmt::Display for PredictionRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.given {
            Some(g) => write!(f, "P({} | {})", self.target, g),
            None => write!(f, "P({})", self.target),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct PredictionTable {
    pub rows: Vec<PredictionRow>,
}

impl PredictionTable {
    pub fn row(&self, name: &str) -> Option<&PredictionRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub state: StateVector,
    /// Owner of each qubit.
    pub owners: Vec<Party>,
    pub quantities: Vec<LocalQuantity>,
    pub composites: Vec<Composite>,
    pub predictions: PredictionTable,
    /// Labels of the scenario's main joint measurement.
    pub joint_context: Vec<String>,
    /// Event of a single run used for the element-of-reality check, if any.
    pub run_event: Option<EventPredicate>,
}

pub const SCENARIO_NAMES: [&str; 3] = ["cabello", "ghz", "hardy"];

impl Scenario {
    pub fn by_name(name: &str) -> Option<Scenario> {
        match name {
            "cabello" => Some(build_cabello()),
            "ghz" => Some(build_ghz()),
            "hardy" => Some(build_hardy()),
            _ => None,
        }
    }

    pub fn quantity(&self, name: &str) -> Option<&LocalQuantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn composite(&self, label: &str) -> Option<&Composite> {
        self.composites.iter().find(|c| c.label == label)
    }

    pub fn observable(&self, label: &str) -> Option<&Observable> {
        self.quantity(label)
            .map(|q| &q.observable)
            .or_else(|| self.composite(label).map(|c| &c.observable))
    }

    /// The local quantities whose product a label stands for.
    pub fn factors(&self, label: &str) -> Option<Vec<String>> {
        if self.quantity(label).is_some() {
            return Some(vec![label.to_string()]);
        }
        self.composite(label).map(|c| c.factors.clone())
    }

    pub fn quantity_names(&self) -> Vec<String> {
        self.quantities.iter().map(|q| q.name.clone()).collect()
    }

    /// Validated commuting context over the named observables.
    pub fn context_for<S: AsRef<str>>(&self, labels: &[S]) -> Result<CommutingContext> {
        let observables = labels
            .iter()
            .map(|l| {
                self.observable(l.as_ref())
                    .cloned()
                    .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        CommutingContext::new(
            observables,
            labels.iter().map(|l| l.as_ref().to_string()).collect(),
        )
    }

    pub fn joint(&self) -> Result<CommutingContext> {
        self.context_for(&self.joint_context)
    }

    /// Context in which a row is evaluated: its given and target labels.
    pub fn row_context(&self, row: &PredictionRow) -> Result<CommutingContext> {
        self.context_for(&row.labels())
            .map_err(|e| Error::ContextConstructionFailure {
                row: row.name.clone(),
                source: Box::new(e),
            })
    }

    /// Probability of a row recomputed from the state.
    pub fn evaluate_row(&self, row: &PredictionRow) -> Result<f64> {
        let ctx = self.row_context(row)?;
        match &row.given {
            Some(given) => conditional_probability(&self.state, &ctx, &row.target, given),
            None => event_probability(&self.state, &ctx, &row.target),
        }
    }

    /// Locality and factorization violations; empty for a well-formed scenario.
    pub fn structure_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for q in &self.quantities {
            let support = q.observable.support();
            match support.as_slice() {
                [site] if self.owners.get(*site) == Some(&q.party) => {}
                _ => out.push(format!(
                    "{} is not local to {} (support {support:?})",
                    q.name, q.party
                )),
            }
        }
        for c in &self.composites {
            let mut product: Option<Observable> = None;
            for f in &c.factors {
                let Some(q) = self.quantity(f) else {
                    out.push(format!("{}: unknown factor {f}", c.label));
                    continue;
                };
                product = Some(match product {
                    None => q.observable.clone(),
                    Some(p) => match multiply(&p, &q.observable) {
                        Ok(r) => r,
                        Err(e) => {
                            out.push(format!("{}: {e}", c.label));
                            p
                        }
                    },
                });
            }
            if product.as_ref() != Some(&c.observable) {
                out.push(format!(
                    "{} does not equal the product of {:?}",
                    c.label, c.factors
                ));
            }
        }
        out
    }
}

fn multiply(a: &Observable, b: &Observable) -> Result<Observable> {
    match (a.as_pauli(), b.as_pauli()) {
        (Some(p), Some(q)) => p.product(&q).map(Observable::from),
        _ => a.joined(b),
    }
}

/// A stored prediction next to its recomputed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowCheck {
    pub name: String,
    pub row: String,
    pub stored: f64,
    pub computed: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCheck {
    pub rows: Vec<RowCheck>,
    pub max_deviation: f64,
}

/// Recomputes every row of the scenario's table from its state.
pub fn prediction_table(scenario: &Scenario) -> Result<TableCheck> {
    let mut rows = Vec::with_capacity(scenario.predictions.rows.len());
    let mut max_deviation = 0.0f64;
    for row in &scenario.predictions.rows {
        let computed = scenario.evaluate_row(row)?;
        let deviation = (computed - row.probability).abs();
        max_deviation = max_deviation.max(deviation);
        rows.push(RowCheck {
            name: row.name.clone(),
            row: row.to_string(),
            stored: row.probability,
            computed,
            deviation,
        });
    }
    Ok(TableCheck {
        rows,
        max_deviation,
    })
}
