//! Elements of reality as deterministic `±1` assignments.
//!
//! Probability-1 predictions become implications between products of local
//! quantities, probability-0 predictions become implications to a negated
//! conjunction, and every assignment of the quantities is checked against
//! them exhaustively.

mod explain;

pub use explain::{explain_contradiction, minimal_cores, Explanation};

use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::measurement::{Atom, CommutingContext, EventPredicate, Outcome};
use crate::scenarios::{PredictionTable, Scenario};

/// Exhaustive search bound.
pub const MAX_QUANTITIES: usize = 24;

const CERTAIN: f64 = 1e-12;

/// `∏ vars = value`. Repeated variables cancel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Parity {
    pub vars: Vec<String>,
    pub value: Outcome,
}

impl Parity {
    pub fn new(vars: Vec<String>, value: Outcome) -> Self {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for v in vars {
            *counts.entry(v).or_default() += 1;
        }
        let vars = counts
            .into_iter()
            .filter(|(_, c)| c % 2 == 1)
            .map(|(v, _)| v)
            .collect();
        Self { vars, value }
    }

    pub fn negated(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            value: self.value.flip(),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            write!(f, "1")?;
        } else {
            write!(f, "{}", self.vars.join("·"))?;
        }
        write!(f, " = {}", self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Consequent {
    /// Every parity holds.
    All(Vec<Parity>),
    /// Not every parity holds.
    NotAll(Vec<Parity>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    /// `antecedent ⇒ consequent`; an empty antecedent always fires.
    Implication {
        antecedent: Vec<Parity>,
        consequent: Consequent,
    },
    /// The outcomes of one measured run.
    Event(Vec<Parity>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Readable form in measurement labels, e.g. `A1A3=+1 ⇒ B2=B4`.
    pub text: String,
    pub kind: ConstraintKind,
    /// The measurement context the underlying prediction was computed in.
    pub context: Option<CommutingContext>,
}

impl Constraint {
    pub fn implication(name: &str, antecedent: Vec<Parity>, consequent: Consequent) -> Self {
        let show = |ps: &[Parity]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        let rhs = match &consequent {
            Consequent::All(ps) => show(ps),
            Consequent::NotAll(ps) => format!("not ({})", show(ps)),
        };
        Self {
            name: name.to_string(),
            text: if antecedent.is_empty() {
                rhs
            } else {
                format!("{} ⇒ {rhs}", show(&antecedent))
            },
            kind: ConstraintKind::Implication {
                antecedent,
                consequent,
            },
            context: None,
        }
    }

    pub fn event(name: &str, parities: Vec<Parity>) -> Self {
        let text = parities
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        Self {
            name: name.to_string(),
            text,
            kind: ConstraintKind::Event(parities),
            context: None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.name, self.text)
    }
}

/// A total `±1` assignment, keyed by quantity name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<String, Outcome>);

impl Assignment {
    pub fn get(&self, name: &str) -> Option<Outcome> {
        self.0.get(name).copied()
    }

    pub fn satisfies(&self, constraint: &Constraint) -> bool {
        let holds = |p: &Parity| {
            p.vars
                .iter()
                .map(|v| self.0[v])
                .fold(Outcome::Plus, |a, b| a * b)
                == p.value
        };
        match &constraint.kind {
            ConstraintKind::Event(ps) => ps.iter().all(holds),
            ConstraintKind::Implication {
                antecedent,
                consequent,
            } => {
                !antecedent.iter().all(holds)
                    || match consequent {
                        Consequent::All(ps) => ps.iter().all(holds),
                        Consequent::NotAll(ps) => !ps.iter().all(holds),
                    }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    /// Quantity names in enumeration order (sorted).
    pub quantities: Vec<String>,
    pub searched: u64,
    #[serde(serialize_with = "count_only")]
    pub models: Vec<Assignment>,
    pub contradiction: bool,
    /// Some pair of constraints was derived in contexts that cannot be
    /// measured jointly.
    pub mixes_incompatible_contexts: bool,
}

fn count_only<S: Serializer>(models: &[Assignment], s: S) -> Result<S::Ok, S::Error> {
    // model lists can reach 2^24 entries; the cli prints them separately
    s.serialize_u64(models.len() as u64)
}

/// A parity over sorted quantity indices: bit `k - 1 - j` stands for quantity `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mask {
    pub bits: u32,
    pub odd: bool,
}

impl Mask {
    fn holds(self, assignment: u32) -> bool {
        ((assignment & self.bits).count_ones() % 2 == 1) == self.odd
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Implication {
        antecedent: Vec<Mask>,
        consequent: Vec<Mask>,
        negated: bool,
    },
    Event(Vec<Mask>),
}

impl Compiled {
    pub(crate) fn holds(&self, a: u32) -> bool {
        match self {
            Compiled::Event(ms) => ms.iter().all(|m| m.holds(a)),
            Compiled::Implication {
                antecedent,
                consequent,
                negated,
            } => !antecedent.iter().all(|m| m.holds(a)) || (consequent.iter().all(|m| m.holds(a)) != *negated),
        }
    }
}

/// Sorted, deduplicated quantity names with a bit position for each.
#[derive(Debug, Clone)]
pub(crate) struct Space {
    pub names: Vec<String>,
}

impl Space {
    pub(crate) fn new(quantities: &[String]) -> Result<Self> {
        let mut names = quantities.to_vec();
        names.sort();
        names.dedup();
        if names.len() > MAX_QUANTITIES {
            return Err(Error::TooManyQuantities(names.len()));
        }
        Ok(Self { names })
    }

    pub(crate) fn size(&self) -> u64 {
        1u64 << self.names.len()
    }

    pub(crate) fn bit(&self, name: &str) -> Result<u32> {
        let j = self
            .names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| Error::UnknownQuantity(name.to_string()))?;
        Ok(1 << (self.names.len() - 1 - j))
    }

    pub(crate) fn mask(&self, p: &Parity) -> Result<Mask> {
        let mut bits = 0;
        for v in &p.vars {
            bits ^= self.bit(v)?;
        }
        Ok(Mask {
            bits,
            odd: p.value == Outcome::Minus,
        })
    }

    pub(crate) fn compile(&self, c: &Constraint) -> Result<Compiled> {
        let masks = |ps: &[Parity]| ps.iter().map(|p| self.mask(p)).collect::<Result<Vec<_>>>();
        Ok(match &c.kind {
            ConstraintKind::Event(ps) => Compiled::Event(masks(ps)?),
            ConstraintKind::Implication {
                antecedent,
                consequent,
            } => {
                let (ps, negated) = match consequent {
                    Consequent::All(ps) => (ps, false),
                    Consequent::NotAll(ps) => (ps, true),
                };
                Compiled::Implication {
                    antecedent: masks(antecedent)?,
                    consequent: masks(ps)?,
                    negated,
                }
            }
        })
    }

    pub(crate) fn assignment(&self, a: u32) -> Assignment {
        let k = self.names.len();
        Assignment(
            self.names
                .iter()
                .enumerate()
                .map(|(j, n)| {
                    let minus = a >> (k - 1 - j) & 1 == 1;
                    (n.clone(), if minus { Outcome::Minus } else { Outcome::Plus })
                })
                .collect(),
        )
    }
}

pub(crate) fn satisfiable(space: &Space, compiled: &[&Compiled]) -> bool {
    (0..space.size() as u32).any(|a| compiled.iter().all(|c| c.holds(a)))
}

/// Enumerates every assignment of `quantities` (sorted by name, `+1` before
/// `-1`, first name most significant) and keeps those satisfying all
/// `constraints` and the optional `event`.
pub fn find_models(
    quantities: &[String],
    constraints: &[Constraint],
    event: Option<&Constraint>,
) -> Result<ModelReport> {
    let space = Space::new(quantities)?;
    let all: Vec<&Constraint> = constraints.iter().chain(event).collect();
    let compiled = all
        .iter()
        .map(|c| space.compile(c))
        .collect::<Result<Vec<_>>>()?;
    let models: Vec<Assignment> = (0..space.size())
        .map(|a| a as u32)
        .filter(|&a| compiled.iter().all(|c| c.holds(a)))
        .map(|a| space.assignment(a))
        .collect();
    Ok(ModelReport {
        quantities: space.names.clone(),
        searched: space.size(),
        contradiction: models.is_empty(),
        models,
        mixes_incompatible_contexts: mixes_contexts(&all)?,
    })
}

/// True when two constraints come from contexts holding non-commuting observables.
pub fn mixes_contexts(constraints: &[&Constraint]) -> Result<bool> {
    let contexts: Vec<&CommutingContext> =
        constraints.iter().filter_map(|c| c.context.as_ref()).collect();
    for (i, a) in contexts.iter().enumerate() {
        for b in &contexts[i + 1..] {
            for p in a.observables() {
                for q in b.observables() {
                    if !p.commutes(q)? {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

fn parities(scenario: &Scenario, event: &EventPredicate) -> Result<Vec<Parity>> {
    let factors = |label: &str| {
        scenario
            .factors(label)
            .ok_or_else(|| Error::UnknownQuantity(label.to_string()))
    };
    event
        .atoms()
        .iter()
        .map(|atom| {
            Ok(match atom {
                Atom::Value { label, value } => Parity::new(factors(label)?, *value),
                Atom::Equal {
                    left,
                    right,
                    negated,
                } => {
                    let mut vars = factors(left)?;
                    vars.extend(factors(right)?);
                    let value = if *negated { Outcome::Minus } else { Outcome::Plus };
                    Parity::new(vars, value)
                }
            })
        })
        .collect()
}

/// Probability-1 rows become `given ⇒ target`, probability-0 rows become
/// `given ⇒ not target`, and all other rows are dropped.
pub fn constraints_from_predictions(
    scenario: &Scenario,
    table: &PredictionTable,
) -> Result<Vec<Constraint>> {
    let mut out = Vec::new();
    for row in &table.rows {
        let certain = (row.probability - 1.0).abs() <= CERTAIN;
        let impossible = row.probability.abs() <= CERTAIN;
        if !certain && !impossible {
            continue;
        }
        let given = row.given.clone().unwrap_or_default();
        let antecedent = parities(scenario, &given)?;
        let target = parities(scenario, &row.target)?;
        let consequent = if certain {
            Consequent::All(target)
        } else {
            Consequent::NotAll(target)
        };
        let mut c = Constraint::implication(&row.name, antecedent, consequent);
        c.text = match (&row.given, certain) {
            (Some(g), true) => format!("{g} ⇒ {}", row.target),
            (Some(g), false) => format!("{g} ⇒ not ({})", row.target),
            (None, true) => row.target.to_string(),
            (None, false) => format!("not ({})", row.target),
        };
        c.context = scenario.row_context(row).ok();
        out.push(c);
    }
    Ok(out)
}

/// The outcomes of one run as an event constraint.
pub fn event_constraint(scenario: &Scenario, event: &EventPredicate) -> Result<Constraint> {
    let mut c = Constraint::event("run", parities(scenario, event)?);
    c.text = event.to_string();
    c.context = scenario.context_for(&event.labels()).ok();
    Ok(c)
}

/// The table restricted to rows conditioned on Alice's composite outcomes,
/// with the run event fixing only those outcomes.
pub fn reduced_cabello(scenario: &Scenario) -> Result<(Vec<Constraint>, Constraint)> {
    let rows = scenario
        .predictions
        .rows
        .iter()
        .filter(|r| r.name == "alice-zz" || r.name == "alice-xx")
        .cloned()
        .collect();
    let constraints = constraints_from_predictions(scenario, &PredictionTable { rows })?;
    let event = event_constraint(scenario, &"A1A3=+1,a1a3=+1".parse()?)?;
    Ok((constraints, event))
}
