//! Joint projective measurement of commuting observables.
//!
//! Every outcome probability is the squared norm of the state after applying
//! the eigenprojectors `(I + v·P)/2` in context order. Because the
//! observables commute the result does not depend on that order.

mod predicate;
mod sampling;

pub use predicate::{Atom, CompiledPredicate, EventPredicate};
pub use sampling::{sample_outcomes, SampleCounts};

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::quantum::{Observable, StateVector, AMPLITUDE_TOLERANCE};

/// Probability at or below which an event or branch counts as impossible.
pub const NULL_PROBABILITY: f64 = 1e-12;

/// A measured eigenvalue. `Plus` sorts before `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl std::ops::Mul for Outcome {
    type Output = Outcome;

    fn mul(self, rhs: Outcome) -> Outcome {
        if self == rhs {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

/// One `±1` value per observable, in context order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct OutcomeTuple(Vec<Outcome>);

impl OutcomeTuple {
    pub fn new(values: Vec<Outcome>) -> Self {
        Self(values)
    }

    pub fn from_values(values: &[i8]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Outcome::from_value(v))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn values(&self) -> &[Outcome] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> Outcome {
        self.0.iter().fold(Outcome::Plus, |acc, &o| acc * o)
    }

    /// Coordinates reordered so that entry `k` is `self[order[k]]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self(order.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for OutcomeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, ")")
    }
}

/// Pairwise-commuting observables with display labels; jointly measurable.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingContext {
    observables: Vec<Observable>,
    labels: Vec<String>,
}

impl CommutingContext {
    /// Validates sizes, labels and pairwise commutation.
    pub fn new<O: Into<Observable>>(observables: Vec<O>, labels: Vec<String>) -> Result<Self> {
        let observables: Vec<Observable> = observables.into_iter().map(Into::into).collect();
        if observables.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: observables.len(),
                actual: labels.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        for (i, p) in observables.iter().enumerate() {
            if p.is_identity() {
                return Err(Error::IdentityObservable);
            }
            for (j, q) in observables.iter().enumerate().take(i) {
                if !q.commutes(p)? {
                    return Err(Error::NonCommuting {
                        i: j,
                        j: i,
                        left: labels[j].clone(),
                        right: labels[i].clone(),
                    });
                }
            }
        }
        Ok(Self {
            observables,
            labels,
        })
    }

    /// Labels the observables by their operator string.
    pub fn unlabeled<O: Into<Observable>>(observables: Vec<O>) -> Result<Self> {
        let observables: Vec<Observable> = observables.into_iter().map(Into::into).collect();
        let labels = observables.iter().map(|o| o.to_string()).collect();
        Self::new(observables, labels)
    }

    pub fn empty() -> Self {
        Self {
            observables: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&Observable> {
        self.index_of(label).map(|i| &self.observables[i])
    }

    /// The same observables in a new order; `order[k]` names the old position
    /// that moves to position `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: order.len(),
            });
        }
        Ok(Self {
            observables: order.iter().map(|&i| self.observables[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
        })
    }

    /// Appends the observables of `other` not already present by label.
    pub fn extended(&self, other: &CommutingContext) -> Result<Self> {
        let mut observables = self.observables.clone();
        let mut labels = self.labels.clone();
        for (o, l) in other.observables.iter().zip(&other.labels) {
            if !labels.contains(l) {
                observables.push(o.clone());
                labels.push(l.clone());
            }
        }
        Self::new(observables, labels)
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        match self.observables.first() {
            Some(o) if o.num_qubits() != state.num_qubits() => Err(Error::SizeMismatch {
                left: o.num_qubits(),
                right: state.num_qubits(),
            }),
            _ => Ok(()),
        }
    }
}

/// Outcome distribution of a joint measurement; impossible tuples omitted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Distribution {
    entries: BTreeMap<OutcomeTuple, f64>,
}

impl Distribution {
    pub fn entries(&self) -> &BTreeMap<OutcomeTuple, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, tuple: &OutcomeTuple) -> f64 {
        self.entries.get(tuple).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Total probability of tuples satisfying `event`.
    pub fn probability_of(&self, event: &CompiledPredicate) -> f64 {
        self.entries
            .iter()
            .filter(|(t, _)| event.holds(t))
            .fold(0.0, |acc, (_, p)| acc + p)
    }

    /// Marginal over the coordinates listed in `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Distribution {
        let mut entries = BTreeMap::new();
        for (t, p) in &self.entries {
            *entries.entry(t.permuted(keep)).or_insert(0.0) += p;
        }
        Distribution { entries }
    }
}

/// One outcome branch of a joint measurement with its post-measurement state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: OutcomeTuple,
    pub probability: f64,
    pub state: StateVector,
}

fn project(amps: &[Complex64], obs: &Observable, outcome: Outcome) -> Vec<Complex64> {
    let applied = obs.apply_amps(amps);
    let s = f64::from(outcome.value());
    amps.iter()
        .zip(&applied)
        .map(|(a, pa)| (a + pa * s) * 0.5)
        .collect()
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(Complex64::norm_sqr).sum()
}

/// Every outcome branch with nonzero probability, in tuple order, each with
/// its renormalized post-measurement state.
pub fn branches(state: &StateVector, ctx: &CommutingContext) -> Result<Vec<Branch>> {
    ctx.check_state(state)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(ctx.len());
    descend(state.amplitudes(), ctx, &mut prefix, &mut out)?;
    Ok(out)
}

fn descend(
    amps: &[Complex64],
    ctx: &CommutingContext,
    prefix: &mut Vec<Outcome>,
    out: &mut Vec<Branch>,
) -> Result<()> {
    let depth = prefix.len();
    if depth == ctx.len() {
        let (state, probability) = StateVector::normalize(amps.to_vec())?;
        out.push(Branch {
            outcomes: OutcomeTuple(prefix.clone()),
            probability,
            state,
        });
        return Ok(());
    }
    for outcome in Outcome::BOTH {
        let projected = project(amps, &ctx.observables[depth], outcome);
        if norm_sqr(&projected) <= NULL_PROBABILITY {
            continue;
        }
        prefix.push(outcome);
        descend(&projected, ctx, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Exact joint outcome distribution of `ctx` on `state`.
pub fn joint_distribution(state: &StateVector, ctx: &CommutingContext) -> Result<Distribution> {
    let entries = branches(state, ctx)?
        .into_iter()
        .map(|b| (b.outcomes, b.probability))
        .collect();
    Ok(Distribution { entries })
}

/// Probability that a joint measurement of `ctx` satisfies `event`.
pub fn event_probability(
    state: &StateVector,
    ctx: &CommutingContext,
    event: &EventPredicate,
) -> Result<f64> {
    let compiled = event.compile(ctx)?;
    Ok(joint_distribution(state, ctx)?.probability_of(&compiled))
}

/// `P(target | given)` from the exact joint distribution of `ctx`. Both
/// predicates must only reference labels of `ctx`.
pub fn conditional_probability(
    state: &StateVector,
    ctx: &CommutingContext,
    target: &EventPredicate,
    given: &EventPredicate,
) -> Result<f64> {
    let target = target.compile(ctx)?;
    let given = given.compile(ctx)?;
    let dist = joint_distribution(state, ctx)?;
    let p_given = dist.probability_of(&given);
    if p_given <= NULL_PROBABILITY {
        return Err(Error::ConditioningOnNull(p_given));
    }
    let p_both: f64 = dist
        .entries
        .iter()
        .filter(|(t, _)| given.holds(t) && target.holds(t))
        .fold(0.0, |acc, (_, p)| acc + p);
    Ok(p_both / p_given)
}

/// Applies `(I + outcome·P)/2`; returns the renormalized state and the
/// branch probability.
pub fn collapse(
    state: &StateVector,
    observable: &Observable,
    outcome: Outcome,
) -> Result<(StateVector, f64)> {
    if observable.num_qubits() != state.num_qubits() {
        return Err(Error::SizeMismatch {
            left: observable.num_qubits(),
            right: state.num_qubits(),
        });
    }
    let projected = project(state.amplitudes(), observable, outcome);
    let p = norm_sqr(&projected);
    if p <= NULL_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    StateVector::normalize(projected)
}

/// Joint distribution of `ctx` obtained by collapsing one observable at a time
/// in `order` (a permutation of context indices). Tuples are reported in
/// context order, so the result is comparable with [`joint_distribution`].
pub fn staged_distribution(
    state: &StateVector,
    ctx: &CommutingContext,
    order: &[usize],
) -> Result<Distribution> {
    ctx.check_state(state)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..ctx.len()).collect::<Vec<_>>() {
        return Err(Error::LengthMismatch {
            expected: ctx.len(),
            actual: order.len(),
        });
    }
    let mut entries = BTreeMap::new();
    let mut outcomes = vec![Outcome::Plus; ctx.len()];
    stage(state, 1.0, ctx, order, &mut outcomes, &mut entries)?;
    Ok(Distribution { entries })
}

fn stage(
    state: &StateVector,
    weight: f64,
    ctx: &CommutingContext,
    order: &[usize],
    outcomes: &mut Vec<Outcome>,
    entries: &mut BTreeMap<OutcomeTuple, f64>,
) -> Result<()> {
    let Some((&next, rest)) = order.split_first() else {
        entries.insert(OutcomeTuple(outcomes.clone()), weight);
        return Ok(());
    };
    for outcome in Outcome::BOTH {
        let (collapsed, p) = match collapse(state, &ctx.observables[next], outcome) {
            Ok(c) => c,
            Err(Error::ZeroProbabilityBranch(_)) => continue,
            Err(e) => return Err(e),
        };
        if weight * p <= NULL_PROBABILITY {
            continue;
        }
        outcomes[next] = outcome;
        stage(&collapsed, weight * p, ctx, rest, outcomes, entries)?;
    }
    Ok(())
}

/// True when `a` and `b` agree to [`AMPLITUDE_TOLERANCE`] on every tuple.
pub fn distributions_close(a: &Distribution, b: &Distribution) -> bool {
    a.entries
        .keys()
        .chain(b.entries.keys())
        .all(|t| (a.probability(t) - b.probability(t)).abs() <= AMPLITUDE_TOLERANCE)
}
