use serde::Serialize;
use std::collections::BTreeSet;

use super::{find_models, satisfiable, Compiled, Constraint, ConstraintKind, Consequent, Mask, ModelReport, Parity, Space};
use crate::error::{Error, Result};

/// Largest constraint list for which cores are found by subset enumeration;
/// longer lists fall back to one-at-a-time deletion.
const ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    /// Names of the constraints in the core.
    pub core: Vec<String>,
    pub core_text: Vec<String>,
    /// Numbered deduction steps ending in the clash.
    pub steps: Vec<String>,
    /// The core was re-run through [`find_models`] and has no model.
    pub verified: bool,
}

/// All minimal unsatisfiable subsets of `items`, smallest first, as index
/// lists into `items`. Requires `items.len() <= 16`.
pub fn minimal_cores(quantities: &[String], items: &[&Constraint]) -> Result<Vec<Vec<usize>>> {
    if items.len() > ENUMERATION_LIMIT {
        return Err(Error::TooManyQuantities(items.len()));
    }
    let space = Space::new(quantities)?;
    let compiled = items
        .iter()
        .map(|c| space.compile(c))
        .collect::<Result<Vec<_>>>()?;
    let mut subsets: Vec<u32> = (1..1u32 << items.len()).collect();
    subsets.sort_by_key(|s| (s.count_ones(), std::cmp::Reverse(s.reverse_bits())));
    let mut cores: Vec<u32> = Vec::new();
    for s in subsets {
        if cores.iter().any(|c| c & s == *c) {
            continue;
        }
        let chosen: Vec<&Compiled> = (0..items.len())
            .filter(|i| s >> i & 1 == 1)
            .map(|i| &compiled[i])
            .collect();
        if !satisfiable(&space, &chosen) {
            cores.push(s);
        }
    }
    Ok(cores
        .into_iter()
        .map(|s| (0..items.len()).filter(|i| s >> i & 1 == 1).collect())
        .collect())
}

fn deletion_core(space: &Space, compiled: &[Compiled]) -> Vec<usize> {
    let mut keep: Vec<usize> = (0..compiled.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let trial: Vec<&Compiled> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &k)| &compiled[k])
            .collect();
        if satisfiable(space, &trial) {
            i += 1;
        } else {
            keep.remove(i);
        }
    }
    keep
}

/// A minimal unsatisfiable subset of `constraints` plus `event`, with a
/// readable derivation of the clash.
pub fn explain_contradiction(
    report: &ModelReport,
    constraints: &[Constraint],
    event: Option<&Constraint>,
) -> Result<Explanation> {
    if !report.contradiction {
        return Err(Error::NotAContradiction(report.models.len()));
    }
    let items: Vec<&Constraint> = event.into_iter().chain(constraints).collect();
    let space = Space::new(&report.quantities)?;
    let core: Vec<usize> = if items.len() <= ENUMERATION_LIMIT {
        minimal_cores(&report.quantities, &items)?
            .into_iter()
            .next()
            .unwrap_or_default()
    } else {
        let compiled = items
            .iter()
            .map(|c| space.compile(c))
            .collect::<Result<Vec<_>>>()?;
        deletion_core(&space, &compiled)
    };
    let core: Vec<Constraint> = core.into_iter().map(|i| items[i].clone()).collect();
    let verified = find_models(&report.quantities, &core, None)?.contradiction;
    let steps = derive(&space, &core)?;
    Ok(Explanation {
        core: core.iter().map(|c| c.name.clone()).collect(),
        core_text: core.iter().map(|c| c.to_string()).collect(),
        steps,
        verified,
    })
}

/// Linear system over GF(2): each row says the product of its quantities has
/// the given sign. `sources` records which numbered facts were combined.
struct Row {
    bits: u32,
    odd: bool,
    sources: BTreeSet<usize>,
}

#[derive(Default)]
struct Basis {
    rows: Vec<Row>,
}

impl Basis {
    fn reduce(&self, mask: Mask) -> Row {
        let mut out = Row {
            bits: mask.bits,
            odd: mask.odd,
            sources: BTreeSet::new(),
        };
        for row in &self.rows {
            let pivot = 1 << (31 - row.bits.leading_zeros());
            if out.bits & pivot != 0 {
                out.bits ^= row.bits;
                out.odd ^= row.odd;
                out.sources = out.sources.symmetric_difference(&row.sources).copied().collect();
            }
        }
        out
    }

    fn insert(&mut self, row: Row) {
        self.rows.push(row);
        self.rows.sort_by_key(|r| r.bits.leading_zeros());
    }

    /// `Some(true)` when the parity follows from the rows, `Some(false)` when
    /// its negation does.
    fn entails(&self, mask: Mask) -> (Option<bool>, BTreeSet<usize>) {
        let r = self.reduce(mask);
        if r.bits == 0 {
            (Some(!r.odd), r.sources)
        } else {
            (None, r.sources)
        }
    }
}

struct Derivation<'a> {
    space: &'a Space,
    basis: Basis,
    steps: Vec<String>,
}

enum Added {
    Ok,
    Clash(BTreeSet<usize>),
}

impl Derivation<'_> {
    fn add(&mut self, parity: &Parity, why: String) -> Result<Added> {
        let mask = self.space.mask(parity)?;
        let id = self.steps.len() + 1;
        self.steps.push(format!("{id}. {parity}  ({why})"));
        let mut row = self.basis.reduce(mask);
        row.sources.insert(id);
        if row.bits != 0 {
            self.basis.insert(row);
            return Ok(Added::Ok);
        }
        Ok(if row.odd { Added::Clash(row.sources) } else { Added::Ok })
    }

    fn clash(&mut self, sources: &BTreeSet<usize>) {
        let ids: Vec<String> = sources.iter().map(|s| s.to_string()).collect();
        self.steps.push(format!(
            "multiplying steps {} cancels every quantity on the left but gives -1 on the right: contradiction",
            ids.join(", ")
        ));
    }
}

/// Forward chaining with linear elimination: run events are facts, an
/// implication fires once its antecedent follows from the facts, and a
/// negated conjunction contributes the negation of its last undecided atom.
fn derive(space: &Space, core: &[Constraint]) -> Result<Vec<String>> {
    let mut d = Derivation {
        space,
        basis: Basis::default(),
        steps: Vec::new(),
    };
    for c in core {
        if let ConstraintKind::Event(ps) = &c.kind {
            for p in ps {
                if let Added::Clash(s) = d.add(p, format!("observed in {}", c.name))? {
                    d.clash(&s);
                    return Ok(d.steps);
                }
            }
        }
    }
    let mut done = vec![false; core.len()];
    loop {
        let mut progress = false;
        for (i, c) in core.iter().enumerate() {
            let ConstraintKind::Implication {
                antecedent,
                consequent,
            } = &c.kind
            else {
                continue;
            };
            if done[i] {
                continue;
            }
            let mut support = BTreeSet::new();
            let mut fires = true;
            for p in antecedent {
                let (status, src) = d.basis.entails(space.mask(p)?);
                if status != Some(true) {
                    fires = false;
                    break;
                }
                support.extend(src);
            }
            if !fires {
                continue;
            }
            let why = |support: &BTreeSet<usize>| {
                if support.is_empty() {
                    format!("{} {}", c.name, c.text)
                } else {
                    let ids: Vec<String> = support.iter().map(|s| s.to_string()).collect();
                    format!(
                        "{} {}, antecedent from step{} {}",
                        c.name,
                        c.text,
                        if ids.len() == 1 { "" } else { "s" },
                        ids.join(", ")
                    )
                }
            };
            match consequent {
                Consequent::All(ps) => {
                    done[i] = true;
                    progress = true;
                    for p in ps {
                        if let Added::Clash(s) = d.add(p, why(&support))? {
                            d.clash(&s);
                            return Ok(d.steps);
                        }
                    }
                }
                Consequent::NotAll(ps) => {
                    let mut open = Vec::new();
                    let mut refuted = false;
                    let mut used = support.clone();
                    for p in ps {
                        match d.basis.entails(space.mask(p)?) {
                            (Some(true), src) => used.extend(src),
                            (Some(false), _) => refuted = true,
                            (None, _) => open.push(p),
                        }
                    }
                    if refuted {
                        done[i] = true;
                    } else if open.is_empty() {
                        let ids: Vec<String> = used.iter().map(|s| s.to_string()).collect();
                        d.steps.push(format!(
                            "steps {} establish everything {} forbids ({}): contradiction",
                            ids.join(", "),
                            c.name,
                            c.text
                        ));
                        return Ok(d.steps);
                    } else if open.len() == 1 {
                        done[i] = true;
                        progress = true;
                        if let Added::Clash(s) = d.add(&open[0].negated(), why(&used))? {
                            d.clash(&s);
                            return Ok(d.steps);
                        }
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    d.steps.push(format!(
        "no short deduction closes; exhaustive search over all {} assignments finds no model",
        space.size()
    ));
    Ok(d.steps)
}
