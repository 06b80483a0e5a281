use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use super::{CommutingContext, Outcome, OutcomeTuple};
use crate::error::{Error, Result};

/// One condition on measured `±1` values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `label = value`
    Value { label: String, value: Outcome },
    /// `left = right` when `negated` is false, `left = -right` otherwise.
    Equal {
        left: String,
        right: String,
        negated: bool,
    },
}

impl Atom {
    pub fn value(label: &str, value: Outcome) -> Self {
        Atom::Value {
            label: label.to_string(),
            value,
        }
    }

    pub fn equal(left: &str, right: &str) -> Self {
        Atom::Equal {
            left: left.to_string(),
            right: right.to_string(),
            negated: false,
        }
    }

    pub fn opposite(left: &str, right: &str) -> Self {
        Atom::Equal {
            left: left.to_string(),
            right: right.to_string(),
            negated: true,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        match self {
            Atom::Value { label, .. } => vec![label],
            Atom::Equal { left, right, .. } => vec![left, right],
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Value { label, value } => write!(f, "{label}={value}"),
            Atom::Equal {
                left,
                right,
                negated,
            } => write!(f, "{left}={}{right}", if *negated { "-" } else { "" }),
        }
    }
}

/// Conjunction of atoms. The empty conjunction always holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EventPredicate {
    atoms: Vec<Atom>,
}

impl EventPredicate {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn always() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &EventPredicate) -> EventPredicate {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        EventPredicate { atoms }
    }

    /// Referenced labels, deduplicated, in order of first appearance.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for atom in &self.atoms {
            for l in atom.labels() {
                if !out.iter().any(|o| o == l) {
                    out.push(l.to_string());
                }
            }
        }
        out
    }

    /// Resolves labels to context positions.
    pub fn compile(&self, ctx: &CommutingContext) -> Result<CompiledPredicate> {
        let index = |l: &str| ctx.index_of(l).ok_or_else(|| Error::UnknownLabel(l.to_string()));
        let checks = self
            .atoms
            .iter()
            .map(|atom| {
                Ok(match atom {
                    Atom::Value { label, value } => Check::Value(index(label)?, *value),
                    Atom::Equal {
                        left,
                        right,
                        negated,
                    } => Check::Equal(index(left)?, index(right)?, *negated),
                })
            })
            .collect::<Result<_>>()?;
        Ok(CompiledPredicate { checks })
    }
}

impl fmt::Display for EventPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for EventPredicate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for EventPredicate {
    type Err = Error;

    /// Grammar: comma-separated atoms `NAME=+1`, `NAME=-1`, `NAME=NAME` or
    /// `NAME=-NAME`. Whitespace around atoms is ignored.
    fn from_str(input: &str) -> Result<Self> {
        let err = |reason: &str| Error::EventSyntax {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let is_name = |s: &str| {
            !s.is_empty()
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        };
        let mut atoms = Vec::new();
        if input.trim().is_empty() {
            return Ok(Self::always());
        }
        for part in input.split(',') {
            let part = part.trim();
            let (lhs, rhs) = part
                .split_once('=')
                .ok_or_else(|| err(&format!("atom {part:?} has no '='")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if !is_name(lhs) {
                return Err(err(&format!("{lhs:?} is not a name")));
            }
            let atom = match rhs {
                "+1" | "1" => Atom::value(lhs, Outcome::Plus),
                "-1" => Atom::value(lhs, Outcome::Minus),
                r if r.starts_with('-') && is_name(&r[1..]) => Atom::opposite(lhs, &r[1..]),
                r if is_name(r) => Atom::equal(lhs, r),
                r => return Err(err(&format!("{r:?} is neither +1, -1 nor a name"))),
            };
            atoms.push(atom);
        }
        Ok(Self { atoms })
    }
}

#[derive(Debug, Clone, Copy)]
enum Check {
    Value(usize, Outcome),
    Equal(usize, usize, bool),
}

/// An [`EventPredicate`] bound to one context's positions.
#[derive(Debug, Clone)]
pub struct CompiledPredicate {
    checks: Vec<Check>,
}

impl CompiledPredicate {
    pub fn holds(&self, tuple: &OutcomeTuple) -> bool {
        let v = tuple.values();
        self.checks.iter().all(|c| match *c {
            Check::Value(i, o) => v[i] == o,
            Check::Equal(i, j, negated) => (v[i] == v[j]) != negated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grammar() {
        let e: EventPredicate = "A1A3=+1, a1a3=+1,B2b4=+1,b2B4=-1".parse().unwrap();
        assert_eq!(e.atoms().len(), 4);
        assert_eq!(e.atoms()[3], Atom::value("b2B4", Outcome::Minus));
        assert_eq!(e.to_string(), "A1A3=+1,a1a3=+1,B2b4=+1,b2B4=-1");

        let e: EventPredicate = "B2=B4".parse().unwrap();
        assert_eq!(e.atoms()[0], Atom::equal("B2", "B4"));
        let e: EventPredicate = "a1=-A3".parse().unwrap();
        assert_eq!(e.atoms()[0], Atom::opposite("a1", "A3"));
        assert_eq!(e.to_string(), "a1=-A3");
        assert!("".parse::<EventPredicate>().unwrap().is_empty());
    }

    #[test]
    fn parse_errors() {
        for bad in ["A1", "A1=+2", "=+1", "A1=+1,", "1A=+1", "A1=-"] {
            assert!(
                matches!(bad.parse::<EventPredicate>(), Err(Error::EventSyntax { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn labels_in_first_appearance_order() {
        let e: EventPredicate = "B2=B4,A1A3=+1,B4=+1".parse().unwrap();
        assert_eq!(e.labels(), vec!["B2", "B4", "A1A3"]);
    }
}
