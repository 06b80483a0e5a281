use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::state::{inner, StateVector};
use super::{check_register, AMPLITUDE_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn is_identity(self) -> bool {
        self == Axis::I
    }

    fn has_x(self) -> bool {
        matches!(self, Axis::X | Axis::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Axis::Z | Axis::Y)
    }

    /// Single-site product `self * rhs` as (phase exponent of `i`, axis).
    fn mul(self, rhs: Axis) -> (u8, Axis) {
        use Axis::*;
        match (self, rhs) {
            (I, a) | (a, I) => (0, a),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A Hermitian Pauli observable: a sign times a tensor product of
/// single-qubit Paulis, one per register position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    sign: Sign,
    axes: Vec<Axis>,
}

impl PauliString {
    pub fn new(sign: Sign, axes: Vec<Axis>) -> Result<Self> {
        check_register(axes.len())?;
        Ok(Self { sign, axes })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        Self::new(Sign::Plus, vec![Axis::I; num_qubits])
    }

    /// `axis` on one qubit, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, axis: Axis) -> Result<Self> {
        Self::on(num_qubits, &[(qubit, axis)])
    }

    /// Builds a positive string from `(qubit, axis)` pairs.
    pub fn on(num_qubits: usize, sites: &[(usize, Axis)]) -> Result<Self> {
        let mut p = Self::identity(num_qubits)?;
        for &(q, axis) in sites {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            p.axes[q] = axis;
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| a.is_identity())
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.axes.len())
            .filter(|&q| !self.axes[q].is_identity())
            .collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            sign: self.sign.flip(),
            axes: self.axes.clone(),
        }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if self.num_qubits() != n {
            return Err(Error::SizeMismatch {
                left: self.num_qubits(),
                right: n,
            });
        }
        Ok(())
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.axes.len() - 1 - q)
    }

    fn masks(&self) -> (usize, usize, u32) {
        let mut x = 0;
        let mut z = 0;
        let mut ys = 0;
        for (q, &a) in self.axes.iter().enumerate() {
            if a.has_x() {
                x |= self.bit(q);
            }
            if a.has_z() {
                z |= self.bit(q);
            }
            if a == Axis::Y {
                ys += 1;
            }
        }
        (x, z, ys)
    }

    /// True iff the two strings commute: the number of positions where both
    /// are non-identity and differ must be even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other.num_qubits())?;
        let clashes = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| !a.is_identity() && !b.is_identity() && a != b)
            .count();
        Ok(clashes % 2 == 0)
    }

    /// Symbolic product `self * other`. Fails if the result carries a phase
    /// of `±i`, i.e. when the factors anticommute.
    pub fn product(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other.num_qubits())?;
        let mut phase = 0u8;
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (p, axis) = a.mul(b);
                phase = (phase + p) % 4;
                axis
            })
            .collect();
        let sign = match phase {
            0 => Sign::Plus,
            2 => Sign::Minus,
            1 => return Err(Error::NonHermitianProduct(1)),
            _ => return Err(Error::NonHermitianProduct(-1)),
        };
        Ok(PauliString {
            sign: sign * self.sign * other.sign,
            axes,
        })
    }

    /// `P|psi>` by permuting basis indices and tracking phases.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_size(state.num_qubits())?;
        let (amps, _) = StateVector::normalize(self.apply_amps(state.amplitudes()))?;
        Ok(amps)
    }

    pub(crate) fn apply_amps(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let (x, z, ys) = self.masks();
        let global = Complex64::i().powu(ys) * self.sign.value();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (b, &a) in amps.iter().enumerate() {
            let parity = (b & z).count_ones() % 2;
            let v = if parity == 1 { -a } else { a };
            out[b ^ x] = global * v;
        }
        out
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check_size(state.num_qubits())?;
        let applied = self.apply_amps(state.amplitudes());
        let value = inner(state.amplitudes(), &applied);
        debug_assert!(value.im.abs() <= AMPLITUDE_TOLERANCE);
        Ok(value.re)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}")?;
        for a in &self.axes {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `ZIZI`, `+XX` or `-YYYY`.
    fn from_str(s: &str) -> Result<Self> {
        let (sign, body) = match s.as_bytes().first() {
            Some(b'+') => (Sign::Plus, &s[1..]),
            Some(b'-') => (Sign::Minus, &s[1..]),
            _ => (Sign::Plus, s),
        };
        let axes = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Axis::I),
                'X' => Ok(Axis::X),
                'Y' => Ok(Axis::Y),
                'Z' => Ok(Axis::Z),
                _ => Err(Error::InvalidPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.is_empty() {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        PauliString::new(sign, axes)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
