use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{check_register, AMPLITUDE_TOLERANCE};
use crate::error::{Error, Result};

/// Normalized pure state of an `n`-qubit register.
///
/// Qubit `k` is stored in bit `n - 1 - k` of the basis index, so the ket
/// `|b0 b1 ... b(n-1)>` reads left to right in qubit order and qubit 0 is the
/// most significant position.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps an amplitude vector, checking its length is a power of two and
    /// its squared norm is 1.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > AMPLITUDE_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { num_qubits, amps })
    }

    /// Scales an arbitrary nonzero vector to unit norm and returns the
    /// squared norm it had before scaling.
    pub fn normalize(mut amps: Vec<Complex64>) -> Result<(Self, f64)> {
        let num_qubits = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps);
        if norm <= AMPLITUDE_TOLERANCE {
            return Err(Error::ZeroProbabilityBranch(norm));
        }
        let scale = norm.sqrt().recip();
        for a in &mut amps {
            *a *= scale;
        }
        Ok((Self { num_qubits, amps }, norm))
    }

    pub fn basis_state(num_qubits: usize, bits: &[u8]) -> Result<Self> {
        check_register(num_qubits)?;
        if bits.len() != num_qubits {
            return Err(Error::LengthMismatch {
                expected: num_qubits,
                actual: bits.len(),
            });
        }
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidBit(b));
            }
            index = (index << 1) | b as usize;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// The two-qubit singlet `(|01> - |10>)/sqrt(2)`.
    pub fn singlet_pair() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            num_qubits: 2,
            amps: vec![z, h, -h, z],
        }
    }

    /// Tensor product with `self` on the lower-numbered qubits.
    pub fn tensor(&self, right: &StateVector) -> Result<Self> {
        let num_qubits = self.num_qubits + right.num_qubits;
        check_register(num_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|l| right.amps.iter().map(move |r| l * r))
            .collect();
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the basis ket given as per-qubit bits.
    pub fn amplitude(&self, bits: &[u8]) -> Result<Complex64> {
        let basis = Self::basis_state(self.num_qubits, bits)?;
        Ok(basis.inner(self))
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// Componentwise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for a in self.amplitudes() {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::LengthMismatch {
            expected: len.max(2).next_power_of_two(),
            actual: len,
        });
    }
    let n = len.trailing_zeros() as usize;
    check_register(n)?;
    Ok(n)
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(Complex64::norm_sqr).sum()
}

pub(crate) fn inner(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}
