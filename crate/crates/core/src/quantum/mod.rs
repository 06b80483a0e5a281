//! Exact statevectors and Pauli observable algebra.

mod observable;
mod pauli;
mod state;

pub use observable::{Direction, Observable};
pub use pauli::{Axis, PauliString, Sign};
pub use state::StateVector;

use crate::error::{Error, Result};

/// Largest register the dense statevector engine accepts.
pub const MAX_QUBITS: usize = 20;

/// Absolute tolerance for amplitude and probability comparisons.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::UnsupportedRegister(num_qubits));
    }
    Ok(())
}
