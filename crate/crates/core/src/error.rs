use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("register size mismatch: {left} qubits vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("register of {0} qubits is outside the supported range 1..={max}", max = crate::quantum::MAX_QUBITS)]
    UnsupportedRegister(usize),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("basis bit must be 0 or 1, got {0}")]
    InvalidBit(u8),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("product of Pauli strings carries a phase of {0}i and is not Hermitian")]
    NonHermitianProduct(i8),

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("invalid spin direction: {0}")]
    InvalidDirection(String),

    #[error("identity observable cannot be measured")]
    IdentityObservable,

    #[error("observables {i} ({left}) and {j} ({right}) do not commute")]
    NonCommuting {
        i: usize,
        j: usize,
        left: String,
        right: String,
    },

    #[error("duplicate label {0:?} in measurement context")]
    DuplicateLabel(String),

    #[error("label {0:?} is not part of the measurement context")]
    UnknownLabel(String),

    #[error("conditioning event has probability {0:e}")]
    ConditioningOnNull(f64),

    #[error("measurement branch has probability {0:e}")]
    ZeroProbabilityBranch(f64),

    #[error("cannot parse event {input:?}: {reason}")]
    EventSyntax { input: String, reason: String },

    #[error("prediction row {row:?} has no commuting context: {source}")]
    ContextConstructionFailure {
        row: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown quantity {0:?}")]
    UnknownQuantity(String),

    #[error("exhaustive search supports at most {max} quantities, got {0}", max = crate::lhv::MAX_QUANTITIES)]
    TooManyQuantities(usize),

    #[error("constraint set is satisfiable ({0} models)")]
    NotAContradiction(usize),

    #[error("event filter references {0:?}, which is not in the intervening context")]
    FilterOutsideContext(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
