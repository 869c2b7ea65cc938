use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),
    #[error("register `{register}` holds {expected} qubits, got a {actual}-bit value")]
    WidthMismatch {
        register: String,
        expected: usize,
        actual: usize,
    },
    #[error("layout needs {actual} qubits, cap is {cap}")]
    TooManyQubits { actual: usize, cap: usize },
    #[error("qubit {index} out of range for register `{register}`")]
    QubitOutOfRange { register: String, index: usize },
    #[error("angle must be finite")]
    NonFiniteAngle,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("gate targets overlap")]
    OverlappingTargets,
    #[error("states live on different register layouts")]
    LayoutMismatch,
    #[error("imaginary part {0:e} exceeds the real-coefficient tolerance")]
    ComplexCoefficients(f64),
    #[error("state has support outside the two-dimensional subspace")]
    OutsideSubspace,
    #[error("sampled an outcome of zero probability")]
    ZeroNormBranch,
    #[error("density matrices are capped at {cap} qubits, got {actual}")]
    DensityTooLarge { actual: usize, cap: usize },
    #[error("empty sample list")]
    EmptySamples,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },
    #[error("fault trace exhausted after {0} draws")]
    TraceExhausted(usize),
    #[error("ancilla register carries amplitude on values >= modulus {0}")]
    AncillaOutOfRange(u64),
    #[error("ancilla failed to disentangle (residual {0:e})")]
    AncillaEntangled(f64),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("t = {t} exceeds the enumeration limit {limit}")]
    EnumerationTooLarge { t: u32, limit: u32 },
    #[error("expected {expected} walk steps, got {actual}")]
    StepCountMismatch { expected: usize, actual: usize },
    #[error("invalid truth table: {0}")]
    TruthTable(String),
    #[error("invalid bitstring `{0}`")]
    BitString(String),
    #[error("invalid algorithm: {0}")]
    Algorithm(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, reason: impl Into<String>) -> Error {
    Error::OutOfRange {
        name,
        reason: reason.into(),
    }
}
