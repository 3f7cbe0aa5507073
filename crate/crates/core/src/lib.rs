//! Randomized compiling for circuits of alternating easy/hard gate rounds.
//!
//! The crate is split into:
//!
//! * [`algebra`]: dihedral easy gates, Pauli twirls, hard rounds and circuits.
//! * [`randomizer`]: the compiling pass that inserts twirling gates and
//!   folds them, together with their corrections, into dressed easy gates.
//! * [`channels`]: Pauli transfer matrices, Pauli twirling, infidelity and
//!   the over-rotation noise model.
//! * [`metrics`]: diamond distances, fidelity/worst-case bounds and the
//!   bound evaluators for gate-dependent easy noise.
//! * [`simulator`]: noiseless and noisy statevector execution.
//! * [`exact`]: enumerated tailored channels for one- and two-qubit checks.

pub mod algebra;
pub mod channels;
pub mod exact;
pub mod metrics;
pub mod randomizer;
pub mod simulator;

pub use algebra::{Circuit, Cycle, Dihedral, EasyRound, HardGate, HardRound, Pauli, PauliRound};
pub use channels::{GateKind, NoiseSpec, PauliChannel, Ptm};
pub use randomizer::RandomizedCircuit;
pub use simulator::{Distribution, StateVector};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("{n} qubits exceeds the dense limit of {max}")]
    WidthOverflow { n: usize, max: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("negative probability {0:.3e} (input is not completely positive)")]
    NegativeProbability(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
