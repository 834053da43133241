//! Pauli-based computation for Clifford+T circuits.
//!
//! A unitary Clifford+T circuit is rewritten with T-gadgets into an adaptive
//! Clifford circuit on `n + t` qubits, and each shot is then executed as a
//! sequence of commuting Pauli measurements on the `t` magic qubits, with the
//! rest handled by classical bookkeeping. The crate also emits equivalent
//! adaptive circuits, estimates output probabilities with virtual qubits, and
//! generates the hidden-shift and random-circuit benchmark families.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod emit;
pub mod engine;
pub mod gadgetize;
pub mod hybrid;
pub mod pauli;
pub mod reference;
pub mod statevector;

pub use circuit::{Circuit, CircuitError, Instruction};
pub use engine::{run_shot, sample, EngineError, ShotResult};
pub use gadgetize::{gadgetize, GadgetizedCircuit};
pub use pauli::{BasisTracker, PauliError, PauliOperator, Reflection};
pub use statevector::{Backend, BackendError, BackendKind, StateVector};

use thiserror::Error;

/// Any error surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Emit(#[from] emit::EmitError),
    #[error(transparent)]
    Hybrid(#[from] hybrid::HybridError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
}
