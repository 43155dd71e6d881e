//! Dense statevector simulation, block-product states, Pauli algebra, named
//! state preparation and the per-shot mixture sources used by every protocol.
//!
//! Mixed states are never materialized: a source emits one pure component per
//! shot, chosen at random with the mixture weights.

mod named;
mod observable;
mod pauli;
mod product;
mod source;
mod statevector;

pub use named::{prepare_named_state, prepare_named_blocks, NamedState};
pub use observable::{expectation, ObservableMatrix};
pub use pauli::{stabilizer_group, Basis, Pauli, PauliString};
pub use product::ProductState;
pub use source::{MixtureSource, NoisyStateSource, ShotSource};
pub use statevector::StateVector;
pub(crate) use statevector::basis_state;

use rand::Rng;

/// Default statevector capacity in qubits.
pub const DEFAULT_MAX_QUBITS: usize = 20;
/// Absolute statevector limit in qubits.
pub const HARD_MAX_QUBITS: usize = 24;

/// A state that can be measured qubit-by-qubit in local Pauli bases.
pub trait LocalSampler: Sync {
    fn n_qubits(&self) -> usize;

    /// Measure every qubit in its basis and return one bit per qubit
    /// (`0` for the `+1` eigenvalue). The state itself is left untouched.
    fn sample_local<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> crate::Result<Vec<u8>>;

    /// Born probability of a projector acting on `support`, if the backend
    /// can evaluate arbitrary local projectors.
    fn projector_probability(&self, _support: &[usize], _projector: &ObservableMatrix) -> Option<f64> {
        None
    }
}
