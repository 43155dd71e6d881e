//! State specifications and the backend-agnostic shot type.

use std::str::FromStr;

use qverify::detect::LocalHamiltonian;
use qverify::mub::QuditState;
use qverify::shadow::SnapshotSampler;
use qverify::simcore::{
    prepare_named_blocks, prepare_named_state, Basis, LocalSampler, NamedState, ObservableMatrix, PauliString,
    ProductState, StateVector, DEFAULT_MAX_QUBITS,
};
use qverify::stabsim::StabilizerTableau;
use qverify::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};

use crate::config::Backend;

/// A state named in a config file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Named(NamedState),
    Zero(usize),
    Plus(usize),
    /// Exact ground state of the `n`-site Heisenberg ring.
    HeisenbergGround(usize),
    /// Haar-like random qudit, seeded from the experiment seed.
    RandomQudit(usize),
}

fn arg(s: &str, head: &str) -> Option<usize> {
    s.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(n) = arg(s, "zero") {
            return Ok(StateSpec::Zero(n));
        }
        if let Some(n) = arg(s, "plus") {
            return Ok(StateSpec::Plus(n));
        }
        if let Some(n) = arg(s, "heisenberg_ground") {
            return Ok(StateSpec::HeisenbergGround(n));
        }
        if let Some(d) = arg(s, "random_qudit") {
            return Ok(StateSpec::RandomQudit(d));
        }
        s.parse().map(StateSpec::Named)
    }
}

impl StateSpec {
    pub fn n_qubits(&self) -> Option<usize> {
        match self {
            StateSpec::Named(n) => Some(n.n_qubits()),
            StateSpec::Zero(n) | StateSpec::Plus(n) | StateSpec::HeisenbergGround(n) => Some(*n),
            StateSpec::RandomQudit(_) => None,
        }
    }

    pub fn dense(&self) -> Result<StateVector> {
        match self {
            StateSpec::Named(name) => prepare_named_state(*name, DEFAULT_MAX_QUBITS),
            StateSpec::Zero(n) | StateSpec::Plus(n) => {
                check_capacity(*n)?;
                let bases = vec![if matches!(self, StateSpec::Zero(_)) { Basis::Z } else { Basis::X }; *n];
                StateVector::product_of_eigenstates(&bases, &vec![0; *n])
            }
            StateSpec::HeisenbergGround(n) => LocalHamiltonian::heisenberg_ring(*n)?.ground_state(),
            StateSpec::RandomQudit(_) => Err(Error::InvalidArgument("random_qudit has no qubit form".into())),
        }
    }

    /// Amplitudes as a single qudit; random qudits draw from `seed`.
    pub fn qudit(&self, seed: u64) -> Result<QuditState> {
        match self {
            StateSpec::RandomQudit(d) => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                Ok(QuditState::random(*d, &mut rng))
            }
            other => Ok(QuditState::from(&other.dense()?)),
        }
    }

    /// Build the state on the requested backend. `Auto` keeps product states
    /// factorized, moves cluster states past 10 qubits to a tableau, and uses
    /// a dense vector for everything else.
    pub fn shot(&self, backend: Backend) -> Result<Shot> {
        let n = self.n_qubits().ok_or_else(|| Error::InvalidArgument("qudit states need the sqst protocol".into()))?;
        let large = n > 10;
        match (self, backend) {
            (_, Backend::Dense) => self.dense().map(Shot::Dense),
            (StateSpec::Named(NamedState::LinearCluster { n, periodic }), Backend::Stabilizer) => {
                StabilizerTableau::linear_cluster(*n, *periodic).map(Shot::Stabilizer)
            }
            (StateSpec::Named(NamedState::LinearCluster { n, periodic }), Backend::Auto) if large => {
                StabilizerTableau::linear_cluster(*n, *periodic).map(Shot::Stabilizer)
            }
            (StateSpec::Zero(n), Backend::Stabilizer) => Ok(Shot::Stabilizer(StabilizerTableau::zero_state(*n))),
            (StateSpec::Named(name), Backend::Product) => prepare_named_blocks(*name).map(Shot::Product),
            (StateSpec::Named(name @ (NamedState::SingletProduct { .. } | NamedState::ProductCheatPhiP)), Backend::Auto) => {
                prepare_named_blocks(*name).map(Shot::Product)
            }
            (StateSpec::Zero(n) | StateSpec::Plus(n), Backend::Product) => self.product(*n),
            (StateSpec::Zero(n) | StateSpec::Plus(n), Backend::Auto) => self.product(*n),
            (_, Backend::Auto) => self.dense().map(Shot::Dense),
            (_, b) => Err(Error::InvalidArgument(format!("state {self:?} is not available on the {b:?} backend"))),
        }
    }

    fn product(&self, n: usize) -> Result<Shot> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = match self {
            StateSpec::Zero(_) => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            _ => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        };
        ProductState::from_qubits(&vec![q; n]).map(Shot::Product)
    }

    pub fn stabilizer_generators(&self) -> Option<Vec<PauliString>> {
        match self {
            StateSpec::Named(n) => n.stabilizer_generators(),
            StateSpec::Zero(n) => Some((0..*n).map(|q| single(*n, q, 'Z')).collect()),
            StateSpec::Plus(n) => Some((0..*n).map(|q| single(*n, q, 'X')).collect()),
            _ => None,
        }
    }
}

fn single(n: usize, q: usize, c: char) -> PauliString {
    (0..n).map(|i| if i == q { c } else { 'I' }).collect::<String>().parse().expect("valid Pauli")
}

fn check_capacity(n: usize) -> Result<()> {
    if n > DEFAULT_MAX_QUBITS {
        return Err(Error::CapacityExceeded { requested: n, limit: DEFAULT_MAX_QUBITS });
    }
    Ok(())
}

/// One pure state on whichever simulator backs it.
#[derive(Debug, Clone)]
pub enum Shot {
    Dense(StateVector),
    Product(ProductState),
    Stabilizer(StabilizerTableau),
}

impl Shot {
    pub fn backend_name(&self) -> &'static str {
        match self {
            Shot::Dense(_) => "dense",
            Shot::Product(_) => "product",
            Shot::Stabilizer(_) => "stabilizer",
        }
    }

    pub fn as_dense(&self) -> Option<&StateVector> {
        match self {
            Shot::Dense(s) => Some(s),
            _ => None,
        }
    }
}

impl LocalSampler for Shot {
    fn n_qubits(&self) -> usize {
        match self {
            Shot::Dense(s) => s.n_qubits(),
            Shot::Product(s) => s.n_qubits(),
            Shot::Stabilizer(s) => s.n_qubits(),
        }
    }

    fn sample_local<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        match self {
            Shot::Dense(s) => s.sample_local(bases, rng),
            Shot::Product(s) => s.sample_local(bases, rng),
            Shot::Stabilizer(s) => s.sample_local(bases, rng),
        }
    }

    fn projector_probability(&self, support: &[usize], projector: &ObservableMatrix) -> Option<f64> {
        match self {
            Shot::Dense(s) => s.projector_probability(support, projector),
            Shot::Product(s) => s.projector_probability(support, projector),
            Shot::Stabilizer(s) => s.projector_probability(support, projector),
        }
    }
}

impl SnapshotSampler for Shot {
    fn measure_commuting<R: Rng + ?Sized>(&self, paulis: &[PauliString], rng: &mut R) -> Result<Vec<u8>> {
        match self {
            Shot::Dense(s) => s.measure_commuting(paulis, rng),
            Shot::Product(s) => s.measure_commuting(paulis, rng),
            Shot::Stabilizer(s) => s.measure_commuting(paulis, rng),
        }
    }
}
