use num_complex::Complex64;
use rand::Rng;

use super::observable::ObservableMatrix;
use super::pauli::Basis;
use super::statevector::StateVector;
use super::{LocalSampler, HARD_MAX_QUBITS};
use crate::error::{Error, Result};

/// Tensor product of independent blocks, each a small dense state.
///
/// Block `0` holds the lowest-numbered qubits. Sampling cost is the sum of
/// the block costs, so products of pairs scale linearly in the qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    blocks: Vec<StateVector>,
    offsets: Vec<usize>,
    n_qubits: usize,
}

impl ProductState {
    pub fn new(blocks: Vec<StateVector>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a product state needs at least one block"));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n = 0;
        for b in &blocks {
            offsets.push(n);
            n += b.n_qubits();
        }
        Ok(Self { blocks, offsets, n_qubits: n })
    }

    /// One single-qubit block per entry.
    pub fn from_qubits(qubits: &[[Complex64; 2]]) -> Result<Self> {
        let blocks = qubits.iter().map(|q| StateVector::product(&[*q])).collect::<Result<_>>()?;
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[StateVector] {
        &self.blocks
    }

    /// Block index and local qubit index of a global qubit.
    pub fn locate(&self, q: usize) -> (usize, usize) {
        let b = self.offsets.partition_point(|&o| o <= q) - 1;
        (b, q - self.offsets[b])
    }

    /// Dense statevector of the whole product.
    pub fn to_statevector(&self) -> Result<StateVector> {
        if self.n_qubits > HARD_MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: self.n_qubits, limit: HARD_MAX_QUBITS });
        }
        let mut it = self.blocks.iter();
        let mut acc = it.next().expect("nonempty").clone();
        for b in it {
            acc = acc.tensor(b)?;
        }
        Ok(acc)
    }
}

impl LocalSampler for ProductState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn sample_local<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        if bases.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: bases.len() });
        }
        let mut out = Vec::with_capacity(self.n_qubits);
        for (b, &o) in self.blocks.iter().zip(&self.offsets) {
            out.extend(b.sample_local(&bases[o..o + b.n_qubits()], rng)?);
        }
        Ok(out)
    }

    fn projector_probability(&self, support: &[usize], projector: &ObservableMatrix) -> Option<f64> {
        if support.iter().any(|&q| q >= self.n_qubits) {
            return None;
        }
        let mut touched: Vec<usize> = support.iter().map(|&q| self.locate(q).0).collect();
        touched.sort_unstable();
        touched.dedup();
        let width: usize = touched.iter().map(|&b| self.blocks[b].n_qubits()).sum();
        if width > 16 {
            return None;
        }
        let mut joint = self.blocks[touched[0]].clone();
        for &b in &touched[1..] {
            joint = joint.tensor(&self.blocks[b]).ok()?;
        }
        let local: Vec<usize> = support
            .iter()
            .map(|&q| {
                let (b, l) = self.locate(q);
                let before: usize = touched.iter().take_while(|&&t| t < b).map(|&t| self.blocks[t].n_qubits()).sum();
                before + l
            })
            .collect();
        joint.projector_probability(&local, projector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::statevector::basis_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn locate_walks_blocks() {
        let p = ProductState::new(vec![StateVector::zero(2), StateVector::zero(1), StateVector::zero(3)]).unwrap();
        assert_eq!(p.locate(0), (0, 0));
        assert_eq!(p.locate(2), (1, 0));
        assert_eq!(p.locate(5), (2, 2));
        assert_eq!(p.n_qubits(), 6);
    }

    #[test]
    fn projector_probability_matches_dense() {
        let qs = [basis_state(Basis::X, 0), basis_state(Basis::Y, 1), basis_state(Basis::Z, 0)];
        let p = ProductState::from_qubits(&qs).unwrap();
        let dense = p.to_statevector().unwrap();
        let proj = ObservableMatrix::from_pauli(&"XY".parse().unwrap()).add(&ObservableMatrix::identity(4)).unwrap().scale(0.5);
        let a = p.projector_probability(&[2, 0], &proj).unwrap();
        let b = dense.projector_probability(&[2, 0], &proj).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sampling_respects_eigenstates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let qs = [basis_state(Basis::X, 1), basis_state(Basis::Z, 0)];
        let p = ProductState::from_qubits(&qs).unwrap();
        for _ in 0..20 {
            assert_eq!(p.sample_local(&[Basis::X, Basis::Z], &mut rng).unwrap(), vec![1, 0]);
        }
    }
}
