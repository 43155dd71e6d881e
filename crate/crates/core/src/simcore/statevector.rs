use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::observable::ObservableMatrix;
use super::pauli::{Basis, Pauli, PauliString};
use super::{LocalSampler, HARD_MAX_QUBITS};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

type Gate = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const H: Gate = [
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)],
];

/// Maps the `basis` eigenbasis onto the computational basis (`+1` → `|0⟩`).
fn to_z_basis(basis: Basis) -> Option<Gate> {
    match basis {
        Basis::Z => None,
        Basis::X => Some(H),
        // H · S†
        Basis::Y => Some([
            [c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)],
            [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)],
        ]),
    }
}

/// Single-qubit eigenvector of `basis` for outcome bit `bit`.
pub(crate) fn basis_state(basis: Basis, bit: u8) -> [Complex64; 2] {
    let s = FRAC_1_SQRT_2;
    match (basis, bit) {
        (Basis::Z, 0) => [c(1.0, 0.0), c(0.0, 0.0)],
        (Basis::Z, _) => [c(0.0, 0.0), c(1.0, 0.0)],
        (Basis::X, 0) => [c(s, 0.0), c(s, 0.0)],
        (Basis::X, _) => [c(s, 0.0), c(-s, 0.0)],
        (Basis::Y, 0) => [c(s, 0.0), c(0.0, s)],
        (Basis::Y, _) => [c(s, 0.0), c(0.0, -s)],
    }
}

/// Pure state on `n` qubits with `2^n` amplitudes; qubit 0 is the most
/// significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
    label: Option<String>,
}

impl StateVector {
    /// Wrap amplitudes that are already normalized to within `1e-10`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { n_qubits, amps, label: None })
    }

    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amps, label: None })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps, label: None }
    }

    /// Tensor product of single-qubit states, qubit 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self> {
        if qubits.len() > HARD_MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: qubits.len(), limit: HARD_MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            let norm = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
            amps = amps.iter().flat_map(|a| [a * q[0] / norm, a * q[1] / norm]).collect();
        }
        Self::new(amps)
    }

    /// Product of local Pauli eigenstates, e.g. the post-measurement state.
    pub fn product_of_eigenstates(bases: &[Basis], bits: &[u8]) -> Result<Self> {
        let qs: Vec<_> = bases.iter().zip(bits).map(|(&b, &o)| basis_state(b, o)).collect();
        Self::product(&qs)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > HARD_MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: n, limit: HARD_MAX_QUBITS });
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self { n_qubits: n, amps, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a /= n);
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn bit(&self, q: usize) -> usize {
        1usize << (self.n_qubits - 1 - q)
    }

    pub fn apply_single(&mut self, q: usize, u: &Gate) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | b] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    /// Rotate qubit `q` so that a computational-basis readout measures `basis`.
    pub(crate) fn rotate_to_z(&mut self, q: usize, basis: Basis) {
        if let Some(u) = to_z_basis(basis) {
            self.apply_single(q, &u);
        }
    }

    pub fn apply_h(&mut self, q: usize) {
        self.apply_single(q, &H);
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = self.bit(a) | self.bit(b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `|ψ⟩ ← P|ψ⟩` including the string's phase.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_width(p.len())?;
        let (xm, zm) = p.masks();
        let ny = p.ops().iter().filter(|&&o| o == Pauli::Y).count() as u32;
        let global = Complex64::i().powu((p.phase() as u32 + ny) % 4);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (x, a) in self.amps.iter().enumerate() {
            let sign = if (x & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[x ^ xm] = global * sign * a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        let mut moved = self.clone();
        moved.apply_pauli(p)?;
        Ok(self.inner(&moved).re)
    }

    /// `A|ψ⟩` for an operator acting on the listed qubits (ordered, first
    /// listed qubit is the most significant bit of the local index).
    pub fn apply_local(&self, support: &[usize], op: &ObservableMatrix) -> Result<Vec<Complex64>> {
        let k = support.len();
        if op.dim() != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, actual: op.dim() });
        }
        if support.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::invalid("support qubit outside the register"));
        }
        let bits: Vec<usize> = support.iter().map(|&q| self.bit(q)).collect();
        let mask: usize = bits.iter().sum();
        let dl = 1usize << k;
        let spread = |local: usize| -> usize {
            bits.iter()
                .enumerate()
                .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
                .map(|(_, &b)| b)
                .sum()
        };
        let offsets: Vec<usize> = (0..dl).map(spread).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (r, &ro) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &co) in offsets.iter().enumerate() {
                    acc += op.get(r, col) * self.amps[base | co];
                }
                out[base | ro] = acc;
            }
        }
        Ok(out)
    }

    pub fn local_expectation(&self, support: &[usize], op: &ObservableMatrix) -> Result<f64> {
        let moved = self.apply_local(support, op)?;
        Ok(self.amps.iter().zip(&moved).map(|(a, b)| a.conj() * b).sum::<Complex64>().re)
    }

    /// Projectively measure one qubit, collapsing and renormalizing the state.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, basis: Basis, rng: &mut R) -> Result<u8> {
        if q >= self.n_qubits {
            return Err(Error::invalid(format!("qubit {q} outside 0..{}", self.n_qubits)));
        }
        let rot = to_z_basis(basis);
        if let Some(u) = &rot {
            self.apply_single(q, u);
        }
        let b = self.bit(q);
        let p1: f64 = self.amps.iter().enumerate().filter(|(i, _)| i & b != 0).map(|(_, a)| a.norm_sqr()).sum();
        let total = self.norm_sqr();
        let outcome = u8::from(rng.random::<f64>() * total < p1);
        let keep = if outcome == 1 { p1 } else { total - p1 };
        let scale = 1.0 / keep.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & b != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if let Some(u) = &rot {
            let adj = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
            self.apply_single(q, &adj);
        }
        Ok(outcome)
    }

    /// Measure every qubit in a local Pauli basis; returns the outcome bits
    /// and the collapsed product state.
    pub fn measure_local_paulis<R: Rng + ?Sized>(
        &self,
        bases: &[Basis],
        rng: &mut R,
    ) -> Result<(Vec<u8>, StateVector)> {
        let bits = self.sample_local(bases, rng)?;
        let collapsed = Self::product_of_eigenstates(bases, &bits)?;
        Ok((bits, collapsed))
    }

    /// Measure a Hermitian Pauli string as one observable, collapsing onto
    /// the observed eigenspace. Returns `±1`.
    pub fn measure_pauli_string<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        if !p.is_hermitian() {
            return Err(Error::invalid("cannot measure a non-Hermitian Pauli string"));
        }
        let mut moved = self.clone();
        moved.apply_pauli(p)?;
        let exp = self.inner(&moved).re.clamp(-1.0, 1.0);
        let p_plus = 0.5 * (1.0 + exp);
        let outcome: i8 = if rng.random::<f64>() < p_plus { 1 } else { -1 };
        let s = outcome as f64;
        for (a, b) in self.amps.iter_mut().zip(&moved.amps) {
            *a = 0.5 * (*a + s * b);
        }
        self.normalize();
        Ok(outcome)
    }

    fn check_width(&self, len: usize) -> Result<()> {
        if len != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: len });
        }
        Ok(())
    }
}

impl AsRef<[Complex64]> for StateVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.amps
    }
}

impl LocalSampler for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn sample_local<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        self.check_width(bases.len())?;
        let mut work = self.clone();
        for (q, &b) in bases.iter().enumerate() {
            if let Some(u) = to_z_basis(b) {
                work.apply_single(q, &u);
            }
        }
        let total = work.norm_sqr();
        let mut target = rng.random::<f64>() * total;
        let mut index = work.amps.len() - 1;
        for (i, a) in work.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if target < p {
                index = i;
                break;
            }
            target -= p;
        }
        // Rounding may leave the tail unreachable; fall back to the last
        // index with nonzero weight.
        if work.amps[index].norm_sqr() == 0.0 {
            index = work.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        }
        let n = self.n_qubits;
        Ok((0..n).map(|q| ((index >> (n - 1 - q)) & 1) as u8).collect())
    }

    fn projector_probability(&self, support: &[usize], projector: &ObservableMatrix) -> Option<f64> {
        self.local_expectation(support, projector).ok().map(|p| p.clamp(0.0, 1.0))
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("amplitude count {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    if n > HARD_MAX_QUBITS {
        return Err(Error::CapacityExceeded { requested: n, limit: HARD_MAX_QUBITS });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::observable::expectation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn singlet() -> StateVector {
        let s = FRAC_1_SQRT_2;
        StateVector::new(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = StateVector::zero(1);
        for _ in 0..100 {
            assert_eq!(z.sample_local(&[Basis::Z], &mut rng).unwrap(), vec![0]);
        }
        for b in Basis::ALL {
            for bit in 0..2u8 {
                let s = StateVector::product(&[basis_state(b, bit)]).unwrap();
                assert_eq!(s.sample_local(&[b], &mut rng).unwrap(), vec![bit]);
            }
        }
    }

    #[test]
    fn singlet_zz_anticorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = singlet();
        let mut ones = 0;
        for _ in 0..10_000 {
            let bits = s.sample_local(&[Basis::Z, Basis::Z], &mut rng).unwrap();
            assert_ne!(bits[0], bits[1]);
            ones += bits[0] as u32;
        }
        let f = ones as f64 / 10_000.0;
        assert!((f - 0.5).abs() < 0.02, "{f}");
    }

    #[test]
    fn plus_state_z_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let plus = StateVector::product(&[basis_state(Basis::X, 0)]).unwrap();
        let ones: u32 = (0..10_000).map(|_| plus.sample_local(&[Basis::Z], &mut rng).unwrap()[0] as u32).sum();
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn singlet_xx_expectation() {
        let xx = ObservableMatrix::from_pauli(&"XX".parse().unwrap());
        assert!((expectation(&singlet(), &xx).unwrap() + 1.0).abs() < 1e-14);
        let z = ObservableMatrix::from_pauli(&"Z".parse().unwrap());
        assert!((expectation(&StateVector::zero(1), &z).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measure_qubit_collapses_and_renormalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let mut s = singlet();
            let a = s.measure_qubit(0, Basis::X, &mut rng).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            // singlet: second qubit now anti-aligned in X
            let b = s.measure_qubit(1, Basis::X, &mut rng).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn measure_local_paulis_checks_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(singlet().measure_local_paulis(&[Basis::Z], &mut rng).is_err());
        let (bits, post) = singlet().measure_local_paulis(&[Basis::Y, Basis::Y], &mut rng).unwrap();
        assert_ne!(bits[0], bits[1]);
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let s = singlet();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200).map(|_| s.sample_local(&[Basis::X, Basis::Y], &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn apply_local_matches_dense_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let amps: Vec<Complex64> = (0..8).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let s = StateVector::from_unnormalized(amps).unwrap();
        let zx = ObservableMatrix::from_pauli(&"ZX".parse().unwrap());
        // operator on qubits (2, 0): Z on qubit 2, X on qubit 0
        let local = s.local_expectation(&[2, 0], &zx).unwrap();
        let full = s.pauli_expectation(&"XIZ".parse().unwrap()).unwrap();
        assert!((local - full).abs() < 1e-12);
    }

    #[test]
    fn pauli_string_measurement_collapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = StateVector::zero(2);
        let xx: PauliString = "XX".parse().unwrap();
        let m = s.measure_pauli_string(&xx, &mut rng).unwrap();
        assert!((s.pauli_expectation(&xx).unwrap() - m as f64).abs() < 1e-12);
        // ZZ still +1 after measuring the commuting XX
        assert!((s.pauli_expectation(&"ZZ".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }
}
