use num_complex::Complex64;
use rand::Rng;

use super::{DetectionRun, Protocol, RoundRecord, Threshold};
use crate::error::{Error, Result};
use crate::parallel::try_map_rounds;
use crate::simcore::{Basis, LocalSampler, ObservableMatrix, Pauli, ShotSource, StateVector};

/// Largest register for which dense diagonalization and the exact
/// single-shot oracle are offered.
pub const EXACT_MAX_QUBITS: usize = 10;

const THRESHOLD_TOL: f64 = 1e-9;

/// One local term `Σ_c w_c P_c` acting on `support`; each `P_c` lists one
/// Pauli per support qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub support: Vec<usize>,
    pub components: Vec<(Vec<Pauli>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n: usize,
    terms: Vec<HamiltonianTerm>,
    eps_sep: f64,
    eps_0: f64,
}

impl LocalHamiltonian {
    /// `eps_sep` and `eps_0` are the separable minimum and ground energy per
    /// site; the gap `eps_sep - eps_0` must be positive.
    pub fn new(n: usize, terms: Vec<HamiltonianTerm>, eps_sep: f64, eps_0: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("Hamiltonian has no terms"));
        }
        for t in &terms {
            if t.support.iter().any(|&q| q >= n) {
                return Err(Error::invalid("term support outside the register"));
            }
            if t.components.iter().any(|(ops, _)| ops.len() != t.support.len()) {
                return Err(Error::invalid("term component width differs from its support"));
            }
        }
        if eps_sep <= eps_0 {
            return Err(Error::invalid(format!("no entanglement gap: eps_sep = {eps_sep}, eps_0 = {eps_0}")));
        }
        Ok(Self { n, terms, eps_sep, eps_0 })
    }

    /// Bond terms `(XX + YY + ZZ)/4` on a ring of `n` sites.
    pub fn heisenberg_ring_terms(n: usize) -> Vec<HamiltonianTerm> {
        (0..n)
            .map(|k| HamiltonianTerm {
                support: vec![k, (k + 1) % n],
                components: [Pauli::X, Pauli::Y, Pauli::Z].iter().map(|&p| (vec![p, p], 0.25)).collect(),
            })
            .collect()
    }

    /// Heisenberg ring with separable bound `-1/4` per site and ground
    /// energy from exact diagonalization.
    pub fn heisenberg_ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("Heisenberg ring needs at least 3 sites"));
        }
        if n > EXACT_MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: n, limit: EXACT_MAX_QUBITS });
        }
        let terms = Self::heisenberg_ring_terms(n);
        let probe = Self { n, terms, eps_sep: -0.25, eps_0: f64::NEG_INFINITY };
        let (vals, _) = probe.matrix()?.eigh()?;
        Self::new(n, probe.terms, -0.25, vals[0] / n as f64)
    }

    /// Heisenberg ring with a caller-supplied ground energy per site, for
    /// sizes beyond exact diagonalization.
    pub fn heisenberg_ring_with_ground_energy(n: usize, eps_0: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("Heisenberg ring needs at least 3 sites"));
        }
        Self::new(n, Self::heisenberg_ring_terms(n), -0.25, eps_0)
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn eps_sep(&self) -> f64 {
        self.eps_sep
    }

    pub fn eps_0(&self) -> f64 {
        self.eps_0
    }

    /// Entanglement gap `g_E = ε_sep - ε_0`.
    pub fn gap(&self) -> f64 {
        self.eps_sep - self.eps_0
    }

    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    /// Dense matrix of the full Hamiltonian.
    pub fn matrix(&self) -> Result<ObservableMatrix> {
        if self.n > EXACT_MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: self.n, limit: EXACT_MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut m = ObservableMatrix::zeros(dim).into_matrix();
        for t in &self.terms {
            for (ops, w) in &t.components {
                let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0u32);
                for (&q, &p) in t.support.iter().zip(ops) {
                    let bit = 1usize << (self.n - 1 - q);
                    if p.x_bit() {
                        xm |= bit;
                    }
                    if p.z_bit() {
                        zm |= bit;
                    }
                    ny += u32::from(p == Pauli::Y);
                }
                let phase = Complex64::i().powu(ny % 4) * *w;
                for x in 0..dim {
                    let sign = if (x & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    m[(x ^ xm, x)] += phase * sign;
                }
            }
        }
        ObservableMatrix::new(m)
    }

    /// Ground state by exact diagonalization.
    pub fn ground_state(&self) -> Result<StateVector> {
        let (_, vecs) = self.matrix()?.eigh()?;
        Ok(StateVector::from_unnormalized(vecs[0].clone())?.with_label("ground_state"))
    }

    /// `H_[n]` for fixed bases and outcome bits.
    fn estimate(&self, bases: &[Basis], bits: &[u8]) -> f64 {
        let mut e = 0.0;
        for t in &self.terms {
            'comp: for (ops, w) in &t.components {
                let mut sign = 1.0;
                let mut weight = 0;
                for (&q, &p) in t.support.iter().zip(ops) {
                    match p.basis() {
                        None => {}
                        Some(b) if b == bases[q] => {
                            weight += 1;
                            if bits[q] == 1 {
                                sign = -sign;
                            }
                        }
                        Some(_) => continue 'comp,
                    }
                }
                e += sign * w * 3f64.powi(weight);
            }
        }
        e
    }
}

/// Single-copy energy estimate: every qubit is measured in a uniformly
/// random Pauli basis and each matching Pauli component contributes
/// `sign · w · 3^{|support|}`. Unbiased for `⟨H⟩`.
pub fn hamiltonian_single_shot_energy<T: LocalSampler, R: Rng + ?Sized>(
    h: &LocalHamiltonian,
    shot: &T,
    rng: &mut R,
) -> Result<f64> {
    if shot.n_qubits() != h.n {
        return Err(Error::DimensionMismatch { expected: h.n, actual: shot.n_qubits() });
    }
    let bases: Vec<Basis> = (0..h.n).map(|_| Basis::ALL[rng.random_range(0..3)]).collect();
    let bits = shot.sample_local(&bases, rng)?;
    Ok(h.estimate(&bases, &bits))
}

/// Exact probability that the single-shot estimate on `state` is at most
/// `threshold`, by enumerating all `3^n` basis choices.
pub fn single_shot_success_probability(h: &LocalHamiltonian, state: &StateVector, threshold: f64) -> Result<f64> {
    let n = h.n;
    if state.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: state.n_qubits() });
    }
    if n > EXACT_MAX_QUBITS {
        return Err(Error::CapacityExceeded { requested: n, limit: EXACT_MAX_QUBITS });
    }
    let mut bases = vec![Basis::Z; n];
    let mut total = 0.0;
    enumerate(h, state.clone(), 0, &mut bases, threshold + THRESHOLD_TOL, &mut total);
    Ok(total / 3f64.powi(n as i32))
}

fn enumerate(h: &LocalHamiltonian, rotated: StateVector, q: usize, bases: &mut [Basis], cut: f64, total: &mut f64) {
    let n = h.n;
    if q == n {
        let mut bits = vec![0u8; n];
        for (x, a) in rotated.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (j, b) in bits.iter_mut().enumerate() {
                *b = ((x >> (n - 1 - j)) & 1) as u8;
            }
            if h.estimate(bases, &bits) <= cut {
                *total += p;
            }
        }
        return;
    }
    for b in Basis::ALL {
        let mut next = rotated.clone();
        next.rotate_to_z(q, b);
        bases[q] = b;
        enumerate(h, next, q + 1, bases, cut, total);
    }
}

/// Energy-threshold detection: a round passes when
/// `H_[n] ≤ n (ε_sep − δ)`, for `0 < δ < g_E`.
pub fn run_hamiltonian_protocol<S>(
    h: &LocalHamiltonian,
    source: &S,
    delta: f64,
    repetitions: u64,
    seed: u64,
) -> Result<DetectionRun>
where
    S: ShotSource,
    S::State: LocalSampler,
{
    if !(delta > 0.0 && delta < h.gap()) {
        return Err(Error::invalid(format!("δ = {delta} outside (0, g_E = {})", h.gap())));
    }
    if repetitions == 0 {
        return Err(Error::invalid("Hamiltonian protocol needs at least one round"));
    }
    let cut = h.n as f64 * (h.eps_sep - delta) + THRESHOLD_TOL;
    let rounds = try_map_rounds(seed, repetitions, |_, rng| {
        let shot = source.next_shot(rng);
        let e = hamiltonian_single_shot_energy(h, shot, rng)?;
        Ok::<_, Error>(RoundRecord {
            setting: "random".into(),
            local_successes: u32::from(e <= cut),
            passed: e <= cut,
            value: Some(e),
        })
    })?;
    let passes = rounds.iter().filter(|r| r.passed).count();
    Ok(DetectionRun {
        protocol: Protocol::Hamiltonian,
        n: h.n,
        local_checks: 0,
        repetitions,
        threshold: Threshold::Fixed(delta),
        epsilon: delta,
        observed_rate: passes as f64 / repetitions as f64,
        rounds,
        confidence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring4_ground_energy() {
        let h = LocalHamiltonian::heisenberg_ring(4).unwrap();
        assert!((h.eps_0() + 0.5).abs() < 1e-10);
        assert!((h.gap() - 0.25).abs() < 1e-10);
        assert_eq!(h.locality(), 2);
        assert!(LocalHamiltonian::heisenberg_ring(11).is_err());
    }
}
