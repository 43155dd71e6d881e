use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::pauli::{Basis, Pauli, PauliString};
use super::product::ProductState;
use super::statevector::{basis_state, StateVector};
use super::HARD_MAX_QUBITS;
use crate::error::{Error, Result};

/// Built-in target and adversary states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// `|ψ⁻⟩^{⊗n}` on `2n` qubits, pair `k` on qubits `2k, 2k+1`.
    SingletProduct { n_pairs: usize },
    LinearCluster { n: usize, periodic: bool },
    Ghz { n: usize },
    /// Six-qubit H-shaped cluster state.
    Cluster6H,
    /// 16-qubit product state `(|x+⟩|x−⟩)^{⊗3}(|y+⟩|y−⟩)^{⊗3}(|z+⟩|z−⟩)^{⊗2}`
    /// that passes fixed-order singlet tests.
    ProductCheatPhiP,
}

impl NamedState {
    pub fn n_qubits(&self) -> usize {
        match *self {
            NamedState::SingletProduct { n_pairs } => 2 * n_pairs,
            NamedState::LinearCluster { n, .. } | NamedState::Ghz { n } => n,
            NamedState::Cluster6H => 6,
            NamedState::ProductCheatPhiP => 16,
        }
    }

    /// Stabilizer generators with `+1` eigenvalue, if the state is a
    /// stabilizer state.
    pub fn stabilizer_generators(&self) -> Option<Vec<PauliString>> {
        let n = self.n_qubits();
        let s = |entries: &[(usize, Pauli)]| PauliString::from_sparse(n, entries).expect("in range");
        match *self {
            NamedState::SingletProduct { n_pairs } => {
                let mut g = Vec::with_capacity(n);
                for k in 0..n_pairs {
                    let (a, b) = (2 * k, 2 * k + 1);
                    g.push(s(&[(a, Pauli::X), (b, Pauli::X)]).negated());
                    g.push(s(&[(a, Pauli::Z), (b, Pauli::Z)]).negated());
                }
                Some(g)
            }
            NamedState::LinearCluster { n, periodic } => Some(
                (0..n)
                    .map(|k| {
                        let mut e = vec![(k, Pauli::X)];
                        if k > 0 {
                            e.push((k - 1, Pauli::Z));
                        } else if periodic {
                            e.push((n - 1, Pauli::Z));
                        }
                        if k + 1 < n {
                            e.push((k + 1, Pauli::Z));
                        } else if periodic {
                            e.push((0, Pauli::Z));
                        }
                        s(&e)
                    })
                    .collect(),
            ),
            NamedState::Ghz { n } => {
                let mut g = vec![s(&(0..n).map(|q| (q, Pauli::X)).collect::<Vec<_>>())];
                g.extend((1..n).map(|q| s(&[(q - 1, Pauli::Z), (q, Pauli::Z)])));
                Some(g)
            }
            NamedState::Cluster6H => Some(
                ["ZZIIII", "IZZIII", "IIIZZI", "IIIIZZ", "XXXZII", "ZIIXXX"]
                    .iter()
                    .map(|t| t.parse().expect("valid literal"))
                    .collect(),
            ),
            NamedState::ProductCheatPhiP => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            NamedState::SingletProduct { n_pairs: 0 } | NamedState::Ghz { n: 0 } => {
                Err(Error::invalid("state needs at least one qubit"))
            }
            NamedState::LinearCluster { n, periodic } if n < 2 || (periodic && n < 3) => {
                Err(Error::invalid(format!("linear cluster of {n} qubits is too small")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedState::SingletProduct { n_pairs } => write!(f, "singlet_product({n_pairs})"),
            NamedState::LinearCluster { n, periodic: true } => write!(f, "linear_cluster({n},periodic)"),
            NamedState::LinearCluster { n, periodic: false } => write!(f, "linear_cluster({n})"),
            NamedState::Ghz { n } => write!(f, "ghz({n})"),
            NamedState::Cluster6H => f.write_str("cluster6_h"),
            NamedState::ProductCheatPhiP => f.write_str("product_cheat_phi_p"),
        }
    }
}

/// Parses the [`Display`](fmt::Display) form, e.g. `ghz(3)` or
/// `linear_cluster(24,periodic)`.
impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], s[i + 1..s.len() - 1].split(',').map(str::trim).collect()),
            _ => (s, Vec::new()),
        };
        let unknown = || Error::invalid(format!("unknown state `{s}`"));
        let count = |a: &str| a.parse::<usize>().map_err(|_| unknown());
        let state = match (name, args.as_slice()) {
            ("singlet_product", [k]) => NamedState::SingletProduct { n_pairs: count(k)? },
            ("linear_cluster", [k]) => NamedState::LinearCluster { n: count(k)?, periodic: false },
            ("linear_cluster", [k, "periodic"]) => NamedState::LinearCluster { n: count(k)?, periodic: true },
            ("linear_cluster", [k, "open"]) => NamedState::LinearCluster { n: count(k)?, periodic: false },
            ("ghz", [k]) => NamedState::Ghz { n: count(k)? },
            ("cluster6_h", []) => NamedState::Cluster6H,
            ("product_cheat_phi_p", []) => NamedState::ProductCheatPhiP,
            _ => return Err(unknown()),
        };
        state.validate()?;
        Ok(state)
    }
}

fn singlet() -> StateVector {
    let z = Complex64::new(0.0, 0.0);
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(vec![z, s, -s, z]).expect("normalized")
}

fn phi_p_qubits() -> Vec<[Complex64; 2]> {
    let mut qs = Vec::with_capacity(16);
    for (basis, pairs) in [(Basis::X, 3), (Basis::Y, 3), (Basis::Z, 2)] {
        for _ in 0..pairs {
            qs.push(basis_state(basis, 0));
            qs.push(basis_state(basis, 1));
        }
    }
    qs
}

/// Dense statevector of a named state, refusing anything above `max_qubits`
/// (itself capped at the hard limit).
pub fn prepare_named_state(name: NamedState, max_qubits: usize) -> Result<StateVector> {
    name.validate()?;
    let n = name.n_qubits();
    let limit = max_qubits.min(HARD_MAX_QUBITS);
    if n > limit {
        return Err(Error::CapacityExceeded { requested: n, limit });
    }
    let state = match name {
        NamedState::SingletProduct { .. } | NamedState::ProductCheatPhiP => {
            prepare_named_blocks(name)?.to_statevector()?
        }
        NamedState::LinearCluster { n, periodic } => {
            let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
            let mut s = StateVector::new(vec![amp; 1 << n])?;
            for k in 0..n - 1 {
                s.apply_cz(k, k + 1);
            }
            if periodic {
                s.apply_cz(n - 1, 0);
            }
            s
        }
        NamedState::Ghz { n } => {
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            StateVector::new(amps)?
        }
        NamedState::Cluster6H => {
            let mut amps = vec![Complex64::new(0.0, 0.0); 64];
            amps[0b000000] = Complex64::new(0.5, 0.0);
            amps[0b000111] = Complex64::new(0.5, 0.0);
            amps[0b111000] = Complex64::new(0.5, 0.0);
            amps[0b111111] = Complex64::new(-0.5, 0.0);
            StateVector::new(amps)?
        }
    };
    Ok(state.with_label(name.to_string()))
}

/// Block-product form of a named state: singlet products become one block
/// per pair, the cheat state one block per qubit, and everything else a
/// single dense block.
pub fn prepare_named_blocks(name: NamedState) -> Result<ProductState> {
    name.validate()?;
    match name {
        NamedState::SingletProduct { n_pairs } => ProductState::new(vec![singlet(); n_pairs]),
        NamedState::ProductCheatPhiP => ProductState::from_qubits(&phi_p_qubits()),
        other => ProductState::new(vec![prepare_named_state(other, HARD_MAX_QUBITS)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_stabilized(name: NamedState) {
        let s = prepare_named_state(name, 20).unwrap();
        for g in name.stabilizer_generators().unwrap() {
            assert!((s.pauli_expectation(&g).unwrap() - 1.0).abs() < 1e-10, "{name} {g}");
        }
    }

    #[test]
    fn stabilizers_fix_states() {
        check_stabilized(NamedState::Cluster6H);
        check_stabilized(NamedState::SingletProduct { n_pairs: 3 });
        check_stabilized(NamedState::Ghz { n: 4 });
        check_stabilized(NamedState::LinearCluster { n: 6, periodic: false });
        check_stabilized(NamedState::LinearCluster { n: 6, periodic: true });
    }

    #[test]
    fn cluster6_amplitudes() {
        let s = prepare_named_state(NamedState::Cluster6H, 20).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = match i {
                0b000000 | 0b000111 | 0b111000 => 0.5,
                0b111111 => -0.5,
                _ => 0.0,
            };
            assert!((a - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn singlet_and_ghz1() {
        let s = prepare_named_state(NamedState::SingletProduct { n_pairs: 1 }, 20).unwrap();
        let h = FRAC_1_SQRT_2;
        let want = [0.0, h, -h, 0.0];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
        let g = prepare_named_state(NamedState::Ghz { n: 1 }, 20).unwrap();
        assert!(g.amplitudes().iter().all(|a| (a.re - h).abs() < 1e-15));
    }

    #[test]
    fn capacity_and_parsing() {
        assert!(matches!(
            prepare_named_state(NamedState::Ghz { n: 21 }, 20),
            Err(Error::CapacityExceeded { requested: 21, limit: 20 })
        ));
        assert!(prepare_named_state(NamedState::Ghz { n: 30 }, 40).is_err());
        for text in ["singlet_product(8)", "linear_cluster(24,periodic)", "ghz(3)", "cluster6_h", "product_cheat_phi_p"] {
            let s: NamedState = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("w_state(3)".parse::<NamedState>().is_err());
        assert!("linear_cluster(2,periodic)".parse::<NamedState>().is_err());
    }

    #[test]
    fn phi_p_is_sixteen_qubit_product() {
        let p = prepare_named_blocks(NamedState::ProductCheatPhiP).unwrap();
        assert_eq!(p.blocks().len(), 16);
        let dense = prepare_named_state(NamedState::ProductCheatPhiP, 20).unwrap();
        let xx: PauliString = "XXIIIIIIIIIIIIII".parse().unwrap();
        assert!((dense.pauli_expectation(&xx).unwrap() + 1.0).abs() < 1e-12);
    }
}
