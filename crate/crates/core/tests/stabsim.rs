use std::collections::HashMap;

use qverify::simcore::*;
use qverify::stabsim::StabilizerTableau;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cluster_generators_deterministic_at_n24() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let template = StabilizerTableau::linear_cluster(24, true).unwrap();
    for _ in 0..200 {
        let mut t = template.clone();
        assert_eq!(t.measure_pauli_product(&[(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Z)], &mut rng).unwrap(), 1);
        let mut t = template.clone();
        let g2g3 = [(0, Pauli::Z), (1, Pauli::Y), (2, Pauli::Y), (3, Pauli::Z)];
        assert_eq!(t.measure_pauli_product(&g2g3, &mut rng).unwrap(), 1);
    }
    let t = StabilizerTableau::linear_cluster(3, false).unwrap();
    assert_eq!(t.stabilizers().len(), 3);
    assert!(t.check_invariants());
}

#[test]
fn random_outcome_on_zero_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let shots = 10_000;
    let mut plus = 0;
    for _ in 0..shots {
        let mut t = StabilizerTableau::zero_state(24);
        if t.measure_pauli_product(&[(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Z)], &mut rng).unwrap() == 1 {
            plus += 1;
        }
    }
    assert!((plus as f64 / shots as f64 - 0.5).abs() < 0.02);
}

#[test]
fn tableau_matches_statevector_stabilizers() {
    for n in [3, 5, 8, 12] {
        let t = StabilizerTableau::linear_cluster(n, true).unwrap();
        let s = prepare_named_state(NamedState::LinearCluster { n, periodic: true }, 20).unwrap();
        for g in t.stabilizers() {
            assert!((s.pauli_expectation(&g).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

/// Outcome histograms of random local settings agree with exact Born
/// probabilities from the dense state within 3σ per cell.
#[test]
fn agreement_with_statevector() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shots = 100_000usize;
    for n in [4, 6] {
        let tab = StabilizerTableau::linear_cluster(n, n >= 3).unwrap();
        let dense = prepare_named_state(NamedState::LinearCluster { n, periodic: true }, 20).unwrap();
        for _ in 0..3 {
            let bases: Vec<Basis> = (0..n).map(|_| Basis::ALL[rng.random_range(0..3)]).collect();
            let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
            for _ in 0..shots {
                *counts.entry(tab.sample_local(&bases, &mut rng).unwrap()).or_default() += 1;
            }
            for x in 0..1usize << n {
                let bits: Vec<u8> = (0..n).map(|q| ((x >> (n - 1 - q)) & 1) as u8).collect();
                let proj = StateVector::product_of_eigenstates(&bases, &bits).unwrap();
                let p = dense.fidelity(&proj);
                let f = *counts.get(&bits).unwrap_or(&0) as f64 / shots as f64;
                let sd = (p * (1.0 - p) / shots as f64).sqrt();
                assert!((f - p).abs() <= 3.0 * sd + 1e-12, "n={n} {bases:?} {bits:?}: {f} vs {p}");
            }
        }
    }
}

/// General Pauli products on a scrambled stabilizer state agree with the
/// dense expectation values (±1 when deterministic, 0 when random).
#[test]
fn pauli_products_match_dense_expectations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 5;
    let mut tab = StabilizerTableau::zero_state(n);
    let mut dense = StateVector::zero(n);
    for _ in 0..40 {
        match rng.random_range(0..3) {
            0 => {
                let q = rng.random_range(0..n);
                tab.h(q);
                dense.apply_h(q);
            }
            1 => {
                let q = rng.random_range(0..n);
                tab.s(q);
                let s = [[1.0.into(), 0.0.into()], [0.0.into(), num_complex::Complex64::i()]];
                dense.apply_single(q, &s);
            }
            _ => {
                let a = rng.random_range(0..n);
                let b = (a + 1 + rng.random_range(0..n - 1)) % n;
                tab.cz(a, b);
                dense.apply_cz(a, b);
            }
        }
    }
    for _ in 0..200 {
        let ops: Vec<Pauli> = (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]).collect();
        if ops.iter().all(|&p| p == Pauli::I) {
            continue;
        }
        let entries: Vec<(usize, Pauli)> = ops.iter().copied().enumerate().filter(|&(_, p)| p != Pauli::I).collect();
        let exp = dense.pauli_expectation(&PauliString::new(ops, false)).unwrap();
        match tab.peek_pauli_product(&entries).unwrap() {
            Some(s) => assert!((exp - s as f64).abs() < 1e-10),
            None => assert!(exp.abs() < 1e-10),
        }
    }
}
