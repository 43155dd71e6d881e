use num_complex::Complex64;
use proptest::prelude::*;
use qverify::mub::{MubFamily, QuditState};
use qverify::simcore::ObservableMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn supported(max: usize) -> Vec<usize> {
    (2..=max).filter(|&d| MubFamily::new(d).is_ok()).collect()
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ObservableMatrix {
    let raw = ObservableMatrix::from_fn(d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    raw.add(&raw.adjoint()).unwrap()
}

#[test]
fn supported_dimensions_up_to_32() {
    assert_eq!(supported(32), vec![2, 3, 4, 5, 7, 8, 11, 13, 16, 17, 19, 23, 29, 31, 32]);
    assert!(MubFamily::new(1024).is_ok());
}

#[test]
fn orthonormal_and_unbiased() {
    for d in supported(32) {
        let f = MubFamily::new(d).unwrap();
        let vecs: Vec<Vec<Vec<Complex64>>> =
            (0..=d).map(|m| (0..d).map(|k| f.vector(k, m).unwrap()).collect()).collect();
        for m in 0..=d {
            for n in m..=d {
                for i in 0..d {
                    for j in 0..d {
                        let o = overlap(&vecs[m][i], &vecs[n][j]).norm_sqr();
                        let want = if m != n { 1.0 / d as f64 } else if i == j { 1.0 } else { 0.0 };
                        assert!((o - want).abs() < 1e-10, "d={d} m={m} n={n} i={i} j={j} got {o}");
                    }
                }
            }
        }
        for m in 1..=d {
            for k in 0..d {
                for l in 0..d {
                    assert!((f.alpha(k, m, l).norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn reconstruction_of_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in supported(16) {
        let f = MubFamily::new(d).unwrap();
        for _ in 0..100 {
            let a = random_hermitian(d, &mut rng);
            let back = f.decompose(&a).unwrap().reconstruct(&f).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-8, "d={d}");
        }
    }
    let f = MubFamily::new(3).unwrap();
    assert!(f.decompose(&ObservableMatrix::identity(2)).is_err());
}

/// Exact expectation of the off-diagonal estimator over the POVM
/// `{Π_k^(m)/d : m ≥ 1}`: averaging `conj(η_ij)` recovers `ρ_ij`.
#[test]
fn eta_estimator_is_exactly_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [2, 3, 5, 4, 8] {
        let f = MubFamily::new(d).unwrap();
        for _ in 0..10 {
            let psi = QuditState::random(d, &mut rng);
            let table = f.outcome_table(psi.amplitudes()).unwrap();
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 1..=d {
                        for k in 0..d {
                            acc += table[m][k] / d as f64 * f.eta(i, j, k, m).unwrap().conj();
                        }
                    }
                    assert!((acc - psi.element(i, j)).norm() < 1e-10, "d={d}");
                }
            }
        }
    }
}

#[test]
fn eta_has_unit_modulus_and_rejects_diagonal() {
    let f = MubFamily::new(7).unwrap();
    for m in 1..=7 {
        for k in 0..7 {
            assert!((f.eta(0, 3, k, m).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }
    assert!(f.eta(0, 1, 0, 0).is_err());
    assert!(f.eta(2, 2, 0, 1).is_err());
}

/// For two qubits every non-computational basis (and the computational one)
/// diagonalizes three commuting Paulis, and these five triples partition the
/// fifteen nontrivial Pauli operators.
#[test]
fn two_qubit_paulis_split_into_five_groups() {
    let f = MubFamily::new(4).unwrap();
    let labels = ["I", "X", "Y", "Z"];
    let mut seen = std::collections::HashSet::new();
    for m in 0..=4 {
        let mut group = Vec::new();
        for a in labels {
            for b in labels {
                let s = format!("{a}{b}");
                if s == "II" {
                    continue;
                }
                let p = ObservableMatrix::from_pauli(&s.parse().unwrap());
                let diag = (0..4).all(|k| {
                    let v = f.vector(k, m).unwrap();
                    let pv = p.apply(&v);
                    (overlap(&v, &pv).norm() - 1.0).abs() < 1e-10
                });
                if diag {
                    group.push(s);
                }
            }
        }
        assert_eq!(group.len(), 3, "basis {m}: {group:?}");
        for s in group {
            assert!(seen.insert(s));
        }
    }
    assert_eq!(seen.len(), 15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn reconstruction_d5(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = MubFamily::new(5).unwrap();
        let a = random_hermitian(5, &mut rng);
        let back = f.decompose(&a).unwrap().reconstruct(&f).unwrap();
        prop_assert!(back.max_abs_diff(&a) < 1e-8);
    }
}
