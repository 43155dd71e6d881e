use super::{translate_witness, SamplingTable, TermSpec, WitnessTerm};
use crate::error::{Error, Result};
use crate::simcore::{stabilizer_group, PauliString, DEFAULT_MAX_QUBITS};

/// Projective graph-state witness `½𝟙 − |G⟩⟨G|` with
/// `|G⟩⟨G| = 2^{-n} Σ_S S` over the full stabilizer group. Every term gets
/// the uniform shift `2^{-n}`, which gives `μ = 2^{-n}` and `p_s = 3/4`.
pub fn w1_table(generators: &[PauliString]) -> Result<SamplingTable> {
    let n = generators.first().map_or(0, PauliString::len);
    if n == 0 || generators.len() != n {
        return Err(Error::invalid("W1 needs n independent generators on n qubits"));
    }
    if n > DEFAULT_MAX_QUBITS {
        return Err(Error::CapacityExceeded { requested: n, limit: DEFAULT_MAX_QUBITS });
    }
    let scale = 1.0 / (1u64 << n) as f64;
    let terms: Vec<WitnessTerm> = stabilizer_group(generators)?
        .into_iter()
        .map(|s| WitnessTerm::with_shift(TermSpec::Pauli { string: s, weight: scale }, scale))
        .collect();
    translate_witness(n, 0.5, &terms)
}

/// Two-setting witness `3𝟙 − 2(Π_{a∈A}(𝟙+G_a)/2 + Π_{b∈B}(𝟙+G_b)/2)` for a
/// two-colourable graph state.
pub fn w2_table(class_a: &[PauliString], class_b: &[PauliString]) -> Result<SamplingTable> {
    let n = class_a.first().map_or(0, PauliString::len);
    let terms = [class_a, class_b]
        .iter()
        .map(|c| WitnessTerm::new(TermSpec::StabilizerProjector { generators: c.to_vec(), weight: 2.0 }))
        .collect::<Vec<_>>();
    translate_witness(n, 3.0, &terms)
}

/// Generators of the H-shaped six-qubit cluster state split by colour:
/// the first class is measured with X on qubits 0-2 and Z on 3-5, the
/// second with Z on 0-2 and X on 3-5.
pub fn cluster6_color_classes() -> (Vec<PauliString>, Vec<PauliString>) {
    let parse = |v: &[&str]| v.iter().map(|s| s.parse().expect("valid literal")).collect();
    (parse(&["XXXZII", "IIIZZI", "IIIIZZ"]), parse(&["ZZIIII", "IZZIII", "ZIIXXX"]))
}

/// `(n−1)𝟙 − Σ_i S_i` over `n` stabilizer generators, minimal shifts.
pub fn generic_stabilizer_table(generators: &[PauliString]) -> Result<SamplingTable> {
    let n = generators.len();
    let width = generators.first().map_or(0, PauliString::len);
    if n < 2 {
        return Err(Error::invalid("generic witness needs at least two generators"));
    }
    let terms: Vec<WitnessTerm> = generators
        .iter()
        .map(|g| WitnessTerm::new(TermSpec::Pauli { string: g.clone(), weight: 1.0 }))
        .collect();
    translate_witness(width, n as f64 - 1.0, &terms)
}
