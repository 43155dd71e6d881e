//! Witness-to-sampling-table translation, few-copy witness detection and
//! quantum state verification strategies.
//!
//! A witness `W = γ_s 𝟙 − O` with `O = Σ_i O_i` becomes a table of local
//! binary observables `M_ik` drawn with probability `μ_ik`. Each term is
//! shifted to `O_i + α_i 𝟙 ≥ 0` and split into eigenprojectors; with
//! `τ = Σ λ_ik` the separable success bound is `p_s = (γ_s + Σ α_i) / τ`.

mod builtin;
mod protocol;
mod qsv;

pub use builtin::{cluster6_color_classes, generic_stabilizer_table, w1_table, w2_table};
pub use protocol::{
    confidence_curve, copies_needed, copies_needed_asymptotic, run_witness_protocol, WitnessReport, WitnessRound,
};
pub use qsv::{qsv_build_strategy, qsv_rounds, qsv_run, QsvStrategy, QsvVerdict};

use rand::Rng;

use crate::error::{Error, Result};
use crate::simcore::{Basis, LocalSampler, ObservableMatrix, PauliString, StateVector};

const EIG_TOL: f64 = 1e-12;

/// One local term `O_i` of the decomposition `O = Σ_i O_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum TermSpec {
    /// `weight · S` for a Hermitian Pauli string over the whole register.
    Pauli { string: PauliString, weight: f64 },
    /// `weight · Π_j (𝟙 + G_j)/2` for commuting generators `G_j`.
    StabilizerProjector { generators: Vec<PauliString>, weight: f64 },
    /// A Hermitian matrix acting on `support` (first listed qubit is the
    /// most significant local index bit).
    Matrix { support: Vec<usize>, observable: ObservableMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTerm {
    pub spec: TermSpec,
    /// Explicit shift `α_i`; the minimal shift `max(0, −λ_min)` when `None`.
    pub shift: Option<f64>,
}

impl WitnessTerm {
    pub fn new(spec: TermSpec) -> Self {
        Self { spec, shift: None }
    }

    pub fn with_shift(spec: TermSpec, shift: f64) -> Self {
        Self { spec, shift: Some(shift) }
    }
}

/// How to measure one binary observable `M_ik` on a single copy.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// Measure all strings in one qubitwise-compatible local setting and
    /// pass iff every string has eigenvalue `+1` (inverted by
    /// `complement`). An empty list always passes.
    Stabilizer { strings: Vec<PauliString>, complement: bool },
    /// Pass with the Born probability of a projector on `support`.
    Projector { support: Vec<usize>, matrix: ObservableMatrix },
}

impl Recipe {
    fn stabilizer(strings: Vec<PauliString>, complement: bool) -> Result<Self> {
        for (i, a) in strings.iter().enumerate() {
            for b in &strings[i + 1..] {
                if !a.qubitwise_compatible(b) {
                    return Err(Error::invalid(format!("{a} and {b} need different local settings")));
                }
            }
        }
        Ok(Recipe::Stabilizer { strings, complement })
    }

    /// Per-qubit bases for a stabilizer recipe (Z where unconstrained).
    pub fn bases(&self, n: usize) -> Option<Vec<Basis>> {
        let Recipe::Stabilizer { strings, .. } = self else { return None };
        let mut b = vec![Basis::Z; n];
        for s in strings {
            for (q, p) in s.ops().iter().enumerate() {
                if let Some(basis) = p.basis() {
                    b[q] = basis;
                }
            }
        }
        Some(b)
    }

    /// Draw one binary outcome on `shot`.
    pub fn measure<T: LocalSampler, R: Rng + ?Sized>(&self, shot: &T, rng: &mut R) -> Result<bool> {
        match self {
            Recipe::Stabilizer { strings, complement } => {
                if strings.is_empty() {
                    return Ok(!complement);
                }
                let bases = self.bases(shot.n_qubits()).expect("stabilizer recipe");
                let bits = shot.sample_local(&bases, rng)?;
                let all = strings.iter().all(|s| s.eigenvalue_from_bits(&bits) == 1);
                Ok(all != *complement)
            }
            Recipe::Projector { support, matrix } => {
                let p = shot
                    .projector_probability(support, matrix)
                    .ok_or_else(|| Error::invalid("backend cannot evaluate a general projector"))?;
                Ok(rng.random::<f64>() < p)
            }
        }
    }

    /// Exact `Tr(M ρ)` on a dense state.
    pub fn probability(&self, state: &StateVector) -> Result<f64> {
        match self {
            Recipe::Stabilizer { strings, complement } => {
                let mut v = state.clone();
                for s in strings {
                    let mut sv = v.clone();
                    sv.apply_pauli(s)?;
                    for (a, b) in v.amplitudes_mut().iter_mut().zip(sv.amplitudes()) {
                        *a = 0.5 * (*a + b);
                    }
                }
                let p = v.norm_sqr();
                Ok(if *complement { 1.0 - p } else { p })
            }
            Recipe::Projector { support, matrix } => state.local_expectation(support, matrix),
        }
    }

    fn matrix_form(&self) -> Option<&ObservableMatrix> {
        match self {
            Recipe::Projector { matrix, .. } => Some(matrix),
            Recipe::Stabilizer { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub mu: f64,
    /// Shifted eigenvalue `λ_ik`.
    pub lambda: f64,
    /// Index `i` of the originating term.
    pub term: usize,
    pub recipe: Recipe,
}

/// A translated witness.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingTable {
    pub n_qubits: usize,
    pub entries: Vec<TableEntry>,
    pub gamma_s: f64,
    /// Per-term shifts `α_i`.
    pub shifts: Vec<f64>,
    pub tau: f64,
    pub p_s: f64,
    /// Entanglement value on a reference target, once computed.
    pub p_e: Option<f64>,
    cumulative: Vec<f64>,
}

impl SamplingTable {
    /// `Σ_i α_i`.
    pub fn alpha_total(&self) -> f64 {
        self.shifts.iter().sum()
    }

    /// Exact success probability `Σ μ_ik Tr(M_ik ρ)` on a dense state.
    pub fn success_probability(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: state.n_qubits() });
        }
        let mut acc = 0.0;
        for e in &self.entries {
            acc += e.mu * e.recipe.probability(state)?;
        }
        Ok(acc)
    }

    /// Record `p_e` as the exact success probability on `target`.
    pub fn with_target(mut self, target: &StateVector) -> Result<Self> {
        self.p_e = Some(self.success_probability(target)?);
        Ok(self)
    }

    pub fn sample_entry<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        self.cumulative.partition_point(|&c| c <= u).min(self.entries.len() - 1)
    }

    /// Check `Σμ = 1`, `μ ≥ 0`, idempotent matrix projectors and the `p_s`
    /// formula. Returns the largest violation found.
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.entries.iter().map(|e| e.mu).sum();
        if (sum - 1.0).abs() > 1e-10 || self.entries.iter().any(|e| e.mu < 0.0) {
            return Err(Error::invalid(format!("sampling probabilities sum to {sum}")));
        }
        for e in &self.entries {
            if let Some(m) = e.recipe.matrix_form() {
                let sq = m.mul(m)?;
                if sq.max_abs_diff(m) > 1e-8 {
                    return Err(Error::invalid(format!("entry of term {} is not idempotent", e.term)));
                }
            }
        }
        let p_s = (self.gamma_s + self.alpha_total()) / self.tau;
        if (p_s - self.p_s).abs() > 1e-10 {
            return Err(Error::invalid("stored p_s disagrees with (γ_s + α)/τ"));
        }
        Ok(())
    }
}

/// Translate `W = γ_s 𝟙 − Σ_i O_i` on `n_qubits` into a sampling table.
pub fn translate_witness(n_qubits: usize, gamma_s: f64, terms: &[WitnessTerm]) -> Result<SamplingTable> {
    if terms.is_empty() {
        return Err(Error::invalid("witness has no terms"));
    }
    let mut raw: Vec<(f64, usize, Recipe)> = Vec::new();
    let mut shifts = Vec::with_capacity(terms.len());
    for (i, term) in terms.iter().enumerate() {
        // (eigenvalue, recipe) pairs before shifting
        let spectrum: Vec<(f64, Recipe)> = match &term.spec {
            TermSpec::Pauli { string, weight } => {
                check_width(string, n_qubits)?;
                if !string.is_hermitian() {
                    return Err(Error::NotHermitian { deviation: 1.0 });
                }
                if string.is_identity() {
                    let sign = if string.is_negative() { -1.0 } else { 1.0 };
                    vec![(sign * weight, Recipe::stabilizer(Vec::new(), false)?)]
                } else {
                    vec![
                        (*weight, Recipe::stabilizer(vec![string.clone()], false)?),
                        (-weight, Recipe::stabilizer(vec![string.negated()], false)?),
                    ]
                }
            }
            TermSpec::StabilizerProjector { generators, weight } => {
                if generators.is_empty() {
                    return Err(Error::invalid("stabilizer projector needs generators"));
                }
                for g in generators {
                    check_width(g, n_qubits)?;
                    if !g.is_hermitian() {
                        return Err(Error::NotHermitian { deviation: 1.0 });
                    }
                }
                for (a, g) in generators.iter().enumerate() {
                    if generators[a + 1..].iter().any(|h| !g.commutes_with(h)) {
                        return Err(Error::invalid("projector generators must commute"));
                    }
                }
                vec![
                    (*weight, Recipe::stabilizer(generators.clone(), false)?),
                    (0.0, Recipe::stabilizer(generators.clone(), true)?),
                ]
            }
            TermSpec::Matrix { support, observable } => {
                if observable.dim() != 1 << support.len() {
                    return Err(Error::DimensionMismatch { expected: 1 << support.len(), actual: observable.dim() });
                }
                if support.iter().any(|&q| q >= n_qubits) {
                    return Err(Error::invalid("term support outside the register"));
                }
                observable.ensure_hermitian()?;
                observable
                    .spectral_projectors(1e-9)?
                    .into_iter()
                    .map(|(l, p)| (l, Recipe::Projector { support: support.clone(), matrix: p }))
                    .collect()
            }
        };
        let lambda_min = spectrum.iter().map(|(l, _)| *l).fold(f64::INFINITY, f64::min);
        let minimal = (-lambda_min).max(0.0);
        let alpha = match term.shift {
            None => minimal,
            Some(a) if a < 0.0 || a + 1e-12 < minimal => {
                return Err(Error::invalid(format!(
                    "shift {a} of term {i} leaves a negative eigenvalue (needs at least {minimal})"
                )))
            }
            Some(a) => a,
        };
        shifts.push(alpha);
        for (l, recipe) in spectrum {
            let shifted = l + alpha;
            if shifted > EIG_TOL {
                raw.push((shifted, i, recipe));
            }
        }
    }
    let tau: f64 = raw.iter().map(|(l, _, _)| l).sum();
    if tau <= 0.0 {
        return Err(Error::invalid("shifted witness is identically zero"));
    }
    let alpha: f64 = shifts.iter().sum();
    let p_s = (gamma_s + alpha) / tau;
    if !(p_s > 0.0 && p_s < 1.0) {
        return Err(Error::invalid(format!("separable bound p_s = {p_s} outside (0, 1)")));
    }
    let entries: Vec<TableEntry> = raw
        .into_iter()
        .map(|(lambda, term, recipe)| TableEntry { mu: lambda / tau, lambda, term, recipe })
        .collect();
    let mut acc = 0.0;
    let cumulative = entries
        .iter()
        .map(|e| {
            acc += e.mu;
            acc
        })
        .collect();
    Ok(SamplingTable { n_qubits, entries, gamma_s, shifts, tau, p_s, p_e: None, cumulative })
}

fn check_width(p: &PauliString, n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: p.len() });
    }
    Ok(())
}
