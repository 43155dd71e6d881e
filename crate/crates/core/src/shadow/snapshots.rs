use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::clifford::{random_clifford, CliffordTableau};
use super::{check_label, EstimateWithError, HeaderReader};
use crate::error::{Error, Result};
use crate::mub::gaussian;
use crate::parallel::try_map_rounds;
use crate::simcore::{
    basis_state, expectation, Basis, LocalSampler, ObservableMatrix, PauliString, ProductState, ShotSource, StateVector,
};
use crate::stabsim::StabilizerTableau;
use crate::stats::median_of_means;

const MAGIC: &str = "# qverify shadow snapshots v1";

/// Clifford snapshots are reconstructed on dense vectors of this many qubits
/// at most.
pub const MAX_CLIFFORD_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShadowEnsemble {
    /// Independent uniformly random `X`/`Y`/`Z` basis per qubit.
    RandomPauli,
    /// Uniformly random global Clifford.
    RandomClifford,
}

impl ShadowEnsemble {
    pub fn name(self) -> &'static str {
        match self {
            ShadowEnsemble::RandomPauli => "random_pauli",
            ShadowEnsemble::RandomClifford => "random_clifford",
        }
    }
}

impl fmt::Display for ShadowEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShadowEnsemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_pauli" | "pauli" => Ok(ShadowEnsemble::RandomPauli),
            "random_clifford" | "clifford" => Ok(ShadowEnsemble::RandomClifford),
            _ => Err(Error::invalid(format!("unknown shadow ensemble `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnapshotSetting {
    Pauli(Vec<Basis>),
    Clifford(CliffordTableau),
}

/// One randomized measurement: the setting and one outcome bit per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub setting: SnapshotSetting,
    pub bits: Vec<u8>,
}

impl Snapshot {
    pub fn n_qubits(&self) -> usize {
        self.bits.len()
    }

    /// The single-shot estimate `ρ̂` as a dense matrix.
    pub fn matrix(&self) -> Result<ObservableMatrix> {
        match &self.setting {
            SnapshotSetting::Pauli(bases) => Ok(pauli_factors(bases, &self.bits)
                .into_iter()
                .reduce(|acc, m| acc.kron(&m))
                .expect("at least one qubit")),
            SnapshotSetting::Clifford(tab) => {
                let phi = clifford_state(tab, &self.bits)?;
                let dim = phi.dim();
                let proj = ObservableMatrix::projector_onto(&phi).scale(dim as f64 + 1.0);
                proj.sub(&ObservableMatrix::identity(dim))
            }
        }
    }

    /// `Tr(A ρ̂)` for a Hermitian `A`.
    pub fn value(&self, a: &ObservableMatrix) -> Result<f64> {
        let dim = 1usize << self.n_qubits();
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: a.dim() });
        }
        match &self.setting {
            SnapshotSetting::Pauli(_) => Ok(trace_product(a, &self.matrix()?)),
            SnapshotSetting::Clifford(tab) => {
                let phi = clifford_state(tab, &self.bits)?;
                Ok((dim as f64 + 1.0) * expectation(&phi, a)? - a.trace().re)
            }
        }
    }

    fn write(&self, out: &mut String) {
        match &self.setting {
            SnapshotSetting::Pauli(bases) => out.extend(bases.iter().map(|b| b.as_char())),
            SnapshotSetting::Clifford(tab) => out.push_str(&tab.to_string()),
        }
        out.push(' ');
        out.extend(self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out.push('\n');
    }

    fn parse(line: &str, ensemble: ShadowEnsemble, n: usize) -> Option<Self> {
        let (setting, bits) = line.split_once(' ')?;
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Some(0u8),
                '1' => Some(1u8),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()?;
        let setting = match ensemble {
            ShadowEnsemble::RandomPauli => {
                SnapshotSetting::Pauli(setting.chars().map(Basis::from_char).collect::<Option<Vec<_>>>()?)
            }
            ShadowEnsemble::RandomClifford => SnapshotSetting::Clifford(setting.parse().ok()?),
        };
        let width = match &setting {
            SnapshotSetting::Pauli(b) => b.len(),
            SnapshotSetting::Clifford(t) => t.n_qubits(),
        };
        (width == n && bits.len() == n).then_some(Snapshot { setting, bits })
    }
}

/// `Tr(A B)` for square matrices of equal size.
fn trace_product(a: &ObservableMatrix, b: &ObservableMatrix) -> f64 {
    let (a, b) = (a.matrix(), b.matrix());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc.re
}

/// Per-qubit factors `3|s⟩⟨s| − 𝟙`.
fn pauli_factors(bases: &[Basis], bits: &[u8]) -> Vec<ObservableMatrix> {
    bases
        .iter()
        .zip(bits)
        .map(|(&b, &bit)| {
            let s = basis_state(b, bit);
            ObservableMatrix::projector(&s).scale(3.0).sub(&ObservableMatrix::identity(2)).expect("2x2")
        })
        .collect()
}

/// The stabilizer state `U†|b⟩`: the joint eigenstate of the stabilizer
/// images with eigenvalues `(−1)^{b_q}`, found by projecting a fixed
/// pseudo-random vector.
fn clifford_state(tab: &CliffordTableau, bits: &[u8]) -> Result<StateVector> {
    let n = tab.n_qubits();
    if n > MAX_CLIFFORD_QUBITS {
        return Err(Error::CapacityExceeded { requested: n, limit: MAX_CLIFFORD_QUBITS });
    }
    let signed: Vec<PauliString> = tab
        .stabilizers()
        .iter()
        .zip(bits)
        .map(|(p, &b)| if b == 1 { p.negated() } else { p.clone() })
        .collect();
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    'attempt: for _ in 0..16 {
        let amps = (0..dim).map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng))).collect();
        let mut v = StateVector::from_unnormalized(amps)?;
        for p in &signed {
            let mut pv = v.clone();
            pv.apply_pauli(p)?;
            for (a, b) in v.amplitudes_mut().iter_mut().zip(pv.amplitudes()) {
                *a = 0.5 * (*a + b);
            }
            if v.norm_sqr() < 1e-8 / dim as f64 {
                continue 'attempt;
            }
            v.normalize();
        }
        return Ok(v);
    }
    Err(Error::invalid("stabilizer images do not define a unique state"))
}

/// A backend that can measure a set of commuting Pauli strings one after
/// another on a fresh copy of its state.
pub trait SnapshotSampler: LocalSampler {
    fn measure_commuting<R: Rng + ?Sized>(&self, paulis: &[PauliString], rng: &mut R) -> Result<Vec<u8>>;
}

fn eig_bit(r: i8) -> u8 {
    (r == -1) as u8
}

impl SnapshotSampler for StateVector {
    fn measure_commuting<R: Rng + ?Sized>(&self, paulis: &[PauliString], rng: &mut R) -> Result<Vec<u8>> {
        let mut s = self.clone();
        paulis.iter().map(|p| s.measure_pauli_string(p, rng).map(eig_bit)).collect()
    }
}

impl SnapshotSampler for ProductState {
    fn measure_commuting<R: Rng + ?Sized>(&self, paulis: &[PauliString], rng: &mut R) -> Result<Vec<u8>> {
        self.to_statevector()?.measure_commuting(paulis, rng)
    }
}

impl SnapshotSampler for StabilizerTableau {
    fn measure_commuting<R: Rng + ?Sized>(&self, paulis: &[PauliString], rng: &mut R) -> Result<Vec<u8>> {
        let mut t = self.clone();
        paulis.iter().map(|p| t.measure_pauli_string(p, rng).map(eig_bit)).collect()
    }
}

/// A collection of i.i.d. randomized measurements of one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowSnapshotSet {
    pub ensemble: ShadowEnsemble,
    pub n_qubits: usize,
    pub snapshots: Vec<Snapshot>,
    pub seed: u64,
    pub source_label: String,
}

impl ShadowSnapshotSet {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        check_label(&label)?;
        self.source_label = label;
        Ok(self)
    }

    pub fn merge(&mut self, other: &ShadowSnapshotSet) -> Result<()> {
        if self.ensemble != other.ensemble || self.n_qubits != other.n_qubits {
            return Err(Error::invalid("only snapshot sets with equal ensemble and width can be merged"));
        }
        self.snapshots.extend_from_slice(&other.snapshots);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{MAGIC}\nensemble {}\nn_qubits {}\ncount {}\nseed {}\nlabel {}\nsnapshots\n",
            self.ensemble,
            self.n_qubits,
            self.snapshots.len(),
            self.seed,
            self.source_label
        );
        for snap in &self.snapshots {
            snap.write(&mut s);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut h = HeaderReader::new(text, MAGIC)?;
        let ensemble: ShadowEnsemble = h.parsed("ensemble")?;
        let n_qubits: usize = h.parsed("n_qubits")?;
        let count: usize = h.parsed("count")?;
        let seed: u64 = h.parsed("seed")?;
        let (_, label) = h.field("label")?;
        h.marker("snapshots")?;
        let mut snapshots = Vec::with_capacity(count);
        for (line, l) in h.body() {
            let snap = Snapshot::parse(l, ensemble, n_qubits)
                .ok_or_else(|| Error::Parse { line, message: format!("bad snapshot `{l}`") })?;
            snapshots.push(snap);
        }
        if snapshots.len() != count {
            return Err(Error::Parse { line: 4, message: format!("declared {count} snapshots, found {}", snapshots.len()) });
        }
        Ok(Self { ensemble, n_qubits, snapshots, seed, source_label: label.to_string() })
    }
}

/// Draw `count` snapshots with independently random settings.
pub fn shadows_collect<S>(
    source: &S,
    n_qubits: usize,
    count: u64,
    ensemble: ShadowEnsemble,
    seed: u64,
) -> Result<ShadowSnapshotSet>
where
    S: ShotSource,
    S::State: SnapshotSampler,
{
    if n_qubits == 0 {
        return Err(Error::invalid("shadows need at least one qubit"));
    }
    if let Some(c) = source.components().iter().find(|c| c.n_qubits() != n_qubits) {
        return Err(Error::DimensionMismatch { expected: n_qubits, actual: c.n_qubits() });
    }
    if ensemble == ShadowEnsemble::RandomClifford && n_qubits > MAX_CLIFFORD_QUBITS {
        return Err(Error::CapacityExceeded { requested: n_qubits, limit: MAX_CLIFFORD_QUBITS });
    }
    let snapshots = try_map_rounds(seed, count, |_, rng| {
        let state = source.next_shot(rng);
        match ensemble {
            ShadowEnsemble::RandomPauli => {
                let bases: Vec<Basis> = (0..n_qubits).map(|_| Basis::ALL[rng.random_range(0..3)]).collect();
                let bits = state.sample_local(&bases, rng)?;
                Ok(Snapshot { setting: SnapshotSetting::Pauli(bases), bits })
            }
            ShadowEnsemble::RandomClifford => {
                let tab = random_clifford(n_qubits, rng)?;
                let bits = state.measure_commuting(tab.stabilizers(), rng)?;
                Ok(Snapshot { setting: SnapshotSetting::Clifford(tab), bits })
            }
        }
    })?;
    Ok(ShadowSnapshotSet { ensemble, n_qubits, snapshots, seed, source_label: String::new() })
}

/// `Tr(A ρ̂)` for one snapshot.
pub fn shadows_single_shot(snapshot: &Snapshot, a: &ObservableMatrix) -> Result<f64> {
    snapshot.value(a)
}

/// Upper bound on the single-shot variance of `Tr(A ρ̂)`: `3 Tr(A₀²)` for
/// Clifford snapshots and `4^n ‖A₀‖²` for Pauli snapshots, with `A₀` the
/// traceless part of `A`.
fn variance_bound(ensemble: ShadowEnsemble, a: &ObservableMatrix, n: usize) -> Result<f64> {
    let dim = a.dim();
    let shift = a.trace().re / dim as f64;
    let a0 = a.sub(&ObservableMatrix::identity(dim).scale(shift))?;
    Ok(match ensemble {
        ShadowEnsemble::RandomClifford => 3.0 * a0.frobenius_norm().powi(2),
        ShadowEnsemble::RandomPauli => {
            let (vals, _) = a0.eigh()?;
            let op = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            4f64.powi(n as i32) * op * op
        }
    })
}

/// Median-of-means estimates of `Tr(A_i ρ)`. Snapshots beyond the largest
/// multiple of `k_groups` are dropped. The error radius is
/// `sqrt(34 σ² K / N)` with `σ²` the single-shot variance bound, holding
/// simultaneously for all `M` observables with probability at least
/// `1 − 2M e^{−K/2}`.
pub fn shadows_estimate(
    set: &ShadowSnapshotSet,
    observables: &[ObservableMatrix],
    k_groups: usize,
) -> Result<Vec<EstimateWithError>> {
    let dim = 1usize << set.n_qubits;
    for a in observables {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: a.dim() });
        }
        a.ensure_hermitian()?;
    }
    if k_groups == 0 || k_groups > set.len() {
        return Err(Error::invalid(format!("k_groups = {k_groups} must lie in 1..={}", set.len())));
    }
    let per_snapshot: Vec<Vec<f64>> = set
        .snapshots
        .par_iter()
        .map(|s| observables.iter().map(|a| s.value(a)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let used = set.len() / k_groups * k_groups;
    let m = observables.len() as f64;
    let delta = (2.0 * m * (-(k_groups as f64) / 2.0).exp()).min(1.0);
    observables
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let values: Vec<f64> = per_snapshot.iter().map(|v| v[i]).collect();
            let value = median_of_means(&values, k_groups)?;
            let sigma2 = variance_bound(set.ensemble, a, set.n_qubits)?;
            Ok(EstimateWithError {
                value: Complex64::new(value, 0.0),
                epsilon: (34.0 * sigma2 * k_groups as f64 / used as f64).sqrt(),
                delta,
                n_used: used as u64,
            })
        })
        .collect()
}
