use super::{Recipe, SamplingTable};
use crate::error::{Error, Result};
use crate::parallel::try_map_rounds;
use crate::simcore::{LocalSampler, ShotSource};
use crate::stats::{kl_divergence, ConfidenceBound};

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRound {
    pub entry: usize,
    pub term: usize,
    /// Local bases string, or `proj` for matrix projectors.
    pub setting: String,
    pub outcome: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub rounds: Vec<WitnessRound>,
    pub successes: u64,
    /// Observed success rate `S_[N]`.
    pub success_rate: f64,
    pub p_s: f64,
    pub epsilon: f64,
    pub confidence: ConfidenceBound,
}

impl WitnessReport {
    pub fn outcomes(&self) -> Vec<u8> {
        self.rounds.iter().map(|r| r.outcome).collect()
    }
}

/// Draw `repetitions` copies, measure one sampled `M_ik` on each and bound
/// the confidence from the observed rate.
pub fn run_witness_protocol<S>(table: &SamplingTable, source: &S, repetitions: u64, seed: u64) -> Result<WitnessReport>
where
    S: ShotSource,
    S::State: LocalSampler,
{
    if repetitions == 0 {
        return Err(Error::invalid("witness protocol needs at least one round"));
    }
    for c in source.components() {
        if c.n_qubits() != table.n_qubits {
            return Err(Error::DimensionMismatch { expected: table.n_qubits, actual: c.n_qubits() });
        }
    }
    let rounds = try_map_rounds(seed, repetitions, |_, rng| {
        let shot = source.next_shot(rng);
        let entry = table.sample_entry(rng);
        let e = &table.entries[entry];
        let pass = e.recipe.measure(shot, rng)?;
        let setting = match &e.recipe {
            Recipe::Stabilizer { .. } => {
                e.recipe.bases(table.n_qubits).expect("stabilizer").iter().map(|b| b.as_char()).collect()
            }
            Recipe::Projector { .. } => "proj".to_string(),
        };
        Ok::<_, Error>(WitnessRound { entry, term: e.term, setting, outcome: u8::from(pass) })
    })?;
    let successes = rounds.iter().map(|r| r.outcome as u64).sum();
    let confidence = ConfidenceBound::from_counts(successes, repetitions, table.p_s)?;
    Ok(WitnessReport {
        rounds,
        successes,
        success_rate: confidence.observed_rate,
        p_s: table.p_s,
        epsilon: confidence.epsilon(),
        confidence,
    })
}

/// Cumulative `(copies, C_min)` after each round of a 0/1 outcome log.
pub fn confidence_curve(outcomes: &[u8], p_s: f64) -> Result<Vec<(u64, f64)>> {
    if outcomes.is_empty() {
        return Err(Error::invalid("empty round log"));
    }
    let mut successes = 0u64;
    outcomes
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            successes += u64::from(o != 0);
            let k = i as u64 + 1;
            Ok((k, ConfidenceBound::from_counts(successes, k, p_s)?.c_min))
        })
        .collect()
}

/// Copies needed for confidence `1 − δ`: `⌈ln δ⁻¹ / D(p_e‖p_s)⌉`.
pub fn copies_needed(p_e: f64, p_s: f64, delta: f64) -> Result<u64> {
    if !(0.0 < p_s && p_s < p_e && p_e <= 1.0) {
        return Err(Error::invalid(format!("need 0 < p_s < p_e ≤ 1, got p_s = {p_s}, p_e = {p_e}")));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid(format!("δ = {delta} outside (0, 1)")));
    }
    Ok(((1.0 / delta).ln() / kl_divergence(p_e, p_s)?).ceil() as u64)
}

/// Small-deviation approximation of [`copies_needed`] for `ε₀ = p_e − p_s`:
/// `ln δ⁻¹/ε₀` when `p_e = 1`, else `2 p_e (1−p_e) ln δ⁻¹/ε₀²`.
pub fn copies_needed_asymptotic(p_e: f64, epsilon0: f64, delta: f64) -> f64 {
    let l = (1.0 / delta).ln();
    if p_e >= 1.0 {
        l / epsilon0
    } else {
        2.0 * p_e * (1.0 - p_e) * l / (epsilon0 * epsilon0)
    }
}
