use rand::Rng;

use super::{DetectionRun, Protocol, RoundRecord, Threshold};
use crate::error::{Error, Result};
use crate::parallel::try_map_rounds;
use crate::simcore::{Basis, LocalSampler, ShotSource};

/// `S_k = (1 - (-1)^{i+j}) / 2`: one when the pair is anti-correlated.
pub fn singlet_local_cost(i: u8, j: u8) -> u8 {
    (i ^ j) & 1
}

/// Per-pair choice of the common basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SettingPolicy {
    /// Uniform over `{XX, YY, ZZ}` for every pair and round.
    Randomized,
    /// The same basis list in every round, one entry per pair.
    Fixed(Vec<Basis>),
}

/// Singlet-product test on `2 n_pairs` qubits, pair `k` on qubits `2k, 2k+1`.
pub fn run_singlet_protocol<S>(
    source: &S,
    n_pairs: usize,
    repetitions: u64,
    policy: &SettingPolicy,
    threshold: Threshold,
    seed: u64,
) -> Result<DetectionRun>
where
    S: ShotSource,
    S::State: LocalSampler,
{
    if n_pairs == 0 || repetitions == 0 {
        return Err(Error::invalid("singlet protocol needs at least one pair and one round"));
    }
    for c in source.components() {
        if c.n_qubits() != 2 * n_pairs {
            return Err(Error::DimensionMismatch { expected: 2 * n_pairs, actual: c.n_qubits() });
        }
    }
    if let SettingPolicy::Fixed(b) = policy {
        if b.len() != n_pairs {
            return Err(Error::DimensionMismatch { expected: n_pairs, actual: b.len() });
        }
    }
    let rounds = try_map_rounds(seed, repetitions, |_, rng| {
        let shot = source.next_shot(rng);
        let pair_bases: Vec<Basis> = match policy {
            SettingPolicy::Randomized => (0..n_pairs).map(|_| Basis::ALL[rng.random_range(0..3)]).collect(),
            SettingPolicy::Fixed(b) => b.clone(),
        };
        let bases: Vec<Basis> = pair_bases.iter().flat_map(|&b| [b, b]).collect();
        let bits = shot.sample_local(&bases, rng)?;
        let local_successes = bits.chunks(2).map(|p| singlet_local_cost(p[0], p[1]) as u32).sum();
        Ok::<_, Error>(RoundRecord {
            setting: pair_bases.iter().map(|b| b.as_char()).collect(),
            local_successes,
            passed: false,
            value: None,
        })
    })?;
    DetectionRun::from_local_rounds(Protocol::Singlet, n_pairs, n_pairs, threshold, rounds)
}
