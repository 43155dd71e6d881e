use rand::Rng;

use super::{DetectionRun, Protocol, RoundRecord, Threshold};
use crate::error::{Error, Result};
use crate::parallel::try_map_rounds;
use crate::simcore::{Basis, LocalSampler, ShotSource};

/// The three measurement settings on a four-qubit cluster window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcsSetting {
    Zxzz,
    Zzxz,
    Zyyz,
}

impl LcsSetting {
    pub const ALL: [LcsSetting; 3] = [LcsSetting::Zxzz, LcsSetting::Zzxz, LcsSetting::Zyyz];

    pub fn bases(self) -> [Basis; 4] {
        use Basis::*;
        match self {
            LcsSetting::Zxzz => [Z, X, Z, Z],
            LcsSetting::Zzxz => [Z, Z, X, Z],
            LcsSetting::Zyyz => [Z, Y, Y, Z],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LcsSetting::Zxzz => "ZXZZ",
            LcsSetting::Zzxz => "ZZXZ",
            LcsSetting::Zyyz => "ZYYZ",
        }
    }
}

/// One when the parity relevant to the setting is even: bits 1-3 for ZXZZ,
/// bits 2-4 for ZZXZ and all four for ZYYZ.
pub fn lcs_local_cost(setting: LcsSetting, bits: [u8; 4]) -> u8 {
    let parity = match setting {
        LcsSetting::Zxzz => bits[0] ^ bits[1] ^ bits[2],
        LcsSetting::Zzxz => bits[1] ^ bits[2] ^ bits[3],
        LcsSetting::Zyyz => bits[0] ^ bits[1] ^ bits[2] ^ bits[3],
    };
    1 - (parity & 1)
}

/// Clusters `{t_k, …, t_k + 3}` with `t_k = offset + 3k (mod n)` on a
/// periodic chain of `n = 3L` qubits.
pub fn lcs_regular_partition(n: usize, l: usize, offset: usize) -> Result<Vec<[usize; 4]>> {
    if l == 0 || n != 3 * l {
        return Err(Error::invalid(format!("regular partition needs n = 3L, got n = {n}, L = {l}")));
    }
    Ok((0..l)
        .map(|k| {
            let t = offset + 3 * k;
            [t % n, (t + 1) % n, (t + 2) % n, (t + 3) % n]
        })
        .collect())
}

/// Single-copy linear-cluster test on a periodic chain of `n = 3L` qubits.
pub fn run_lcs_protocol<S>(
    source: &S,
    n: usize,
    l: usize,
    repetitions: u64,
    threshold: Threshold,
    seed: u64,
) -> Result<DetectionRun>
where
    S: ShotSource,
    S::State: LocalSampler,
{
    lcs_regular_partition(n, l, 0)?;
    if repetitions == 0 {
        return Err(Error::invalid("LCS protocol needs at least one round"));
    }
    for c in source.components() {
        if c.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: c.n_qubits() });
        }
    }
    let rounds = try_map_rounds(seed, repetitions, |_, rng| {
        let shot = source.next_shot(rng);
        let offset = rng.random_range(0..n);
        let clusters = lcs_regular_partition(n, l, offset)?;
        let settings: Vec<LcsSetting> = (0..l).map(|_| LcsSetting::ALL[rng.random_range(0..3)]).collect();
        let mut bases = vec![Basis::Z; n];
        for (c, s) in clusters.iter().zip(&settings) {
            for (&q, b) in c.iter().zip(s.bases()) {
                bases[q] = b;
            }
        }
        let bits = shot.sample_local(&bases, rng)?;
        let local_successes = clusters
            .iter()
            .zip(&settings)
            .map(|(c, &s)| lcs_local_cost(s, c.map(|q| bits[q])) as u32)
            .sum();
        let labels: Vec<&str> = settings.iter().map(|s| s.label()).collect();
        Ok::<_, Error>(RoundRecord {
            setting: format!("r={offset} {}", labels.join(" ")),
            local_successes,
            passed: false,
            value: None,
        })
    })?;
    DetectionRun::from_local_rounds(Protocol::Lcs, n, l, threshold, rounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_examples() {
        assert_eq!(lcs_local_cost(LcsSetting::Zxzz, [0, 0, 0, 0]), 1);
        assert_eq!(lcs_local_cost(LcsSetting::Zyyz, [1, 0, 0, 0]), 0);
        assert_eq!(lcs_local_cost(LcsSetting::Zzxz, [1, 0, 1, 0]), 0);
        assert_eq!(lcs_local_cost(LcsSetting::Zxzz, [0, 0, 0, 1]), 1);
    }

    #[test]
    fn partition_examples() {
        let p = lcs_regular_partition(24, 8, 1).unwrap();
        assert_eq!(p[0], [1, 2, 3, 4]);
        assert_eq!(p[7], [22, 23, 0, 1]);
        for w in p.windows(2) {
            assert_eq!(w[0][3], w[1][0]);
        }
        assert_eq!(lcs_regular_partition(12, 4, 0).unwrap().len(), 4);
        assert!(lcs_regular_partition(13, 4, 0).is_err());
    }
}
