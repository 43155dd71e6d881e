use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel::round_rng;
use crate::simcore::{LocalSampler, ObservableMatrix, ShotSource};

const UNIT_TOL: f64 = 1e-9;

/// Verification strategy `Ω = Σ_m p_m M_m` with a unique `+1` eigenvector.
#[derive(Debug, Clone)]
pub struct QsvStrategy {
    pub settings: Vec<(f64, ObservableMatrix)>,
    pub omega: ObservableMatrix,
    /// Second-largest eigenvalue of `Ω`.
    pub lambda2: f64,
    /// Spectral gap `1 − λ₂`.
    pub nu: f64,
    n_qubits: usize,
    cumulative: Vec<f64>,
}

impl QsvStrategy {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn sample_setting<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        self.cumulative.partition_point(|&c| c <= u).min(self.settings.len() - 1)
    }
}

pub fn qsv_build_strategy(settings: Vec<(f64, ObservableMatrix)>) -> Result<QsvStrategy> {
    let Some(dim) = settings.first().map(|(_, m)| m.dim()) else {
        return Err(Error::invalid("strategy has no settings"));
    };
    if !dim.is_power_of_two() {
        return Err(Error::invalid("strategy dimension is not a power of two"));
    }
    let total: f64 = settings.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-10 || settings.iter().any(|(p, _)| *p < 0.0) {
        return Err(Error::invalid(format!("setting probabilities sum to {total}")));
    }
    let mut omega = ObservableMatrix::zeros(dim);
    for (p, m) in &settings {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: m.dim() });
        }
        m.ensure_hermitian()?;
        if m.mul(m)?.max_abs_diff(m) > 1e-8 {
            return Err(Error::invalid("strategy setting is not a projector"));
        }
        omega = omega.add(&m.scale(*p))?;
    }
    let (vals, _) = omega.eigh()?;
    let top = vals[dim - 1];
    if (top - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("no state passes with certainty (λ_max = {top})")));
    }
    let ones = vals.iter().filter(|&&v| (v - 1.0).abs() <= UNIT_TOL).count();
    if ones > 1 {
        return Err(Error::DegenerateStrategy(ones));
    }
    let lambda2 = if dim > 1 { vals[dim - 2] } else { 0.0 };
    let mut acc = 0.0;
    let cumulative = settings
        .iter()
        .map(|(p, _)| {
            acc += p / total;
            acc
        })
        .collect();
    Ok(QsvStrategy {
        settings,
        omega,
        lambda2,
        nu: 1.0 - lambda2,
        n_qubits: dim.trailing_zeros() as usize,
        cumulative,
    })
}

/// `⌈ln δ⁻¹ / (ν ε)⌉`.
pub fn qsv_rounds(nu: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0 && nu > 0.0) {
        return Err(Error::invalid("need 0 < ε, δ < 1 and ν > 0"));
    }
    Ok(((1.0 / delta).ln() / (nu * epsilon)).ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsvVerdict {
    Accepted { rounds: u64 },
    /// First failing round, counted from 1.
    Rejected { round: u64 },
}

/// Sequential test that stops at the first failed round.
pub fn qsv_run<S>(strategy: &QsvStrategy, source: &S, epsilon: f64, delta: f64, seed: u64) -> Result<QsvVerdict>
where
    S: ShotSource,
    S::State: LocalSampler,
{
    let n = qsv_rounds(strategy.nu, epsilon, delta)?;
    let mut rng = round_rng(seed, 0);
    let support: Vec<usize> = (0..strategy.n_qubits).collect();
    for round in 1..=n {
        let shot = source.next_shot(&mut rng);
        if shot.n_qubits() != strategy.n_qubits {
            return Err(Error::DimensionMismatch { expected: strategy.n_qubits, actual: shot.n_qubits() });
        }
        let (_, m) = &strategy.settings[strategy.sample_setting(&mut rng)];
        let p = shot
            .projector_probability(&support, m)
            .ok_or_else(|| Error::invalid("backend cannot evaluate strategy projectors"))?;
        if rng.random::<f64>() >= p {
            return Ok(QsvVerdict::Rejected { round });
        }
    }
    Ok(QsvVerdict::Accepted { rounds: n })
}
