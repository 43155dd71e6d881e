//! Randomized single-copy entanglement detection: singlet products, linear
//! cluster states and ground states of local Hamiltonians.
//!
//! A run draws one copy per round from a [`ShotSource`](crate::simcore::ShotSource),
//! measures it in randomly chosen local settings and scores the outcome with
//! a local cost function. The separable bound of the singlet and cluster
//! tests is `2/3` per local check.

mod hamiltonian;
mod lcs;
mod singlet;

pub use hamiltonian::{
    hamiltonian_single_shot_energy, run_hamiltonian_protocol, single_shot_success_probability, HamiltonianTerm,
    LocalHamiltonian,
};
pub use lcs::{lcs_local_cost, lcs_regular_partition, run_lcs_protocol, LcsSetting};
pub use singlet::{run_singlet_protocol, singlet_local_cost, SettingPolicy};

use crate::error::Result;
use crate::stats::ConfidenceBound;

/// Separable success bound per local check for the singlet and LCS tests.
pub const LOCAL_SEPARABLE_BOUND: f64 = 2.0 / 3.0;

const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Singlet,
    Lcs,
    Hamiltonian,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Singlet => "singlet",
            Protocol::Lcs => "lcs",
            Protocol::Hamiltonian => "hamiltonian",
        }
    }
}

/// How the per-round pass threshold `(2/3 + ε) L` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// `ε` is the observed deviation of the pooled success rate from `2/3`.
    PostHoc,
    /// A fixed `ε`, e.g. `1/3` to demand that every local check succeed.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// Compact description of the settings drawn in this round.
    pub setting: String,
    pub local_successes: u32,
    pub passed: bool,
    /// Single-shot estimate for energy-based protocols.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRun {
    pub protocol: Protocol,
    pub n: usize,
    /// Local checks per round (`L`); zero for energy-based protocols.
    pub local_checks: usize,
    pub repetitions: u64,
    pub threshold: Threshold,
    /// Observed deviation in post-hoc mode, the fixed value otherwise.
    pub epsilon: f64,
    pub rounds: Vec<RoundRecord>,
    /// Pooled local success rate, or the pass fraction for energy tests.
    pub observed_rate: f64,
    /// `None` when no separable reference bound is known.
    pub confidence: Option<ConfidenceBound>,
}

impl DetectionRun {
    fn from_local_rounds(
        protocol: Protocol,
        n: usize,
        local_checks: usize,
        threshold: Threshold,
        mut rounds: Vec<RoundRecord>,
    ) -> Result<Self> {
        let repetitions = rounds.len() as u64;
        let trials = repetitions * local_checks as u64;
        let successes: u64 = rounds.iter().map(|r| r.local_successes as u64).sum();
        let confidence = ConfidenceBound::from_counts(successes, trials, LOCAL_SEPARABLE_BOUND)?;
        let epsilon = match threshold {
            Threshold::PostHoc => confidence.epsilon(),
            Threshold::Fixed(e) => e,
        };
        let cut = (LOCAL_SEPARABLE_BOUND + epsilon) * local_checks as f64 - THRESHOLD_TOL;
        for r in &mut rounds {
            r.passed = r.local_successes as f64 >= cut;
        }
        Ok(Self {
            protocol,
            n,
            local_checks,
            repetitions,
            threshold,
            epsilon,
            rounds,
            observed_rate: confidence.observed_rate,
            confidence: Some(confidence),
        })
    }

    pub fn local_successes(&self) -> Vec<u32> {
        self.rounds.iter().map(|r| r.local_successes).collect()
    }

    pub fn passes(&self) -> u64 {
        self.rounds.iter().filter(|r| r.passed).count() as u64
    }

    /// Fraction of rounds with `S_[n] = 1`.
    pub fn pass_rate(&self) -> f64 {
        self.passes() as f64 / self.repetitions.max(1) as f64
    }

    /// `1` when every round passed.
    pub fn s_overall(&self) -> u8 {
        u8::from(self.passes() == self.repetitions)
    }

    /// `C_min`, or `0` when there is no reference bound.
    pub fn confidence_lower_bound(&self) -> f64 {
        self.confidence.map_or(0.0, |c| c.c_min)
    }
}
