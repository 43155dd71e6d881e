use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::error::{Error, Result};

/// A per-shot sampler of pure components of a mixed state.
pub trait ShotSource: Sync {
    type State;

    fn components(&self) -> &[Self::State];

    /// Pick a component index for one shot.
    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize;

    /// Number of shots drawn so far through [`ShotSource::next_shot`].
    fn shots_drawn(&self) -> u64;

    #[doc(hidden)]
    fn record_shot(&self);

    fn next_shot<R: Rng + ?Sized>(&self, rng: &mut R) -> &Self::State {
        self.next_indexed(rng).1
    }

    fn next_indexed<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, &Self::State) {
        let i = self.draw_index(rng);
        self.record_shot();
        (i, &self.components()[i])
    }
}

/// `ρ = λ ρ_noise + (1−λ) ρ_target`, sampled one pure shot at a time.
/// Component `0` is the target and `1` the noise state.
#[derive(Debug)]
pub struct NoisyStateSource<S> {
    states: [S; 2],
    lambda: f64,
    drawn: AtomicU64,
}

impl<S> NoisyStateSource<S> {
    pub fn new(target: S, noise: S, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("noise weight {lambda} outside [0, 1]")));
        }
        Ok(Self { states: [target, noise], lambda, drawn: AtomicU64::new(0) })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn target(&self) -> &S {
        &self.states[0]
    }

    pub fn noise(&self) -> &S {
        &self.states[1]
    }
}

impl<S: Clone> NoisyStateSource<S> {
    /// Noise-free source that always emits `target`.
    pub fn ideal(target: S) -> Self {
        Self { states: [target.clone(), target], lambda: 0.0, drawn: AtomicU64::new(0) }
    }
}

impl<S: Sync> ShotSource for NoisyStateSource<S> {
    type State = S;

    fn components(&self) -> &[S] {
        &self.states
    }

    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        // always consume one uniform so streams stay aligned across λ
        usize::from(rng.random::<f64>() < self.lambda)
    }

    fn shots_drawn(&self) -> u64 {
        self.drawn.load(Ordering::Relaxed)
    }

    fn record_shot(&self) {
        self.drawn.fetch_add(1, Ordering::Relaxed);
    }
}

/// Finite mixture with arbitrary weights.
#[derive(Debug)]
pub struct MixtureSource<S> {
    states: Vec<S>,
    cumulative: Vec<f64>,
    drawn: AtomicU64,
}

impl<S> MixtureSource<S> {
    pub fn new(states: Vec<S>, weights: &[f64]) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::invalid("mixture needs one weight per component"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("mixture weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("mixture weights sum to zero"));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Self { states, cumulative, drawn: AtomicU64::new(0) })
    }

    pub fn uniform(states: Vec<S>) -> Result<Self> {
        let w = vec![1.0; states.len()];
        Self::new(states, &w)
    }
}

impl<S: Sync> ShotSource for MixtureSource<S> {
    type State = S;

    fn components(&self) -> &[S] {
        &self.states
    }

    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        self.cumulative.partition_point(|&c| c <= u).min(self.states.len() - 1)
    }

    fn shots_drawn(&self) -> u64 {
        self.drawn.load(Ordering::Relaxed)
    }

    fn record_shot(&self) {
        self.drawn.fetch_add(1, Ordering::Relaxed);
    }
}
