//! Run configuration shared by every measurement: seed, trials, primes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{PrimeContext, PRIME_BITS};
use crate::rng::{label, stream, StreamRng};
use crate::variety::{Compiled, VarietySpec};

pub const DEFAULT_TRIALS: usize = 5;
pub const PRIMES_PER_RUN: usize = 2;

/// Seeded measurement context. Two engines with equal fields produce
/// identical results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Engine {
    seed: u64,
    trials: usize,
    primes: Vec<PrimeContext>,
    #[serde(skip)]
    parallel: bool,
}

impl Engine {
    /// Engine with [`DEFAULT_TRIALS`] trials and [`PRIMES_PER_RUN`] distinct random primes.
    pub fn new(seed: u64) -> Self {
        Engine::with_trials(seed, DEFAULT_TRIALS)
    }

    pub fn with_trials(seed: u64, trials: usize) -> Self {
        Engine::configured(seed, trials, PRIME_BITS, PRIMES_PER_RUN).expect("default configuration is valid")
    }

    /// Engine with `count` distinct random primes of `bits` bits.
    pub fn configured(seed: u64, trials: usize, bits: u32, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidSpec("at least one prime per run".into()));
        }
        let mut rng = stream(seed, &[label("primes")]);
        let mut primes: Vec<PrimeContext> = Vec::with_capacity(count);
        while primes.len() < count {
            let p = PrimeContext::random(bits, seed, &mut rng)?;
            if primes.iter().all(|q| q.modulus() != p.modulus()) {
                primes.push(p);
            }
        }
        Ok(Engine { seed, trials: trials.max(1), primes, parallel: true })
    }

    /// Engine over explicitly chosen primes, mainly for tests.
    pub fn with_primes(seed: u64, trials: usize, primes: Vec<PrimeContext>) -> Self {
        assert!(!primes.is_empty(), "at least one prime");
        Engine { seed, trials: trials.max(1), primes, parallel: true }
    }

    /// Turns the thread pool off for this engine. Without the `parallel`
    /// feature everything is sequential regardless.
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn primes(&self) -> &[PrimeContext] {
        &self.primes
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.primes.iter().map(|p| p.modulus()).collect()
    }

    pub fn parallel(&self) -> bool {
        self.parallel
    }

    /// The spec reduced modulo each prime, in prime order.
    pub fn compile(&self, spec: &VarietySpec) -> Result<Vec<Compiled>> {
        self.primes.iter().map(|f| spec.compile(f)).collect()
    }

    /// Random stream for one unit of work.
    pub fn stream(&self, task: &str, prime_index: usize, trial: usize) -> StreamRng {
        stream(self.seed, &[label(task), prime_index as u64, trial as u64])
    }

    /// All `(prime index, trial)` pairs, prime-major.
    pub fn jobs(&self) -> Vec<(usize, usize)> {
        (0..self.primes.len()).flat_map(|p| (0..self.trials).map(move |t| (p, t))).collect()
    }
}
