//! Monte Carlo adversary experiments.
//!
//! Each experiment is a minimal adversary model under which the matching
//! closed form in [`crate::analysis`] holds exactly:
//!
//! * fragment capture: the adversary taps one of the `r` fragment channels
//!   uniformly and wins if it carries fragment 0;
//! * corrupt decision maker: a task's coordinator is uniform over `m`
//!   decision makers and decision maker 0 is corrupt;
//! * wrong agent: independent uniform coordinator over `m` (0 corrupt) and
//!   agent over `p` (0 compromised); the adversary wins if either is bad.
//!
//! These are interpretations, not a stated threat model. Trial `i` draws only
//! from substream `i` of a family keyed by the seed and the experiment, so
//! estimates do not depend on execution order.

use num_traits::{Float, FromPrimitive};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{SeedTree, StreamFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    FragmentCapture { r: u64 },
    CorruptDm { m: u64 },
    WrongAgent { m: u64, p: u64 },
}

impl Experiment {
    fn label(&self) -> (&'static str, Vec<u64>) {
        match *self {
            Experiment::FragmentCapture { r } => ("fragment-capture", vec![r]),
            Experiment::CorruptDm { m } => ("corrupt-dm", vec![m]),
            Experiment::WrongAgent { m, p } => ("wrong-agent", vec![m, p]),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Experiment::FragmentCapture { r } => r >= 1,
            Experiment::CorruptDm { m } => m >= 1,
            Experiment::WrongAgent { m, p } => m >= 1 && p >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("experiment parameters must be >= 1: {self:?}")))
        }
    }

    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        match *self {
            Experiment::FragmentCapture { r } => experiment_fragment_capture(r, rng),
            Experiment::CorruptDm { m } => experiment_corrupt_dm(m, rng),
            Experiment::WrongAgent { m, p } => experiment_wrong_agent(m, p, rng),
        }
    }
}

pub fn experiment_fragment_capture<R: Rng + ?Sized>(r: u64, rng: &mut R) -> bool {
    rng.gen_range(0..r) == 0
}

pub fn experiment_corrupt_dm<R: Rng + ?Sized>(m: u64, rng: &mut R) -> bool {
    rng.gen_range(0..m) == 0
}

pub fn experiment_wrong_agent<R: Rng + ?Sized>(m: u64, p: u64, rng: &mut R) -> bool {
    let coordinator_corrupt = rng.gen_range(0..m) == 0;
    let agent_compromised = rng.gen_range(0..p) == 0;
    coordinator_corrupt || agent_compromised
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryConfig {
    pub experiment: Experiment,
    pub trials: u64,
    pub seed: u64,
}

impl AdversaryConfig {
    pub fn new(experiment: Experiment, trials: u64, seed: u64) -> Self {
        Self {
            experiment,
            trials,
            seed,
        }
    }

    fn family(&self) -> StreamFamily {
        let (label, idx) = self.experiment.label();
        SeedTree::new(self.seed).family(label, &idx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T = f64> {
    pub p_hat: T,
    /// `sqrt(p_hat (1 - p_hat) / N)`.
    pub stderr: T,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl<T: Float + FromPrimitive> McEstimate<T> {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let n = T::from_u64(trials).expect("trial count representable");
        let p_hat = T::from_u64(successes).expect("success count representable") / n;
        let stderr = (p_hat * (T::one() - p_hat) / n).sqrt();
        Self {
            p_hat,
            stderr,
            successes,
            trials,
            seed,
        }
    }

    /// Whether `expected` lies within `k` standard errors of the estimate.
    pub fn within(&self, expected: T, k: T) -> bool {
        (self.p_hat - expected).abs() <= k * self.stderr
    }
}

/// Runs `config.trials` independent trials, in parallel.
pub fn mc_estimate(config: &AdversaryConfig) -> Result<McEstimate> {
    config.experiment.validate()?;
    if config.trials == 0 {
        return Err(Error::Domain("trial count must be >= 1".into()));
    }
    let family = config.family();
    let experiment = config.experiment;
    let successes = (0..config.trials)
        .into_par_iter()
        .filter(|&i| experiment.trial(&mut family.member(i)))
        .count() as u64;
    Ok(McEstimate::from_counts(successes, config.trials, config.seed))
}
