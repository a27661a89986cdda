//! Random scenario generation for self-checks and property suites.

use rand::Rng;

use crate::actors::{TaskSpec, ThresholdRule};
use crate::consensus::Scenario;
use crate::crypto::Ring;

/// Bounds for [`random_honest_scenario`].
#[derive(Debug, Clone, Copy)]
pub struct ScenarioBounds {
    pub max_parties: usize,
    pub max_fragments: usize,
    pub max_dms: usize,
    pub max_agents: usize,
}

impl Default for ScenarioBounds {
    fn default() -> Self {
        Self {
            max_parties: 8,
            max_fragments: 6,
            max_dms: 4,
            max_agents: 9,
        }
    }
}

/// An all-honest scenario with `p = k`, random weights and inputs, a random
/// threshold rule and random blind-result mode.
pub fn random_honest_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    bounds: ScenarioBounds,
    task_id: u64,
) -> Scenario {
    let parties = rng.gen_range(1..=bounds.max_parties);
    let r = rng.gen_range(1..=bounds.max_fragments);
    let m = rng.gen_range(1..=bounds.max_dms);
    let p = rng.gen_range(1..=bounds.max_agents);
    let mut task = if rng.gen_bool(0.5) {
        TaskSpec::sum(parties, ring)
    } else {
        TaskSpec::weighted_sum((0..parties).map(|_| ring.random(rng)).collect(), ring)
    }
    .with_topology(r, m, p, p);
    task.task_id = task_id;
    task.threshold = if rng.gen_bool(0.5) {
        ThresholdRule::PaperThird
    } else {
        ThresholdRule::StrictMajority
    };
    task.blind_result = rng.gen_bool(0.5);
    task.seed = rng.gen();
    let inputs = (0..parties).map(|_| ring.random(rng)).collect();
    Scenario::all_honest(task, inputs)
}
