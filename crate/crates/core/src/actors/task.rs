use std::fmt;

use crate::crypto::{Ring, RingValue};
use crate::error::ConfigError;
use crate::rng::SeedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Sum,
    WeightedSum,
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionKind::Sum => "sum",
            FunctionKind::WeightedSum => "wsum",
        })
    }
}

/// How many agreeing agents an accepted result needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// `ceil(k / 3)` agreeing agents.
    #[default]
    PaperThird,
    /// `floor(k / 2) + 1` agreeing agents.
    StrictMajority,
    Fixed(usize),
}

impl ThresholdRule {
    pub fn threshold(&self, k_selected: usize) -> usize {
        match *self {
            ThresholdRule::PaperThird => k_selected.div_ceil(3),
            ThresholdRule::StrictMajority => k_selected / 2 + 1,
            ThresholdRule::Fixed(t) => t,
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::PaperThird => f.write_str("third"),
            ThresholdRule::StrictMajority => f.write_str("majority"),
            ThresholdRule::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

/// Non-fatal configuration concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigWarning {
    /// Some decision maker holds more than one fragment of a party.
    FragmentsExceedDecisionMakers { r: usize, m: usize },
    /// Decision makers should be fewer than agents.
    DecisionMakersNotFewerThanAgents { m: usize, p: usize },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::FragmentsExceedDecisionMakers { r, m } => write!(
                f,
                "fragments_r={r} exceeds decision_makers_m={m}; a decision maker holds several fragments of one party"
            ),
            ConfigWarning::DecisionMakersNotFewerThanAgents { m, p } => write!(
                f,
                "decision_makers_m={m} is not below agents_p={p}"
            ),
        }
    }
}

/// One computation request and its protocol parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub task_id: u64,
    pub function: FunctionKind,
    /// One per party; all ones for [`FunctionKind::Sum`].
    pub weights: Vec<RingValue>,
    pub fragments_r: usize,
    pub dm_count_m: usize,
    pub agent_count_p: usize,
    pub agents_selected_k: usize,
    pub threshold: ThresholdRule,
    pub blind_result: bool,
    pub ring: Ring,
    pub seed: u64,
}

impl TaskSpec {
    /// A SUM task over `parties` inputs with one of everything.
    pub fn sum(parties: usize, ring: Ring) -> Self {
        let one = ring.reduce(1);
        Self {
            task_id: 0,
            function: FunctionKind::Sum,
            weights: vec![one; parties],
            fragments_r: 1,
            dm_count_m: 1,
            agent_count_p: 1,
            agents_selected_k: 1,
            threshold: ThresholdRule::PaperThird,
            blind_result: false,
            ring,
            seed: 0,
        }
    }

    pub fn weighted_sum(weights: Vec<RingValue>, ring: Ring) -> Self {
        Self {
            function: FunctionKind::WeightedSum,
            weights,
            ..Self::sum(0, ring)
        }
    }

    pub fn with_topology(mut self, r: usize, m: usize, p: usize, k: usize) -> Self {
        self.fragments_r = r;
        self.dm_count_m = m;
        self.agent_count_p = p;
        self.agents_selected_k = k;
        self
    }

    pub fn party_count(&self) -> usize {
        self.weights.len()
    }

    pub fn seeds(&self) -> SeedTree {
        SeedTree::new(self.seed)
    }

    /// Round-robin routing of fragment `f` to a decision maker.
    pub fn dm_for_fragment(&self, fragment_index: usize) -> usize {
        fragment_index % self.dm_count_m
    }

    pub fn fragments_for_dm(&self, dm_index: usize) -> impl Iterator<Item = usize> + '_ {
        (dm_index..self.fragments_r).step_by(self.dm_count_m.max(1))
    }

    pub fn threshold_count(&self) -> usize {
        self.threshold.threshold(self.agents_selected_k)
    }

    /// The plaintext weighted sum, computed directly.
    pub fn expected_result(&self, inputs: &[RingValue]) -> RingValue {
        self.ring.sum(
            self.weights
                .iter()
                .zip(inputs)
                .map(|(&w, &x)| self.ring.mul(w, x)),
        )
    }

    pub fn validate(&self) -> Result<Vec<ConfigWarning>, ConfigError> {
        for (name, v) in [
            ("party count", self.party_count()),
            ("fragments_r", self.fragments_r),
            ("dm_count_m", self.dm_count_m),
            ("agent_count_p", self.agent_count_p),
            ("agents_selected_k", self.agents_selected_k),
        ] {
            if v == 0 {
                return Err(ConfigError::ZeroParameter { name });
            }
        }
        if self.agents_selected_k > self.agent_count_p {
            return Err(ConfigError::SelectionExceedsPool {
                k: self.agents_selected_k,
                p: self.agent_count_p,
            });
        }
        if let ThresholdRule::Fixed(t) = self.threshold {
            if t == 0 || t > self.agents_selected_k {
                return Err(ConfigError::FixedThreshold {
                    t,
                    k: self.agents_selected_k,
                });
            }
        }
        let m = self.ring.modulus();
        if let Some(w) = self.weights.iter().find(|w| w.get() >= m) {
            return Err(ConfigError::OutOfRing {
                what: "weight",
                value: w.get(),
                modulus: m,
            });
        }
        if self.function == FunctionKind::Sum && self.weights.iter().any(|w| w.get() != 1) {
            return Err(ConfigError::SumWeights);
        }

        let mut warnings = Vec::new();
        if self.fragments_r > self.dm_count_m {
            warnings.push(ConfigWarning::FragmentsExceedDecisionMakers {
                r: self.fragments_r,
                m: self.dm_count_m,
            });
        }
        if self.dm_count_m >= self.agent_count_p {
            warnings.push(ConfigWarning::DecisionMakersNotFewerThanAgents {
                m: self.dm_count_m,
                p: self.agent_count_p,
            });
        }
        Ok(warnings)
    }
}
