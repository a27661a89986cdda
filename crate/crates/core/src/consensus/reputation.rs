use std::collections::BTreeMap;

use super::tally::Outcome;
use super::AgentId;
use crate::actors::AgentResult;

pub const REWARD_AGREE: i64 = 1;
pub const PENALTY_DEVIATE: i64 = -2;
pub const PENALTY_ABSENT: i64 = -1;

/// Per-agent performance scores kept by the decision makers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReputationLedger {
    scores: BTreeMap<AgentId, i64>,
}

impl ReputationLedger {
    /// Agents `0..p`, all at zero.
    pub fn new(p: usize) -> Self {
        Self {
            scores: (0..p).map(|id| (id, 0)).collect(),
        }
    }

    pub fn score(&self, id: AgentId) -> i64 {
        self.scores.get(&id).copied().unwrap_or(0)
    }

    pub fn scores(&self) -> &BTreeMap<AgentId, i64> {
        &self.scores
    }

    pub(crate) fn adjust(&mut self, id: AgentId, delta: i64) {
        *self.scores.entry(id).or_insert(0) += delta;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerDelta {
    pub agent_id: AgentId,
    pub delta: i64,
    pub score: i64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReputationUpdate {
    pub ledger: ReputationLedger,
    /// Agents that reported something other than the accepted value.
    pub flagged: Vec<AgentId>,
    pub deltas: Vec<LedgerDelta>,
}

/// Scores one tallied task. Only accepted outcomes move the ledger:
/// agreement +1, a differing report -2 (and a flag), no report -1.
pub fn update_reputation(
    ledger: &ReputationLedger,
    results: &[AgentResult],
    outcome: &Outcome,
) -> ReputationUpdate {
    let mut next = ledger.clone();
    let mut flagged = Vec::new();
    let mut deltas = Vec::new();
    if let Some(accepted) = outcome.accepted_value() {
        for r in results {
            let (delta, flag) = match r.reported {
                Some(v) if v == accepted => (REWARD_AGREE, false),
                Some(_) => (PENALTY_DEVIATE, true),
                None => (PENALTY_ABSENT, false),
            };
            next.adjust(r.agent_id, delta);
            if flag {
                flagged.push(r.agent_id);
            }
            deltas.push(LedgerDelta {
                agent_id: r.agent_id,
                delta,
                score: next.score(r.agent_id),
                flagged: flag,
            });
        }
    }
    ReputationUpdate {
        ledger: next,
        flagged,
        deltas,
    }
}
