use std::fmt;

use super::decision_maker::IntermediateConclusion;
use super::task::TaskSpec;
use crate::consensus::AgentId;
use crate::crypto::RingValue;

/// How an agent behaves for a whole scenario run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AgentBehavior {
    #[default]
    Honest,
    /// Reports the same fixed value whatever it receives. Agents sharing the
    /// constant model a colluding coalition.
    MaliciousConstant(RingValue),
    /// Reports the honest value plus a delta.
    MaliciousPerturb(RingValue),
    /// Never reports.
    Crashed,
}

impl AgentBehavior {
    pub fn is_honest(&self) -> bool {
        matches!(self, AgentBehavior::Honest)
    }
}

impl fmt::Display for AgentBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentBehavior::Honest => f.write_str("honest"),
            AgentBehavior::MaliciousConstant(v) => write!(f, "constant:{v}"),
            AgentBehavior::MaliciousPerturb(d) => write!(f, "perturb:{d}"),
            AgentBehavior::Crashed => f.write_str("crash"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentState {
    pub agent_id: AgentId,
    pub behavior: AgentBehavior,
    pub available: bool,
}

impl AgentState {
    pub fn honest(agent_id: AgentId) -> Self {
        Self {
            agent_id,
            behavior: AgentBehavior::Honest,
            available: true,
        }
    }

    pub fn with_behavior(agent_id: AgentId, behavior: AgentBehavior) -> Self {
        Self {
            behavior,
            ..Self::honest(agent_id)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentResult {
    pub task_id: u64,
    pub agent_id: AgentId,
    /// `None` when the agent never answered.
    pub reported: Option<RingValue>,
}

impl AgentResult {
    pub fn serialize(&self) -> String {
        match self.reported {
            Some(v) => format!("task={} agent={} value={}", self.task_id, self.agent_id, v),
            None => format!("task={} agent={} value=absent", self.task_id, self.agent_id),
        }
    }
}

/// Combines the intermediate conclusions. Agents only ever see these
/// aggregates, never party-labelled shares.
pub fn agent_compute(
    agent: &AgentState,
    intermediates: &[IntermediateConclusion],
    task: &TaskSpec,
) -> AgentResult {
    let ring = &task.ring;
    let honest = || ring.sum(intermediates.iter().map(|ic| ic.partial));
    let reported = match agent.behavior {
        AgentBehavior::Honest => Some(honest()),
        AgentBehavior::MaliciousConstant(w) => Some(w),
        AgentBehavior::MaliciousPerturb(d) => Some(ring.add(honest(), d)),
        AgentBehavior::Crashed => None,
    };
    AgentResult {
        task_id: task.task_id,
        agent_id: agent.agent_id,
        reported,
    }
}
