//! The three protocol tiers: parties, decision makers and agents.

mod agent;
mod decision_maker;
mod party;
mod task;

pub use agent::{agent_compute, AgentBehavior, AgentResult, AgentState};
pub use decision_maker::{select_agents, DecisionMaker, IntermediateConclusion};
pub use party::{FragmentMessage, FragmentPayload, Party};
pub use task::{ConfigWarning, FunctionKind, TaskSpec, ThresholdRule};
