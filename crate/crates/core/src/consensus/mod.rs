//! Task orchestration, result tallying and reputation.

mod orchestrator;
mod reputation;
mod tally;
mod transcript;

pub type AgentId = usize;

pub use orchestrator::{run_task, RunError, Scenario, TaskRun};
pub use reputation::{
    update_reputation, LedgerDelta, ReputationLedger, ReputationUpdate, PENALTY_ABSENT,
    PENALTY_DEVIATE, REWARD_AGREE,
};
pub use tally::{tally_results, Outcome, OutcomeStatus, ResultTally};
pub use transcript::{Event, Transcript};
