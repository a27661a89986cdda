//! End-to-end execution of one task.

use std::collections::BTreeSet;

use thiserror::Error;

use super::reputation::{update_reputation, ReputationLedger};
use super::tally::{tally_results, Outcome};
use super::transcript::{Event, Transcript};
use super::AgentId;
use crate::actors::{
    agent_compute, select_agents, AgentResult, AgentState, ConfigWarning, DecisionMaker,
    IntermediateConclusion, Party, TaskSpec,
};
use crate::crypto::{Endpoint, RingValue};
use crate::error::{ConfigError, Error};

/// A task together with the party inputs and every agent's behaviour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub task: TaskSpec,
    pub inputs: Vec<RingValue>,
    /// Indexed by agent id; length `agent_count_p`.
    pub agents: Vec<AgentState>,
}

impl Scenario {
    pub fn all_honest(task: TaskSpec, inputs: Vec<RingValue>) -> Self {
        let agents = (0..task.agent_count_p).map(AgentState::honest).collect();
        Self {
            task,
            inputs,
            agents,
        }
    }

    pub fn validate(&self) -> Result<Vec<ConfigWarning>, ConfigError> {
        let warnings = self.task.validate()?;
        if self.inputs.len() != self.task.party_count() {
            return Err(ConfigError::InputCount {
                expected: self.task.party_count(),
                got: self.inputs.len(),
            });
        }
        let m = self.task.ring.modulus();
        if let Some(x) = self.inputs.iter().find(|x| x.get() >= m) {
            return Err(ConfigError::OutOfRing {
                what: "input",
                value: x.get(),
                modulus: m,
            });
        }
        let mut seen = BTreeSet::new();
        for a in &self.agents {
            if a.agent_id >= self.task.agent_count_p {
                return Err(ConfigError::UnknownAgent {
                    id: a.agent_id,
                    p: self.task.agent_count_p,
                });
            }
            if !seen.insert(a.agent_id) {
                return Err(ConfigError::DuplicateAgent(a.agent_id));
            }
        }
        if seen.len() != self.task.agent_count_p {
            let id = (0..self.task.agent_count_p)
                .find(|i| !seen.contains(i))
                .unwrap_or_default();
            return Err(ConfigError::UnknownAgent {
                id,
                p: self.task.agent_count_p,
            });
        }
        Ok(warnings)
    }

    pub fn expected_result(&self) -> RingValue {
        self.task.expected_result(&self.inputs)
    }

    pub fn agent(&self, id: AgentId) -> &AgentState {
        self.agents
            .iter()
            .find(|a| a.agent_id == id)
            .expect("validated scenario lists every agent")
    }
}

/// Everything a completed run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRun {
    pub outcome: Outcome,
    pub transcript: Transcript,
    pub warnings: Vec<ConfigWarning>,
    pub intermediates: Vec<IntermediateConclusion>,
    pub selected: Vec<AgentId>,
    pub results: Vec<AgentResult>,
    /// Ledger after this task's reputation update.
    pub ledger: ReputationLedger,
    pub flagged: Vec<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Config(#[from] ConfigError),
    #[error("task aborted: {error}")]
    Aborted { error: Error, transcript: Transcript },
}

/// Runs submit, ingest, intermediates, selection, computation, tally,
/// reputation and (in blind mode) opening, in that order.
///
/// Randomness is drawn from substreams of the task seed, so the returned
/// transcript is a pure function of `(scenario, ledger)`.
pub fn run_task(scenario: &Scenario, ledger: &ReputationLedger) -> Result<TaskRun, RunError> {
    let warnings = scenario.validate()?;
    let task = &scenario.task;
    let ring = &task.ring;
    let seeds = task.seeds();
    let mut transcript = Transcript::new();
    transcript.push(Event::config(task));
    for w in &warnings {
        transcript.push(Event::warning(w));
    }

    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(error) => {
                    transcript.push(Event::Error(error.to_string()));
                    return Err(RunError::Aborted { error, transcript });
                }
            }
        };
    }

    let mut dms: Vec<DecisionMaker> = (0..task.dm_count_m)
        .map(|i| DecisionMaker::new(i, task))
        .collect();

    let master_pad = if task.blind_result {
        let mut rng = seeds.stream("output-pad", &[task.task_id]);
        let master = ring.random_nonzero(&mut rng);
        let pads = attempt!(ring.split_pad(master, task.dm_count_m, Endpoint::opener(), &mut rng));
        for (dm, pad) in dms.iter_mut().zip(pads) {
            dm.set_pad(pad);
        }
        Some(master)
    } else {
        None
    };

    let mut outbox = Vec::new();
    for (i, &input) in scenario.inputs.iter().enumerate() {
        let mut party = Party::new(i, task);
        let mut rng = seeds.stream("fragment", &[task.task_id, i as u64]);
        let msgs = attempt!(party.submit(input, task, &mut rng));
        for m in &msgs {
            transcript.push(Event::sent(m));
        }
        outbox.extend(msgs);
    }

    for msg in &outbox {
        let dm = &mut dms[msg.dm_index];
        attempt!(dm.ingest(msg, task));
        transcript.push(Event::Ingested {
            dm_index: msg.dm_index,
            fragment_index: msg.fragment_index,
            held: dm.fragment_count(task.task_id),
        });
    }

    let mut intermediates = Vec::with_capacity(dms.len());
    for dm in &dms {
        let ic = attempt!(dm.build_intermediate(task));
        transcript.push(Event::Intermediate(ic));
        intermediates.push(ic);
    }

    let available: Vec<AgentId> = scenario
        .agents
        .iter()
        .filter(|a| a.available)
        .map(|a| a.agent_id)
        .collect();
    let mut rng = seeds.stream("agent-selection", &[task.task_id]);
    let selected = attempt!(select_agents(
        ledger,
        task.agents_selected_k,
        &available,
        &mut rng
    ));
    transcript.push(Event::Selected(selected.clone()));

    let results: Vec<AgentResult> = selected
        .iter()
        .map(|&id| agent_compute(scenario.agent(id), &intermediates, task))
        .collect();
    for r in &results {
        transcript.push(Event::Reported(*r));
    }

    let tally = attempt!(super::tally::ResultTally::from_results(&results));
    transcript.push(Event::Tally(tally));
    let mut outcome = attempt!(tally_results(&results, task.threshold, selected.len()));

    let update = update_reputation(ledger, &results, &outcome);
    if let (Some(master), Some(value)) = (master_pad, outcome.accepted_value()) {
        outcome.opened_value = Some(ring.sub(value, master));
    }
    transcript.push(Event::Outcome(outcome));
    for d in &update.deltas {
        transcript.push(Event::Ledger(*d));
    }
    if let Some(v) = outcome.opened_value {
        transcript.push(Event::Opened(v));
    }

    Ok(TaskRun {
        outcome,
        transcript,
        warnings,
        intermediates,
        selected,
        results,
        ledger: update.ledger,
        flagged: update.flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actors::{AgentBehavior, ThresholdRule};
    use crate::consensus::OutcomeStatus;
    use crate::crypto::Ring;

    fn demo(p: usize, k: usize) -> Scenario {
        let ring = Ring::default();
        let task = TaskSpec::sum(3, ring).with_topology(3, 3, p, k);
        let inputs = [10, 20, 30].map(|x| ring.reduce(x)).to_vec();
        Scenario::all_honest(task, inputs)
    }

    fn accepted(v: u64, support: usize) -> OutcomeStatus {
        OutcomeStatus::Accepted { value: Ring::default().reduce(v), support }
    }

    #[test]
    fn all_honest_demo() {
        let s = demo(5, 5);
        let run = run_task(&s, &ReputationLedger::new(5)).unwrap();
        assert_eq!(run.outcome.status, accepted(60, 5));
        assert!(run.flagged.is_empty());
        assert!(run.ledger.scores().values().all(|&v| v == 1));
    }

    #[test]
    fn two_perturbers_outvoted() {
        let mut s = demo(5, 5);
        let ring = s.task.ring;
        s.agents[1].behavior = AgentBehavior::MaliciousPerturb(ring.reduce(1));
        s.agents[3].behavior = AgentBehavior::MaliciousPerturb(ring.reduce(2));
        let run = run_task(&s, &ReputationLedger::new(5)).unwrap();
        assert_eq!(run.outcome.status, accepted(60, 3));
        let mut flagged = run.flagged.clone();
        flagged.sort();
        assert_eq!(flagged, vec![1, 3]);
        assert_eq!(run.ledger.score(1), -2);
    }

    #[test]
    fn blind_mode_hides_result_from_agents() {
        let mut s = demo(5, 5);
        s.task.blind_result = true;
        let run = run_task(&s, &ReputationLedger::new(5)).unwrap();
        assert!(run.results.iter().all(|r| r.reported != Some(s.task.ring.reduce(60))));
        assert_eq!(run.outcome.opened_value, Some(s.task.ring.reduce(60)));
        assert_eq!(run.outcome.result(), Some(s.task.ring.reduce(60)));
    }

    #[test]
    fn transcript_is_reproducible() {
        let s = demo(5, 3);
        let a = run_task(&s, &ReputationLedger::new(5)).unwrap();
        let b = run_task(&s, &ReputationLedger::new(5)).unwrap();
        assert_eq!(a.transcript.render(), b.transcript.render());
        let mut other = s.clone();
        other.task.seed = 1;
        let c = run_task(&other, &ReputationLedger::new(5)).unwrap();
        assert_ne!(a.transcript.render(), c.transcript.render());
    }

    #[test]
    fn insufficient_agents_aborts_with_transcript() {
        let mut s = demo(5, 5);
        s.agents[0].available = false;
        match run_task(&s, &ReputationLedger::new(5)) {
            Err(RunError::Aborted { error, transcript }) => {
                assert_eq!(error, Error::InsufficientAgents { needed: 5, available: 4 });
                assert_eq!(transcript.events().last().unwrap().kind(), "error");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_errors_surface() {
        let mut s = demo(5, 5);
        s.inputs.pop();
        assert!(matches!(
            run_task(&s, &ReputationLedger::new(5)),
            Err(RunError::Config(ConfigError::InputCount { expected: 3, got: 2 }))
        ));
        let mut s = demo(5, 5);
        s.agents.pop();
        assert!(matches!(run_task(&s, &ReputationLedger::new(5)), Err(RunError::Config(_))));
    }

    #[test]
    fn rejection_keeps_ledger() {
        let mut s = demo(4, 4);
        let ring = s.task.ring;
        s.task.threshold = ThresholdRule::PaperThird;
        s.agents[0].behavior = AgentBehavior::MaliciousConstant(ring.reduce(5));
        s.agents[1].behavior = AgentBehavior::MaliciousConstant(ring.reduce(5));
        let ledger = ReputationLedger::new(4);
        let run = run_task(&s, &ledger).unwrap();
        assert_eq!(run.outcome.status, OutcomeStatus::RejectedAmbiguous);
        assert_eq!(run.ledger, ledger);
    }
}
