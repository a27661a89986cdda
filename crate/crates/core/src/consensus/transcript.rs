//! Ordered event log of a task run, rendered one event per line.

use std::fmt;

use super::reputation::LedgerDelta;
use super::tally::{Outcome, ResultTally};
use super::AgentId;
use crate::actors::{AgentResult, ConfigWarning, FragmentMessage, IntermediateConclusion, TaskSpec};
use crate::crypto::RingValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Config(String),
    Warning(String),
    Sent {
        channel: String,
        task_id: u64,
        fragment_index: usize,
        nonce: u64,
        body: String,
        tag: String,
    },
    Ingested {
        dm_index: usize,
        fragment_index: usize,
        held: usize,
    },
    Intermediate(IntermediateConclusion),
    Selected(Vec<AgentId>),
    Reported(AgentResult),
    Tally(ResultTally),
    Outcome(Outcome),
    Ledger(LedgerDelta),
    Opened(RingValue),
    Error(String),
}

impl Event {
    pub fn config(task: &TaskSpec) -> Self {
        Event::Config(format!(
            "task={} function={} parties={} r={} m={} p={} k={} threshold={} blind={} modulus={}",
            task.task_id,
            task.function,
            task.party_count(),
            task.fragments_r,
            task.dm_count_m,
            task.agent_count_p,
            task.agents_selected_k,
            task.threshold,
            task.blind_result,
            task.ring.modulus()
        ))
    }

    pub fn warning(w: &ConfigWarning) -> Self {
        Event::Warning(w.to_string())
    }

    pub fn sent(msg: &FragmentMessage) -> Self {
        Event::Sent {
            channel: msg.channel.to_string(),
            task_id: msg.task_id,
            fragment_index: msg.fragment_index,
            nonce: msg.sealed.nonce,
            body: hex::encode(&msg.sealed.body),
            tag: hex::encode(msg.sealed.tag),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::Config(_) => "config",
            Event::Warning(_) => "warning",
            Event::Sent { .. } => "sent",
            Event::Ingested { .. } => "ingested",
            Event::Intermediate(_) => "intermediate",
            Event::Selected(_) => "selected",
            Event::Reported(_) => "reported",
            Event::Tally(_) => "tally",
            Event::Outcome(_) => "outcome",
            Event::Ledger(_) => "ledger",
            Event::Opened(_) => "opened",
            Event::Error(_) => "error",
        }
    }

    fn fields(&self) -> String {
        match self {
            Event::Config(s) | Event::Warning(s) | Event::Error(s) => s.clone(),
            Event::Sent {
                channel,
                task_id,
                fragment_index,
                nonce,
                body,
                tag,
            } => format!(
                "channel={channel} task={task_id} fragment={fragment_index} nonce={nonce} body={body} tag={tag}"
            ),
            Event::Ingested {
                dm_index,
                fragment_index,
                held,
            } => format!("dm={dm_index} fragment={fragment_index} held={held}"),
            Event::Intermediate(ic) => ic.serialize(),
            Event::Selected(ids) => format!(
                "agents={}",
                ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
            ),
            Event::Reported(r) => r.serialize(),
            Event::Tally(t) => t.serialize(),
            Event::Outcome(o) => o.to_string(),
            Event::Ledger(d) => format!(
                "agent={} delta={} score={}{}",
                d.agent_id,
                d.delta,
                d.score,
                if d.flagged { " flagged" } else { "" }
            ),
            Event::Opened(v) => format!("value={v}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// `(step, kind, fields)` for every event.
    pub fn lines(&self) -> impl Iterator<Item = (usize, &'static str, String)> + '_ {
        self.events
            .iter()
            .enumerate()
            .map(|(i, e)| (i, e.kind(), e.fields()))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (step, kind, fields) in self.lines() {
            out.push_str(&format!("{step} {kind} {fields}\n"));
        }
        out
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
