use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::AgentId;
use crate::actors::{AgentResult, ThresholdRule};
use crate::crypto::RingValue;
use crate::error::{Error, Result};

/// Reported values and who backed each of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultTally {
    pub support: BTreeMap<RingValue, Vec<AgentId>>,
    pub absent: BTreeSet<AgentId>,
}

impl ResultTally {
    pub fn from_results(results: &[AgentResult]) -> Result<Self> {
        let mut tally = ResultTally::default();
        let mut seen = BTreeSet::new();
        for r in results {
            if !seen.insert(r.agent_id) {
                return Err(Error::Domain(format!("agent {} reported twice", r.agent_id)));
            }
            match r.reported {
                Some(v) => tally.support.entry(v).or_default().push(r.agent_id),
                None => {
                    tally.absent.insert(r.agent_id);
                }
            }
        }
        Ok(tally)
    }

    pub fn serialize(&self) -> String {
        let mut parts: Vec<String> = self
            .support
            .iter()
            .map(|(v, ids)| format!("{v}:{}", join_ids(ids)))
            .collect();
        if !self.absent.is_empty() {
            parts.push(format!("absent:{}", join_ids(self.absent.iter())));
        }
        parts.join(" ")
    }
}

fn join_ids<'a, I: IntoIterator<Item = &'a AgentId>>(ids: I) -> String {
    ids.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeStatus {
    Accepted { value: RingValue, support: usize },
    RejectedAmbiguous,
    RejectedNoQuorum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub status: OutcomeStatus,
    /// The unmasked result, set in blind-result mode once accepted.
    pub opened_value: Option<RingValue>,
}

impl Outcome {
    pub fn accepted_value(&self) -> Option<RingValue> {
        match self.status {
            OutcomeStatus::Accepted { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        self.accepted_value().is_some()
    }

    /// The computed function value: the opened value in blind mode, the
    /// accepted value otherwise.
    pub fn result(&self) -> Option<RingValue> {
        self.opened_value.or(self.accepted_value())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            OutcomeStatus::Accepted { value, support } => {
                write!(f, "ACCEPTED value={value} support={support}")?;
                if let Some(o) = self.opened_value {
                    write!(f, " opened={o}")?;
                }
                Ok(())
            }
            OutcomeStatus::RejectedAmbiguous => f.write_str("REJECTED ambiguous"),
            OutcomeStatus::RejectedNoQuorum => f.write_str("REJECTED no-quorum"),
        }
    }
}

/// Accepts the unique most-supported value if its support reaches the
/// rule's threshold for `k_selected` agents. A quorum failure is reported
/// before a tie.
pub fn tally_results(
    results: &[AgentResult],
    rule: ThresholdRule,
    k_selected: usize,
) -> Result<Outcome> {
    if results.is_empty() {
        return Err(Error::EmptyTally);
    }
    if results.len() != k_selected {
        return Err(Error::Domain(format!(
            "{} results for {k_selected} selected agents",
            results.len()
        )));
    }
    let tally = ResultTally::from_results(results)?;
    let threshold = rule.threshold(k_selected);
    let best = tally.support.values().map(Vec::len).max().unwrap_or(0);
    let status = if best < threshold {
        OutcomeStatus::RejectedNoQuorum
    } else {
        let mut modal = tally.support.iter().filter(|(_, ids)| ids.len() == best);
        match (modal.next(), modal.next()) {
            (Some((&value, _)), None) => OutcomeStatus::Accepted {
                value,
                support: best,
            },
            _ => OutcomeStatus::RejectedAmbiguous,
        }
    };
    Ok(Outcome {
        status,
        opened_value: None,
    })
}
