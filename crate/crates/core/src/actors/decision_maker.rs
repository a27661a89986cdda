use std::cmp::Reverse;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::party::{FragmentMessage, FragmentPayload};
use super::task::TaskSpec;
use crate::consensus::{AgentId, ReputationLedger};
use crate::crypto::{channel_open, ChannelKey, Endpoint, OutputPad, Role, RingValue};
use crate::error::{Error, Result};

/// A decision maker's party-anonymous partial aggregate.
///
/// Deliberately carries no party index; [`IntermediateConclusion::serialize`]
/// is the only form that leaves the decision maker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntermediateConclusion {
    pub task_id: u64,
    pub dm_index: usize,
    pub partial: RingValue,
    pub contributing_fragment_count: usize,
}

impl IntermediateConclusion {
    pub fn serialize(&self) -> String {
        format!(
            "task={} dm={} partial={} fragments={}",
            self.task_id, self.dm_index, self.partial, self.contributing_fragment_count
        )
    }
}

/// Middle tier: receives sealed fragments, aggregates them per task and picks
/// agents by reputation.
#[derive(Debug, Clone)]
pub struct DecisionMaker {
    index: usize,
    inbound: Vec<ChannelKey>,
    received: BTreeMap<(u64, usize, usize), RingValue>,
    pad: Option<OutputPad>,
}

impl DecisionMaker {
    pub fn new(index: usize, task: &TaskSpec) -> Self {
        let seeds = task.seeds();
        let inbound = (0..task.party_count())
            .map(|p| {
                ChannelKey::derive(
                    &seeds,
                    crate::crypto::ChannelId::new(Endpoint::party(p), Endpoint::decision_maker(index)),
                )
            })
            .collect();
        Self {
            index,
            inbound,
            received: BTreeMap::new(),
            pad: None,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn set_pad(&mut self, pad: OutputPad) {
        self.pad = Some(pad);
    }

    pub fn fragment_count(&self, task_id: u64) -> usize {
        self.received.keys().filter(|k| k.0 == task_id).count()
    }

    /// Opens and records one fragment. On any error the state is untouched.
    pub fn ingest(&mut self, msg: &FragmentMessage, task: &TaskSpec) -> Result<()> {
        let me = Endpoint::decision_maker(self.index);
        if msg.channel.receiver != me || msg.dm_index != self.index {
            return Err(Error::AuthFailure);
        }
        let sender = msg.channel.sender;
        if sender.role != Role::Party {
            return Err(Error::AuthFailure);
        }
        let key = self
            .inbound
            .get(sender.index as usize)
            .ok_or(Error::AuthFailure)?;
        let plain = channel_open(&msg.sealed, key)?;
        let (task_id, party, fragment, share) =
            FragmentPayload::decode(&plain).ok_or(Error::AuthFailure)?;
        if task_id != msg.task_id
            || party != sender.index
            || fragment as usize != msg.fragment_index
            || task.dm_for_fragment(fragment as usize) != self.index
            || fragment as usize >= task.fragments_r
        {
            return Err(Error::AuthFailure);
        }
        let share = task.ring.elem(share).map_err(|_| Error::AuthFailure)?;
        let slot = (task_id, party as usize, fragment as usize);
        if self.received.contains_key(&slot) {
            return Err(Error::DuplicateFragment {
                task: task_id,
                party: party as usize,
                fragment: fragment as usize,
            });
        }
        self.received.insert(slot, share);
        Ok(())
    }

    /// Weighted sum of every held fragment, plus this decision maker's pad
    /// in blind-result mode. Party identity does not survive this step.
    pub fn build_intermediate(&self, task: &TaskSpec) -> Result<IntermediateConclusion> {
        let ring = &task.ring;
        let mut missing = Vec::new();
        let mut terms = Vec::new();
        for party in 0..task.party_count() {
            for fragment in task.fragments_for_dm(self.index) {
                match self.received.get(&(task.task_id, party, fragment)) {
                    Some(&share) => terms.push(ring.mul(task.weights[party], share)),
                    None => missing.push((party, fragment)),
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingFragments(missing));
        }
        let mut partial = ring.sum(terms.iter().copied());
        if task.blind_result {
            let pad = self
                .pad
                .as_ref()
                .ok_or_else(|| Error::Domain(format!("dm{} has no output pad", self.index)))?;
            partial = ring.apply_pad(partial, pad);
        }
        Ok(IntermediateConclusion {
            task_id: task.task_id,
            dm_index: self.index,
            partial,
            contributing_fragment_count: terms.len(),
        })
    }
}

/// Picks the `k` available agents with the highest reputation. Equal scores
/// are ordered by a shuffle drawn from `rng`.
pub fn select_agents<R: Rng + ?Sized>(
    ledger: &ReputationLedger,
    k: usize,
    available: &[AgentId],
    rng: &mut R,
) -> Result<Vec<AgentId>> {
    let mut pool = available.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() < k {
        return Err(Error::InsufficientAgents {
            needed: k,
            available: pool.len(),
        });
    }
    pool.shuffle(rng);
    pool.sort_by_key(|&id| Reverse(ledger.score(id)));
    pool.truncate(k);
    Ok(pool)
}
