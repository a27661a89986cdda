use rand::Rng;

use super::task::TaskSpec;
use crate::crypto::{ChannelId, ChannelKey, Endpoint, RingValue, SealedMessage, SealingChannel};
use crate::error::{Error, Result};

/// A sealed fragment in transit from a party to a decision maker.
///
/// `channel` is the link the message arrives on; the party index and the
/// share itself travel only inside `sealed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentMessage {
    pub task_id: u64,
    pub dm_index: usize,
    pub fragment_index: usize,
    pub channel: ChannelId,
    pub sealed: SealedMessage,
}

/// Plaintext carried inside a [`FragmentMessage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentPayload {
    pub task_id: u64,
    pub party_index: u32,
    pub fragment_index: u32,
    pub share: RingValue,
}

impl FragmentPayload {
    pub const LEN: usize = 24;

    pub fn encode(&self) -> [u8; Self::LEN] {
        let mut out = [0u8; Self::LEN];
        out[0..8].copy_from_slice(&self.task_id.to_le_bytes());
        out[8..12].copy_from_slice(&self.party_index.to_le_bytes());
        out[12..16].copy_from_slice(&self.fragment_index.to_le_bytes());
        out[16..24].copy_from_slice(&self.share.get().to_le_bytes());
        out
    }

    /// Returns the raw share word; range checking is the receiver's job.
    pub fn decode(bytes: &[u8]) -> Option<(u64, u32, u32, u64)> {
        if bytes.len() != Self::LEN {
            return None;
        }
        let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        Some((u64_at(0), u32_at(8), u32_at(12), u64_at(16)))
    }
}

/// An input holder. Owns one sealing channel to each decision maker.
#[derive(Debug, Clone)]
pub struct Party {
    index: usize,
    outbound: Vec<SealingChannel>,
}

impl Party {
    pub fn new(index: usize, task: &TaskSpec) -> Self {
        let seeds = task.seeds();
        let outbound = (0..task.dm_count_m)
            .map(|dm| {
                let id = ChannelId::new(Endpoint::party(index), Endpoint::decision_maker(dm));
                SealingChannel::new(ChannelKey::derive(&seeds, id))
            })
            .collect();
        Self { index, outbound }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Fragments `input` into `r` shares and seals fragment `f` to decision
    /// maker `f mod m`.
    pub fn submit<R: Rng + ?Sized>(
        &mut self,
        input: RingValue,
        task: &TaskSpec,
        rng: &mut R,
    ) -> Result<Vec<FragmentMessage>> {
        task.validate()?;
        if self.outbound.len() != task.dm_count_m {
            return Err(Error::Domain(format!(
                "party {} was built for {} decision makers, task has {}",
                self.index,
                self.outbound.len(),
                task.dm_count_m
            )));
        }
        let input = task.ring.elem(input.get())?;
        let shares = task.ring.split_into_shares(input, task.fragments_r, rng)?;
        Ok(shares
            .iter()
            .enumerate()
            .map(|(fragment_index, share)| {
                let dm_index = task.dm_for_fragment(fragment_index);
                let payload = FragmentPayload {
                    task_id: task.task_id,
                    party_index: self.index as u32,
                    fragment_index: fragment_index as u32,
                    share,
                };
                let channel = &mut self.outbound[dm_index];
                FragmentMessage {
                    task_id: task.task_id,
                    dm_index,
                    fragment_index,
                    channel: channel.channel(),
                    sealed: channel.seal(&payload.encode()),
                }
            })
            .collect())
    }
}
