//! Sealed point-to-point channels between protocol roles.
//!
//! Messages are sealed with ChaCha20-Poly1305. Keys are derived from the
//! master seed and the ordered channel identity, so a rerun reproduces every
//! ciphertext byte. The channel identity is bound as associated data.

use std::collections::BTreeSet;
use std::fmt;

use chacha20poly1305::aead::{AeadInPlace, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce, Tag};

use crate::error::{Error, Result};
use crate::rng::SeedTree;

pub const TAG_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Party,
    DecisionMaker,
    Agent,
    Opener,
}

impl Role {
    fn code(self) -> u64 {
        match self {
            Role::Party => 1,
            Role::DecisionMaker => 2,
            Role::Agent => 3,
            Role::Opener => 4,
        }
    }

    fn short(self) -> &'static str {
        match self {
            Role::Party => "party",
            Role::DecisionMaker => "dm",
            Role::Agent => "agent",
            Role::Opener => "opener",
        }
    }
}

/// A role plus its index within that tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub role: Role,
    pub index: u32,
}

impl Endpoint {
    pub fn new(role: Role, index: usize) -> Self {
        Self {
            role,
            index: index as u32,
        }
    }

    pub fn party(index: usize) -> Self {
        Self::new(Role::Party, index)
    }

    pub fn decision_maker(index: usize) -> Self {
        Self::new(Role::DecisionMaker, index)
    }

    /// The designated result opener in blind-result mode.
    pub fn opener() -> Self {
        Self::new(Role::Opener, 0)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.role.short(), self.index)
    }
}

/// Ordered (sender, receiver) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId {
    pub sender: Endpoint,
    pub receiver: Endpoint,
}

impl ChannelId {
    pub fn new(sender: Endpoint, receiver: Endpoint) -> Self {
        Self { sender, receiver }
    }

    fn associated_data(&self) -> [u8; 16] {
        let mut ad = [0u8; 16];
        ad[0..4].copy_from_slice(&(self.sender.role.code() as u32).to_le_bytes());
        ad[4..8].copy_from_slice(&self.sender.index.to_le_bytes());
        ad[8..12].copy_from_slice(&(self.receiver.role.code() as u32).to_le_bytes());
        ad[12..16].copy_from_slice(&self.receiver.index.to_le_bytes());
        ad
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.sender, self.receiver)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ChannelKey {
    key_bytes: [u8; 32],
    channel: ChannelId,
}

impl fmt::Debug for ChannelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChannelKey")
            .field("channel", &self.channel)
            .finish_non_exhaustive()
    }
}

impl ChannelKey {
    pub fn derive(seeds: &SeedTree, channel: ChannelId) -> Self {
        let idx = [
            channel.sender.role.code(),
            channel.sender.index as u64,
            channel.receiver.role.code(),
            channel.receiver.index as u64,
        ];
        Self {
            key_bytes: seeds.derive_key("channel-key", &idx),
            channel,
        }
    }

    pub fn from_bytes(key_bytes: [u8; 32], channel: ChannelId) -> Self {
        Self { key_bytes, channel }
    }

    pub fn channel(&self) -> ChannelId {
        self.channel
    }

    fn cipher(&self) -> ChaCha20Poly1305 {
        ChaCha20Poly1305::new(Key::from_slice(&self.key_bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedMessage {
    pub nonce: u64,
    pub body: Vec<u8>,
    pub tag: [u8; TAG_LEN],
}

fn nonce_bytes(nonce: u64) -> Nonce {
    let mut n = [0u8; 12];
    n[4..].copy_from_slice(&nonce.to_le_bytes());
    *Nonce::from_slice(&n)
}

/// Seals without nonce bookkeeping. Callers that may reuse nonces should go
/// through [`SealingChannel`].
pub fn channel_seal(plaintext: &[u8], key: &ChannelKey, nonce: u64) -> SealedMessage {
    let mut body = plaintext.to_vec();
    let tag = key
        .cipher()
        .encrypt_in_place_detached(
            &nonce_bytes(nonce),
            &key.channel.associated_data(),
            &mut body,
        )
        .expect("plaintext length within ChaCha20-Poly1305 limits");
    SealedMessage {
        nonce,
        body,
        tag: tag.into(),
    }
}

pub fn channel_open(sealed: &SealedMessage, key: &ChannelKey) -> Result<Vec<u8>> {
    let mut body = sealed.body.clone();
    key.cipher()
        .decrypt_in_place_detached(
            &nonce_bytes(sealed.nonce),
            &key.channel.associated_data(),
            &mut body,
            Tag::from_slice(&sealed.tag),
        )
        .map_err(|_| Error::AuthFailure)?;
    Ok(body)
}

/// Sending half of a channel; refuses to seal twice under one nonce.
#[derive(Debug, Clone)]
pub struct SealingChannel {
    key: ChannelKey,
    next_nonce: u64,
    used: BTreeSet<u64>,
}

impl SealingChannel {
    pub fn new(key: ChannelKey) -> Self {
        Self {
            key,
            next_nonce: 0,
            used: BTreeSet::new(),
        }
    }

    pub fn channel(&self) -> ChannelId {
        self.key.channel
    }

    /// Seals under the next unused counter nonce.
    pub fn seal(&mut self, plaintext: &[u8]) -> SealedMessage {
        while self.used.contains(&self.next_nonce) {
            self.next_nonce += 1;
        }
        let nonce = self.next_nonce;
        self.next_nonce += 1;
        self.used.insert(nonce);
        channel_seal(plaintext, &self.key, nonce)
    }

    pub fn seal_with_nonce(&mut self, plaintext: &[u8], nonce: u64) -> Result<SealedMessage> {
        if !self.used.insert(nonce) {
            return Err(Error::NonceReuse(nonce));
        }
        Ok(channel_seal(plaintext, &self.key, nonce))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(seed: u64) -> ChannelKey {
        ChannelKey::derive(
            &SeedTree::new(seed),
            ChannelId::new(Endpoint::party(0), Endpoint::decision_maker(1)),
        )
    }

    #[test]
    fn open_seal_round_trip() {
        let k = key(1);
        let sm = channel_seal(b"fragment", &k, 0);
        assert_eq!(channel_open(&sm, &k).unwrap(), b"fragment");
        assert_ne!(sm.body, b"fragment");
    }

    #[test]
    fn wrong_key_fails() {
        let sm = channel_seal(b"fragment", &key(1), 0);
        assert_eq!(channel_open(&sm, &key(2)), Err(Error::AuthFailure));
        let other_channel = ChannelKey::derive(
            &SeedTree::new(1),
            ChannelId::new(Endpoint::party(1), Endpoint::decision_maker(1)),
        );
        assert_eq!(channel_open(&sm, &other_channel), Err(Error::AuthFailure));
    }

    #[test]
    fn same_bytes_different_channel_binding_fails() {
        let k = key(1);
        let moved = ChannelKey::from_bytes(
            k.key_bytes,
            ChannelId::new(Endpoint::party(0), Endpoint::decision_maker(2)),
        );
        let sm = channel_seal(b"x", &k, 3);
        assert_eq!(channel_open(&sm, &moved), Err(Error::AuthFailure));
    }

    #[test]
    fn every_single_bit_flip_detected() {
        let k = key(4);
        let msg = b"short msg!";
        let sm = channel_seal(msg, &k, 7);
        for byte in 0..sm.body.len() {
            for bit in 0..8 {
                let mut t = sm.clone();
                t.body[byte] ^= 1 << bit;
                assert_eq!(channel_open(&t, &k), Err(Error::AuthFailure));
            }
        }
        for byte in 0..TAG_LEN {
            for bit in 0..8 {
                let mut t = sm.clone();
                t.tag[byte] ^= 1 << bit;
                assert_eq!(channel_open(&t, &k), Err(Error::AuthFailure));
            }
        }
        for bit in 0..64 {
            let mut t = sm.clone();
            t.nonce ^= 1 << bit;
            assert_eq!(channel_open(&t, &k), Err(Error::AuthFailure));
        }
    }

    #[test]
    fn nonce_reuse_rejected() {
        let mut ch = SealingChannel::new(key(5));
        ch.seal_with_nonce(b"a", 3).unwrap();
        assert_eq!(ch.seal_with_nonce(b"b", 3), Err(Error::NonceReuse(3)));
        // counter sealing skips nonces already consumed explicitly
        let nonces: Vec<u64> = (0..5).map(|_| ch.seal(b"c").nonce).collect();
        assert_eq!(nonces, vec![0, 1, 2, 4, 5]);
        assert!(matches!(ch.seal_with_nonce(b"d", 4), Err(Error::NonceReuse(4))));
    }

    #[test]
    fn distinct_nonces_distinct_ciphertexts() {
        let mut ch = SealingChannel::new(key(6));
        let mut seen = std::collections::HashSet::new();
        for i in 0u32..1000 {
            let msg = i.to_le_bytes().repeat(3);
            let a = ch.seal(&msg);
            let b = ch.seal(&msg);
            assert_ne!(a.body, b.body);
            assert!(seen.insert(a.body));
            assert!(seen.insert(b.body));
        }
    }

    proptest! {
        #[test]
        fn truncation_detected(msg in proptest::collection::vec(any::<u8>(), 1..64), cut in 0usize..64) {
            let k = key(8);
            let sm = channel_seal(&msg, &k, 1);
            let mut t = sm.clone();
            t.body.truncate(cut % msg.len());
            prop_assert_eq!(channel_open(&t, &k), Err(Error::AuthFailure));
        }

        #[test]
        fn round_trip_any(msg in proptest::collection::vec(any::<u8>(), 0..128), nonce: u64, seed: u64) {
            let k = key(seed);
            prop_assert_eq!(channel_open(&channel_seal(&msg, &k, nonce), &k).unwrap(), msg);
        }
    }
}
