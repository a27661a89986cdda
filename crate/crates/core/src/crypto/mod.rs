//! Ring arithmetic, additive fragmentation, channel sealing and output masking.

mod channel;
mod ring;

pub use channel::{
    channel_open, channel_seal, ChannelId, ChannelKey, Endpoint, Role, SealedMessage,
    SealingChannel, TAG_LEN,
};
pub use ring::{
    OutputPad, Ring, RingValue, ShareVector, DEFAULT_MODULUS, MAX_MODULUS, SMALL_MODULUS,
};
