//! Encrypted SMS building blocks: a from-scratch AES, ECB/CBC modes with
//! PKCS#7, the sealed envelope format, and a GSM transport simulation.

pub mod aes;
pub mod codec;
pub mod envelope;
pub mod modes;
pub mod rng;
pub mod sms;

pub use envelope::{open, seal, Envelope, EnvelopeError, MessageKey};
pub use modes::{Mode, ModeKind};
pub use rng::RandomnessProvider;
