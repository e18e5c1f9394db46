//! Simulated handsets, SMSC and HLR behind one owner, plus a JSON-over-HTTP
//! front end.
//!
//! [`Gateway`] is synchronous and holds all state. The HTTP layer in
//! [`http`] wraps it in a mutex so every mutation is serialized and the
//! event log stays linearizable.

pub mod http;

use std::collections::BTreeMap;

use aegis_core::envelope::{seal_envelope, EnvelopeError};
use aegis_core::sms::{
    segment_message, InboxEntry, InboxStore, MemoryInboxStore, MsgRefCounter, ReassemblyBuffer,
    RecordId, SmsError, Smsc, StaffRow, StoreIoError,
};
use aegis_core::{open, ModeKind, RandomnessProvider};
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8470;
pub const PREVIEW_CHARS: usize = 64;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("address {0} is already registered")]
    AddressInUse(String),
    #[error("address {0:?} must be 4 to 15 digits")]
    BadAddress(String),
    #[error("no handset registered at {0}")]
    UnknownHandset(String),
    #[error("message is empty")]
    EmptyMessage,
    #[error("no message {id} in inbox of {address}")]
    UnknownMessage { address: String, id: usize },
    #[error("decryption failed: {0}")]
    DecryptFailed(EnvelopeError),
    #[error("sealing failed: {0}")]
    Seal(EnvelopeError),
    #[error(transparent)]
    Transport(#[from] SmsError),
    #[error(transparent)]
    Store(#[from] StoreIoError),
    #[error("bad request: {0}")]
    BadRequest(String),
}

impl GatewayError {
    /// Stable machine-readable code used in HTTP error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::AddressInUse(_) => "AddressInUse",
            GatewayError::BadAddress(_) => "BadAddress",
            GatewayError::UnknownHandset(_) => "UnknownHandset",
            GatewayError::EmptyMessage => "EmptyMessage",
            GatewayError::UnknownMessage { .. } => "UnknownMessage",
            GatewayError::DecryptFailed(_) => "DecryptFailed",
            GatewayError::Seal(_) => "SealFailed",
            GatewayError::Transport(SmsError::PayloadTooLarge { .. }) => "PayloadTooLarge",
            GatewayError::Transport(_) => "TransportError",
            GatewayError::Store(_) => "StoreIoError",
            GatewayError::BadRequest(_) => "BadRequest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HandsetDescriptor {
    pub address: String,
    pub display_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SendReceipt {
    pub message_id: u16,
    pub segments: usize,
    pub envelope_preview: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InboxItem {
    pub id: usize,
    pub from: String,
    pub received_at: u64,
    pub read: bool,
    pub envelope: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadResult {
    pub plaintext: String,
    pub from: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HlrResult {
    pub flushed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Event {
    Submitted {
        record_id: RecordId,
        from: String,
        to: String,
        msg_ref: u16,
        part: u8,
        total: u8,
    },
    Delivered {
        record_id: RecordId,
        from: String,
        to: String,
        delivered_at: u64,
    },
    HlrChanged {
        address: String,
        active: bool,
    },
    Read {
        address: String,
        message_id: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventRecord {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

pub fn validate_address(address: &str) -> Result<(), GatewayError> {
    let ok = (4..=15).contains(&address.len()) && address.bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(GatewayError::BadAddress(address.to_string()))
    }
}

pub struct Gateway {
    handsets: BTreeMap<String, HandsetDescriptor>,
    smsc: Smsc,
    reassembly: ReassemblyBuffer,
    inbox: Box<dyn InboxStore>,
    events: Vec<EventRecord>,
    rng: RandomnessProvider,
    refs: MsgRefCounter,
    mode: ModeKind,
}

impl Gateway {
    pub fn new(inbox: Box<dyn InboxStore>, rng: RandomnessProvider, mode: ModeKind) -> Self {
        Gateway {
            handsets: BTreeMap::new(),
            smsc: Smsc::new(),
            reassembly: ReassemblyBuffer::new(),
            inbox,
            events: Vec::new(),
            rng,
            refs: MsgRefCounter::default(),
            mode,
        }
    }

    /// In-memory inboxes, seeded keys, ECB.
    pub fn in_memory(seed: Option<u64>) -> Self {
        Self::new(
            Box::new(MemoryInboxStore::new()),
            RandomnessProvider::from_seed(seed),
            ModeKind::Ecb,
        )
    }

    pub fn mode(&self) -> ModeKind {
        self.mode
    }

    pub fn smsc(&self) -> &Smsc {
        &self.smsc
    }

    fn emit(&mut self, event: Event) {
        let seq = self.events.len() as u64 + 1;
        self.events.push(EventRecord { seq, event });
    }

    fn require(&self, address: &str) -> Result<(), GatewayError> {
        if self.handsets.contains_key(address) {
            Ok(())
        } else {
            Err(GatewayError::UnknownHandset(address.to_string()))
        }
    }

    pub fn register_handset(
        &mut self,
        name: &str,
        address: &str,
    ) -> Result<HandsetDescriptor, GatewayError> {
        validate_address(address)?;
        if self.handsets.contains_key(address) {
            return Err(GatewayError::AddressInUse(address.to_string()));
        }
        let descriptor = HandsetDescriptor {
            address: address.to_string(),
            display_name: name.to_string(),
        };
        self.handsets.insert(address.to_string(), descriptor.clone());
        self.smsc.set_hlr(address, false);
        Ok(descriptor)
    }

    pub fn handsets(&self) -> Vec<HandsetDescriptor> {
        self.handsets.values().cloned().collect()
    }

    /// Hands newly delivered segments to recipients, storing each message in
    /// the inbox once its last part arrives.
    /// A failure on one record does not stop the rest from being handed over;
    /// the first error is returned afterwards.
    fn pump_deliveries(&mut self) -> Result<(), GatewayError> {
        let mut first_error = None;
        for record in self.smsc.take_delivered() {
            let seg = record.segment;
            self.emit(Event::Delivered {
                record_id: record.id,
                from: seg.from.clone(),
                to: seg.to.clone(),
                delivered_at: record.delivered_at.unwrap_or_default(),
            });
            let (from, to) = (seg.from.clone(), seg.to.clone());
            let stored = self.reassembly.offer(seg).map_err(GatewayError::from).and_then(|done| {
                let Some(envelope) = done else { return Ok(()) };
                let entry = InboxEntry {
                    from,
                    envelope,
                    received_at: record.delivered_at.unwrap_or_default(),
                    read: false,
                };
                Ok(self.inbox.append(&to, &entry)?)
            });
            if let Err(e) = stored {
                log::warn!("delivery of record {} to {to} failed: {e}", record.id);
                first_error.get_or_insert(e);
            }
        }
        first_error.map_or(Ok(()), Err)
    }

    pub fn api_send(&mut self, from: &str, to: &str, text: &str) -> Result<SendReceipt, GatewayError> {
        self.require(from)?;
        self.require(to)?;
        if text.is_empty() {
            return Err(GatewayError::EmptyMessage);
        }
        let wire = seal_envelope(text, &self.rng, self.mode)
            .and_then(|e| e.to_wire())
            .map_err(GatewayError::Seal)?;
        let segments = segment_message(&wire, from, to, &mut self.refs)?;
        let message_id = segments[0].msg_ref;
        let count = segments.len();
        for seg in segments {
            let (msg_ref, part, total) = (seg.msg_ref, seg.idx, seg.total);
            let record_id = self.smsc.submit(seg);
            self.emit(Event::Submitted {
                record_id,
                from: from.to_string(),
                to: to.to_string(),
                msg_ref,
                part,
                total,
            });
        }
        self.pump_deliveries()?;
        Ok(SendReceipt {
            message_id,
            segments: count,
            envelope_preview: wire.chars().take(PREVIEW_CHARS).collect(),
        })
    }

    pub fn api_inbox(&self, address: &str) -> Result<Vec<InboxItem>, GatewayError> {
        self.require(address)?;
        Ok(self
            .inbox
            .load(address)?
            .into_iter()
            .enumerate()
            .map(|(i, e)| InboxItem {
                id: i + 1,
                from: e.from,
                received_at: e.received_at,
                read: e.read,
                envelope: e.envelope,
            })
            .collect())
    }

    /// Opens one inbox message. Ids are 1-based positions in the inbox.
    pub fn api_read(&mut self, address: &str, message_id: usize) -> Result<ReadResult, GatewayError> {
        self.require(address)?;
        let entries = self.inbox.load(address)?;
        let entry = message_id
            .checked_sub(1)
            .and_then(|i| entries.get(i))
            .ok_or_else(|| GatewayError::UnknownMessage {
                address: address.to_string(),
                id: message_id,
            })?;
        let plaintext = open(&entry.envelope, self.mode).map_err(GatewayError::DecryptFailed)?;
        if !entry.read {
            self.inbox.mark_read(address, message_id - 1)?;
            self.emit(Event::Read {
                address: address.to_string(),
                message_id,
            });
        }
        Ok(ReadResult {
            plaintext,
            from: entry.from.clone(),
        })
    }

    pub fn api_smsc_dump(&self) -> Vec<StaffRow> {
        self.smsc.staff_view()
    }

    pub fn api_hlr_set(&mut self, address: &str, active: bool) -> Result<HlrResult, GatewayError> {
        let flushed = self.smsc.set_hlr(address, active);
        self.emit(Event::HlrChanged {
            address: address.to_string(),
            active,
        });
        self.pump_deliveries()?;
        Ok(HlrResult { flushed })
    }

    pub fn api_events(&self, since: u64) -> Vec<EventRecord> {
        let start = (since as usize).min(self.events.len());
        self.events[start..].to_vec()
    }

    pub fn latest_seq(&self) -> u64 {
        self.events.len() as u64
    }

    /// Rewrites a segment held at the SMSC, as a hostile operator might.
    #[cfg(any(test, feature = "tamper"))]
    pub fn tamper_smsc_text(&mut self, record_id: RecordId, text: String) -> bool {
        self.smsc.tamper_stored_text(record_id, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aegis_core::envelope::decode_envelope;

    fn gateway() -> Gateway {
        let mut g = Gateway::in_memory(Some(42));
        g.register_handset("alice", "1001").unwrap();
        g.register_handset("bob", "1002").unwrap();
        g
    }

    #[test]
    fn registration_rules() {
        let mut g = Gateway::in_memory(Some(1));
        let d = g.register_handset("alice", "1001").unwrap();
        assert_eq!(d.address, "1001");
        assert!(matches!(
            g.register_handset("again", "1001"),
            Err(GatewayError::AddressInUse(_))
        ));
        for bad in ["12ab", "123", "1234567890123456", ""] {
            assert!(matches!(
                g.register_handset("x", bad),
                Err(GatewayError::BadAddress(_))
            ));
        }
        assert!(!g.smsc().hlr().is_active("1001"));
    }

    #[test]
    fn send_to_active_recipient() {
        let mut g = gateway();
        g.api_hlr_set("1002", true).unwrap();
        let since = g.latest_seq();
        let r = g.api_send("1001", "1002", "hello wasim").unwrap();
        assert_eq!(r.segments, 1);
        assert!(r.envelope_preview.len() <= PREVIEW_CHARS);
        assert!(r.envelope_preview.bytes().all(|b| b.is_ascii_alphanumeric() || b"+/=".contains(&b)));
        let inbox = g.api_inbox("1002").unwrap();
        assert_eq!(inbox.len(), 1);
        assert!(decode_envelope(inbox[0].envelope.as_bytes()).is_ok());
        let events = g.api_events(since);
        assert!(matches!(events[0].event, Event::Submitted { .. }));
        assert!(matches!(events[1].event, Event::Delivered { .. }));
        assert!(g.api_events(g.latest_seq()).is_empty());

        let read = g.api_read("1002", 1).unwrap();
        assert_eq!(read.plaintext, "hello wasim");
        assert_eq!(read.from, "1001");
        assert_eq!(g.api_read("1002", 1).unwrap(), read);
        assert!(g.api_inbox("1002").unwrap()[0].read);
        let reads = g
            .api_events(0)
            .iter()
            .filter(|e| matches!(e.event, Event::Read { .. }))
            .count();
        assert_eq!(reads, 1);
    }

    #[test]
    fn send_errors() {
        let mut g = gateway();
        assert!(matches!(
            g.api_send("1001", "9999", "x"),
            Err(GatewayError::UnknownHandset(_))
        ));
        assert!(matches!(
            g.api_send("1001", "1002", ""),
            Err(GatewayError::EmptyMessage)
        ));
        assert!(matches!(g.api_inbox("9999"), Err(GatewayError::UnknownHandset(_))));
        assert!(matches!(
            g.api_read("1002", 1),
            Err(GatewayError::UnknownMessage { .. })
        ));
        assert!(matches!(
            g.api_read("1002", 0),
            Err(GatewayError::UnknownMessage { .. })
        ));
    }

    #[test]
    fn inactive_recipient_waits_for_hlr() {
        let mut g = gateway();
        let long = "x".repeat(50); // 64-byte ciphertext, 178-char envelope: two parts
        let r = g.api_send("1001", "1002", &long).unwrap();
        assert_eq!(r.segments, 2);
        assert!(g.api_inbox("1002").unwrap().is_empty());
        assert_eq!(g.api_hlr_set("1002", false).unwrap().flushed, 0);
        assert_eq!(g.api_hlr_set("1002", true).unwrap().flushed, 2);
        assert_eq!(g.api_hlr_set("1002", true).unwrap().flushed, 0);
        assert_eq!(g.api_read("1002", 1).unwrap().plaintext, long);
        assert_eq!(g.api_smsc_dump().len(), 2);
    }

    #[test]
    fn tampered_segment_fails_decryption() {
        let mut g = gateway();
        g.api_send("1001", "1002", "hello wasim").unwrap();
        let stored = g.api_smsc_dump()[0].text.clone();
        // Flip one hex digit of the final ciphertext block.
        let mut bytes = stored.into_bytes();
        bytes[4 + 30] = if bytes[4 + 30] == b'0' { b'1' } else { b'0' };
        assert!(g.tamper_smsc_text(1, String::from_utf8(bytes).unwrap()));
        g.api_hlr_set("1002", true).unwrap();
        match g.api_read("1002", 1) {
            Err(GatewayError::DecryptFailed(e)) => {
                assert_eq!(e, EnvelopeError::Mode(aegis_core::modes::ModeError::Padding))
            }
            other => panic!("expected DecryptFailed, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let run = || {
            let mut g = gateway();
            g.api_hlr_set("1002", true).unwrap();
            g.api_send("1001", "1002", "Hello world").unwrap();
            g.api_inbox("1002").unwrap()
        };
        assert_eq!(run(), run());
    }
}
