//! GSM-style transport: 160-character segmentation, a store-and-forward
//! SMSC gated by HLR presence, and per-handset inboxes.

mod inbox;
mod segment;
mod smsc;

use thiserror::Error;

pub use inbox::{FileInboxStore, InboxEntry, InboxStore, MemoryInboxStore, StoreIoError};
pub use segment::{
    reassemble, segment_message, MsgRefCounter, ReassemblyBuffer, SmsSegment, MAX_PARTS,
    MAX_SMS_CHARS, MULTIPART_PAYLOAD_CHARS, PART_HEADER_LEN,
};
pub use smsc::{
    DeliveryReceipt, DeliveryState, HlrRegistry, RecordId, SmscRecord, Smsc, StaffRow,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmsError {
    #[error("payload is empty")]
    EmptyPayload,
    #[error("payload of {chars} chars needs {parts} parts, more than 255")]
    PayloadTooLarge { chars: usize, parts: usize },
    #[error("segment of {0} chars exceeds 160")]
    SegmentTooLong(usize),
    #[error("malformed part header")]
    BadPartHeader,
    #[error("missing parts: have {received} of {expected}")]
    MissingParts { expected: usize, received: usize },
    #[error("parts belong to different messages")]
    RefMismatch,
    #[error("part {0} received twice")]
    DuplicatePart(u8),
}
