use std::collections::HashMap;

use super::SmsError;

/// Maximum characters in one SMS.
pub const MAX_SMS_CHARS: usize = 160;
/// "P" + HEX4(msg_ref) + HEX2(idx) + HEX2(total).
pub const PART_HEADER_LEN: usize = 9;
pub const MULTIPART_PAYLOAD_CHARS: usize = MAX_SMS_CHARS - PART_HEADER_LEN;
pub const MAX_PARTS: usize = 255;

/// One transport unit as the SMSC sees it. `text` is the on-air form,
/// including the part header for multipart messages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmsSegment {
    pub text: String,
    pub msg_ref: u16,
    pub idx: u8,
    pub total: u8,
    pub from: String,
    pub to: String,
}

impl SmsSegment {
    /// The message chunk carried by this part, without header.
    pub fn payload(&self) -> &str {
        if self.total == 1 {
            &self.text
        } else {
            &self.text[PART_HEADER_LEN..]
        }
    }

    /// Rebuilds a segment from its on-air text. Envelopes start with a hex
    /// digit, so a leading 'P' unambiguously marks a multipart header.
    pub fn from_wire(text: &str, from: &str, to: &str) -> Result<Self, SmsError> {
        if text.chars().count() > MAX_SMS_CHARS {
            return Err(SmsError::SegmentTooLong(text.chars().count()));
        }
        let header = match parse_part_header(text) {
            Some(h) => h,
            None if text.starts_with('P') => return Err(SmsError::BadPartHeader),
            None => {
                return Ok(SmsSegment {
                    text: text.to_string(),
                    msg_ref: 0,
                    idx: 1,
                    total: 1,
                    from: from.to_string(),
                    to: to.to_string(),
                })
            }
        };
        let (msg_ref, idx, total) = header;
        if idx == 0 || idx > total || total < 2 {
            return Err(SmsError::BadPartHeader);
        }
        Ok(SmsSegment {
            text: text.to_string(),
            msg_ref,
            idx,
            total,
            from: from.to_string(),
            to: to.to_string(),
        })
    }
}

fn parse_part_header(text: &str) -> Option<(u16, u8, u8)> {
    let header = text.get(..PART_HEADER_LEN)?;
    let rest = header.strip_prefix('P')?;
    if !rest.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let msg_ref = u16::from_str_radix(&rest[0..4], 16).ok()?;
    let idx = u8::from_str_radix(&rest[4..6], 16).ok()?;
    let total = u8::from_str_radix(&rest[6..8], 16).ok()?;
    Some((msg_ref, idx, total))
}

/// Hands out 16-bit message references, wrapping at 0xFFFF.
#[derive(Debug, Clone, Default)]
pub struct MsgRefCounter {
    next: u16,
}

impl MsgRefCounter {
    pub fn starting_at(next: u16) -> Self {
        MsgRefCounter { next }
    }

    pub fn next_ref(&mut self) -> u16 {
        let r = self.next;
        self.next = self.next.wrapping_add(1);
        r
    }
}

pub fn segment_message(
    payload: &str,
    from: &str,
    to: &str,
    refs: &mut MsgRefCounter,
) -> Result<Vec<SmsSegment>, SmsError> {
    let chars: Vec<char> = payload.chars().collect();
    if chars.is_empty() {
        return Err(SmsError::EmptyPayload);
    }
    let msg_ref = refs.next_ref();
    if chars.len() <= MAX_SMS_CHARS {
        return Ok(vec![SmsSegment {
            text: payload.to_string(),
            msg_ref,
            idx: 1,
            total: 1,
            from: from.to_string(),
            to: to.to_string(),
        }]);
    }
    let total = chars.len().div_ceil(MULTIPART_PAYLOAD_CHARS);
    if total > MAX_PARTS {
        return Err(SmsError::PayloadTooLarge {
            chars: chars.len(),
            parts: total,
        });
    }
    Ok(chars
        .chunks(MULTIPART_PAYLOAD_CHARS)
        .enumerate()
        .map(|(i, chunk)| {
            let idx = i + 1;
            let mut text = format!("P{msg_ref:04X}{idx:02X}{total:02X}");
            text.extend(chunk);
            SmsSegment {
                text,
                msg_ref,
                idx: idx as u8,
                total: total as u8,
                from: from.to_string(),
                to: to.to_string(),
            }
        })
        .collect())
}

/// Joins the parts of one message in index order.
pub fn reassemble(parts: &[SmsSegment]) -> Result<String, SmsError> {
    let first = parts.first().ok_or(SmsError::MissingParts {
        expected: 0,
        received: 0,
    })?;
    let total = first.total as usize;
    let mut slots: Vec<Option<&SmsSegment>> = vec![None; total];
    for part in parts {
        if part.from != first.from || part.msg_ref != first.msg_ref || part.total != first.total {
            return Err(SmsError::RefMismatch);
        }
        let idx = part.idx as usize;
        if idx == 0 || idx > total {
            return Err(SmsError::BadPartHeader);
        }
        if slots[idx - 1].replace(part).is_some() {
            return Err(SmsError::DuplicatePart(part.idx));
        }
    }
    let received = slots.iter().filter(|s| s.is_some()).count();
    if received != total {
        return Err(SmsError::MissingParts {
            expected: total,
            received,
        });
    }
    Ok(slots.into_iter().flatten().map(SmsSegment::payload).collect())
}

/// Collects parts per `(from, msg_ref)` until a message is complete.
#[derive(Debug, Default)]
pub struct ReassemblyBuffer {
    pending: HashMap<(String, u16), Vec<SmsSegment>>,
}

impl ReassemblyBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the full payload once the last missing part arrives.
    pub fn offer(&mut self, segment: SmsSegment) -> Result<Option<String>, SmsError> {
        if segment.total == 1 {
            return Ok(Some(segment.payload().to_string()));
        }
        let key = (segment.from.clone(), segment.msg_ref);
        let parts = self.pending.entry(key.clone()).or_default();
        if parts.iter().any(|p| p.idx == segment.idx) {
            return Err(SmsError::DuplicatePart(segment.idx));
        }
        parts.push(segment);
        if parts.len() < parts[0].total as usize {
            return Ok(None);
        }
        let parts = self.pending.remove(&key).unwrap_or_default();
        reassemble(&parts).map(Some)
    }

    pub fn pending_messages(&self) -> usize {
        self.pending.len()
    }
}
