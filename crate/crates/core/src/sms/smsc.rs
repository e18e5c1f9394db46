use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::segment::SmsSegment;

pub type RecordId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeliveryState {
    Queued,
    Delivered,
}

/// Presence flags per address. Unknown addresses are inactive.
#[derive(Debug, Clone, Default)]
pub struct HlrRegistry {
    entries: HashMap<String, bool>,
}

impl HlrRegistry {
    pub fn is_active(&self, address: &str) -> bool {
        self.entries.get(address).copied().unwrap_or(false)
    }

    pub fn set(&mut self, address: &str, active: bool) {
        self.entries.insert(address.to_string(), active);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmscRecord {
    pub id: RecordId,
    pub segment: SmsSegment,
    pub state: DeliveryState,
    pub submitted_at: u64,
    pub delivered_at: Option<u64>,
    pub receipt_seen_by_sender: bool,
}

/// Delivery confirmation returned to the submitting handset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeliveryReceipt {
    pub record_id: RecordId,
    pub to: String,
    pub delivered_at: u64,
}

/// One row of the operator's view into the store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StaffRow {
    pub id: RecordId,
    pub from: String,
    pub to: String,
    pub text: String,
    pub state: DeliveryState,
}

/// Store-and-forward message centre.
///
/// Records are kept after delivery so the staff view shows everything that
/// passed through. Delivered segments wait in a handoff queue until the
/// owner collects them with [`Smsc::take_delivered`].
#[derive(Debug, Default)]
pub struct Smsc {
    records: Vec<SmscRecord>,
    hlr: HlrRegistry,
    clock: u64,
    handoff: VecDeque<RecordId>,
}

impl Smsc {
    pub fn new() -> Self {
        Self::default()
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Logical time of the most recent event.
    pub fn now(&self) -> u64 {
        self.clock
    }

    pub fn hlr(&self) -> &HlrRegistry {
        &self.hlr
    }

    // Ids start at 1 and equal position + 1, so lookup is by index.
    fn index_of(id: RecordId) -> usize {
        (id - 1) as usize
    }

    pub fn record(&self, id: RecordId) -> Option<&SmscRecord> {
        self.records.get(Self::index_of(id.max(1))).filter(|r| r.id == id)
    }

    pub fn records(&self) -> &[SmscRecord] {
        &self.records
    }

    pub fn submit(&mut self, segment: SmsSegment) -> RecordId {
        let submitted_at = self.tick();
        let id = self.records.len() as RecordId + 1;
        let recipient_active = self.hlr.is_active(&segment.to);
        self.records.push(SmscRecord {
            id,
            segment,
            state: DeliveryState::Queued,
            submitted_at,
            delivered_at: None,
            receipt_seen_by_sender: false,
        });
        if recipient_active {
            self.deliver(id);
        }
        id
    }

    fn deliver(&mut self, id: RecordId) {
        let at = self.tick();
        let record = &mut self.records[Self::index_of(id)];
        if record.state == DeliveryState::Delivered {
            return;
        }
        record.state = DeliveryState::Delivered;
        record.delivered_at = Some(at);
        self.handoff.push_back(id);
    }

    /// Updates presence. Activation flushes the address's queue in
    /// submission order and returns how many records were delivered.
    pub fn set_hlr(&mut self, address: &str, active: bool) -> usize {
        self.hlr.set(address, active);
        if !active {
            return 0;
        }
        let queued: Vec<RecordId> = self
            .records
            .iter()
            .filter(|r| r.state == DeliveryState::Queued && r.segment.to == address)
            .map(|r| r.id)
            .collect();
        for &id in &queued {
            self.deliver(id);
        }
        queued.len()
    }

    /// Drains segments delivered since the last call, in delivery order.
    pub fn take_delivered(&mut self) -> Vec<SmscRecord> {
        let ids: Vec<RecordId> = self.handoff.drain(..).collect();
        ids.into_iter()
            .map(|id| self.records[Self::index_of(id)].clone())
            .collect()
    }

    /// Receipts for `sender`'s delivered records not yet collected. Each
    /// receipt is handed out once.
    pub fn take_receipts(&mut self, sender: &str) -> Vec<DeliveryReceipt> {
        self.records
            .iter_mut()
            .filter(|r| {
                r.state == DeliveryState::Delivered
                    && !r.receipt_seen_by_sender
                    && r.segment.from == sender
            })
            .map(|r| {
                r.receipt_seen_by_sender = true;
                DeliveryReceipt {
                    record_id: r.id,
                    to: r.segment.to.clone(),
                    delivered_at: r.delivered_at.unwrap_or_default(),
                }
            })
            .collect()
    }

    pub fn queued_for(&self, address: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.state == DeliveryState::Queued && r.segment.to == address)
            .count()
    }

    pub fn staff_view(&self) -> Vec<StaffRow> {
        self.records
            .iter()
            .map(|r| StaffRow {
                id: r.id,
                from: r.segment.from.clone(),
                to: r.segment.to.clone(),
                text: r.segment.text.clone(),
                state: r.state,
            })
            .collect()
    }

    /// Overwrites a stored segment's text, standing in for an operator who
    /// alters messages at rest.
    #[cfg(any(test, feature = "tamper"))]
    pub fn tamper_stored_text(&mut self, id: RecordId, text: String) -> bool {
        match self.records.get_mut(Self::index_of(id.max(1))) {
            Some(r) if r.id == id => {
                r.segment.text = text;
                true
            }
            _ => false,
        }
    }
}
