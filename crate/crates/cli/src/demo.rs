//! Scripted two-handset exchange through an in-process gateway.

use std::fmt::Write;

use aegis_core::Envelope;
use aegis_gateway::{Gateway, GatewayError};

pub const SENDER: (&str, &str) = ("alice", "1001");
pub const RECEIVER: (&str, &str) = ("bob", "1002");
pub const MESSAGES: [&str; 2] = ["hello wasim", "Hello world"];

/// One row per message: what was typed, the key and ciphertext that
/// travelled, and what the receiver decrypted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub input: String,
    pub key_b64: String,
    pub ct_hex: String,
    pub plaintext: String,
}

impl SummaryRow {
    pub fn line(&self) -> String {
        format!("{}|{}|{}|{}", self.input, self.key_b64, self.ct_hex, self.plaintext)
    }
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub sender_panel: String,
    pub smsc_panel: String,
    pub receiver_panel: String,
    pub summary: Vec<SummaryRow>,
}

impl DemoReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.sender_panel);
        out.push_str(&self.smsc_panel);
        out.push_str(&self.receiver_panel);
        out.push_str("== summary (input|key_b64|ct_hex|plaintext) ==\n");
        for row in &self.summary {
            out.push_str(&row.line());
            out.push('\n');
        }
        out
    }
}

pub fn run_demo(seed: Option<u64>) -> Result<DemoReport, GatewayError> {
    let mut gw = Gateway::in_memory(seed);
    gw.register_handset(SENDER.0, SENDER.1)?;
    gw.register_handset(RECEIVER.0, RECEIVER.1)?;

    let mut sender_panel = format!("== sender {} ({}) ==\n", SENDER.1, SENDER.0);
    for text in MESSAGES {
        let r = gw.api_send(SENDER.1, RECEIVER.1, text)?;
        let _ = writeln!(
            sender_panel,
            "> to {}: {text}\n  sent: message {:04X}, {} segment(s)",
            RECEIVER.1, r.message_id, r.segments
        );
    }
    let queued = gw.smsc().queued_for(RECEIVER.1);
    let flushed = gw.api_hlr_set(RECEIVER.1, true)?.flushed;
    let _ = writeln!(
        sender_panel,
        "  {queued} segment(s) held at SMSC until {} came online; {flushed} delivered",
        RECEIVER.1
    );

    let mut smsc_panel = String::from("== SMSC staff view ==\n");
    for row in gw.api_smsc_dump() {
        let _ = writeln!(
            smsc_panel,
            "#{} {} -> {} {:?}\n  {}",
            row.id, row.from, row.to, row.state, row.text
        );
    }

    let mut receiver_panel = format!("== receiver {} ({}) ==\n", RECEIVER.1, RECEIVER.0);
    let mut summary = Vec::new();
    for (item, input) in gw.api_inbox(RECEIVER.1)?.into_iter().zip(MESSAGES) {
        let opened = gw.api_read(RECEIVER.1, item.id)?;
        let env = Envelope::parse(&item.envelope).map_err(GatewayError::DecryptFailed)?;
        let _ = writeln!(receiver_panel, "< from {}: {}", opened.from, opened.plaintext);
        summary.push(SummaryRow {
            input: input.to_string(),
            key_b64: env.key_b64(),
            ct_hex: env.ct_hex(),
            plaintext: opened.plaintext,
        });
    }

    Ok(DemoReport {
        sender_panel,
        smsc_panel,
        receiver_panel,
        summary,
    })
}
