use aegis_core::envelope::decode_envelope;
use aegis_core::sms::{
    reassemble, segment_message, FileInboxStore, InboxEntry, InboxStore, MsgRefCounter,
    ReassemblyBuffer, Smsc,
};
use aegis_core::{open, seal, ModeKind, RandomnessProvider};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seal_segment_deliver_reassemble_open(m in "\\PC{1,500}", seed: u64, online: bool) {
        let rng = RandomnessProvider::seeded(seed);
        let wire = seal(&m, &rng, ModeKind::Ecb).unwrap();
        let parts = segment_message(&wire, "1001", "1002", &mut MsgRefCounter::default()).unwrap();
        let mut smsc = Smsc::new();
        smsc.set_hlr("1002", online);
        for p in parts {
            smsc.submit(p);
        }
        smsc.set_hlr("1002", true);
        let delivered: Vec<_> = smsc.take_delivered().into_iter().rev().map(|r| r.segment).collect();
        let joined = reassemble(&delivered).unwrap();
        prop_assert_eq!(open(&joined, ModeKind::Ecb).unwrap(), m);
    }

    #[test]
    fn staff_view_never_shows_plaintext(m in "[a-zA-Z0-9]{8,120}", seed: u64) {
        let rng = RandomnessProvider::seeded(seed);
        let wire = seal(&m, &rng, ModeKind::Ecb).unwrap();
        let mut smsc = Smsc::new();
        for p in segment_message(&wire, "1001", "1002", &mut MsgRefCounter::default()).unwrap() {
            smsc.submit(p);
        }
        prop_assert!(smsc.staff_view().iter().all(|r| !r.text.contains(&m)));
    }
}

#[test]
fn delivered_messages_land_in_durable_inbox() {
    let dir = tempfile::tempdir().unwrap();
    let rng = RandomnessProvider::seeded(12);
    let mut refs = MsgRefCounter::default();
    let mut smsc = Smsc::new();
    let mut buffer = ReassemblyBuffer::new();
    let mut store = FileInboxStore::open(dir.path()).unwrap();
    let texts: Vec<String> = (0..20).map(|i| format!("message number {i} {}", "~".repeat(i * 10))).collect();

    for t in &texts {
        let wire = seal(t, &rng, ModeKind::Ecb).unwrap();
        for p in segment_message(&wire, "1001", "1002", &mut refs).unwrap() {
            smsc.submit(p);
        }
    }
    smsc.set_hlr("1002", true);
    for record in smsc.take_delivered() {
        let at = record.delivered_at.unwrap();
        if let Some(envelope) = buffer.offer(record.segment).unwrap() {
            let entry = InboxEntry { from: "1001".into(), envelope, received_at: at, read: false };
            store.append("1002", &entry).unwrap();
        }
    }
    drop(store);

    let store = FileInboxStore::open(dir.path()).unwrap();
    let entries = store.load("1002").unwrap();
    assert_eq!(entries.len(), texts.len());
    for (entry, text) in entries.iter().zip(&texts) {
        assert!(decode_envelope(entry.envelope.as_bytes()).is_ok());
        assert_eq!(&open(&entry.envelope, ModeKind::Ecb).unwrap(), text);
    }
    assert!(entries.windows(2).all(|w| w[0].received_at < w[1].received_at));
}
