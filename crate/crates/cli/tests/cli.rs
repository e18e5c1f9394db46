use std::process::{Command, Output};

use aegis_core::envelope::decode_envelope;
use aegis_gateway::http::{serve, shared};
use aegis_gateway::Gateway;

fn aegis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aegis"))
        .args(args)
        .env_remove("GATEWAY_URL")
        .output()
        .expect("run aegis")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn is_envelope_line(line: &str) -> bool {
    let b = line.as_bytes();
    let upper_hex = |s: &[u8]| s.iter().all(|c| c.is_ascii_digit() || (b'A'..=b'F').contains(c));
    if b.len() < 50 || !upper_hex(&b[..4]) || &b[b.len() - 2..] != b"20" {
        return false;
    }
    let ct_len = usize::from_str_radix(&line[..4], 16).unwrap();
    b.len() == 4 + 2 * ct_len + 44 + 2
        && upper_hex(&b[4..4 + 2 * ct_len])
        && decode_envelope(b).is_ok()
}

#[test]
fn aes_kat_passes() {
    let o = aegis(&["aes", "kat"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    assert!(out.contains("8ea2b7ca516745bfeafc49904b496089"));
}

#[test]
fn seal_then_open() {
    let o = aegis(&["seal", "--text", "hello wasim", "--seed", "42"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let env = out.trim_end();
    assert!(is_envelope_line(env), "{env}");
    assert_eq!(&env[..4], "0010");
    assert_eq!(stdout(&aegis(&["seal", "--text", "hello wasim", "--seed", "42"])), out);

    let o = aegis(&["open", "--envelope", env]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "hello wasim\n");

    let cbc = stdout(&aegis(&["seal", "--text", "hello wasim", "--seed", "1", "--mode", "cbc"]));
    assert!(is_envelope_line(cbc.trim_end()));
    assert_eq!(stdout(&aegis(&["open", "--envelope", cbc.trim_end(), "--mode", "cbc"])), "hello wasim\n");
}

#[test]
fn exit_codes() {
    assert_eq!(aegis(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(aegis(&["seal"]).status.code(), Some(2));
    assert_eq!(aegis(&["seal", "--text", "x", "--mode", "ofb"]).status.code(), Some(2));
    assert_eq!(aegis(&["seal", "--text", ""]).status.code(), Some(1));
    assert_eq!(aegis(&["open", "--envelope", "0010XYZ"]).status.code(), Some(1));
}

#[test]
fn demo_output() {
    let a = aegis(&["demo", "--seed", "42"]);
    assert!(a.status.success());
    let out = stdout(&a);
    assert_eq!(out, stdout(&aegis(&["demo", "--seed", "42"])));

    let receiver = out.split("== receiver").nth(1).unwrap();
    assert!(receiver.contains("hello wasim"));
    assert!(receiver.contains("Hello world"));
    let smsc = out.split("== SMSC staff view ==").nth(1).unwrap().split("== receiver").next().unwrap();
    assert!(!smsc.contains("hello wasim") && !smsc.contains("Hello world"));

    let summary: Vec<_> = out.lines().filter(|l| l.matches('|').count() == 3 && !l.starts_with("==")).collect();
    assert_eq!(summary.len(), 2);
    let fields: Vec<_> = summary[0].split('|').collect();
    assert_eq!(fields[0], "hello wasim");
    assert_eq!(fields[1].len(), 44);
    assert_eq!(fields[2].len(), 32);
    assert_eq!(fields[3], "hello wasim");
}

#[test]
fn thin_clients_drive_a_live_gateway() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    rt.spawn(serve(listener, shared(Gateway::in_memory(Some(4)))));

    let run = |args: &[&str]| {
        let mut full = args.to_vec();
        full.extend(["--gateway", &url]);
        aegis(&full)
    };
    assert!(run(&["register", "--name", "alice", "--address", "1001"]).status.success());
    assert!(run(&["register", "--name", "bob", "--address", "1002"]).status.success());
    let dup = run(&["register", "--name", "bob", "--address", "1002"]);
    assert_eq!(dup.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&dup.stderr).contains("AddressInUse"));

    let sent = run(&["send", "--from", "1001", "--to", "1002", "--text", "hello wasim"]);
    assert!(sent.status.success());
    assert!(!stdout(&sent).contains("hello wasim"));
    let smsc = stdout(&run(&["smsc"]));
    assert!(smsc.contains("Queued") && !smsc.contains("hello wasim"));
    assert!(stdout(&run(&["hlr", "--address", "1002", "--active", "true"])).contains("\"flushed\": 1"));
    let inbox = stdout(&run(&["inbox", "--address", "1002"]));
    assert!(inbox.contains("\"id\": 1") && !inbox.contains("hello wasim"));
    let read = stdout(&run(&["read", "--address", "1002", "--id", "1"]));
    assert!(read.contains("\"plaintext\": \"hello wasim\""));
    let events = stdout(&run(&["events", "--since", "0"]));
    for kind in ["Submitted", "HlrChanged", "Delivered", "Read"] {
        assert!(events.contains(kind), "{kind} missing");
    }
    assert_eq!(run(&["read", "--address", "1002", "--id", "5"]).status.code(), Some(1));
}

#[test]
fn client_reports_unreachable_gateway() {
    let o = aegis(&["smsc", "--gateway", "http://127.0.0.1:9"]);
    assert_eq!(o.status.code(), Some(1));
}
