use std::path::PathBuf;
use std::process::ExitCode;

use aegis_cli::client::{GatewayClient, DEFAULT_GATEWAY_URL};
use aegis_cli::demo::run_demo;
use aegis_core::aes::{run_known_answers, sbox_self_test};
use aegis_core::{open, seal, ModeKind, RandomnessProvider};
use aegis_gateway::http::{serve, shared, GatewayConfig};
use aegis_gateway::DEFAULT_PORT;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "aegis", version, about = "End-to-end encrypted SMS over a simulated GSM network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// AES self-tests.
    Aes {
        #[command(subcommand)]
        command: AesCommand,
    },
    /// Encrypt a message under a fresh key and print the envelope.
    Seal {
        #[arg(long)]
        text: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "ecb")]
        mode: ModeKind,
    },
    /// Decrypt an envelope and print the message.
    Open {
        #[arg(long)]
        envelope: String,
        #[arg(long, default_value = "ecb")]
        mode: ModeKind,
    },
    /// Run the HTTP gateway.
    Serve {
        #[arg(long, env = "GATEWAY_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Directory for inbox logs; inboxes stay in memory when omitted.
        #[arg(long, env = "GATEWAY_STATE_DIR")]
        state_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "ecb")]
        mode: ModeKind,
    },
    /// Register a handset with a running gateway.
    Register {
        #[arg(long)]
        name: String,
        #[arg(long)]
        address: String,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Send a message between two registered handsets.
    Send {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        text: String,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// List a handset's inbox (sealed envelopes).
    Inbox {
        #[arg(long)]
        address: String,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Open one inbox message.
    Read {
        #[arg(long)]
        address: String,
        #[arg(long)]
        id: usize,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Dump the SMSC store as its operators see it.
    Smsc {
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Set a handset's HLR presence.
    Hlr {
        #[arg(long)]
        address: String,
        #[arg(long, action = clap::ArgAction::Set)]
        active: bool,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Print events after a sequence number.
    Events {
        #[arg(long, default_value_t = 0)]
        since: u64,
        #[command(flatten)]
        gateway: GatewayArg,
    },
    /// Two-handset walkthrough on an in-process gateway.
    Demo {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum AesCommand {
    /// Run the known-answer vectors and the S-box self-test.
    Kat,
}

#[derive(clap::Args)]
struct GatewayArg {
    #[arg(long = "gateway", env = "GATEWAY_URL", default_value = DEFAULT_GATEWAY_URL)]
    url: String,
}

impl GatewayArg {
    fn client(&self) -> GatewayClient {
        GatewayClient::new(&self.url)
    }
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn aes_kat() -> Result<()> {
    let mut failed = 0;
    for r in run_known_answers() {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {} ciphertext {}", r.name, r.computed);
        failed += usize::from(!r.passed());
    }
    let mismatches = sbox_self_test();
    if mismatches.is_empty() {
        println!("PASS S-box generated == embedded (256 entries)");
    } else {
        println!("FAIL S-box differs at {} indices: {mismatches:?}", mismatches.len());
        failed += 1;
    }
    if failed > 0 {
        bail!("{failed} self-test(s) failed");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Aes { command: AesCommand::Kat } => aes_kat(),
        Command::Seal { text, seed, mode } => {
            let rng = RandomnessProvider::from_seed(seed);
            println!("{}", seal(&text, &rng, mode)?);
            Ok(())
        }
        Command::Open { envelope, mode } => {
            println!("{}", open(envelope.trim(), mode)?);
            Ok(())
        }
        Command::Serve { port, state_dir, seed, mode } => {
            let cfg = GatewayConfig { port, state_dir, seed, mode };
            let gateway = cfg.build()?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", cfg.port))
                    .await
                    .with_context(|| format!("binding port {}", cfg.port))?;
                eprintln!("gateway listening on {}", listener.local_addr()?);
                serve(listener, shared(gateway)).await?;
                Ok(())
            })
        }
        Command::Register { name, address, gateway } => print_json(&gateway.client().register(&name, &address)?),
        Command::Send { from, to, text, gateway } => print_json(&gateway.client().send(&from, &to, &text)?),
        Command::Inbox { address, gateway } => print_json(&gateway.client().inbox(&address)?),
        Command::Read { address, id, gateway } => print_json(&gateway.client().read(&address, id)?),
        Command::Smsc { gateway } => print_json(&gateway.client().smsc()?),
        Command::Hlr { address, active, gateway } => print_json(&gateway.client().hlr(&address, active)?),
        Command::Events { since, gateway } => print_json(&gateway.client().events(since)?),
        Command::Demo { seed } => {
            print!("{}", run_demo(seed)?.render());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
