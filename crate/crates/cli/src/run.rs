//! `run-det`, `run-rand`, `run-public`: both parties in-process, or one
//! party per process over TCP.

use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::thread::sleep;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::Args;

use liniso_core::protocol::{
    run_local, run_remote, PartyParams, PromiseInstance, Protocol, Role, TcpTransport,
    Transcript,
};
use liniso_core::{Limits, Rational};

use crate::{load, rational};

#[derive(Args)]
pub struct RunArgs {
    /// Alice's truth table.
    #[arg(long)]
    f: Option<PathBuf>,
    /// Bob's truth table.
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long, value_parser = rational, default_value = "0")]
    eps: Rational,
    #[arg(long, value_parser = rational)]
    omega: Rational,
    #[arg(long = "seed-a")]
    pub seed_a: Option<u64>,
    #[arg(long = "seed-b")]
    pub seed_b: Option<u64>,
    /// Rounds of the public-coin protocol.
    #[arg(long, default_value_t = 7)]
    pub rounds: usize,
    /// Play Alice (input --f), waiting for Bob on this address.
    #[arg(long, conflicts_with = "connect")]
    listen: Option<String>,
    /// Play Bob (input --g), connecting to Alice at this address.
    #[arg(long)]
    connect: Option<String>,
}

fn connect_with_retry(addr: &str) -> Result<TcpStream> {
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() >= deadline => {
                return Err(e).with_context(|| format!("connecting to {addr}"))
            }
            Err(_) => sleep(Duration::from_millis(50)),
        }
    }
}

pub fn run(protocol: Protocol, args: &RunArgs, limits: &Limits, json: bool) -> Result<()> {
    let transcript = match (&args.listen, &args.connect) {
        (None, None) => {
            let (Some(f), Some(g)) = (&args.f, &args.g) else {
                bail!("an in-process run needs both --f and --g");
            };
            let instance = PromiseInstance::new(
                load(f)?,
                load(g)?,
                args.eps.clone(),
                args.omega.clone(),
                limits,
            )?;
            run_local(&protocol, &instance, limits)?
        }
        (listen, connect) => {
            let (role, input, stream) = if let Some(addr) = listen {
                let f = args.f.as_ref().context("--listen plays Alice and needs --f")?;
                let listener =
                    TcpListener::bind(addr).with_context(|| format!("binding {addr}"))?;
                let (stream, _) = listener.accept()?;
                (Role::Alice, load(f)?, stream)
            } else {
                let addr = connect.as_ref().expect("one of the two is set");
                let g = args.g.as_ref().context("--connect plays Bob and needs --g")?;
                (Role::Bob, load(g)?, connect_with_retry(addr)?)
            };
            let params = PartyParams {
                n: input.arity(),
                epsilon: args.eps.clone(),
                omega: args.omega.clone(),
                limits: *limits,
            };
            run_remote(&protocol, role, &input, &params, Box::new(TcpTransport::new(stream)?))?
        }
    };
    report(&transcript, json);
    if let Some(fault) = &transcript.fault {
        bail!("protocol fault: {fault}");
    }
    Ok(())
}

fn report(t: &Transcript, json: bool) {
    if json {
        println!("{}", t.to_json());
        return;
    }
    println!("protocol = {}", t.protocol);
    println!(
        "outcome = {}",
        t.outcome.map_or("unknown to this party", |o| o.as_str())
    );
    println!(
        "total_bits = {} (A->B {}, B->A {})",
        t.total_bits(),
        t.bits_a_to_b(),
        t.bits_b_to_a()
    );
    if t.framing_bits > 0 {
        println!("framing_bits = {}", t.framing_bits);
    }
    println!(
        "stats = {}",
        serde_json::to_string(&t.stats).expect("stats serialize")
    );
}
