//! Audited bit channels between the two parties.
//!
//! A [`Transport`] moves whole messages and counts payload bits; an
//! [`Endpoint`] wraps one party's transport and logs every message it sends
//! or receives, so the two logs can be reconciled against the counters
//! after a run.

use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::mpsc::{channel, Receiver, Sender};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::bits_to_hex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }

    /// Direction of messages this role sends.
    pub fn outgoing(self) -> Direction {
        match self {
            Role::Alice => Direction::AliceToBob,
            Role::Bob => Direction::BobToAlice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AliceToBob => "A->B",
            Direction::BobToAlice => "B->A",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub dir: Direction,
    pub bits: Vec<bool>,
}

impl Message {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn hex(&self) -> String {
        bits_to_hex(self.bits.iter().copied())
    }
}

/// Counters kept by every transport.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TransportCounters {
    pub payload_sent: u64,
    pub payload_received: u64,
    /// Length prefixes and byte padding; never part of the protocol tally.
    pub framing_sent: u64,
}

pub trait Transport: Send {
    fn send(&mut self, bits: &[bool]) -> Result<()>;
    fn recv(&mut self) -> Result<Vec<bool>>;
    fn counters(&self) -> TransportCounters;
}

/// One end of an in-process queue pair.
pub struct MemoryTransport {
    tx: Sender<Vec<bool>>,
    rx: Receiver<Vec<bool>>,
    counters: TransportCounters,
}

/// Two connected in-memory transports, for Alice and Bob.
pub fn memory_pair() -> (MemoryTransport, MemoryTransport) {
    let (a_tx, b_rx) = channel();
    let (b_tx, a_rx) = channel();
    let end = |tx, rx| MemoryTransport {
        tx,
        rx,
        counters: TransportCounters::default(),
    };
    (end(a_tx, a_rx), end(b_tx, b_rx))
}

impl Transport for MemoryTransport {
    fn send(&mut self, bits: &[bool]) -> Result<()> {
        self.tx
            .send(bits.to_vec())
            .map_err(|_| Error::Protocol("peer hung up".into()))?;
        self.counters.payload_sent += bits.len() as u64;
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<bool>> {
        let bits = self
            .rx
            .recv()
            .map_err(|_| Error::Protocol("peer hung up".into()))?;
        self.counters.payload_received += bits.len() as u64;
        Ok(bits)
    }

    fn counters(&self) -> TransportCounters {
        self.counters
    }
}

/// Length-prefixed frames over TCP: a 32-bit big-endian length in bits,
/// then the payload packed MSB-first into bytes with zero padding.
pub struct TcpTransport {
    stream: TcpStream,
    counters: TransportCounters,
}

impl TcpTransport {
    pub fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true)?;
        Ok(TcpTransport {
            stream,
            counters: TransportCounters::default(),
        })
    }
}

pub(crate) fn pack_frame(bits: &[bool]) -> Result<Vec<u8>> {
    let len = u32::try_from(bits.len())
        .map_err(|_| Error::Protocol(format!("message of {} bits is too long", bits.len())))?;
    let mut out = len.to_be_bytes().to_vec();
    out.extend(bits.chunks(8).map(|chunk| {
        chunk
            .iter()
            .enumerate()
            .fold(0u8, |byte, (i, &b)| byte | (u8::from(b) << (7 - i)))
    }));
    Ok(out)
}

pub(crate) fn unpack_payload(len: usize, bytes: &[u8]) -> Result<Vec<bool>> {
    let bits: Vec<bool> = (0..bytes.len() * 8)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
        .collect();
    if bits[len..].iter().any(|&b| b) {
        return Err(Error::Protocol("nonzero padding bits in frame".into()));
    }
    Ok(bits[..len].to_vec())
}

impl Transport for TcpTransport {
    fn send(&mut self, bits: &[bool]) -> Result<()> {
        let frame = pack_frame(bits)?;
        self.stream.write_all(&frame)?;
        self.stream.flush()?;
        self.counters.payload_sent += bits.len() as u64;
        self.counters.framing_sent += (frame.len() * 8 - bits.len()) as u64;
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<bool>> {
        let mut header = [0u8; 4];
        self.stream
            .read_exact(&mut header)
            .map_err(|e| Error::Protocol(format!("reading frame header: {e}")))?;
        let len = u32::from_be_bytes(header) as usize;
        let mut payload = vec![0u8; len.div_ceil(8)];
        self.stream
            .read_exact(&mut payload)
            .map_err(|e| Error::Protocol(format!("reading {len}-bit frame: {e}")))?;
        let bits = unpack_payload(len, &payload)?;
        self.counters.payload_received += len as u64;
        Ok(bits)
    }

    fn counters(&self) -> TransportCounters {
        self.counters
    }
}

/// A party's side of the channel, with a log of everything it saw.
pub struct Endpoint {
    role: Role,
    transport: Box<dyn Transport>,
    log: Vec<Message>,
}

impl Endpoint {
    pub fn new(role: Role, transport: Box<dyn Transport>) -> Self {
        Endpoint {
            role,
            transport,
            log: Vec::new(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn send(&mut self, bits: Vec<bool>) -> Result<()> {
        self.transport.send(&bits)?;
        self.log.push(Message {
            dir: self.role.outgoing(),
            bits,
        });
        Ok(())
    }

    pub fn recv(&mut self) -> Result<Vec<bool>> {
        let bits = self.transport.recv()?;
        self.log.push(Message {
            dir: self.role.peer().outgoing(),
            bits: bits.clone(),
        });
        Ok(bits)
    }

    /// A single-bit message.
    pub fn send_bit(&mut self, b: bool) -> Result<()> {
        self.send(vec![b])
    }

    pub fn recv_bit(&mut self) -> Result<bool> {
        match self.recv()?.as_slice() {
            [b] => Ok(*b),
            other => Err(Error::Protocol(format!(
                "expected a 1-bit reply, got {} bits",
                other.len()
            ))),
        }
    }

    pub fn log(&self) -> &[Message] {
        &self.log
    }

    pub fn counters(&self) -> TransportCounters {
        self.transport.counters()
    }

    pub fn into_log(self) -> (Vec<Message>, TransportCounters) {
        let counters = self.transport.counters();
        (self.log, counters)
    }
}
