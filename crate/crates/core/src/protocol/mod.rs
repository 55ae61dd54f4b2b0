//! Two-party protocols for the linear isomorphism promise problem.
//!
//! Each party runs [`play`]-style logic against its own [`Endpoint`]; the
//! runners here put the two parties on separate threads joined by an
//! in-memory channel ([`run_local`]) or drive a single party over any
//! [`Transport`] ([`run_remote`]). After every run the message logs are
//! reconciled against the transport counters.

pub mod bits;
pub mod channel;
mod deterministic;
mod private_coin;
mod public_coin;
mod transcript;

use std::thread;

pub use bits::{decode_integer, encode_integer, gamma_len, BitReader, BitWriter};
pub use channel::{
    memory_pair, Direction, Endpoint, MemoryTransport, Message, Role, TcpTransport, Transport,
    TransportCounters,
};
pub use private_coin::round_budget;
pub use public_coin::shared_parity;
pub use transcript::{GroundTruth, Outcome, PromiseInstance, Stats, Transcript};

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::Rational;

/// Which protocol to run, with its coins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Deterministic,
    /// Alice's and Bob's private seeds. Bob never flips a coin in this
    /// protocol, so `seed_b` is carried only for symmetry of the interface.
    PrivateCoin { seed_a: u64, seed_b: u64 },
    PublicCoin { seed: u64, rounds: usize },
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Deterministic => "det",
            Protocol::PrivateCoin { .. } => "rand",
            Protocol::PublicCoin { .. } => "public",
        }
    }
}

/// What both parties know besides their own input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyParams {
    pub n: usize,
    pub epsilon: Rational,
    pub omega: Rational,
    pub limits: Limits,
}

impl PartyParams {
    pub fn of(instance: &PromiseInstance, limits: &Limits) -> Self {
        PartyParams {
            n: instance.arity(),
            epsilon: instance.epsilon.clone(),
            omega: instance.omega.clone(),
            limits: *limits,
        }
    }
}

pub(crate) struct PartyResult {
    pub outcome: Option<Outcome>,
    pub stats: Stats,
}

pub(crate) fn one_third() -> Rational {
    Rational::new(1.into(), 3.into())
}

fn play(
    protocol: &Protocol,
    ep: &mut Endpoint,
    input: &BooleanFunction,
    params: &PartyParams,
) -> Result<PartyResult> {
    if input.arity() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: input.arity(),
        });
    }
    match *protocol {
        Protocol::Deterministic => deterministic::play(ep, input, params),
        Protocol::PrivateCoin { seed_a, seed_b } => {
            let seed = match ep.role() {
                Role::Alice => seed_a,
                Role::Bob => seed_b,
            };
            private_coin::play(ep, input, params, seed)
        }
        Protocol::PublicCoin { seed, rounds } => public_coin::play(ep, input, params, seed, rounds),
    }
}

type PartyRun = (Result<PartyResult>, Vec<Message>, TransportCounters);

fn play_logged(
    protocol: &Protocol,
    mut ep: Endpoint,
    input: &BooleanFunction,
    params: &PartyParams,
) -> PartyRun {
    let result = play(protocol, &mut ep, input, params);
    let (log, counters) = ep.into_log();
    (result, log, counters)
}

/// Splits party results into (fault message, results), propagating any
/// error that is not a stream fault.
fn settle(results: Vec<Result<PartyResult>>) -> Result<(Option<String>, Vec<PartyResult>)> {
    let mut fault = None;
    let mut ok = Vec::new();
    let mut other = None;
    for r in results {
        match r {
            Ok(p) => ok.push(p),
            Err(Error::Protocol(msg)) => {
                fault.get_or_insert(msg);
            }
            Err(e) => {
                other.get_or_insert(e);
            }
        }
    }
    match other {
        Some(e) => Err(e),
        None => Ok((fault, ok)),
    }
}

fn audit(log: &[Message], expected: u64) -> Result<()> {
    let total: u64 = log.iter().map(|m| m.len() as u64).sum();
    if total == expected {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "transcript declares {total} bits but the transport carried {expected}"
        )))
    }
}

/// Runs both parties on their own threads over an in-memory channel.
pub fn run_local(
    protocol: &Protocol,
    instance: &PromiseInstance,
    limits: &Limits,
) -> Result<Transcript> {
    let params = PartyParams::of(instance, limits);
    let (ta, tb) = memory_pair();
    let (alice, bob) = thread::scope(|s| {
        let a = s.spawn(|| {
            play_logged(protocol, Endpoint::new(Role::Alice, Box::new(ta)), &instance.f, &params)
        });
        let b = s.spawn(|| {
            play_logged(protocol, Endpoint::new(Role::Bob, Box::new(tb)), &instance.g, &params)
        });
        let join = |h: thread::ScopedJoinHandle<'_, PartyRun>| {
            h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))
        };
        (join(a), join(b))
    });
    let (ra, log_a, ca) = alice;
    let (rb, log_b, cb) = bob;
    let (fault, parties) = settle(vec![ra, rb])?;

    let mut transcript = Transcript {
        protocol: protocol.name(),
        n: instance.arity(),
        epsilon: instance.epsilon.clone(),
        omega: instance.omega.clone(),
        outcome: None,
        messages: log_a,
        stats: Stats::default(),
        framing_bits: ca.framing_sent + cb.framing_sent,
        fault,
    };
    if transcript.fault.is_none() {
        if transcript.messages != log_b {
            return Err(Error::Invariant("Alice's and Bob's logs disagree".into()));
        }
        audit(&transcript.messages, ca.payload_sent + cb.payload_sent)?;
        audit(&transcript.messages, ca.payload_sent + ca.payload_received)?;
        let mut outcome = None;
        let mut stats = Stats::default();
        for p in parties {
            match (outcome, p.outcome) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::Invariant("parties reached different decisions".into()))
                }
                (None, o) => outcome = o,
                _ => {}
            }
            stats = stats.merge(p.stats);
        }
        if outcome.is_none() {
            return Err(Error::Invariant("neither party produced a decision".into()));
        }
        transcript.outcome = outcome;
        transcript.stats = stats;
    }
    transcript.stats.promise = Some(instance.ground_truth);
    Ok(transcript)
}

/// Plays one side of `protocol` over `transport`, e.g. a TCP connection to
/// a peer process. The outcome is `None` when this side does not learn the
/// decision.
pub fn run_remote(
    protocol: &Protocol,
    role: Role,
    input: &BooleanFunction,
    params: &PartyParams,
    transport: Box<dyn Transport>,
) -> Result<Transcript> {
    let (result, log, counters) =
        play_logged(protocol, Endpoint::new(role, transport), input, params);
    let (fault, mut parties) = settle(vec![result])?;
    let mut transcript = Transcript {
        protocol: protocol.name(),
        n: params.n,
        epsilon: params.epsilon.clone(),
        omega: params.omega.clone(),
        outcome: None,
        messages: log,
        stats: Stats::default(),
        framing_bits: counters.framing_sent,
        fault,
    };
    if let Some(p) = parties.pop() {
        audit(
            &transcript.messages,
            counters.payload_sent + counters.payload_received,
        )?;
        transcript.outcome = p.outcome;
        transcript.stats = p.stats;
    }
    Ok(transcript)
}

pub fn run_deterministic(instance: &PromiseInstance, limits: &Limits) -> Result<Transcript> {
    run_local(&Protocol::Deterministic, instance, limits)
}

pub fn run_private_coin(
    instance: &PromiseInstance,
    seed_a: u64,
    seed_b: u64,
    limits: &Limits,
) -> Result<Transcript> {
    run_local(&Protocol::PrivateCoin { seed_a, seed_b }, instance, limits)
}

pub fn run_public_coin(
    instance: &PromiseInstance,
    seed: u64,
    rounds: usize,
    limits: &Limits,
) -> Result<Transcript> {
    run_local(&Protocol::PublicCoin { seed, rounds }, instance, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{generate, FunctionFamily, Sign};
    use crate::gf2::random_nonsingular;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn near(n: usize, seed: u64) -> PromiseInstance {
        let f = generate(&FunctionFamily::PlantedJunta { r: 2 }, n, seed).unwrap();
        let g = f.compose_linear(&random_nonsingular(n, seed + 1)).unwrap();
        PromiseInstance::new(f, g, q(0, 1), q(1, 4), &Limits::default()).unwrap()
    }

    fn const_vs_parity() -> PromiseInstance {
        let one = BooleanFunction::constant(3, Sign::Plus).unwrap();
        let chi = generate(&FunctionFamily::Parity(1), 3, 0).unwrap();
        PromiseInstance::new(one, chi, q(0, 1), q(1, 4), &Limits::default()).unwrap()
    }

    fn det_closed_form(t: &Transcript) -> u64 {
        let s = &t.stats;
        // Alice's ceiling is the one on the wire, whoever builds.
        let c = s.ceiling_a.unwrap();
        let (ell, count) = (s.ell.unwrap() as u64, s.samples.unwrap() as u64);
        (gamma_len(c) + 1 + gamma_len(ell + 1) + gamma_len(count)) as u64 + count * (ell + 1)
    }

    #[test]
    fn deterministic_accepts_isomorphic_and_counts_exactly() {
        let lim = Limits::default();
        for seed in 0..4 {
            let inst = near(3, seed);
            assert_eq!(inst.ground_truth, GroundTruth::Near);
            let t = run_deterministic(&inst, &lim).unwrap();
            assert_eq!(t.outcome, Some(Outcome::Accept));
            assert_eq!(t.total_bits(), det_closed_form(&t));
            assert_eq!(t.total_bits(), t.bits_a_to_b() + t.bits_b_to_a());
            assert_eq!(run_deterministic(&inst, &lim).unwrap(), t);
        }
    }

    #[test]
    fn deterministic_rejects_constant_vs_parity() {
        let inst = const_vs_parity();
        assert_eq!(inst.ground_truth, GroundTruth::Far);
        assert_eq!(inst.distance, Some(q(1, 2)));
        let t = run_deterministic(&inst, &Limits::default()).unwrap();
        assert_eq!(t.outcome, Some(Outcome::Reject));
        assert_eq!(t.total_bits(), det_closed_form(&t));
    }

    #[test]
    fn compare_ceilings_examples() {
        for (a, b, builder, bits) in [
            (5u64, 7u64, Role::Alice, 6),
            (3, 3, Role::Alice, 4),
            (7, 5, Role::Bob, 6),
        ] {
            let (ta, tb) = memory_pair();
            let (ra, rb, log) = thread::scope(|s| {
                let h = s.spawn(move || {
                    let mut ep = Endpoint::new(Role::Bob, Box::new(tb));
                    deterministic::compare_ceilings(&mut ep, b, &mut Stats::default()).unwrap()
                });
                let mut ep = Endpoint::new(Role::Alice, Box::new(ta));
                let ra = deterministic::compare_ceilings(&mut ep, a, &mut Stats::default()).unwrap();
                (ra, h.join().unwrap(), ep.into_log().0)
            });
            assert_eq!((ra, rb), (builder, builder));
            assert_eq!(log.iter().map(Message::len).sum::<usize>(), bits);
        }
    }

    #[test]
    fn private_coin_completeness_and_round_cost() {
        let lim = Limits::default();
        let inst = near(3, 7);
        for (sa, sb) in [(0, 0), (1, 2), (99, 5)] {
            let t = run_private_coin(&inst, sa, sb, &lim).unwrap();
            assert_eq!(t.outcome, Some(Outcome::Accept));
            let r = t.stats.r.unwrap() as u64;
            let rounds = t.stats.rounds.unwrap() as u64;
            assert_eq!(rounds, 8);
            let c = t.stats.ceiling_a.unwrap();
            let head = (gamma_len(c) + 1 + gamma_len(r + 1) + 1) as u64;
            assert_eq!(t.total_bits(), head + rounds * (r + 2));
        }
    }

    #[test]
    fn private_coin_rejects_far_pair() {
        let t = run_private_coin(&const_vs_parity(), 3, 4, &Limits::default()).unwrap();
        assert_eq!(t.outcome, Some(Outcome::Reject));
    }

    #[test]
    fn private_coin_needs_exact_promise() {
        let mut inst = near(3, 1);
        inst.epsilon = q(1, 8);
        assert!(matches!(
            run_private_coin(&inst, 0, 0, &Limits::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn public_coin_examples() {
        let lim = Limits::default();
        let inst = near(3, 2);
        let far = const_vs_parity();
        let mut rejected = 0;
        for seed in 0..200 {
            let t = run_public_coin(&inst, seed, 7, &lim).unwrap();
            assert_eq!(t.outcome, Some(Outcome::Accept));
            assert_eq!(t.total_bits(), 8);
            let t = run_public_coin(&far, seed, 7, &lim).unwrap();
            rejected += usize::from(t.outcome == Some(Outcome::Reject));
        }
        assert!(rejected >= 198, "rejected {rejected} of 200");
    }

    #[test]
    fn transcript_json_shape() {
        let t = run_public_coin(&const_vs_parity(), 1, 3, &Limits::default()).unwrap();
        let v = t.to_json();
        assert_eq!(v["protocol"], "public");
        assert_eq!(v["total_bits"], 4);
        assert_eq!(v["bits_a_to_b"], 3);
        assert_eq!(v["bits_b_to_a"], 1);
        assert_eq!(v["omega"], "1/4");
        assert_eq!(v["stats"]["promise"], "far");
        assert_eq!(v["messages"].as_array().unwrap().len(), 4);
        assert_eq!(v["messages"][3]["dir"], "B->A");
    }

    #[test]
    fn peer_fault_marks_transcript_invalid() {
        let inst = near(3, 0);
        let params = PartyParams::of(&inst, &Limits::default());
        let (ta, tb) = memory_pair();
        drop(tb);
        let t = run_remote(&Protocol::Deterministic, Role::Alice, &inst.f, &params, Box::new(ta))
            .unwrap();
        assert!(!t.is_valid());
        assert_eq!(t.outcome, None);
    }
}
