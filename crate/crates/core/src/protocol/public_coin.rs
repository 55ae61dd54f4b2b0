//! Public-coin baseline: both parties canonicalize and compare random
//! parities of the canonical truth tables.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::BooleanFunction;
use crate::error::Result;
use crate::lindist::canonical_form;

use super::channel::{Endpoint, Role};
use super::private_coin::require_exact;
use super::transcript::{Outcome, Stats};
use super::{PartyParams, PartyResult};

/// `<table, mask>` over F2 for the shared mask of `round`.
pub fn shared_parity(table: &BooleanFunction, seed: u64, round: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    let ones: u32 = table
        .words()
        .iter()
        .map(|w| (w & rng.next_u64()).count_ones())
        .sum();
    ones % 2 == 1
}

pub(crate) fn play(
    ep: &mut Endpoint,
    f: &BooleanFunction,
    params: &PartyParams,
    seed: u64,
    rounds: usize,
) -> Result<PartyResult> {
    require_exact(&params.epsilon)?;
    let (canon, _) = canonical_form(f, &params.limits)?;
    let mut mismatch = false;
    for round in 0..rounds {
        let mine = shared_parity(&canon, seed, round as u64);
        match ep.role() {
            Role::Alice => ep.send_bit(mine)?,
            Role::Bob => mismatch |= ep.recv_bit()? != mine,
        }
    }
    let reject = match ep.role() {
        Role::Alice => ep.recv_bit()?,
        Role::Bob => {
            ep.send_bit(mismatch)?;
            mismatch
        }
    };
    Ok(PartyResult {
        outcome: Some(Outcome::from_accept(!reject)),
        stats: Stats {
            rounds: Some(rounds),
            ..Stats::default()
        },
    })
}
