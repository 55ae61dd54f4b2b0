//! Private-coin protocol for `epsilon = 0`: both parties reduce their inputs
//! to canonical juntas and Alice spot-checks hers against Bob's on random
//! points.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::lindist::canonical_form;
use crate::spectral::{approx_spectral_norm, junta_approximation_with};
use crate::Rational;

use super::bits::{BitReader, BitWriter};
use super::channel::{Endpoint, Role};
use super::transcript::{Outcome, Stats};
use super::{one_third, PartyParams, PartyResult};

/// `ceil(2 / omega)`.
pub fn round_budget(omega: &Rational) -> usize {
    let k = (Rational::from_integer(2.into()) / omega).ceil().to_integer();
    usize::try_from(k).expect("omega is a sane fraction")
}

pub(crate) fn require_exact(epsilon: &Rational) -> Result<()> {
    if epsilon.is_zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "this protocol decides the epsilon = 0 promise only, got epsilon = {epsilon}"
        )))
    }
}

/// Alice sends `gamma(value)`; Bob replies `1` on mismatch. Returns whether
/// both sides hold the same value.
fn check_equal(ep: &mut Endpoint, value: u64) -> Result<bool> {
    match ep.role() {
        Role::Alice => {
            let mut w = BitWriter::new();
            w.gamma(value)?;
            ep.send(w.finish())?;
            Ok(!ep.recv_bit()?)
        }
        Role::Bob => {
            let msg = ep.recv()?;
            let mut rd = BitReader::new(&msg);
            let theirs = rd.gamma()?;
            rd.finish()?;
            let mismatch = theirs != value;
            ep.send_bit(mismatch)?;
            Ok(!mismatch)
        }
    }
}

pub(crate) fn play(
    ep: &mut Endpoint,
    f: &BooleanFunction,
    params: &PartyParams,
    seed: u64,
) -> Result<PartyResult> {
    require_exact(&params.epsilon)?;
    let mut stats = Stats::default();
    let reject = |stats| {
        Ok(PartyResult {
            outcome: Some(Outcome::Reject),
            stats,
        })
    };

    let (canon, _) = canonical_form(f, &params.limits)?;
    let witness = approx_spectral_norm(&canon, &one_third(), &params.limits)?;
    let c = witness.ceiling();
    match ep.role() {
        Role::Alice => stats.ceiling_a = Some(c),
        Role::Bob => stats.ceiling_b = Some(c),
    }
    if !check_equal(ep, c)? {
        return reject(stats);
    }

    let junta = junta_approximation_with(&canon, &witness, &params.omega)?;
    stats.r = Some(junta.r);
    if !check_equal(ep, junta.r as u64 + 1)? {
        return reject(stats);
    }
    let (core, _) = canonical_form(&junta.core, &params.limits)?;
    let r = junta.r;

    let budget = round_budget(&params.omega);
    stats.rounds_budget = Some(budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 1..=budget {
        stats.rounds = Some(round);
        let mismatch = match ep.role() {
            Role::Alice => {
                let x = rng.random_range(0..1u64 << r);
                let mut w = BitWriter::new();
                w.uint(x, r).bit(core.bit(x as usize));
                ep.send(w.finish())?;
                ep.recv_bit()?
            }
            Role::Bob => {
                let msg = ep.recv()?;
                let mut rd = BitReader::new(&msg);
                let x = rd.uint(r)? as usize;
                let value = rd.bit()?;
                rd.finish()?;
                let mismatch = core.bit(x) != value;
                ep.send_bit(mismatch)?;
                mismatch
            }
        };
        if mismatch {
            return reject(stats);
        }
    }
    Ok(PartyResult {
        outcome: Some(Outcome::Accept),
        stats,
    })
}
