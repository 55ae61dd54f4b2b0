//! Deterministic protocol: the party with the smaller approximate spectral
//! norm sends a short sign representation of its function, and the other
//! party measures its linear distance to that representation.

use crate::boolfn::{BooleanFunction, Sign};
use crate::error::{Error, Result};
use crate::gf2::{extend_to_basis, GF2Vector};
use crate::lindist::linear_distance;
use crate::spectral::{
    approx_spectral_norm, bs_sample_with, sign_of_samples, ApproxNormWitness, SamplerConfig,
};
use crate::Rational;

use super::bits::{BitReader, BitWriter};
use super::channel::{Endpoint, Role};
use super::transcript::{Outcome, Stats};
use super::{one_third, PartyParams, PartyResult};

/// Alice sends `gamma(ceil t_A)`; Bob replies `1` iff `ceil t_B < ceil t_A`,
/// in which case Bob builds. Ties go to Alice.
pub(crate) fn compare_ceilings(ep: &mut Endpoint, own: u64, stats: &mut Stats) -> Result<Role> {
    match ep.role() {
        Role::Alice => {
            stats.ceiling_a = Some(own);
            let mut w = BitWriter::new();
            w.gamma(own)?;
            ep.send(w.finish())?;
            Ok(if ep.recv_bit()? { Role::Bob } else { Role::Alice })
        }
        Role::Bob => {
            stats.ceiling_b = Some(own);
            let msg = ep.recv()?;
            let mut rd = BitReader::new(&msg);
            let theirs = rd.gamma()?;
            rd.finish()?;
            stats.ceiling_a = Some(theirs);
            let swap = own < theirs;
            ep.send_bit(swap)?;
            Ok(if swap { Role::Bob } else { Role::Alice })
        }
    }
}

pub(crate) fn play(
    ep: &mut Endpoint,
    f: &BooleanFunction,
    params: &PartyParams,
) -> Result<PartyResult> {
    let witness = approx_spectral_norm(f, &one_third(), &params.limits)?;
    let mut stats = Stats::default();
    let builder = compare_ceilings(ep, witness.ceiling(), &mut stats)?;
    stats.builder = Some(builder);
    let outcome = if builder == ep.role() {
        build(ep, f, &witness, params, &mut stats)?;
        None
    } else {
        Some(receive(ep, f, params, &mut stats)?)
    };
    Ok(PartyResult { outcome, stats })
}

/// Message: `gamma(ell + 1) || gamma(T) || T x [ell-bit rotated character || sign]`.
fn build(
    ep: &mut Endpoint,
    f: &BooleanFunction,
    witness: &ApproxNormWitness,
    params: &PartyParams,
    stats: &mut Stats,
) -> Result<()> {
    let n = f.arity();
    let delta = &params.omega / Rational::from_integer(4.into());
    let rep = bs_sample_with(f, witness, &delta, f.checksum(), &SamplerConfig::default())?;
    let (r, ell) = extend_to_basis(n, &rep.distinct_characters())?;

    let mut w = BitWriter::new();
    w.gamma(ell as u64 + 1)?.gamma(rep.count() as u64)?;
    for (alpha, a) in rep.samples() {
        let rotated = r.apply(alpha.bits());
        if rotated >> ell != 0 {
            return Err(Error::Invariant(format!(
                "character {alpha} rotates outside the first {ell} coordinates"
            )));
        }
        w.uint(u64::from(rotated), ell).bit(a.bit());
    }
    stats.ell = Some(ell);
    stats.samples = Some(rep.count());
    stats.sampler_attempts = Some(rep.attempts);
    stats.sample_distance = Some(rep.achieved.to_string());
    ep.send(w.finish())
}

fn receive(
    ep: &mut Endpoint,
    g: &BooleanFunction,
    params: &PartyParams,
    stats: &mut Stats,
) -> Result<Outcome> {
    let n = g.arity();
    let msg = ep.recv()?;
    let mut rd = BitReader::new(&msg);
    let ell = (rd.gamma()? - 1) as usize;
    if ell > n {
        return Err(Error::Protocol(format!("builder claims {ell} > n = {n} coordinates")));
    }
    let count = rd.gamma()?;
    if count > msg.len() as u64 {
        return Err(Error::Protocol(format!(
            "{count} samples cannot fit in a {}-bit message",
            msg.len()
        )));
    }
    let samples = (0..count)
        .map(|_| {
            let alpha = GF2Vector::new(ell, rd.uint(ell)? as u32)?;
            Ok((alpha, Sign::from_bit(rd.bit()?)))
        })
        .collect::<Result<Vec<_>>>()?;
    rd.finish()?;

    let rebuilt = sign_of_samples(ell, &samples).lift(n)?;
    let d = linear_distance(&rebuilt, g, &params.limits)?.value;
    let threshold = &params.epsilon + &params.omega / Rational::from_integer(2.into());
    stats.ell = Some(ell);
    stats.samples = Some(count as usize);
    stats.received_distance = Some(d.to_string());
    Ok(Outcome::from_accept(d <= threshold))
}
