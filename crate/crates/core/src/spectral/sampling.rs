use num_traits::{Signed, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boolfn::{butterfly, disagreements, BooleanFunction, Sign};
use crate::error::{Error, Result};
use crate::gf2::GF2Vector;
use crate::limits::Limits;
use crate::Rational;

use super::{approx_spectral_norm, ApproxNormWitness};

/// Knobs of the spectral sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Constant `C` in `T = ceil(C ||h^||_1^2 ln(1/delta) / beta^2)`.
    pub constant: f64,
    /// Fresh sub-seeds tried before giving up.
    pub max_attempts: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            constant: 8.0,
            max_attempts: 64,
        }
    }
}

/// A multiset of signed characters defining
/// `F(x) = sign(sum_i a_i chi_{alpha_i}(x))`.
#[derive(Clone, Debug)]
pub struct SampledSignRepresentation {
    n: usize,
    samples: Vec<(GF2Vector, Sign)>,
    /// The certified sign function.
    pub function: BooleanFunction,
    /// Exact `delta(f, F)` reached by the accepted attempt.
    pub achieved: Rational,
    /// 1-based index of the accepted attempt.
    pub attempts: u64,
    /// `||h^||_1` of the LP witness the samples were drawn from.
    pub norm: Rational,
}

impl SampledSignRepresentation {
    pub fn new(n: usize, samples: Vec<(GF2Vector, Sign)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter(
                "a sign representation needs at least one sample".into(),
            ));
        }
        let function = sign_of_samples(n, &samples);
        Ok(SampledSignRepresentation {
            n,
            samples,
            function,
            achieved: Rational::zero(),
            attempts: 0,
            norm: Rational::zero(),
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[(GF2Vector, Sign)] {
        &self.samples
    }

    /// Number of samples `T`.
    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Distinct characters in order of first appearance.
    pub fn distinct_characters(&self) -> Vec<GF2Vector> {
        let mut seen = vec![false; 1 << self.n];
        self.samples
            .iter()
            .filter(|(a, _)| !std::mem::replace(&mut seen[a.bits() as usize], true))
            .map(|(a, _)| *a)
            .collect()
    }
}

/// Evaluates `sign(sum a_i chi_{alpha_i})` with the `sign(0) = +1` rule.
pub(crate) fn sign_of_samples(n: usize, samples: &[(GF2Vector, Sign)]) -> BooleanFunction {
    let mut acc = vec![0i64; 1 << n];
    for (alpha, a) in samples {
        acc[alpha.bits() as usize] += a.value();
    }
    butterfly(&mut acc);
    BooleanFunction::from_fn(n, |x| Sign::of_i64(acc[x as usize])).expect("arity checked")
}

/// Approximates `f` by the sign of an empirical sum of characters drawn with
/// probability proportional to `|h^(alpha)|`, where `h` is the optimizer of
/// the gamma-approximate spectral norm LP.
///
/// The result is checked exactly: `delta(f, F) <= target_delta` holds for the
/// returned representation. Attempts that miss are redrawn from a fresh
/// stream of the same seed.
pub fn bs_sample(
    f: &BooleanFunction,
    gamma: &Rational,
    target_delta: &Rational,
    seed: u64,
    limits: &Limits,
) -> Result<SampledSignRepresentation> {
    let witness = approx_spectral_norm(f, gamma, limits)?;
    bs_sample_with(f, &witness, target_delta, seed, &SamplerConfig::default())
}

/// [`bs_sample`] starting from an already solved LP.
pub fn bs_sample_with(
    f: &BooleanFunction,
    witness: &ApproxNormWitness,
    target_delta: &Rational,
    seed: u64,
    config: &SamplerConfig,
) -> Result<SampledSignRepresentation> {
    if !target_delta.is_positive() || *target_delta >= Rational::from_integer(1.into()) {
        return Err(Error::InvalidParameter(format!(
            "target delta must lie in (0, 1), got {target_delta}"
        )));
    }
    let n = f.arity();
    let spectrum = witness.spectrum();
    let norm = spectrum.l1_norm();
    let count = sample_count(&norm, &witness.gamma, target_delta, config.constant);

    let support: Vec<(GF2Vector, Sign, f64)> = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(a, c)| {
            (
                GF2Vector::new(n, a as u32).expect("index fits arity"),
                Sign::of_rational(c),
                c.abs().to_f64().unwrap_or(0.0),
            )
        })
        .collect();
    let dist = WeightedIndex::new(support.iter().map(|s| s.2))
        .map_err(|e| Error::Invariant(format!("sampling distribution: {e}")))?;

    let size = Rational::from_integer((1u64 << n).into());
    let allowed = (target_delta * &size).floor().to_integer();
    let mut best: Option<u64> = None;
    for attempt in 0..config.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let samples: Vec<(GF2Vector, Sign)> = (0..count)
            .map(|_| {
                let (alpha, a, _) = support[dist.sample(&mut rng)];
                (alpha, a)
            })
            .collect();
        let function = sign_of_samples(n, &samples);
        let missed = disagreements(f, &function)?;
        best = Some(best.map_or(missed, |b| b.min(missed)));
        if num_bigint::BigInt::from(missed) <= allowed {
            return Ok(SampledSignRepresentation {
                n,
                samples,
                function,
                achieved: Rational::from_integer(missed.into()) / &size,
                attempts: attempt + 1,
                norm,
            });
        }
    }
    Err(Error::SamplingFailed {
        attempts: config.max_attempts as usize,
        best: (Rational::from_integer(best.unwrap_or(0).into()) / size).to_string(),
        target: target_delta.to_string(),
    })
}

/// `T = ceil(C ||h^||_1^2 ln(1/delta) / beta^2)` with `beta = (1 - gamma)/10`,
/// at least one.
pub fn sample_count(norm: &Rational, gamma: &Rational, delta: &Rational, constant: f64) -> usize {
    let norm = norm.to_f64().unwrap_or(f64::INFINITY);
    let beta = (1.0 - gamma.to_f64().unwrap_or(0.0)) / 10.0;
    let log = (1.0 / delta.to_f64().unwrap_or(1.0)).ln();
    let t = (constant * norm * norm * log / (beta * beta)).ceil();
    (t as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{generate, FunctionFamily};
    use crate::spectral::spectral_norm;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn parity_samples_only_its_character() {
        let chi = generate(&FunctionFamily::Parity(0b110), 3, 0).unwrap();
        let rep = bs_sample(&chi, &q(1, 3), &q(1, 16), 5, &Limits::default()).unwrap();
        assert!(rep.samples().iter().all(|(a, s)| a.bits() == 0b110 && *s == Sign::Plus));
        assert_eq!(rep.function, chi);
        assert!(rep.achieved.is_zero());
        assert_eq!(rep.norm, q(2, 3));
    }

    #[test]
    fn constant_function() {
        let one = BooleanFunction::constant(3, Sign::Plus).unwrap();
        let rep = bs_sample(&one, &q(1, 3), &q(1, 8), 1, &Limits::default()).unwrap();
        assert_eq!(rep.distinct_characters(), vec![GF2Vector::zero(3)]);
        assert_eq!(rep.function, one);
    }

    #[test]
    fn and2_is_reproduced_exactly() {
        let and2 = BooleanFunction::from_signs(2, &[1, 1, 1, -1]).unwrap();
        let rep = bs_sample(&and2, &q(1, 3), &q(1, 16), 42, &Limits::default()).unwrap();
        assert_eq!(rep.function, and2);
        assert_eq!(sign_of_samples(2, rep.samples()), rep.function);
    }

    #[test]
    fn sample_count_formula() {
        // 8 * 1 * ln 2 / (1/10)^2 = 554.5...
        assert_eq!(sample_count(&q(1, 1), &q(0, 1), &q(1, 2), 8.0), 555);
        let chi = generate(&FunctionFamily::Parity(1), 2, 0).unwrap();
        assert_eq!(spectral_norm(&chi), q(1, 1));
    }

    #[test]
    fn too_small_constant_fails_loudly() {
        let f = generate(&FunctionFamily::BentInnerProduct, 4, 0).unwrap();
        let w = approx_spectral_norm(&f, &q(1, 3), &Limits::default()).unwrap();
        let config = SamplerConfig {
            constant: 1e-6,
            max_attempts: 3,
        };
        match bs_sample_with(&f, &w, &q(1, 64), 0, &config) {
            Err(Error::SamplingFailed { attempts: 3, .. }) => {}
            other => panic!("expected a sampling failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_delta() {
        let f = BooleanFunction::constant(2, Sign::Plus).unwrap();
        assert!(bs_sample(&f, &q(1, 3), &q(0, 1), 0, &Limits::default()).is_err());
        assert!(bs_sample(&f, &q(1, 3), &q(1, 1), 0, &Limits::default()).is_err());
    }
}
