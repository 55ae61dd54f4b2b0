//! Lower-bound machinery: entropy and ball counting, the greedy Φ-map that
//! sends bit strings to pairwise linearly far truth tables, and the
//! reduction from equality testing to the linear isomorphism promise problem.
//!
//! Truth tables on `ell <= 4` variables are identified with integers whose
//! bit `x` is the stored bit `b(x)` (see [`BooleanFunction::index`]).

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::gf2::{enumerate_gl, GF2Vector};
use crate::limits::Limits;
use crate::lindist::linear_distance;
use crate::protocol::{run_local, PromiseInstance, GroundTruth, Protocol};
use crate::Rational;

/// `-w log2 w - (1-w) log2(1-w)`, with `0 log 0 = 0`.
pub fn binary_entropy(omega: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::InvalidParameter(format!(
            "entropy argument must lie in [0, 1], got {omega}"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(omega) + term(1.0 - omega))
}

/// `sum_{i <= radius} C(length, i)`; a radius above `length` counts the
/// whole space.
pub fn hamming_ball_size(length: u64, radius: u64) -> BigUint {
    let mut binom = BigUint::one();
    let mut total = BigUint::one();
    for i in 0..radius.min(length) {
        binom = binom * (length - i) / (i + 1);
        total += &binom;
    }
    total
}

/// `log2(2^{r^2} 2^{H(omega) 2^r})`, the counting-lemma bound on `|L(f, omega)|`.
pub fn ball_bound_log2(r: usize, omega: f64) -> Result<f64> {
    Ok((r * r) as f64 + binary_entropy(omega)? * (1u64 << r) as f64)
}

/// A dense set of truth tables on `r` variables.
#[derive(Clone, PartialEq, Eq)]
pub struct TableSet {
    r: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for TableSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TableSet(r={}, {} tables)", self.r, self.len())
    }
}

impl TableSet {
    fn universe_size(r: usize) -> usize {
        1usize << (1usize << r)
    }

    pub fn empty(r: usize) -> Self {
        TableSet {
            r,
            words: vec![0; Self::universe_size(r).div_ceil(64)],
        }
    }

    /// Every table on `r` variables.
    pub fn full(r: usize) -> Self {
        let mut s = Self::empty(r);
        let size = Self::universe_size(r);
        for (i, w) in s.words.iter_mut().enumerate() {
            let valid = (size - i * 64).min(64);
            *w = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn insert(&mut self, table: u64) {
        self.words[(table / 64) as usize] |= 1 << (table % 64);
    }

    pub fn contains(&self, table: u64) -> bool {
        (table as usize) < Self::universe_size(self.r)
            && self.words[(table / 64) as usize] >> (table % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member.
    pub fn first(&self) -> Option<u64> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| i as u64 * 64 + u64::from(self.words[i].trailing_zeros()))
    }

    pub fn remove_all(&mut self, other: &TableSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| i as u64 * 64 + b)
        })
    }
}

fn check_fraction(omega: &Rational) -> Result<()> {
    if omega.is_negative() || *omega > Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "omega must lie in [0, 1], got {omega}"
        )));
    }
    Ok(())
}

/// `floor(omega 2^r)`.
pub fn ball_radius(r: usize, omega: &Rational) -> u32 {
    (omega * Rational::from_integer((1u64 << r).into()))
        .floor()
        .to_integer()
        .to_u32()
        .expect("radius is at most 2^r")
}

/// `L(f, omega) = { g : delta_L(f, g) <= omega }`, built as the union of the
/// radius `floor(omega 2^r)` Hamming balls around the GL_r orbit of `f`.
pub fn liniso_ball(f: &BooleanFunction, omega: &Rational, limits: &Limits) -> Result<TableSet> {
    check_fraction(omega)?;
    let r = f.arity();
    limits.check_ball(r)?;
    let mut orbit = TableSet::empty(r);
    for m in enumerate_gl(r, limits)? {
        let image = f.compose_linear(&m)?;
        orbit.insert(image.index().expect("ball guard keeps r <= 6"));
    }
    let radius = ball_radius(r, omega);
    let len = 1u32 << r;
    let flips: Vec<u64> = (0..1u64 << len)
        .filter(|u| u.count_ones() <= radius)
        .collect();
    let mut ball = TableSet::empty(r);
    for t in orbit.iter() {
        for &u in &flips {
            ball.insert(t ^ u);
        }
    }
    Ok(ball)
}

/// Smallest `ell <= 32` with `2^ell (1 - H(omega)) - ell^2 >= n`, as
/// `(m, ell)` with `m = 2^ell`; `None` if no such `ell` exists.
pub fn choose_m(n: u64, omega: &Rational) -> Result<Option<(u64, usize)>> {
    let half = Rational::new(1.into(), 2.into());
    if !omega.is_positive() || *omega >= half {
        return Err(Error::InvalidParameter(format!(
            "omega must lie in (0, 1/2), got {omega}"
        )));
    }
    let h = binary_entropy(omega.to_f64().unwrap_or(f64::NAN))?;
    Ok((0..=32usize)
        .find(|&ell| {
            let m = (1u64 << ell) as f64;
            m - (ell * ell) as f64 - h * m >= n as f64
        })
        .map(|ell| (1u64 << ell, ell)))
}

/// An injective map from `F2^n` to truth tables on `ell` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMap {
    pub n: usize,
    pub ell: usize,
    pub omega: Rational,
    images: Vec<BooleanFunction>,
}

impl PhiMap {
    /// Wraps a hand-made table (one image per input, in input order).
    pub fn from_images(n: usize, omega: Rational, images: Vec<BooleanFunction>) -> Result<Self> {
        if images.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: images.len(),
            });
        }
        let ell = images[0].arity();
        if let Some(bad) = images.iter().find(|f| f.arity() != ell) {
            return Err(Error::DimensionMismatch {
                expected: ell,
                found: bad.arity(),
            });
        }
        Ok(PhiMap {
            n,
            ell,
            omega,
            images,
        })
    }

    /// `2^ell`.
    pub fn m(&self) -> u64 {
        1 << self.ell
    }

    pub fn image(&self, a: &GF2Vector) -> Result<&BooleanFunction> {
        if a.arity() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.arity(),
            });
        }
        Ok(&self.images[a.bits() as usize])
    }

    pub fn images(&self) -> &[BooleanFunction] {
        &self.images
    }

    /// Lines `a_hex -> table_hex`, with `a` printed as an integer.
    pub fn to_text(&self) -> String {
        let width = self.n.div_ceil(4).max(1);
        self.images
            .iter()
            .enumerate()
            .map(|(a, f)| format!("{a:0width$x} -> {}\n", crate::format::table_hex(f)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiConstruction {
    Success(PhiMap),
    /// The admissible set ran out after `assigned` inputs.
    Fail { assigned: usize },
}

/// Greedy construction: inputs in ascending order each take the smallest
/// remaining table, whose linear-distance ball is then removed.
pub fn construct_phi(
    n: usize,
    ell: usize,
    omega: &Rational,
    limits: &Limits,
) -> Result<PhiConstruction> {
    check_fraction(omega)?;
    limits.check_ball(ell)?;
    if n > 1 << ell {
        return Ok(PhiConstruction::Fail { assigned: 0 });
    }
    let mut remaining = TableSet::full(ell);
    let mut images = Vec::with_capacity(1 << n);
    for assigned in 0..1usize << n {
        let Some(y) = remaining.first() else {
            return Ok(PhiConstruction::Fail { assigned });
        };
        let f = BooleanFunction::from_index(ell, y)?;
        remaining.remove_all(&liniso_ball(&f, omega, limits)?);
        images.push(f);
    }
    Ok(PhiConstruction::Success(PhiMap {
        n,
        ell,
        omega: omega.clone(),
        images,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiReport {
    pub pairs_checked: usize,
    /// Smallest pairwise `delta_L` and the first pair attaining it.
    pub min_distance: Option<(Rational, u64, u64)>,
    /// First pair closer than omega.
    pub violation: Option<(u64, u64)>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl std::fmt::Display for PhiReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "pairs_checked = {}", self.pairs_checked)?;
        if let Some((d, a, b)) = &self.min_distance {
            writeln!(f, "min_distance = {d} (inputs {a:x}, {b:x})")?;
        }
        match self.violation {
            None => writeln!(f, "verify = pass"),
            Some((a, b)) => writeln!(f, "verify = FAIL (inputs {a:x}, {b:x})"),
        }
    }
}

/// Checks `delta_L >= omega` over all unordered pairs of images.
pub fn verify_phi(phi: &PhiMap, limits: &Limits) -> Result<PhiReport> {
    let mut report = PhiReport {
        pairs_checked: 0,
        min_distance: None,
        violation: None,
    };
    for (a, fa) in phi.images.iter().enumerate() {
        for (b, fb) in phi.images.iter().enumerate().skip(a + 1) {
            let d = linear_distance(fa, fb, limits)?.value;
            report.pairs_checked += 1;
            if d < phi.omega && report.violation.is_none() {
                report.violation = Some((a as u64, b as u64));
            }
            if report.min_distance.as_ref().map_or(true, |(m, _, _)| d < *m) {
                report.min_distance = Some((d, a as u64, b as u64));
            }
        }
    }
    Ok(report)
}

/// Decides the promise "`delta_L(f, g) = 0` or `delta_L(f, g) > omega`";
/// `true` means the first case.
pub trait LinIsoOracle {
    fn decide(&mut self, f: &BooleanFunction, g: &BooleanFunction, omega: &Rational) -> Result<bool>;
}

/// Exhaustive linear distance.
pub struct ExactOracle {
    pub limits: Limits,
}

impl LinIsoOracle for ExactOracle {
    fn decide(&mut self, f: &BooleanFunction, g: &BooleanFunction, _: &Rational) -> Result<bool> {
        Ok(linear_distance(f, g, &self.limits)?.value.is_zero())
    }
}

/// A protocol run with `epsilon = 0`. Randomized protocols advance their
/// seeds after every call so repeated queries use fresh coins.
pub struct ProtocolOracle {
    pub protocol: Protocol,
    pub limits: Limits,
}

impl LinIsoOracle for ProtocolOracle {
    fn decide(&mut self, f: &BooleanFunction, g: &BooleanFunction, omega: &Rational) -> Result<bool> {
        let instance = PromiseInstance::labeled(
            f.clone(),
            g.clone(),
            Rational::zero(),
            omega.clone(),
            GroundTruth::Unknown,
        )?;
        let transcript = run_local(&self.protocol, &instance, &self.limits)?;
        self.protocol = match self.protocol {
            Protocol::Deterministic => Protocol::Deterministic,
            Protocol::PrivateCoin { seed_a, seed_b } => Protocol::PrivateCoin {
                seed_a: seed_a.wrapping_add(1),
                seed_b: seed_b.wrapping_add(1),
            },
            Protocol::PublicCoin { seed, rounds } => Protocol::PublicCoin {
                seed: seed.wrapping_add(1),
                rounds,
            },
        };
        match transcript.fault {
            Some(fault) => Err(Error::Protocol(fault)),
            None => Ok(transcript.is_accept()),
        }
    }
}

/// Answers "is `a = b`?" by asking the oracle about `f_Φ(a)` and `f_Φ(b)`.
pub fn reduce_equ(
    a: &GF2Vector,
    b: &GF2Vector,
    phi: &PhiMap,
    oracle: &mut dyn LinIsoOracle,
) -> Result<bool> {
    oracle.decide(phi.image(a)?, phi.image(b)?, &phi.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{generate, FunctionFamily};
    use crate::gf2::random_nonsingular;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811278).abs() < 1e-6);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn hamming_ball_examples() {
        assert_eq!(hamming_ball_size(16, 0), BigUint::from(1u32));
        assert_eq!(hamming_ball_size(16, 1), BigUint::from(17u32));
        assert_eq!(hamming_ball_size(16, 2), BigUint::from(137u32));
        assert_eq!(hamming_ball_size(16, 16), BigUint::from(65536u32));
        assert_eq!(hamming_ball_size(200, 200), BigUint::one() << 200);
    }

    #[test]
    fn parity_ball_matches_brute_force() {
        // Three parities at pairwise Hamming distance 2: their radius-1 balls
        // overlap, so the union has 10 tables, not 3 * 5.
        let lim = Limits::default();
        let chi = generate(&FunctionFamily::Parity(1), 2, 0).unwrap();
        let ball = liniso_ball(&chi, &q(1, 4), &lim).unwrap();
        assert_eq!(ball.len(), 10);
        let brute = (0..16u64)
            .filter(|&t| {
                let g = BooleanFunction::from_index(2, t).unwrap();
                linear_distance(&chi, &g, &lim).unwrap().value <= q(1, 4)
            })
            .count();
        assert_eq!(brute, 10);
        assert_eq!(hamming_ball_size(4, 1), BigUint::from(5u32));
    }

    #[test]
    fn radius_zero_ball_is_the_orbit() {
        let lim = Limits::default();
        let f = generate(&FunctionFamily::UniformRandom, 3, 4).unwrap();
        let ball = liniso_ball(&f, &q(1, 16), &lim).unwrap();
        let mut orbit = TableSet::empty(3);
        for m in enumerate_gl(3, &lim).unwrap() {
            orbit.insert(f.compose_linear(&m).unwrap().index().unwrap());
        }
        assert_eq!(ball, orbit);
    }

    #[test]
    fn ball_contains_orbit_neighbourhoods() {
        let lim = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..5 {
            let f = generate(&FunctionFamily::UniformRandom, 3, seed).unwrap();
            let ball = liniso_ball(&f, &q(1, 4), &lim).unwrap();
            for _ in 0..20 {
                let image = f.compose_linear(&random_nonsingular(3, rng.random())).unwrap();
                let t = image.index().unwrap();
                assert!(ball.contains(t));
                assert!(ball.contains(t ^ (1 << rng.random_range(0..8))));
                assert!(ball.contains(t ^ 0b1000_0001));
            }
            for t in ball.iter().step_by(7) {
                let g = BooleanFunction::from_index(3, t).unwrap();
                assert!(linear_distance(&f, &g, &lim).unwrap().value <= q(1, 4));
            }
        }
    }

    #[test]
    fn ball_guard() {
        let f = generate(&FunctionFamily::UniformRandom, 5, 0).unwrap();
        assert!(matches!(
            liniso_ball(&f, &q(1, 4), &Limits::default()),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(1, &q(1, 4)).unwrap(), Some((512, 9)));
        let mut last = 0;
        for omega in [q(1, 8), q(1, 4), q(1, 3), q(2, 5), q(9, 20)] {
            let (m, ell) = choose_m(10, &omega).unwrap().unwrap();
            let h = binary_entropy(omega.to_f64().unwrap()).unwrap();
            assert!(m as f64 - (ell * ell) as f64 - h * m as f64 >= 10.0);
            assert!(m >= last);
            last = m;
        }
        assert!(choose_m(1, &q(1, 2)).is_err());
    }

    #[test]
    fn construct_small_maps() {
        let lim = Limits::default();
        let PhiConstruction::Success(phi) = construct_phi(1, 2, &q(1, 4), &lim).unwrap() else {
            panic!("construction failed");
        };
        let report = verify_phi(&phi, &lim).unwrap();
        assert!(report.passed());
        assert!(report.min_distance.unwrap().0 >= q(1, 4));
        assert_eq!(construct_phi(5, 2, &q(1, 4), &lim).unwrap(), PhiConstruction::Fail { assigned: 0 });
        assert!(matches!(
            construct_phi(3, 1, &q(1, 4), &lim).unwrap(),
            PhiConstruction::Fail { .. }
        ));
        assert_eq!(construct_phi(1, 2, &q(1, 4), &lim).unwrap(), PhiConstruction::Success(phi));
    }

    #[test]
    fn verify_catches_isomorphic_images() {
        let lim = Limits::default();
        let a = generate(&FunctionFamily::Parity(1), 2, 0).unwrap();
        let b = generate(&FunctionFamily::Parity(2), 2, 0).unwrap();
        let phi = PhiMap::from_images(1, q(1, 4), vec![a, b]).unwrap();
        let report = verify_phi(&phi, &lim).unwrap();
        assert_eq!(report.violation, Some((0, 1)));
        assert_eq!(report.min_distance.unwrap().0, q(0, 1));
    }

    #[test]
    fn reduction_with_exact_oracle() {
        let lim = Limits::default();
        let PhiConstruction::Success(phi) = construct_phi(1, 2, &q(1, 4), &lim).unwrap() else {
            panic!("construction failed");
        };
        let mut oracle = ExactOracle { limits: lim };
        for a in 0..2 {
            for b in 0..2 {
                let (va, vb) = (GF2Vector::new(1, a).unwrap(), GF2Vector::new(1, b).unwrap());
                assert_eq!(reduce_equ(&va, &vb, &phi, &mut oracle).unwrap(), a == b);
            }
        }
        assert_eq!(phi.to_text().lines().count(), 2);
    }
}
