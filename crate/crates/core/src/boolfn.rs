//! Boolean functions `F2^n -> {-1,+1}`, real-valued functions on the cube,
//! and the Walsh-Hadamard transform between point and Fourier sides.
//!
//! Truth tables are indexed by the integer encoding of `x` (with `x_1` as the
//! least-significant bit) and store one bit `b` per point, meaning
//! `f(x) = (-1)^b`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{check_dim, Error, Result};
use crate::gf2::{self, GF2Matrix, GF2Vector};
use crate::Rational;

/// Largest arity accepted for a truth table; also the transform guard.
pub const MAX_FUNCTION_ARITY: usize = 16;

/// A value in `{-1, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^bit`.
    pub fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `+1` for nonnegative input, `-1` otherwise.
    pub fn of_i64(v: i64) -> Sign {
        Sign::from_bit(v < 0)
    }

    pub fn of_rational(v: &Rational) -> Sign {
        Sign::from_bit(v.is_negative())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::from_bit(!self.bit())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n > MAX_FUNCTION_ARITY {
        return Err(Error::GuardExceeded {
            what: "truth table",
            n,
            guard: MAX_FUNCTION_ARITY,
            estimate: format!("2^{n} table entries"),
        });
    }
    Ok(())
}

/// Bit-packed truth table of a function `F2^n -> {-1,+1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, crate::format::table_hex(self))
    }
}

impl BooleanFunction {
    pub fn constant(n: usize, value: Sign) -> Result<Self> {
        check_arity(n)?;
        let mut f = BooleanFunction {
            n,
            words: vec![0; Self::word_count(n)],
        };
        if value == Sign::Minus {
            for x in 0..f.len() {
                f.set(x, Sign::Minus);
            }
        }
        Ok(f)
    }

    pub fn from_fn(n: usize, mut value: impl FnMut(u32) -> Sign) -> Result<Self> {
        let mut f = Self::constant(n, Sign::Plus)?;
        for x in 0..f.len() {
            f.set(x, value(x as u32));
        }
        Ok(f)
    }

    /// Table from stored bits `b(0), b(1), ...`.
    pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self> {
        check_dim(1 << n.min(MAX_FUNCTION_ARITY + 1), bits.len())?;
        Self::from_fn(n, |x| Sign::from_bit(bits[x as usize]))
    }

    /// Table from signs listed in index order.
    pub fn from_signs(n: usize, signs: &[i8]) -> Result<Self> {
        check_dim(1 << n.min(MAX_FUNCTION_ARITY + 1), signs.len())?;
        Self::from_fn(n, |x| Sign::of_i64(signs[x as usize].into()))
    }

    /// Table whose bit `b(x)` is bit `x` of `index`; requires `2^n <= 64`.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::InvalidParameter(format!(
                "table index form needs n <= 6, got {n}"
            )));
        }
        let len = 1u32 << n;
        if len < 64 && index >> len != 0 {
            return Err(Error::InvalidParameter(format!(
                "table index {index:#x} does not fit 2^{n} entries"
            )));
        }
        Ok(BooleanFunction {
            n,
            words: vec![index],
        })
    }

    /// Inverse of [`BooleanFunction::from_index`].
    pub fn index(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    fn word_count(n: usize) -> usize {
        ((1usize << n) + 63) / 64
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Number of table entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, x: usize) -> Sign {
        Sign::from_bit(self.bit(x))
    }

    #[inline]
    pub fn value(&self, x: usize) -> i64 {
        self.sign(x).value()
    }

    pub fn set(&mut self, x: usize, s: Sign) {
        let w = &mut self.words[x >> 6];
        if s.bit() {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    pub fn evaluate(&self, x: &GF2Vector) -> Result<Sign> {
        check_dim(self.n, x.arity())?;
        Ok(self.sign(x.bits() as usize))
    }

    pub fn negate(&self) -> BooleanFunction {
        let mut out = self.clone();
        let len = self.len();
        for (i, w) in out.words.iter_mut().enumerate() {
            *w = !*w;
            let valid = len.saturating_sub(i * 64).min(64);
            if valid < 64 {
                *w &= (1u64 << valid) - 1;
            }
        }
        out
    }

    /// Number of points where the function is `-1`.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Lexicographic order on `b(0) b(1) ... b(2^n - 1)` with `0 < 1`; that
    /// is, `+1` sorts before `-1` at the first differing index.
    pub fn lex_cmp(&self, other: &BooleanFunction) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let first = diff.trailing_zeros();
                return if (a >> first) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.n.cmp(&other.n)
    }

    /// The function `x -> f(M x)`. `M` may be singular.
    pub fn compose_linear(&self, m: &GF2Matrix) -> Result<BooleanFunction> {
        check_dim(self.n, m.dim())?;
        Ok(self.compose_point_map(&m.point_map(), 0))
    }

    /// The function `x -> f(M x + a)`.
    pub fn compose_affine(&self, m: &GF2Matrix, shift: &GF2Vector) -> Result<BooleanFunction> {
        check_dim(self.n, m.dim())?;
        check_dim(self.n, shift.arity())?;
        Ok(self.compose_point_map(&m.point_map(), shift.bits()))
    }

    pub(crate) fn compose_point_map(&self, map: &[u32], shift: u32) -> BooleanFunction {
        let mut out = BooleanFunction {
            n: self.n,
            words: vec![0; self.words.len()],
        };
        for (x, &y) in map.iter().enumerate() {
            if self.bit((y ^ shift) as usize) {
                out.words[x >> 6] |= 1 << (x & 63);
            }
        }
        out
    }

    /// Lifts a function of the first `r` coordinates to arity `n`.
    pub fn lift(&self, n: usize) -> Result<BooleanFunction> {
        if n < self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot lift arity {} down to {n}",
                self.n
            )));
        }
        let low = (1usize << self.n) - 1;
        BooleanFunction::from_fn(n, |x| self.sign(x as usize & low))
    }

    /// Restriction to the first `r` coordinates, the others set to zero.
    pub fn restrict(&self, r: usize) -> Result<BooleanFunction> {
        if r > self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot restrict arity {} to {r}",
                self.n
            )));
        }
        BooleanFunction::from_fn(r, |x| self.sign(x as usize))
    }

    pub fn to_real(&self) -> RealFunction {
        RealFunction {
            n: self.n,
            values: (0..self.len())
                .map(|x| Rational::from_integer(BigInt::from(self.value(x))))
                .collect(),
        }
    }

    /// A 64-bit digest of the truth table.
    pub fn checksum(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for w in &self.words {
            hasher.update(w.to_le_bytes());
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }
}

/// A real-valued function on F2^n with exact rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealFunction {
    n: usize,
    values: Vec<Rational>,
}

impl RealFunction {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_arity(n)?;
        check_dim(1 << n, values.len())?;
        Ok(RealFunction { n, values })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![Rational::zero(); 1 << n])
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    /// `max_x |self(x) - f(x)|`.
    pub fn sup_distance(&self, f: &BooleanFunction) -> Result<Rational> {
        check_dim(self.n, f.arity())?;
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(x, v)| (v - Rational::from_integer(f.value(x).into())).abs())
            .max()
            .unwrap_or_else(Rational::zero))
    }
}

/// Fourier coefficients indexed by the integer encoding of `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<Rational>,
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<Rational>) -> Result<Self> {
        check_arity(n)?;
        check_dim(1 << n, coeffs.len())?;
        Ok(Spectrum { n, coeffs })
    }

    /// The spectrum of `chi_alpha`.
    pub fn delta(alpha: &GF2Vector) -> Result<Self> {
        let mut s = Self::new(alpha.arity(), vec![Rational::zero(); 1 << alpha.arity()])?;
        s.coeffs[alpha.bits() as usize] = Rational::one();
        Ok(s)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: usize) -> &Rational {
        &self.coeffs[alpha]
    }

    /// `sum_alpha |c(alpha)|`.
    pub fn l1_norm(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn sum_of_squares(&self) -> Rational {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn max_abs(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<GF2Vector> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, _)| GF2Vector::from_raw(self.n, a as u32))
            .collect()
    }
}

/// Anything with values on F2^n that the transform can consume.
pub trait CubeFunction {
    fn arity(&self) -> usize;
    fn spectrum(&self) -> Spectrum;
}

impl CubeFunction for BooleanFunction {
    fn arity(&self) -> usize {
        self.n
    }

    fn spectrum(&self) -> Spectrum {
        let mut acc: Vec<i64> = (0..self.len()).map(|x| self.value(x)).collect();
        butterfly(&mut acc);
        let denom = BigInt::one() << self.n;
        Spectrum {
            n: self.n,
            coeffs: acc
                .into_iter()
                .map(|k| Rational::new(BigInt::from(k), denom.clone()))
                .collect(),
        }
    }
}

impl CubeFunction for RealFunction {
    fn arity(&self) -> usize {
        self.n
    }

    fn spectrum(&self) -> Spectrum {
        let mut acc = self.values.clone();
        butterfly(&mut acc);
        let scale = Rational::from_integer(BigInt::one() << self.n);
        Spectrum {
            n: self.n,
            coeffs: acc.into_iter().map(|v| v / &scale).collect(),
        }
    }
}

/// Unnormalized in-place Walsh-Hadamard butterfly.
pub(crate) fn butterfly<T>(a: &mut [T])
where
    T: Clone + for<'x> std::ops::AddAssign<&'x T> + for<'x> std::ops::SubAssign<&'x T>,
{
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let t = u.clone();
                *u += &*v;
                let mut w = t;
                w -= &*v;
                *v = w;
            }
        }
        h *= 2;
    }
}

/// `chi_alpha(x) = (-1)^<alpha, x>`.
pub fn character(alpha: &GF2Vector, x: &GF2Vector) -> Result<Sign> {
    Ok(Sign::from_bit(alpha.dot(x)?))
}

/// Fourier coefficients `f^(alpha) = 2^-n sum_x f(x) chi_alpha(x)`.
pub fn wht<F: CubeFunction + ?Sized>(f: &F) -> Spectrum {
    f.spectrum()
}

/// Pointwise reconstruction `sum_alpha s(alpha) chi_alpha(x)`.
pub fn inverse_wht(s: &Spectrum) -> RealFunction {
    let mut acc = s.coeffs.clone();
    butterfly(&mut acc);
    RealFunction {
        n: s.n,
        values: acc,
    }
}

/// Fraction of points where `f` and `g` disagree.
pub fn distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<Rational> {
    Ok(Rational::new(
        disagreements(f, g)?.into(),
        BigInt::one() << f.n,
    ))
}

/// Number of points where `f` and `g` disagree.
pub fn disagreements(f: &BooleanFunction, g: &BooleanFunction) -> Result<u64> {
    check_dim(f.n, g.n)?;
    Ok(f.words
        .iter()
        .zip(&g.words)
        .map(|(a, b)| u64::from((a ^ b).count_ones()))
        .sum())
}

pub fn compose_linear(f: &BooleanFunction, m: &GF2Matrix) -> Result<BooleanFunction> {
    f.compose_linear(m)
}

/// Pointwise sign, with `sign(0) = +1`.
pub fn sign_of(r: &RealFunction) -> BooleanFunction {
    BooleanFunction::from_fn(r.n, |x| Sign::of_rational(&r.values[x as usize]))
        .expect("arity already validated")
}

/// Instance families used by tests and experiments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionFamily {
    UniformRandom,
    Parity(u32),
    AndAll,
    /// `(-1)^(x1 x2 + x3 x4 + ...)`, even `n` only.
    BentInnerProduct,
    /// A random function of `r` coordinates after a random change of basis.
    PlantedJunta { r: usize },
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionFamily::UniformRandom => f.write_str("uniform-random"),
            FunctionFamily::Parity(a) => write!(f, "parity:{a:x}"),
            FunctionFamily::AndAll => f.write_str("and-all"),
            FunctionFamily::BentInnerProduct => f.write_str("bent-ip"),
            FunctionFamily::PlantedJunta { r } => write!(f, "planted-junta:{r}"),
        }
    }
}

impl FromStr for FunctionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unknown function family {s:?}"));
        match (kind, arg) {
            ("uniform-random" | "uniform", None) => Ok(FunctionFamily::UniformRandom),
            ("and-all" | "and", None) => Ok(FunctionFamily::AndAll),
            ("bent-ip", None) => Ok(FunctionFamily::BentInnerProduct),
            ("parity", Some(a)) => u32::from_str_radix(a, 16)
                .map(FunctionFamily::Parity)
                .map_err(|_| bad()),
            ("planted-junta", Some(r)) => r
                .parse()
                .map(|r| FunctionFamily::PlantedJunta { r })
                .map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Draws a member of `family` on `n` variables; deterministic in `seed`.
pub fn generate(family: &FunctionFamily, n: usize, seed: u64) -> Result<BooleanFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with(family, n, &mut rng)
}

pub fn generate_with<R: Rng + ?Sized>(
    family: &FunctionFamily,
    n: usize,
    rng: &mut R,
) -> Result<BooleanFunction> {
    check_arity(n)?;
    match family {
        FunctionFamily::UniformRandom => {
            BooleanFunction::from_fn(n, |_| Sign::from_bit(rng.random::<bool>()))
        }
        FunctionFamily::Parity(alpha) => {
            let alpha = GF2Vector::new(n, *alpha)?;
            BooleanFunction::from_fn(n, |x| {
                Sign::from_bit((alpha.bits() & x).count_ones() & 1 == 1)
            })
        }
        FunctionFamily::AndAll => {
            let all = (1u32 << n) - 1;
            BooleanFunction::from_fn(n, |x| Sign::from_bit(x == all))
        }
        FunctionFamily::BentInnerProduct => {
            if n % 2 == 1 {
                return Err(Error::InvalidParameter(format!(
                    "bent-ip needs an even number of variables, got {n}"
                )));
            }
            BooleanFunction::from_fn(n, |x| {
                let odd = x & 0x5555_5555;
                let even = (x >> 1) & 0x5555_5555;
                Sign::from_bit((odd & even).count_ones() & 1 == 1)
            })
        }
        FunctionFamily::PlantedJunta { r } => {
            if *r > n {
                return Err(Error::InvalidParameter(format!(
                    "planted junta needs r <= n, got r = {r}, n = {n}"
                )));
            }
            let core = generate_with(&FunctionFamily::UniformRandom, *r, rng)?;
            let m = gf2::random_nonsingular_with(n, rng);
            core.lift(n)?.compose_linear(&m)
        }
    }
}
