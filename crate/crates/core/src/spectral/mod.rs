//! Spectral norm, the gamma-approximate spectral norm LP, spectral sampling,
//! truncation, and junta approximation.

mod junta;
mod sampling;
mod simplex;

pub use junta::{junta_approximation, junta_approximation_with, JuntaApproximation};
pub use sampling::{
    bs_sample, bs_sample_with, sample_count, SampledSignRepresentation, SamplerConfig,
};
pub(crate) use sampling::sign_of_samples;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::boolfn::{inverse_wht, wht, BooleanFunction, RealFunction, Spectrum};
use crate::error::{Error, Result};
use crate::gf2::GF2Vector;
use crate::limits::Limits;
use crate::Rational;
use simplex::{Scalar, Tableau};

/// Pivot budget for one LP solve.
pub const MAX_PIVOTS: usize = 200_000;

/// Values within this distance of an integer are snapped down to it before
/// taking a ceiling, so round-off never bumps `ceil` up by one.
pub const CEILING_SNAP: f64 = 1e-6;

/// `sum_alpha |f^(alpha)|`, exactly.
pub fn spectral_norm(f: &BooleanFunction) -> Rational {
    wht(f).l1_norm()
}

/// Optimum of the gamma-approximate spectral norm LP together with the
/// real-valued function attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxNormWitness {
    pub gamma: Rational,
    /// `||g^||_1` of [`ApproxNormWitness::witness`].
    pub value: Rational,
    pub witness: RealFunction,
    /// Whether the LP ran in exact arithmetic (otherwise `f64`, with the
    /// witness clamped back into the feasible box).
    pub exact: bool,
    pub pivots: usize,
}

impl ApproxNormWitness {
    pub fn spectrum(&self) -> Spectrum {
        wht(&self.witness)
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// `ceil(value)`; floating-point values within [`CEILING_SNAP`] of an
    /// integer are snapped down first.
    pub fn ceiling(&self) -> u64 {
        let exact_ceil = self.value.ceil().to_integer();
        let ceil = if self.exact {
            exact_ceil
        } else {
            let nearest = self.value.round();
            if (&self.value - &nearest).abs().to_f64().unwrap_or(1.0) <= CEILING_SNAP {
                nearest.to_integer()
            } else {
                exact_ceil
            }
        };
        ceil.to_u64().expect("norm is nonnegative and small")
    }
}

/// Solves `min ||g^||_1` subject to `|f(x) - g(x)| <= gamma` for all `x`.
///
/// The LP is posed over `g = f + d` with `d(x) + gamma` in `[0, 2 gamma]`:
/// columns are `u_alpha, v_alpha` (the positive and negative parts of
/// `g^(alpha)`), the shifted point offsets, and their upper-bound slacks.
/// The all-lower-bound point `g = f - gamma` gives an immediately feasible
/// basis, so no phase one is needed. Pivoting uses Bland's rule over that
/// fixed column order.
pub fn approx_spectral_norm(
    f: &BooleanFunction,
    gamma: &Rational,
    limits: &Limits,
) -> Result<ApproxNormWitness> {
    if gamma.is_negative() || *gamma >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    let n = f.arity();
    limits.check_lp(n)?;
    if n <= limits.exact_lp_max_n {
        let offsets = solve_offsets(f, gamma.clone(), |q| q)?;
        finish(f, gamma, offsets.0, true, offsets.1)
    } else {
        let gamma_f = gamma.to_f64().expect("gamma is finite");
        let (raw, pivots) = solve_offsets(f, gamma_f, |q| q.to_f64().expect("finite"))?;
        let two_gamma = gamma * Rational::from_integer(2.into());
        let offsets = raw
            .into_iter()
            .map(|v| {
                let q = Rational::from_f64(v).unwrap_or_else(<Rational as Zero>::zero);
                q.max(<Rational as Zero>::zero()).min(two_gamma.clone())
            })
            .collect();
        finish(f, gamma, offsets, false, pivots)
    }
}

/// Returns the optimal offsets `d(x) + gamma` and the pivot count.
fn solve_offsets<T: Scalar>(
    f: &BooleanFunction,
    gamma: T,
    conv: impl Fn(Rational) -> T,
) -> Result<(Vec<T>, usize)> {
    let n = f.arity();
    let size = 1usize << n;
    let cols = 4 * size;
    let (u, v, off, slack) = (0, size, 2 * size, 3 * size);
    let spec = wht(f);
    let inv_size = conv(Rational::new(BigInt::one(), BigInt::from(size)));
    let neg_inv_size = T::zero().sub(&inv_size);
    let one = conv(Rational::one());
    let neg_one = T::zero().sub(&one);
    let two_gamma = gamma.add(&gamma);

    let mut rows = Vec::with_capacity(2 * size);
    let mut rhs = Vec::with_capacity(2 * size);
    let mut basis = Vec::with_capacity(2 * size);
    for alpha in 0..size {
        // u_a - v_a - 2^-n sum_x chi_a(x) off_x = f^(a) - gamma [a = 0]
        let mut b = conv(spec.coeff(alpha).clone());
        if alpha == 0 {
            b = b.sub(&gamma);
        }
        let flip = b.is_neg();
        let mut row = vec![T::zero(); cols];
        row[u + alpha] = one.clone();
        row[v + alpha] = neg_one.clone();
        for x in 0..size {
            let odd = (alpha & x).count_ones() & 1 == 1;
            row[off + x] = if odd { inv_size.clone() } else { neg_inv_size.clone() };
        }
        if flip {
            for e in row.iter_mut() {
                *e = T::zero().sub(e);
            }
            b = T::zero().sub(&b);
            basis.push(v + alpha);
        } else {
            basis.push(u + alpha);
        }
        rows.push(row);
        rhs.push(b);
    }
    for x in 0..size {
        let mut row = vec![T::zero(); cols];
        row[off + x] = one.clone();
        row[slack + x] = one.clone();
        rows.push(row);
        rhs.push(two_gamma.clone());
        basis.push(slack + x);
    }
    let mut cost = vec![T::zero(); cols];
    for c in cost.iter_mut().take(2 * size) {
        *c = one.clone();
    }
    let solution = Tableau::new(rows, rhs, &cost, basis).solve(MAX_PIVOTS)?;
    let pivots = solution.pivots;
    Ok((
        solution.values.into_iter().skip(off).take(size).collect(),
        pivots,
    ))
}

fn finish(
    f: &BooleanFunction,
    gamma: &Rational,
    offsets: Vec<Rational>,
    exact: bool,
    pivots: usize,
) -> Result<ApproxNormWitness> {
    let values = offsets
        .into_iter()
        .enumerate()
        .map(|(x, o)| Rational::from_integer(f.value(x).into()) + o - gamma)
        .collect();
    let witness = RealFunction::new(f.arity(), values)?;
    if witness.sup_distance(f)? > *gamma {
        return Err(Error::Invariant("LP witness is infeasible".into()));
    }
    let value = wht(&witness).l1_norm();
    Ok(ApproxNormWitness {
        gamma: gamma.clone(),
        value,
        witness,
        exact,
        pivots,
    })
}

/// A real function with its low-magnitude Fourier coefficients removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub function: RealFunction,
    pub spectrum: Spectrum,
    /// Indices kept, ascending.
    pub kept: Vec<GF2Vector>,
}

/// Keeps the coefficients with `|h^(alpha)| >= threshold`.
pub fn truncate_spectrum(h: &RealFunction, threshold: &Rational) -> Result<Truncation> {
    if threshold.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let n = h.arity();
    let spec = wht(h);
    let mut kept = Vec::new();
    let coeffs = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(a, c)| {
            if c.abs() >= *threshold {
                kept.push(GF2Vector::new(n, a as u32).expect("index fits arity"));
                c.clone()
            } else {
                <Rational as Zero>::zero()
            }
        })
        .collect();
    let spectrum = Spectrum::new(n, coeffs)?;
    Ok(Truncation {
        function: inverse_wht(&spectrum),
        spectrum,
        kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{generate, FunctionFamily, Sign};

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn and2() -> BooleanFunction {
        BooleanFunction::from_signs(2, &[1, 1, 1, -1]).unwrap()
    }

    #[test]
    fn spectral_norm_examples() {
        let chi = generate(&FunctionFamily::Parity(0b101), 3, 0).unwrap();
        assert_eq!(spectral_norm(&chi), q(1, 1));
        assert_eq!(spectral_norm(&and2()), q(2, 1));
        let bent = generate(&FunctionFamily::BentInnerProduct, 4, 0).unwrap();
        assert_eq!(spectral_norm(&bent), q(4, 1));
    }

    #[test]
    fn gamma_zero_forces_the_function() {
        let lim = Limits::default();
        for seed in 0..5 {
            let f = generate(&FunctionFamily::UniformRandom, 3, seed).unwrap();
            let w = approx_spectral_norm(&f, &q(0, 1), &lim).unwrap();
            assert_eq!(w.value, spectral_norm(&f));
            assert_eq!(w.witness, f.to_real());
        }
    }

    #[test]
    fn parity_value_is_one_minus_gamma() {
        let lim = Limits::default();
        for gamma in [q(1, 4), q(1, 3), q(1, 2)] {
            let chi = generate(&FunctionFamily::Parity(0b11), 3, 0).unwrap();
            let w = approx_spectral_norm(&chi, &gamma, &lim).unwrap();
            assert_eq!(w.value, q(1, 1) - &gamma);
            assert!(w.exact);
        }
    }

    #[test]
    fn and2_within_sandwich() {
        let w = approx_spectral_norm(&and2(), &q(1, 3), &Limits::default()).unwrap();
        assert!(w.value >= q(1, 6) && w.value <= q(4, 3), "{}", w.value);
        assert!(w.witness.sup_distance(&and2()).unwrap() <= q(1, 3));
        assert_eq!(w.ceiling(), 2);
    }

    #[test]
    fn float_path_agrees_with_exact_path() {
        let f = generate(&FunctionFamily::UniformRandom, 4, 77).unwrap();
        let gamma = q(1, 3);
        let exact = approx_spectral_norm(&f, &gamma, &Limits::default()).unwrap();
        let lim = Limits {
            exact_lp_max_n: 3,
            ..Limits::default()
        };
        let float = approx_spectral_norm(&f, &gamma, &lim).unwrap();
        assert!(!float.exact);
        assert!((exact.value_f64() - float.value_f64()).abs() < 1e-6);
        assert!(float.witness.sup_distance(&f).unwrap() <= gamma);
    }

    #[test]
    fn ceiling_snaps_float_noise() {
        let f = BooleanFunction::constant(1, Sign::Plus).unwrap();
        let mut w = approx_spectral_norm(&f, &q(0, 1), &Limits::default()).unwrap();
        w.exact = false;
        w.value = Rational::from_f64(1.0 + 1e-9).unwrap();
        assert_eq!(w.ceiling(), 1);
        w.value = Rational::from_f64(1.01).unwrap();
        assert_eq!(w.ceiling(), 2);
        w.exact = true;
        w.value = q(1, 1) + q(1, 1_000_000_000);
        assert_eq!(w.ceiling(), 2);
    }

    #[test]
    fn parameter_and_guard_errors() {
        let f = and2();
        assert!(approx_spectral_norm(&f, &q(1, 1), &Limits::default()).is_err());
        assert!(approx_spectral_norm(&f, &q(-1, 3), &Limits::default()).is_err());
        let big = generate(&FunctionFamily::UniformRandom, 9, 0).unwrap();
        assert!(matches!(
            approx_spectral_norm(&big, &q(1, 3), &Limits::default()),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn truncation_examples() {
        let h = and2().to_real();
        let all = truncate_spectrum(&h, &q(0, 1)).unwrap();
        assert_eq!(all.function, h);
        assert_eq!(all.kept.len(), 4);

        let none = truncate_spectrum(&h, &q(3, 5)).unwrap();
        assert_eq!(none.function, RealFunction::zero(2).unwrap());
        assert!(none.kept.is_empty());

        let t = truncate_spectrum(&h, &q(2, 5)).unwrap();
        assert_eq!(t.kept.len(), 4);
        assert!(truncate_spectrum(&h, &q(-1, 5)).is_err());
    }
}
