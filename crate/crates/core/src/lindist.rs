//! Exhaustive linear and affine distance, isomorphism tests, and canonical
//! representatives of GL_n(F2)-orbits.
//!
//! Every routine here is a plain sweep over [`enumerate_gl`]; witnesses are
//! the first minimizers in enumeration order.

use num_bigint::BigInt;
use num_traits::One;

use crate::boolfn::{disagreements, BooleanFunction};
use crate::error::{check_dim, Result};
use crate::gf2::{enumerate_gl, GF2Matrix, GF2Vector};
use crate::limits::Limits;
use crate::Rational;

/// `min_M Pr_x[f(Mx) != g(x)]` together with the first minimizing `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinDistResult {
    pub value: Rational,
    pub witness: GF2Matrix,
    /// `value * 2^n`.
    pub disagreements: u64,
}

/// `min_{M, a} Pr_x[f(Mx + a) != g(x)]` with its first minimizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineDistResult {
    pub value: Rational,
    pub matrix: GF2Matrix,
    pub shift: GF2Vector,
    pub disagreements: u64,
}

fn fraction(count: u64, n: usize) -> Rational {
    Rational::new(BigInt::from(count), BigInt::one() << n)
}

pub fn linear_distance(
    f: &BooleanFunction,
    g: &BooleanFunction,
    limits: &Limits,
) -> Result<LinDistResult> {
    check_dim(f.arity(), g.arity())?;
    let n = f.arity();
    let mut best: Option<(u64, GF2Matrix)> = None;
    for m in enumerate_gl(n, limits)? {
        let d = disagreements(&f.compose_point_map(&m.point_map(), 0), g)?;
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, m));
            if d == 0 {
                break;
            }
        }
    }
    let (count, witness) = best.expect("GL_n(F2) is never empty");
    Ok(LinDistResult {
        value: fraction(count, n),
        witness,
        disagreements: count,
    })
}

pub fn affine_distance(
    f: &BooleanFunction,
    g: &BooleanFunction,
    limits: &Limits,
) -> Result<AffineDistResult> {
    check_dim(f.arity(), g.arity())?;
    let n = f.arity();
    let mut best: Option<(u64, GF2Matrix, u32)> = None;
    'sweep: for m in enumerate_gl(n, limits)? {
        let map = m.point_map();
        for a in 0..(1u32 << n) {
            let d = disagreements(&f.compose_point_map(&map, a), g)?;
            if best.as_ref().map_or(true, |(b, _, _)| d < *b) {
                best = Some((d, m.clone(), a));
                if d == 0 {
                    break 'sweep;
                }
            }
        }
    }
    let (count, matrix, a) = best.expect("GL_n(F2) is never empty");
    Ok(AffineDistResult {
        value: fraction(count, n),
        matrix,
        shift: GF2Vector::new(n, a)?,
        disagreements: count,
    })
}

/// Whether `g = f o M` for some nonsingular `M`.
pub fn is_lin_isomorphic(f: &BooleanFunction, g: &BooleanFunction, limits: &Limits) -> Result<bool> {
    check_dim(f.arity(), g.arity())?;
    if f.weight() != g.weight() || f.bit(0) != g.bit(0) {
        return Ok(false);
    }
    for m in enumerate_gl(f.arity(), limits)? {
        if f.compose_point_map(&m.point_map(), 0) == *g {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The lexicographically smallest `f o M` over GL_n(F2) and the first `M`
/// attaining it.
pub fn canonical_form(
    f: &BooleanFunction,
    limits: &Limits,
) -> Result<(BooleanFunction, GF2Matrix)> {
    let mut best: Option<(BooleanFunction, GF2Matrix)> = None;
    for m in enumerate_gl(f.arity(), limits)? {
        let h = f.compose_point_map(&m.point_map(), 0);
        if best
            .as_ref()
            .map_or(true, |(b, _)| h.lex_cmp(b) == std::cmp::Ordering::Less)
        {
            best = Some((h, m));
        }
    }
    Ok(best.expect("GL_n(F2) is never empty"))
}
