use num_traits::{One, Signed};

use crate::boolfn::{distance, sign_of, BooleanFunction, RealFunction};
use crate::error::{Error, Result};
use crate::gf2::{extend_to_basis, GF2Matrix, GF2Vector};
use crate::limits::Limits;
use crate::Rational;

use super::{approx_spectral_norm, truncate_spectrum, ApproxNormWitness};

/// A function of `r` variables that, composed with a change of basis,
/// approximates `f` in linear distance.
#[derive(Clone, Debug)]
pub struct JuntaApproximation {
    pub r: usize,
    /// The junta on its `r` relevant coordinates.
    pub core: BooleanFunction,
    /// Nonsingular `A` with `A^T alpha_i = e_i` for the selected basis of the
    /// significant set.
    pub transform: GF2Matrix,
    /// Truncation cutoff `omega / (18 t)`.
    pub threshold: Rational,
    /// Coefficients of the LP witness at or above the cutoff.
    pub significant: Vec<GF2Vector>,
    /// `||h*^||_1` of the `1/3`-approximating LP witness.
    pub t: Rational,
    /// The truncated witness on the original coordinates.
    pub truncated: RealFunction,
    /// Exact `delta(f, sign(truncated))`.
    pub pointwise_error: Rational,
}

impl JuntaApproximation {
    /// The junta as a function of all `n` coordinates: `core` applied to the
    /// first `r` coordinates of `x`.
    pub fn lifted(&self) -> BooleanFunction {
        self.core
            .lift(self.transform.dim())
            .expect("core arity never exceeds n")
    }

    /// `576 t^2 / omega^2`, the bound on the significant-set size.
    pub fn size_bound(t: &Rational, omega: &Rational) -> Rational {
        Rational::from_integer(576.into()) * t * t / (omega * omega)
    }
}

/// Truncates the `1/3`-approximate spectral norm witness of `f` at
/// `omega / (18 t)` and rotates the surviving characters onto the first `r`
/// coordinates.
pub fn junta_approximation(
    f: &BooleanFunction,
    omega: &Rational,
    limits: &Limits,
) -> Result<JuntaApproximation> {
    if !omega.is_positive() || *omega >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "omega must lie in (0, 1), got {omega}"
        )));
    }
    let third = Rational::new(1.into(), 3.into());
    let witness = approx_spectral_norm(f, &third, limits)?;
    junta_approximation_with(f, &witness, omega)
}

/// [`junta_approximation`] from an already solved `1/3`-approximate norm LP.
pub fn junta_approximation_with(
    f: &BooleanFunction,
    witness: &ApproxNormWitness,
    omega: &Rational,
) -> Result<JuntaApproximation> {
    if !omega.is_positive() || *omega >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "omega must lie in (0, 1), got {omega}"
        )));
    }
    let n = f.arity();
    let t = witness.value.clone();
    let threshold = omega / (Rational::from_integer(18.into()) * &t);
    let truncation = truncate_spectrum(&witness.witness, &threshold)?;

    let k = truncation.kept.len();
    if Rational::from_integer(k.into()) > JuntaApproximation::size_bound(&t, omega) {
        return Err(Error::Invariant(format!(
            "significant set of size {k} exceeds 576 t^2 / omega^2"
        )));
    }
    let (r_matrix, r) = extend_to_basis(n, &truncation.kept)?;
    if r > k {
        return Err(Error::Invariant(format!("rank {r} exceeds |S| = {k}")));
    }
    let transform = r_matrix.transpose();
    let sign_truncated = sign_of(&truncation.function);
    let pointwise_error = distance(f, &sign_truncated)?;
    let rotated = sign_truncated.compose_linear(&transform)?;
    let core = rotated.restrict(r)?;
    if core.lift(n)? != rotated {
        return Err(Error::Invariant(
            "rotated truncation depends on coordinates beyond r".into(),
        ));
    }
    Ok(JuntaApproximation {
        r,
        core,
        transform,
        threshold,
        significant: truncation.kept,
        t,
        truncated: truncation.function,
        pointwise_error,
    })
}
