//! Testing linear isomorphism of Boolean functions.
//!
//! The crate bundles exact Fourier analysis on the Boolean cube, exhaustive
//! sweeps over GL_n(F2), the approximate spectral norm linear program, and
//! simulators for two-party protocols that decide whether two functions are
//! equal up to an invertible linear change of variables.

pub mod boolfn;
pub mod error;
pub mod format;
pub mod gf2;
pub mod limits;
pub mod lindist;
pub mod phimap;
pub mod protocol;
pub mod spectral;

/// Exact rational number used for spectra, distances, and thresholds.
pub type Rational = num_rational::BigRational;

pub use boolfn::{
    character, compose_linear, distance, generate, inverse_wht, sign_of, wht, BooleanFunction,
    CubeFunction, FunctionFamily, RealFunction, Sign, Spectrum,
};
pub use error::{Error, Result};
pub use gf2::{
    enumerate_gl, extend_to_basis, mat_inverse, mat_vec, random_nonsingular, GF2Matrix, GF2Vector,
};
pub use limits::Limits;
pub use lindist::{affine_distance, canonical_form, is_lin_isomorphic, linear_distance, LinDistResult};
pub use phimap::{
    binary_entropy, choose_m, construct_phi, hamming_ball_size, liniso_ball, reduce_equ,
    verify_phi, PhiConstruction, PhiMap, PhiReport,
};
pub use protocol::{
    run_deterministic, run_private_coin, run_public_coin, GroundTruth, Outcome, PromiseInstance,
    Protocol, Transcript,
};
pub use spectral::{
    approx_spectral_norm, bs_sample, junta_approximation, spectral_norm, truncate_spectrum,
    ApproxNormWitness, JuntaApproximation, SampledSignRepresentation,
};
