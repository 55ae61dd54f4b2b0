//! Shared fixtures for the criterion benches.

use liniso_core::{generate, BooleanFunction, FunctionFamily, PromiseInstance, Rational};
use liniso_core::{random_nonsingular, Limits};

pub fn random_function(n: usize, seed: u64) -> BooleanFunction {
    generate(&FunctionFamily::UniformRandom, n, seed).expect("arity within limits")
}

pub fn junta(n: usize, r: usize, seed: u64) -> BooleanFunction {
    generate(&FunctionFamily::PlantedJunta { r }, n, seed).expect("arity within limits")
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

/// `f` against a random basis change of itself, at epsilon = 0, omega = 1/4.
pub fn near_instance(n: usize, seed: u64) -> PromiseInstance {
    let f = junta(n, 2, seed);
    let g = f
        .compose_linear(&random_nonsingular(n, seed ^ 0x5eed))
        .expect("same arity");
    PromiseInstance::new(f, g, q(0, 1), q(1, 4), &Limits::default()).expect("valid instance")
}
