//! Finite-alphabet probability objects and information measures.
//!
//! Logarithms are base 2 throughout. Zero-probability cells never enter a
//! logarithm, so `0 log 0 = 0` and conditioning on a zero-probability slice
//! contributes nothing.

mod bce;
mod degradedness;
mod joint;
mod kernel;
mod pmf;

pub use bce::{BceChannel, JointKernel};
pub use degradedness::{check_stochastically_degraded, nnls, DegradednessVerdict};
pub use joint::{
    conditional_mutual_information, mutual_information, Axis, JointDistribution,
};
pub use kernel::{compose, DiscreteChannel};
pub use pmf::{binary_entropy, entropy, Pmf};

/// Tolerance used when validating that probabilities sum to one.
pub const PROB_TOL: f64 = 1e-12;

/// `-p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

pub(crate) fn check_prob_vector(what: &str, probs: &[f64]) -> crate::Result<()> {
    if probs.is_empty() {
        return Err(crate::Error::validation(format!("{what}: empty alphabet")));
    }
    let mut sum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(crate::Error::validation(format!(
                "{what}: entry {i} is {p}, expected a non-negative probability"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(crate::Error::validation(format!(
            "{what}: probabilities sum to {sum:.17}, not 1"
        )));
    }
    Ok(())
}
