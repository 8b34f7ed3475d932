//! Entropy kernels shared by the Gaussian and Fock routes.
//!
//! All entropies are in units of log 2. Rényi orders are plain `f64`; pass
//! `f64::INFINITY` for the min-entropy and `1.0` for von Neumann.

use crate::{Error, Result};

/// Window inside which spectrum values slightly outside [0, 1] are clamped.
/// Larger excursions signal a broken input matrix and are rejected.
pub const CLAMP_WINDOW: f64 = 1e-12;

/// Binary entropy H2(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha { alpha })
    }
}

/// Clamp a spectrum value into [0, 1]; excursions beyond [`CLAMP_WINDOW`] are
/// an error rather than silently repaired.
pub fn clamp_unit(x: f64) -> Result<f64> {
    if !(-CLAMP_WINDOW..=1.0 + CLAMP_WINDOW).contains(&x) {
        return Err(Error::SpectrumOutOfRange { value: x });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Rényi entropy of the two-outcome distribution {lambda, 1 - lambda}.
///
/// Values within 1e-12 of 0 or 1 are snapped to the endpoint first: for
/// alpha < 1 a spectrum error eps leaks eps^alpha into the entropy, so
/// eigensolver noise of order 1e-15 on an exact 0 would otherwise pollute
/// small-order Rényi entropies far above its own size.
pub fn renyi_two_outcome(lambda: f64, alpha: f64) -> f64 {
    const FLOOR: f64 = 1e-12;
    let l = lambda.clamp(0.0, 1.0);
    let l = if l < FLOOR {
        0.0
    } else if l > 1.0 - FLOOR {
        1.0
    } else {
        l
    };
    // + 0.0 turns the -0.0 of exact-zero entropies into +0.0.
    if alpha == 1.0 {
        binary_entropy(l) + 0.0
    } else if alpha.is_infinite() {
        -l.max(1.0 - l).log2() + 0.0
    } else {
        (l.powf(alpha) + (1.0 - l).powf(alpha)).log2() / (1.0 - alpha) + 0.0
    }
}

/// Rényi entropy of a probability vector. Entries below 1e-12 are treated as
/// exact zeros; this keeps small-order Rényi entropies of nearly rank-deficient
/// density matrices from being polluted by numerical noise.
pub fn renyi_from_probs(probs: &[f64], alpha: f64) -> f64 {
    const FLOOR: f64 = 1e-12;
    // + 0.0 turns the -0.0 of exact-zero entropies into +0.0.
    if alpha == 1.0 {
        probs
            .iter()
            .filter(|&&p| p > FLOOR)
            .map(|&p| -p * p.log2())
            .sum::<f64>()
            + 0.0
    } else if alpha.is_infinite() {
        let max = probs.iter().cloned().fold(0.0f64, f64::max);
        if max <= 0.0 {
            0.0
        } else {
            -max.log2() + 0.0
        }
    } else {
        let s: f64 = probs
            .iter()
            .filter(|&&p| p > FLOOR)
            .map(|&p| p.powf(alpha))
            .sum();
        if s <= 0.0 {
            0.0
        } else {
            s.log2() / (1.0 - alpha) + 0.0
        }
    }
}
