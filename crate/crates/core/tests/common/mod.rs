//! Parameter generators shared by the integration tests.
#![allow(dead_code)]

use peakhabit::{ModelParams, PhiSpec, Variant};
use proptest::prelude::*;
use rand::Rng;

/// Draws a valid parameter set of the given variant.
///
/// The market price of risk is kept in `[0.15, 0.6]` and `β` in `[0.3, 3]` so
/// that the coefficient exponentials stay finite on `h ≤ 20`. General-rate
/// draws keep `γ ≤ r`, the regime in which the dual value is convex.
pub fn draw<R: Rng>(rng: &mut R, variant: Variant) -> ModelParams {
    let r = rng.random_range(0.01..0.08);
    let sigma = rng.random_range(0.15..0.5);
    let theta = rng.random_range(0.15..0.6);
    let lambda = rng.random_range(0.0..0.5);
    let alpha = rng.random_range(lambda + 0.05..0.95);
    let gamma = match variant {
        Variant::GeneralRate => rng.random_range(0.5 * r..r),
        _ => r,
    };
    let phi = match variant {
        Variant::GeneralReference => {
            let cap = (alpha - lambda) / (alpha * (1.0 - lambda));
            Some(PhiSpec::fractional(
                rng.random_range(0.0..0.9 * cap),
                rng.random_range(0.5..5.0),
            ))
        }
        _ => None,
    };
    ModelParams {
        r,
        mu: r + theta * sigma,
        sigma,
        gamma,
        lambda,
        alpha,
        beta1: rng.random_range(0.3..3.0),
        beta2: rng.random_range(0.3..3.0),
        variant,
        phi,
    }
}

/// Proptest strategy over valid Base and GeneralRate parameter sets.
pub fn params() -> impl Strategy<Value = ModelParams> {
    (
        0.01..0.08f64,
        0.15..0.5f64,
        0.15..0.6f64,
        0.0..0.5f64,
        0.05..1.0f64,
        0.3..3.0f64,
        0.3..3.0f64,
        prop::option::of(0.5..1.0f64),
    )
        .prop_map(|(r, sigma, theta, lambda, a, beta1, beta2, rate)| {
            // α spread over (λ + 0.05, 0.95).
            let alpha = lambda + 0.05 + a * (0.9 - lambda - 0.05);
            let (variant, gamma) = match rate {
                Some(f) => (Variant::GeneralRate, f * r),
                None => (Variant::Base, r),
            };
            ModelParams {
                r,
                mu: r + theta * sigma,
                sigma,
                gamma,
                lambda,
                alpha,
                beta1,
                beta2,
                variant,
                phi: None,
            }
        })
}
