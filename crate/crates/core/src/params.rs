//! Model parameters, validation and the wealth-region taxonomy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::thresholds::ThresholdSet;

/// Which closed-form family the solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Discount rate equal to the interest rate.
    Base,
    /// Discount rate different from the interest rate.
    GeneralRate,
    /// Reference point `α[φ(h)c + (1 − φ(h))h]` blending current consumption and the peak.
    GeneralReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiKind {
    Zero,
    Fractional,
}

/// Reference-weight function as it appears in a parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub kind: PhiKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_hat: Option<f64>,
}

impl PhiSpec {
    pub fn zero() -> Self {
        Self {
            kind: PhiKind::Zero,
            phi_bar: None,
            h_hat: None,
        }
    }

    pub fn fractional(phi_bar: f64, h_hat: f64) -> Self {
        Self {
            kind: PhiKind::Fractional,
            phi_bar: Some(phi_bar),
            h_hat: Some(h_hat),
        }
    }
}

/// Validated reference-weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Zero,
    /// `φ(h) = phi_bar · h / (h + h_hat)`.
    Fractional {
        phi_bar: f64,
        h_hat: f64,
    },
}

impl Phi {
    pub fn eval<T: Scalar>(&self, h: T) -> T {
        match *self {
            Phi::Zero => T::cst(0.0),
            Phi::Fractional { phi_bar, h_hat } => h * phi_bar / (h + h_hat),
        }
    }

    /// `φ(∞)`.
    pub fn limit(&self) -> f64 {
        match *self {
            Phi::Zero => 0.0,
            Phi::Fractional { phi_bar, .. } => phi_bar,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Phi::Zero => true,
            Phi::Fractional { phi_bar, .. } => phi_bar == 0.0,
        }
    }
}

/// Raw model parameters, as read from a parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: f64,
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
}

impl ModelParams {
    /// The reference parameter set: r = γ = 0.04, μ = 0.12, σ = 0.3,
    /// λ = 0.3, α = 0.7, β1 = 1, β2 = 2.
    pub fn base() -> Self {
        Self {
            r: 0.04,
            mu: 0.12,
            sigma: 0.3,
            gamma: 0.04,
            lambda: 0.3,
            alpha: 0.7,
            beta1: 1.0,
            beta2: 2.0,
            variant: Variant::Base,
            phi: None,
        }
    }

    pub fn validate(&self) -> Result<ValidatedParams> {
        validate(self)
    }
}

/// Parameters that passed every domain check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams {
    pub r: f64,
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub variant: Variant,
    pub phi: Phi,
}

impl ValidatedParams {
    /// Back to the serializable form.
    pub fn raw(&self) -> ModelParams {
        let phi = match self.variant {
            Variant::GeneralReference => Some(match self.phi {
                Phi::Zero => PhiSpec::zero(),
                Phi::Fractional { phi_bar, h_hat } => PhiSpec::fractional(phi_bar, h_hat),
            }),
            _ => None,
        };
        ModelParams {
            r: self.r,
            mu: self.mu,
            sigma: self.sigma,
            gamma: self.gamma,
            lambda: self.lambda,
            alpha: self.alpha,
            beta1: self.beta1,
            beta2: self.beta2,
            variant: self.variant,
            phi,
        }
    }

    /// Market price of risk `θ = (μ − r)/σ`.
    pub fn theta(&self) -> f64 {
        (self.mu - self.r) / self.sigma
    }

    /// Merton factor `(μ − r)/σ²`.
    pub fn merton(&self) -> f64 {
        (self.mu - self.r) / (self.sigma * self.sigma)
    }

    /// Rate that capitalises the consumption floor: wealth below `λh/ρ`
    /// cannot finance `c ≥ λh` forever.
    pub fn floor_rate(&self) -> f64 {
        match self.variant {
            Variant::GeneralRate => self.r,
            _ => self.gamma,
        }
    }
}

/// Checks every domain constraint and reports all violations at once.
pub fn validate(p: &ModelParams) -> Result<ValidatedParams> {
    let mut bad = Vec::new();
    let named = [
        ("r", p.r),
        ("mu", p.mu),
        ("sigma", p.sigma),
        ("gamma", p.gamma),
        ("lambda", p.lambda),
        ("alpha", p.alpha),
        ("beta1", p.beta1),
        ("beta2", p.beta2),
    ];
    for (name, v) in named {
        if !v.is_finite() {
            bad.push(format!("{name} must be finite (got {v})"));
        }
    }
    let positive = [
        ("r", p.r),
        ("sigma", p.sigma),
        ("gamma", p.gamma),
        ("beta1", p.beta1),
        ("beta2", p.beta2),
    ];
    for (name, v) in positive {
        if v.is_finite() && v <= 0.0 {
            bad.push(format!("{name} must be > 0 (got {v})"));
        }
    }
    if p.mu < p.r {
        bad.push(format!("mu must be >= r (got mu = {}, r = {})", p.mu, p.r));
    }
    if p.lambda < 0.0 {
        bad.push(format!("lambda must be >= 0 (got {})", p.lambda));
    }
    if p.lambda >= p.alpha {
        bad.push(format!(
            "lambda must be < alpha (got lambda = {}, alpha = {})",
            p.lambda, p.alpha
        ));
    }
    if p.alpha >= 1.0 {
        bad.push(format!("alpha must be < 1 (got {})", p.alpha));
    }
    if p.variant == Variant::Base && p.r != p.gamma {
        bad.push(format!(
            "variant Base requires r = gamma (got r = {}, gamma = {})",
            p.r, p.gamma
        ));
    }
    if p.variant == Variant::GeneralReference && p.r != p.gamma {
        bad.push(format!(
            "variant GeneralReference requires r = gamma (got r = {}, gamma = {})",
            p.r, p.gamma
        ));
    }

    let mut phi = Phi::Zero;
    match (p.variant, p.phi) {
        (Variant::GeneralReference, None) => {
            bad.push("variant GeneralReference requires a phi specification".into());
        }
        (Variant::GeneralReference, Some(spec)) => match spec.kind {
            PhiKind::Zero => phi = Phi::Zero,
            PhiKind::Fractional => match (spec.phi_bar, spec.h_hat) {
                (Some(phi_bar), Some(h_hat)) => {
                    if !(0.0..=1.0).contains(&phi_bar) {
                        bad.push(format!("phi_bar must lie in [0, 1] (got {phi_bar})"));
                    }
                    if !(h_hat > 0.0 && h_hat.is_finite()) {
                        bad.push(format!("h_hat must be > 0 (got {h_hat})"));
                    }
                    let cap = (p.alpha - p.lambda) / (p.alpha * (1.0 - p.lambda));
                    if phi_bar >= cap {
                        bad.push(format!(
                            "phi(inf) = {phi_bar} must be < (alpha - lambda)/(alpha (1 - lambda)) = {cap}"
                        ));
                    }
                    phi = Phi::Fractional { phi_bar, h_hat };
                }
                _ => bad.push("Fractional phi requires phi_bar and h_hat".into()),
            },
        },
        (_, Some(_)) => {
            bad.push("phi is only meaningful for variant GeneralReference".into());
        }
        (_, None) => {}
    }

    if !bad.is_empty() {
        return Err(Error::ParamDomain(bad));
    }
    Ok(ValidatedParams {
        r: p.r,
        mu: p.mu,
        sigma: p.sigma,
        gamma: p.gamma,
        lambda: p.lambda,
        alpha: p.alpha,
        beta1: p.beta1,
        beta2: p.beta2,
        variant: p.variant,
        phi,
    })
}

/// A wealth and habit pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub x: f64,
    pub h: f64,
}

/// Position of a state relative to the threshold curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// `x < W_bkrp(h)`: the floor `c ≥ λh` cannot be financed.
    Bankrupt,
    /// `[W_bkrp, W_low]`: consume at the floor `λh`.
    Gloom,
    /// `(W_low, W_ref]`: below the reference, risk aversion β1.
    Depression,
    /// `(W_ref, W_peak]`: above the reference, risk aversion β2.
    Recovery,
    /// `(W_peak, W_updt]`: consume at the peak `h`.
    Satisfactory,
    /// `x > W_updt(h)`: the peak jumps up immediately.
    AboveBliss,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Bankrupt => "bankrupt",
            RegionLabel::Gloom => "gloom",
            RegionLabel::Depression => "depression",
            RegionLabel::Recovery => "recovery",
            RegionLabel::Satisfactory => "satisfactory",
            RegionLabel::AboveBliss => "above_bliss",
        }
    }

    /// True for the four regions where the feedback policy is defined.
    pub fn is_effective(&self) -> bool {
        !matches!(self, RegionLabel::Bankrupt | RegionLabel::AboveBliss)
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `x` against thresholds computed at the same `h`.
/// Ties go to the lower-wealth region, whose interval is closed on the right.
pub fn classify_region(t: &ThresholdSet, x: f64) -> RegionLabel {
    if x < t.w_bkrp {
        RegionLabel::Bankrupt
    } else if x <= t.w_low {
        RegionLabel::Gloom
    } else if x <= t.w_ref {
        RegionLabel::Depression
    } else if x <= t.w_peak {
        RegionLabel::Recovery
    } else if x <= t.w_updt {
        RegionLabel::Satisfactory
    } else {
        RegionLabel::AboveBliss
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_parameters_validate() {
        assert!(ModelParams::base().validate().is_ok());
    }

    #[test]
    fn all_violations_are_reported() {
        let mut p = ModelParams::base();
        p.lambda = 0.7;
        p.sigma = -1.0;
        p.gamma = 0.05;
        let Err(Error::ParamDomain(msgs)) = p.validate() else {
            panic!("expected a domain error");
        };
        assert_eq!(msgs.len(), 3, "{msgs:?}");
    }

    #[test]
    fn fractional_phi_respects_the_cap() {
        let mut p = ModelParams::base();
        p.variant = Variant::GeneralReference;
        p.phi = Some(PhiSpec::fractional(0.9, 1.0));
        assert!(p.validate().is_err());
        p.phi = Some(PhiSpec::fractional(0.5, 1.0));
        assert!(p.validate().is_ok());
    }
}
