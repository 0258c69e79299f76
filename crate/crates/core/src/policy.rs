//! Optimal feedback consumption and investment, the marginal propensity to
//! consume and the investment-proportion profile.

use serde::{Deserialize, Serialize};

use crate::dual::{Branch, DualSlice};
use crate::error::{Error, Result};
use crate::inversion::{invert_on, value_at, DualPoint};
use crate::model::Model;
use crate::params::{RegionLabel, Variant};
use crate::thresholds::{w_updt_jet, ThresholdSet};

/// Optimal policy and value at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyEvaluation {
    pub x: f64,
    pub h: f64,
    pub region: RegionLabel,
    pub y: f64,
    pub c_star: f64,
    pub pi_star: f64,
    /// `π*/x`.
    pub pi_prop: f64,
    pub value: f64,
    /// `∂c*/∂x`.
    pub mpc: f64,
    /// Implied relative risk aversion `(μ − r)/(σ²·π*/x)`.
    pub irra: f64,
}

/// `1 − αφ(h)`, the scale of the reference-point terms.
fn reference_scale(model: &Model, h: f64) -> f64 {
    let p = model.params();
    1.0 - p.alpha * p.phi.eval(h)
}

/// Optimal consumption at dual point `y`.
pub fn consumption_at(model: &Model, pt: &DualPoint, h: f64) -> f64 {
    let p = model.params();
    let floor = p.lambda * h;
    let c = match pt.f_branch {
        Branch::F1 => floor,
        Branch::F4 => h,
        Branch::F2 | Branch::F3 => {
            let beta = if pt.f_branch == Branch::F2 { p.beta1 } else { p.beta2 };
            if p.variant == Variant::GeneralReference {
                let phi = p.phi.eval(h);
                let s = 1.0 - p.alpha * phi;
                p.alpha * h * (1.0 - phi) / s - (pt.y / s).ln() / (beta * s)
            } else {
                p.alpha * h - pt.y.ln() / beta
            }
        }
    };
    c.clamp(floor, h)
}

fn beta_of(model: &Model, b: Branch) -> f64 {
    if b == Branch::F2 {
        model.params().beta1
    } else {
        model.params().beta2
    }
}

pub(crate) fn evaluate_on(model: &Model, d: &DualSlice<f64>, t: &ThresholdSet, x: f64) -> Result<PolicyEvaluation> {
    let p = model.params();
    let q = model.constants();
    let h = t.h;
    let pt = invert_on(model, d, t, x)?;
    let c_star = consumption_at(model, &pt, h);
    let y_vyy = if pt.y.is_infinite() {
        0.0
    } else {
        pt.y * d.v_yy(pt.f_branch, pt.y, q)
    };
    let pi_star = p.merton() * y_vyy;
    let pi_prop = if x > 0.0 { pi_star / x } else { 0.0 };
    let mpc = match pt.f_branch {
        Branch::F1 => 0.0,
        Branch::F4 if x == t.w_updt => 1.0 / w_updt_jet(model, h)?.d1,
        Branch::F4 => 0.0,
        b => 1.0 / (beta_of(model, b) * reference_scale(model, h) * y_vyy),
    };
    Ok(PolicyEvaluation {
        x,
        h,
        region: pt.region,
        y: pt.y,
        c_star,
        pi_star,
        pi_prop,
        value: value_at(model, d, &pt, x),
        mpc,
        irra: p.merton() / pi_prop,
    })
}

/// Optimal consumption, investment, value and MPC at `(x, h)`.
pub fn evaluate_policy(model: &Model, x: f64, h: f64) -> Result<PolicyEvaluation> {
    let s = model.slice(h)?;
    evaluate_on(model, &s.dual, &s.thresholds, x)
}

/// Ratio of the MPC just above `W_ref(h)` to the MPC just below.
///
/// Both sides are `1/(β·y·Ṽ_yy)` at `y = 1`, and `y·Ṽ_yy` is continuous
/// there, so the ratio is `β1/β2` up to rounding.
pub fn mpc_jump_ratio(model: &Model, h: f64) -> Result<f64> {
    let s = model.slice(h)?;
    let q = model.constants();
    let p = model.params();
    let below = s.dual.v_yy(Branch::F2, 1.0, q);
    let above = s.dual.v_yy(Branch::F3, 1.0, q);
    Ok(p.beta1 * below / (p.beta2 * above))
}

/// Wealth `x̄(h)` where the MPC turns from decreasing to increasing in the
/// depression and recovery regions, or `None` if the MPC has no interior
/// minimum there.
pub fn mpc_turning_point(model: &Model, h: f64) -> Result<Option<f64>> {
    if !model.is_base_like() {
        return Err(Error::Unsupported("MPC turning point"));
    }
    let p = model.params();
    let q = model.constants();
    let s = model.slice(h)?;
    let c = &s.dual.c;
    let (c3, c4, c5, c6) = (c[2], c[3], c[4], c[5]);
    let e = (1.0 - p.alpha) * p.beta2 * h;
    let top = c5 * (q.q1 - 1.0) * (-(q.q1 - 2.0) * e).exp() + c6 * (q.q2 - 1.0) * (-(q.q2 - 2.0) * e).exp();
    if !(top > 0.0) {
        return Ok(None);
    }
    let (a, b, branch) = if c3 * (q.q1 - 1.0) + c4 * (q.q2 - 1.0) > 0.0 {
        (c3, c4, Branch::F2)
    } else {
        (c5, c6, Branch::F3)
    };
    let y_bar = (-a * (q.q1 - 1.0) / (b * (q.q2 - 1.0))).powf(1.0 / (q.q2 - q.q1));
    if !y_bar.is_finite() {
        return Ok(None);
    }
    Ok(Some(-s.dual.v_y(branch, y_bar, q)))
}

/// Sampled `π*/x` across the effective region at fixed `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionProfile {
    pub h: f64,
    /// `(x, π*/x)` pairs in increasing `x`.
    pub points: Vec<(f64, f64)>,
    pub argmax_index: usize,
    pub argmax_x: f64,
}

/// Samples `π*/x` on `n` evenly spaced wealth levels from just above
/// `W_bkrp(h)` to `W_updt(h)`.
pub fn proportion_profile(model: &Model, h: f64, n: usize) -> Result<ProportionProfile> {
    if n < 3 {
        return Err(Error::SimConfig(format!("proportion profile needs n >= 3 (got {n})")));
    }
    let s = model.slice(h)?;
    let t = &s.thresholds;
    let lo = t.w_bkrp + 1e-8 * t.w_bkrp.max(1.0);
    let hi = t.w_updt;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let x = if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        let e = evaluate_on(model, &s.dual, t, x)?;
        points.push((x, e.pi_prop));
    }
    let argmax_index = points
        .iter()
        .enumerate()
        .fold(0, |best, (i, pt)| if pt.1 > points[best].1 { i } else { best });
    Ok(ProportionProfile {
        h,
        argmax_x: points[argmax_index].0,
        points,
        argmax_index,
    })
}
