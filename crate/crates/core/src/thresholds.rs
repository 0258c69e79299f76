//! The five wealth thresholds, the bliss-curve inverse and the concavity
//! threshold of the bliss curve.
//!
//! Each threshold is the image `x = −Ṽ_y(y_b, h)` of a dual interval endpoint
//! `y_b`, evaluated with the branch formula that owns the endpoint. Written
//! that way the expressions coincide with the closed forms and come with
//! `h`-derivatives for free when evaluated on jets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{Branch, DualConstants, DualSlice, ReferenceCase};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::model::Model;
use crate::params::{ValidatedParams, Variant};
use crate::roots::{self, RootTol};

/// Wealth thresholds at one habit level, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub h: f64,
    /// Wealth floor `λh/ρ`.
    pub w_bkrp: f64,
    /// Upper edge of the gloom region.
    pub w_low: f64,
    /// Wealth at which consumption equals the reference.
    pub w_ref: f64,
    /// Lower edge of the satisfactory region.
    pub w_peak: f64,
    /// The bliss curve.
    pub w_updt: f64,
}

impl ThresholdSet {
    pub fn as_array(&self) -> [f64; 5] {
        [self.w_bkrp, self.w_low, self.w_ref, self.w_peak, self.w_updt]
    }

    pub const NAMES: [&'static str; 5] = ["w_bkrp", "w_low", "w_ref", "w_peak", "w_updt"];
}

/// `[W_bkrp, W_low, W_ref, W_peak, W_updt]` from a dual slice.
pub fn thresholds_generic<T: Scalar>(p: &ValidatedParams, q: &DualConstants, s: &DualSlice<T>) -> [T; 5] {
    let w_bkrp = s.h * (p.lambda / p.floor_rate());
    let one = T::cst(1.0);
    let (w_low, w_ref) = if s.case == Some(ReferenceCase::Case2) {
        let w_ref = -s.v_y(Branch::F3, one, q);
        (w_ref, w_ref)
    } else {
        (-s.v_y(Branch::F1, s.y_low, q), -s.v_y(Branch::F2, one, q))
    };
    let w_peak = -s.v_y(Branch::F3, s.y_peak, q);
    let w_updt = -s.v_y(Branch::F4, s.y_updt, q);
    [w_bkrp, w_low, w_ref, w_peak, w_updt]
}

pub(crate) fn thresholds_of_slice(p: &ValidatedParams, q: &DualConstants, s: &DualSlice<f64>) -> ThresholdSet {
    let [w_bkrp, w_low, w_ref, w_peak, w_updt] = thresholds_generic(p, q, s);
    ThresholdSet {
        h: s.h,
        w_bkrp,
        w_low,
        w_ref,
        w_peak,
        w_updt,
    }
}

/// Thresholds at `h`.
pub fn thresholds_at(model: &Model, h: f64) -> Result<ThresholdSet> {
    model.thresholds(h)
}

/// Thresholds on an `h`-grid, evaluated in parallel and returned in grid order.
pub fn thresholds_on_grid(model: &Model, hs: &[f64]) -> Result<Vec<ThresholdSet>> {
    hs.par_iter()
        .map(|&h| model.slice_uncached(h).map(|s| s.thresholds))
        .collect()
}

/// The five thresholds as jets in `h`.
pub fn thresholds_jet(model: &Model, h: f64) -> Result<[Jet; 5]> {
    let s = model.jet_slice(h)?;
    Ok(thresholds_generic(model.params(), model.constants(), &s))
}

/// `W_updt(h)` with its first and second derivative.
pub fn w_updt_jet(model: &Model, h: f64) -> Result<Jet> {
    Ok(thresholds_jet(model, h)?[4])
}

/// Habit level `h` on the bliss curve through wealth `x`: `W_updt(h) = x`.
pub fn bliss_inverse(model: &Model, x: f64) -> Result<f64> {
    let cfg = model.config();
    let (h_min, h_max) = (cfg.h_min, cfg.h_max);
    let target = x;
    let f = |h: f64| -> Result<f64> { Ok(model.slice(h)?.thresholds.w_updt - target) };
    let bracket_err = || Error::Bracket {
        what: "bliss inverse",
        target,
        lo: h_min,
        hi: h_max,
    };
    if !x.is_finite() || f(h_min)? > 0.0 {
        return Err(bracket_err());
    }
    // Expand geometrically from below. A sign change is accepted at the first
    // grid point where W_updt exceeds x, so a local dip in W_updt can only
    // delay the bracket, never skip the root.
    let mut lo = h_min;
    let mut hi = 1.0f64.max(2.0 * h_min).min(h_max);
    loop {
        let fh = f(hi)?;
        if fh == 0.0 {
            return Ok(hi);
        }
        if fh > 0.0 {
            break;
        }
        if hi >= h_max {
            return Err(bracket_err());
        }
        lo = hi;
        hi = (2.0 * hi).min(h_max);
    }
    let tol = RootTol {
        x_tol: 4.0 * f64::EPSILON * hi,
        f_tol: cfg.abs_tol + cfg.rel_tol * x.abs(),
        max_iter: cfg.max_iter,
    };
    let mut failure = None;
    let root = roots::newton_bisect(
        "bliss inverse",
        |h| match w_updt_jet(model, h) {
            Ok(j) => (j.v - target, j.d1),
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        },
        lo,
        hi,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    root
}

/// Habit level below which the bliss curve `c = W_updt^{-1}(x)` is concave.
///
/// Returns `None` when `β1 ≥ β2` (the curve is then concave everywhere) or
/// when no sign change of `W''_updt` exists in `(h_min, h_max]`.
pub fn bliss_concavity_threshold(model: &Model) -> Result<Option<f64>> {
    let p = model.params();
    if p.variant == Variant::GeneralReference && !model.is_base_like() {
        return Err(Error::Unsupported("bliss concavity threshold"));
    }
    if p.beta1 >= p.beta2 {
        return Ok(None);
    }
    if model.is_base_like() {
        let (m1, m2) = concavity_constants(p, model.constants());
        if !(m1 > 0.0 && m2 > 0.0) {
            return Ok(None);
        }
        let h_bar = (m1.ln() - m2.ln()) / ((p.alpha - p.lambda) * (model.constants().q2 - 1.0) * p.beta1);
        return Ok((h_bar > 0.0).then_some(h_bar));
    }
    concavity_root(model)
}

/// `(M1, M2)` with `W''_updt(h) = e^{−(1−α)(q2−1)β2 h}[M1·e^{−(α−λ)(q2−1)β1 h} − M2]`.
pub fn concavity_constants(p: &ValidatedParams, q: &DualConstants) -> (f64, f64) {
    let (al, la, b1, b2, ga) = (p.alpha, p.lambda, p.beta1, p.beta2, p.gamma);
    let (q1, q2, k) = (q.q1, q.q2, q.k);
    let d = (1.0 - al) * (q2 - q1) * b2 + (al - la) * (q2 - 1.0) * b1;
    let m1 = k / (ga * ga * b1)
        * (1.0 - q1)
        * (q2 - 1.0).powi(2)
        * (1.0 - al).powf(q2 - 1.0)
        * ((1.0 - al) * q2 * b2 + (al - la) * (q2 - 1.0) * b1)
        / d
        * ((1.0 - al) * b2 + (al - la) * b1).powi(2);
    let m2 = k / (ga * ga) * (b2 - b1) / (b1 * b2) * (1.0 - q1) / (q2 - q1)
        * q2
        * (1.0 - al).powf(q2 + 1.0)
        * (q2 - 1.0).powi(2)
        * b2
        * b2;
    (m1, m2)
}

/// First downward sign change of `W''_updt` on a logarithmic scan, refined by
/// bisection.
fn concavity_root(model: &Model) -> Result<Option<f64>> {
    let cfg = model.config();
    let d2 = |h: f64| w_updt_jet(model, h).map(|j| j.d2);
    let n = 400;
    let (a, b) = (cfg.h_min.max(1e-3).ln(), cfg.h_max.ln());
    let mut prev = (a.exp(), d2(a.exp())?);
    for i in 1..=n {
        let h = (a + (b - a) * i as f64 / n as f64).exp();
        let cur = (h, d2(h)?);
        if prev.1 > 0.0 && cur.1 <= 0.0 {
            let mut err = None;
            let root = roots::bisect(
                |h| match d2(h) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                prev.0,
                cur.0,
                100,
            );
            return match err {
                Some(e) => Err(e),
                None => Ok(Some(root)),
            };
        }
        prev = cur;
    }
    Ok(None)
}
