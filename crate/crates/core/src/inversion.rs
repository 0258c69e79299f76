//! Inverse of the dual transform: `y = f(x, h)` solves `x = −Ṽ_y(y, h)`.

use serde::{Deserialize, Serialize};

use crate::dual::{Branch, DualSlice};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::model::Model;
use crate::params::{classify_region, RegionLabel};
use crate::roots::{self, RootTol};
use crate::thresholds::ThresholdSet;

/// `Ṽ` and its derivatives at one dual point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualValue {
    pub v_tilde: f64,
    pub v_tilde_y: f64,
    pub v_tilde_yy: f64,
    pub v_tilde_h: f64,
}

/// Result of inverting the dual transform at a wealth level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    /// Dual variable; `+∞` exactly at the wealth floor.
    pub y: f64,
    pub region: RegionLabel,
    pub f_branch: Branch,
}

fn check_dual_region(s: &DualSlice<f64>, y: f64) -> Result<Branch> {
    s.branch_of(y).ok_or(Error::OutOfDualRegion {
        y,
        lower: s.y_updt,
        h: s.h,
    })
}

/// `Ṽ`, `Ṽ_y`, `Ṽ_yy` and `Ṽ_h` at `(y, h)`.
pub fn dual_value(model: &Model, y: f64, h: f64) -> Result<DualValue> {
    let s = model.slice(h)?;
    let b = check_dual_region(&s.dual, y)?;
    dual_value_on(model, b, y, h)
}

/// Like [`dual_value`] with the branch formula chosen by the caller, which
/// gives the one-sided values at an interval edge.
pub fn dual_value_on(model: &Model, b: Branch, y: f64, h: f64) -> Result<DualValue> {
    let q = model.constants();
    let s = model.slice(h)?;
    let d = &s.dual;
    let jet = model.jet_slice(h)?;
    Ok(DualValue {
        v_tilde: d.v(b, y, q),
        v_tilde_y: d.v_y(b, y, q),
        v_tilde_yy: d.v_yy(b, y, q),
        v_tilde_h: jet.v(b, Jet::cst(y), q).d1,
    })
}

/// Branch serving the effective region `label`.
pub fn branch_for(label: RegionLabel) -> Option<Branch> {
    match label {
        RegionLabel::Gloom => Some(Branch::F1),
        RegionLabel::Depression => Some(Branch::F2),
        RegionLabel::Recovery => Some(Branch::F3),
        RegionLabel::Satisfactory => Some(Branch::F4),
        RegionLabel::Bankrupt | RegionLabel::AboveBliss => None,
    }
}

/// Solves `x = −Ṽ_y(y, h)` for the dual variable.
pub fn invert(model: &Model, x: f64, h: f64) -> Result<DualPoint> {
    let s = model.slice(h)?;
    invert_on(model, &s.dual, &s.thresholds, x)
}

/// [`invert`] against an already computed slice.
pub fn invert_on(model: &Model, d: &DualSlice<f64>, t: &ThresholdSet, x: f64) -> Result<DualPoint> {
    let region = classify_region(t, x);
    let out_of_region = || Error::OutOfEffectiveRegion {
        x,
        h: t.h,
        lower: t.w_bkrp,
        upper: t.w_updt,
    };
    let f_branch = branch_for(region).ok_or_else(out_of_region)?;
    if x.is_nan() {
        return Err(out_of_region());
    }
    let y = match f_branch {
        Branch::F1 => invert_gloom(model, d, t, x),
        Branch::F2 => invert_interior(model, d, f_branch, x, (t.w_ref, d.y_ref), (t.w_low, d.y_low))?,
        Branch::F3 => invert_interior(model, d, f_branch, x, (t.w_peak, d.y_peak), (t.w_ref, d.y_ref))?,
        Branch::F4 => invert_interior(model, d, f_branch, x, (t.w_updt, d.y_updt), (t.w_peak, d.y_peak))?,
    };
    Ok(DualPoint { y, region, f_branch })
}

/// Closed form on the gloom branch, where `C2 = 0` leaves a single power.
fn invert_gloom(model: &Model, d: &DualSlice<f64>, t: &ThresholdSet, x: f64) -> f64 {
    if x == t.w_low {
        return d.y_low;
    }
    let q1 = model.constants().q1;
    let excess = x - t.w_bkrp;
    if excess <= 0.0 {
        return f64::INFINITY;
    }
    (excess / (-d.c[0] * q1)).powf(1.0 / (q1 - 1.0)).max(d.y_low)
}

/// Solves on an interior branch. `closed` is the (threshold, y) pair at the
/// closed end of the wealth interval, `open` the other end.
fn invert_interior(
    model: &Model,
    d: &DualSlice<f64>,
    b: Branch,
    x: f64,
    closed: (f64, f64),
    open: (f64, f64),
) -> Result<f64> {
    if x == closed.0 {
        return Ok(closed.1);
    }
    let q = model.constants();
    let cfg = model.config();
    // g(t) = −Ṽ_y(e^t) − x is strictly decreasing in t.
    let g = |t: f64| {
        let y = t.exp();
        (-d.v_y(b, y, q) - x, -d.v_yy(b, y, q) * y)
    };
    let (lo, hi) = (closed.1.min(open.1).ln(), closed.1.max(open.1).ln());
    let tol = RootTol {
        x_tol: cfg.y_tol,
        f_tol: 0.0,
        max_iter: cfg.max_iter,
    };
    let (g_lo, g_hi) = (g(lo).0, g(hi).0);
    // Rounding can leave x a hair outside the images of the interval ends.
    if g_lo <= 0.0 {
        return Ok(lo.exp());
    }
    if g_hi >= 0.0 {
        return Ok(hi.exp());
    }
    let t = roots::newton_bisect("dual inversion", g, lo, hi, tol)?;
    let y = t.exp();
    let residual = (x + d.v_y(b, y, q)).abs();
    if residual > cfg.abs_tol + cfg.rel_tol * x.abs() {
        return Err(Error::Convergence {
            what: "dual inversion",
            best: y,
            residual,
        });
    }
    Ok(y)
}

/// `V(x, h) = Ṽ(f(x,h), h) + x·f(x,h)`.
pub fn primal_value(model: &Model, x: f64, h: f64) -> Result<f64> {
    let s = model.slice(h)?;
    let pt = invert_on(model, &s.dual, &s.thresholds, x)?;
    Ok(value_at(model, &s.dual, &pt, x))
}

pub(crate) fn value_at(model: &Model, d: &DualSlice<f64>, pt: &DualPoint, x: f64) -> f64 {
    if pt.y.is_infinite() {
        // C1·y^{q1} → 0 and the linear terms cancel against x·y at the floor.
        return d.part[0].a0;
    }
    d.v(pt.f_branch, pt.y, model.constants()) + x * pt.y
}

/// `∂f/∂x = −1/Ṽ_yy`.
pub fn f_x(model: &Model, x: f64, h: f64) -> Result<f64> {
    let s = model.slice(h)?;
    let pt = invert_on(model, &s.dual, &s.thresholds, x)?;
    if pt.y.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-1.0 / s.dual.v_yy(pt.f_branch, pt.y, model.constants()))
}

/// `∂f/∂h = −Ṽ_yh/Ṽ_yy`.
pub fn f_h(model: &Model, x: f64, h: f64) -> Result<f64> {
    let s = model.slice(h)?;
    let pt = invert_on(model, &s.dual, &s.thresholds, x)?;
    if pt.y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let q = model.constants();
    let jet = model.jet_slice(h)?;
    let v_yh = jet.v_y(pt.f_branch, Jet::cst(pt.y), q).d1;
    Ok(-v_yh / s.dual.v_yy(pt.f_branch, pt.y, q))
}
