//! Dual value function: characteristic roots, the eight coefficient functions
//! `C1(h)…C8(h)` and the piecewise solution of the dual ODE.
//!
//! On each of four dual intervals the dual value is
//! `Ṽ(y,h) = C_odd(h)·y^{q1} + C_even(h)·y^{q2} + a0 + a1·y + a2·y·ln y`,
//! where the particular part `(a0, a1, a2)` depends on which consumption
//! regime the interval corresponds to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::params::{Phi, ValidatedParams, Variant};
use crate::quad::gauss_legendre;

/// Constants of the homogeneous dual ODE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualConstants {
    /// `(r − μ)² / (2σ²)`.
    pub k: f64,
    /// Negative characteristic root.
    pub q1: f64,
    /// Characteristic root above one.
    pub q2: f64,
}

/// Roots of `k·q² − (k + r − γ)·q − γ = 0`.
pub fn dual_constants(p: &ValidatedParams) -> Result<DualConstants> {
    let k = (p.r - p.mu).powi(2) / (2.0 * p.sigma * p.sigma);
    if !(k > 0.0) {
        return Err(Error::DegenerateMarket);
    }
    let a = match p.variant {
        Variant::GeneralRate => k + p.r - p.gamma,
        _ => k,
    };
    let d = (a * a + 4.0 * k * p.gamma).sqrt();
    // a + d > 0 because d > |a|; the product form avoids cancellation in q1.
    let q2 = (a + d) / (2.0 * k);
    let q1 = -2.0 * p.gamma / (a + d);
    Ok(DualConstants { k, q1, q2 })
}

impl DualConstants {
    /// Relative residual of the characteristic equation at both roots.
    pub fn residual(&self, p: &ValidatedParams) -> f64 {
        let a = match p.variant {
            Variant::GeneralRate => self.k + p.r - p.gamma,
            _ => self.k,
        };
        [self.q1, self.q2]
            .iter()
            .map(|&q| {
                let terms = [self.k * q * q, a * q, p.gamma];
                let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
                (terms[0] - terms[1] - terms[2]).abs() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Which coefficient family applies under the general reference point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceCase {
    /// All four consumption regimes are present.
    Case1,
    /// The below-reference interior regime is empty.
    Case2,
}

/// The eight coefficients at one habit level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub h: f64,
    /// `c[0]` is `C1`, …, `c[7]` is `C8`.
    pub c: [f64; 8],
    pub case_tag: Option<ReferenceCase>,
}

impl CoefficientSet {
    /// `C_i` with one-based `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.c[i - 1]
    }
}

/// Particular solution `a0 + a1·y + a2·y·ln y` on one dual interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particular<T> {
    pub a0: T,
    pub a1: T,
    pub a2: T,
}

/// Dual branch index: F1 (gloom) … F4 (satisfactory).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    F1,
    F2,
    F3,
    F4,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::F1, Branch::F2, Branch::F3, Branch::F4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::F1 => "F1",
            Branch::F2 => "F2",
            Branch::F3 => "F3",
            Branch::F4 => "F4",
        }
    }
}

/// Everything about the dual solution at a fixed habit level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSlice<T> {
    pub h: T,
    pub c: [T; 8],
    pub part: [Particular<T>; 4],
    /// F1/F2 boundary (equals `y_ref` when the F2 interval is empty).
    pub y_low: T,
    /// F2/F3 boundary.
    pub y_ref: T,
    /// F3/F4 boundary.
    pub y_peak: T,
    /// Lower edge of the dual effective region.
    pub y_updt: T,
    pub case: Option<ReferenceCase>,
}

impl<T: Scalar> DualSlice<T> {
    /// Branch whose half-open interval contains `y`, or `None` below `y_updt`.
    pub fn branch_of(&self, y: f64) -> Option<Branch> {
        if y >= self.y_low.value() {
            Some(Branch::F1)
        } else if y >= self.y_ref.value() {
            Some(Branch::F2)
        } else if y >= self.y_peak.value() {
            Some(Branch::F3)
        } else if y >= self.y_updt.value() {
            Some(Branch::F4)
        } else {
            None
        }
    }

    #[inline]
    fn hom(&self, b: Branch) -> (T, T) {
        let i = 2 * b.index();
        (self.c[i], self.c[i + 1])
    }

    /// `Ṽ` evaluated with the formula of branch `b`.
    pub fn v(&self, b: Branch, y: T, q: &DualConstants) -> T {
        let (ca, cb) = self.hom(b);
        let p = &self.part[b.index()];
        ca * y.powf(q.q1) + cb * y.powf(q.q2) + p.a0 + p.a1 * y + p.a2 * y * y.ln()
    }

    /// `Ṽ_y` evaluated with the formula of branch `b`.
    pub fn v_y(&self, b: Branch, y: T, q: &DualConstants) -> T {
        let (ca, cb) = self.hom(b);
        let p = &self.part[b.index()];
        ca * y.powf(q.q1 - 1.0) * q.q1 + cb * y.powf(q.q2 - 1.0) * q.q2 + p.a1 + p.a2 * (y.ln() + 1.0)
    }

    /// `Ṽ_yy` evaluated with the formula of branch `b`.
    pub fn v_yy(&self, b: Branch, y: T, q: &DualConstants) -> T {
        let (ca, cb) = self.hom(b);
        let p = &self.part[b.index()];
        ca * y.powf(q.q1 - 2.0) * (q.q1 * (q.q1 - 1.0)) + cb * y.powf(q.q2 - 2.0) * (q.q2 * (q.q2 - 1.0)) + p.a2 / y
    }

    /// Value-only projection.
    pub fn values(&self) -> DualSlice<f64> {
        let v = |t: T| t.value();
        let pv = |p: &Particular<T>| Particular {
            a0: p.a0.value(),
            a1: p.a1.value(),
            a2: p.a2.value(),
        };
        DualSlice {
            h: v(self.h),
            c: self.c.map(v),
            part: [
                pv(&self.part[0]),
                pv(&self.part[1]),
                pv(&self.part[2]),
                pv(&self.part[3]),
            ],
            y_low: v(self.y_low),
            y_ref: v(self.y_ref),
            y_peak: v(self.y_peak),
            y_updt: v(self.y_updt),
            case: self.case,
        }
    }

    pub fn coefficient_set(&self) -> CoefficientSet {
        CoefficientSet {
            h: self.h.value(),
            c: self.c.map(|t| t.value()),
            case_tag: self.case,
        }
    }
}

/// Shared scalar groups that appear throughout the coefficient formulas.
struct Groups {
    kk: f64,
    ca: f64,
    cb: f64,
    w: f64,
    db: f64,
    d: f64,
}

fn groups(p: &ValidatedParams, q: &DualConstants) -> Groups {
    let w = q.q2 - q.q1;
    Groups {
        kk: q.k / (p.gamma * p.gamma),
        ca: (1.0 - q.q1) / w,
        cb: (q.q2 - 1.0) / w,
        w,
        db: (p.beta2 - p.beta1) / (p.beta1 * p.beta2),
        d: (1.0 - p.alpha) * w * p.beta2 + (p.alpha - p.lambda) * (q.q2 - 1.0) * p.beta1,
    }
}

/// Coefficients when the discount rate equals the interest rate.
pub fn base_coefficients<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T) -> [T; 8] {
    let (al, la, b1, b2) = (p.alpha, p.lambda, p.beta1, p.beta2);
    let (q1, q2) = (q.q1, q.q2);
    let g = groups(p, q);

    let c4 = (h * (-(al - la) * (q2 - 1.0) * b1)).exp() * (-g.kk / b1 * g.ca);
    let c6 = c4 + g.kk * g.db * g.ca;
    let c8 = c6 + (h * ((1.0 - al) * (q2 - 1.0) * b2)).exp() * (g.kk / b2 * g.ca);
    let tail = (h * (-(1.0 - al) * (1.0 - q1) * b2)).exp();
    let scale = (1.0 - al).powf(g.w);
    let c7 =
        (h * -g.d).exp() * (scale * g.kk * g.ca * (al - la) * (q2 - 1.0) / g.d) + tail * (scale * g.kk / b2 * g.cb);
    let c5 = c7 - tail * (g.kk / b2 * g.cb);
    let c3 = c5 - g.kk * g.db * g.cb;
    let c1 = c3 + (h * ((al - la) * (1.0 - q1) * b1)).exp() * (g.kk / b1 * g.cb);
    [c1, T::cst(0.0), c3, c4, c5, c6, c7, c8]
}

/// Coefficients when the discount rate differs from the interest rate.
pub fn rate_coefficients<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T) -> [T; 8] {
    let (al, la, b1, b2, r, ga) = (p.alpha, p.lambda, p.beta1, p.beta2, p.r, p.gamma);
    let (q1, q2) = (q.q1, q.q2);
    let g = groups(p, q);
    let e = (ga - 2.0 * r + q.k) / (r * r);
    let pp = -q1 / ga + 1.0 / r - e * (q1 - 1.0);
    let pm = -q2 / ga + 1.0 / r - e * (q2 - 1.0);

    let c4 = (h * (-(al - la) * (q2 - 1.0) * b1)).exp() * (-pp / (g.w * b1));
    let c6 = c4 + g.db * pp / g.w;
    let c8 = c6 + (h * ((1.0 - al) * (q2 - 1.0) * b2)).exp() * (pp / (g.w * b2));
    let tail = (h * (-(1.0 - al) * (1.0 - q1) * b2)).exp();
    let scale = (1.0 - al).powf(g.w);
    // The last term keeps Ṽ_h = 0 on the updating boundary when r ≠ γ.
    let c7 = (h * -g.d).exp() * (scale * pp * (al - la) * (q2 - 1.0) / (g.w * g.d))
        + tail * (scale * pp / ((1.0 - q1) * b2) * g.cb)
        + tail * ((1.0 / ga - 1.0 / r) * (1.0 - al).powf(-q1) / ((1.0 - q1) * b2));
    let c5 = c7 + tail * (pm / (g.w * b2));
    let c3 = c5 + g.db * pm / g.w;
    let c1 = c3 + (h * ((al - la) * (1.0 - q1) * b1)).exp() * (-pm / (g.w * b1));
    [c1, T::cst(0.0), c3, c4, c5, c6, c7, c8]
}

/// `ln[(1 − αφ)e^{[(α−λ) − (1−λ)αφ]β1 h}]`; positive exactly in Case 1.
pub fn reference_case_indicator<T: Scalar>(p: &ValidatedParams, h: T) -> T {
    let phi = p.phi.eval(h);
    let s = -(phi * p.alpha) + 1.0;
    let a = -(phi * ((1.0 - p.lambda) * p.alpha)) + (p.alpha - p.lambda);
    s.ln() + a * h * p.beta1
}

/// Band around the Case 1/Case 2 switch inside which both families are tried.
const CASE_BAND: f64 = 1e-12;

fn reference_c8<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T, case: ReferenceCase) -> T {
    reference_even(p, q, h, case)[3]
}

/// `[C2, C4, C6, C8]` under the general reference point.
fn reference_even<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T, case: ReferenceCase) -> [T; 4] {
    let (al, la, b1, b2, ga) = (p.alpha, p.lambda, p.beta1, p.beta2, p.gamma);
    let (q1, q2) = (q.q1, q.q2);
    let g = groups(p, q);
    let phi = p.phi.eval(h);
    let s = -(phi * al) + 1.0;
    let a = -(phi * ((1.0 - la) * al)) + (al - la);
    let inv_s = s.recip();
    let ln_inv_s = inv_s.ln();
    let s_q2 = s.powf(-q2);
    let top = (h * ((1.0 - al) * (q2 - 1.0) * b2)).exp() * s_q2 * (g.kk / b2 * g.ca);
    match case {
        ReferenceCase::Case1 => {
            let c4 = (a * h * (-(q2 - 1.0) * b1)).exp() * s_q2 * (-g.kk / b1 * g.ca);
            let c6 = c4
                + inv_s * (g.kk * g.db * g.ca)
                + phi * inv_s * (al * g.db * q1 / (g.w * ga))
                + inv_s * ln_inv_s * (g.db * g.ca / ga);
            [T::cst(0.0), c4, c6, c6 + top]
        }
        ReferenceCase::Case2 => {
            let e1 = -(a * h * b1).exp() + 1.0;
            let c6 = -(h * (g.ca * la / ga)) - e1 * (q1 / g.w / (ga * b1)) - inv_s * ln_inv_s * (g.ca / (ga * b2))
                + (-inv_s + 1.0) * (q1 / g.w / (ga * b2))
                + h * (-phi + 1.0) * inv_s * (g.ca * al / ga)
                - inv_s * (g.ca * g.kk / b2);
            [T::cst(0.0), T::cst(0.0), c6, c6 + top]
        }
    }
}

/// `[C1, C3, C5]` from `C7` under the general reference point.
fn reference_odd<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T, case: ReferenceCase, c7: T) -> [T; 3] {
    let (al, la, b1, b2, ga) = (p.alpha, p.lambda, p.beta1, p.beta2, p.gamma);
    let (q1, q2) = (q.q1, q.q2);
    let g = groups(p, q);
    let phi = p.phi.eval(h);
    let s = -(phi * al) + 1.0;
    let a = -(phi * ((1.0 - la) * al)) + (al - la);
    let inv_s = s.recip();
    let ln_inv_s = inv_s.ln();
    let s_q1 = s.powf(-q1);
    let c5 = c7 - (h * (-(1.0 - al) * (1.0 - q1) * b2)).exp() * s_q1 * (g.kk / b2 * g.cb);
    match case {
        ReferenceCase::Case1 => {
            let c3 = c5 - inv_s * (g.kk * g.db * g.cb) + phi * inv_s * (al * g.db * q2 / (g.w * ga))
                - inv_s * ln_inv_s * (g.db * g.cb / ga);
            let c1 = c3 + (a * h * ((1.0 - q1) * b1)).exp() * s_q1 * (g.kk / b1 * g.cb);
            [c1, c3, c5]
        }
        ReferenceCase::Case2 => {
            let e1 = -(a * h * b1).exp() + 1.0;
            let c1 = c5 + h * (g.cb * la / ga) - e1 * (q2 / g.w / (ga * b1))
                + inv_s * ln_inv_s * (g.cb / (ga * b2))
                + (-inv_s + 1.0) * (q2 / g.w / (ga * b2))
                - h * (-phi + 1.0) * inv_s * (g.cb * al / ga)
                + inv_s * (g.cb * g.kk / b2);
            [c1, T::cst(0.0), c5]
        }
    }
}

fn reference_case_at(p: &ValidatedParams, h: f64) -> ReferenceCase {
    if reference_case_indicator(p, h) > 0.0 {
        ReferenceCase::Case1
    } else {
        ReferenceCase::Case2
    }
}

/// `y_updt(s)^{q2−q1}`, the weight in the updating-boundary ODE for `C7`.
fn updating_weight<T: Scalar>(p: &ValidatedParams, q: &DualConstants, s: T) -> T {
    let w = q.q2 - q.q1;
    (s * (-(1.0 - p.alpha) * w * p.beta2)).exp() * (1.0 - p.alpha).powf(w)
}

/// Number of decay lengths integrated before the tail is dropped.
const TAIL_LENGTHS: usize = 60;
/// Sub-samples per panel when scanning for Case 1/Case 2 switches.
const SWITCH_SCAN: usize = 8;

/// `C7(h) = ∫_h^∞ C8'(s)·y_updt(s)^{q2−q1} ds`.
///
/// This is the solution of `Ṽ_h = 0` on the updating boundary that vanishes
/// as `h → ∞`. The integrand decays like `e^{−(1−α)(1−q1)β2 s}`.
fn reference_c7_value(p: &ValidatedParams, q: &DualConstants, h: f64) -> f64 {
    let decay = (1.0 - p.alpha) * (1.0 - q.q1) * p.beta2;
    let width = 1.0 / decay;
    let mut breaks = Vec::with_capacity(TAIL_LENGTHS + 4);
    breaks.push(h);
    for i in 0..TAIL_LENGTHS {
        let a = h + i as f64 * width;
        let b = a + width;
        // Split panels at sign changes of the case indicator so every panel
        // integrates a smooth function.
        let mut prev = (a, reference_case_indicator(p, a));
        for j in 1..=SWITCH_SCAN {
            let t = a + width * j as f64 / SWITCH_SCAN as f64;
            let cur = (t, reference_case_indicator(p, t));
            if (prev.1 > 0.0) != (cur.1 > 0.0) {
                let root = crate::roots::bisect(|s| reference_case_indicator(p, s), prev.0, cur.0, 80);
                breaks.push(root);
            }
            prev = cur;
        }
        breaks.push(b);
    }
    let integrand = |s: f64| {
        let case = reference_case_at(p, s);
        let c8 = reference_c8(p, q, Jet::variable(s), case);
        c8.d1 * updating_weight(p, q, s)
    };
    breaks.windows(2).map(|w| gauss_legendre(integrand, w[0], w[1])).sum()
}

fn reference_coefficients_in_case<T: Scalar>(
    p: &ValidatedParams,
    q: &DualConstants,
    h: T,
    case: ReferenceCase,
) -> [T; 8] {
    let even = reference_even(p, q, h, case);
    let c7_value = reference_c7_value(p, q, h.value());
    let c7 = T::tail_integral(c7_value, even[3], updating_weight(p, q, h));
    let odd = reference_odd(p, q, h, case, c7);
    [odd[0], even[0], odd[1], even[1], odd[2], even[2], c7, even[3]]
}

/// Particular solutions on the four dual intervals.
fn particulars<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T, phi: T) -> [Particular<T>; 4] {
    let (al, la, b1, b2, ga) = (p.alpha, p.lambda, p.beta1, p.beta2, p.gamma);
    let rho = p.floor_rate();
    let s = -(phi * al) + 1.0;
    let a = -(phi * ((1.0 - la) * al)) + (al - la);
    let zero = T::cst(0.0);
    let interior = |beta: f64| {
        let a2 = s.recip() / (rho * beta);
        let a1 =
            s.recip() * ((ga - 2.0 * rho + q.k) / (rho * rho * beta)) - s.ln() * a2 - h * (-phi + 1.0) / s * (al / rho);
        Particular {
            a0: T::cst(1.0 / (ga * beta)),
            a1,
            a2,
        }
    };
    [
        Particular {
            a0: (-(a * h * b1).exp() + 1.0) / (ga * b1),
            a1: h * (-la / rho),
            a2: zero,
        },
        interior(b1),
        interior(b2),
        Particular {
            a0: (-(h * (-(1.0 - al) * b2)).exp() + 1.0) / (ga * b2),
            a1: h * (-1.0 / rho),
            a2: zero,
        },
    ]
}

/// Builds the dual solution at `h` for the active variant.
///
/// The caller is responsible for range checks on `h`.
pub fn dual_slice<T: Scalar>(p: &ValidatedParams, q: &DualConstants, h: T) -> Result<DualSlice<T>> {
    let general_reference = p.variant == Variant::GeneralReference && !matches!(p.phi, Phi::Zero);

    let (c, case) = if general_reference {
        let ind = reference_case_indicator(p, h).value();
        if ind > CASE_BAND {
            (
                reference_coefficients_in_case(p, q, h, ReferenceCase::Case1),
                ReferenceCase::Case1,
            )
        } else if ind < -CASE_BAND {
            (
                reference_coefficients_in_case(p, q, h, ReferenceCase::Case2),
                ReferenceCase::Case2,
            )
        } else {
            let one = reference_coefficients_in_case(p, q, h, ReferenceCase::Case1);
            let two = reference_coefficients_in_case(p, q, h, ReferenceCase::Case2);
            let r1 = assemble(p, q, h, one, Some(ReferenceCase::Case1)).residual_scale(q);
            let r2 = assemble(p, q, h, two, Some(ReferenceCase::Case2)).residual_scale(q);
            if r1 <= r2 {
                (one, ReferenceCase::Case1)
            } else {
                (two, ReferenceCase::Case2)
            }
        }
    } else {
        let c = match p.variant {
            Variant::GeneralRate => rate_coefficients(p, q, h),
            _ => base_coefficients(p, q, h),
        };
        (c, ReferenceCase::Case1)
    };
    let case_tag = (p.variant == Variant::GeneralReference).then_some(case);
    let slice = assemble(p, q, h, c, case_tag);

    let finite = slice.c.iter().all(|v| v.value().is_finite())
        && slice
            .part
            .iter()
            .all(|v| v.a0.value().is_finite() && v.a1.value().is_finite())
        && slice.y_low.value().is_finite()
        && slice.y_updt.value() > 0.0;
    if !finite {
        return Err(Error::NumericOverflow {
            what: "dual coefficients",
            h: h.value(),
        });
    }
    Ok(slice)
}

fn assemble<T: Scalar>(
    p: &ValidatedParams,
    q: &DualConstants,
    h: T,
    c: [T; 8],
    case_tag: Option<ReferenceCase>,
) -> DualSlice<T> {
    let (al, la, b1, b2) = (p.alpha, p.lambda, p.beta1, p.beta2);
    let phi = p.phi.eval(h);
    let s = -(phi * al) + 1.0;
    let a = -(phi * ((1.0 - la) * al)) + (al - la);
    let peak = (h * (-(1.0 - al) * b2)).exp();
    let y_low = match case_tag {
        Some(ReferenceCase::Case2) => T::cst(1.0),
        _ => s * (a * h * b1).exp(),
    };
    DualSlice {
        h,
        c,
        part: particulars(p, q, h, phi),
        y_low,
        y_ref: T::cst(1.0),
        y_peak: s * peak,
        y_updt: peak * (1.0 - al),
        case: case_tag,
    }
}

impl<T: Scalar> DualSlice<T> {
    /// Largest smooth-fit mismatch, used only to break ties near a case switch.
    fn residual_scale(&self, q: &DualConstants) -> f64 {
        smooth_fit_mismatch(&self.values(), q)
            .iter()
            .map(|m| m.value.abs() / m.value_scale + m.slope.abs() / m.slope_scale)
            .fold(0.0, f64::max)
    }
}

/// Value and slope mismatch at one interior dual boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMismatch {
    pub y: f64,
    /// `Ṽ(y+) − Ṽ(y−)`.
    pub value: f64,
    /// `Ṽ_y(y+) − Ṽ_y(y−)`.
    pub slope: f64,
    /// `max(1, |Ṽ(y)|)`, the scale for relative comparisons.
    pub value_scale: f64,
    /// `max(1, |Ṽ_y(y)|)`.
    pub slope_scale: f64,
}

fn smooth_fit_mismatch(s: &DualSlice<f64>, q: &DualConstants) -> Vec<BoundaryMismatch> {
    let mut pairs = Vec::with_capacity(3);
    if s.case == Some(ReferenceCase::Case2) {
        pairs.push((s.y_ref, Branch::F1, Branch::F3));
    } else {
        pairs.push((s.y_low, Branch::F1, Branch::F2));
        pairs.push((s.y_ref, Branch::F2, Branch::F3));
    }
    pairs.push((s.y_peak, Branch::F3, Branch::F4));
    pairs
        .into_iter()
        .map(|(y, upper, lower)| {
            let vu = s.v(upper, y, q);
            let vl = s.v(lower, y, q);
            let du = s.v_y(upper, y, q);
            let dl = s.v_y(lower, y, q);
            BoundaryMismatch {
                y,
                value: vu - vl,
                slope: du - dl,
                value_scale: vu.abs().max(1.0),
                slope_scale: du.abs().max(1.0),
            }
        })
        .collect()
}

/// Smooth-fit diagnostics for a coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub h: f64,
    /// One entry per interior boundary (two in Case 2, three otherwise).
    pub boundaries: Vec<BoundaryMismatch>,
    /// `Ṽ_h` at `y = y_updt(h)`, from the closed forms at the same `h`.
    pub v_h_updt: f64,
    /// `max(1, |Ṽ(y_updt)|)`.
    pub v_h_scale: f64,
}

impl ResidualReport {
    /// Largest residual relative to its scale.
    pub fn max_relative(&self) -> f64 {
        self.boundaries
            .iter()
            .flat_map(|b| [b.value.abs() / b.value_scale, b.slope.abs() / b.slope_scale])
            .chain(std::iter::once(self.v_h_updt.abs() / self.v_h_scale))
            .fold(0.0, f64::max)
    }
}

/// Checks value and slope continuity of `Ṽ` across the interior boundaries
/// using `coeffs`, and `Ṽ_h = 0` on the updating boundary.
pub fn smooth_fit_residuals(p: &ValidatedParams, q: &DualConstants, coeffs: &CoefficientSet) -> Result<ResidualReport> {
    let h = coeffs.h;
    let mut slice = dual_slice(p, q, h)?;
    slice.c = coeffs.c;
    let boundaries = smooth_fit_mismatch(&slice, q);

    let jet = dual_slice(p, q, Jet::variable(h))?;
    let y_u = Jet::cst(jet.y_updt.v);
    let v_h = jet.v(Branch::F4, y_u, q);
    Ok(ResidualReport {
        h,
        boundaries,
        v_h_updt: v_h.d1,
        v_h_scale: v_h.v.abs().max(1.0),
    })
}

/// The coefficient set at `h`.
pub fn coefficients(p: &ValidatedParams, q: &DualConstants, h: f64) -> Result<CoefficientSet> {
    Ok(dual_slice(p, q, h)?.coefficient_set())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    fn base() -> (ValidatedParams, DualConstants) {
        let p = ModelParams::base().validate().unwrap();
        let q = dual_constants(&p).unwrap();
        (p, q)
    }

    #[test]
    fn base_roots() {
        let (p, q) = base();
        assert!((q.k - 0.0064 / 0.18).abs() < 1e-16);
        assert!((q.q1 + q.q2 - 1.0).abs() < 1e-15);
        assert!(q.residual(&p) < 1e-14);
        assert!((q.q1 - (-0.672603939955857388641407528386116570147)).abs() < 1e-14);
    }

    #[test]
    fn base_coefficients_match_extended_precision() {
        let (p, q) = base();
        let c = coefficients(&p, &q, 4.0).unwrap();
        let expected = [
            89.359152460576324075,
            0.0,
            -3.2405959896512630051,
            -5.4028905463320015389,
            -0.053937282491378941721,
            2.5215618576192255089,
            0.0036026257671244088806,
            42.33492749606284491,
        ];
        for (got, want) in c.c.iter().zip(expected) {
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-3), "{got} vs {want}");
        }
    }

    #[test]
    fn rate_coefficients_reduce_to_base() {
        let (p, q) = base();
        for h in [0.3, 1.0, 4.0, 12.0] {
            let a: [f64; 8] = base_coefficients(&p, &q, h);
            let b: [f64; 8] = rate_coefficients(&p, &q, h);
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-6));
            }
        }
    }
}
