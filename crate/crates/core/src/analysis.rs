//! Parameter sweeps and the limiting cases `β1 → 0` and `β2 → 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, SolverConfig};
use crate::params::{ModelParams, Variant};
use crate::policy::evaluate_on;
use crate::thresholds::ThresholdSet;

/// Preference parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    Lambda,
    Beta1,
    Beta2,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Lambda => "lambda",
            SweepParam::Beta1 => "beta1",
            SweepParam::Beta2 => "beta2",
        }
    }

    fn apply(self, p: &mut ModelParams, v: f64) {
        match self {
            SweepParam::Alpha => p.alpha = v,
            SweepParam::Lambda => p.lambda = v,
            SweepParam::Beta1 => p.beta1 = v,
            SweepParam::Beta2 => p.beta2 = v,
        }
    }
}

/// Output quantity of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    /// The five thresholds on the `h` grid.
    Thresholds,
    /// `c*` along a wealth grid at each `h`.
    Consumption,
    /// `π*/x` along a wealth grid at each `h`.
    Proportion,
}

/// Wealth grid for the policy quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XGrid {
    /// `n` evenly spaced points from just above `W_bkrp(h)` to `W_updt(h)`
    /// of each swept model.
    Steps(usize),
    /// The same wealth levels for every swept value; points outside a
    /// model's effective region are skipped.
    Fixed(Vec<f64>),
}

/// A one-parameter sensitivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
    /// Parameters held fixed; the swept entry is overwritten.
    pub held: ModelParams,
    pub h_grid: Vec<f64>,
    pub quantity: SweepQuantity,
    pub x_grid: XGrid,
}

impl SweepSpec {
    /// `α` from just above `λ = 0.2` to `1 − 1e-8`, thresholds on `h ∈ [0.1, 20]`.
    pub fn alpha_default(n: usize) -> Self {
        let lambda = 0.2;
        let (lo, hi) = (lambda + 1e-6, 1.0 - 1e-8);
        let mut held = ModelParams::base();
        held.lambda = lambda;
        Self {
            parameter: SweepParam::Alpha,
            values: linspace(lo, hi, n),
            held,
            h_grid: linspace(0.1, 20.0, 200),
            quantity: SweepQuantity::Thresholds,
            x_grid: XGrid::Steps(200),
        }
    }

    /// `λ` from 0 to just below `α = 0.7`, thresholds on `h ∈ [0.1, 20]`.
    pub fn lambda_default(n: usize) -> Self {
        let alpha = 0.7;
        let mut held = ModelParams::base();
        held.alpha = alpha;
        Self {
            parameter: SweepParam::Lambda,
            values: linspace(0.0, alpha - 1e-6, n),
            held,
            h_grid: linspace(0.1, 20.0, 200),
            quantity: SweepQuantity::Thresholds,
            x_grid: XGrid::Steps(200),
        }
    }
}

/// `n` evenly spaced points on `[a, b]`, both ends included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// One row of a long-format sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_param: String,
    pub swept_value: f64,
    pub h: f64,
    pub x: Option<f64>,
    pub quantity: String,
    pub value: f64,
}

/// Runs a sweep. Rows follow the order of the `SweepSpec`: swept value, then `h`, then `x`,
/// then quantity.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, SolverConfig::default())
}

pub fn run_sweep_with(spec: &SweepSpec, config: SolverConfig) -> Result<Vec<SweepRow>> {
    let blocks: Vec<Vec<SweepRow>> = spec
        .values
        .par_iter()
        .map(|&v| sweep_value(spec, config, v).map_err(|e| annotate(spec.parameter, v, e)))
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn annotate(param: SweepParam, v: f64, e: Error) -> Error {
    match e {
        Error::ParamDomain(msgs) => Error::ParamDomain(
            msgs.into_iter()
                .map(|m| format!("{} = {v}: {m}", param.as_str()))
                .collect(),
        ),
        other => other,
    }
}

fn sweep_value(spec: &SweepSpec, config: SolverConfig, v: f64) -> Result<Vec<SweepRow>> {
    let mut p = spec.held;
    spec.parameter.apply(&mut p, v);
    let model = Model::with_config(&p, config)?;
    let name = spec.parameter.as_str();
    let row = |h: f64, x: Option<f64>, quantity: &str, value: f64| SweepRow {
        swept_param: name.to_string(),
        swept_value: v,
        h,
        x,
        quantity: quantity.to_string(),
        value,
    };
    let mut rows = Vec::new();
    for &h in &spec.h_grid {
        let s = model.slice_uncached(h)?;
        let t: &ThresholdSet = &s.thresholds;
        match spec.quantity {
            SweepQuantity::Thresholds => {
                for (q, w) in ThresholdSet::NAMES.iter().zip(t.as_array()) {
                    rows.push(row(h, None, q, w));
                }
            }
            SweepQuantity::Consumption | SweepQuantity::Proportion => {
                let xs = match &spec.x_grid {
                    XGrid::Steps(n) => linspace(t.w_bkrp + 1e-8 * t.w_bkrp.max(1.0), t.w_updt, *n),
                    XGrid::Fixed(xs) => xs.iter().copied().filter(|&x| x >= t.w_bkrp && x <= t.w_updt).collect(),
                };
                for x in xs {
                    let e = evaluate_on(&model, &s.dual, t, x)?;
                    let (q, val) = match spec.quantity {
                        SweepQuantity::Consumption => ("c_star", e.c_star),
                        _ => ("pi_prop", e.pi_prop),
                    };
                    rows.push(row(h, Some(x), q, val));
                }
            }
        }
    }
    Ok(rows)
}

/// Direction of a quantity across consecutive swept values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

/// Trend of `quantity` in the swept value, checked pointwise at every
/// `(h, x)` shared by consecutive swept values.
pub fn pointwise_trend(rows: &[SweepRow], quantity: &str) -> Trend {
    use std::collections::BTreeMap;
    let mut series: BTreeMap<(u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.quantity == quantity) {
        let key = (r.h.to_bits(), r.x.map_or(0, f64::to_bits));
        series.entry(key).or_default().push((r.swept_value, r.value));
    }
    let (mut up, mut down) = (false, false);
    for s in series.values_mut() {
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in s.windows(2) {
            if w[1].1 > w[0].1 {
                up = true;
            } else if w[1].1 < w[0].1 {
                down = true;
            }
        }
    }
    match (up, down) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (false, false) => Trend::Constant,
        (true, true) => Trend::Mixed,
    }
}

/// Which risk aversion is sent to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitDirection {
    Beta1ToZero,
    Beta2ToZero,
}

impl LimitDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitDirection::Beta1ToZero => "beta1_to_0",
            LimitDirection::Beta2ToZero => "beta2_to_0",
        }
    }
}

/// Closed-form `β1 → 0` limits of the coefficients and thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta1Limit {
    pub h: f64,
    pub c1: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub w_low: f64,
    pub w_peak: f64,
    pub w_updt: f64,
}

/// Limits of `C1, C5, C6, C7, C8` and of `W_low`, `W_peak`, `W_updt` as
/// `β1 → 0` with everything else fixed. Requires `r = γ` and `φ ≡ 0`.
pub fn beta1_limit(params: &ModelParams, h: f64) -> Result<Beta1Limit> {
    let model = Model::new(params)?;
    if !model.is_base_like() {
        return Err(Error::Unsupported("closed-form beta1 limit"));
    }
    model.check_h(h)?;
    let p = model.params();
    let q = model.constants();
    let (al, la, b2, ga) = (p.alpha, p.lambda, p.beta2, p.gamma);
    let (q1, q2) = (q.q1, q.q2);
    let w = q2 - q1;
    let kk = q.k / (ga * ga);
    let (ca, cb) = ((1.0 - q1) / w, (q2 - 1.0) / w);
    let tail = (-(1.0 - al) * (1.0 - q1) * b2 * h).exp();
    let t1 = (1.0 - al).powf(w - 1.0) * (al - la) * (kk / b2) * ca * cb * (-(1.0 - al) * w * b2 * h).exp();
    let c7 = t1 + (1.0 - al).powf(w) * (kk / b2) * cb * tail;
    let c5 = t1 + ((1.0 - al).powf(w) - 1.0) * (kk / b2) * cb * tail;
    let c1 = c5 + (kk / b2) * cb + kk * cb * (al - la) * (1.0 - q1) * h;
    let c6 = -(kk / b2) * ca + kk * ca * (al - la) * (q2 - 1.0) * h;
    let c8 = (kk / b2) * ca * (((1.0 - al) * (q2 - 1.0) * b2 * h).exp() - 1.0) + kk * ca * (al - la) * (q2 - 1.0) * h;

    let w_low = -c1 * q1 + la * h / ga;
    let w_peak = -c5 * q1 * ((1.0 - al) * (1.0 - q1) * b2 * h).exp()
        - c6 * q2 * (-(1.0 - al) * (q2 - 1.0) * b2 * h).exp()
        - kk / b2
        + h / ga;
    let w_updt = -c7 * q1 * (1.0 - al).powf(q1 - 1.0) * ((1.0 - al) * (1.0 - q1) * b2 * h).exp()
        - c8 * q2 * (1.0 - al).powf(q2 - 1.0) * (-(1.0 - al) * (q2 - 1.0) * b2 * h).exp()
        + h / ga;
    Ok(Beta1Limit {
        h,
        c1,
        c5,
        c6,
        c7,
        c8,
        w_low,
        w_peak,
        w_updt,
    })
}

/// Threshold trajectories along a decreasing sequence of one risk aversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub direction: LimitDirection,
    pub h: f64,
    pub betas: Vec<f64>,
    pub thresholds: Vec<ThresholdSet>,
    /// Closed-form limits, for `β1 → 0` with `r = γ` and `φ ≡ 0`.
    pub closed_form: Option<Beta1Limit>,
    /// Largest relative gap between the thresholds at the smallest β and the
    /// closed-form limits (`W_low`, `W_peak`, `W_updt`).
    pub closed_form_rel_error: Option<f64>,
    /// `(W_ref − W_low)/W_low` along the sequence.
    pub ref_gap: Vec<f64>,
    /// True when `ref_gap` is non-increasing along the sequence.
    pub ref_gap_decreasing: bool,
    /// `W_low` at the last β divided by `W_low` at the first.
    pub w_low_growth: f64,
}

/// Evaluates the thresholds at `h` along `betas` (strictly decreasing and
/// positive) for the chosen risk aversion.
pub fn limiting_case(params: &ModelParams, direction: LimitDirection, betas: &[f64], h: f64) -> Result<LimitReport> {
    let ok =
        !betas.is_empty() && betas.iter().all(|&b| b > 0.0 && b.is_finite()) && betas.windows(2).all(|w| w[1] < w[0]);
    if !ok {
        return Err(Error::ParamDomain(vec![format!(
            "limit sequence must be positive and strictly decreasing (got {betas:?})"
        )]));
    }
    let param = match direction {
        LimitDirection::Beta1ToZero => SweepParam::Beta1,
        LimitDirection::Beta2ToZero => SweepParam::Beta2,
    };
    let thresholds: Vec<ThresholdSet> = betas
        .iter()
        .map(|&b| {
            let mut p = *params;
            param.apply(&mut p, b);
            Model::new(&p)
                .and_then(|m| m.thresholds(h))
                .map_err(|e| annotate(param, b, e))
        })
        .collect::<Result<_>>()?;

    let closed_form = match direction {
        LimitDirection::Beta1ToZero if params.variant != Variant::GeneralRate => match beta1_limit(params, h) {
            Ok(l) => Some(l),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let last = thresholds.last().expect("non-empty sequence");
    let closed_form_rel_error = closed_form.map(|l| {
        [(last.w_low, l.w_low), (last.w_peak, l.w_peak), (last.w_updt, l.w_updt)]
            .iter()
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max)
    });
    let ref_gap: Vec<f64> = thresholds.iter().map(|t| (t.w_ref - t.w_low) / t.w_low).collect();
    let ref_gap_decreasing = ref_gap.windows(2).all(|w| w[1] <= w[0]);
    let w_low_growth = last.w_low / thresholds[0].w_low;
    Ok(LimitReport {
        direction,
        h,
        betas: betas.to_vec(),
        thresholds,
        closed_form,
        closed_form_rel_error,
        ref_gap,
        ref_gap_decreasing,
        w_low_growth,
    })
}
