//! Monte Carlo simulation of the optimally controlled wealth and peak, of the
//! dual state process, and of the static budget identity that pins `y*`.
//!
//! Every path `i` draws from its own ChaCha8 stream `(seed, i)`, and results
//! are combined in path order, so output is identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{HSlice, Model};
use crate::params::{RegionLabel, ValidatedParams, Variant};
use crate::policy::{evaluate_on, PolicyEvaluation};
use crate::roots::{self, RootTol};
use crate::thresholds::{bliss_inverse, thresholds_generic};

/// Time-stepping scheme for the wealth equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    EulerMaruyama,
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Horizon in years.
    pub t_horizon: f64,
    /// Step in years.
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Keep every `record_every`-th step in path records (the last step is
    /// always kept).
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(t_horizon: f64, dt: f64, n_paths: usize, seed: u64) -> Self {
        Self {
            t_horizon,
            dt,
            n_paths,
            seed,
            scheme: Scheme::EulerMaruyama,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad.push(format!("dt must be > 0 (got {})", self.dt));
        }
        if !(self.t_horizon >= self.dt && self.t_horizon.is_finite()) {
            bad.push(format!("t_horizon must be >= dt (got {})", self.t_horizon));
        }
        if self.n_paths == 0 {
            bad.push("n_paths must be >= 1".to_string());
        }
        if self.record_every == 0 {
            bad.push("record_every must be >= 1".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::SimConfig(bad.join("; ")))
        }
    }

    /// Number of steps, `round(t_horizon / dt)`.
    pub fn n_steps(&self) -> usize {
        (self.t_horizon / self.dt).round().max(1.0) as usize
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// One simulated path of the controlled state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path_id: usize,
    pub times: Vec<f64>,
    pub wealth: Vec<f64>,
    pub peak: Vec<f64>,
    pub consumption: Vec<f64>,
    pub investment: Vec<f64>,
    pub region: Vec<RegionLabel>,
    /// Steps after which wealth fell below the floor and was clamped back.
    pub clamp_events: usize,
    /// Steps on which the peak was pushed up along the bliss curve.
    pub peak_updates: usize,
    pub n_steps: usize,
}

/// Peak on the bliss curve through `x`, searched upward from `h`, where
/// `W_updt(h) < x`. Avoids the shared cache since the peak moves continuously.
fn bliss_from(model: &Model, x: f64, h: f64) -> Result<f64> {
    let h_max = model.config().h_max;
    let f = |h: f64| -> Result<(f64, f64)> {
        let s = model.jet_slice(h)?;
        let w: Jet = thresholds_generic(model.params(), model.constants(), &s)[4];
        Ok((w.v - x, w.d1))
    };
    let (mut lo, mut step) = (h, 1e-3 * h.max(1e-3));
    let mut hi = (h + step).min(h_max);
    loop {
        let (v, _) = f(hi)?;
        if v >= 0.0 {
            break;
        }
        if hi >= h_max {
            return bliss_inverse(model, x);
        }
        lo = hi;
        step *= 4.0;
        hi = (hi + step).min(h_max);
    }
    let cfg = model.config();
    let tol = RootTol {
        x_tol: 4.0 * f64::EPSILON * hi,
        f_tol: cfg.abs_tol + cfg.rel_tol * x.abs(),
        max_iter: cfg.max_iter,
    };
    let mut failure = None;
    let root = roots::newton_bisect(
        "bliss inverse",
        |h| match f(h) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        },
        lo,
        hi,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Euler–Maruyama paths of `dX = [rX + π*(μ − r) − c*]dt + π*σ dB` under the
/// optimal feedback policy, with the peak pushed up along the bliss curve.
pub fn simulate_primal(model: &Model, x0: f64, h0: f64, cfg: &SimConfig) -> Result<Vec<PathRecord>> {
    cfg.validate()?;
    let start = model.slice(h0)?;
    let t0 = start.thresholds;
    if x0 < t0.w_bkrp || x0.is_nan() {
        return Err(Error::OutOfEffectiveRegion {
            x: x0,
            h: h0,
            lower: t0.w_bkrp,
            upper: t0.w_updt,
        });
    }
    // Wealth above the bliss curve lifts the peak at time zero.
    let h_start = if x0 > t0.w_updt { bliss_inverse(model, x0)? } else { h0 };
    let first = model.slice_uncached(h_start)?;
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| primal_path(model, x0, first.clone(), cfg, i))
        .collect()
}

fn primal_path(model: &Model, x0: f64, first: HSlice, cfg: &SimConfig, path_id: usize) -> Result<PathRecord> {
    let p = model.params();
    let n = cfg.n_steps();
    let dt = cfg.dt;
    let sq = dt.sqrt();
    let mut rng = path_rng(cfg.seed, path_id);
    let cap = n / cfg.record_every + 2;
    let mut rec = PathRecord {
        path_id,
        times: Vec::with_capacity(cap),
        wealth: Vec::with_capacity(cap),
        peak: Vec::with_capacity(cap),
        consumption: Vec::with_capacity(cap),
        investment: Vec::with_capacity(cap),
        region: Vec::with_capacity(cap),
        clamp_events: 0,
        peak_updates: 0,
        n_steps: n,
    };
    let mut slice = first;
    let mut x = x0.min(slice.thresholds.w_updt).max(slice.thresholds.w_bkrp);
    let mut h = slice.thresholds.h;
    for step in 0..=n {
        let e: PolicyEvaluation = evaluate_on(model, &slice.dual, &slice.thresholds, x)?;
        if step % cfg.record_every == 0 || step == n {
            rec.times.push(step as f64 * dt);
            rec.wealth.push(x);
            rec.peak.push(h);
            rec.consumption.push(e.c_star);
            rec.investment.push(e.pi_star);
            rec.region.push(e.region);
        }
        if step == n {
            break;
        }
        let z: f64 = rng.sample(StandardNormal);
        x += (p.r * x + e.pi_star * (p.mu - p.r) - e.c_star) * dt + e.pi_star * p.sigma * sq * z;
        if x > slice.thresholds.w_updt {
            h = bliss_from(model, x, h)?;
            slice = model.slice_uncached(h)?;
            rec.peak_updates += 1;
            // The root lands within tolerance of x; keep the state on the curve.
            x = x.min(slice.thresholds.w_updt);
        }
        if x < slice.thresholds.w_bkrp {
            x = slice.thresholds.w_bkrp;
            rec.clamp_events += 1;
        }
    }
    Ok(rec)
}

/// One simulated path of the dual state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPathRecord {
    pub path_id: usize,
    pub times: Vec<f64>,
    /// `Y_t = y·e^{γt}·M_t`.
    pub y: Vec<f64>,
    /// `Ĥ_t = h0 ∨ ln((1−α)/inf_{s≤t} Y_s)/((1−α)β2)`.
    pub h_hat: Vec<f64>,
    /// Running infimum of `Y`.
    pub y_inf: Vec<f64>,
    /// State-price density `M_t`.
    pub m: Vec<f64>,
}

/// Shared log-increment data of the dual state, independent of `y`.
///
/// `ℓ_t = ln(Y_t/y) = (γ − r − k)t − θB_t` and `M_t = e^{ℓ_t − γt}`.
struct DualStepper {
    drift: f64,
    vol: f64,
    var: f64,
    gamma: f64,
    dt: f64,
}

impl DualStepper {
    fn new(model: &Model, dt: f64) -> Self {
        let p = model.params();
        let k = model.constants().k;
        let theta = p.theta();
        Self {
            drift: (p.gamma - p.r - k) * dt,
            vol: theta * dt.sqrt(),
            var: theta * theta * dt,
            gamma: p.gamma,
            dt,
        }
    }

    /// Advances `ℓ` one step and lowers the running minimum `m` by the exact
    /// minimum of the Brownian bridge between the two grid values.
    #[inline]
    fn step<R: Rng>(&self, rng: &mut R, l: f64, m: f64) -> (f64, f64) {
        let z: f64 = rng.sample(StandardNormal);
        let next = l + self.drift - self.vol * z;
        let mut m = m.min(next);
        // P(bridge min < m) = exp(−2(a−m)(b−m)/var); skip when negligible.
        if (l - m) * (next - m) < 20.0 * self.var {
            let u: f64 = rng.random();
            let spread = (next - l) * (next - l) - 2.0 * self.var * (1.0 - u).ln();
            m = m.min(0.5 * (l + next - spread.sqrt()));
        }
        (next, m)
    }
}

/// `h0 ∨ (ln(1 − α) − ln y − m)/((1 − α)β2)` where `m ≤ 0` is the running
/// minimum of `ln(Y/y)`.
#[inline]
fn h_hat(p: &ValidatedParams, h0: f64, ln_y: f64, m: f64) -> f64 {
    let g = (1.0 - p.alpha) * p.beta2;
    h0.max(((1.0 - p.alpha).ln() - ln_y - m) / g)
}

/// Optimal consumption expressed in the dual variable: `u'(c) = y` solved on
/// `[λh, h]`.
#[inline]
pub fn consumption_from_dual(p: &ValidatedParams, ln_y: f64, h: f64) -> f64 {
    let beta = if ln_y >= 0.0 { p.beta1 } else { p.beta2 };
    let c = if p.variant == Variant::GeneralReference {
        let phi = p.phi.eval(h);
        let s = 1.0 - p.alpha * phi;
        p.alpha * h * (1.0 - phi) / s - (ln_y - s.ln()) / (beta * s)
    } else {
        p.alpha * h - ln_y / beta
    };
    c.clamp(p.lambda * h, h)
}

/// Exact-in-law paths of the dual state `Y` and the dual peak `Ĥ`.
pub fn simulate_dual(model: &Model, y: f64, h0: f64, cfg: &SimConfig) -> Result<Vec<DualPathRecord>> {
    cfg.validate()?;
    model.check_h(h0)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::SimConfig(format!("dual start y must be > 0 (got {y})")));
    }
    let p = model.params();
    let stepper = DualStepper::new(model, cfg.dt);
    let n = cfg.n_steps();
    let ln_y = y.ln();
    Ok((0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let cap = n / cfg.record_every + 2;
            let mut rec = DualPathRecord {
                path_id: i,
                times: Vec::with_capacity(cap),
                y: Vec::with_capacity(cap),
                h_hat: Vec::with_capacity(cap),
                y_inf: Vec::with_capacity(cap),
                m: Vec::with_capacity(cap),
            };
            let (mut l, mut m) = (0.0, 0.0);
            for step in 0..=n {
                if step % cfg.record_every == 0 || step == n {
                    let t = step as f64 * stepper.dt;
                    rec.times.push(t);
                    rec.y.push((ln_y + l).exp());
                    rec.h_hat.push(h_hat(p, h0, ln_y, m));
                    rec.y_inf.push((ln_y + m).exp());
                    rec.m.push((l - stepper.gamma * t).exp());
                }
                if step < n {
                    (l, m) = stepper.step(&mut rng, l, m);
                }
            }
            rec
        })
        .collect())
}

/// Consumption `c*(Y_t, Ĥ_t)` along a dual path with per-`y` constants
/// hoisted out of the time loop.
struct DualRate {
    p: ValidatedParams,
    h0: f64,
    inv_g: f64,
    inv_b1: f64,
    inv_b2: f64,
    general_reference: bool,
}

/// Per-start-point state of the budget integrand. Quantities that depend on
/// `Ĥ` are refreshed only when the running minimum moves.
#[derive(Clone, Copy)]
struct Lane {
    ln_y: f64,
    offset: f64,
    h: f64,
    ref_level: f64,
    floor: f64,
    c_prev: f64,
    acc: f64,
}

impl DualRate {
    fn new(p: &ValidatedParams, h0: f64) -> Self {
        Self {
            p: *p,
            h0,
            inv_g: 1.0 / ((1.0 - p.alpha) * p.beta2),
            inv_b1: 1.0 / p.beta1,
            inv_b2: 1.0 / p.beta2,
            general_reference: p.variant == Variant::GeneralReference,
        }
    }

    fn lane(&self, ln_y: f64) -> Lane {
        // (ln(1 − α) − ln y)/((1 − α)β2), the part of Ĥ fixed by y.
        let offset = ((1.0 - self.p.alpha).ln() - ln_y) * self.inv_g;
        let mut lane = Lane {
            ln_y,
            offset,
            h: 0.0,
            ref_level: 0.0,
            floor: 0.0,
            c_prev: 0.0,
            acc: 0.0,
        };
        self.set_min(&mut lane, 0.0);
        lane.c_prev = self.consumption(&lane, 0.0);
        lane
    }

    /// Updates the `Ĥ`-dependent fields for running minimum `m`.
    #[inline]
    fn set_min(&self, lane: &mut Lane, m: f64) {
        let h = self.h0.max(lane.offset - m * self.inv_g);
        lane.h = h;
        lane.ref_level = self.p.alpha * h;
        lane.floor = self.p.lambda * h;
    }

    /// `c*` at `ln(Y/y) = l`.
    #[inline(always)]
    fn consumption(&self, lane: &Lane, l: f64) -> f64 {
        let ln_y_t = lane.ln_y + l;
        if self.general_reference {
            return consumption_from_dual(&self.p, ln_y_t, lane.h);
        }
        // With β1 <= β2 the smaller of the two linear pieces is the active
        // one on either side of the reference, and the larger otherwise.
        let c1 = lane.ref_level - ln_y_t * self.inv_b1;
        let c2 = lane.ref_level - ln_y_t * self.inv_b2;
        let c = if self.inv_b1 >= self.inv_b2 {
            c1.min(c2)
        } else {
            c1.max(c2)
        };
        c.max(lane.floor).min(lane.h)
    }
}

/// Monte Carlo estimate of `E∫₀^T c*(Y_t, Ĥ_t)·M_t dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetEstimate {
    pub y: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// Deterministic bound on the omitted `∫_T^∞` tail.
    pub truncation_bound: f64,
    pub n_paths: usize,
}

/// Bound on `E∫_T^∞ c*·M_t dt ≤ E∫_T^∞ Ĥ_t·M_t dt`.
///
/// Uses `Ĥ_t ≤ H̄ + sup_{s≤t}(−ℓ_s)/((1−α)β2)` and the exponential moment of
/// the running maximum of a drifted Brownian motion under the pricing measure.
pub fn truncation_bound(model: &Model, y: f64, h0: f64, t: f64) -> f64 {
    let p = model.params();
    let k = model.constants().k;
    let g = (1.0 - p.alpha) * p.beta2;
    let rate = p.gamma - p.r + k;
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let base = h0 + ((1.0 - p.alpha) / y).ln().max(0.0) / g;
    let h_bar = base + k / rate / g;
    (-p.r * t).exp() * h_bar / p.r
}

/// [`budget_functional`] on several `y` at once with common random numbers.
pub fn budget_functional_multi(model: &Model, ys: &[f64], h0: f64, cfg: &SimConfig) -> Result<Vec<BudgetEstimate>> {
    budget_paths(model, ys, h0, cfg, cfg.n_paths)
}

fn budget_paths(model: &Model, ys: &[f64], h0: f64, cfg: &SimConfig, n_paths: usize) -> Result<Vec<BudgetEstimate>> {
    cfg.validate()?;
    model.check_h(h0)?;
    if let Some(&bad) = ys.iter().find(|&&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::SimConfig(format!("dual start y must be > 0 (got {bad})")));
    }
    let p = *model.params();
    let stepper = DualStepper::new(model, cfg.dt);
    let n = cfg.n_steps();
    let t_end = n as f64 * cfg.dt;
    let rate = DualRate::new(&p, h0);
    let lanes: Vec<Lane> = ys.iter().map(|y| rate.lane(y.ln())).collect();
    let decay = stepper.gamma * stepper.dt;
    let per_path: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let mut lanes = lanes.clone();
            let (mut l, mut m) = (0.0, 0.0);
            let mut disc_prev = 1.0;
            for step in 1..=n {
                let m_prev = m;
                (l, m) = stepper.step(&mut rng, l, m);
                if m < m_prev {
                    lanes.iter_mut().for_each(|lane| rate.set_min(lane, m));
                }
                let disc = (l - decay * step as f64).exp();
                for lane in lanes.iter_mut() {
                    let c = rate.consumption(lane, l);
                    lane.acc += lane.c_prev * disc_prev + c * disc;
                    lane.c_prev = c;
                }
                disc_prev = disc;
            }
            lanes.iter().map(|lane| lane.acc * 0.5 * stepper.dt).collect()
        })
        .collect();
    Ok(ys
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let (mut mean, mut m2) = (0.0, 0.0);
            for (i, v) in per_path.iter().enumerate() {
                let d = v[j] - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v[j] - mean);
            }
            let var = if n_paths > 1 { m2 / (n_paths - 1) as f64 } else { 0.0 };
            BudgetEstimate {
                y,
                estimate: mean,
                std_error: (var / n_paths as f64).sqrt(),
                truncation_bound: truncation_bound(model, y, h0, t_end),
                n_paths,
            }
        })
        .collect())
}

/// Monte Carlo estimate of the budget functional `E∫₀^T c*(Y_t, Ĥ_t)·M_t dt`
/// started from dual level `y` and peak `h0`.
pub fn budget_functional(model: &Model, y: f64, h0: f64, cfg: &SimConfig) -> Result<BudgetEstimate> {
    Ok(budget_functional_multi(model, &[y], h0, cfg)?[0])
}

/// Root of the budget equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YStar {
    pub y: f64,
    /// Budget estimate interpolated at `y`.
    pub estimate: f64,
    pub std_error: f64,
    pub truncation_bound: f64,
    /// `(2·SE + truncation bound)/|dG/dy|`: the `y`-uncertainty implied by
    /// the Monte Carlo and truncation error of the budget.
    pub y_tolerance: f64,
}

/// Lower and upper end of the coarse `y` search.
const Y_SEARCH: (f64, f64) = (1e-8, 1e8);

/// Solves `E∫c*(Y_t, Ĥ_t)M_t dt = x0` for `y`.
///
/// All stages reuse the same random numbers, so the estimated budget is
/// decreasing in `y` path by path. A coarse pass on a few paths brackets the
/// root over `[1e-8, 1e8]`, a second pass narrows it, and the full path count
/// is spent on three points around the narrowed root.
pub fn solve_y_star(model: &Model, x0: f64, h0: f64, cfg: &SimConfig) -> Result<YStar> {
    Ok(solve_y_star_with_probes(model, x0, h0, cfg, &[])?.0)
}

/// [`solve_y_star`] that also returns budget estimates at the `probes`,
/// computed on the same full set of paths as the final stage.
pub fn solve_y_star_with_probes(
    model: &Model,
    x0: f64,
    h0: f64,
    cfg: &SimConfig,
    probes: &[f64],
) -> Result<(YStar, Vec<BudgetEstimate>)> {
    cfg.validate()?;
    let t = model.thresholds(h0)?;
    if !(x0 >= t.w_bkrp && x0 <= t.w_updt) {
        return Err(Error::OutOfEffectiveRegion {
            x: x0,
            h: h0,
            lower: t.w_bkrp,
            upper: t.w_updt,
        });
    }
    let n = cfg.n_paths;
    let n_coarse = n.min((n / 100).max(1000));

    let grid = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp())
            .collect()
    };
    let not_bracketed = |lo: f64, hi: f64| Error::Bracket {
        what: "budget equation",
        target: x0,
        lo,
        hi,
    };

    let ys = grid(Y_SEARCH.0, Y_SEARCH.1, 33);
    let est = budget_paths(model, &ys, h0, cfg, n_coarse)?;
    let (lo, hi) = bracket(&est, x0).ok_or_else(|| not_bracketed(Y_SEARCH.0, Y_SEARCH.1))?;

    let ys = grid(lo, hi, 17);
    let est = budget_paths(model, &ys, h0, cfg, n_coarse)?;
    let (lo, hi) = bracket(&est, x0).unwrap_or((lo, hi));
    let mut centre = log_interpolate(&est, x0, lo, hi);
    let mut width = (hi / lo).ln().max(1e-6);

    for _ in 0..8 {
        let mut ys: Vec<f64> = [-1.0, 0.0, 1.0].iter().map(|s| centre * (s * width).exp()).collect();
        ys.extend_from_slice(probes);
        let mut est = budget_paths(model, &ys, h0, cfg, n)?;
        let probe_est = est.split_off(3);
        if let Some((lo, hi)) = bracket(&est, x0) {
            let y = log_interpolate(&est, x0, lo, hi);
            let i = est.iter().position(|e| e.y == lo).expect("bracket end from the grid");
            let (a, b) = (&est[i], &est[i + 1]);
            let w = (y.ln() - a.y.ln()) / (b.y.ln() - a.y.ln());
            let estimate = a.estimate + w * (b.estimate - a.estimate);
            let std_error = a.std_error.max(b.std_error);
            let truncation_bound = a.truncation_bound.max(b.truncation_bound);
            let slope = ((b.estimate - a.estimate) / (b.y - a.y)).abs();
            let star = YStar {
                y,
                estimate,
                std_error,
                truncation_bound,
                y_tolerance: (2.0 * std_error + truncation_bound) / slope,
            };
            return Ok((star, probe_est));
        }
        // The coarse root was off for the full sample: recentre and widen.
        let first = est.first().expect("three points");
        let last = est.last().expect("three points");
        centre = if first.estimate < x0 { first.y } else { last.y };
        width *= 4.0;
        if centre < Y_SEARCH.0 || centre > Y_SEARCH.1 {
            break;
        }
    }
    Err(not_bracketed(Y_SEARCH.0, Y_SEARCH.1))
}

/// Adjacent grid points whose estimates straddle `x0` (estimates decrease in `y`).
fn bracket(est: &[BudgetEstimate], x0: f64) -> Option<(f64, f64)> {
    est.windows(2)
        .find(|w| w[0].estimate >= x0 && w[1].estimate <= x0)
        .map(|w| (w[0].y, w[1].y))
}

/// Linear interpolation of the estimate in `ln y` between the bracket ends.
fn log_interpolate(est: &[BudgetEstimate], x0: f64, lo: f64, hi: f64) -> f64 {
    let a = est.iter().find(|e| e.y == lo).expect("bracket end from the grid");
    let b = est.iter().find(|e| e.y == hi).expect("bracket end from the grid");
    if a.estimate == b.estimate {
        return (lo * hi).sqrt();
    }
    let w = (a.estimate - x0) / (a.estimate - b.estimate);
    (lo.ln() + w * (hi.ln() - lo.ln())).exp()
}
