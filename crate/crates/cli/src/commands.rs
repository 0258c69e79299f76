//! Table builders for the computing subcommands.

use peakhabit::analysis::linspace;
use peakhabit::{
    budget_functional_multi, classify_region, evaluate_policy, invert, limiting_case, primal_value, run_sweep,
    simulate_primal, solve_y_star_with_probes, thresholds_on_grid, LimitDirection, Model, ModelParams, SimConfig,
    SweepParam, SweepQuantity, SweepSpec, XGrid,
};

use crate::table::{Cell, Table};
use crate::CliError;

/// Monte Carlo flags.
#[derive(Debug, Clone, Copy)]
pub struct McArgs {
    pub x0: f64,
    pub h0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
}

impl McArgs {
    fn config(&self) -> SimConfig {
        SimConfig::new(self.horizon, self.dt, self.paths, self.seed)
    }
}

/// Evenly spaced habit levels on `[lo, hi]`.
pub fn h_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < h-min <= h-max, got [{lo}, {hi}]")));
    }
    match steps {
        0 => Err(CliError::Usage("--h-steps must be positive".into())),
        1 => Ok(vec![lo]),
        n => Ok(linspace(lo, hi, n)),
    }
}

pub fn thresholds(params: &ModelParams, hs: &[f64]) -> Result<Table, CliError> {
    let m = Model::new(params)?;
    let mut t = Table::new(&["h", "w_bkrp", "w_low", "w_ref", "w_peak", "w_updt"]);
    for s in thresholds_on_grid(&m, hs)? {
        t.push(vec![
            s.h.into(),
            s.w_bkrp.into(),
            s.w_low.into(),
            s.w_ref.into(),
            s.w_peak.into(),
            s.w_updt.into(),
        ]);
    }
    Ok(t)
}

pub fn policy(
    params: &ModelParams,
    h: f64,
    steps: usize,
    x_min: Option<f64>,
    x_max: Option<f64>,
) -> Result<Table, CliError> {
    if steps < 2 {
        return Err(CliError::Usage("--x-steps must be at least 2".into()));
    }
    let m = Model::new(params)?;
    let th = m.thresholds(h)?;
    let (lo, hi) = (x_min.unwrap_or(th.w_bkrp), x_max.unwrap_or(th.w_updt));
    if !(lo < hi) {
        return Err(CliError::Usage(format!("empty wealth range [{lo}, {hi}]")));
    }
    let mut t = Table::new(&[
        "x", "region", "y", "c_star", "pi_star", "pi_prop", "value", "mpc", "irra",
    ]);
    for x in linspace(lo, hi, steps) {
        let e = evaluate_policy(&m, x, h)?;
        t.push(vec![
            x.into(),
            e.region.as_str().into(),
            e.y.into(),
            e.c_star.into(),
            e.pi_star.into(),
            e.pi_prop.into(),
            e.value.into(),
            e.mpc.into(),
            e.irra.into(),
        ]);
    }
    Ok(t)
}

pub fn value(params: &ModelParams, h: f64, xs: &[f64]) -> Result<Table, CliError> {
    let m = Model::new(params)?;
    let th = m.thresholds(h)?;
    let mut t = Table::new(&["x", "h", "region", "y", "value"]);
    for &x in xs {
        let y = invert(&m, x, h)?.y;
        t.push(vec![
            x.into(),
            h.into(),
            classify_region(&th, x).as_str().into(),
            y.into(),
            primal_value(&m, x, h)?.into(),
        ]);
    }
    Ok(t)
}

pub fn simulate(params: &ModelParams, mc: &McArgs, record_every: usize) -> Result<Table, CliError> {
    if record_every == 0 {
        return Err(CliError::Usage("--record-every must be positive".into()));
    }
    let m = Model::new(params)?;
    let mut cfg = mc.config();
    cfg.record_every = record_every;
    let paths = simulate_primal(&m, mc.x0, mc.h0, &cfg)?;
    let mut t = Table::new(&["path_id", "t", "X", "H", "c", "pi", "region"]);
    for p in &paths {
        for i in 0..p.times.len() {
            t.push(vec![
                p.path_id.into(),
                p.times[i].into(),
                p.wealth[i].into(),
                p.peak[i].into(),
                p.consumption[i].into(),
                p.investment[i].into(),
                p.region[i].as_str().into(),
            ]);
        }
    }
    Ok(t)
}

pub fn budget(params: &ModelParams, mc: &McArgs, ys: &[f64]) -> Result<Table, CliError> {
    let m = Model::new(params)?;
    let cfg = mc.config();
    if !ys.is_empty() {
        let mut t = Table::new(&["y", "estimate", "std_error", "truncation_bound", "n_paths"]);
        for e in budget_functional_multi(&m, ys, mc.h0, &cfg)? {
            t.push(vec![
                e.y.into(),
                e.estimate.into(),
                e.std_error.into(),
                e.truncation_bound.into(),
                e.n_paths.into(),
            ]);
        }
        return Ok(t);
    }
    let exact = invert(&m, mc.x0, mc.h0)?.y;
    let probes: Vec<f64> = if exact.is_finite() { vec![exact] } else { Vec::new() };
    let (s, at_exact) = solve_y_star_with_probes(&m, mc.x0, mc.h0, &cfg, &probes)?;
    let mut t = Table::new(&[
        "x0",
        "h0",
        "y_star",
        "estimate",
        "std_error",
        "truncation_bound",
        "y_tolerance",
        "y_exact",
        "budget_at_y_exact",
    ]);
    t.push(vec![
        mc.x0.into(),
        mc.h0.into(),
        s.y.into(),
        s.estimate.into(),
        s.std_error.into(),
        s.truncation_bound.into(),
        s.y_tolerance.into(),
        exact.into(),
        at_exact.first().map(|e| e.estimate).into(),
    ]);
    Ok(t)
}

pub fn sweep(
    params: &ModelParams,
    param: SweepParam,
    values: &[f64],
    n: usize,
    quantity: SweepQuantity,
    h_grid: Vec<f64>,
    x_steps: usize,
) -> Result<Table, CliError> {
    let values = if !values.is_empty() {
        values.to_vec()
    } else {
        if n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        // Admissible ranges: λ < α < 1 and 0 ≤ λ < α.
        match param {
            SweepParam::Alpha => linspace(params.lambda + 1e-6, 1.0 - 1e-8, n),
            SweepParam::Lambda => linspace(0.0, params.alpha - 1e-6, n),
            SweepParam::Beta1 | SweepParam::Beta2 => {
                return Err(CliError::Usage(format!(
                    "--values is required when sweeping {}",
                    param.as_str()
                )))
            }
        }
    };
    if quantity != SweepQuantity::Thresholds && x_steps < 2 {
        return Err(CliError::Usage("--x-steps must be at least 2".into()));
    }
    let spec = SweepSpec {
        parameter: param,
        values,
        held: *params,
        h_grid,
        quantity,
        x_grid: XGrid::Steps(x_steps),
    };
    let mut t = Table::new(&["swept_param", "swept_value", "h", "x", "quantity", "value"]);
    for r in run_sweep(&spec)? {
        t.push(vec![
            Cell::Text(r.swept_param),
            r.swept_value.into(),
            r.h.into(),
            r.x.into(),
            Cell::Text(r.quantity),
            r.value.into(),
        ]);
    }
    Ok(t)
}

pub fn limits(params: &ModelParams, direction: LimitDirection, betas: &[f64], h: f64) -> Result<Table, CliError> {
    let r = limiting_case(params, direction, betas, h)?;
    let mut t = Table::new(&[
        "direction",
        "beta",
        "h",
        "w_bkrp",
        "w_low",
        "w_ref",
        "w_peak",
        "w_updt",
        "ref_gap",
    ]);
    for ((b, s), gap) in r.betas.iter().zip(&r.thresholds).zip(&r.ref_gap) {
        t.push(vec![
            direction.as_str().into(),
            (*b).into(),
            h.into(),
            s.w_bkrp.into(),
            s.w_low.into(),
            s.w_ref.into(),
            s.w_peak.into(),
            s.w_updt.into(),
            (*gap).into(),
        ]);
    }
    if let Some(l) = r.closed_form {
        // The closed-form limit row carries β = 0; W_ref coincides with W_low.
        let floor = r.thresholds[0].w_bkrp;
        t.push(vec![
            "beta1_limit".into(),
            0.0.into(),
            h.into(),
            floor.into(),
            l.w_low.into(),
            l.w_low.into(),
            l.w_peak.into(),
            l.w_updt.into(),
            0.0.into(),
        ]);
    }
    Ok(t)
}
