//! The `check` subcommand: numerical consistency gates on a habit grid.

use peakhabit::analysis::linspace;
use peakhabit::{dual_value, invert, smooth_fit_residuals, thresholds_on_grid, Model, ModelParams, Result};

use crate::table::{Cell, Table};
use crate::CliError;

/// Dual points per habit level for the convexity gate.
const CONVEXITY_POINTS: usize = 200;
/// Wealth points per habit level for the round-trip gate.
const ROUND_TRIP_POINTS: usize = 200;

/// Outcome of one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub gates: Vec<Gate>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.gates.iter().filter(|g| !g.pass).count()
    }

    pub fn into_table(self) -> Table {
        let mut t = Table::new(&["check", "pass", "worst", "tolerance", "detail"]);
        for g in self.gates {
            t.push(vec![
                g.name.into(),
                g.pass.into(),
                g.worst.into(),
                g.tolerance.into(),
                Cell::Text(g.detail),
            ]);
        }
        t
    }
}

/// Below-tolerance gate: passes when `worst < tolerance`.
fn below(name: &'static str, worst: f64, tolerance: f64, detail: String) -> Gate {
    Gate {
        name,
        worst,
        tolerance,
        pass: worst < tolerance,
        detail,
    }
}

type GateFn = fn(&Model, &[f64]) -> Result<Gate>;

/// Runs every gate. A gate whose evaluation errors counts as failed, with the
/// error as its detail, so the report is always complete.
pub fn run(params: &ModelParams, hs: &[f64]) -> std::result::Result<Report, CliError> {
    let m = Model::new(params)?;
    let gates: [(&'static str, GateFn); 5] = [
        ("constants", constants),
        ("smooth_fit", smooth_fit),
        ("convexity", convexity),
        ("ordering", ordering),
        ("round_trip", round_trip),
    ];
    let gates = gates
        .into_iter()
        .map(|(name, gate)| {
            gate(&m, hs).unwrap_or_else(|e| Gate {
                name,
                worst: f64::NAN,
                tolerance: f64::NAN,
                pass: false,
                detail: e.to_string(),
            })
        })
        .collect();
    Ok(Report { gates })
}

fn constants(m: &Model, _hs: &[f64]) -> Result<Gate> {
    let q = m.constants();
    Ok(below(
        "constants",
        q.residual(m.params()),
        1e-12,
        format!("q1 = {}, q2 = {}", q.q1, q.q2),
    ))
}

fn smooth_fit(m: &Model, hs: &[f64]) -> Result<Gate> {
    let (mut fit, mut fit_h) = (0.0f64, hs[0]);
    for &h in hs {
        let r = smooth_fit_residuals(m.params(), m.constants(), &m.coefficients(h)?)?.max_relative();
        if !(r <= fit) {
            fit = r;
            fit_h = h;
        }
    }
    Ok(below(
        "smooth_fit",
        fit,
        1e-9,
        format!("largest relative residual at h = {fit_h}"),
    ))
}

/// `Ṽ_yy > 0` from the updating boundary to well inside the gloom branch.
fn convexity(m: &Model, hs: &[f64]) -> Result<Gate> {
    let (mut min_vyy, mut min_at) = (f64::INFINITY, (0.0, 0.0));
    for &h in hs {
        let s = m.slice(h)?;
        let (lo, hi) = (s.dual.y_updt.ln(), s.dual.y_low.ln() + 5.0);
        for ln_y in linspace(lo, hi, CONVEXITY_POINTS) {
            let y = ln_y.exp().max(s.dual.y_updt);
            let v = dual_value(m, y, h)?.v_tilde_yy;
            if !(v >= min_vyy) {
                min_vyy = v;
                min_at = (y, h);
            }
        }
    }
    Ok(Gate {
        name: "convexity",
        worst: min_vyy,
        tolerance: 0.0,
        pass: min_vyy > 0.0,
        detail: format!("smallest V_yy at y = {}, h = {}", min_at.0, min_at.1),
    })
}

fn ordering(m: &Model, hs: &[f64]) -> Result<Gate> {
    let mut order = f64::NEG_INFINITY;
    for t in thresholds_on_grid(m, hs)? {
        for pair in t.as_array().windows(2) {
            order = order.max(pair[0] - pair[1]);
        }
    }
    Ok(Gate {
        name: "ordering",
        worst: order,
        tolerance: 0.0,
        pass: order <= 0.0,
        detail: "largest W_i - W_(i+1) over the grid".into(),
    })
}

fn round_trip(m: &Model, hs: &[f64]) -> Result<Gate> {
    let mut trip = 0.0f64;
    for &h in hs {
        let t = m.thresholds(h)?;
        for x in linspace(t.w_bkrp, t.w_updt, ROUND_TRIP_POINTS).into_iter().skip(1) {
            let y = invert(m, x, h)?.y;
            let err = (x + dual_value(m, y, h)?.v_tilde_y).abs() / x.max(1.0);
            trip = trip.max(err);
        }
    }
    Ok(below(
        "round_trip",
        trip,
        1e-9,
        "largest |x + V_y(f(x))| / max(1, x)".into(),
    ))
}
