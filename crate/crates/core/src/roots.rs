//! Safeguarded one-dimensional root finding on a sign-changing bracket.

use crate::error::{Error, Result};

/// Stopping rule for [`newton_bisect`].
#[derive(Debug, Clone, Copy)]
pub struct RootTol {
    /// Stop when the bracket is narrower than this.
    pub x_tol: f64,
    /// Stop when `|f| ≤ f_tol`.
    pub f_tol: f64,
    pub max_iter: usize,
}

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// `fdf` returns the function value and its derivative. Newton steps are taken
/// when they stay inside the current bracket and shrink it fast enough;
/// otherwise the step falls back to bisection.
pub fn newton_bisect<F>(what: &'static str, mut fdf: F, lo: f64, hi: f64, tol: RootTol) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (fa, _) = fdf(a);
    let (fb, _) = fdf(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracket {
            what,
            target: 0.0,
            lo: a,
            hi: b,
        });
    }
    // Orient so that f(a) < 0 < f(b).
    let flip = fa > 0.0;
    let sgn = if flip { -1.0 } else { 1.0 };

    let mut x = 0.5 * (a + b);
    let mut step_prev = (b - a).abs();
    let mut best = (x, f64::INFINITY);
    for _ in 0..tol.max_iter {
        let (fx, dfx) = fdf(x);
        let (fx, dfx) = (sgn * fx, sgn * dfx);
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        if fx.abs() <= tol.f_tol || fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= tol.x_tol {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let use_newton =
            dfx.is_finite() && dfx != 0.0 && newton > a && newton < b && (2.0 * fx).abs() <= (step_prev * dfx).abs();
        let next = if use_newton { newton } else { 0.5 * (a + b) };
        step_prev = (next - x).abs();
        x = next;
        if use_newton && step_prev <= tol.x_tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        what,
        best: best.0,
        residual: best.1,
    })
}

/// Plain bisection to a fixed number of halvings, for oracles and coarse brackets.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, iters: usize) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
