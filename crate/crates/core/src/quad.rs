//! Fixed-order Gauss–Legendre quadrature.

use std::sync::OnceLock;

const ORDER: usize = 20;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

/// Nodes and weights on [-1, 1], found by Newton iteration on the Legendre
/// polynomial from the Chebyshev initial guesses.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// Integrates `f` over `[a, b]` with one 20-point Gauss–Legendre panel.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = gauss_legendre(|x| x.powi(39) + 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(40) - 1.0) / 40.0 + 9.0;
        assert!((v - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn integrates_exponential() {
        let v: f64 = (0..40)
            .map(|i| gauss_legendre(|x| (-x).exp(), i as f64, i as f64 + 1.0))
            .sum();
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-15);
    }
}
