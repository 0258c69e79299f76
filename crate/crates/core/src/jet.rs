//! Second-order forward-mode differentiation in the habit level `h`.
//!
//! Every closed form that depends on `h` is written once, generic over
//! [`Scalar`]. Evaluating it with `f64` gives the value; evaluating it with a
//! [`Jet`] seeded by [`Jet::variable`] gives the value together with the first
//! and second derivative in `h`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the coefficient and threshold formulas.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
    /// Builds `I(h) = ∫_h^∞ g(s) ds` from its numerically computed value and
    /// the integrand factors `g = a'·b` evaluated as jets at `h`.
    fn tail_integral(value: f64, a: Self, b: Self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    #[inline]
    fn tail_integral(value: f64, _a: Self, _b: Self) -> Self {
        value
    }
}

/// Truncated Taylor jet `(f, f', f'')` in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    /// The independent variable itself: derivative one, curvature zero.
    pub const fn variable(v: f64) -> Self {
        Self::new(v, 1.0, 0.0)
    }

    /// Composition with a scalar function given its value and two derivatives
    /// at `self.v`.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self::new(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, o: Jet) -> Jet {
        let inv = 1.0 / o.v;
        self * o.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, c: f64) -> Jet {
        Jet::new(self.v - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, c: f64) -> Jet {
        Jet::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, c: f64) -> Jet {
        Jet::new(self.v / c, self.d1 / c, self.d2 / c)
    }
}

impl Scalar for Jet {
    #[inline]
    fn cst(v: f64) -> Self {
        Jet::new(v, 0.0, 0.0)
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    #[inline]
    fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        let f0 = self.v.powf(p);
        let f1 = p * self.v.powf(p - 1.0);
        let f2 = p * (p - 1.0) * self.v.powf(p - 2.0);
        self.chain(f0, f1, f2)
    }
    fn tail_integral(value: f64, a: Self, b: Self) -> Self {
        // I' = -g and I'' = -g' with g = a'·b.
        let g = a.d1 * b.v;
        let dg = a.d2 * b.v + a.d1 * b.d1;
        Jet::new(value, -g, -dg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Scalar>(h: T) -> T {
        (h * 0.3).exp() * h.powf(1.7) / (h + 2.0) - h.ln() * 4.0
    }

    #[test]
    fn jet_matches_central_differences() {
        let h = 1.3;
        let j = f(Jet::variable(h));
        let e = 1e-4;
        let d1 = (f(h + e) - f(h - e)) / (2.0 * e);
        let d2 = (f(h + e) - 2.0 * f(h) + f(h - e)) / (e * e);
        assert!((j.v - f(h)).abs() < 1e-14);
        assert!((j.d1 - d1).abs() < 1e-7);
        assert!((j.d2 - d2).abs() < 1e-5);
    }
}
