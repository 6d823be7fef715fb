//! Truncated third-order forward-mode jets.
//!
//! A [`Jet3`] carries a value together with its first three derivatives with
//! respect to one seeded variable. Derivatives are stored raw (no `1/k!`
//! Taylor normalization), so `d2` is exactly `f''` and `d3` is exactly `f'''`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Copy, Clone, Debug, PartialEq, Default)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { v, d1, d2, d3 }
    }

    /// The differentiation variable itself, evaluated at `x0`.
    pub const fn seed(x0: f64) -> Self {
        Self::new(x0, 1.0, 0.0, 0.0)
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.v * s, self.d1 * s, self.d2 * s, self.d3 * s)
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// Faà di Bruno to third order with the closed-form tanh derivatives.
    pub fn tanh(self) -> Self {
        self.tanh_with(&tanh_derivs(self.v))
    }

    /// [`Jet3::tanh`] with `tanh_derivs(self.v)` supplied by the caller, for
    /// when many jets share the same value.
    pub fn tanh_with(self, derivs: &TanhDerivs) -> Self {
        let TanhDerivs { t, g1, g2, g3 } = *derivs;
        let a1 = self.d1;
        Self {
            v: t,
            d1: g1 * a1,
            d2: g2 * a1 * a1 + g1 * self.d2,
            d3: g3 * a1 * a1 * a1 + 3.0 * g2 * a1 * self.d2 + g1 * self.d3,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }
}

/// `tanh` and its first three derivatives at a point.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TanhDerivs {
    pub t: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// `g1 = sech²(x)` is evaluated as `4e/(1+e)²` with `e = exp(-2|x|)`, which
/// equals `1 - tanh²(x)` but stays strictly positive until `e` underflows
/// (|x| beyond ~370) instead of rounding to zero once `tanh` saturates.
pub fn tanh_derivs(x: f64) -> TanhDerivs {
    let t = x.tanh();
    let e = (-2.0 * x.abs()).exp();
    let g1 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    let g2 = -2.0 * t * g1;
    let g3 = -2.0 * g1 * (1.0 - 3.0 * t * t);
    TanhDerivs { t, g1, g2, g3 }
}

impl Add for Jet3 {
    type Output = Jet3;

    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3::new(
            self.v + rhs.v,
            self.d1 + rhs.d1,
            self.d2 + rhs.d2,
            self.d3 + rhs.d3,
        )
    }
}

impl Neg for Jet3 {
    type Output = Jet3;

    fn neg(self) -> Jet3 {
        Jet3::new(-self.v, -self.d1, -self.d2, -self.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;

    fn sub(self, rhs: Jet3) -> Jet3 {
        self + (-rhs)
    }
}

/// Leibniz rule to third order. Mirror-image terms are summed pairwise first so
/// that `a * b` and `b * a` agree bit for bit.
impl Mul for Jet3 {
    type Output = Jet3;

    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3 {
            v: a.v * b.v,
            d1: a.d1 * b.v + a.v * b.d1,
            d2: (a.d2 * b.v + a.v * b.d2) + 2.0 * (a.d1 * b.d1),
            d3: (a.d3 * b.v + a.v * b.d3) + 3.0 * (a.d2 * b.d1 + a.d1 * b.d2),
        }
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;

    fn mul(self, s: f64) -> Jet3 {
        self.scale(s)
    }
}
