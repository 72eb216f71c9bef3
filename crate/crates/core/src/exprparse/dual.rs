//! Second-order forward-mode dual numbers.
//!
//! A [`Jet`] carries a value together with its first and second derivative
//! with respect to one seeded variable. Arithmetic propagates both
//! derivatives exactly, so `(value, d1, d2)` of any composition of the
//! supported operations is correct to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself: `(t, 1, 0)`.
    pub const fn variable(t: f64) -> Self {
        Jet { v: t, d1: 1.0, d2: 0.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Chain rule for a scalar function with known `g`, `g'`, `g''` at `self.v`.
    #[inline]
    pub fn chain(&self, g: f64, dg: f64, d2g: f64) -> Jet {
        Jet {
            v: g,
            d1: dg * self.d1,
            d2: d2g * self.d1 * self.d1 + dg * self.d2,
        }
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    /// Natural log; caller guarantees `v > 0`.
    pub fn ln(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    /// Square root; caller guarantees `v > 0`.
    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn square(self) -> Jet {
        self * self
    }

    /// Integer power by repeated squaring; valid for any sign of the base.
    pub fn powi(self, n: i32) -> Jet {
        if n == 0 {
            return Jet::constant(1.0);
        }
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Jet::constant(1.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Real power with constant exponent; caller guarantees `v > 0`.
    pub fn powf(self, p: f64) -> Jet {
        let g = self.v.powf(p);
        let dg = p * self.v.powf(p - 1.0);
        let d2g = p * (p - 1.0) * self.v.powf(p - 2.0);
        self.chain(g, dg, d2g)
    }

    /// `self ^ e` with a variable exponent, as `exp(e ln self)`; needs `v > 0`.
    pub fn pow(self, e: Jet) -> Jet {
        (e * self.ln()).exp()
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
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
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, o: f64) -> Jet {
        Jet::new(self.v + o, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, o: f64) -> Jet {
        Jet::new(self.v - o, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        Jet::new(self.v * o, self.d1 * o, self.d2 * o)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        Jet::new(self.v / o, self.d1 / o, self.d2 / o)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        o + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self - o.v, -o.d1, -o.d2)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        o.recip() * self
    }
}
