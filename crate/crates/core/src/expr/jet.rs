use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::ExprError;

/// Value and the first three complex derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Jet3 {
    pub const fn new(c0: Complex64, c1: Complex64, c2: Complex64, c3: Complex64) -> Self {
        Self { c0, c1, c2, c3 }
    }

    pub const fn constant(c: Complex64) -> Self {
        Self::new(c, ZERO, ZERO, ZERO)
    }

    /// The identity function seeded at `z`.
    pub const fn variable(z: Complex64) -> Self {
        Self::new(z, ONE, ZERO, ZERO)
    }

    /// Component `k` (0..=3); `None` past order 3.
    pub fn component(&self, k: usize) -> Option<Complex64> {
        match k {
            0 => Some(self.c0),
            1 => Some(self.c1),
            2 => Some(self.c2),
            3 => Some(self.c3),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.c0, self.c1, self.c2, self.c3].iter().all(|c| c.is_finite())
    }

    /// Composes a scalar function with this jet, given that function's value
    /// and first three derivatives at `self.c0` (Faa di Bruno through order 3).
    fn compose(&self, d0: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        let (g1, g2, g3) = (self.c1, self.c2, self.c3);
        Self {
            c0: d0,
            c1: d1 * g1,
            c2: d2 * g1 * g1 + d1 * g2,
            c3: d3 * g1 * g1 * g1 + 3.0 * d2 * g1 * g2 + d1 * g3,
        }
    }

    pub fn recip(&self) -> Result<Self, ExprError> {
        let x = self.c0;
        if x == ZERO {
            return Err(ExprError::DivisionByZero);
        }
        let r = x.inv();
        let r2 = r * r;
        Ok(self.compose(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExprError> {
        Ok(*self * rhs.recip()?)
    }

    /// Integer power. Derivative terms whose falling-factorial coefficient
    /// vanishes are dropped, so `0^n` stays finite for `n >= 0`.
    pub fn powi(&self, n: i32) -> Result<Self, ExprError> {
        let x = self.c0;
        if n < 0 && x == ZERO {
            return Err(ExprError::DivisionByZero);
        }
        let mut d = [ZERO; 4];
        let mut coeff = 1.0;
        for (j, dj) in d.iter_mut().enumerate() {
            if coeff != 0.0 {
                let e = n - j as i32;
                if e < 0 && x == ZERO {
                    return Err(ExprError::DivisionByZero);
                }
                *dj = coeff * x.powi(e);
            }
            coeff *= f64::from(n - j as i32);
        }
        Ok(self.compose(d[0], d[1], d[2], d[3]))
    }

    pub fn exp(&self) -> Self {
        let e = self.c0.exp();
        self.compose(e, e, e, e)
    }

    /// Principal logarithm; the closed cut (-inf, 0] is rejected.
    pub fn ln(&self) -> Result<Self, ExprError> {
        let x = self.c0;
        check_cut(x, "log")?;
        let r = x.inv();
        let r2 = r * r;
        Ok(self.compose(x.ln(), r, -r2, 2.0 * r2 * r))
    }

    /// Principal square root; the closed cut (-inf, 0] is rejected.
    pub fn sqrt(&self) -> Result<Self, ExprError> {
        let x = self.c0;
        check_cut(x, "sqrt")?;
        let s = x.sqrt();
        let s_inv = s.inv();
        let s3 = s_inv * s_inv * s_inv;
        Ok(self.compose(s, 0.5 * s_inv, -0.25 * s3, 0.375 * s3 * s_inv * s_inv))
    }
}

pub(crate) fn check_cut(x: Complex64, func: &'static str) -> Result<(), ExprError> {
    if x.im == 0.0 && x.re <= 0.0 {
        Err(ExprError::BranchCut { func, at: x })
    } else {
        Ok(())
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.c0 - o.c0, self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.c0, -self.c1, -self.c2, -self.c3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            c0: self.c0 * o.c0,
            c1: self.c1 * o.c0 + self.c0 * o.c1,
            c2: self.c2 * o.c0 + 2.0 * self.c1 * o.c1 + self.c0 * o.c2,
            c3: self.c3 * o.c0 + 3.0 * self.c2 * o.c1 + 3.0 * self.c1 * o.c2 + self.c0 * o.c3,
        }
    }
}
