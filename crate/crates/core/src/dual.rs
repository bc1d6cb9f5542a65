//! First-order dual numbers for forward-mode differentiation.
//!
//! `Dual { val, der }` carries a value and the derivative of that value with
//! respect to a single seed variable. Jacobians of the handle maps are
//! assembled column by column from these.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub val: f64,
    pub der: f64,
}

impl Dual {
    pub fn new(val: f64, der: f64) -> Self {
        Self { val, der }
    }

    /// Constant (zero derivative).
    pub fn constant(val: f64) -> Self {
        Self { val, der: 0.0 }
    }

    /// Seed variable (unit derivative).
    pub fn variable(val: f64) -> Self {
        Self { val, der: 1.0 }
    }

    pub fn sin(self) -> Self {
        Self::new(self.val.sin(), self.val.cos() * self.der)
    }

    pub fn cos(self) -> Self {
        Self::new(self.val.cos(), -self.val.sin() * self.der)
    }

    /// |x| with derivative sign(x); the kink at 0 reports derivative 0.
    /// Callers in this crate only differentiate through `abs` where the
    /// surrounding factor is flat, so the convention never surfaces.
    pub fn abs(self) -> Self {
        let s = if self.val > 0.0 {
            1.0
        } else if self.val < 0.0 {
            -1.0
        } else {
            0.0
        };
        Self::new(self.val.abs(), s * self.der)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.val + rhs.val, self.der + rhs.der)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.val - rhs.val, self.der - rhs.der)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.val * rhs.val, self.val * rhs.der + self.der * rhs.val)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        Dual::new(
            self.val / rhs.val,
            (self.der * rhs.val - self.val * rhs.der) / (rhs.val * rhs.val),
        )
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.val, -self.der)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::variable(1.7);
        let y = x * x * x; // d/dx x^3 = 3x^2
        assert!((y.der - 3.0 * 1.7 * 1.7).abs() < 1e-14);
    }

    #[test]
    fn quotient_and_trig() {
        let x = Dual::variable(0.4);
        let y = x.sin() / x.cos(); // tan, derivative 1/cos^2
        let expect = 1.0 / (0.4f64.cos() * 0.4f64.cos());
        assert!((y.der - expect).abs() < 1e-13);
    }
}
