//! A value with an absolute error bound, propagated to first order plus the
//! cross term, so inequality sides can carry their quadrature error.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Non-negative absolute error bound.
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self {
            value,
            error: error.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.value, c.abs() * self.error)
    }

    /// `self^e` for a positive value. The bound is the larger excursion of
    /// `t ↦ t^e` over `[value − error, value + error]`, falling back to the
    /// linearization when the interval reaches zero.
    pub fn powf(self, e: f64) -> Self {
        let centre = self.value.powf(e);
        if self.error == 0.0 {
            return Self::exact(centre);
        }
        let hi = (self.value + self.error).powf(e);
        let lo_arg = self.value - self.error;
        let err = if lo_arg > 0.0 {
            (hi - centre).abs().max((centre - lo_arg.powf(e)).abs())
        } else {
            (e * self.value.powf(e - 1.0) * self.error).abs().max((hi - centre).abs())
        };
        Self::new(centre, err)
    }

    pub fn div(self, rhs: Self) -> Self {
        let value = self.value / rhs.value;
        let denom = rhs.value.abs();
        let err = (self.error + value.abs() * rhs.error) / denom;
        Self::new(value, err)
    }
}

impl Add for Estimate {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.error + rhs.error)
    }
}

impl Sub for Estimate {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.error + rhs.error)
    }
}

impl Mul for Estimate {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let err = self.value.abs() * rhs.error + rhs.value.abs() * self.error + self.error * rhs.error;
        Self::new(self.value * rhs.value, err)
    }
}
