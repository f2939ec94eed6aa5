//! Values with half-widths, combined by root-sum-square.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0 };

    pub fn new(value: f64, error: f64) -> Self {
        Estimate {
            value,
            error: error.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate::new(c * self.value, c * self.error)
    }

    pub fn square(self) -> Self {
        Estimate::new(self.value * self.value, 2.0 * self.value * self.error)
    }

    /// True when |value| is within `k` half-widths of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.value.abs() <= k * self.error
    }

    pub fn sum<I: IntoIterator<Item = Estimate>>(it: I) -> Estimate {
        it.into_iter().fold(Estimate::ZERO, |a, b| a + b)
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error.hypot(o.error))
    }
}

impl Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate::new(self.value - o.value, self.error.hypot(o.error))
    }
}

impl Neg for Estimate {
    type Output = Estimate;
    fn neg(self) -> Estimate {
        Estimate::new(-self.value, self.error)
    }
}

impl Mul for Estimate {
    type Output = Estimate;
    fn mul(self, o: Estimate) -> Estimate {
        Estimate::new(self.value * o.value, (self.error * o.value).hypot(self.value * o.error))
    }
}

impl Div for Estimate {
    type Output = Estimate;
    fn div(self, o: Estimate) -> Estimate {
        let q = self.value / o.value;
        Estimate::new(q, (self.error / o.value).hypot(q * o.error / o.value))
    }
}

impl Mul<Estimate> for f64 {
    type Output = Estimate;
    fn mul(self, o: Estimate) -> Estimate {
        o.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_errors_add_in_quadrature() {
        let a = Estimate::new(1.0, 0.3);
        let b = Estimate::new(2.0, 0.4);
        let s = a - b;
        assert_eq!(s.value, -1.0);
        assert!((s.error - 0.5).abs() < 1e-15);
        assert!((2.0 * a).error == 0.6);
    }

    #[test]
    fn products_use_first_order_sensitivity() {
        let a = Estimate::new(2.0, 0.1);
        let b = Estimate::new(3.0, 0.2);
        let p = a * b;
        assert!((p.error - (0.3f64.hypot(0.4))).abs() < 1e-15);
        let q = a / b;
        assert!((q.error - ((0.1 / 3.0f64).hypot(2.0 / 3.0 * 0.2 / 3.0))).abs() < 1e-15);
    }
}
