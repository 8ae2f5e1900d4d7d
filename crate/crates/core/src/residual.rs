//! Scale-free residuals and their order-independent aggregation.

use serde::Serialize;

/// Max-abs defect of an identity together with the magnitude of its inputs.
///
/// The scale-free value is `abs / (1 + scale)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Self { abs, scale }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Residual of `lhs == rhs`, scaled by the larger side.
    pub fn of_sides<'a>(lhs: impl IntoIterator<Item = &'a f64>, rhs: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut abs = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in lhs.into_iter().zip(rhs) {
            abs = abs.max((a - b).abs());
            scale = scale.max(a.abs()).max(b.abs());
        }
        Self { abs, scale }
    }

    /// Residual of a quantity that must vanish, against an explicit scale.
    pub fn of_defect<'a>(defect: impl IntoIterator<Item = &'a f64>, scale: f64) -> Self {
        Self {
            abs: max_abs(defect),
            scale,
        }
    }

    pub fn scaled(&self) -> f64 {
        let r = self.abs / (1.0 + self.scale);
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }

    /// Keeps whichever residual has the larger scale-free value.
    pub fn worst(self, other: Self) -> Self {
        if other.scaled() > self.scaled() {
            other
        } else {
            self
        }
    }
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter()
        .fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
}
