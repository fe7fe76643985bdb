//! Uniform grids on [0, 1] and boundary data.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Values at `x_j = j / n`, `j = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub values: Vec<f64>,
    pub time: f64,
}

impl GridField {
    pub fn new(values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(CoreError::config("grid", "need at least two nodes"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::Domain(format!("non-finite value at grid index {i}")));
        }
        Ok(GridField { values, time })
    }

    pub fn from_fn(cells: usize, time: f64, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..=cells).map(|j| f(j as f64 / cells as f64)).collect();
        GridField { values, time }
    }

    pub fn constant(cells: usize, value: f64) -> Self {
        GridField::from_fn(cells, 0.0, |_| value)
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.cells() as f64
    }

    /// Index of the node nearest to `x`.
    pub fn index_of(&self, x: f64) -> usize {
        ((x * self.cells() as f64).round() as usize).min(self.cells())
    }

    /// Trapezoid rule over [0, 1].
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.dx())
    }
}

pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    dx * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Trapezoid weights of the grid nodes.
pub fn node_weights(cells: usize) -> Vec<f64> {
    let dx = 1.0 / cells as f64;
    let mut w = vec![dx; cells + 1];
    w[0] = 0.5 * dx;
    w[cells] = 0.5 * dx;
    w
}

/// Boundary parameters `(u, v)` and the constant `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub u: f64,
    pub v: f64,
    #[serde(default)]
    pub a: f64,
}

impl BoundaryParams {
    pub fn new(u: f64, v: f64) -> Self {
        BoundaryParams { u, v, a: 0.0 }
    }

    pub fn with_a(self, a: f64) -> Self {
        BoundaryParams { a, ..self }
    }

    /// `dZ/dx = robin_left * Z` at 0.
    pub fn robin_left(&self) -> f64 {
        self.u - 0.5
    }

    /// `dZ/dx = -robin_right * Z` at 1.
    pub fn robin_right(&self) -> f64 {
        self.v - 0.5
    }

    fn affine(&self, x: f64) -> f64 {
        -2.0 * (self.v + self.a) * x + self.u + self.a
    }

    pub fn a1(&self, x: f64) -> f64 {
        2.0 * self.affine(x)
    }

    pub fn a2(&self, x: f64) -> f64 {
        0.5 * (self.affine(x).powi(2) - self.v - self.a)
    }

    /// The shift taking `h` with slopes `u + a`, `-v - a` to zero slopes.
    pub fn tilde_shift(&self, x: f64) -> f64 {
        0.5 * (self.v + self.a) * x * x - (self.u + self.a) * x
    }

    /// Upper bound for the Laplace coefficients when `u + v > 0`.
    pub fn c_uv(&self) -> f64 {
        if self.u <= 0.0 || self.u >= 1.0 {
            2.0
        } else {
            2.0 * self.u
        }
    }

    pub fn in_proven_regime(&self) -> bool {
        self.u + self.v > 0.0 && self.u.min(self.v) > -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_uv_cases() {
        assert_eq!(BoundaryParams::new(-0.5, 1.0).c_uv(), 2.0);
        assert_eq!(BoundaryParams::new(1.0, 1.0).c_uv(), 2.0);
        assert_eq!(BoundaryParams::new(0.25, 1.0).c_uv(), 0.5);
    }

    #[test]
    fn a_functions_at_sample_points() {
        let p = BoundaryParams::new(0.4, -0.2).with_a(0.05);
        assert!((p.a1(0.0) - 0.9).abs() < 1e-15);
        assert!((p.a1(1.0) - 1.5).abs() < 1e-15);
        assert!((p.a2(0.0) - 0.5 * (0.45f64.powi(2) + 0.15)).abs() < 1e-15);
        assert!((p.a2(0.5) - 0.5 * (0.6f64.powi(2) + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn shift_removes_the_left_slope() {
        // The slope at 1 becomes -(u + a) rather than zero.
        let p = BoundaryParams::new(0.3, 0.7).with_a(0.1);
        let h = |x: f64| (p.u + p.a) * x - 0.5 * (p.u + p.v + 2.0 * p.a) * x * x;
        let t = |x: f64| h(x) + p.tilde_shift(x);
        let d = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + 1e-6) - f(x - 1e-6)) / 2e-6;
        assert!((d(&h, 1.0) + (p.v + p.a)).abs() < 1e-8);
        assert!(d(&t, 0.0).abs() < 1e-8);
        assert!((d(&t, 1.0) + (p.u + p.a)).abs() < 1e-8);
    }

    #[test]
    fn trapezoid_exact_for_linear() {
        let f = GridField::from_fn(8, 0.0, |x| 3.0 * x + 1.0);
        assert!((f.integral() - 2.5).abs() < 1e-14);
    }
}
