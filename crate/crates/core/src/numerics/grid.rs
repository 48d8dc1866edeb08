//! Uniform node-centred grid on [0, 1] with Neumann ghost-node closure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub n: usize,
}

impl UniformGrid {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "grid needs at least three nodes");
        Self { n }
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Composite trapezoid weights. These are the weights under which the
    /// Neumann Laplacian below sums to zero exactly.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n];
        w[0] = 0.5 * h;
        w[self.n - 1] = 0.5 * h;
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let h = self.spacing();
        let n = self.n;
        let inner: f64 = values[1..n - 1].iter().sum();
        h * (inner + 0.5 * (values[0] + values[n - 1]))
    }

    /// Second-order Neumann Laplacian with ghost nodes u[-1] = u[1], u[n] = u[n-2].
    pub fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        let ih2 = 1.0 / (self.spacing() * self.spacing());
        out[0] = 2.0 * (u[1] - u[0]) * ih2;
        for i in 1..n - 1 {
            out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2;
        }
        out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * ih2;
    }

    /// Coefficients of the Laplacian row i as (lower, diag, upper).
    pub fn laplacian_row(&self, i: usize) -> (f64, f64, f64) {
        let ih2 = 1.0 / (self.spacing() * self.spacing());
        let n = self.n;
        if i == 0 {
            (0.0, -2.0 * ih2, 2.0 * ih2)
        } else if i == n - 1 {
            (2.0 * ih2, -2.0 * ih2, 0.0)
        } else {
            (ih2, -2.0 * ih2, ih2)
        }
    }
}

/// Location of the first crossing of `level` by linearly interpolated data.
pub fn level_crossing(x: &[f64], u: &[f64], level: f64) -> Option<f64> {
    for i in 0..u.len() - 1 {
        let a = u[i] - level;
        let b = u[i + 1] - level;
        if a == 0.0 {
            return Some(x[i]);
        }
        if a * b < 0.0 {
            return Some(x[i] + (x[i + 1] - x[i]) * a / (a - b));
        }
    }
    None
}
