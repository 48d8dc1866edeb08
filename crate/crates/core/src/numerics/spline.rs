//! Cubic spline on uniformly spaced data with clamped (zero-slope) ends.

use super::banded::Tridiagonal;

#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    // second derivatives at the nodes
    m: Vec<f64>,
}

impl UniformSpline {
    /// Spline with zero end slopes, matching Neumann data.
    pub fn clamped_flat(x0: f64, h: f64, y: &[f64]) -> Self {
        let n = y.len();
        assert!(n >= 3);
        let mut t = Tridiagonal::zeros(n);
        let mut rhs = vec![0.0; n];
        // clamped end conditions s'(x0) = s'(x_end) = 0
        t.diag[0] = h / 3.0;
        t.upper[0] = h / 6.0;
        rhs[0] = (y[1] - y[0]) / h;
        for i in 1..n - 1 {
            t.lower[i] = h / 6.0;
            t.diag[i] = 2.0 * h / 3.0;
            t.upper[i] = h / 6.0;
            rhs[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
        }
        t.lower[n - 1] = h / 6.0;
        t.diag[n - 1] = h / 3.0;
        rhs[n - 1] = -(y[n - 1] - y[n - 2]) / h;
        t.factor().expect("spline system is diagonally dominant").solve_in_place(&mut rhs);
        Self { x0, h, y: y.to_vec(), m: rhs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = ((x - self.x0) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let a = 1.0 - t;
        let h2 = self.h * self.h;
        a * self.y[i]
            + t * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (t * t * t - t) * self.m[i + 1]) * h2 / 6.0
    }
}
