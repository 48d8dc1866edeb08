//! Evans function of the linearization about a refined steady state.
//!
//! The eigenvalue problem is written as V' = A(x; λ)V for
//! V = (p, εp_x, q, q_x). Two solutions satisfying the Neumann condition
//! at x = 0 are shot forward and two satisfying it at x = 1 backward, to
//! the layer position. Each pair is re-orthonormalized after every
//! accepted step; the discarded triangular factors are accumulated in
//! `log_scale`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BistableModel, ProblemParams};
use crate::numerics::ode::Dopri5;
use crate::numerics::spline::UniformSpline;
use crate::steady::SteadyState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvansSample {
    #[serde(serialize_with = "super::ser_complex")]
    pub lambda: Complex64,
    /// det of the four orthonormalized shooting vectors at the matching point.
    #[serde(serialize_with = "super::ser_complex")]
    pub g_value: Complex64,
    /// Same determinant with each pair normalized to identity (p, q) data
    /// at the matching point; analytic in λ away from its poles.
    #[serde(serialize_with = "super::ser_complex")]
    pub g_normalized: Complex64,
    pub log_scale: f64,
}

/// Coefficients of the shooting problem, sampled from a refined state.
#[derive(Debug, Clone)]
pub struct EvansSystem {
    model: BistableModel,
    params: ProblemParams,
    u: UniformSpline,
    c: f64,
    pub x_match: f64,
    pub solver: Dopri5,
}

fn frame_qr(y: &mut [Complex64]) -> f64 {
    let (a, b) = y.split_at_mut(4);
    let r11 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in a.iter_mut() {
        *z /= r11;
    }
    let r12: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    for (x, y) in a.iter().zip(b.iter_mut()) {
        *y -= r12 * x;
    }
    let r22 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in b.iter_mut() {
        *z /= r22;
    }
    r11.ln() + r22.ln()
}

impl EvansSystem {
    pub fn new(model: &BistableModel, state: &SteadyState) -> Result<Self> {
        let n = state.u.len();
        let h = 1.0 / (n - 1) as f64;
        let x_match = state.layer_position_detected.ok_or_else(|| {
            Error::InvalidInput("steady state has no detected layer position".into())
        })?;
        Ok(Self {
            model: model.clone(),
            params: state.params,
            u: UniformSpline::clamped_flat(0.0, h, &state.u),
            c: state.c,
            x_match,
            solver: Dopri5::default(),
        })
    }

    fn coefficients(&self, x: f64) -> (f64, f64) {
        let u = self.u.eval(x);
        let e2 = self.params.epsilon * self.params.epsilon;
        let v = (self.c - e2 * u) / self.params.d;
        (self.model.f_u(u, v), self.model.f_v(u, v))
    }

    fn shoot(&self, lambda: Complex64, from: f64) -> Result<([Complex64; 8], f64)> {
        let eps = self.params.epsilon;
        let d = self.params.d;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut y = [zero; 8];
        y[0] = one;
        y[6] = one;
        let mut log_scale = 0.0;
        let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let (fu, fv) = self.coefficients(x);
            for k in 0..2 {
                let v = &y[4 * k..4 * k + 4];
                dy[4 * k] = v[1] / eps;
                dy[4 * k + 1] = ((lambda - fu) * v[0] - fv * v[2]) / eps;
                dy[4 * k + 2] = v[3];
                dy[4 * k + 3] = (fu * v[0] + (lambda + fv) * v[2]) / d;
            }
        };
        self.solver
            .solve(rhs, from, self.x_match, &mut y, |_, y| {
                log_scale += frame_qr(y);
                true
            })
            .map_err(|e| Error::StiffnessOverflow { x: e.x, min_feasible_epsilon: 2.0 * eps })?;
        log_scale += frame_qr(&mut y);
        Ok((y, log_scale))
    }

    pub fn evaluate(&self, lambda: Complex64) -> Result<EvansSample> {
        let (left, sl) = self.shoot(lambda, 0.0)?;
        let (right, sr) = self.shoot(lambda, 1.0)?;
        let m = Matrix4::from_fn(|r, c| match c {
            0 => left[r],
            1 => left[4 + r],
            2 => right[r],
            _ => right[4 + r],
        });
        let g = m.determinant();
        let pdet = |y: &[Complex64; 8]| y[0] * y[6] - y[4] * y[2];
        let g_normalized = g / (pdet(&left) * pdet(&right));
        Ok(EvansSample { lambda, g_value: g, g_normalized, log_scale: sl + sr })
    }

    /// Evaluates the Evans function on many λ in parallel.
    pub fn sample(&self, lambdas: &[Complex64]) -> Result<Vec<EvansSample>> {
        lambdas.par_iter().map(|&l| self.evaluate(l)).collect()
    }

    /// The normalized determinant with the kernel zero at λ = 0 divided out.
    fn deflated(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.evaluate(lambda)?.g_normalized / lambda)
    }

    /// Zero of the Evans function near `seed` by Muller's method, confined
    /// to |λ − seed| ≤ 5ε.
    pub fn zero_search(&self, seed: Complex64) -> Result<Complex64> {
        let radius = 5.0 * self.params.epsilon;
        let fail = || Error::NoZeroFound { seed_re: seed.re, seed_im: seed.im, radius };
        let spread = 0.05 * seed.norm().max(self.params.epsilon);
        let mut x = [
            seed - spread,
            seed + spread,
            seed + Complex64::new(0.0, 0.5 * spread) * 1e-3,
        ];
        let mut f = [self.deflated(x[0])?, self.deflated(x[1])?, self.deflated(x[2])?];
        for _ in 0..60 {
            let h1 = x[1] - x[0];
            let h2 = x[2] - x[1];
            let d1 = (f[1] - f[0]) / h1;
            let d2 = (f[2] - f[1]) / h2;
            let a = (d2 - d1) / (h2 + h1);
            let b = a * h2 + d2;
            let disc = (b * b - 4.0 * a * f[2]).sqrt();
            let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
            if den.norm() == 0.0 || !den.is_finite() {
                return Err(fail());
            }
            let dx = -2.0 * f[2] / den;
            let next = x[2] + dx;
            if (next - seed).norm() > radius || !next.is_finite() {
                return Err(fail());
            }
            if dx.norm() <= 1e-13 * next.norm() + 1e-16 {
                return Ok(next);
            }
            x = [x[1], x[2], next];
            f = [f[1], f[2], self.deflated(next)?];
        }
        Err(fail())
    }
}

/// Evans function at a single λ.
pub fn evans_value(model: &BistableModel, state: &SteadyState, lambda: Complex64) -> Result<EvansSample> {
    EvansSystem::new(model, state)?.evaluate(lambda)
}

/// Evans zero near `seed`.
pub fn evans_zero_search(model: &BistableModel, state: &SteadyState, seed: Complex64) -> Result<Complex64> {
    EvansSystem::new(model, state)?.zero_search(seed)
}
