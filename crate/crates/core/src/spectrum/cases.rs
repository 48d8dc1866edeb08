//! Non-vanishing of the Evans function away from the critical eigenvalue:
//! sampling in the intermediate regime, the reduced H₁·H₂ factorization
//! for order-one λ, and exclusion of λ = 0 on the mass-constrained space.
//!
//! Regime boundaries used here (|λ| ≤ 5ε, 5ε < εω < 0.5,
//! |λ| ≥ 0.5·min|f_u^±|) are numerical choices, not sharp thresholds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::evans::{EvansSample, EvansSystem};
use super::operator::LinearizedOperator;
use crate::branch::BranchData;
use crate::error::{Error, Result};
use crate::layer::{FrontProfile, LayerGeometry};
use crate::model::{BistableModel, ProblemParams};
use crate::numerics::ode::Dopri5;
use crate::steady::{refine_from, NewtonConfig, SteadyState};

/// Directions λ̂ on the closed right half of the unit circle.
pub fn unit_directions() -> Vec<Complex64> {
    (0..8).map(|k| Complex64::from_polar(1.0, -PI / 2.0 + k as f64 * PI / 7.0)).collect()
}

/// ω values spread geometrically over the intermediate regime.
pub fn default_omega_grid(epsilon: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = (5.5, 0.45 / epsilon);
    if count < 2 || hi <= lo {
        return vec![lo];
    }
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Case2Report {
    pub samples: Vec<EvansSample>,
    pub min_abs_g: f64,
    #[serde(serialize_with = "super::ser_complex")]
    pub argmin: Complex64,
    pub passed: bool,
}

pub fn case2_sampling(
    model: &BistableModel,
    state: &SteadyState,
    omega_grid: &[f64],
) -> Result<Case2Report> {
    let eps = state.params.epsilon;
    if let Some(w) = omega_grid.iter().find(|&&w| !(eps * w > 5.0 * eps && eps * w < 0.5)) {
        return Err(Error::InvalidInput(format!(
            "omega = {w} puts eps*omega outside the intermediate regime (5 eps, 0.5)"
        )));
    }
    let dirs = unit_directions();
    let lambdas: Vec<Complex64> =
        omega_grid.iter().flat_map(|&w| dirs.iter().map(move |&d| eps * w * d)).collect();
    let samples = EvansSystem::new(model, state)?.sample(&lambdas)?;
    let (min_abs_g, argmin) = samples
        .iter()
        .map(|s| (s.g_value.norm(), s.lambda))
        .fold((f64::INFINITY, Complex64::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a });
    Ok(Case2Report { samples, min_abs_g, argmin, passed: min_abs_g >= 1e-6 })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Case3Report {
    #[serde(serialize_with = "super::ser_complex")]
    pub lambda_hat: Complex64,
    pub omega0: f64,
    #[serde(serialize_with = "super::ser_complex")]
    pub g_minus: Complex64,
    #[serde(serialize_with = "super::ser_complex")]
    pub g_plus: Complex64,
    #[serde(rename = "H1", serialize_with = "super::ser_complex")]
    pub h1: Complex64,
    #[serde(rename = "H2", serialize_with = "super::ser_complex")]
    pub h2: Complex64,
    /// −ω₀(∫R⁻² + ∫R⁺²), the λ̂-derivative of H₂ for real λ̂.
    #[serde(rename = "dH2_dmu")]
    pub dh2_dmu: Option<f64>,
    pub nonvanishing: bool,
}

struct RiccatiEnd {
    sigma: Complex64,
    square_integral: Complex64,
}

/// Logarithmic derivative at z = 0 of the solution of R'' + (f_u(W) − μ)R = 0
/// decaying at the given end, and ∫R² over the half line with R(0) = 1.
fn riccati(
    model: &BistableModel,
    profile: &FrontProfile,
    mu: Complex64,
    left: bool,
) -> Result<RiccatiEnd> {
    let v = profile.v_star;
    let n = profile.z_grid.len();
    let (z_end, h_end) = if left {
        (profile.z_grid[0], profile.h_minus)
    } else {
        (profile.z_grid[n - 1], profile.h_plus)
    };
    let k = (mu - model.f_u(h_end, v)).sqrt();
    let sign = if left { 1.0 } else { -1.0 };
    // y = (σ, ln R, ∫R²), with R(z_end) = 1 and the analytic tail folded in
    let mut y = [sign * k, Complex64::new(0.0, 0.0), sign * 0.5 / k];
    let rhs = |z: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let w = profile.w_at(z);
        dy[0] = -(model.f_u(w, v) - mu) - y[0] * y[0];
        dy[1] = y[0];
        dy[2] = (2.0 * y[1]).exp();
    };
    let solver = Dopri5 { rtol: 1e-11, atol: 1e-13, ..Dopri5::default() };
    solver
        .solve(rhs, z_end, 0.0, &mut y, |_, _| false)
        .map_err(|e| Error::StiffnessOverflow { x: e.x, min_feasible_epsilon: f64::NAN })?;
    // the right integral ran backward
    Ok(RiccatiEnd { sigma: y[0], square_integral: sign * y[2] * (-2.0 * y[1]).exp() })
}

pub fn case3_nonvanishing(
    model: &BistableModel,
    branch: &BranchData,
    profile: &FrontProfile,
    geom: &LayerGeometry,
    params: &ProblemParams,
    lambda_hat: Complex64,
    omega0: f64,
) -> Result<Case3Report> {
    if lambda_hat.re < 0.0 || lambda_hat.norm() == 0.0 || omega0 <= 0.0 {
        return Err(Error::InvalidInput("need Re λ̂ ≥ 0, λ̂ ≠ 0 and ω₀ > 0".into()));
    }
    let v = branch.v_star;
    let mu = omega0 * lambda_hat;
    let g_of = |h: f64| -> Result<Complex64> {
        let (fu, fv) = (model.f_u(h, v), model.f_v(h, v));
        let den = fu - mu;
        if den.norm() < 1e-10 {
            return Err(Error::ResonantDenominator);
        }
        Ok(mu * (fu - fv - mu) / den)
    };
    let g_minus = g_of(branch.h_minus_star)?;
    let g_plus = g_of(branch.h_plus_star)?;
    let x0 = geom.x0_jump_up_frame();
    let d = params.d;
    let side = |g: Complex64, len: f64| {
        let k = (g / d).sqrt();
        k * (len * k).tanh()
    };
    let h1 = side(g_minus, x0) + side(g_plus, 1.0 - x0);

    let l = riccati(model, profile, mu, true)?;
    let r = riccati(model, profile, mu, false)?;
    let h2 = r.sigma - l.sigma;
    let dh2_dmu = (lambda_hat.im == 0.0)
        .then(|| -omega0 * (l.square_integral.re + r.square_integral.re));
    Ok(Case3Report {
        lambda_hat,
        omega0,
        g_minus,
        g_plus,
        h1,
        h2,
        dh2_dmu,
        nonvanishing: h1.norm() > 0.0 && h2.norm() > 0.0,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroModeReport {
    pub xi: f64,
    pub delta: f64,
    /// ∫(∂_ξu + ∂_ξv)dx of the difference quotient
    pub constraint_integral: f64,
    /// max-norm of the linearization applied to the difference quotient
    pub operator_residual: f64,
    /// max-norm of the difference quotient itself
    pub quotient_norm: f64,
    pub passed: bool,
}

/// Differentiates the steady state with respect to the mass. The operator
/// is taken at the state refined at ξ + δ/2, about which the one-sided
/// quotient is centred.
pub fn zero_mode_exclusion(
    model: &BistableModel,
    base: &SteadyState,
    delta: f64,
) -> Result<ZeroModeReport> {
    let params = base.params;
    let cfg = NewtonConfig::default();
    let at = |xi: f64| -> Result<SteadyState> {
        let p = ProblemParams { xi, ..params };
        refine_from(model, &p, &base.u, base.c, base.alpha, &cfg)
    };
    let upper = at(params.xi + delta)?;
    let mid = at(params.xi + 0.5 * delta)?;
    let n = base.u.len();
    let dq: Vec<[f64; 2]> = (0..n)
        .map(|i| [(upper.u[i] - base.u[i]) / delta, (upper.v[i] - base.v[i]) / delta])
        .collect();
    let op = LinearizedOperator::from_state(model, &mid);
    let p: Vec<f64> = dq.iter().map(|x| x[0]).collect();
    let q: Vec<f64> = dq.iter().map(|x| x[1]).collect();
    let (lp, lq) = op.apply_real(&p, &q);
    let operator_residual = lp.iter().chain(&lq).fold(0.0f64, |m, x| m.max(x.abs()));
    let quotient_norm = p.iter().chain(&q).fold(0.0f64, |m, x| m.max(x.abs()));
    let w = op.weights();
    let constraint_integral: f64 = (0..n).map(|i| w[i] * (p[i] + q[i])).sum();
    Ok(ZeroModeReport {
        xi: params.xi,
        delta,
        constraint_integral,
        operator_residual,
        quotient_norm,
        passed: (constraint_integral - 1.0).abs() <= 1e-6,
    })
}
