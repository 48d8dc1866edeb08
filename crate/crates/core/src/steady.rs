//! Exact discrete steady states. Stationary solutions satisfy the first
//! integral ε²u + Dv ≡ C, so the problem reduces to
//!
//! ```text
//! ε² u_xx + f(u, (C − ε²u)/D) = 0,     ∫ (u + (C − ε²u)/D) dx = ξ,
//! ```
//!
//! with unknowns (u, C). Newton steps solve a tridiagonal system bordered
//! by the C column and the mass row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layer::CompositeApprox;
use crate::model::{BistableModel, ProblemParams};
use crate::numerics::banded::{solve_bordered, Tridiagonal};
use crate::numerics::{level_crossing, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonConfig {
    pub max_iters: usize,
    /// Convergence threshold on the max-norm of the reduced residual.
    pub tol: f64,
    pub armijo_factor: f64,
    pub min_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { max_iters: 50, tol: 1e-11, armijo_factor: 0.5, min_step: 1.0 / 1024.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    pub x_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub residual_inf: f64,
    pub first_integral_dev: f64,
    pub mass_error: f64,
    pub newton_iters: usize,
    pub alpha: f64,
    pub layer_position_detected: Option<f64>,
    pub params: ProblemParams,
}

impl SteadyState {
    pub fn grid(&self) -> UniformGrid {
        UniformGrid::new(self.x_grid.len())
    }

    pub fn mass(&self) -> f64 {
        let s: Vec<f64> = self.u.iter().zip(&self.v).map(|(u, v)| u + v).collect();
        self.grid().integrate(&s)
    }
}

fn reduced_residual(
    model: &BistableModel,
    params: &ProblemParams,
    grid: &UniformGrid,
    u: &[f64],
    c: f64,
    lap: &mut [f64],
    out: &mut [f64],
) -> f64 {
    let e2 = params.epsilon * params.epsilon;
    grid.laplacian(u, lap);
    let mut mass = 0.0;
    let w = grid.weights();
    for i in 0..u.len() {
        let v = (c - e2 * u[i]) / params.d;
        out[i] = e2 * lap[i] + model.f(u[i], v);
        mass += w[i] * (u[i] + v);
    }
    mass - params.xi
}

fn merit(r: &[f64], g: f64) -> f64 {
    r.iter().fold(g.abs(), |m, x| m.max(x.abs()))
}

/// Newton refinement from the composite approximation.
pub fn refine(
    model: &BistableModel,
    params: &ProblemParams,
    init: &CompositeApprox,
    cfg: &NewtonConfig,
) -> Result<SteadyState> {
    refine_from(model, params, &init.u, init.c, init.alpha, cfg)
}

/// Newton refinement from arbitrary nodal data `u0` and first-integral
/// constant `c0`; `alpha` is the level used to locate the layer.
pub fn refine_from(
    model: &BistableModel,
    params: &ProblemParams,
    u0: &[f64],
    c0: f64,
    alpha: f64,
    cfg: &NewtonConfig,
) -> Result<SteadyState> {
    let n = u0.len();
    let grid = UniformGrid::new(n);
    let h = grid.spacing();
    let limit = params.epsilon / 8.0;
    if h > limit * (1.0 + 1e-12) {
        return Err(Error::UnresolvedLayer { h, limit });
    }
    let e2 = params.epsilon * params.epsilon;
    let dd = params.d;
    let w = grid.weights();
    let row: Vec<f64> = w.iter().map(|wi| wi * (1.0 - e2 / dd)).collect();
    let corner = w.iter().sum::<f64>() / dd;

    let mut u = u0.to_vec();
    let mut c = c0;
    let mut lap = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut g = reduced_residual(model, params, &grid, &u, c, &mut lap, &mut r);
    let mut norm = merit(&r, g);
    let mut iters = 0;
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];

    while norm > cfg.tol {
        if iters >= cfg.max_iters || !norm.is_finite() {
            return Err(Error::NoConvergence { iters, residual: norm });
        }
        iters += 1;
        let mut jac = Tridiagonal::zeros(n);
        let mut col = vec![0.0; n];
        for i in 0..n {
            let v = (c - e2 * u[i]) / dd;
            let (lo, di, up) = grid.laplacian_row(i);
            let fv = model.f_v(u[i], v);
            jac.lower[i] = e2 * lo;
            jac.diag[i] = e2 * di + model.f_u(u[i], v) - e2 / dd * fv;
            jac.upper[i] = e2 * up;
            col[i] = fv / dd;
        }
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let (du, dc) =
            solve_bordered(&jac, &col, &row, corner, &rhs, -g).ok_or(Error::JacobianSingular)?;

        let mut step = 1.0;
        loop {
            for i in 0..n {
                trial[i] = u[i] + step * du[i];
            }
            let c_trial = c + step * dc;
            let g_trial =
                reduced_residual(model, params, &grid, &trial, c_trial, &mut lap, &mut r_trial);
            let m = merit(&r_trial, g_trial);
            if m <= (1.0 - 1e-4 * step) * norm || step <= cfg.min_step {
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                c = c_trial;
                g = g_trial;
                norm = m;
                break;
            }
            step *= cfg.armijo_factor;
        }
        log::debug!("newton iteration {iters}: residual {norm:e}");
    }

    let v: Vec<f64> = u.iter().map(|ui| (c - e2 * ui) / dd).collect();
    let x_grid = grid.nodes();
    let first_integral_dev =
        u.iter().zip(&v).fold(0.0f64, |m, (ui, vi)| m.max((e2 * ui + dd * vi - c).abs()));
    let mut state = SteadyState {
        layer_position_detected: level_crossing(&x_grid, &u, alpha),
        x_grid,
        u,
        v,
        c,
        residual_inf: 0.0,
        first_integral_dev,
        mass_error: 0.0,
        newton_iters: iters,
        alpha,
        params: *params,
    };
    state.mass_error = state.mass() - params.xi;
    let (ru, rv) = full_residual(model, params, &state);
    state.residual_inf = ru.max(rv);
    Ok(state)
}

/// Refines the same state on the grid with twice the resolution (2n − 1
/// nodes), starting from linear interpolation of `coarse`.
pub fn refine_doubled(
    model: &BistableModel,
    coarse: &SteadyState,
    cfg: &NewtonConfig,
) -> Result<SteadyState> {
    let n = coarse.u.len();
    let mut u0 = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        u0.push(coarse.u[i]);
        u0.push(0.5 * (coarse.u[i] + coarse.u[i + 1]));
    }
    u0.push(coarse.u[n - 1]);
    refine_from(model, &coarse.params, &u0, coarse.c, coarse.alpha, cfg)
}

/// Richardson extrapolation (4·fine − coarse)/3 of the nodal values onto
/// the coarse grid; removes the O(h²) discretization error of the state.
pub fn richardson(coarse: &SteadyState, fine: &SteadyState) -> Result<SteadyState> {
    let n = coarse.u.len();
    if fine.u.len() != 2 * n - 1 {
        return Err(Error::InvalidInput(format!(
            "fine grid has {} nodes, expected {}",
            fine.u.len(),
            2 * n - 1
        )));
    }
    let mut out = coarse.clone();
    for i in 0..n {
        out.u[i] = (4.0 * fine.u[2 * i] - coarse.u[i]) / 3.0;
        out.v[i] = (4.0 * fine.v[2 * i] - coarse.v[i]) / 3.0;
    }
    out.c = (4.0 * fine.c - coarse.c) / 3.0;
    out.layer_position_detected = level_crossing(&out.x_grid, &out.u, out.alpha);
    out.mass_error = out.mass() - out.params.xi;
    Ok(out)
}

/// Max-norms of the two stationary equations on the state's grid.
pub fn full_residual(model: &BistableModel, params: &ProblemParams, state: &SteadyState) -> (f64, f64) {
    residual_of(model, params, &state.u, &state.v)
}

/// Same as [`full_residual`] for raw nodal data.
pub fn residual_of(model: &BistableModel, params: &ProblemParams, u: &[f64], v: &[f64]) -> (f64, f64) {
    let n = u.len();
    let grid = UniformGrid::new(n);
    let e2 = params.epsilon * params.epsilon;
    let mut lu = vec![0.0; n];
    let mut lv = vec![0.0; n];
    grid.laplacian(u, &mut lu);
    grid.laplacian(v, &mut lv);
    let mut ru = 0.0f64;
    let mut rv = 0.0f64;
    for i in 0..n {
        let f = model.f(u[i], v[i]);
        ru = ru.max((e2 * lu[i] + f).abs());
        rv = rv.max((params.d * lv[i] - f).abs());
    }
    (ru, rv)
}
