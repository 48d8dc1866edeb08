//! Mass-conserving time integration of
//!
//! ```text
//! u_t = ε² u_xx + f(u, v),   v_t = D v_xx − f(u, v),   u_x = v_x = 0 at x = 0, 1.
//! ```
//!
//! Diffusion is treated with the θ-method, the reaction explicitly
//! (second-order Adams–Bashforth after the first step). The same reaction
//! vector is added to u and subtracted from v, and the Neumann Laplacian
//! annihilates the trapezoid weights, so Σ w(u + v) is preserved by every
//! step up to rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BistableModel, ProblemParams};
use crate::numerics::banded::{Tridiagonal, TridiagonalLu};
use crate::numerics::{level_crossing, UniformGrid};
use crate::steady::SteadyState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Implicitness of the diffusion step, in [0.5, 1].
    pub theta: f64,
    pub perturbation_amplitude: f64,
    pub seed: u64,
    /// Time between recorded samples.
    pub sample_interval: f64,
    /// Deviations below this are treated as noise by the rate fit.
    pub fit_floor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.04,
            t_end: 1500.0,
            theta: 0.5,
            perturbation_amplitude: 1e-4,
            seed: 0,
            sample_interval: 1.0,
            fit_floor: 1e-10,
        }
    }
}

impl SimConfig {
    fn check(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::InvalidInput(format!("theta = {} outside [0.5, 1]", self.theta)));
        }
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.sample_interval > 0.0) {
            return Err(Error::InvalidInput("dt, t_end and sample_interval must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    f_prev: Option<Vec<f64>>,
}

impl SimState {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { t: 0.0, u, v, f_prev: None }
    }

    pub fn mass(&self) -> f64 {
        let s: Vec<f64> = self.u.iter().zip(&self.v).map(|(a, b)| a + b).collect();
        UniformGrid::new(self.u.len()).integrate(&s)
    }
}

/// Factorized diffusion solves for a fixed grid, step and θ.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: UniformGrid,
    dt: f64,
    a_u: f64,
    a_v: f64,
    lu_u: TridiagonalLu,
    lu_v: TridiagonalLu,
}

impl Stepper {
    pub fn new(params: &ProblemParams, n: usize, dt: f64, theta: f64) -> Result<Self> {
        let grid = UniformGrid::new(n);
        let a_u = params.epsilon * params.epsilon;
        let a_v = params.d;
        let build = |a: f64| {
            let mut m = Tridiagonal::zeros(n);
            for i in 0..n {
                let (lo, di, up) = grid.laplacian_row(i);
                m.lower[i] = -theta * dt * a * lo;
                m.diag[i] = 1.0 - theta * dt * a * di;
                m.upper[i] = -theta * dt * a * up;
            }
            m.factor().ok_or(Error::LinearSolveFailure)
        };
        Ok(Self { grid, dt, a_u, a_v, lu_u: build(a_u)?, lu_v: build(a_v)? })
    }

    pub fn step(&self, model: &BistableModel, s: &mut SimState, lap: &mut [f64]) -> Result<()> {
        let n = s.u.len();
        let f: Vec<f64> = (0..n).map(|i| model.f(s.u[i], s.v[i])).collect();
        let react: Vec<f64> = match &s.f_prev {
            Some(p) => f.iter().zip(p).map(|(a, b)| 1.5 * a - 0.5 * b).collect(),
            None => f.clone(),
        };
        // increment form: (I − θ dt a L) δ = dt (a L y + r), so rounding in
        // the stiff solve scales with the step change rather than with y
        let mut du = vec![0.0; n];
        self.grid.laplacian(&s.u, lap);
        for i in 0..n {
            du[i] = self.dt * (self.a_u * lap[i] + react[i]);
        }
        self.lu_u.solve_in_place(&mut du);
        self.grid.laplacian(&s.v, lap);
        for i in 0..n {
            lap[i] = self.dt * (self.a_v * lap[i] - react[i]);
        }
        self.lu_v.solve_in_place(lap);
        for i in 0..n {
            s.u[i] += du[i];
            s.v[i] += lap[i];
        }
        if s.u.iter().chain(&s.v).any(|x| !x.is_finite()) {
            return Err(Error::LinearSolveFailure);
        }
        s.f_prev = Some(f);
        s.t += self.dt;
        Ok(())
    }
}

/// One step of the scheme.
pub fn step(
    model: &BistableModel,
    params: &ProblemParams,
    state: &SimState,
    cfg: &SimConfig,
) -> Result<SimState> {
    cfg.check()?;
    let stepper = Stepper::new(params, state.u.len(), cfg.dt, cfg.theta)?;
    let mut out = state.clone();
    let mut lap = vec![0.0; state.u.len()];
    stepper.step(model, &mut out, &mut lap)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSample {
    pub t: f64,
    pub mass: f64,
    pub layer_position: Option<f64>,
    pub deviation_norm: f64,
}

/// Runs `state` forward to `t_end`, recording samples. `reference` is the
/// state deviations are measured from; `stop_above` ends the run early
/// once the deviation exceeds it.
pub fn evolve(
    model: &BistableModel,
    params: &ProblemParams,
    state: &mut SimState,
    cfg: &SimConfig,
    alpha: f64,
    reference: Option<(&[f64], &[f64])>,
    stop_above: f64,
) -> Result<Vec<SimSample>> {
    cfg.check()?;
    let n = state.u.len();
    let grid = UniformGrid::new(n);
    let x = grid.nodes();
    let w = grid.weights();
    let stepper = Stepper::new(params, n, cfg.dt, cfg.theta)?;
    let mut lap = vec![0.0; n];
    let every = ((cfg.sample_interval / cfg.dt).round() as usize).max(1);
    let total = (cfg.t_end / cfg.dt).round() as usize;
    let sample = |s: &SimState| {
        let mut mass = 0.0;
        let mut dev = 0.0;
        for i in 0..n {
            mass += w[i] * (s.u[i] + s.v[i]);
            if let Some((ru, rv)) = reference {
                dev += w[i] * ((s.u[i] - ru[i]).powi(2) + (s.v[i] - rv[i]).powi(2));
            }
        }
        SimSample {
            t: s.t,
            mass,
            layer_position: level_crossing(&x, &s.u, alpha),
            deviation_norm: dev.sqrt(),
        }
    };
    let mut out = vec![sample(state)];
    for k in 1..=total {
        stepper.step(model, state, &mut lap)?;
        if k % every == 0 || k == total {
            let s = sample(state);
            let stop = s.deviation_norm > stop_above;
            out.push(s);
            if stop {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub mass_drift_max: f64,
    pub final_layer_position: Option<f64>,
    pub growth_rate_fit: f64,
    /// (t_start, t_end) of the fitted window
    pub fit_window: (f64, f64),
    pub fit_r2: f64,
    pub converged: bool,
    pub steps: usize,
    #[serde(skip)]
    pub series: Vec<SimSample>,
}

/// Smooth random perturbation with Σ w(p + q) = 0 and weighted L² norm
/// `amplitude`.
pub fn mass_free_perturbation(n: usize, amplitude: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = UniformGrid::new(n);
    let x = grid.nodes();
    let w = grid.weights();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for k in 1..=8 {
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let kk = k as f64;
        for i in 0..n {
            let c = (kk * std::f64::consts::PI * x[i]).cos() / kk;
            p[i] += a * c;
            q[i] += b * c;
        }
    }
    let m: f64 = (0..n).map(|i| w[i] * (p[i] + q[i])).sum();
    for pi in p.iter_mut() {
        *pi -= m;
    }
    let norm = (0..n).map(|i| w[i] * (p[i] * p[i] + q[i] * q[i])).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { amplitude / norm } else { 0.0 };
    for i in 0..n {
        p[i] *= scale;
        q[i] *= scale;
    }
    (p, q)
}

fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        stt += (a - mt) * (a - mt);
        sty += (a - mt) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sty / stt;
    let r2 = if syy > 0.0 { sty * sty / (stt * syy) } else { 1.0 };
    (slope, r2)
}

/// Exponential rate of the deviation over an automatically chosen window:
/// the longest tail of the in-range samples whose log-linear fit has
/// R² ≥ 0.999 and whose two halves give slopes within 5% of each other.
pub fn fit_growth_rate(series: &[SimSample], lo: f64, hi: f64) -> Result<(f64, (f64, f64), f64)> {
    const MIN_POINTS: usize = 12;
    let inside = |s: &SimSample| s.deviation_norm > lo && s.deviation_norm < hi;
    // longest run of consecutive in-range samples
    let (mut best, mut start) = ((0, 0), None);
    for (i, s) in series.iter().enumerate() {
        match (inside(s), start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                if i - a > best.1 - best.0 {
                    best = (a, i);
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        if series.len() - a > best.1 - best.0 {
            best = (a, series.len());
        }
    }
    let seg = &series[best.0..best.1];
    if seg.len() < MIN_POINTS {
        return Err(Error::WindowNotFound);
    }
    let t: Vec<f64> = seg.iter().map(|s| s.t).collect();
    let y: Vec<f64> = seg.iter().map(|s| s.deviation_norm.ln()).collect();
    let m = seg.len();
    for a in 0..=m - MIN_POINTS {
        let (slope, r2) = linear_fit(&t[a..], &y[a..]);
        if r2 < 0.999 {
            continue;
        }
        let mid = a + (m - a) / 2;
        let (s1, _) = linear_fit(&t[a..=mid], &y[a..=mid]);
        let (s2, _) = linear_fit(&t[mid..], &y[mid..]);
        if (s1 - s2).abs() <= 0.05 * slope.abs() {
            return Ok((slope, (t[a], t[m - 1]), r2));
        }
    }
    Err(Error::WindowNotFound)
}

/// Perturbs `base` within the zero-mass subspace, evolves, and fits the
/// exponential rate of ‖(u, v)(t) − base‖.
pub fn run_stability_experiment(
    model: &BistableModel,
    params: &ProblemParams,
    base: &SteadyState,
    cfg: &SimConfig,
) -> Result<SimReport> {
    cfg.check()?;
    let n = base.u.len();
    let fu_max = base.u.iter().zip(&base.v).fold(0.0f64, |m, (&u, &v)| m.max(model.f_u(u, v).abs()));
    if cfg.dt > 0.1 / fu_max * (1.0 + 1e-9) {
        return Err(Error::InvalidInput(format!(
            "dt = {} exceeds the reaction accuracy limit 0.1/max|f_u| = {}",
            cfg.dt,
            0.1 / fu_max
        )));
    }
    let (p, q) = mass_free_perturbation(n, cfg.perturbation_amplitude, cfg.seed);
    let u0: Vec<f64> = base.u.iter().zip(&p).map(|(a, b)| a + b).collect();
    let v0: Vec<f64> = base.v.iter().zip(&q).map(|(a, b)| a + b).collect();
    let mut state = SimState::new(u0, v0);
    let (umin, umax) = base.u.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let hi = 0.1 * (umax - umin);
    let series = evolve(
        model,
        params,
        &mut state,
        cfg,
        base.alpha,
        Some((&base.u, &base.v)),
        hi,
    )?;
    let m0 = series[0].mass;
    let mass_drift_max = series.iter().fold(0.0f64, |m, s| m.max((s.mass - m0).abs()));
    let last = series.last().expect("at least the initial sample");
    let converged = last.deviation_norm.is_finite();
    let (rate, window, r2) = fit_growth_rate(&series, 10.0 * cfg.fit_floor, hi)?;
    Ok(SimReport {
        mass_drift_max,
        final_layer_position: last.layer_position,
        growth_rate_fit: rate,
        fit_window: window,
        fit_r2: r2,
        converged,
        steps: (state.t / cfg.dt).round() as usize,
        series,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{builtin_cubic, Callbacks};
    use crate::spectrum::fixture::cubic;

    fn params(eps: f64) -> ProblemParams {
        ProblemParams::new(eps, 1.0, 0.0).unwrap()
    }

    #[test]
    fn uniform_equilibrium_is_fixed() {
        let m = builtin_cubic(0.1).unwrap();
        let s0 = SimState::new(vec![1.0; 257], vec![0.0; 257]);
        let cfg = SimConfig::default();
        let mut s = s0.clone();
        for _ in 0..5 {
            s = step(&m, &params(0.05), &s, &cfg).unwrap();
        }
        let dev = s.u.iter().zip(&s0.u).chain(s.v.iter().zip(&s0.v)).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(dev <= 1e-14);
    }

    #[test]
    fn one_step_conserves_mass() {
        let m = builtin_cubic(-0.5).unwrap();
        let n = 513;
        let (p, q) = mass_free_perturbation(n, 0.3, 7);
        let x = UniformGrid::new(n).nodes();
        let u: Vec<f64> = x.iter().zip(&p).map(|(x, p)| (20.0 * (x - 0.4)).tanh() + p).collect();
        let v: Vec<f64> = q.iter().map(|q| 0.05 + q).collect();
        let s = SimState::new(u, v);
        for theta in [0.5, 0.75, 1.0] {
            let cfg = SimConfig { theta, ..SimConfig::default() };
            let out = step(&m, &params(0.02), &s, &cfg).unwrap();
            assert!((out.mass() - s.mass()).abs() <= 1e-14, "θ = {theta}");
        }
    }

    #[test]
    fn second_order_in_time() {
        let m = builtin_cubic(0.3).unwrap();
        let n = 257;
        let x = UniformGrid::new(n).nodes();
        let u0: Vec<f64> = x.iter().map(|x| (10.0 * (x - 0.45)).tanh()).collect();
        let v0 = vec![0.02; n];
        let at = |dt: f64| {
            let cfg = SimConfig { dt, t_end: 1.0, sample_interval: 1.0, ..SimConfig::default() };
            let mut s = SimState::new(u0.clone(), v0.clone());
            evolve(&m, &params(0.1), &mut s, &cfg, 0.0, None, f64::INFINITY).unwrap();
            s
        };
        let runs: Vec<SimState> = [0.02, 0.01, 0.005].iter().map(|&dt| at(dt)).collect();
        let diff = |a: &SimState, b: &SimState| {
            a.u.iter().zip(&b.u).chain(a.v.iter().zip(&b.v)).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        let ratio = diff(&runs[0], &runs[1]) / diff(&runs[1], &runs[2]);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn implicit_diffusion_creates_no_extrema() {
        let zero = Callbacks {
            f: Arc::new(|_, _| 0.0),
            f_u: Arc::new(|_, _| 0.0),
            f_v: Arc::new(|_, _| 0.0),
            f_uu: Arc::new(|_, _| 0.0),
            f_uv: Arc::new(|_, _| 0.0),
        };
        let m = BistableModel::new("diffusion", (-1.0, 1.0), (-2.0, 2.0), zero).unwrap();
        let n = 129;
        let (p, q) = mass_free_perturbation(n, 1.0, 3);
        let mut s = SimState::new(p, q);
        let cfg = SimConfig { theta: 1.0, dt: 0.5, ..SimConfig::default() };
        for _ in 0..20 {
            let next = step(&m, &params(0.05), &s, &cfg).unwrap();
            let range = |x: &[f64]| x.iter().fold((f64::MAX, f64::MIN), |(a, b), &y| (a.min(y), b.max(y)));
            let (lo, hi) = range(&s.u);
            let (lo2, hi2) = range(&next.u);
            assert!(lo2 >= lo - 1e-15 && hi2 <= hi + 1e-15);
            s = next;
        }
    }

    #[test]
    fn front_relaxes_to_the_steady_state() {
        let s = cubic(0.1, 0.02, 0.0, 2048);
        let comp = crate::layer::composite(&s.branch, &s.geom, &s.profile, &s.params, 2048).unwrap();
        let mut st = SimState::new(comp.u.clone(), comp.v.clone());
        let cfg = SimConfig { t_end: 200.0, sample_interval: 10.0, ..SimConfig::default() };
        let series = evolve(&s.model, &s.params, &mut st, &cfg, comp.alpha, None, f64::INFINITY).unwrap();
        let x = series.last().unwrap().layer_position.unwrap();
        let target = s.state.layer_position_detected.unwrap();
        assert!((x - target).abs() <= 5.0 * 0.02 * 0.02, "{x} vs {target}");
        let drift = series.iter().fold(0.0f64, |m, p| m.max((p.mass - series[0].mass).abs()));
        assert!(drift <= 1e-13);
    }

    #[test]
    fn unperturbed_state_stays_put() {
        let s = cubic(-0.5, 0.02, 0.0, 2048);
        let cfg = SimConfig { perturbation_amplitude: 0.0, t_end: 100.0, ..SimConfig::default() };
        let mut st = SimState::new(s.state.u.clone(), s.state.v.clone());
        let series =
            evolve(&s.model, &s.params, &mut st, &cfg, 0.0, Some((&s.state.u, &s.state.v)), f64::INFINITY).unwrap();
        let worst = series.iter().fold(0.0f64, |m, p| m.max(p.deviation_norm));
        assert!(worst <= 10.0 * cfg.fit_floor, "{worst:e}");
        assert!(matches!(
            run_stability_experiment(&s.model, &s.params, &s.state, &cfg),
            Err(Error::WindowNotFound)
        ));
    }

    #[test]
    fn growth_rate_of_an_unstable_layer() {
        let s = cubic(-0.5, 0.02, 0.0, 2048);
        let r = run_stability_experiment(&s.model, &s.params, &s.state, &SimConfig::default()).unwrap();
        // direct eigensolver gives 5.4697e−2 for this configuration
        assert!((r.growth_rate_fit - 5.4697e-2).abs() < 0.3 * 5.4697e-2, "{}", r.growth_rate_fit);
        assert!(r.fit_r2 >= 0.999 && r.converged);
        assert!(r.mass_drift_max <= 1e-13);
    }

    #[test]
    fn perturbation_is_mass_free_and_seeded() {
        let (p, q) = mass_free_perturbation(300, 1e-3, 42);
        let w = UniformGrid::new(300).weights();
        let mass: f64 = (0..300).map(|i| w[i] * (p[i] + q[i])).sum();
        let norm: f64 = (0..300).map(|i| w[i] * (p[i] * p[i] + q[i] * q[i])).sum::<f64>().sqrt();
        assert!(mass.abs() < 1e-18 && (norm - 1e-3).abs() < 1e-15);
        assert_eq!(mass_free_perturbation(300, 1e-3, 42), (p.clone(), q));
        assert_ne!(mass_free_perturbation(300, 1e-3, 43).0, p);
    }

    #[test]
    fn rejects_coarse_reaction_steps() {
        let s = cubic(0.1, 0.02, 0.0, 1024);
        let cfg = SimConfig { dt: 0.2, ..SimConfig::default() };
        assert!(matches!(
            run_stability_experiment(&s.model, &s.params, &s.state, &cfg),
            Err(Error::InvalidInput(_))
        ));
    }
}
