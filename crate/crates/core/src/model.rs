//! Problem data: the bistable nonlinearity f(u, v) with its partial
//! derivatives, the physical parameters, and numerical checks of the
//! standing assumptions on f.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::branch;
use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Reaction term and its derivatives, supplied as callbacks.
#[derive(Clone)]
pub struct BistableModel {
    pub label: String,
    /// Open interval of v on which f(., v) is bistable.
    pub v_interval: (f64, f64),
    /// u-range scanned when bracketing the three roots of f(., v).
    pub u_range: (f64, f64),
    f: ScalarFn,
    f_u: ScalarFn,
    f_v: ScalarFn,
    f_uu: ScalarFn,
    f_uv: ScalarFn,
}

impl fmt::Debug for BistableModel {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("BistableModel")
            .field("label", &self.label)
            .field("v_interval", &self.v_interval)
            .field("u_range", &self.u_range)
            .finish_non_exhaustive()
    }
}

/// Callbacks for a user model. All five must be consistent; see
/// [`BistableModel::derivative_mismatch`].
pub struct Callbacks {
    pub f: ScalarFn,
    pub f_u: ScalarFn,
    pub f_v: ScalarFn,
    pub f_uu: ScalarFn,
    pub f_uv: ScalarFn,
}

impl BistableModel {
    pub fn new(
        label: impl Into<String>,
        v_interval: (f64, f64),
        u_range: (f64, f64),
        cb: Callbacks,
    ) -> Result<Self> {
        let (lo, hi) = v_interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidModel(format!("bad v-interval ({lo}, {hi})")));
        }
        let (ulo, uhi) = u_range;
        if !(ulo.is_finite() && uhi.is_finite() && ulo < uhi) {
            return Err(Error::InvalidModel(format!("bad u-range ({ulo}, {uhi})")));
        }
        Ok(Self {
            label: label.into(),
            v_interval,
            u_range,
            f: cb.f,
            f_u: cb.f_u,
            f_v: cb.f_v,
            f_uu: cb.f_uu,
            f_uv: cb.f_uv,
        })
    }

    pub fn with_v_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidModel(format!("bad v-interval ({lo}, {hi})")));
        }
        self.v_interval = (lo, hi);
        Ok(self)
    }

    #[inline]
    pub fn f(&self, u: f64, v: f64) -> f64 {
        (self.f)(u, v)
    }

    #[inline]
    pub fn f_u(&self, u: f64, v: f64) -> f64 {
        (self.f_u)(u, v)
    }

    #[inline]
    pub fn f_v(&self, u: f64, v: f64) -> f64 {
        (self.f_v)(u, v)
    }

    #[inline]
    pub fn f_uu(&self, u: f64, v: f64) -> f64 {
        (self.f_uu)(u, v)
    }

    #[inline]
    pub fn f_uv(&self, u: f64, v: f64) -> f64 {
        (self.f_uv)(u, v)
    }

    pub fn contains_v(&self, v: f64) -> bool {
        v > self.v_interval.0 && v < self.v_interval.1
    }

    /// Largest relative mismatch between the supplied first and second
    /// derivatives and central differences with step 1e-5.
    pub fn derivative_mismatch(&self, u: f64, v: f64) -> f64 {
        let h = 1e-5;
        let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);
        let du = (self.f(u + h, v) - self.f(u - h, v)) / (2.0 * h);
        let dv = (self.f(u, v + h) - self.f(u, v - h)) / (2.0 * h);
        let duu = (self.f_u(u + h, v) - self.f_u(u - h, v)) / (2.0 * h);
        let duv = (self.f_u(u, v + h) - self.f_u(u, v - h)) / (2.0 * h);
        rel(du, self.f_u(u, v))
            .max(rel(dv, self.f_v(u, v)))
            .max(rel(duu, self.f_uu(u, v)))
            .max(rel(duv, self.f_uv(u, v)))
    }
}

/// The cubic family f(u, v) = u − u³ + s·v.
pub fn builtin_cubic(s: f64) -> Result<BistableModel> {
    if !s.is_finite() || s == 0.0 {
        return Err(Error::InvalidModel(format!(
            "cubic coupling s = {s} gives J'(v*) = 0; need s != 0"
        )));
    }
    if s <= -2.0 {
        return Err(Error::InvalidModel(format!(
            "cubic coupling s = {s} violates f_u(h, v) < f_v(h, v) at the outer roots; need s > -2"
        )));
    }
    // three real roots of u - u^3 + c need |c| < 2/(3*sqrt(3))
    let c_max = 2.0 / (3.0 * 3f64.sqrt());
    let half = (0.2 / s.abs().max(1.0)).min(0.9 * c_max / s.abs());
    let cb = Callbacks {
        f: Arc::new(move |u, v| u - u * u * u + s * v),
        f_u: Arc::new(|u, _| 1.0 - 3.0 * u * u),
        f_v: Arc::new(move |_, _| s),
        f_uu: Arc::new(|u, _| -6.0 * u),
        f_uv: Arc::new(|_, _| 0.0),
    };
    BistableModel::new(format!("cubic(s={s})"), (-half, half), (-2.0, 2.0), cb)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub epsilon: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub xi: f64,
}

impl ProblemParams {
    pub fn new(epsilon: f64, d: f64, xi: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidInput(format!("D must be positive, got {d}")));
        }
        if !xi.is_finite() {
            return Err(Error::InvalidInput(format!("xi must be finite, got {xi}")));
        }
        if epsilon >= d / 10.0 {
            log::warn!("epsilon = {epsilon} is not small against D = {d}; asymptotics may be poor");
        }
        Ok(Self { epsilon, d, xi })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub passed: bool,
    pub detail: String,
}

impl AssumptionCheck {
    fn pass(detail: impl Into<String>) -> Self {
        Self { passed: true, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { passed: false, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub a1: AssumptionCheck,
    pub a2: AssumptionCheck,
    pub a3: AssumptionCheck,
    pub a4: AssumptionCheck,
    pub v_star: Option<f64>,
    pub j_prime: Option<f64>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.a1.passed && self.a2.passed && self.a3.passed && self.a4.passed
    }

    pub fn failures(&self) -> Vec<String> {
        [("A1", &self.a1), ("A2", &self.a2), ("A3", &self.a3), ("A4", &self.a4)]
            .iter()
            .filter(|(_, c)| !c.passed)
            .map(|(name, c)| format!("{name}: {}", c.detail))
            .collect()
    }
}

/// Checks bistability, the balance condition, the slope ordering at the
/// outer roots and the admissible mass window, sampling `n_samples` values
/// of v strictly inside the v-interval.
pub fn validate_assumptions(
    model: &BistableModel,
    params: &ProblemParams,
    n_samples: usize,
) -> Result<ValidationReport> {
    if n_samples < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 samples, got {n_samples}")));
    }
    let (lo, hi) = model.v_interval;
    let mut a1_fail = None;
    let mut a3_fail = None;
    for k in 0..n_samples {
        let v = lo + (hi - lo) * (k as f64 + 0.5) / n_samples as f64;
        match branch::roots_at(model, v) {
            Ok(r) => {
                let s = [model.f_u(r[0], v), model.f_u(r[1], v), model.f_u(r[2], v)];
                let ok = s[0] < -1e-10 && s[1] > 1e-10 && s[2] < -1e-10;
                if !ok && a1_fail.is_none() {
                    a1_fail = Some(format!("wrong f_u signs {s:?} at v = {v}"));
                }
                for &h in [r[0], r[2]].iter() {
                    if model.f_u(h, v) >= model.f_v(h, v) && a3_fail.is_none() {
                        a3_fail = Some(format!(
                            "f_u = {} >= f_v = {} at u = {h}, v = {v}",
                            model.f_u(h, v),
                            model.f_v(h, v)
                        ));
                    }
                }
            }
            Err(e) => {
                if a1_fail.is_none() {
                    a1_fail = Some(e.to_string());
                }
            }
        }
    }
    let a1 = match a1_fail {
        None => AssumptionCheck::pass(format!("three roots with alternating slopes at {n_samples} samples")),
        Some(d) => AssumptionCheck::fail(d),
    };
    let a3 = match a3_fail {
        None => AssumptionCheck::pass("f_u < f_v at both outer roots"),
        Some(d) => AssumptionCheck::fail(d),
    };

    let (a2, a4, v_star, j_prime) = match branch::find_v_star(model) {
        Ok(b) => {
            let lo4 = b.h_minus_star + b.v_star;
            let hi4 = b.h_plus_star + b.v_star;
            let a4 = if params.xi > lo4 && params.xi < hi4 {
                AssumptionCheck::pass(format!("{lo4} < xi = {} < {hi4}", params.xi))
            } else {
                AssumptionCheck::fail(format!("xi = {} outside ({lo4}, {hi4})", params.xi))
            };
            (
                AssumptionCheck::pass(format!("v* = {}, J'(v*) = {}", b.v_star, b.j_prime_star)),
                a4,
                Some(b.v_star),
                Some(b.j_prime_star),
            )
        }
        Err(e) => (
            AssumptionCheck::fail(e.to_string()),
            AssumptionCheck::fail("not checked: v* unavailable"),
            None,
            None,
        ),
    };
    Ok(ValidationReport { a1, a2, a3, a4, v_star, j_prime })
}
