//! Equilibrium branches h⁻ < h⁰ < h⁺ of f(., v), the balance function
//! J(v) = ∫ f(u, v) du over [h⁻(v), h⁺(v)] and its zero v*.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::BistableModel;
use crate::numerics::{quad, roots};

const SCAN_POINTS: usize = 2048;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchData {
    pub v_star: f64,
    #[serde(rename = "J_prime_star")]
    pub j_prime_star: f64,
    pub h_minus_star: f64,
    pub h_zero_star: f64,
    pub h_plus_star: f64,
}

impl BranchData {
    pub fn jump(&self) -> f64 {
        self.h_plus_star - self.h_minus_star
    }

    /// Default layer value: midpoint of the outer roots at v*.
    pub fn default_alpha(&self) -> f64 {
        0.5 * (self.h_minus_star + self.h_plus_star)
    }

    /// Branch sampler v ↦ (h⁻, h⁰, h⁺).
    pub fn sample(&self, model: &BistableModel, v: f64) -> Result<[f64; 3]> {
        roots_at(model, v)
    }
}

/// The three roots of f(., v), ordered.
pub fn roots_at(model: &BistableModel, v: f64) -> Result<[f64; 3]> {
    let (a, b) = model.u_range;
    let du = (b - a) / (SCAN_POINTS - 1) as f64;
    let mut found = Vec::with_capacity(3);
    let mut prev_u = a;
    let mut prev_pos = model.f(a, v) >= 0.0;
    for i in 1..SCAN_POINTS {
        let u = a + du * i as f64;
        let pos = model.f(u, v) >= 0.0;
        if pos != prev_pos {
            let root =
                roots::bisect_newton(|x| (model.f(x, v), model.f_u(x, v)), prev_u, u, 1e-15)
                    .ok_or(Error::BistabilityLost { v })?;
            found.push(root);
        }
        prev_u = u;
        prev_pos = pos;
    }
    if found.len() != 3 {
        return Err(Error::BistabilityLost { v });
    }
    Ok([found[0], found[1], found[2]])
}

/// Balance function J(v).
#[allow(non_snake_case)]
pub fn J(model: &BistableModel, v: f64) -> Result<f64> {
    let r = roots_at(model, v)?;
    quad::integrate(|u| model.f(u, v), r[0], r[2], QUAD_TOL)
}

/// J'(v) = ∫ f_v(u, v) du over [h⁻(v), h⁺(v)] (the boundary terms vanish
/// because f(h^±, v) = 0).
pub fn j_prime(model: &BistableModel, v: f64) -> Result<f64> {
    let r = roots_at(model, v)?;
    quad::integrate(|u| model.f_v(u, v), r[0], r[2], QUAD_TOL)
}

pub fn find_v_star(model: &BistableModel) -> Result<BranchData> {
    let (lo, hi) = model.v_interval;
    let m = 64;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let v = lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
        if let Ok(j) = J(model, v) {
            samples.push((v, j));
        }
    }
    let mut brackets = samples
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 <= 0.0 && !(w[0].1 == 0.0 && w[1].1 == 0.0))
        .map(|w| (w[0].0, w[1].0));
    let (va, vb) = brackets.next().ok_or(Error::NoBalancedState)?;
    if brackets.next().is_some() {
        log::warn!("J changes sign more than once on the v-interval; using the lowest zero");
    }
    let v_star = roots::brent(|v| J(model, v).unwrap_or(f64::NAN), va, vb, 1e-15, 200)
        .ok_or(Error::NoBalancedState)?;
    let jp = j_prime(model, v_star)?;
    if jp.abs() <= 1e-8 {
        return Err(Error::DegenerateBalance { j_prime: jp });
    }
    let r = roots_at(model, v_star)?;
    Ok(BranchData {
        v_star,
        j_prime_star: jp,
        h_minus_star: r[0],
        h_zero_star: r[1],
        h_plus_star: r[2],
    })
}

/// Admissible range (α̲(v), ᾱ(v)) for the layer value: ᾱ solves
/// ∫_{h⁻}^{ᾱ} f du = 0 and α̲ solves ∫_{α̲}^{h⁺} f du = 0. Where no interior
/// solution exists the corresponding outer root is returned.
pub fn alpha_bounds(model: &BistableModel, v: f64) -> Result<(f64, f64)> {
    let r = roots_at(model, v)?;
    let jv = quad::integrate(|u| model.f(u, v), r[0], r[2], QUAD_TOL)?;
    if jv.abs() <= QUAD_TOL {
        return Ok((r[0], r[2]));
    }
    let left = |a: f64| quad::integrate(|u| model.f(u, v), r[0], a, QUAD_TOL).unwrap_or(f64::NAN);
    let right = |a: f64| quad::integrate(|u| model.f(u, v), a, r[2], QUAD_TOL).unwrap_or(f64::NAN);
    if jv > 0.0 {
        // left potential dips below zero on (h⁻, h⁰] and ends at J > 0
        let hi = roots::brent(left, r[1], r[2], 1e-14, 200).ok_or(Error::NoBalancedState)?;
        Ok((r[0], hi))
    } else {
        let lo = roots::brent(right, r[0], r[1], 1e-14, 200).ok_or(Error::NoBalancedState)?;
        Ok((lo, r[2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_cubic;

    fn newton_cubic(c: f64, mut u: f64) -> f64 {
        for _ in 0..100 {
            u -= (u - u * u * u + c) / (1.0 - 3.0 * u * u);
        }
        u
    }

    fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + h * i as f64);
        }
        s * h
    }

    #[test]
    fn roots_of_the_cubic() {
        let m = builtin_cubic(0.1).unwrap();
        let r = roots_at(&m, 0.0).unwrap();
        assert!((r[0] + 1.0).abs() < 1e-14 && r[1].abs() < 1e-14 && (r[2] - 1.0).abs() < 1e-14);
        let r = roots_at(&m, 0.01).unwrap();
        let c = 0.1 * 0.01;
        for (k, seed) in [-1.0, 0.0, 1.0].iter().enumerate() {
            let exact = newton_cubic(c, *seed);
            assert!((r[k] - exact).abs() < 1e-13, "{k}: {} vs {exact}", r[k]);
            assert!(m.f(r[k], 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_fail_without_bistability() {
        let m = builtin_cubic(1.0).unwrap();
        match roots_at(&m, 0.5) {
            Err(Error::BistabilityLost { v }) => assert_eq!(v, 0.5),
            other => panic!("expected BistabilityLost, got {other:?}"),
        }
    }

    #[test]
    fn balance_function_against_trapezoid() {
        let m = builtin_cubic(0.1).unwrap();
        assert!(J(&m, 0.0).unwrap().abs() < 1e-14);
        let v = 0.01;
        let c = 0.1 * v;
        let (a, b) = (newton_cubic(c, -1.0), newton_cubic(c, 1.0));
        let oracle = trapezoid(|u| u - u * u * u + c, a, b, 200_000);
        let j = J(&m, v).unwrap();
        assert!((j - oracle).abs() < 1e-9, "{j} vs {oracle}");
        assert!((j - 0.002).abs() < 0.002 * 0.01);
    }

    #[test]
    fn balanced_state_of_the_cubic() {
        for (s, jp) in [(0.1, 0.2), (-0.5, -1.0), (1.0, 2.0)] {
            let b = find_v_star(&builtin_cubic(s).unwrap()).unwrap();
            assert!(b.v_star.abs() < 1e-13, "s = {s}: v* = {}", b.v_star);
            assert!((b.j_prime_star - jp).abs() < 1e-12);
            assert!(b.h_minus_star < b.h_zero_star && b.h_zero_star < b.h_plus_star);
        }
    }

    #[test]
    fn one_signed_balance_has_no_zero() {
        let m = builtin_cubic(0.1).unwrap().with_v_interval(0.05, 0.2).unwrap();
        assert!(matches!(find_v_star(&m), Err(Error::NoBalancedState)));
    }

    #[test]
    fn balance_is_locally_linear() {
        let m = builtin_cubic(0.3).unwrap();
        let b = find_v_star(&m).unwrap();
        for d in [1e-3, -1e-3, 5e-4] {
            let j = J(&m, b.v_star + d).unwrap();
            let lin = b.j_prime_star * d;
            assert!(((j - lin) / lin).abs() < 0.05);
        }
    }

    #[test]
    fn alpha_bounds_at_and_off_balance() {
        let m = builtin_cubic(0.1).unwrap();
        let (lo, hi) = alpha_bounds(&m, 0.0).unwrap();
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        let v = 0.005;
        let r = roots_at(&m, v).unwrap();
        let (lo, hi) = alpha_bounds(&m, v).unwrap();
        assert_eq!(lo, r[0]);
        assert!(hi < r[2] && hi > r[1]);
        // oracle: the potential changes sign at hi on a dense scan
        let c = 0.1 * v;
        let pot = |a: f64| {
            let h0 = r[0];
            (a * a / 2.0 - a.powi(4) / 4.0 + c * a) - (h0 * h0 / 2.0 - h0.powi(4) / 4.0 + c * h0)
        };
        let mut scan_root = f64::NAN;
        let n = 200_000;
        for i in 0..n {
            let a = r[1] + (r[2] - r[1]) * i as f64 / n as f64;
            let b = r[1] + (r[2] - r[1]) * (i + 1) as f64 / n as f64;
            if pot(a) * pot(b) <= 0.0 {
                scan_root = 0.5 * (a + b);
                break;
            }
        }
        assert!((hi - scan_root).abs() < 1e-5, "{hi} vs {scan_root}");
        let b = find_v_star(&m).unwrap();
        assert_eq!(b.default_alpha(), 0.0);
    }

    #[test]
    fn branches_vary_continuously() {
        let m = builtin_cubic(0.5).unwrap();
        let (lo, hi) = m.v_interval;
        let vs: Vec<f64> = (0..41).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 41.0).collect();
        let rs: Vec<[f64; 3]> = vs.iter().map(|&v| roots_at(&m, v).unwrap()).collect();
        for k in 1..vs.len() - 1 {
            for j in 0..3 {
                let secant = (rs[k + 1][j] - rs[k - 1][j]).abs() / 2.0;
                let step = (rs[k][j] - rs[k - 1][j]).abs();
                assert!(step <= 10.0 * secant.max(1e-14));
            }
        }
    }
}
