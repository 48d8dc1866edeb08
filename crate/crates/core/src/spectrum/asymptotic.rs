//! Leading-order critical eigenvalue λ ≈ εκ* and the endpoint
//! coefficients whose determinant t̃g(0; κ) vanishes at κ*.

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::BranchData;
use crate::error::{Error, Result};
use crate::layer::{FrontProfile, LayerGeometry};
use crate::model::{BistableModel, ProblemParams};
use crate::numerics::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEigen {
    pub kappa_star: f64,
    /// ∫ Ẇ² dz
    #[serde(rename = "W_energy")]
    pub w_energy: f64,
    /// ∫ f_v(u, v*) du over [h⁻(v*), h⁺(v*)]
    pub fv_integral: f64,
    /// ∫₀¹ (f_u* − f_v*)/f_u* dx with piecewise-constant outer values
    pub slope_integral: f64,
    pub jump: f64,
    /// Ẇ(0)
    pub w_dot0: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl AsymptoticEigen {
    pub fn lambda(&self, epsilon: f64) -> f64 {
        epsilon * self.kappa_star
    }

    /// Coefficients of t̃g(0; κ) = −κ(κA + B)/C.
    pub fn quadratic_coefficients(&self) -> (f64, f64, f64) {
        (
            self.w_energy * self.slope_integral,
            self.jump * self.fv_integral,
            self.d * self.w_dot0 * self.w_dot0,
        )
    }

    /// The displayed quadratic −κ(κA + B)/C.
    pub fn tg_quadratic(&self, kappa: Complex64) -> Complex64 {
        let (a, b, c) = self.quadratic_coefficients();
        -kappa * (kappa * a + b) / c
    }
}

pub fn kappa_star(
    model: &BistableModel,
    branch: &BranchData,
    profile: &FrontProfile,
    geom: &LayerGeometry,
    params: &ProblemParams,
) -> Result<AsymptoticEigen> {
    let (hm, hp, v) = (branch.h_minus_star, branch.h_plus_star, branch.v_star);
    let fv_integral = quad::integrate(|u| model.f_v(u, v), hm, hp, 1e-12)?;
    if fv_integral.abs() <= 1e-8 {
        return Err(Error::DegenerateBalance { j_prime: fv_integral });
    }
    // fraction of the interval occupied by the h⁻ state
    let xm = geom.x0_jump_up_frame();
    let (fu_m, fv_m) = (model.f_u(hm, v), model.f_v(hm, v));
    let (fu_p, fv_p) = (model.f_u(hp, v), model.f_v(hp, v));
    let slope_integral = xm * (fu_m - fv_m) / fu_m + (1.0 - xm) * (fu_p - fv_p) / fu_p;
    let jump = hp - hm;
    let w_energy = profile.energy;
    Ok(AsymptoticEigen {
        kappa_star: -jump * fv_integral / (w_energy * slope_integral),
        w_energy,
        fv_integral,
        slope_integral,
        jump,
        w_dot0: profile.w_dot0,
        d: params.d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma32Coefficients {
    #[serde(serialize_with = "super::ser_complex")]
    pub kappa: Complex64,
    #[serde(serialize_with = "super::ser_complex")]
    pub a11_minus_c11: Complex64,
    #[serde(serialize_with = "super::ser_complex")]
    pub a22_minus_c22: Complex64,
    #[serde(serialize_with = "super::ser_complex")]
    pub b10_minus_d10: Complex64,
    #[serde(serialize_with = "super::ser_complex")]
    pub b21_minus_d21: Complex64,
    /// (a₂₂−c₂₂)(b₁₀−d₁₀) − (a₁₁−c₁₁)(b₂₁−d₂₁)
    #[serde(serialize_with = "super::ser_complex")]
    pub tg: Complex64,
    /// |tg − quadratic| / |quadratic|
    pub quadratic_residual: f64,
}

pub fn lemma32_coefficients(asym: &AsymptoticEigen, kappa: Complex64) -> Lemma32Coefficients {
    let wd = asym.w_dot0;
    let d = asym.d;
    let a11 = kappa * asym.w_energy / (wd * wd);
    let a22 = (-a11 + kappa * asym.jump / wd) / d;
    let b10 = Complex64::new(-asym.fv_integral / wd, 0.0);
    let b21 = (-b10 + kappa * asym.slope_integral) / d;
    let tg = a22 * b10 - a11 * b21;
    let quad = asym.tg_quadratic(kappa);
    let quadratic_residual = if quad.norm() > 0.0 {
        (tg - quad).norm() / quad.norm()
    } else {
        tg.norm()
    };
    Lemma32Coefficients {
        kappa,
        a11_minus_c11: a11,
        a22_minus_c22: a22,
        b10_minus_d10: b10,
        b21_minus_d21: b21,
        tg,
        quadratic_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::find_v_star;
    use crate::layer::{front_profile, geometry, Orientation};
    use crate::model::builtin_cubic;

    fn asym(s: f64, xi: f64) -> AsymptoticEigen {
        let m = builtin_cubic(s).unwrap();
        let b = find_v_star(&m).unwrap();
        let p = front_profile(&m, &b, b.default_alpha()).unwrap();
        let params = ProblemParams::new(0.02, 1.0, xi).unwrap();
        let g = geometry(&b, &p, &params, Orientation::JumpUp).unwrap();
        kappa_star(&m, &b, &p, &g, &params).unwrap()
    }

    #[test]
    fn cubic_kappa_star() {
        for s in [0.1, -0.5, 0.5, 1.0, -0.2, -1.0] {
            let a = asym(s, 0.0);
            let exact = -6.0 * 2f64.sqrt() * s / (2.0 + s);
            assert!(((a.kappa_star - exact) / exact).abs() < 1e-10, "s = {s}");
            assert!((a.w_energy - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-11);
            assert!((a.slope_integral - (1.0 + s / 2.0)).abs() < 1e-14);
            assert!((a.fv_integral - 2.0 * s).abs() < 1e-13);
        }
    }

    #[test]
    fn lemma32_closed_forms() {
        let a = asym(0.1, 0.2);
        let z = lemma32_coefficients(&a, Complex64::new(0.0, 0.0));
        assert_eq!(z.a11_minus_c11, Complex64::new(0.0, 0.0));
        assert!((z.b21_minus_d21 + z.b10_minus_d10 / a.d).norm() < 1e-15);
        let one = lemma32_coefficients(&a, Complex64::new(1.0, 0.0));
        assert!((one.a11_minus_c11.re - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-10);
        assert!((one.b10_minus_d10.re + 2.0 * 2f64.sqrt() * 0.1).abs() < 1e-12);
        let ks = a.kappa_star;
        for kappa in [
            Complex64::new(ks, 0.0),
            Complex64::new(ks / 2.0, 0.0),
            Complex64::new(2.0 * ks, 0.0),
            Complex64::new(0.0, ks.abs()),
            Complex64::new(0.0, -ks.abs()),
        ] {
            let c = lemma32_coefficients(&a, kappa);
            if kappa.re == ks {
                assert!(c.tg.norm() < 1e-12);
            } else {
                assert!(c.quadratic_residual < 1e-10, "{kappa}: {}", c.quadratic_residual);
            }
        }
    }
}
