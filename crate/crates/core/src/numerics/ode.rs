//! Adaptive Dormand–Prince 5(4) integrator for complex linear/nonlinear systems.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible |step| relative to the interval length.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-11, min_step_fraction: 1e-12, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnderflow {
    pub x: f64,
    pub step: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl Dopri5 {
    /// Integrates `y' = rhs(x, y)` from `x0` to `x1` (either direction).
    ///
    /// `on_step(x, y)` runs after every accepted step and may rescale `y`
    /// in place, returning `true` when it did; the integrator continues
    /// from the modified state.
    /// Returns the number of accepted steps.
    pub fn solve<R, S>(
        &self,
        mut rhs: R,
        x0: f64,
        x1: f64,
        y: &mut [Complex64],
        mut on_step: S,
    ) -> Result<usize, StepUnderflow>
    where
        R: FnMut(f64, &[Complex64], &mut [Complex64]),
        S: FnMut(f64, &mut [Complex64]) -> bool,
    {
        let n = y.len();
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(0);
        }
        let dir = span.signum();
        let min_step = self.min_step_fraction * span.abs();
        let zero = Complex64::new(0.0, 0.0);
        let mut k1 = vec![zero; n];
        let mut k2 = vec![zero; n];
        let mut k3 = vec![zero; n];
        let mut k4 = vec![zero; n];
        let mut k5 = vec![zero; n];
        let mut k6 = vec![zero; n];
        let mut k7 = vec![zero; n];
        let mut tmp = vec![zero; n];
        let mut ynew = vec![zero; n];

        let mut x = x0;
        rhs(x, y, &mut k1);
        let mut h = initial_step(y, &k1, span.abs(), self.rtol, self.atol) * dir;
        let mut accepted = 0usize;
        let mut last_factor = 1.0f64;

        for _ in 0..self.max_steps {
            if (x1 - x) * dir <= 0.0 {
                return Ok(accepted);
            }
            if (x + h - x1) * dir > 0.0 {
                h = x1 - x;
            }
            for i in 0..n {
                tmp[i] = y[i] + h * A21 * k1[i];
            }
            rhs(x + C2 * h, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(x + C3 * h, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(x + C4 * h, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(x + C5 * h, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(x + h, &tmp, &mut k6);
            for i in 0..n {
                ynew[i] =
                    y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            rhs(x + h, &ynew, &mut k7);

            let mut err2 = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].norm().max(ynew[i].norm());
                err2 += (e.norm() / sc).powi(2);
            }
            let err = (err2 / n as f64).sqrt();

            if err <= 1.0 || h.abs() <= min_step {
                if err > 1.0 {
                    return Err(StepUnderflow { x, step: h.abs() });
                }
                x += h;
                y.copy_from_slice(&ynew);
                accepted += 1;
                if on_step(x, y) {
                    rhs(x, y, &mut k1);
                } else {
                    std::mem::swap(&mut k1, &mut k7);
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let fac = if last_factor < 1.0 { fac.min(1.0) } else { fac };
                last_factor = fac;
                h *= fac;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                last_factor = fac;
                h *= fac;
                if h.abs() < min_step {
                    return Err(StepUnderflow { x, step: h.abs() });
                }
            }
        }
        Err(StepUnderflow { x, step: h.abs() })
    }
}

fn initial_step(y: &[Complex64], f: &[Complex64], span: f64, rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f) {
        let sc = atol + rtol * yi.norm();
        d0 += (yi.norm() / sc).powi(2);
        d1 += (fi.norm() / sc).powi(2);
    }
    let n = y.len().max(1) as f64;
    let d0 = (d0 / n).sqrt();
    let d1 = (d1 / n).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(0.1 * span).max(1e-12 * span)
}
