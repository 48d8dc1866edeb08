//! Scalar root finding: Brent's method and bracketed Newton polishing.

/// Brent's method on a sign-changing bracket `[xa, xb]`.
///
/// Returns `None` when the endpoints do not bracket a root or the iteration
/// budget runs out.
pub fn brent<F>(mut f: F, xa: f64, xb: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let rtol = 4.0 * f64::EPSILON;
    let mut xpre = xa;
    let mut xcur = xb;
    let mut xblk = 0.0;
    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    let mut fblk = 0.0;
    let mut spre = 0.0;
    let mut scur = 0.0;

    if fpre * fcur > 0.0 {
        return None;
    }
    if fpre == 0.0 {
        return Some(xpre);
    }
    if fcur == 0.0 {
        return Some(xcur);
    }

    for _ in 0..max_iter {
        if fpre * fcur < 0.0 {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = (xtol + rtol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return Some(xcur);
        }
        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }
    None
}

/// Bisection down to a narrow bracket followed by safeguarded Newton steps.
///
/// `f` returns `(value, derivative)`. The result stays inside `[a, b]`.
pub fn bisect_newton<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    for _ in 0..30 {
        let m = 0.5 * (a + b);
        let (fm, _) = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..50 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fa * fx < 0.0 {
            b = x;
        } else {
            a = x;
            fa = fx;
        }
        let newton = x - fx / dfx;
        if newton >= a && newton <= b && newton.is_finite() {
            if (newton - x).abs() <= tol * (1.0 + x.abs()) {
                return Some(newton);
            }
            x = newton;
        } else {
            // a bisection step says nothing about the distance to the root
            if b - a <= tol * (1.0 + x.abs()) {
                return Some(x);
            }
            x = 0.5 * (a + b);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn newton_polish_reaches_machine_precision() {
        let r = bisect_newton(|x| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-15);
    }

    #[test]
    fn converged_iterate_on_the_bracket_edge_is_kept() {
        // the Newton iterate stops moving once it sits on the root, which is
        // then also the updated bracket end
        for c in [3.7e-18, -1.3e-17, 0.0] {
            let r = bisect_newton(|u| (u - u * u * u + c, 1.0 - 3.0 * u * u), -1.2, -0.9, 1e-15).unwrap();
            assert!((r + 1.0).abs() <= 2.0 * f64::EPSILON, "c = {c}: {r:e}");
        }
    }
}
