//! Eigenvalues of the discretized linearization nearest a shift, by
//! shift-invert Arnoldi with explicit restarts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operator::LinearizedOperator;
use crate::error::{Error, Result};
use crate::numerics::banded::BlockLu;

/// Modes whose normalized mass functional exceeds this are flagged as
/// violating the constraint ∫(p + q) = 0.
pub const CONSTRAINT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Eigenpair {
    #[serde(serialize_with = "crate::spectrum::ser_complex")]
    pub lambda: Complex64,
    /// |∫(p+q)| / ‖(p, q)‖
    pub mass_functional: f64,
    /// ‖Ax − λx‖ / ‖x‖
    pub residual: f64,
    pub constrained: bool,
    #[serde(skip)]
    pub vector: Vec<[Complex64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectSpectrum {
    #[serde(serialize_with = "crate::spectrum::ser_complex")]
    pub shift: Complex64,
    pub eigen: Vec<Eigenpair>,
}

impl DirectSpectrum {
    /// Constrained eigenvalue with the largest real part.
    pub fn leading_constrained(&self) -> Option<&Eigenpair> {
        self.eigen
            .iter()
            .filter(|e| e.constrained)
            .max_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re))
    }

    /// The mode violating the mass constraint, if one was found.
    pub fn kernel_mode(&self) -> Option<&Eigenpair> {
        self.eigen.iter().find(|e| !e.constrained)
    }
}

/// The `k` eigenvalues closest to 0.
pub fn direct_spectrum(op: &LinearizedOperator, k: usize) -> Result<DirectSpectrum> {
    direct_spectrum_near(op, k, Complex64::new(0.0, 0.0))
}

fn factor_with_retry(op: &LinearizedOperator, shift: Complex64) -> Result<(BlockLu, Complex64)> {
    let mut sigma = shift;
    let mut bump = 1e-5 * (1.0 + shift.norm());
    let scale = op.matrix_norm() + shift.norm();
    for _ in 0..6 {
        if let Some(lu) = op.matrix.factor_shifted(sigma) {
            // a shift sitting on an eigenvalue can factor without a tiny
            // pivot; catch it with a one-solve condition estimate
            let mut probe: Vec<[Complex64; 2]> = (0..op.n)
                .map(|i| {
                    let t = (i as f64 * 0.618_033_988_749_895).fract() - 0.5;
                    [Complex64::new(t, 0.0), Complex64::new(0.5 - t * t, 0.0)]
                })
                .collect();
            let before = norm(&probe);
            lu.solve_in_place(&mut probe);
            let growth = norm(&probe) / before;
            if growth.is_finite() && growth * scale < 1e12 {
                return Ok((lu, sigma));
            }
        }
        log::debug!("shift {sigma} is numerically singular; perturbing");
        sigma = shift + bump;
        bump *= 10.0;
    }
    Err(Error::FactorizationFailed { shift: shift.re })
}

type Vector = Vec<[Complex64; 2]>;

fn dot(a: &Vector, b: &Vector) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x[0].conj() * y[0] + x[1].conj() * y[1]).sum()
}

fn norm(a: &Vector) -> f64 {
    a.iter().map(|x| x[0].norm_sqr() + x[1].norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut Vector, a: Complex64, x: &Vector) {
    for (yi, xi) in y.iter_mut().zip(x) {
        yi[0] += a * xi[0];
        yi[1] += a * xi[1];
    }
}

fn scale(y: &mut Vector, a: Complex64) {
    for yi in y.iter_mut() {
        yi[0] *= a;
        yi[1] *= a;
    }
}

/// Eigenvalues of a small dense complex matrix.
fn small_eigenvalues(h: &DMatrix<Complex64>) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(h.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Null vector of H − θI by inverse iteration.
fn small_eigenvector(h: &DMatrix<Complex64>, theta: Complex64) -> DVector<Complex64> {
    let m = h.nrows();
    let perturb = theta + Complex64::new(1e-10, 1e-10) * (1.0 + theta.norm());
    let a = h - DMatrix::from_diagonal_element(m, m, perturb);
    let lu = a.lu();
    let mut y = DVector::from_element(m, Complex64::new(1.0, 0.0));
    for _ in 0..3 {
        if let Some(z) = lu.solve(&y) {
            let nz = z.norm();
            if nz.is_finite() && nz > 0.0 {
                y = z / Complex64::new(nz, 0.0);
            }
        }
    }
    y
}

/// The `k` eigenvalues of the operator closest to `shift`.
pub fn direct_spectrum_near(op: &LinearizedOperator, k: usize, shift: Complex64) -> Result<DirectSpectrum> {
    let n = op.n;
    let dim = 2 * n;
    let k = k.max(1).min(dim);
    let (lu, sigma) = factor_with_retry(op, shift)?;
    let m = (2 * k + 30).min(dim);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start: Vector = (0..n)
        .map(|_| {
            [
                Complex64::new(rng.random::<f64>() - 0.5, 0.0),
                Complex64::new(rng.random::<f64>() - 0.5, 0.0),
            ]
        })
        .collect();

    let mut result = Vec::new();
    for restart in 0..40 {
        let nv = norm(&start);
        scale(&mut start, Complex64::new(1.0 / nv, 0.0));
        let mut basis: Vec<Vector> = vec![start.clone()];
        let mut h = DMatrix::<Complex64>::zeros(m + 1, m);
        let mut m_eff = m;
        for j in 0..m {
            let mut w = basis[j].clone();
            lu.solve_in_place(&mut w);
            let wn0 = norm(&w);
            // classical Gram–Schmidt, twice
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let hij = dot(b, &w);
                    h[(i, j)] += hij;
                    axpy(&mut w, -hij, b);
                }
            }
            let wn = norm(&w);
            h[(j + 1, j)] = Complex64::new(wn, 0.0);
            if wn <= 1e-13 * wn0 {
                m_eff = j + 1;
                break;
            }
            scale(&mut w, Complex64::new(1.0 / wn, 0.0));
            basis.push(w);
        }
        let hm = h.view((0, 0), (m_eff, m_eff)).into_owned();
        let beta = h[(m_eff, m_eff - 1)].norm();
        let mut thetas = small_eigenvalues(&hm);
        thetas.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        thetas.truncate(k);

        let mut converged = true;
        let mut next = vec![[Complex64::new(0.0, 0.0); 2]; n];
        result.clear();
        for theta in thetas {
            let y = small_eigenvector(&hm, theta);
            let ritz_res = beta * y[m_eff - 1].norm() / theta.norm();
            if ritz_res > 1e-11 && m_eff == m {
                converged = false;
            }
            let mut x = vec![[Complex64::new(0.0, 0.0); 2]; n];
            for (i, b) in basis.iter().take(m_eff).enumerate() {
                axpy(&mut x, y[i], b);
            }
            axpy(&mut next, Complex64::new(1.0, 0.0), &x);
            result.push((sigma + 1.0 / theta, x));
        }
        if converged || restart == 39 {
            if !converged {
                log::warn!("shift-invert Arnoldi stopped before full convergence");
            }
            break;
        }
        start = next;
    }

    let mut eigen: Vec<Eigenpair> = result
        .into_iter()
        .map(|(lambda, mut x)| {
            let nx = op.norm(&x);
            scale(&mut x, Complex64::new(1.0 / nx, 0.0));
            let mut ax = vec![[Complex64::new(0.0, 0.0); 2]; n];
            op.apply(&x, &mut ax);
            axpy(&mut ax, -lambda, &x);
            let residual = op.norm(&ax);
            let mass_functional = op.constraint(&x).norm();
            Eigenpair {
                lambda,
                mass_functional,
                residual,
                constrained: mass_functional <= CONSTRAINT_TOL,
                vector: x,
            }
        })
        .collect();
    eigen.sort_by(|a, b| (a.lambda - shift).norm().total_cmp(&(b.lambda - shift).norm()));
    Ok(DirectSpectrum { shift: sigma, eigen })
}
