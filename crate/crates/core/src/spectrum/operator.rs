//! Finite-difference linearization about a steady state:
//!
//! ```text
//! λp = ε² p_xx + f_u p + f_v q,
//! λq = D q_xx − f_u p − f_v q,
//! ```
//!
//! stored as a 2×2-block tridiagonal matrix, one block row per node.

use num_complex::Complex64;

use crate::model::{BistableModel, ProblemParams};
use crate::numerics::banded::{Block, BlockTridiagonal};
use crate::numerics::UniformGrid;

#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub n: usize,
    pub params: ProblemParams,
    pub f_u: Vec<f64>,
    pub f_v: Vec<f64>,
    pub matrix: BlockTridiagonal,
    weights: Vec<f64>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl LinearizedOperator {
    /// Assembles the operator about nodal data (u, v).
    pub fn assemble(model: &BistableModel, params: &ProblemParams, u: &[f64], v: &[f64]) -> Self {
        let n = u.len();
        let grid = UniformGrid::new(n);
        let e2 = params.epsilon * params.epsilon;
        let d = params.d;
        let f_u: Vec<f64> = (0..n).map(|i| model.f_u(u[i], v[i])).collect();
        let f_v: Vec<f64> = (0..n).map(|i| model.f_v(u[i], v[i])).collect();
        let zero = c(0.0);
        let mut lower = vec![[[zero; 2]; 2]; n];
        let mut diag = vec![[[zero; 2]; 2]; n];
        let mut upper = vec![[[zero; 2]; 2]; n];
        for i in 0..n {
            let (lo, di, up) = grid.laplacian_row(i);
            lower[i] = [[c(e2 * lo), zero], [zero, c(d * lo)]];
            upper[i] = [[c(e2 * up), zero], [zero, c(d * up)]];
            let b: Block = [
                [c(e2 * di + f_u[i]), c(f_v[i])],
                [c(-f_u[i]), c(d * di - f_v[i])],
            ];
            diag[i] = b;
        }
        Self {
            n,
            params: *params,
            f_u,
            f_v,
            matrix: BlockTridiagonal { lower, diag, upper },
            weights: grid.weights(),
        }
    }

    pub fn from_state(model: &BistableModel, state: &crate::steady::SteadyState) -> Self {
        Self::assemble(model, &state.params, &state.u, &state.v)
    }

    pub fn apply(&self, x: &[[Complex64; 2]], out: &mut [[Complex64; 2]]) {
        self.matrix.apply(x, out);
    }

    /// Applies the operator to real data (p, q).
    pub fn apply_real(&self, p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<[Complex64; 2]> = p.iter().zip(q).map(|(&a, &b)| [c(a), c(b)]).collect();
        let mut y = vec![[c(0.0); 2]; self.n];
        self.apply(&x, &mut y);
        (y.iter().map(|b| b[0].re).collect(), y.iter().map(|b| b[1].re).collect())
    }

    /// Discrete mass functional ∫(p + q) dx.
    pub fn constraint(&self, x: &[[Complex64; 2]]) -> Complex64 {
        x.iter().zip(&self.weights).map(|(b, w)| (b[0] + b[1]) * *w).sum()
    }

    /// Weighted L² norm of (p, q).
    pub fn norm(&self, x: &[[Complex64; 2]]) -> f64 {
        x.iter()
            .zip(&self.weights)
            .map(|(b, w)| w * (b[0].norm_sqr() + b[1].norm_sqr()))
            .sum::<f64>()
            .sqrt()
    }

    /// Max-row-sum norm of the matrix.
    pub fn matrix_norm(&self) -> f64 {
        let m = &self.matrix;
        (0..self.n)
            .flat_map(|i| {
                (0..2).map(move |r| {
                    (0..2)
                        .map(|c| m.lower[i][r][c].norm() + m.diag[i][r][c].norm() + m.upper[i][r][c].norm())
                        .sum::<f64>()
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_cubic;

    #[test]
    fn block_rows_sum_to_laplacian_of_first_integral() {
        let m = builtin_cubic(0.3).unwrap();
        let params = ProblemParams::new(0.05, 2.0, 0.0).unwrap();
        let n = 101;
        let grid = UniformGrid::new(n);
        let xs = grid.nodes();
        let u: Vec<f64> = xs.iter().map(|x| ((x - 0.4) / 0.05).tanh()).collect();
        let v: Vec<f64> = xs.iter().map(|x| 0.01 * x).collect();
        let op = LinearizedOperator::assemble(&m, &params, &u, &v);
        let p: Vec<f64> = xs.iter().map(|x| (5.0 * x).sin()).collect();
        let q: Vec<f64> = xs.iter().map(|x| x * x - 0.3).collect();
        let (lp, lq) = op.apply_real(&p, &q);
        let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.0025 * a + 2.0 * b).collect();
        let mut lap = vec![0.0; n];
        grid.laplacian(&mix, &mut lap);
        for i in 0..n {
            // rounding scale of a second difference is ~ eps_mach / h²
            let scale = 4.0 * 2.0 / (grid.spacing() * grid.spacing());
            assert!((lp[i] + lq[i] - lap[i]).abs() <= 1e-15 * scale, "node {i}");
        }
    }
}
