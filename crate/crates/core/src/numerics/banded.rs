//! Tridiagonal and 2×2-block-tridiagonal direct solvers.

use num_complex::Complex64;

/// Real tridiagonal matrix: `lower[i]` multiplies x[i-1] in row i,
/// `upper[i]` multiplies x[i+1]. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Thomas elimination; `None` on a vanishing pivot.
    pub fn factor(&self) -> Option<TridiagonalLu> {
        let n = self.len();
        let mut cp = vec![0.0; n];
        let mut piv = vec![0.0; n];
        let scale = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
        let mut d = self.diag[0];
        for i in 0..n {
            if i > 0 {
                d = self.diag[i] - self.lower[i] * cp[i - 1];
            }
            if d.abs() <= 1e-14 * scale || !d.is_finite() {
                return None;
            }
            piv[i] = d;
            cp[i] = if i + 1 < n { self.upper[i] / d } else { 0.0 };
        }
        Some(TridiagonalLu { lower: self.lower.clone(), cp, piv })
    }
}

#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    cp: Vec<f64>,
    piv: Vec<f64>,
}

impl TridiagonalLu {
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.piv.len();
        rhs[0] /= self.piv[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / self.piv[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.cp[i] * rhs[i + 1];
        }
    }
}

/// Solves the bordered system
/// `[T c; rᵀ d] [x; y] = [f; g]` for a tridiagonal `T`, column `c`,
/// row `r` and scalar `d`. Returns `None` if `T` or the Schur complement is singular.
pub fn solve_bordered(
    t: &Tridiagonal,
    col: &[f64],
    row: &[f64],
    corner: f64,
    rhs: &[f64],
    rhs_last: f64,
) -> Option<(Vec<f64>, f64)> {
    let lu = t.factor()?;
    let mut a = rhs.to_vec();
    lu.solve_in_place(&mut a);
    let mut b = col.to_vec();
    lu.solve_in_place(&mut b);
    let ra: f64 = row.iter().zip(&a).map(|(r, x)| r * x).sum();
    let rb: f64 = row.iter().zip(&b).map(|(r, x)| r * x).sum();
    let schur = corner - rb;
    let scale = corner.abs() + row.iter().zip(&b).map(|(r, x)| (r * x).abs()).sum::<f64>();
    if schur.abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE) || !schur.is_finite() {
        return None;
    }
    let y = (rhs_last - ra) / schur;
    let x = a.iter().zip(&b).map(|(ai, bi)| ai - y * bi).collect();
    Some((x, y))
}

pub type Block = [[Complex64; 2]; 2];

fn bmul(a: &Block, b: &Block) -> Block {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn bvec(a: &Block, v: [Complex64; 2]) -> [Complex64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

fn binv(a: &Block, tol: f64) -> Option<Block> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let size = a.iter().flatten().map(|c| c.norm()).fold(0.0f64, f64::max);
    if det.norm() <= tol * size * size || !det.is_finite() {
        return None;
    }
    Some([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

/// Block-tridiagonal matrix with 2×2 blocks, stored by block row.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub lower: Vec<Block>,
    pub diag: Vec<Block>,
    pub upper: Vec<Block>,
}

#[derive(Debug, Clone)]
pub struct BlockLu {
    lower: Vec<Block>,
    // inverse of the eliminated diagonal block
    dinv: Vec<Block>,
    // dinv[i] * upper[i]
    cp: Vec<Block>,
}

impl BlockTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[[Complex64; 2]], out: &mut [[Complex64; 2]]) {
        let n = self.len();
        for i in 0..n {
            let mut s = bvec(&self.diag[i], x[i]);
            if i > 0 {
                let l = bvec(&self.lower[i], x[i - 1]);
                s = [s[0] + l[0], s[1] + l[1]];
            }
            if i + 1 < n {
                let u = bvec(&self.upper[i], x[i + 1]);
                s = [s[0] + u[0], s[1] + u[1]];
            }
            out[i] = s;
        }
    }

    /// Block Thomas factorization of `self − shift·I`. `None` when a pivot
    /// block is numerically singular.
    pub fn factor_shifted(&self, shift: Complex64) -> Option<BlockLu> {
        let n = self.len();
        let mut dinv = Vec::with_capacity(n);
        let mut cp = Vec::with_capacity(n);
        let zero = Complex64::new(0.0, 0.0);
        let mut prev_cp: Block = [[zero; 2]; 2];
        for i in 0..n {
            let mut d = self.diag[i];
            d[0][0] -= shift;
            d[1][1] -= shift;
            if i > 0 {
                let lc = bmul(&self.lower[i], &prev_cp);
                for r in 0..2 {
                    for c in 0..2 {
                        d[r][c] -= lc[r][c];
                    }
                }
            }
            let di = binv(&d, 1e-13)?;
            let c = if i + 1 < n { bmul(&di, &self.upper[i]) } else { [[zero; 2]; 2] };
            dinv.push(di);
            cp.push(c);
            prev_cp = c;
        }
        Some(BlockLu { lower: self.lower.clone(), dinv, cp })
    }
}

impl BlockLu {
    pub fn solve_in_place(&self, rhs: &mut [[Complex64; 2]]) {
        let n = self.dinv.len();
        rhs[0] = bvec(&self.dinv[0], rhs[0]);
        for i in 1..n {
            let l = bvec(&self.lower[i], rhs[i - 1]);
            rhs[i] = bvec(&self.dinv[i], [rhs[i][0] - l[0], rhs[i][1] - l[1]]);
        }
        for i in (0..n - 1).rev() {
            let c = bvec(&self.cp[i], rhs[i + 1]);
            rhs[i] = [rhs[i][0] - c[0], rhs[i][1] - c[1]];
        }
    }
}
