//! Dense complex linear algebra on top of nalgebra, with faer for the SVD.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const RANK_RTOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            c(d[i], 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Determinant by LU with partial pivoting.
pub fn det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return c(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Full SVD `m = u · diag(s) · v*` with `s` in decreasing order.
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd {
            u: CMatrix::identity(rows, rows),
            s: Vec::new(),
            v: CMatrix::identity(cols, cols),
        };
    }
    let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let d = a.svd().expect("SVD of a finite matrix converges");
    let (u, v) = (d.U(), d.V());
    let s = d.S().column_vector();
    Svd {
        u: CMatrix::from_fn(rows, rows, |i, j| u[(i, j)]),
        s: (0..rows.min(cols)).map(|i| s[i].re).collect(),
        v: CMatrix::from_fn(cols, cols, |i, j| v[(i, j)]),
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).s
}

/// Numerical rank with threshold `rtol · σ_max`.
pub fn rank(m: &CMatrix, rtol: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &CMatrix, rtol: f64) -> CMatrix {
    let cols = m.ncols();
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..cols)
        .filter(|&i| smax == 0.0 || d.s.get(i).is_none_or(|&x| x <= rtol * smax))
        .collect();
    CMatrix::from_fn(cols, keep.len(), |j, k| d.v[(j, keep[k])])
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with orthonormal columns; `π/2` when the dimensions differ.
pub fn max_principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    // sine of the largest angle from the component of b outside span(a)
    let residual = b - a * (a.adjoint() * b);
    let s = singular_values(&residual);
    s.first().copied().unwrap_or(0.0).min(1.0).asin()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, atol: f64) -> bool {
    max_abs(&(m - m.adjoint())) <= atol
}
