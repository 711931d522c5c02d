//! Dense complex-matrix substrate: tensor products, partial traces,
//! (anti)commutators, Hilbert-Schmidt geometry, exponentials, and
//! structural predicates.
//!
//! All operators live on the total space of a bipartite system S+A with
//! the S factor on the left of every tensor product. Pauli matrices
//! follow the skew-Hermitian half-normalized convention
//! `[sx, sy] = sz`, `{sj, sk} = -(1/2) d_jk 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol::Tolerance;

/// Dense square complex matrix; the universal operator container.
pub type OpMat = DMatrix<C64>;

/// Dimensions of the bipartite split S (left factor) + A (right factor).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteSplit {
    pub n_s: usize,
    pub n_a: usize,
}

impl BipartiteSplit {
    pub fn new(n_s: usize, n_a: usize) -> Result<Self> {
        if n_s == 0 || n_a == 0 {
            return Err(Error::InvalidInput(
                "subsystem dimensions must be positive".into(),
            ));
        }
        Ok(Self { n_s, n_a })
    }

    pub fn n_sa(&self) -> usize {
        self.n_s * self.n_a
    }

    pub fn check_total_dim(&self, m: &OpMat) -> Result<()> {
        check_square(m)?;
        if m.nrows() != self.n_sa() {
            return Err(Error::DimensionMismatch {
                expected: self.n_sa(),
                got: m.nrows(),
            });
        }
        Ok(())
    }
}

pub fn check_square(m: &OpMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_same_dim(a: &OpMat, b: &OpMat) -> Result<()> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(())
}

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> OpMat {
    OpMat::identity(n, n)
}

pub fn zeros(n: usize) -> OpMat {
    OpMat::zeros(n, n)
}

/// sx = (1/2) [[0, i], [i, 0]]  (skew-Hermitian).
pub fn pauli_x() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.0, 0.0)])
}

/// sy = (1/2) [[0, -1], [1, 0]]  (skew-Hermitian).
pub fn pauli_y() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)])
}

/// sz = (1/2) [[i, 0], [0, -i]]  (skew-Hermitian).
pub fn pauli_z() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5)])
}

/// Conventional Hermitian Pauli X = [[0,1],[1,0]]; helper only, the
/// skew-Hermitian half-normalized set above is used everywhere else.
pub fn pauli_x_hermitian() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y_hermitian() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z_hermitian() -> OpMat {
    OpMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Kronecker product with the S factor on the left, A factor on the right.
pub fn tensor(a: &OpMat, b: &OpMat) -> OpMat {
    a.kronecker(b)
}

/// Traces out the right (auxiliary) factor; the result acts on S alone.
pub fn partial_trace_a(m: &OpMat, split: &BipartiteSplit) -> Result<OpMat> {
    split.check_total_dim(m)?;
    let (n_s, n_a) = (split.n_s, split.n_a);
    let mut out = zeros(n_s);
    for r in 0..n_s {
        for s in 0..n_s {
            let mut acc = c(0.0, 0.0);
            for t in 0..n_a {
                acc += m[(r * n_a + t, s * n_a + t)];
            }
            out[(r, s)] = acc;
        }
    }
    Ok(out)
}

/// Tr_A(M (1 (x) sigma^dag)), the sigma-weighted contraction of the A factor.
pub fn contract_a(m: &OpMat, sigma: &OpMat, split: &BipartiteSplit) -> Result<OpMat> {
    split.check_total_dim(m)?;
    check_square(sigma)?;
    if sigma.nrows() != split.n_a {
        return Err(Error::DimensionMismatch {
            expected: split.n_a,
            got: sigma.nrows(),
        });
    }
    let (n_s, n_a) = (split.n_s, split.n_a);
    let mut out = zeros(n_s);
    for r in 0..n_s {
        for s in 0..n_s {
            let mut acc = c(0.0, 0.0);
            for t in 0..n_a {
                for e in 0..n_a {
                    acc += m[(r * n_a + t, s * n_a + e)] * sigma[(t, e)].conj();
                }
            }
            out[(r, s)] = acc;
        }
    }
    Ok(out)
}

pub fn commutator(a: &OpMat, b: &OpMat) -> Result<OpMat> {
    check_same_dim(a, b)?;
    Ok(a * b - b * a)
}

pub fn anticommutator(a: &OpMat, b: &OpMat) -> Result<OpMat> {
    check_same_dim(a, b)?;
    Ok(a * b + b * a)
}

/// Real Hilbert-Schmidt form Re tr(A^dag B); positive definite, and the
/// inner product under which every subspace basis here is orthonormal.
pub fn hs_inner(a: &OpMat, b: &OpMat) -> Result<f64> {
    check_same_dim(a, b)?;
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let x = a[(i, j)];
            let y = b[(i, j)];
            acc += x.re * y.re + x.im * y.im;
        }
    }
    Ok(acc)
}

pub fn hs_norm(a: &OpMat) -> f64 {
    let mut acc = 0.0;
    for v in a.iter() {
        acc += v.norm_sqr();
    }
    acc.sqrt()
}

pub fn trace(a: &OpMat) -> C64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..a.nrows() {
        acc += a[(i, i)];
    }
    acc
}

/// Frobenius distance to the Hermitian cone, ||M - M^dag||.
pub fn hermiticity_residual(m: &OpMat) -> f64 {
    hs_norm(&(m - m.adjoint()))
}

/// Frobenius distance to the skew-Hermitian cone, ||M + M^dag||.
pub fn skewness_residual(m: &OpMat) -> f64 {
    hs_norm(&(m + m.adjoint()))
}

pub fn unitarity_residual(m: &OpMat) -> f64 {
    let n = m.nrows();
    hs_norm(&(m.adjoint() * m - identity(n)))
}

pub fn is_hermitian(m: &OpMat, tol: &Tolerance) -> bool {
    hermiticity_residual(m) <= tol.residual_tol * hs_norm(m).max(1.0)
}

pub fn is_skew_hermitian(m: &OpMat, tol: &Tolerance) -> bool {
    skewness_residual(m) <= tol.residual_tol * hs_norm(m).max(1.0)
}

pub fn is_unitary(m: &OpMat, tol: &Tolerance) -> bool {
    unitarity_residual(m) <= tol.residual_tol * (m.nrows() as f64).sqrt()
}

/// Removes the trace component: M - (tr M / n) 1.
pub fn traceless_part(m: &OpMat) -> OpMat {
    let n = m.nrows();
    let t = trace(m) / c(n as f64, 0.0);
    m - identity(n) * t
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigen(m: &OpMat) -> (Vec<f64>, OpMat) {
    let se = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = zeros(m.nrows());
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Matrix exponential of a skew-Hermitian matrix via the unitary
/// eigendecomposition of the Hermitian matrix iA; the result is unitary
/// to roundoff by construction.
pub fn expm_skew(a: &OpMat, tol: &Tolerance) -> Result<OpMat> {
    check_square(a)?;
    let res = skewness_residual(a);
    if res > tol.residual_tol * hs_norm(a).max(1.0) {
        return Err(Error::NotSkewHermitian { residual: res });
    }
    let i_a = a.map(|z| C64::new(0.0, 1.0) * z);
    let herm = (&i_a + i_a.adjoint()) * c(0.5, 0.0);
    let (vals, vecs) = hermitian_eigen(&herm);
    // iA = V diag(mu) V^dag  =>  e^A = V diag(e^{-i mu}) V^dag
    let phases = DVector::from_iterator(vals.len(), vals.iter().map(|&mu| c(0.0, -mu).exp()));
    let mut scaled = vecs.clone();
    for (j, col) in phases.iter().enumerate() {
        let mut cj = scaled.column_mut(j);
        cj *= *col;
    }
    Ok(&scaled * vecs.adjoint())
}

/// HS-orthonormal basis of su(n): skew-Hermitian traceless matrices.
pub fn su_basis(n: usize) -> Vec<OpMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut a = zeros(n);
            a[(j, k)] = c(s, 0.0);
            a[(k, j)] = c(-s, 0.0);
            out.push(a);
            let mut b = zeros(n);
            b[(j, k)] = c(0.0, s);
            b[(k, j)] = c(0.0, s);
            out.push(b);
        }
    }
    for m in 1..n {
        let norm = 1.0 / ((m * (m + 1)) as f64).sqrt();
        let mut d = zeros(n);
        for j in 0..m {
            d[(j, j)] = c(0.0, norm);
        }
        d[(m, m)] = c(0.0, -(m as f64) * norm);
        out.push(d);
    }
    out
}

/// HS-orthonormal basis of u(n) = su(n) + span{i 1 / sqrt(n)}.
pub fn u_basis(n: usize) -> Vec<OpMat> {
    let mut out = su_basis(n);
    out.push(identity(n) * c(0.0, 1.0 / (n as f64).sqrt()));
    out
}

/// HS-orthonormal basis of the Hermitian n x n matrices (n^2 elements).
pub fn hermitian_basis(n: usize) -> Vec<OpMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let mut d = zeros(n);
        d[(j, j)] = c(1.0, 0.0);
        out.push(d);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut a = zeros(n);
            a[(j, k)] = c(s, 0.0);
            a[(k, j)] = c(s, 0.0);
            out.push(a);
            let mut b = zeros(n);
            b[(j, k)] = c(0.0, -s);
            b[(k, j)] = c(0.0, s);
            out.push(b);
        }
    }
    out
}
