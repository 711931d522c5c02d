//! Real-coordinate rank machinery and simultaneous diagonalization.
//!
//! Every span/rank decision in the crate goes through the singular values
//! of stacked real coordinate vectors: an n x n complex matrix maps to a
//! 2n^2-long real vector, so Hilbert-Schmidt geometry becomes Euclidean
//! geometry.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::op::{zeros, OpMat};
use crate::tol::{Tolerance, EIG_CLUSTER_TOL};

/// n x n complex matrix -> 2n^2 real coordinates (re block, then im block).
pub fn vectorize(m: &OpMat) -> DVector<f64> {
    let n2 = m.nrows() * m.ncols();
    let mut v = DVector::zeros(2 * n2);
    for (idx, z) in m.iter().enumerate() {
        v[idx] = z.re;
        v[idx + n2] = z.im;
    }
    v
}

pub fn unvectorize(v: &DVector<f64>, n: usize) -> OpMat {
    let n2 = n * n;
    let mut m = zeros(n);
    for idx in 0..n2 {
        // nalgebra iterates column-major; stay consistent with vectorize.
        m[(idx % n, idx / n)] = C64::new(v[idx], v[idx + n2]);
    }
    m
}

/// Right nullspace of a real matrix, thresholded at
/// rank_tol * max(sigma_max, 1). Zero-pads short matrices so the SVD
/// exposes all right singular vectors.
pub fn nullspace(mat: &DMatrix<f64>, rank_tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = mat.shape();
    if cols == 0 {
        return Vec::new();
    }
    let work = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(mat);
        padded
    } else {
        mat.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let thresh = rank_tol * sigma_max.max(1.0);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= thresh {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

pub fn matrix_rank(mat: &DMatrix<f64>, rank_tol: f64) -> usize {
    let (rows, cols) = mat.shape();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let svd = mat.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let thresh = rank_tol * sigma_max.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > thresh).count()
}

/// Simultaneous diagonalization of a commuting Hermitian family.
///
/// Diagonalizes a random generic real combination of the family, then
/// refines eigenvalue clusters by each member in turn; the random seed is
/// fixed by the caller so runs are reproducible. Returns the unitary V
/// (columns are the joint eigenvectors) and, per transformed index, the
/// vector of eigenvalues across the family.
pub fn simultaneous_diagonalize(
    family: &[OpMat],
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<(OpMat, Vec<Vec<f64>>)> {
    if family.is_empty() {
        return Ok((OpMat::identity(n, n), vec![Vec::new(); n]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let combo = {
        let mut acc = zeros(n);
        for h in family {
            acc += h * C64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0);
        }
        acc
    };
    let (vals, mut v) = crate::op::hermitian_eigen(&combo);
    let mut clusters = cluster_sorted_indices(&vals, EIG_CLUSTER_TOL);

    for h in family {
        let mut next = Vec::new();
        for cluster in &clusters {
            if cluster.len() == 1 {
                next.push(cluster.clone());
                continue;
            }
            let sub = compressed_block(&v, h, cluster);
            let spread = block_eigen_spread(&sub);
            if spread <= EIG_CLUSTER_TOL {
                next.push(cluster.clone());
                continue;
            }
            let (bvals, bvecs) = crate::op::hermitian_eigen(&sub);
            rotate_columns(&mut v, cluster, &bvecs);
            for part in cluster_sorted_indices(&bvals, EIG_CLUSTER_TOL) {
                next.push(part.iter().map(|&j| cluster[j]).collect());
            }
        }
        clusters = next;
    }

    // Validate: every family member must now be diagonal in V coordinates.
    let mut patterns = vec![Vec::with_capacity(family.len()); n];
    for h in family {
        let d = v.adjoint() * h * &v;
        let mut off = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off += d[(r, c)].norm_sqr();
                }
            }
        }
        let scale = crate::op::hs_norm(h).max(1.0);
        if off.sqrt() > 1e3 * tol.residual_tol * scale {
            return Err(Error::NotAbelian {
                residual: off.sqrt(),
            });
        }
        for t in 0..n {
            patterns[t].push(d[(t, t)].re);
        }
    }
    Ok((v, patterns))
}

fn compressed_block(v: &OpMat, h: &OpMat, cluster: &[usize]) -> OpMat {
    let k = cluster.len();
    let mut sub = zeros(k);
    let hv: Vec<_> = cluster.iter().map(|&c| h * v.column(c)).collect();
    for (a, &ca) in cluster.iter().enumerate() {
        for b in 0..k {
            sub[(a, b)] = v.column(ca).dotc(&hv[b]);
        }
    }
    // symmetrize against roundoff
    (&sub + sub.adjoint()) * C64::new(0.5, 0.0)
}

fn block_eigen_spread(sub: &OpMat) -> f64 {
    let k = sub.nrows();
    let mut off = 0.0;
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for r in 0..k {
        for c in 0..k {
            if r == c {
                dmin = dmin.min(sub[(r, c)].re);
                dmax = dmax.max(sub[(r, c)].re);
            } else {
                off = f64::max(off, sub[(r, c)].norm());
            }
        }
    }
    f64::max(dmax - dmin, off)
}

fn rotate_columns(v: &mut OpMat, cluster: &[usize], rot: &OpMat) {
    let n = v.nrows();
    let k = cluster.len();
    let mut block = OpMat::zeros(n, k);
    for (j, &cj) in cluster.iter().enumerate() {
        block.set_column(j, &v.column(cj));
    }
    let rotated = block * rot;
    for (j, &cj) in cluster.iter().enumerate() {
        v.set_column(cj, &rotated.column(j));
    }
}

/// Groups indices of a sorted-ascending value list by gaps larger than tol.
fn cluster_sorted_indices(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match out.last_mut() {
            Some(last) if (vals[i] - vals[*last.last().unwrap()]).abs() <= tol => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Groups transformed indices by equal eigenvalue-pattern vectors
/// (infinity norm, absolute tolerance).
pub fn cluster_patterns(patterns: &[Vec<f64>], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    'outer: for t in 0..patterns.len() {
        for g in groups.iter_mut() {
            let rep = g[0];
            let close = patterns[t]
                .iter()
                .zip(patterns[rep].iter())
                .all(|(a, b)| (a - b).abs() <= tol);
            if close {
                g.push(t);
                continue 'outer;
            }
        }
        groups.push(vec![t]);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::{c, hs_norm};

    #[test]
    fn vectorize_roundtrip_preserves_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = OpMat::from_fn(3, 3, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let b = OpMat::from_fn(3, 3, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let va = vectorize(&a);
            let vb = vectorize(&b);
            assert!((va.dot(&vb) - crate::op::hs_inner(&a, &b).unwrap()).abs() < 1e-12);
            assert!(hs_norm(&(unvectorize(&va, 3) - a)) < 1e-15);
        }
    }

    #[test]
    fn nullspace_of_wide_and_tall() {
        // rows [1 1 0] has a 2-dim nullspace.
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((m.clone() * v).norm() < 1e-12);
        }
        let tall = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(nullspace(&tall, 1e-9).len(), 0);
        assert_eq!(matrix_rank(&tall, 1e-9), 2);
    }

    #[test]
    fn simdiag_refines_degenerate_combo() {
        // diag(1,1,0) and diag(0,1,1) commute; joint patterns split all
        // three indices even when one member is degenerate.
        let h1 = OpMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
        ]));
        let h2 = OpMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
        ]));
        let tol = Tolerance::default();
        let (v, patterns) = simultaneous_diagonalize(&[h1, h2], 3, 42, &tol).unwrap();
        assert!(crate::op::unitarity_residual(&v) < 1e-10);
        let groups = cluster_patterns(&patterns, EIG_CLUSTER_TOL);
        assert_eq!(groups.len(), 3);
    }

    #[test]
    fn simdiag_rejects_noncommuting() {
        let hx = crate::op::pauli_x() * c(0.0, 1.0);
        let hz = crate::op::pauli_z() * c(0.0, 1.0);
        let tol = Tolerance::default();
        assert!(simultaneous_diagonalize(&[hx, hz], 2, 1, &tol).is_err());
    }
}
