//! Orthonormal real-linear subspaces of operator space.
//!
//! `SubspaceBasis` is the universal container for every operator subspace
//! in the pipeline: the dynamical algebra L, the extracted K and P, L_S,
//! tori, ad-orbits, and normal spaces all live here. Elements are kept
//! pairwise Hilbert-Schmidt orthonormal by modified Gram-Schmidt with
//! re-orthogonalization.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, unvectorize, vectorize};
use crate::op::{hs_inner, hs_norm, OpMat};
use crate::tol::Tolerance;

#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    elements: Vec<OpMat>,
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            elements: Vec::new(),
        }
    }

    /// Orthonormalizes a spanning set; rank decisions at `tol.rank_tol`.
    pub fn from_spanning<'a, I>(ambient_dim: usize, mats: I, tol: &Tolerance) -> Result<Self>
    where
        I: IntoIterator<Item = &'a OpMat>,
    {
        let mut basis = Self::empty(ambient_dim);
        for m in mats {
            if m.nrows() != ambient_dim || m.ncols() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: m.nrows(),
                });
            }
            basis.admit(m, tol);
        }
        Ok(basis)
    }

    /// Projects the candidate against the current basis and admits the
    /// normalized residual if its relative norm exceeds rank_tol.
    /// Returns true when the span grew. Inputs are expected on the unit
    /// scale; candidates with norm at most rank_tol count as zero, which
    /// keeps roundoff debris out of the basis.
    pub fn admit(&mut self, cand: &OpMat, tol: &Tolerance) -> bool {
        let scale = hs_norm(cand);
        if scale <= tol.rank_tol {
            return false;
        }
        let mut v = cand / num_complex::Complex64::new(scale, 0.0);
        // Two projection passes; twice is enough for working precision.
        for _ in 0..2 {
            for b in &self.elements {
                let coeff = hs_inner(b, &v).expect("dims checked");
                v -= b * num_complex::Complex64::new(coeff, 0.0);
            }
        }
        let r = hs_norm(&v);
        if r > tol.rank_tol {
            self.elements.push(v / num_complex::Complex64::new(r, 0.0));
            true
        } else {
            false
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn elements(&self) -> &[OpMat] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &OpMat {
        &self.elements[i]
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Coordinates of the orthogonal projection onto the span.
    pub fn coefficients(&self, m: &OpMat) -> Vec<f64> {
        self.elements
            .iter()
            .map(|b| hs_inner(b, m).expect("dims checked"))
            .collect()
    }

    /// Component of `m` orthogonal to the span.
    pub fn project_out(&self, m: &OpMat) -> OpMat {
        let mut v = m.clone();
        for _ in 0..2 {
            for b in &self.elements {
                let coeff = hs_inner(b, &v).expect("dims checked");
                v -= b * num_complex::Complex64::new(coeff, 0.0);
            }
        }
        v
    }

    pub fn distance(&self, m: &OpMat) -> f64 {
        hs_norm(&self.project_out(m))
    }

    /// True iff the distance from `m` to the span is at most
    /// rank_tol * ||m||; the zero matrix is always contained.
    pub fn contains_mat(&self, m: &OpMat, tol: &Tolerance) -> bool {
        let norm = hs_norm(m);
        if norm == 0.0 {
            return true;
        }
        self.distance(m) <= tol.rank_tol * norm
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis, tol: &Tolerance) -> bool {
        other.elements.iter().all(|m| self.contains_mat(m, tol))
    }

    pub fn same_span(&self, other: &SubspaceBasis, tol: &Tolerance) -> bool {
        self.dim() == other.dim()
            && self.contains_subspace(other, tol)
            && other.contains_subspace(self, tol)
    }

    pub fn union(&self, other: &SubspaceBasis, tol: &Tolerance) -> Result<SubspaceBasis> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let mut out = self.clone();
        for m in &other.elements {
            out.admit(m, tol);
        }
        Ok(out)
    }

    /// Subspace intersection via the nullspace of the stacked
    /// orthogonal-projector difference, SVD-thresholded at rank_tol.
    pub fn intersect(&self, other: &SubspaceBasis, tol: &Tolerance) -> Result<SubspaceBasis> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let n = self.ambient_dim;
        let len = 2 * n * n;
        if self.is_empty() || other.is_empty() {
            return Ok(SubspaceBasis::empty(n));
        }
        let eye = DMatrix::<f64>::identity(len, len);
        let pu = projector(&self.elements, len) - &eye;
        let pw = projector(&other.elements, len) - &eye;
        let mut stacked = DMatrix::<f64>::zeros(2 * len, len);
        stacked.view_mut((0, 0), (len, len)).copy_from(&pu);
        stacked.view_mut((len, 0), (len, len)).copy_from(&pw);
        let null = nullspace(&stacked, tol.rank_tol);
        let mats: Vec<OpMat> = null.iter().map(|v| unvectorize(v, n)).collect();
        SubspaceBasis::from_spanning(n, mats.iter(), tol)
    }
}

fn projector(elements: &[OpMat], len: usize) -> DMatrix<f64> {
    let mut p = DMatrix::<f64>::zeros(len, len);
    for e in elements {
        let v = vectorize(e);
        // rank-one update p += v v^T
        p.ger(1.0, &v, &v, 1.0);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::{c, identity, pauli_x, pauli_y, pauli_z, zeros};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn orthonormalization_and_rank() {
        let sx = pauli_x();
        let sy = pauli_y();
        let sum = &sx + &sy;
        let basis = SubspaceBasis::from_spanning(2, [&sx, &sy, &sum].into_iter(), &tol()).unwrap();
        assert_eq!(basis.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (hs_inner(basis.element(i), basis.element(j)).unwrap() - want).abs() < 1e-12
                );
            }
        }
        assert!(basis.contains_mat(&sum, &tol()));
        assert!(!basis.contains_mat(&pauli_z(), &tol()));
        assert!(basis.contains_mat(&zeros(2), &tol()));
    }

    #[test]
    fn intersection_via_projectors() {
        // span{sx, sy} and span{sy, sz} intersect in span{sy}.
        let u =
            SubspaceBasis::from_spanning(2, [&pauli_x(), &pauli_y()].into_iter(), &tol()).unwrap();
        let w =
            SubspaceBasis::from_spanning(2, [&pauli_y(), &pauli_z()].into_iter(), &tol()).unwrap();
        let inter = u.intersect(&w, &tol()).unwrap();
        assert_eq!(inter.dim(), 1);
        assert!(inter.contains_mat(&pauli_y(), &tol()));

        let disjoint = SubspaceBasis::from_spanning(2, [&pauli_x()].into_iter(), &tol()).unwrap();
        let other = SubspaceBasis::from_spanning(2, [&pauli_z()].into_iter(), &tol()).unwrap();
        assert_eq!(disjoint.intersect(&other, &tol()).unwrap().dim(), 0);
    }

    #[test]
    fn real_linear_independence_of_i_scaling() {
        // Over the reals, M and iM are independent directions.
        let m = identity(2) * c(1.0, 0.0);
        let im = identity(2) * c(0.0, 1.0);
        let basis = SubspaceBasis::from_spanning(2, [&m, &im].into_iter(), &tol()).unwrap();
        assert_eq!(basis.dim(), 2);
    }
}
