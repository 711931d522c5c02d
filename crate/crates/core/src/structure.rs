//! Extraction of the K and P subspaces from the dynamical algebra and the
//! decomposition L = {K (x) 1} + {iP (x) su(n_A)}, together with the
//! interaction and full-ancilla-control assumption checks.

use num_complex::Complex64 as C64;

use crate::closure::DynamicalAlgebra;
use crate::error::{Error, Result};
use crate::op::{
    contract_a, hermitian_basis, identity, partial_trace_a, su_basis, tensor, BipartiteSplit,
    OpMat,
};
use crate::span::SubspaceBasis;
use crate::tol::Tolerance;

/// Structural summary of the algebra relative to the S/A split.
///
/// `p` and `l_s` are populated only when assumption A-b holds and the
/// per-sigma P spaces agree; otherwise the raw per-sigma spaces are still
/// reported for diagnosis.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub k: SubspaceBasis,
    pub p_per_sigma: Vec<SubspaceBasis>,
    pub p: Option<SubspaceBasis>,
    pub l_s: Option<SubspaceBasis>,
    pub assumption_aa: bool,
    pub assumption_ab: bool,
    pub decomposition_consistent: bool,
    pub k_cap_p_dim: usize,
}

fn check_split(l: &DynamicalAlgebra, split: &BipartiteSplit) -> Result<()> {
    if l.ambient_dim() != split.n_sa() {
        return Err(Error::DimensionMismatch {
            expected: split.n_sa(),
            got: l.ambient_dim(),
        });
    }
    Ok(())
}

/// (A-a): some element of L has a nonzero component in the interaction
/// sector su(n_S) (x) su(n_A). (A-b): L contains 1 (x) sigma for every
/// sigma in su(n_A).
pub fn check_assumptions(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    tol: &Tolerance,
) -> Result<(bool, bool)> {
    check_split(l, split)?;
    let one_s = identity(split.n_s);
    let ab = su_basis(split.n_a)
        .iter()
        .map(|sigma| l.basis.contains_mat(&tensor(&one_s, sigma), tol))
        .all(|x| x);

    // Interaction sector on the skew side: i (S (x) sigma) with S, sigma
    // traceless (i F carries one factor of i relative to the Hermitian
    // Hamiltonian statement of A-a).
    let sector: Vec<OpMat> = su_basis(split.n_s)
        .iter()
        .flat_map(|s| {
            su_basis(split.n_a)
                .iter()
                .map(|a| tensor(s, a) * C64::new(0.0, 1.0))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut aa = false;
    'elements: for m in l.basis.elements() {
        for b in &sector {
            if crate::op::hs_inner(b, m)?.abs() > tol.rank_tol {
                aa = true;
                break 'elements;
            }
        }
    }
    Ok((aa, ab))
}

/// K = { K in su(n_S) | K (x) 1 in span L }, via the subspace intersection
/// span(L) with su(n_S) (x) 1 pulled back through K -> K (x) 1.
pub fn compute_k(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    tol: &Tolerance,
) -> Result<SubspaceBasis> {
    check_split(l, split)?;
    let one_a = identity(split.n_a);
    let scale = C64::new(1.0 / (split.n_a as f64).sqrt(), 0.0);
    let w_mats: Vec<OpMat> = su_basis(split.n_s)
        .iter()
        .map(|b| tensor(b, &one_a) * scale)
        .collect();
    let w = SubspaceBasis::from_spanning(split.n_sa(), w_mats.iter(), tol)?;
    let inter = l.basis.intersect(&w, tol)?;
    let pulled: Vec<OpMat> = inter
        .elements()
        .iter()
        .map(|m| partial_trace_a(m, split).map(|k| k / C64::new(split.n_a as f64, 0.0)))
        .collect::<Result<_>>()?;
    SubspaceBasis::from_spanning(split.n_s, pulled.iter(), tol)
}

/// Per-sigma spaces P_j = { P | iP (x) sigma_j in span L } for an
/// orthonormal basis of su(n_A). Under A-b the Simplicity Lemma forces
/// all of them to coincide; computing the full family is a built-in
/// self-check of that consistency.
pub fn compute_p_per_sigma(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    tol: &Tolerance,
) -> Result<Vec<SubspaceBasis>> {
    check_split(l, split)?;
    let herm = hermitian_basis(split.n_s);
    let mut out = Vec::new();
    for sigma in su_basis(split.n_a) {
        let w_mats: Vec<OpMat> = herm.iter().map(|h| tensor(h, &sigma)).collect();
        let w = SubspaceBasis::from_spanning(split.n_sa(), w_mats.iter(), tol)?;
        let inter = l.basis.intersect(&w, tol)?;
        let pulled: Vec<OpMat> = inter
            .elements()
            .iter()
            .map(|m| contract_a(m, &sigma, split).map(|ip| ip * C64::new(0.0, -1.0)))
            .collect::<Result<_>>()?;
        out.push(SubspaceBasis::from_spanning(split.n_s, pulled.iter(), tol)?);
    }
    Ok(out)
}

/// The common space P (living in u(n_S), possibly containing i1).
/// Errors when the per-sigma spaces disagree beyond rank_tol.
pub fn compute_p(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    tol: &Tolerance,
) -> Result<SubspaceBasis> {
    let per = compute_p_per_sigma(l, split, tol)?;
    common_p(per, tol)
}

fn common_p(per: Vec<SubspaceBasis>, tol: &Tolerance) -> Result<SubspaceBasis> {
    let first = per
        .first()
        .ok_or_else(|| Error::InvalidInput("n_A < 2 leaves su(n_A) empty".into()))?;
    for (j, pj) in per.iter().enumerate().skip(1) {
        if !pj.same_span(first, tol) {
            return Err(Error::SimplicityMismatch(format!(
                "P_0 has dim {}, P_{} has dim {} or spans differ",
                first.dim(),
                j,
                pj.dim()
            )));
        }
    }
    Ok(per.into_iter().next().unwrap())
}

/// Assembles K, P, L_S = K + P with the assumption flags, the dimension
/// bookkeeping dim L = dim K + dim P (n_A^2 - 1), and dim(K cap P).
pub fn structure_report(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    tol: &Tolerance,
) -> Result<StructureReport> {
    let (aa, ab) = check_assumptions(l, split, tol)?;
    let k = compute_k(l, split, tol)?;
    let p_per_sigma = compute_p_per_sigma(l, split, tol)?;
    let p = if ab {
        common_p(p_per_sigma.clone(), tol).ok()
    } else {
        None
    };
    let (l_s, decomposition_consistent, k_cap_p_dim) = match &p {
        Some(p) => {
            let l_s = k.union(p, tol)?;
            let consistent = l.dim() == k.dim() + p.dim() * (split.n_a * split.n_a - 1);
            let cap = k.intersect(p, tol)?.dim();
            (Some(l_s), consistent, cap)
        }
        None => (None, false, 0),
    };
    Ok(StructureReport {
        k,
        p_per_sigma,
        p,
        l_s,
        assumption_aa: aa,
        assumption_ab: ab,
        decomposition_consistent,
        k_cap_p_dim,
    })
}
