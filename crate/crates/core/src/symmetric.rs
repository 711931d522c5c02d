//! Deeper structure of P and L_S: maximal abelian subalgebras and their
//! projection bases, the block graph, normal vector spaces with DUCT
//! canonicalization, validated Cartan pairs, and the Killing form.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cluster_patterns, nullspace, simultaneous_diagonalize, vectorize};
use crate::op::{
    commutator, hs_norm, identity, su_basis, trace, unitarity_residual, zeros, OpMat,
};
use crate::span::SubspaceBasis;
use crate::tol::{Tolerance, EIG_CLUSTER_TOL};

/// Grouped-diagonal coordinates for an abelian projection family:
/// `transform` is the unitary T such that T x T^dag is block-grouped for
/// every x in the input span, with block sizes `sizes`.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub sizes: Vec<usize>,
    pub transform: OpMat,
}

impl BlockPartition {
    pub fn node_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let mut acc = 0;
        for &s in &self.sizes {
            out.push(acc);
            acc += s;
        }
        out
    }

    /// (j,k) block of T m T^dag.
    pub fn block(&self, m: &OpMat, j: usize, k: usize) -> OpMat {
        let t = &self.transform;
        let g = t * m * t.adjoint();
        let off = self.offsets();
        let mut out = OpMat::zeros(self.sizes[j], self.sizes[k]);
        for r in 0..self.sizes[j] {
            for c in 0..self.sizes[k] {
                out[(r, c)] = g[(off[j] + r, off[k] + c)];
            }
        }
        out
    }

    /// i Pi_j pulled back to the original coordinates.
    pub fn projection(&self, j: usize) -> OpMat {
        let n: usize = self.sizes.iter().sum();
        let off = self.offsets();
        let mut pi = zeros(n);
        for r in 0..self.sizes[j] {
            pi[(off[j] + r, off[j] + r)] = C64::new(0.0, 1.0);
        }
        self.transform.adjoint() * pi * &self.transform
    }
}

#[derive(Clone, Debug)]
pub struct BlockGraph {
    pub node_count: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub components: Vec<Vec<usize>>,
}

impl BlockGraph {
    pub fn connected(&self) -> bool {
        self.components.len() <= 1
    }
}

/// Real-linear span of matrices satisfying A^dag B + B^dag A = alpha 1.
#[derive(Clone, Debug)]
pub struct NormalSpace {
    pub block_dim: usize,
    pub basis: Vec<OpMat>,
    pub canonical_case: Option<CanonicalCase>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalCase {
    Zero,
    IdentityOnly,
    IdentitySignature { r: usize, s: usize },
    Quaternionic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalLieClass {
    Zero,
    IdentityOnly,
    IdentitySignature { r: usize, s: usize },
    Quaternionic,
    NotLieAlgebra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvolutionType {
    /// K real antisymmetric, P purely imaginary: su(n) = Re + Im.
    Ai,
    /// First row/column against the rest: block-diagonal K, antidiagonal P.
    Aiii,
    /// The composed split L_2 = (Re&Di)+(Im&An), L_1 = (Re&An)+(Im&Di).
    Composed,
    NumericOnly,
}

/// Validated symmetric pair (K, P~) of su(n) with a certified maximal
/// abelian torus inside P~.
#[derive(Clone, Debug)]
pub struct CartanPair {
    pub k_part: SubspaceBasis,
    pub p_part: SubspaceBasis,
    pub torus: SubspaceBasis,
    pub involution_type: InvolutionType,
}

fn random_element(space: &SubspaceBasis, rng: &mut ChaCha8Rng) -> OpMat {
    let n = space.ambient_dim();
    let mut acc = zeros(n);
    for b in space.elements() {
        acc += b * C64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0);
    }
    acc
}

/// Subspace of `space` commuting with every constraint matrix.
fn commutant_within(
    space: &SubspaceBasis,
    constraints: &[OpMat],
    tol: &Tolerance,
) -> Result<SubspaceBasis> {
    if space.is_empty() || constraints.is_empty() {
        return Ok(space.clone());
    }
    let n = space.ambient_dim();
    let d = space.dim();
    let len = 2 * n * n;
    let mut m = DMatrix::<f64>::zeros(len * constraints.len(), d);
    for (j, c) in constraints.iter().enumerate() {
        for (i, b) in space.elements().iter().enumerate() {
            let col = vectorize(&commutator(b, c)?);
            m.view_mut((j * len, i), (len, 1)).copy_from(&col);
        }
    }
    let null = nullspace(&m, tol.rank_tol);
    let mats: Vec<OpMat> = null
        .iter()
        .map(|coords| {
            let mut acc = zeros(n);
            for (i, b) in space.elements().iter().enumerate() {
                acc += b * C64::new(coords[i], 0.0);
            }
            acc
        })
        .collect();
    SubspaceBasis::from_spanning(n, mats.iter(), tol)
}

/// True iff `a` is abelian, contained in `p`, and its commutant inside
/// `p` equals itself (the maximality certificate).
pub fn is_maximal_abelian_in(p: &SubspaceBasis, a: &SubspaceBasis, tol: &Tolerance) -> bool {
    let abelian = a.elements().iter().enumerate().all(|(i, x)| {
        a.elements()[..i]
            .iter()
            .all(|y| hs_norm(&commutator(x, y).expect("dims")) <= 1e3 * tol.residual_tol)
    });
    if !abelian || !p.contains_subspace(a, tol) {
        return false;
    }
    match commutant_within(p, a.elements(), tol) {
        Ok(c) => c.same_span(a, tol),
        Err(_) => false,
    }
}

/// Greedy maximal abelian subalgebra inside span P with seeded random
/// restarts; the identity direction is always included when present.
/// Any certified-maximal result is as good as any other (they are
/// conjugate under e^K), so the largest one found wins.
pub fn maximal_abelian_in_p(p: &SubspaceBasis, tol: &Tolerance, seed: u64) -> SubspaceBasis {
    let n = p.ambient_dim();
    if p.is_empty() {
        return SubspaceBasis::empty(n);
    }
    let i1 = identity(n) * C64::new(0.0, 1.0);
    let has_identity = p.contains_mat(&i1, tol);
    let mut best: Option<SubspaceBasis> = None;
    for restart in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart));
        let mut current = SubspaceBasis::empty(n);
        if has_identity {
            current.admit(&i1, tol);
        }
        current.admit(&random_element(p, &mut rng), tol);
        loop {
            let comm = match commutant_within(p, current.elements(), tol) {
                Ok(c) => c,
                Err(_) => break,
            };
            let mut grew = false;
            for e in comm.elements() {
                if !current.contains_mat(e, tol) && current.admit(e, tol) {
                    grew = true;
                    break;
                }
            }
            if !grew {
                break;
            }
        }
        let better = best.as_ref().map_or(true, |b| current.dim() > b.dim());
        if better && is_maximal_abelian_in(p, &current, tol) {
            best = Some(current);
        }
    }
    best.unwrap_or_else(|| SubspaceBasis::empty(n))
}

/// Simultaneous diagonalization of an abelian family containing i1 into
/// grouped orthogonal projections i Pi_1 .. i Pi_l (the constructive
/// content of the Vandermonde lemma, with products of projections
/// replaced by eigenvalue-pattern refinement).
pub fn projection_basis(a: &SubspaceBasis, tol: &Tolerance, seed: u64) -> Result<BlockPartition> {
    let n = a.ambient_dim();
    if a.is_empty() {
        return Err(Error::InvalidInput("empty abelian space".into()));
    }
    for (i, x) in a.elements().iter().enumerate() {
        for y in &a.elements()[..i] {
            let r = hs_norm(&commutator(x, y)?);
            if r > 1e3 * tol.residual_tol {
                return Err(Error::NotAbelian { residual: r });
            }
        }
    }
    let i1 = identity(n) * C64::new(0.0, 1.0);
    if !a.contains_mat(&i1, tol) {
        return Err(Error::InvalidInput(
            "abelian space does not contain i1".into(),
        ));
    }
    let herms: Vec<OpMat> = a
        .elements()
        .iter()
        .map(|m| m * C64::new(0.0, 1.0))
        .collect();
    let (v, patterns) = simultaneous_diagonalize(&herms, n, seed, tol)?;
    let groups = cluster_patterns(&patterns, EIG_CLUSTER_TOL);

    // Order blocks by dominant original coordinate so that inputs already
    // in grouped form keep the identity permutation.
    let dominant: Vec<usize> = (0..n)
        .map(|t| {
            (0..n)
                .max_by(|&r1, &r2| v[(r1, t)].norm().total_cmp(&v[(r2, t)].norm()))
                .unwrap()
        })
        .collect();
    let mut ordered_groups = groups;
    for g in ordered_groups.iter_mut() {
        g.sort_by_key(|&t| (dominant[t], t));
    }
    ordered_groups.sort_by_key(|g| (dominant[g[0]], g[0]));

    if ordered_groups.len() != a.dim() {
        return Err(Error::ProjectionSpanMismatch {
            span_dim: a.dim(),
            block_count: ordered_groups.len(),
        });
    }

    let mut v_perm = zeros(n);
    let mut col = 0;
    let mut sizes = Vec::with_capacity(ordered_groups.len());
    for g in &ordered_groups {
        sizes.push(g.len());
        for &t in g {
            v_perm.set_column(col, &v.column(t));
            col += 1;
        }
    }
    let partition = BlockPartition {
        sizes,
        transform: v_perm.adjoint(),
    };

    // Contract check: span A must equal span{i Pi_j}.
    for j in 0..partition.node_count() {
        let pi = partition.projection(j);
        if !a.contains_mat(&pi, tol) {
            return Err(Error::ProjectionSpanMismatch {
                span_dim: a.dim(),
                block_count: partition.node_count(),
            });
        }
    }
    Ok(partition)
}

/// Edge (j,k) iff some element of P has a nonzero (j,k) block in
/// partition coordinates; components by breadth-first search.
pub fn build_block_graph(
    p: &SubspaceBasis,
    partition: &BlockPartition,
    tol: &Tolerance,
) -> Result<BlockGraph> {
    let l = partition.node_count();
    let mut edges = BTreeSet::new();
    for m in p.elements() {
        for j in 0..l {
            for k in (j + 1)..l {
                if edges.contains(&(j, k)) {
                    continue;
                }
                if hs_norm(&partition.block(m, j, k)) > tol.rank_tol {
                    edges.insert((j, k));
                }
            }
        }
    }
    let mut seen = vec![false; l];
    let mut components = Vec::new();
    for start in 0..l {
        if seen[start] {
            continue;
        }
        let mut queue = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(node) = queue.pop() {
            comp.push(node);
            for &(a, b) in &edges {
                let other = if a == node {
                    b
                } else if b == node {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    queue.push(other);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    Ok(BlockGraph {
        node_count: l,
        edges,
        components,
    })
}

/// For a connected graph the structure lemma forces equal block sizes;
/// `None` when the graph is disconnected (not applicable), `Some(false)`
/// signals numerical failure upstream.
pub fn check_equal_blocks(partition: &BlockPartition, graph: &BlockGraph) -> Option<bool> {
    if !graph.connected() {
        return None;
    }
    Some(partition.sizes.windows(2).all(|w| w[0] == w[1]))
}

fn relat_residual(a: &OpMat, b: &OpMat) -> f64 {
    let n = a.nrows();
    let m1 = a.adjoint() * b + b.adjoint() * a;
    let m2 = b * a.adjoint() + a * b.adjoint();
    let alpha = trace(&m1).re / n as f64;
    let alpha_im = trace(&m1).im.abs() / n as f64;
    let eye = identity(n) * C64::new(alpha, 0.0);
    hs_norm(&(&m1 - &eye)).max(hs_norm(&(&m2 - eye))).max(alpha_im)
}

fn validate_relat(basis: &[OpMat], tol: &Tolerance) -> Result<()> {
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[..=i] {
            let r = relat_residual(a, b);
            if r > 1e3 * tol.residual_tol {
                return Err(Error::RelatViolation { residual: r });
            }
        }
    }
    Ok(())
}

/// The real span of (j,k) blocks of P in partition coordinates,
/// validated against the normalization relation.
pub fn extract_normal_space(
    p: &SubspaceBasis,
    partition: &BlockPartition,
    j: usize,
    k: usize,
    tol: &Tolerance,
) -> Result<NormalSpace> {
    if j >= partition.node_count() || k >= partition.node_count() || j == k {
        return Err(Error::InvalidInput("block indices out of range".into()));
    }
    if partition.sizes[j] != partition.sizes[k] {
        return Err(Error::RankAnomaly(format!(
            "blocks {j} and {k} have different sizes {} vs {}",
            partition.sizes[j], partition.sizes[k]
        )));
    }
    let n0 = partition.sizes[j];
    let blocks: Vec<OpMat> = p
        .elements()
        .iter()
        .map(|m| partition.block(m, j, k))
        .collect();
    let ortho = SubspaceBasis::from_spanning(n0, blocks.iter(), tol)?;
    let basis: Vec<OpMat> = ortho.elements().to_vec();
    validate_relat(&basis, tol)?;
    Ok(NormalSpace {
        block_dim: n0,
        basis,
        canonical_case: None,
    })
}

fn span_of(ns: &[OpMat], n: usize, tol: &Tolerance) -> Result<SubspaceBasis> {
    SubspaceBasis::from_spanning(n, ns.iter(), tol)
}

/// Recursive canonical form of a normal vector space, modulo a doubly
/// unitary conjugacy transformation A -> U A V. Returns the canonical
/// space together with (U, V) mapping the input span onto the canonical
/// span; the inverse pair (U^dag, V^dag) recovers the input.
pub fn duct_canonicalize(ns: &NormalSpace, tol: &Tolerance) -> Result<(NormalSpace, OpMat, OpMat)> {
    let n = ns.block_dim;
    let ortho = span_of(&ns.basis, n, tol)?;
    let mut working: Vec<OpMat> = ortho.elements().to_vec();
    let mut u = identity(n);
    let mut v = identity(n);
    if working.is_empty() {
        return Ok((
            NormalSpace {
                block_dim: n,
                basis: Vec::new(),
                canonical_case: Some(CanonicalCase::Zero),
            },
            u,
            v,
        ));
    }
    validate_relat(&working, tol)?;

    // Normalize the first element to the identity by a right multiplication.
    let a = working[0].clone();
    let alpha = hs_norm(&a).powi(2) / n as f64;
    let ahat = &a / C64::new(alpha.sqrt(), 0.0);
    if unitarity_residual(&ahat) > 1e3 * tol.residual_tol {
        return Err(Error::RelatViolation {
            residual: unitarity_residual(&ahat),
        });
    }
    let w = ahat.adjoint();
    for m in working.iter_mut() {
        *m = &*m * &w;
    }
    v = v * &w;

    // The span now contains 1; everything orthogonal to it is skew.
    let one_dir = identity(n) / C64::new((n as f64).sqrt(), 0.0);
    let mut skews: Vec<OpMat> = Vec::new();
    {
        let mut sp = SubspaceBasis::empty(n);
        sp.admit(&identity(n), tol);
        for m in &working {
            let resid = sp.project_out(m);
            if hs_norm(&resid) <= tol.rank_tol {
                continue;
            }
            let herm = (&resid + resid.adjoint()) * C64::new(0.5, 0.0);
            if hs_norm(&herm) > 1e3 * tol.residual_tol {
                return Err(Error::RelatViolation {
                    residual: hs_norm(&herm),
                });
            }
            let skew = (&resid - resid.adjoint()) * C64::new(0.5, 0.0);
            if sp.admit(&skew, tol) {
                skews.push(sp.elements().last().unwrap().clone());
            }
        }
        let _ = one_dir;
    }
    if skews.len() + 1 != working.len() {
        return Err(Error::RankAnomaly(format!(
            "rank loss while splitting off the identity: 1 + {} != {}",
            skews.len(),
            working.len()
        )));
    }

    if skews.is_empty() {
        return Ok((
            NormalSpace {
                block_dim: n,
                basis: vec![identity(n)],
                canonical_case: Some(CanonicalCase::IdentityOnly),
            },
            u,
            v,
        ));
    }

    // Diagonalize one skew element to i 1_{r,s}, normalizing r >= s.
    let mut b = skews[0].clone();
    let ib = &b * C64::new(0.0, 1.0);
    let (vals, _) = crate::op::hermitian_eigen(&ib);
    let negatives = vals.iter().filter(|&&x| x < 0.0).count();
    if negatives < n - negatives {
        b = -b;
    }
    let ib = &b * C64::new(0.0, 1.0);
    let (vals, vecs) = crate::op::hermitian_eigen(&ib);
    let scale = hs_norm(&b) / (n as f64).sqrt();
    for &mu in &vals {
        if (mu.abs() - scale).abs() > EIG_CLUSTER_TOL.max(1e3 * tol.residual_tol * scale) {
            return Err(Error::RankAnomaly(format!(
                "skew element eigenvalue {mu} deviates from +-{scale}"
            )));
        }
    }
    // ascending eigenvalues of iB: -scale block first, which is the +i
    // block of B itself.
    let r = vals.iter().filter(|&&x| x < 0.0).count();
    let s = n - r;
    let w = vecs.adjoint();
    for m in working.iter_mut() {
        *m = &w * &*m * w.adjoint();
    }
    for m in skews.iter_mut() {
        *m = &w * &*m * w.adjoint();
    }
    u = &w * u;
    v = v * w.adjoint();

    let sig = signature_matrix(n, r);
    if skews.len() == 1 {
        return Ok((
            NormalSpace {
                block_dim: n,
                basis: vec![identity(n), sig],
                canonical_case: Some(CanonicalCase::IdentitySignature { r, s }),
            },
            u,
            v,
        ));
    }

    // Dimension >= 3: all remaining skew directions are pure off-diagonal
    // blocks, forcing r = s, and the blocks span a child normal space.
    if r != s {
        return Err(Error::RankAnomaly(format!(
            "normal space of dimension >= 3 with unequal signature ({r},{s})"
        )));
    }
    let m_half = r;
    let mut sp = SubspaceBasis::empty(n);
    sp.admit(&identity(n), tol);
    sp.admit(&sig, tol);
    let mut child_blocks = Vec::new();
    for m in &skews {
        let resid = sp.project_out(m);
        if hs_norm(&resid) <= tol.rank_tol {
            continue;
        }
        let mut diag_norm = 0.0_f64;
        let mut c12 = OpMat::zeros(m_half, m_half);
        for row in 0..n {
            for col in 0..n {
                let in_upper = row < m_half && col >= m_half;
                let in_lower = row >= m_half && col < m_half;
                if in_upper {
                    c12[(row, col - m_half)] = resid[(row, col)];
                } else if !in_lower {
                    diag_norm += resid[(row, col)].norm_sqr();
                }
            }
        }
        if diag_norm.sqrt() > 1e3 * tol.residual_tol {
            return Err(Error::RelatViolation {
                residual: diag_norm.sqrt(),
            });
        }
        child_blocks.push(c12);
    }
    let child_in = NormalSpace {
        block_dim: m_half,
        basis: child_blocks,
        canonical_case: None,
    };
    let (child, cu, cv) = duct_canonicalize(&child_in, tol)?;

    // A DUCT on the child space embeds as a single unitary conjugation
    // diag(U, V^dag) upstairs, fixing 1 and i 1_{m,m}.
    let mut embed_w = zeros(n);
    for rr in 0..m_half {
        for cc in 0..m_half {
            embed_w[(rr, cc)] = cu[(rr, cc)];
            embed_w[(m_half + rr, m_half + cc)] = cv[(cc, rr)].conj();
        }
    }
    for m in working.iter_mut() {
        *m = &embed_w * &*m * embed_w.adjoint();
    }
    u = &embed_w * u;
    v = v * embed_w.adjoint();

    let mut canon = vec![identity(n), sig.clone()];
    for cb in &child.basis {
        canon.push(embed_offdiag(cb, m_half));
    }
    let case = match (canon.len(), child.canonical_case) {
        (4, Some(CanonicalCase::IdentitySignature { s: 0, .. })) => {
            Some(CanonicalCase::Quaternionic)
        }
        _ => None,
    };
    Ok((
        NormalSpace {
            block_dim: n,
            basis: canon,
            canonical_case: case,
        },
        u,
        v,
    ))
}

fn signature_matrix(n: usize, r: usize) -> OpMat {
    let mut sig = zeros(n);
    for j in 0..n {
        sig[(j, j)] = if j < r {
            C64::new(0.0, 1.0)
        } else {
            C64::new(0.0, -1.0)
        };
    }
    sig
}

fn embed_offdiag(m: &OpMat, half: usize) -> OpMat {
    let n = 2 * half;
    let mut out = zeros(n);
    for r in 0..half {
        for c in 0..half {
            out[(r, half + c)] = m[(r, c)];
            out[(half + r, c)] = -m[(c, r)].conj();
        }
    }
    out
}

/// Matrix-commutator closure test of a canonical normal space against the
/// four admissible Lie algebra cases.
pub fn classify_normal_lie(ns: &NormalSpace, tol: &Tolerance) -> Result<NormalLieClass> {
    let n = ns.block_dim;
    let span = span_of(&ns.basis, n, tol)?;
    for a in ns.basis.iter() {
        for b in ns.basis.iter() {
            let c = commutator(a, b)?;
            let norm = hs_norm(&c);
            if norm > tol.rank_tol && span.distance(&c) > 1e3 * tol.rank_tol * norm {
                return Ok(NormalLieClass::NotLieAlgebra);
            }
        }
    }
    let dim = span.dim();
    match dim {
        0 => Ok(NormalLieClass::Zero),
        1 => {
            if span.contains_mat(&identity(n), tol) {
                Ok(NormalLieClass::IdentityOnly)
            } else {
                Ok(NormalLieClass::NotLieAlgebra)
            }
        }
        2 => {
            // {1, i 1_{r,s}}: read the signature off the skew direction.
            if !span.contains_mat(&identity(n), tol) {
                return Ok(NormalLieClass::NotLieAlgebra);
            }
            let mut probe = SubspaceBasis::empty(n);
            probe.admit(&identity(n), tol);
            let skew = ns
                .basis
                .iter()
                .map(|m| probe.project_out(m))
                .find(|m| hs_norm(m) > tol.rank_tol)
                .ok_or_else(|| Error::RankAnomaly("2-dim span without skew part".into()))?;
            let ib = &skew * C64::new(0.0, 1.0);
            let (vals, _) = crate::op::hermitian_eigen(&ib);
            let r = vals.iter().filter(|&&x| x < 0.0).count();
            Ok(NormalLieClass::IdentitySignature { r, s: n - r })
        }
        4 => {
            let half = n / 2;
            if n % 2 != 0 {
                return Ok(NormalLieClass::NotLieAlgebra);
            }
            let want = [
                identity(n),
                signature_matrix(n, half),
                embed_offdiag(&identity(half), half),
                embed_offdiag(&(identity(half) * C64::new(0.0, 1.0)), half),
            ];
            if want.iter().all(|m| span.contains_mat(m, tol)) {
                Ok(NormalLieClass::Quaternionic)
            } else {
                Ok(NormalLieClass::NotLieAlgebra)
            }
        }
        _ => Ok(NormalLieClass::NotLieAlgebra),
    }
}

fn max_abs_im(m: &OpMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

fn max_abs_re(m: &OpMat) -> f64 {
    m.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
}

fn offdiag_norm_1_rest(m: &OpMat, f: impl Fn(&C64) -> f64) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            let antidiag = (r == 0) != (c == 0);
            if antidiag {
                acc += f(&m[(r, c)]).powi(2);
            }
        }
    }
    acc.sqrt()
}

fn blockdiag_norm_1_rest(m: &OpMat, f: impl Fn(&C64) -> f64) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            let antidiag = (r == 0) != (c == 0);
            if !antidiag {
                acc += f(&m[(r, c)]).powi(2);
            }
        }
    }
    acc.sqrt()
}

fn detect_involution_type(k: &SubspaceBasis, p: &SubspaceBasis, tol: &Tolerance) -> InvolutionType {
    let eps = 1e3 * tol.residual_tol;
    let ai = k.elements().iter().all(|m| max_abs_im(m) <= eps)
        && p.elements().iter().all(|m| max_abs_re(m) <= eps);
    if ai {
        return InvolutionType::Ai;
    }
    let aiii = k
        .elements()
        .iter()
        .all(|m| offdiag_norm_1_rest(m, |z| z.norm()) <= eps)
        && p.elements()
            .iter()
            .all(|m| blockdiag_norm_1_rest(m, |z| z.norm()) <= eps);
    if aiii {
        return InvolutionType::Aiii;
    }
    // L_2 = (Re & Di) + (Im & An): real part block-diagonal, imaginary
    // part antidiagonal; L_1 the other way around.
    let composed = k.elements().iter().all(|m| {
        offdiag_norm_1_rest(m, |z| z.re.abs()) <= eps
            && blockdiag_norm_1_rest(m, |z| z.im.abs()) <= eps
    }) && p.elements().iter().all(|m| {
        blockdiag_norm_1_rest(m, |z| z.re.abs()) <= eps
            && offdiag_norm_1_rest(m, |z| z.im.abs()) <= eps
    });
    if composed {
        return InvolutionType::Composed;
    }
    InvolutionType::NumericOnly
}

/// Checks K & P~ = {0}, the symmetric-space relations, completeness
/// K + P~ = su(n), and computes a certified maximal torus in P~.
pub fn validate_cartan_pair(
    k: &SubspaceBasis,
    p_tilde: &SubspaceBasis,
    tol: &Tolerance,
    seed: u64,
) -> Result<CartanPair> {
    let n = k.ambient_dim();
    if p_tilde.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p_tilde.ambient_dim(),
        });
    }
    for m in k.elements().iter().chain(p_tilde.elements()) {
        if trace(m).norm() > tol.rank_tol * (n as f64).sqrt() {
            return Err(Error::InvalidCartanPair("element with nonzero trace".into()));
        }
    }
    if k.intersect(p_tilde, tol)?.dim() != 0 {
        return Err(Error::InvalidCartanPair(
            "K and P intersect nontrivially".into(),
        ));
    }
    let check_rel = |target: &SubspaceBasis, xs: &SubspaceBasis, ys: &SubspaceBasis| -> Result<()> {
        for x in xs.elements() {
            for y in ys.elements() {
                let c = commutator(x, y)?;
                let norm = hs_norm(&c);
                if norm > tol.rank_tol && target.distance(&c) > tol.rank_tol * norm {
                    return Err(Error::InvalidCartanPair(
                        "symmetric-space commutation relations violated".into(),
                    ));
                }
            }
        }
        Ok(())
    };
    check_rel(k, k, k)?;
    check_rel(p_tilde, k, p_tilde)?;
    check_rel(k, p_tilde, p_tilde)?;
    let full = n * n - 1;
    if k.dim() + p_tilde.dim() != full || k.union(p_tilde, tol)?.dim() != full {
        return Err(Error::InvalidCartanPair(format!(
            "K + P has dimension {} + {} != dim su({n}) = {full}",
            k.dim(),
            p_tilde.dim()
        )));
    }

    let involution_type = detect_involution_type(k, p_tilde, tol);

    // Canonical torus for the recognized types, greedy search otherwise;
    // every maximal choice is equivalent for KAK.
    let torus = match involution_type {
        InvolutionType::Ai => {
            // i * (real diagonal traceless) lies in Im, hence in P~; the
            // diagonal su_basis elements are exactly that torus.
            let diag: Vec<OpMat> = su_basis(n)
                .into_iter()
                .filter(|b| (0..n).all(|r| (0..n).all(|c| r == c || b[(r, c)].norm() < 1e-15)))
                .collect();
            let cand = SubspaceBasis::from_spanning(n, diag.iter(), tol)?;
            if p_tilde.contains_subspace(&cand, tol) {
                cand
            } else {
                maximal_abelian_in_p(p_tilde, tol, seed)
            }
        }
        InvolutionType::Aiii => {
            let mut g = zeros(n);
            g[(0, 1)] = C64::new(1.0, 0.0);
            g[(1, 0)] = C64::new(-1.0, 0.0);
            let cand = SubspaceBasis::from_spanning(n, [&g].into_iter(), tol)?;
            if p_tilde.contains_subspace(&cand, tol) {
                cand
            } else {
                maximal_abelian_in_p(p_tilde, tol, seed)
            }
        }
        _ => maximal_abelian_in_p(p_tilde, tol, seed),
    };
    if !is_maximal_abelian_in(p_tilde, &torus, tol) {
        return Err(Error::InvalidCartanPair(
            "failed to certify a maximal abelian torus in P".into(),
        ));
    }
    Ok(CartanPair {
        k_part: k.clone(),
        p_part: p_tilde.clone(),
        torus,
        involution_type,
    })
}

/// Killing form <A,B> = Tr(ad_A ad_B) computed in the given orthonormal
/// basis of L_S; the value depends only on the algebra and the pair.
pub fn killing_form(l_s: &SubspaceBasis, a: &OpMat, b: &OpMat, tol: &Tolerance) -> Result<f64> {
    for m in [a, b] {
        let norm = hs_norm(m);
        if norm > tol.rank_tol && l_s.distance(m) > tol.rank_tol * norm {
            return Err(Error::InvalidInput(
                "argument lies outside span(L_S)".into(),
            ));
        }
    }
    let ad = |x: &OpMat| -> Result<DMatrix<f64>> {
        let d = l_s.dim();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for (j, bj) in l_s.elements().iter().enumerate() {
            let col = l_s.coefficients(&commutator(x, bj)?);
            for i in 0..d {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    };
    let ada = ad(a)?;
    let adb = ad(b)?;
    Ok((ada * adb).trace())
}

/// Gram matrix of the Killing form on the basis of L_S.
pub fn killing_gram(l_s: &SubspaceBasis, tol: &Tolerance) -> Result<DMatrix<f64>> {
    let d = l_s.dim();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = killing_form(l_s, l_s.element(i), l_s.element(j), tol)?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}
