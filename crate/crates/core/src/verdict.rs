//! Indirect-controllability decision: complete controllability wins for
//! any ancilla state; a three-or-higher-dimensional ancilla admits
//! nothing less; a qubit ancilla steers S exactly when L_S = u(n_S) and
//! the ancilla starts pure. The ad-orbit trace test provides an
//! independent necessary-condition falsifier.

use num_complex::Complex64 as C64;

use crate::closure::{identify_full, DynamicalAlgebra, FullAlgebraClass};
use crate::error::{Error, Result};
use crate::op::{
    hermitian_eigen, hermiticity_residual, hs_norm, identity, partial_trace_a, trace,
    BipartiteSplit, OpMat,
};
use crate::span::SubspaceBasis;
use crate::structure::StructureReport;
use crate::tol::Tolerance;

/// Validated density matrix with its purity tr(rho^2).
#[derive(Clone, Debug)]
pub struct DensityState {
    mat: OpMat,
    purity: f64,
}

impl DensityState {
    pub fn new(mat: OpMat, tol: &Tolerance) -> Result<Self> {
        crate::op::check_square(&mat)?;
        let herm = hermiticity_residual(&mat);
        if herm > tol.residual_tol * hs_norm(&mat).max(1.0) {
            return Err(Error::NotDensity(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = trace(&mat);
        if (tr - C64::new(1.0, 0.0)).norm() > 1e3 * tol.residual_tol {
            return Err(Error::NotDensity(format!("trace {tr} != 1")));
        }
        let (vals, _) = hermitian_eigen(&mat);
        if let Some(min) = vals.first() {
            if *min < -1e3 * tol.residual_tol {
                return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        let purity = trace(&(&mat * &mat)).re;
        Ok(Self { mat, purity })
    }

    pub fn matrix(&self) -> &OpMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// Pure within residual_tol; near-pure states count as pure and the
    /// verdict records the deficit so callers can judge.
    pub fn is_pure(&self, tol: &Tolerance) -> bool {
        (self.purity - 1.0).abs() <= 1e3 * tol.residual_tol
    }

    pub fn purity_deficit(&self) -> f64 {
        (1.0 - self.purity).max(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictResult {
    IndirectlyControllableComplete,
    IndirectlyControllablePureAncilla,
    NotIndirectlyControllable,
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionBranch {
    /// L is su(n_SA) or u(n_SA): complete controllability.
    FullAlgebra,
    /// Assumption A-b failed; the theorems do not apply.
    AssumptionAbFailed,
    /// n_A >= 3 with a proper algebra.
    LargeAncillaProper,
    /// n_A = 2, L_S = u(n_S), ancilla pure.
    QubitAncillaSatisfied,
    /// n_A = 2 but dim L_S < n_S^2.
    QubitAncillaLsDeficient,
    /// n_A = 2, L_S = u(n_S), ancilla mixed.
    QubitAncillaMixed,
}

#[derive(Clone, Debug)]
pub struct VerdictWitnesses {
    pub n_s: usize,
    pub n_a: usize,
    pub dim_l: usize,
    pub dim_k: usize,
    pub dim_p: Option<usize>,
    pub dim_ls: Option<usize>,
    pub rho_a_purity: f64,
    pub purity_deficit: f64,
    pub assumption_aa: bool,
    pub assumption_ab: bool,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub result: VerdictResult,
    pub branch: DecisionBranch,
    pub witnesses: VerdictWitnesses,
    pub necessary_check: Option<NecessaryReport>,
}

/// Applies the two theorems in branch order: full algebra, then the
/// ancilla-dimension split, then the qubit-ancilla pure-state condition.
/// The L_S = u(n_S) identity is decided by a dimension test at rank_tol;
/// this is the single point where floating-point rank stands in for an
/// algebraic statement.
pub fn decide(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    rho_a: &DensityState,
    report: &StructureReport,
    tol: &Tolerance,
) -> Result<Verdict> {
    if l.ambient_dim() != split.n_sa() {
        return Err(Error::DimensionMismatch {
            expected: split.n_sa(),
            got: l.ambient_dim(),
        });
    }
    if rho_a.dim() != split.n_a {
        return Err(Error::DimensionMismatch {
            expected: split.n_a,
            got: rho_a.dim(),
        });
    }
    let witnesses = VerdictWitnesses {
        n_s: split.n_s,
        n_a: split.n_a,
        dim_l: l.dim(),
        dim_k: report.k.dim(),
        dim_p: report.p.as_ref().map(|p| p.dim()),
        dim_ls: report.l_s.as_ref().map(|ls| ls.dim()),
        rho_a_purity: rho_a.purity(),
        purity_deficit: rho_a.purity_deficit(),
        assumption_aa: report.assumption_aa,
        assumption_ab: report.assumption_ab,
    };
    let full = identify_full(l, split.n_sa());
    let (result, branch) = if full != FullAlgebraClass::Proper {
        (
            VerdictResult::IndirectlyControllableComplete,
            DecisionBranch::FullAlgebra,
        )
    } else if !report.assumption_ab {
        (VerdictResult::Inapplicable, DecisionBranch::AssumptionAbFailed)
    } else if split.n_a >= 3 {
        (
            VerdictResult::NotIndirectlyControllable,
            DecisionBranch::LargeAncillaProper,
        )
    } else {
        let ls_full = witnesses.dim_ls == Some(split.n_s * split.n_s);
        if ls_full && rho_a.is_pure(tol) {
            (
                VerdictResult::IndirectlyControllablePureAncilla,
                DecisionBranch::QubitAncillaSatisfied,
            )
        } else if ls_full {
            (
                VerdictResult::NotIndirectlyControllable,
                DecisionBranch::QubitAncillaMixed,
            )
        } else {
            (
                VerdictResult::NotIndirectlyControllable,
                DecisionBranch::QubitAncillaLsDeficient,
            )
        }
    };
    Ok(Verdict {
        result,
        branch,
        witnesses,
        necessary_check: None,
    })
}

/// Smallest L-invariant subspace containing the seed, grown wave by wave
/// as W <- W + [basis(L), W] until the dimension stabilizes.
pub fn ad_orbit(
    l: &DynamicalAlgebra,
    seed: &OpMat,
    tol: &Tolerance,
    max_iter: usize,
) -> Result<SubspaceBasis> {
    ad_orbit_span(l, std::slice::from_ref(seed), tol, max_iter)
}

/// Orbit of the span of several seed matrices.
pub fn ad_orbit_span(
    l: &DynamicalAlgebra,
    seeds: &[OpMat],
    tol: &Tolerance,
    max_iter: usize,
) -> Result<SubspaceBasis> {
    let n = l.ambient_dim();
    let mut orbit = SubspaceBasis::empty(n);
    for seed in seeds {
        if seed.nrows() != n || seed.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: seed.nrows(),
            });
        }
        let norm = hs_norm(seed);
        if norm == 0.0 {
            continue;
        }
        orbit.admit(&(seed / C64::new(norm, 0.0)), tol);
    }
    let mut lo = 0;
    let mut iter = 0;
    loop {
        let hi = orbit.dim();
        if lo == hi {
            break;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::MaxIterExceeded {
                max_iter,
                context: "ad_orbit",
            });
        }
        for w_idx in lo..hi {
            for lb in l.basis.elements() {
                let c = crate::op::commutator(lb, orbit.element(w_idx))?;
                orbit.admit(&c, tol);
            }
        }
        lo = hi;
    }
    Ok(orbit)
}

#[derive(Clone, Debug)]
pub struct NecessaryReport {
    pub pass: bool,
    pub tr_a_orbit_dim: usize,
    pub required_dim: usize,
    pub orbit_dim: usize,
}

/// Ad-orbit trace test: Tr_A of the smallest L-invariant subspace
/// containing i rho_S (x) rho_A must span all of u(n_S). Failure proves
/// S is not indirectly controllable given rho_A; passing is inconclusive.
pub fn necessary_condition(
    l: &DynamicalAlgebra,
    split: &BipartiteSplit,
    rho_s: &DensityState,
    rho_a: &DensityState,
    tol: &Tolerance,
    max_iter: usize,
) -> Result<NecessaryReport> {
    if rho_s.dim() != split.n_s {
        return Err(Error::DimensionMismatch {
            expected: split.n_s,
            got: rho_s.dim(),
        });
    }
    let mixed = identity(split.n_s) / C64::new(split.n_s as f64, 0.0);
    if hs_norm(&(rho_s.matrix() - mixed)) <= 1e3 * tol.residual_tol {
        return Err(Error::InvalidInput(
            "rho_S must differ from the maximally mixed state".into(),
        ));
    }
    let seed = crate::op::tensor(rho_s.matrix(), rho_a.matrix()) * C64::new(0.0, 1.0);
    let orbit = ad_orbit(l, &seed, tol, max_iter)?;
    let mut traced = SubspaceBasis::empty(split.n_s);
    for v in orbit.elements() {
        traced.admit(&partial_trace_a(v, split)?, tol);
    }
    let required = split.n_s * split.n_s;
    Ok(NecessaryReport {
        pass: traced.dim() == required,
        tr_a_orbit_dim: traced.dim(),
        required_dim: required,
        orbit_dim: orbit.dim(),
    })
}

/// Default rho_S for the falsifier when the caller gives none:
/// (1/n_S) 1 + eps * (first K basis element made Hermitian), mirroring
/// the counterexample construction.
pub fn default_probe_rho_s(
    report: &StructureReport,
    n_s: usize,
    eps: f64,
    tol: &Tolerance,
) -> Result<DensityState> {
    let k0 = report
        .k
        .elements()
        .first()
        .ok_or_else(|| Error::InvalidInput("K is zero; supply rho_S explicitly".into()))?;
    let herm = k0 * C64::new(0.0, 1.0);
    let mat = identity(n_s) / C64::new(n_s as f64, 0.0) + herm * C64::new(eps, 0.0);
    DensityState::new(mat, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::lie_closure;
    use crate::models;
    use crate::op::{c, expm_skew, tensor, zeros};
    use crate::structure::structure_report;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pure_e1() -> DensityState {
        let mut m = zeros(2);
        m[(0, 0)] = c(1.0, 0.0);
        DensityState::new(m, &tol()).unwrap()
    }

    fn mixed_half() -> DensityState {
        DensityState::new(identity(2) * c(0.5, 0.0), &tol()).unwrap()
    }

    pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityState {
        let g = OpMat::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let h = &g * g.adjoint();
        let t = trace(&h);
        DensityState::new(h / t, &tol()).unwrap()
    }

    pub fn random_pure(n: usize, rng: &mut ChaCha8Rng) -> DensityState {
        let v = nalgebra::DVector::from_fn(n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let v = &v / c(v.norm(), 0.0);
        let m = OpMat::from_fn(n, n, |r, s| v[r] * v[s].conj());
        DensityState::new(m, &tol()).unwrap()
    }

    #[test]
    fn density_validation_and_purity() {
        assert!(pure_e1().is_pure(&tol()));
        assert!(!mixed_half().is_pure(&tol()));
        assert!((mixed_half().purity() - 0.5).abs() < 1e-12);
        assert!(DensityState::new(identity(2), &tol()).is_err()); // trace 2
        let mut neg = zeros(2);
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityState::new(neg, &tol()).is_err());
        assert!(DensityState::new(crate::op::pauli_x_hermitian(), &tol()).is_err());
    }

    #[test]
    fn decide_example1_branches() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let l = lie_closure(&models::example1_generators(), &tol(), None).unwrap();
        let report = structure_report(&l, &split, &tol()).unwrap();

        let yes = decide(&l, &split, &pure_e1(), &report, &tol()).unwrap();
        assert_eq!(
            yes.result,
            VerdictResult::IndirectlyControllablePureAncilla
        );
        assert_eq!(yes.branch, DecisionBranch::QubitAncillaSatisfied);

        let no = decide(&l, &split, &mixed_half(), &report, &tol()).unwrap();
        assert_eq!(no.result, VerdictResult::NotIndirectlyControllable);
        assert_eq!(no.branch, DecisionBranch::QubitAncillaMixed);
    }

    #[test]
    fn decide_p1_counterexample_never_yes() {
        let split = BipartiteSplit::new(4, 2).unwrap();
        let l = lie_closure(&models::p1_counterexample_generators(), &tol(), None).unwrap();
        let report = structure_report(&l, &split, &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for rho_a in [
            mixed_half(),
            pure_e1(),
            random_pure(2, &mut rng),
            random_density(2, &mut rng),
        ] {
            let v = decide(&l, &split, &rho_a, &report, &tol()).unwrap();
            assert_eq!(v.result, VerdictResult::NotIndirectlyControllable);
            assert_eq!(v.branch, DecisionBranch::QubitAncillaLsDeficient);
        }
    }

    #[test]
    fn decide_full_algebra_any_ancilla() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let l = lie_closure(&models::full_control_generators(), &tol(), None).unwrap();
        let report = structure_report(&l, &split, &tol()).unwrap();
        let v = decide(&l, &split, &mixed_half(), &report, &tol()).unwrap();
        assert_eq!(v.result, VerdictResult::IndirectlyControllableComplete);
    }

    #[test]
    fn ad_orbit_basic_invariance() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let l = lie_closure(&models::example1_generators(), &tol(), None).unwrap();
        // i1 is central: its orbit stays one-dimensional.
        let i1 = identity(split.n_sa()) * c(0.0, 1.0);
        let orb = ad_orbit(&l, &i1, &tol(), 64).unwrap();
        assert_eq!(orb.dim(), 1);

        // A seed inside span(L) stays inside span(L) (+ the seed itself).
        let seed = l.basis.element(0).clone();
        let orb2 = ad_orbit(&l, &seed, &tol(), 64).unwrap();
        for v in orb2.elements() {
            assert!(l.basis.contains_mat(v, &tol()));
        }

        // Invariance certificate: [L, orbit] stays inside the orbit.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho_s = random_density(2, &mut rng);
        let rho_a = random_pure(2, &mut rng);
        let seed3 = tensor(rho_s.matrix(), rho_a.matrix()) * c(0.0, 1.0);
        let orb3 = ad_orbit(&l, &seed3, &tol(), 64).unwrap();
        for lb in l.basis.elements() {
            for w in orb3.elements() {
                let br = crate::op::commutator(lb, w).unwrap();
                let norm = hs_norm(&br);
                assert!(norm <= tol().rank_tol || orb3.distance(&br) <= 1e-7 * norm);
            }
        }

        // Monotonicity: orbit(seed) sits inside the orbit of a larger
        // seed span.
        let extra = tensor(random_density(2, &mut rng).matrix(), rho_a.matrix()) * c(0.0, 1.0);
        let orb4 = ad_orbit_span(&l, &[seed3.clone(), extra], &tol(), 64).unwrap();
        for v in orb3.elements() {
            assert!(orb4.contains_mat(v, &tol()));
        }
    }

    #[test]
    fn necessary_condition_cases() {
        let tolv = tol();
        // p = 1 falsifier: fails for random ancilla states, pure or not.
        let split = BipartiteSplit::new(4, 2).unwrap();
        let l = lie_closure(&models::p1_counterexample_generators(), &tolv, None).unwrap();
        let report = structure_report(&l, &split, &tolv).unwrap();
        let rho_s = default_probe_rho_s(&report, 4, 0.01, &tolv).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..4 {
            let rho_a = if i % 2 == 0 {
                random_pure(2, &mut rng)
            } else {
                random_density(2, &mut rng)
            };
            let rep = necessary_condition(&l, &split, &rho_s, &rho_a, &tolv, 64).unwrap();
            assert!(!rep.pass);
            assert!(rep.tr_a_orbit_dim < 16);
        }

        // Full su(4): generic states pass.
        let split2 = BipartiteSplit::new(2, 2).unwrap();
        let lf = lie_closure(&models::full_control_generators(), &tolv, None).unwrap();
        let rho_s2 = random_density(2, &mut rng);
        let rho_a2 = random_density(2, &mut rng);
        let rep2 = necessary_condition(&lf, &split2, &rho_s2, &rho_a2, &tolv, 64).unwrap();
        assert!(rep2.pass);

        // Example-1 with pure ancilla: consistent with its YES verdict.
        let le = lie_closure(&models::example1_generators(), &tolv, None).unwrap();
        let rep3 = necessary_condition(
            &le,
            &split2,
            &random_density(2, &mut rng),
            &random_pure(2, &mut rng),
            &tolv,
            64,
        )
        .unwrap();
        assert!(rep3.pass);

        // Maximally mixed rho_S is rejected.
        let mm = DensityState::new(identity(2) * c(0.5, 0.0), &tolv).unwrap();
        assert!(necessary_condition(&le, &split2, &mm, &rho_a2, &tolv, 64).is_err());
    }

    #[test]
    fn p1_orbit_contained_in_invariant_space() {
        // Orbit of i rho_S (x) rho_A with rho_S = 1/4 + K stays inside
        // the invariant space L + K(x)isu(2) + P(x)1 + Ls2perp(x)isu(2)
        // + Ls1perp(x)1 + span{i1}.
        let tolv = tol();
        let split = BipartiteSplit::new(4, 2).unwrap();
        let l = lie_closure(&models::p1_counterexample_generators(), &tolv, None).unwrap();
        let report = structure_report(&l, &split, &tolv).unwrap();

        let one2 = identity(2);
        let (sx, sy, sz) = (
            crate::op::pauli_x(),
            crate::op::pauli_y(),
            crate::op::pauli_z(),
        );
        let ls1_perp = vec![tensor(&sx, &sx) * c(0.0, 1.0)];
        let ls2_perp = vec![
            tensor(&one2, &sz),
            tensor(&one2, &sy),
            tensor(&sz, &sx) * c(0.0, 1.0),
            tensor(&sy, &sx) * c(0.0, 1.0),
        ];
        let isu2 = [
            &sx * c(0.0, 1.0),
            &sy * c(0.0, 1.0),
            &sz * c(0.0, 1.0),
        ];
        let mut vbar: Vec<OpMat> = l.basis.elements().to_vec();
        for k in models::p1_counterexample_k_basis() {
            for s in &isu2 {
                vbar.push(tensor(&k, s));
            }
        }
        for p in models::p1_counterexample_p_basis() {
            vbar.push(tensor(&p, &one2));
        }
        for m in &ls2_perp {
            for s in &isu2 {
                vbar.push(tensor(m, s));
            }
        }
        for m in &ls1_perp {
            vbar.push(tensor(m, &one2));
        }
        vbar.push(identity(8) * c(0.0, 1.0));
        let vbar_span = SubspaceBasis::from_spanning(8, vbar.iter(), &tolv).unwrap();

        let rho_s = default_probe_rho_s(&report, 4, 0.01, &tolv).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rho_a = random_density(2, &mut rng);
        let seed = tensor(rho_s.matrix(), rho_a.matrix()) * c(0.0, 1.0);
        let orbit = ad_orbit(&l, &seed, &tolv, 64).unwrap();
        for w in orbit.elements() {
            assert!(vbar_span.contains_mat(w, &tolv));
        }
    }

    #[test]
    fn decide_invariant_under_local_unitary_on_s() {
        let tolv = tol();
        let split = BipartiteSplit::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = OpMat::from_fn(2, 2, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let skew = (&g - g.adjoint()) * c(0.5, 0.0);
        let w = expm_skew(&skew, &tolv).unwrap();
        let w_big = tensor(&w, &identity(2));

        for gens in [models::example1_generators(), models::local_only_generators()] {
            let l = lie_closure(&gens, &tolv, None).unwrap();
            let report = structure_report(&l, &split, &tolv).unwrap();
            let conj: Vec<OpMat> = gens.iter().map(|m| &w_big * m * w_big.adjoint()).collect();
            let lc = lie_closure(&conj, &tolv, None).unwrap();
            let report_c = structure_report(&lc, &split, &tolv).unwrap();
            for rho_a in [pure_e1(), mixed_half()] {
                let v1 = decide(&l, &split, &rho_a, &report, &tolv).unwrap();
                let v2 = decide(&lc, &split, &rho_a, &report_c, &tolv).unwrap();
                assert_eq!(v1.result, v2.result);
            }
        }
    }
}
