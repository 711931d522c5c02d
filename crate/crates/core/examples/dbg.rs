use qsteer::op::*;
use qsteer::span::SubspaceBasis;
use qsteer::symmetric::*;
use qsteer::tol::Tolerance;
use qsteer::models;
use num_complex::Complex64 as C64;

fn main() {
    let tol = Tolerance::default();
    let i1 = identity(4) * C64::new(0.0, 1.0);
    let p1 = SubspaceBasis::from_spanning(4, models::p1_counterexample_p_basis().iter(), &tol).unwrap();
    let torus1 = SubspaceBasis::from_spanning(4, [&i1, &tensor(&pauli_y(), &identity(2))].into_iter(), &tol).unwrap();
    let part = projection_basis(&torus1, &tol, 17).unwrap();
    println!("sizes {:?} offsets {:?}", part.sizes, part.offsets());
    let t = &part.transform;
    println!("T unitary resid {:.2e}", unitarity_residual(t));
    for (i, m) in p1.elements().iter().enumerate() {
        let b = part.block(m, 0, 1);
        println!("block {i} norm {:.4}: {:?}", hs_norm(&b), b.iter().map(|z|(z.re, z.im)).collect::<Vec<_>>());
    }
    // also grouped-diagonality check of torus elements
    for (i, m) in torus1.elements().iter().enumerate() {
        let g = t * m * t.adjoint();
        println!("torus {i} transformed: {:?}", g.iter().map(|z| (1e4*z.re).round()/1e4).collect::<Vec<_>>());
    }
}
