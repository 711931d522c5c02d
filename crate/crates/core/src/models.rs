//! Reference control systems: the Ising worked example, the p = 1
//! falsifier algebra, and small full/local/qutrit-ancilla systems. These
//! back the shipped fixture files and the test corpus.

use num_complex::Complex64 as C64;

use crate::op::{identity, pauli_x, pauli_x_hermitian, pauli_y, pauli_z, su_basis, tensor, OpMat};

fn i_times(m: &OpMat) -> OpMat {
    m * C64::new(0.0, 1.0)
}

/// Two spins coupled by an Ising term, constant field on S, full control
/// on A (J = 1, omega_z = 1): H_u = J sx(x)sx + i1(x)sx u_x
/// + i1(x)sy u_y + omega_z i sz(x)1, sampled at control extremes
/// (0,0), (1,0), (0,1).
pub fn example1_hamiltonians() -> Vec<(String, OpMat)> {
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let one = identity(2);
    let h0 = tensor(&sx, &sx) + i_times(&tensor(&sz, &one));
    let hx = &h0 + i_times(&tensor(&one, &sx));
    let hy = &h0 + i_times(&tensor(&one, &sy));
    vec![
        ("H_00".into(), h0),
        ("H_10".into(), hx),
        ("H_01".into(), hy),
    ]
}

/// Skew generators iH for the Ising example.
pub fn example1_generators() -> Vec<OpMat> {
    example1_hamiltonians()
        .into_iter()
        .map(|(_, h)| i_times(&h))
        .collect()
}

/// Generators whose closure is all of su(4).
pub fn full_control_generators() -> Vec<OpMat> {
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let one = identity(2);
    vec![
        i_times(&tensor(&sx, &sx)),
        tensor(&one, &sx),
        tensor(&one, &sy),
        tensor(&sz, &one),
        tensor(&sx, &one),
    ]
}

pub fn full_control_hamiltonians() -> Vec<(String, OpMat)> {
    full_control_generators()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("H_{i}"), g * C64::new(0.0, -1.0)))
        .collect()
}

/// No interaction term: S and A evolve independently (violates A-a).
pub fn local_only_generators() -> Vec<OpMat> {
    let one = identity(2);
    vec![
        tensor(&pauli_z(), &one),
        tensor(&one, &pauli_x()),
        tensor(&one, &pauli_y()),
    ]
}

pub fn local_only_hamiltonians() -> Vec<(String, OpMat)> {
    local_only_generators()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("H_{i}"), g * C64::new(0.0, -1.0)))
        .collect()
}

/// K = [P, P] for the p = 1 falsifier: six skew 4x4 matrices.
pub fn p1_counterexample_k_basis() -> Vec<OpMat> {
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let one = identity(2);
    let mut out = vec![tensor(&sx, &one), tensor(&one, &sx)];
    for a in [&sy, &sz] {
        for b in [&sy, &sz] {
            out.push(i_times(&tensor(a, b)));
        }
    }
    out
}

/// P for the p = 1 falsifier: {sy, sz} (x) 1, i sx (x) {sy, sz}, i1.
pub fn p1_counterexample_p_basis() -> Vec<OpMat> {
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let one = identity(2);
    vec![
        tensor(&sy, &one),
        tensor(&sz, &one),
        i_times(&tensor(&sx, &sy)),
        i_times(&tensor(&sx, &sz)),
        identity(4) * C64::new(0.0, 1.0),
    ]
}

/// Generators of L = {K (x) 1} + {iP (x) su(2)} on n_S = 4, n_A = 2;
/// 6 + 5*3 = 21 elements, already bracket-closed.
pub fn p1_counterexample_generators() -> Vec<OpMat> {
    let one = identity(2);
    let mut out: Vec<OpMat> = p1_counterexample_k_basis()
        .iter()
        .map(|k| tensor(k, &one))
        .collect();
    for p in p1_counterexample_p_basis() {
        let ip = i_times(&p);
        for sigma in [pauli_x(), pauli_y(), pauli_z()] {
            out.push(tensor(&ip, &sigma));
        }
    }
    out
}

pub fn p1_counterexample_hamiltonians() -> Vec<(String, OpMat)> {
    p1_counterexample_generators()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("G_{i}"), g * C64::new(0.0, -1.0)))
        .collect()
}

/// Qutrit ancilla with full control on A and a single interaction term;
/// the closure is the proper algebra {1 (x) su(3)} + {X (x) su(3)} of
/// dimension 16 < 35.
pub fn theorem1_na3_hamiltonians() -> Vec<(String, OpMat)> {
    let one_s = identity(2);
    let x = pauli_x_hermitian();
    let mut out = Vec::new();
    for (j, sigma) in su_basis(3).iter().enumerate() {
        // -i (1 (x) sigma) is Hermitian
        out.push((
            format!("H_a{j}"),
            tensor(&one_s, sigma) * C64::new(0.0, -1.0),
        ));
    }
    let sigma0 = &su_basis(3)[0];
    out.push(("H_int".into(), tensor(&x, &(sigma0 * C64::new(0.0, -1.0)))));
    out
}

pub fn theorem1_na3_generators() -> Vec<OpMat> {
    theorem1_na3_hamiltonians()
        .into_iter()
        .map(|(_, h)| i_times(&h))
        .collect()
}
