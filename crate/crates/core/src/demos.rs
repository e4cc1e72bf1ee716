//! Shipped generator sets: the quantum-gate universality examples.

use num_complex::Complex64;

use crate::algebra::GeneratorSet;
use crate::matrix::{AlgebraElement, Matrix, Structure};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli() -> [Matrix; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix::from_row_slice(2, 2, &[z, one, one, z]),
        Matrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Matrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// `e_j = −(i/2) σ_j`, satisfying `[e₁, e₂] = e₃` cyclically.
pub fn su2_basis() -> Vec<AlgebraElement> {
    pauli()
        .into_iter()
        .map(|s| AlgebraElement::from_parts(s * c(0.0, -0.5), Structure::SkewHermitian))
        .collect()
}

/// The eight Gell-Mann matrices λ₁..λ₈.
pub fn gell_mann() -> [Matrix; 8] {
    let mut out: [Matrix; 8] = std::array::from_fn(|_| Matrix::zeros(3, 3));
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    out[0][(0, 1)] = one;
    out[0][(1, 0)] = one;
    out[1][(0, 1)] = -i;
    out[1][(1, 0)] = i;
    out[2][(0, 0)] = one;
    out[2][(1, 1)] = -one;
    out[3][(0, 2)] = one;
    out[3][(2, 0)] = one;
    out[4][(0, 2)] = -i;
    out[4][(2, 0)] = i;
    out[5][(1, 2)] = one;
    out[5][(2, 1)] = one;
    out[6][(1, 2)] = -i;
    out[6][(2, 1)] = i;
    let s = 1.0 / 3f64.sqrt();
    out[7][(0, 0)] = c(s, 0.0);
    out[7][(1, 1)] = c(s, 0.0);
    out[7][(2, 2)] = c(-2.0 * s, 0.0);
    out
}

/// `−(i/2) λ_j`, an orthogonal basis of su(3).
pub fn su3_basis() -> Vec<AlgebraElement> {
    gell_mann()
        .into_iter()
        .map(|l| AlgebraElement::from_parts(l * c(0.0, -0.5), Structure::SkewHermitian))
        .collect()
}

/// Rotation generators `L_x, L_y, L_z` of so(3).
pub fn so3_basis() -> Vec<AlgebraElement> {
    let r = |v: [f64; 9]| {
        AlgebraElement::from_parts(
            Matrix::from_row_slice(3, 3, &v.map(|x| c(x, 0.0))),
            Structure::RealAntisymmetric,
        )
    };
    vec![
        r([0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
        r([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
        r([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ]
}

/// Generators of so(4): the elementary rotations in the (i, j) planes.
pub fn so4_basis() -> Vec<AlgebraElement> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut m = Matrix::zeros(4, 4);
            m[(i, j)] = c(-1.0, 0.0);
            m[(j, i)] = c(1.0, 0.0);
            out.push(AlgebraElement::from_parts(m, Structure::RealAntisymmetric));
        }
    }
    out
}

/// X and Y rotation generators of a single qubit.
pub fn su2_pauli_pair() -> GeneratorSet {
    let e = su2_basis();
    GeneratorSet::new(vec![e[0].clone(), e[1].clone()], vec!["X".into(), "Y".into()])
        .expect("Pauli pair is independent")
}

/// A qutrit drive: a detuning Hamiltonian with distinct level gaps and a
/// ladder coupling 1↔2↔3.
pub fn su3_gellmann_pair() -> GeneratorSet {
    let l = gell_mann();
    let drive = (&l[0] + &l[5]) * c(0.0, -0.5);
    let detuning = (&l[2] * c(0.7, 0.0) + &l[7] * c(0.45, 0.0)) * c(0.0, -0.5);
    GeneratorSet::new(
        vec![
            AlgebraElement::from_parts(drive, Structure::SkewHermitian),
            AlgebraElement::from_parts(detuning, Structure::SkewHermitian),
        ],
        vec!["drive".into(), "detuning".into()],
    )
    .expect("qutrit pair is independent")
}

pub fn so3_rotations() -> GeneratorSet {
    let l = so3_basis();
    GeneratorSet::new(vec![l[0].clone(), l[1].clone()], vec!["Lx".into(), "Ly".into()])
        .expect("rotation pair is independent")
}

/// `i·diag(1,−1,0)` and `i·diag(0,1,−1)`: an abelian pair that does not
/// generate su(3).
pub fn su3_commuting_pair() -> GeneratorSet {
    let d = |a: f64, b: f64, e: f64| {
        AlgebraElement::from_parts(
            Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, a), c(0.0, b), c(0.0, e)])),
            Structure::SkewHermitian,
        )
    };
    GeneratorSet::new(vec![d(1.0, -1.0, 0.0), d(0.0, 1.0, -1.0)], vec!["h1".into(), "h2".into()])
        .expect("diagonal pair is independent")
}

/// Named demo configurations with their expected algebra dimension.
pub fn demo(name: &str) -> Option<(GeneratorSet, usize)> {
    match name {
        "su2_pauli_pair" => Some((su2_pauli_pair(), 3)),
        "su3_gellmann_pair" => Some((su3_gellmann_pair(), 8)),
        "so3_rotations" => Some((so3_rotations(), 3)),
        _ => None,
    }
}

pub const DEMO_NAMES: [&str; 3] = ["su2_pauli_pair", "su3_gellmann_pair", "so3_rotations"];
