mod common;

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unigen::demos::{su2_pauli_pair, su3_gellmann_pair};
use unigen::*;

fn completed(gens: &GeneratorSet) -> CompletedBasis {
    let alg = bracket_closure(gens, &ClosureConfig::default()).unwrap();
    complete_basis(gens, &alg, &CompletionConfig::default()).unwrap()
}

fn forward_oracle(t: &[f64], basis: &CompletedBasis) -> Matrix {
    let d = basis.dim();
    let mut acc = Matrix::identity(d, d);
    for (i, &ti) in t.iter().enumerate() {
        acc *= taylor_expm(&(basis.element(i).unwrap().mat() * c(ti, 0.0)));
    }
    acc
}

/// Central differences of the chart, right-trivialized and expressed in the
/// basis' orthonormal coordinates.
fn fd_jacobian(t: &[f64], basis: &CompletedBasis, h: f64) -> DMatrix<f64> {
    let ortho = basis.orthonormal();
    let n = t.len();
    let f_inv = forward_oracle(t, basis).adjoint();
    let mut j = DMatrix::zeros(ortho.len(), n);
    for k in 0..n {
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        tp[k] += h;
        tm[k] -= h;
        let d = (forward_oracle(&tp, basis) - forward_oracle(&tm, basis)) / c(2.0 * h, 0.0) * &f_inv;
        let dv = realvec(&d);
        for (row, e) in ortho.iter().enumerate() {
            j[(row, k)] = realvec(e.mat()).dot(&dv);
        }
    }
    j
}

fn check_jacobian(gens: GeneratorSet, seed: u64) {
    let basis = completed(&gens);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let t: Vec<f64> = (0..basis.n()).map(|_| rng.random_range(-0.3..0.3)).collect();
        let analytic = chart_jacobian(&t, &basis).unwrap();
        let fd = fd_jacobian(&t, &basis, 1e-5);
        let rel = (&analytic - &fd).norm() / analytic.norm();
        assert!(rel < 1e-6, "relative Jacobian error {rel:e} at {t:?}");
    }
}

#[test]
fn jacobian_matches_finite_differences_su2() {
    check_jacobian(su2_pauli_pair(), 1);
}

#[test]
fn jacobian_matches_finite_differences_su3() {
    check_jacobian(su3_gellmann_pair(), 2);
}

fn solve_random(gens: GeneratorSet, count: usize, seed: u64, max_iters: usize) {
    let basis = completed(&gens);
    let group = GroupKind::SpecialUnitary;
    let elements: Vec<AlgebraElement> = basis.elements().into_iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_iters = 0;
    for _ in 0..count {
        let norm = rng.random_range(0.0..0.2);
        let target = GroupElement::with_tol(near_identity(&elements, norm, &mut rng), group, 1e-9).unwrap();
        let sol = chart_solve(&target, &basis, &SolverConfig::default()).unwrap();
        assert!(sol.residual <= 1e-10);
        worst_iters = worst_iters.max(sol.iterations);
        // Independent forward evaluation of the returned times.
        let err = dist(&forward_oracle(&sol.times, &basis), target.mat());
        assert!(err <= 1e-10 + 1e-13, "oracle residual {err:e}");
        // The substituted word replays to the same target.
        let w = substitute_conjugations(&sol.times, &basis, 1e-12).unwrap();
        assert!(w.len() as u64 <= basis.schedule().bound);
        assert!(dist(&replay_oracle(&w.letters, &gens), target.mat()) <= 1e-9);
    }
    assert!(worst_iters <= max_iters, "{worst_iters} iterations");
}

#[test]
fn random_su2_targets_converge() {
    solve_random(su2_pauli_pair(), 100, 10, 12);
}

#[test]
fn random_su3_targets_converge() {
    solve_random(su3_gellmann_pair(), 50, 11, 20);
}

#[test]
fn newton_converges_quadratically_near_identity() {
    // Residual history is not exposed, so compare iteration counts at two
    // scales: a quadratically convergent solve needs very few steps.
    let gens = su2_pauli_pair();
    let basis = completed(&gens);
    let elements: Vec<AlgebraElement> = basis.elements().into_iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let target = GroupElement::with_tol(
            near_identity(&elements, 0.1, &mut rng),
            GroupKind::SpecialUnitary,
            1e-9,
        )
        .unwrap();
        let sol = chart_solve(&target, &basis, &SolverConfig::default()).unwrap();
        assert!(sol.iterations <= 6, "{} iterations", sol.iterations);
    }
}

#[test]
fn ill_conditioned_basis_is_reported() {
    let gens = su2_pauli_pair();
    let basis = completed(&gens);
    let cfg = SolverConfig {
        max_condition: 1.0 - 1e-9,
        ..SolverConfig::default()
    };
    let target = basis.element(0).unwrap().exp(0.2).unwrap();
    match chart_solve(&target, &basis, &cfg) {
        Err(Error::NoConvergence { condition: Some(c), .. }) => assert!(c >= 1.0),
        other => panic!("{other:?}"),
    }
}
