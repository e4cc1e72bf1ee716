//! Reference computations for the integration tests. Nothing here calls the
//! library's own matrix functions, rank tests or closure.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use unigen::{AlgebraElement, GeneratorSet, Letter, Matrix, Structure};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Taylor series with scaling and squaring, summed until terms vanish.
pub fn taylor_expm(x: &Matrix) -> Matrix {
    let n = x.nrows();
    let norm = x.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = x / c(2f64.powi(s), 0.0);
    let mut term = Matrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..60 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn dist(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm()
}

/// Real coordinates (re and im parts) of a matrix.
pub fn realvec(m: &Matrix) -> DVector<f64> {
    let mut v = Vec::with_capacity(2 * m.len());
    for z in m.iter() {
        v.push(z.re);
        v.push(z.im);
    }
    DVector::from_vec(v)
}

/// Numerical rank of a list of matrices as real vectors, by SVD.
pub fn svd_rank(ms: &[Matrix], rel_tol: f64) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let cols: Vec<DVector<f64>> = ms.iter().map(realvec).collect();
    let a = DMatrix::from_columns(&cols);
    let sv = a.svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Dimension of the Lie algebra generated by `gens`: keep adding all
/// brackets of the current spanning set until the rank stops growing.
pub fn closure_dim(gens: &[Matrix]) -> usize {
    let mut set: Vec<Matrix> = gens.to_vec();
    let mut rank = svd_rank(&set, 1e-9);
    loop {
        let mut next = set.clone();
        for i in 0..set.len() {
            for j in (i + 1)..set.len() {
                next.push(&set[i] * &set[j] - &set[j] * &set[i]);
            }
        }
        let r = svd_rank(&next, 1e-9);
        if r == rank {
            return r;
        }
        // Keep a basis so the list does not explode.
        set = reduce(&next, 1e-9);
        rank = r;
    }
}

fn reduce(ms: &[Matrix], tol: f64) -> Vec<Matrix> {
    let mut kept: Vec<Matrix> = Vec::new();
    for m in ms {
        let mut trial = kept.clone();
        trial.push(m.clone());
        if svd_rank(&trial, tol) > kept.len() {
            kept = trial;
        }
    }
    kept
}

pub fn random_skew_hermitian<R: Rng>(d: usize, traceless: bool, rng: &mut R) -> Matrix {
    let mut m = Matrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m = &m - m.adjoint();
    if traceless {
        let tr = m.trace() / c(d as f64, 0.0);
        for i in 0..d {
            m[(i, i)] -= tr;
        }
    }
    m
}

pub fn random_antisymmetric<R: Rng>(d: usize, rng: &mut R) -> Matrix {
    let m = Matrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), 0.0));
    &m - m.transpose()
}

pub fn element(m: Matrix, s: Structure) -> AlgebraElement {
    AlgebraElement::new(m, s).unwrap()
}

/// `Π exp(t·X_g)` with the reference exponential.
pub fn replay_oracle(letters: &[Letter], gens: &GeneratorSet) -> Matrix {
    let d = gens.dim();
    let mut acc = Matrix::identity(d, d);
    for l in letters {
        let x = gens.elements()[l.generator].mat();
        acc *= taylor_expm(&(x * c(l.time, 0.0)));
    }
    acc
}

/// Random element of the form `exp(X)` with `‖X‖_F = norm`.
pub fn near_identity<R: Rng>(basis: &[AlgebraElement], norm: f64, rng: &mut R) -> Matrix {
    let d = basis[0].dim();
    let mut x = Matrix::zeros(d, d);
    for b in basis {
        x += b.mat() * c(rng.random_range(-1.0..1.0), 0.0);
    }
    let x = &x * c(norm / x.norm(), 0.0);
    taylor_expm(&x)
}
