//! Dense complex matrix kernels: exponential, principal logarithm, adjoint
//! action, the real Frobenius inner product and Gram-based numerical rank.
//!
//! Every Lie algebra handled here is a *real* Lie algebra, even when its
//! matrices carry complex entries (su(n) is a real vector space of dimension
//! n² − 1). Inner products, coordinates and ranks are therefore taken over
//! the reals: `<X, Y> = Re tr(Xᴴ Y)`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square complex matrix. Values are treated as immutable: every operation
/// in this crate returns a fresh matrix.
pub type Matrix = DMatrix<Complex64>;

/// Numerical tolerances shared by the matrix and algebra layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative threshold on Gram-matrix singular values.
    pub rank_tol: f64,
    /// Allowed deviation from skew-Hermitian / antisymmetric structure.
    pub struct_tol: f64,
    /// Allowed deviation from unitarity and unit determinant.
    pub group_tol: f64,
    /// Minimum distance of any eigenvalue from the negative real axis
    /// before the principal logarithm is refused.
    pub branch_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-9,
            struct_tol: 1e-9,
            group_tol: 1e-9,
            branch_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    SkewHermitian,
    RealAntisymmetric,
    General,
}

impl Structure {
    pub fn as_str(self) -> &'static str {
        match self {
            Structure::SkewHermitian => "skew_hermitian",
            Structure::RealAntisymmetric => "real_antisymmetric",
            Structure::General => "general",
        }
    }

    /// Whether one-parameter subgroups of this structure are bounded.
    pub fn is_compact(self) -> bool {
        !matches!(self, Structure::General)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Unitary,
    SpecialUnitary,
    SpecialOrthogonal,
    GeneralLinearComponent,
}

impl GroupKind {
    pub fn is_unitary(self) -> bool {
        !matches!(self, GroupKind::GeneralLinearComponent)
    }

    pub fn is_special(self) -> bool {
        matches!(self, GroupKind::SpecialUnitary | GroupKind::SpecialOrthogonal)
    }

    /// Algebra structure of the logarithm of an element of this group.
    pub fn algebra_structure(self) -> Structure {
        match self {
            GroupKind::Unitary | GroupKind::SpecialUnitary => Structure::SkewHermitian,
            GroupKind::SpecialOrthogonal => Structure::RealAntisymmetric,
            GroupKind::GeneralLinearComponent => Structure::General,
        }
    }
}

/// Element of a real matrix Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    mat: Matrix,
    structure: Structure,
}

impl AlgebraElement {
    /// Validates `mat` against `structure` with the default structure tolerance.
    pub fn new(mat: Matrix, structure: Structure) -> Result<Self> {
        Self::with_tol(mat, structure, Tolerances::default().struct_tol)
    }

    pub fn with_tol(mat: Matrix, structure: Structure, struct_tol: f64) -> Result<Self> {
        check_square_finite(&mat)?;
        match structure {
            Structure::SkewHermitian => {
                let dev = (&mat + mat.adjoint()).norm();
                if dev > struct_tol {
                    return Err(Error::StructureViolation {
                        what: "skew-Hermitian",
                        deviation: dev,
                        tol: struct_tol,
                    });
                }
            }
            Structure::RealAntisymmetric => {
                let imag = mat.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
                let dev = (&mat + mat.transpose()).norm().max(imag);
                if dev > struct_tol {
                    return Err(Error::StructureViolation {
                        what: "real antisymmetric",
                        deviation: dev,
                        tol: struct_tol,
                    });
                }
            }
            Structure::General => {}
        }
        Ok(AlgebraElement { mat, structure })
    }

    /// Builds an element without validation. Used for results of closed
    /// operations (brackets, conjugations, projections) whose structure is
    /// guaranteed by construction.
    pub(crate) fn from_parts(mat: Matrix, structure: Structure) -> Self {
        AlgebraElement { mat, structure }
    }

    pub fn zeros(dim: usize, structure: Structure) -> Self {
        AlgebraElement::from_parts(Matrix::zeros(dim, dim), structure)
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_mat(self) -> Matrix {
        self.mat
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scale(&self, s: f64) -> AlgebraElement {
        AlgebraElement::from_parts(&self.mat * Complex64::new(s, 0.0), self.structure)
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_parts(&self.mat + &other.mat, self.structure)
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_parts(&self.mat - &other.mat, self.structure)
    }

    /// Trace of the matrix, as a complex number.
    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Group reached by exponentiating this element.
    pub fn group_kind(&self) -> GroupKind {
        match self.structure {
            Structure::SkewHermitian => {
                if self.trace().norm() <= 1e-12 * (1.0 + self.norm()) {
                    GroupKind::SpecialUnitary
                } else {
                    GroupKind::Unitary
                }
            }
            Structure::RealAntisymmetric => GroupKind::SpecialOrthogonal,
            Structure::General => GroupKind::GeneralLinearComponent,
        }
    }

    /// `exp(t · self)` as a group element.
    pub fn exp(&self, t: f64) -> Result<GroupElement> {
        let m = expm(&(&self.mat * Complex64::new(t, 0.0)))?;
        Ok(GroupElement::from_parts(m, self.group_kind()))
    }
}

/// Element of a compact matrix group (or, for `GeneralLinearComponent`, any
/// invertible matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    mat: Matrix,
    group: GroupKind,
}

impl GroupElement {
    pub fn new(mat: Matrix, group: GroupKind) -> Result<Self> {
        Self::with_tol(mat, group, Tolerances::default().group_tol)
    }

    pub fn with_tol(mat: Matrix, group: GroupKind, group_tol: f64) -> Result<Self> {
        check_square_finite(&mat)?;
        let el = GroupElement { mat, group };
        el.check(group_tol)?;
        Ok(el)
    }

    pub(crate) fn from_parts(mat: Matrix, group: GroupKind) -> Self {
        GroupElement { mat, group }
    }

    pub fn identity(dim: usize, group: GroupKind) -> Self {
        GroupElement::from_parts(Matrix::identity(dim, dim), group)
    }

    /// Verifies the group invariants at `group_tol`.
    pub fn check(&self, group_tol: f64) -> Result<()> {
        let n = self.dim();
        if self.group.is_unitary() {
            let dev = (self.mat.adjoint() * &self.mat - Matrix::identity(n, n)).norm();
            if dev > group_tol {
                return Err(Error::NotInGroup {
                    what: "unitarity",
                    deviation: dev,
                    tol: group_tol,
                });
            }
        }
        if self.group == GroupKind::SpecialOrthogonal {
            let imag = self.mat.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
            if imag > group_tol {
                return Err(Error::NotInGroup {
                    what: "real entries",
                    deviation: imag,
                    tol: group_tol,
                });
            }
        }
        if self.group.is_special() {
            let dev = (self.mat.determinant() - Complex64::new(1.0, 0.0)).norm();
            if dev > group_tol {
                return Err(Error::NotInGroup {
                    what: "unit determinant",
                    deviation: dev,
                    tol: group_tol,
                });
            }
        }
        Ok(())
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_mat(self) -> Matrix {
        self.mat
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::from_parts(&self.mat * &other.mat, self.group)
    }

    /// Group inverse: adjoint for unitary groups, LU inverse otherwise.
    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = if self.group.is_unitary() {
            self.mat.adjoint()
        } else {
            self.mat
                .clone()
                .try_inverse()
                .ok_or(Error::NotInGroup {
                    what: "invertibility",
                    deviation: f64::INFINITY,
                    tol: 0.0,
                })?
        };
        Ok(GroupElement::from_parts(inv, self.group))
    }
}

fn check_square_finite(mat: &Matrix) -> Result<()> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::NotSquare {
            rows: mat.nrows(),
            cols: mat.ncols(),
        });
    }
    if mat.nrows() == 0 {
        return Err(Error::EmptyInput);
    }
    if !is_finite(mat) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn is_finite(mat: &Matrix) -> bool {
    mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn one_norm(mat: &Matrix) -> f64 {
    mat.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// Degree-13 Padé coefficients for exp (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a [13/13] Padé approximant.
/// The squaring count is chosen from the 1-norm of the input.
pub fn expm(x: &Matrix) -> Result<Matrix> {
    check_square_finite(x)?;
    let n = x.nrows();
    let norm = one_norm(x);
    if norm == 0.0 {
        return Ok(Matrix::identity(n, n));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = x * real(0.5f64.powi(squarings));
    let b = &PADE13;
    let ident = Matrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * real(b[13]) + &a4 * real(b[11]) + &a2 * real(b[9]))
        + &a6 * real(b[7])
        + &a4 * real(b[5])
        + &a2 * real(b[3])
        + &ident * real(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * real(b[12]) + &a4 * real(b[10]) + &a2 * real(b[8]))
        + &a6 * real(b[6])
        + &a4 * real(b[4])
        + &a2 * real(b[2])
        + &ident * real(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::NonFinite)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !is_finite(&r) {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

/// Eigenvalues of a complex square matrix via the complex Schur form.
pub fn eigenvalues(mat: &Matrix) -> Result<Vec<Complex64>> {
    check_square_finite(mat)?;
    // The QR sweep can stall at a very tight deflation threshold on exactly
    // structured inputs, so loosen it before giving up.
    let scale = mat.norm().max(1.0);
    for eps in [1e-15, 1e-13, 1e-11] {
        if let Some(schur) = Schur::try_new(mat.clone(), eps * scale, 10_000) {
            let (_, t) = schur.unpack();
            return Ok((0..t.nrows()).map(|i| t[(i, i)]).collect());
        }
    }
    Err(Error::NoConvergence {
        iterations: 10_000,
        residual: f64::NAN,
        condition: None,
    })
}

fn distance_to_negative_axis(z: Complex64) -> f64 {
    if z.re < 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm_db(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = Matrix::identity(n, n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or(Error::BranchCut { distance: 0.0 })?;
        let z_inv = z.clone().try_inverse().ok_or(Error::BranchCut { distance: 0.0 })?;
        let y_next = (&y + z_inv) * real(0.5);
        let z_next = (&z + y_inv) * real(0.5);
        let step = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if step <= 1e-15 * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    Ok(y)
}

/// `log(I + E)` for small `E`, via the odd series in `Z = (A − I)(A + I)⁻¹`.
fn log_near_identity(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let ident = Matrix::identity(n, n);
    let num = a - &ident;
    let den = a + &ident;
    // Z = num · den⁻¹; num and den commute, so solve from the left.
    let z = den.lu().solve(&num).ok_or(Error::BranchCut { distance: 0.0 })?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut k = 1u32;
    loop {
        term = &term * &z2;
        k += 2;
        let contrib = &term * real(1.0 / k as f64);
        let c = contrib.norm();
        sum += contrib;
        if c <= 1e-18 * sum.norm().max(1e-300) || k > 201 {
            break;
        }
    }
    Ok(sum * real(2.0))
}

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// principal square roots until the matrix is near the identity, then a
/// truncated series, then rescaling by the accumulated power of two.
pub fn logm_principal(k: &GroupElement, tol: &Tolerances) -> Result<AlgebraElement> {
    check_square_finite(k.mat())?;
    k.check(tol.group_tol)?;
    let eig = eigenvalues(k.mat())?;
    let closest = eig
        .iter()
        .map(|&z| distance_to_negative_axis(z))
        .fold(f64::INFINITY, f64::min);
    if closest <= tol.branch_tol {
        return Err(Error::BranchCut { distance: closest });
    }
    let n = k.dim();
    let ident = Matrix::identity(n, n);
    let mut a = k.mat().clone();
    let mut roots = 0;
    while (&a - &ident).norm() > 0.25 && roots < 64 {
        a = sqrtm_db(&a)?;
        roots += 1;
    }
    let mut log = log_near_identity(&a)? * real(2f64.powi(roots));
    let structure = k.group().algebra_structure();
    log = project_structure(&log, structure);
    if !is_finite(&log) {
        return Err(Error::NonFinite);
    }
    Ok(AlgebraElement::from_parts(log, structure))
}

/// Orthogonal projection onto the matrices of the given structure.
pub fn project_structure(mat: &Matrix, structure: Structure) -> Matrix {
    match structure {
        Structure::SkewHermitian => (mat - mat.adjoint()) * real(0.5),
        Structure::RealAntisymmetric => {
            let re = mat.map(|z| real(z.re));
            (&re - re.transpose()) * real(0.5)
        }
        Structure::General => mat.clone(),
    }
}

/// `K X K⁻¹`.
pub fn adjoint_conjugate(k: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    if k.dim() != x.dim() {
        return Err(Error::DimMismatch {
            expected: k.dim(),
            found: x.dim(),
        });
    }
    let inv = k.inverse()?;
    let mut out = k.mat() * x.mat() * inv.mat();
    if x.structure() == Structure::RealAntisymmetric && k.group() == GroupKind::SpecialOrthogonal {
        out = out.map(|z| real(z.re));
    }
    Ok(AlgebraElement::from_parts(out, x.structure()))
}

/// Real Frobenius inner product `Re tr(Xᴴ Y)`.
pub fn frobenius_inner(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(real_inner(x.mat(), y.mat()))
}

pub(crate) fn real_inner(x: &Matrix, y: &Matrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

/// Frobenius distance `‖K1 − K2‖_F`.
pub fn group_distance(k1: &GroupElement, k2: &GroupElement) -> Result<f64> {
    if k1.dim() != k2.dim() {
        return Err(Error::DimMismatch {
            expected: k1.dim(),
            found: k2.dim(),
        });
    }
    Ok(mat_distance(k1.mat(), k2.mat()))
}

pub fn mat_distance(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Distance to the identity without allocating.
pub(crate) fn distance_to_identity(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            let z = a[(i, j)];
            let d = if i == j { z - real(1.0) } else { z };
            s += d.norm_sqr();
        }
    }
    s.sqrt()
}

#[derive(Debug, Clone)]
pub struct GramRank {
    pub rank: usize,
    pub orthonormal_span: Vec<AlgebraElement>,
}

/// Numerical rank of a family of algebra elements under the real Frobenius
/// inner product, together with an orthonormal basis of its span.
///
/// The rank counts eigenvalues of the (positive semidefinite) Gram matrix
/// above `rank_tol` times the largest. The span is built by modified
/// Gram–Schmidt with one re-orthogonalization pass; a residual is kept when
/// its norm exceeds `sqrt(rank_tol)` times the largest input norm, the
/// matching threshold on singular values of the family itself.
pub fn gram_rank(vectors: &[AlgebraElement], rank_tol: f64) -> Result<GramRank> {
    let first = vectors.first().ok_or(Error::EmptyInput)?;
    let dim = first.dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let k = vectors.len();
    let gram = DMatrix::<f64>::from_fn(k, k, |i, j| real_inner(vectors[i].mat(), vectors[j].mat()));
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let largest = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let rank = if largest == 0.0 {
        0
    } else {
        eig.iter().filter(|&&e| e.abs() > rank_tol * largest).count()
    };

    let max_norm = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let keep = rank_tol.sqrt() * max_norm;
    let mut span: Vec<AlgebraElement> = Vec::with_capacity(rank);
    for v in vectors {
        let q = orthogonal_residual(v.mat(), &span);
        let nrm = q.norm();
        if nrm > keep && nrm > 0.0 {
            span.push(AlgebraElement::from_parts(q / real(nrm), v.structure()));
        }
    }
    Ok(GramRank {
        rank,
        orthonormal_span: span,
    })
}

/// Component of `x` orthogonal to an orthonormal family (two MGS passes).
pub(crate) fn orthogonal_residual(x: &Matrix, ortho: &[AlgebraElement]) -> Matrix {
    let mut r = x.clone();
    for _ in 0..2 {
        for q in ortho {
            let c = real_inner(q.mat(), &r);
            r -= q.mat() * real(c);
        }
    }
    r
}

/// Real coordinates of `x` against an orthonormal family.
pub(crate) fn coordinates(x: &Matrix, ortho: &[AlgebraElement]) -> DVector<f64> {
    DVector::from_iterator(ortho.len(), ortho.iter().map(|q| real_inner(q.mat(), x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::su2_basis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Truncated power series, independent of the Padé path.
    fn expm_series(x: &Matrix) -> Matrix {
        let n = x.nrows();
        let mut term = Matrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * x / real(k as f64);
            sum += &term;
        }
        sum
    }

    fn random_skew(seed: u64, dim: usize, scale: f64) -> AlgebraElement {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = Matrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let s = project_structure(&m, Structure::SkewHermitian);
        let s = &s * real(scale / s.norm());
        AlgebraElement::new(s, Structure::SkewHermitian).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(e, Matrix::identity(2, 2));
    }

    #[test]
    fn expm_diagonal_pi() {
        let x = Matrix::from_diagonal(&DVector::from_vec(vec![c(0.0, std::f64::consts::PI), c(0.0, -std::f64::consts::PI)]));
        let e = expm(&x).unwrap();
        assert!(mat_distance(&e, &(-Matrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn expm_matches_series_and_inverse() {
        for seed in 0..20 {
            let x = random_skew(seed, 3, 1.0 + seed as f64 * 0.2);
            let e = expm(x.mat()).unwrap();
            assert!(mat_distance(&e, &expm_series(x.mat())) < 1e-12);
            let einv = expm(&(-x.mat())).unwrap();
            assert!(distance_to_identity(&(&e * einv)) < 1e-12);
        }
    }

    #[test]
    fn expm_rejects_nan() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(expm(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn expm_is_unitary_for_large_skew() {
        for seed in 0..10 {
            let x = random_skew(seed + 100, 4, 10.0);
            let u = expm(x.mat()).unwrap();
            let dev = (u.adjoint() * &u - Matrix::identity(4, 4)).norm();
            assert!(dev <= 1e-12, "dev {dev}");
        }
    }

    #[test]
    fn logm_identity_and_round_trip() {
        let tol = Tolerances::default();
        let id = GroupElement::identity(2, GroupKind::SpecialUnitary);
        assert!(logm_principal(&id, &tol).unwrap().norm() < 1e-15);
        for seed in 0..20 {
            let mut x = random_skew(seed + 7, 3, 1.0);
            let s2 = x.mat().clone().singular_values()[0];
            x = x.scale((std::f64::consts::PI - 0.1) * (0.2 + 0.04 * seed as f64) / s2);
            let k = x.exp(1.0).unwrap();
            let l = logm_principal(&k, &tol).unwrap();
            assert!(mat_distance(l.mat(), x.mat()) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn logm_refuses_minus_identity() {
        let k = GroupElement::new(-Matrix::identity(2, 2), GroupKind::SpecialUnitary).unwrap();
        assert!(matches!(logm_principal(&k, &Tolerances::default()), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn logm_rejects_non_unitary() {
        let m = Matrix::identity(2, 2) * real(2.0);
        let k = GroupElement::from_parts(m, GroupKind::Unitary);
        assert!(matches!(logm_principal(&k, &Tolerances::default()), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn adjoint_rotation_matches_series() {
        let e = su2_basis();
        let t = 0.7;
        let k = e[2].exp(t).unwrap();
        let got = adjoint_conjugate(&k, &e[0]).unwrap();
        let expected = e[0].scale(t.cos()).add(&e[1].scale(t.sin()));
        assert!(mat_distance(got.mat(), expected.mat()) < 1e-12);

        // Σ tᵏ adᵏ(e₁)/k!
        let mut term = e[0].mat().clone();
        let mut sum = term.clone();
        for k in 1..40 {
            term = (e[2].mat() * &term - &term * e[2].mat()) * real(t / k as f64);
            sum += &term;
        }
        assert!(mat_distance(got.mat(), &sum) < 1e-10);
    }

    #[test]
    fn adjoint_identity_and_dims() {
        let e = su2_basis();
        let id = GroupElement::identity(2, GroupKind::SpecialUnitary);
        assert_eq!(adjoint_conjugate(&id, &e[0]).unwrap().mat(), e[0].mat());
        let k3 = GroupElement::identity(3, GroupKind::SpecialUnitary);
        assert!(matches!(adjoint_conjugate(&k3, &e[0]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn frobenius_on_su2_basis() {
        let e = su2_basis();
        assert!((frobenius_inner(&e[0], &e[0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(frobenius_inner(&e[0], &e[1]).unwrap().abs() < 1e-15);
        let x = random_skew(3, 3, 2.0);
        assert!((frobenius_inner(&x, &x).unwrap() - x.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn gram_rank_cases() {
        let e = su2_basis();
        let g = gram_rank(&[e[0].clone(), e[0].scale(2.0)], 1e-9).unwrap();
        assert_eq!(g.rank, 1);
        assert_eq!(g.orthonormal_span.len(), 1);
        let g = gram_rank(&e, 1e-9).unwrap();
        assert_eq!(g.rank, 3);
        let g = gram_rank(&[e[0].clone(), e[1].clone(), e[0].add(&e[1])], 1e-10).unwrap();
        assert_eq!(g.rank, 2);
        assert_eq!(g.orthonormal_span.len(), 2);
        assert!(matches!(gram_rank(&[], 1e-9), Err(Error::EmptyInput)));
    }

    #[test]
    fn group_distance_cases() {
        let id = GroupElement::identity(2, GroupKind::Unitary);
        let neg = GroupElement::from_parts(-Matrix::identity(2, 2), GroupKind::Unitary);
        assert_eq!(group_distance(&id, &id).unwrap(), 0.0);
        assert!((group_distance(&id, &neg).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);

        let x = random_skew(11, 3, 1.0);
        let s2 = x.mat().clone().singular_values()[0];
        let x = x.scale(1.0 / s2);
        let id3 = GroupElement::identity(3, GroupKind::SpecialUnitary);
        let mut prev = -1.0;
        for i in 0..=50 {
            let s = 0.01 * i as f64;
            let d = group_distance(&x.exp(s).unwrap(), &id3).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn structure_validation() {
        let e = su2_basis();
        assert!(AlgebraElement::new(e[0].mat().clone(), Structure::SkewHermitian).is_ok());
        let herm = e[0].mat() * c(0.0, 1.0);
        assert!(matches!(
            AlgebraElement::new(herm, Structure::SkewHermitian),
            Err(Error::StructureViolation { .. })
        ));
    }
}
