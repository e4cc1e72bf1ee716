//! Lie brackets, bracket closure and the generation test.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{gram_rank, orthogonal_residual, real_inner, AlgebraElement, Structure, Tolerances};

/// `[X, Y] = XY − YX`.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let m = x.mat() * y.mat() - y.mat() * x.mat();
    Ok(AlgebraElement::from_parts(m, x.structure()))
}

/// A linearly independent set of Lie-algebra generators sharing one
/// dimension and one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    elements: Vec<AlgebraElement>,
    labels: Vec<String>,
}

impl GeneratorSet {
    /// Validates independence at the default rank tolerance. Empty `labels`
    /// are filled with `X1..Xm`.
    pub fn new(elements: Vec<AlgebraElement>, labels: Vec<String>) -> Result<Self> {
        Self::with_tol(elements, labels, Tolerances::default().rank_tol)
    }

    pub fn with_tol(elements: Vec<AlgebraElement>, mut labels: Vec<String>, rank_tol: f64) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyInput)?;
        let (dim, structure) = (first.dim(), first.structure());
        if elements.iter().any(|e| e.dim() != dim || e.structure() != structure) {
            return Err(Error::MixedGenerators);
        }
        if elements.iter().any(|e| e.norm() == 0.0) {
            return Err(Error::DependentGenerators {
                rank: 0,
                count: elements.len(),
            });
        }
        let rank = gram_rank(&elements, rank_tol)?.rank;
        if rank != elements.len() {
            return Err(Error::DependentGenerators {
                rank,
                count: elements.len(),
            });
        }
        if labels.is_empty() {
            labels = (1..=elements.len()).map(|i| format!("X{i}")).collect();
        } else if labels.len() != elements.len() {
            return Err(Error::DimMismatch {
                expected: elements.len(),
                found: labels.len(),
            });
        }
        Ok(GeneratorSet { elements, labels })
    }

    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, index: usize) -> Result<&AlgebraElement> {
        self.elements.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.elements.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn structure(&self) -> Structure {
        self.elements[0].structure()
    }
}

/// Orthonormal basis of a bracket-closed subspace.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub elements: Vec<AlgebraElement>,
    pub dim_algebra: usize,
    /// Number of sweeps the closure needed.
    pub sweeps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureConfig {
    pub closure_tol: f64,
    pub max_depth: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            closure_tol: 1e-8,
            max_depth: 16,
        }
    }
}

/// Smallest bracket-closed subspace containing the generators.
///
/// Breadth-first: each sweep brackets the elements added by the previous
/// sweep against every element present at the start of the sweep, and adds
/// any component orthogonal to the running span whose norm exceeds
/// `closure_tol` (the span is orthonormal, so this is relative to the unit
/// basis norm).
pub fn bracket_closure(gens: &GeneratorSet, cfg: &ClosureConfig) -> Result<AlgebraBasis> {
    if cfg.max_depth == 0 {
        return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
    }
    let mut span = gram_rank(gens.elements(), Tolerances::default().rank_tol)?.orthonormal_span;
    let mut frontier: Vec<usize> = (0..span.len()).collect();
    let mut sweeps = 0;
    while !frontier.is_empty() {
        if sweeps == cfg.max_depth {
            return Err(Error::DepthExceeded {
                depth: cfg.max_depth,
                dim: span.len(),
            });
        }
        sweeps += 1;
        let start = span.len();
        for &a in &frontier {
            for b in 0..start {
                if a == b {
                    continue;
                }
                let br = bracket(&span[a], &span[b])?;
                let r = orthogonal_residual(br.mat(), &span);
                let nrm = r.norm();
                if nrm > cfg.closure_tol {
                    span.push(AlgebraElement::from_parts(r / Complex64::new(nrm, 0.0), br.structure()));
                }
            }
        }
        frontier = (start..span.len()).collect();
    }
    let dim_algebra = span.len();
    Ok(AlgebraBasis {
        elements: span,
        dim_algebra,
        sweeps,
    })
}

/// Lie-algebra rank condition: do the generators' iterated brackets span
/// an algebra of the expected dimension?
pub fn is_generating(gens: &GeneratorSet, expected_dim: usize, cfg: &ClosureConfig) -> Result<bool> {
    Ok(bracket_closure(gens, cfg)?.dim_algebra == expected_dim)
}

#[derive(Debug, Clone)]
pub struct SpanTest {
    pub inside: bool,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
}

/// Real least-squares fit of `x` against `basis`.
/// `inside` holds when the residual is at most `tol · max(1, ‖x‖_F)`.
pub fn in_span(x: &AlgebraElement, basis: &[AlgebraElement], tol: f64) -> Result<SpanTest> {
    if basis.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = basis.iter().find(|b| b.dim() != x.dim()) {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            found: bad.dim(),
        });
    }
    let k = basis.len();
    let gram = DMatrix::<f64>::from_fn(k, k, |i, j| real_inner(basis[i].mat(), basis[j].mat()));
    let rhs = DVector::<f64>::from_iterator(k, basis.iter().map(|b| real_inner(b.mat(), x.mat())));
    let svd = gram.svd(true, true);
    let eps = 1e-14 * svd.singular_values.max();
    let coeffs = svd
        .solve(&rhs, eps)
        .map_err(|m| Error::InvalidConfig(m.to_string()))?;
    let mut fit = x.mat().clone();
    for (b, &c) in basis.iter().zip(coeffs.iter()) {
        fit -= b.mat() * Complex64::new(c, 0.0);
    }
    let residual_norm = fit.norm();
    Ok(SpanTest {
        inside: residual_norm <= tol * x.norm().max(1.0),
        coefficients: coeffs.iter().copied().collect(),
        residual_norm,
    })
}
