//! Basis completion by adjoint conjugation.
//!
//! Starting from independent generators `X_1..X_m`, each step picks two
//! available elements `X_c`, `X_p` and a time `τ` such that
//! `exp(τ X_c) X_p exp(−τ X_c)` has a large component outside the current
//! span, until the span reaches the algebra dimension `n`. Every new element
//! keeps a conjugation word over the original generators, so that
//! `exp(t X_{m+k})` can later be rewritten as `W exp(t X_core) W⁻¹`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraBasis, GeneratorSet};
use crate::error::{Error, Result};
use crate::matrix::{adjoint_conjugate, gram_rank, mat_distance, orthogonal_residual, AlgebraElement, Tolerances};
use crate::word::{inverse_letters, replay, Letter};

/// Worst-case conjugator lengths `r_1..r_{n−m}` and the word-length bound
/// `n + 2 Σ r_k` for a chart assembled from them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RkSchedule {
    pub values: Vec<u64>,
    pub bound: u64,
}

/// `r_1 = 1`, `r_2 = 2`, `r_k = 2 r_{k−2} + r_{k−1} + 1`.
pub fn rk_schedule(n: usize, m: usize) -> Result<RkSchedule> {
    if m < 1 || m > n {
        return Err(Error::InvalidDims { n, m });
    }
    let overflow = || Error::InvalidDims { n, m };
    let steps = n - m;
    let mut values: Vec<u64> = Vec::with_capacity(steps);
    for k in 0..steps {
        let v = match k {
            0 => 1,
            1 => 2,
            _ => values[k - 2]
                .checked_mul(2)
                .and_then(|x| x.checked_add(values[k - 1]))
                .and_then(|x| x.checked_add(1))
                .ok_or_else(overflow)?,
        };
        values.push(v);
    }
    let sum = values
        .iter()
        .try_fold(0u64, |acc, &v| acc.checked_add(v))
        .ok_or_else(overflow)?;
    let bound = sum
        .checked_mul(2)
        .and_then(|x| x.checked_add(n as u64))
        .ok_or_else(overflow)?;
    Ok(RkSchedule { values, bound })
}

/// `X = W X_core W⁻¹` with `W = Π factors` (outermost factor first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationWord {
    pub factors: Vec<Letter>,
    pub core: usize,
}

impl ConjugationWord {
    pub fn generator(index: usize) -> Self {
        ConjugationWord {
            factors: Vec::new(),
            core: index,
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Replays the conjugation over the original generators.
    pub fn apply(&self, gens: &GeneratorSet) -> Result<AlgebraElement> {
        let w = replay(&self.factors, gens)?;
        adjoint_conjugate(&w, gens.get(self.core)?)
    }

    /// Word of `exp(t X)` for the element this word represents:
    /// `W ++ (core, t) ++ W⁻¹`.
    pub fn exp_letters(&self, t: f64) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.len() + 1);
        out.extend_from_slice(&self.factors);
        out.push(Letter::new(self.core, t));
        out.extend(inverse_letters(&self.factors));
        out
    }
}

/// One element added by completion.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedElement {
    pub element: AlgebraElement,
    pub word: ConjugationWord,
    /// Basis index of the conjugating element.
    pub conjugator: usize,
    /// Basis index of the conjugated element.
    pub conjugated: usize,
    pub time: f64,
    /// Relative norm of the component outside the previous span.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionConfig {
    pub t_grid: Vec<f64>,
    pub accept_score: f64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            t_grid: log_grid(0.05, 1.5, 8),
            accept_score: 0.1,
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Generators extended to a basis `X_1..X_n` of the algebra they generate.
#[derive(Debug, Clone)]
pub struct CompletedBasis {
    generators: GeneratorSet,
    extended: Vec<ExtendedElement>,
    schedule: RkSchedule,
    /// Orthonormal basis of the same span, used for chart coordinates.
    ortho: Vec<AlgebraElement>,
}

impl CompletedBasis {
    /// Reassembles a basis from stored parts, checking independence and
    /// that every stored element is reproduced by its word within `tol`.
    pub fn from_parts(generators: GeneratorSet, extended: Vec<ExtendedElement>, tol: f64) -> Result<Self> {
        let n = generators.len() + extended.len();
        let schedule = rk_schedule(n, generators.len())?;
        let mut all: Vec<AlgebraElement> = generators.elements().to_vec();
        all.extend(extended.iter().map(|e| e.element.clone()));
        let gr = gram_rank(&all, Tolerances::default().rank_tol)?;
        if gr.rank != n || gr.orthonormal_span.len() != n {
            return Err(Error::DependentGenerators { rank: gr.rank, count: n });
        }
        for e in &extended {
            let rebuilt = e.word.apply(&generators)?;
            let dev = mat_distance(rebuilt.mat(), e.element.mat());
            if dev > tol * e.element.norm().max(1.0) {
                return Err(Error::StructureViolation {
                    what: "conjugation word reproduction",
                    deviation: dev,
                    tol,
                });
            }
        }
        Ok(CompletedBasis {
            generators,
            extended,
            schedule,
            ortho: gr.orthonormal_span,
        })
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn extended(&self) -> &[ExtendedElement] {
        &self.extended
    }

    pub fn schedule(&self) -> &RkSchedule {
        &self.schedule
    }

    pub fn orthonormal(&self) -> &[AlgebraElement] {
        &self.ortho
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn n(&self) -> usize {
        self.generators.len() + self.extended.len()
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    /// Basis element `i` (zero-based; generators first).
    pub fn element(&self, i: usize) -> Result<&AlgebraElement> {
        let m = self.m();
        if i < m {
            self.generators.get(i)
        } else {
            self.extended
                .get(i - m)
                .map(|e| &e.element)
                .ok_or(Error::IndexOutOfRange { index: i, len: self.n() })
        }
    }

    pub fn elements(&self) -> Vec<&AlgebraElement> {
        (0..self.n()).map(|i| self.element(i).expect("in range")).collect()
    }

    pub fn word(&self, i: usize) -> Result<ConjugationWord> {
        let m = self.m();
        if i < m {
            Ok(ConjugationWord::generator(i))
        } else {
            self.extended
                .get(i - m)
                .map(|e| e.word.clone())
                .ok_or(Error::IndexOutOfRange { index: i, len: self.n() })
        }
    }

    /// Actual conjugator length at each completion step.
    pub fn achieved_r(&self) -> Vec<usize> {
        self.extended.iter().map(|e| e.word.len()).collect()
    }

    /// Largest deviation between a stored element and its word's replay.
    pub fn max_reproduction_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for e in &self.extended {
            let rebuilt = e.word.apply(&self.generators)?;
            worst = worst.max(mat_distance(rebuilt.mat(), e.element.mat()));
        }
        Ok(worst)
    }
}

struct Candidate {
    conjugator: usize,
    conjugated: usize,
    time: f64,
    score: f64,
    element: AlgebraElement,
}

/// Extends `gens` to a basis of the algebra they generate.
///
/// Candidates are all ordered pairs (conjugator, conjugated) of currently
/// available elements and every `t̃` in the grid, restricted to pairs whose
/// expanded conjugator length `2 r_c + 1 + r_p` does not exceed the
/// schedule value `r_k` for this step. The best-scoring candidate wins;
/// ties go to the earliest (conjugator, conjugated, t̃) in iteration order.
pub fn complete_basis(gens: &GeneratorSet, algebra: &AlgebraBasis, cfg: &CompletionConfig) -> Result<CompletedBasis> {
    let m = gens.len();
    let n = algebra.dim_algebra;
    let schedule = rk_schedule(n, m)?;
    if cfg.t_grid.is_empty() {
        return Err(Error::InvalidConfig("t_grid must not be empty".into()));
    }
    let mut span = gram_rank(gens.elements(), Tolerances::default().rank_tol)?.orthonormal_span;
    let mut avail: Vec<(AlgebraElement, ConjugationWord)> = gens
        .elements()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), ConjugationWord::generator(i)))
        .collect();
    let mut extended = Vec::with_capacity(n - m);

    for step in 1..=(n - m) {
        let limit = schedule.values[step - 1] as usize;
        let mut jobs = Vec::new();
        for c in 0..avail.len() {
            for p in 0..avail.len() {
                if c == p || 2 * avail[c].1.len() + 1 + avail[p].1.len() > limit {
                    continue;
                }
                for &t in &cfg.t_grid {
                    jobs.push((c, p, t));
                }
            }
        }
        let scored: Vec<Result<Candidate>> = jobs
            .par_iter()
            .map(|&(c, p, t)| {
                let k = avail[c].0.exp(t)?;
                let element = adjoint_conjugate(&k, &avail[p].0)?;
                let r = orthogonal_residual(element.mat(), &span);
                let score = r.norm() / element.norm();
                Ok(Candidate {
                    conjugator: c,
                    conjugated: p,
                    time: t,
                    score,
                    element,
                })
            })
            .collect();
        let mut best: Option<Candidate> = None;
        for cand in scored {
            let cand = cand?;
            if best.as_ref().is_none_or(|b| cand.score > b.score) {
                best = Some(cand);
            }
        }
        let best = match best {
            Some(b) if b.score >= cfg.accept_score => b,
            other => {
                return Err(Error::StuckNoIndependentConjugate {
                    step,
                    best_score: other.map_or(0.0, |b| b.score),
                })
            }
        };

        let wc = &avail[best.conjugator].1;
        let wp = &avail[best.conjugated].1;
        let mut factors = wc.exp_letters(best.time);
        factors.extend_from_slice(&wp.factors);
        let word = ConjugationWord { factors, core: wp.core };

        let r = orthogonal_residual(best.element.mat(), &span);
        let nrm = r.norm();
        span.push(AlgebraElement::from_parts(
            r / num_complex::Complex64::new(nrm, 0.0),
            best.element.structure(),
        ));
        avail.push((best.element.clone(), word.clone()));
        extended.push(ExtendedElement {
            element: best.element,
            word,
            conjugator: best.conjugator,
            conjugated: best.conjugated,
            time: best.time,
            score: best.score,
        });
    }

    CompletedBasis::from_parts(gens.clone(), extended, 1e-10)
}

/// Conjugator sequence of basis entry `index` over the original generators.
pub fn expand_word(index: usize, basis: &CompletedBasis) -> Result<Vec<Letter>> {
    Ok(basis.word(index)?.factors)
}

/// Number of one-parameter factors `exp(t X_index)` expands to.
pub fn exp_factor_count(index: usize, basis: &CompletedBasis) -> Result<usize> {
    Ok(2 * basis.word(index)?.len() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bracket_closure, ClosureConfig};
    use crate::demos::{so3_rotations, su2_basis, su2_pauli_pair};

    fn complete(g: &GeneratorSet) -> CompletedBasis {
        let alg = bracket_closure(g, &ClosureConfig::default()).unwrap();
        complete_basis(g, &alg, &CompletionConfig::default()).unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(rk_schedule(3, 2).unwrap(), RkSchedule { values: vec![1], bound: 5 });
        assert_eq!(rk_schedule(3, 3).unwrap(), RkSchedule { values: vec![], bound: 3 });
        assert_eq!(
            rk_schedule(8, 2).unwrap(),
            RkSchedule {
                values: vec![1, 2, 5, 10, 21, 42],
                bound: 170
            }
        );
        assert!(matches!(rk_schedule(2, 3), Err(Error::InvalidDims { .. })));
        assert!(matches!(rk_schedule(3, 0), Err(Error::InvalidDims { .. })));
    }

    #[test]
    fn schedule_recursion_to_twenty() {
        let s = rk_schedule(21, 1).unwrap();
        assert_eq!(s.values.len(), 20);
        for k in 2..20 {
            assert_eq!(s.values[k], 2 * s.values[k - 2] + s.values[k - 1] + 1);
        }
    }

    #[test]
    fn su2_pair_completes_in_one_step() {
        let b = complete(&su2_pauli_pair());
        assert_eq!(b.n(), 3);
        assert_eq!(b.achieved_r(), vec![1]);
        let e3 = &su2_basis()[2];
        let comp = crate::matrix::frobenius_inner(b.element(2).unwrap(), e3).unwrap();
        assert!(comp.abs() > 0.1);
        assert!(b.max_reproduction_error().unwrap() < 1e-10);
        assert_eq!(expand_word(0, &b).unwrap(), vec![]);
        assert_eq!(expand_word(2, &b).unwrap().len(), 1);
        assert_eq!(exp_factor_count(0, &b).unwrap(), 1);
        assert_eq!(exp_factor_count(2, &b).unwrap(), 3);
        assert!(matches!(exp_factor_count(3, &b), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn first_step_matches_adjoint_rotation() {
        // Ad(exp(0.5 e₁)) e₂ = cos(0.5) e₂ + sin(0.5) e₃
        let e = su2_basis();
        let k = e[0].exp(0.5).unwrap();
        let got = adjoint_conjugate(&k, &e[1]).unwrap();
        let want = e[1].scale(0.5f64.cos()).add(&e[2].scale(0.5f64.sin()));
        assert!(mat_distance(got.mat(), want.mat()) < 1e-14);
    }

    #[test]
    fn full_basis_needs_no_completion() {
        let g = GeneratorSet::new(su2_basis(), vec![]).unwrap();
        let b = complete(&g);
        assert!(b.extended().is_empty());
        assert!(b.achieved_r().is_empty());
    }

    #[test]
    fn so3_completes() {
        let b = complete(&so3_rotations());
        assert_eq!(b.n(), 3);
        assert_eq!(b.achieved_r(), vec![1]);
    }

    #[test]
    fn impossible_threshold_is_reported() {
        let g = su2_pauli_pair();
        let alg = bracket_closure(&g, &ClosureConfig::default()).unwrap();
        let cfg = CompletionConfig {
            t_grid: vec![0.05],
            accept_score: 0.5,
        };
        match complete_basis(&g, &alg, &cfg) {
            Err(Error::StuckNoIndependentConjugate { step: 1, best_score }) => {
                assert!((best_score - 0.05f64.sin()).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
