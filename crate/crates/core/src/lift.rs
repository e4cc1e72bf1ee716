//! Nonnegative-time words.
//!
//! In a compact group the one-parameter subgroup `exp(sX)` is recurrent:
//! every reverse factor `exp(−|t| X)` is approximated by a forward factor
//! `exp(t⁺ X)` with `t⁺ ≥ 0`. When the eigen-phases of `X` are rationally
//! related the subgroup is periodic and `t⁺ = T − (|t| mod T)` is exact;
//! otherwise the phases wind densely on a torus and `t⁺` is found by search.
//!
//! Errors compose additively: for unitary factors
//! `‖Π A_i − Π B_i‖_F ≤ Σ ‖A_i − B_i‖_F`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::GeneratorSet;
use crate::chart::SolverConfig;
use crate::completion::CompletedBasis;
use crate::error::{Error, Result};
use crate::matrix::{expm, mat_distance, AlgebraElement, GroupElement};
use crate::net::{synthesize, CoverNet, SynthesisResult};
use crate::word::{replay, GeneratorWord, Letter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceConfig {
    /// Relative tolerance for treating two eigen-phase ratios as rational.
    pub commensurate_tol: f64,
    /// Largest denominator tried when rationalizing phase ratios.
    pub max_denominator: u64,
    /// Search horizon; `None` means `1e4 · 2π / ‖X‖₂`.
    pub t_max: Option<f64>,
    /// Function evaluations allowed per letter.
    pub max_evals: usize,
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        RecurrenceConfig {
            commensurate_tol: 1e-9,
            max_denominator: 64,
            t_max: None,
            max_evals: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxMethod {
    /// Input time was already nonnegative.
    Unchanged,
    /// Closed-form period of a commensurate spectrum.
    Period,
    /// Torus search followed by local refinement.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseApprox {
    pub t_pos: f64,
    /// `‖exp(t_pos X) − exp(t X)‖_F`, evaluated with the matrix exponential.
    pub achieved_error: f64,
    pub search_budget_used: usize,
    pub method: ApproxMethod,
}

/// Eigen-phases `θ_j` of a skew-Hermitian `X` (eigenvalues `iθ_j`).
fn eigen_phases(x: &AlgebraElement) -> Result<Vec<f64>> {
    if !x.structure().is_compact() {
        return Err(Error::NonCompactDirection);
    }
    // H = iX is Hermitian and has eigenvalues −θ_j.
    let h = x.mat() * Complex64::new(0.0, 1.0);
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    Ok(eig.eigenvalues.iter().map(|l| -l).collect())
}

/// `‖exp(sX) − exp(tX)‖_F` from the eigen-phases; exact for normal `X`.
fn phase_distance(phases: &[f64], s: f64, t: f64) -> f64 {
    let u = s - t;
    phases
        .iter()
        .map(|th| 2.0 - 2.0 * (th * u).cos())
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Best rational approximation `p/q` of `x` with `q ≤ max_den`, by
/// continued fractions.
fn rationalize(x: f64, max_den: u64) -> (i64, u64) {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut v = x;
    let mut best = (x.round() as i64, 1u64);
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i64;
        let h2 = ai.saturating_mul(h1).saturating_add(h0);
        let k2 = (ai.max(0) as u64).saturating_mul(k1).saturating_add(k0);
        if k2 > max_den || k2 == 0 {
            break;
        }
        best = (h2, k2);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    best
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Common period of the phases if every ratio to the largest phase is
/// rational with small denominator.
fn common_period(phases: &[f64], cfg: &RecurrenceConfig) -> Option<f64> {
    let reference = phases.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if reference == 0.0 {
        return None;
    }
    let mut lcm: u64 = 1;
    for &th in phases {
        let rho = th / reference;
        let (p, q) = rationalize(rho, cfg.max_denominator);
        if (rho - p as f64 / q as f64).abs() > cfg.commensurate_tol {
            return None;
        }
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > cfg.max_denominator.saturating_mul(cfg.max_denominator) {
            return None;
        }
    }
    Some(2.0 * PI * lcm as f64 / reference)
}

fn direct_error(x: &AlgebraElement, s: f64, t: f64) -> Result<f64> {
    let a = expm(&(x.mat() * Complex64::new(s, 0.0)))?;
    let b = expm(&(x.mat() * Complex64::new(t, 0.0)))?;
    Ok(mat_distance(&a, &b))
}

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize, evals: &mut usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    *evals += 2;
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
        *evals += 1;
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Finds `t⁺ ≥ 0` with `‖exp(t⁺ X) − exp(t X)‖_F ≤ tol`.
///
/// Commensurate spectra use the closed-form period. Otherwise the search
/// visits the times `s_k = t + 2πk/θ_max` at which the fastest phase
/// realigns (consecutive visits are one fastest-phase period apart, so a
/// solution with error `ε` lies next to a visit with error at most
/// `(1 + √d) ε`), and refines promising visits by golden section.
pub fn reverse_time_approx(x: &AlgebraElement, t: f64, tol: f64, cfg: &RecurrenceConfig) -> Result<ReverseApprox> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    if t >= 0.0 {
        return Ok(ReverseApprox {
            t_pos: t,
            achieved_error: 0.0,
            search_budget_used: 0,
            method: ApproxMethod::Unchanged,
        });
    }
    let phases = eigen_phases(x)?;
    let reference = phases.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if reference == 0.0 {
        return Ok(ReverseApprox {
            t_pos: 0.0,
            achieved_error: direct_error(x, 0.0, t)?,
            search_budget_used: 1,
            method: ApproxMethod::Period,
        });
    }

    if let Some(period) = common_period(&phases, cfg) {
        let mut t_pos = period - t.abs().rem_euclid(period);
        if t_pos >= period {
            t_pos -= period;
        }
        let t_pos = t_pos.max(0.0);
        let err = direct_error(x, t_pos, t)?;
        if err <= tol {
            return Ok(ReverseApprox {
                t_pos,
                achieved_error: err,
                search_budget_used: 1,
                method: ApproxMethod::Period,
            });
        }
    }

    let horizon = cfg.t_max.unwrap_or(1e4 * 2.0 * PI / reference);
    let step = 2.0 * PI / reference;
    let screen = (1.0 + (phases.len() as f64).sqrt()) * tol;
    let f = |s: f64| phase_distance(&phases, s, t);
    let mut evals = 0usize;
    let mut best = (0.0, f(0.0));
    evals += 1;
    let k0 = (t.abs() / step).ceil() as u64;
    let mut k = k0.max(1);
    loop {
        let s = t + step * k as f64;
        if s > horizon || evals >= cfg.max_evals {
            break;
        }
        let fs = f(s);
        evals += 1;
        if fs < best.1 {
            best = (s, fs);
        }
        if fs <= screen {
            let lo = (s - 0.5 * step).max(0.0);
            let (sr, fr) = golden_min(f, lo, s + 0.5 * step, 200, &mut evals);
            let (cand, fc) = if fr < fs { (sr, fr) } else { (s, fs) };
            if fc < best.1 {
                best = (cand, fc);
            }
            if fc <= tol {
                let err = direct_error(x, cand, t)?;
                if err <= tol {
                    return Ok(ReverseApprox {
                        t_pos: cand,
                        achieved_error: err,
                        search_budget_used: evals,
                        method: ApproxMethod::Search,
                    });
                }
            }
        }
        k += 1;
    }
    Err(Error::BudgetExhausted {
        evals,
        best_time: best.0,
        best_error: best.1,
        letter: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegWord {
    pub letters: Vec<Letter>,
    /// Sum of per-letter approximation errors; bounds the replay distance
    /// to the original word.
    pub lift_error: f64,
    pub original_length: usize,
    pub lifted_letters: usize,
}

impl NonnegWord {
    pub fn into_word(self, bound_used: u64, product_error: f64) -> GeneratorWord {
        GeneratorWord::new(self.letters, bound_used, product_error)
    }
}

/// Replaces every negative-time letter by its forward approximation.
pub fn lift_word_nonneg(
    letters: &[Letter],
    gens: &GeneratorSet,
    per_factor_tol: f64,
    cfg: &RecurrenceConfig,
) -> Result<NonnegWord> {
    for l in letters {
        gens.get(l.generator)?;
    }
    // Distinct negative letters, first occurrence order.
    let mut index: HashMap<(usize, u64), usize> = HashMap::new();
    let mut jobs: Vec<(usize, f64, usize)> = Vec::new();
    for (pos, l) in letters.iter().enumerate() {
        if l.time < 0.0 {
            index.entry((l.generator, l.time.to_bits())).or_insert_with(|| {
                jobs.push((l.generator, l.time, pos));
                jobs.len() - 1
            });
        }
    }
    let solved: Vec<Result<ReverseApprox>> = jobs
        .par_iter()
        .map(|&(g, t, pos)| {
            reverse_time_approx(&gens.elements()[g], t, per_factor_tol, cfg).map_err(|e| match e {
                Error::BudgetExhausted {
                    evals,
                    best_time,
                    best_error,
                    ..
                } => Error::BudgetExhausted {
                    evals,
                    best_time,
                    best_error,
                    letter: Some(pos),
                },
                other => other,
            })
        })
        .collect();
    let solved: Vec<ReverseApprox> = solved.into_iter().collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(letters.len());
    let mut lift_error = 0.0;
    let mut lifted = 0;
    for l in letters {
        if l.time < 0.0 {
            let a = solved[index[&(l.generator, l.time.to_bits())]];
            out.push(Letter::new(l.generator, a.t_pos));
            lift_error += a.achieved_error;
            lifted += 1;
        } else {
            out.push(*l);
        }
    }
    Ok(NonnegWord {
        letters: out,
        lift_error,
        original_length: letters.len(),
        lifted_letters: lifted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegSynthesis {
    pub word: NonnegWord,
    pub synthesis: SynthesisResult,
    /// Measured replay distance of the nonnegative word to the target.
    pub target_error: f64,
    /// `synthesis.target_error + word.lift_error`.
    pub error_bound: f64,
}

/// Synthesis followed by nonnegative lifting.
pub fn nonneg_synthesize(
    target: &GroupElement,
    net: &CoverNet,
    basis: &CompletedBasis,
    solver: &SolverConfig,
    per_factor_tol: f64,
    cfg: &RecurrenceConfig,
) -> Result<NonnegSynthesis> {
    let synthesis = synthesize(target, net, basis, solver)?;
    let word = lift_word_nonneg(&synthesis.word.letters, basis.generators(), per_factor_tol, cfg)?;
    let replayed = replay(&word.letters, basis.generators())?;
    let target_error = mat_distance(replayed.mat(), target.mat());
    let error_bound = synthesis.target_error + word.lift_error;
    Ok(NonnegSynthesis {
        word,
        synthesis,
        target_error,
        error_bound,
    })
}
