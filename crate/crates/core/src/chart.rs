//! Coordinates of the second kind near the identity.
//!
//! `F(t) = exp(t_1 X_1) · · · exp(t_n X_n)` over a completed basis is a local
//! diffeomorphism at `t = 0`. [`chart_solve`] inverts it by Newton's method
//! on the multiplicative residual `log(target · F(t)⁻¹)`, and
//! [`substitute_conjugations`] rewrites the resulting product over the
//! original generators only.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::completion::CompletedBasis;
use crate::error::{Error, Result};
use crate::matrix::{
    adjoint_conjugate, coordinates, distance_to_identity, logm_principal, mat_distance, GroupElement, Matrix,
    Tolerances,
};
use crate::word::{group_of, replay, GeneratorWord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest Frobenius distance to the identity accepted by the chart.
    pub chart_radius: f64,
    pub max_iters: usize,
    /// Required Frobenius residual of a chart solve.
    pub final_tol: f64,
    /// Factors with `|t| < prune_tol` are dropped from substituted words.
    pub prune_tol: f64,
    /// Jacobians with a larger condition number abort the solve.
    pub max_condition: f64,
    /// Required replay error of an end-to-end synthesis.
    pub final_tol_total: f64,
    pub tolerances: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            chart_radius: 0.5,
            max_iters: 50,
            final_tol: 1e-10,
            prune_tol: 1e-12,
            max_condition: 1e8,
            final_tol_total: 1e-8,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartCoordinates {
    pub times: Vec<f64>,
    /// Frobenius distance between `F(times)` and the target.
    pub residual: f64,
    pub iterations: usize,
}

fn check_len(times: &[f64], basis: &CompletedBasis) -> Result<()> {
    if times.len() != basis.n() {
        return Err(Error::DimMismatch {
            expected: basis.n(),
            found: times.len(),
        });
    }
    Ok(())
}

/// `Π_i exp(t_i X_i)` in basis order.
pub fn chart_forward(times: &[f64], basis: &CompletedBasis) -> Result<GroupElement> {
    check_len(times, basis)?;
    let d = basis.dim();
    let mut acc = Matrix::identity(d, d);
    for (i, &t) in times.iter().enumerate() {
        if t != 0.0 {
            acc = acc * basis.element(i)?.exp(t)?.mat();
        }
    }
    Ok(GroupElement::from_parts(acc, group_of(basis.generators())))
}

/// Right-trivialized Jacobian of the chart: column `j` holds the orthonormal
/// coordinates of `Ad_{P_j} X_j` with `P_j = Π_{i<j} exp(t_i X_i)`, so that
/// `dF · F⁻¹ = Σ_j J_j dt_j`.
pub fn chart_jacobian(times: &[f64], basis: &CompletedBasis) -> Result<DMatrix<f64>> {
    Ok(forward_and_jacobian(times, basis)?.1)
}

fn forward_and_jacobian(times: &[f64], basis: &CompletedBasis) -> Result<(Matrix, DMatrix<f64>)> {
    check_len(times, basis)?;
    let n = basis.n();
    let d = basis.dim();
    let group = group_of(basis.generators());
    let ortho = basis.orthonormal();
    let mut jac = DMatrix::<f64>::zeros(ortho.len(), n);
    let mut prefix = Matrix::identity(d, d);
    for (j, &t) in times.iter().enumerate() {
        let x = basis.element(j)?;
        let p = GroupElement::from_parts(prefix.clone(), group);
        let col = adjoint_conjugate(&p, x)?;
        jac.set_column(j, &coordinates(col.mat(), ortho));
        if t != 0.0 {
            prefix = prefix * x.exp(t)?.mat();
        }
    }
    Ok((prefix, jac))
}

/// Newton solve of `F(t) = target` for a target near the identity.
///
/// Each step solves `J Δt = c`, where `c` are the coordinates of
/// `log(target · F(t)⁻¹)`; the step is halved until the Frobenius residual
/// decreases.
pub fn chart_solve(target: &GroupElement, basis: &CompletedBasis, cfg: &SolverConfig) -> Result<ChartCoordinates> {
    if target.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            found: target.dim(),
        });
    }
    let dist = distance_to_identity(target.mat());
    if dist > cfg.chart_radius {
        return Err(Error::OutsideChart {
            distance: dist,
            radius: cfg.chart_radius,
        });
    }
    let group = group_of(basis.generators());
    let n = basis.n();
    let mut times = vec![0.0; n];
    let mut current = Matrix::identity(basis.dim(), basis.dim());
    let mut residual = dist;
    let mut iterations = 0;
    let mut last_condition = None;

    while residual > cfg.final_tol {
        if iterations == cfg.max_iters {
            return Err(Error::NoConvergence {
                iterations,
                residual,
                condition: last_condition,
            });
        }
        iterations += 1;
        let (_, jac) = forward_and_jacobian(&times, basis)?;
        let inv = GroupElement::from_parts(current.clone(), group).inverse()?;
        let r = GroupElement::from_parts(target.mat() * inv.mat(), group);
        let log = logm_principal(&r, &cfg.tolerances)?;
        let rhs = coordinates(log.mat(), basis.orthonormal());

        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        last_condition = Some(condition);
        if condition > cfg.max_condition {
            return Err(Error::NoConvergence {
                iterations,
                residual,
                condition: Some(condition),
            });
        }
        let step: DVector<f64> = svd
            .solve(&rhs, 0.0)
            .map_err(|m| Error::InvalidConfig(m.to_string()))?;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = times.iter().zip(step.iter()).map(|(t, d)| t + lambda * d).collect();
            let f = chart_forward(&trial, basis)?;
            let res = mat_distance(f.mat(), target.mat());
            if res < residual {
                times = trial;
                current = f.into_mat();
                residual = res;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual,
                condition: last_condition,
            });
        }
    }
    Ok(ChartCoordinates {
        times,
        residual,
        iterations,
    })
}

/// Rewrites `Π exp(t_i X_i)` over the original generators: generator
/// factors stay single letters, extended factors become
/// `W_i ++ (core_i, t_i) ++ W_i⁻¹`. Factors with `|t_i| < prune_tol` are
/// dropped; `product_error` is the measured replay distance to the chart
/// product.
pub fn substitute_conjugations(times: &[f64], basis: &CompletedBasis, prune_tol: f64) -> Result<GeneratorWord> {
    check_len(times, basis)?;
    let mut letters = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        if t.abs() < prune_tol {
            continue;
        }
        letters.extend(basis.word(i)?.exp_letters(t));
    }
    let replayed = replay(&letters, basis.generators())?;
    let exact = chart_forward(times, basis)?;
    let product_error = mat_distance(replayed.mat(), exact.mat());
    Ok(GeneratorWord::new(letters, basis.schedule().bound, product_error))
}
