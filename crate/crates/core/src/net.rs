//! Finite covers of the group and end-to-end synthesis.
//!
//! A [`CoverNet`] is a greedy ε-net of group elements, each carrying a
//! generator word, such that every element of the group lies within
//! `radius` of some net point. Any target then factors as
//! `target = R · K_i` with `R` close to the identity; `R` is solved in the
//! identity chart and its word is prepended to the word of `K_i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{chart_solve, substitute_conjugations, SolverConfig};
use crate::completion::CompletedBasis;
use crate::error::{Error, Result};
use crate::matrix::{mat_distance, GroupElement, GroupKind, Matrix};
use crate::word::{group_of, replay, GeneratorWord, Letter};
use nalgebra::Complex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub seed: u64,
    /// Letters per random candidate word.
    pub walk_length: usize,
    /// Candidate times are uniform in `[-t_max, t_max]`.
    pub t_max: f64,
    /// Consecutive rejected candidates that end a round.
    pub stall_count: usize,
    pub validation_samples: usize,
    /// Validation rounds; each failed round resumes streaming with a doubled
    /// stall count.
    pub max_rounds: usize,
    /// Hard cap on streamed candidates across all rounds.
    pub max_candidates: usize,
    /// Streaming stops once the net has this many points; a radius too
    /// small for the group then fails validation instead of running for
    /// quadratic time.
    pub max_points: usize,
    /// After a failed validation round, insert uncovered samples that the
    /// chart can reach from their nearest net point.
    pub repair_gaps: bool,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            seed: 0,
            walk_length: 6,
            t_max: 3.0,
            stall_count: 500,
            validation_samples: 2000,
            max_rounds: 6,
            max_candidates: 2_000_000,
            max_points: 50_000,
            repair_gaps: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetPoint {
    #[serde(with = "crate::io::matrix_json")]
    pub element: Matrix,
    pub word: GeneratorWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub samples_tested: usize,
    pub max_gap_observed: f64,
    pub candidates_streamed: usize,
    pub rounds: usize,
    /// Points inserted by gap repair.
    pub repaired: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverNet {
    pub group: GroupKind,
    pub radius: f64,
    pub config: NetConfig,
    pub points: Vec<NetPoint>,
    pub coverage_stats: CoverageStats,
}

impl CoverNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.points.iter().map(|p| p.word.len()).max().unwrap_or(0)
    }

    pub fn validated(&self) -> bool {
        self.coverage_stats.max_gap_observed <= self.radius
    }

    /// Distance from `x` to the closest net point.
    pub fn min_distance(&self, x: &Matrix) -> f64 {
        self.points
            .iter()
            .map(|p| mat_distance(&p.element, x))
            .fold(f64::INFINITY, f64::min)
    }

    fn covers(&self, x: &Matrix, radius: f64) -> bool {
        let r2 = radius * radius;
        self.points.iter().any(|p| within_sq(&p.element, x, r2))
    }
}

fn within_sq(a: &Matrix, b: &Matrix, r2: f64) -> bool {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        s += (x - y).norm_sqr();
        if s > r2 {
            return false;
        }
    }
    true
}

/// Haar-distributed element of the given compact group: QR of a Gaussian
/// matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_random<R: Rng + ?Sized>(dim: usize, group: GroupKind, rng: &mut R) -> Result<GroupElement> {
    let real = matches!(group, GroupKind::SpecialOrthogonal);
    let g = Matrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        Complex::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { Complex::new(1.0, 0.0) } else { d / d.norm() };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    match group {
        GroupKind::Unitary => {}
        GroupKind::SpecialUnitary => {
            let det = q.determinant();
            let fix = Complex::from_polar(1.0, -det.arg() / dim as f64);
            q *= fix;
        }
        GroupKind::SpecialOrthogonal => {
            q = q.map(|z| Complex::new(z.re, 0.0));
            if q.determinant().re < 0.0 {
                let mut col = q.column_mut(0);
                col *= Complex::new(-1.0, 0.0);
            }
        }
        GroupKind::GeneralLinearComponent => return Err(Error::NonCompactDirection),
    }
    Ok(GroupElement::from_parts(q, group))
}

fn random_word(rng: &mut ChaCha8Rng, m: usize, cfg: &NetConfig) -> Vec<Letter> {
    (0..cfg.walk_length)
        .map(|_| {
            let g = rng.random_range(0..m);
            let t = rng.random_range(-cfg.t_max..=cfg.t_max);
            Letter::new(g, t)
        })
        .collect()
}

/// Greedy randomized ε-net with a-posteriori Haar validation.
///
/// The identity (empty word) is inserted first. Random words are then
/// streamed from the seeded generator and a candidate joins the net iff it
/// is farther than `radius` from every existing point. A round ends after
/// `stall_count · 2^round` consecutive rejections and is validated on fresh
/// Haar samples; streaming resumes until a round validates or the round or
/// candidate budget runs out. Between rounds, uncovered validation samples
/// within chart reach of the net are inserted with a chart word prefixed to
/// their nearest point's word (see [`NetConfig::repair_gaps`]).
pub fn build_net(basis: &CompletedBasis, radius: f64, cfg: &NetConfig) -> Result<CoverNet> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("net radius must be positive, got {radius}")));
    }
    if cfg.walk_length == 0 || cfg.max_rounds == 0 || !(cfg.t_max > 0.0) {
        return Err(Error::InvalidConfig("walk_length, max_rounds and t_max must be positive".into()));
    }
    let gens = basis.generators();
    let group = group_of(gens);
    if !group.is_unitary() {
        return Err(Error::NonCompactDirection);
    }
    let dim = gens.dim();
    let mut walk_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut val_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);

    let mut net = CoverNet {
        group,
        radius,
        config: cfg.clone(),
        points: vec![NetPoint {
            element: Matrix::identity(dim, dim),
            word: GeneratorWord::empty(),
        }],
        coverage_stats: CoverageStats {
            samples_tested: 0,
            max_gap_observed: f64::INFINITY,
            candidates_streamed: 0,
            rounds: 0,
            repaired: 0,
        },
    };

    for round in 0..cfg.max_rounds {
        let stall_limit = cfg.stall_count.saturating_mul(1 << round.min(30));
        let mut stall = 0;
        let budget_left =
            |n: &CoverNet| n.coverage_stats.candidates_streamed < cfg.max_candidates && n.points.len() < cfg.max_points;
        while stall < stall_limit && budget_left(&net) {
            net.coverage_stats.candidates_streamed += 1;
            let letters = random_word(&mut walk_rng, gens.len(), cfg);
            let k = replay(&letters, gens)?.into_mat();
            if net.covers(&k, radius) {
                stall += 1;
            } else {
                stall = 0;
                net.points.push(NetPoint {
                    element: k,
                    word: GeneratorWord::new(letters, cfg.walk_length as u64, 0.0),
                });
            }
        }
        let samples: Vec<Matrix> = (0..cfg.validation_samples)
            .map(|_| haar_random(dim, group, &mut val_rng).map(GroupElement::into_mat))
            .collect::<Result<_>>()?;
        let gaps: Vec<f64> = samples.par_iter().map(|s| net.min_distance(s)).collect();
        let gap = gaps.iter().copied().fold(0.0, f64::max);
        net.coverage_stats.samples_tested = samples.len();
        net.coverage_stats.max_gap_observed = gap;
        net.coverage_stats.rounds = round + 1;
        if gap <= radius || !budget_left(&net) {
            break;
        }
        if cfg.repair_gaps && round + 1 < cfg.max_rounds {
            for (s, _) in samples.iter().zip(&gaps).filter(|(_, &g)| g > radius) {
                if let Some(p) = repair_point(&net, s, basis, radius)? {
                    net.points.push(p);
                    net.coverage_stats.repaired += 1;
                }
            }
        }
    }

    if net.validated() {
        Ok(net)
    } else {
        Err(Error::CoverageNotReached {
            max_gap: net.coverage_stats.max_gap_observed,
            radius,
            net: Box::new(net),
        })
    }
}

/// Writes an uncovered sample `s` as (chart word of `s·K⁻¹`) ++ (word of
/// `K`) for its nearest net point `K`. The replayed word becomes the new
/// point, so its word is exact by construction.
fn repair_point(net: &CoverNet, s: &Matrix, basis: &CompletedBasis, radius: f64) -> Result<Option<NetPoint>> {
    if net.covers(s, radius) {
        return Ok(None);
    }
    let solver = SolverConfig::default();
    let Some((_, nearest)) = net
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (mat_distance(&p.element, s), i))
        .min_by(|a, b| a.0.total_cmp(&b.0))
    else {
        return Ok(None);
    };
    let k = &net.points[nearest];
    let residual = GroupElement::from_parts(s * k.element.adjoint(), net.group);
    let coords = match chart_solve(&residual, basis, &solver) {
        Ok(c) => c,
        Err(Error::OutsideChart { .. } | Error::NoConvergence { .. } | Error::BranchCut { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let chart_word = substitute_conjugations(&coords.times, basis, solver.prune_tol)?;
    let mut letters = chart_word.letters;
    letters.extend_from_slice(&k.word.letters);
    let element = replay(&letters, basis.generators())?.into_mat();
    if net.covers(&element, radius) {
        return Ok(None);
    }
    let bound = k.word.meta.bound_used + basis.schedule().bound;
    Ok(Some(NetPoint {
        element,
        word: GeneratorWord::new(letters, bound, 0.0),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub word: GeneratorWord,
    pub target_error: f64,
    pub net_point_index: usize,
    pub chart_word_length: usize,
    pub chart_iterations: usize,
}

/// Number of nearest net points tried before giving up.
const NET_ATTEMPTS: usize = 3;

/// Writes `target` as (chart word) ++ (net word).
///
/// Net points are tried in order of `‖target − K_i‖_F`, which equals the
/// distance of the residual `target · K_i⁻¹` to the identity for unitary
/// groups.
pub fn synthesize(
    target: &GroupElement,
    net: &CoverNet,
    basis: &CompletedBasis,
    cfg: &SolverConfig,
) -> Result<SynthesisResult> {
    if target.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: basis.dim(),
            found: target.dim(),
        });
    }
    target.check(cfg.tolerances.group_tol)?;
    if net.is_empty() {
        return Err(Error::EmptyInput);
    }
    let group = group_of(basis.generators());
    let mut order: Vec<(f64, usize)> = net
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (mat_distance(&p.element, target.mat()), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let bound = net.max_word_len() as u64 + basis.schedule().bound;
    let mut last_err = None;
    for &(_, idx) in order.iter().take(NET_ATTEMPTS) {
        let point = &net.points[idx];
        let residual = GroupElement::from_parts(target.mat() * point.element.adjoint(), group);
        let coords = match chart_solve(&residual, basis, cfg) {
            Ok(c) => c,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let chart_word = substitute_conjugations(&coords.times, basis, cfg.prune_tol)?;
        let chart_word_length = chart_word.len();
        let mut letters = chart_word.letters;
        letters.extend_from_slice(&point.word.letters);
        let replayed = replay(&letters, basis.generators())?;
        let target_error = mat_distance(replayed.mat(), target.mat());
        if target_error > cfg.final_tol_total {
            last_err = Some(Error::NoConvergence {
                iterations: coords.iterations,
                residual: target_error,
                condition: None,
            });
            continue;
        }
        return Ok(SynthesisResult {
            word: GeneratorWord::new(letters, bound, target_error),
            target_error,
            net_point_index: idx,
            chart_word_length,
            chart_iterations: coords.iterations,
        });
    }
    Err(last_err.unwrap_or(Error::NoConvergence {
        iterations: 0,
        residual: order.first().map_or(f64::INFINITY, |o| o.0),
        condition: None,
    }))
}

/// Synthesizes many targets in parallel; results keep input order.
pub fn synthesize_batch(
    targets: &[GroupElement],
    net: &CoverNet,
    basis: &CompletedBasis,
    cfg: &SolverConfig,
) -> Vec<Result<SynthesisResult>> {
    targets.par_iter().map(|t| synthesize(t, net, basis, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bracket_closure, ClosureConfig};
    use crate::completion::{complete_basis, CompletionConfig};
    use crate::demos::su2_pauli_pair;

    fn basis() -> CompletedBasis {
        let g = su2_pauli_pair();
        let alg = bracket_closure(&g, &ClosureConfig::default()).unwrap();
        complete_basis(&g, &alg, &CompletionConfig::default()).unwrap()
    }

    #[test]
    fn haar_samples_are_in_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for group in [GroupKind::Unitary, GroupKind::SpecialUnitary, GroupKind::SpecialOrthogonal] {
            for _ in 0..20 {
                let k = haar_random(3, group, &mut rng).unwrap();
                k.check(1e-12).unwrap();
            }
        }
        assert!(haar_random(2, GroupKind::GeneralLinearComponent, &mut rng).is_err());
    }

    #[test]
    fn huge_radius_gives_single_point() {
        let b = basis();
        let cfg = NetConfig {
            stall_count: 50,
            validation_samples: 100,
            ..NetConfig::default()
        };
        let net = build_net(&b, 10.0, &cfg).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.points[0].word.is_empty());
    }

    #[test]
    fn bad_radius() {
        let b = basis();
        assert!(matches!(
            build_net(&b, 0.0, &NetConfig::default()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn target_at_net_point_uses_its_word() {
        let b = basis();
        let cfg = NetConfig {
            stall_count: 200,
            validation_samples: 200,
            max_rounds: 1,
            ..NetConfig::default()
        };
        let net = match build_net(&b, 0.8, &cfg) {
            Ok(n) => n,
            Err(Error::CoverageNotReached { net, .. }) => *net,
            Err(e) => panic!("{e}"),
        };
        let idx = net.len() - 1;
        let target = GroupElement::from_parts(net.points[idx].element.clone(), GroupKind::SpecialUnitary);
        let r = synthesize(&target, &net, &b, &SolverConfig::default()).unwrap();
        assert_eq!(r.net_point_index, idx);
        assert_eq!(r.chart_word_length, 0);
        assert_eq!(r.word.letters, net.points[idx].word.letters);
    }
}
