//! Numerical evidence around unbiased pairs: general search, the fixed-σ
//! feasibility hunt, batch fuzzing and the contextuality gap.

mod optimize;
mod search;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use optimize::{coordinate_descent, golden_section, DescentResult, DescentSettings};
pub use search::{
    fixed_sigma_feasibility, givens_unitary, search_unbiased, Objective, SearchConfig, TrialReport,
    DEFAULT_FEASIBILITY_TOL, DEFAULT_GAP_TOL, DEFAULT_SEARCH_RESTARTS, FIXED_SIGMA_PRECONDITION_TOL,
};

use crate::decompose::{eigen_decomposition, equalize_from, max_mixed_pair, mix, Decomposition, EqualizeOptions};
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, DEFAULT_RANK_TOL};
use crate::metrics::average_trace_distance;
pub use crate::random::random_density;
use crate::random::{derive_seed, haar_unitary, rng_from_seed};

/// Allowed disagreement between computed and closed-form contextuality values.
pub const CONTEXTUALITY_TOL: f64 = 1e-10;
/// Slack below the trace distance before a fuzz trial counts as a violation.
pub const SANDWICH_LOWER_SLACK: f64 = 1e-10;
/// Slack above the upper bound before a fuzz trial counts as a violation.
pub const SANDWICH_UPPER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextualityReport {
    pub dim: usize,
    /// Δ of the unbiased pair of decompositions of I/d, `√(1 - 1/d)`.
    pub delta_unbiased: f64,
    /// Δ of two identical eigenbasis decompositions of I/d, `1 - 1/d`.
    pub delta_noncontextual_max: f64,
    pub gap: f64,
}

/// Evaluates both Δ values on explicit decompositions of I/d and checks them
/// against their closed forms.
pub fn contextuality_gap(dim: usize) -> Result<ContextualityReport> {
    if dim < 2 {
        return Err(Error::PreconditionViolated(format!("contextuality gap needs dim >= 2, got {dim}")));
    }
    let mixed = DensityMatrix::<f64>::maximally_mixed(dim);
    let unbiased = max_mixed_pair(&mixed, DEFAULT_RANK_TOL)?;
    let delta_unbiased = unbiased.delta_avg;
    let basis = eigen_decomposition(&mixed, DEFAULT_RANK_TOL)?;
    let delta_noncontextual_max = average_trace_distance(&basis, &basis)?;

    let inv = 1.0 / dim as f64;
    for (name, got, want) in
        [("unbiased", delta_unbiased, (1.0 - inv).sqrt()), ("noncontextual", delta_noncontextual_max, 1.0 - inv)]
    {
        if (got - want).abs() > CONTEXTUALITY_TOL {
            return Err(Error::TheoremViolation(format!("{name} value {got} differs from {want} at d = {dim}")));
        }
    }
    Ok(ContextualityReport {
        dim,
        delta_unbiased,
        delta_noncontextual_max,
        gap: delta_unbiased - delta_noncontextual_max,
    })
}

/// Minimal decomposition of `sigma` whose elements all have
/// `tr(ρσⱼ) = tr(ρσ)`, equalized from a Haar-mixed eigen decomposition.
pub fn equalized_decomposition(
    sigma: &DensityMatrix<f64>,
    rho: &DensityMatrix<f64>,
    seed: u64,
) -> Result<Decomposition<f64>> {
    let eigen = eigen_decomposition(sigma, DEFAULT_RANK_TOL)?;
    let mut rng = rng_from_seed(seed);
    let start = mix(&eigen, &haar_unitary::<f64>(eigen.len(), &mut rng))?;
    let opts = EqualizeOptions { seed, ..EqualizeOptions::default() };
    equalize_from(start, rho.matrix(), &opts).map(|(d, _)| d)
}

/// Random `(ρ, σ)` for one trial; ranks are uniform on `1..=dim`.
pub fn trial_states(dim: usize, seed: u64) -> (DensityMatrix<f64>, DensityMatrix<f64>) {
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let rank_rho = rng.random_range(1..=dim);
    let rank_sigma = rng.random_range(1..=dim);
    (random_density(dim, rank_rho, derive_seed(seed, 1)), random_density(dim, rank_sigma, derive_seed(seed, 2)))
}

/// Seed of trial `index` at dimension `dim` in a batch seeded with `seed`.
pub fn trial_seed(seed: u64, dim: usize, index: usize) -> u64 {
    derive_seed(seed, ((dim as u64) << 32) | index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSummary {
    pub dim: usize,
    pub trials: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    pub worst_gap: f64,
    pub sandwich_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub gap_tol: f64,
    pub extra_states: usize,
    pub per_dim: Vec<DimSummary>,
    pub sandwich_violations: usize,
    /// Set when any trial broke `δ ≤ Δ ≤ √(1 - tr(ρσ))`.
    pub theorem_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub trials: Vec<TrialReport>,
    pub summary: FuzzSummary,
}

fn sandwich_holds(r: &TrialReport) -> bool {
    r.lower - SANDWICH_LOWER_SLACK <= r.best_delta && r.best_delta <= r.upper + SANDWICH_UPPER_SLACK
}

/// Runs `trials` searches per dimension in parallel. Reports keep trial order
/// and depend only on the inputs, never on scheduling.
pub fn fuzz(dims: &[usize], trials: usize, seed: u64, config: &SearchConfig) -> Result<FuzzReport> {
    let jobs: Vec<(usize, usize)> = dims.iter().flat_map(|&d| (0..trials).map(move |t| (d, t))).collect();
    let reports = jobs
        .par_iter()
        .map(|&(dim, index)| {
            let s = trial_seed(seed, dim, index);
            let (rho, sigma) = trial_states(dim, s);
            search_unbiased(&rho, &sigma, &SearchConfig { seed: s, ..*config }).map(|(_, r)| r)
        })
        .collect::<Result<Vec<_>>>()?;

    let per_dim: Vec<DimSummary> = dims
        .iter()
        .map(|&dim| {
            let rs: Vec<&TrialReport> = reports.iter().filter(|r| r.dim == dim).collect();
            let converged = rs.iter().filter(|r| r.converged).count();
            DimSummary {
                dim,
                trials: rs.len(),
                converged,
                convergence_rate: if rs.is_empty() { 0.0 } else { converged as f64 / rs.len() as f64 },
                worst_gap: rs.iter().map(|r| r.gap()).fold(0.0, f64::max),
                sandwich_violations: rs.iter().filter(|r| !sandwich_holds(r)).count(),
            }
        })
        .collect();
    let sandwich_violations = reports.iter().filter(|r| !sandwich_holds(r)).count();
    Ok(FuzzReport {
        trials: reports,
        summary: FuzzSummary {
            seed,
            gap_tol: config.gap_tol,
            extra_states: config.extra_states,
            per_dim,
            sandwich_violations,
            theorem_violation: sandwich_violations > 0,
        },
    })
}
