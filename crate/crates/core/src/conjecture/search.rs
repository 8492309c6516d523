//! Numerical search for unbiased pairs over minimal (or enlarged) decompositions.
//!
//! A decomposition with `n` elements is parameterized as `mix(D₀, U)` for a
//! fixed starting decomposition `D₀` (padded with zero vectors when extra
//! elements are allowed) and `U = Π_{p<q} G_pq(θ, α)`, a product of complex
//! Givens rotations. Right-multiplying diagonal phases only changes the global
//! phase of each element, so the `n(n-1)` angles cover every decomposition
//! reachable from `D₀`.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optimize::{coordinate_descent, DescentSettings};
use crate::decompose::{
    eigen_decomposition, mix, mix_vectors, unbiased_against, unbiased_to_two, Decomposition, DecompositionPair,
    EqualizeOptions,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, DEFAULT_RANK_TOL};
use crate::metrics::{bounds, BoundsReport, NEGLIGIBLE_WEIGHT};
use crate::random::{derive_seed, haar_unitary, rng_from_seed};

pub const DEFAULT_GAP_TOL: f64 = 1e-4;
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-3;
pub const DEFAULT_SEARCH_RESTARTS: usize = 8;
/// Precondition tolerance on `tr(ρσⱼ) = tr(ρσ)` for a fixed σ decomposition.
pub const FIXED_SIGMA_PRECONDITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Maximize the average trace distance.
    #[default]
    AverageDistance,
    /// Minimize `Σ pᵢqⱼ (|<ψᵢ|φⱼ>|² - tr(ρσ))²`.
    SquaredDeviation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    /// `upper - Δ` at or below which a search counts as converged.
    pub gap_tol: f64,
    /// Max deviation at or below which a fixed-σ search counts as feasible.
    pub feasibility_tol: f64,
    /// Elements beyond the rank allowed in each decomposition.
    pub extra_states: usize,
    pub objective: Objective,
    pub descent: DescentSettings,
    pub rank_tol: f64,
    /// Fill `TrialReport::wall_time` (makes reports run-dependent).
    pub record_timing: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: DEFAULT_SEARCH_RESTARTS,
            gap_tol: DEFAULT_GAP_TOL,
            feasibility_tol: DEFAULT_FEASIBILITY_TOL,
            extra_states: 0,
            objective: Objective::default(),
            descent: DescentSettings::default(),
            rank_tol: DEFAULT_RANK_TOL,
            record_timing: false,
        }
    }
}

/// Evidence record for one search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub dim: usize,
    pub ranks: (usize, usize),
    pub hs_product: f64,
    pub lower: f64,
    pub upper: f64,
    pub best_delta: f64,
    pub max_deviation: f64,
    pub converged: bool,
    pub restarts_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl TrialReport {
    pub fn gap(&self) -> f64 {
        self.upper - self.best_delta
    }
}

type Vectors = Vec<Vec<Complex64>>;

/// `Π_{p<q} G_pq(θ, α)` with `G = [[cos θ, -e^{iα} sin θ], [e^{-iα} sin θ, cos θ]]`
/// on rows/columns `p, q`; `params` holds `(θ, α)` per pair in lexicographic order.
pub fn givens_unitary(n: usize, params: &[f64]) -> CMatrix<f64> {
    assert_eq!(params.len(), n * n.saturating_sub(1), "two angles per index pair");
    let mut u = CMatrix::identity(n);
    let mut idx = 0;
    for p in 0..n {
        for q in (p + 1)..n {
            let (s, c) = params[idx].sin_cos();
            let phase = Complex64::from_polar(1.0, params[idx + 1]);
            idx += 2;
            for k in 0..n {
                let (up, uq) = (u[(k, p)], u[(k, q)]);
                u[(k, p)] = up * c + uq * phase.conj() * s;
                u[(k, q)] = -up * phase * s + uq * c;
            }
        }
    }
    u
}

fn param_count(n: usize) -> usize {
    n * n.saturating_sub(1)
}

fn padded(d: &Decomposition<f64>, n: usize) -> Vectors {
    let mut v = d.scaled_vectors();
    v.resize(n, vec![Complex64::new(0.0, 0.0); d.dim()]);
    v
}

#[derive(Debug, Clone, Copy, Default)]
struct PairStats {
    delta: f64,
    weighted_sq: f64,
    plain_sq: f64,
    max_dev: f64,
}

fn pair_stats(left: &Vectors, right: &Vectors, t: f64) -> PairStats {
    let weight = |v: &Vec<Complex64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let wl: Vec<f64> = left.iter().map(weight).collect();
    let wr: Vec<f64> = right.iter().map(weight).collect();
    let mut s = PairStats::default();
    for (a, &p) in left.iter().zip(&wl) {
        if p < NEGLIGIBLE_WEIGHT {
            continue;
        }
        for (b, &q) in right.iter().zip(&wr) {
            if q < NEGLIGIBLE_WEIGHT {
                continue;
            }
            let ip = a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y);
            let overlap = (ip.norm_sqr() / (p * q)).min(1.0);
            let dev = overlap - t;
            s.delta += p * q * (1.0 - overlap).max(0.0).sqrt();
            s.weighted_sq += p * q * dev * dev;
            s.plain_sq += dev * dev;
            s.max_dev = s.max_dev.max(dev.abs());
        }
    }
    s
}

fn haar_mixed(rho: &DensityMatrix<f64>, rank_tol: f64, seed: u64) -> Result<Decomposition<f64>> {
    let e = eigen_decomposition(rho, rank_tol)?;
    let mut rng = rng_from_seed(seed);
    let u = haar_unitary::<f64>(e.len(), &mut rng);
    mix(&e, &u)
}

fn finish(vectors: Vectors, target: &DensityMatrix<f64>) -> Result<Decomposition<f64>> {
    let d = Decomposition::from_scaled_vectors(vectors, target.clone())?;
    d.check()?;
    Ok(d)
}

struct Best {
    delta: f64,
    left: Vectors,
    right: Vectors,
}

/// Searches for a pair of decompositions maximizing the average trace
/// distance. Non-convergence is reported in the [`TrialReport`], not raised.
pub fn search_unbiased(
    rho: &DensityMatrix<f64>,
    sigma: &DensityMatrix<f64>,
    config: &SearchConfig,
) -> Result<(DecompositionPair<f64>, TrialReport)> {
    let clock = Instant::now();
    let b = bounds(rho, sigma)?;
    let t = b.hs_product;
    let rank_l = rho.rank(config.rank_tol)?;
    let rank_r = sigma.rank(config.rank_tol)?;
    let (n_l, n_r) = (rank_l + config.extra_states, rank_r + config.extra_states);
    let (k_l, k_r) = (param_count(n_l), param_count(n_r));
    let stop_gap = config.gap_tol * 1e-2;
    let eq = EqualizeOptions { seed: config.seed, rank_tol: config.rank_tol, ..EqualizeOptions::default() };

    let mut best: Option<Best> = None;
    let mut restarts_used = 0;
    for restart in 0..config.restarts.max(1) {
        restarts_used = restart + 1;
        let (dl, dr) = if restart == 0 {
            (
                unbiased_against(rho, sigma, &eq).or_else(|_| eigen_decomposition(rho, config.rank_tol))?,
                unbiased_against(sigma, rho, &eq).or_else(|_| eigen_decomposition(sigma, config.rank_tol))?,
            )
        } else {
            let s = derive_seed(config.seed, restart as u64);
            (
                haar_mixed(rho, config.rank_tol, derive_seed(s, 0))?,
                haar_mixed(sigma, config.rank_tol, derive_seed(s, 1))?,
            )
        };
        let (base_l, base_r) = (padded(&dl, n_l), padded(&dr, n_r));
        let eval = |x: &[f64]| {
            let l = mix_vectors(&base_l, &givens_unitary(n_l, &x[..k_l]));
            let r = mix_vectors(&base_r, &givens_unitary(n_r, &x[k_l..]));
            (pair_stats(&l, &r, t), l, r)
        };
        let mut objective = |x: &[f64]| {
            let (s, _, _) = eval(x);
            match config.objective {
                Objective::AverageDistance => -s.delta,
                Objective::SquaredDeviation => s.weighted_sq,
            }
        };
        let upper = b.upper;
        let result =
            coordinate_descent(&mut objective, vec![0.0; k_l + k_r], &config.descent, |v| match config.objective {
                Objective::AverageDistance => upper + v <= stop_gap,
                Objective::SquaredDeviation => v <= 1e-24,
            });
        let (s, l, r) = eval(&result.x);
        if best.as_ref().is_none_or(|bst| s.delta > bst.delta) {
            best = Some(Best { delta: s.delta, left: l, right: r });
        }
        if b.upper - best.as_ref().map_or(0.0, |bst| bst.delta) <= stop_gap {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let pair = DecompositionPair::new(finish(best.left, rho)?, finish(best.right, sigma)?)?;
    let report = make_report(config, rho.dim(), (rank_l, rank_r), &b, &pair, pair.delta_avg, restarts_used, clock);
    let report = TrialReport { converged: report.gap() <= config.gap_tol, ..report };
    Ok((pair, report))
}

#[allow(clippy::too_many_arguments)]
fn make_report(
    config: &SearchConfig,
    dim: usize,
    ranks: (usize, usize),
    b: &BoundsReport<f64>,
    pair: &DecompositionPair<f64>,
    best_delta: f64,
    restarts_used: usize,
    clock: Instant,
) -> TrialReport {
    TrialReport {
        seed: config.seed,
        dim,
        ranks,
        hs_product: b.hs_product,
        lower: b.lower,
        upper: b.upper,
        best_delta,
        max_deviation: pair.max_deviation,
        converged: false,
        restarts_used,
        wall_time: config.record_timing.then(|| clock.elapsed().as_secs_f64()),
    }
}

/// Holds a decomposition of σ fixed and searches decompositions of ρ for the
/// smallest max deviation. `converged` means the best max deviation is within
/// `config.feasibility_tol`.
///
/// The first start is the constructive one where available: for one element
/// the equalized decomposition of ρ against it, for two elements the
/// rank-two peeling procedure, otherwise ρ equalized against the first element.
pub fn fixed_sigma_feasibility(
    rho: &DensityMatrix<f64>,
    sigma_decomp: &Decomposition<f64>,
    config: &SearchConfig,
) -> Result<(DecompositionPair<f64>, TrialReport)> {
    let clock = Instant::now();
    let sigma = sigma_decomp.target();
    let b = bounds(rho, sigma)?;
    let t = b.hs_product;
    for (j, phi) in sigma_decomp.states().iter().enumerate() {
        let dev = (rho.expectation(phi) - t).abs();
        if dev > FIXED_SIGMA_PRECONDITION_TOL {
            return Err(Error::PreconditionViolated(format!(
                "element {j} of the sigma decomposition has |tr(rho sigma_j) - tr(rho sigma)| = {dev:e}"
            )));
        }
    }
    let rank_l = rho.rank(config.rank_tol)?;
    let n_l = rank_l + config.extra_states;
    let k_l = param_count(n_l);
    let right = sigma_decomp.scaled_vectors();
    let eq = EqualizeOptions { seed: config.seed, rank_tol: config.rank_tol, ..EqualizeOptions::default() };
    let phis = sigma_decomp.states();

    let mut best: Option<(f64, Vectors)> = None;
    let mut restarts_used = 0;
    for restart in 0..config.restarts.max(1) {
        restarts_used = restart + 1;
        let dl = if restart == 0 {
            let seeded = match phis.len() {
                2 if t > 1e-12 && rank_l > 1 => {
                    unbiased_to_two(rho, &[phis[0].clone(), phis[1].clone()], t, &eq).map(|(d, _)| d)
                }
                _ => crate::decompose::equalize(rho, &phis[0].projector(), &eq),
            };
            seeded.or_else(|_| eigen_decomposition(rho, config.rank_tol))?
        } else {
            haar_mixed(rho, config.rank_tol, derive_seed(config.seed, restart as u64))?
        };
        let base_l = padded(&dl, n_l);
        let eval = |x: &[f64]| {
            let l = mix_vectors(&base_l, &givens_unitary(n_l, x));
            (pair_stats(&l, &right, t), l)
        };
        let mut objective = |x: &[f64]| eval(x).0.plain_sq;
        let result = coordinate_descent(&mut objective, vec![0.0; k_l], &config.descent, |v| v <= 1e-24);
        let (s, l) = eval(&result.x);
        if best.as_ref().is_none_or(|(m, _)| s.max_dev < *m) {
            best = Some((s.max_dev, l));
        }
        if best.as_ref().is_some_and(|(m, _)| *m <= 1e-10) {
            break;
        }
    }
    let (_, left) = best.expect("at least one restart");
    let pair = DecompositionPair::new(finish(left, rho)?, sigma_decomp.clone())?;
    let ranks = (rank_l, sigma_decomp.len());
    let report = make_report(config, rho.dim(), ranks, &b, &pair, pair.delta_avg, restarts_used, clock);
    let report = TrialReport { converged: pair.max_deviation <= config.feasibility_tol, ..report };
    Ok((pair, report))
}
