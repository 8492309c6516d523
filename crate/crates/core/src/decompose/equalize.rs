//! Equalizing a convex-linear functional over a minimal decomposition.
//!
//! Repeatedly takes the elements with the largest and smallest value of
//! `f(τ) = tr(τF)`, rotates them into each other with [`swap_unitary`] and
//! stops the rotation by bisection where both values coincide. The weighted
//! mean `Σ pᵢ f(ρᵢ)` is conserved, so each round pulls the two extremes
//! together around `f(ρ)`.
//!
//! [`swap_unitary`]: super::mixing::swap_unitary

use num_complex::Complex;

use super::decomposition::Decomposition;
use super::mixing::{eigen_decomposition, mix, swap_vectors};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, DEFAULT_RANK_TOL};
use crate::random::{derive_seed, haar_unitary, rng_from_seed};
use crate::scalar::Real;

pub const DEFAULT_EQUALIZE_TOL: f64 = 1e-9;
pub const DEFAULT_RESTARTS: usize = 5;
pub const BISECTION_STEPS: usize = 200;
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizeOptions<R> {
    /// Required bound on `maxᵢ |f(ρᵢ) - f(ρ)|`.
    pub tol: R,
    /// Rounds per attempt; `None` means `200·rank²`.
    pub max_rounds: Option<usize>,
    /// Attempts from a Haar-mixed starting point after the first fails.
    pub restarts: usize,
    pub seed: u64,
    pub rank_tol: R,
}

impl<R: Real> Default for EqualizeOptions<R> {
    fn default() -> Self {
        Self {
            tol: R::tol(DEFAULT_EQUALIZE_TOL),
            max_rounds: None,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            rank_tol: R::tol(DEFAULT_RANK_TOL),
        }
    }
}

/// Per-round history of the successful attempt.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EqualizeTrace<R> {
    /// `Σᵢ pᵢ |f(ρᵢ) - f(ρ)|` before each round and at the end.
    pub weighted_merit: Vec<R>,
    /// `Σᵢ |f(ρᵢ) - f(ρ)|` at the same points.
    pub merit: Vec<R>,
    /// `Σᵢ pᵢ f(ρᵢ) - f(ρ)` at the same points.
    pub mean_drift: Vec<R>,
    pub restarts_used: usize,
}

/// Minimal decomposition of `rho` whose elements all satisfy
/// `tr(ρᵢF) = tr(ρF)` to within `opts.tol`.
pub fn equalize<R: Real>(
    rho: &DensityMatrix<R>,
    f: &CMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<Decomposition<R>> {
    equalize_traced(rho, f, opts).map(|(d, _)| d)
}

pub fn equalize_traced<R: Real>(
    rho: &DensityMatrix<R>,
    f: &CMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<(Decomposition<R>, EqualizeTrace<R>)> {
    let start = eigen_decomposition(rho, opts.rank_tol)?;
    equalize_from(start, f, opts)
}

/// Runs the equalizer from a given minimal decomposition.
pub fn equalize_from<R: Real>(
    start: Decomposition<R>,
    f: &CMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<(Decomposition<R>, EqualizeTrace<R>)> {
    let dim = start.dim();
    if f.rows() != dim || f.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: f.rows() });
    }
    let herm = f.hermiticity_error();
    if !(herm <= R::tol(HERMITIAN_TOL)) {
        return Err(Error::NotHermitian { deviation: herm.to_f64_lossy() });
    }
    let f = f.hermitian_part();
    let target = crate::linalg::state::hs_product_raw(start.target().matrix(), &f);
    let m = start.len();
    let max_rounds = opts.max_rounds.unwrap_or(200 * m * m);

    let mut current = start;
    let mut last_merit = R::zero();
    for attempt in 0..=opts.restarts {
        if attempt > 0 {
            let mut rng = rng_from_seed(derive_seed(opts.seed, attempt as u64));
            let u = haar_unitary::<R>(m, &mut rng);
            current = mix(&current, &u)?;
        }
        match run(&current, &f, target, opts.tol, max_rounds) {
            Ok((vectors, mut trace)) => {
                trace.restarts_used = attempt;
                let out = Decomposition::from_scaled_vectors(vectors, current.target().clone())?;
                out.check()?;
                return Ok((out, trace));
            }
            Err(merit) => last_merit = merit,
        }
    }
    Err(Error::NoConvergence { rounds: max_rounds, merit: last_merit.to_f64_lossy() })
}

fn value<R: Real>(f: &CMatrix<R>, v: &[Complex<R>]) -> R {
    let w: R = v.iter().map(|z| z.norm_sqr()).sum();
    f.expectation(v) / w
}

type Vectors<R> = Vec<Vec<Complex<R>>>;

/// One attempt. Returns the final scaled vectors, or the final unweighted
/// figure of merit on failure.
fn run<R: Real>(
    start: &Decomposition<R>,
    f: &CMatrix<R>,
    target: R,
    tol: R,
    max_rounds: usize,
) -> std::result::Result<(Vectors<R>, EqualizeTrace<R>), R> {
    let mut vectors = start.scaled_vectors();
    let mut trace = EqualizeTrace::default();
    let stop = tol * R::lit(0.1);
    for round in 0..=max_rounds {
        let weights: Vec<R> = vectors.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
        let values: Vec<R> = vectors.iter().map(|v| value(f, v)).collect();
        let dev: Vec<R> = values.iter().map(|&x| x - target).collect();
        trace.merit.push(dev.iter().map(|x| x.abs()).sum());
        trace.weighted_merit.push(weights.iter().zip(&dev).map(|(p, x)| *p * x.abs()).sum());
        trace.mean_drift.push(weights.iter().zip(&dev).map(|(p, x)| *p * *x).sum());

        if dev.iter().all(|x| x.abs() <= tol) {
            return Ok((vectors, trace));
        }
        if round == max_rounds {
            break;
        }
        let mut k = 0;
        let mut l = 0;
        for (i, &x) in values.iter().enumerate() {
            if x > values[k] {
                k = i;
            }
            if x < values[l] {
                l = i;
            }
        }
        if k == l {
            break;
        }
        let (ak, al) = (vectors[k].clone(), vectors[l].clone());
        let g = |theta: R| {
            let (vk, vl) = swap_vectors(&ak, &al, theta);
            value(f, &vk) - value(f, &vl)
        };
        let theta = bisect(g, R::zero(), R::PI(), stop);
        let (vk, vl) = swap_vectors(&ak, &al, theta);
        vectors[k] = vk;
        vectors[l] = vl;
    }
    Err(trace.merit.last().copied().unwrap_or_else(R::zero))
}

/// Root of `g` on `[lo, hi]` given `g(lo) ≥ 0 ≥ g(hi)`.
pub(crate) fn bisect<R: Real>(g: impl Fn(R) -> R, mut lo: R, mut hi: R, stop: R) -> R {
    let half = R::lit(0.5);
    let mut mid = (lo + hi) * half;
    for _ in 0..BISECTION_STEPS {
        mid = (lo + hi) * half;
        let gm = g(mid);
        if gm.abs() <= stop {
            break;
        }
        if gm > R::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if !(hi > lo) {
            break;
        }
    }
    mid
}

/// Minimal decomposition of `rho` with `tr(ρᵢσ) = tr(ρσ)` for every element.
pub fn unbiased_against<R: Real>(
    rho: &DensityMatrix<R>,
    sigma: &DensityMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<Decomposition<R>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    equalize(rho, sigma.matrix(), opts)
}
