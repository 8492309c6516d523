//! Distances, bounds and the discrimination game.
//!
//! Classical quantities act on [`ClassicalDistribution`]s, quantum ones on
//! [`DensityMatrix`] pairs or on pairs of pure-state [`Decomposition`]s.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, DensityMatrix, DEFAULT_RANK_TOL};
use crate::scalar::Real;

/// Weights below this are removed before averaging over decomposition elements.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-12;
/// Radicand slack tolerated (and clamped) in the upper bound.
pub const RADICAND_TOL: f64 = 1e-12;
/// Shots handled by one RNG stream in [`simulate_game`].
pub const SHOTS_PER_SHARD: u64 = 1 << 16;

/// Finite probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDistribution<R> {
    probs: Vec<R>,
}

impl<R: Real> ClassicalDistribution<R> {
    pub fn new(probs: Vec<R>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(**p >= R::zero())) {
            return Err(Error::InvalidDistribution(format!("negative or NaN entry {p}")));
        }
        let total: R = probs.iter().copied().sum();
        if (total - R::one()).abs() > R::tol(1e-12) {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }
}

fn padded_pairs<'a, R: Real>(
    p: &'a ClassicalDistribution<R>,
    q: &'a ClassicalDistribution<R>,
) -> impl Iterator<Item = (R, R)> + 'a {
    let n = p.probs.len().max(q.probs.len());
    let at = |v: &[R], i: usize| v.get(i).copied().unwrap_or_else(R::zero);
    (0..n).map(move |i| (at(&p.probs, i), at(&q.probs, i)))
}

/// `½ Σ |pᵢ - qᵢ|`; the shorter vector is padded with zeros.
pub fn classical_variation_distance<R: Real>(p: &ClassicalDistribution<R>, q: &ClassicalDistribution<R>) -> R {
    padded_pairs(p, q).map(|(a, b)| (a - b).abs()).sum::<R>() * R::lit(0.5)
}

/// `1 - Σ min(pᵢ, qᵢ)`, which equals the variation distance.
pub fn overlap_complement<R: Real>(p: &ClassicalDistribution<R>, q: &ClassicalDistribution<R>) -> R {
    R::one() - padded_pairs(p, q).map(|(a, b)| a.min(b)).sum::<R>()
}

/// `1 - Σ pᵢ qᵢ`: chance that independent draws from `p` and `q` differ.
pub fn collision_complement<R: Real>(p: &ClassicalDistribution<R>, q: &ClassicalDistribution<R>) -> R {
    R::one() - padded_pairs(p, q).map(|(a, b)| a * b).sum::<R>()
}

fn check_dims<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// `½ tr|ρ - σ|` from the eigenvalues of the Hermitian difference.
pub fn trace_distance<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<R> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let spec = hermitian_eig(&diff, R::tol(DEFAULT_RANK_TOL))?;
    let d = spec.eigenvalues.iter().map(|l| l.abs()).sum::<R>() * R::lit(0.5);
    Ok(d.min(R::one()))
}

/// Trace distance between two pure states, `√(1 - |<ψ|φ>|²)`.
pub fn pure_trace_distance<R: Real>(overlap: R) -> R {
    (R::one() - overlap).max(R::zero()).sqrt()
}

/// `tr(ρσ)`.
pub fn hs_inner_product<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<R> {
    check_dims(rho, sigma)?;
    let (a, b) = (rho.matrix(), sigma.matrix());
    let n = a.rows();
    let mut s = Complex::<R>::zero();
    for i in 0..n {
        for k in 0..n {
            s = s + a[(i, k)] * b[(k, i)];
        }
    }
    assert!(s.im.abs() <= R::tol(1e-12), "tr(ρσ) has imaginary part {}", s.im);
    Ok(s.re)
}

/// `Σᵢⱼ pᵢ qⱼ δ(ψᵢ, φⱼ)` over pure-state decompositions.
pub fn average_trace_distance<R: Real>(left: &Decomposition<R>, right: &Decomposition<R>) -> Result<R> {
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch { expected: left.dim(), found: right.dim() });
    }
    let cut = R::lit(NEGLIGIBLE_WEIGHT);
    let mut total = R::zero();
    for (p, psi) in left.elements().filter(|(p, _)| *p >= cut) {
        for (q, phi) in right.elements().filter(|(q, _)| *q >= cut) {
            total = total + p * q * pure_trace_distance(psi.overlap(phi));
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport<R> {
    /// Trace distance `δ(ρ, σ)`.
    pub lower: R,
    /// `√(1 - tr(ρσ))`.
    pub upper: R,
    pub hs_product: R,
}

/// Lower and upper bounds on the average trace distance of any pair of decompositions.
pub fn bounds<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<BoundsReport<R>> {
    let lower = trace_distance(rho, sigma)?;
    let hs_product = hs_inner_product(rho, sigma)?;
    let upper = upper_bound(hs_product)?;
    Ok(BoundsReport { lower, upper, hs_product })
}

/// `√(1 - t)` with the radicand clamped into `[0, 1]` near the boundary.
pub fn upper_bound<R: Real>(hs_product: R) -> Result<R> {
    let radicand = R::one() - hs_product;
    if radicand < -R::tol(RADICAND_TOL) {
        return Err(Error::RadicandOutOfRange { value: radicand.to_f64_lossy() });
    }
    Ok(radicand.max(R::zero()).min(R::one()).sqrt())
}

/// Optimal equal-prior two-outcome measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HelstromMeasurement<R> {
    /// Outcome "the state was ρ".
    pub projector: CMatrix<R>,
    pub success_prob: R,
}

impl<R: Real> HelstromMeasurement<R> {
    /// Probability of the accept-ρ outcome on `state`.
    pub fn accept_prob(&self, state: &DensityMatrix<R>) -> R {
        crate::linalg::state::hs_product_raw(&self.projector, state.matrix()).max(R::zero()).min(R::one())
    }
}

/// Projector onto the nonnegative eigenspace of `ρ - σ`. Directions with
/// eigenvalue within the rank tolerance of zero go to the accept-ρ outcome.
pub fn helstrom<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<HelstromMeasurement<R>> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let tie = R::tol(DEFAULT_RANK_TOL);
    let spec = hermitian_eig(&diff, tie)?;
    let d = rho.dim();
    let mut projector = CMatrix::zeros(d, d);
    for (lambda, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if *lambda >= -tie {
            projector = &projector + &v.projector();
        }
    }
    let m = HelstromMeasurement { projector, success_prob: R::zero() };
    let p_rho = m.accept_prob(rho);
    let p_sigma = m.accept_prob(sigma);
    let success_prob = (p_rho + R::one() - p_sigma) * R::lit(0.5);
    Ok(HelstromMeasurement { success_prob, ..m })
}

fn sample_index(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let u: f64 = rng.random();
    cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1)
}

fn cumulative<R: Real>(weights: impl Iterator<Item = R>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w.to_f64_lossy();
            acc
        })
        .collect()
}

/// Monte Carlo estimate of the success rate when each round reveals which
/// decomposition elements were prepared.
///
/// Each round draws `i ~ p`, `j ~ q`, the true owner (fair coin) and the
/// Helstrom outcome for the pair `(ρᵢ, σⱼ)`, in that order. Shots are split
/// into shards of [`SHOTS_PER_SHARD`], shard `s` using ChaCha8 stream `s`
/// seeded from `seed`, so the result does not depend on the thread count.
pub fn simulate_game<R: Real>(left: &Decomposition<R>, right: &Decomposition<R>, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::PreconditionViolated("shots must be at least 1".into()));
    }
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch { expected: left.dim(), found: right.dim() });
    }
    // accept[i][j] = (P(accept | ρᵢ), P(accept | σⱼ)) under helstrom(ρᵢ, σⱼ).
    let mut accept = Vec::with_capacity(left.len());
    for (_, psi) in left.elements() {
        let rho_i = psi.density();
        let mut row = Vec::with_capacity(right.len());
        for (_, phi) in right.elements() {
            let sigma_j = phi.density();
            let m = helstrom(&rho_i, &sigma_j)?;
            row.push((m.accept_prob(&rho_i).to_f64_lossy(), m.accept_prob(&sigma_j).to_f64_lossy()));
        }
        accept.push(row);
    }
    let cum_p = cumulative(left.weights().iter().copied());
    let cum_q = cumulative(right.weights().iter().copied());

    let shards = shots.div_ceil(SHOTS_PER_SHARD);
    let wins: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let n = SHOTS_PER_SHARD.min(shots - s * SHOTS_PER_SHARD);
            let mut wins = 0u64;
            for _ in 0..n {
                let i = sample_index(&mut rng, &cum_p);
                let j = sample_index(&mut rng, &cum_q);
                let owner_is_rho = rng.random::<f64>() < 0.5;
                let (a_rho, a_sigma) = accept[i][j];
                let accept_prob = if owner_is_rho { a_rho } else { a_sigma };
                let accepted = rng.random::<f64>() < accept_prob;
                if accepted == owner_is_rho {
                    wins += 1;
                }
            }
            wins
        })
        .sum();
    Ok(wins as f64 / shots as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    fn dist(v: &[f64]) -> ClassicalDistribution<f64> {
        ClassicalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pencil_case_values() {
        let (p, q) = (dist(&[0.5, 0.5]), dist(&[0.25, 0.75]));
        assert_eq!(classical_variation_distance(&p, &q), 0.25);
        assert_eq!(collision_complement(&p, &q), 0.5);
        assert_eq!(overlap_complement(&p, &q), 0.25);
    }

    #[test]
    fn classical_edge_cases() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(classical_variation_distance(&p, &p), 0.0);
        let (a, b) = (dist(&[1.0, 0.0]), dist(&[0.0, 1.0]));
        assert_eq!(classical_variation_distance(&a, &b), 1.0);
        assert_eq!(collision_complement(&a, &b), 1.0);
        assert_eq!(collision_complement(&a, &a), 0.0);
        // padding
        assert_eq!(classical_variation_distance(&dist(&[1.0]), &dist(&[0.5, 0.5])), 0.5);
        assert!(ClassicalDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ClassicalDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let z0 = PureState::<f64>::basis(2, 0).density();
        let z1 = PureState::<f64>::basis(2, 1).density();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(vec![Complex::new(h, 0.0), Complex::new(h, 0.0)]).unwrap().density();
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        // 2x2 traceless Hermitian difference: eigenvalues ±√(a² + |b|²).
        let diff = z0.matrix() - plus.matrix();
        let (a, b) = (diff[(0, 0)].re, diff[(0, 1)].norm());
        let oracle = (a * a + b * b).sqrt();
        assert!((trace_distance(&z0, &plus).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hs_and_bounds_examples() {
        let mm = DensityMatrix::<f64>::maximally_mixed(2);
        assert_eq!(hs_inner_product(&mm, &mm).unwrap(), 0.5);
        let z0 = PureState::<f64>::basis(2, 0).density();
        let z1 = PureState::<f64>::basis(2, 1).density();
        assert_eq!(hs_inner_product(&z0, &z1).unwrap(), 0.0);
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert_eq!(hs_inner_product(&rho, &mm).unwrap(), 0.375 + 0.125);

        let b = bounds(&mm, &mm).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let b = bounds(&z0, &z0).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let b = bounds(&rho, &mm).unwrap();
        assert!((b.lower - 0.25).abs() < 1e-15);
        assert!((b.upper - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_radicand_guard() {
        assert_eq!(upper_bound(1.0 + 1e-13).unwrap(), 0.0);
        assert!(matches!(upper_bound(1.0 + 1e-9), Err(Error::RadicandOutOfRange { .. })));
    }

    #[test]
    fn helstrom_examples() {
        let z0 = PureState::<f64>::basis(2, 0).density();
        let z1 = PureState::<f64>::basis(2, 1).density();
        let m = helstrom(&z0, &z1).unwrap();
        assert!(m.projector.max_abs_diff(z0.matrix()) < 1e-15);
        assert!((m.success_prob - 1.0).abs() < 1e-15);

        let rho = DensityMatrix::<f64>::from_diagonal(&[0.75, 0.25]).unwrap();
        let m = helstrom(&rho, &rho).unwrap();
        assert!((m.success_prob - 0.5).abs() < 1e-15);
        // Ties go to accept-ρ: the whole space.
        assert!(m.projector.max_abs_diff(&CMatrix::identity(2)) < 1e-15);

        let mm = DensityMatrix::<f64>::maximally_mixed(2);
        let m = helstrom(&rho, &mm).unwrap();
        assert!((m.success_prob - 0.625).abs() < 1e-15);
        assert!((&m.projector * &m.projector).max_abs_diff(&m.projector) < 1e-12);
    }
}
