//! Explicit unbiased pairs for the cases where one is known to exist:
//! qubits, a maximally mixed σ, a pure σ and a rank-two σ.

use num_complex::Complex;
use num_traits::Zero;

use super::decomposition::{Decomposition, DecompositionPair};
use super::equalize::{bisect, unbiased_against, EqualizeOptions};
use super::mixing::eigen_decomposition;
use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, norm};
use crate::linalg::{support_inverse, CMatrix, DensityMatrix, PureState};
use crate::metrics::hs_inner_product;
use crate::scalar::Real;

/// Bloch vector `(tr ρX, tr ρY, tr ρZ)` of a qubit state.
pub fn bloch_vector<R: Real>(rho: &DensityMatrix<R>) -> [R; 3] {
    let m = rho.matrix();
    let two = R::lit(2.0);
    [m[(0, 1)].re * two, -m[(0, 1)].im * two, m[(0, 0)].re - m[(1, 1)].re]
}

/// Pure qubit state with unit Bloch vector `n`.
pub fn state_from_bloch<R: Real>(n: [R; 3]) -> PureState<R> {
    let [x, y, z] = n;
    let v = if z >= R::zero() {
        vec![Complex::new(R::one() + z, R::zero()), Complex::new(x, y)]
    } else {
        vec![Complex::new(x, -y), Complex::new(R::one() - z, R::zero())]
    };
    PureState::from_unnormalized(v).expect("unit Bloch vector")
}

fn dot<R: Real>(a: [R; 3], b: [R; 3]) -> R {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<R: Real>(a: [R; 3], b: [R; 3]) -> [R; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn axpy<R: Real>(a: R, x: [R; 3], b: R, y: [R; 3]) -> [R; 3] {
    [a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]
}

fn unit<R: Real>(v: [R; 3]) -> Option<[R; 3]> {
    let n = dot(v, v).sqrt();
    (n > R::tol(1e-12)).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Some unit vector orthogonal to `v` (`v` a unit vector).
fn orthogonal_to<R: Real>(v: [R; 3]) -> [R; 3] {
    let (o, z) = (R::one(), R::zero());
    let axis = if v[2].abs() < R::lit(0.9) { [z, z, o] } else { [o, z, z] };
    unit(axpy(o, axis, -dot(axis, v), v)).expect("axis not parallel")
}

fn check_qubit<R: Real>(rho: &DensityMatrix<R>, sigma: &DensityMatrix<R>) -> Result<()> {
    for d in [rho.dim(), sigma.dim()] {
        if d != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: d });
        }
    }
    Ok(())
}

/// Two-element decomposition of a Bloch vector `c·axis_c + t·axis_t` into the
/// two pure states `c·axis_c ± √(1-c²)·axis_t`; single element when pure.
fn chord_decomposition<R: Real>(
    target: &DensityMatrix<R>,
    along: R,
    axis_c: [R; 3],
    transverse: R,
    axis_t: [R; 3],
    rank_tol: R,
) -> Result<Decomposition<R>> {
    if target.rank(rank_tol)? == 1 {
        return eigen_decomposition(target, rank_tol);
    }
    let half_chord = (R::one() - along * along).max(R::zero()).sqrt();
    let plus = state_from_bloch(axpy(along, axis_c, half_chord, axis_t));
    let minus = state_from_bloch(axpy(along, axis_c, -half_chord, axis_t));
    let q = (R::one() + transverse / half_chord) * R::lit(0.5);
    let q = q.max(R::zero()).min(R::one());
    let cut = R::lit(crate::metrics::NEGLIGIBLE_WEIGHT);
    let (weights, states): (Vec<R>, Vec<PureState<R>>) =
        [(q, plus), (R::one() - q, minus)].into_iter().filter(|(w, _)| *w >= cut).unzip();
    Decomposition::new(weights, states, target.clone())
}

/// Unbiased pair for qubits from the Bloch-sphere geometry: in a frame with
/// `ρ = (0, 0, r)` and `σ = (s_x, 0, s_z)`, ρ splits along the y axis and σ
/// along the x axis at the same heights.
pub fn qubit_pair<R: Real>(
    rho: &DensityMatrix<R>,
    sigma: &DensityMatrix<R>,
    rank_tol: R,
) -> Result<DecompositionPair<R>> {
    check_qubit(rho, sigma)?;
    let (o, z) = (R::one(), R::zero());
    let r_vec = bloch_vector(rho);
    let s_vec = bloch_vector(sigma);
    let ez = match unit(r_vec) {
        Some(e) => e,
        None => unit(s_vec).map(orthogonal_to).unwrap_or([z, z, o]),
    };
    let r = dot(r_vec, ez);
    let s_z = dot(s_vec, ez);
    let ex = unit(axpy(o, s_vec, -s_z, ez)).unwrap_or_else(|| orthogonal_to(ez));
    let s_x = dot(s_vec, ex);
    let ey = cross(ez, ex);

    let left = chord_decomposition(rho, r, ez, z, ey, rank_tol)?;
    let right = chord_decomposition(sigma, s_z, ez, s_x, ex, rank_tol)?;
    DecompositionPair::new(left, right)
}

/// `σ = I/d`: eigenbasis of ρ against its discrete Fourier transform.
///
/// The eigensolver returns a complete orthonormal basis even when ρ is rank
/// deficient; the Fourier states are unbiased to all of it.
pub fn max_mixed_pair<R: Real>(rho: &DensityMatrix<R>, rank_tol: R) -> Result<DecompositionPair<R>> {
    let d = rho.dim();
    let spec = rho.spectrum(rank_tol)?;
    let left = eigen_decomposition(rho, rank_tol)?;
    let inv_sqrt = R::one() / R::from_count(d).sqrt();
    let basis = &spec.eigenvectors;
    let states = (0..d)
        .map(|j| {
            let mut v = vec![Complex::zero(); d];
            for (k, e) in basis.iter().enumerate() {
                let angle = R::TAU() * R::from_count((j * k) % d) / R::from_count(d);
                let w = Complex::from_polar(inv_sqrt, angle);
                for (vi, ei) in v.iter_mut().zip(e.amplitudes()) {
                    *vi = *vi + ei * w;
                }
            }
            PureState::from_unnormalized(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = vec![R::one() / R::from_count(d); d];
    let right = Decomposition::new(weights, states, DensityMatrix::maximally_mixed(d))?;
    DecompositionPair::new(left, right)
}

/// Largest `p` with `ρ - p|ψ><ψ|` positive semidefinite: `1/<ψ|ρ⁺|ψ>`.
pub fn max_weight<R: Real>(rho: &DensityMatrix<R>, psi: &PureState<R>, rank_tol: R) -> Result<R> {
    Ok((R::one() / support_inverse(rho, psi, rank_tol)?).min(R::one()))
}

/// `(ρ - p|ψ><ψ|)/(1 - p)` for `p` from [`max_weight`], with the removed
/// direction clipped to an exact zero eigenvalue.
pub fn deflate<R: Real>(rho: &DensityMatrix<R>, psi: &PureState<R>, p: R, rank_tol: R) -> Result<DensityMatrix<R>> {
    let raw = (rho.matrix() - &psi.projector().scale(p)).scale(R::one() / (R::one() - p));
    DensityMatrix::from_clipped(&raw, rank_tol)
}

fn single<R: Real>(rho: &DensityMatrix<R>, rank_tol: R) -> Result<Decomposition<R>> {
    let spec = rho.spectrum(rank_tol)?;
    if spec.rank != 1 {
        return Err(Error::RankMismatch { expected: "1".into(), found: spec.rank });
    }
    Decomposition::new(vec![R::one()], vec![spec.eigenvectors[0].clone()], rho.clone())
}

/// `rank(σ) = 1`: σ itself against a decomposition of ρ equalized on `tr(·σ)`.
pub fn pure_sigma_pair<R: Real>(
    rho: &DensityMatrix<R>,
    sigma: &DensityMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<DecompositionPair<R>> {
    let right = single(sigma, opts.rank_tol)?;
    let left = unbiased_against(rho, sigma, opts)?;
    DecompositionPair::new(left, right)
}

/// Intermediate state of the rank-two construction, exposed for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationStep<R> {
    /// State being decomposed at this step.
    pub residual: DensityMatrix<R>,
    /// `tr(ρ'σⱼ)` for the two elements of σ's decomposition.
    pub overlaps: [R; 2],
}

/// `rank(σ) = 2`: peel off one element of ρ at a time, each unbiased to both
/// elements of an equalized decomposition of σ.
pub fn rank2_sigma_pair<R: Real>(
    rho: &DensityMatrix<R>,
    sigma: &DensityMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<DecompositionPair<R>> {
    rank2_sigma_pair_traced(rho, sigma, opts).map(|(p, _)| p)
}

pub fn rank2_sigma_pair_traced<R: Real>(
    rho: &DensityMatrix<R>,
    sigma: &DensityMatrix<R>,
    opts: &EqualizeOptions<R>,
) -> Result<(DecompositionPair<R>, Vec<DeflationStep<R>>)> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let sigma_rank = sigma.rank(opts.rank_tol)?;
    if sigma_rank != 2 {
        return Err(Error::RankMismatch { expected: "2".into(), found: sigma_rank });
    }
    if rho.rank(opts.rank_tol)? == 1 {
        return Ok((pure_sigma_pair(sigma, rho, opts)?.swapped(), Vec::new()));
    }
    let t = hs_inner_product(rho, sigma)?;
    let right = unbiased_against(sigma, rho, opts)?;
    if t <= R::tol(1e-12) {
        // Orthogonal supports: every pair of decompositions is unbiased.
        let left = eigen_decomposition(rho, opts.rank_tol)?;
        return Ok((DecompositionPair::new(left, right)?, Vec::new()));
    }
    let phis = [right.states()[0].clone(), right.states()[1].clone()];
    let (left, steps) = unbiased_to_two(rho, &phis, t, opts)?;
    Ok((DecompositionPair::new(left, right)?, steps))
}

/// Decomposition of ρ with `|<ψᵢ|φⱼ>|² = t` for both `j`, given
/// `tr(ρ|φⱼ><φⱼ|) = t`.
pub(crate) fn unbiased_to_two<R: Real>(
    rho: &DensityMatrix<R>,
    phis: &[PureState<R>; 2],
    t: R,
    opts: &EqualizeOptions<R>,
) -> Result<(Decomposition<R>, Vec<DeflationStep<R>>)> {
    let mut current = rho.clone();
    let mut remaining = R::one();
    let mut weights = Vec::new();
    let mut states = Vec::new();
    let mut steps = Vec::new();
    let f1 = phis[0].projector();
    loop {
        let spec = current.spectrum(opts.rank_tol)?;
        steps.push(DeflationStep {
            residual: current.clone(),
            overlaps: [current.expectation(&phis[0]), current.expectation(&phis[1])],
        });
        if spec.rank == 1 {
            weights.push(remaining);
            states.push(spec.eigenvectors[0].clone());
            break;
        }
        let psi = next_element(&current, spec.support(), &f1, phis, t, opts, steps.len() as u64)?;
        let p = max_weight(&current, &psi, opts.rank_tol)?;
        weights.push(remaining * p);
        states.push(psi.clone());
        remaining = remaining * (R::one() - p);
        let next = deflate(&current, &psi, p, opts.rank_tol)?;
        let next_rank = next.rank(opts.rank_tol)?;
        if next_rank + 1 != spec.rank {
            return Err(Error::RankMismatch { expected: (spec.rank - 1).to_string(), found: next_rank });
        }
        current = next;
    }
    let left = Decomposition::new(weights, states, rho.clone())?;
    Ok((left, steps))
}

/// Orthonormal basis of the support with the projection of `φ₁` first and
/// every other vector orthogonal to `φ₁`. Returns the basis and `|<e₁|φ₁>|`.
fn adapted_basis<R: Real>(support: &[PureState<R>], phi1: &PureState<R>) -> (Vec<Vec<Complex<R>>>, R) {
    let dim = phi1.dim();
    let mut e1 = vec![Complex::zero(); dim];
    for v in support {
        let c = v.inner(phi1);
        for (x, a) in e1.iter_mut().zip(v.amplitudes()) {
            *x = *x + a * c;
        }
    }
    let n1 = norm(&e1);
    let e1: Vec<_> = e1.into_iter().map(|z| z / n1).collect();
    let mut basis = vec![e1];
    // Gram-Schmidt the support vectors against e1, keeping the n-1 largest residuals.
    let mut candidates: Vec<Vec<Complex<R>>> = support.iter().map(|v| v.amplitudes().to_vec()).collect();
    while basis.len() < support.len() {
        let mut best: Option<(usize, R, Vec<Complex<R>>)> = None;
        for (idx, cand) in candidates.iter().enumerate() {
            let mut r = cand.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &r);
                    for (x, y) in r.iter_mut().zip(b) {
                        *x = *x - y * c;
                    }
                }
            }
            let nr = norm(&r);
            if best.as_ref().is_none_or(|(_, n, _)| nr > *n) {
                best = Some((idx, nr, r));
            }
        }
        let (idx, nr, r) = best.expect("candidates remain");
        basis.push(r.into_iter().map(|z| z / nr).collect());
        candidates.swap_remove(idx);
    }
    (basis, n1)
}

/// Coordinates of `psi` in `basis`, phased so the first is real nonnegative,
/// with the first fixed to `c1` and the rest rescaled to norm `√(1-c1²)`.
fn shell_coordinates<R: Real>(basis: &[Vec<Complex<R>>], psi: &PureState<R>, c1: R) -> Vec<Complex<R>> {
    let mut coords: Vec<Complex<R>> = basis.iter().map(|b| inner(b, psi.amplitudes())).collect();
    let lead = coords[0];
    if lead.norm() > R::min_positive_value() {
        let phase = lead.conj() / lead.norm();
        for c in &mut coords {
            *c = *c * phase;
        }
    }
    coords[0] = Complex::new(c1, R::zero());
    let rest = norm(&coords[1..]);
    let target = (R::one() - c1 * c1).max(R::zero()).sqrt();
    if rest > R::min_positive_value() {
        for c in &mut coords[1..] {
            *c = *c * (target / rest);
        }
    }
    coords
}

fn from_coordinates<R: Real>(basis: &[Vec<Complex<R>>], coords: &[Complex<R>]) -> PureState<R> {
    let dim = basis[0].len();
    let mut v = vec![Complex::zero(); dim];
    for (b, c) in basis.iter().zip(coords) {
        for (x, y) in v.iter_mut().zip(b) {
            *x = *x + y * c;
        }
    }
    PureState::from_unnormalized(v).expect("nonzero combination of orthonormal vectors")
}

/// Great-circle path on the shell from `a` (τ = 0) to `b` (τ = 1), acting on
/// the orthogonal block as a real vector. Antipodal endpoints are joined
/// through the phase arc `e^{iπτ}·w_a`.
fn shell_path<R: Real>(a: &[Complex<R>], b: &[Complex<R>], tau: R) -> Vec<Complex<R>> {
    let r2: R = a[1..].iter().map(|z| z.norm_sqr()).sum();
    let mut out = a.to_vec();
    if r2 <= R::min_positive_value() {
        return out;
    }
    let cos = (inner(&a[1..], &b[1..]).re / r2).max(-R::one()).min(R::one());
    if cos <= -R::one() + R::tol(1e-12) {
        let phase = Complex::from_polar(R::one(), R::PI() * tau);
        for (o, x) in out[1..].iter_mut().zip(&a[1..]) {
            *o = x * phase;
        }
        return out;
    }
    let omega = cos.acos();
    let (wa, wb) = if omega < R::tol(1e-12) {
        (R::one() - tau, tau)
    } else {
        let s = omega.sin();
        (((R::one() - tau) * omega).sin() / s, (tau * omega).sin() / s)
    };
    for ((o, x), y) in out[1..].iter_mut().zip(&a[1..]).zip(&b[1..]) {
        *o = x * wa + y * wb;
    }
    out
}

/// A state in the support of `current` unbiased to both `φ₁` and `φ₂`.
fn next_element<R: Real>(
    current: &DensityMatrix<R>,
    support: &[PureState<R>],
    f1: &CMatrix<R>,
    phis: &[PureState<R>; 2],
    t: R,
    opts: &EqualizeOptions<R>,
    step: u64,
) -> Result<PureState<R>> {
    let (basis, n1) = adapted_basis(support, &phis[0]);
    let c1 = (t.sqrt() / n1).min(R::one());
    let h = |psi: &PureState<R>| psi.overlap(&phis[1]) - t;
    let stop = R::tol(1e-13);

    for attempt in 0..=opts.restarts as u64 {
        let eq_opts = EqualizeOptions { seed: crate::random::derive_seed(opts.seed, (step << 8) | attempt), ..*opts };
        let start = if attempt == 0 {
            eigen_decomposition(current, opts.rank_tol)?
        } else {
            let mut rng = crate::random::rng_from_seed(eq_opts.seed);
            let u = crate::random::haar_unitary::<R>(support.len(), &mut rng);
            super::mixing::mix(&eigen_decomposition(current, opts.rank_tol)?, &u)?
        };
        let (decomp, _) = super::equalize::equalize_from(start, f1, &eq_opts)?;
        let points: Vec<(R, Vec<Complex<R>>)> = decomp
            .states()
            .iter()
            .map(|psi| {
                let coords = shell_coordinates(&basis, psi, c1);
                (h(&from_coordinates(&basis, &coords)), coords)
            })
            .collect();
        if let Some((_, coords)) = points.iter().find(|(v, _)| v.abs() <= stop) {
            return Ok(from_coordinates(&basis, coords));
        }
        let above = points.iter().find(|(v, _)| *v > R::zero());
        let below = points.iter().find(|(v, _)| *v < R::zero());
        if let (Some((_, ck)), Some((_, cl))) = (above, below) {
            let along = |tau: R| from_coordinates(&basis, &shell_path(ck, cl, tau));
            let tau = bisect(|tau| h(&along(tau)), R::zero(), R::one(), stop);
            let psi = along(tau);
            if h(&psi).abs() <= R::tol(1e-10) {
                return Ok(psi);
            }
        }
        // No usable sign change (rounding on a nearly flat h): retry from a
        // Haar-mixed decomposition.
    }
    Err(Error::PathDegenerate)
}
