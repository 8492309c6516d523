use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, PureState};
use crate::metrics::{average_trace_distance, bounds, upper_bound, NEGLIGIBLE_WEIGHT};
use crate::scalar::Real;

/// Tolerance on `Σ pᵢ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Max-norm tolerance on `Σ pᵢ |ψᵢ><ψᵢ| - target`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Default bound on `max |<ψᵢ|φⱼ>|² - tr(ρσ)|` for declaring a pair unbiased.
pub const CERTIFICATE_TOL: f64 = 1e-7;

/// Convex decomposition `target = Σ pᵢ |ψᵢ><ψᵢ|` into pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<R> {
    weights: Vec<R>,
    states: Vec<PureState<R>>,
    target: DensityMatrix<R>,
}

impl<R: Real> Decomposition<R> {
    /// Checks positivity and normalization of the weights and the
    /// reconstruction of `target`.
    pub fn new(weights: Vec<R>, states: Vec<PureState<R>>, target: DensityMatrix<R>) -> Result<Self> {
        let d = Self::unchecked(weights, states, target)?;
        d.check()?;
        Ok(d)
    }

    /// Builds a decomposition whose target is its own reconstruction.
    pub fn from_elements(weights: Vec<R>, states: Vec<PureState<R>>) -> Result<Self> {
        let dim =
            states.first().map(PureState::dim).ok_or_else(|| Error::InvalidDecomposition("no elements".into()))?;
        let target = DensityMatrix::new(reconstruct(&weights, &states, dim))?;
        Self::new(weights, states, target)
    }

    /// Structural checks only (lengths, dimensions); numerical invariants are
    /// left to [`Decomposition::check`] or [`verify_pair`](super::verify_pair).
    pub(crate) fn unchecked(weights: Vec<R>, states: Vec<PureState<R>>, target: DensityMatrix<R>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::InvalidDecomposition(format!("{} weights for {} states", weights.len(), states.len())));
        }
        if let Some(s) = states.iter().find(|s| s.dim() != target.dim()) {
            return Err(Error::DimensionMismatch { expected: target.dim(), found: s.dim() });
        }
        Ok(Self { weights, states, target })
    }

    pub fn check(&self) -> Result<()> {
        if let Some(w) = self.weights.iter().find(|w| !(**w > R::zero())) {
            return Err(Error::InvalidDecomposition(format!("non-positive weight {w}")));
        }
        let dev = self.weight_sum_error();
        if dev > R::tol(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidDecomposition(format!("weights sum to 1 {dev:+e}")));
        }
        let err = self.reconstruction_error();
        if !(err <= R::tol(RECONSTRUCTION_TOL)) {
            return Err(Error::InvalidDecomposition(format!("reconstruction error {err:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState<R>] {
        &self.states
    }

    pub fn target(&self) -> &DensityMatrix<R> {
        &self.target
    }

    pub fn elements(&self) -> impl Iterator<Item = (R, &PureState<R>)> {
        self.weights.iter().copied().zip(&self.states)
    }

    /// Minimal iff the element count equals `rank(target)`.
    pub fn is_minimal(&self, rank_tol: R) -> Result<bool> {
        Ok(self.target.rank(rank_tol)? == self.len())
    }

    pub fn weight_sum_error(&self) -> R {
        (self.weights.iter().copied().sum::<R>() - R::one()).abs()
    }

    pub fn reconstruction(&self) -> CMatrix<R> {
        reconstruct(&self.weights, &self.states, self.dim())
    }

    pub fn reconstruction_error(&self) -> R {
        self.reconstruction().max_abs_diff(self.target.matrix())
    }

    /// Same elements, new target (used when the target is known more precisely).
    pub fn with_target(self, target: DensityMatrix<R>) -> Result<Self> {
        Self::new(self.weights, self.states, target)
    }

    /// Unnormalized vectors `√pᵢ |ψᵢ>`.
    pub(crate) fn scaled_vectors(&self) -> Vec<Vec<Complex<R>>> {
        self.elements()
            .map(|(p, s)| {
                let sp = p.sqrt();
                s.amplitudes().iter().map(|z| z * sp).collect()
            })
            .collect()
    }

    /// Rebuilds from unnormalized vectors, dropping negligible ones and
    /// renormalizing the weights.
    pub(crate) fn from_scaled_vectors(vectors: Vec<Vec<Complex<R>>>, target: DensityMatrix<R>) -> Result<Self> {
        let cut = R::lit(NEGLIGIBLE_WEIGHT);
        let mut weights = Vec::with_capacity(vectors.len());
        let mut states = Vec::with_capacity(vectors.len());
        for v in vectors {
            let w: R = v.iter().map(|z| z.norm_sqr()).sum();
            if w < cut {
                continue;
            }
            weights.push(w);
            states.push(PureState::from_unnormalized(v)?);
        }
        let total: R = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Self::unchecked(weights, states, target)
    }
}

pub(crate) fn reconstruct<R: Real>(weights: &[R], states: &[PureState<R>], dim: usize) -> CMatrix<R> {
    let mut out = CMatrix::zeros(dim, dim);
    for (&p, s) in weights.iter().zip(states) {
        let a = s.amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = out[(i, j)] + a[i] * a[j].conj() * p;
            }
        }
    }
    out
}

/// Decompositions of `ρ` (left) and `σ` (right) with their unbiasedness statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionPair<R> {
    pub left: Decomposition<R>,
    pub right: Decomposition<R>,
    /// `tr(ρσ)`.
    pub hs_product: R,
    /// `maxᵢⱼ | |<ψᵢ|φⱼ>|² - tr(ρσ) |`.
    pub max_deviation: R,
    /// Average trace distance of the pair.
    pub delta_avg: R,
}

impl<R: Real> DecompositionPair<R> {
    pub fn new(left: Decomposition<R>, right: Decomposition<R>) -> Result<Self> {
        let hs_product = crate::metrics::hs_inner_product(left.target(), right.target())?;
        let max_deviation = max_deviation(&left, &right, hs_product);
        let delta_avg = average_trace_distance(&left, &right)?;
        Ok(Self { left, right, hs_product, max_deviation, delta_avg })
    }

    pub fn is_unbiased(&self, tol: R) -> bool {
        self.max_deviation <= tol
    }

    /// Roles of ρ and σ exchanged.
    pub fn swapped(self) -> Self {
        Self { left: self.right, right: self.left, ..self }
    }

    /// `√(1 - tr(ρσ))`, the value every unbiased pair attains.
    pub fn upper_bound(&self) -> Result<R> {
        upper_bound(self.hs_product)
    }

    /// Matrix of overlaps `|<ψᵢ|φⱼ>|²`.
    pub fn overlaps(&self) -> Vec<Vec<R>> {
        self.left.states().iter().map(|psi| self.right.states().iter().map(|phi| psi.overlap(phi)).collect()).collect()
    }
}

pub(crate) fn max_deviation<R: Real>(left: &Decomposition<R>, right: &Decomposition<R>, hs: R) -> R {
    let mut worst = R::zero();
    for psi in left.states() {
        for phi in right.states() {
            worst = worst.max((psi.overlap(phi) - hs).abs());
        }
    }
    worst
}

/// One named pass/fail line of a [`CertificateReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub pass: bool,
    pub hs_product: f64,
    pub max_deviation: f64,
    pub delta_avg: f64,
    pub lower: f64,
    pub upper: f64,
    pub checks: Vec<Check>,
}

/// Recomputes every certificate quantity of `pair` from scratch.
pub fn verify_pair<R: Real>(pair: &DecompositionPair<R>, tol: R) -> Result<CertificateReport> {
    let b = bounds(pair.left.target(), pair.right.target())?;
    let hs = b.hs_product;
    let dev = max_deviation(&pair.left, &pair.right, hs);
    let delta = average_trace_distance(&pair.left, &pair.right)?;
    let f = |x: R| x.to_f64_lossy();
    let mut checks = Vec::new();
    let mut push = |name: &'static str, value: R, threshold: R| {
        checks.push(Check { name, value: f(value), threshold: f(threshold), pass: value <= threshold });
    };
    let min_weight = |d: &Decomposition<R>| d.weights().iter().copied().fold(R::infinity(), R::min);
    push("left_weights_positive", -min_weight(&pair.left), R::zero());
    push("left_weight_sum", pair.left.weight_sum_error(), R::tol(WEIGHT_SUM_TOL));
    push("left_reconstruction", pair.left.reconstruction_error(), R::tol(RECONSTRUCTION_TOL));
    push("right_weights_positive", -min_weight(&pair.right), R::zero());
    push("right_weight_sum", pair.right.weight_sum_error(), R::tol(WEIGHT_SUM_TOL));
    push("right_reconstruction", pair.right.reconstruction_error(), R::tol(RECONSTRUCTION_TOL));
    push("max_deviation", dev, tol);
    push("delta_avg_consistency", (delta - pair.delta_avg).abs(), R::tol(1e-10));
    push("lower_bound", b.lower - delta, R::tol(1e-10));
    push("upper_bound", delta - b.upper, R::tol(1e-10));
    push("saturation", (b.upper - delta).abs(), tol * R::lit(10.0));
    let pass = checks.iter().all(|c| c.pass);
    Ok(CertificateReport {
        pass,
        hs_product: f(hs),
        max_deviation: f(dev),
        delta_avg: f(delta),
        lower: f(b.lower),
        upper: f(b.upper),
        checks,
    })
}
