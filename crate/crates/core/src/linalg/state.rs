//! Validated state types: pure states and density matrices.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::eig::{hermitian_eig, Spectrum, DEFAULT_RANK_TOL};
use super::matrix::{inner, norm, overlap_sqr, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance for the Hermitian and unit-trace checks.
pub const VALIDATION_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density matrix may have.
pub const PSD_TOL: f64 = 1e-10;
/// Maximum norm of the off-support component accepted by [`support_inverse`].
pub const SUPPORT_TOL: f64 = 1e-8;
const PHASE_CUTOFF: f64 = 1e-9;

/// Unit vector with canonical global phase: the first amplitude of modulus
/// above `1e-9` is real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<R> {
    amplitudes: Vec<Complex<R>>,
}

impl<R: Real> PureState<R> {
    /// Accepts an already normalized vector (to `1e-12`) and fixes its phase.
    pub fn new(amplitudes: Vec<Complex<R>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Parse("empty state vector".into()));
        }
        let n2: R = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let deviation = (n2 - R::one()).abs();
        if deviation > R::tol(VALIDATION_TOL) {
            return Err(Error::NotNormalized { deviation: deviation.to_f64_lossy() });
        }
        Ok(Self { amplitudes: canonical_phase(amplitudes) })
    }

    /// Normalizes `v`; fails only on a (numerically) zero vector.
    pub fn from_unnormalized(v: Vec<Complex<R>>) -> Result<Self> {
        let n = norm(&v);
        if v.is_empty() || !(n > R::min_positive_value()) {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        let inv = R::one() / n;
        Ok(Self { amplitudes: canonical_phase(v.into_iter().map(|z| z * inv).collect()) })
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex::zero(); dim];
        v[k] = Complex::one();
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<R>] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex<R> {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|<self|other>|²`.
    pub fn overlap(&self, other: &Self) -> R {
        overlap_sqr(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> CMatrix<R> {
        CMatrix::outer(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix<R> {
        DensityMatrix { matrix: self.projector() }
    }
}

fn canonical_phase<R: Real>(mut v: Vec<Complex<R>>) -> Vec<Complex<R>> {
    let cutoff = R::lit(PHASE_CUTOFF);
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > cutoff) {
        if lead.im == R::zero() && lead.re > R::zero() {
            return v;
        }
        let phase = lead.conj() / lead.norm();
        for z in &mut v {
            *z = *z * phase;
        }
        // Remove the rounding residue on the leading amplitude.
        if let Some(z) = v.iter_mut().find(|z| z.norm() > cutoff) {
            *z = Complex::new(z.norm(), R::zero());
        }
    }
    v
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<R> {
    matrix: CMatrix<R>,
}

impl<R: Real> DensityMatrix<R> {
    /// Validates with the default tolerances.
    pub fn new(raw: CMatrix<R>) -> Result<Self> {
        validate_density(raw, R::tol(VALIDATION_TOL))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = R::one() / R::from_count(dim);
        Self { matrix: CMatrix::identity(dim).scale(w) }
    }

    pub fn from_diagonal(probs: &[R]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<R> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<R> {
        self.matrix
    }

    pub fn spectrum(&self, rank_tol: R) -> Result<Spectrum<R>> {
        hermitian_eig(&self.matrix, rank_tol)
    }

    pub fn rank(&self, rank_tol: R) -> Result<usize> {
        Ok(self.spectrum(rank_tol)?.rank)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> R {
        hs_product_raw(&self.matrix, &self.matrix)
    }

    /// `<ψ|ρ|ψ>`.
    pub fn expectation(&self, psi: &PureState<R>) -> R {
        self.matrix.expectation(psi.amplitudes())
    }

    /// Rebuilds a density matrix from a possibly slightly non-PSD Hermitian
    /// matrix by zeroing eigenvalues at or below `rank_tol` and renormalizing.
    pub fn from_clipped(raw: &CMatrix<R>, rank_tol: R) -> Result<Self> {
        let spec = hermitian_eig(raw, rank_tol)?;
        let kept = &spec.eigenvalues[..spec.rank];
        let total: R = kept.iter().copied().sum();
        if !(total > R::zero()) {
            return Err(Error::NotPsd { min_eigenvalue: spec.eigenvalues[0].to_f64_lossy() });
        }
        let w: Vec<R> = kept.iter().map(|&l| l / total).collect();
        let m = super::eig::reconstruct(&w, &spec.eigenvectors[..spec.rank]);
        Ok(Self { matrix: m.hermitian_part() })
    }

    pub(crate) fn from_trusted(matrix: CMatrix<R>) -> Self {
        Self { matrix }
    }
}

/// `Re tr(AB)` for Hermitian `A`, `B`, computed without the full product.
pub(crate) fn hs_product_raw<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> R {
    let n = a.rows();
    let mut s = Complex::zero();
    for i in 0..n {
        for k in 0..n {
            s = s + a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}

/// Checks Hermiticity on the raw input, then symmetrizes and checks the
/// trace and positivity. PSD is tested at `max(tol, 1e-10)`.
pub fn validate_density<R: Real>(raw: CMatrix<R>, tol: R) -> Result<DensityMatrix<R>> {
    if !raw.is_square() {
        return Err(Error::NotSquare { rows: raw.rows(), cols: raw.cols() });
    }
    if raw.rows() == 0 {
        return Err(Error::Parse("zero-dimensional matrix".into()));
    }
    let herm = raw.hermiticity_error();
    if !(herm <= tol) {
        return Err(Error::NotHermitian { deviation: herm.to_f64_lossy() });
    }
    let matrix = raw.hermitian_part();
    let tr = matrix.trace().re;
    let dev = (tr - R::one()).abs();
    if !(dev <= tol) {
        return Err(Error::NotUnitTrace { deviation: dev.to_f64_lossy() });
    }
    let spec = hermitian_eig(&matrix, R::tol(DEFAULT_RANK_TOL))?;
    let min = *spec.eigenvalues.last().expect("nonempty spectrum");
    if min < -tol.max(R::tol(PSD_TOL)) {
        return Err(Error::NotPsd { min_eigenvalue: min.to_f64_lossy() });
    }
    Ok(DensityMatrix { matrix })
}

/// `<v|A⁺|v>` with `A⁺` the pseudo-inverse on the support of `A`.
pub fn support_inverse<R: Real>(a: &DensityMatrix<R>, v: &PureState<R>, rank_tol: R) -> Result<R> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: v.dim() });
    }
    let spec = a.spectrum(rank_tol)?;
    let mut value = R::zero();
    let mut outside = v.amplitudes().to_vec();
    for (lambda, vk) in spec.eigenvalues.iter().zip(spec.support()) {
        let c = vk.inner(v);
        value = value + c.norm_sqr() / *lambda;
        for (o, e) in outside.iter_mut().zip(vk.amplitudes()) {
            *o = *o - e * c;
        }
    }
    let residual = norm(&outside);
    if residual > R::tol(SUPPORT_TOL) {
        return Err(Error::OutsideSupport { residual: residual.to_f64_lossy() });
    }
    Ok(value)
}
