//! Moving between decompositions of the same state with unitary mixing.

use num_complex::Complex;
use num_traits::Zero;

use super::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix};
use crate::scalar::Real;

/// Tolerance on `U U† = I` accepted by [`mix`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Minimal decomposition from the eigenvalues above `rank_tol`.
pub fn eigen_decomposition<R: Real>(rho: &DensityMatrix<R>, rank_tol: R) -> Result<Decomposition<R>> {
    let spec = rho.spectrum(rank_tol)?;
    let kept = &spec.eigenvalues[..spec.rank];
    let total: R = kept.iter().copied().sum();
    let weights = kept.iter().map(|&l| l / total).collect();
    Decomposition::new(weights, spec.support().to_vec(), rho.clone())
}

/// Mixture theorem: `|ṽᵢ> = Σ_k U_{ki} √p_k |ψ_k>`.
///
/// `U` is `m × n` with orthonormal rows (`m = |D|`, `n ≥ m`); a square `U`
/// must be unitary. Elements of weight below `1e-12` are dropped.
pub fn mix<R: Real>(d: &Decomposition<R>, u: &CMatrix<R>) -> Result<Decomposition<R>> {
    if u.rows() != d.len() || u.cols() < u.rows() {
        return Err(Error::DimensionMismatch { expected: d.len(), found: u.rows() });
    }
    let dev = u.row_orthonormality_error();
    if !(dev <= R::tol(UNITARITY_TOL)) {
        return Err(Error::NotUnitary { deviation: dev.to_f64_lossy() });
    }
    let out = Decomposition::from_scaled_vectors(mix_vectors(&d.scaled_vectors(), u), d.target().clone())?;
    out.check()?;
    Ok(out)
}

pub(crate) fn mix_vectors<R: Real>(vectors: &[Vec<Complex<R>>], u: &CMatrix<R>) -> Vec<Vec<Complex<R>>> {
    let dim = vectors.first().map_or(0, Vec::len);
    (0..u.cols())
        .map(|i| {
            let mut v = vec![Complex::zero(); dim];
            for (k, a) in vectors.iter().enumerate() {
                let c = u[(k, i)];
                if c.is_zero() {
                    continue;
                }
                for (vi, ai) in v.iter_mut().zip(a) {
                    *vi = *vi + ai * c;
                }
            }
            v
        })
        .collect()
}

/// Rotation acting on elements `k`, `l`:
/// `U|k> = cos(θ/2)|k> - sin(θ/2)|l>`, `U|l> = sin(θ/2)|k> + cos(θ/2)|l>`.
pub fn swap_unitary<R: Real>(m: usize, k: usize, l: usize, theta: R) -> CMatrix<R> {
    let half = theta * R::lit(0.5);
    let (s, c) = half.sin_cos();
    let mut u = CMatrix::identity(m);
    u[(k, k)] = Complex::new(c, R::zero());
    u[(l, k)] = Complex::new(-s, R::zero());
    u[(k, l)] = Complex::new(s, R::zero());
    u[(l, l)] = Complex::new(c, R::zero());
    u
}

/// Continuous path from `D` (θ = 0) to `D` with elements `k` and `l`
/// exchanged (θ = π).
pub fn continuous_swap<R: Real>(d: &Decomposition<R>, k: usize, l: usize, theta: R) -> Result<Decomposition<R>> {
    let m = d.len();
    for idx in [k, l] {
        if idx >= m {
            return Err(Error::IndexOutOfRange { index: idx, len: m });
        }
    }
    if k == l {
        return Err(Error::PreconditionViolated("swap indices must differ".into()));
    }
    mix(d, &swap_unitary(m, k, l, theta))
}

/// The two vectors replacing `a_k`, `a_l` under [`swap_unitary`].
pub(crate) fn swap_vectors<R: Real>(
    ak: &[Complex<R>],
    al: &[Complex<R>],
    theta: R,
) -> (Vec<Complex<R>>, Vec<Complex<R>>) {
    let (s, c) = (theta * R::lit(0.5)).sin_cos();
    let vk = ak.iter().zip(al).map(|(a, b)| a * c - b * s).collect();
    let vl = ak.iter().zip(al).map(|(a, b)| a * s + b * c).collect();
    (vk, vl)
}

/// First `m` rows of a unitary: an `m × n` isometry with orthonormal rows,
/// as accepted by [`mix`] for decompositions with extra elements.
pub fn leading_rows<R: Real>(u: &CMatrix<R>, m: usize) -> CMatrix<R> {
    CMatrix::from_fn(m, u.cols(), |i, j| u[(i, j)])
}
