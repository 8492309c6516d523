//! Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::CMatrix;
use super::state::PureState;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which a matrix counts as diagonal.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Default threshold separating support eigenvalues from numerical zeros.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Eigen-decomposition `A = Σ λ_k |v_k><v_k|` with eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<R> {
    pub eigenvalues: Vec<R>,
    pub eigenvectors: Vec<PureState<R>>,
    /// Number of eigenvalues strictly above the rank tolerance.
    pub rank: usize,
}

impl<R: Real> Spectrum<R> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ λ_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> CMatrix<R> {
        reconstruct(&self.eigenvalues, &self.eigenvectors)
    }

    /// Eigenvectors spanning the support (the first `rank` of them).
    pub fn support(&self) -> &[PureState<R>] {
        &self.eigenvectors[..self.rank]
    }
}

pub(crate) fn reconstruct<R: Real>(values: &[R], vectors: &[PureState<R>]) -> CMatrix<R> {
    let d = vectors.first().map_or(0, PureState::dim);
    let mut out = CMatrix::zeros(d, d);
    for (&lambda, v) in values.iter().zip(vectors) {
        let a = v.amplitudes();
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = out[(i, j)] + a[i] * a[j].conj() * lambda;
            }
        }
    }
    out
}

fn off_diagonal_norm<R: Real>(a: &CMatrix<R>) -> R {
    let n = a.rows();
    let mut s = R::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix (only the Hermitian part is used).
pub fn hermitian_eig<R: Real>(a: &CMatrix<R>, rank_tol: R) -> Result<Spectrum<R>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::<R>::identity(n);
    let scale = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<R>().sqrt().max(R::one());
    let threshold = R::tol(OFF_DIAGONAL_TOL) * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, off_diagonal: off.to_f64_lossy() });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order
        .sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let eigenvalues: Vec<R> = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| PureState::from_unnormalized(v.column(i)).expect("Jacobi columns are unit vectors"))
        .collect();
    let rank = eigenvalues.iter().filter(|&&l| l > rank_tol).count();
    Ok(Spectrum { eigenvalues, eigenvectors, rank })
}

/// One two-sided Jacobi rotation annihilating `m[p][q]`.
fn rotate<R: Real>(m: &mut CMatrix<R>, v: &mut CMatrix<R>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag <= R::min_positive_value() {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Phase e maps the pivot onto the positive real axis; the rest is a real rotation.
    let e = apq / mag;
    let ec = e.conj();
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.is_zero() { R::one() } else { theta.signum() / (theta.abs() + (theta * theta + R::one()).sqrt()) };
    let c = R::one() / (t * t + R::one()).sqrt();
    let s = t * c;
    let n = m.rows();

    // Columns: M = A J with J_pp = c, J_qp = -s ē, J_pq = s, J_qq = c ē.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * ec * s;
        m[(k, q)] = akp * s + akq * ec * c;
    }
    // Rows: A' = J† M.
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c - mqk * e * s;
        m[(q, k)] = mpk * s + mqk * e * c;
    }
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)] = Complex::new(m[(p, p)].re, R::zero());
    m[(q, q)] = Complex::new(m[(q, q)].re, R::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::inner;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1-i], [1+i, 3]]: trace 5, determinant 4, eigenvalues 4 and 1.
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, -1.0)], vec![c(1.0, 1.0), c(3.0, 0.0)]]).unwrap();
        let s = hermitian_eig(&a, 1e-10).unwrap();
        assert!((s.eigenvalues[0] - 4.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let a = CMatrix::from_real_diagonal(&[0.25, 0.75, 0.0]);
        let s = hermitian_eig(&a, 1e-10).unwrap();
        assert_eq!(s.eigenvalues, vec![0.75, 0.25, 0.0]);
        assert_eq!(s.rank, 2);
        assert_eq!(s.eigenvectors[0].amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn orthonormal_eigenvectors_for_dense_input() {
        let n = 5;
        let a = CMatrix::from_fn(n, n, |i, j| {
            let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j {
                0.3 * hi
            } else if i > j {
                -0.3 * hi
            } else {
                0.0
            };
            c(1.0 / (1.0 + lo + hi), im)
        });
        let s = hermitian_eig(&a, 1e-10).unwrap();
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-12);
        for (j, vj) in s.eigenvectors.iter().enumerate() {
            for (k, vk) in s.eigenvectors.iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((inner(vj.amplitudes(), vk.amplitudes()) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_rectangular() {
        let a = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_eig(&a, 1e-10), Err(Error::NotSquare { .. })));
    }
}
