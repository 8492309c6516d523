//! Seeded sampling of states, observables and unitaries.
//!
//! All randomness is drawn from ChaCha8 streams; [`derive_seed`] splits a
//! caller seed into independent per-task seeds.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::{inner, norm};
use crate::linalg::{CMatrix, DensityMatrix};
use crate::scalar::Real;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `(seed, index)`; used to give each trial,
/// restart or shard its own stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Real>(rng: &mut impl Rng) -> Complex<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(R::lit(re), R::lit(im))
}

/// `rows × cols` matrix of independent standard complex Gaussians.
pub fn ginibre<R: Real>(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix<R> {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Real>(n: usize, rng: &mut impl Rng) -> CMatrix<R> {
    loop {
        let g = ginibre::<R>(n, n, rng);
        let mut cols: Vec<Vec<Complex<R>>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for u in &cols {
                    let c = inner(u, &v);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi = *vi - ui * c;
                    }
                }
            }
            let nv = norm(&v);
            if !(nv > R::tol(1e-8)) {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
        if ok {
            return CMatrix::from_columns(&cols);
        }
    }
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian entries.
pub fn random_hermitian<R: Real>(dim: usize, rng: &mut impl Rng) -> CMatrix<R> {
    ginibre::<R>(dim, dim, rng).hermitian_part()
}

/// Induced-measure random state `GG†/tr(GG†)` with `G` a `dim × rank`
/// Ginibre matrix. Deterministic in `seed`.
pub fn random_density<R: Real>(dim: usize, rank: usize, seed: u64) -> DensityMatrix<R> {
    let mut rng = rng_from_seed(seed);
    random_density_with(dim, rank, &mut rng)
}

pub fn random_density_with<R: Real>(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix<R> {
    assert!(rank >= 1 && rank <= dim, "rank must lie in 1..=dim");
    let g = ginibre::<R>(dim, rank, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale(R::one() / tr).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(7);
        for n in 1..7 {
            let u = haar_unitary::<f64>(n, &mut rng);
            assert!(u.row_orthonormality_error() < 1e-12);
        }
    }

    #[test]
    fn random_density_is_deterministic_and_valid() {
        let a = random_density::<f64>(4, 2, 11);
        let b = random_density::<f64>(4, 2, 11);
        assert_eq!(a, b);
        assert_eq!(a.rank(1e-10).unwrap(), 2);
        assert!(DensityMatrix::new(a.into_matrix()).is_ok());
        let p = random_density::<f64>(3, 1, 5);
        assert!((p.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 1000);
    }
}
