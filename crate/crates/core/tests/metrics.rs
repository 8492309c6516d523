use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use udecomp::decompose::{eigen_decomposition, leading_rows, max_mixed_pair, mix, Decomposition};
use udecomp::linalg::{DensityMatrix, PureState, DEFAULT_RANK_TOL};
use udecomp::metrics::*;
use udecomp::random::{haar_unitary, random_density, rng_from_seed};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Half the eigenvalue 1-norm of `ρ - σ`, via nalgebra.
fn trace_distance_oracle(rho: &DensityMatrix<f64>, sigma: &DensityMatrix<f64>) -> f64 {
    let d = rho.dim();
    let m = DMatrix::from_fn(d, d, |i, j| rho.matrix()[(i, j)] - sigma.matrix()[(i, j)]);
    0.5 * m.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

fn random_mixed(d: &Decomposition<f64>, extra: usize, seed: u64) -> Decomposition<f64> {
    let mut rng = rng_from_seed(seed);
    let n = d.len() + extra;
    let u = haar_unitary::<f64>(n, &mut rng);
    mix(d, &leading_rows(&u, d.len())).unwrap()
}

fn dist(p: &[f64]) -> ClassicalDistribution<f64> {
    ClassicalDistribution::new(p.to_vec()).unwrap()
}

#[test]
fn classical_examples() {
    assert_eq!(classical_variation_distance(&dist(&[0.5, 0.5]), &dist(&[0.25, 0.75])), 0.25);
    assert_eq!(collision_complement(&dist(&[0.5, 0.5]), &dist(&[0.25, 0.75])), 0.5);
    assert_eq!(classical_variation_distance(&dist(&[0.3, 0.7]), &dist(&[0.3, 0.7])), 0.0);
    assert_eq!(classical_variation_distance(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])), 1.0);
    assert_eq!(collision_complement(&dist(&[1.0, 0.0]), &dist(&[1.0, 0.0])), 0.0);
    assert_eq!(collision_complement(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])), 1.0);
    assert_eq!(classical_variation_distance(&dist(&[1.0]), &dist(&[0.5, 0.5])), 0.5);
}

#[test]
fn average_distance_examples() {
    let mixed = DensityMatrix::<f64>::maximally_mixed(2);
    let z = eigen_decomposition(&mixed, DEFAULT_RANK_TOL).unwrap();
    assert!((average_trace_distance(&z, &z).unwrap() - 0.5).abs() < 1e-15);

    let plus = PureState::from_unnormalized(vec![C::new(1.0, 0.0), C::new(1.0, 0.0)]).unwrap();
    let minus = PureState::from_unnormalized(vec![C::new(1.0, 0.0), C::new(-1.0, 0.0)]).unwrap();
    let x = Decomposition::new(vec![0.5, 0.5], vec![plus, minus], mixed.clone()).unwrap();
    assert!((average_trace_distance(&z, &x).unwrap() - H).abs() < 1e-15);

    let rho: DensityMatrix<f64> = random_density(3, 1, 5);
    let sigma: DensityMatrix<f64> = random_density(3, 1, 6);
    let (left, right) =
        (eigen_decomposition(&rho, DEFAULT_RANK_TOL).unwrap(), eigen_decomposition(&sigma, DEFAULT_RANK_TOL).unwrap());
    assert_eq!(left.len(), 1);
    let delta = average_trace_distance(&left, &right).unwrap();
    assert!((delta - trace_distance_oracle(&rho, &sigma)).abs() < 1e-12);
}

#[test]
fn bounds_examples() {
    let mixed = DensityMatrix::<f64>::maximally_mixed(2);
    let b = bounds(&mixed, &mixed).unwrap();
    assert_eq!((b.lower, b.hs_product), (0.0, 0.5));
    assert!((b.upper - H).abs() < 1e-15);

    let zero = PureState::<f64>::basis(2, 0).density();
    let b = bounds(&zero, &zero).unwrap();
    assert!(b.lower.abs() < 1e-15 && b.upper == 0.0);

    let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
    let b = bounds(&rho, &mixed).unwrap();
    assert!((b.lower - 0.25).abs() < 1e-15 && (b.upper - H).abs() < 1e-15);
    assert!((helstrom(&rho, &mixed).unwrap().success_prob - 0.625).abs() < 1e-15);
}

#[test]
fn game_examples() {
    for d in [2usize, 3] {
        let mixed = DensityMatrix::<f64>::maximally_mixed(d);
        let basis = eigen_decomposition(&mixed, DEFAULT_RANK_TOL).unwrap();
        let want = 0.5 * (1.0 + (1.0 - 1.0 / d as f64));
        let got = simulate_game(&basis, &basis, 100_000, 11).unwrap();
        assert!((got - want).abs() <= 3.0 * (0.25f64 / 1e5).sqrt(), "d={d}: {got} vs {want}");
    }

    let zero = PureState::<f64>::basis(2, 0).density();
    let one = PureState::<f64>::basis(2, 1).density();
    let left = eigen_decomposition(&zero, DEFAULT_RANK_TOL).unwrap();
    let right = eigen_decomposition(&one, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(simulate_game(&left, &right, 50_000, 1).unwrap(), 1.0);

    let pair = max_mixed_pair(&DensityMatrix::<f64>::maximally_mixed(2), DEFAULT_RANK_TOL).unwrap();
    let want = 0.5 * (1.0 + pair.delta_avg);
    let got = simulate_game(&pair.left, &pair.right, 100_000, 2).unwrap();
    assert!((got - want).abs() <= 3.0 * (want * (1.0 - want) / 1e5).sqrt());

    assert_eq!(
        simulate_game(&pair.left, &pair.right, 200_000, 5).unwrap(),
        simulate_game(&pair.left, &pair.right, 200_000, 5).unwrap()
    );
    assert!(simulate_game(&pair.left, &pair.right, 0, 5).is_err());
}

fn arb_dist(n: usize) -> impl Strategy<Value = ClassicalDistribution<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("nonzero total", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| {
            let mut p: Vec<f64> = v.iter().map(|x| x / s).collect();
            let fix = 1.0 - p.iter().sum::<f64>();
            p[0] = (p[0] + fix).max(0.0);
            ClassicalDistribution::new(p).unwrap()
        })
    })
}

fn arb_pair() -> impl Strategy<Value = (DensityMatrix<f64>, DensityMatrix<f64>, u64)> {
    (2usize..=5, any::<u64>()).prop_flat_map(|(d, seed)| {
        (1..=d, 1..=d).prop_map(move |(r, s)| (random_density(d, r, seed), random_density(d, s, seed ^ 0x5555), seed))
    })
}

proptest! {
    #[test]
    fn variation_distance_identity((p, q) in (1usize..8).prop_flat_map(|n| (arb_dist(n), arb_dist(n)))) {
        let one_minus_min = 1.0 - p.probs().iter().zip(q.probs()).map(|(a, b)| a.min(*b)).sum::<f64>();
        prop_assert!((classical_variation_distance(&p, &q) - one_minus_min).abs() <= 1e-12);
        prop_assert!((overlap_complement(&p, &q) - one_minus_min).abs() <= 1e-12);
    }

    #[test]
    fn sandwich_and_weak_unbiasedness((rho, sigma, seed) in arb_pair(), extra in 0usize..3) {
        let b = bounds(&rho, &sigma).unwrap();
        let left = random_mixed(&eigen_decomposition(&rho, DEFAULT_RANK_TOL).unwrap(), extra, seed);
        let right = random_mixed(&eigen_decomposition(&sigma, DEFAULT_RANK_TOL).unwrap(), 0, seed.wrapping_add(1));
        let delta = average_trace_distance(&left, &right).unwrap();
        prop_assert!(b.lower - 1e-10 <= delta && delta <= b.upper + 1e-10);
        let mut weak = 0.0;
        for (p, psi) in left.elements() {
            for (q, phi) in right.elements() {
                weak += p * q * psi.overlap(phi);
            }
        }
        prop_assert!((weak - b.hs_product).abs() <= 1e-10);
    }

    #[test]
    fn pure_and_helstrom_consistency((rho, sigma, _) in arb_pair()) {
        let m = helstrom(&rho, &sigma).unwrap();
        let td = trace_distance(&rho, &sigma).unwrap();
        prop_assert!((td - trace_distance_oracle(&rho, &sigma)).abs() <= 1e-10);
        prop_assert!((m.success_prob - 0.5 * (1.0 + td)).abs() <= 1e-10);
        prop_assert!((&m.projector * &m.projector).max_abs_diff(&m.projector) <= 1e-10);

        let psi = &rho.spectrum(DEFAULT_RANK_TOL).unwrap().eigenvectors[0];
        let phi = &sigma.spectrum(DEFAULT_RANK_TOL).unwrap().eigenvectors[0];
        let pure = trace_distance(&psi.density(), &phi.density()).unwrap();
        prop_assert!((pure - (1.0 - psi.overlap(phi)).max(0.0).sqrt()).abs() <= 1e-10);
        prop_assert!((pure - pure_trace_distance(psi.overlap(phi))).abs() <= 1e-10);
    }
}
