//! Acceptance criteria 1 to 9. Prints one line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use udecomp::conjecture::{
    contextuality_gap, equalized_decomposition, fixed_sigma_feasibility, fuzz, random_density, SearchConfig,
};
use udecomp::decompose::{
    eigen_decomposition, equalize_traced, leading_rows, max_mixed_pair, mix, pure_sigma_pair, qubit_pair,
    rank2_sigma_pair, verify_pair, Decomposition, DecompositionPair, EqualizeOptions,
};
use udecomp::io::to_json_string;
use udecomp::linalg::{DensityMatrix, DEFAULT_RANK_TOL};
use udecomp::metrics::{
    average_trace_distance, bounds, classical_variation_distance, collision_complement, simulate_game,
    ClassicalDistribution,
};
use udecomp::random::{derive_seed, haar_unitary, random_hermitian, rng_from_seed};

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn random_rank(dim: usize, seed: u64) -> usize {
    rng_from_seed(seed).random_range(1..=dim)
}

fn random_state(dim: usize, seed: u64) -> DensityMatrix<f64> {
    random_density(dim, random_rank(dim, derive_seed(seed, 0)), derive_seed(seed, 1))
}

/// `mix(eigen(ρ), V)` with `V` the leading rows of a Haar unitary on
/// `rank + extra` elements.
fn random_decomposition(rho: &DensityMatrix<f64>, extra: usize, seed: u64) -> Decomposition<f64> {
    let eigen = eigen_decomposition(rho, DEFAULT_RANK_TOL).unwrap();
    let u = haar_unitary::<f64>(eigen.len() + extra, &mut rng_from_seed(seed));
    mix(&eigen, &leading_rows(&u, eigen.len())).unwrap()
}

fn criterion_1(_seed: u64) -> Outcome {
    let clock = Instant::now();
    let p = ClassicalDistribution::new(vec![0.5, 0.5]).unwrap();
    let q = ClassicalDistribution::new(vec![0.25, 0.75]).unwrap();
    let (delta_c, p_diff) = (classical_variation_distance(&p, &q), collision_complement(&p, &q));
    let elapsed = clock.elapsed();
    Outcome {
        pass: delta_c == 0.25 && p_diff == 0.5 && elapsed < Duration::from_millis(1),
        detail: format!("delta_c = {delta_c}, p_diff = {p_diff}, {elapsed:?}"),
        report: json!({ "delta_c": delta_c, "p_diff": p_diff }),
    }
}

fn criterion_2(seed: u64) -> Outcome {
    let per_dim: Vec<Value> = (2..=6usize)
        .map(|d| {
            let slacks: Vec<(f64, f64)> = (0..500u64)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let s = derive_seed(seed, ((d as u64) << 32) | i);
                    let rho = random_state(d, derive_seed(s, 0));
                    let sigma = random_state(d, derive_seed(s, 1));
                    let b = bounds(&rho, &sigma).unwrap();
                    (0..20u64).map(move |k| {
                        let ks = derive_seed(s, 10 + k);
                        let extra = (k % 3) as usize;
                        let left = random_decomposition(&rho, extra, derive_seed(ks, 0));
                        let right = random_decomposition(&sigma, 0, derive_seed(ks, 1));
                        let delta = average_trace_distance(&left, &right).unwrap();
                        (b.lower - delta, delta - b.upper)
                    })
                })
                .collect();
            json!({
                "dim": d,
                "pairs": slacks.len(),
                "worst_lower_excess": worst(slacks.iter().map(|s| s.0)),
                "worst_upper_excess": worst(slacks.iter().map(|s| s.1)),
            })
        })
        .collect();
    let excess = worst(
        per_dim
            .iter()
            .flat_map(|v| [v["worst_lower_excess"].as_f64().unwrap(), v["worst_upper_excess"].as_f64().unwrap()]),
    );
    Outcome {
        pass: excess <= 1e-10,
        detail: format!("50000 decomposition pairs, worst bound excess {excess:.3e}"),
        report: json!({ "per_dim": per_dim }),
    }
}

fn saturation(
    name: &str,
    dims: std::ops::RangeInclusive<usize>,
    trials: u64,
    tol: f64,
    seed: u64,
    build: impl Fn(usize, u64) -> DecompositionPair<f64> + Sync,
) -> (bool, Value) {
    let results: Vec<(f64, f64, bool)> = dims
        .flat_map(|d| (0..trials).map(move |t| (d, t)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(d, t)| {
            let pair = build(d, derive_seed(seed, ((d as u64) << 32) | t));
            let cert = verify_pair(&pair, tol).unwrap();
            (pair.max_deviation, (pair.delta_avg - cert.upper).abs(), cert.pass)
        })
        .collect();
    let max_dev = worst(results.iter().map(|r| r.0));
    let saturation_gap = worst(results.iter().map(|r| r.1));
    let pass = max_dev <= tol && saturation_gap <= 10.0 * tol && results.iter().all(|r| r.2);
    let report = json!({
        "constructor": name,
        "instances": results.len(),
        "tolerance": tol,
        "worst_max_deviation": max_dev,
        "worst_saturation_gap": saturation_gap,
        "pass": pass,
    });
    (pass, report)
}

fn criterion_3(seed: u64) -> Outcome {
    let opts = |s: u64| EqualizeOptions { seed: s, ..EqualizeOptions::default() };
    let runs = [
        saturation("qubit_pair", 2..=2, 1000, 1e-9, derive_seed(seed, 1), |d, s| {
            qubit_pair(&random_state(d, derive_seed(s, 0)), &random_state(d, derive_seed(s, 1)), DEFAULT_RANK_TOL)
                .unwrap()
        }),
        saturation("max_mixed_pair", 2..=6, 100, 1e-10, derive_seed(seed, 2), |d, s| {
            max_mixed_pair(&random_state(d, s), DEFAULT_RANK_TOL).unwrap()
        }),
        saturation("pure_sigma_pair", 2..=5, 100, 1e-8, derive_seed(seed, 3), |d, s| {
            let sigma = random_density(d, 1, derive_seed(s, 1));
            pure_sigma_pair(&random_state(d, derive_seed(s, 0)), &sigma, &opts(s)).unwrap()
        }),
        saturation("rank2_sigma_pair", 3..=5, 100, 1e-6, derive_seed(seed, 4), |d, s| {
            let sigma = random_density(d, 2, derive_seed(s, 1));
            rank2_sigma_pair(&random_state(d, derive_seed(s, 0)), &sigma, &opts(s)).unwrap()
        }),
    ];
    let pass = runs.iter().all(|r| r.0);
    let detail = runs
        .iter()
        .map(|(_, v)| {
            format!("{} {:.1e}", v["constructor"].as_str().unwrap(), v["worst_max_deviation"].as_f64().unwrap())
        })
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { pass, detail: format!("worst max deviation: {detail}"), report: json!(runs.map(|r| r.1)) }
}

fn criterion_4(seed: u64) -> Outcome {
    let per_dim: Vec<Value> = (2..=6usize)
        .map(|d| {
            let rows: Vec<(bool, f64, bool)> = (0..200u64)
                .into_par_iter()
                .map(|i| {
                    let s = derive_seed(seed, ((d as u64) << 32) | i);
                    let rho = random_state(d, derive_seed(s, 0));
                    let f = random_hermitian::<f64>(d, &mut rng_from_seed(derive_seed(s, 1)));
                    let opts = EqualizeOptions { seed: s, ..EqualizeOptions::default() };
                    let (out, trace) = equalize_traced(&rho, &f, &opts).unwrap();
                    let tf = (rho.matrix() * &f).trace().re;
                    let dev = worst(out.states().iter().map(|psi| (f.expectation(psi.amplitudes()) - tf).abs()));
                    let minimal = out.len() == rho.rank(DEFAULT_RANK_TOL).unwrap();
                    let monotone = trace.weighted_merit.windows(2).all(|w| w[1] <= w[0] + 1e-12);
                    (minimal, dev, monotone)
                })
                .collect();
            json!({
                "dim": d,
                "instances": rows.len(),
                "all_minimal": rows.iter().all(|r| r.0),
                "worst_deviation": worst(rows.iter().map(|r| r.1)),
                "merit_monotone": rows.iter().all(|r| r.2),
            })
        })
        .collect();
    let dev = worst(per_dim.iter().map(|v| v["worst_deviation"].as_f64().unwrap()));
    let minimal = per_dim.iter().all(|v| v["all_minimal"] == true);
    let monotone = per_dim.iter().all(|v| v["merit_monotone"] == true);
    Outcome {
        pass: dev <= 1e-9 && minimal && monotone,
        detail: format!(
            "1000 instances, worst deviation {dev:.2e}, minimal {minimal}, merit non-increasing {monotone}"
        ),
        report: json!({ "per_dim": per_dim }),
    }
}

fn criterion_5(_seed: u64) -> Outcome {
    let clock = Instant::now();
    let reports: Vec<_> = (2..=10).map(contextuality_gap).collect();
    let elapsed = clock.elapsed();
    let ok = reports.iter().enumerate().all(|(i, r)| match r {
        Ok(r) => {
            let d = (i + 2) as f64;
            (r.delta_unbiased - (1.0 - 1.0 / d).sqrt()).abs() <= 1e-10
                && (r.delta_noncontextual_max - (1.0 - 1.0 / d)).abs() <= 1e-10
                && r.gap > 0.0
        }
        Err(_) => false,
    });
    let first = reports[0].as_ref().ok();
    Outcome {
        pass: ok && elapsed < Duration::from_secs(5),
        detail: format!(
            "d=2: {} vs {}, {elapsed:?}",
            first.map_or(f64::NAN, |r| r.delta_unbiased),
            first.map_or(f64::NAN, |r| r.delta_noncontextual_max)
        ),
        report: json!(reports.into_iter().filter_map(|r| r.ok()).collect::<Vec<_>>()),
    }
}

fn criterion_6(seed: u64) -> Outcome {
    const SHOTS: u64 = 100_000;
    let rows: Vec<Value> = [2usize, 3]
        .iter()
        .flat_map(|&d| (0..20u64).map(move |i| (d, i)))
        .map(|(d, i)| {
            let s = derive_seed(seed, ((d as u64) << 32) | i);
            let left = random_decomposition(&random_state(d, derive_seed(s, 0)), (i % 2) as usize, derive_seed(s, 2));
            let right = random_decomposition(&random_state(d, derive_seed(s, 1)), 0, derive_seed(s, 3));
            let delta = average_trace_distance(&left, &right).unwrap();
            let expected = 0.5 * (1.0 + delta);
            let rate = simulate_game(&left, &right, SHOTS, s).unwrap();
            let sd = (expected * (1.0 - expected) / SHOTS as f64).sqrt();
            json!({ "dim": d, "expected": expected, "success_rate": rate, "z": (rate - expected) / sd })
        })
        .collect();
    let worst_z = worst(rows.iter().map(|r| r["z"].as_f64().unwrap().abs()));
    Outcome {
        pass: worst_z <= 4.0,
        detail: format!("40 pairs at 1e5 shots, worst |z| = {worst_z:.2}"),
        report: json!(rows),
    }
}

fn criterion_7(seed: u64) -> Outcome {
    let d2 = fuzz(&[2], 100, seed, &SearchConfig { gap_tol: 1e-5, ..SearchConfig::default() }).unwrap();
    let d3 = fuzz(&[3], 100, derive_seed(seed, 3), &SearchConfig::default()).unwrap();
    let all2 = d2.trials.iter().all(|r| r.gap() <= 1e-5);
    let good3 = d3.trials.iter().filter(|r| r.gap() <= 1e-3).count();
    let violations = d2.summary.sandwich_violations + d3.summary.sandwich_violations;
    Outcome {
        pass: all2 && good3 >= 90 && violations == 0,
        detail: format!(
            "d=2 {}/100 at gap <= 1e-5 (worst {:.1e}), d=3 {good3}/100 at gap <= 1e-3, sandwich violations {violations}",
            d2.trials.iter().filter(|r| r.gap() <= 1e-5).count(),
            d2.summary.per_dim[0].worst_gap
        ),
        report: json!({ "d2": d2, "d3": d3 }),
    }
}

fn criterion_8(seed: u64) -> Outcome {
    let batch = |rank_sigma: usize| -> Vec<f64> {
        (0..100u64)
            .into_par_iter()
            .map(|i| {
                let s = derive_seed(seed, ((rank_sigma as u64) << 32) | i);
                let rho = random_state(3, derive_seed(s, 0));
                let sigma = random_density(3, rank_sigma, derive_seed(s, 1));
                let decomp = equalized_decomposition(&sigma, &rho, derive_seed(s, 2)).unwrap();
                let config = SearchConfig { seed: s, ..SearchConfig::default() };
                fixed_sigma_feasibility(&rho, &decomp, &config).unwrap().1.max_deviation
            })
            .collect()
    };
    let (r1, r2, r3) = (batch(1), batch(2), batch(3));
    let feasible = |v: &[f64]| v.iter().filter(|d| **d <= 1e-3).count();
    let pass = feasible(&r1) == 100 && feasible(&r2) == 100 && feasible(&r3) < 100;
    Outcome {
        pass,
        detail: format!(
            "feasible at 1e-3: rank 1 {}/100, rank 2 {}/100, rank 3 {}/100 (worst {:.3})",
            feasible(&r1),
            feasible(&r2),
            feasible(&r3),
            worst(r3.iter().copied())
        ),
        report: json!({ "rank1": r1, "rank2": r2, "rank3": r3 }),
    }
}

type Criterion = fn(u64) -> Outcome;

const CRITERIA: [(&str, Criterion); 8] = [
    ("pencil-case exactness", criterion_1),
    ("sandwich property", criterion_2),
    ("constructor saturation", criterion_3),
    ("equalize lemma", criterion_4),
    ("contextuality gap", criterion_5),
    ("game Monte Carlo", criterion_6),
    ("conjecture evidence", criterion_7),
    ("fixed-sigma negative finding", criterion_8),
];

const LIMITS: [Duration; 8] = [
    Duration::from_millis(1),
    Duration::from_secs(60),
    Duration::from_secs(120),
    Duration::from_secs(60),
    Duration::from_secs(5),
    Duration::from_secs(60),
    Duration::from_secs(600),
    Duration::from_secs(600),
];
const SEED: u64 = 20_251_015;

fn main() {
    let mut failures = 0;
    let mut first_reports = Vec::new();
    for (n, ((name, run), limit)) in CRITERIA.iter().zip(LIMITS).enumerate() {
        let clock = Instant::now();
        let outcome = run(SEED);
        let elapsed = clock.elapsed();
        let pass = outcome.pass && elapsed < limit;
        failures += usize::from(!pass);
        println!(
            "acceptance {} {name}: {} ({}; {:.2}s)",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
        first_reports.push(to_json_string(&outcome.report).unwrap());
    }

    let mismatched: Vec<usize> = CRITERIA
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(i, (_, run))| to_json_string(&run(SEED).report).unwrap() != first_reports[*i])
        .map(|(i, _)| i + 1)
        .collect();
    let pass = mismatched.is_empty();
    failures += usize::from(!pass);
    println!(
        "acceptance 9 determinism: {} (criteria 2-8 rerun, mismatched reports: {mismatched:?})",
        if pass { "PASS" } else { "FAIL" }
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
