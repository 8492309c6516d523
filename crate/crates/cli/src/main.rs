use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use udecomp::conjecture::{
    contextuality_gap, fixed_sigma_feasibility, fuzz, search_unbiased, Objective, SearchConfig, TrialReport,
    DEFAULT_GAP_TOL, DEFAULT_SEARCH_RESTARTS, SANDWICH_LOWER_SLACK, SANDWICH_UPPER_SLACK,
};
use udecomp::decompose::{
    max_mixed_pair, pure_sigma_pair, qubit_pair, rank2_sigma_pair, verify_pair, EqualizeOptions, CERTIFICATE_TOL,
};
use udecomp::io::{read_density, read_json, read_pair, to_json_string, DecompositionJson, MatrixJson, PairJson};
use udecomp::linalg::{DensityMatrix, DEFAULT_RANK_TOL};
use udecomp::metrics::{
    bounds, classical_variation_distance, collision_complement, simulate_game, ClassicalDistribution,
};
use udecomp::random::random_density;
use udecomp::{Error, Result};

const EXIT_DOMAIN: u8 = 1;
const EXIT_THEOREM: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "udecomp", version, about = "Average trace distance bounds and unbiased decompositions")]
struct Cli {
    /// Write JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace distance, upper bound and tr(ρσ) for two states.
    Bounds(StatePair),
    /// Average trace distance and overlap statistics of a pair file.
    Delta {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Classical variation distance and collision complement of two distributions.
    Pencil {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
    },
    /// Monte Carlo of the discrimination game for a pair file.
    Game {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build an unbiased pair with one of the constructors.
    Unbiased {
        #[arg(value_enum)]
        method: Method,
        #[arg(long)]
        rho: PathBuf,
        /// Optional for `maxmixed`, where σ is I/d.
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Certificate tolerance; defaults to the constructor's guarantee.
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL, value_parser = positive)]
        rank_tol: f64,
    },
    /// Numerical search for an unbiased pair.
    Search {
        #[command(flatten)]
        states: StatePair,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search decompositions of ρ against a fixed decomposition of σ.
    FixedSigma {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma_decomp: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Batch search over random state pairs.
    Fuzz {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Unbiased and noncontextual values of Δ for I/d.
    Contextuality {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        dim: u64,
    },
    /// Recompute the certificate of a pair file.
    Verify {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = CERTIFICATE_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Random density matrix GG†/tr(GG†) with G a dim×rank Ginibre matrix.
    RandomState {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
        /// Defaults to full rank.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rank: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct StatePair {
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SEARCH_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_GAP_TOL, value_parser = positive)]
    gap_tol: f64,
    #[arg(long, default_value_t = 0)]
    extra_states: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::AverageDistance)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL, value_parser = positive)]
    rank_tol: f64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            restarts: self.restarts,
            gap_tol: self.gap_tol,
            extra_states: self.extra_states,
            objective: match self.objective {
                ObjectiveArg::AverageDistance => Objective::AverageDistance,
                ObjectiveArg::SquaredDeviation => Objective::SquaredDeviation,
            },
            rank_tol: self.rank_tol,
            ..SearchConfig::default()
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ObjectiveArg {
    AverageDistance,
    SquaredDeviation,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Qubit,
    Maxmixed,
    PureSigma,
    Rank2,
}

impl Method {
    fn default_tol(self) -> f64 {
        match self {
            Method::Qubit => 1e-9,
            Method::Maxmixed => 1e-10,
            Method::PureSigma => 1e-8,
            Method::Rank2 => 1e-6,
        }
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Command output plus whether it witnessed a violated theorem.
struct Outcome {
    json: String,
    violation: bool,
}

impl Outcome {
    fn ok<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Self { json: to_json_string(value)?, violation: false })
    }

    fn flagged<T: Serialize>(value: &T, violation: bool) -> Result<Self> {
        Ok(Self { json: to_json_string(value)?, violation })
    }
}

fn sandwich_violated(r: &TrialReport) -> bool {
    r.best_delta < r.lower - SANDWICH_LOWER_SLACK || r.best_delta > r.upper + SANDWICH_UPPER_SLACK
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Bounds(s) => Outcome::ok(&bounds(&read_density(&s.rho)?, &read_density(&s.sigma)?)?),
        Command::Delta { pair } => {
            let pair = read_pair(pair)?;
            let b = bounds(pair.left.target(), pair.right.target())?;
            Outcome::ok(&json!({
                "delta_avg": pair.delta_avg,
                "hs_product": pair.hs_product,
                "max_deviation": pair.max_deviation,
                "lower": b.lower,
                "upper": b.upper,
            }))
        }
        Command::Pencil { p, q } => {
            let (p, q) = (ClassicalDistribution::new(p)?, ClassicalDistribution::new(q)?);
            Outcome::ok(&json!({
                "delta_c": classical_variation_distance(&p, &q),
                "p_diff": collision_complement(&p, &q),
            }))
        }
        Command::Game { pair, shots, seed } => {
            let pair = read_pair(pair)?;
            let success = simulate_game(&pair.left, &pair.right, shots, seed)?;
            let expected = 0.5 * (1.0 + pair.delta_avg);
            let std_error = (expected * (1.0 - expected) / shots as f64).sqrt();
            Outcome::ok(&json!({
                "shots": shots,
                "seed": seed,
                "success_rate": success,
                "expected": expected,
                "std_error": std_error,
                "delta_avg": pair.delta_avg,
            }))
        }
        Command::Unbiased { method, rho, sigma, tol, seed, rank_tol } => {
            let rho = read_density(rho)?;
            let sigma = match (&sigma, method) {
                (Some(path), _) => read_density(path)?,
                (None, Method::Maxmixed) => DensityMatrix::maximally_mixed(rho.dim()),
                (None, _) => return Err(Error::Parse("--sigma is required for this method".into())),
            };
            let opts = EqualizeOptions { seed, rank_tol, ..EqualizeOptions::default() };
            let pair = match method {
                Method::Qubit => qubit_pair(&rho, &sigma, rank_tol)?,
                Method::Maxmixed => {
                    let mixed = DensityMatrix::maximally_mixed(rho.dim());
                    let dev = sigma.matrix().max_abs_diff(mixed.matrix());
                    if dev > 1e-12 {
                        return Err(Error::PreconditionViolated(format!("sigma differs from I/d by {dev:e}")));
                    }
                    max_mixed_pair(&rho, rank_tol)?
                }
                Method::PureSigma => pure_sigma_pair(&rho, &sigma, &opts)?,
                Method::Rank2 => rank2_sigma_pair(&rho, &sigma, &opts)?,
            };
            let cert = verify_pair(&pair, tol.unwrap_or(method.default_tol()))?;
            Outcome::flagged(&PairJson::from_pair(&pair), !cert.pass)
        }
        Command::Search { states, search } => {
            let (rho, sigma) = (read_density(&states.rho)?, read_density(&states.sigma)?);
            let (pair, report) = search_unbiased(&rho, &sigma, &search.config())?;
            let violation = sandwich_violated(&report);
            Outcome::flagged(&json!({ "pair": PairJson::from_pair(&pair), "report": report }), violation)
        }
        Command::FixedSigma { rho, sigma_decomp, search } => {
            let rho = read_density(rho)?;
            let sigma = read_json::<DecompositionJson>(sigma_decomp)?.to_decomposition(None)?;
            let (pair, report) = fixed_sigma_feasibility(&rho, &sigma, &search.config())?;
            let violation = sandwich_violated(&report);
            Outcome::flagged(&json!({ "pair": PairJson::from_pair(&pair), "report": report }), violation)
        }
        Command::Fuzz { dims, trials, search } => {
            if let Some(d) = dims.iter().find(|d| **d < 1) {
                return Err(Error::Parse(format!("dimension {d} is not positive")));
            }
            let report = fuzz(&dims, trials, search.seed, &search.config())?;
            let violation = report.summary.theorem_violation;
            Outcome::flagged(&report, violation)
        }
        Command::Contextuality { dim } => Outcome::ok(&contextuality_gap(dim as usize)?),
        Command::Verify { pair, tol } => {
            let pair = read_json::<PairJson>(pair)?.to_pair_unchecked()?;
            Outcome::ok(&verify_pair(&pair, tol)?)
        }
        Command::RandomState { dim, rank, seed } => {
            let rank = rank.unwrap_or(dim);
            if rank > dim {
                return Err(Error::PreconditionViolated(format!("rank {rank} exceeds dim {dim}")));
            }
            Outcome::ok(&MatrixJson::from(&random_density::<f64>(dim as usize, rank as usize, seed)))
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn error_json(e: &Error) -> String {
    to_json_string(&json!({ "error": e.code(), "detail": e.to_string() }))
        .unwrap_or_else(|_| format!("{{\"error\": \"{}\"}}\n", e.code()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build_global() {
        eprintln!("udecomp: {e}");
        return ExitCode::from(EXIT_DOMAIN);
    }
    // Error objects go to stdout and leave any `--out` file untouched.
    let (text, code, out) = match run(cli.command) {
        Ok(o) => (o.json, if o.violation { EXIT_THEOREM } else { 0 }, cli.out.as_ref()),
        Err(e @ Error::TheoremViolation(_)) => (error_json(&e), EXIT_THEOREM, None),
        Err(e) => (error_json(&e), EXIT_DOMAIN, None),
    };
    if let Err(e) = emit(out, &text) {
        eprintln!("udecomp: cannot write output: {e}");
        return ExitCode::from(EXIT_DOMAIN);
    }
    ExitCode::from(code)
}
