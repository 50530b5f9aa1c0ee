use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use phs::borel::{self, FiniteUniverse, MatchedGrid};
use phs::convergence::{self, StateSequence};
use phs::formats::{self, Format};
use phs::hilbert::{normalize, random_unit, UnitVector};
use phs::oracle::{spectral_norms, HermitianMatrix};
use phs::projector::{materialize, rho_n, rho_tr, transition_probability, PureState};
use phs::ray::ray_of;
use phs::verify::{self, Suite, VerifyConfig};
use phs::{seed, Error};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

/// Distances, topology checks and sigma-algebra experiments on projective Hilbert space.
#[derive(Parser)]
#[command(name = "phs", version)]
struct Cli {
    /// Root seed. Falls back to PHS_SEED, then to a built-in default.
    #[arg(long, global = true, env = "PHS_SEED")]
    seed: Option<u64>,

    /// Vector file format (json | csv). CSV inputs are also detected by extension.
    #[arg(long, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distances between two pure states, checked against the dense oracle
    Distance {
        /// Two state files
        #[arg(long = "in", num_args = 1, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Run a seeded invariant suite (metrics | topology | convergence | sigma | all)
    Verify {
        suite: String,
        /// Restrict the suite to one dimension
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Matched grid resolution for the sigma suite
        #[arg(long, default_value_t = 10)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit an orthonormal sequence and its convergence report
    Counterexample {
        #[arg(long, default_value_t = 64)]
        dim: usize,
        #[arg(long, default_value_t = 64)]
        length: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, default_value_t = convergence::DEFAULT_COMPLETENESS_TAIL)]
        tail: usize,
        #[arg(long, default_value_t = 32)]
        probes: usize,
        /// Sequence output file; the report goes to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence diagnostics for a sequence file
    Converge {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 32)]
        probes: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = convergence::DEFAULT_COMPLETENESS_TAIL)]
        tail: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare ball-generated and h-generated sigma-algebras on a random universe
    Sigma {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum and norms of a Hermitian matrix file
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Dense projector |φ⟩⟨φ| of a state file
    Materialize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical ray representative of a state file
    Ray {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Haar random unit vector
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_state(path: &Path, format: Format) -> Result<phs::StateVector, Failure> {
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        _ => format,
    };
    Ok(formats::read_state(&read_text(path)?, format)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{}\n", text.trim_end()))
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

#[derive(Serialize)]
struct DistanceRecord {
    h: f64,
    rho_n: f64,
    rho_tr: f64,
    oracle_rho_n: f64,
    oracle_rho_tr: f64,
    max_abs_diff: f64,
}

fn cmd_distance(inputs: &[PathBuf], format: Format) -> CmdResult {
    let [a, b] = inputs else {
        return Err(usage(format!(
            "distance needs exactly two --in files, got {}",
            inputs.len()
        )));
    };
    let p = PureState::new(normalize(&read_state(a, format)?)?);
    let q = PureState::new(normalize(&read_state(b, format)?)?);
    let rn = rho_n(&p, &q)?;
    let rt = rho_tr(&p, &q)?;
    let oracle = spectral_norms(&materialize(&p).sub(&materialize(&q))?)?;
    let record = DistanceRecord {
        h: transition_probability(&p, &q)?,
        rho_n: rn,
        rho_tr: rt,
        oracle_rho_n: oracle.operator_norm,
        oracle_rho_tr: oracle.trace_norm,
        max_abs_diff: (rn - oracle.operator_norm)
            .abs()
            .max((rt - oracle.trace_norm).abs()),
    };
    emit(&to_json(&record), None)?;
    Ok(exit_if(record.max_abs_diff < verify::ORACLE_TOL))
}

fn exit_if(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

#[derive(Serialize)]
struct CounterexampleReport {
    dim: usize,
    length: usize,
    consecutive_rho_n: Vec<f64>,
    bessel_sums: Vec<f64>,
    report: convergence::ConvergenceReport,
}

fn cmd_counterexample(
    root: u64,
    dim: usize,
    length: usize,
    tol: f64,
    tail: usize,
    probes: usize,
    out: Option<&Path>,
) -> CmdResult {
    let seq =
        convergence::orthonormal_counterexample(dim, length, seed::derive(root, "counterexample"))?;
    if let Some(path) = out {
        emit(&formats::sequence_to_json(&seq), Some(path))?;
    }
    let basis: Vec<UnitVector> = seq.states().iter().map(|p| p.vector().clone()).collect();
    let probe_states =
        convergence::l2_probes(&basis, probes, seed::derive(root, "counterexample/probes"))?;
    let vectors: Vec<UnitVector> = probe_states.iter().map(|p| p.vector().clone()).collect();
    let report = convergence::analyze(
        &seq,
        &probe_states,
        &vectors,
        tol,
        tail.min(length.saturating_sub(1)).max(1),
    )?;
    let haar = convergence::haar_probes(dim, probes, seed::derive(root, "counterexample/bessel"))?;
    let bessel_sums = haar
        .iter()
        .map(|q| convergence::bessel_sum(&seq, q))
        .collect::<phs::Result<Vec<_>>>()?;
    let consecutive_rho_n = seq
        .states()
        .windows(2)
        .map(|w| rho_n(&w[0], &w[1]))
        .collect::<phs::Result<Vec<_>>>()?;
    emit(
        &to_json(&CounterexampleReport {
            dim,
            length,
            consecutive_rho_n,
            bessel_sums,
            report,
        }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_converge(
    root: u64,
    input: &Path,
    probes: usize,
    tol: f64,
    tail: usize,
    out: Option<&Path>,
) -> CmdResult {
    let seq: StateSequence = formats::sequence_from_json(&read_text(input)?)?;
    let probe_states =
        convergence::haar_probes(seq.dim(), probes, seed::derive(root, "converge/probes"))?;
    let vectors: Vec<UnitVector> = probe_states.iter().map(|p| p.vector().clone()).collect();
    let report = convergence::analyze(&seq, &probe_states, &vectors, tol, tail)?;
    emit(&to_json(&report), out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SigmaReport {
    note: &'static str,
    dim: usize,
    points: usize,
    grid: u32,
    #[serde(flatten)]
    matched: borel::MisraReport,
    sigma_within_xi: bool,
}

fn cmd_sigma(root: u64, dim: usize, points: usize, grid: u32, out: Option<&Path>) -> CmdResult {
    let universe = FiniteUniverse::random(dim, points, seed::derive(root, "sigma/universe"))?;
    let grid_spec = MatchedGrid::new(grid)?;
    let pts = universe.points().to_vec();
    let check = borel::grid_check(&universe, &grid_spec, &pts, &pts)?;
    let report = SigmaReport {
        note:
            "finite-universe echo: atoms of finitely many generators, not the full sigma-algebras",
        dim,
        points,
        grid,
        sigma_within_xi: check.sigma_within_xi(),
        matched: check.matched,
    };
    emit(&to_json(&report), out)?;
    Ok(exit_if(report.sigma_within_xi))
}

fn run(cli: Cli) -> CmdResult {
    let root = cli.seed.unwrap_or(seed::DEFAULT_SEED);
    match cli.command {
        Command::Distance { inputs } => cmd_distance(&inputs, cli.format),
        Command::Verify {
            suite,
            dim,
            trials,
            grid,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            if dim == Some(0) {
                return Err(usage("--dim must be at least 1"));
            }
            let cfg = VerifyConfig {
                dims: dim.map(|d| vec![d]),
                trials,
                seed: root,
                grid,
            };
            let summary = verify::run(suite, &cfg);
            emit(&summary.to_json(), out.as_deref())?;
            Ok(exit_if(summary.passed()))
        }
        Command::Counterexample {
            dim,
            length,
            tol,
            tail,
            probes,
            out,
        } => cmd_counterexample(root, dim, length, tol, tail, probes, out.as_deref()),
        Command::Converge {
            input,
            probes,
            tol,
            tail,
            out,
        } => cmd_converge(root, &input, probes, tol, tail, out.as_deref()),
        Command::Sigma {
            dim,
            points,
            grid,
            out,
        } => cmd_sigma(root, dim, points, grid, out.as_deref()),
        Command::Oracle { input } => {
            let m: HermitianMatrix = serde_json::from_str(&read_text(&input)?)
                .map_err(|e| usage(format!("{}: {e}", input.display())))?;
            emit(&to_json(&spectral_norms(&m)?), None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Materialize { input, out } => {
            let p = PureState::new(normalize(&read_state(&input, cli.format)?)?);
            emit(&to_json(&materialize(&p)), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ray { input, out } => {
            let r = ray_of(&read_state(&input, cli.format)?)?;
            let text = match cli.format {
                Format::Json => formats::ray_to_json(&r),
                Format::Csv => formats::write_state(r.representative().as_state(), Format::Csv)?,
            };
            emit(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Random { dim, out } => {
            let v = random_unit(dim, seed::derive(root, "random"))?;
            emit(
                &formats::write_state(v.as_state(), cli.format)?,
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("phs: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
