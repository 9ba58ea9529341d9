//! `zonotope`: enumerate, approximate, and analyze zonotope vertex sets.
//!
//! Exit codes: 0 success, 2 validation failure, 3 incomplete enumeration
//! (safety cap hit before full enumeration finished), 4 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zonotope::bounds::{
    b_orthogonal, cone_mass_threshold, sample_bound, BoundVariant, SampleBoundInput,
};
use zonotope::experiments::{
    derive_seed, random_orthogonal_generator, run_error_trace_on, run_measure_map_on,
    run_stopping_histogram_on, run_timing_on, ExperimentKind, ExperimentSpec, MatrixSource,
    MATRIX_SEED_TAG,
};
use zonotope::io::{
    read_matrix_auto, write_enumeration_json, write_error_trace_csv, write_histogram_csv,
    write_measure_csv, write_measure_map_csv, write_timing_csv, write_vertices_csv,
    VerticesOutput,
};
use zonotope::oracle::{enumerate_2d_sweep, enumerate_bruteforce, estimate_vertex_measure, sweep_vertex_set};
use zonotope::sampler::{enumerate_parallel, SamplerConfig, StoppingPolicy, TerminationReason};
use zonotope::GeneratorMatrix;

const EXIT_VALIDATION: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "zonotope", version, about = "Randomized zonotope vertex enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate vertices with the randomized algorithm.
    Enumerate(EnumerateArgs),
    /// Approximate the vertex set with a fixed number of samples.
    Approximate(ApproximateArgs),
    /// Exact enumeration via the brute-force LP oracle or the planar sweep.
    Oracle(OracleArgs),
    /// Evaluate the sample-count and cone-mass bounds.
    Bound(BoundArgs),
    /// Monte Carlo estimate of the per-vertex probability measure.
    Measure(MeasureArgs),
    /// Run one of the reproducible experiments.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix file (.csv rows or .json {"n","m","entries"}).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Ambient dimension for a random orthogonal-row matrix (with --m).
    #[arg(long)]
    n: Option<usize>,
    /// Number of generators for a random orthogonal-row matrix (with --n).
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// RNG seed; also seeds the random matrix when --matrix is absent.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stopping policy: full, fixed:<p>, or streak:<s>.
    #[arg(long, default_value = "full")]
    policy: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 100_000_000)]
    max_samples: u64,
    #[arg(long, default_value_t = 1024)]
    batch_size: usize,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ApproximateArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of samples to draw.
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1024)]
    batch_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OracleMethod::Brute)]
    method: OracleMethod,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Base-diameter bound; defaults to 2*sqrt(m) when --m is given instead.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    num_vertices: u64,
    #[arg(long, value_enum, default_value_t = Variant::Proof)]
    variant: Variant,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment spec as JSON (overrides the individual flags).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Comma-separated checkpoint sample counts.
    #[arg(long, default_value = "10,100,1000,10000")]
    checkpoints: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMethod {
    Brute,
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Statement,
    Proof,
}

impl From<Variant> for BoundVariant {
    fn from(v: Variant) -> BoundVariant {
        match v {
            Variant::Statement => BoundVariant::Statement,
            Variant::Proof => BoundVariant::Proof,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    ErrorTrace,
    Stopping,
    Timing,
    MeasureMap,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn io(err: impl std::fmt::Display) -> Failure {
        Failure::new(EXIT_IO, err.to_string())
    }

    fn validation(err: impl std::fmt::Display) -> Failure {
        Failure::new(EXIT_VALIDATION, err.to_string())
    }

    fn other(err: impl std::fmt::Display) -> Failure {
        Failure::new(1, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Enumerate(args) => {
            let policy = parse_policy(&args.policy)?;
            enumerate_command(
                &args.matrix,
                args.seed,
                policy,
                args.workers,
                args.max_samples,
                args.batch_size,
                args.out.as_deref(),
                args.format,
            )
        }
        Command::Approximate(args) => enumerate_command(
            &args.matrix,
            args.seed,
            StoppingPolicy::FixedSamples(args.samples),
            args.workers,
            u64::MAX,
            args.batch_size,
            args.out.as_deref(),
            args.format,
        ),
        Command::Oracle(args) => oracle_command(args),
        Command::Bound(args) => bound_command(args),
        Command::Measure(args) => measure_command(args),
        Command::Experiment(args) => experiment_command(args),
    }
}

fn parse_policy(text: &str) -> Result<StoppingPolicy, Failure> {
    if text == "full" {
        return Ok(StoppingPolicy::FullEnumeration);
    }
    if let Some(p) = text.strip_prefix("fixed:") {
        let p: u64 = p
            .parse()
            .map_err(|_| Failure::validation(format!("bad sample count in policy {text:?}")))?;
        return Ok(StoppingPolicy::FixedSamples(p));
    }
    if let Some(s) = text.strip_prefix("streak:") {
        let s: u64 = s
            .parse()
            .map_err(|_| Failure::validation(format!("bad streak length in policy {text:?}")))?;
        return Ok(StoppingPolicy::NoNewVertexStreak(s));
    }
    Err(Failure::validation(format!(
        "unknown policy {text:?}; expected full, fixed:<p>, or streak:<s>"
    )))
}

fn load_matrix(args: &MatrixArgs, seed: u64) -> Result<GeneratorMatrix, Failure> {
    match (&args.matrix, args.n, args.m) {
        (Some(path), _, _) => read_matrix_auto(path).map_err(|err| match err {
            zonotope::io::IoError::Validation(v) => Failure::validation(v),
            other => Failure::io(other),
        }),
        (None, Some(n), Some(m)) => {
            random_orthogonal_generator(n, m, derive_seed(seed, MATRIX_SEED_TAG))
                .map_err(Failure::validation)
        }
        _ => Err(Failure::validation(
            "provide --matrix <path> or both --n and --m for a random instance",
        )),
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(Failure::io)?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_command(
    matrix_args: &MatrixArgs,
    seed: u64,
    policy: StoppingPolicy,
    workers: usize,
    max_samples: u64,
    batch_size: usize,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let matrix = load_matrix(matrix_args, seed)?;
    let cfg = SamplerConfig {
        seed,
        stop: policy,
        max_samples,
        batch_size,
    };
    let result = enumerate_parallel(&matrix, &cfg, workers).map_err(Failure::other)?;
    let mut sink = open_output(out)?;
    match format {
        Format::Csv => write_vertices_csv(&mut sink, &result.vertices).map_err(Failure::io)?,
        Format::Json => {
            write_enumeration_json(&mut sink, &result, VerticesOutput::Inline)
                .map_err(Failure::io)?;
        }
    }
    sink.flush().map_err(Failure::io)?;
    if policy == StoppingPolicy::FullEnumeration
        && result.terminated_by == TerminationReason::SafetyCap
    {
        return Err(Failure::new(
            EXIT_INCOMPLETE,
            format!(
                "safety cap of {max_samples} samples hit with {} vertices found; result is incomplete",
                result.vertices.count()
            ),
        ));
    }
    Ok(())
}

fn oracle_command(args: OracleArgs) -> Result<(), Failure> {
    let matrix = load_matrix(&args.matrix, args.seed)?;
    let vertices = match args.method {
        OracleMethod::Brute => enumerate_bruteforce(&matrix).map_err(Failure::validation)?,
        OracleMethod::Sweep => {
            let boundary = enumerate_2d_sweep(&matrix).map_err(Failure::validation)?;
            sweep_vertex_set(&matrix, &boundary)
        }
    };
    let mut sink = open_output(args.out.as_deref())?;
    write_vertices_csv(&mut sink, &vertices).map_err(Failure::io)?;
    sink.flush().map_err(Failure::io)
}

fn bound_command(args: BoundArgs) -> Result<(), Failure> {
    let b = match (args.b, args.m) {
        (Some(b), _) => b,
        (None, Some(m)) => b_orthogonal(m),
        (None, None) => {
            return Err(Failure::validation("provide --b or --m (for b = 2 sqrt(m))"))
        }
    };
    let mut report = serde_json::Map::new();
    report.insert("epsilon".into(), args.epsilon.into());
    report.insert("delta".into(), args.delta.into());
    report.insert("b".into(), b.into());
    report.insert("n".into(), args.n.into());
    report.insert("num_vertices".into(), args.num_vertices.into());
    for (label, variant) in [
        ("statement", BoundVariant::Statement),
        ("proof", BoundVariant::Proof),
    ] {
        let k = cone_mass_threshold(args.delta, b, args.n, variant)
            .map_err(Failure::validation)?;
        let p = sample_bound(&SampleBoundInput {
            epsilon: args.epsilon,
            delta: args.delta,
            b,
            n: args.n,
            num_vertices: args.num_vertices,
            variant,
        })
        .map_err(Failure::validation)?;
        report.insert(
            label.into(),
            serde_json::json!({ "cone_mass_threshold": k, "samples": p }),
        );
    }
    let chosen = match BoundVariant::from(args.variant) {
        BoundVariant::Statement => "statement",
        BoundVariant::Proof => "proof",
    };
    report.insert("variant".into(), chosen.into());
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Object(report)).map_err(Failure::io)?
    );
    Ok(())
}

fn measure_command(args: MeasureArgs) -> Result<(), Failure> {
    let matrix = load_matrix(&args.matrix, args.seed)?;
    let vertices = enumerate_bruteforce(&matrix).map_err(Failure::validation)?;
    let estimate = estimate_vertex_measure(&matrix, &vertices, args.samples, args.seed);
    let mut sink = open_output(args.out.as_deref())?;
    write_measure_csv(&mut sink, &vertices, &estimate).map_err(Failure::io)?;
    sink.flush().map_err(Failure::io)
}

fn experiment_command(args: ExperimentArgs) -> Result<(), Failure> {
    let spec = if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path).map_err(Failure::io)?;
        serde_json::from_str::<ExperimentSpec>(&text).map_err(Failure::io)?
    } else {
        let kind = match args.kind {
            Some(Kind::ErrorTrace) => ExperimentKind::ErrorTrace,
            Some(Kind::Stopping) => ExperimentKind::StoppingHistogram,
            Some(Kind::Timing) => ExperimentKind::Timing,
            Some(Kind::MeasureMap) => ExperimentKind::MeasureMap,
            None => {
                return Err(Failure::validation(
                    "provide --spec <file> or --kind with --m/--n",
                ))
            }
        };
        let (m, n) = match (args.m, args.n) {
            (Some(m), Some(n)) => (m, n),
            _ => {
                return Err(Failure::validation(
                    "experiments built from flags need --m and --n",
                ))
            }
        };
        let checkpoints: Result<Vec<u64>, _> =
            args.checkpoints.split(',').map(|c| c.trim().parse()).collect();
        ExperimentSpec {
            kind,
            m,
            n,
            trials: args.trials,
            sample_checkpoints: checkpoints
                .map_err(|_| Failure::validation("bad --checkpoints list"))?,
            seed: args.seed,
            matrix_source: match &args.matrix {
                Some(path) => MatrixSource::File(path.clone()),
                None => MatrixSource::RandomOrthogonalRows,
            },
        }
    };
    spec.validate().map_err(Failure::validation)?;

    let matrix = match &spec.matrix_source {
        MatrixSource::File(path) => read_matrix_auto(path).map_err(|err| match err {
            zonotope::io::IoError::Validation(v) => Failure::validation(v),
            other => Failure::io(other),
        })?,
        MatrixSource::RandomOrthogonalRows => {
            random_orthogonal_generator(spec.n, spec.m, derive_seed(spec.seed, MATRIX_SEED_TAG))
                .map_err(Failure::validation)?
        }
    };

    let mut sink = open_output(args.out.as_deref())?;
    match spec.kind {
        ExperimentKind::ErrorTrace => {
            let report = run_error_trace_on(&spec, &matrix).map_err(Failure::other)?;
            write_error_trace_csv(&mut sink, &report).map_err(Failure::io)?;
        }
        ExperimentKind::StoppingHistogram => {
            let histogram = run_stopping_histogram_on(&spec, &matrix).map_err(Failure::other)?;
            write_histogram_csv(&mut sink, &histogram).map_err(Failure::io)?;
        }
        ExperimentKind::Timing => {
            let row = run_timing_on(&spec, &matrix).map_err(Failure::other)?;
            write_timing_csv(&mut sink, &row).map_err(Failure::io)?;
        }
        ExperimentKind::MeasureMap => {
            let report = run_measure_map_on(&spec, &matrix).map_err(Failure::other)?;
            write_measure_map_csv(&mut sink, &report).map_err(Failure::io)?;
        }
    }
    sink.flush().map_err(Failure::io)
}
