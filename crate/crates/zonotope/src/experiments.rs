//! Experiment drivers: random orthogonal-row generators, approximation error
//! traces, stopping-time histograms, wall-clock timings, and per-vertex
//! measure/sharpness tables.
//!
//! Every driver is a pure function of its `ExperimentSpec` (timings excepted,
//! obviously), with all randomness derived from the spec seed through
//! splitmix-style tags so runs reproduce byte for byte.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::geometry::{
    hausdorff_to_subhull, simplicial_constants, GeometryError,
};
use crate::linalg::orthonormalize_rows;
use crate::matrix::{GeneratorMatrix, ValidationError};
use crate::oracle::{
    enumerate_bruteforce, estimate_vertex_measure, OracleError, BRUTEFORCE_MAX_GENERATORS,
};
use crate::sampler::{
    enumerate, GaussianSource, SamplerConfig, SamplerError, StoppingPolicy, TerminationReason,
    VertexStream,
};
use crate::sign::SignVector;
use crate::stats::{mean, std_dev};
use crate::vertex::VertexSet;

/// Stopping-histogram and timing runs cap each trial here; hitting the cap is
/// recorded as a censored trial.
pub const TRIAL_MAX_SAMPLES: u64 = 1_000_000;
/// Inexact ground truth for large instances: a reference enumeration at this
/// multiple of the largest requested checkpoint.
pub const REFERENCE_SAMPLE_FACTOR: u64 = 100;

/// Tag for deriving the random-matrix seed from the spec seed; public so the
/// CLI reproduces the same instance when it resolves the matrix itself.
pub const MATRIX_SEED_TAG: u64 = 0x6d61_7472;
const TRIAL_SEED_TAG: u64 = 0x7472_6961;
const REFERENCE_SEED_TAG: u64 = 0x7265_6665;
const MEASURE_SEED_TAG: u64 = 0x6d65_6173;

/// splitmix64 finalizer; tags keep the derived streams apart.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master
        .wrapping_add(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ErrorTrace,
    StoppingHistogram,
    Timing,
    MeasureMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    RandomOrthogonalRows,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    /// Sample counts at which error traces snapshot; the last entry doubles
    /// as the sampling budget for measure maps.
    pub sample_checkpoints: Vec<u64>,
    pub seed: u64,
    pub matrix_source: MatrixSource,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::BadSpec("trials must be >= 1"));
        }
        if self.sample_checkpoints.is_empty() {
            return Err(ExperimentError::BadSpec(
                "sample_checkpoints must be nonempty",
            ));
        }
        if self.sample_checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::BadSpec(
                "sample_checkpoints must be strictly increasing",
            ));
        }
        if self.sample_checkpoints[0] == 0 {
            return Err(ExperimentError::BadSpec(
                "sample_checkpoints must be positive",
            ));
        }
        Ok(())
    }

    /// One-line provenance string embedded in experiment outputs.
    pub fn provenance(&self) -> String {
        let kind = match self.kind {
            ExperimentKind::ErrorTrace => "error_trace",
            ExperimentKind::StoppingHistogram => "stopping_histogram",
            ExperimentKind::Timing => "timing",
            ExperimentKind::MeasureMap => "measure_map",
        };
        let source = match &self.matrix_source {
            MatrixSource::RandomOrthogonalRows => "random_orthogonal_rows".to_string(),
            MatrixSource::File(path) => format!("file:{}", path.display()),
        };
        let checkpoints: Vec<String> = self
            .sample_checkpoints
            .iter()
            .map(|c| c.to_string())
            .collect();
        format!(
            "kind={kind} m={} n={} trials={} seed={} checkpoints={} matrix={source}",
            self.m,
            self.n,
            self.trials,
            self.seed,
            checkpoints.join(",")
        )
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment spec: {0}")]
    BadSpec(&'static str),
    #[error("failed to generate an orthogonal-row matrix after {0} attempts")]
    MatrixGeneration(usize),
    #[error("no ground truth available: m={0} exceeds the brute-force cap {BRUTEFORCE_MAX_GENERATORS} and no reference run was requested")]
    NoGroundTruth(usize),
    #[error("matrix file input must be loaded by the caller (got {0})")]
    UnresolvedFile(PathBuf),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Draw Gaussian rows and orthonormalize them; retry on the measure-zero
/// validation failures, give up after 100 attempts.
pub fn random_orthogonal_generator(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<GeneratorMatrix, ExperimentError> {
    const ATTEMPTS: usize = 100;
    for attempt in 0..ATTEMPTS {
        let mut source = GaussianSource::new(derive_seed(seed, attempt as u64), 0);
        let mut rows: Vec<Vec<f64>> = (0..n).map(|_| source.next_vector(m)).collect();
        if !orthonormalize_rows(&mut rows) {
            continue;
        }
        match GeneratorMatrix::from_rows(&rows) {
            Ok(matrix) => return Ok(matrix),
            Err(_) => continue,
        }
    }
    Err(ExperimentError::MatrixGeneration(ATTEMPTS))
}

fn resolve_matrix(spec: &ExperimentSpec) -> Result<GeneratorMatrix, ExperimentError> {
    match &spec.matrix_source {
        MatrixSource::RandomOrthogonalRows => {
            random_orthogonal_generator(spec.n, spec.m, derive_seed(spec.seed, MATRIX_SEED_TAG))
        }
        // File loading involves I/O policy (format detection, error codes)
        // that belongs to the CLI layer; the library keeps this pure.
        MatrixSource::File(path) => Err(ExperimentError::UnresolvedFile(path.clone())),
    }
}

/// One row of an approximation trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub samples: u64,
    /// Vertices found so far, including negations.
    pub vertices_found: usize,
    /// Hausdorff distance from the ground truth to the current hull.
    pub error: f64,
    /// True when the checkpoint set equals the ground truth, making the zero
    /// exact rather than numerical.
    pub exact_zero: bool,
}

#[derive(Debug, Clone)]
pub struct ErrorTraceReport {
    pub spec: ExperimentSpec,
    /// One trace per trial, one row per checkpoint.
    pub trials: Vec<Vec<TraceRow>>,
    /// Vertex sets at each checkpoint, parallel to `trials`; kept for offline
    /// post-analysis (e.g. checking a-posteriori Hausdorff bounds).
    pub snapshots: Vec<Vec<VertexSet>>,
    /// False when the ground truth came from a reference run rather than the
    /// exact oracle.
    pub ground_truth_exact: bool,
    pub truth: VertexSet,
}

/// Ground truth for the error traces: exact brute force when feasible,
/// otherwise a long reference enumeration flagged inexact.
fn ground_truth(
    matrix: &GeneratorMatrix,
    spec: &ExperimentSpec,
) -> Result<(VertexSet, bool), ExperimentError> {
    if matrix.num_generators() <= 12 {
        return Ok((enumerate_bruteforce(matrix)?, true));
    }
    let budget = spec
        .sample_checkpoints
        .last()
        .copied()
        .unwrap_or(1)
        .saturating_mul(REFERENCE_SAMPLE_FACTOR);
    let cfg = SamplerConfig {
        seed: derive_seed(spec.seed, REFERENCE_SEED_TAG),
        stop: StoppingPolicy::FixedSamples(budget),
        max_samples: budget,
        batch_size: 4096,
    };
    Ok((enumerate(matrix, &cfg)?.vertices, false))
}

/// Run the error-trace experiment: per trial, sample up to the largest
/// checkpoint, snapshot the vertex set at each checkpoint, and evaluate
/// Hausdorff errors offline afterwards.
pub fn run_error_trace(spec: &ExperimentSpec) -> Result<ErrorTraceReport, ExperimentError> {
    spec.validate()?;
    let matrix = resolve_matrix(spec)?;
    run_error_trace_on(spec, &matrix)
}

/// Same as `run_error_trace` for a caller-supplied matrix.
pub fn run_error_trace_on(
    spec: &ExperimentSpec,
    matrix: &GeneratorMatrix,
) -> Result<ErrorTraceReport, ExperimentError> {
    spec.validate()?;
    let (truth, ground_truth_exact) = ground_truth(matrix, spec)?;
    let max_checkpoint = *spec.sample_checkpoints.last().unwrap();

    let run_trial = |trial: usize| -> Result<(Vec<TraceRow>, Vec<VertexSet>), ExperimentError> {
        let seed = derive_seed(spec.seed, TRIAL_SEED_TAG ^ ((trial as u64) << 16));
        let mut stream = VertexStream::new(matrix, seed, 0);
        let mut found = VertexSet::new();
        let mut snapshots: Vec<VertexSet> = Vec::with_capacity(spec.sample_checkpoints.len());
        let mut next = 0usize;
        for sample in 1..=max_checkpoint {
            let key = stream.next_key();
            found.insert_key(matrix, &key);
            if spec.sample_checkpoints[next] == sample {
                snapshots.push(found.clone());
                next += 1;
                if next == spec.sample_checkpoints.len() {
                    break;
                }
            }
        }
        let mut rows = Vec::with_capacity(snapshots.len());
        for (snapshot, &samples) in snapshots.iter().zip(&spec.sample_checkpoints) {
            let exact_zero = snapshot.same_keys(&truth);
            let error = if exact_zero {
                0.0
            } else if snapshot.is_empty() {
                f64::INFINITY
            } else if ground_truth_exact {
                hausdorff_to_subhull(&truth, snapshot)?
            } else {
                // Reference truth may itself miss vertices the trial found;
                // measure against the union so the subset precondition holds.
                let mut reference = truth.clone();
                reference.absorb(snapshot.clone());
                hausdorff_to_subhull(&reference, snapshot)?
            };
            rows.push(TraceRow {
                samples,
                vertices_found: snapshot.count(),
                error,
                exact_zero,
            });
        }
        Ok((rows, snapshots))
    };

    let outcomes = run_trials(spec.trials, run_trial)?;
    let mut trials = Vec::with_capacity(outcomes.len());
    let mut snapshots = Vec::with_capacity(outcomes.len());
    for (rows, sets) in outcomes {
        trials.push(rows);
        snapshots.push(sets);
    }
    Ok(ErrorTraceReport {
        spec: spec.clone(),
        trials,
        snapshots,
        ground_truth_exact,
        truth,
    })
}

fn run_trials<T: Send>(
    trials: usize,
    run: impl Fn(usize) -> Result<T, ExperimentError> + Sync,
) -> Result<Vec<T>, ExperimentError> {
    #[cfg(feature = "parallel")]
    {
        if trials > 1 {
            return (0..trials).into_par_iter().map(&run).collect();
        }
    }
    (0..trials).map(run).collect()
}

#[derive(Debug, Clone)]
pub struct StoppingHistogram {
    pub spec: ExperimentSpec,
    /// Samples needed for full enumeration, one entry per completed trial.
    pub completed: Vec<u64>,
    /// Trials that hit `TRIAL_MAX_SAMPLES` first.
    pub censored: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: u64,
    pub max: u64,
}

/// Samples-to-completion histogram over independent full-enumeration trials.
pub fn run_stopping_histogram(
    spec: &ExperimentSpec,
) -> Result<StoppingHistogram, ExperimentError> {
    spec.validate()?;
    let matrix = resolve_matrix(spec)?;
    run_stopping_histogram_on(spec, &matrix)
}

pub fn run_stopping_histogram_on(
    spec: &ExperimentSpec,
    matrix: &GeneratorMatrix,
) -> Result<StoppingHistogram, ExperimentError> {
    spec.validate()?;
    let run_trial = |trial: usize| -> Result<Option<u64>, ExperimentError> {
        let cfg = SamplerConfig {
            seed: derive_seed(spec.seed, TRIAL_SEED_TAG ^ ((trial as u64) << 16)),
            stop: StoppingPolicy::FullEnumeration,
            max_samples: TRIAL_MAX_SAMPLES,
            batch_size: 256,
        };
        let result = enumerate(matrix, &cfg)?;
        Ok(match result.terminated_by {
            TerminationReason::SafetyCap => None,
            _ => Some(result.samples_used),
        })
    };
    let outcomes = run_trials(spec.trials, run_trial)?;
    let mut completed = Vec::with_capacity(outcomes.len());
    let mut censored = 0usize;
    for outcome in outcomes {
        match outcome {
            Some(samples) => completed.push(samples),
            None => censored += 1,
        }
    }
    let as_f64: Vec<f64> = completed.iter().map(|&s| s as f64).collect();
    Ok(StoppingHistogram {
        spec: spec.clone(),
        mean: mean(&as_f64),
        std_dev: std_dev(&as_f64),
        min: completed.iter().copied().min().unwrap_or(0),
        max: completed.iter().copied().max().unwrap_or(0),
        completed,
        censored,
    })
}

#[derive(Debug, Clone)]
pub struct TimingRow {
    pub spec: ExperimentSpec,
    pub trials: usize,
    pub mean_seconds: f64,
    pub std_dev_seconds: f64,
    /// Trials censored at the safety cap (excluded from the statistics).
    pub censored: usize,
}

/// Wall-clock statistics for full enumeration. Trials run sequentially so
/// they do not perturb each other.
pub fn run_timing(spec: &ExperimentSpec) -> Result<TimingRow, ExperimentError> {
    spec.validate()?;
    let matrix = resolve_matrix(spec)?;
    run_timing_on(spec, &matrix)
}

pub fn run_timing_on(
    spec: &ExperimentSpec,
    matrix: &GeneratorMatrix,
) -> Result<TimingRow, ExperimentError> {
    spec.validate()?;
    let mut seconds = Vec::with_capacity(spec.trials);
    let mut censored = 0usize;
    for trial in 0..spec.trials {
        let cfg = SamplerConfig {
            seed: derive_seed(spec.seed, TRIAL_SEED_TAG ^ ((trial as u64) << 16)),
            stop: StoppingPolicy::FullEnumeration,
            max_samples: TRIAL_MAX_SAMPLES,
            batch_size: 256,
        };
        let start = Instant::now();
        let result = enumerate(matrix, &cfg)?;
        let elapsed = start.elapsed().as_secs_f64();
        if result.terminated_by == TerminationReason::SafetyCap {
            censored += 1;
        } else {
            seconds.push(elapsed);
        }
    }
    Ok(TimingRow {
        spec: spec.clone(),
        trials: spec.trials,
        mean_seconds: mean(&seconds),
        std_dev_seconds: std_dev(&seconds),
        censored,
    })
}

#[derive(Debug, Clone)]
pub struct MeasureMapRow {
    pub key: SignVector,
    pub point: Vec<f64>,
    /// Monte Carlo pair mass of `{v, -v}`.
    pub pair_mass: f64,
    pub std_error: f64,
    pub simplicial_constant: f64,
}

#[derive(Debug, Clone)]
pub struct MeasureMapReport {
    pub spec: ExperimentSpec,
    pub rows: Vec<MeasureMapRow>,
    pub samples: u64,
    pub other_mass: f64,
}

/// Per-vertex table of estimated measure and simplicial constant. Needs an
/// exactly enumerable instance (brute-force cap); sampling budget is the last
/// checkpoint.
pub fn run_measure_map(spec: &ExperimentSpec) -> Result<MeasureMapReport, ExperimentError> {
    spec.validate()?;
    let matrix = resolve_matrix(spec)?;
    run_measure_map_on(spec, &matrix)
}

pub fn run_measure_map_on(
    spec: &ExperimentSpec,
    matrix: &GeneratorMatrix,
) -> Result<MeasureMapReport, ExperimentError> {
    spec.validate()?;
    if matrix.num_generators() > BRUTEFORCE_MAX_GENERATORS {
        return Err(ExperimentError::NoGroundTruth(matrix.num_generators()));
    }
    let vertices = enumerate_bruteforce(matrix)?;
    let samples = *spec.sample_checkpoints.last().unwrap();
    let estimate = estimate_vertex_measure(
        matrix,
        &vertices,
        samples,
        derive_seed(spec.seed, MEASURE_SEED_TAG),
    );
    let alphas = simplicial_constants(&vertices)?;
    let rows = vertices
        .iter()
        .map(|v| MeasureMapRow {
            key: v.key().clone(),
            point: v.point().to_vec(),
            pair_mass: estimate.estimate(v.key()),
            std_error: estimate.standard_error(v.key()),
            simplicial_constant: alphas[v.key()],
        })
        .collect();
    Ok(MeasureMapReport {
        spec: spec.clone(),
        rows,
        samples,
        other_mass: estimate.other_estimate(),
    })
}
