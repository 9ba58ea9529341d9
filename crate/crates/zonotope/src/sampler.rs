//! The randomized vertex enumeration algorithm.
//!
//! Draw `x` from a standard Gaussian on R^n, map it to the vertex pair
//! `{A sign(A^T x), -A sign(A^T x)}`, insert both, and repeat until the
//! stopping policy fires. Degenerate draws (a component of `A^T x` within
//! tolerance of zero) are redrawn and never counted as samples.
//!
//! Randomness contract: ChaCha8 seeded from the configured 64-bit seed,
//! worker `w` on stream `w`; Gaussian variates by the Marsaglia polar
//! transform of that stream's uniforms. The single-threaded path is worker 0,
//! so `enumerate` is bit-identical to `enumerate_parallel` with one worker,
//! and results never depend on whether the `parallel` feature is compiled in
//! (worker batches are merged in worker order either way).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::matrix::{vertex_count_upper_bound, CountError, GeneratorMatrix};
use crate::sign::SignVector;
use crate::vertex::{sign_of_products, VertexSet};

/// Deterministic standard-normal stream: one ChaCha8 stream per
/// `(seed, stream)` pair, polar method on top.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64, stream: u64) -> GaussianSource {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        GaussianSource { rng, spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u: f64 = self.rng.gen_range(-1.0..1.0);
            let v: f64 = self.rng.gen_range(-1.0..1.0);
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Fill `out` with independent standard normals.
    pub fn fill(&mut self, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = self.next_normal();
        }
    }

    pub fn next_vector(&mut self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill(&mut v);
        v
    }
}

/// Stream of oriented sign vectors from Gaussian samples against a fixed
/// matrix. Degenerate draws are redrawn internally.
#[derive(Debug)]
pub struct VertexStream<'a> {
    matrix: &'a GeneratorMatrix,
    source: GaussianSource,
    x: Vec<f64>,
    products: Vec<f64>,
}

impl<'a> VertexStream<'a> {
    pub fn new(matrix: &'a GeneratorMatrix, seed: u64, stream: u64) -> VertexStream<'a> {
        VertexStream {
            matrix,
            source: GaussianSource::new(seed, stream),
            x: vec![0.0; matrix.dimension()],
            products: vec![0.0; matrix.num_generators()],
        }
    }

    /// Next oriented sign vector (degenerate draws are skipped; they occur
    /// with probability zero and only guard floating-point pathologies).
    pub fn next_key(&mut self) -> SignVector {
        loop {
            self.source.fill(&mut self.x);
            self.matrix.transpose_apply(&self.x, &mut self.products);
            if let Ok(key) = sign_of_products(&self.products) {
                return key;
            }
        }
    }

    /// Next oriented sign vector together with the sample that produced it.
    pub fn next_sample(&mut self) -> (Vec<f64>, SignVector) {
        loop {
            self.source.fill(&mut self.x);
            self.matrix.transpose_apply(&self.x, &mut self.products);
            if let Ok(key) = sign_of_products(&self.products) {
                return (self.x.clone(), key);
            }
        }
    }

    fn batch(&mut self, len: usize) -> Vec<SignVector> {
        (0..len).map(|_| self.next_key()).collect()
    }
}

/// When to stop drawing samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingPolicy {
    /// Stop once `|V|` reaches the general-position count from the counting
    /// formula. If validation recorded a near-parallel warning the count is
    /// only an upper bound, so this degrades to `NoNewVertexStreak(100 * k)`.
    FullEnumeration,
    /// Stop after exactly this many (non-degenerate) samples.
    FixedSamples(u64),
    /// Stop after this many consecutive samples that found no new vertex.
    NoNewVertexStreak(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub stop: StoppingPolicy,
    /// Hard safety cap; hitting it is a result (`SafetyCap`), not a failure.
    pub max_samples: u64,
    /// Samples per progress record and per worker round.
    pub batch_size: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, stop: StoppingPolicy) -> SamplerConfig {
        SamplerConfig {
            seed,
            stop,
            ..SamplerConfig::default()
        }
    }
}

impl Default for SamplerConfig {
    fn default() -> SamplerConfig {
        SamplerConfig {
            seed: 0,
            stop: StoppingPolicy::FullEnumeration,
            max_samples: 100_000_000,
            batch_size: 1024,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("invalid sampler config: {0}")]
    BadConfig(&'static str),
    #[error("full enumeration needs the vertex count: {0}")]
    Count(#[from] CountError),
}

/// Which stopping condition actually fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Full enumeration reached the target count.
    TargetCount,
    /// The fixed sample budget was spent.
    SampleBudget,
    /// The no-new-vertex streak ran out.
    Streak,
    /// The safety cap was hit first; under full enumeration this means the
    /// returned set is incomplete.
    SafetyCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracePoint {
    pub sample_index: u64,
    /// |V| at that point, including negations.
    pub vertices_found: usize,
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub vertices: VertexSet,
    pub samples_used: u64,
    pub trace: Vec<TracePoint>,
    pub terminated_by: TerminationReason,
}

impl EnumerationResult {
    /// False only when the safety cap preempted full enumeration.
    pub fn is_complete_for_target(&self) -> bool {
        self.terminated_by != TerminationReason::SafetyCap
    }
}

/// Single-threaded enumeration: worker 0's stream, per-sample stopping.
pub fn enumerate(
    matrix: &GeneratorMatrix,
    cfg: &SamplerConfig,
) -> Result<EnumerationResult, SamplerError> {
    run_workers(matrix, cfg, 1)
}

/// Multi-worker enumeration. Worker `w` draws from stream `w`; rounds of
/// `batch_size` samples per worker are merged in worker order, so the final
/// vertex set is a deterministic function of `(seed, workers, batch_size)`
/// and agrees with a single-threaded consumption of the same streams.
pub fn enumerate_parallel(
    matrix: &GeneratorMatrix,
    cfg: &SamplerConfig,
    workers: usize,
) -> Result<EnumerationResult, SamplerError> {
    if workers == 0 {
        return Err(SamplerError::BadConfig("workers must be >= 1"));
    }
    run_workers(matrix, cfg, workers)
}

fn validate_config(cfg: &SamplerConfig) -> Result<(), SamplerError> {
    if cfg.max_samples == 0 {
        return Err(SamplerError::BadConfig("max_samples must be >= 1"));
    }
    if cfg.batch_size == 0 {
        return Err(SamplerError::BadConfig("batch_size must be >= 1"));
    }
    match cfg.stop {
        StoppingPolicy::FixedSamples(0) => {
            Err(SamplerError::BadConfig("FixedSamples needs p >= 1"))
        }
        StoppingPolicy::NoNewVertexStreak(0) => {
            Err(SamplerError::BadConfig("NoNewVertexStreak needs s >= 1"))
        }
        _ => Ok(()),
    }
}

enum EffectivePolicy {
    Target(u64),
    Fixed(u64),
    Streak(u64),
}

fn run_workers(
    matrix: &GeneratorMatrix,
    cfg: &SamplerConfig,
    workers: usize,
) -> Result<EnumerationResult, SamplerError> {
    validate_config(cfg)?;
    let policy = match cfg.stop {
        StoppingPolicy::FullEnumeration => {
            let target = vertex_count_upper_bound(matrix.num_generators(), matrix.dimension())?;
            if matrix.has_near_parallel_warning() {
                // The count is only an upper bound off general position.
                EffectivePolicy::Streak(target.saturating_mul(100))
            } else {
                EffectivePolicy::Target(target)
            }
        }
        StoppingPolicy::FixedSamples(p) => EffectivePolicy::Fixed(p),
        StoppingPolicy::NoNewVertexStreak(s) => EffectivePolicy::Streak(s),
    };

    let mut streams: Vec<VertexStream> = (0..workers)
        .map(|w| VertexStream::new(matrix, cfg.seed, w as u64))
        .collect();

    let mut vertices = VertexSet::new();
    let mut trace: Vec<TracePoint> = Vec::new();
    let mut samples_used: u64 = 0;
    let mut streak: u64 = 0;
    let mut next_trace_at = cfg.batch_size as u64;
    let reason;

    'outer: loop {
        let batches: Vec<Vec<SignVector>> = collect_batches(&mut streams, cfg.batch_size);
        for batch in &batches {
            for key in batch {
                samples_used += 1;
                if vertices.insert_key(matrix, key) {
                    streak = 0;
                } else {
                    streak += 1;
                }
                if samples_used == next_trace_at {
                    trace.push(TracePoint {
                        sample_index: samples_used,
                        vertices_found: vertices.count(),
                    });
                    next_trace_at += cfg.batch_size as u64;
                }
                let fired = match policy {
                    EffectivePolicy::Target(k) => vertices.count() as u64 >= k,
                    EffectivePolicy::Fixed(p) => samples_used >= p,
                    EffectivePolicy::Streak(s) => streak >= s,
                };
                if fired {
                    reason = match policy {
                        EffectivePolicy::Target(_) => TerminationReason::TargetCount,
                        EffectivePolicy::Fixed(_) => TerminationReason::SampleBudget,
                        EffectivePolicy::Streak(_) => TerminationReason::Streak,
                    };
                    break 'outer;
                }
                if samples_used >= cfg.max_samples {
                    reason = TerminationReason::SafetyCap;
                    break 'outer;
                }
            }
        }
    }

    if trace.last().map(|t| t.sample_index) != Some(samples_used) {
        trace.push(TracePoint {
            sample_index: samples_used,
            vertices_found: vertices.count(),
        });
    }

    Ok(EnumerationResult {
        vertices,
        samples_used,
        trace,
        terminated_by: reason,
    })
}

#[cfg(feature = "parallel")]
fn collect_batches(streams: &mut [VertexStream], batch_size: usize) -> Vec<Vec<SignVector>> {
    if streams.len() > 1 {
        streams
            .par_iter_mut()
            .map(|s| s.batch(batch_size))
            .collect()
    } else {
        streams.iter_mut().map(|s| s.batch(batch_size)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn collect_batches(streams: &mut [VertexStream], batch_size: usize) -> Vec<Vec<SignVector>> {
    streams.iter_mut().map(|s| s.batch(batch_size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::Parity;

    fn identity2() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn hexagon() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap()
    }

    #[test]
    fn gaussian_is_deterministic_per_seed_and_stream() {
        let mut a = GaussianSource::new(42, 0);
        let mut b = GaussianSource::new(42, 0);
        let va = a.next_vector(8);
        let vb = b.next_vector(8);
        assert_eq!(va, vb);
        let mut c = GaussianSource::new(42, 1);
        assert_ne!(va, c.next_vector(8));
        let mut d = GaussianSource::new(43, 0);
        assert_ne!(va, d.next_vector(8));
    }

    #[test]
    fn gaussian_moments() {
        // CLT bounds from the operation contract: mean 0 +- 0.01 and
        // variance 1 +- 0.01 over 1e6 draws.
        let mut source = GaussianSource::new(7, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = source.next_normal();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn full_enumeration_square() {
        let a = identity2();
        let cfg = SamplerConfig::new(42, StoppingPolicy::FullEnumeration);
        let result = enumerate(&a, &cfg).unwrap();
        assert_eq!(result.terminated_by, TerminationReason::TargetCount);
        assert_eq!(result.vertices.count(), 4);
        // Coupon collector on two pair masses of 1/2: a handful of samples.
        assert!(result.samples_used <= 64, "used {}", result.samples_used);
        let expected: VertexSet = [[1i8, 1], [1, -1]]
            .iter()
            .map(|s| {
                crate::vertex::Vertex::from_key(
                    &a,
                    &SignVector::from_signs(s.to_vec()).unwrap(),
                )
            })
            .collect();
        assert!(result.vertices.same_keys(&expected));
    }

    #[test]
    fn full_enumeration_hexagon_points() {
        let a = hexagon();
        let cfg = SamplerConfig::new(3, StoppingPolicy::FullEnumeration);
        let result = enumerate(&a, &cfg).unwrap();
        assert_eq!(result.vertices.count(), 6);
        let mut points: Vec<Vec<f64>> = result.vertices.all_points();
        points.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let mut expected = vec![
            vec![2.0, 2.0],
            vec![2.0, 0.0],
            vec![0.0, 2.0],
            vec![-2.0, -2.0],
            vec![-2.0, 0.0],
            vec![0.0, -2.0],
        ];
        expected.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert_eq!(points, expected);
    }

    #[test]
    fn fixed_samples_counts_exactly() {
        let a = hexagon();
        let cfg = SamplerConfig::new(5, StoppingPolicy::FixedSamples(137));
        let result = enumerate(&a, &cfg).unwrap();
        assert_eq!(result.samples_used, 137);
        assert_eq!(result.terminated_by, TerminationReason::SampleBudget);
    }

    #[test]
    fn streak_policy_stops() {
        let a = identity2();
        let cfg = SamplerConfig::new(11, StoppingPolicy::NoNewVertexStreak(50));
        let result = enumerate(&a, &cfg).unwrap();
        assert_eq!(result.terminated_by, TerminationReason::Streak);
        assert_eq!(result.vertices.count(), 4);
    }

    #[test]
    fn safety_cap_yields_incomplete() {
        let a = hexagon();
        let mut cfg = SamplerConfig::new(9, StoppingPolicy::FullEnumeration);
        cfg.max_samples = 1;
        let result = enumerate(&a, &cfg).unwrap();
        assert_eq!(result.terminated_by, TerminationReason::SafetyCap);
        assert!(!result.is_complete_for_target());
        assert_eq!(result.samples_used, 1);
        assert!(result.vertices.count() < 6);
    }

    #[test]
    fn one_worker_matches_single_threaded_exactly() {
        let a = hexagon();
        let cfg = SamplerConfig::new(21, StoppingPolicy::FixedSamples(500));
        let seq = enumerate(&a, &cfg).unwrap();
        let par = enumerate_parallel(&a, &cfg, 1).unwrap();
        assert_eq!(seq.samples_used, par.samples_used);
        assert_eq!(seq.trace, par.trace);
        assert!(seq.vertices.same_keys(&par.vertices));
        assert_eq!(seq.terminated_by, par.terminated_by);
    }

    #[test]
    fn worker_counts_agree_on_full_sets() {
        let a = hexagon();
        let cfg = SamplerConfig::new(100, StoppingPolicy::FullEnumeration);
        let w1 = enumerate_parallel(&a, &cfg, 1).unwrap();
        let w4 = enumerate_parallel(&a, &cfg, 4).unwrap();
        assert!(w1.vertices.same_keys(&w4.vertices));
        assert_eq!(w4.vertices.count(), 6);
    }

    #[test]
    fn trace_is_monotone() {
        let a = hexagon();
        let cfg = SamplerConfig {
            seed: 2,
            stop: StoppingPolicy::FixedSamples(10_000),
            max_samples: 100_000_000,
            batch_size: 64,
        };
        let result = enumerate(&a, &cfg).unwrap();
        assert!(result
            .trace
            .windows(2)
            .all(|w| w[0].vertices_found <= w[1].vertices_found
                && w[0].sample_index < w[1].sample_index));
        assert_eq!(result.trace.last().unwrap().sample_index, 10_000);
    }

    #[test]
    fn symmetry_of_the_map_under_negation() {
        let a = hexagon();
        let mut source = GaussianSource::new(13, 0);
        for _ in 0..200 {
            let x = source.next_vector(2);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            match (crate::vertex::vertex_map(&a, &x), crate::vertex::vertex_map(&a, &neg)) {
                (Ok((v, p)), Ok((w, q))) => {
                    // Same canonical pair, opposite parity.
                    assert_eq!(v.key(), w.key());
                    assert_ne!(p == Parity::Kept, q == Parity::Kept);
                }
                _ => panic!("degenerate draw in smoke test"),
            }
        }
    }

    #[test]
    fn scale_invariance_of_the_map() {
        let a = hexagon();
        let mut source = GaussianSource::new(17, 0);
        for _ in 0..200 {
            let x = source.next_vector(2);
            let scaled: Vec<f64> = x.iter().map(|v| v * 7.25).collect();
            let (v, p) = crate::vertex::vertex_map(&a, &x).unwrap();
            let (w, q) = crate::vertex::vertex_map(&a, &scaled).unwrap();
            assert_eq!(v.key(), w.key());
            assert_eq!(p, q);
        }
    }

    #[test]
    fn rejects_zero_workers_and_bad_config() {
        let a = identity2();
        let cfg = SamplerConfig::default();
        assert!(matches!(
            enumerate_parallel(&a, &cfg, 0),
            Err(SamplerError::BadConfig(_))
        ));
        let bad = SamplerConfig {
            batch_size: 0,
            ..SamplerConfig::default()
        };
        assert!(matches!(
            enumerate(&a, &bad),
            Err(SamplerError::BadConfig(_))
        ));
    }
}
