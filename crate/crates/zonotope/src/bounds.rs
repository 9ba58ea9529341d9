//! Sample-complexity and Hausdorff-approximation bounds.
//!
//! Two published forms of the cone-mass threshold `k` disagree by constant
//! factors: the theorem statement uses `((1 - sin(arctan(b/delta)))/2)^((n-1)/2)`
//! with denominator `log(1/(1-k))`, while its proof derives
//! `(2(1 - sin(arctan(b/delta))))^((n-1)/2) / 2^n` paired with `log(1/(1-2k))`.
//! Both are implemented behind an explicit variant flag (defaulting to the
//! proof form, whose inequality chain is the verifiable one). Algebraically
//! `2 k_proof = k_statement`, so the resulting sample counts coincide; the
//! thresholds themselves differ by exactly that factor of two.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::sign::SignVector;
use crate::vertex::VertexSet;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("cone-mass threshold needs n >= 2 (the exponent vanishes at n = 1)")]
    DimensionTooSmall,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("num_vertices must be >= 1")]
    NoVertices,
    #[error("degenerate bound: 1 - {0} k is not positive")]
    DegenerateBound(u32),
    #[error("approximation set is not a subset of the full vertex set")]
    NotSubset,
    #[error("missing simplicial constant for vertex {0}")]
    MissingConstants(SignVector),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundVariant {
    /// `k = ((1 - sin(arctan(b/delta))) / 2)^((n-1)/2)`, `p` from `log(1/(1-k))`.
    Statement,
    /// `k = (2 (1 - sin(arctan(b/delta))))^((n-1)/2) / 2^n`, `p` from
    /// `log(1/(1-2k))`.
    #[default]
    Proof,
}

/// Inputs for the sample-count bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBoundInput {
    pub epsilon: f64,
    pub delta: f64,
    /// Upper bound on the maximum base diameter (`2 sqrt(m)` for orthonormal
    /// rows, see `b_orthogonal`).
    pub b: f64,
    pub n: usize,
    pub num_vertices: u64,
    pub variant: BoundVariant,
}

/// The cone-mass threshold `k`: vertices whose normal cone carries Gaussian
/// mass above `k` have simplicial constant above `delta`.
///
/// `1 - sin(arctan(r))` is evaluated as `1 / (t (t + r))` with
/// `t = sqrt(1 + r^2)`, which stays accurate when `b/delta` is large and the
/// naive subtraction would cancel.
pub fn cone_mass_threshold(
    delta: f64,
    b: f64,
    n: usize,
    variant: BoundVariant,
) -> Result<f64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::DimensionTooSmall);
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(BoundsError::NonPositive("delta"));
    }
    if b.is_nan() || b <= 0.0 {
        return Err(BoundsError::NonPositive("b"));
    }
    let r = b / delta;
    let t = r.hypot(1.0);
    let u = 1.0 / (t * (t + r)); // 1 - sin(arctan(b/delta))
    let exponent = (n as f64 - 1.0) / 2.0;
    let k = match variant {
        BoundVariant::Statement => (u / 2.0).powf(exponent),
        BoundVariant::Proof => (2.0 * u).powf(exponent) / 2f64.powi(n as i32),
    };
    Ok(k)
}

/// Smallest integer number of samples strictly above the bound
/// `log(num_vertices / epsilon) / log(1/(1-k))` (Statement) or the proof's
/// `log(num_vertices / epsilon) / log(1/(1-2k))`, clamped to at least 1.
pub fn sample_bound(input: &SampleBoundInput) -> Result<u64, BoundsError> {
    if input.epsilon.is_nan() || input.epsilon <= 0.0 || input.epsilon >= 1.0 {
        return Err(BoundsError::BadEpsilon(input.epsilon));
    }
    if input.num_vertices == 0 {
        return Err(BoundsError::NoVertices);
    }
    let k = cone_mass_threshold(input.delta, input.b, input.n, input.variant)?;
    let (factor, effective) = match input.variant {
        BoundVariant::Statement => (1u32, k),
        BoundVariant::Proof => (2u32, 2.0 * k),
    };
    if effective >= 1.0 {
        return Err(BoundsError::DegenerateBound(factor));
    }
    // log(1/(1-q)) = -ln_1p(-q), accurate for the tiny q of sharp deltas.
    let denom = -(-effective).ln_1p();
    if denom <= 0.0 {
        return Err(BoundsError::DegenerateBound(factor));
    }
    let numer = (input.num_vertices as f64 / input.epsilon).ln();
    let raw = numer / denom;
    let p = if raw < 1.0 { 1.0 } else { raw.floor() + 1.0 };
    Ok(p as u64)
}

/// Corollary for orthonormal-row generators: every base diameter is at most
/// `2 sqrt(m)`.
pub fn b_orthogonal(m: usize) -> f64 {
    2.0 * (m as f64).sqrt()
}

/// The a-posteriori Hausdorff bound for an approximation `V` of the full
/// vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffBoundResult {
    /// `|vertices \ V| / 2 * delta`.
    pub bound: f64,
    /// Missing vertex pairs.
    pub missing_pairs: usize,
    /// `a`: pairs whose simplicial constant is below `delta` (outside `U_Z`).
    pub soft_pairs: usize,
    /// `1 - 2^a * epsilon`; may be nonpositive, in which case `vacuous` is
    /// set rather than clamping silently.
    pub confidence: f64,
    pub vacuous: bool,
}

/// Evaluate the Hausdorff bound `h(Z, conv V) <= |vertices \ V|/2 * delta`
/// and its confidence `1 - 2^a epsilon`.
pub fn hausdorff_bound(
    full: &VertexSet,
    approximation: &VertexSet,
    delta: f64,
    epsilon: f64,
    simplicial_constants: &BTreeMap<SignVector, f64>,
) -> Result<HausdorffBoundResult, BoundsError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(BoundsError::NonPositive("delta"));
    }
    if !approximation.is_subset_of(full) {
        return Err(BoundsError::NotSubset);
    }
    let mut soft_pairs = 0usize;
    for key in full.canonical_keys() {
        let alpha = simplicial_constants
            .get(key)
            .ok_or_else(|| BoundsError::MissingConstants(key.clone()))?;
        if *alpha < delta {
            soft_pairs += 1;
        }
    }
    let missing_pairs = full.pair_count() - approximation.pair_count();
    let bound = missing_pairs as f64 * delta;
    let confidence = 1.0 - 2f64.powi(soft_pairs.min(i32::MAX as usize) as i32) * epsilon;
    Ok(HausdorffBoundResult {
        bound,
        missing_pairs,
        soft_pairs,
        confidence,
        vacuous: confidence <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::GeneratorMatrix;
    use crate::vertex::Vertex;

    #[test]
    fn threshold_limit_small_ratio() {
        // b/delta -> 0: arctan -> 0, sin -> 0, Statement k -> (1/2)^((n-1)/2).
        for n in 2..=5 {
            let k = cone_mass_threshold(1.0, 1e-12, n, BoundVariant::Statement).unwrap();
            let expected = 0.5f64.powf((n as f64 - 1.0) / 2.0);
            assert!((k - expected).abs() < 1e-9, "n={n}: {k} vs {expected}");
        }
    }

    #[test]
    fn threshold_limit_large_ratio() {
        for variant in [BoundVariant::Statement, BoundVariant::Proof] {
            let k = cone_mass_threshold(1e-9, 10.0, 3, variant).unwrap();
            assert!(k > 0.0 && k < 1e-12, "{k}");
        }
    }

    #[test]
    fn statement_is_exactly_twice_proof_at_n2() {
        for (b, delta) in [(1.0, 1.0), (6.324, 0.1), (5.0, 2.0)] {
            let s = cone_mass_threshold(delta, b, 2, BoundVariant::Statement).unwrap();
            let p = cone_mass_threshold(delta, b, 2, BoundVariant::Proof).unwrap();
            assert!((s / p - 2.0).abs() < 1e-12, "ratio {}", s / p);
        }
    }

    #[test]
    fn thresholds_stay_in_unit_interval() {
        for n in 2..=6 {
            for exp in -6..=6 {
                let ratio = 10f64.powi(exp);
                for variant in [BoundVariant::Statement, BoundVariant::Proof] {
                    let k = cone_mass_threshold(1.0, ratio, n, variant).unwrap();
                    assert!(k > 0.0 && k < 1.0, "n={n} ratio={ratio} k={k}");
                }
            }
        }
    }

    #[test]
    fn n1_is_rejected() {
        assert_eq!(
            cone_mass_threshold(0.1, 1.0, 1, BoundVariant::Proof),
            Err(BoundsError::DimensionTooSmall)
        );
    }

    #[test]
    fn sample_bound_ratio_one_gives_one() {
        // epsilon equal to num_vertices makes the numerator log(1) = 0.
        let input = SampleBoundInput {
            epsilon: 0.9999,
            delta: 0.5,
            b: 2.0,
            n: 2,
            num_vertices: 1,
            variant: BoundVariant::Proof,
        };
        // num/eps slightly above 1: raw tiny positive, so p = 1.
        assert_eq!(sample_bound(&input).unwrap(), 1);
    }

    #[test]
    fn sample_bound_monotonicity() {
        let base = SampleBoundInput {
            epsilon: 0.1,
            delta: 0.2,
            b: 4.0,
            n: 3,
            num_vertices: 50,
            variant: BoundVariant::Proof,
        };
        let p0 = sample_bound(&base).unwrap();
        let tighter_eps = SampleBoundInput {
            epsilon: 0.01,
            ..base
        };
        assert!(sample_bound(&tighter_eps).unwrap() >= p0);
        let tighter_delta = SampleBoundInput { delta: 0.02, ..base };
        assert!(sample_bound(&tighter_delta).unwrap() >= p0);
        let bigger_b = SampleBoundInput { b: 40.0, ..base };
        assert!(sample_bound(&bigger_b).unwrap() >= p0);
    }

    #[test]
    fn sample_bound_regression_values() {
        // Fixed configuration evaluated once and frozen: epsilon 0.01,
        // delta 0.1, n 2, b = 2 sqrt(10), 18 vertices. Both variants land on
        // the same count because 2 k_proof = k_statement.
        let mut input = SampleBoundInput {
            epsilon: 0.01,
            delta: 0.1,
            b: b_orthogonal(10),
            n: 2,
            num_vertices: 18,
            variant: BoundVariant::Statement,
        };
        assert_eq!(sample_bound(&input).unwrap(), 945);
        input.variant = BoundVariant::Proof;
        assert_eq!(sample_bound(&input).unwrap(), 945);
    }

    #[test]
    fn b_orthogonal_values() {
        assert!((b_orthogonal(10) - 2.0 * 10f64.sqrt()).abs() < 1e-15);
        assert!((b_orthogonal(1) - 2.0).abs() < 1e-15);
    }

    fn hexagon_fixture() -> (GeneratorMatrix, VertexSet, BTreeMap<SignVector, f64>) {
        let a = GeneratorMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]])
            .unwrap();
        let full: VertexSet = [[1i8, 1, 1], [1, -1, 1], [1, -1, -1]]
            .iter()
            .map(|s| {
                Vertex::from_key(&a, &SignVector::from_signs(s.to_vec()).unwrap())
            })
            .collect();
        let alphas = crate::geometry::simplicial_constants(&full).unwrap();
        (a, full, alphas)
    }

    #[test]
    fn hausdorff_bound_dominates_actual_error() {
        let (a, full, alphas) = hexagon_fixture();
        let sub: VertexSet = [[1i8, -1, 1], [1, -1, -1]]
            .iter()
            .map(|s| {
                Vertex::from_key(&a, &SignVector::from_signs(s.to_vec()).unwrap())
            })
            .collect();
        let delta = 2.0;
        let result = hausdorff_bound(&full, &sub, delta, 0.1, &alphas).unwrap();
        assert_eq!(result.missing_pairs, 1);
        assert!((result.bound - 2.0).abs() < 1e-12);
        let actual = crate::geometry::hausdorff_to_subhull(&full, &sub).unwrap();
        assert!(actual <= result.bound);
    }

    #[test]
    fn hausdorff_bound_full_approximation() {
        let (_, full, alphas) = hexagon_fixture();
        let result = hausdorff_bound(&full, &full, 0.5, 0.1, &alphas).unwrap();
        assert_eq!(result.bound, 0.0);
        assert_eq!(result.missing_pairs, 0);
    }

    #[test]
    fn hausdorff_bound_small_delta_has_plain_confidence() {
        let (_, full, alphas) = hexagon_fixture();
        let min_alpha = alphas.values().cloned().fold(f64::INFINITY, f64::min);
        let result =
            hausdorff_bound(&full, &full, min_alpha / 2.0, 0.1, &alphas).unwrap();
        assert_eq!(result.soft_pairs, 0);
        assert!((result.confidence - 0.9).abs() < 1e-12);
        assert!(!result.vacuous);
    }

    #[test]
    fn hausdorff_bound_vacuous_confidence_is_flagged() {
        let (_, full, alphas) = hexagon_fixture();
        // delta above every alpha: all pairs are soft, 2^3 * 0.2 > 1.
        let result = hausdorff_bound(&full, &full, 100.0, 0.2, &alphas).unwrap();
        assert_eq!(result.soft_pairs, 3);
        assert!(result.vacuous);
        assert!(result.confidence <= 0.0);
    }

    #[test]
    fn hausdorff_bound_missing_constants() {
        let (_, full, mut alphas) = hexagon_fixture();
        let key = full.canonical_keys().next().unwrap().clone();
        alphas.remove(&key);
        assert!(matches!(
            hausdorff_bound(&full, &full, 0.5, 0.1, &alphas),
            Err(BoundsError::MissingConstants(_))
        ));
    }
}
