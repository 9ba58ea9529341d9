//! Nearest point in the convex hull of a finite point set.
//!
//! Wolfe's active-set method for the minimum-norm point, run on the points
//! shifted by the query. Each major cycle adds the point with the most
//! negative inner product against the current iterate; minor cycles solve the
//! affine minimizer over the corral and walk back onto the simplex, dropping
//! points whose weight hits zero. Wolfe terminates finitely at machine
//! precision on small corrals; if the corral's Gram system ever degenerates
//! we fall back to Frank-Wolfe steps, which always make progress but only
//! converge linearly (hence the `converged` flag on the result).

use thiserror::Error;

use crate::linalg::{dot, norm, norm2, solve_dense, sub};

pub const NEAREST_MAX_ITER: usize = 100_000;

/// Weights below this are treated as zero when walking corral boundaries.
const WEIGHT_EPS: f64 = 1e-12;
/// Distances below `ZERO_SNAP * scale` collapse to exactly zero (query inside
/// the hull up to floating-point noise).
const ZERO_SNAP: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NearestError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone)]
pub struct HullDistanceResult {
    /// Euclidean distance from the query to the hull.
    pub distance: f64,
    /// The nearest point of the hull.
    pub witness: Vec<f64>,
    /// Simplex weights expressing the witness over the input points.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn nearest_point_in_hull(
    points: &[Vec<f64>],
    query: &[f64],
) -> Result<HullDistanceResult, NearestError> {
    if points.is_empty() {
        return Err(NearestError::EmptyPointSet);
    }
    let dim = query.len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(NearestError::DimensionMismatch {
                index,
                got: p.len(),
                expected: dim,
            });
        }
    }

    let shifted: Vec<Vec<f64>> = points.iter().map(|p| sub(p, query)).collect();
    let scale2 = shifted
        .iter()
        .map(|s| norm2(s))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let gap_tol = 1e-12 * scale2;

    // Start from the shortest shifted point.
    let start = (0..shifted.len())
        .min_by(|&i, &j| norm2(&shifted[i]).total_cmp(&norm2(&shifted[j])))
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = shifted[start].clone();

    let mut iterations = 0usize;
    let mut converged = false;

    'major: while iterations < NEAREST_MAX_ITER {
        iterations += 1;
        let xx = norm2(&x);
        let enter = (0..shifted.len())
            .min_by(|&i, &j| dot(&x, &shifted[i]).total_cmp(&dot(&x, &shifted[j])))
            .unwrap();
        if dot(&x, &shifted[enter]) >= xx - gap_tol {
            converged = true;
            break;
        }
        if corral.contains(&enter) {
            // No progress possible through a point already active.
            converged = true;
            break;
        }
        corral.push(enter);
        weights.push(0.0);

        loop {
            iterations += 1;
            if iterations >= NEAREST_MAX_ITER {
                break 'major;
            }
            let Some(alpha) = affine_minimizer(&shifted, &corral) else {
                // Degenerate corral: hand the current iterate to Frank-Wolfe.
                return Ok(frank_wolfe(
                    &shifted, points, query, x, &corral, &weights, iterations, gap_tol,
                ));
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                weights = alpha;
                x = combination(&shifted, &corral, &weights);
                break;
            }
            // Walk from `weights` toward `alpha` until the first weight hits
            // zero, then drop that point from the corral.
            let mut theta = 1.0f64;
            let mut drop_at: Option<usize> = None;
            for (i, (&w, &a)) in weights.iter().zip(&alpha).enumerate() {
                if a <= WEIGHT_EPS {
                    let denom = w - a;
                    if denom > 0.0 {
                        let t = w / denom;
                        if t < theta {
                            theta = t;
                            drop_at = Some(i);
                        }
                    }
                }
            }
            for (w, &a) in weights.iter_mut().zip(&alpha) {
                *w += theta * (a - *w);
            }
            if let Some(i) = drop_at {
                weights[i] = 0.0;
            }
            let mut i = 0;
            while i < corral.len() {
                if weights[i] <= 0.0 {
                    corral.swap_remove(i);
                    weights.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            x = combination(&shifted, &corral, &weights);
            if drop_at.is_none() {
                // theta reached 1 without any weight crossing zero; alpha had
                // a boundary entry that we just absorbed, so resume majors.
                break;
            }
        }
    }

    Ok(finish(
        points, query, &corral, &weights, scale2, iterations, converged,
    ))
}

/// Minimize `|sum_i alpha_i s_i|` subject to `sum alpha = 1` over the corral.
/// Returns `None` when the KKT system is singular (affinely dependent corral).
fn affine_minimizer(shifted: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    // KKT system: [[0, 1^T], [1, G]] [mu; alpha] = [1; 0], G the Gram matrix.
    let mut m = vec![vec![0.0f64; k + 1]; k + 1];
    let mut b = vec![0.0f64; k + 1];
    b[0] = 1.0;
    for i in 0..k {
        m[0][i + 1] = 1.0;
        m[i + 1][0] = 1.0;
        for j in 0..k {
            m[i + 1][j + 1] = dot(&shifted[corral[i]], &shifted[corral[j]]);
        }
    }
    let solution = solve_dense(m, b)?;
    Some(solution[1..].to_vec())
}

fn combination(shifted: &[Vec<f64>], corral: &[usize], weights: &[f64]) -> Vec<f64> {
    let dim = shifted[0].len();
    let mut x = vec![0.0; dim];
    for (&idx, &w) in corral.iter().zip(weights) {
        for (o, &v) in x.iter_mut().zip(&shifted[idx]) {
            *o += w * v;
        }
    }
    x
}

#[allow(clippy::too_many_arguments)]
fn frank_wolfe(
    shifted: &[Vec<f64>],
    points: &[Vec<f64>],
    query: &[f64],
    mut x: Vec<f64>,
    corral: &[usize],
    corral_weights: &[f64],
    mut iterations: usize,
    gap_tol: f64,
) -> HullDistanceResult {
    let mut full = vec![0.0f64; shifted.len()];
    for (&idx, &w) in corral.iter().zip(corral_weights) {
        full[idx] = w;
    }
    let mut converged = false;
    while iterations < NEAREST_MAX_ITER {
        iterations += 1;
        let best = (0..shifted.len())
            .min_by(|&i, &j| dot(&x, &shifted[i]).total_cmp(&dot(&x, &shifted[j])))
            .unwrap();
        let gap = norm2(&x) - dot(&x, &shifted[best]);
        if gap <= gap_tol {
            converged = true;
            break;
        }
        let direction = sub(&shifted[best], &x);
        let denom = norm2(&direction);
        if denom <= f64::MIN_POSITIVE {
            converged = true;
            break;
        }
        let step = (gap / denom).clamp(0.0, 1.0);
        for (o, d) in x.iter_mut().zip(&direction) {
            *o += step * d;
        }
        for w in full.iter_mut() {
            *w *= 1.0 - step;
        }
        full[best] += step;
    }
    let scale2 = shifted
        .iter()
        .map(|s| norm2(s))
        .fold(0.0f64, f64::max)
        .max(1.0);
    finish_full(points, query, &full, scale2, iterations, converged)
}

fn finish(
    points: &[Vec<f64>],
    query: &[f64],
    corral: &[usize],
    weights: &[f64],
    scale2: f64,
    iterations: usize,
    converged: bool,
) -> HullDistanceResult {
    let mut full = vec![0.0f64; points.len()];
    for (&idx, &w) in corral.iter().zip(weights) {
        full[idx] = w;
    }
    finish_full(points, query, &full, scale2, iterations, converged)
}

fn finish_full(
    points: &[Vec<f64>],
    query: &[f64],
    weights: &[f64],
    scale2: f64,
    iterations: usize,
    converged: bool,
) -> HullDistanceResult {
    let dim = query.len();
    let mut witness = vec![0.0; dim];
    for (p, &w) in points.iter().zip(weights) {
        if w != 0.0 {
            for (o, &v) in witness.iter_mut().zip(p) {
                *o += w * v;
            }
        }
    }
    let mut distance = norm(&sub(query, &witness));
    if distance <= ZERO_SNAP * scale2.sqrt() {
        distance = 0.0;
    }
    HullDistanceResult {
        distance,
        witness,
        weights: weights.to_vec(),
        iterations,
        converged,
    }
}
