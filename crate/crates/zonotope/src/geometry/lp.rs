//! Strict sign-feasibility via a small dense simplex.
//!
//! A sign vector `k` is realizable as a vertex exactly when some `x`
//! satisfies `k_i <a_i, x> > 0` for every generator. We decide this by
//! solving
//!
//! ```text
//!   maximize t   subject to   k_i <a_i, x> >= t  for all i,   -1 <= x_j <= 1
//! ```
//!
//! Strict feasibility is scale invariant, so a bounded certificate exists iff
//! any certificate does; the box just keeps the LP bounded. Writing
//! `x = p - q` with `p, q >= 0` and `p_j + q_j <= 1` puts the problem in
//! standard form with a nonnegative right-hand side, so the slack basis is
//! feasible and a single-phase primal simplex with Bland's rule suffices.
//! `x = 0, t = 0` is always feasible, hence the optimum `t*` is the maximal
//! margin and `t* > FEASIBILITY_TOLERANCE` decides realizability.

use thiserror::Error;

use crate::matrix::GeneratorMatrix;
use crate::sign::SignVector;

/// Margins at or below this are reported infeasible; margins in
/// `(0, FEASIBILITY_TOLERANCE]` additionally set the `marginal` flag since
/// they usually indicate near-parallel generators.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("sign vector length {key} does not match generator count {generators}")]
    KeyLengthMismatch { key: usize, generators: usize },
    #[error("simplex exceeded the cycling guard ({0} pivots)")]
    Cycling(usize),
    #[error("simplex reported an unbounded objective; the box constraints should prevent this")]
    Unbounded,
}

/// Outcome of the strict-feasibility LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpFeasibilityResult {
    pub feasible: bool,
    /// A point with `sign(A^T x) = k`, present only when feasible.
    pub certificate_x: Option<Vec<f64>>,
    /// The optimal `t`: the best achievable margin `min_i k_i <a_i, x>` over
    /// the unit box.
    pub margin: f64,
    /// True when `0 < margin <= FEASIBILITY_TOLERANCE`: reported infeasible
    /// but numerically ambiguous.
    pub marginal: bool,
}

/// Decide whether `k` is realizable: does some `x` put every generator
/// strictly on its prescribed side?
pub fn sign_feasible(
    matrix: &GeneratorMatrix,
    key: &SignVector,
) -> Result<LpFeasibilityResult, LpError> {
    let n = matrix.dimension();
    let m = matrix.num_generators();
    if key.len() != m {
        return Err(LpError::KeyLengthMismatch {
            key: key.len(),
            generators: m,
        });
    }

    // Variables: p_0..p_{n-1}, q_0..q_{n-1}, t, then one slack per row.
    let structural = 2 * n + 1;
    let t_col = 2 * n;
    let rows = n + m;
    let cols = structural + rows;

    let mut tableau = vec![vec![0.0f64; cols]; rows];
    let mut rhs = vec![0.0f64; rows];
    let mut basis = vec![0usize; rows];

    for (j, row) in tableau.iter_mut().take(n).enumerate() {
        row[j] = 1.0; // p_j
        row[n + j] = 1.0; // q_j
        rhs[j] = 1.0;
    }
    for i in 0..m {
        let row = &mut tableau[n + i];
        let s = key.signs()[i] as f64;
        for (j, &c) in matrix.column(i).iter().enumerate() {
            row[j] = -s * c; // p_j
            row[n + j] = s * c; // q_j
        }
        row[t_col] = 1.0;
    }
    for (r, b) in basis.iter_mut().enumerate() {
        tableau[r][structural + r] = 1.0;
        *b = structural + r;
    }

    let mut cost = vec![0.0f64; cols];
    cost[t_col] = 1.0;
    let mut objective = 0.0f64;

    let max_pivots = 1000 * (rows + cols);
    let mut pivots = 0;
    // Bland: entering column is the lowest index with positive reduced cost.
    while let Some(enter) = (0..cols).find(|&j| cost[j] > PIVOT_EPS) {
        // Minimum-ratio leaving row; ties broken by lowest basis index (Bland).
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            let coef = tableau[r][enter];
            if coef > PIVOT_EPS {
                let ratio = rhs[r] / coef;
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[cur])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(LpError::Unbounded);
        };

        // Pivot.
        let pivot = tableau[leave][enter];
        for v in tableau[leave].iter_mut() {
            *v /= pivot;
        }
        rhs[leave] /= pivot;
        let pivot_row = tableau[leave].clone();
        for (r, row) in tableau.iter_mut().enumerate() {
            if r == leave {
                continue;
            }
            let factor = row[enter];
            if factor == 0.0 {
                continue;
            }
            for (target, &base) in row.iter_mut().zip(&pivot_row) {
                *target -= factor * base;
            }
            rhs[r] -= factor * rhs[leave];
        }
        let factor = cost[enter];
        for (c, &base) in cost.iter_mut().zip(&pivot_row) {
            *c -= factor * base;
        }
        objective += factor * rhs[leave];
        basis[leave] = enter;

        pivots += 1;
        if pivots > max_pivots {
            return Err(LpError::Cycling(max_pivots));
        }
    }

    let mut values = vec![0.0f64; cols];
    for r in 0..rows {
        values[basis[r]] = rhs[r];
    }
    let margin = objective;
    let feasible = margin > FEASIBILITY_TOLERANCE;
    let marginal = !feasible && margin > 0.0;
    let certificate_x = feasible.then(|| (0..n).map(|j| values[j] - values[n + j]).collect());

    Ok(LpFeasibilityResult {
        feasible,
        certificate_x,
        margin,
        marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn hexagon() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap()
    }

    fn sv(signs: &[i8]) -> SignVector {
        SignVector::from_signs(signs.to_vec()).unwrap()
    }

    #[test]
    fn hexagon_all_plus_is_feasible_with_margin_one() {
        let result = sign_feasible(&hexagon(), &sv(&[1, 1, 1])).unwrap();
        assert!(result.feasible);
        // Optimum over the box is attained at x = (1, 1): margins (1, 1, 2).
        assert!((result.margin - 1.0).abs() < 1e-9, "margin {}", result.margin);
        let x = result.certificate_x.unwrap();
        assert!(x[0] > 0.0 && x[1] > 0.0);
    }

    #[test]
    fn hexagon_contradictory_key_is_infeasible() {
        // x1 > 0 and x2 > 0 force x1 + x2 > 0, so (+, +, -) cannot be realized.
        let result = sign_feasible(&hexagon(), &sv(&[1, 1, -1])).unwrap();
        assert!(!result.feasible);
        assert!(result.margin.abs() <= 1e-12, "margin {}", result.margin);
        assert!(result.certificate_x.is_none());
    }

    #[test]
    fn identity_all_orthants_feasible() {
        let a = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        for signs in [[1i8, 1], [1, -1], [-1, 1], [-1, -1]] {
            let result = sign_feasible(&a, &sv(&signs)).unwrap();
            assert!(result.feasible, "{signs:?}");
            assert!((result.margin - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn certificate_actually_realizes_the_key() {
        let a = GeneratorMatrix::from_rows(&[
            vec![0.8, -0.3, 0.5, 0.1],
            vec![0.2, 0.9, -0.4, 0.7],
        ])
        .unwrap();
        for pattern in 0u32..8 {
            let signs: Vec<i8> = (0..4)
                .map(|b| if pattern >> b & 1 == 1 { 1 } else { -1 })
                .collect();
            let key = SignVector::from_signs(signs).unwrap();
            let result = sign_feasible(&a, &key).unwrap();
            if let Some(x) = result.certificate_x {
                for (i, &s) in key.signs().iter().enumerate() {
                    let margin = s as f64 * dot(a.column(i), &x);
                    assert!(
                        margin >= result.margin - 1e-9,
                        "generator {i}: margin {margin} vs {}",
                        result.margin
                    );
                }
            }
        }
    }

    #[test]
    fn key_length_mismatch_is_an_error() {
        let a = hexagon();
        assert!(matches!(
            sign_feasible(&a, &sv(&[1, 1])),
            Err(LpError::KeyLengthMismatch { .. })
        ));
    }
}
