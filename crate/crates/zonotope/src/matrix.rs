//! The generator matrix `A` and the vertex-count formula.
//!
//! `Z(A) = { A x : x in [-1,1]^m }` for an `n x m` matrix `A` with `m >= n`.
//! Construction validates the general-position assumptions: no zero column,
//! no two columns parallel. A near-parallel pair (cosine within `1e-6` of 1
//! but not within `1e-10`) is accepted with a recorded warning; such
//! instances may fall short of the general-position vertex count, so callers
//! relying on it (full enumeration) degrade to a streak-based stop.

use thiserror::Error;

use crate::linalg::{dot, norm};
use crate::sign::SignVector;

/// Columns with pairwise |cosine| at or above `1 - PARALLEL_REJECT_TOL` are
/// rejected as parallel.
pub const PARALLEL_REJECT_TOL: f64 = 1e-10;
/// Columns with pairwise |cosine| in `[1 - PARALLEL_WARN_TOL, 1 - PARALLEL_REJECT_TOL)`
/// are accepted with a near-parallel warning.
pub const PARALLEL_WARN_TOL: f64 = 1e-6;
/// Components of `A^T x` within this absolute tolerance of zero make the
/// sample degenerate; the sampler redraws.
pub const ZERO_COMPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("generator matrix needs m >= n >= 1, got n={n}, m={m}")]
    BadShape { n: usize, m: usize },
    #[error("entry at row {row}, column {col} is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("generator column {0} is all zeros")]
    ZeroColumn(usize),
    #[error("generator columns {0} and {1} are scalar multiples of each other")]
    ParallelColumns(usize, usize),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("need m >= n >= 1, got m={m}, n={n}")]
    BadArguments { m: usize, n: usize },
    #[error("vertex count for m={m}, n={n} overflows 64 bits")]
    Overflow { m: usize, n: usize },
}

/// Validated `n x m` generator matrix, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    m: usize,
    /// Column-major entries: column `i` occupies `entries[i*n .. (i+1)*n]`.
    entries: Vec<f64>,
    near_parallel: Vec<(usize, usize)>,
}

impl GeneratorMatrix {
    /// Validate and build from row-major entries (`rows.len() == n`, each of
    /// length `m`). This is the `validate_generators` entry point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ValidationError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if n == 0 || m < n || rows.iter().any(|r| r.len() != m) {
            return Err(ValidationError::BadShape { n, m });
        }
        let mut entries = vec![0.0; n * m];
        for (j, row) in rows.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                entries[i * n + j] = v;
            }
        }
        Self::from_column_major(n, m, entries)
    }

    /// Validate and build from a row-major flat array of length `n*m`.
    pub fn from_row_major(n: usize, m: usize, flat: &[f64]) -> Result<Self, ValidationError> {
        if n == 0 || m < n || flat.len() != n * m {
            return Err(ValidationError::BadShape { n, m });
        }
        let mut entries = vec![0.0; n * m];
        for j in 0..n {
            for i in 0..m {
                entries[i * n + j] = flat[j * m + i];
            }
        }
        Self::from_column_major(n, m, entries)
    }

    fn from_column_major(n: usize, m: usize, entries: Vec<f64>) -> Result<Self, ValidationError> {
        for i in 0..m {
            for j in 0..n {
                if !entries[i * n + j].is_finite() {
                    return Err(ValidationError::NonFiniteEntry { row: j, col: i });
                }
            }
        }
        let norms: Vec<f64> = (0..m).map(|i| norm(&entries[i * n..(i + 1) * n])).collect();
        if let Some(i) = norms.iter().position(|&v| v == 0.0) {
            return Err(ValidationError::ZeroColumn(i));
        }
        let mut near_parallel = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                let cos = dot(&entries[i * n..(i + 1) * n], &entries[j * n..(j + 1) * n]).abs()
                    / (norms[i] * norms[j]);
                if cos >= 1.0 - PARALLEL_REJECT_TOL {
                    return Err(ValidationError::ParallelColumns(i, j));
                }
                if cos >= 1.0 - PARALLEL_WARN_TOL {
                    near_parallel.push((i, j));
                }
            }
        }
        Ok(GeneratorMatrix {
            n,
            m,
            entries,
            near_parallel,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        self.m
    }

    /// Generator `a_i` (column `i`).
    pub fn column(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.m).map(move |i| self.column(i))
    }

    /// Column pairs that passed validation but are close to parallel.
    pub fn near_parallel_pairs(&self) -> &[(usize, usize)] {
        &self.near_parallel
    }

    pub fn has_near_parallel_warning(&self) -> bool {
        !self.near_parallel.is_empty()
    }

    /// `A^T x`, one inner product per generator.
    pub fn transpose_apply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.m);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.column(i), x);
        }
    }

    /// The point `A k` for a sign vector, accumulated column by column in
    /// index order so coordinates are bitwise reproducible for a given key.
    pub fn point_of(&self, key: &SignVector) -> Vec<f64> {
        debug_assert_eq!(key.len(), self.m);
        let mut point = vec![0.0; self.n];
        for (i, &s) in key.signs().iter().enumerate() {
            let col = self.column(i);
            if s == 1 {
                for (p, &c) in point.iter_mut().zip(col) {
                    *p += c;
                }
            } else {
                for (p, &c) in point.iter_mut().zip(col) {
                    *p -= c;
                }
            }
        }
        point
    }

    /// Whether `A A^T = I_n` holds entrywise within `tol`.
    pub fn rows_orthonormal(&self, tol: f64) -> bool {
        for r in 0..self.n {
            for s in r..self.n {
                let mut acc = 0.0;
                for i in 0..self.m {
                    acc += self.entries[i * self.n + r] * self.entries[i * self.n + s];
                }
                let expected = if r == s { 1.0 } else { 0.0 };
                if (acc - expected).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// The general-position vertex count `2 * sum_{i=0}^{n-1} C(m-1, i)`.
///
/// Exact for zonotopes in general position, an upper bound otherwise.
/// Evaluated with checked 128-bit intermediates; errors if the result does
/// not fit in a `u64`.
pub fn vertex_count_upper_bound(m: usize, n: usize) -> Result<u64, CountError> {
    if n == 0 || m < n {
        return Err(CountError::BadArguments { m, n });
    }
    let overflow = CountError::Overflow { m, n };
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(m-1, 0)
    for i in 0..n {
        total = total.checked_add(binom).ok_or(overflow.clone())?;
        // C(m-1, i+1) = C(m-1, i) * (m-1-i) / (i+1), exact at every step.
        binom = binom
            .checked_mul((m - 1 - i) as u128)
            .ok_or(overflow.clone())?
            / (i as u128 + 1);
    }
    let doubled = total.checked_mul(2).ok_or(overflow.clone())?;
    u64::try_from(doubled).map_err(|_| overflow)
}
