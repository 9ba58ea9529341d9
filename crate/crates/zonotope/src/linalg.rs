//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything here operates on plain `&[f64]` slices. The systems that need
//! solving are tiny (corral sizes in the nearest-point solver, Gram-Schmidt
//! over a handful of rows), so a partial-pivot elimination is plenty.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `out += c * v`
pub fn axpy(out: &mut [f64], c: f64, v: &[f64]) {
    debug_assert_eq!(out.len(), v.len());
    for (o, x) in out.iter_mut().zip(v) {
        *o += c * x;
    }
}

/// Solve `M x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is singular to working precision (pivot
/// smaller than `1e-13` relative to the largest initial entry).
pub fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    debug_assert!(m.len() == k && m.iter().all(|row| row.len() == k));
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    let tiny = 1e-13 * scale;

    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot_row][col].abs() <= tiny {
            return None;
        }
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (upper_rows, lower_rows) = m.split_at_mut(col + 1);
        let pivot_row = &upper_rows[col];
        let pivot = pivot_row[col];
        for (offset, row) in lower_rows.iter_mut().enumerate() {
            let factor = row[col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for (target, &upper) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *target -= factor * upper;
            }
            b[col + 1 + offset] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let mut acc = b[col];
        for j in (col + 1)..k {
            acc -= m[col][j] * x[j];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// Orthonormalize the given rows in place by modified Gram-Schmidt.
///
/// Returns `false` when a row collapses below `1e-12` of its original norm,
/// i.e. the rows were (numerically) linearly dependent.
pub fn orthonormalize_rows(rows: &mut [Vec<f64>]) -> bool {
    for i in 0..rows.len() {
        let original = norm(&rows[i]).max(1.0);
        for j in 0..i {
            let (head, tail) = rows.split_at_mut(i);
            let c = dot(&tail[0], &head[j]);
            axpy(&mut tail[0], -c, &head[j]);
        }
        let n = norm(&rows[i]);
        if n <= 1e-12 * original {
            return false;
        }
        for v in rows[i].iter_mut() {
            *v /= n;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let x = solve_dense(m, vec![3.0, -4.0]).unwrap();
        assert_eq!(x, vec![3.0, -4.0]);
    }

    #[test]
    fn solve_requires_pivoting() {
        // First pivot is zero without row exchange.
        let m = vec![vec![0.0, 1.0], vec![2.0, 1.0]];
        let x = solve_dense(m, vec![1.0, 4.0]).unwrap();
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_singular_returns_none() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_dense(m, vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn gram_schmidt_orthonormal() {
        let mut rows = vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]];
        assert!(orthonormalize_rows(&mut rows));
        assert!((norm(&rows[0]) - 1.0).abs() < 1e-14);
        assert!((norm(&rows[1]) - 1.0).abs() < 1e-14);
        assert!(dot(&rows[0], &rows[1]).abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_detects_dependence() {
        let mut rows = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(!orthonormalize_rows(&mut rows));
    }
}
