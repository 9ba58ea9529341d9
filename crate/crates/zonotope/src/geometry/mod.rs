//! Convex-geometry kernel: hull distances, Hausdorff error of sub-hulls,
//! simplicial constants, vertex adjacency, and diameter bounds.
//!
//! For nested convex bodies `conv(sub) <= Z`, the Hausdorff distance is the
//! maximum over vertices of `Z` of the distance to `conv(sub)`: the distance
//! function is convex on `Z`, so its maximum sits at a vertex. That makes
//! every quantity here a finite number of nearest-point solves.

mod lp;
mod nearest;

pub use lp::{sign_feasible, LpError, LpFeasibilityResult, FEASIBILITY_TOLERANCE};
pub use nearest::{
    nearest_point_in_hull, HullDistanceResult, NearestError, NEAREST_MAX_ITER,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::linalg::{distance, norm};
use crate::matrix::{vertex_count_upper_bound, CountError, GeneratorMatrix};
use crate::sign::SignVector;
use crate::vertex::VertexSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("sub vertex set is empty")]
    EmptySub,
    #[error("sub vertex set is not contained in the full set")]
    NotSubset,
    #[error("vertex is not a member of the set")]
    VertexNotInSet,
    #[error("vertex set needs at least two vertices")]
    TooFewVertices,
    #[error("nearest-point solve did not converge within {NEAREST_MAX_ITER} iterations")]
    NotConverged,
    #[error(transparent)]
    Nearest(#[from] NearestError),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// Hausdorff distance `h(conv(full), conv(sub))` for `sub` a symmetric subset
/// of `full`, evaluated as the maximum over missing vertices of the distance
/// to `conv(sub)`.
pub fn hausdorff_to_subhull(full: &VertexSet, sub: &VertexSet) -> Result<f64, GeometryError> {
    if sub.is_empty() {
        return Err(GeometryError::EmptySub);
    }
    if !sub.is_subset_of(full) {
        return Err(GeometryError::NotSubset);
    }
    let sub_points = sub.all_points();
    let missing: Vec<&[f64]> = full
        .iter()
        .filter(|v| !sub.contains(v.key()))
        .map(|v| v.point())
        .collect();
    // d(v, conv(sub)) = d(-v, conv(sub)) by central symmetry, so one solve
    // per missing pair suffices.
    let distances = map_distances(&missing, &sub_points)?;
    Ok(distances.into_iter().fold(0.0f64, f64::max))
}

fn map_distances(queries: &[&[f64]], points: &[Vec<f64>]) -> Result<Vec<f64>, GeometryError> {
    let solve = |q: &&[f64]| -> Result<f64, GeometryError> {
        let r = nearest_point_in_hull(points, q)?;
        if !r.converged {
            return Err(GeometryError::NotConverged);
        }
        Ok(r.distance)
    };
    #[cfg(feature = "parallel")]
    {
        if queries.len() > 1 {
            return queries.par_iter().map(solve).collect();
        }
    }
    queries.iter().map(solve).collect()
}

/// The simplicial constant of a vertex: its distance to the convex hull of
/// all other vertices (the negated vertex included). Equals the Hausdorff
/// cost of dropping that single vertex.
pub fn simplicial_constant(
    vertices: &VertexSet,
    key: &SignVector,
) -> Result<f64, GeometryError> {
    let (canonical, _) = key.canonicalize();
    let vertex = vertices
        .get(&canonical)
        .ok_or(GeometryError::VertexNotInSet)?;
    if vertices.count() < 2 {
        return Err(GeometryError::TooFewVertices);
    }
    let mut others = Vec::with_capacity(vertices.count() - 1);
    for v in vertices.iter() {
        if v.key() != &canonical {
            others.push(v.point().to_vec());
        }
        others.push(v.negated_point());
    }
    let result = nearest_point_in_hull(&others, vertex.point())?;
    if !result.converged {
        return Err(GeometryError::NotConverged);
    }
    #[cfg(debug_assertions)]
    {
        // Central symmetry: the negated vertex sees the negated point cloud.
        let negated: Vec<Vec<f64>> =
            others.iter().map(|p| p.iter().map(|c| -c).collect()).collect();
        let mirror = nearest_point_in_hull(&negated, &vertex.negated_point())?;
        debug_assert!(
            (result.distance - mirror.distance).abs() <= 1e-9,
            "simplicial constant asymmetry: {} vs {}",
            result.distance,
            mirror.distance
        );
    }
    Ok(result.distance)
}

/// Simplicial constants for every canonical vertex of the set.
pub fn simplicial_constants(
    vertices: &VertexSet,
) -> Result<BTreeMap<SignVector, f64>, GeometryError> {
    let keys: Vec<SignVector> = vertices.canonical_keys().cloned().collect();
    let compute = |k: &SignVector| simplicial_constant(vertices, k).map(|a| (k.clone(), a));
    #[cfg(feature = "parallel")]
    {
        if keys.len() > 1 {
            return keys.par_iter().map(compute).collect();
        }
    }
    keys.iter().map(compute).collect()
}

/// Vertex adjacency of a general-position zonotope: two vertices are joined
/// by an edge iff their oriented sign vectors differ in exactly one
/// coordinate (every edge is a translate of some `2 a_i`).
#[derive(Debug, Clone)]
pub struct Adjacency {
    neighbors: BTreeMap<SignVector, Vec<SignVector>>,
    /// False when the set is smaller than the general-position count, in
    /// which case neighbor lists may be truncated.
    pub complete: bool,
}

impl Adjacency {
    pub fn neighbors(&self, key: &SignVector) -> Option<&[SignVector]> {
        self.neighbors.get(key).map(|v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignVector, &[SignVector])> {
        self.neighbors.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Diameter of the base of `key`: the maximum pairwise distance among the
    /// points adjacent to that vertex.
    pub fn base_diameter(
        &self,
        matrix: &GeneratorMatrix,
        key: &SignVector,
    ) -> Result<f64, GeometryError> {
        let neighbors = self
            .neighbors(key)
            .ok_or(GeometryError::VertexNotInSet)?;
        let points: Vec<Vec<f64>> = neighbors.iter().map(|k| matrix.point_of(k)).collect();
        let mut best = 0.0f64;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                best = best.max(distance(&points[i], &points[j]));
            }
        }
        Ok(best)
    }

    /// Largest base diameter over all vertices.
    pub fn max_base_diameter(&self, matrix: &GeneratorMatrix) -> Result<f64, GeometryError> {
        let mut best = 0.0f64;
        for key in self.neighbors.keys() {
            best = best.max(self.base_diameter(matrix, key)?);
        }
        Ok(best)
    }
}

/// Build the oriented adjacency structure over a (preferably complete)
/// vertex set.
pub fn adjacency(
    matrix: &GeneratorMatrix,
    vertices: &VertexSet,
) -> Result<Adjacency, GeometryError> {
    let bound = vertex_count_upper_bound(matrix.num_generators(), matrix.dimension())?;
    let complete = vertices.count() as u64 == bound;
    let oriented: BTreeSet<SignVector> = vertices.oriented_keys().collect();
    let mut neighbors = BTreeMap::new();
    for key in &oriented {
        let adjacent: Vec<SignVector> = (0..key.len())
            .map(|i| key.flipped(i))
            .filter(|k| oriented.contains(k))
            .collect();
        neighbors.insert(key.clone(), adjacent);
    }
    Ok(Adjacency {
        neighbors,
        complete,
    })
}

/// Diameter of the base of vertex `key` within the given vertex set.
pub fn base_diameter(
    matrix: &GeneratorMatrix,
    vertices: &VertexSet,
    key: &SignVector,
) -> Result<f64, GeometryError> {
    adjacency(matrix, vertices)?.base_diameter(matrix, key)
}

/// An upper bound on the diameter of `Z(A)`: `2 * sum_i |a_i|` always works
/// since `Z` sits in the ball of radius `sum_i |a_i|`; for orthonormal rows
/// (checked entrywise to `1e-10`) the tighter `2 sqrt(m)` applies as well.
pub fn diameter_bound(matrix: &GeneratorMatrix) -> f64 {
    let column_sum: f64 = matrix.columns().map(norm).sum();
    let generic = 2.0 * column_sum;
    if matrix.rows_orthonormal(1e-10) {
        generic.min(2.0 * (matrix.num_generators() as f64).sqrt())
    } else {
        generic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::Vertex;

    fn identity2() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn hexagon_matrix() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap()
    }

    fn set_from_signs(matrix: &GeneratorMatrix, signs: &[&[i8]]) -> VertexSet {
        signs
            .iter()
            .map(|s| {
                Vertex::from_key(
                    matrix,
                    &SignVector::from_signs(s.to_vec()).unwrap(),
                )
            })
            .collect()
    }

    fn hexagon_set(matrix: &GeneratorMatrix) -> VertexSet {
        set_from_signs(matrix, &[&[1, 1, 1], &[1, -1, 1], &[1, -1, -1]])
    }

    #[test]
    fn hausdorff_of_equal_sets_is_zero() {
        let a = hexagon_matrix();
        let full = hexagon_set(&a);
        assert_eq!(hausdorff_to_subhull(&full, &full).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_hexagon_minus_sharp_pair() {
        let a = hexagon_matrix();
        let full = hexagon_set(&a);
        // Drop the pair +-(2,2), i.e. the all-plus key.
        let sub = set_from_signs(&a, &[&[1, -1, 1], &[1, -1, -1]]);
        let h = hausdorff_to_subhull(&full, &sub).unwrap();
        assert!((h - 2.0f64.sqrt()).abs() < 1e-9, "h {h}");
    }

    #[test]
    fn hausdorff_square_diagonal_pair() {
        let a = identity2();
        let full = set_from_signs(&a, &[&[1, 1], &[1, -1]]);
        let sub = set_from_signs(&a, &[&[1, 1]]);
        // Distance from (1,-1) to the segment through (1,1) and (-1,-1).
        let h = hausdorff_to_subhull(&full, &sub).unwrap();
        assert!((h - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_rejects_empty_and_non_subset() {
        let a = hexagon_matrix();
        let full = hexagon_set(&a);
        assert_eq!(
            hausdorff_to_subhull(&full, &VertexSet::new()),
            Err(GeometryError::EmptySub)
        );
        let other = set_from_signs(&a, &[&[1, 1, -1]]);
        assert_eq!(
            hausdorff_to_subhull(&full, &other),
            Err(GeometryError::NotSubset)
        );
    }

    #[test]
    fn simplicial_constant_square() {
        let a = identity2();
        let set = set_from_signs(&a, &[&[1, 1], &[1, -1]]);
        for key in [[1i8, 1], [1, -1]] {
            let alpha =
                simplicial_constant(&set, &SignVector::from_signs(key.to_vec()).unwrap())
                    .unwrap();
            assert!((alpha - 2.0f64.sqrt()).abs() < 1e-9, "alpha {alpha}");
        }
    }

    #[test]
    fn simplicial_constant_hexagon_sharp_vertex() {
        let a = hexagon_matrix();
        let set = hexagon_set(&a);
        let alpha =
            simplicial_constant(&set, &SignVector::from_signs(vec![1, 1, 1]).unwrap()).unwrap();
        assert!((alpha - 2.0f64.sqrt()).abs() < 1e-9, "alpha {alpha}");
    }

    #[test]
    fn simplicial_constant_symmetric_under_negation() {
        let a = hexagon_matrix();
        let set = hexagon_set(&a);
        let key = SignVector::from_signs(vec![1, -1, 1]).unwrap();
        let plus = simplicial_constant(&set, &key).unwrap();
        let minus = simplicial_constant(&set, &key.negated()).unwrap();
        assert!((plus - minus).abs() < 1e-9);
    }

    #[test]
    fn simplicial_constant_unknown_vertex() {
        let a = hexagon_matrix();
        let set = hexagon_set(&a);
        assert_eq!(
            simplicial_constant(&set, &SignVector::from_signs(vec![1, 1, -1]).unwrap()),
            Err(GeometryError::VertexNotInSet)
        );
    }

    #[test]
    fn adjacency_square_and_hexagon_degrees() {
        let a = identity2();
        let square = set_from_signs(&a, &[&[1, 1], &[1, -1]]);
        let adj = adjacency(&a, &square).unwrap();
        assert!(adj.complete);
        for (_, neighbors) in adj.iter() {
            assert_eq!(neighbors.len(), 2);
        }

        let h = hexagon_matrix();
        let hex = hexagon_set(&h);
        let adj = adjacency(&h, &hex).unwrap();
        assert!(adj.complete);
        for (_, neighbors) in adj.iter() {
            assert_eq!(neighbors.len(), 2);
        }
    }

    #[test]
    fn adjacency_flags_incomplete_sets() {
        let a = hexagon_matrix();
        let partial = set_from_signs(&a, &[&[1, 1, 1]]);
        let adj = adjacency(&a, &partial).unwrap();
        assert!(!adj.complete);
    }

    #[test]
    fn base_diameter_square_vertex() {
        let a = identity2();
        let square = set_from_signs(&a, &[&[1, 1], &[1, -1]]);
        let key = SignVector::from_signs(vec![1, 1]).unwrap();
        let d = base_diameter(&a, &square, &key).unwrap();
        // Neighbors (1,-1) and (-1,1) sit 2*sqrt(2) apart.
        assert!((d - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
        let d_neg = base_diameter(&a, &square, &key.negated()).unwrap();
        assert_eq!(d, d_neg);
    }

    #[test]
    fn base_diameter_hexagon_sharp_vertex() {
        let a = hexagon_matrix();
        let hex = hexagon_set(&a);
        let key = SignVector::from_signs(vec![1, 1, 1]).unwrap();
        let d = base_diameter(&a, &hex, &key).unwrap();
        // Neighbors (2,0) and (0,2).
        assert!((d - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diameter_bound_examples() {
        let a = identity2();
        assert!((diameter_bound(&a) - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
        let h = hexagon_matrix();
        assert!((diameter_bound(&h) - (4.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-12);
        // The bound dominates the actual diameter of the square zonotope.
        let square = set_from_signs(&a, &[&[1, 1], &[1, -1]]);
        let actual = square
            .all_points()
            .iter()
            .flat_map(|p| square.all_points().iter().map(|q| distance(p, q)).collect::<Vec<_>>())
            .fold(0.0f64, f64::max);
        assert!(actual <= diameter_bound(&a) + 1e-12);
    }
}
