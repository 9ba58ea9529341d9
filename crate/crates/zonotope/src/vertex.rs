//! Vertices and centrally symmetric vertex sets.
//!
//! A `Vertex` pairs a canonical sign vector with its point `A k`. A
//! `VertexSet` stores one entry per `{k, -k}` pair, keyed by the canonical
//! representative; the negated vertex is implied, so the set is centrally
//! symmetric by construction and `count()` reports vertices including
//! negations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::matrix::{GeneratorMatrix, ZERO_COMPONENT_TOL};
use crate::sign::{Parity, SignVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    /// Component `i` of `A^T x` is within `ZERO_COMPONENT_TOL` of zero, so the
    /// sign is ambiguous. Samplers redraw on this.
    #[error("component {0} of A^T x is within tolerance of zero")]
    Degenerate(usize),
}

/// A zonotope vertex: canonical sign vector plus its point `A k`.
/// The negated point carries the negated key and is implied by membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    key: SignVector,
    point: Vec<f64>,
}

impl Vertex {
    /// Build the vertex for `key` (canonicalizing if needed) with the point
    /// recomputed through the matrix's reproducible column-order sum.
    pub fn from_key(matrix: &GeneratorMatrix, key: &SignVector) -> Vertex {
        let (canonical, _) = key.canonicalize();
        let point = matrix.point_of(&canonical);
        Vertex {
            key: canonical,
            point,
        }
    }

    pub fn key(&self) -> &SignVector {
        &self.key
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn negated_point(&self) -> Vec<f64> {
        self.point.iter().map(|&c| -c).collect()
    }
}

/// The raw oriented sign vector `sign(A^T x)`, or `Degenerate` when some
/// component of `A^T x` is too close to zero to trust its sign.
pub fn sign_of_sample(matrix: &GeneratorMatrix, x: &[f64]) -> Result<SignVector, MapError> {
    let mut products = vec![0.0; matrix.num_generators()];
    matrix.transpose_apply(x, &mut products);
    sign_of_products(&products)
}

pub(crate) fn sign_of_products(products: &[f64]) -> Result<SignVector, MapError> {
    if let Some(i) = products.iter().position(|p| p.abs() <= ZERO_COMPONENT_TOL) {
        return Err(MapError::Degenerate(i));
    }
    Ok(SignVector::from_products(products))
}

/// The vertex map `v(x) = A sign(A^T x)`.
///
/// Returns the canonical vertex together with the parity recording whether
/// `x` actually mapped to the vertex (`Kept`) or its negation (`Negated`).
pub fn vertex_map(
    matrix: &GeneratorMatrix,
    x: &[f64],
) -> Result<(Vertex, Parity), MapError> {
    let oriented = sign_of_sample(matrix, x)?;
    let (canonical, parity) = oriented.canonicalize();
    let point = matrix.point_of(&canonical);
    Ok((
        Vertex {
            key: canonical,
            point,
        },
        parity,
    ))
}

/// Centrally symmetric vertex collection keyed by canonical sign vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexSet {
    entries: BTreeMap<SignVector, Vertex>,
}

impl VertexSet {
    pub fn new() -> VertexSet {
        VertexSet::default()
    }

    /// Number of vertices represented, including negations.
    pub fn count(&self) -> usize {
        2 * self.entries.len()
    }

    /// Number of stored canonical representatives.
    pub fn pair_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Insert a vertex by key, computing its point only when new.
    /// Returns true when the pair was not present before.
    pub fn insert_key(&mut self, matrix: &GeneratorMatrix, key: &SignVector) -> bool {
        let (canonical, _) = key.canonicalize();
        if self.entries.contains_key(&canonical) {
            return false;
        }
        let point = matrix.point_of(&canonical);
        self.entries.insert(
            canonical.clone(),
            Vertex {
                key: canonical,
                point,
            },
        );
        true
    }

    pub fn insert(&mut self, vertex: Vertex) -> bool {
        debug_assert!(vertex.key.is_canonical());
        if self.entries.contains_key(&vertex.key) {
            return false;
        }
        self.entries.insert(vertex.key.clone(), vertex);
        true
    }

    /// Membership for either orientation of `key`.
    pub fn contains(&self, key: &SignVector) -> bool {
        let (canonical, _) = key.canonicalize();
        self.entries.contains_key(&canonical)
    }

    pub fn get(&self, canonical: &SignVector) -> Option<&Vertex> {
        self.entries.get(canonical)
    }

    /// Canonical entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = &Vertex> {
        self.entries.values()
    }

    pub fn canonical_keys(&self) -> impl Iterator<Item = &SignVector> {
        self.entries.keys()
    }

    /// Both orientations of every stored key, canonical first.
    pub fn oriented_keys(&self) -> impl Iterator<Item = SignVector> + '_ {
        self.entries
            .keys()
            .flat_map(|k| [k.clone(), k.negated()])
    }

    /// All vertex points including negations, in deterministic key order.
    pub fn all_points(&self) -> Vec<Vec<f64>> {
        let mut points = Vec::with_capacity(self.count());
        for v in self.entries.values() {
            points.push(v.point.clone());
            points.push(v.negated_point());
        }
        points
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.entries.keys().all(|k| other.entries.contains_key(k))
    }

    /// Canonical keys present in `self` but not in `other`.
    pub fn difference_keys<'a>(
        &'a self,
        other: &'a VertexSet,
    ) -> impl Iterator<Item = &'a SignVector> {
        self.entries
            .keys()
            .filter(move |k| !other.entries.contains_key(*k))
    }

    pub fn same_keys(&self, other: &VertexSet) -> bool {
        self.entries.len() == other.entries.len() && self.is_subset_of(other)
    }

    /// Union in place; returns the number of new pairs absorbed.
    pub fn absorb(&mut self, other: VertexSet) -> usize {
        let mut added = 0;
        for (k, v) in other.entries {
            if self.entries.insert(k, v).is_none() {
                added += 1;
            }
        }
        added
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<T: IntoIterator<Item = Vertex>>(iter: T) -> Self {
        let mut set = VertexSet::new();
        for v in iter {
            set.insert(v);
        }
        set
    }
}
