//! Randomized zonotope vertex enumeration.
//!
//! A zonotope `Z(A) = { A x : x in [-1,1]^m }` is the linear image of a
//! hypercube. Its vertices are reachable through the map
//! `v(x) = A sign(A^T x)`: for Gaussian `x` the preimage of a vertex is the
//! interior of its normal cone, so repeatedly sampling `x` and inserting the
//! vertex pair `{v, -v}` enumerates the vertex set, and stopping early yields
//! an inner approximation whose Hausdorff error this crate can both measure
//! and bound a priori.
//!
//! The crate is organized around that pipeline:
//!
//! - [`matrix`]: the validated generator matrix and the general-position
//!   vertex count.
//! - [`sign`] / [`vertex`]: sign-vector arithmetic, the vertex map, and
//!   centrally symmetric vertex sets keyed by canonical sign vector.
//! - [`sampler`]: the randomized enumeration loop with its stopping policies
//!   and deterministic worker streams.
//! - [`geometry`]: nearest point in a hull (Wolfe's method), Hausdorff
//!   distance to sub-hulls, simplicial constants, adjacency, and the strict
//!   sign-feasibility LP.
//! - [`oracle`]: independent exact enumeration (brute force over sign
//!   vectors, planar angular sweep) and Monte Carlo vertex-measure
//!   estimation.
//! - [`bounds`]: the sample-complexity and Hausdorff-error bounds.
//! - [`experiments`]: reproducible drivers for error traces, stopping
//!   histograms, timings, and measure maps.
//! - [`io`]: CSV/JSON wire formats.
//!
//! With the default `parallel` feature the sampling, brute-force, and
//! Hausdorff inner loops fan out over rayon; disabling it swaps in
//! sequential fallbacks that produce bit-identical results.

pub mod bounds;
pub mod experiments;
pub mod geometry;
pub mod io;
mod linalg;
pub mod matrix;
pub mod oracle;
pub mod sampler;
pub mod sign;
pub mod stats;
pub mod vertex;

pub use matrix::{vertex_count_upper_bound, GeneratorMatrix, ValidationError};
pub use sampler::{
    enumerate, enumerate_parallel, EnumerationResult, SamplerConfig, StoppingPolicy,
    TerminationReason,
};
pub use sign::{Parity, SignVector};
pub use vertex::{vertex_map, Vertex, VertexSet};
