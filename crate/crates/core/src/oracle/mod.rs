//! Ground truth at desk scale: lattice enumeration, brute-force optimization,
//! exact vertex enumeration and integer-hull certification.

mod certify;
mod enumerate;
mod vertices;

use num_bigint::BigInt;
use thiserror::Error;

pub use certify::{assert_integer_hull, HullReport, PointViolation, RowReport};
pub use enumerate::{
    brute_max, enumerate_box, enumerate_instance, enumerate_two_sided, BoxConstraint, PointCloud,
    DEFAULT_GUARD,
};
pub use vertices::{vertices, vertices_of, VertexLimits, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("box has {product} points, above the guard {guard}")]
    TooLarge { product: BigInt, guard: u64 },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("dimension {dim} exceeds the vertex enumeration limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("{rows} rows exceed the vertex enumeration limit {limit}")]
    TooManyRows { rows: usize, limit: usize },
    #[error("inequality system is unbounded")]
    UnboundedDetected,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}
