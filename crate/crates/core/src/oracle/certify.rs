use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{vertices, PointCloud};
use crate::linalg::affine_dim;
use crate::num::{int_vec_str, is_integral, rat_vec_str};
use crate::polytope::HPolytope;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointViolation {
    #[serde(with = "int_vec_str")]
    pub point: Vec<BigInt>,
    pub row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub row: usize,
    pub tag: String,
    pub text: String,
    pub tight_points: usize,
    /// Affine dimension of the tight cloud points.
    pub tight_dim: Option<usize>,
    pub facet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadVertex {
    #[serde(with = "rat_vec_str")]
    pub vertex: Vec<BigRational>,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HullReport {
    pub pass: bool,
    pub points_checked: usize,
    pub cloud_dim: Option<usize>,
    pub point_violations: Vec<PointViolation>,
    pub vertex_count: usize,
    pub bad_vertices: Vec<BadVertex>,
    pub rows: Vec<RowReport>,
    pub error: Option<String>,
}

const MAX_LISTED: usize = 20;

/// Checks that `poly` is the integer hull of `cloud`:
/// every point satisfies every row, every vertex is an integral cloud point,
/// and every non-bound row is tight on a cloud face of codimension one.
pub fn assert_integer_hull(poly: &HPolytope, cloud: &PointCloud) -> HullReport {
    let mut point_violations = Vec::new();
    for p in &cloud.points {
        for (k, r) in poly.ineqs.iter().enumerate() {
            if !r.satisfied_by(p) && point_violations.len() < MAX_LISTED {
                point_violations.push(PointViolation {
                    point: p.clone(),
                    row: k,
                });
            }
        }
    }
    let cloud_dim = affine_dim(&cloud.points);

    let members: HashSet<&Vec<BigInt>> = cloud.points.iter().collect();
    let (vertex_count, bad_vertices, error) = match vertices(poly) {
        Ok(vs) => {
            let bad: Vec<BadVertex> = vs
                .vertices
                .iter()
                .filter_map(|v| {
                    let integral = is_integral(v);
                    let inside = integral && {
                        let xi: Vec<BigInt> = v.iter().map(|r| r.numer().clone()).collect();
                        members.contains(&xi)
                    };
                    (!inside).then(|| BadVertex {
                        vertex: v.clone(),
                        integral,
                    })
                })
                .take(MAX_LISTED)
                .collect();
            (vs.len(), bad, None)
        }
        Err(e) => (0, Vec::new(), Some(e.to_string())),
    };

    let rows: Vec<RowReport> = poly
        .ineqs
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.tag.is_bound())
        .map(|(k, r)| {
            let tight: Vec<Vec<BigInt>> = cloud
                .points
                .iter()
                .filter(|p| r.is_tight(p))
                .cloned()
                .collect();
            let tight_dim = affine_dim(&tight);
            let facet = match (tight_dim, cloud_dim) {
                (Some(t), Some(c)) => c >= 1 && t + 1 == c,
                _ => false,
            };
            RowReport {
                row: k,
                tag: r.tag.to_string(),
                text: r.render(),
                tight_points: tight.len(),
                tight_dim,
                facet,
            }
        })
        .collect();

    let pass = point_violations.is_empty()
        && error.is_none()
        && bad_vertices.is_empty()
        && rows.iter().all(|r| r.facet);
    HullReport {
        pass,
        points_checked: cloud.points.len(),
        cloud_dim,
        point_violations,
        vertex_count,
        bad_vertices,
        rows,
        error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facets::hull_le;
    use crate::greedy::greedy_solution;
    use crate::instance::{validate, KnapsackInstance, Sense};
    use crate::oracle::{enumerate_instance, DEFAULT_GUARD};

    #[test]
    fn example_passes_and_mutation_fails() {
        let inst =
            KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], 841, Sense::Le)
                .unwrap();
        let vk = validate(&inst).unwrap();
        let gp = greedy_solution(&vk).unwrap();
        let hull = hull_le(&vk, &gp);
        let cloud = enumerate_instance(&inst, DEFAULT_GUARD).unwrap();
        let report = assert_integer_hull(&hull, &cloud);
        assert!(report.pass, "{report:?}");
        assert_eq!(report.rows.len(), 3);

        let mut weak = hull.clone();
        weak.ineqs[0].rhs += 1;
        let report = assert_integer_hull(&weak, &cloud);
        assert!(!report.pass);
        assert!(!report.rows[0].facet);
        assert!(report.rows[1].facet);
    }
}
