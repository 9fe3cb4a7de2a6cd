//! Packing coefficients `phi`, packing inequalities and complete hull
//! descriptions for `<=`- and `>=`-type superincreasing knapsacks.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::greedy::{greedy_vector, minimal_packing, GreedyError, GreedyProfile};
use crate::instance::{lex_le, InstanceError, Sense, ValidatedKnapsack};
use crate::linalg::affine_dim;
use crate::num::{dot, int_vec_str};
use crate::polytope::{HPolytope, LinearInequality, RowTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FacetError {
    #[error("index {} is not a support index above {}", .i + 1, .j + 1)]
    IndexNotInSupportTail { j: usize, i: usize },
    #[error("packing row {} is a variable bound (theta_j = u_j)", .j + 1)]
    NotPackingRow { j: usize },
    #[error("facet certificate for row {} failed: {reason}", .j + 1)]
    CertificateFailed { j: usize, reason: String },
    #[error("lower bounds exceed the capacity")]
    InfeasibleShift,
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// `phi_j(i) = (u_j - theta_j) * prod_{k in I, next(j) <= k <= prev(i)} (u_k + 1 - theta_k)`
/// for `i in I_j`.
pub fn phi_coeff(
    u: &[BigInt],
    gp: &GreedyProfile,
    j: usize,
    i: usize,
) -> Result<BigInt, FacetError> {
    if i <= j || !gp.in_support(i) {
        return Err(FacetError::IndexNotInSupportTail { j, i });
    }
    let theta = gp.theta();
    let mut value = &u[j] - &theta[j];
    for &k in gp.support_above(j).iter().take_while(|&&k| k < i) {
        value *= &u[k] + 1u8 - &theta[k];
    }
    Ok(value)
}

/// `phi_j(i)` for a validated `<=` instance.
pub fn phi(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    j: usize,
    i: usize,
) -> Result<BigInt, FacetError> {
    phi_coeff(vk.bounds(), gp, j, i)
}

/// The `j`-th row of the hull of `{x in [0,u] : x ⪯ theta}`: a packing
/// inequality when `theta_j < u_j` and `j` lies below the last support index,
/// otherwise the upper bound on `x_j`.
pub fn packing_row(u: &[BigInt], gp: &GreedyProfile, j: usize) -> LinearInequality {
    let n = gp.n();
    let theta = gp.theta();
    let tail = gp.support_above(j);
    if theta[j] >= u[j] || tail.is_empty() {
        let top = gp.support().last().copied();
        let bound = if top.is_none_or(|m| j >= m) {
            theta[j].clone()
        } else {
            u[j].clone()
        };
        return LinearInequality::upper_bound(n, j, bound);
    }
    let mut coeffs = vec![BigInt::zero(); n];
    coeffs[j] = BigInt::one();
    let mut rhs = theta[j].clone();
    let mut f = &u[j] - &theta[j];
    for &i in tail {
        rhs += &f * &theta[i];
        coeffs[i] = f.clone();
        f *= &u[i] + 1u8 - &theta[i];
    }
    LinearInequality::new(coeffs, rhs, Sense::Le, RowTag::Packing(j))
}

pub fn packing_inequality(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    j: usize,
) -> LinearInequality {
    packing_row(vk.bounds(), gp, j)
}

/// Hull of `{x in [0,u] ∩ Z^n : x ⪯ theta}` for an arbitrary `0 <= theta <= u`.
/// Rows: packing rows (ascending `j`), lower bounds, upper bounds. Coordinates
/// above the last support index are capped at `theta`.
pub fn packing_system(u: &[BigInt], theta: &[BigInt]) -> HPolytope {
    let gp = GreedyProfile::from_theta(theta.to_vec());
    let theta = gp.theta();
    let n = u.len();
    let mut poly = HPolytope::new(n);
    for j in 0..n {
        let row = packing_row(u, &gp, j);
        if !row.tag.is_bound() {
            poly.push(row);
        }
    }
    for i in 0..n {
        poly.push(LinearInequality::lower_bound(n, i, BigInt::zero()));
    }
    let top = gp.support().last().copied();
    for i in 0..n {
        let cap = if top.is_none_or(|m| i >= m) {
            theta[i].clone()
        } else {
            u[i].clone()
        };
        poly.push(LinearInequality::upper_bound(n, i, cap));
    }
    poly
}

/// `conv K` for a validated `<=` instance.
pub fn hull_le(vk: &ValidatedKnapsack, gp: &GreedyProfile) -> HPolytope {
    packing_system(vk.bounds(), gp.theta())
}

/// `conv {x in [0,u] : w·x >= d}` by complementing `y = u - x` into a
/// `<=` system and substituting back.
pub fn hull_ge(w: &[BigInt], u: &[BigInt], d: &BigInt) -> Result<HPolytope, FacetError> {
    minimal_packing(w, u, d)?;
    let slack = dot(w, u) - d;
    let theta = greedy_vector(w, u, &slack)?;
    Ok(complement_system(&packing_system(u, &theta), u))
}

/// Rewrites every row of `poly` under `x = u - y`.
pub fn complement_system(poly: &HPolytope, u: &[BigInt]) -> HPolytope {
    let ineqs = poly
        .ineqs
        .iter()
        .map(|r| {
            let tag = match &r.tag {
                RowTag::Packing(j) => RowTag::GePacking(*j),
                RowTag::GePacking(j) => RowTag::Packing(*j),
                RowTag::BoundUpper(i) => RowTag::BoundLower(*i),
                RowTag::BoundLower(i) => RowTag::BoundUpper(*i),
                other => other.clone(),
            };
            r.complemented(u, tag)
        })
        .collect();
    HPolytope {
        dim: poly.dim,
        ineqs,
    }
}

/// `Phi_j(i) = gamma_j * prod_{k in T_j, k < i} (gamma_k + 1)` with
/// `T = {i : gamma_i <= u_i - 1}`.
pub fn big_phi(u: &[BigInt], gamma: &[BigInt], j: usize, i: usize) -> BigInt {
    let mut value = gamma[j].clone();
    for k in (j + 1)..i {
        if gamma[k] < u[k] {
            value *= &gamma[k] + 1u8;
        }
    }
    value
}

/// `>=` hull written directly from `gamma` and `Phi`, row order matching
/// [`hull_ge`].
pub fn hull_ge_direct(w: &[BigInt], u: &[BigInt], d: &BigInt) -> Result<HPolytope, FacetError> {
    let gamma = minimal_packing(w, u, d)?;
    let n = u.len();
    let t: Vec<usize> = (0..n).filter(|&i| gamma[i] < u[i]).collect();
    let top = t.last().copied();
    let mut poly = HPolytope::new(n);
    for j in 0..n {
        let tail: Vec<usize> = t.iter().copied().filter(|&i| i > j).collect();
        if gamma[j].is_zero() || tail.is_empty() {
            continue;
        }
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs[j] = BigInt::one();
        let mut rhs = gamma[j].clone();
        for &i in &tail {
            let f = big_phi(u, &gamma, j, i);
            rhs += &f * &gamma[i];
            coeffs[i] = f;
        }
        poly.push(LinearInequality::new(
            coeffs,
            rhs,
            Sense::Ge,
            RowTag::GePacking(j),
        ));
    }
    for i in 0..n {
        poly.push(LinearInequality::upper_bound(n, i, u[i].clone()));
    }
    for i in 0..n {
        let floor = if top.is_none_or(|m| i >= m) {
            gamma[i].clone()
        } else {
            BigInt::zero()
        };
        poly.push(LinearInequality::lower_bound(n, i, floor));
    }
    Ok(poly)
}

/// `n` affinely independent points of `K` tight at the `j`-th packing row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetCertificate {
    pub j: usize,
    pub points: Vec<CertificatePoint>,
    pub affine_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificatePoint {
    pub kind: PointKind,
    #[serde(with = "int_vec_str")]
    pub x: Vec<BigInt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Base,
    LowerUnit,
    SupportDrop,
    SupportDropUnit,
}

/// Number of certificate points the construction produces for row `j`.
pub fn certificate_point_count(gp: &GreedyProfile, j: usize) -> usize {
    let tail = gp.support_above(j);
    let mut count = 1 + j;
    for &i in tail {
        let start = gp.prev(i).map_or(j, |p| p.max(j));
        count += i - start;
    }
    count
}

fn certificate_points(u: &[BigInt], gp: &GreedyProfile, j: usize) -> Vec<CertificatePoint> {
    let n = gp.n();
    let theta = gp.theta();
    let zero = BigInt::zero;
    let mut points = Vec::with_capacity(n);

    let mut base = vec![zero(); n];
    base[j..].clone_from_slice(&theta[j..]);
    points.push(CertificatePoint {
        kind: PointKind::Base,
        x: base,
    });

    let tail = gp.support_above(j);
    let nxt = tail[0];
    for l in 0..j {
        let mut x = vec![zero(); n];
        x[l] = BigInt::one();
        x[j] = u[j].clone();
        x[nxt] = &theta[nxt] - 1u8;
        x[nxt + 1..].clone_from_slice(&theta[nxt + 1..]);
        points.push(CertificatePoint {
            kind: PointKind::LowerUnit,
            x,
        });
    }

    for &i in tail {
        let start = gp.prev(i).map_or(j, |p| p.max(j));
        let mut x = vec![zero(); n];
        x[j..=start].clone_from_slice(&u[j..=start]);
        x[i] = &theta[i] - 1u8;
        x[i + 1..].clone_from_slice(&theta[i + 1..]);
        for l in (start + 1)..i {
            let mut y = x.clone();
            y[l] = BigInt::one();
            points.push(CertificatePoint {
                kind: PointKind::SupportDropUnit,
                x: y,
            });
        }
        points.push(CertificatePoint {
            kind: PointKind::SupportDrop,
            x,
        });
    }
    points
}

/// Builds and checks the certificate; any failed check is reported as an error.
pub fn facet_certificate(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    j: usize,
) -> Result<FacetCertificate, FacetError> {
    let u = vk.bounds();
    let n = vk.n();
    let row = packing_row(u, gp, j);
    if row.tag.is_bound() {
        return Err(FacetError::NotPackingRow { j });
    }
    let fail = |reason: String| FacetError::CertificateFailed { j, reason };
    let points = certificate_points(u, gp, j);
    if points.len() != n || certificate_point_count(gp, j) != n {
        return Err(fail(format!("{} points for dimension {n}", points.len())));
    }
    for p in &points {
        let in_box = p.x.iter().zip(u).all(|(x, ui)| !x.is_negative() && x <= ui);
        if !in_box || !lex_le(&p.x, gp.theta()) || vk.instance().weight_of(&p.x) > *vk.capacity() {
            return Err(fail(format!("point {:?} is not in K", p.x)));
        }
        if !row.is_tight(&p.x) {
            return Err(fail(format!("point {:?} is not tight", p.x)));
        }
    }
    let xs: Vec<Vec<BigInt>> = points.iter().map(|p| p.x.clone()).collect();
    let affine_rank = affine_dim(&xs).unwrap_or(0);
    if affine_rank + 1 != n {
        return Err(fail(format!(
            "affine rank {affine_rank}, expected {}",
            n - 1
        )));
    }
    Ok(FacetCertificate {
        j,
        points,
        affine_rank,
    })
}

/// Hull of `{x in K : x >= l}`.
pub fn hull_lower_bounded(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    l: &[BigInt],
) -> Result<HPolytope, FacetError> {
    let n = vk.n();
    let u = vk.bounds();
    if l.len() != n {
        return Err(InstanceError::LengthMismatch {
            left: l.len(),
            right: n,
        }
        .into());
    }
    if let Some(index) = l
        .iter()
        .zip(u)
        .position(|(li, ui)| li.is_negative() || li > ui)
    {
        return Err(InstanceError::OutOfBox { index }.into());
    }
    let rest = vk.capacity() - dot(vk.weights(), l);
    if rest.is_negative() {
        return Err(FacetError::InfeasibleShift);
    }
    if l.iter().zip(gp.theta()).all(|(li, ti)| li <= ti) {
        let mut poly = hull_le(vk, gp);
        for r in poly.ineqs.iter_mut() {
            if let RowTag::BoundLower(i) = r.tag {
                r.rhs = l[i].clone();
            }
        }
        return Ok(poly);
    }
    Ok(hull_lower_bounded_shift(vk, l, &rest)?)
}

/// The shift route `y = x - l`, valid for every admissible `l`.
pub fn hull_lower_bounded_shift(
    vk: &ValidatedKnapsack,
    l: &[BigInt],
    rest: &BigInt,
) -> Result<HPolytope, FacetError> {
    let shrunk: Vec<BigInt> = vk.bounds().iter().zip(l).map(|(ui, li)| ui - li).collect();
    let theta = greedy_vector(vk.weights(), &shrunk, rest)?;
    let shifted = packing_system(&shrunk, &theta);
    let ineqs = shifted.ineqs.iter().map(|r| r.shifted(l)).collect();
    Ok(HPolytope {
        dim: shifted.dim,
        ineqs,
    })
}
