//! Greedy solution, maximal capacity, support profile, uniqueness of the
//! maximal packing and the minimal packing of `>=`-type knapsacks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::instance::{is_superincreasing, InstanceError, Sense, ValidatedKnapsack};
use crate::num::{dot, int_vec_str};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreedyError {
    #[error("weight {} is zero", .index + 1)]
    ZeroWeight { index: usize },
    #[error("demand {demand} exceeds the box weight {max}")]
    Infeasible { demand: BigInt, max: BigInt },
    #[error("demand must be at least 1")]
    NonpositiveDemand,
    #[error("capacity must be nonnegative")]
    NegativeCapacity,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Greedy solution `theta` with its support `I = {i : theta_i >= 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyProfile {
    #[serde(with = "int_vec_str")]
    theta: Vec<BigInt>,
    support: Vec<usize>,
}

impl GreedyProfile {
    /// Profile of an arbitrary nonnegative vector (the lex-upper end of a box set).
    pub fn from_theta(theta: Vec<BigInt>) -> Self {
        let support = theta
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_positive())
            .map(|(i, _)| i)
            .collect();
        Self { theta, support }
    }

    pub fn theta(&self) -> &[BigInt] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// Support indices, strictly increasing (0-based).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Number of support indices below the last one.
    pub fn r(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    pub fn in_support(&self, j: usize) -> bool {
        self.support.binary_search(&j).is_ok()
    }

    /// `max{i in I : i < j}`
    pub fn prev(&self, j: usize) -> Option<usize> {
        let pos = self.support.partition_point(|&i| i < j);
        pos.checked_sub(1).map(|p| self.support[p])
    }

    /// `min{i in I : i > j}`
    pub fn next(&self, j: usize) -> Option<usize> {
        let pos = self.support.partition_point(|&i| i <= j);
        self.support.get(pos).copied()
    }

    /// `I_j = {i in I : i > j}`
    pub fn support_above(&self, j: usize) -> &[usize] {
        let pos = self.support.partition_point(|&i| i <= j);
        &self.support[pos..]
    }

    /// `I_j^- = {i in I : i < j}`
    pub fn support_below(&self, j: usize) -> &[usize] {
        let pos = self.support.partition_point(|&i| i < j);
        &self.support[..pos]
    }
}

/// Backward floor recursion `theta_i = min(u_i, floor((b - sum_{k>i} a_k theta_k) / a_i))`.
/// Defined for any positive weights; it is the lex-largest feasible point.
pub fn greedy_vector(a: &[BigInt], u: &[BigInt], b: &BigInt) -> Result<Vec<BigInt>, GreedyError> {
    if a.len() != u.len() {
        return Err(InstanceError::LengthMismatch {
            left: a.len(),
            right: u.len(),
        }
        .into());
    }
    if let Some(index) = a.iter().position(|w| w.is_zero()) {
        return Err(GreedyError::ZeroWeight { index });
    }
    if let Some(index) = a.iter().position(|w| w.is_negative()) {
        return Err(InstanceError::NonpositiveEntry { field: "a", index }.into());
    }
    if b.is_negative() {
        return Err(GreedyError::NegativeCapacity);
    }
    let mut theta = vec![BigInt::zero(); a.len()];
    let mut rest = b.clone();
    for i in (0..a.len()).rev() {
        let fit = rest.div_floor(&a[i]);
        let t = if fit < u[i] { fit } else { u[i].clone() };
        rest -= &a[i] * &t;
        theta[i] = t;
    }
    Ok(theta)
}

pub fn greedy_solution(vk: &ValidatedKnapsack) -> Result<GreedyProfile, GreedyError> {
    if vk.sense() != Sense::Le {
        return Err(InstanceError::WrongSense {
            expected: Sense::Le,
        }
        .into());
    }
    let theta = greedy_vector(vk.weights(), vk.bounds(), vk.capacity())?;
    Ok(GreedyProfile::from_theta(theta))
}

/// `g(a,u,b) = a·theta`, the maximum attainable capacity.
pub fn max_capacity(vk: &ValidatedKnapsack) -> Result<BigInt, GreedyError> {
    let gp = greedy_solution(vk)?;
    Ok(dot(vk.weights(), gp.theta()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingReport {
    #[serde(with = "crate::num::int_str")]
    pub capacity_used: BigInt,
    pub unique: bool,
    /// A second maximal packing, built for the smallest witnessing index.
    pub alternate: Option<AlternatePacking>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternatePacking {
    pub witness: usize,
    #[serde(with = "int_vec_str")]
    pub point: Vec<BigInt>,
}

/// `theta` is the unique maximal packing unless some `j` has
/// `a_j = sum_{i<j} a_i u_i`, `theta_j > 0` and `theta_i = 0` for all `i < j`.
pub fn uniqueness(vk: &ValidatedKnapsack, gp: &GreedyProfile) -> PackingReport {
    let a = vk.weights();
    let u = vk.bounds();
    let theta = gp.theta();
    let capacity_used = dot(a, theta);
    let mut prefix = BigInt::zero();
    let mut zero_below = true;
    for j in 0..a.len() {
        if j > 0 && a[j] == prefix && theta[j].is_positive() && zero_below {
            let mut point = Vec::with_capacity(a.len());
            point.extend_from_slice(&u[..j]);
            point.push(&theta[j] - 1u8);
            point.extend_from_slice(&theta[j + 1..]);
            debug_assert_eq!(dot(a, &point), capacity_used);
            return PackingReport {
                capacity_used,
                unique: false,
                alternate: Some(AlternatePacking { witness: j, point }),
            };
        }
        prefix += &a[j] * &u[j];
        zero_below &= theta[j].is_zero();
    }
    PackingReport {
        capacity_used,
        unique: true,
        alternate: None,
    }
}

/// Complement recursion
/// `gamma_i = u_i - min(u_i, floor((w·u - d - sum_{k>i} w_k (u_k - gamma_k)) / w_i))`
/// without sign or superincreasing checks; `d <= 0` yields the origin.
pub(crate) fn complement_greedy(w: &[BigInt], u: &[BigInt], d: &BigInt) -> Vec<BigInt> {
    let slack = dot(w, u) - d;
    let mut gamma = vec![BigInt::zero(); w.len()];
    let mut used = BigInt::zero();
    for i in (0..w.len()).rev() {
        let fit = (&slack - &used).div_floor(&w[i]);
        let drop = if fit < u[i] { fit } else { u[i].clone() };
        used += &w[i] * &drop;
        gamma[i] = &u[i] - drop;
    }
    gamma
}

/// Lex-smallest point of `{x in [0,u] : w·x >= d}` for superincreasing `(w,u)`.
pub fn minimal_packing(w: &[BigInt], u: &[BigInt], d: &BigInt) -> Result<Vec<BigInt>, GreedyError> {
    if w.len() != u.len() {
        return Err(InstanceError::LengthMismatch {
            left: w.len(),
            right: u.len(),
        }
        .into());
    }
    if let Some(index) = w.iter().position(|x| x.is_zero()) {
        return Err(GreedyError::ZeroWeight { index });
    }
    let check = is_superincreasing(w, u)?;
    if let Some(index) = check.first_violation {
        return Err(InstanceError::NotSuperincreasing { index }.into());
    }
    if d < &BigInt::one() {
        return Err(GreedyError::NonpositiveDemand);
    }
    let max = dot(w, u);
    if d > &max {
        return Err(GreedyError::Infeasible {
            demand: d.clone(),
            max,
        });
    }
    Ok(complement_greedy(w, u, d))
}

/// Minimal packing of a validated `>=` knapsack.
pub fn minimal_packing_of(vk: &ValidatedKnapsack) -> Result<Vec<BigInt>, GreedyError> {
    if vk.sense() != Sense::Ge {
        return Err(InstanceError::WrongSense {
            expected: Sense::Ge,
        }
        .into());
    }
    minimal_packing(vk.weights(), vk.bounds(), vk.capacity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate, KnapsackInstance};

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn example(b: i64) -> ValidatedKnapsack {
        validate(
            &KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], b, Sense::Le)
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(
            greedy_solution(&example(841)).unwrap().theta(),
            v(&[0, 3, 1, 1, 2]).as_slice()
        );
        assert_eq!(
            greedy_solution(&example(863)).unwrap().theta(),
            v(&[0, 0, 2, 1, 2]).as_slice()
        );
        let single =
            validate(&KnapsackInstance::from_i64(&[1], &[5], 3, Sense::Le).unwrap()).unwrap();
        assert_eq!(
            greedy_solution(&single).unwrap().theta(),
            v(&[3]).as_slice()
        );
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(max_capacity(&example(841)).unwrap(), BigInt::from(840));
        assert_eq!(max_capacity(&example(863)).unwrap(), BigInt::from(862));
        // the greedy vector of a non-superincreasing knapsack falls short of the optimum
        let greedy = greedy_vector(
            &v(&[2, 8, 40, 150, 310]),
            &v(&[1, 5, 4, 1, 2]),
            &BigInt::from(825),
        )
        .unwrap();
        assert_eq!(greedy, v(&[1, 1, 1, 1, 2]));
        assert_eq!(dot(&v(&[2, 8, 40, 150, 310]), &greedy), BigInt::from(820));
    }

    #[test]
    fn uniqueness_examples() {
        let vk = example(841);
        let report = uniqueness(&vk, &greedy_solution(&vk).unwrap());
        assert!(report.unique);
        assert_eq!(report.capacity_used, BigInt::from(840));

        let vk = example(863);
        let report = uniqueness(&vk, &greedy_solution(&vk).unwrap());
        assert!(!report.unique);
        let alt = report.alternate.unwrap();
        assert_eq!(alt.witness, 2);
        assert_eq!(alt.point, v(&[3, 5, 1, 1, 2]));

        let vk = validate(&KnapsackInstance::from_i64(&[1, 10], &[3, 2], 21, Sense::Le).unwrap())
            .unwrap();
        assert!(uniqueness(&vk, &greedy_solution(&vk).unwrap()).unique);
    }

    #[test]
    fn profile_maps() {
        let gp = GreedyProfile::from_theta(v(&[0, 3, 1, 1, 2]));
        assert_eq!(gp.support(), &[1, 2, 3, 4]);
        assert_eq!(gp.r(), 3);
        assert_eq!(gp.prev(0), None);
        assert_eq!(gp.prev(3), Some(2));
        assert_eq!(gp.next(0), Some(1));
        assert_eq!(gp.next(4), None);
        assert_eq!(gp.support_above(1), &[2, 3, 4]);
        assert_eq!(gp.support_below(2), &[1]);
    }

    #[test]
    fn minimal_packing_edges() {
        let w = v(&[2, 8, 46, 150, 310]);
        let u = v(&[3, 5, 2, 1, 2]);
        let top = dot(&w, &u);
        assert_eq!(minimal_packing(&w, &u, &top).unwrap(), u);
        assert!(matches!(
            minimal_packing(&w, &u, &(top + 1)),
            Err(GreedyError::Infeasible { .. })
        ));
        assert_eq!(
            minimal_packing(&v(&[1, 0]), &v(&[1, 1]), &BigInt::from(1)),
            Err(GreedyError::ZeroWeight { index: 1 })
        );
        assert_eq!(
            minimal_packing(&w, &u, &BigInt::zero()),
            Err(GreedyError::NonpositiveDemand)
        );
    }

    #[test]
    fn wrong_sense_refused() {
        let ge =
            validate(&KnapsackInstance::from_i64(&[1, 2], &[1, 1], 2, Sense::Ge).unwrap()).unwrap();
        assert!(greedy_solution(&ge).is_err());
        assert_eq!(minimal_packing_of(&ge).unwrap(), v(&[0, 1]));
    }
}
