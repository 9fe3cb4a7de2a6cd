//! Knapsack instances, validation of the superincreasing property,
//! reverse lexicographic comparison and lex-based membership.
//!
//! Coordinates are stored 0-based. Error messages and rendered output use
//! 1-based positions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{dot, int_str, int_vec_str};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance has no variables")]
    Empty,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("entry {} of {field} must be positive", .index + 1)]
    NonpositiveEntry { field: &'static str, index: usize },
    #[error("capacity must be positive")]
    NonpositiveCapacity,
    #[error("capacity is below the weight of variable(s) {}", one_based(.indices))]
    InfeasibleBound { indices: Vec<usize> },
    #[error("operation requires a {expected}-type knapsack")]
    WrongSense { expected: Sense },
    #[error("weights are not superincreasing: prefix through {} exceeds weight {}", .index + 1, .index + 2)]
    NotSuperincreasing { index: usize },
    #[error("demand exceeds the largest attainable weight")]
    InfeasibleDemand,
    #[error("coordinate {} lies outside the box", .index + 1)]
    OutOfBox { index: usize },
    #[error("instance JSON: {0}")]
    Json(String),
}

impl InstanceError {
    /// Stable machine-readable failure code.
    pub fn code(&self) -> &'static str {
        match self {
            InstanceError::Empty => "empty",
            InstanceError::LengthMismatch { .. } => "length_mismatch",
            InstanceError::NonpositiveEntry { .. } | InstanceError::NonpositiveCapacity => {
                "nonpositive"
            }
            InstanceError::InfeasibleBound { .. } => "infeasible_bound",
            InstanceError::WrongSense { .. } => "wrong_sense",
            InstanceError::NotSuperincreasing { .. } => "not_superincreasing",
            InstanceError::InfeasibleDemand => "infeasible",
            InstanceError::OutOfBox { .. } => "out_of_box",
            InstanceError::Json(_) => "parse",
        }
    }
}

fn one_based(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    parts.join(", ")
}

/// Bounded integer knapsack `{x in [0,u] ∩ Z^n : a·x <= b}` (or `>=` for `Ge`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    a: Vec<BigInt>,
    u: Vec<BigInt>,
    b: BigInt,
    sense: Sense,
}

impl KnapsackInstance {
    pub fn new(
        a: Vec<BigInt>,
        u: Vec<BigInt>,
        b: BigInt,
        sense: Sense,
    ) -> Result<Self, InstanceError> {
        if a.is_empty() {
            return Err(InstanceError::Empty);
        }
        if a.len() != u.len() {
            return Err(InstanceError::LengthMismatch {
                left: a.len(),
                right: u.len(),
            });
        }
        if let Some(index) = a.iter().position(|v| !v.is_positive()) {
            return Err(InstanceError::NonpositiveEntry { field: "a", index });
        }
        if let Some(index) = u.iter().position(|v| !v.is_positive()) {
            return Err(InstanceError::NonpositiveEntry { field: "u", index });
        }
        if !b.is_positive() {
            return Err(InstanceError::NonpositiveCapacity);
        }
        Ok(Self { a, u, b, sense })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(a: &[i64], u: &[i64], b: i64, sense: Sense) -> Result<Self, InstanceError> {
        Self::new(
            a.iter().map(|&v| BigInt::from(v)).collect(),
            u.iter().map(|&v| BigInt::from(v)).collect(),
            BigInt::from(b),
            sense,
        )
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.a
    }

    pub fn bounds(&self) -> &[BigInt] {
        &self.u
    }

    pub fn capacity(&self) -> &BigInt {
        &self.b
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// `a·x`
    pub fn weight_of(&self, x: &[BigInt]) -> BigInt {
        dot(&self.a, x)
    }

    pub fn in_box(&self, x: &[BigInt]) -> Result<(), InstanceError> {
        if x.len() != self.n() {
            return Err(InstanceError::LengthMismatch {
                left: x.len(),
                right: self.n(),
            });
        }
        match x
            .iter()
            .zip(&self.u)
            .position(|(xi, ui)| xi.is_negative() || xi > ui)
        {
            Some(index) => Err(InstanceError::OutOfBox { index }),
            None => Ok(()),
        }
    }

    /// Direct feasibility test against the defining inequality.
    pub fn satisfies(&self, x: &[BigInt]) -> bool {
        if self.in_box(x).is_err() {
            return false;
        }
        let w = self.weight_of(x);
        match self.sense {
            Sense::Le => w <= self.b,
            Sense::Ge => w >= self.b,
        }
    }

    pub fn with_bounds(&self, u: Vec<BigInt>) -> Result<Self, InstanceError> {
        Self::new(self.a.clone(), u, self.b.clone(), self.sense)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceJson::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        Self::try_from(raw)
    }
}

/// Wire form: `{"n": int, "a": [str], "u": [str], "b": str, "sense": "le"|"ge"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    #[serde(with = "int_vec_str")]
    pub a: Vec<BigInt>,
    #[serde(with = "int_vec_str")]
    pub u: Vec<BigInt>,
    #[serde(with = "int_str")]
    pub b: BigInt,
    pub sense: Sense,
}

impl From<&KnapsackInstance> for InstanceJson {
    fn from(inst: &KnapsackInstance) -> Self {
        Self {
            n: inst.n(),
            a: inst.a.clone(),
            u: inst.u.clone(),
            b: inst.b.clone(),
            sense: inst.sense,
        }
    }
}

impl TryFrom<InstanceJson> for KnapsackInstance {
    type Error = InstanceError;

    fn try_from(raw: InstanceJson) -> Result<Self, InstanceError> {
        if raw.n != raw.a.len() {
            return Err(InstanceError::LengthMismatch {
                left: raw.n,
                right: raw.a.len(),
            });
        }
        KnapsackInstance::new(raw.a, raw.u, raw.b, raw.sense)
    }
}

impl Serialize for KnapsackInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstanceJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for KnapsackInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = InstanceJson::deserialize(d)?;
        KnapsackInstance::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperincreasingCheck {
    pub holds: bool,
    /// Smallest `i` (0-based) with `sum_{k<=i} a_k u_k > a_{i+1}`.
    pub first_violation: Option<usize>,
}

/// Checks `sum_{k<=i} a_k u_k <= a_{i+1}` for every `i`.
pub fn is_superincreasing(
    a: &[BigInt],
    u: &[BigInt],
) -> Result<SuperincreasingCheck, InstanceError> {
    if a.is_empty() {
        return Err(InstanceError::Empty);
    }
    if a.len() != u.len() {
        return Err(InstanceError::LengthMismatch {
            left: a.len(),
            right: u.len(),
        });
    }
    if let Some(index) = a.iter().position(|v| !v.is_positive()) {
        return Err(InstanceError::NonpositiveEntry { field: "a", index });
    }
    if let Some(index) = u.iter().position(|v| !v.is_positive()) {
        return Err(InstanceError::NonpositiveEntry { field: "u", index });
    }
    let mut prefix = BigInt::zero();
    for i in 0..a.len() - 1 {
        prefix += &a[i] * &u[i];
        if prefix > a[i + 1] {
            return Ok(SuperincreasingCheck {
                holds: false,
                first_violation: Some(i),
            });
        }
    }
    Ok(SuperincreasingCheck {
        holds: true,
        first_violation: None,
    })
}

/// Outcome of a reverse lexicographic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexOrdering {
    pub result: Ordering,
    /// Highest index where the vectors differ; `None` when equal.
    pub pivot: Option<usize>,
}

/// Compares `x` and `y` at their highest differing coordinate.
pub fn lex_cmp<T: Ord>(x: &[T], y: &[T]) -> Result<LexOrdering, InstanceError> {
    if x.len() != y.len() {
        return Err(InstanceError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(lex_cmp_unchecked(x, y))
}

pub(crate) fn lex_cmp_unchecked<T: Ord>(x: &[T], y: &[T]) -> LexOrdering {
    for s in (0..x.len()).rev() {
        match x[s].cmp(&y[s]) {
            Ordering::Equal => continue,
            result => {
                return LexOrdering {
                    result,
                    pivot: Some(s),
                }
            }
        }
    }
    LexOrdering {
        result: Ordering::Equal,
        pivot: None,
    }
}

/// `x ⪯ y`
pub fn lex_le<T: Ord>(x: &[T], y: &[T]) -> bool {
    lex_cmp_unchecked(x, y).result != Ordering::Greater
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tightened {
    pub instance: KnapsackInstance,
    pub changed: bool,
}

/// `u_i <- min(u_i, floor(b / a_i))`. Fails when some variable would be forced to zero.
pub fn tighten_bounds(inst: &KnapsackInstance) -> Result<Tightened, InstanceError> {
    if inst.sense != Sense::Le {
        return Err(InstanceError::WrongSense {
            expected: Sense::Le,
        });
    }
    let mut forced = Vec::new();
    let mut changed = false;
    let mut u = Vec::with_capacity(inst.n());
    for (i, (ai, ui)) in inst.a.iter().zip(&inst.u).enumerate() {
        let cap = inst.b.div_floor(ai);
        if cap.is_zero() {
            forced.push(i);
        }
        if &cap < ui {
            changed = true;
            u.push(cap);
        } else {
            u.push(ui.clone());
        }
    }
    if !forced.is_empty() {
        return Err(InstanceError::InfeasibleBound { indices: forced });
    }
    Ok(Tightened {
        instance: inst.with_bounds(u)?,
        changed,
    })
}

/// An instance that passed the validation pipeline
/// (positivity, tightening, superincreasing, nontriviality).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedKnapsack {
    inst: KnapsackInstance,
    original_bounds: Vec<BigInt>,
    tightened: bool,
    nontrivial: bool,
}

impl ValidatedKnapsack {
    pub fn instance(&self) -> &KnapsackInstance {
        &self.inst
    }

    pub fn superincreasing_certified(&self) -> bool {
        true
    }

    /// `false` when the whole box is feasible (`a·u <= b` for `Le`).
    pub fn nontrivial(&self) -> bool {
        self.nontrivial
    }

    /// Whether tightening lowered any bound.
    pub fn tightened(&self) -> bool {
        self.tightened
    }

    pub fn original_bounds(&self) -> &[BigInt] {
        &self.original_bounds
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.inst.a
    }

    pub fn bounds(&self) -> &[BigInt] {
        &self.inst.u
    }

    pub fn capacity(&self) -> &BigInt {
        &self.inst.b
    }

    pub fn sense(&self) -> Sense {
        self.inst.sense
    }
}

/// Runs the validation pipeline. `Le` instances are tightened first and then
/// re-checked; `Ge` instances must be feasible (`w·u >= d`).
pub fn validate(inst: &KnapsackInstance) -> Result<ValidatedKnapsack, InstanceError> {
    let original_bounds = inst.u.clone();
    match inst.sense {
        Sense::Le => {
            let Tightened { instance, changed } = tighten_bounds(inst)?;
            let check = is_superincreasing(&instance.a, &instance.u)?;
            if let Some(index) = check.first_violation {
                return Err(InstanceError::NotSuperincreasing { index });
            }
            let nontrivial = instance.weight_of(&instance.u) > instance.b;
            Ok(ValidatedKnapsack {
                inst: instance,
                original_bounds,
                tightened: changed,
                nontrivial,
            })
        }
        Sense::Ge => {
            let check = is_superincreasing(&inst.a, &inst.u)?;
            if let Some(index) = check.first_violation {
                return Err(InstanceError::NotSuperincreasing { index });
            }
            let top = inst.weight_of(&inst.u);
            if top < inst.b {
                return Err(InstanceError::InfeasibleDemand);
            }
            // d >= 1 always excludes the origin
            let nontrivial = inst.b.is_positive();
            Ok(ValidatedKnapsack {
                inst: inst.clone(),
                original_bounds,
                tightened: false,
                nontrivial,
            })
        }
    }
}

/// Lex-based membership: for a validated `Le` knapsack with greedy
/// solution `theta`, `x` is feasible iff `x ⪯ theta`.
pub fn membership(
    vk: &ValidatedKnapsack,
    theta: &[BigInt],
    x: &[BigInt],
) -> Result<bool, InstanceError> {
    if vk.sense() != Sense::Le {
        return Err(InstanceError::WrongSense {
            expected: Sense::Le,
        });
    }
    vk.inst.in_box(x)?;
    let ord = lex_cmp(x, theta)?;
    let member = ord.result != Ordering::Greater;
    debug_assert_eq!(
        member,
        vk.inst.weight_of(x) <= vk.inst.b,
        "lex membership disagrees with a·x <= b"
    );
    Ok(member)
}

/// `sum_i a_i u_i` over the box corner.
pub fn box_weight(inst: &KnapsackInstance) -> BigInt {
    inst.weight_of(&inst.u)
}

pub(crate) fn count_box_points(u: &[BigInt]) -> BigInt {
    u.iter().fold(BigInt::one(), |acc, ui| acc * (ui + 1u8))
}
