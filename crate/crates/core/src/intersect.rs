//! Convex hull of two-sided lexicographic sets `{x in [0,u] : gamma ⪯ x ⪯ theta}`
//! arising from one `<=` and one `>=` superincreasing knapsack over a common box,
//! together with the disjunctive extended formulation and its lift.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::facets::{big_phi, hull_ge, packing_system, phi_coeff, FacetError};
use crate::greedy::{complement_greedy, greedy_solution, GreedyError, GreedyProfile};
use crate::instance::{
    is_superincreasing, lex_cmp, validate, InstanceError, InstanceJson, KnapsackInstance, Sense,
    ValidatedKnapsack,
};
use crate::num::{dot, fmt_int_vec, int_vec_str, to_rat};
use crate::polytope::{HPolytope, LinearInequality, LinearSystem, RationalRow, Relation, RowTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectError {
    #[error("zero weights (le: {le:?}, ge: {ge:?}); only a relaxation is available")]
    ZeroCoefficientRegime {
        le: Vec<usize>,
        ge: Vec<usize>,
        relaxation_only: bool,
    },
    #[error("the two knapsacks have no common point")]
    EmptyIntersection,
    #[error("the two knapsacks use different boxes")]
    DifferentBoxes,
    #[error("operation needs the {expected} case, instance is {found}")]
    WrongCase { expected: GapCase, found: GapCase },
    #[error("point is not in the intersection hull")]
    NotInHull,
    #[error("x_n must equal theta_n - eps with 0 < eps < 1, got eps = {eps}")]
    EpsilonOutOfRange { eps: String },
    #[error("lifted point violates `{row}`")]
    LiftCheckFailed { row: String },
    #[error("fixture hull has dimension {found}, expected {expected}")]
    FixtureDimension { expected: usize, found: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error(transparent)]
    Facet(#[from] FacetError),
}

/// Two-sided input as read from disk. Weights may be zero here; the
/// instance types proper forbid that.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSidedInput {
    pub le: InstanceJson,
    pub ge: InstanceJson,
    /// Externally supplied hull of the `>=` side, used only for relaxations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ge_hull: Option<HPolytope>,
}

impl TwoSidedInput {
    pub fn from_instances(le: &KnapsackInstance, ge: &KnapsackInstance) -> Self {
        Self {
            le: le.into(),
            ge: ge.into(),
            ge_hull: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IntersectError> {
        serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()).into())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("input serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapCase {
    /// Every coordinate was fixed during preprocessing.
    SinglePoint,
    GapOne,
    GapAtLeastTwo,
}

impl std::fmt::Display for GapCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GapCase::SinglePoint => "single-point",
            GapCase::GapOne => "gap-one",
            GapCase::GapAtLeastTwo => "gap-at-least-two",
        })
    }
}

/// A `<=` and a `>=` knapsack with positive weights over a common box,
/// after the full-dimensionality preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedInstance {
    le: ValidatedKnapsack,
    w: Vec<BigInt>,
    d: BigInt,
    theta: Vec<BigInt>,
    gamma: Vec<BigInt>,
    /// Coordinates fixed to `theta`, from the top down.
    fixed_suffix: Vec<usize>,
    /// Box of the free prefix; its last entry is lowered to `theta`.
    free_u: Vec<BigInt>,
    free_d: BigInt,
    free_gamma: Vec<BigInt>,
}

fn zero_positions(a: &[BigInt]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, v)| v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Lex-smallest point of `{x in [0,u] : w·x >= d}`; the origin when `d <= 0`.
fn gamma_on(w: &[BigInt], u: &[BigInt], d: &BigInt) -> Vec<BigInt> {
    if d.is_positive() {
        complement_greedy(w, u, d)
    } else {
        vec![BigInt::zero(); w.len()]
    }
}

pub fn build_two_sided(
    le: &InstanceJson,
    ge: &InstanceJson,
) -> Result<TwoSidedInstance, IntersectError> {
    if le.sense != Sense::Le {
        return Err(InstanceError::WrongSense {
            expected: Sense::Le,
        }
        .into());
    }
    if ge.sense != Sense::Ge {
        return Err(InstanceError::WrongSense {
            expected: Sense::Ge,
        }
        .into());
    }
    if le.a.len() != ge.a.len() || le.u != ge.u {
        return Err(IntersectError::DifferentBoxes);
    }
    let (zl, zg) = (zero_positions(&le.a), zero_positions(&ge.a));
    if !zl.is_empty() || !zg.is_empty() {
        return Err(IntersectError::ZeroCoefficientRegime {
            le: zl,
            ge: zg,
            relaxation_only: true,
        });
    }
    let vk = validate(&KnapsackInstance::try_from(le.clone())?)?;
    let gp = greedy_solution(&vk)?;
    let theta = gp.theta().to_vec();
    // tightening the <= side only removes points outside it
    let u = vk.bounds().to_vec();
    let w = ge.a.clone();
    let d = ge.b.clone();
    KnapsackInstance::new(w.clone(), u.clone(), d.clone(), Sense::Ge)?;
    if d > dot(&w, &u) {
        return Err(IntersectError::EmptyIntersection);
    }
    if let Some(index) = is_superincreasing(&w, &u)?.first_violation {
        return Err(InstanceError::NotSuperincreasing { index }.into());
    }
    let gamma = complement_greedy(&w, &u, &d);
    if lex_cmp(&gamma, &theta)?.result == std::cmp::Ordering::Greater {
        return Err(IntersectError::EmptyIntersection);
    }

    let mut fixed_suffix = Vec::new();
    let mut m = u.len();
    let mut free_u = u.clone();
    let mut free_d = d.clone();
    let mut free_gamma = Vec::new();
    while m > 0 {
        let k = m - 1;
        // x_k <= theta_k holds on the lex set
        free_u[k] = theta[k].clone();
        let g = gamma_on(&w[..m], &free_u[..m], &free_d);
        if g[k] == theta[k] {
            fixed_suffix.push(k);
            free_d -= &w[k] * &theta[k];
            m -= 1;
            continue;
        }
        free_gamma = g;
        break;
    }
    free_u.truncate(m);
    Ok(TwoSidedInstance {
        le: vk,
        w,
        d,
        theta,
        gamma,
        fixed_suffix,
        free_u,
        free_d,
        free_gamma,
    })
}

/// Convenience wrapper over validated-shape instances.
pub fn build_from_instances(
    le: &KnapsackInstance,
    ge: &KnapsackInstance,
) -> Result<TwoSidedInstance, IntersectError> {
    build_two_sided(&le.into(), &ge.into())
}

impl TwoSidedInstance {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// Number of free coordinates (a prefix).
    pub fn free(&self) -> usize {
        self.free_u.len()
    }

    pub fn le(&self) -> &ValidatedKnapsack {
        &self.le
    }

    pub fn ge_weights(&self) -> &[BigInt] {
        &self.w
    }

    pub fn demand(&self) -> &BigInt {
        &self.d
    }

    /// Common box (bounds of the tightened `<=` side).
    pub fn bounds(&self) -> &[BigInt] {
        self.le.bounds()
    }

    pub fn theta(&self) -> &[BigInt] {
        &self.theta
    }

    pub fn gamma(&self) -> &[BigInt] {
        &self.gamma
    }

    pub fn fixed_suffix(&self) -> &[usize] {
        &self.fixed_suffix
    }

    pub fn free_bounds(&self) -> &[BigInt] {
        &self.free_u
    }

    pub fn free_gamma(&self) -> &[BigInt] {
        &self.free_gamma
    }

    pub fn free_demand(&self) -> &BigInt {
        &self.free_d
    }

    fn free_profile(&self) -> GreedyProfile {
        GreedyProfile::from_theta(self.theta[..self.free()].to_vec())
    }

    /// Whether `x` lies in the two-sided set.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.le.instance().satisfies(x) && x.len() == self.w.len() && dot(&self.w, x) >= self.d
    }

    pub fn summary(&self) -> TwoSidedSummary {
        TwoSidedSummary {
            theta: self.theta.clone(),
            gamma: self.gamma.clone(),
            fixed_suffix: self.fixed_suffix.iter().map(|k| k + 1).collect(),
            free: self.free(),
            case: case_classify(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoSidedSummary {
    #[serde(with = "int_vec_str")]
    pub theta: Vec<BigInt>,
    #[serde(with = "int_vec_str")]
    pub gamma: Vec<BigInt>,
    /// 1-based.
    pub fixed_suffix: Vec<usize>,
    pub free: usize,
    pub case: GapCase,
}

pub fn case_classify(ts: &TwoSidedInstance) -> GapCase {
    let m = ts.free();
    if m == 0 {
        return GapCase::SinglePoint;
    }
    let t = m - 1;
    if ts.free_gamma[t] == &ts.theta[t] - 1u8 {
        GapCase::GapOne
    } else {
        GapCase::GapAtLeastTwo
    }
}

/// `>=` hull over the free box; the whole box when the residual demand is
/// not positive.
fn free_ge_hull(ts: &TwoSidedInstance) -> Result<HPolytope, IntersectError> {
    let m = ts.free();
    if ts.free_d.is_positive() {
        return Ok(hull_ge(&ts.w[..m], &ts.free_u, &ts.free_d)?);
    }
    let mut poly = HPolytope::new(m);
    for i in 0..m {
        poly.push(LinearInequality::upper_bound(m, i, ts.free_u[i].clone()));
        poly.push(LinearInequality::lower_bound(m, i, BigInt::zero()));
    }
    Ok(poly)
}

fn tag_rank(tag: &RowTag) -> u8 {
    match tag {
        RowTag::Packing(_) => 0,
        RowTag::GePacking(_) => 1,
        RowTag::Capacity | RowTag::Other(_) => 2,
        RowTag::BoundLower(_) => 3,
        RowTag::BoundUpper(_) => 4,
        RowTag::Fixed(_) => 5,
    }
}

/// Packing rows, then `>=` packing rows, then bounds.
fn order_rows(poly: &mut HPolytope) {
    poly.ineqs.sort_by_key(|r| tag_rank(&r.tag));
}

fn push_fixed(poly: &mut HPolytope, k: usize, value: &BigInt) {
    let n = poly.dim;
    let mut coeffs = vec![BigInt::zero(); n];
    coeffs[k] = BigInt::one();
    poly.push(LinearInequality::new(
        coeffs.clone(),
        value.clone(),
        Sense::Le,
        RowTag::Fixed(k),
    ));
    poly.push(LinearInequality::new(
        coeffs,
        value.clone(),
        Sense::Ge,
        RowTag::Fixed(k),
    ));
}

/// `conv{gamma ⪯ x ⪯ theta}` as the union of both hull systems on the free
/// coordinates, with the fixed suffix re-attached as equalities.
pub fn intersection_hull(ts: &TwoSidedInstance) -> Result<HPolytope, IntersectError> {
    let n = ts.n();
    let m = ts.free();
    let mut out = HPolytope::new(n);
    if m > 0 {
        let mut free = packing_system(&ts.free_u, &ts.theta[..m]);
        free.ineqs.extend(free_ge_hull(ts)?.ineqs);
        free.dedup();
        order_rows(&mut free);
        let positions: Vec<usize> = (0..m).collect();
        out.ineqs = free
            .ineqs
            .iter()
            .map(|r| r.embedded(n, &positions))
            .collect();
    }
    for &k in ts.fixed_suffix.iter().rev() {
        push_fixed(&mut out, k, &ts.theta[k]);
    }
    Ok(out)
}

/// The `(x, y)` system whose projection is the hull in the gap-one case.
/// Variables are `x1..xn` followed by `y1..ym` over the free prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedFormulation {
    pub n: usize,
    pub free: usize,
    pub system: LinearSystem,
    /// `(j, g_j)` for `theta_j < u_j`.
    pub g: Vec<(usize, BigInt)>,
    /// `(j, h_j)` for `gamma_j >= 1`.
    pub h: Vec<(usize, BigInt)>,
}

impl ExtendedFormulation {
    pub fn contains(&self, x: &[BigRational], y: &[BigRational]) -> bool {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        self.system.contains(&p)
    }

    /// First violated row, rendered.
    pub fn violation(&self, x: &[BigRational], y: &[BigRational]) -> Option<String> {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        self.system
            .rows
            .iter()
            .find(|r| !r.satisfied_by(&p))
            .map(|r| r.render(&self.system.names))
    }

    /// Some `y` completing `x`, if any.
    pub fn projection_contains(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        crate::lp::projection_contains(self.system.dim(), &self.system.rows, x)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let pairs = |v: &[(usize, BigInt)]| -> serde_json::Value {
            v.iter()
                .map(|(j, val)| serde_json::json!({"j": j + 1, "value": val.to_string()}))
                .collect()
        };
        serde_json::json!({
            "n": self.n,
            "free": self.free,
            "g": pairs(&self.g),
            "h": pairs(&self.h),
            "system": self.system.to_json_value(),
        })
    }
}

fn q(v: &BigInt) -> BigRational {
    to_rat(v)
}

/// Index set `T = {i : gamma_i < u_i}` above `j`, excluding `last`.
fn t_tail(u: &[BigInt], gamma: &[BigInt], j: usize, last: usize) -> Vec<usize> {
    ((j + 1)..last).filter(|&i| gamma[i] < u[i]).collect()
}

/// `h_j = gamma_j + sum_{i in T_j, i < last} Phi_j(i) gamma_i`
fn h_value(u: &[BigInt], gamma: &[BigInt], j: usize, last: usize) -> BigInt {
    let mut h = gamma[j].clone();
    for i in t_tail(u, gamma, j, last) {
        h += big_phi(u, gamma, j, i) * &gamma[i];
    }
    h
}

pub fn extended_formulation(ts: &TwoSidedInstance) -> Result<ExtendedFormulation, IntersectError> {
    let found = case_classify(ts);
    if found != GapCase::GapOne {
        return Err(IntersectError::WrongCase {
            expected: GapCase::GapOne,
            found,
        });
    }
    let n = ts.n();
    let m = ts.free();
    let t = m - 1;
    let u = &ts.free_u;
    let theta = &ts.theta[..m];
    let gamma = &ts.free_gamma;
    let gp = ts.free_profile();
    let i_r = gp.prev(t);
    let th = q(&theta[t]);

    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend((1..=m).map(|i| format!("y{i}")));
    let mut sys = LinearSystem::new(names);
    let (x, y) = (|i: usize| i, |i: usize| n + i);
    let one = BigRational::one;
    // c·(x_t - y_t)/theta_t
    let lam = |c: &BigRational| [(x(t), c / &th), (y(t), -(c / &th))];

    for i in 0..m {
        sys.add(&[(x(i), one())], Relation::Ge, BigRational::zero());
        sys.add(&[(y(i), one())], Relation::Ge, BigRational::zero());
        sys.add(
            &[(y(i), one()), (x(i), -one())],
            Relation::Le,
            BigRational::zero(),
        );
    }
    sys.add(&[(x(t), one())], Relation::Ge, &th - one());
    sys.add(&[(x(t), one())], Relation::Le, th.clone());
    sys.add(
        &[(y(t), one()), (x(t), &th - one())],
        Relation::Eq,
        (&th - one()) * &th,
    );
    let first_equal = i_r.map_or(0, |r| r + 1);
    for i in first_equal..t {
        sys.add(
            &[(x(i), one()), (y(i), -one())],
            Relation::Eq,
            BigRational::zero(),
        );
    }
    for i in 0..t {
        let ui = q(&u[i]);
        let mut terms = vec![(y(i), one())];
        terms.extend(lam(&ui));
        sys.add(&terms, Relation::Le, ui.clone());
        if i_r.is_some_and(|r| i <= r) {
            let mut terms = vec![(y(i), one()), (x(i), -one())];
            terms.extend(lam(&ui));
            sys.add(&terms, Relation::Ge, BigRational::zero());
        }
    }

    let mut g = Vec::new();
    for j in 0..m {
        if theta[j] >= u[j] {
            continue;
        }
        let tail: Vec<usize> = gp
            .support_above(j)
            .iter()
            .copied()
            .filter(|&i| i != t)
            .collect();
        let mut gj = theta[j].clone();
        let mut terms = vec![(x(j), one()), (y(j), -one())];
        for &i in &tail {
            let f = phi_coeff(u, &gp, j, i)?;
            gj += &f * &theta[i];
            terms.push((x(i), q(&f)));
            terms.push((y(i), -q(&f)));
        }
        terms.extend(lam(&-q(&gj)));
        sys.add(&terms, Relation::Le, BigRational::zero());
        g.push((j, gj));
    }

    let mut h = Vec::new();
    for j in 0..m {
        if gamma[j].is_zero() {
            continue;
        }
        let hj = h_value(u, gamma, j, t);
        let mut terms = vec![(y(j), one())];
        for i in t_tail(u, gamma, j, t) {
            terms.push((y(i), q(&big_phi(u, gamma, j, i))));
        }
        terms.extend(lam(&q(&hj)));
        sys.add(&terms, Relation::Ge, q(&hj));
        h.push((j, hj));
    }

    for &k in ts.fixed_suffix.iter().rev() {
        sys.add(&[(x(k), one())], Relation::Eq, q(&ts.theta[k]));
    }
    Ok(ExtendedFormulation {
        n,
        free: m,
        system: sys,
        g,
        h,
    })
}

/// `(j, h_j, Phi_j(n))` over the free prefix for every `j` with `gamma_j >= 1`.
pub fn h_phi_pairs(ts: &TwoSidedInstance) -> Vec<(usize, BigInt, BigInt)> {
    let m = ts.free();
    if m == 0 {
        return Vec::new();
    }
    let t = m - 1;
    let (u, gamma) = (&ts.free_u, &ts.free_gamma);
    (0..m)
        .filter(|&j| !gamma[j].is_zero())
        .map(|j| (j, h_value(u, gamma, j, t), big_phi(u, gamma, j, t)))
        .collect()
}

/// Lifts a fractional hull point with `x_n = theta_n - eps` into the
/// extended formulation and checks the result.
pub fn lift_point(
    ts: &TwoSidedInstance,
    x: &[BigRational],
) -> Result<Vec<BigRational>, IntersectError> {
    let ef = extended_formulation(ts)?;
    if x.len() != ts.n() {
        return Err(InstanceError::LengthMismatch {
            left: x.len(),
            right: ts.n(),
        }
        .into());
    }
    if !intersection_hull(ts)?.contains_rat(x) {
        return Err(IntersectError::NotInHull);
    }
    let m = ts.free();
    let t = m - 1;
    let eps = q(&ts.theta[t]) - &x[t];
    if !eps.is_positive() || eps >= BigRational::one() {
        return Err(IntersectError::EpsilonOutOfRange {
            eps: crate::num::fmt_rat(&eps),
        });
    }
    let i_r = ts.free_profile().prev(t);
    let mut y = Vec::with_capacity(m);
    for i in 0..t {
        if i_r.is_some_and(|r| i <= r) {
            let cap = &eps * q(&ts.free_u[i]);
            y.push(if cap < x[i] { cap } else { x[i].clone() });
        } else {
            y.push(x[i].clone());
        }
    }
    y.push(&eps * (q(&ts.theta[t]) - BigRational::one()));
    if let Some(row) = ef.violation(x, &y) {
        return Err(IntersectError::LiftCheckFailed { row });
    }
    Ok(y)
}

/// Extended system for `conv(P1 ∪ P2)` of two bounded polyhedra over the same
/// variables: `x = x¹ + x²`, `x¹ ∈ λ P1`, `x² ∈ (1-λ) P2`, `0 <= λ <= 1`.
/// Variables are `names`, then their `¹` copies, then `lambda`.
pub fn balas_union(names: &[String], p1: &[RationalRow], p2: &[RationalRow]) -> LinearSystem {
    let k = names.len();
    let mut all: Vec<String> = names.to_vec();
    all.extend(names.iter().map(|s| format!("{s}'")));
    all.push("lambda".to_string());
    let lam = 2 * k;
    let mut sys = LinearSystem::new(all);
    for r in p1 {
        let mut terms: Vec<(usize, BigRational)> = r
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (k + i, c.clone()))
            .collect();
        terms.push((lam, -r.rhs.clone()));
        sys.add(&terms, r.relation, BigRational::zero());
    }
    for r in p2 {
        let mut terms = Vec::new();
        for (i, c) in r.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            terms.push((i, c.clone()));
            terms.push((k + i, -c.clone()));
        }
        terms.push((lam, r.rhs.clone()));
        sys.add(&terms, r.relation, r.rhs.clone());
    }
    sys.add(
        &[(lam, BigRational::one())],
        Relation::Ge,
        BigRational::zero(),
    );
    sys.add(
        &[(lam, BigRational::one())],
        Relation::Le,
        BigRational::one(),
    );
    sys
}

/// The two-branch disjunction splitting on `x_t` (last free coordinate):
/// gap one uses `{x_t = theta_t} ∪ {x_t = theta_t - 1}`, the wider gap uses
/// `{x_t >= gamma_t + 1} ∪ {x_t <= theta_t - 1}`. Each branch is intersected
/// with the hull of one side and the fixed suffix.
pub fn disjunctive_system(ts: &TwoSidedInstance) -> Result<LinearSystem, IntersectError> {
    let n = ts.n();
    let m = ts.free();
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let positions: Vec<usize> = (0..m).collect();
    let mut fixed = HPolytope::new(n);
    for &k in ts.fixed_suffix.iter().rev() {
        push_fixed(&mut fixed, k, &ts.theta[k]);
    }
    let embed = |p: &HPolytope| -> Vec<RationalRow> {
        let mut rows: Vec<RationalRow> = p
            .ineqs
            .iter()
            .map(|r| r.embedded(n, &positions).to_rational())
            .collect();
        rows.extend(fixed.to_rational_rows());
        rows
    };
    if m == 0 {
        let rows = fixed.to_rational_rows();
        return Ok(balas_union(&names, &rows, &rows));
    }
    let t = m - 1;
    let mut le = packing_system(&ts.free_u, &ts.theta[..m]);
    let mut ge = free_ge_hull(ts)?;
    let (lo, hi) = match case_classify(ts) {
        GapCase::GapOne => (ts.theta[t].clone(), ts.free_gamma[t].clone()),
        _ => (&ts.free_gamma[t] + 1u8, &ts.theta[t] - 1u8),
    };
    le.push(LinearInequality::lower_bound(m, t, lo));
    ge.push(LinearInequality::upper_bound(m, t, hi));
    Ok(balas_union(&names, &embed(&le), &embed(&ge)))
}

/// Relaxation `conv K≤ ∩ conv K≥` built side by side, each side on its
/// nonzero coordinates. Exact only when both weight vectors are positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relaxation {
    pub hull: HPolytope,
    pub exact: bool,
    pub ge_from_fixture: bool,
}

fn side_hull(raw: &InstanceJson, fixture: Option<&HPolytope>) -> Result<HPolytope, IntersectError> {
    let n = raw.a.len();
    if let Some(p) = fixture {
        if p.dim != n {
            return Err(IntersectError::FixtureDimension {
                expected: n,
                found: p.dim,
            });
        }
        return Ok(p.clone());
    }
    let support: Vec<usize> = (0..n).filter(|&i| raw.a[i].is_positive()).collect();
    let pick = |v: &[BigInt]| -> Vec<BigInt> { support.iter().map(|&i| v[i].clone()).collect() };
    let sub = KnapsackInstance::new(pick(&raw.a), pick(&raw.u), raw.b.clone(), raw.sense)?;
    let vk = validate(&sub)?;
    let local = match raw.sense {
        Sense::Le => packing_system(vk.bounds(), greedy_solution(&vk)?.theta()),
        Sense::Ge => hull_ge(vk.weights(), vk.bounds(), vk.capacity())?,
    };
    let mut poly = HPolytope::new(n);
    poly.ineqs = local
        .ineqs
        .iter()
        .map(|r| r.embedded(n, &support))
        .collect();
    Ok(poly)
}

pub fn relaxation_hull(input: &TwoSidedInput) -> Result<Relaxation, IntersectError> {
    let (le, ge) = (&input.le, &input.ge);
    if le.sense != Sense::Le {
        return Err(InstanceError::WrongSense {
            expected: Sense::Le,
        }
        .into());
    }
    if ge.sense != Sense::Ge {
        return Err(InstanceError::WrongSense {
            expected: Sense::Ge,
        }
        .into());
    }
    if le.a.len() != ge.a.len() || le.u != ge.u {
        return Err(IntersectError::DifferentBoxes);
    }
    let n = le.a.len();
    let mut hull = side_hull(le, None)?;
    hull.ineqs
        .extend(side_hull(ge, input.ge_hull.as_ref())?.ineqs);
    for i in 0..n {
        hull.push(LinearInequality::lower_bound(n, i, BigInt::zero()));
        hull.push(LinearInequality::upper_bound(n, i, le.u[i].clone()));
    }
    hull.dedup();
    order_rows(&mut hull);
    let positive = zero_positions(&le.a).is_empty() && zero_positions(&ge.a).is_empty();
    Ok(Relaxation {
        hull,
        exact: positive && input.ge_hull.is_none(),
        ge_from_fixture: input.ge_hull.is_some(),
    })
}

/// Intersection of several `<=` sets over a common box: lex order is total,
/// so the result is `{x ⪯ theta*}` for the lex-smallest greedy point clamped
/// into the common box. Returns the index of the winning instance and its hull.
pub fn intersect_le_family(
    family: &[KnapsackInstance],
) -> Result<(usize, Vec<BigInt>, HPolytope), IntersectError> {
    let first = family.first().ok_or(InstanceError::Empty)?;
    let n = first.n();
    let mut u = first.bounds().to_vec();
    let mut best: Option<(usize, Vec<BigInt>)> = None;
    for (k, inst) in family.iter().enumerate() {
        if inst.n() != n || inst.bounds() != first.bounds() {
            return Err(IntersectError::DifferentBoxes);
        }
        let vk = validate(inst)?;
        for (ui, vi) in u.iter_mut().zip(vk.bounds()) {
            if vi < ui {
                *ui = vi.clone();
            }
        }
        let theta = greedy_solution(&vk)?.theta().to_vec();
        if best.as_ref().is_none_or(|(_, b)| {
            lex_cmp(&theta, b)
                .map(|o| o.result.is_lt())
                .unwrap_or(false)
        }) {
            best = Some((k, theta));
        }
    }
    let (k, theta) = best.expect("family is nonempty");
    let star = clamp_lex(&theta, &u);
    let hull = packing_system(&u, &star);
    Ok((k, star, hull))
}

/// Lex-largest point of `[0,u]` that is `⪯ theta`.
pub fn clamp_lex(theta: &[BigInt], u: &[BigInt]) -> Vec<BigInt> {
    let mut out = theta.to_vec();
    for i in (0..theta.len()).rev() {
        if theta[i] > u[i] {
            out[..=i].clone_from_slice(&u[..=i]);
            break;
        }
    }
    out
}

/// Text summary used in reports.
pub fn describe(ts: &TwoSidedInstance) -> String {
    format!(
        "theta = {}\ngamma = {}\ncase = {}\nfixed = {:?}",
        fmt_int_vec(&ts.theta),
        fmt_int_vec(&ts.gamma),
        case_classify(ts),
        ts.fixed_suffix.iter().map(|k| k + 1).collect::<Vec<_>>()
    )
}

/// Fractional points `x = (1-eps)·p + eps·q` between hull vertices `p` with
/// `p_t = theta_t` and `q` with `q_t = theta_t - 1` (gap-one case).
pub fn fractional_family(
    ts: &TwoSidedInstance,
    eps: &BigRational,
) -> Result<Vec<Vec<BigRational>>, IntersectError> {
    let m = ts.free();
    if m == 0 {
        return Ok(Vec::new());
    }
    let t = m - 1;
    let top = ts.theta[t].clone();
    let hull = intersection_hull(ts)?;
    let vs = crate::oracle::vertices(&hull)
        .map_err(|e| IntersectError::LiftCheckFailed { row: e.to_string() })?;
    let (hi, lo): (Vec<_>, Vec<_>) = vs.vertices.iter().partition(|v| v[t] == q(&top));
    let one = BigRational::one();
    let mut out = Vec::new();
    for p in &hi {
        for r in &lo {
            if r[t] != q(&top) - &one {
                continue;
            }
            out.push(
                p.iter()
                    .zip(r.iter())
                    .map(|(a, b)| (&one - eps) * a + eps * b)
                    .collect(),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::to_rat_vec;
    use crate::oracle::{enumerate_two_sided, vertices, DEFAULT_GUARD};

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pair(d: i64) -> (KnapsackInstance, KnapsackInstance) {
        let le =
            KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], 841, Sense::Le)
                .unwrap();
        let ge = KnapsackInstance::from_i64(&[1, 4, 25, 75, 160], &[3, 5, 2, 1, 2], d, Sense::Ge)
            .unwrap();
        (le, ge)
    }

    fn r(p: i64, qq: i64) -> BigRational {
        BigRational::new(p.into(), qq.into())
    }

    fn check_hull(ts: &TwoSidedInstance) {
        let hull = intersection_hull(ts).unwrap();
        let le = ts.le();
        let cloud = enumerate_two_sided(
            le.original_bounds(),
            le.weights(),
            le.capacity(),
            ts.ge_weights(),
            ts.demand(),
            DEFAULT_GUARD,
        )
        .unwrap();
        for p in &cloud.points {
            assert!(hull.contains(p), "{p:?} cut off");
        }
        let vs = vertices(&hull).unwrap();
        for x in &vs.vertices {
            assert!(crate::num::is_integral(x), "fractional vertex {x:?}");
            let xi: Vec<BigInt> = x.iter().map(|c| c.numer().clone()).collect();
            assert!(cloud.points.contains(&xi));
        }
    }

    #[test]
    fn gap_cases_on_derived_pairs() {
        let (le, ge) = pair(200);
        let ts = build_from_instances(&le, &ge).unwrap();
        assert_eq!(ts.theta(), v(&[0, 3, 1, 1, 2]).as_slice());
        assert_eq!(case_classify(&ts), GapCase::GapOne);
        check_hull(&ts);
        let (le, ge) = pair(100);
        let ts = build_from_instances(&le, &ge).unwrap();
        assert_eq!(case_classify(&ts), GapCase::GapAtLeastTwo);
        check_hull(&ts);
    }

    #[test]
    fn preprocessing_fixes_the_top() {
        // d close to the box weight forces x5 = 2 and more
        let (le, ge) = pair(400);
        let ts = build_from_instances(&le, &ge).unwrap();
        assert!(!ts.fixed_suffix().is_empty());
        assert_eq!(ts.fixed_suffix()[0], 4);
        check_hull(&ts);
        let hull = intersection_hull(&ts).unwrap();
        assert!(hull.ineqs.iter().any(|r| r.tag == RowTag::Fixed(4)));
    }

    #[test]
    fn errors() {
        let (le, ge) = pair(200);
        let big =
            KnapsackInstance::from_i64(&[1, 4, 25, 75, 160], &[3, 5, 2, 1, 2], 10_000, Sense::Ge)
                .unwrap();
        assert_eq!(
            build_from_instances(&le, &big),
            Err(IntersectError::EmptyIntersection)
        );
        let other =
            KnapsackInstance::from_i64(&[1, 4, 25, 75, 160], &[3, 5, 2, 1, 1], 100, Sense::Ge)
                .unwrap();
        assert_eq!(
            build_from_instances(&le, &other),
            Err(IntersectError::DifferentBoxes)
        );
        let mut raw: InstanceJson = (&ge).into();
        raw.a[0] = BigInt::zero();
        assert!(matches!(
            build_two_sided(&(&le).into(), &raw),
            Err(IntersectError::ZeroCoefficientRegime {
                relaxation_only: true,
                ..
            })
        ));
        // both sides feasible, no common point: 862 > 841 is needed
        let high =
            KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], 842, Sense::Ge)
                .unwrap();
        assert_eq!(
            build_from_instances(&le, &high),
            Err(IntersectError::EmptyIntersection)
        );
    }

    #[test]
    fn zero_gamma_is_one_sided() {
        let (le, _) = pair(1);
        let ge = KnapsackInstance::from_i64(&[1, 4, 25, 75, 160], &[3, 5, 2, 1, 2], 1, Sense::Ge)
            .unwrap();
        let ts = build_from_instances(&le, &ge).unwrap();
        check_hull(&ts);
    }

    #[test]
    fn extended_formulation_branches_and_lift() {
        let (le, ge) = pair(200);
        let ts = build_from_instances(&le, &ge).unwrap();
        let ef = extended_formulation(&ts).unwrap();
        let theta = to_rat_vec(ts.theta());
        let m = ts.free();
        // lambda = 1: pure <= branch
        assert!(
            ef.contains(&theta, &vec![BigRational::zero(); m]),
            "{:?}",
            ef.violation(&theta, &vec![BigRational::zero(); m])
        );
        // lambda = 0: a >= point with x_t = theta_t - 1 and y = x
        let t = m - 1;
        let mut x = ts.bounds().to_vec();
        x[t] = &ts.theta()[t] - 1;
        for (k, xi) in x.iter_mut().enumerate().skip(m) {
            *xi = ts.theta()[k].clone();
        }
        assert!(ts.contains(&x));
        let xr = to_rat_vec(&x);
        assert!(
            ef.contains(&xr, &xr[..m]),
            "{:?}",
            ef.violation(&xr, &xr[..m])
        );
        for (j, h, phi) in h_phi_pairs(&ts) {
            assert_eq!(h, phi, "j = {j}");
        }
        for eps in [r(1, 4), r(1, 2), r(3, 4)] {
            let family = fractional_family(&ts, &eps).unwrap();
            assert!(!family.is_empty());
            for x in &family {
                lift_point(&ts, x).unwrap();
            }
        }
        assert!(matches!(
            lift_point(&ts, &theta),
            Err(IntersectError::EpsilonOutOfRange { .. })
        ));
        let (le, ge) = pair(100);
        let wide = build_from_instances(&le, &ge).unwrap();
        assert!(matches!(
            extended_formulation(&wide),
            Err(IntersectError::WrongCase { .. })
        ));
    }

    #[test]
    fn disjunction_projects_onto_the_hull() {
        for d in [100, 200] {
            let (le, ge) = pair(d);
            let ts = build_from_instances(&le, &ge).unwrap();
            let hull = intersection_hull(&ts).unwrap();
            let sys = disjunctive_system(&ts).unwrap();
            for x in vertices(&hull).unwrap().vertices {
                assert!(crate::lp::projection_contains(sys.dim(), &sys.rows, &x).is_some());
            }
            for row in hull.nontrivial() {
                let mut c: Vec<BigRational> = to_rat_vec(&row.coeffs);
                if row.sense == Sense::Ge {
                    c.iter_mut().for_each(|x| *x = -x.clone());
                }
                c.resize(sys.dim(), BigRational::zero());
                let best = crate::lp::maximize(sys.dim(), &sys.rows, &c);
                let bound = if row.sense == Sense::Le {
                    q(&row.rhs)
                } else {
                    -q(&row.rhs)
                };
                match best {
                    crate::lp::LpOutcome::Optimal { value, .. } => assert!(value <= bound),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn relaxation_of_the_seven_variable_pair() {
        let le = InstanceJson {
            n: 7,
            a: v(&[2, 8, 46, 150, 310, 0, 0]),
            u: v(&[3, 5, 2, 1, 2, 4, 2]),
            b: 841.into(),
            sense: Sense::Le,
        };
        let ge = InstanceJson {
            n: 7,
            a: v(&[0, 0, 0, 2, 7, 30, 50]),
            u: le.u.clone(),
            b: 150.into(),
            sense: Sense::Ge,
        };
        let mut fixture = HPolytope::new(7);
        for (c, rhs, j) in [
            (v(&[0, 0, 0, 0, 1, 2, 4]), 12, 4),
            (v(&[0, 0, 0, 0, 0, 1, 1]), 4, 5),
            (v(&[0, 0, 0, 0, 0, 0, 1]), 1, 6),
        ] {
            fixture.push(LinearInequality::new(
                c,
                rhs.into(),
                Sense::Ge,
                RowTag::GePacking(j),
            ));
        }
        let input = TwoSidedInput {
            le: le.clone(),
            ge: ge.clone(),
            ge_hull: Some(fixture),
        };
        assert!(matches!(
            build_two_sided(&le, &ge),
            Err(IntersectError::ZeroCoefficientRegime { .. })
        ));
        let relax = relaxation_hull(&input).unwrap();
        assert!(!relax.exact);
        let vs = vertices(&relax.hull).unwrap();
        let target: Vec<BigRational> = [0, 0, 2, 1, 1]
            .iter()
            .map(|&c| r(c, 1))
            .chain([r(7, 2), r(1, 1)])
            .collect();
        assert!(vs.contains(&target));
        // without the fixture the >= side is not superincreasing
        let bare = TwoSidedInput {
            le,
            ge,
            ge_hull: None,
        };
        assert!(matches!(
            relaxation_hull(&bare),
            Err(IntersectError::Instance(
                InstanceError::NotSuperincreasing { .. }
            ))
        ));
    }

    #[test]
    fn json_round_trip() {
        let (le, ge) = pair(200);
        let input = TwoSidedInput::from_instances(&le, &ge);
        let back = TwoSidedInput::from_json(&input.to_json()).unwrap();
        assert_eq!(back.to_json(), input.to_json());
    }

    #[test]
    fn clamp_lex_examples() {
        assert_eq!(
            clamp_lex(&v(&[0, 3, 1, 1, 2]), &v(&[3, 5, 2, 1, 2])),
            v(&[0, 3, 1, 1, 2])
        );
        assert_eq!(
            clamp_lex(&v(&[0, 3, 1, 1, 2]), &v(&[3, 2, 2, 1, 2])),
            v(&[3, 2, 1, 1, 2])
        );
    }
}
