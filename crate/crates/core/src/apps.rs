//! Instance constructors and hull applications: divisor-chain (integer basis)
//! instances, α-nary expansions, a seeded random superincreasing generator,
//! and the mixed knapsack with one bounded continuous variable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::facets::{hull_ge, packing_system, FacetError};
use crate::greedy::{greedy_vector, minimal_packing, GreedyError};
use crate::instance::{is_superincreasing, lex_le, InstanceError, KnapsackInstance, Sense};
use crate::intersect::balas_union;
use crate::num::{int_vec_str, rat_str, to_rat};
use crate::polytope::{HPolytope, LinearSystem, RationalRow, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppsError {
    #[error("chain entry {} does not divide the next, or does not increase", .index + 1)]
    NotDivisorChain { index: usize },
    #[error("a divisor chain must start at 1")]
    NotStartingAtOne,
    #[error("a divisor chain needs at least two entries")]
    TooShort,
    #[error("alpha must be at least 2")]
    BadAlpha,
    #[error("{what} must be positive")]
    Nonpositive { what: &'static str },
    #[error("continuous bound exceeds the capacity")]
    ContinuousAboveCapacity,
    #[error("the >= side of the mixed split is empty")]
    EmptyIntersection,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error(transparent)]
    Facet(#[from] FacetError),
}

/// `(a, u)` for a divisor chain `1 = a_1 | a_2 | ... | a_n`, with
/// `u_i = a_{i+1}/a_i - 1` and the caller's `last_bound` for `u_n`.
pub fn integer_basis_instance(
    chain: &[BigInt],
    last_bound: &BigInt,
) -> Result<(Vec<BigInt>, Vec<BigInt>), AppsError> {
    if chain.len() < 2 {
        return Err(AppsError::TooShort);
    }
    if !chain[0].is_one() {
        return Err(AppsError::NotStartingAtOne);
    }
    if !last_bound.is_positive() {
        return Err(AppsError::Nonpositive { what: "last bound" });
    }
    let mut u = Vec::with_capacity(chain.len());
    for i in 0..chain.len() - 1 {
        let (q, r) = chain[i + 1].div_rem(&chain[i]);
        if !r.is_zero() || q <= BigInt::one() {
            return Err(AppsError::NotDivisorChain { index: i });
        }
        u.push(q - 1u8);
    }
    u.push(last_bound.clone());
    let check = is_superincreasing(chain, &u)?;
    debug_assert!(check.holds);
    Ok((chain.to_vec(), u))
}

/// `a_t = alpha^(t-1)`, `u_t = alpha - 1`, `b = ubound`, with length
/// `floor(log_alpha(ubound)) + 1`. The greedy point is the base-`alpha`
/// representation of `ubound`, which is asserted.
pub fn alpha_expansion_instance(
    alpha: &BigInt,
    ubound: &BigInt,
) -> Result<KnapsackInstance, AppsError> {
    if alpha < &BigInt::from(2) {
        return Err(AppsError::BadAlpha);
    }
    if !ubound.is_positive() {
        return Err(AppsError::Nonpositive { what: "ubound" });
    }
    let mut a = vec![BigInt::one()];
    while &(a.last().unwrap() * alpha) <= ubound {
        let next = a.last().unwrap() * alpha;
        a.push(next);
    }
    let u = vec![alpha - 1u8; a.len()];
    let inst = KnapsackInstance::new(a, u, ubound.clone(), Sense::Le)?;
    let theta = greedy_vector(inst.weights(), inst.bounds(), inst.capacity())?;
    let mut rest = ubound.clone();
    for t in &theta {
        let (q, r) = rest.div_rem(alpha);
        assert_eq!(t, &r, "greedy point differs from the base-{alpha} digits");
        rest = q;
    }
    assert!(rest.is_zero());
    Ok(inst)
}

/// Ranges for the random generator: `u_i in [1, max_bound]`,
/// `a_1 in [1, max_first]`, slack in `[0, max_slack]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    pub max_bound: u64,
    pub max_first: u64,
    pub max_slack: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            max_bound: 3,
            max_first: 5,
            max_slack: 4,
        }
    }
}

/// Superincreasing by construction: `a_{i+1} = sum_{k<=i} a_k u_k + slack`,
/// with `b` drawn from `[max_i a_i u_i, a·u - 1]` so the instance is
/// nontrivial and already tight. Needs `n >= 2`.
pub fn random_superincreasing<R: Rng>(
    rng: &mut R,
    n: usize,
    p: RandomParams,
) -> Result<KnapsackInstance, AppsError> {
    if n < 2 {
        return Err(InstanceError::Empty.into());
    }
    let u: Vec<BigInt> = (0..n)
        .map(|_| BigInt::from(rng.gen_range(1..=p.max_bound.max(1))))
        .collect();
    let mut a = vec![BigInt::from(rng.gen_range(1..=p.max_first.max(1)))];
    let mut acc = &a[0] * &u[0];
    for i in 1..n {
        let next = &acc + rng.gen_range(0..=p.max_slack);
        acc += &next * &u[i];
        a.push(next);
    }
    let lo = a.iter().zip(&u).map(|(x, y)| x * y).max().unwrap();
    let hi = &acc - 1u8;
    let b = lo.clone() + random_below(rng, &(&hi - &lo + 1u8));
    Ok(KnapsackInstance::new(a, u, b, Sense::Le)?)
}

/// Uniform draw from `[0, bound)` for `bound >= 1`.
fn random_below<R: Rng>(rng: &mut R, bound: &BigInt) -> BigInt {
    if let Some(b) = bound.to_u64() {
        return BigInt::from(rng.gen_range(0..b));
    }
    let bits = bound.bits();
    loop {
        let bytes: Vec<u8> = (0..bits.div_ceil(8)).map(|_| rng.gen()).collect();
        let mut v = BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes);
        v %= BigInt::one() << bits;
        if &v < bound {
            return v;
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Objective with entries `p/q`, `p in [-9, 9]`, `q in [1, 6]`.
pub fn random_objective<R: Rng>(rng: &mut R, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| {
            BigRational::new(
                rng.gen_range(-9i64..=9).into(),
                rng.gen_range(1i64..=6).into(),
            )
        })
        .collect()
}

/// `Q = {(x,y) in [0,u] ∩ Z^n × [0, ub_cont] : a·x + y <= b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedInstance {
    #[serde(with = "int_vec_str")]
    pub a: Vec<BigInt>,
    #[serde(with = "int_vec_str")]
    pub u: Vec<BigInt>,
    #[serde(with = "rat_str")]
    pub ub_cont: BigRational,
    #[serde(with = "rat_str")]
    pub b: BigRational,
}

impl MixedInstance {
    pub fn contains(&self, x: &[BigInt], y: &BigRational) -> bool {
        let inside = x
            .iter()
            .zip(&self.u)
            .all(|(xi, ui)| !xi.is_negative() && xi <= ui);
        let ax: BigInt = crate::num::dot(&self.a, x);
        inside && !y.is_negative() && y <= &self.ub_cont && to_rat(&ax) + y <= self.b
    }
}

/// Two-branch extended formulation of `conv Q`. Variables: `x1..xn, y`,
/// branch copies, `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedHull {
    /// Greedy point for `a·x <= floor(b)`.
    pub theta_b: Vec<BigInt>,
    /// Greedy point for `a·x <= floor(b - ub_cont)`.
    pub theta_low: Vec<BigInt>,
    /// Minimal packing for `a·x >= ceil(b - ub_cont)`.
    pub gamma_low: Vec<BigInt>,
    /// `conv Q1` over `(x, y)`.
    pub q1: Vec<RationalRow>,
    /// `conv Q2` over `(x, y)`.
    pub q2: Vec<RationalRow>,
    pub system: LinearSystem,
}

impl MixedHull {
    /// Some completion of `(x, y)` in the extended system, if any.
    pub fn contains(&self, x: &[BigRational], y: &BigRational) -> Option<Vec<BigRational>> {
        let mut p = x.to_vec();
        p.push(y.clone());
        crate::lp::projection_contains(self.system.dim(), &self.system.rows, &p)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let iv = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "theta_floor_b": iv(&self.theta_b),
            "theta_floor_b_minus_ub": iv(&self.theta_low),
            "gamma_ceil_b_minus_ub": iv(&self.gamma_low),
            "system": self.system.to_json_value(),
        })
    }
}

fn lift_rows(poly: &HPolytope) -> Vec<RationalRow> {
    poly.to_rational_rows()
        .into_iter()
        .map(|mut r| {
            r.coeffs.push(BigRational::zero());
            r
        })
        .collect()
}

fn y_row(n: usize, y: BigRational, relation: Relation, rhs: BigRational) -> RationalRow {
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = y;
    RationalRow {
        coeffs,
        rhs,
        relation,
    }
}

fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

pub fn mixed_hull_extended(mi: &MixedInstance) -> Result<MixedHull, AppsError> {
    let n = mi.a.len();
    if n == 0 || mi.u.len() != n {
        return Err(InstanceError::LengthMismatch {
            left: n,
            right: mi.u.len(),
        }
        .into());
    }
    if let Some(index) = mi.a.iter().position(|v| !v.is_positive()) {
        return Err(InstanceError::NonpositiveEntry { field: "a", index }.into());
    }
    if let Some(index) = mi.u.iter().position(|v| !v.is_positive()) {
        return Err(InstanceError::NonpositiveEntry { field: "u", index }.into());
    }
    if !mi.ub_cont.is_positive() {
        return Err(AppsError::Nonpositive {
            what: "continuous bound",
        });
    }
    if mi.ub_cont > mi.b {
        return Err(AppsError::ContinuousAboveCapacity);
    }
    if let Some(index) = is_superincreasing(&mi.a, &mi.u)?.first_violation {
        return Err(InstanceError::NotSuperincreasing { index }.into());
    }
    let slack = &mi.b - &mi.ub_cont;
    let theta_b = greedy_vector(&mi.a, &mi.u, &floor_int(&mi.b))?;
    let theta_low = greedy_vector(&mi.a, &mi.u, &floor_int(&slack))?;
    let lo = slack.ceil().to_integer();
    let mut q1_x = packing_system(&mi.u, &theta_b);
    let gamma_low = if lo.is_positive() {
        let gamma = minimal_packing(&mi.a, &mi.u, &lo).map_err(|e| match e {
            GreedyError::Infeasible { .. } => AppsError::EmptyIntersection,
            other => other.into(),
        })?;
        if !lex_le(&gamma, &theta_b) {
            return Err(AppsError::EmptyIntersection);
        }
        q1_x.ineqs.extend(hull_ge(&mi.a, &mi.u, &lo)?.ineqs);
        q1_x.dedup();
        gamma
    } else {
        vec![BigInt::zero(); n]
    };
    let one = BigRational::one();
    let mut q1 = lift_rows(&q1_x);
    let mut cap: Vec<BigRational> = mi.a.iter().map(to_rat).collect();
    cap.push(one.clone());
    q1.push(RationalRow {
        coeffs: cap,
        rhs: mi.b.clone(),
        relation: Relation::Le,
    });
    q1.push(y_row(n, one.clone(), Relation::Ge, BigRational::zero()));

    let mut q2 = lift_rows(&packing_system(&mi.u, &theta_low));
    q2.push(y_row(n, one.clone(), Relation::Ge, BigRational::zero()));
    q2.push(y_row(n, one, Relation::Le, mi.ub_cont.clone()));

    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.push("y".to_string());
    let system = balas_union(&names, &q1, &q2);
    Ok(MixedHull {
        theta_b,
        theta_low,
        gamma_low,
        q1,
        q2,
        system,
    })
}
