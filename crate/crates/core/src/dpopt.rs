//! Linear-time optimization over a superincreasing knapsack by walking the
//! support of the greedy solution, plus leaf-set diagnostics.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::greedy::GreedyProfile;
use crate::instance::{InstanceError, ValidatedKnapsack};
use crate::num::{dot_int_rat, positive_part, rat_str, to_rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("{} is not a support index", .0 + 1)]
    NotSupportIndex(usize),
    #[error("leaf has {count} points, above the limit {limit}")]
    TooLarge { count: BigInt, limit: u64 },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// `ℓ_0 = {theta}` or `ℓ_j` for a support index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leaf {
    Theta,
    Node(usize),
}

impl Leaf {
    /// 0 for `theta`, the 1-based index otherwise.
    pub fn label(self) -> usize {
        match self {
            Leaf::Theta => 0,
            Leaf::Node(j) => j + 1,
        }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Serialize for Leaf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.label() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    /// 1-based support index.
    #[serde(serialize_with = "one_based")]
    pub j: usize,
    #[serde(with = "rat_str")]
    pub f_minus: BigRational,
    #[serde(with = "rat_str")]
    pub f_plus: BigRational,
}

fn one_based<S: Serializer>(j: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*j as u64 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpResult {
    #[serde(with = "rat_str")]
    pub value: BigRational,
    #[serde(with = "crate::num::int_vec_str")]
    pub solution: Vec<BigInt>,
    pub leaf: Leaf,
    pub trace: Vec<TraceNode>,
}

struct Walk {
    /// `(j, f_minus, f_plus)` over the support in ascending order.
    nodes: Vec<(usize, BigRational, BigRational)>,
}

fn walk(u: &[BigInt], gp: &GreedyProfile, c: &[BigRational]) -> Walk {
    let theta = gp.theta();
    let mut nodes = Vec::with_capacity(gp.support().len());
    // running sum of [c_i]^+ u_i over i < j
    let mut below = BigRational::zero();
    let mut next_i = 0;
    let mut best_prev: Option<BigRational> = None;
    for &j in gp.support() {
        while next_i < j {
            below += positive_part(&c[next_i]) * to_rat(&u[next_i]);
            next_i += 1;
        }
        let f_minus = positive_part(&c[j]) * to_rat(&(&theta[j] - 1u8)) + &below;
        let mut f_plus = &c[j] * to_rat(&theta[j]);
        if let Some(prev) = &best_prev {
            f_plus += prev;
        }
        let best = if f_plus >= f_minus {
            f_plus.clone()
        } else {
            f_minus.clone()
        };
        best_prev = Some(best);
        nodes.push((j, f_minus, f_plus));
    }
    Walk { nodes }
}

fn leaf_point(u: &[BigInt], theta: &[BigInt], c: &[BigRational], leaf: Leaf) -> Vec<BigInt> {
    let Leaf::Node(j) = leaf else {
        return theta.to_vec();
    };
    let mut x = theta.to_vec();
    for i in 0..j {
        x[i] = if c[i].is_negative() {
            BigInt::zero()
        } else {
            u[i].clone()
        };
    }
    x[j] = if c[j].is_negative() {
        BigInt::zero()
    } else {
        &theta[j] - 1u8
    };
    x
}

/// `max {c·x : x in K}` with the lex-largest maximizer.
pub fn optimize(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    c: &[BigRational],
) -> Result<DpResult, DpError> {
    if c.len() != vk.n() {
        return Err(InstanceError::LengthMismatch {
            left: c.len(),
            right: vk.n(),
        }
        .into());
    }
    Ok(optimize_box(vk.bounds(), gp, c))
}

/// Same as [`optimize`] over `{x in [0,u] : x ⪯ theta}` for any `theta`.
pub fn optimize_box(u: &[BigInt], gp: &GreedyProfile, c: &[BigRational]) -> DpResult {
    let theta = gp.theta();
    let w = walk(u, gp, c);
    let trace: Vec<TraceNode> = w
        .nodes
        .iter()
        .map(|(j, m, p)| TraceNode {
            j: *j,
            f_minus: m.clone(),
            f_plus: p.clone(),
        })
        .collect();
    let Some((_, m, p)) = w.nodes.last() else {
        // theta = 0: the only point is the origin
        return DpResult {
            value: BigRational::zero(),
            solution: theta.to_vec(),
            leaf: Leaf::Theta,
            trace,
        };
    };
    let value = if p >= m { p.clone() } else { m.clone() };
    let mut leaf = Leaf::Theta;
    for (j, f_minus, f_plus) in w.nodes.iter().rev() {
        if f_plus < f_minus {
            leaf = Leaf::Node(*j);
            break;
        }
    }
    let solution = leaf_point(u, theta, c, leaf);
    debug_assert_eq!(dot_int_rat(&solution, c), value);
    DpResult {
        value,
        solution,
        leaf,
        trace,
    }
}

/// Leaves containing an optimal point.
pub fn optimal_leaves(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    c: &[BigRational],
) -> Result<Vec<Leaf>, DpError> {
    let result = optimize(vk, gp, c)?;
    let theta = gp.theta();
    let u = vk.bounds();
    let mut leaves = Vec::new();
    if dot_int_rat(theta, c) == result.value {
        leaves.push(Leaf::Theta);
    }
    let w = walk(u, gp, c);
    for (j, f_minus, _) in &w.nodes {
        let mut above = BigRational::zero();
        for &i in gp.support_above(*j) {
            above += &c[i] * to_rat(&theta[i]);
        }
        if f_minus + above == result.value {
            leaves.push(Leaf::Node(*j));
        }
    }
    Ok(leaves)
}

/// Per-coordinate value sets of a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafDescriptor {
    pub leaf: Leaf,
    pub domains: Vec<Vec<BigInt>>,
}

impl LeafDescriptor {
    pub fn cardinality(&self) -> BigInt {
        self.domains.iter().map(|d| BigInt::from(d.len())).product()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.domains.len() && x.iter().zip(&self.domains).all(|(v, d)| d.contains(v))
    }

    pub fn enumerate(&self, limit: u64) -> Result<Vec<Vec<BigInt>>, DpError> {
        let count = self.cardinality();
        if count > BigInt::from(limit) {
            return Err(DpError::TooLarge { count, limit });
        }
        let mut out = vec![Vec::with_capacity(self.domains.len())];
        for d in &self.domains {
            out = out
                .into_iter()
                .flat_map(|p| {
                    d.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

pub fn leaf_set(
    vk: &ValidatedKnapsack,
    gp: &GreedyProfile,
    leaf: Leaf,
) -> Result<LeafDescriptor, DpError> {
    let theta = gp.theta();
    let u = vk.bounds();
    let single = |v: &BigInt| vec![v.clone()];
    let domains = match leaf {
        Leaf::Theta => theta.iter().map(single).collect(),
        Leaf::Node(j) => {
            if !gp.in_support(j) {
                return Err(DpError::NotSupportIndex(j));
            }
            let pair = |hi: BigInt| {
                if hi.is_zero() {
                    vec![hi]
                } else {
                    vec![BigInt::zero(), hi]
                }
            };
            (0..vk.n())
                .map(|i| match i.cmp(&j) {
                    std::cmp::Ordering::Less => pair(u[i].clone()),
                    std::cmp::Ordering::Equal => pair(&theta[j] - 1u8),
                    std::cmp::Ordering::Greater => single(&theta[i]),
                })
                .collect()
        }
    };
    Ok(LeafDescriptor { leaf, domains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::greedy_solution;
    use crate::instance::{lex_le, validate, KnapsackInstance, Sense};
    use crate::num::to_rat_vec;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn example() -> (ValidatedKnapsack, GreedyProfile) {
        let vk = validate(
            &KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], 841, Sense::Le)
                .unwrap(),
        )
        .unwrap();
        let gp = greedy_solution(&vk).unwrap();
        (vk, gp)
    }

    fn brute(vk: &ValidatedKnapsack, c: &[BigRational]) -> BigRational {
        let u: Vec<i64> = vk.bounds().iter().map(|v| v.try_into().unwrap()).collect();
        let mut best: Option<BigRational> = None;
        let mut x = vec![0i64; u.len()];
        loop {
            let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            if vk.instance().satisfies(&xb) {
                let val = dot_int_rat(&xb, c);
                if best.as_ref().is_none_or(|b| &val > b) {
                    best = Some(val);
                }
            }
            let mut k = 0;
            while k < x.len() && x[k] == u[k] {
                x[k] = 0;
                k += 1;
            }
            if k == x.len() {
                break;
            }
            x[k] += 1;
        }
        best.unwrap()
    }

    #[test]
    fn objective_examples() {
        let (vk, gp) = example();
        let ones = vec![q(1); 5];
        let r = optimize(&vk, &gp, &ones).unwrap();
        assert_eq!(r.value, brute(&vk, &ones));

        let neg = vec![q(-1); 5];
        let r = optimize(&vk, &gp, &neg).unwrap();
        assert_eq!(r.value, q(0));
        assert_eq!(r.solution, vec![BigInt::zero(); 5]);
        assert_eq!(r.leaf, Leaf::Node(4));

        let a = to_rat_vec(vk.weights());
        let r = optimize(&vk, &gp, &a).unwrap();
        assert_eq!(r.value, q(840));
        assert_eq!(r.solution, gp.theta());
        assert_eq!(r.leaf, Leaf::Theta);
        assert!(optimal_leaves(&vk, &gp, &a).unwrap().contains(&Leaf::Theta));
    }

    #[test]
    fn negative_last_cost_leaves() {
        let (vk, gp) = example();
        let c = vec![q(0), q(0), q(0), q(0), q(-1)];
        let leaves = optimal_leaves(&vk, &gp, &c).unwrap();
        assert!(!leaves.contains(&Leaf::Theta));
        // every optimal leaf drops x_5 below theta_5
        assert_eq!(leaves, vec![Leaf::Node(4)]);
    }

    #[test]
    fn leaf_patterns() {
        let (vk, gp) = example();
        let leaf = leaf_set(&vk, &gp, Leaf::Node(2)).unwrap();
        assert_eq!(leaf.domains[2], vec![BigInt::zero()]);
        assert_eq!(leaf.cardinality(), BigInt::from(4));
        for x in leaf.enumerate(100).unwrap() {
            assert!(lex_le(&x, gp.theta()));
            assert!(vk.instance().satisfies(&x));
        }
        assert_eq!(
            leaf_set(&vk, &gp, Leaf::Theta)
                .unwrap()
                .enumerate(10)
                .unwrap(),
            vec![gp.theta().to_vec()]
        );
        assert_eq!(
            leaf_set(&vk, &gp, Leaf::Node(0)),
            Err(DpError::NotSupportIndex(0))
        );
    }

    #[test]
    fn rational_objectives() {
        let (vk, gp) = example();
        let c = vec![
            BigRational::new(3.into(), 2.into()),
            q(-2),
            BigRational::new(7.into(), 3.into()),
            q(5),
            BigRational::new((-1).into(), 4.into()),
        ];
        assert_eq!(optimize(&vk, &gp, &c).unwrap().value, brute(&vk, &c));
    }
}
