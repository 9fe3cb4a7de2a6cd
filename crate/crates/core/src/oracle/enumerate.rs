use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::OracleError;
use crate::instance::{count_box_points, KnapsackInstance, Sense};
use crate::num::{dot_int_rat, int_vec_str};

pub const DEFAULT_GUARD: u64 = 10_000_000;

/// Integer points of a box, sorted ascending in reverse lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCloud {
    pub dim: usize,
    #[serde(serialize_with = "points_str")]
    pub points: Vec<Vec<BigInt>>,
    pub source: String,
}

fn points_str<S: serde::Serializer>(points: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Row<'a>(&'a [BigInt]);
    impl Serialize for Row<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            int_vec_str::serialize(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(points.len()))?;
    for p in points {
        seq.serialize_element(&Row(p))?;
    }
    seq.end()
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `w·x (<=|>=) rhs`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxConstraint {
    pub w: Vec<BigInt>,
    pub rhs: BigInt,
    pub sense: Sense,
}

struct Search<'a> {
    u: Vec<u64>,
    cons: &'a [BoxConstraint],
    /// Per constraint: min / max contribution of coordinates `0..k`.
    lo: Vec<Vec<BigInt>>,
    hi: Vec<Vec<BigInt>>,
    out: Vec<Vec<BigInt>>,
}

impl Search<'_> {
    fn go(&mut self, k: usize, x: &mut Vec<u64>, partial: &mut Vec<BigInt>) {
        for (c, con) in self.cons.iter().enumerate() {
            let ok = match con.sense {
                Sense::Le => &partial[c] + &self.lo[c][k] <= con.rhs,
                Sense::Ge => &partial[c] + &self.hi[c][k] >= con.rhs,
            };
            if !ok {
                return;
            }
        }
        if k == 0 {
            self.out.push(x.iter().map(|&v| BigInt::from(v)).collect());
            return;
        }
        let i = k - 1;
        for v in 0..=self.u[i] {
            x[i] = v;
            for (c, con) in self.cons.iter().enumerate() {
                partial[c] += &con.w[i] * v;
            }
            self.go(i, x, partial);
            for (c, con) in self.cons.iter().enumerate() {
                partial[c] -= &con.w[i] * v;
            }
        }
        x[i] = 0;
    }
}

/// All integer points of `[0,u]` satisfying every constraint, pruning on
/// partial sums from the top coordinate down.
pub fn enumerate_box(
    u: &[BigInt],
    cons: &[BoxConstraint],
    guard: u64,
    source: &str,
) -> Result<PointCloud, OracleError> {
    let n = u.len();
    for c in cons {
        if c.w.len() != n {
            return Err(OracleError::LengthMismatch {
                left: c.w.len(),
                right: n,
            });
        }
    }
    let product = count_box_points(u);
    if product > BigInt::from(guard) {
        return Err(OracleError::TooLarge { product, guard });
    }
    let ub: Vec<u64> = u.iter().map(|v| v.to_u64().unwrap_or(0)).collect();
    let mut lo = Vec::with_capacity(cons.len());
    let mut hi = Vec::with_capacity(cons.len());
    for c in cons {
        let (mut l, mut h) = (vec![BigInt::zero()], vec![BigInt::zero()]);
        for i in 0..n {
            let t = &c.w[i] * &u[i];
            let (tl, th) = if t.is_negative() {
                (t, BigInt::zero())
            } else {
                (BigInt::zero(), t)
            };
            l.push(&l[i] + tl);
            h.push(&h[i] + th);
        }
        lo.push(l);
        hi.push(h);
    }
    let mut s = Search {
        u: ub,
        cons,
        lo,
        hi,
        out: Vec::new(),
    };
    s.go(n, &mut vec![0; n], &mut vec![BigInt::zero(); cons.len()]);
    Ok(PointCloud {
        dim: n,
        points: s.out,
        source: source.to_string(),
    })
}

pub fn enumerate_instance(inst: &KnapsackInstance, guard: u64) -> Result<PointCloud, OracleError> {
    let con = BoxConstraint {
        w: inst.weights().to_vec(),
        rhs: inst.capacity().clone(),
        sense: inst.sense(),
    };
    let source = format!(
        "{}-knapsack n={} b={}",
        inst.sense(),
        inst.n(),
        inst.capacity()
    );
    enumerate_box(inst.bounds(), &[con], guard, &source)
}

/// `{x in [0,u] : a·x <= b, w·x >= d}`
pub fn enumerate_two_sided(
    u: &[BigInt],
    a: &[BigInt],
    b: &BigInt,
    w: &[BigInt],
    d: &BigInt,
    guard: u64,
) -> Result<PointCloud, OracleError> {
    let cons = [
        BoxConstraint {
            w: a.to_vec(),
            rhs: b.clone(),
            sense: Sense::Le,
        },
        BoxConstraint {
            w: w.to_vec(),
            rhs: d.clone(),
            sense: Sense::Ge,
        },
    ];
    enumerate_box(
        u,
        &cons,
        guard,
        &format!("two-sided n={} b={b} d={d}", u.len()),
    )
}

/// Exact maximum of `c·x` over the cloud together with every maximizer.
pub fn brute_max(
    cloud: &PointCloud,
    c: &[BigRational],
) -> Result<(BigRational, Vec<Vec<BigInt>>), OracleError> {
    if c.len() != cloud.dim {
        return Err(OracleError::LengthMismatch {
            left: c.len(),
            right: cloud.dim,
        });
    }
    let mut best: Option<BigRational> = None;
    let mut arg = Vec::new();
    for p in &cloud.points {
        let v = dot_int_rat(p, c);
        match &best {
            Some(b) if &v < b => {}
            Some(b) if &v == b => arg.push(p.clone()),
            _ => {
                best = Some(v);
                arg = vec![p.clone()];
            }
        }
    }
    best.map(|b| (b, arg)).ok_or(OracleError::EmptyCloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::to_rat_vec;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn example_box() {
        let u = v(&[3, 5, 2, 1, 2]);
        let all = enumerate_box(&u, &[], DEFAULT_GUARD, "box").unwrap();
        assert_eq!(all.len(), 432);
        let inst =
            KnapsackInstance::from_i64(&[2, 8, 46, 150, 310], &[3, 5, 2, 1, 2], 841, Sense::Le)
                .unwrap();
        let k = enumerate_instance(&inst, DEFAULT_GUARD).unwrap();
        let direct = all.points.iter().filter(|p| inst.satisfies(p)).count();
        assert_eq!(k.len(), direct);
        let (val, arg) = brute_max(&k, &to_rat_vec(inst.weights())).unwrap();
        assert_eq!(val, BigRational::from_integer(840.into()));
        assert_eq!(arg, vec![v(&[0, 3, 1, 1, 2])]);
    }

    #[test]
    fn non_superincreasing_optimum() {
        let inst =
            KnapsackInstance::from_i64(&[2, 8, 40, 150, 310], &[1, 5, 4, 1, 2], 825, Sense::Le)
                .unwrap();
        let k = enumerate_instance(&inst, DEFAULT_GUARD).unwrap();
        let (val, arg) = brute_max(&k, &to_rat_vec(inst.weights())).unwrap();
        assert_eq!(val, BigRational::from_integer(822.into()));
        assert!(arg.contains(&v(&[1, 5, 4, 0, 2])));
    }

    #[test]
    fn guards_and_empties() {
        let u = vec![BigInt::from(9); 10];
        assert!(matches!(
            enumerate_box(&u, &[], DEFAULT_GUARD, ""),
            Err(OracleError::TooLarge { .. })
        ));
        let u = v(&[3, 5, 2, 1, 2]);
        let w = v(&[2, 8, 46, 150, 310]);
        let empty = enumerate_two_sided(
            &u,
            &w,
            &BigInt::from(841),
            &w,
            &BigInt::from(937),
            DEFAULT_GUARD,
        )
        .unwrap();
        assert!(empty.is_empty());
        assert_eq!(
            brute_max(&empty, &to_rat_vec(&w)),
            Err(OracleError::EmptyCloud)
        );
        let all = enumerate_box(&u, &[], DEFAULT_GUARD, "").unwrap();
        let (val, arg) = brute_max(&all, &vec![BigRational::zero(); 5]).unwrap();
        assert!(val.is_zero());
        assert_eq!(arg.len(), 432);
    }

    #[test]
    fn points_come_sorted() {
        let all = enumerate_box(&v(&[1, 2]), &[], 100, "").unwrap();
        for pair in all.points.windows(2) {
            assert!(crate::instance::lex_le(&pair[0], &pair[1]));
        }
    }
}
