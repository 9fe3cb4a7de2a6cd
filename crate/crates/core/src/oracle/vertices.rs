use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::OracleError;
use crate::lp::{maximize, LpOutcome};
use crate::polytope::{HPolytope, RationalRow, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexLimits {
    pub max_dim: usize,
    pub max_rows: usize,
}

impl Default for VertexLimits {
    fn default() -> Self {
        Self {
            max_dim: 7,
            max_rows: 40,
        }
    }
}

/// Vertices in canonical sorted order, each with the indices of its tight rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub dim: usize,
    pub vertices: Vec<Vec<BigRational>>,
    pub tight: Vec<Vec<usize>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.vertices
            .binary_search_by(|v| v.as_slice().cmp(x))
            .is_ok()
    }

    pub fn all_integral(&self) -> bool {
        self.vertices.iter().all(|v| crate::num::is_integral(v))
    }
}

pub fn vertices(poly: &HPolytope) -> Result<VertexSet, OracleError> {
    vertices_of(poly.dim, &poly.to_rational_rows(), VertexLimits::default())
}

/// Exact vertex enumeration by basis search: every choice of `dim` linearly
/// independent rows (equalities always included) is solved and kept when
/// feasible. Dependent partial choices are pruned.
pub fn vertices_of(
    dim: usize,
    rows: &[RationalRow],
    limits: VertexLimits,
) -> Result<VertexSet, OracleError> {
    if dim > limits.max_dim {
        return Err(OracleError::DimensionTooLarge {
            dim,
            limit: limits.max_dim,
        });
    }
    if rows.len() > limits.max_rows {
        return Err(OracleError::TooManyRows {
            rows: rows.len(),
            limit: limits.max_rows,
        });
    }
    if !is_bounded(dim, rows) {
        return Err(OracleError::UnboundedDetected);
    }
    let points = match search::<Ratio<i128>>(dim, rows) {
        Some(p) => p,
        None => search::<BigRational>(dim, rows).expect("big rationals never overflow"),
    };
    let mut found: BTreeMap<Vec<BigRational>, ()> = BTreeMap::new();
    for p in points {
        found.insert(p, ());
    }
    let vertices: Vec<Vec<BigRational>> = found.into_keys().collect();
    let tight = vertices
        .iter()
        .map(|v| (0..rows.len()).filter(|&k| rows[k].is_tight(v)).collect())
        .collect();
    Ok(VertexSet {
        dim,
        vertices,
        tight,
    })
}

fn is_bounded(dim: usize, rows: &[RationalRow]) -> bool {
    let mut up = vec![false; dim];
    let mut down = vec![false; dim];
    for r in rows {
        let nz: Vec<usize> = (0..dim).filter(|&k| !r.coeffs[k].is_zero()).collect();
        if let [k] = nz[..] {
            let pos = r.coeffs[k].is_positive();
            match r.relation {
                Relation::Eq => {
                    up[k] = true;
                    down[k] = true;
                }
                Relation::Le => {
                    if pos {
                        up[k] = true
                    } else {
                        down[k] = true
                    }
                }
                Relation::Ge => {
                    if pos {
                        down[k] = true
                    } else {
                        up[k] = true
                    }
                }
            }
        }
    }
    if up.iter().chain(&down).all(|&b| b) {
        return true;
    }
    // recession cone {d : rows with zero rhs, -1 <= d <= 1} must be {0}
    let mut cone: Vec<RationalRow> = rows
        .iter()
        .map(|r| RationalRow {
            coeffs: r.coeffs.clone(),
            rhs: BigRational::zero(),
            relation: r.relation,
        })
        .collect();
    for k in 0..dim {
        let mut e = vec![BigRational::zero(); dim];
        e[k] = BigRational::one();
        cone.push(RationalRow {
            coeffs: e.clone(),
            rhs: BigRational::one(),
            relation: Relation::Le,
        });
        cone.push(RationalRow {
            coeffs: e,
            rhs: -BigRational::one(),
            relation: Relation::Ge,
        });
    }
    for k in 0..dim {
        for sign in [1, -1] {
            let mut c = vec![BigRational::zero(); dim];
            c[k] = BigRational::from_integer(sign.into());
            if let LpOutcome::Optimal { value, .. } = maximize(dim, &cone, &c) {
                if value.is_positive() {
                    return false;
                }
            }
        }
    }
    true
}

/// Exact field operations that may overflow.
trait Field: Clone + Ord + Send + Sync {
    fn f_zero() -> Self;
    fn f_is_zero(&self) -> bool;
    /// `self - f * g`
    fn sub_mul(&self, f: &Self, g: &Self) -> Option<Self>;
    /// `self + f * g`
    fn add_mul(&self, f: &Self, g: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn from_big(v: &BigRational) -> Option<Self>;
    fn to_big(&self) -> BigRational;
}

impl Field for Ratio<i128> {
    fn f_zero() -> Self {
        Ratio::from_integer(0)
    }
    fn f_is_zero(&self) -> bool {
        *self.numer() == 0
    }
    fn sub_mul(&self, f: &Self, g: &Self) -> Option<Self> {
        self.checked_sub(&f.checked_mul(g)?)
    }
    fn add_mul(&self, f: &Self, g: &Self) -> Option<Self> {
        num_traits::CheckedAdd::checked_add(self, &f.checked_mul(g)?)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn from_big(v: &BigRational) -> Option<Self> {
        Some(Ratio::new(v.numer().to_i128()?, v.denom().to_i128()?))
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn f_zero() -> Self {
        Zero::zero()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub_mul(&self, f: &Self, g: &Self) -> Option<Self> {
        Some(self - f * g)
    }
    fn add_mul(&self, f: &Self, g: &Self) -> Option<Self> {
        Some(self + f * g)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn from_big(v: &BigRational) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

struct Row<F> {
    coeffs: Vec<F>,
    rhs: F,
    relation: Relation,
}

/// Reduced row echelon basis: `(pivot column, row, rhs)` with unit pivots.
type Basis<F> = Vec<(usize, Vec<F>, F)>;

enum Extend<F> {
    Added(Basis<F>),
    Dependent,
    Inconsistent,
}

fn extend<F: Field>(basis: &Basis<F>, row: &[F], rhs: &F) -> Option<Extend<F>> {
    let mut r = row.to_vec();
    let mut b = rhs.clone();
    for (p, brow, brhs) in basis {
        if r[*p].f_is_zero() {
            continue;
        }
        let f = r[*p].clone();
        for k in 0..r.len() {
            if !brow[k].f_is_zero() {
                r[k] = r[k].sub_mul(&f, &brow[k])?;
            }
        }
        b = b.sub_mul(&f, brhs)?;
    }
    let Some(p) = r.iter().position(|v| !v.f_is_zero()) else {
        return Some(if b.f_is_zero() {
            Extend::Dependent
        } else {
            Extend::Inconsistent
        });
    };
    let piv = r[p].clone();
    for v in r.iter_mut() {
        if !v.f_is_zero() {
            *v = v.div(&piv)?;
        }
    }
    b = b.div(&piv)?;
    let mut next = Vec::with_capacity(basis.len() + 1);
    for (q, brow, brhs) in basis {
        if brow[p].f_is_zero() {
            next.push((*q, brow.clone(), brhs.clone()));
            continue;
        }
        let f = brow[p].clone();
        let mut nrow = brow.clone();
        for k in 0..nrow.len() {
            if !r[k].f_is_zero() {
                nrow[k] = nrow[k].sub_mul(&f, &r[k])?;
            }
        }
        next.push((*q, nrow, brhs.sub_mul(&f, &b)?));
    }
    next.push((p, r, b));
    Some(Extend::Added(next))
}

struct Ctx<'a, F> {
    dim: usize,
    rows: &'a [Row<F>],
    /// Indices of inequality rows, the search alphabet.
    ineq: Vec<usize>,
}

impl<F: Field> Ctx<'_, F> {
    fn feasible(&self, x: &[F]) -> Option<bool> {
        for r in self.rows {
            let mut lhs = F::f_zero();
            for (c, v) in r.coeffs.iter().zip(x) {
                if !c.f_is_zero() && !v.f_is_zero() {
                    lhs = lhs.add_mul(c, v)?;
                }
            }
            let ok = match r.relation {
                Relation::Le => lhs <= r.rhs,
                Relation::Ge => lhs >= r.rhs,
                Relation::Eq => lhs == r.rhs,
            };
            if !ok {
                return Some(false);
            }
        }
        Some(true)
    }

    /// `None` on overflow.
    fn dfs(&self, start: usize, basis: &Basis<F>, out: &mut Vec<Vec<F>>) -> Option<()> {
        let need = self.dim - basis.len();
        if need == 0 {
            let mut x = vec![F::f_zero(); self.dim];
            for (p, _, b) in basis {
                x[*p] = b.clone();
            }
            if self.feasible(&x)? {
                out.push(x);
            }
            return Some(());
        }
        if self.ineq.len() < start + need {
            return Some(());
        }
        for pos in start..=(self.ineq.len() - need) {
            let r = &self.rows[self.ineq[pos]];
            if let Extend::Added(next) = extend(basis, &r.coeffs, &r.rhs)? {
                self.dfs(pos + 1, &next, out)?;
            }
        }
        Some(())
    }
}

fn search<F: Field>(dim: usize, rows: &[RationalRow]) -> Option<Vec<Vec<BigRational>>> {
    let conv: Vec<Row<F>> = rows
        .iter()
        .map(|r| {
            Some(Row {
                coeffs: r
                    .coeffs
                    .iter()
                    .map(F::from_big)
                    .collect::<Option<Vec<F>>>()?,
                rhs: F::from_big(&r.rhs)?,
                relation: r.relation,
            })
        })
        .collect::<Option<Vec<_>>>()?;
    let mut basis: Basis<F> = Vec::new();
    for r in conv.iter().filter(|r| r.relation == Relation::Eq) {
        match extend(&basis, &r.coeffs, &r.rhs)? {
            Extend::Added(next) => basis = next,
            Extend::Dependent => {}
            Extend::Inconsistent => return Some(Vec::new()),
        }
    }
    let ineq: Vec<usize> = (0..conv.len())
        .filter(|&k| conv[k].relation != Relation::Eq)
        .collect();
    let ctx = Ctx {
        dim,
        rows: &conv,
        ineq,
    };
    if basis.len() == dim {
        let mut out = Vec::new();
        ctx.dfs(0, &basis, &mut out)?;
        return Some(
            out.iter()
                .map(|x| x.iter().map(F::to_big).collect())
                .collect(),
        );
    }
    let need = dim - basis.len();
    if ctx.ineq.len() < need {
        return Some(Vec::new());
    }
    let firsts: Vec<usize> = (0..=(ctx.ineq.len() - need)).collect();
    let parts: Vec<Option<Vec<Vec<F>>>> = firsts
        .par_iter()
        .map(|&pos| {
            let r = &ctx.rows[ctx.ineq[pos]];
            let mut out = Vec::new();
            if let Extend::Added(next) = extend(&basis, &r.coeffs, &r.rhs)? {
                ctx.dfs(pos + 1, &next, &mut out)?;
            }
            Some(out)
        })
        .collect();
    let mut all = Vec::new();
    for part in parts {
        all.extend(
            part?
                .iter()
                .map(|x| x.iter().map(F::to_big).collect::<Vec<_>>()),
        );
    }
    Some(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Sense;
    use crate::polytope::{LinearInequality, RowTag};

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn boxed(u: &[i64]) -> HPolytope {
        let n = u.len();
        let mut p = HPolytope::new(n);
        for i in 0..n {
            p.push(LinearInequality::lower_bound(n, i, 0.into()));
            p.push(LinearInequality::upper_bound(n, i, u[i].into()));
        }
        p
    }

    #[test]
    fn box_corners() {
        let vs = vertices(&boxed(&[3, 5, 2, 1, 2])).unwrap();
        assert_eq!(vs.len(), 32);
        assert!(vs.all_integral());
    }

    #[test]
    fn fractional_vertex() {
        // x1 + x2 <= 3/2 scaled: 2x1 + 2x2 <= 3 in the unit square
        let mut p = boxed(&[1, 1]);
        p.push(LinearInequality::new(
            v(&[2, 2]),
            3.into(),
            Sense::Le,
            RowTag::Capacity,
        ));
        let vs = vertices(&p).unwrap();
        assert_eq!(vs.len(), 5);
        let half = BigRational::new(1.into(), 2.into());
        assert!(vs.contains(&[BigRational::one(), half]));
        assert!(!vs.all_integral());
    }

    #[test]
    fn permutation_invariant() {
        let mut p = boxed(&[2, 3, 1]);
        p.push(LinearInequality::new(
            v(&[1, 2, 3]),
            5.into(),
            Sense::Le,
            RowTag::Capacity,
        ));
        p.push(LinearInequality::new(
            v(&[2, 1, 0]),
            2.into(),
            Sense::Ge,
            RowTag::Capacity,
        ));
        let a = vertices(&p).unwrap();
        p.ineqs.reverse();
        let b = vertices(&p).unwrap();
        assert_eq!(a.vertices, b.vertices);
    }

    #[test]
    fn unbounded_and_limits() {
        let mut p = HPolytope::new(2);
        p.push(LinearInequality::lower_bound(2, 0, 0.into()));
        p.push(LinearInequality::lower_bound(2, 1, 0.into()));
        p.push(LinearInequality::new(
            v(&[1, -1]),
            1.into(),
            Sense::Le,
            RowTag::Capacity,
        ));
        assert_eq!(vertices(&p), Err(OracleError::UnboundedDetected));
        // bounded without explicit bounds on every side
        let mut t = HPolytope::new(2);
        t.push(LinearInequality::lower_bound(2, 0, 0.into()));
        t.push(LinearInequality::lower_bound(2, 1, 0.into()));
        t.push(LinearInequality::new(
            v(&[1, 1]),
            1.into(),
            Sense::Le,
            RowTag::Capacity,
        ));
        assert_eq!(vertices(&t).unwrap().len(), 3);
        assert!(matches!(
            vertices(&boxed(&[1; 8])),
            Err(OracleError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn equality_rows() {
        let rows = vec![
            RationalRow {
                coeffs: vec![BigRational::one(), BigRational::one()],
                rhs: BigRational::one(),
                relation: Relation::Eq,
            },
            RationalRow {
                coeffs: vec![BigRational::one(), BigRational::zero()],
                rhs: BigRational::zero(),
                relation: Relation::Ge,
            },
            RationalRow {
                coeffs: vec![BigRational::zero(), BigRational::one()],
                rhs: BigRational::zero(),
                relation: Relation::Ge,
            },
        ];
        let vs = vertices_of(2, &rows, VertexLimits::default()).unwrap();
        assert_eq!(vs.len(), 2);
    }

    #[test]
    fn overflow_falls_back() {
        let big = BigInt::from(1u64 << 62) * BigInt::from(1u64 << 62);
        let mut p = boxed(&[1, 1]);
        p.push(LinearInequality::new(
            vec![big.clone(), big.clone()],
            big.clone(),
            Sense::Le,
            RowTag::Capacity,
        ));
        let vs = vertices(&p).unwrap();
        assert_eq!(vs.len(), 3);
    }
}
