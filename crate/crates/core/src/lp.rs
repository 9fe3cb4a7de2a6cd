//! Dense two-phase simplex over exact rationals with Bland's rule.
//! Sized for the small systems the oracle and the formulation checks build.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::polytope::{RationalRow, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: BigRational,
        x: Vec<BigRational>,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[BigRational]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    obj: Vec<BigRational>,
    value: BigRational,
    allowed: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                *v /= &p;
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.value -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Sets the objective `max c·v` and prices out the current basis.
    fn set_objective(&mut self, c: &[BigRational]) {
        self.obj = c.iter().map(|v| -v.clone()).collect();
        self.value = BigRational::zero();
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if self.obj[b].is_zero() {
                continue;
            }
            let f = self.obj[b].clone();
            for (v, rv) in self.obj.iter_mut().zip(&self.rows[r]) {
                if !rv.is_zero() {
                    *v -= &f * rv;
                }
            }
            self.value -= &f * &self.rhs[r];
        }
    }

    /// Returns `false` on unboundedness.
    fn run(&mut self) -> bool {
        loop {
            let entering =
                (0..self.obj.len()).find(|&j| self.allowed[j] && self.obj[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// `max c·x` subject to `rows`, with every variable free.
pub fn maximize(dim: usize, rows: &[RationalRow], c: &[BigRational]) -> LpOutcome {
    // x = p - q with p, q >= 0; columns: p (dim), q (dim), slack/surplus, artificials
    let m = rows.len();
    let mut slack_cols = 0;
    let mut art_cols = 0;
    for r in rows {
        let flip = r.rhs.is_negative();
        let rel = effective(r.relation, flip);
        match rel {
            Relation::Le => slack_cols += 1,
            Relation::Ge => {
                slack_cols += 1;
                art_cols += 1
            }
            Relation::Eq => art_cols += 1,
        }
    }
    let total = 2 * dim + slack_cols + art_cols;
    let art_start = 2 * dim + slack_cols;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        obj: Vec::new(),
        value: BigRational::zero(),
        allowed: vec![true; total],
    };
    let (mut s, mut a) = (2 * dim, art_start);
    for r in rows {
        let flip = r.rhs.is_negative();
        let sign = if flip {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        let mut row = vec![BigRational::zero(); total];
        for (k, v) in r.coeffs.iter().enumerate() {
            if !v.is_zero() {
                row[k] = &sign * v;
                row[dim + k] = -(&sign * v);
            }
        }
        let basic = match effective(r.relation, flip) {
            Relation::Le => {
                row[s] = BigRational::one();
                s += 1;
                s - 1
            }
            Relation::Ge => {
                row[s] = -BigRational::one();
                s += 1;
                row[a] = BigRational::one();
                a += 1;
                a - 1
            }
            Relation::Eq => {
                row[a] = BigRational::one();
                a += 1;
                a - 1
            }
        };
        tab.rows.push(row);
        tab.rhs.push(&sign * &r.rhs);
        tab.basis.push(basic);
    }

    if art_cols > 0 {
        let mut phase1 = vec![BigRational::zero(); total];
        for v in &mut phase1[art_start..] {
            *v = -BigRational::one();
        }
        tab.set_objective(&phase1);
        tab.run();
        if tab.value.is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out of the basis
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for j in art_start..total {
            tab.allowed[j] = false;
        }
    }

    let mut obj = vec![BigRational::zero(); total];
    for (k, v) in c.iter().enumerate() {
        obj[k] = v.clone();
        obj[dim + k] = -v.clone();
    }
    tab.set_objective(&obj);
    if !tab.run() {
        return LpOutcome::Unbounded;
    }
    let mut vals = vec![BigRational::zero(); total];
    for (r, &b) in tab.basis.iter().enumerate() {
        vals[b] = tab.rhs[r].clone();
    }
    let x = (0..dim).map(|k| &vals[k] - &vals[dim + k]).collect();
    LpOutcome::Optimal {
        value: tab.value.clone(),
        x,
    }
}

fn effective(rel: Relation, flip: bool) -> Relation {
    match (rel, flip) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}

/// Any point satisfying `rows`.
pub fn feasible_point(dim: usize, rows: &[RationalRow]) -> Option<Vec<BigRational>> {
    match maximize(dim, rows, &vec![BigRational::zero(); dim]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Substitutes fixed values for some variables; the remaining variables keep
/// their relative order.
pub fn fix_variables(rows: &[RationalRow], fixed: &[(usize, BigRational)]) -> Vec<RationalRow> {
    let dim = rows.first().map_or(0, |r| r.coeffs.len());
    let mut is_fixed = vec![false; dim];
    for (k, _) in fixed {
        is_fixed[*k] = true;
    }
    rows.iter()
        .map(|r| {
            let mut rhs = r.rhs.clone();
            for (k, v) in fixed {
                rhs -= &r.coeffs[*k] * v;
            }
            let coeffs = r
                .coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| !is_fixed[*k])
                .map(|(_, c)| c.clone())
                .collect();
            RationalRow {
                coeffs,
                rhs,
                relation: r.relation,
            }
        })
        .collect()
}

/// Whether the first `x.len()` variables can be completed to a feasible point.
pub fn projection_contains(
    dim: usize,
    rows: &[RationalRow],
    x: &[BigRational],
) -> Option<Vec<BigRational>> {
    let fixed: Vec<(usize, BigRational)> = x.iter().cloned().enumerate().collect();
    let reduced = fix_variables(rows, &fixed);
    let rest = dim - x.len();
    if rest == 0 {
        return reduced.iter().all(|r| r.satisfied_by(&[])).then(Vec::new);
    }
    feasible_point(rest, &reduced)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn row(c: &[i64], rel: Relation, rhs: i64) -> RationalRow {
        RationalRow {
            coeffs: c.iter().map(|&v| q(v)).collect(),
            rhs: q(rhs),
            relation: rel,
        }
    }

    #[test]
    fn small_lp() {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (8/5, 6/5), 14/5
        let rows = vec![
            row(&[1, 2], Relation::Le, 4),
            row(&[3, 1], Relation::Le, 6),
            row(&[1, 0], Relation::Ge, 0),
            row(&[0, 1], Relation::Ge, 0),
        ];
        match maximize(2, &rows, &[q(1), q(1)]) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, BigRational::new(14.into(), 5.into()));
                assert_eq!(
                    x,
                    vec![
                        BigRational::new(8.into(), 5.into()),
                        BigRational::new(6.into(), 5.into())
                    ]
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = vec![row(&[1], Relation::Ge, 3), row(&[1], Relation::Le, 2)];
        assert_eq!(maximize(1, &rows, &[q(1)]), LpOutcome::Infeasible);
        let rows = vec![row(&[1, -1], Relation::Le, 1)];
        assert_eq!(maximize(2, &rows, &[q(1), q(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // x + y = 3, x - y >= -1, y <= 5 : max y -> y = 2
        let rows = vec![
            row(&[1, 1], Relation::Eq, 3),
            row(&[1, -1], Relation::Ge, -1),
            row(&[0, 1], Relation::Le, 5),
        ];
        match maximize(2, &rows, &[q(0), q(1)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(2)),
            other => panic!("{other:?}"),
        }
        // redundant equality rows
        let rows = vec![
            row(&[1, 1], Relation::Eq, 3),
            row(&[2, 2], Relation::Eq, 6),
            row(&[1, 0], Relation::Ge, 0),
            row(&[0, 1], Relation::Ge, 0),
        ];
        assert!(feasible_point(2, &rows).is_some());
    }

    #[test]
    fn projection() {
        // {(x, t): 0 <= t <= x, x + t <= 1}
        let rows = vec![
            row(&[0, 1], Relation::Ge, 0),
            row(&[1, -1], Relation::Ge, 0),
            row(&[1, 1], Relation::Le, 1),
        ];
        assert!(projection_contains(2, &rows, &[q(1)]).is_some());
        assert!(projection_contains(2, &rows, &[q(-1)]).is_none());
    }
}
