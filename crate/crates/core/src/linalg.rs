//! Exact rank and affine-rank computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in (r + 1)..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for k in c..cols {
                let delta = &f * &m[r][k];
                m[i][k] -= delta;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Rank of an integer matrix, fraction-free.
pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let (top, f) = (m[r][c].clone(), m[i][c].clone());
            for k in c..cols {
                m[i][k] = &m[i][k] * &top - &f * &m[r][k];
            }
            let g = m[i]
                .iter()
                .fold(BigInt::zero(), |g, v| num_integer::Integer::gcd(&g, v));
            if !g.is_zero() && !g.is_one() {
                for v in m[i].iter_mut() {
                    *v /= &g;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a point set; `None` for the empty set.
pub fn affine_dim(points: &[Vec<BigInt>]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<BigInt>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank_int(&diffs))
}

pub fn affine_dim_rat(points: &[Vec<BigRational>]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<BigRational>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_int(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_int(&m(&[&[1, 2, 3], &[0, 1, 1], &[1, 3, 4]])), 2);
        assert_eq!(rank_int(&m(&[&[0, 0], &[0, 0]])), 0);
        let rat: Vec<Vec<BigRational>> = m(&[&[1, 0], &[0, 3]])
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        assert_eq!(rank(&rat), 2);
    }

    #[test]
    fn affine_dims() {
        assert_eq!(affine_dim(&[]), None);
        assert_eq!(affine_dim(&m(&[&[1, 1]])), Some(0));
        assert_eq!(affine_dim(&m(&[&[0, 0], &[1, 1], &[2, 2]])), Some(1));
        assert_eq!(affine_dim(&m(&[&[0, 0], &[1, 0], &[0, 1]])), Some(2));
    }
}
