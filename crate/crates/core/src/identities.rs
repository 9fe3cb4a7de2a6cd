//! Exact checks of the recursive identities satisfied by the packing
//! coefficients `phi` and their `>=` counterparts `Phi`. Each function returns
//! the number of equalities it verified, or the first one that failed.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::facets::{big_phi, phi_coeff};
use crate::greedy::GreedyProfile;
use crate::num::{fmt_rat, to_rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{name} fails at {context}: {lhs} != {rhs}")]
pub struct IdentityFailure {
    pub name: &'static str,
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

fn check<T: PartialEq + ToString>(
    name: &'static str,
    context: impl Fn() -> String,
    lhs: T,
    rhs: T,
) -> Result<(), IdentityFailure> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(IdentityFailure {
            name,
            context: context(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        })
    }
}

fn phi(u: &[BigInt], gp: &GreedyProfile, j: usize, i: usize) -> BigInt {
    phi_coeff(u, gp, j, i).expect("index taken from the support tail")
}

/// `phi_j(next(i)) - phi_j(i) = phi_j(i)(u_i - theta_i)` and
/// `phi_j(i) = u_j - theta_j + sum_{k in I_j, k < i} phi_j(k)(u_k - theta_k)`.
pub fn phi_recurrence(u: &[BigInt], gp: &GreedyProfile) -> Result<usize, IdentityFailure> {
    let theta = gp.theta();
    let mut count = 0;
    for j in 0..gp.n().saturating_sub(1) {
        let tail = gp.support_above(j);
        for (pos, &i) in tail.iter().enumerate() {
            if let Some(&nx) = tail.get(pos + 1) {
                let lhs = phi(u, gp, j, nx) - phi(u, gp, j, i);
                let rhs = phi(u, gp, j, i) * (&u[i] - &theta[i]);
                check("phi step", || format!("j={} i={}", j + 1, i + 1), lhs, rhs)?;
                count += 1;
            }
            let mut rhs = &u[j] - &theta[j];
            for &k in &tail[..pos] {
                rhs += phi(u, gp, j, k) * (&u[k] - &theta[k]);
            }
            check(
                "phi sum",
                || format!("j={} i={}", j + 1, i + 1),
                phi(u, gp, j, i),
                rhs,
            )?;
            count += 1;
        }
    }
    Ok(count)
}

/// `phi_j(i) = phi_j(s) [1 + sum_{k in I_j, s <= k < i} phi_k(i)]` for `s < i` in `I_j`.
pub fn phi_product_split(u: &[BigInt], gp: &GreedyProfile) -> Result<usize, IdentityFailure> {
    let mut count = 0;
    for j in 0..gp.n().saturating_sub(1) {
        let tail = gp.support_above(j);
        for (a, &s) in tail.iter().enumerate() {
            for &i in &tail[a + 1..] {
                let mut bracket = BigInt::from(1);
                for &k in tail.iter().filter(|&&k| s <= k && k < i) {
                    bracket += phi(u, gp, k, i);
                }
                let rhs = phi(u, gp, j, s) * bracket;
                check(
                    "phi product split",
                    || format!("j={} s={} i={}", j + 1, s + 1, i + 1),
                    phi(u, gp, j, i),
                    rhs,
                )?;
                count += 1;
            }
        }
    }
    Ok(count)
}

/// With `A_i = x_i - z_i - theta_i·eps` and `I' = I \ {n}`,
/// `sum_{i in I'_j, i >= s} phi_j(i) A_i
///   = phi_j(s) sum_{i in I'_j, i >= s} [A_i + sum_{k in I'_i} phi_i(k) A_k]`.
pub fn packing_sum_split(
    u: &[BigInt],
    gp: &GreedyProfile,
    x: &[BigRational],
    z: &[BigRational],
    eps: &BigRational,
) -> Result<usize, IdentityFailure> {
    let n = gp.n();
    let theta = gp.theta();
    let last = n - 1;
    let big_a: Vec<BigRational> = (0..n)
        .map(|i| &x[i] - &z[i] - to_rat(&theta[i]) * eps)
        .collect();
    let tail = |j: usize| -> Vec<usize> {
        gp.support_above(j)
            .iter()
            .copied()
            .filter(|&i| i != last)
            .collect()
    };
    let mut count = 0;
    for j in 0..last {
        let tj = tail(j);
        for &s in &tj {
            let mut lhs = BigRational::from_integer(0.into());
            let mut inner = lhs.clone();
            for &i in tj.iter().filter(|&&i| i >= s) {
                lhs += to_rat(&phi(u, gp, j, i)) * &big_a[i];
                inner += &big_a[i];
                for k in tail(i) {
                    inner += to_rat(&phi(u, gp, i, k)) * &big_a[k];
                }
            }
            let rhs = to_rat(&phi(u, gp, j, s)) * inner;
            if lhs != rhs {
                return Err(IdentityFailure {
                    name: "packing sum split",
                    context: format!("j={} s={}", j + 1, s + 1),
                    lhs: fmt_rat(&lhs),
                    rhs: fmt_rat(&rhs),
                });
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `T'_j = {i : gamma_i < u_i, j < i < n}`
fn t_tail(u: &[BigInt], gamma: &[BigInt], j: usize) -> Vec<usize> {
    let last = u.len() - 1;
    ((j + 1)..last).filter(|&i| gamma[i] < u[i]).collect()
}

/// `sum_{i in T'_j, i >= s} Phi_j(i)(gamma_i·eps - z_i)
///   = Phi_j(s) sum_{i in T'_j, i >= s} [eps·Phi_i(n) - z_i - sum_{k in T'_i} Phi_i(k) z_k]`.
pub fn ge_sum_split(
    u: &[BigInt],
    gamma: &[BigInt],
    z: &[BigRational],
    eps: &BigRational,
) -> Result<usize, IdentityFailure> {
    let n = u.len();
    let last = n - 1;
    let mut count = 0;
    for j in 0..last {
        let tj = t_tail(u, gamma, j);
        for &s in &tj {
            let mut lhs = BigRational::from_integer(0.into());
            let mut inner = lhs.clone();
            for &i in tj.iter().filter(|&&i| i >= s) {
                lhs += to_rat(&big_phi(u, gamma, j, i)) * (to_rat(&gamma[i]) * eps - &z[i]);
                inner += eps * to_rat(&big_phi(u, gamma, i, last)) - &z[i];
                for k in t_tail(u, gamma, i) {
                    inner -= to_rat(&big_phi(u, gamma, i, k)) * &z[k];
                }
            }
            let rhs = to_rat(&big_phi(u, gamma, j, s)) * inner;
            if lhs != rhs {
                return Err(IdentityFailure {
                    name: "ge sum split",
                    context: format!("j={} s={}", j + 1, s + 1),
                    lhs: fmt_rat(&lhs),
                    rhs: fmt_rat(&rhs),
                });
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `Phi_j(n) = gamma_j + sum_{i in T'_j} Phi_j(i) gamma_i
///           = Phi_j(k)(gamma_k + 1) + sum_{i in T'_k} Phi_j(i) gamma_i` for `k in T'_j`.
pub fn big_phi_expansion(u: &[BigInt], gamma: &[BigInt]) -> Result<usize, IdentityFailure> {
    let last = u.len() - 1;
    let mut count = 0;
    for j in 0..last {
        let target = big_phi(u, gamma, j, last);
        let tj = t_tail(u, gamma, j);
        let mut h = gamma[j].clone();
        for &i in &tj {
            h += big_phi(u, gamma, j, i) * &gamma[i];
        }
        check(
            "h_j = Phi_j(n)",
            || format!("j={}", j + 1),
            h,
            target.clone(),
        )?;
        count += 1;
        for &k in &tj {
            let mut rhs = big_phi(u, gamma, j, k) * (&gamma[k] + 1u8);
            for i in t_tail(u, gamma, k) {
                rhs += big_phi(u, gamma, j, i) * &gamma[i];
            }
            check(
                "Phi_j(n) split",
                || format!("j={} k={}", j + 1, k + 1),
                target.clone(),
                rhs,
            )?;
            count += 1;
        }
    }
    Ok(count)
}
