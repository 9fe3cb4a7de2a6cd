#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use superknap::apps::{random_superincreasing, RandomParams};
use superknap::intersect::{build_from_instances, case_classify, GapCase, TwoSidedInstance};
use superknap::{KnapsackInstance, Sense};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn rats(xs: &[(i64, i64)]) -> Vec<BigRational> {
    xs.iter().map(|&(p, q)| rat(p, q)).collect()
}

/// `c_i = p/q` with `p in [-9, 9]`, `q in [1, 6]`.
pub fn random_objective<R: Rng>(rng: &mut R, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=6)))
        .collect()
}

pub fn random_rats<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Vec<BigRational> {
    (0..n)
        .map(|_| rat(rng.gen_range(lo..=hi), rng.gen_range(1..=7)))
        .collect()
}

/// Superincreasing positive `>=` weights over `u` with a demand in `[1, w·u]`.
pub fn random_ge<R: Rng>(rng: &mut R, u: &[BigInt]) -> KnapsackInstance {
    let mut w = vec![BigInt::from(rng.gen_range(1..=4))];
    let mut acc = &w[0] * &u[0];
    for ui in &u[1..] {
        let next = &acc + rng.gen_range(0..=3);
        acc += &next * ui;
        w.push(next);
    }
    let d = BigInt::from(rng.gen_range(1..=acc.to_string().parse::<i64>().unwrap()));
    KnapsackInstance::new(w, u.to_vec(), d, Sense::Ge).unwrap()
}

/// A random two-sided pair with a nonempty intersection and its gap case.
pub fn random_pair<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (
    KnapsackInstance,
    KnapsackInstance,
    TwoSidedInstance,
    GapCase,
) {
    loop {
        let le = random_superincreasing(rng, n, RandomParams::default()).unwrap();
        let ge = random_ge(rng, le.bounds());
        if let Ok(ts) = build_from_instances(&le, &ge) {
            let case = case_classify(&ts);
            return (le, ge, ts, case);
        }
    }
}
