//! Inequality systems: integer H-polytopes for hull outputs and rational
//! systems for extended formulations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::instance::Sense;
use crate::num::{dot, dot_int_rat, fmt_rat, int_str, int_vec_str, rat_str, rat_vec_str};

/// Provenance of a row. Indices are 0-based; the string form is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowTag {
    Packing(usize),
    GePacking(usize),
    BoundUpper(usize),
    BoundLower(usize),
    Fixed(usize),
    Capacity,
    Other(String),
}

impl RowTag {
    pub fn is_bound(&self) -> bool {
        matches!(
            self,
            RowTag::BoundUpper(_) | RowTag::BoundLower(_) | RowTag::Fixed(_)
        )
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowTag::Packing(j) => write!(f, "packing({})", j + 1),
            RowTag::GePacking(j) => write!(f, "ge_packing({})", j + 1),
            RowTag::BoundUpper(j) => write!(f, "bound_upper({})", j + 1),
            RowTag::BoundLower(j) => write!(f, "bound_lower({})", j + 1),
            RowTag::Fixed(j) => write!(f, "fixed({})", j + 1),
            RowTag::Capacity => f.write_str("capacity"),
            RowTag::Other(s) => f.write_str(s),
        }
    }
}

impl FromStr for RowTag {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let indexed = |prefix: &str| -> Option<usize> {
            let inner = s
                .strip_prefix(prefix)?
                .strip_prefix('(')?
                .strip_suffix(')')?;
            inner
                .parse::<usize>()
                .ok()
                .filter(|&j| j >= 1)
                .map(|j| j - 1)
        };
        Ok(if let Some(j) = indexed("packing") {
            RowTag::Packing(j)
        } else if let Some(j) = indexed("ge_packing") {
            RowTag::GePacking(j)
        } else if let Some(j) = indexed("bound_upper") {
            RowTag::BoundUpper(j)
        } else if let Some(j) = indexed("bound_lower") {
            RowTag::BoundLower(j)
        } else if let Some(j) = indexed("fixed") {
            RowTag::Fixed(j)
        } else if s == "capacity" {
            RowTag::Capacity
        } else {
            RowTag::Other(s.to_string())
        })
    }
}

impl Serialize for RowTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RowTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap_or_else(|never| match never {}))
    }
}

/// `coeffs·x (<=|>=) rhs` with exact integer data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearInequality {
    #[serde(with = "int_vec_str")]
    pub coeffs: Vec<BigInt>,
    #[serde(with = "int_str")]
    pub rhs: BigInt,
    pub sense: Sense,
    pub tag: RowTag,
}

impl LinearInequality {
    pub fn new(coeffs: Vec<BigInt>, rhs: BigInt, sense: Sense, tag: RowTag) -> Self {
        Self {
            coeffs,
            rhs,
            sense,
            tag,
        }
    }

    pub fn upper_bound(dim: usize, i: usize, value: BigInt) -> Self {
        Self::new(unit(dim, i), value, Sense::Le, RowTag::BoundUpper(i))
    }

    pub fn lower_bound(dim: usize, i: usize, value: BigInt) -> Self {
        Self::new(unit(dim, i), value, Sense::Ge, RowTag::BoundLower(i))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn lhs(&self, x: &[BigInt]) -> BigInt {
        dot(&self.coeffs, x)
    }

    pub fn lhs_rat(&self, x: &[BigRational]) -> BigRational {
        dot_int_rat(&self.coeffs, x)
    }

    /// `lhs - rhs`; for a packing row this is the slack function `xi_j`.
    pub fn excess(&self, x: &[BigInt]) -> BigInt {
        self.lhs(x) - &self.rhs
    }

    pub fn satisfied_by(&self, x: &[BigInt]) -> bool {
        let l = self.lhs(x);
        match self.sense {
            Sense::Le => l <= self.rhs,
            Sense::Ge => l >= self.rhs,
        }
    }

    pub fn satisfied_by_rat(&self, x: &[BigRational]) -> bool {
        let l = self.lhs_rat(x);
        let r = BigRational::from_integer(self.rhs.clone());
        match self.sense {
            Sense::Le => l <= r,
            Sense::Ge => l >= r,
        }
    }

    pub fn is_tight(&self, x: &[BigInt]) -> bool {
        self.lhs(x) == self.rhs
    }

    pub fn is_tight_rat(&self, x: &[BigRational]) -> bool {
        self.lhs_rat(x) == BigRational::from_integer(self.rhs.clone())
    }

    /// Rewrites the row for the substitution `x = u - y`.
    pub fn complemented(&self, u: &[BigInt], tag: RowTag) -> Self {
        let rhs = dot(&self.coeffs, u) - &self.rhs;
        let sense = match self.sense {
            Sense::Le => Sense::Ge,
            Sense::Ge => Sense::Le,
        };
        Self::new(self.coeffs.clone(), rhs, sense, tag)
    }

    /// Rewrites the row for the substitution `y = x - shift`.
    pub fn shifted(&self, shift: &[BigInt]) -> Self {
        let rhs = &self.rhs + dot(&self.coeffs, shift);
        Self::new(self.coeffs.clone(), rhs, self.sense, self.tag.clone())
    }

    /// Places the row's coordinates at `positions` inside a `dim`-vector.
    pub fn embedded(&self, dim: usize, positions: &[usize]) -> Self {
        let mut coeffs = vec![BigInt::zero(); dim];
        for (c, &p) in self.coeffs.iter().zip(positions) {
            coeffs[p] = c.clone();
        }
        let remap = |j: usize| positions[j];
        let tag = match &self.tag {
            RowTag::Packing(j) => RowTag::Packing(remap(*j)),
            RowTag::GePacking(j) => RowTag::GePacking(remap(*j)),
            RowTag::BoundUpper(j) => RowTag::BoundUpper(remap(*j)),
            RowTag::BoundLower(j) => RowTag::BoundLower(remap(*j)),
            RowTag::Fixed(j) => RowTag::Fixed(remap(*j)),
            other => other.clone(),
        };
        Self::new(coeffs, self.rhs.clone(), self.sense, tag)
    }

    pub fn to_rational(&self) -> RationalRow {
        RationalRow {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
            rhs: BigRational::from_integer(self.rhs.clone()),
            relation: self.sense.into(),
        }
    }

    /// Plain-text form such as `x1 + 3x2 + 9x3 <= 72`.
    pub fn render(&self) -> String {
        format!(
            "{} {} {}",
            render_terms(&self.coeffs, |i| format!("x{}", i + 1)),
            self.sense,
            self.rhs
        )
    }
}

fn unit(dim: usize, i: usize) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); dim];
    e[i] = BigInt::one();
    e
}

fn render_terms<T>(coeffs: &[T], name: impl Fn(usize) -> String) -> String
where
    T: Clone + Zero + One + Signed + PartialEq + fmt::Display,
{
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = if mag.is_one() {
            name(i)
        } else {
            format!("{mag}{}", name(i))
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Finite inequality system `{x in R^dim : rows}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub dim: usize,
    pub ineqs: Vec<LinearInequality>,
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ineqs: Vec::new(),
        }
    }

    pub fn push(&mut self, row: LinearInequality) {
        debug_assert_eq!(row.dim(), self.dim);
        self.ineqs.push(row);
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.ineqs.iter().all(|r| r.satisfied_by(x))
    }

    pub fn contains_rat(&self, x: &[BigRational]) -> bool {
        self.ineqs.iter().all(|r| r.satisfied_by_rat(x))
    }

    /// Rows that are not variable bounds.
    pub fn nontrivial(&self) -> impl Iterator<Item = &LinearInequality> {
        self.ineqs.iter().filter(|r| !r.tag.is_bound())
    }

    /// Drops rows whose `(coeffs, rhs, sense)` repeat an earlier row, and
    /// bound rows dominated by a tighter bound on the same coordinate.
    pub fn dedup(&mut self) {
        let mut upper: Vec<Option<BigInt>> = vec![None; self.dim];
        let mut lower: Vec<Option<BigInt>> = vec![None; self.dim];
        for r in &self.ineqs {
            if let Some(i) = single_coordinate(r) {
                match r.sense {
                    Sense::Le => {
                        if upper[i].as_ref().is_none_or(|v| &r.rhs < v) {
                            upper[i] = Some(r.rhs.clone());
                        }
                    }
                    Sense::Ge => {
                        if lower[i].as_ref().is_none_or(|v| &r.rhs > v) {
                            lower[i] = Some(r.rhs.clone());
                        }
                    }
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        self.ineqs.retain(|r| {
            if let Some(i) = single_coordinate(r) {
                let best = match r.sense {
                    Sense::Le => upper[i].as_ref(),
                    Sense::Ge => lower[i].as_ref(),
                };
                if best != Some(&r.rhs) {
                    return false;
                }
            }
            seen.insert((r.coeffs.clone(), r.rhs.clone(), r.sense))
        });
    }

    pub fn to_rational_rows(&self) -> Vec<RationalRow> {
        self.ineqs
            .iter()
            .map(LinearInequality::to_rational)
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.ineqs {
            out.push_str(&r.render());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polytope serializes")
    }
}

/// `Some(i)` when the row is `x_i (<=|>=) c` with unit coefficient.
fn single_coordinate(r: &LinearInequality) -> Option<usize> {
    let mut hit = None;
    for (i, c) in r.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !c.is_one() || hit.is_some() {
            return None;
        }
        hit = Some(i);
    }
    hit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl From<Sense> for Relation {
    fn from(s: Sense) -> Self {
        match s {
            Sense::Le => Relation::Le,
            Sense::Ge => Relation::Ge,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// A row with exact rational data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalRow {
    #[serde(with = "rat_vec_str")]
    pub coeffs: Vec<BigRational>,
    #[serde(with = "rat_str")]
    pub rhs: BigRational,
    pub relation: Relation,
}

impl RationalRow {
    pub fn lhs(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        let l = self.lhs(x);
        match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Ge => l >= self.rhs,
            Relation::Eq => l == self.rhs,
        }
    }

    pub fn is_tight(&self, x: &[BigRational]) -> bool {
        self.lhs(x) == self.rhs
    }

    pub fn render(&self, names: &[String]) -> String {
        let body = render_rat_terms(&self.coeffs, names);
        format!("{body} {} {}", self.relation, fmt_rat(&self.rhs))
    }
}

fn render_rat_terms(coeffs: &[BigRational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = if mag.is_one() {
            name.clone()
        } else if mag.denom().is_one() {
            format!("{}{name}", mag.numer())
        } else {
            format!("({}){name}", fmt_rat(&mag))
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Rational system over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub names: Vec<String>,
    pub rows: Vec<RationalRow>,
}

impl LinearSystem {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn contains(&self, point: &[BigRational]) -> bool {
        point.len() == self.dim() && self.rows.iter().all(|r| r.satisfied_by(point))
    }

    /// Adds `sum c_k v_k (rel) rhs` from sparse `(variable index, coefficient)` terms.
    pub fn add(&mut self, terms: &[(usize, BigRational)], relation: Relation, rhs: BigRational) {
        let mut coeffs = vec![BigRational::zero(); self.dim()];
        for (k, c) in terms {
            coeffs[*k] += c;
        }
        self.rows.push(RationalRow {
            coeffs,
            rhs,
            relation,
        });
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&r.render(&self.names));
            out.push('\n');
        }
        out
    }

    /// `{"variables": [...], "rows": [{"terms": {"x1": "3", ...}, "relation": "<=", "rhs": "..."}]}`
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut terms = serde_json::Map::new();
                for (c, name) in r.coeffs.iter().zip(&self.names) {
                    if !c.is_zero() {
                        terms.insert(name.clone(), serde_json::Value::String(fmt_rat(c)));
                    }
                }
                serde_json::json!({
                    "terms": terms,
                    "relation": r.relation.to_string(),
                    "rhs": fmt_rat(&r.rhs),
                })
            })
            .collect();
        serde_json::json!({ "variables": self.names, "rows": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn renders_like_the_display_form() {
        let row = LinearInequality::new(
            v(&[1, 3, 9, 18, 18]),
            72.into(),
            Sense::Le,
            RowTag::Packing(0),
        );
        assert_eq!(row.render(), "x1 + 3x2 + 9x3 + 18x4 + 18x5 <= 72");
        let row = LinearInequality::new(v(&[0, -2, 1]), (-4).into(), Sense::Ge, RowTag::Capacity);
        assert_eq!(row.render(), "-2x2 + x3 >= -4");
        let row = LinearInequality::new(v(&[0, 0]), 3.into(), Sense::Le, RowTag::Capacity);
        assert_eq!(row.render(), "0 <= 3");
    }

    #[test]
    fn tags_round_trip() {
        for tag in [
            RowTag::Packing(0),
            RowTag::GePacking(4),
            RowTag::BoundUpper(2),
            RowTag::BoundLower(1),
            RowTag::Fixed(6),
            RowTag::Capacity,
            RowTag::Other("external".into()),
        ] {
            assert_eq!(tag.to_string().parse::<RowTag>().unwrap(), tag);
        }
    }

    #[test]
    fn complement_and_shift() {
        // x1 + 2x2 <= 3 under x = u - y with u = (2, 2): y1 + 2y2 >= 3
        let row = LinearInequality::new(v(&[1, 2]), 3.into(), Sense::Le, RowTag::Packing(0));
        let c = row.complemented(&v(&[2, 2]), RowTag::GePacking(0));
        assert_eq!((c.rhs.clone(), c.sense), (BigInt::from(3), Sense::Ge));
        let s = row.shifted(&v(&[1, 1]));
        assert_eq!(s.rhs, BigInt::from(6));
    }

    #[test]
    fn dedup_keeps_tightest_bounds() {
        let mut p = HPolytope::new(2);
        p.push(LinearInequality::upper_bound(2, 0, 5.into()));
        p.push(LinearInequality::upper_bound(2, 0, 3.into()));
        p.push(LinearInequality::lower_bound(2, 1, 0.into()));
        p.push(LinearInequality::lower_bound(2, 1, 0.into()));
        p.push(LinearInequality::new(
            v(&[1, 1]),
            4.into(),
            Sense::Le,
            RowTag::Packing(0),
        ));
        p.push(LinearInequality::new(
            v(&[1, 1]),
            4.into(),
            Sense::Le,
            RowTag::Packing(0),
        ));
        p.dedup();
        assert_eq!(p.ineqs.len(), 3);
        assert_eq!(p.ineqs[0].rhs, BigInt::from(3));
    }

    #[test]
    fn polytope_json_shape() {
        let mut p = HPolytope::new(2);
        p.push(LinearInequality::new(
            v(&[1, 2]),
            7.into(),
            Sense::Ge,
            RowTag::GePacking(0),
        ));
        let text = p.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["dim"], 2);
        assert_eq!(value["ineqs"][0]["rhs"], "7");
        assert_eq!(value["ineqs"][0]["sense"], "ge");
        assert_eq!(value["ineqs"][0]["tag"], "ge_packing(1)");
        let back: HPolytope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
