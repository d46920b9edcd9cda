//! Space descriptors and norm evaluation.
//!
//! Polyhedral norms (everything except `Lp` with `1 < p < ∞`) are computed in
//! exact rational arithmetic. The same generic evaluator also runs over `f64`,
//! which the estimators use to screen candidates before exact confirmation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, int, parse_rational, serde_rational, Rational, Value};
use crate::vector::FiniteVector;

/// Tolerance used for floating norms.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => rational::to_f64(p),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(int(1)),
            Exponent::Finite(p) if p.is_one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - int(1))),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => f.write_str(&format_rational(p)),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => Ok(Exponent::Finite(parse_rational(other)?)),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// How the blocks of an ℓ1-sum are normed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum BlockRule {
    /// Every block carries the same space.
    Uniform { space: Box<SpaceDescriptor> },
    /// Block `n` carries `WeightedAlpha(1/n)`.
    HarmonicAlpha,
    /// Listed spaces for blocks `1..=len`, then `rest` for all later blocks.
    Listed {
        blocks: Vec<SpaceDescriptor>,
        rest: Box<SpaceDescriptor>,
    },
}

impl BlockRule {
    pub fn block(&self, n: u64) -> SpaceDescriptor {
        match self {
            BlockRule::Uniform { space } => (**space).clone(),
            BlockRule::HarmonicAlpha => SpaceDescriptor::WeightedAlpha {
                alpha: Rational::new(1.into(), n.into()),
            },
            BlockRule::Listed { blocks, rest } => blocks
                .get((n - 1) as usize)
                .cloned()
                .unwrap_or_else(|| (**rest).clone()),
        }
    }

    /// Distinct spaces used by this rule, for validation.
    fn representatives(&self) -> Vec<SpaceDescriptor> {
        match self {
            BlockRule::Uniform { space } => vec![(**space).clone()],
            BlockRule::HarmonicAlpha => vec![self.block(1)],
            BlockRule::Listed { blocks, rest } => {
                let mut out = blocks.clone();
                out.push((**rest).clone());
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceDescriptor {
    Lp { p: Exponent },
    /// `c0` / `ℓ∞` restricted to finitely supported vectors.
    Sup,
    /// Eventually constant sequences with the sup norm.
    C,
    /// `max{α‖x‖₁, ‖x‖∞}`.
    WeightedAlpha {
        #[serde(with = "serde_rational")]
        alpha: Rational,
    },
    /// Sup over admissible `F` (`#F ≤ min F`) of `Σ_{i∈F} |x_i|`.
    Schreier,
    L1Sum { blocks: BlockRule },
    SupSum {
        first: Box<SpaceDescriptor>,
        second: Box<SpaceDescriptor>,
    },
}

impl SpaceDescriptor {
    pub fn l1() -> Self {
        SpaceDescriptor::Lp { p: Exponent::Finite(int(1)) }
    }

    pub fn lp(p: Rational) -> Self {
        SpaceDescriptor::Lp { p: Exponent::Finite(p) }
    }

    pub fn weighted_alpha(alpha: Rational) -> Self {
        SpaceDescriptor::WeightedAlpha { alpha }
    }

    /// The ℓ1-sum of `WeightedAlpha(1/n)` blocks.
    pub fn harmonic_l1_sum() -> Self {
        SpaceDescriptor::L1Sum { blocks: BlockRule::HarmonicAlpha }
    }

    pub fn sup_sum(first: SpaceDescriptor, second: SpaceDescriptor) -> Self {
        SpaceDescriptor::SupSum { first: Box::new(first), second: Box::new(second) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceDescriptor::Lp { p } => match p {
                Exponent::Infinity => Ok(()),
                Exponent::Finite(p) if *p >= int(1) => Ok(()),
                Exponent::Finite(p) => Err(Error::InvalidSpace(format!(
                    "exponent {} is below 1",
                    format_rational(p)
                ))),
            },
            SpaceDescriptor::WeightedAlpha { alpha } => {
                if alpha.is_positive() && *alpha <= int(1) {
                    Ok(())
                } else {
                    Err(Error::InvalidSpace(format!(
                        "alpha {} is outside (0, 1]",
                        format_rational(alpha)
                    )))
                }
            }
            SpaceDescriptor::L1Sum { blocks } => {
                let reps = blocks.representatives();
                for r in &reps {
                    r.validate()?;
                }
                let d = reps[0].depth();
                if d.is_none() || reps.iter().any(|r| r.depth() != d) {
                    return Err(Error::InvalidSpace(
                        "blocks of an l1-sum must share one index depth".into(),
                    ));
                }
                Ok(())
            }
            SpaceDescriptor::SupSum { first, second } => {
                first.validate()?;
                second.validate()?;
                if first.depth().is_none() || first.depth() != second.depth() {
                    return Err(Error::InvalidSpace(
                        "components of a sup-sum must share one index depth".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Path length of coordinates in this space, when uniform.
    pub fn depth(&self) -> Option<usize> {
        match self {
            SpaceDescriptor::L1Sum { blocks } => {
                let reps = blocks.representatives();
                let d = reps[0].depth()?;
                reps.iter().all(|r| r.depth() == Some(d)).then_some(d + 1)
            }
            SpaceDescriptor::SupSum { first, second } => {
                let d = first.depth()?;
                (second.depth() == Some(d)).then_some(d + 1)
            }
            _ => Some(1),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match self {
            SpaceDescriptor::Lp { p: Exponent::Infinity } => true,
            SpaceDescriptor::Lp { p: Exponent::Finite(p) } => p.is_one(),
            SpaceDescriptor::L1Sum { blocks } => {
                blocks.representatives().iter().all(SpaceDescriptor::is_polyhedral)
            }
            SpaceDescriptor::SupSum { first, second } => {
                first.is_polyhedral() && second.is_polyhedral()
            }
            _ => true,
        }
    }

    pub fn allows_tail(&self) -> bool {
        matches!(self, SpaceDescriptor::C)
    }

    pub fn is_l1(&self) -> bool {
        matches!(self, SpaceDescriptor::Lp { p: Exponent::Finite(p) } if p.is_one())
    }

    /// `Sup`, `C`, and `Lp(∞)`.
    pub fn is_sup_like(&self) -> bool {
        matches!(
            self,
            SpaceDescriptor::Sup | SpaceDescriptor::C | SpaceDescriptor::Lp { p: Exponent::Infinity }
        )
    }

    /// Parses a command-line shorthand such as `l1`, `lp:3/2`, `sup`, `c`,
    /// `alpha:1/3`, `schreier`, `omega`, or `schreier+l1`.
    pub fn parse_shorthand(s: &str) -> Result<Self> {
        let s = s.trim();
        let space = match s {
            "l1" => Self::l1(),
            "sup" | "c0" | "linf" => SpaceDescriptor::Sup,
            "c" => SpaceDescriptor::C,
            "schreier" => SpaceDescriptor::Schreier,
            "omega" => Self::harmonic_l1_sum(),
            "schreier+l1" => Self::sup_sum(SpaceDescriptor::Schreier, Self::l1()),
            _ => {
                if let Some(p) = s.strip_prefix("lp:") {
                    SpaceDescriptor::Lp { p: p.parse()? }
                } else if let Some(a) = s.strip_prefix("alpha:") {
                    Self::weighted_alpha(parse_rational(a)?)
                } else {
                    return Err(Error::InvalidSpace(format!("unknown space shorthand `{s}`")));
                }
            }
        };
        space.validate()?;
        Ok(space)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let space: SpaceDescriptor =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        space.validate()?;
        Ok(space)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("space descriptors always serialize")
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDescriptor::Lp { p } => write!(f, "l{p}"),
            SpaceDescriptor::Sup => f.write_str("sup"),
            SpaceDescriptor::C => f.write_str("c"),
            SpaceDescriptor::WeightedAlpha { alpha } => write!(f, "alpha({})", format_rational(alpha)),
            SpaceDescriptor::Schreier => f.write_str("schreier"),
            SpaceDescriptor::L1Sum { blocks } => match blocks {
                BlockRule::Uniform { space } => write!(f, "l1-sum({space})"),
                BlockRule::HarmonicAlpha => f.write_str("l1-sum(alpha(1/n))"),
                BlockRule::Listed { blocks, rest } => {
                    f.write_str("l1-sum(")?;
                    for b in blocks {
                        write!(f, "{b}, ")?;
                    }
                    write!(f, "{rest}...)")
                }
            },
            SpaceDescriptor::SupSum { first, second } => write!(f, "({first} (+)inf {second})"),
        }
    }
}

/// Scalars the norm evaluator can run over.
pub trait NormScalar: Clone + PartialOrd + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn abs_val(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn as_f64(&self) -> f64;
    /// `None` when the exact value is not representable (irrational norms).
    fn from_f64(x: f64) -> Option<Self>;
}

impl NormScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn as_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn from_f64(_: f64) -> Option<Self> {
        None
    }
}

impl NormScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
}

fn max_of<T: NormScalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

struct MinItem<T>(T);

impl<T: PartialOrd> PartialEq for MinItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl<T: PartialOrd> Eq for MinItem<T> {}
impl<T: PartialOrd> PartialOrd for MinItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: PartialOrd> Ord for MinItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
    }
}

/// Schreier norm of a flat vector given as `(index, value)` pairs sorted by index.
///
/// For each support index `j` the best admissible set with minimum `≥ j` takes
/// the `j` largest `|x_i|`, `i ≥ j`; a right-to-left scan keeps those in a heap.
pub fn schreier_norm_flat<T: NormScalar>(entries: &[(u64, T)]) -> T {
    let mut heap: BinaryHeap<MinItem<T>> = BinaryHeap::new();
    let mut sum = T::zero();
    let mut best = T::zero();
    for (j, v) in entries.iter().rev() {
        let a = v.abs_val();
        sum = sum.plus(&a);
        heap.push(MinItem(a));
        while heap.len() as u64 > *j {
            let MinItem(small) = heap.pop().expect("heap is nonempty");
            sum = sum.minus(&small);
        }
        best = max_of(best, sum.clone());
    }
    best
}

fn lp_norm_f64(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    let vals: Vec<f64> = values.map(f64::abs).collect();
    let m = vals.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = vals.iter().map(|v| (v / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Norm of a vector given as entries sorted by path, evaluated from `level`
/// onwards. `tail` is honored only by a top-level `C`.
pub fn norm_sorted<T: NormScalar>(
    space: &SpaceDescriptor,
    entries: &[(&[u64], T)],
    tail: &T,
    level: usize,
) -> Result<T> {
    let tail_zero = *tail == T::zero();
    if !tail_zero && !(level == 0 && space.allows_tail()) {
        return Err(Error::NotRepresentable {
            space: space.to_string(),
            tail: format!("{tail:?}"),
        });
    }
    match space {
        SpaceDescriptor::Lp { .. }
        | SpaceDescriptor::Sup
        | SpaceDescriptor::C
        | SpaceDescriptor::WeightedAlpha { .. }
        | SpaceDescriptor::Schreier => {
            if let Some((path, _)) = entries.iter().find(|(p, _)| p.len() != level + 1) {
                return Err(Error::ShapeMismatch(format!(
                    "index {path:?} has depth {} but {space} expects {}",
                    path.len(),
                    level + 1
                )));
            }
        }
        _ => {
            if let Some((path, _)) = entries.iter().find(|(p, _)| p.len() <= level + 1) {
                return Err(Error::ShapeMismatch(format!(
                    "index {path:?} is too shallow for {space}"
                )));
            }
        }
    }
    let abs_iter = || entries.iter().map(|(_, v)| v.abs_val());
    let sup = || abs_iter().fold(T::zero(), max_of);
    let l1 = || abs_iter().fold(T::zero(), |a, b| a.plus(&b));
    match space {
        SpaceDescriptor::Sup | SpaceDescriptor::Lp { p: Exponent::Infinity } => Ok(sup()),
        SpaceDescriptor::C => Ok(max_of(sup(), tail.abs_val())),
        SpaceDescriptor::Lp { p: Exponent::Finite(p) } => {
            if p.is_one() {
                Ok(l1())
            } else {
                let x = lp_norm_f64(entries.iter().map(|(_, v)| v.as_f64()), rational::to_f64(p));
                T::from_f64(x).ok_or_else(|| Error::NonPolyhedral(space.to_string()))
            }
        }
        SpaceDescriptor::WeightedAlpha { alpha } => {
            Ok(max_of(T::from_rational(alpha).times(&l1()), sup()))
        }
        SpaceDescriptor::Schreier => {
            let flat: Vec<(u64, T)> = entries.iter().map(|(p, v)| (p[level], v.clone())).collect();
            Ok(schreier_norm_flat(&flat))
        }
        SpaceDescriptor::L1Sum { blocks } => {
            let mut total = T::zero();
            for (head, run) in runs_by_head(entries, level) {
                let b = norm_sorted(&blocks.block(head), run, &T::zero(), level + 1)?;
                total = total.plus(&b);
            }
            Ok(total)
        }
        SpaceDescriptor::SupSum { first, second } => {
            let mut best = T::zero();
            for (head, run) in runs_by_head(entries, level) {
                let component = match head {
                    1 => first,
                    2 => second,
                    other => {
                        return Err(Error::ShapeMismatch(format!(
                            "sup-sum component {other} does not exist"
                        )))
                    }
                };
                best = max_of(best, norm_sorted(component, run, &T::zero(), level + 1)?);
            }
            Ok(best)
        }
    }
}

fn runs_by_head<'a, T>(
    entries: &'a [(&'a [u64], T)],
    level: usize,
) -> impl Iterator<Item = (u64, &'a [(&'a [u64], T)])> {
    let mut start = 0;
    std::iter::from_fn(move || {
        if start >= entries.len() {
            return None;
        }
        let head = entries[start].0[level];
        let mut end = start + 1;
        while end < entries.len() && entries[end].0[level] == head {
            end += 1;
        }
        let run = &entries[start..end];
        start = end;
        Some((head, run))
    })
}

/// Exact norm; fails with `NonPolyhedral` for `Lp`, `1 < p < ∞`.
pub fn norm_exact(space: &SpaceDescriptor, v: &FiniteVector) -> Result<Rational> {
    let entries: Vec<(&[u64], Rational)> =
        v.entries().iter().map(|(i, x)| (i.path(), x.clone())).collect();
    norm_sorted(space, &entries, v.tail(), 0)
}

pub fn norm_f64(space: &SpaceDescriptor, v: &FiniteVector) -> Result<f64> {
    let entries: Vec<(&[u64], f64)> = v
        .entries()
        .iter()
        .map(|(i, x)| (i.path(), rational::to_f64(x)))
        .collect();
    norm_sorted(space, &entries, &rational::to_f64(v.tail()), 0)
}

/// Exact for polyhedral norms, floating otherwise.
pub fn norm(space: &SpaceDescriptor, v: &FiniteVector) -> Result<Value> {
    if space.is_polyhedral() {
        norm_exact(space, v).map(Value::Exact)
    } else {
        norm_f64(space, v).map(Value::Approx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::vector::CoordIndex;

    fn flat(values: &[i64]) -> FiniteVector {
        FiniteVector::from_slice(&values.iter().map(|&v| int(v)).collect::<Vec<_>>())
    }

    #[test]
    fn weighted_alpha_unit_vector() {
        let s = SpaceDescriptor::weighted_alpha(rat(1, 3));
        assert_eq!(norm_exact(&s, &FiniteVector::basis(5)).unwrap(), int(1));
        let v = flat(&[1, 1, 1, 1, 1, 1]);
        assert_eq!(norm_exact(&s, &v).unwrap(), int(2));
    }

    #[test]
    fn schreier_small_cases() {
        let s = SpaceDescriptor::Schreier;
        let v = FiniteVector::basis(2).add(&FiniteVector::basis(3));
        assert_eq!(norm_exact(&s, &v).unwrap(), int(2));
        let v = FiniteVector::basis(1).add(&FiniteVector::basis(2));
        assert_eq!(norm_exact(&s, &v).unwrap(), int(1));
        let v = flat(&[1, 1, 1, 1, 1, 1]);
        assert_eq!(norm_exact(&s, &v).unwrap(), int(3));
    }

    #[test]
    fn harmonic_sum_average_of_one_block() {
        let s = SpaceDescriptor::harmonic_l1_sum();
        let (n, m) = (3u64, 7u64);
        let mut v = FiniteVector::zero();
        for k in 1..=m {
            v.add_at(CoordIndex::pair(n, k), &rat(1, m as i64));
        }
        assert_eq!(norm_exact(&s, &v).unwrap(), rat(1, 3));
    }

    #[test]
    fn c_uses_tail_and_others_reject_it() {
        let v = FiniteVector::new(
            [(CoordIndex::flat(1), int(1))].into_iter().collect(),
            int(-2),
        );
        assert_eq!(norm_exact(&SpaceDescriptor::C, &v).unwrap(), int(2));
        assert!(matches!(
            norm_exact(&SpaceDescriptor::Sup, &v),
            Err(Error::NotRepresentable { .. })
        ));
    }

    #[test]
    fn depth_mismatch_is_reported() {
        let v = FiniteVector::unit(CoordIndex::pair(1, 1));
        assert!(matches!(norm_exact(&SpaceDescriptor::l1(), &v), Err(Error::ShapeMismatch(_))));
        let w = FiniteVector::basis(1);
        assert!(matches!(
            norm_exact(&SpaceDescriptor::harmonic_l1_sum(), &w),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn lp_is_floating() {
        let s = SpaceDescriptor::lp(int(2));
        let v = flat(&[3, 4]);
        match norm(&s, &v).unwrap() {
            Value::Approx(x) => assert!((x - 5.0).abs() < FLOAT_TOLERANCE),
            other => panic!("expected float, got {other:?}"),
        }
        assert!(norm_exact(&s, &v).is_err());
    }

    #[test]
    fn shorthand_and_toml_round_trip() {
        for text in ["l1", "lp:3/2", "sup", "c", "alpha:1/3", "schreier", "omega", "schreier+l1"] {
            let s = SpaceDescriptor::parse_shorthand(text).unwrap();
            let back = SpaceDescriptor::from_toml(&s.to_toml()).unwrap();
            assert_eq!(s, back, "{text}");
        }
        assert!(SpaceDescriptor::parse_shorthand("alpha:2").is_err());
        assert!(SpaceDescriptor::parse_shorthand("lp:1/2").is_err());
    }

    #[test]
    fn sup_sum_takes_the_larger_component() {
        let s = SpaceDescriptor::sup_sum(SpaceDescriptor::Schreier, SpaceDescriptor::l1());
        let mut v = FiniteVector::unit(CoordIndex::pair(1, 3));
        v.add_at(CoordIndex::pair(2, 3), &rat(1, 2));
        v.add_at(CoordIndex::pair(2, 4), &rat(1, 2));
        assert_eq!(norm_exact(&s, &v).unwrap(), int(1));
        let w = FiniteVector::unit(CoordIndex::pair(3, 1));
        assert!(norm_exact(&s, &w).is_err());
    }
}
