//! Eventually-constant rational vectors over hierarchical coordinate indices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// A coordinate position: `(k)` in flat spaces, `(n, k)` in direct sums.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordIndex(Vec<u64>);

impl CoordIndex {
    pub fn new(path: Vec<u64>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::ShapeMismatch("coordinate path is empty".into()));
        }
        if path.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "coordinate path {path:?} has an entry < 1"
            )));
        }
        Ok(CoordIndex(path))
    }

    /// Flat index `k`. Panics on `k == 0`.
    pub fn flat(k: u64) -> Self {
        assert!(k >= 1, "coordinate indices start at 1");
        CoordIndex(vec![k])
    }

    /// Two-level index `(n, k)`. Panics on zero entries.
    pub fn pair(n: u64, k: u64) -> Self {
        assert!(n >= 1 && k >= 1, "coordinate indices start at 1");
        CoordIndex(vec![n, k])
    }

    pub fn path(&self) -> &[u64] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn head(&self) -> u64 {
        self.0[0]
    }
}

impl fmt::Display for CoordIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(":"))
    }
}

impl FromStr for CoordIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let path = s
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate index `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        CoordIndex::new(path)
    }
}

impl Serialize for CoordIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoordIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Finitely many stored coordinates, every other coordinate equal to `tail`.
///
/// Stored entries never equal the tail, so structural equality is equality
/// of the represented sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FiniteVector {
    entries: BTreeMap<CoordIndex, Rational>,
    tail: Rational,
}

impl FiniteVector {
    pub fn zero() -> Self {
        FiniteVector::default()
    }

    pub fn new(entries: BTreeMap<CoordIndex, Rational>, tail: Rational) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| *v != tail).collect();
        FiniteVector { entries, tail }
    }

    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (CoordIndex, Rational)>,
    {
        let mut out = FiniteVector::zero();
        for (i, v) in entries {
            out.add_at(i, &v);
        }
        out
    }

    /// Flat vector with coordinates `1..=values.len()`.
    pub fn from_slice(values: &[Rational]) -> Self {
        Self::from_entries(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (CoordIndex::flat(i as u64 + 1), v.clone())),
        )
    }

    pub fn unit(index: CoordIndex) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(index, int(1));
        FiniteVector { entries, tail: Rational::zero() }
    }

    /// The flat unit vector `e_k`.
    pub fn basis(k: u64) -> Self {
        Self::unit(CoordIndex::flat(k))
    }

    pub fn constant(tail: Rational) -> Self {
        FiniteVector { entries: BTreeMap::new(), tail }
    }

    pub fn entries(&self) -> &BTreeMap<CoordIndex, Rational> {
        &self.entries
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    pub fn get(&self, index: &CoordIndex) -> &Rational {
        self.entries.get(index).unwrap_or(&self.tail)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty() && self.tail.is_zero()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Depth shared by all stored indices, `None` if empty or mixed.
    pub fn depth(&self) -> Option<usize> {
        let mut it = self.entries.keys().map(CoordIndex::depth);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Adds `value` at `index`, keeping canonical form.
    pub fn add_at(&mut self, index: CoordIndex, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let current = self.get(&index).clone();
        let next = current + value;
        if next == self.tail {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, next);
        }
    }

    fn combine(&self, other: &Self, sign: &Rational) -> Self {
        let tail = &self.tail + sign * &other.tail;
        let mut entries = BTreeMap::new();
        for i in self.entries.keys().chain(other.entries.keys()) {
            if entries.contains_key(i) {
                continue;
            }
            let v = self.get(i) + sign * other.get(i);
            if v != tail {
                entries.insert(i.clone(), v);
            }
        }
        FiniteVector { entries, tail }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &int(1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &int(-1))
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return FiniteVector::zero();
        }
        FiniteVector {
            entries: self.entries.iter().map(|(i, v)| (i.clone(), v * factor)).collect(),
            tail: &self.tail * factor,
        }
    }

    /// Largest absolute value among entries and tail.
    pub fn sup_abs(&self) -> Rational {
        self.entries
            .values()
            .map(|v| v.abs())
            .chain(std::iter::once(self.tail.abs()))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Sum of absolute values of the stored entries (tail ignored).
    pub fn entries_l1(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).sum()
    }

    /// Moves every index `(p...)` to `(prefix, p...)`.
    pub fn nest_under(&self, prefix: u64) -> Self {
        FiniteVector {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| {
                    let mut path = Vec::with_capacity(i.depth() + 1);
                    path.push(prefix);
                    path.extend_from_slice(i.path());
                    (CoordIndex(path), v.clone())
                })
                .collect(),
            tail: self.tail.clone(),
        }
    }
}

impl fmt::Display for FiniteVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (i, v)) in self.entries.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i} -> {}", format_rational(v))?;
        }
        write!(f, "}} tail {}", format_rational(&self.tail))
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    #[serde(default)]
    entries: BTreeMap<String, crate::rational::serde_rational::RawNumber>,
    #[serde(default)]
    tail: Option<crate::rational::serde_rational::RawNumber>,
}

impl Serialize for FiniteVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use crate::rational::serde_rational::RawNumber as R;
        let repr = VectorRepr {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (i.to_string(), R::Text(format_rational(v))))
                .collect(),
            tail: Some(R::Text(format_rational(&self.tail))),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(d)?;
        let tail = match repr.tail {
            Some(t) => t.into_rational().map_err(D::Error::custom)?,
            None => Rational::zero(),
        };
        let mut entries = BTreeMap::new();
        for (k, v) in repr.entries {
            let idx = CoordIndex::from_str(&k).map_err(D::Error::custom)?;
            let val = v.into_rational().map_err(D::Error::custom)?;
            entries.insert(idx, val);
        }
        Ok(FiniteVector::new(entries, tail))
    }
}
