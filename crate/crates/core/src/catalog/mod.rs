//! Named sequence generators and the transforms applied on top of them.
//!
//! A [`SequenceSpec`] is a base [`Generator`] followed by a pipeline of
//! [`Transform`]s (subsequence, shift/scale, Cesàro averaging). Catalog ids
//! such as `c-signflip` or `omega-example:3` resolve to a spec together with
//! the space the sequence lives in.

pub mod sets;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, serde_rational, serde_rational_vec, Rational};
use crate::space::SpaceDescriptor;
use crate::vector::{CoordIndex, FiniteVector};

/// A monotone injection `k ↦ n_k` on the positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum IndexMap {
    Identity,
    Square,
    Cube,
    /// Listed values, continued by `last + (k - len)` past the end.
    List { indices: Vec<u64> },
    /// `k ↦ h_{min(k, len)}(k)` where `h_j = s_1 ∘ … ∘ s_j`.
    Diagonal { stages: Vec<IndexMap> },
    /// `f_1 ∘ f_2 ∘ …`, applied right to left.
    Composed { maps: Vec<IndexMap> },
}

impl IndexMap {
    pub fn apply(&self, k: u64) -> u64 {
        self.try_apply(k).unwrap_or_else(|| panic!("index map {self} overflowed u64 at k = {k}"))
    }

    /// `None` on overflow.
    pub fn try_apply(&self, k: u64) -> Option<u64> {
        match self {
            IndexMap::Identity => Some(k),
            IndexMap::Square => k.checked_mul(k),
            IndexMap::Cube => k.checked_mul(k)?.checked_mul(k),
            IndexMap::List { indices } => {
                let len = indices.len() as u64;
                if k <= len {
                    Some(indices[(k - 1) as usize])
                } else {
                    indices.last().copied().unwrap_or(0).checked_add(k - len)
                }
            }
            IndexMap::Diagonal { stages } => {
                let j = (k as usize).min(stages.len());
                stages[..j].iter().rev().try_fold(k, |acc, s| s.try_apply(acc))
            }
            IndexMap::Composed { maps } => maps.iter().rev().try_fold(k, |acc, m| m.try_apply(acc)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IndexMap::List { indices } => {
                if indices.is_empty() {
                    return Err(Error::NonMonotoneIndexMap("empty index list".into()));
                }
                if indices[0] == 0 {
                    return Err(Error::NonMonotoneIndexMap("indices start at 1".into()));
                }
                if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
                    return Err(Error::NonMonotoneIndexMap(format!("{} is followed by {}", w[0], w[1])));
                }
                Ok(())
            }
            IndexMap::Diagonal { stages } if stages.is_empty() => {
                Err(Error::NonMonotoneIndexMap("diagonal map without stages".into()))
            }
            IndexMap::Diagonal { stages: maps } | IndexMap::Composed { maps } => {
                maps.iter().try_for_each(IndexMap::validate)
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexMap::Identity => f.write_str("k"),
            IndexMap::Square => f.write_str("k^2"),
            IndexMap::Cube => f.write_str("k^3"),
            IndexMap::List { indices } => write!(f, "list{indices:?}"),
            IndexMap::Diagonal { stages } => write!(f, "diagonal({} stages)", stages.len()),
            IndexMap::Composed { maps } => {
                let parts: Vec<String> = maps.iter().map(|m| m.to_string()).collect();
                write!(f, "{}", parts.join(" o "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Generator {
    /// `e_k`, intended for ℓ1.
    Ell1Basis,
    /// `e_k`, intended for c0.
    C0Basis,
    /// `e_k`, intended for the Schreier space.
    SchreierBasis,
    /// `1` on coordinates `1..=k`, `-1` afterwards.
    CSignflip,
    /// `e_1 + … + e_k`.
    C0Summing,
    /// `e_1 + … + e_k - e_{k+1}`.
    C0SummingFlip,
    /// Unit vector at `(n, k)` of the harmonic ℓ1-sum.
    OmegaExample { n: u64 },
    /// `(e_k, eps·e_k)` in the sup-sum of Schreier and ℓ1.
    SchreierSumEll1Pair {
        #[serde(with = "serde_rational")]
        eps: Rational,
    },
    /// Listed vectors; the last one repeats forever.
    Explicit { vectors: Vec<FiniteVector> },
    /// `y_k = scale · Σ_{i=1}^{n} α_i u_{offset + k·n + i}` for a base sequence `u`.
    Blocks {
        base: Box<SequenceSpec>,
        #[serde(with = "serde_rational_vec")]
        coefficients: Vec<Rational>,
        offset: u64,
        #[serde(with = "serde_rational")]
        scale: Rational,
    },
}

impl Generator {
    fn generate(&self, k: u64) -> FiniteVector {
        match self {
            Generator::Ell1Basis | Generator::C0Basis | Generator::SchreierBasis => FiniteVector::basis(k),
            Generator::CSignflip => {
                let entries = (1..=k).map(|i| (CoordIndex::flat(i), int(1))).collect();
                FiniteVector::new(entries, int(-1))
            }
            Generator::C0Summing => FiniteVector::from_entries((1..=k).map(|i| (CoordIndex::flat(i), int(1)))),
            Generator::C0SummingFlip => {
                let mut v = FiniteVector::from_entries((1..=k).map(|i| (CoordIndex::flat(i), int(1))));
                v.add_at(CoordIndex::flat(k + 1), &int(-1));
                v
            }
            Generator::OmegaExample { n } => FiniteVector::unit(CoordIndex::pair(*n, k)),
            Generator::SchreierSumEll1Pair { eps } => {
                let mut v = FiniteVector::unit(CoordIndex::pair(1, k));
                v.add_at(CoordIndex::pair(2, k), eps);
                v
            }
            Generator::Explicit { vectors } => {
                let i = (k as usize).min(vectors.len()) - 1;
                vectors[i].clone()
            }
            Generator::Blocks { .. } => self.generate_many(&[k]).pop().expect("one index requested"),
        }
    }

    fn generate_many(&self, indices: &[u64]) -> Vec<FiniteVector> {
        match self {
            Generator::Blocks { base, coefficients, offset, scale } => {
                let n = coefficients.len() as u64;
                let needed: Vec<u64> = indices
                    .iter()
                    .flat_map(|&k| (1..=n).map(move |i| offset + k * n + i))
                    .collect();
                let mut sorted = needed.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let values = base.generate_many(&sorted);
                let lookup: BTreeMap<u64, &FiniteVector> = sorted.iter().copied().zip(values.iter()).collect();
                indices
                    .iter()
                    .map(|&k| {
                        let mut acc = FiniteVector::zero();
                        for (i, a) in coefficients.iter().enumerate() {
                            let u = lookup[&(offset + k * n + i as u64 + 1)];
                            acc = acc.add(&u.scale(a));
                        }
                        acc.scale(scale)
                    })
                    .collect()
            }
            _ => indices.iter().map(|&k| self.generate(k)).collect(),
        }
    }

    /// Catalog id for the parameterized base generators.
    pub fn catalog_id(&self) -> Option<String> {
        Some(match self {
            Generator::Ell1Basis => "ell1-basis".into(),
            Generator::C0Basis => "c0-basis".into(),
            Generator::SchreierBasis => "schreier-basis".into(),
            Generator::CSignflip => "c-signflip".into(),
            Generator::C0Summing => "c0-summing".into(),
            Generator::C0SummingFlip => "c0-summing-flip".into(),
            Generator::OmegaExample { n } => format!("omega-example:{n}"),
            Generator::SchreierSumEll1Pair { eps } => format!("schreier-sum-ell1-pair:{}", format_rational(eps)),
            Generator::Explicit { .. } | Generator::Blocks { .. } => return None,
        })
    }

    fn support_bound(&self, k: u64) -> Option<u64> {
        Some(match self {
            Generator::Ell1Basis | Generator::C0Basis | Generator::SchreierBasis | Generator::OmegaExample { .. } => 1,
            Generator::CSignflip | Generator::C0Summing => k,
            Generator::C0SummingFlip => k + 1,
            Generator::SchreierSumEll1Pair { .. } => 2,
            Generator::Explicit { vectors } => vectors.iter().map(|v| v.support_len() as u64).max().unwrap_or(0),
            Generator::Blocks { base, coefficients, offset, .. } => {
                let n = coefficients.len() as u64;
                (1..=n).try_fold(0u64, |acc, i| Some(acc + base.support_bound(offset + k * n + i)?))?
            }
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            Generator::OmegaExample { n } if *n == 0 => {
                Err(Error::InvalidArgument("omega-example block index starts at 1".into()))
            }
            Generator::Explicit { vectors } if vectors.is_empty() => {
                Err(Error::InvalidArgument("explicit sequence needs at least one vector".into()))
            }
            Generator::Blocks { base, coefficients, .. } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidArgument("block coefficients are empty".into()));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Transform {
    Subsequence { map: IndexMap },
    /// `x_k ↦ scale·(x_k - shift)`.
    ShiftScale {
        shift: FiniteVector,
        #[serde(with = "serde_rational")]
        scale: Rational,
    },
    Cesaro,
}

/// An infinite sequence: a generator followed by transforms, with a declared norm bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub generator: Generator,
    #[serde(default)]
    pub transforms: Vec<Transform>,
    /// Uniform bound on `‖x_k‖` in the home space.
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    /// Declared weak limit, used as the shift in spreading-model checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_limit: Option<FiniteVector>,
}

/// Upper bound for the norm of `v` in every space kind supported here.
fn crude_norm_bound(v: &FiniteVector) -> Rational {
    v.entries_l1().max(v.tail().abs())
}

impl SequenceSpec {
    pub fn new(generator: Generator, bound: Rational) -> Self {
        SequenceSpec { generator, transforms: Vec::new(), bound, weak_limit: None }
    }

    pub fn with_weak_limit(mut self, limit: FiniteVector) -> Self {
        self.weak_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        for t in &self.transforms {
            if let Transform::Subsequence { map } = t {
                map.validate()?;
            }
        }
        Ok(())
    }

    pub fn cesaro_depth(&self) -> usize {
        self.transforms.iter().filter(|t| matches!(t, Transform::Cesaro)).count()
    }

    /// The sequence of Cesàro means `(1/k) Σ_{i≤k} x_i`.
    pub fn cesaro(&self) -> Self {
        let mut out = self.clone();
        out.transforms.push(Transform::Cesaro);
        out.weak_limit = None;
        out
    }

    /// `k ↦ x_{map(k)}`; consecutive subsequences compose into one map.
    pub fn subsequence(&self, map: IndexMap) -> Result<Self> {
        map.validate()?;
        let mut out = self.clone();
        match out.transforms.last_mut() {
            Some(Transform::Subsequence { map: prev }) => {
                let mut maps = match &*prev {
                    IndexMap::Composed { maps } => maps.clone(),
                    other => vec![other.clone()],
                };
                match map {
                    IndexMap::Composed { maps: inner } => maps.extend(inner),
                    other => maps.push(other),
                }
                *prev = IndexMap::Composed { maps };
            }
            _ => out.transforms.push(Transform::Subsequence { map }),
        }
        Ok(out)
    }

    /// `k ↦ scale·(x_k - shift)`; the identity transform is not recorded.
    pub fn shift_scale(&self, shift: FiniteVector, scale: Rational) -> Self {
        if shift.is_zero() && scale == int(1) {
            return self.clone();
        }
        let mut out = self.clone();
        out.bound = scale.abs() * (&self.bound + crude_norm_bound(&shift));
        out.weak_limit = self.weak_limit.as_ref().map(|w| w.sub(&shift).scale(&scale));
        out.transforms.push(Transform::ShiftScale { shift, scale });
        out
    }

    /// The `k`-th term, `k ≥ 1`.
    pub fn generate(&self, k: u64) -> FiniteVector {
        assert!(k >= 1, "sequence terms are indexed from 1");
        self.generate_many(&[k]).pop().expect("one index requested")
    }

    /// Terms `x_1, …, x_n`.
    pub fn prefix(&self, n: u64) -> Vec<FiniteVector> {
        self.generate_many(&(1..=n).collect::<Vec<_>>())
    }

    /// Terms at the given indices (any order, repeats allowed).
    pub fn generate_many(&self, indices: &[u64]) -> Vec<FiniteVector> {
        assert!(indices.iter().all(|&k| k >= 1), "sequence terms are indexed from 1");
        values_at(&self.generator, &self.transforms, indices)
    }

    /// Upper bound on the number of stored entries of `x_k`, computed without
    /// generating the term; `None` when only generation would tell.
    pub fn support_bound(&self, k: u64) -> Option<u64> {
        support_bound_of(&self.generator, &self.transforms, k)
    }

    /// True when the sequence is norm-convergent by construction.
    pub fn is_eventually_convergent(&self) -> bool {
        matches!(self.generator, Generator::Explicit { .. })
    }
}

fn support_bound_of(generator: &Generator, transforms: &[Transform], k: u64) -> Option<u64> {
    let Some((last, rest)) = transforms.split_last() else {
        return generator.support_bound(k);
    };
    match last {
        Transform::Subsequence { map } => support_bound_of(generator, rest, map.try_apply(k)?),
        Transform::ShiftScale { shift, .. } => Some(support_bound_of(generator, rest, k)? + shift.support_len() as u64),
        Transform::Cesaro if k <= 100_000 => {
            (1..=k).try_fold(0u64, |acc, j| Some(acc.saturating_add(support_bound_of(generator, rest, j)?)))
        }
        Transform::Cesaro => None,
    }
}

fn values_at(generator: &Generator, transforms: &[Transform], indices: &[u64]) -> Vec<FiniteVector> {
    let Some((last, rest)) = transforms.split_last() else {
        return generator.generate_many(indices);
    };
    match last {
        Transform::Subsequence { map } => {
            let mapped: Vec<u64> = indices.iter().map(|&k| map.apply(k)).collect();
            values_at(generator, rest, &mapped)
        }
        Transform::ShiftScale { shift, scale } => values_at(generator, rest, indices)
            .into_iter()
            .map(|v| v.sub(shift).scale(scale))
            .collect(),
        Transform::Cesaro => {
            let max = indices.iter().copied().max().unwrap_or(0);
            let base = values_at(generator, rest, &(1..=max).collect::<Vec<_>>());
            let mut wanted: BTreeMap<u64, Option<FiniteVector>> = indices.iter().map(|&k| (k, None)).collect();
            let mut sum = RunningSum::default();
            for (i, x) in base.iter().enumerate() {
                let k = i as u64 + 1;
                sum.add(x);
                if let Some(slot) = wanted.get_mut(&k) {
                    *slot = Some(sum.mean(k));
                }
            }
            indices.iter().map(|k| wanted[k].clone().expect("filled above")).collect()
        }
    }
}

/// Sum of vectors kept as explicit coordinates plus a tail.
#[derive(Default)]
struct RunningSum {
    entries: BTreeMap<CoordIndex, Rational>,
    tail: Rational,
}

impl RunningSum {
    fn add(&mut self, x: &FiniteVector) {
        if !x.tail().is_zero() {
            // Coordinates stored here but absent from x pick up x's tail.
            for (i, v) in self.entries.iter_mut() {
                if !x.entries().contains_key(i) {
                    *v += x.tail();
                }
            }
        }
        for (i, v) in x.entries() {
            let slot = self.entries.entry(i.clone()).or_insert_with(|| self.tail.clone());
            *slot += v;
        }
        self.tail += x.tail();
    }

    fn mean(&self, k: u64) -> FiniteVector {
        let f = Rational::new(1.into(), k.into());
        FiniteVector::new(
            self.entries.iter().map(|(i, v)| (i.clone(), v * &f)).collect(),
            &self.tail * &f,
        )
    }
}

/// A catalog sequence together with its home space and known facts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub space: SpaceDescriptor,
    pub spec: SequenceSpec,
    /// `‖x_k - x_l‖` for all `k ≠ l`, when it is constant.
    #[serde(skip_serializing_if = "Option::is_none", with = "option_rational")]
    pub pairwise_distance: Option<Rational>,
}

mod option_rational {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }
}

/// Base ids, with `<param>` marking required parameters.
pub const CATALOG_IDS: &[&str] = &[
    "ell1-basis",
    "c0-basis",
    "schreier-basis",
    "c-signflip",
    "c0-summing",
    "c0-summing-flip",
    "omega-example:<n>",
    "schreier-sum-ell1-pair:<eps>",
];

/// Resolves a catalog id such as `c-signflip` or `omega-example:3`.
pub fn lookup(id: &str) -> Result<CatalogEntry> {
    let (base, param) = match id.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (id, None),
    };
    let need_param = |what: &str| -> Result<&str> {
        param.ok_or_else(|| Error::InvalidArgument(format!("`{base}` needs a parameter: {base}:<{what}>")))
    };
    let no_param = || -> Result<()> {
        match param {
            Some(_) => Err(Error::InvalidArgument(format!("`{base}` takes no parameter"))),
            None => Ok(()),
        }
    };
    let entry = |description: &str, space: SpaceDescriptor, spec: SequenceSpec, dist: Option<Rational>| CatalogEntry {
        id: id.to_string(),
        description: description.to_string(),
        space,
        spec,
        pairwise_distance: dist,
    };
    let zero_limit = FiniteVector::zero();
    Ok(match base {
        "ell1-basis" => {
            no_param()?;
            entry(
                "unit vectors e_k of l1",
                SpaceDescriptor::l1(),
                SequenceSpec::new(Generator::Ell1Basis, int(1)),
                Some(int(2)),
            )
        }
        "c0-basis" => {
            no_param()?;
            entry(
                "unit vectors e_k of c0 (weakly null)",
                SpaceDescriptor::Sup,
                SequenceSpec::new(Generator::C0Basis, int(1)).with_weak_limit(zero_limit),
                Some(int(1)),
            )
        }
        "schreier-basis" => {
            no_param()?;
            entry(
                "unit vectors e_k of the Schreier space (weakly null)",
                SpaceDescriptor::Schreier,
                SequenceSpec::new(Generator::SchreierBasis, int(1)).with_weak_limit(zero_limit),
                Some(int(2)),
            )
        }
        "c-signflip" => {
            no_param()?;
            entry(
                "x_k = 1 on 1..k and -1 afterwards, in c",
                SpaceDescriptor::C,
                SequenceSpec::new(Generator::CSignflip, int(1)),
                Some(int(2)),
            )
        }
        "c0-summing" => {
            no_param()?;
            entry(
                "x_k = e_1 + ... + e_k in c0",
                SpaceDescriptor::Sup,
                SequenceSpec::new(Generator::C0Summing, int(1)),
                Some(int(1)),
            )
        }
        "c0-summing-flip" => {
            no_param()?;
            entry(
                "x_k = e_1 + ... + e_k - e_{k+1} in c0",
                SpaceDescriptor::Sup,
                SequenceSpec::new(Generator::C0SummingFlip, int(1)),
                Some(int(2)),
            )
        }
        "omega-example" => {
            let n: u64 = need_param("n")?
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad block index in `{id}`")))?;
            if n == 0 {
                return Err(Error::InvalidArgument("block index starts at 1".into()));
            }
            entry(
                "unit vectors of block n in the l1-sum of max{||x||_1/n, ||x||_inf}",
                SpaceDescriptor::harmonic_l1_sum(),
                SequenceSpec::new(Generator::OmegaExample { n }, int(1)).with_weak_limit(zero_limit),
                Some(int(1)),
            )
        }
        "schreier-sum-ell1-pair" => {
            let eps = parse_rational(need_param("eps")?)?;
            if eps.is_negative() || eps > int(1) {
                return Err(Error::InvalidArgument("eps must lie in [0, 1]".into()));
            }
            entry(
                "(e_k, eps e_k) in the sup-sum of the Schreier space and l1",
                SpaceDescriptor::sup_sum(SpaceDescriptor::Schreier, SpaceDescriptor::l1()),
                SequenceSpec::new(Generator::SchreierSumEll1Pair { eps }, int(1)),
                Some(int(2)),
            )
        }
        _ => return Err(Error::InvalidArgument(format!("unknown catalog id `{id}`"))),
    })
}

/// Resolves a catalog id, or parses a TOML sequence spec file body.
pub fn spec_from_toml(text: &str) -> Result<SequenceSpec> {
    let spec: SequenceSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::space::norm_exact;

    #[test]
    fn signflip_third_term() {
        let e = lookup("c-signflip").unwrap();
        let x = e.spec.generate(3);
        assert_eq!(x.support_len(), 3);
        assert_eq!(x.tail(), &int(-1));
        assert_eq!(x.get(&CoordIndex::flat(2)), &int(1));
    }

    #[test]
    fn omega_example_term() {
        let e = lookup("omega-example:2").unwrap();
        assert_eq!(e.spec.generate(4), FiniteVector::unit(CoordIndex::pair(2, 4)));
    }

    #[test]
    fn cesaro_of_ell1_basis() {
        let e = lookup("ell1-basis").unwrap();
        let y = e.spec.cesaro().generate(5);
        assert_eq!(y.support_len(), 5);
        assert_eq!(y.get(&CoordIndex::flat(3)), &rat(1, 5));
        assert_eq!(norm_exact(&e.space, &y).unwrap(), int(1));
    }

    #[test]
    fn cesaro_of_constant_is_constant() {
        let v = FiniteVector::new([(CoordIndex::flat(2), rat(3, 4))].into_iter().collect(), int(1));
        let s = SequenceSpec::new(Generator::Explicit { vectors: vec![v.clone()] }, int(1));
        for k in 1..=7 {
            assert_eq!(s.cesaro().generate(k), v);
        }
    }

    #[test]
    fn cesaro_with_tails_matches_direct_average() {
        let s = lookup("c-signflip").unwrap().spec;
        let k = 6;
        let mut direct = FiniteVector::zero();
        for i in 1..=k {
            direct = direct.add(&s.generate(i));
        }
        assert_eq!(s.cesaro().generate(k), direct.scale(&rat(1, k as i64)));
    }

    #[test]
    fn subsequence_composition() {
        let s = lookup("ell1-basis").unwrap().spec;
        assert_eq!(s.subsequence(IndexMap::Cube).unwrap().generate(2), FiniteVector::basis(8));
        let twice = s.subsequence(IndexMap::Square).unwrap().subsequence(IndexMap::Cube).unwrap();
        // x_{f(g(k))} with f = square, g = cube: k = 2 -> 64.
        assert_eq!(twice.generate(2), FiniteVector::basis(64));
        assert_eq!(twice.transforms.len(), 1);
    }

    #[test]
    fn identity_shift_scale_is_unchanged() {
        let s = lookup("c0-summing").unwrap().spec;
        assert_eq!(s.shift_scale(FiniteVector::zero(), int(1)), s);
    }

    #[test]
    fn non_monotone_maps_are_rejected() {
        let s = lookup("ell1-basis").unwrap().spec;
        assert!(matches!(
            s.subsequence(IndexMap::List { indices: vec![1, 3, 3] }),
            Err(Error::NonMonotoneIndexMap(_))
        ));
    }

    #[test]
    fn list_and_diagonal_maps() {
        let l = IndexMap::List { indices: vec![2, 5, 9] };
        assert_eq!((1..=5).map(|k| l.apply(k)).collect::<Vec<_>>(), vec![2, 5, 9, 10, 11]);
        let d = IndexMap::Diagonal { stages: vec![IndexMap::Square, IndexMap::Square] };
        // k = 1: h_1(1) = 1; k = 2: h_2(2) = 16; k = 3: h_2(3) = 81.
        assert_eq!((1..=3).map(|k| d.apply(k)).collect::<Vec<_>>(), vec![1, 16, 81]);
    }

    #[test]
    fn flip_sequence_pairwise_distance_two() {
        let e = lookup("c0-summing-flip").unwrap();
        let xs = e.spec.prefix(12);
        for k in 0..xs.len() {
            for l in 0..k {
                assert_eq!(norm_exact(&e.space, &xs[k].sub(&xs[l])).unwrap(), int(2));
            }
        }
    }

    #[test]
    fn blocks_generator() {
        let base = lookup("schreier-basis").unwrap().spec;
        let g = Generator::Blocks {
            base: Box::new(base),
            coefficients: vec![rat(1, 2), rat(1, 2)],
            offset: 3,
            scale: int(2),
        };
        let s = SequenceSpec::new(g, int(1));
        // k = 1: u_{3+2+1}, u_{3+2+2}.
        assert_eq!(s.generate(1), FiniteVector::basis(6).add(&FiniteVector::basis(7)));
    }

    #[test]
    fn toml_round_trip() {
        let s = lookup("schreier-sum-ell1-pair:1/10").unwrap().spec.cesaro();
        let text = toml::to_string(&s).unwrap();
        assert_eq!(spec_from_toml(&text).unwrap(), s);
    }

    #[test]
    fn unknown_ids_fail() {
        assert!(lookup("nope").is_err());
        assert!(lookup("omega-example").is_err());
        assert!(lookup("ell1-basis:3").is_err());
    }
}
