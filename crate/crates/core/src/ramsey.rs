//! Finite hereditary families, the finite-scale dichotomy search and
//! monochromatic-set extraction.
//!
//! For a hereditary family on `{1..n}` and a target size `m`, the search
//! looks for `M` with `#M = m` such that either
//!
//! * (a) `F ⊂ M` is in the family exactly when `#F ≤ d`, for some `d < m`, or
//! * (b) every `F ⊂ M` with `#F ≤ f(min F)` is in the family, for a strictly
//!   increasing `f : M → ℕ`.
//!
//! Neither need exist on a finite ground set, so the result may be
//! `undetermined`. Certificates are checked by [`verify_dichotomy`], which
//! shares no code with the search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::admissible::{binomial, is_admissible};
use crate::error::{Error, Result};

/// Largest target size for the dichotomy search.
pub const DICHOTOMY_M_CAP: usize = 20;
/// Bound on `candidates × 2^m` membership tests in one search.
pub const DICHOTOMY_WORK_CAP: u64 = 1 << 28;
pub const RAMSEY_D_CAP: usize = 3;
pub const RAMSEY_N_CAP: u64 = 20;
pub const RAMSEY_T_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum FamilyRule {
    Explicit { sets: BTreeSet<Vec<u64>> },
    /// `#F ≤ min F`.
    Schreier,
    CardinalityCap { d: usize },
    /// One of [`CUSTOM_RULES`].
    Custom { id: String },
}

/// Registered predicates: `empty-only` (just `∅`), `singletons` (`#F ≤ 1`),
/// `even` (all elements even), `schreier-half` (`2·#F ≤ min F`).
pub const CUSTOM_RULES: [&str; 4] = ["empty-only", "singletons", "even", "schreier-half"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HereditaryFamily {
    pub ground: u64,
    pub rule: FamilyRule,
}

/// Outcome of [`is_hereditary`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum HereditaryCheck {
    Hereditary,
    Counterexample { member: Vec<u64>, missing: Vec<u64> },
}

fn canonical(set: &[u64]) -> Result<Vec<u64>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) || s.first() == Some(&0) {
        return Err(Error::InvalidArgument(format!("{set:?} is not a set of positive integers")));
    }
    Ok(s)
}

/// One-element-removal check; reports the member and the lexicographically
/// smallest missing subset found first.
pub fn is_hereditary(sets: &[Vec<u64>]) -> Result<HereditaryCheck> {
    let family: BTreeSet<Vec<u64>> = sets.iter().map(|s| canonical(s)).collect::<Result<_>>()?;
    for member in &family {
        let mut missing: Option<Vec<u64>> = None;
        for skip in 0..member.len() {
            let sub: Vec<u64> = member.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
            if !family.contains(&sub) && missing.as_ref().map_or(true, |m| sub < *m) {
                missing = Some(sub);
            }
        }
        if let Some(missing) = missing {
            return Ok(HereditaryCheck::Counterexample { member: member.clone(), missing });
        }
    }
    Ok(HereditaryCheck::Hereditary)
}

impl HereditaryFamily {
    /// Explicit list; rejected unless hereditary and inside `{1..ground}`.
    pub fn explicit(ground: u64, sets: &[Vec<u64>]) -> Result<Self> {
        if let HereditaryCheck::Counterexample { member, missing } = is_hereditary(sets)? {
            return Err(Error::Precondition(format!("family is not hereditary: {member:?} ∈ family but {missing:?} ∉ family")));
        }
        let sets: BTreeSet<Vec<u64>> = sets.iter().map(|s| canonical(s)).collect::<Result<_>>()?;
        if sets.iter().flatten().any(|&x| x > ground) {
            return Err(Error::InvalidArgument(format!("members must lie in {{1..{ground}}}")));
        }
        Ok(HereditaryFamily { ground, rule: FamilyRule::Explicit { sets } })
    }

    pub fn schreier(ground: u64) -> Self {
        HereditaryFamily { ground, rule: FamilyRule::Schreier }
    }

    pub fn cardinality_cap(ground: u64, d: usize) -> Self {
        HereditaryFamily { ground, rule: FamilyRule::CardinalityCap { d } }
    }

    pub fn custom(ground: u64, id: &str) -> Result<Self> {
        if !CUSTOM_RULES.contains(&id) {
            return Err(Error::UnregisteredFamily(id.to_string()));
        }
        Ok(HereditaryFamily { ground, rule: FamilyRule::Custom { id: id.to_string() } })
    }

    /// `schreier`, `cardinality-cap:D`, `empty-only`, … over `{1..ground}`.
    pub fn parse(name: &str, ground: u64) -> Result<Self> {
        match name.split_once(':') {
            None if name == "schreier" => Ok(Self::schreier(ground)),
            Some(("cardinality-cap", d)) => {
                let d = d.parse().map_err(|_| Error::Parse(format!("bad cap in `{name}`")))?;
                Ok(Self::cardinality_cap(ground, d))
            }
            _ => Self::custom(ground, name),
        }
    }

    /// Membership of a strictly increasing list.
    pub fn contains(&self, set: &[u64]) -> bool {
        if set.iter().any(|&x| x == 0 || x > self.ground) {
            return false;
        }
        match &self.rule {
            FamilyRule::Explicit { sets } => sets.contains(set),
            FamilyRule::Schreier => is_admissible(set),
            FamilyRule::CardinalityCap { d } => set.len() <= *d,
            FamilyRule::Custom { id } => match id.as_str() {
                "empty-only" => set.is_empty(),
                "singletons" => set.len() <= 1,
                "even" => set.iter().all(|x| x % 2 == 0),
                "schreier-half" => set.first().map_or(true, |&m| 2 * set.len() as u64 <= m),
                _ => false,
            },
        }
    }
}

impl fmt::Display for HereditaryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            FamilyRule::Explicit { sets } => write!(f, "explicit({} sets) over {{1..{}}}", sets.len(), self.ground),
            FamilyRule::Schreier => write!(f, "schreier over {{1..{}}}", self.ground),
            FamilyRule::CardinalityCap { d } => write!(f, "cardinality-cap({d}) over {{1..{}}}", self.ground),
            FamilyRule::Custom { id } => write!(f, "{id} over {{1..{}}}", self.ground),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DichotomyCase {
    A,
    B,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyResult {
    pub case: DichotomyCase,
    /// Empty when undetermined.
    pub set: Vec<u64>,
    pub d: Option<usize>,
    /// `x ↦ f(x)` for `x ∈ M` (case b).
    pub f: Option<BTreeMap<u64, usize>>,
    pub candidates_examined: u64,
}

/// Subsets of `m` as lists, indexed by bitmask.
fn members_by_mask(family: &HereditaryFamily, m: &[u64]) -> Vec<bool> {
    let k = m.len();
    let mut buf = Vec::with_capacity(k);
    (0u32..1 << k)
        .map(|mask| {
            buf.clear();
            buf.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| m[i]));
            family.contains(&buf)
        })
        .collect()
}

fn case_a(inside: &[bool], k: usize) -> Option<usize> {
    // Largest d with every subset of size ≤ d a member.
    let mut full = vec![true; k + 1];
    for (mask, &yes) in inside.iter().enumerate() {
        if !yes {
            full[mask.count_ones() as usize] = false;
        }
    }
    let d = full.iter().take_while(|&&b| b).count().checked_sub(1)?;
    if d >= k {
        return None;
    }
    let none_above = inside.iter().enumerate().all(|(mask, &yes)| !yes || mask.count_ones() as usize <= d);
    none_above.then_some(d)
}

fn case_b(inside: &[bool], k: usize) -> Option<Vec<usize>> {
    // g[j]: largest c such that every subset with minimum at position j and
    // at most c elements is a member; saturated when no size bound binds.
    let mut g = vec![0usize; k];
    let mut saturated = vec![false; k];
    for j in 0..k {
        let rest = k - j;
        let mut largest = rest;
        for (mask, &yes) in inside.iter().enumerate() {
            if mask != 0 && mask.trailing_zeros() as usize == j && !yes {
                largest = largest.min(mask.count_ones() as usize - 1);
            }
        }
        g[j] = largest;
        saturated[j] = largest == rest;
    }
    let mut f = g.clone();
    for j in 1..k {
        if saturated[j] {
            f[j] = f[j].max(f[j - 1] + 1);
        }
    }
    for j in (0..k.saturating_sub(1)).rev() {
        f[j] = f[j].min(f[j + 1].saturating_sub(1));
    }
    (f.iter().all(|&c| c >= 1) && inside[0]).then_some(f)
}

/// Lexicographically first `M ⊂ {1..n}` of size `m` with a case (a) or (b) certificate.
pub fn dichotomy_search(family: &HereditaryFamily, m: usize) -> Result<DichotomyResult> {
    if m > DICHOTOMY_M_CAP {
        return Err(Error::CapExceeded { what: "dichotomy target size", actual: m, cap: DICHOTOMY_M_CAP });
    }
    if m as u64 > family.ground {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds the ground size {}", family.ground)));
    }
    let per_candidate = 1u64 << m;
    let mut examined = 0u64;
    let mut current: Vec<u64> = (1..=m as u64).collect();
    loop {
        if examined.saturating_add(1).saturating_mul(per_candidate) > DICHOTOMY_WORK_CAP {
            return Err(Error::SearchBudgetExceeded(format!(
                "{} candidate sets of size {m} examined without a certificate (of {})",
                examined,
                binomial(family.ground, m as u64)
            )));
        }
        examined += 1;
        let inside = members_by_mask(family, &current);
        if let Some(d) = case_a(&inside, m) {
            return Ok(DichotomyResult { case: DichotomyCase::A, set: current, d: Some(d), f: None, candidates_examined: examined });
        }
        if let Some(f) = case_b(&inside, m) {
            let f = current.iter().copied().zip(f).collect();
            return Ok(DichotomyResult { case: DichotomyCase::B, set: current, d: None, f: Some(f), candidates_examined: examined });
        }
        if !next_combination(&mut current, family.ground) {
            return Ok(DichotomyResult {
                case: DichotomyCase::Undetermined,
                set: Vec::new(),
                d: None,
                f: None,
                candidates_examined: examined,
            });
        }
    }
}

/// Advances to the next `k`-subset of `{1..n}` in lexicographic order.
fn next_combination(c: &mut [u64], n: u64) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - (k - 1 - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Re-checks a certificate by enumerating every subset of `M`.
pub fn verify_dichotomy(family: &HereditaryFamily, result: &DichotomyResult) -> std::result::Result<(), String> {
    let m = &result.set;
    if m.windows(2).any(|w| w[0] >= w[1]) {
        return Err("M is not strictly increasing".into());
    }
    let subsets = || {
        (0u64..1 << m.len()).map(move |mask| m.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect::<Vec<u64>>())
    };
    match result.case {
        DichotomyCase::Undetermined => Ok(()),
        DichotomyCase::A => {
            let d = result.d.ok_or("case a without d")?;
            for f in subsets() {
                if family.contains(&f) != (f.len() <= d) {
                    return Err(format!("{f:?}: membership disagrees with #F ≤ {d}"));
                }
            }
            Ok(())
        }
        DichotomyCase::B => {
            let f = result.f.as_ref().ok_or("case b without f")?;
            let values: Vec<usize> = m.iter().map(|x| f.get(x).copied().ok_or(format!("f undefined at {x}"))).collect::<std::result::Result<_, _>>()?;
            if values.iter().any(|&v| v == 0) || values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("f = {values:?} is not strictly increasing and positive"));
            }
            for s in subsets() {
                let required = s.first().map_or(true, |x| s.len() <= f[x]);
                if required && !family.contains(&s) {
                    return Err(format!("{s:?} has #F ≤ f(min F) but is not in the family"));
                }
            }
            Ok(())
        }
    }
}

/// A 2-coloring of the `d`-subsets of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub d: usize,
    pub n: u64,
    colors: BTreeMap<Vec<u64>, u8>,
}

impl Coloring {
    pub fn from_fn(d: usize, n: u64, mut color: impl FnMut(&[u64]) -> u8) -> Result<Self> {
        check_ramsey_caps(d, n, 0)?;
        let ground: Vec<u64> = (1..=n).collect();
        let mut colors = BTreeMap::new();
        crate::admissible::for_each_combination(&ground, d, |s| {
            colors.insert(s.to_vec(), color(s) & 1);
            true
        });
        Ok(Coloring { d, n, colors })
    }

    /// Lines `i_1 … i_d c`; blank lines and `#` comments are skipped. Every
    /// `d`-subset must be listed exactly once.
    pub fn parse(text: &str, d: usize, n: u64) -> Result<Self> {
        check_ramsey_caps(d, n, 0)?;
        let mut colors = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {}: `{t}` is not an integer", lineno + 1))))
                .collect::<Result<_>>()?;
            if nums.len() != d + 1 || nums[d] > 1 {
                return Err(Error::Parse(format!("line {}: expected {d} indices and a color 0 or 1", lineno + 1)));
            }
            let set = canonical(&nums[..d])?;
            if set.iter().any(|&x| x > n) {
                return Err(Error::Parse(format!("line {}: index beyond {n}", lineno + 1)));
            }
            if colors.insert(set, nums[d] as u8).is_some() {
                return Err(Error::Parse(format!("line {}: subset listed twice", lineno + 1)));
            }
        }
        let expected = binomial(n, d as u64);
        if colors.len() as u64 != expected {
            return Err(Error::Parse(format!("{} subsets colored, expected {expected}", colors.len())));
        }
        Ok(Coloring { d, n, colors })
    }

    pub fn color(&self, set: &[u64]) -> u8 {
        self.colors[set]
    }
}

fn check_ramsey_caps(d: usize, n: u64, t: usize) -> Result<()> {
    if d == 0 || d > RAMSEY_D_CAP {
        return Err(Error::CapExceeded { what: "coloring arity", actual: d, cap: RAMSEY_D_CAP });
    }
    if n > RAMSEY_N_CAP {
        return Err(Error::CapExceeded { what: "ground size", actual: n as usize, cap: RAMSEY_N_CAP as usize });
    }
    if t > RAMSEY_T_CAP {
        return Err(Error::CapExceeded { what: "target size", actual: t, cap: RAMSEY_T_CAP });
    }
    Ok(())
}

/// Lexicographically first `M` with `#M = t` whose `d`-subsets share one color.
pub fn ramsey_extract(coloring: &Coloring, t: usize) -> Result<Option<Vec<u64>>> {
    check_ramsey_caps(coloring.d, coloring.n, t)?;
    if t as u64 > coloring.n {
        return Ok(None);
    }
    let mut set = Vec::with_capacity(t);
    Ok(extend(coloring, t, &mut set, None).then_some(set))
}

// Depth-first in lexicographic order; `color` is fixed by the first d-subset.
fn extend(c: &Coloring, t: usize, set: &mut Vec<u64>, color: Option<u8>) -> bool {
    if set.len() == t {
        return true;
    }
    let start = set.last().map_or(1, |x| x + 1);
    let room = (t - set.len() - 1) as u64;
    for x in start..=c.n.saturating_sub(room) {
        set.push(x);
        let mut col = color;
        let mut ok = true;
        if set.len() >= c.d {
            // New d-subsets all contain x.
            let prefix = set[..set.len() - 1].to_vec();
            crate::admissible::for_each_combination(&prefix, c.d - 1, |s| {
                let mut sub = s.to_vec();
                sub.push(x);
                let k = c.color(&sub);
                match col {
                    None => col = Some(k),
                    Some(prev) if prev != k => ok = false,
                    _ => {}
                }
                ok
            });
        }
        if ok && extend(c, t, set, col) {
            return true;
        }
        set.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hereditary_examples() {
        let fam = vec![vec![], vec![1], vec![2], vec![1, 2]];
        assert_eq!(is_hereditary(&fam).unwrap(), HereditaryCheck::Hereditary);
        assert_eq!(
            is_hereditary(&[vec![1, 2]]).unwrap(),
            HereditaryCheck::Counterexample { member: vec![1, 2], missing: vec![1] }
        );
        assert!(HereditaryFamily::explicit(3, &[vec![1, 2]]).is_err());
    }

    fn rule_is_hereditary(family: &HereditaryFamily) -> bool {
        let n = family.ground as usize;
        (0u32..1 << n).all(|mask| {
            let set: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i as u64 + 1).collect();
            !family.contains(&set)
                || (0..set.len()).all(|skip| {
                    let sub: Vec<u64> = set.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    family.contains(&sub)
                })
        })
    }

    #[test]
    fn rule_families_are_hereditary() {
        assert!(rule_is_hereditary(&HereditaryFamily::schreier(10)));
        assert!(rule_is_hereditary(&HereditaryFamily::cardinality_cap(10, 3)));
        for id in CUSTOM_RULES {
            assert!(rule_is_hereditary(&HereditaryFamily::custom(10, id).unwrap()), "{id}");
        }
    }

    #[test]
    fn cardinality_cap_gives_case_a() {
        let fam = HereditaryFamily::cardinality_cap(18, 3);
        let r = dichotomy_search(&fam, 6).unwrap();
        assert_eq!(r.case, DichotomyCase::A);
        assert_eq!(r.d, Some(3));
        assert_eq!(r.set, vec![1, 2, 3, 4, 5, 6]);
        verify_dichotomy(&fam, &r).unwrap();
    }

    #[test]
    fn schreier_gives_case_b() {
        let fam = HereditaryFamily::schreier(18);
        let r = dichotomy_search(&fam, 5).unwrap();
        assert_eq!(r.case, DichotomyCase::B);
        assert_eq!(r.set, vec![1, 2, 3, 4, 5]);
        let f: Vec<usize> = r.f.as_ref().unwrap().values().copied().collect();
        assert_eq!(f, vec![1, 2, 3, 4, 5]);
        verify_dichotomy(&fam, &r).unwrap();
    }

    #[test]
    fn schreier_is_never_case_a() {
        for n in 3..=18u64 {
            for m in 3..=(n as usize).min(10) {
                let fam = HereditaryFamily::schreier(n);
                let r = dichotomy_search(&fam, m).unwrap();
                assert_ne!(r.case, DichotomyCase::A, "n = {n}, m = {m}");
                verify_dichotomy(&fam, &r).unwrap();
            }
        }
    }

    #[test]
    fn empty_only_gives_d_zero() {
        let fam = HereditaryFamily::custom(4, "empty-only").unwrap();
        let r = dichotomy_search(&fam, 4).unwrap();
        assert_eq!((r.case, r.d), (DichotomyCase::A, Some(0)));
    }

    #[test]
    fn verifier_rejects_bad_certificates() {
        let fam = HereditaryFamily::schreier(18);
        let mut r = dichotomy_search(&fam, 5).unwrap();
        r.f.as_mut().unwrap().insert(2, 3);
        assert!(verify_dichotomy(&fam, &r).is_err());
        let bad = DichotomyResult { case: DichotomyCase::A, set: vec![1, 2, 3], d: Some(1), f: None, candidates_examined: 1 };
        assert!(verify_dichotomy(&fam, &bad).is_err());
    }

    #[test]
    fn caps() {
        assert!(matches!(
            dichotomy_search(&HereditaryFamily::schreier(30), 21),
            Err(Error::CapExceeded { .. })
        ));
        assert!(Coloring::from_fn(4, 6, |_| 0).is_err());
    }

    #[test]
    fn ramsey_examples() {
        let c = Coloring::from_fn(2, 10, |_| 1).unwrap();
        assert_eq!(ramsey_extract(&c, 4).unwrap(), Some(vec![1, 2, 3, 4]));
        let parity = Coloring::from_fn(2, 6, |s| ((s[0] + s[1]) % 2) as u8).unwrap();
        assert_eq!(ramsey_extract(&parity, 3).unwrap(), Some(vec![1, 3, 5]));
        let pentagon = Coloring::from_fn(2, 5, |s| {
            let gap = s[1] - s[0];
            u8::from(gap == 1 || gap == 4)
        })
        .unwrap();
        assert_eq!(ramsey_extract(&pentagon, 3).unwrap(), None);
    }

    #[test]
    fn coloring_file_format() {
        let text = "# pairs of {1,2,3}\n1 2 0\n1 3 0\n2 3 1\n";
        let c = Coloring::parse(text, 2, 3).unwrap();
        assert_eq!(c.color(&[2, 3]), 1);
        assert_eq!(ramsey_extract(&c, 2).unwrap(), Some(vec![1, 2]));
        assert!(Coloring::parse("1 2 0\n", 2, 3).is_err());
    }
}
