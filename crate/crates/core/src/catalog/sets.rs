//! Catalog sets: named bounded sets with known values of the set quantities.
//!
//! Set-level quantities (sup over all sequences in a set, weak closures) are
//! not finitely computable. Each record stores the known analytic values with
//! a short justification, plus the finite probes whose computed values must
//! be consistent with them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{lookup, IndexMap};
use crate::error::{Error, Result};
use crate::estimate::BoundKind;
use crate::rational::{int, parse_rational, rat, serde_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SetQuantity {
    #[serde(rename = "bs")]
    Bs,
    #[serde(rename = "wbs")]
    Wbs,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "wk")]
    Wk,
    #[serde(rename = "wck")]
    Wck,
    #[serde(rename = "swu")]
    Swu,
    #[serde(rename = "sm")]
    Sm,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "phi'")]
    PhiPrime,
}

impl SetQuantity {
    pub fn name(self) -> &'static str {
        match self {
            SetQuantity::Bs => "bs",
            SetQuantity::Wbs => "wbs",
            SetQuantity::Beta => "beta",
            SetQuantity::Chi => "chi",
            SetQuantity::Omega => "omega",
            SetQuantity::Wk => "wk",
            SetQuantity::Wck => "wck",
            SetQuantity::Swu => "swu",
            SetQuantity::Sm => "sm",
            SetQuantity::Phi => "phi",
            SetQuantity::PhiPrime => "phi'",
        }
    }

    /// Bounds valid for every subset of a unit ball.
    fn universal_interval(self) -> (Rational, Option<Rational>) {
        match self {
            SetQuantity::Bs | SetQuantity::Wbs | SetQuantity::Beta | SetQuantity::Phi | SetQuantity::PhiPrime => {
                (int(0), Some(int(2)))
            }
            SetQuantity::Chi | SetQuantity::Omega | SetQuantity::Wk | SetQuantity::Wck => (int(0), Some(int(1))),
            SetQuantity::Swu | SetQuantity::Sm => (int(0), None),
        }
    }
}

impl fmt::Display for SetQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticValue {
    pub quantity: SetQuantity,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub kind: BoundKind,
    /// Why the value holds.
    pub citation: String,
}

/// A member sequence: a catalog id, optionally passed through an index map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberRef {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<IndexMap>,
}

impl MemberRef {
    fn plain(id: &str) -> Self {
        MemberRef { id: id.to_string(), map: None }
    }

    fn mapped(id: &str, map: IndexMap) -> Self {
        MemberRef { id: id.to_string(), map: Some(map) }
    }

    pub fn label(&self) -> String {
        match &self.map {
            Some(m) => format!("{} o {m}", self.id),
            None => self.id.clone(),
        }
    }
}

/// A finite computation on a member sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "kebab-case")]
pub enum Probe {
    /// `‖y_m - y_n‖` for the Cesàro means `y`.
    CesaroDifference { n: u64, m: u64 },
    /// Cesàro window estimate at a horizon.
    Cca { horizon: u64 },
    /// Upper estimate of the infimum over subsequences of `cca`.
    Tcca { horizon: u64 },
    /// Upper estimate of the infimum over subsequences of `ca`.
    Wca { horizon: u64 },
    /// Half of the block-separation upper bound.
    HalfAsep { horizon: u64, max_block: u64 },
}

/// A probe whose value must not exceed the stated upper end for `target`
/// (plus `slack`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSpec {
    pub member: MemberRef,
    pub probe: Probe,
    pub target: SetQuantity,
    #[serde(with = "serde_rational")]
    pub slack: Rational,
    /// Why the probe value sits below the target.
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSetRecord {
    pub id: String,
    pub description: String,
    pub members: Vec<MemberRef>,
    pub analytic: Vec<AnalyticValue>,
    pub evidence: Vec<EvidenceSpec>,
}

/// `lo · left ≤ right · hi`-type relations between set quantities.
pub const CHAIN: &[(SetQuantity, (i64, i64), SetQuantity, (i64, i64))] = &[
    (SetQuantity::Wck, (1, 1), SetQuantity::Bs, (1, 1)),
    (SetQuantity::Wbs, (1, 1), SetQuantity::Bs, (1, 1)),
    (SetQuantity::Bs, (1, 1), SetQuantity::Beta, (1, 1)),
    (SetQuantity::Omega, (1, 1), SetQuantity::Chi, (1, 1)),
    (SetQuantity::Chi, (1, 1), SetQuantity::Beta, (1, 1)),
    (SetQuantity::Beta, (1, 1), SetQuantity::Chi, (2, 1)),
    (SetQuantity::Sm, (1, 1), SetQuantity::PhiPrime, (1, 2)),
    (SetQuantity::PhiPrime, (1, 2), SetQuantity::Wbs, (1, 1)),
    (SetQuantity::PhiPrime, (1, 1), SetQuantity::Phi, (1, 1)),
    (SetQuantity::Phi, (1, 2), SetQuantity::Bs, (1, 1)),
    (SetQuantity::Wbs, (1, 2), SetQuantity::Swu, (1, 1)),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub relation: String,
    pub holds: bool,
}

impl CatalogSetRecord {
    /// The tightest `[lo, hi]` implied by the stored values and the unit-ball bounds.
    pub fn interval(&self, q: SetQuantity) -> (Rational, Option<Rational>) {
        let (mut lo, mut hi) = q.universal_interval();
        for a in self.analytic.iter().filter(|a| a.quantity == q) {
            if matches!(a.kind, BoundKind::Exact | BoundKind::Lower) && a.value > lo {
                lo = a.value.clone();
            }
            if matches!(a.kind, BoundKind::Exact | BoundKind::Upper) && hi.as_ref().map_or(true, |h| &a.value < h) {
                hi = Some(a.value.clone());
            }
        }
        (lo, hi)
    }

    pub fn stated(&self, q: SetQuantity) -> Option<&AnalyticValue> {
        self.analytic.iter().find(|a| a.quantity == q)
    }

    /// Checks the stored values against each other and the known inequalities.
    pub fn chain_checks(&self) -> Vec<ChainCheck> {
        let mut out = Vec::new();
        let mentioned: Vec<SetQuantity> = self.analytic.iter().map(|a| a.quantity).collect();
        for q in &mentioned {
            let (lo, hi) = self.interval(*q);
            if let Some(h) = hi {
                out.push(ChainCheck { relation: format!("{q} interval is nonempty"), holds: lo <= h });
            }
        }
        for (a, (an, ad), b, (bn, bd)) in CHAIN {
            if !mentioned.contains(a) && !mentioned.contains(b) {
                continue;
            }
            let (lo, _) = self.interval(*a);
            let (_, hi) = self.interval(*b);
            let Some(hi) = hi else { continue };
            let left = lo * rat(*an, *ad);
            let right = hi * rat(*bn, *bd);
            let fa = if (*an, *ad) == (1, 1) { String::new() } else { format!("{an}/{ad} ") };
            let fb = if (*bn, *bd) == (1, 1) { String::new() } else { format!("{bn}/{bd} ") };
            out.push(ChainCheck { relation: format!("{fa}{a} <= {fb}{b}"), holds: left <= right });
        }
        out
    }
}

fn value(quantity: SetQuantity, value: Rational, kind: BoundKind, citation: &str) -> AnalyticValue {
    AnalyticValue { quantity, value, kind, citation: citation.to_string() }
}

fn evidence(member: MemberRef, probe: Probe, target: SetQuantity, slack: Rational, reason: &str) -> EvidenceSpec {
    EvidenceSpec { member, probe, target, slack, reason: reason.to_string() }
}

pub const SET_IDS: &[&str] = &[
    "ball-l1",
    "ball-c0",
    "ball-c",
    "ball-schreier",
    "omega-set:<n>",
    "schreier-pair-set:<eps>",
];


pub fn set_record(id: &str) -> Result<CatalogSetRecord> {
    use BoundKind::{Exact, Lower, Upper};
    use SetQuantity::*;
    let (base, param) = match id.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (id, None),
    };
    let cube = || IndexMap::Cube;
    let record = |description: &str, members, analytic, evidence| CatalogSetRecord {
        id: id.to_string(),
        description: description.to_string(),
        members,
        analytic,
        evidence,
    };
    Ok(match (base, param) {
        ("ball-l1", None) => record(
            "closed unit ball of l1",
            vec![MemberRef::plain("ell1-basis")],
            vec![
                value(Bs, int(2), Exact, "the unit vector basis satisfies ||y_m - y_n|| >= 2(1 - n/m) for its Cesàro means, along every subsequence; the diameter gives the upper bound"),
                value(Wbs, int(0), Exact, "weakly convergent sequences in l1 converge in norm (Schur property)"),
                value(Wck, int(1), Exact, "l1 is not reflexive and the ball has radius one"),
                value(Beta, int(2), Exact, "distinct unit vectors are at distance 2"),
            ],
            vec![
                evidence(MemberRef::plain("ell1-basis"), Probe::CesaroDifference { n: 20, m: 400 }, Bs, int(0), "a Cesàro difference of a sequence with the l1 lower estimate along all subsequences bounds bs from below"),
                evidence(MemberRef::plain("ell1-basis"), Probe::HalfAsep { horizon: 10, max_block: 5 }, Bs, int(0), "half the block separation is at most cca"),
                evidence(MemberRef::plain("ell1-basis"), Probe::Wca { horizon: 20 }, Beta, int(0), "wca of a member sequence is at most beta"),
            ],
        ),
        ("ball-c0", None) => record(
            "closed unit ball of c0",
            vec![
                MemberRef::plain("c0-basis"),
                MemberRef::plain("c0-summing"),
                MemberRef::plain("c0-summing-flip"),
            ],
            vec![
                value(Bs, int(1), Exact, "a diagonal subsequence built from the pointwise limit x has Cesàro means within ||x|| <= 1 of each other; e_1 + ... + e_k gives the lower bound"),
                value(Wbs, int(0), Exact, "c0 has the weak Banach-Saks property"),
                value(Wck, int(1), Exact, "c0 is not reflexive; e_1 + ... + e_k witnesses the value"),
                value(Beta, int(2), Exact, "e_1 + ... + e_k - e_{k+1} has all pairwise distances 2"),
            ],
            vec![
                evidence(MemberRef::plain("c0-summing"), Probe::Tcca { horizon: 500 }, Bs, rat(1, 50), "the diagonal extraction realizes the construction behind bs <= 1; slack covers the finite horizon"),
                evidence(MemberRef::plain("c0-summing-flip"), Probe::Wca { horizon: 30 }, Beta, int(0), "wca of a member sequence is at most beta"),
            ],
        ),
        ("ball-c", None) => record(
            "closed unit ball of c, the convergent sequences with the sup norm",
            vec![MemberRef::plain("c-signflip")],
            vec![
                value(Bs, int(2), Exact, "x_k = 1 on 1..k and -1 afterwards: along every subsequence the Cesàro means satisfy y_n(k_m + 1) = 1 - 2m/n and y_m(k_m + 1) = -1"),
                value(Wbs, int(0), Exact, "c is isomorphic to c0 and has the weak Banach-Saks property"),
            ],
            vec![evidence(MemberRef::plain("c-signflip"), Probe::CesaroDifference { n: 10, m: 1000 }, Bs, int(0), "the Cesàro difference lower bound holds along every subsequence")],
        ),
        ("ball-schreier", None) => record(
            "closed unit ball of the Schreier space",
            vec![MemberRef::plain("schreier-basis")],
            vec![
                value(Wbs, int(2), Exact, "the unit vector basis is weakly null and generates an l1 spreading model with constant 1, so the space fails the weak Banach-Saks property and the unit-ball value is 2"),
                value(Bs, int(2), Exact, "bs >= wbs = 2 and the diameter bound"),
                value(Beta, int(2), Exact, "distinct unit vectors are at distance 2"),
            ],
            vec![evidence(MemberRef::mapped("schreier-basis", cube()), Probe::CesaroDifference { n: 110, m: 1010 }, Bs, int(0), "Cesàro differences of the k^3 subsequence approach 2 sm along every further subsequence")],
        ),
        ("omega-set", Some(p)) => {
            let n: u64 = p.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad block index in `{id}`")))?;
            if n == 0 {
                return Err(Error::InvalidArgument("block index starts at 1".into()));
            }
            let member = format!("omega-example:{n}");
            let r = n as i64;
            record(
                "unit vectors of block n in the l1-sum of max{||x||_1/n, ||x||_inf}",
                vec![MemberRef::plain(&member)],
                vec![
                    value(Bs, rat(2, r), Upper, "every one-to-one sequence in the set has averages of norm max{1/n, 1/m}, so cca <= 2/n"),
                    value(Beta, int(1), Lower, "distinct members are at distance at least 1"),
                    value(Chi, rat(1, 2), Lower, "beta <= 2 chi"),
                    value(Omega, rat(1, 2), Lower, "the space has the Schur property, so omega = chi"),
                ],
                vec![evidence(MemberRef::plain(&member), Probe::Cca { horizon: 10 * n + 20 }, Bs, int(0), "Cesàro windows of a one-to-one member sequence stay below 2/n once the burn-in exceeds n/2")],
            )
        }
        ("schreier-pair-set", Some(p)) => {
            let eps = parse_rational(p)?;
            if eps.is_negative() || eps > int(1) {
                return Err(Error::InvalidArgument("eps must lie in [0, 1]".into()));
            }
            let member = format!("schreier-sum-ell1-pair:{p}");
            let mut analytic = vec![
                value(Omega, eps.clone(), Upper, "the set lies within eps of the weakly compact set {(e_k, 0)}"),
                value(Bs, int(2), Exact, "bs cannot drop below the eps = 0 set, whose members generate an l1 spreading model with constant 1; the diameter bounds it above"),
            ];
            if !eps.is_zero() {
                analytic.push(value(Wbs, int(0), Exact, "for eps > 0 the members are equivalent to the l1 basis, so only eventually constant sequences converge weakly"));
            }
            record(
                "pairs (e_k, eps e_k) in the sup-sum of the Schreier space and l1",
                vec![MemberRef::plain(&member)],
                analytic,
                vec![evidence(MemberRef::mapped(&member, cube()), Probe::CesaroDifference { n: 110, m: 1010 }, Bs, int(0), "Cesàro differences of the k^3 subsequence bound bs from below")],
            )
        }
        _ => return Err(Error::InvalidArgument(format!("unknown catalog set `{id}`"))),
    })
}

/// Every registered record at its default parameters.
pub fn default_records() -> Vec<CatalogSetRecord> {
    ["ball-l1", "ball-c0", "ball-c", "ball-schreier", "omega-set:3", "schreier-pair-set:1/10"]
        .iter()
        .map(|id| set_record(id).expect("registered id"))
        .collect()
}

/// Members resolve to catalog entries.
pub fn check_members(record: &CatalogSetRecord) -> Result<BTreeMap<String, super::CatalogEntry>> {
    let mut out = BTreeMap::new();
    for m in record.members.iter().chain(record.evidence.iter().map(|e| &e.member)) {
        out.insert(m.id.clone(), lookup(&m.id)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_value_has_a_citation() {
        for r in default_records() {
            assert!(r.analytic.iter().all(|a| !a.citation.is_empty()), "{}", r.id);
            check_members(&r).unwrap();
        }
    }

    #[test]
    fn ball_values() {
        let l1 = set_record("ball-l1").unwrap();
        assert_eq!(l1.interval(SetQuantity::Bs), (int(2), Some(int(2))));
        assert_eq!(l1.interval(SetQuantity::Wbs), (int(0), Some(int(0))));
        let c0 = set_record("ball-c0").unwrap();
        assert_eq!(c0.stated(SetQuantity::Bs).unwrap().value, int(1));
        let c = set_record("ball-c").unwrap();
        assert_eq!(c.stated(SetQuantity::Bs).unwrap().value, int(2));
    }

    #[test]
    fn chains_hold_for_all_records() {
        for r in default_records().into_iter().chain([set_record("omega-set:1").unwrap()]) {
            for c in r.chain_checks() {
                assert!(c.holds, "{}: {}", r.id, c.relation);
            }
        }
    }

    #[test]
    fn inconsistent_values_are_caught() {
        let mut r = set_record("ball-c0").unwrap();
        r.analytic.push(value(SetQuantity::Wbs, int(3), BoundKind::Lower, "bogus"));
        assert!(r.chain_checks().iter().any(|c| !c.holds));
    }

    #[test]
    fn omega_set_bounds() {
        let r = set_record("omega-set:4").unwrap();
        assert_eq!(r.interval(SetQuantity::Bs), (int(0), Some(rat(1, 2))));
        assert_eq!(r.interval(SetQuantity::Chi).0, rat(1, 2));
    }
}
