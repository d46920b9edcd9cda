//! The ℓ1-spreading constant on a finite window:
//! `min over admissible F of min{‖Σ_{i∈F} α_i (x_i - x)‖ : Σ|α_i| = 1}`.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{BoundKind, Quantity, QuantityEstimate, Witness};
use crate::admissible::{maximal_sets, Admissibility};
use crate::catalog::SequenceSpec;
use crate::error::{Error, Result};
use crate::polytope::{crosspolytope_auto, positive_face_min, Method, EPIGRAPH_SET_CAP};
use crate::rational::{self, serde_rational, serde_rational_vec, Rational, Value};
use crate::space::{SpaceDescriptor, FLOAT_TOLERANCE};
use crate::vector::{CoordIndex, FiniteVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadingStrategy {
    /// Every maximal set of the window under the rule.
    Enumeration,
    /// The terms are disjoint translates of one block; the compressed sets
    /// `{s, …, s+d-1}` are the worst cases.
    TranslatedBlocks,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetValue {
    pub set: Vec<u64>,
    pub value: Value,
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadingUpper {
    pub estimate: QuantityEstimate,
    pub strategy: SpreadingStrategy,
    pub sets: Vec<SetValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadingCheck {
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    pub horizon: u64,
    pub rule: Admissibility,
    pub pass: bool,
    /// True when every set value is exact, so a pass proves the inequality up to the horizon.
    pub certified: bool,
    pub strategy: SpreadingStrategy,
    pub checked_sets: usize,
    pub violations: Vec<SetValue>,
}

/// `x_i - x` for the requested indices, with `x` the declared weak limit (or 0).
pub fn spreading_vectors(spec: &SequenceSpec, indices: &[u64]) -> Vec<FiniteVector> {
    let xs = spec.generate_many(indices);
    match &spec.weak_limit {
        Some(x) => xs.into_iter().map(|v| v.sub(x)).collect(),
        None => xs,
    }
}

fn disjoint(vs: &[FiniteVector]) -> bool {
    if vs.iter().any(|v| !v.tail().is_zero()) {
        return false;
    }
    let mut seen: BTreeSet<&CoordIndex> = BTreeSet::new();
    vs.iter().all(|v| v.entries().keys().all(|i| seen.insert(i)))
}

/// Flat, tail-free, nonzero, consecutive and equal up to translation.
fn translated_blocks(space: &SpaceDescriptor, vs: &[FiniteVector]) -> bool {
    let flat_space = matches!(
        space,
        SpaceDescriptor::Lp { .. }
            | SpaceDescriptor::Sup
            | SpaceDescriptor::C
            | SpaceDescriptor::WeightedAlpha { .. }
            | SpaceDescriptor::Schreier
    );
    if !flat_space || vs.is_empty() || vs.iter().any(|v| v.is_zero() || v.depth() != Some(1) || !v.tail().is_zero()) {
        return false;
    }
    let pattern = |v: &FiniteVector| -> Vec<(u64, Rational)> {
        let start = v.entries().keys().next().expect("nonzero").head();
        v.entries().iter().map(|(i, x)| (i.head() - start, x.clone())).collect()
    };
    let first = pattern(&vs[0]);
    let ordered = vs.windows(2).all(|w| {
        let end = w[0].entries().keys().next_back().expect("nonzero").head();
        let start = w[1].entries().keys().next().expect("nonzero").head();
        end < start
    });
    ordered && vs.iter().all(|v| pattern(v) == first)
}

fn contiguous(window: &[u64]) -> Option<(u64, u64)> {
    let (&a, &b) = (window.first()?, window.last()?);
    (b - a + 1 == window.len() as u64).then_some((a, b))
}

fn candidate_sets(window: &[u64], rule: Admissibility, structural: bool) -> Result<Vec<Vec<u64>>> {
    if structural {
        let (a, b) = contiguous(window).expect("checked by the caller");
        return Ok(match rule {
            Admissibility::Full => vec![window.to_vec()],
            Admissibility::Schreier => (1..)
                .map(|d: u64| {
                    let s = a.max(d);
                    (s, s + d - 1)
                })
                .take_while(|&(_, end)| end <= b)
                .map(|(s, end)| (s..=end).collect())
                .collect(),
        });
    }
    maximal_sets(window, rule, EPIGRAPH_SET_CAP)
}

fn evaluate_sets(
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    window: &[u64],
    rule: Admissibility,
) -> Result<(SpreadingStrategy, Vec<SetValue>)> {
    if window.is_empty() || window[0] == 0 || window.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("window must be a nonempty increasing list of positive indices".into()));
    }
    let vectors = spreading_vectors(spec, window);
    let structural = contiguous(window).is_some() && translated_blocks(space, &vectors);
    let strategy = if structural { SpreadingStrategy::TranslatedBlocks } else { SpreadingStrategy::Enumeration };
    let sets = candidate_sets(window, rule, structural)?;
    let values = sets
        .into_par_iter()
        .map(|set| -> Result<SetValue> {
            let vs: Vec<FiniteVector> = set
                .iter()
                .map(|k| vectors[window.binary_search(k).expect("set drawn from window")].clone())
                .collect();
            let r = if space.is_polyhedral() && disjoint(&vs) {
                positive_face_min(space, &vs)?
            } else {
                crosspolytope_auto(space, &vs)?
            };
            Ok(SetValue { set, value: r.value, alpha: r.alpha, method: r.method })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((strategy, values))
}

/// Upper bound for the spreading constant from the admissible sets of `window`.
pub fn sm_delta_upper(
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    window: &[u64],
    rule: Admissibility,
) -> Result<SpreadingUpper> {
    let (strategy, sets) = evaluate_sets(space, spec, window, rule)?;
    let mut best: Option<&SetValue> = None;
    for s in &sets {
        // Sets arrive in lexicographic order; ties keep the first.
        if best.map_or(true, |b| s.value < b.value) {
            best = Some(s);
        }
    }
    let best = best.expect("every window has an admissible set");
    let kind = if sets.iter().all(|s| s.method == Method::FaceLpExact) { BoundKind::Upper } else { BoundKind::Heuristic };
    let mut est = QuantityEstimate::new(Quantity::Sm, best.value.clone(), kind, *window.last().unwrap())
        .param("window", format!("{}..{} ({} indices)", window[0], window.last().unwrap(), window.len()))
        .param("rule", format!("{rule:?}").to_lowercase())
        .param("sets", sets.len());
    est.witness = Some(Witness::Coefficients { set: best.set.clone(), alpha: best.alpha.clone() });
    Ok(SpreadingUpper { estimate: est, strategy, sets })
}

/// Checks `‖Σ_F α_i (x_i - x)‖ ≥ δ Σ|α_i|` for every admissible `F ⊂ {1..N}`.
pub fn sm_delta_check(
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    delta: &Rational,
    horizon: u64,
    rule: Admissibility,
) -> Result<SpreadingCheck> {
    if *delta <= Rational::zero() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    if horizon == 0 {
        return Err(Error::HorizonTooSmall { horizon, min: 1 });
    }
    let window: Vec<u64> = (1..=horizon).collect();
    let (strategy, sets) = evaluate_sets(space, spec, &window, rule)?;
    let delta_f = rational::to_f64(delta);
    let below = |v: &Value| match v {
        Value::Exact(r) => r < delta,
        Value::Approx(x) => *x < delta_f - FLOAT_TOLERANCE,
    };
    let certified = sets.iter().all(|s| s.method == Method::FaceLpExact);
    let checked_sets = sets.len();
    let violations: Vec<SetValue> = sets.into_iter().filter(|s| below(&s.value)).collect();
    Ok(SpreadingCheck {
        delta: delta.clone(),
        horizon,
        rule,
        pass: violations.is_empty(),
        certified,
        strategy,
        checked_sets,
        violations,
    })
}

#[cfg(test)]
fn unit_sum(alpha: &[Rational]) -> bool {
    use num_traits::One;
    alpha.iter().map(rational::abs).sum::<Rational>().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, Generator};
    use crate::rational::{int, rat};
    use crate::space::norm_exact;

    fn window(n: u64) -> Vec<u64> {
        (1..=n).collect()
    }

    #[test]
    fn schreier_basis_constant_is_one() {
        let e = lookup("schreier-basis").unwrap();
        let r = sm_delta_upper(&e.space, &e.spec, &window(10), Admissibility::Schreier).unwrap();
        assert_eq!(r.estimate.value, Value::Exact(int(1)));
        assert_eq!(r.strategy, SpreadingStrategy::TranslatedBlocks);
    }

    #[test]
    fn c0_basis_constant_is_one_fifth() {
        let e = lookup("c0-basis").unwrap();
        let r = sm_delta_upper(&e.space, &e.spec, &window(10), Admissibility::Schreier).unwrap();
        assert_eq!(r.estimate.value, Value::Exact(rat(1, 5)));
        assert_eq!(
            r.estimate.witness,
            Some(Witness::Coefficients { set: vec![5, 6, 7, 8, 9], alpha: vec![rat(1, 5); 5] })
        );
    }

    #[test]
    fn enumeration_agrees_with_structure() {
        // Reversed unit vectors are not ordered translates, so every maximal set is solved.
        let e = lookup("c0-basis").unwrap();
        let vectors: Vec<FiniteVector> = (1..=10).rev().map(FiniteVector::basis).collect();
        let explicit = SequenceSpec::new(Generator::Explicit { vectors }, int(1));
        let r = sm_delta_upper(&e.space, &explicit, &window(10), Admissibility::Schreier).unwrap();
        assert_eq!(r.strategy, SpreadingStrategy::Enumeration);
        assert_eq!(r.sets.len(), 56);
        assert_eq!(r.estimate.value, Value::Exact(rat(1, 5)));
    }

    #[test]
    fn ell1_basis_constant_is_one() {
        let e = lookup("ell1-basis").unwrap();
        let r = sm_delta_upper(&e.space, &e.spec, &window(6), Admissibility::Schreier).unwrap();
        assert_eq!(r.estimate.value, Value::Exact(int(1)));
    }

    #[test]
    fn delta_checks() {
        let s = lookup("schreier-basis").unwrap();
        assert!(sm_delta_check(&s.space, &s.spec, &int(1), 12, Admissibility::Schreier).unwrap().pass);
        let c0 = lookup("c0-basis").unwrap();
        let check = sm_delta_check(&c0.space, &c0.spec, &rat(1, 2), 10, Admissibility::Schreier).unwrap();
        assert!(!check.pass);
        assert_eq!(check.violations[0].set, vec![3, 4, 5]);
        assert_eq!(check.violations[0].value, Value::Exact(rat(1, 3)));
        let l1 = lookup("ell1-basis").unwrap();
        assert!(sm_delta_check(&l1.space, &l1.spec, &rat(1, 1_000_000_000), 10, Admissibility::Full).unwrap().pass);
    }

    #[test]
    fn witnesses_reevaluate() {
        let e = lookup("c0-summing-flip").unwrap();
        let r = sm_delta_upper(&e.space, &e.spec, &window(8), Admissibility::Schreier).unwrap();
        for s in &r.sets {
            assert!(unit_sum(&s.alpha));
            let vs = spreading_vectors(&e.spec, &s.set);
            let mut acc = FiniteVector::zero();
            for (a, v) in s.alpha.iter().zip(&vs) {
                acc = acc.add(&v.scale(a));
            }
            assert_eq!(Value::Exact(norm_exact(&e.space, &acc).unwrap()), s.value);
        }
    }
}
