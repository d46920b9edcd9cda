//! Window profiles `D(m, N) = max{‖x_k - x_l‖ : m ≤ k, l ≤ N}` and the
//! Cauchy-defect estimates built on them.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{margin, BoundKind, Quantity, QuantityEstimate, Witness};
use crate::catalog::{lookup, IndexMap, SequenceSpec, Transform};
use crate::dense::DenseFamily;
use crate::error::{Error, Result};
use crate::rational::{self, rat, Rational, Value};
use crate::space::{norm, SpaceDescriptor};
use crate::vector::FiniteVector;

/// Subsequences whose last term has a larger support are skipped.
pub const SUPPORT_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowProfile {
    pub horizon: u64,
    /// `values[m - 1] = D(m, N)`.
    pub values: Vec<Value>,
    /// A pair `(k, l)`, `m ≤ k < l`, attaining `D(m, N)`; `None` when `D = 0`.
    pub witnesses: Vec<Option<(u64, u64)>>,
}

impl WindowProfile {
    pub fn at(&self, m: u64) -> &Value {
        &self.values[(m - 1) as usize]
    }
}

pub fn window_profile(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<WindowProfile> {
    if horizon < 2 {
        return Err(Error::HorizonTooSmall { horizon, min: 2 });
    }
    window_profile_of(space, spec.prefix(horizon))
}

/// Profile of an explicit finite sequence.
pub fn window_profile_of(space: &SpaceDescriptor, xs: Vec<FiniteVector>) -> Result<WindowProfile> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::HorizonTooSmall { horizon: n as u64, min: 2 });
    }
    for x in &xs {
        norm(space, x)?;
    }
    let fam = DenseFamily::new(&xs);
    drop(xs);
    let exact = space.is_polyhedral();

    let row_f64 = |k: usize| -> Result<Vec<f64>> {
        (k + 1..n)
            .map(|l| {
                let (w, t) = fam.diff_f64(k, l);
                fam.norm_dense_f64(space, &w, t)
            })
            .collect()
    };
    let row_max: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| row_f64(k).map(|r| r.into_iter().fold(0.0, f64::max)))
        .collect::<Result<_>>()?;

    // Suffix maxima of the float rows decide which rows need exact confirmation.
    let mut suffix = vec![0.0f64; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1].max(row_max[k]);
    }
    let needed: Vec<usize> = (0..n)
        .filter(|&k| row_max[k] > 0.0 && row_max[k] >= suffix[k + 1] - margin(suffix[k + 1]))
        .collect();

    // Exact row maximum with the smallest attaining l.
    let confirmed: Vec<(usize, Value, usize)> = needed
        .par_iter()
        .map(|&k| -> Result<(usize, Value, usize)> {
            let row = row_f64(k)?;
            let cut = row_max[k] - margin(row_max[k]);
            let mut best: Option<(Value, usize)> = None;
            for (off, &f) in row.iter().enumerate() {
                if f < cut {
                    continue;
                }
                let l = k + 1 + off;
                let v = if exact {
                    let (w, t) = fam.diff_exact(k, l);
                    Value::Exact(fam.norm_dense_exact(space, &w, &t)?)
                } else {
                    Value::Approx(f)
                };
                if best.as_ref().map_or(true, |(b, _)| v > *b) {
                    best = Some((v, l));
                }
            }
            let (v, l) = best.expect("the row maximum is a candidate");
            Ok((k, v, l))
        })
        .collect::<Result<_>>()?;

    let mut values = vec![Value::zero(); n];
    let mut witnesses = vec![None; n];
    let mut current = Value::zero();
    let mut current_pair = None;
    let mut iter = confirmed.into_iter().rev().peekable();
    for k in (0..n).rev() {
        if let Some((_, v, l)) = iter.next_if(|(kk, _, _)| *kk == k) {
            // Ties go to the smaller k.
            if v > Value::zero() && v >= current {
                current = v;
                current_pair = Some((k as u64 + 1, l as u64 + 1));
            }
        }
        values[k] = current.clone();
        witnesses[k] = current_pair;
    }
    Ok(WindowProfile { horizon: n as u64, values, witnesses })
}

/// Exact value of the Cauchy defect when it follows from the construction.
pub fn tail_certificate(space: &SpaceDescriptor, spec: &SequenceSpec) -> Option<(Rational, String)> {
    if spec.is_eventually_convergent() {
        return Some((Rational::zero(), "norm-convergent sequence".into()));
    }
    if !spec.transforms.iter().all(|t| matches!(t, Transform::Subsequence { .. })) {
        return None;
    }
    let entry = lookup(&spec.generator.catalog_id()?).ok()?;
    if &entry.space != space {
        return None;
    }
    let d = entry.pairwise_distance?;
    let note = format!("all pairwise distances equal {}", rational::format_rational(&d));
    Some((d, note))
}

fn burn_in(horizon: u64) -> u64 {
    (horizon / 20).max(1)
}

fn defect_estimate(quantity: Quantity, space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<QuantityEstimate> {
    let profile = window_profile(space, spec, horizon)?;
    let m = burn_in(horizon);
    let mut est = QuantityEstimate::new(quantity, profile.at(m).clone(), BoundKind::Heuristic, horizon).param("burn_in", m);
    est.witness = profile.witnesses[(m - 1) as usize].map(|(k, l)| Witness::IndexPair { k, l });
    if let Some((v, note)) = tail_certificate(space, spec) {
        est.value = Value::Exact(v);
        est.bound_kind = BoundKind::Exact;
        est = est.param("certificate", note);
    }
    est.profile = Some(profile.values);
    Ok(est)
}

/// Cauchy defect of `(x_k)`: `D(m*, N)` with burn-in `m* = max(1, ⌊N/20⌋)`.
pub fn ca_estimate(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<QuantityEstimate> {
    defect_estimate(Quantity::Ca, space, spec, horizon)
}

/// Cauchy defect of the Cesàro means.
pub fn cca_estimate(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<QuantityEstimate> {
    defect_estimate(Quantity::Cca, space, &spec.cesaro(), horizon)
}

/// `‖y_m - y_n‖` for the Cesàro means `y_k = (1/k) Σ_{i≤k} x_i`.
pub fn cesaro_difference(space: &SpaceDescriptor, spec: &SequenceSpec, n: u64, m: u64) -> Result<Value> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("Cesàro indices start at 1".into()));
    }
    let ys = spec.cesaro().generate_many(&[n, m]);
    norm(space, &ys[1].sub(&ys[0]))
}

/// Greedy diagonal subsequence of a flat sequence, following its pointwise
/// limit (estimated by the last pool term).
///
/// With `k_1 = 1`, `p_n` is the first coordinate from which `|x_k(i)| < ε`
/// for all `k ≤ k_n`, and `k_{n+1}` the first index after which every term
/// is within `ε` of the limit on coordinates `i ≤ p_n`. Returns `None` when
/// the pool runs out before `horizon` indices are chosen.
pub fn diagonal_extraction(spec: &SequenceSpec, horizon: u64, pool: u64, eps: &Rational) -> Option<IndexMap> {
    if horizon == 0 || pool < horizon {
        return None;
    }
    let xs = spec.prefix(pool);
    if xs.iter().any(|x| x.depth().is_some_and(|d| d != 1)) {
        return None;
    }
    let limit = xs.last().expect("pool is nonempty").clone();
    // Largest coordinate where |x_k(i)| ≥ ε; None when the tail is that large.
    let reach: Vec<Option<u64>> = xs
        .iter()
        .map(|x| {
            if x.tail().abs() >= *eps {
                return None;
            }
            Some(x.entries().iter().filter(|(_, v)| v.abs() >= *eps).map(|(i, _)| i.head()).max().unwrap_or(0))
        })
        .collect();
    // First coordinate where x_k is ε-far from the limit.
    let far: Vec<u64> = xs
        .iter()
        .map(|x| {
            let d = x.sub(&limit);
            if d.tail().abs() >= *eps {
                return 1;
            }
            d.entries().iter().filter(|(_, v)| v.abs() >= *eps).map(|(i, _)| i.head()).min().unwrap_or(u64::MAX)
        })
        .collect();
    let mut suffix_far = vec![u64::MAX; xs.len() + 1];
    for k in (0..xs.len()).rev() {
        suffix_far[k] = suffix_far[k + 1].min(far[k]);
    }
    let mut chosen: Vec<u64> = vec![1];
    let mut p: u64 = 0;
    let mut last = 0usize;
    while (chosen.len() as u64) < horizon {
        let k_n = *chosen.last().unwrap() as usize;
        for r in &reach[last..k_n] {
            p = p.max(r.map(|r| r + 1)?);
        }
        last = k_n;
        let next = (k_n..xs.len() - 1).find(|&k| suffix_far[k] > p)?;
        chosen.push(next as u64 + 1);
    }
    Some(IndexMap::List { indices: chosen })
}

/// The registered subsequence family: identity, k², k³ and the diagonal
/// extraction, minus members whose terms at the horizon are too large.
pub fn subsequence_family(spec: &SequenceSpec, horizon: u64) -> (Vec<(String, IndexMap)>, Vec<String>) {
    let mut maps = vec![
        ("identity".to_string(), IndexMap::Identity),
        ("square".to_string(), IndexMap::Square),
        ("cube".to_string(), IndexMap::Cube),
    ];
    let pool = (2 * horizon).max(horizon + 1);
    if let Some(m) = diagonal_extraction(spec, horizon, pool, &rat(1, 10)) {
        maps.push(("diagonal".to_string(), m));
    }
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for (label, map) in maps {
        let fits = map.try_apply(horizon).is_some()
            && spec
                .subsequence(map.clone())
                .map(|s| match s.support_bound(horizon) {
                    Some(b) => b <= SUPPORT_CAP as u64,
                    None => s.generate(horizon).support_len() <= SUPPORT_CAP,
                })
                .unwrap_or(false);
        if fits {
            kept.push((label, map));
        } else {
            skipped.push(label);
        }
    }
    (kept, skipped)
}

fn infimum_estimate(
    quantity: Quantity,
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    horizon: u64,
    inner: fn(&SpaceDescriptor, &SequenceSpec, u64) -> Result<QuantityEstimate>,
) -> Result<QuantityEstimate> {
    let (family, skipped) = subsequence_family(spec, horizon);
    let mut best: Option<(String, QuantityEstimate)> = None;
    for (label, map) in family {
        let est = inner(space, &spec.subsequence(map)?, horizon)?;
        if best.as_ref().map_or(true, |(_, b)| est.value < b.value) {
            best = Some((label, est));
        }
    }
    let (label, inner_est) = best.ok_or_else(|| Error::CapExceeded {
        what: "subsequence family members within the support cap",
        actual: 0,
        cap: SUPPORT_CAP,
    })?;
    // Exact only when every subsequence provably shares the value.
    let kind = match (quantity, tail_certificate(space, spec)) {
        (Quantity::Wca, Some(_)) => BoundKind::Exact,
        (Quantity::Tcca, Some((v, _))) if v.is_zero() => BoundKind::Exact,
        _ => BoundKind::Upper,
    };
    let mut est = QuantityEstimate::new(quantity, inner_est.value, kind, horizon)
        .param("family", "identity, square, cube, diagonal")
        .param("selected", &label);
    if !skipped.is_empty() {
        est = est.param("skipped", skipped.join(", "));
    }
    est.witness = Some(Witness::Subsequence { label, inner: inner_est.witness.map(Box::new) });
    est.profile = inner_est.profile;
    Ok(est)
}

/// Upper estimate of `wca = inf over subsequences of ca`, over the registered family.
pub fn wca_estimate(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<QuantityEstimate> {
    infimum_estimate(Quantity::Wca, space, spec, horizon, ca_estimate)
}

/// Upper estimate of `tcca = inf over subsequences of cca`, over the registered family.
pub fn tcca_estimate(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64) -> Result<QuantityEstimate> {
    infimum_estimate(Quantity::Tcca, space, spec, horizon, cca_estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Generator;
    use crate::rational::int;

    fn entry(id: &str) -> (SpaceDescriptor, SequenceSpec) {
        let e = lookup(id).unwrap();
        (e.space, e.spec)
    }

    #[test]
    fn constant_sequence_profile_is_zero() {
        let v = FiniteVector::basis(2).scale(&rat(3, 2));
        let spec = SequenceSpec::new(Generator::Explicit { vectors: vec![v] }, int(2));
        let p = window_profile(&SpaceDescriptor::l1(), &spec, 10).unwrap();
        assert!(p.values.iter().all(|v| *v == Value::zero()));
        let est = ca_estimate(&SpaceDescriptor::l1(), &spec, 10).unwrap();
        assert_eq!(est.bound_kind, BoundKind::Exact);
    }

    #[test]
    fn ell1_basis_profile() {
        let (space, spec) = entry("ell1-basis");
        let p = window_profile(&space, &spec, 10).unwrap();
        for m in 1..10 {
            assert_eq!(p.at(m), &Value::Exact(int(2)));
        }
        assert_eq!(p.at(10), &Value::zero());
        assert_eq!(p.witnesses[0], Some((1, 2)));
        assert!(window_profile(&space, &spec, 1).is_err());
    }

    #[test]
    fn profile_matches_brute_force() {
        let (space, spec) = entry("c-signflip");
        let spec = spec.cesaro();
        let xs = spec.prefix(12);
        let p = window_profile(&space, &spec, 12).unwrap();
        for m in 1..=12usize {
            let mut best = rational::int(0);
            for k in m - 1..12 {
                for l in k + 1..12 {
                    let d = crate::space::norm_exact(&space, &xs[k].sub(&xs[l])).unwrap();
                    best = best.max(d);
                }
            }
            assert_eq!(p.at(m as u64), &Value::Exact(best), "m = {m}");
        }
    }

    #[test]
    fn signflip_cesaro_closed_form() {
        // ‖y_m - y_n‖ = 2 - 2m/n for m < n.
        let (space, spec) = entry("c-signflip");
        assert_eq!(cesaro_difference(&space, &spec, 3, 12).unwrap(), Value::Exact(rat(3, 2)));
    }

    #[test]
    fn diagonal_of_summing_sequence_is_identity() {
        let (_, spec) = entry("c0-summing");
        let m = diagonal_extraction(&spec, 20, 40, &rat(1, 10)).unwrap();
        assert_eq!(m, IndexMap::List { indices: (1..=20).collect() });
        let (_, signflip) = entry("c-signflip");
        assert!(diagonal_extraction(&signflip, 20, 40, &rat(1, 10)).is_none());
    }

    #[test]
    fn wca_of_constant_distance_sequence_is_exact() {
        let (space, spec) = entry("c0-summing-flip");
        let est = wca_estimate(&space, &spec, 12).unwrap();
        assert_eq!(est.bound_kind, BoundKind::Exact);
        assert_eq!(est.value, Value::Exact(int(2)));
    }
}
