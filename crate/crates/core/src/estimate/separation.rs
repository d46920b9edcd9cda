//! Block separation: `min ‖(1/s)(Σ_F x - Σ_H x)‖` over `#F = #H = s`, `max F < min H`.

use num_traits::Zero;
use rayon::prelude::*;

use super::{margin, BoundKind, Quantity, QuantityEstimate, Witness};
use crate::admissible::{binomial, for_each_combination};
use crate::catalog::SequenceSpec;
use crate::dense::DenseFamily;
use crate::error::{Error, Result};
use crate::rational::{Rational, Value};
use crate::space::{norm, SpaceDescriptor};

/// Default bound on the number of `(F, H)` pairs searched.
pub const ASEP_PAIR_CAP: u64 = 10_000_000;

/// Upper bound for the arithmetic separation from all block pairs inside `{1..N}`.
pub fn asep_upper(space: &SpaceDescriptor, spec: &SequenceSpec, horizon: u64, max_block: u64) -> Result<QuantityEstimate> {
    asep_upper_with_cap(space, spec, horizon, max_block, ASEP_PAIR_CAP)
}

fn block_f64(fam: &DenseFamily, set: &[usize], s: usize) -> (Vec<f64>, f64) {
    let mut w = vec![0.0; fam.width()];
    let mut t = 0.0;
    for (pos, &i) in set.iter().enumerate() {
        let sign = if pos < s { 1.0 } else { -1.0 };
        for (wj, x) in w.iter_mut().zip(&fam.rows_f64[i]) {
            *wj += sign * x;
        }
        t += sign * fam.tails_f64[i];
    }
    let inv = 1.0 / s as f64;
    w.iter_mut().for_each(|x| *x *= inv);
    (w, t * inv)
}

fn block_exact(fam: &DenseFamily, set: &[usize], s: usize) -> (Vec<Rational>, Rational) {
    let mut w = vec![Rational::zero(); fam.width()];
    let mut t = Rational::zero();
    for (pos, &i) in set.iter().enumerate() {
        for (wj, x) in w.iter_mut().zip(&fam.rows[i]) {
            if pos < s {
                *wj += x;
            } else {
                *wj -= x;
            }
        }
        if pos < s {
            t += &fam.tails[i];
        } else {
            t -= &fam.tails[i];
        }
    }
    let inv = Rational::new(1.into(), (s as i64).into());
    (w.into_iter().map(|x| x * &inv).collect(), t * inv)
}

pub fn asep_upper_with_cap(
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    horizon: u64,
    max_block: u64,
    cap: u64,
) -> Result<QuantityEstimate> {
    if max_block < 1 || 2 * max_block > horizon {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= max_block <= N/2, got max_block = {max_block}, N = {horizon}"
        )));
    }
    let pairs: u64 = (1..=max_block).fold(0u64, |acc, s| acc.saturating_add(binomial(horizon, 2 * s)));
    if pairs > cap {
        return Err(Error::SearchBudgetExceeded(format!("{pairs} block pairs exceed the cap {cap}")));
    }
    let xs = spec.prefix(horizon);
    for x in &xs {
        norm(space, x)?;
    }
    let fam = DenseFamily::new(&xs);
    let exact = space.is_polyhedral();
    let n = horizon as usize;
    let sizes: Vec<usize> = (1..=max_block as usize).collect();

    // Each task fixes the block size and the first element of F.
    let tasks: Vec<(usize, usize)> =
        sizes.iter().flat_map(|&s| (0..=n - 2 * s).map(move |first| (s, first))).collect();
    let per_task = |&(s, first): &(usize, usize), f: &mut dyn FnMut(&[usize]) -> Result<()>| -> Result<()> {
        let rest: Vec<usize> = (first + 1..n).collect();
        let mut set = vec![first];
        let mut err = Ok(());
        for_each_combination(&rest, 2 * s - 1, |tail| {
            set.truncate(1);
            set.extend_from_slice(tail);
            err = f(&set);
            err.is_ok()
        });
        err
    };

    let best_f64 = tasks
        .par_iter()
        .map(|task| -> Result<f64> {
            let mut best = f64::INFINITY;
            per_task(task, &mut |set| {
                let (w, t) = block_f64(&fam, set, task.0);
                best = best.min(fam.norm_dense_f64(space, &w, t)?);
                Ok(())
            })?;
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let cut = best_f64 + margin(best_f64);
    let mut candidates: Vec<(Vec<u64>, Vec<u64>, f64)> = tasks
        .par_iter()
        .map(|task| -> Result<Vec<(Vec<u64>, Vec<u64>, f64)>> {
            let mut found = Vec::new();
            per_task(task, &mut |set| {
                let (w, t) = block_f64(&fam, set, task.0);
                let v = fam.norm_dense_f64(space, &w, t)?;
                if v <= cut {
                    let f = set[..task.0].iter().map(|&i| i as u64 + 1).collect();
                    let h = set[task.0..].iter().map(|&i| i as u64 + 1).collect();
                    found.push((f, h, v));
                }
                Ok(())
            })?;
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    candidates.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));

    // Lexicographically first pair attaining the exact minimum.
    let mut best: Option<(Value, Vec<u64>, Vec<u64>)> = None;
    for (f, h, v) in candidates {
        let value = if exact {
            let set: Vec<usize> = f.iter().chain(&h).map(|&i| i as usize - 1).collect();
            let (w, t) = block_exact(&fam, &set, f.len());
            Value::Exact(fam.norm_dense_exact(space, &w, &t)?)
        } else {
            Value::Approx(v)
        };
        if best.as_ref().map_or(true, |(b, _, _)| value < *b) {
            best = Some((value, f, h));
        }
    }
    let (value, f, h) = best.expect("at least one block pair");
    let mut est = QuantityEstimate::new(Quantity::Asep, value, BoundKind::Upper, horizon)
        .param("max_block", max_block)
        .param("pairs", pairs);
    est.witness = Some(Witness::Blocks { f, h });
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, Generator};
    use crate::rational::{int, rat};
    use crate::space::norm_exact;
    use crate::vector::FiniteVector;

    #[test]
    fn ell1_basis_separation_is_two() {
        let e = lookup("ell1-basis").unwrap();
        let est = asep_upper(&e.space, &e.spec, 10, 3).unwrap();
        assert_eq!(est.value, Value::Exact(int(2)));
        assert_eq!(est.witness, Some(Witness::Blocks { f: vec![1], h: vec![2] }));
    }

    #[test]
    fn constant_sequence_separation_is_zero() {
        let spec = SequenceSpec::new(Generator::Explicit { vectors: vec![FiniteVector::basis(1)] }, int(1));
        let est = asep_upper(&SpaceDescriptor::Sup, &spec, 6, 3).unwrap();
        assert_eq!(est.value, Value::zero());
    }

    fn brute_force(space: &SpaceDescriptor, xs: &[FiniteVector], max_block: usize) -> Rational {
        let n = xs.len();
        let mut best: Option<Rational> = None;
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if set.len() % 2 == 1 || set.len() / 2 > max_block {
                continue;
            }
            let s = set.len() / 2;
            let mut acc = FiniteVector::zero();
            for (pos, &i) in set.iter().enumerate() {
                acc = if pos < s { acc.add(&xs[i]) } else { acc.sub(&xs[i]) };
            }
            let v = norm_exact(space, &acc.scale(&rat(1, s as i64))).unwrap();
            if best.as_ref().map_or(true, |b| v < *b) {
                best = Some(v);
            }
        }
        best.unwrap()
    }

    #[test]
    fn summing_sequence_matches_brute_force() {
        let e = lookup("c0-summing").unwrap();
        let est = asep_upper(&e.space, &e.spec, 8, 4).unwrap();
        let xs = e.spec.prefix(8);
        assert_eq!(est.value, Value::Exact(brute_force(&e.space, &xs, 4)));
        assert_eq!(est.value, Value::Exact(int(1)));
    }

    #[test]
    fn budget_is_enforced() {
        let e = lookup("ell1-basis").unwrap();
        assert!(matches!(asep_upper_with_cap(&e.space, &e.spec, 20, 10, 1000), Err(Error::SearchBudgetExceeded(_))));
        assert!(asep_upper(&e.space, &e.spec, 10, 6).is_err());
    }
}
