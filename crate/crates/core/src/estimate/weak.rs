//! Lower evidence for the uniform-weak-convergence defect over a restricted
//! family of norm-one functionals.
//!
//! `wu` asks, for each ε, whether `#{k : |f(x_k - x)| > ε}` is bounded
//! uniformly over the dual ball. Only finitely many functionals are tried
//! here, and "unbounded" is read off as growth of the best count between
//! horizons `N/2` and `N`. The result is a lower bound relative to the
//! searched family only.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{BoundKind, Quantity, QuantityEstimate, Witness};
use crate::catalog::SequenceSpec;
use crate::error::{Error, Result};
use crate::functional::{pair, Functional};
use crate::rational::{self, int, rat, Rational, Value};
use crate::space::{norm, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

/// Largest number of support coordinates turned into functionals.
const FAMILY_SUPPORT_CAP: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalFamily {
    /// `‖e_i‖·e_i*` for every coordinate in the support.
    Coordinate,
    /// Normalized `Σ_{i∈F} ±e_i*` over admissible runs `F` of the support (flat spaces).
    AdmissibleSigns,
    CoordinateAndAdmissibleSigns,
}

impl FunctionalFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "coordinate" => Ok(FunctionalFamily::Coordinate),
            "admissible-signs" => Ok(FunctionalFamily::AdmissibleSigns),
            "coordinate+admissible-signs" => Ok(FunctionalFamily::CoordinateAndAdmissibleSigns),
            other => Err(Error::UnregisteredFamily(other.to_string())),
        }
    }

    fn uses_coordinates(self) -> bool {
        matches!(self, FunctionalFamily::Coordinate | FunctionalFamily::CoordinateAndAdmissibleSigns)
    }

    fn uses_signs(self) -> bool {
        matches!(self, FunctionalFamily::AdmissibleSigns | FunctionalFamily::CoordinateAndAdmissibleSigns)
    }
}

impl fmt::Display for FunctionalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionalFamily::Coordinate => "coordinate",
            FunctionalFamily::AdmissibleSigns => "admissible-signs",
            FunctionalFamily::CoordinateAndAdmissibleSigns => "coordinate+admissible-signs",
        })
    }
}

/// `{j/20 · bound : 1 ≤ j ≤ 40}`.
pub fn default_epsilon_grid(bound: &Rational) -> Vec<Rational> {
    (1..=40).map(|j| rat(j, 20) * bound).collect()
}

fn to_rational(v: Value) -> Result<Rational> {
    match v {
        Value::Exact(r) => Ok(r),
        Value::Approx(x) => rational::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("norm {x} is not finite"))),
    }
}

fn build_family(space: &SpaceDescriptor, diffs: &[FiniteVector], family: FunctionalFamily) -> Result<Vec<Functional>> {
    if family.uses_signs() && space.depth() != Some(1) {
        return Err(Error::UnregisteredFamily(format!("{family} on {space}")));
    }
    let mut totals: BTreeMap<CoordIndex, Rational> = BTreeMap::new();
    for d in diffs {
        for (i, v) in d.entries() {
            *totals.entry(i.clone()).or_insert_with(Rational::zero) += v;
        }
    }
    let support: Vec<CoordIndex> = totals.keys().take(FAMILY_SUPPORT_CAP).cloned().collect();
    let mut out = Vec::new();
    if family.uses_coordinates() {
        for i in &support {
            let scale = to_rational(norm(space, &FiniteVector::unit(i.clone()))?)?;
            let mut f = Functional::coordinate(i.clone()).scaled(&scale);
            f.budget = int(1);
            out.push(f);
        }
    }
    if family.uses_signs() {
        for (start, i) in support.iter().enumerate() {
            let take = (i.head() as usize).min(support.len() - start);
            let coefficients: BTreeMap<CoordIndex, Rational> = support[start..start + take]
                .iter()
                .map(|j| (j.clone(), if totals[j].is_negative() { int(-1) } else { int(1) }))
                .collect();
            let budget = int(take as i64);
            out.push(Functional::combination(coefficients, budget).normalized_for(space)?);
        }
    }
    Ok(out)
}

/// Largest grid ε at which the best count over the family keeps growing from `N/2` to `N`.
pub fn wu_lower(
    space: &SpaceDescriptor,
    spec: &SequenceSpec,
    limit: Option<&FiniteVector>,
    grid: &[Rational],
    family: FunctionalFamily,
    horizon: u64,
) -> Result<QuantityEstimate> {
    if horizon < 2 {
        return Err(Error::HorizonTooSmall { horizon, min: 2 });
    }
    let zero = FiniteVector::zero();
    let x = limit.or(spec.weak_limit.as_ref()).unwrap_or(&zero);
    let diffs: Vec<FiniteVector> = spec.prefix(horizon).into_iter().map(|v| v.sub(x)).collect();
    let functionals = build_family(space, &diffs, family)?;
    let half = (horizon / 2) as usize;
    let values: Vec<Vec<Rational>> = functionals
        .iter()
        .map(|f| diffs.iter().map(|d| pair(f, d).map(|v| v.abs())).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut sorted_grid = grid.to_vec();
    sorted_grid.sort();
    let mut found: Option<(Rational, usize, u64, u64)> = None;
    for eps in sorted_grid.iter().rev() {
        let mut best: Option<(usize, u64)> = None;
        let mut best_half = 0u64;
        for (fi, vals) in values.iter().enumerate() {
            let count = vals.iter().filter(|v| *v > eps).count() as u64;
            let count_half = vals[..half].iter().filter(|v| *v > eps).count() as u64;
            best_half = best_half.max(count_half);
            if count > 0 && best.map_or(true, |(_, c)| count > c) {
                best = Some((fi, count));
            }
        }
        if let Some((fi, count)) = best {
            if count > best_half {
                found = Some((eps.clone(), fi, count, best_half));
                break;
            }
        }
    }
    let mut est = QuantityEstimate::new(Quantity::Wu, Value::zero(), BoundKind::Lower, horizon)
        .param("family", family)
        .param("functionals", functionals.len())
        .param("growth", format!("best count at N exceeds best count at N/2 = {half}"));
    if let Some((eps, fi, count, count_at_half)) = found {
        est.value = Value::Exact(eps.clone());
        est.witness = Some(Witness::Functional { functional: functionals[fi].clone(), epsilon: eps, count, count_at_half });
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, Generator};

    #[test]
    fn constant_sequence_gives_zero() {
        let v = FiniteVector::basis(3);
        let spec = SequenceSpec::new(Generator::Explicit { vectors: vec![v.clone()] }, int(1));
        let grid = default_epsilon_grid(&int(1));
        let est = wu_lower(&SpaceDescriptor::l1(), &spec, Some(&v), &grid, FunctionalFamily::Coordinate, 20).unwrap();
        assert_eq!(est.value, Value::zero());
    }

    #[test]
    fn schreier_basis_admissible_functionals() {
        let e = lookup("schreier-basis").unwrap();
        let grid = default_epsilon_grid(&e.spec.bound);
        let est = wu_lower(&e.space, &e.spec, None, &grid, FunctionalFamily::CoordinateAndAdmissibleSigns, 50).unwrap();
        assert_eq!(est.value, Value::Exact(rat(19, 20)));
        match est.witness {
            Some(Witness::Functional { count, count_at_half, .. }) => {
                assert_eq!(count, 25);
                assert_eq!(count_at_half, 13);
            }
            other => panic!("unexpected witness {other:?}"),
        }
        // At ε = 0.9 the run starting at 25 is admissible and counts 25 terms.
        let est = wu_lower(&e.space, &e.spec, None, &[rat(9, 10)], FunctionalFamily::AdmissibleSigns, 50).unwrap();
        assert_eq!(est.value, Value::Exact(rat(9, 10)));
    }

    #[test]
    fn ell1_basis_in_sup_is_uniformly_weakly_null() {
        let e = lookup("ell1-basis").unwrap();
        let grid = default_epsilon_grid(&int(1));
        let est = wu_lower(&SpaceDescriptor::Sup, &e.spec, None, &grid, FunctionalFamily::Coordinate, 40).unwrap();
        assert_eq!(est.value, Value::zero());
    }

    #[test]
    fn unregistered_families() {
        assert!(FunctionalFamily::parse("everything").is_err());
        let e = lookup("omega-example:2").unwrap();
        let grid = default_epsilon_grid(&int(1));
        assert!(matches!(
            wu_lower(&e.space, &e.spec, None, &grid, FunctionalFamily::AdmissibleSigns, 10),
            Err(Error::UnregisteredFamily(_))
        ));
    }
}
