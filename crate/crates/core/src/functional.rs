//! Finitely supported linear functionals and their dual norms.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::dual_norm_lp;
use crate::rational::{self, int, serde_rational, serde_rational_map, Rational, Value};
use crate::space::{Exponent, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// `x ↦ c·x_i`.
    Coordinate {
        index: CoordIndex,
        #[serde(with = "serde_rational")]
        coefficient: Rational,
    },
    /// `x ↦ Σ c_i x_i` over a finite set of indices.
    SignCombination {
        #[serde(with = "serde_rational_map")]
        coefficients: BTreeMap<CoordIndex, Rational>,
    },
    /// `x ↦ c·lim x` on eventually constant sequences.
    Limit {
        #[serde(with = "serde_rational")]
        coefficient: Rational,
    },
}

/// A functional with a declared bound on its dual norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional {
    pub kind: FunctionalKind,
    #[serde(with = "serde_rational")]
    pub budget: Rational,
}

impl Functional {
    pub fn coordinate(index: CoordIndex) -> Self {
        Functional {
            kind: FunctionalKind::Coordinate { index, coefficient: int(1) },
            budget: int(1),
        }
    }

    pub fn combination(coefficients: BTreeMap<CoordIndex, Rational>, budget: Rational) -> Self {
        let coefficients = coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Functional { kind: FunctionalKind::SignCombination { coefficients }, budget }
    }

    pub fn limit() -> Self {
        Functional { kind: FunctionalKind::Limit { coefficient: int(1) }, budget: int(1) }
    }

    /// `Σ_{i∈F} e_i*` for a flat index set.
    pub fn indicator(indices: &[u64]) -> Self {
        let coefficients = indices.iter().map(|&k| (CoordIndex::flat(k), int(1))).collect();
        Functional::combination(coefficients, int(indices.len() as i64))
    }

    /// Coefficients as `(index, c)` pairs; empty for the limit functional.
    pub fn coefficients(&self) -> Vec<(CoordIndex, Rational)> {
        match &self.kind {
            FunctionalKind::Coordinate { index, coefficient } => vec![(index.clone(), coefficient.clone())],
            FunctionalKind::SignCombination { coefficients } => {
                coefficients.iter().map(|(i, c)| (i.clone(), c.clone())).collect()
            }
            FunctionalKind::Limit { .. } => Vec::new(),
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        let kind = match &self.kind {
            FunctionalKind::Coordinate { index, coefficient } => {
                FunctionalKind::Coordinate { index: index.clone(), coefficient: coefficient * factor }
            }
            FunctionalKind::SignCombination { coefficients } => FunctionalKind::SignCombination {
                coefficients: coefficients.iter().map(|(i, c)| (i.clone(), c * factor)).collect(),
            },
            FunctionalKind::Limit { coefficient } => FunctionalKind::Limit { coefficient: coefficient * factor },
        };
        Functional { kind, budget: &self.budget * factor.abs() }
    }

    /// Rescaled to dual norm one in `space`, with budget one.
    pub fn normalized_for(&self, space: &SpaceDescriptor) -> Result<Self> {
        let n = match dual_norm(space, self)? {
            Value::Exact(r) => r,
            Value::Approx(x) => rational::from_f64(x).ok_or_else(|| Error::NonPolyhedral(space.to_string()))?,
        };
        if n.is_zero() {
            return Err(Error::InvalidArgument("cannot normalize the zero functional".into()));
        }
        let mut out = self.scaled(&n.recip());
        out.budget = int(1);
        Ok(out)
    }
}

/// Exact value `f(v)`.
pub fn pair(f: &Functional, v: &FiniteVector) -> Result<Rational> {
    let check_depth = |i: &CoordIndex| -> Result<()> {
        match v.depth() {
            Some(d) if d != i.depth() => Err(Error::UndefinedPairing(format!(
                "functional index {i} has depth {} but the vector has depth {d}",
                i.depth()
            ))),
            None if v.support_len() > 0 => Err(Error::UndefinedPairing("vector has mixed index depths".into())),
            _ => Ok(()),
        }
    };
    match &f.kind {
        FunctionalKind::Coordinate { index, coefficient } => {
            check_depth(index)?;
            Ok(coefficient * v.get(index))
        }
        FunctionalKind::SignCombination { coefficients } => {
            let mut total = Rational::zero();
            for (i, c) in coefficients {
                check_depth(i)?;
                total += c * v.get(i);
            }
            Ok(total)
        }
        FunctionalKind::Limit { coefficient } => Ok(coefficient * v.tail()),
    }
}

/// Norm of `f` as an element of the dual of `space`.
pub fn dual_norm(space: &SpaceDescriptor, f: &Functional) -> Result<Value> {
    if let FunctionalKind::Limit { coefficient } = &f.kind {
        return match space {
            SpaceDescriptor::C => Ok(Value::Exact(coefficient.abs())),
            _ => Err(Error::UndefinedPairing(format!("the limit functional is not defined on {space}"))),
        };
    }
    let coeffs = f.coefficients();
    if let Some(d) = space.depth() {
        if let Some((i, _)) = coeffs.iter().find(|(i, _)| i.depth() != d) {
            return Err(Error::UndefinedPairing(format!("index {i} does not fit {space}")));
        }
    }
    let abs: Vec<Rational> = coeffs.iter().map(|(_, c)| c.abs()).collect();
    match space {
        SpaceDescriptor::Lp { p: Exponent::Finite(p) } if p == &int(1) => {
            Ok(Value::Exact(abs.into_iter().max().unwrap_or_else(Rational::zero)))
        }
        SpaceDescriptor::Sup | SpaceDescriptor::C | SpaceDescriptor::Lp { p: Exponent::Infinity } => {
            Ok(Value::Exact(abs.into_iter().sum()))
        }
        SpaceDescriptor::Lp { p } => {
            let q = p.conjugate().to_f64();
            let s: f64 = abs.iter().map(|c| rational::to_f64(c).powf(q)).sum();
            Ok(Value::Approx(s.powf(1.0 / q)))
        }
        _ => {
            if coeffs.is_empty() {
                return Ok(Value::zero());
            }
            dual_norm_lp(space, &coeffs).map(Value::Exact)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn coordinate_pairing() {
        let f = Functional::coordinate(CoordIndex::flat(3));
        assert_eq!(pair(&f, &FiniteVector::basis(3)).unwrap(), int(1));
        assert_eq!(pair(&f, &FiniteVector::basis(4)).unwrap(), int(0));
    }

    #[test]
    fn normalized_difference_functional() {
        let f = Functional::combination(
            [(CoordIndex::flat(1), int(1)), (CoordIndex::flat(2), int(-1))].into_iter().collect(),
            int(2),
        );
        let g = f.normalized_for(&SpaceDescriptor::Sup).unwrap();
        assert_eq!(pair(&g, &FiniteVector::basis(1)).unwrap(), rat(1, 2));
        assert_eq!(dual_norm(&SpaceDescriptor::Sup, &g).unwrap(), Value::Exact(int(1)));
    }

    #[test]
    fn limit_functional_reads_the_tail() {
        let v = FiniteVector::new([(CoordIndex::flat(1), int(1))].into_iter().collect(), int(-1));
        assert_eq!(pair(&Functional::limit(), &v).unwrap(), int(-1));
        assert!(dual_norm(&SpaceDescriptor::Sup, &Functional::limit()).is_err());
    }

    #[test]
    fn depth_mismatch_is_undefined() {
        let f = Functional::coordinate(CoordIndex::flat(1));
        let v = FiniteVector::unit(CoordIndex::pair(1, 1));
        assert!(matches!(pair(&f, &v), Err(Error::UndefinedPairing(_))));
    }

    #[test]
    fn schreier_dual_norms() {
        // An admissible indicator has dual norm one.
        let f = Functional::indicator(&[3, 4, 5]);
        assert_eq!(dual_norm(&SpaceDescriptor::Schreier, &f).unwrap(), Value::Exact(int(1)));
        // {1, 2} is not admissible: x = e_1 + e_2 has Schreier norm 1 and f(x) = 2.
        let f = Functional::indicator(&[1, 2]);
        assert_eq!(dual_norm(&SpaceDescriptor::Schreier, &f).unwrap(), Value::Exact(int(2)));
    }

    #[test]
    fn weighted_alpha_dual_norm() {
        // Dual of max{α‖x‖₁, ‖x‖∞} on a single coordinate is 1.
        let s = SpaceDescriptor::weighted_alpha(rat(1, 3));
        let f = Functional::coordinate(CoordIndex::flat(2));
        assert_eq!(dual_norm(&s, &f).unwrap(), Value::Exact(int(1)));
        // Six equal coefficients: best x is the all-ones vector scaled to norm 1 (norm 2), so 3.
        let f = Functional::indicator(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(dual_norm(&s, &f).unwrap(), Value::Exact(int(3)));
    }
}
