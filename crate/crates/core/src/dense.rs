//! Finite families of vectors laid out densely over their union support.
//!
//! Linear combinations of the family are then cheap to form, both as floats
//! (for screening) and as exact rationals (for confirmation).

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::Result;
use crate::rational::{self, Rational};
use crate::space::{norm_sorted, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

#[derive(Clone, Debug)]
pub struct DenseFamily {
    pub paths: Vec<CoordIndex>,
    pub rows: Vec<Vec<Rational>>,
    pub tails: Vec<Rational>,
    pub rows_f64: Vec<Vec<f64>>,
    pub tails_f64: Vec<f64>,
}

impl DenseFamily {
    pub fn new(vectors: &[FiniteVector]) -> Self {
        let support: BTreeSet<&CoordIndex> =
            vectors.iter().flat_map(|v| v.entries().keys()).collect();
        let paths: Vec<CoordIndex> = support.into_iter().cloned().collect();
        let rows: Vec<Vec<Rational>> = vectors
            .iter()
            .map(|v| paths.iter().map(|p| v.get(p).clone()).collect())
            .collect();
        let tails: Vec<Rational> = vectors.iter().map(|v| v.tail().clone()).collect();
        let rows_f64 = rows
            .iter()
            .map(|r| r.iter().map(rational::to_f64).collect())
            .collect();
        let tails_f64 = tails.iter().map(rational::to_f64).collect();
        DenseFamily { paths, rows, tails, rows_f64, tails_f64 }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.paths.len()
    }

    pub fn combine_f64(&self, alpha: &[f64]) -> (Vec<f64>, f64) {
        let mut w = vec![0.0; self.width()];
        let mut tail = 0.0;
        for (i, a) in alpha.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (wj, x) in w.iter_mut().zip(&self.rows_f64[i]) {
                *wj += a * x;
            }
            tail += a * self.tails_f64[i];
        }
        (w, tail)
    }

    pub fn combine_exact(&self, alpha: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut w = vec![Rational::zero(); self.width()];
        let mut tail = Rational::zero();
        for (i, a) in alpha.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (wj, x) in w.iter_mut().zip(&self.rows[i]) {
                if !x.is_zero() {
                    *wj += a * x;
                }
            }
            tail += a * &self.tails[i];
        }
        (w, tail)
    }

    pub fn combination(&self, alpha: &[Rational]) -> FiniteVector {
        let (w, tail) = self.combine_exact(alpha);
        FiniteVector::new(self.paths.iter().cloned().zip(w).collect(), tail)
    }

    /// `x_i - x_j` as floats.
    pub fn diff_f64(&self, i: usize, j: usize) -> (Vec<f64>, f64) {
        let w = self.rows_f64[i].iter().zip(&self.rows_f64[j]).map(|(a, b)| a - b).collect();
        (w, self.tails_f64[i] - self.tails_f64[j])
    }

    pub fn diff_exact(&self, i: usize, j: usize) -> (Vec<Rational>, Rational) {
        let w = self.rows[i].iter().zip(&self.rows[j]).map(|(a, b)| a - b).collect();
        (w, &self.tails[i] - &self.tails[j])
    }

    pub fn norm_dense_f64(&self, space: &SpaceDescriptor, w: &[f64], tail: f64) -> Result<f64> {
        dense_norm(space, &self.paths, w, &tail)
    }

    pub fn norm_dense_exact(&self, space: &SpaceDescriptor, w: &[Rational], tail: &Rational) -> Result<Rational> {
        dense_norm(space, &self.paths, w, tail)
    }
}

/// Norm of a dense coordinate vector; flat sup/ℓ1 norms skip the generic path.
pub fn dense_norm<T: crate::space::NormScalar>(
    space: &SpaceDescriptor,
    paths: &[CoordIndex],
    w: &[T],
    tail: &T,
) -> Result<T> {
    let flat = paths.iter().all(|p| p.depth() == 1);
    let tail_ok = *tail == T::zero() || space.allows_tail();
    if flat && tail_ok {
        if space.is_sup_like() {
            let mut m = if matches!(space, SpaceDescriptor::C) { tail.abs_val() } else { T::zero() };
            for x in w {
                let a = x.abs_val();
                if a > m {
                    m = a;
                }
            }
            return Ok(m);
        }
        if space.is_l1() {
            let mut s = T::zero();
            for x in w {
                s = s.plus(&x.abs_val());
            }
            return Ok(s);
        }
    }
    let entries: Vec<(&[u64], T)> = paths.iter().map(|p| p.path()).zip(w.iter().cloned()).collect();
    norm_sorted(space, &entries, tail, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::norm_exact;

    #[test]
    fn combinations_match_vector_arithmetic() {
        let a = FiniteVector::basis(1).add(&FiniteVector::basis(3).scale(&int(2)));
        let b = FiniteVector::new([(CoordIndex::flat(2), int(1))].into_iter().collect(), int(-1));
        let fam = DenseFamily::new(&[a.clone(), b.clone()]);
        let alpha = [rat(1, 2), rat(-1, 3)];
        let direct = a.scale(&alpha[0]).add(&b.scale(&alpha[1]));
        assert_eq!(fam.combination(&alpha), direct);
        let (w, t) = fam.combine_exact(&alpha);
        assert_eq!(
            fam.norm_dense_exact(&SpaceDescriptor::C, &w, &t).unwrap(),
            norm_exact(&SpaceDescriptor::C, &direct).unwrap()
        );
    }
}
