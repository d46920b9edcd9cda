//! Small dense two-phase simplex over exact rationals.
//!
//! Sized for the cross-polytope face problems: tens of variables, up to a few
//! hundred constraints. Bland's rule guarantees termination.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Maximize or minimize `objective · x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub maximize: bool,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Rational>, maximize: bool) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram { num_vars, objective, maximize, constraints: Vec::new() }
    }

    /// Adds `Σ coeffs[j]·x_j (rel) rhs` from sparse `(j, coeff)` terms.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    num_struct: usize,
    num_slack: usize,
    num_art: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let num_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            // Zero-rhs `≥` rows flip to `≤` and need no artificial.
            if c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge) {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                normalized.push((c.coeffs.iter().map(|a| -a).collect(), rel, -&c.rhs));
            } else {
                normalized.push((c.coeffs.clone(), c.relation, c.rhs.clone()));
            }
        }
        let num_art = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let width = n + num_slack + num_art;
        let mut rows = Vec::with_capacity(normalized.len());
        let mut rhs = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut art) = (n, n + num_slack);
        for (coeffs, rel, b) in normalized {
            let mut row = coeffs;
            row.resize(width, Rational::zero());
            match rel {
                Relation::Le => {
                    row[slack] = int(1);
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = int(-1);
                    slack += 1;
                    row[art] = int(1);
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = int(1);
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        Tableau { rows, rhs, basis, num_struct: n, num_slack, num_art }
    }

    fn width(&self) -> usize {
        self.num_struct + self.num_slack + self.num_art
    }

    fn is_art(&self, j: usize) -> bool {
        j >= self.num_struct + self.num_slack
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational], obj_val: &mut Rational) {
        let p = self.rows[r][c].clone();
        if p != int(1) {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            let delta = &f * &pivot_rhs;
            self.rhs[i] -= delta;
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                obj[j] -= delta;
            }
            *obj_val -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on `obj` (reduced costs; entering when negative).
    fn iterate(&mut self, obj: &mut [Rational], obj_val: &mut Rational, allow_art: bool) -> Result<()> {
        loop {
            let entering = (0..self.width())
                .find(|&j| obj[j].is_negative() && (allow_art || !self.is_art(j)));
            let Some(c) = entering else { return Ok(()) };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return Err(Error::Unbounded) };
            self.pivot(r, c, obj, obj_val);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let w = self.width();
        // Phase one: maximize -Σ artificials.
        if self.num_art > 0 {
            let mut obj = vec![Rational::zero(); w];
            let mut val = Rational::zero();
            for j in (w - self.num_art)..w {
                obj[j] = int(1);
            }
            for i in 0..self.rows.len() {
                if self.is_art(self.basis[i]) {
                    for j in 0..w {
                        if !self.rows[i][j].is_zero() {
                            obj[j] -= &self.rows[i][j];
                        }
                    }
                    val -= &self.rhs[i];
                }
            }
            self.iterate(&mut obj, &mut val, true)?;
            if val.is_negative() {
                return Err(Error::Infeasible);
            }
            // Drive zero-level artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.is_art(self.basis[i]) {
                    let col = (0..self.num_struct + self.num_slack).find(|&j| !self.rows[i][j].is_zero());
                    match col {
                        Some(c) => {
                            let mut dummy = vec![Rational::zero(); w];
                            let mut dv = Rational::zero();
                            self.pivot(i, c, &mut dummy, &mut dv);
                        }
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        // Phase two.
        let mut obj = vec![Rational::zero(); w];
        for j in 0..self.num_struct {
            let c = &lp.objective[j];
            obj[j] = if lp.maximize { -c } else { c.clone() };
        }
        let mut val = Rational::zero();
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for j in 0..w {
                    if !self.rows[i][j].is_zero() {
                        let delta = &f * &self.rows[i][j];
                        obj[j] -= delta;
                    }
                }
                val -= &f * &self.rhs[i];
            }
        }
        self.iterate(&mut obj, &mut val, false)?;
        let mut x = vec![Rational::zero(); self.num_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_struct {
                x[b] = self.rhs[i].clone();
            }
        }
        let value: Rational = x.iter().zip(&lp.objective).map(|(a, c)| a * c).sum();
        Ok(LpSolution { value, x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(2, vec![int(3), int(5)], true);
        lp.add_sparse(&[(0, int(1))], Relation::Le, int(4));
        lp.add_sparse(&[(1, int(2))], Relation::Le, int(12));
        lp.add_sparse(&[(0, int(3)), (1, int(2))], Relation::Le, int(18));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, int(36));
        assert_eq!(s.x, vec![int(2), int(6)]);
    }

    #[test]
    fn minimization_with_equalities_and_ge() {
        // min s, s ≥ t1, s ≥ t2, t1 + t2 = 1 -> 1/2
        let mut lp = LinearProgram::new(3, vec![int(0), int(0), int(1)], false);
        lp.add_sparse(&[(2, int(1)), (0, int(-1))], Relation::Ge, int(0));
        lp.add_sparse(&[(2, int(1)), (1, int(-1))], Relation::Ge, int(0));
        lp.add_sparse(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, rat(1, 2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, vec![int(1)], true);
        lp.add_sparse(&[(0, int(1))], Relation::Le, int(1));
        lp.add_sparse(&[(0, int(1))], Relation::Ge, int(2));
        assert_eq!(lp.solve(), Err(Error::Infeasible));
        let lp = LinearProgram::new(1, vec![int(1)], true);
        assert_eq!(lp.solve(), Err(Error::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2, vec![int(1), int(1)], false);
        lp.add_sparse(&[(0, int(1)), (1, int(1))], Relation::Eq, int(2));
        lp.add_sparse(&[(0, int(2)), (1, int(2))], Relation::Eq, int(4));
        lp.add_sparse(&[(0, int(1))], Relation::Ge, rat(1, 2));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, int(2));
    }
}
