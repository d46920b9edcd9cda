//! Minimization of `α ↦ ‖Σ α_i v_i‖` over the cross-polytope `Σ|α_i| = 1`.
//!
//! The exact method solves one linear program per orthant (first sign fixed
//! to `+` by symmetry) against a polyhedral epigraph of the norm. The
//! heuristic runs projected subgradient descent per orthant, and the grid
//! oracle enumerates a rational grid on the boundary.

use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::maximal_admissible_sets;
use crate::dense::DenseFamily;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::rational::{self, int, serde_rational_vec, Rational, Value};
use crate::space::{norm_exact, Exponent, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

/// Largest family handled by the exact per-orthant method.
pub const FACE_CAP: usize = 12;
/// Largest grid the oracle will enumerate.
pub const GRID_CAP: u64 = 2_000_000;
/// Bound on the number of admissible-set constraints in one Schreier epigraph.
pub const EPIGRAPH_SET_CAP: usize = 50_000;

const HEURISTIC_ITERATIONS: usize = 200;
const HEURISTIC_MAX_ORTHANTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FaceLpExact,
    SubgradientHeuristic,
    GridOracle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizationResult {
    pub value: Value,
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    pub method: Method,
    /// Sign of each coefficient at the optimum (`-1`, `0`, `1`).
    pub face: Vec<i8>,
}

fn signs_of(alpha: &[Rational]) -> Vec<i8> {
    alpha
        .iter()
        .map(|a| if a.is_positive() { 1 } else if a.is_negative() { -1 } else { 0 })
        .collect()
}

type Expr = Vec<(usize, Rational)>;

struct Epigraph {
    num_vars: usize,
    rows: Vec<(Expr, Relation, Rational)>,
}

impl Epigraph {
    fn new_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    /// `var ≥ ±expr`.
    fn dominate_abs(&mut self, var: usize, expr: &Expr) {
        for sign in [int(1), int(-1)] {
            let mut terms: Expr = vec![(var, int(1))];
            terms.extend(expr.iter().map(|(i, c)| (*i, -(&sign * c))));
            self.rows.push((terms, Relation::Ge, Rational::zero()));
        }
    }

    /// `var ≥ Σ weight·others`.
    fn dominate_sum(&mut self, var: usize, others: &[usize], weight: &Rational) {
        let mut terms: Expr = vec![(var, int(1))];
        terms.extend(others.iter().map(|&o| (o, -weight.clone())));
        self.rows.push((terms, Relation::Ge, Rational::zero()));
    }

    fn abs_vars(&mut self, cols: &[(&[u64], Expr)]) -> Vec<usize> {
        cols.iter()
            .map(|(_, e)| {
                let u = self.new_var();
                self.dominate_abs(u, e);
                u
            })
            .collect()
    }

    /// Returns a variable `s` constrained to dominate the norm of the
    /// linear coordinate expressions `cols` (sorted by path) and `tail`.
    fn build(
        &mut self,
        space: &SpaceDescriptor,
        cols: &[(&[u64], Expr)],
        tail: &Expr,
        level: usize,
    ) -> Result<usize> {
        if !tail.is_empty() && !(level == 0 && space.allows_tail()) {
            return Err(Error::NotRepresentable { space: space.to_string(), tail: "nonzero".into() });
        }
        let leaf = !matches!(space, SpaceDescriptor::L1Sum { .. } | SpaceDescriptor::SupSum { .. });
        for (path, _) in cols {
            let ok = if leaf { path.len() == level + 1 } else { path.len() > level + 1 };
            if !ok {
                return Err(Error::ShapeMismatch(format!("index {path:?} does not fit {space}")));
            }
        }
        let s = self.new_var();
        match space {
            SpaceDescriptor::Sup | SpaceDescriptor::C | SpaceDescriptor::Lp { p: Exponent::Infinity } => {
                for (_, e) in cols {
                    self.dominate_abs(s, e);
                }
                if !tail.is_empty() {
                    self.dominate_abs(s, tail);
                }
            }
            SpaceDescriptor::Lp { p: Exponent::Finite(p) } => {
                if !p.is_one() {
                    return Err(Error::NonPolyhedral(space.to_string()));
                }
                let us = self.abs_vars(cols);
                self.dominate_sum(s, &us, &int(1));
            }
            SpaceDescriptor::WeightedAlpha { alpha } => {
                let us = self.abs_vars(cols);
                self.dominate_sum(s, &us, alpha);
                for (_, e) in cols {
                    self.dominate_abs(s, e);
                }
            }
            SpaceDescriptor::Schreier => {
                let us = self.abs_vars(cols);
                let window: Vec<u64> = cols.iter().map(|(p, _)| p[level]).collect();
                for set in maximal_admissible_sets(&window, EPIGRAPH_SET_CAP)? {
                    let members: Vec<usize> = set
                        .iter()
                        .map(|k| us[window.binary_search(k).expect("set drawn from window")])
                        .collect();
                    self.dominate_sum(s, &members, &int(1));
                }
            }
            SpaceDescriptor::L1Sum { blocks } => {
                let mut parts = Vec::new();
                for (head, run) in runs(cols, level) {
                    parts.push(self.build(&blocks.block(head), run, &Vec::new(), level + 1)?);
                }
                self.dominate_sum(s, &parts, &int(1));
            }
            SpaceDescriptor::SupSum { first, second } => {
                for (head, run) in runs(cols, level) {
                    let component = match head {
                        1 => first,
                        2 => second,
                        other => {
                            return Err(Error::ShapeMismatch(format!(
                                "sup-sum component {other} does not exist"
                            )))
                        }
                    };
                    let part = self.build(component, run, &Vec::new(), level + 1)?;
                    self.dominate_sum(s, &[part], &int(1));
                }
            }
        }
        Ok(s)
    }
}

fn runs<'a>(cols: &'a [(&'a [u64], Expr)], level: usize) -> Vec<(u64, &'a [(&'a [u64], Expr)])> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < cols.len() {
        let head = cols[start].0[level];
        let mut end = start + 1;
        while end < cols.len() && cols[end].0[level] == head {
            end += 1;
        }
        out.push((head, &cols[start..end]));
        start = end;
    }
    out
}

fn orthant_signs(d: usize, code: usize) -> Vec<i8> {
    (0..d)
        .map(|i| if i == 0 || code >> (i - 1) & 1 == 0 { 1 } else { -1 })
        .collect()
}

fn check_family(space: &SpaceDescriptor, vectors: &[FiniteVector]) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("need at least one vector".into()));
    }
    space.validate()?;
    for v in vectors {
        if space.is_polyhedral() {
            norm_exact(space, v)?;
        } else {
            crate::space::norm_f64(space, v)?;
        }
    }
    Ok(())
}


/// Exact minimum over the cross-polytope for polyhedral norms.
pub fn crosspolytope_min(space: &SpaceDescriptor, vectors: &[FiniteVector]) -> Result<MinimizationResult> {
    check_family(space, vectors)?;
    let d = vectors.len();
    if d > FACE_CAP {
        return Err(Error::CapExceeded { what: "family size for exact minimization", actual: d, cap: FACE_CAP });
    }
    if !space.is_polyhedral() {
        return Err(Error::NonPolyhedral(space.to_string()));
    }
    let family = DenseFamily::new(vectors);
    let orthants = 1usize << (d - 1);
    let solved: Vec<Result<(Rational, Vec<Rational>)>> = (0..orthants)
        .into_par_iter()
        .map(|code| solve_orthant(space, &family, &orthant_signs(d, code)))
        .collect();
    // Ties go to the first orthant in canonical order (all signs positive first).
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for r in solved {
        let cand = r?;
        if best.as_ref().map_or(true, |(bv, _)| cand.0 < *bv) {
            best = Some(cand);
        }
    }
    let (value, alpha) = best.expect("at least one orthant");
    let check = norm_exact(space, &family.combination(&alpha))?;
    debug_assert_eq!(check, value);
    Ok(MinimizationResult { value: Value::Exact(check), face: signs_of(&alpha), alpha, method: Method::FaceLpExact })
}

/// Exact minimum over the positive face `α ≥ 0, Σ α_i = 1` only.
///
/// For disjointly supported vectors in the lattice norms handled here, every
/// orthant gives the same value, so this equals the full minimum; there is
/// no face cap.
pub fn positive_face_min(space: &SpaceDescriptor, vectors: &[FiniteVector]) -> Result<MinimizationResult> {
    check_family(space, vectors)?;
    if !space.is_polyhedral() {
        return Err(Error::NonPolyhedral(space.to_string()));
    }
    let family = DenseFamily::new(vectors);
    let (_, alpha) = solve_orthant(space, &family, &vec![1; vectors.len()])?;
    let value = norm_exact(space, &family.combination(&alpha))?;
    Ok(MinimizationResult { value: Value::Exact(value), face: signs_of(&alpha), alpha, method: Method::FaceLpExact })
}

fn solve_orthant(space: &SpaceDescriptor, family: &DenseFamily, signs: &[i8]) -> Result<(Rational, Vec<Rational>)> {
    let d = family.len();
    let sign_of = |i: usize| if signs[i] > 0 { int(1) } else { int(-1) };
    let mut cols: Vec<(&[u64], Expr)> = Vec::new();
    for (j, path) in family.paths.iter().enumerate() {
        let expr: Expr = (0..d)
            .filter(|&i| !family.rows[i][j].is_zero())
            .map(|i| (i, sign_of(i) * &family.rows[i][j]))
            .collect();
        if !expr.is_empty() {
            cols.push((path.path(), expr));
        }
    }
    let tail: Expr = (0..d)
        .filter(|&i| !family.tails[i].is_zero())
        .map(|i| (i, sign_of(i) * &family.tails[i]))
        .collect();
    let mut epi = Epigraph { num_vars: d, rows: Vec::new() };
    let s = epi.build(space, &cols, &tail, 0)?;
    let mut objective = vec![Rational::zero(); epi.num_vars];
    objective[s] = int(1);
    let mut lp = LinearProgram::new(epi.num_vars, objective, false);
    for (terms, rel, rhs) in &epi.rows {
        lp.add_sparse(terms, *rel, rhs.clone());
    }
    let simplex: Vec<(usize, Rational)> = (0..d).map(|i| (i, int(1))).collect();
    lp.add_sparse(&simplex, Relation::Eq, int(1));
    let sol = lp.solve()?;
    let alpha: Vec<Rational> = (0..d).map(|i| sign_of(i) * &sol.x[i]).collect();
    Ok((sol.value, alpha))
}

/// `sup{Σ c_j w_j : ‖w‖ ≤ 1}` with `w` supported on the indices of `coeffs`
/// (sorted by index). Valid for the lattice norms handled here, where
/// restricting a vector to a subset of coordinates never increases its norm.
pub(crate) fn dual_norm_lp(space: &SpaceDescriptor, coeffs: &[(CoordIndex, Rational)]) -> Result<Rational> {
    let m = coeffs.len();
    let cols: Vec<(&[u64], Expr)> = coeffs
        .iter()
        .enumerate()
        .map(|(j, (i, _))| (i.path(), vec![(2 * j, int(1)), (2 * j + 1, int(-1))]))
        .collect();
    let mut epi = Epigraph { num_vars: 2 * m, rows: Vec::new() };
    let s = epi.build(space, &cols, &Vec::new(), 0)?;
    let mut objective = vec![Rational::zero(); epi.num_vars];
    for (j, (_, c)) in coeffs.iter().enumerate() {
        objective[2 * j] = c.clone();
        objective[2 * j + 1] = -c;
    }
    let mut lp = LinearProgram::new(epi.num_vars, objective, true);
    for (terms, rel, rhs) in &epi.rows {
        lp.add_sparse(terms, *rel, rhs.clone());
    }
    lp.add_sparse(&[(s, int(1))], Relation::Le, int(1));
    Ok(lp.solve()?.value)
}

/// A norming functional of `w`: writes coefficients into `g` (dense over
/// `family.paths`) and `gt` (tail), and returns `‖w‖`.
fn norming_f64(
    space: &SpaceDescriptor,
    paths: &[CoordIndex],
    cols: &[usize],
    w: &[f64],
    tail: f64,
    level: usize,
    g: &mut [f64],
    gt: &mut f64,
) -> f64 {
    let sign = |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
    let argmax = || {
        cols.iter()
            .copied()
            .max_by(|&a, &b| w[a].abs().partial_cmp(&w[b].abs()).unwrap_or(std::cmp::Ordering::Equal))
    };
    let sup_into = |g: &mut [f64], gt: &mut f64, with_tail: bool| -> f64 {
        let top = argmax();
        let m = top.map(|c| w[c].abs()).unwrap_or(0.0);
        if with_tail && tail.abs() > m {
            *gt = sign(tail);
            return tail.abs();
        }
        if let Some(c) = top {
            g[c] = sign(w[c]);
        }
        m
    };
    match space {
        SpaceDescriptor::Sup | SpaceDescriptor::Lp { p: Exponent::Infinity } => sup_into(g, gt, false),
        SpaceDescriptor::C => sup_into(g, gt, level == 0),
        SpaceDescriptor::Lp { p: Exponent::Finite(p) } => {
            let p = rational::to_f64(p);
            if p == 1.0 {
                for &c in cols {
                    g[c] = sign(w[c]);
                }
                return cols.iter().map(|&c| w[c].abs()).sum();
            }
            let n = cols.iter().map(|&c| w[c].abs().powf(p)).sum::<f64>().powf(1.0 / p);
            if n > 0.0 {
                for &c in cols {
                    g[c] = sign(w[c]) * (w[c].abs() / n).powf(p - 1.0);
                }
            }
            n
        }
        SpaceDescriptor::WeightedAlpha { alpha } => {
            let a = rational::to_f64(alpha);
            let l1: f64 = cols.iter().map(|&c| w[c].abs()).sum();
            let m = cols.iter().map(|&c| w[c].abs()).fold(0.0, f64::max);
            if a * l1 >= m {
                for &c in cols {
                    g[c] = a * sign(w[c]);
                }
                a * l1
            } else {
                sup_into(g, gt, false)
            }
        }
        SpaceDescriptor::Schreier => {
            let mut best = (0.0, Vec::new());
            for (pos, &c) in cols.iter().enumerate() {
                let j = paths[c].path()[level] as usize;
                let mut rest: Vec<usize> = cols[pos..].to_vec();
                rest.sort_by(|&a, &b| w[b].abs().partial_cmp(&w[a].abs()).unwrap_or(std::cmp::Ordering::Equal));
                rest.truncate(j);
                let total: f64 = rest.iter().map(|&r| w[r].abs()).sum();
                if total > best.0 {
                    best = (total, rest);
                }
            }
            for c in best.1 {
                g[c] = sign(w[c]);
            }
            best.0
        }
        SpaceDescriptor::L1Sum { blocks } => {
            let mut total = 0.0;
            for (head, run) in runs_idx(paths, cols, level) {
                let mut dummy = 0.0;
                total += norming_f64(&blocks.block(head), paths, &run, w, 0.0, level + 1, g, &mut dummy);
            }
            total
        }
        SpaceDescriptor::SupSum { first, second } => {
            let mut best: (f64, Vec<(usize, f64)>) = (0.0, Vec::new());
            for (head, run) in runs_idx(paths, cols, level) {
                let component = if head == 1 { first } else { second };
                let mut local = vec![0.0; g.len()];
                let mut dummy = 0.0;
                let n = norming_f64(component, paths, &run, w, 0.0, level + 1, &mut local, &mut dummy);
                if n > best.0 {
                    best = (n, run.iter().map(|&c| (c, local[c])).collect());
                }
            }
            for (c, v) in best.1 {
                g[c] = v;
            }
            best.0
        }
    }
}

fn runs_idx(paths: &[CoordIndex], cols: &[usize], level: usize) -> Vec<(u64, Vec<usize>)> {
    let mut out: Vec<(u64, Vec<usize>)> = Vec::new();
    for &c in cols {
        let head = paths[c].path()[level];
        match out.last_mut() {
            Some((h, run)) if *h == head => run.push(c),
            _ => out.push((head, vec![c])),
        }
    }
    out
}

fn project_to_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k as f64 + 1.0);
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Rounds simplex weights to dyadic rationals that still sum to one exactly.
fn rationalize(alpha: &[f64]) -> Vec<Rational> {
    const SCALE: i64 = 1 << 24;
    let mut out: Vec<Rational> = alpha
        .iter()
        .map(|a| Rational::new(((a * SCALE as f64).round() as i64).into(), SCALE.into()))
        .collect();
    let total: Rational = out.iter().map(|a| a.abs()).sum();
    if total.is_zero() {
        out[0] = int(1);
        return out;
    }
    for a in out.iter_mut() {
        *a /= &total;
    }
    out
}

fn evaluate(space: &SpaceDescriptor, family: &DenseFamily, alpha: &[Rational]) -> Result<Value> {
    if space.is_polyhedral() {
        let (w, t) = family.combine_exact(alpha);
        Ok(Value::Exact(family.norm_dense_exact(space, &w, &t)?))
    } else {
        let af: Vec<f64> = alpha.iter().map(rational::to_f64).collect();
        let (w, t) = family.combine_f64(&af);
        Ok(Value::Approx(family.norm_dense_f64(space, &w, t)?))
    }
}

/// Projected subgradient descent from the barycenter of each orthant.
pub fn crosspolytope_heuristic(space: &SpaceDescriptor, vectors: &[FiniteVector]) -> Result<MinimizationResult> {
    check_family(space, vectors)?;
    let d = vectors.len();
    let family = DenseFamily::new(vectors);
    let cols: Vec<usize> = (0..family.width()).collect();
    let eval = |alpha: &[f64], g: &mut Vec<f64>, gt: &mut f64| -> f64 {
        let (w, t) = family.combine_f64(alpha);
        g.iter_mut().for_each(|x| *x = 0.0);
        *gt = 0.0;
        norming_f64(space, &family.paths, &cols, &w, t, 0, g, gt)
    };
    let total_orthants = if d >= 64 { usize::MAX } else { 1usize << (d - 1) };
    let codes: Vec<usize> = if total_orthants <= HEURISTIC_MAX_ORTHANTS {
        (0..total_orthants).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let limit = total_orthants.min(1 << 30);
        let mut picked: Vec<usize> = sample(&mut rng, limit, HEURISTIC_MAX_ORTHANTS).into_vec();
        picked.sort_unstable();
        picked
    };
    let runs: Vec<(f64, Vec<f64>)> = codes
        .par_iter()
        .map(|&code| {
            let signs: Vec<f64> = orthant_signs(d, code).iter().map(|&s| s as f64).collect();
            let mut t = vec![1.0 / d as f64; d];
            let mut g = vec![0.0; family.width()];
            let mut gt = 0.0;
            let mut best = (f64::INFINITY, Vec::new());
            for iter in 1..=HEURISTIC_ITERATIONS {
                let alpha: Vec<f64> = t.iter().zip(&signs).map(|(a, s)| a * s).collect();
                let value = eval(&alpha, &mut g, &mut gt);
                if value < best.0 {
                    best = (value, alpha.clone());
                }
                let grad: Vec<f64> = (0..d)
                    .map(|i| {
                        let dot: f64 = g.iter().zip(&family.rows_f64[i]).map(|(a, b)| a * b).sum();
                        signs[i] * (dot + gt * family.tails_f64[i])
                    })
                    .collect();
                let size = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
                if size == 0.0 {
                    break;
                }
                let step = 0.5 / (iter as f64).sqrt();
                for i in 0..d {
                    t[i] -= step * grad[i] / size;
                }
                project_to_simplex(&mut t);
            }
            best
        })
        .collect();
    let mut candidates: Vec<Vec<f64>> = runs.into_iter().map(|(_, a)| a).collect();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        candidates.push(e);
    }
    let mut best: Option<(Value, Vec<Rational>)> = None;
    for c in candidates {
        let alpha = rationalize(&c);
        let value = evaluate(space, &family, &alpha)?;
        let replace = match &best {
            None => true,
            Some((bv, ba)) => value < *bv || (value == *bv && alpha < *ba),
        };
        if replace {
            best = Some((value, alpha));
        }
    }
    let (value, alpha) = best.expect("candidates are nonempty");
    Ok(MinimizationResult { value, face: signs_of(&alpha), alpha, method: Method::SubgradientHeuristic })
}

/// Exact for polyhedral norms within the face cap, heuristic otherwise.
pub fn crosspolytope_auto(space: &SpaceDescriptor, vectors: &[FiniteVector]) -> Result<MinimizationResult> {
    if space.is_polyhedral() && vectors.len() <= FACE_CAP {
        crosspolytope_min(space, vectors)
    } else {
        crosspolytope_heuristic(space, vectors)
    }
}

fn grid_points(d: usize, k: i64) -> u64 {
    // Points a ∈ ℤ^d with Σ|a_i| = k: Σ_j 2^j C(d, j) C(k-1, j-1).
    let mut total: u64 = 0;
    for j in 1..=d as u64 {
        let c = crate::admissible::binomial(d as u64, j)
            .saturating_mul(crate::admissible::binomial(k as u64 - 1, j - 1))
            .saturating_mul(1 << j);
        total = total.saturating_add(c);
    }
    total
}

fn enumerate_grid(d: usize, k: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let used: i64 = prefix.iter().map(|a| a.abs()).sum();
    let left = k - used;
    if prefix.len() + 1 == d {
        if left == 0 {
            prefix.push(0);
            out.push(prefix.clone());
            prefix.pop();
        } else {
            for a in [-left, left] {
                prefix.push(a);
                out.push(prefix.clone());
                prefix.pop();
            }
        }
        return;
    }
    for a in -left..=left {
        prefix.push(a);
        enumerate_grid(d, k, prefix, out);
        prefix.pop();
    }
}

/// Exhaustive evaluation over `{α : Σ|α_i| = 1, α_i ∈ step·ℤ}`; `1/step` must be an integer.
pub fn grid_oracle(space: &SpaceDescriptor, vectors: &[FiniteVector], step: &Rational) -> Result<MinimizationResult> {
    check_family(space, vectors)?;
    let d = vectors.len();
    if d > 4 {
        return Err(Error::CapExceeded { what: "grid oracle dimension", actual: d, cap: 4 });
    }
    let inv = step.recip();
    if !step.is_positive() || !inv.is_integer() {
        return Err(Error::InvalidArgument("grid step must be 1/K for a positive integer K".into()));
    }
    let k: i64 = inv.to_integer().try_into().map_err(|_| Error::InvalidArgument("grid step too fine".into()))?;
    let points = grid_points(d, k);
    if points > GRID_CAP {
        return Err(Error::CapExceeded { what: "grid points", actual: points as usize, cap: GRID_CAP as usize });
    }
    let family = DenseFamily::new(vectors);
    let mut grid = Vec::with_capacity(points as usize);
    enumerate_grid(d, k, &mut Vec::new(), &mut grid);
    let kf = k as f64;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|a| {
            let af: Vec<f64> = a.iter().map(|&x| x as f64 / kf).collect();
            let (w, t) = family.combine_f64(&af);
            family.norm_dense_f64(space, &w, t)
        })
        .collect::<Result<_>>()?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let margin = 1e-9 * (1.0 + min.abs());
    let mut best: Option<(Value, Vec<Rational>)> = None;
    for (a, v) in grid.iter().zip(&values) {
        if *v > min + margin {
            continue;
        }
        let alpha: Vec<Rational> = a.iter().map(|&x| Rational::new(x.into(), k.into())).collect();
        let value = evaluate(space, &family, &alpha)?;
        let replace = match &best {
            None => true,
            Some((bv, ba)) => value < *bv || (value == *bv && alpha < *ba),
        };
        if replace {
            best = Some((value, alpha));
        }
    }
    let (value, alpha) = best.expect("grid is nonempty");
    Ok(MinimizationResult { value, face: signs_of(&alpha), alpha, method: Method::GridOracle })
}

/// Σ|α_i| = 1 exactly.
pub fn on_cross_polytope(alpha: &[Rational]) -> bool {
    alpha.iter().map(|a| a.abs()).sum::<Rational>().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn basis(ks: &[u64]) -> Vec<FiniteVector> {
        ks.iter().map(|&k| FiniteVector::basis(k)).collect()
    }

    #[test]
    fn l1_disjoint_units() {
        let r = crosspolytope_min(&SpaceDescriptor::l1(), &basis(&[1, 2, 3])).unwrap();
        assert_eq!(r.value, Value::Exact(int(1)));
        assert!(on_cross_polytope(&r.alpha));
    }

    #[test]
    fn sup_two_units() {
        let r = crosspolytope_min(&SpaceDescriptor::Sup, &basis(&[1, 2])).unwrap();
        assert_eq!(r.value, Value::Exact(rat(1, 2)));
        assert_eq!(r.alpha, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(r.face, vec![1, 1]);
        let g = grid_oracle(&SpaceDescriptor::Sup, &basis(&[1, 2]), &rat(1, 40)).unwrap();
        assert_eq!(g.value, Value::Exact(rat(1, 2)));
    }

    #[test]
    fn schreier_admissible_units() {
        let r = crosspolytope_min(&SpaceDescriptor::Schreier, &basis(&[5, 6, 7, 8, 9])).unwrap();
        assert_eq!(r.value, Value::Exact(int(1)));
        let g = grid_oracle(&SpaceDescriptor::Schreier, &basis(&[5, 6, 7, 8]), &rat(1, 12)).unwrap();
        assert_eq!(g.value, Value::Exact(int(1)));
    }

    #[test]
    fn grid_oracle_basics() {
        let v = FiniteVector::from_slice(&[int(3), int(-4)]);
        let g = grid_oracle(&SpaceDescriptor::l1(), &[v.clone()], &rat(1, 10)).unwrap();
        assert_eq!(g.value, Value::Exact(int(7)));
        let g = grid_oracle(&SpaceDescriptor::l1(), &[v.clone(), v.neg()], &rat(1, 10)).unwrap();
        assert_eq!(g.value, Value::Exact(int(0)));
        let g = grid_oracle(&SpaceDescriptor::Sup, &basis(&[1, 2, 3]), &rat(1, 60)).unwrap();
        assert_eq!(g.value, Value::Exact(rat(1, 3)));
    }

    #[test]
    fn grid_counts_match_enumeration() {
        for d in 1..=4 {
            for k in 1..=6 {
                let mut out = Vec::new();
                enumerate_grid(d, k, &mut Vec::new(), &mut out);
                assert_eq!(out.len() as u64, grid_points(d, k), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn heuristic_close_to_exact() {
        let vs = vec![
            FiniteVector::from_slice(&[int(1), int(2), int(0)]),
            FiniteVector::from_slice(&[int(0), int(1), int(-1)]),
            FiniteVector::from_slice(&[rat(1, 2), int(0), int(1)]),
        ];
        for space in [SpaceDescriptor::l1(), SpaceDescriptor::Sup, SpaceDescriptor::Schreier] {
            let exact = crosspolytope_min(&space, &vs).unwrap();
            let heur = crosspolytope_heuristic(&space, &vs).unwrap();
            assert!(exact.value.le_within(&heur.value, 0.0), "{space}");
            assert!(heur.value.to_f64() <= exact.value.to_f64() + 0.05, "{space} {} {}", exact.value, heur.value);
            assert!(on_cross_polytope(&heur.alpha));
        }
    }

    #[test]
    fn lp_space_routes_to_heuristic() {
        let s = SpaceDescriptor::lp(int(2));
        assert!(matches!(crosspolytope_min(&s, &basis(&[1, 2])), Err(Error::NonPolyhedral(_))));
        let r = crosspolytope_auto(&s, &basis(&[1, 2])).unwrap();
        assert!((r.value.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn c_space_with_tails() {
        let a = FiniteVector::new([(CoordIndex::flat(1), int(1))].into_iter().collect(), int(-1));
        let b = FiniteVector::new(
            [(CoordIndex::flat(1), int(1)), (CoordIndex::flat(2), int(1))].into_iter().collect(),
            int(-1),
        );
        let r = crosspolytope_min(&SpaceDescriptor::C, &[a.clone(), b.clone()]).unwrap();
        let g = grid_oracle(&SpaceDescriptor::C, &[a, b], &rat(1, 40)).unwrap();
        assert!(r.value.le_within(&g.value, 1e-12));
    }
}
