//! Seeded random instances and the invariants they must satisfy.
//!
//! Trial `i` draws from a ChaCha8 stream selected by `(seed, i)`, so any
//! single trial can be replayed on its own.

use std::collections::BTreeMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CheckRecord, VerificationReport, VerifyConfig};
use crate::admissible::Admissibility;
use crate::catalog::{Generator, SequenceSpec};
use crate::error::{Error, Result};
use crate::estimate::{asep_upper, cesaro_difference, sm_delta_upper, window_profile, Witness};
use crate::polytope::{crosspolytope_heuristic, crosspolytope_min, grid_oracle, on_cross_polytope};
use crate::rational::{self, rat, Rational, Value};
use crate::space::{norm, norm_exact, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u64,
    /// Largest support size of a generated vector.
    pub dims: usize,
    /// Largest sequence length (at least 4).
    pub horizon: u64,
    /// Replay a single trial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only_trial: Option<u64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 0, trials: 10, dims: 4, horizon: 8, only_trial: None }
    }
}

/// Invariant ids, in report order.
pub const FUZZ_INVARIANTS: &[&str] = &[
    "asep-monotone",
    "asep-vs-cesaro",
    "heuristic-vs-grid",
    "lp-vs-grid",
    "profile-monotone",
    "sm-monotone",
    "witness-validity",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzInstance {
    pub trial: u64,
    pub space: SpaceDescriptor,
    /// The sequence; its last term repeats forever.
    pub vectors: Vec<FiniteVector>,
    /// Positions (1-based) fed to the cross-polytope checks.
    pub family: Vec<u64>,
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Rational {
    let q: i64 = rng.random_range(1..=4);
    let p: i64 = loop {
        let p = rng.random_range(-2 * q..=2 * q);
        if p != 0 {
            break p;
        }
    };
    rat(p, q)
}

/// The instance of trial `trial`; deterministic in `(config.seed, trial)`.
pub fn random_instance(config: &FuzzConfig, trial: u64) -> FuzzInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let space = match rng.random_range(0..3) {
        0 => SpaceDescriptor::l1(),
        1 => SpaceDescriptor::Sup,
        _ => SpaceDescriptor::Schreier,
    };
    let dims = rng.random_range(1..=config.dims.max(1));
    let len = rng.random_range(4.min(config.horizon)..=config.horizon);
    let vectors: Vec<FiniteVector> = (0..len)
        .map(|_| {
            let mut entries: Vec<(CoordIndex, Rational)> = Vec::new();
            for i in 1..=dims as u64 {
                if rng.random_bool(0.5) {
                    entries.push((CoordIndex::flat(i), random_scalar(&mut rng)));
                }
            }
            FiniteVector::from_entries(entries)
        })
        .collect();
    let d = rng.random_range(1..=3.min(len as usize));
    let mut family: Vec<u64> = rand::seq::index::sample(&mut rng, len as usize, d).into_iter().map(|i| i as u64 + 1).collect();
    family.sort_unstable();
    FuzzInstance { trial, space, vectors, family }
}

type Outcome = Vec<(&'static str, std::result::Result<(), String>)>;

fn expect(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact(v: &Value) -> std::result::Result<Rational, String> {
    v.exact().cloned().ok_or_else(|| format!("expected an exact value, got {}", v.display_exact()))
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn run_trial(inst: &FuzzInstance, tol: &super::Tolerances) -> Outcome {
    let space = &inst.space;
    let n = inst.vectors.len() as u64;
    let spec = SequenceSpec::new(Generator::Explicit { vectors: inst.vectors.clone() }, rational::int(4));
    let half = n / 2;
    let mut out: Outcome = Vec::new();

    // ½·asep ≤ ‖y_{2k} − y_k‖ whenever block size k is searched.
    let asep = asep_upper(space, &spec, n, half);
    out.push((
        "asep-vs-cesaro",
        (|| {
            let a = exact(&lift(asep.clone())?.value)?;
            for k in 1..=half {
                let d = exact(&lift(cesaro_difference(space, &spec, k, 2 * k))?)?;
                expect(a <= &d * rational::int(2), || {
                    format!("asep {} > 2|y_{} - y_{k}| = {}", rational::format_rational(&a), 2 * k, rational::format_rational(&(&d * rational::int(2))))
                })?;
            }
            Ok(())
        })(),
    ));

    out.push((
        "asep-monotone",
        (|| {
            let full = exact(&lift(asep.clone())?.value)?;
            let singles = exact(&lift(asep_upper(space, &spec, n, 1))?.value)?;
            let shorter = exact(&lift(asep_upper(space, &spec, n - 1, 1))?.value)?;
            expect(full <= singles && singles <= shorter, || {
                format!(
                    "asep(N, N/2) = {}, asep(N, 1) = {}, asep(N-1, 1) = {} not nonincreasing",
                    rational::format_rational(&full),
                    rational::format_rational(&singles),
                    rational::format_rational(&shorter)
                )
            })
        })(),
    ));

    let vs: Vec<FiniteVector> = inst.family.iter().map(|&i| inst.vectors[i as usize - 1].clone()).collect();
    let lp = crosspolytope_min(space, &vs);
    let grid = grid_oracle(space, &vs, &rat(1, 12));
    out.push((
        "lp-vs-grid",
        (|| {
            let lp = lift(lp.clone())?;
            let g = lift(grid.clone())?;
            expect(lp.value.le_within(&g.value, tol.lp_vs_grid), || {
                format!("exact {} > grid {}", lp.value.display_exact(), g.value.display_exact())
            })?;
            let vertex = vs.iter().map(|v| norm_exact(space, v)).collect::<Result<Vec<_>>>();
            let vertex = lift(vertex)?.into_iter().min().expect("nonempty family");
            expect(exact(&lp.value)? <= vertex, || format!("exact {} above the vertex bound", lp.value.display_exact()))
        })(),
    ));

    out.push((
        "heuristic-vs-grid",
        (|| {
            let h = lift(crosspolytope_heuristic(space, &vs))?;
            let g = lift(grid.clone())?;
            let lp = lift(lp.clone())?;
            expect(h.value.le_within(&g.value, tol.heuristic_vs_grid), || {
                format!("heuristic {} > grid {} + {}", h.value.display_exact(), g.value.display_exact(), tol.heuristic_vs_grid)
            })?;
            expect(lp.value.le_within(&h.value, tol.float), || {
                format!("heuristic {} below the exact minimum {}", h.value.display_exact(), lp.value.display_exact())
            })
        })(),
    ));

    let profile = window_profile(space, &spec, n);
    out.push((
        "profile-monotone",
        (|| {
            let p = lift(profile.clone())?;
            let shorter = lift(window_profile(space, &spec, n - 1))?;
            for m in 1..n - 1 {
                expect(p.at(m) >= p.at(m + 1), || format!("D({m}, N) < D({}, N)", m + 1))?;
                expect(shorter.at(m) <= p.at(m), || format!("D({m}, N-1) > D({m}, N)"))?;
            }
            Ok(())
        })(),
    ));

    let small: Vec<u64> = (1..=n.min(6)).collect();
    let large: Vec<u64> = (1..=n.min(8)).collect();
    let sm_small = sm_delta_upper(space, &spec, &small, Admissibility::Schreier);
    out.push((
        "sm-monotone",
        (|| {
            let a = lift(sm_small.clone())?.estimate.value;
            let b = lift(sm_delta_upper(space, &spec, &large, Admissibility::Schreier))?.estimate.value;
            expect(b <= a, || format!("sm over {{1..{}}} = {} exceeds sm over {{1..{}}} = {}", large.len(), b.display_exact(), small.len(), a.display_exact()))
        })(),
    ));

    out.push((
        "witness-validity",
        (|| {
            let a = lift(asep.clone())?;
            if let Some(Witness::Blocks { f, h }) = &a.witness {
                let mut acc = FiniteVector::zero();
                for &i in f {
                    acc = acc.add(&inst.vectors[i as usize - 1]);
                }
                for &i in h {
                    acc = acc.sub(&inst.vectors[i as usize - 1]);
                }
                let v = lift(norm(space, &acc.scale(&rat(1, f.len() as i64))))?;
                expect(f.len() == h.len() && f.last() < h.first() && v == a.value, || format!("asep witness {f:?} | {h:?} re-evaluates to {}", v.display_exact()))?;
            } else {
                return Err("asep without witness".into());
            }
            let s = lift(sm_small.clone())?;
            if let Some(Witness::Coefficients { set, alpha }) = &s.estimate.witness {
                let total: Rational = alpha.iter().map(rational::abs).sum();
                let combo = set.iter().zip(alpha).fold(FiniteVector::zero(), |acc, (&i, c)| acc.add(&inst.vectors[i as usize - 1].scale(c)));
                let v = lift(norm(space, &combo))?;
                expect(total.is_one() && v == s.estimate.value, || format!("sm witness on {set:?} re-evaluates to {}", v.display_exact()))?;
            } else {
                return Err("sm without witness".into());
            }
            let p = lift(profile.clone())?;
            for m in 1..n {
                match p.witnesses[m as usize - 1] {
                    Some((k, l)) => {
                        let v = lift(norm(space, &inst.vectors[l as usize - 1].sub(&inst.vectors[k as usize - 1])))?;
                        expect(m <= k && k < l && v == *p.at(m), || format!("profile witness ({k}, {l}) at m = {m} gives {}", v.display_exact()))?;
                    }
                    None => expect(p.at(m).to_f64() == 0.0, || format!("D({m}, N) > 0 without witness"))?,
                }
            }
            let lp = lift(lp.clone())?;
            let combo = vs.iter().zip(&lp.alpha).fold(FiniteVector::zero(), |acc, (v, c)| acc.add(&v.scale(c)));
            let v = lift(norm(space, &combo))?;
            expect(on_cross_polytope(&lp.alpha) && v == lp.value, || format!("LP coefficients re-evaluate to {}", v.display_exact()))
        })(),
    ));
    out
}

/// Runs the invariants on `config.trials` instances (or the replayed one).
pub fn fuzz_invariants(config: &FuzzConfig, verify: &VerifyConfig) -> Result<VerificationReport> {
    if config.trials > verify.caps.fuzz_trials {
        return Err(Error::CapExceeded {
            what: "fuzz trials",
            actual: config.trials as usize,
            cap: verify.caps.fuzz_trials as usize,
        });
    }
    if config.horizon < 4 || config.dims == 0 {
        return Err(Error::InvalidArgument("fuzzing needs horizon ≥ 4 and dims ≥ 1".into()));
    }
    let trials: Vec<u64> = match config.only_trial {
        Some(t) => vec![t],
        None => (0..config.trials).collect(),
    };
    let results: Vec<(FuzzInstance, Outcome)> = trials
        .par_iter()
        .map(|&t| {
            let inst = random_instance(config, t);
            let out = run_trial(&inst, &verify.tolerances);
            (inst, out)
        })
        .collect();

    let mut records = Vec::new();
    for &id in FUZZ_INVARIANTS {
        let mut failures = 0usize;
        let mut first: Option<(&FuzzInstance, String)> = None;
        for (inst, out) in &results {
            for (name, r) in out {
                if *name == id {
                    if let Err(msg) = r {
                        failures += 1;
                        first.get_or_insert((inst, msg.clone()));
                    }
                }
            }
        }
        let mut rec = CheckRecord::new(id, invariant_reference(id), invariant_relation(id), &invariant_tolerance(id, verify))
            .value("instances", results.len())
            .value("failures", failures)
            .verdict(failures == 0);
        if let Some((inst, msg)) = first {
            rec = rec.detail(format!("{msg}; instance {}", serde_json::to_string(inst).expect("instances serialize")));
            rec.reproduce = Some(format!(
                "bsaks fuzz --seed {} --dims {} --horizon {} --trial {}",
                config.seed, config.dims, config.horizon, inst.trial
            ));
        }
        records.push(rec);
    }
    let mut params = BTreeMap::new();
    params.insert("seed".into(), config.seed.to_string());
    params.insert("trials".into(), results.len().to_string());
    params.insert("dims".into(), config.dims.to_string());
    params.insert("horizon".into(), config.horizon.to_string());
    Ok(VerificationReport::new("fuzz", params, records))
}

fn invariant_reference(id: &str) -> &'static str {
    match id {
        "asep-vs-cesaro" => "Cesàro defect dominates half the block separation on a finite window",
        "asep-monotone" => "block separation upper bound shrinks as pairs are added",
        "lp-vs-grid" => "exact cross-polytope minimum against the grid oracle and the vertex bound",
        "heuristic-vs-grid" => "subgradient heuristic against the grid oracle and the exact minimum",
        "profile-monotone" => "window profile D(m, N) is nonincreasing in m and nondecreasing in N",
        "sm-monotone" => "spreading upper bound shrinks as the window grows",
        "witness-validity" => "reported witnesses re-evaluate to the reported values",
        _ => "",
    }
}

fn invariant_relation(id: &str) -> &'static str {
    match id {
        "asep-vs-cesaro" => "asep(N, N/2) ≤ 2|y_2k - y_k| for all k ≤ N/2",
        "asep-monotone" => "asep(N, N/2) ≤ asep(N, 1) ≤ asep(N-1, 1)",
        "lp-vs-grid" => "exact ≤ grid, exact ≤ min |v_i|",
        "heuristic-vs-grid" => "exact ≤ heuristic ≤ grid + slack",
        "profile-monotone" => "D(m+1, N) ≤ D(m, N), D(m, N-1) ≤ D(m, N)",
        "sm-monotone" => "sm{1..8} ≤ sm{1..6}",
        "witness-validity" => "re-evaluated norm = reported value",
        _ => "",
    }
}

fn invariant_tolerance(id: &str, verify: &VerifyConfig) -> String {
    match id {
        "lp-vs-grid" => verify.tolerances.lp_vs_grid.to_string(),
        "heuristic-vs-grid" => format!("{} (grid), {} (exact)", verify.tolerances.heuristic_vs_grid, verify.tolerances.float),
        _ => "0 (exact)".into(),
    }
}
