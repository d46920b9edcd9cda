//! Registered regression checks with their default horizons.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{fuzz_invariants, timed, CheckRecord, VerificationReport, VerifyConfig};
use crate::admissible::Admissibility;
use crate::catalog::sets::{set_record, SetQuantity};
use crate::catalog::{lookup, IndexMap};
use crate::distortion::{distortion_blocks, DistortionParams};
use crate::error::Result;
use crate::estimate::{
    asep_upper, cesaro_difference, default_epsilon_grid, set_quantities, sm_delta_check, sm_delta_upper,
    tcca_estimate, wu_lower, BoundKind, FunctionalFamily, SetHorizons, Witness,
};
use crate::polytope::grid_oracle;
use crate::ramsey::{dichotomy_search, verify_dichotomy, DichotomyCase, HereditaryFamily};
use crate::rational::{self, int, rat, Rational, Value};
use crate::space::{norm_exact, SpaceDescriptor};
use crate::vector::{CoordIndex, FiniteVector};

type Check = fn(&VerifyConfig) -> Result<CheckRecord>;

const CHECKS: &[(&str, Check)] = &[
    ("ball-c", ball_c),
    ("ball-c0", ball_c0),
    ("ball-l1", ball_l1),
    ("ball-schreier", ball_schreier),
    ("c-signflip-cesaro", signflip_cesaro),
    ("c-signflip-pair", signflip_pair),
    ("c0-sm", c0_sm),
    ("c0-summing-tcca", summing_tcca),
    ("distortion-schreier", distortion_schreier),
    ("ell1-asep", ell1_asep),
    ("ell1-cesaro", ell1_cesaro),
    ("fuzz-regression", fuzz_regression),
    ("omega-example-norm", omega_norm),
    ("omega-set", omega_set),
    ("ramsey-cardinality-cap", ramsey_cardinality),
    ("ramsey-schreier", ramsey_schreier),
    ("schreier-cube-cesaro", schreier_cube),
    ("schreier-pair-set", schreier_pair_set),
    ("schreier-sm", schreier_sm),
    ("schreier-wu", schreier_wu),
];

pub const CHECK_IDS: &[&str] = &[
    "ball-c",
    "ball-c0",
    "ball-l1",
    "ball-schreier",
    "c-signflip-cesaro",
    "c-signflip-pair",
    "c0-sm",
    "c0-summing-tcca",
    "distortion-schreier",
    "ell1-asep",
    "ell1-cesaro",
    "fuzz-regression",
    "omega-example-norm",
    "omega-set",
    "ramsey-cardinality-cap",
    "ramsey-schreier",
    "schreier-cube-cesaro",
    "schreier-pair-set",
    "schreier-sm",
    "schreier-wu",
];

/// Runs the registered checks (all, or those in `only`); library errors abort.
pub fn run_paper_suite(config: &VerifyConfig, only: Option<&[String]>) -> Result<VerificationReport> {
    let selected: Vec<&(&str, Check)> =
        CHECKS.iter().filter(|(id, _)| only.map_or(true, |o| o.iter().any(|x| x == id))).collect();
    let mut records = selected
        .par_iter()
        .map(|(_, check)| timed(config.timings, || check(config)))
        .collect::<Result<Vec<_>>>()?;
    for r in records.iter_mut().filter(|r| !r.pass) {
        r.reproduce = Some(format!("bsaks verify paper --only {}", r.id));
    }
    let mut params = BTreeMap::new();
    params.insert("config".to_string(), serde_json::to_string(config).expect("config serializes"));
    Ok(VerificationReport::new("paper", params, records))
}

fn at_least(v: &Value, bound: &Rational) -> bool {
    match v {
        Value::Exact(r) => r >= bound,
        Value::Approx(x) => *x >= rational::to_f64(bound),
    }
}

fn omega_norm(c: &VerifyConfig) -> Result<CheckRecord> {
    let top = c.horizons.omega_max;
    let space = SpaceDescriptor::harmonic_l1_sum();
    let mut mismatches = Vec::new();
    for n in 1..=top {
        let mut sum = FiniteVector::zero();
        for m in 1..=top {
            sum.add_at(CoordIndex::pair(n, m), &int(1));
            let got = norm_exact(&space, &sum.scale(&rat(1, m as i64)))?;
            let want = rat(1, n as i64).max(rat(1, m as i64));
            if got != want {
                mismatches.push(format!("n={n} m={m}: {}", rational::format_rational(&got)));
            }
        }
    }
    let rec = CheckRecord::new(
        "omega-example-norm",
        "norm of (x^n_1+…+x^n_m)/m in the harmonic l1-sum of max{a|x|_1, |x|_inf} spaces",
        &format!("= max{{1/n, 1/m}} for all 1 ≤ n, m ≤ {top}"),
        "0 (exact)",
    )
    .value("pairs", top * top)
    .value("mismatches", mismatches.len())
    .verdict(mismatches.is_empty());
    Ok(if mismatches.is_empty() { rec } else { rec.detail(mismatches.join(", ")) })
}

fn ell1_asep(c: &VerifyConfig) -> Result<CheckRecord> {
    let [n, b] = c.horizons.asep;
    let e = lookup("ell1-basis")?;
    let est = asep_upper(&e.space, &e.spec, n, b)?;
    let witness_ok = est.witness == Some(Witness::Blocks { f: vec![1], h: vec![2] });
    Ok(CheckRecord::new(
        "ell1-asep",
        "separation of equal-size ordered blocks of the l1 unit basis",
        "= 2 with witness F = {1}, H = {2}",
        "0 (exact)",
    )
    .estimate("asep", &est.value, est.bound_kind)
    .value("witness", serde_json::to_string(&est.witness).expect("serializes"))
    .value("horizon", n)
    .value("max_block", b)
    .verdict(est.value == Value::Exact(int(2)) && witness_ok))
}

fn schreier_sm(c: &VerifyConfig) -> Result<CheckRecord> {
    let e = lookup("schreier-basis")?;
    let window: Vec<u64> = (1..=c.horizons.sm_window).collect();
    let r = sm_delta_upper(&e.space, &e.spec, &window, Admissibility::Schreier)?;
    // Grid oracle on the compressed sets of size ≤ 4.
    let mut grid_min: Option<Value> = None;
    for d in 1..=4u64 {
        let idx: Vec<u64> = (d..2 * d).collect();
        if *idx.last().unwrap() > c.horizons.sm_window {
            break;
        }
        let g = grid_oracle(&e.space, &e.spec.generate_many(&idx), &rat(1, 20))?;
        grid_min = Some(grid_min.map_or(g.value.clone(), |m| m.min(g.value)));
    }
    let grid_min = grid_min.expect("window holds {1}");
    let agree = (grid_min.to_f64() - r.estimate.value.to_f64()).abs() <= c.tolerances.float;
    Ok(CheckRecord::new(
        "schreier-sm",
        "spreading constant of the Schreier unit basis over admissible subsets of a window",
        "face-LP value = 1 and grid oracle agrees",
        &format!("0 (exact); grid {}", c.tolerances.float),
    )
    .estimate("sm", &r.estimate.value, r.estimate.bound_kind)
    .estimate("grid", &grid_min, BoundKind::Upper)
    .value("sets", r.sets.len())
    .verdict(r.estimate.value == Value::Exact(int(1)) && agree))
}

fn c0_sm(c: &VerifyConfig) -> Result<CheckRecord> {
    let e = lookup("c0-basis")?;
    let window: Vec<u64> = (1..=c.horizons.sm_window).collect();
    let r = sm_delta_upper(&e.space, &e.spec, &window, Admissibility::Schreier)?;
    let ok_witness = matches!(&r.estimate.witness, Some(Witness::Coefficients { set, .. }) if *set == vec![5, 6, 7, 8, 9]);
    Ok(CheckRecord::new(
        "c0-sm",
        "spreading constant of the c0 unit basis over admissible subsets of {1..10}",
        "= 1/5 with witness F = {5..9}",
        "0 (exact)",
    )
    .estimate("sm", &r.estimate.value, r.estimate.bound_kind)
    .value("witness", serde_json::to_string(&r.estimate.witness).expect("serializes"))
    .verdict(r.estimate.value == Value::Exact(rat(1, 5)) && ok_witness))
}

fn signflip_cesaro(c: &VerifyConfig) -> Result<CheckRecord> {
    let [m, n] = c.horizons.signflip_cesaro;
    let e = lookup("c-signflip")?;
    let v = cesaro_difference(&e.space, &e.spec, m, n)?;
    let bound = int(2) - rat(2 * m as i64, n as i64);
    Ok(CheckRecord::new(
        "c-signflip-cesaro",
        "Cesàro means of the sign-flip sequence in c stay separated: |y_m - y_n| ≥ 2 - 2m/n",
        &format!("|y_{n} - y_{m}| ≥ {}", rational::format_rational(&bound)),
        "0 (exact)",
    )
    .estimate("difference", &v, BoundKind::Exact)
    .verdict(v.is_exact() && at_least(&v, &bound)))
}

fn signflip_pair(_: &VerifyConfig) -> Result<CheckRecord> {
    let e = lookup("c-signflip")?;
    let v = cesaro_difference(&e.space, &e.spec, 3, 12)?;
    Ok(CheckRecord::new(
        "c-signflip-pair",
        "Cesàro means of the sign-flip sequence in c: |y_3 - y_12| = 2 - 2·3/12",
        "= 3/2",
        "0 (exact)",
    )
    .estimate("difference", &v, BoundKind::Exact)
    .verdict(v == Value::Exact(rat(3, 2))))
}

fn ell1_cesaro(c: &VerifyConfig) -> Result<CheckRecord> {
    let [m, n] = c.horizons.ell1_cesaro;
    let e = lookup("ell1-basis")?;
    let v = cesaro_difference(&e.space, &e.spec, m, n)?;
    let bound = int(2) * (int(1) - rat(m as i64, n as i64));
    Ok(CheckRecord::new(
        "ell1-cesaro",
        "Cesàro means of a 1-spreading sequence: |y_m - y_n| ≥ 2δ(1 - m/n) with δ = 1",
        &format!("|y_{n} - y_{m}| ≥ {}", rational::format_rational(&bound)),
        "0 (exact)",
    )
    .estimate("difference", &v, BoundKind::Exact)
    .verdict(at_least(&v, &bound)))
}

fn schreier_cube(c: &VerifyConfig) -> Result<CheckRecord> {
    let [n0, n1] = c.horizons.schreier_cube;
    let e = lookup("schreier-basis")?;
    let spec = e.spec.subsequence(IndexMap::Cube)?;
    let at = |n: u64| cesaro_difference(&e.space, &spec, n * n + n, n * n * n + n);
    let (v0, v1) = (at(n0)?, at(n1)?);
    Ok(CheckRecord::new(
        "schreier-cube-cesaro",
        "Cesàro means of the cube subsequence of the Schreier basis separate by nearly 2c with c = 1",
        &format!("|y_(N^3+N) - y_(N^2+N)| ≥ 1.6 at N = {n0}, and larger at N = {n1}"),
        "0 (exact)",
    )
    .estimate(&format!("N={n0}"), &v0, BoundKind::Exact)
    .estimate(&format!("N={n1}"), &v1, BoundKind::Exact)
    .verdict(at_least(&v0, &rat(8, 5)) && v1 > v0))
}

fn summing_tcca(c: &VerifyConfig) -> Result<CheckRecord> {
    let n = c.horizons.summing_tcca;
    let e = lookup("c0-summing")?;
    let est = tcca_estimate(&e.space, &e.spec, n)?;
    Ok(CheckRecord::new(
        "c0-summing-tcca",
        "subsequence Cesàro defect of the summing basis of c0 is at most the norm 1",
        "tcca upper estimate ≤ 1 + 1/50",
        "1/50 (finite horizon)",
    )
    .estimate("tcca", &est.value, est.bound_kind)
    .value("subsequence", est.params.get("subsequence").cloned().unwrap_or_default())
    .value("horizon", n)
    .verdict(est.value <= Value::Exact(rat(51, 50))))
}

fn distortion_schreier(c: &VerifyConfig) -> Result<CheckRecord> {
    let e = lookup("schreier-basis")?;
    let mut p = DistortionParams::new(rat(1, 5));
    p.norm_horizon = c.horizons.distortion;
    let out = distortion_blocks(&e.space, &e.spec, &p)?;
    let check = sm_delta_check(&e.space, &out.spec, &rat(4, 5), c.horizons.distortion, Admissibility::Schreier)?;
    let norms_ok = out.max_norm <= Value::Exact(int(1));
    Ok(CheckRecord::new(
        "distortion-schreier",
        "normalized blocks of the Schreier basis give a spreading constant ≥ 1 - ω (ω = 1/5)",
        &format!("all admissible F ⊂ {{1..{}}} have constant ≥ 4/5 and |y_k| ≤ 1", c.horizons.distortion),
        "0 (exact)",
    )
    .value("eta", rational::format_rational(&out.eta))
    .value("beta", rational::format_rational(&out.beta))
    .value("block_length", out.block_length)
    .estimate("max_norm", &out.max_norm, BoundKind::Exact)
    .value("sets_checked", check.checked_sets)
    .value("violations", check.violations.len())
    .verdict(check.pass && check.certified && norms_ok))
}

fn ramsey_cardinality(_: &VerifyConfig) -> Result<CheckRecord> {
    let fam = HereditaryFamily::cardinality_cap(18, 3);
    let r = dichotomy_search(&fam, 6)?;
    let verified = verify_dichotomy(&fam, &r);
    let rec = CheckRecord::new(
        "ramsey-cardinality-cap",
        "hereditary dichotomy for sets of at most 3 elements of {1..18}",
        "case a with d = 3 at m = 6, certificate re-verified",
        "exact",
    )
    .value("case", format!("{:?}", r.case).to_lowercase())
    .value("d", r.d.map_or("-".into(), |d| d.to_string()))
    .value("M", format!("{:?}", r.set))
    .verdict(r.case == DichotomyCase::A && r.d == Some(3) && verified.is_ok());
    Ok(match verified {
        Err(e) => rec.detail(e),
        Ok(()) => rec,
    })
}

fn ramsey_schreier(_: &VerifyConfig) -> Result<CheckRecord> {
    let fam = HereditaryFamily::schreier(18);
    let r = dichotomy_search(&fam, 5)?;
    let verified = verify_dichotomy(&fam, &r);
    let rec = CheckRecord::new(
        "ramsey-schreier",
        "hereditary dichotomy for the admissible subsets of {1..18}",
        "case b at m = 5, certificate re-verified",
        "exact",
    )
    .value("case", format!("{:?}", r.case).to_lowercase())
    .value("M", format!("{:?}", r.set))
    .value("f", serde_json::to_string(&r.f).expect("serializes"))
    .verdict(r.case == DichotomyCase::B && verified.is_ok());
    Ok(match verified {
        Err(e) => rec.detail(e),
        Ok(()) => rec,
    })
}

fn set_check(id: &str, set_id: &str, reference: &str, expect: &[(SetQuantity, Rational)]) -> Result<CheckRecord> {
    let report = set_quantities(&set_record(set_id)?, &SetHorizons::default())?;
    let mut rec = CheckRecord::new(id, reference, "stated values match; evidence and inequality chain consistent", "0 (exact)");
    let mut ok = report.consistent;
    for (q, want) in expect {
        let got = report.stated_value(*q);
        ok &= got == Some(want);
        rec = rec.value(q.name(), got.map_or("-".into(), rational::format_rational));
    }
    for ev in &report.evidence {
        rec = rec.estimate(&format!("{} via {}", ev.target, ev.member), &ev.value, ev.bound_kind);
    }
    let broken: Vec<String> = report
        .evidence
        .iter()
        .filter(|e| !e.holds)
        .map(|e| format!("{} evidence {} exceeds stated bound", e.target, e.value.display_exact()))
        .chain(report.chain.iter().filter(|c| !c.holds).map(|c| c.relation.clone()))
        .collect();
    rec = rec.verdict(ok);
    Ok(if broken.is_empty() { rec } else { rec.detail(broken.join("; ")) })
}

fn ball_l1(_: &VerifyConfig) -> Result<CheckRecord> {
    set_check("ball-l1", "ball-l1", "unit ball of l1: Banach-Saks constant 2, weak constant 0", &[(SetQuantity::Bs, int(2)), (SetQuantity::Wbs, int(0))])
}

fn ball_c0(_: &VerifyConfig) -> Result<CheckRecord> {
    set_check("ball-c0", "ball-c0", "unit ball of c0: Banach-Saks constant 1, weak constant 0", &[(SetQuantity::Bs, int(1)), (SetQuantity::Wbs, int(0))])
}

fn ball_c(_: &VerifyConfig) -> Result<CheckRecord> {
    set_check("ball-c", "ball-c", "unit ball of c: Banach-Saks constant 2, weak constant 0", &[(SetQuantity::Bs, int(2)), (SetQuantity::Wbs, int(0))])
}

fn ball_schreier(_: &VerifyConfig) -> Result<CheckRecord> {
    set_check(
        "ball-schreier",
        "ball-schreier",
        "unit ball of the Schreier space: weak Banach-Saks constant 2",
        &[(SetQuantity::Bs, int(2)), (SetQuantity::Wbs, int(2))],
    )
}

fn omega_set(_: &VerifyConfig) -> Result<CheckRecord> {
    let mut rec = CheckRecord::new(
        "omega-set",
        "block sets of the harmonic l1-sum: Banach-Saks constant ≤ 2/n while the measures of noncompactness stay ≥ 1/2",
        "evidence consistent with bs ≤ 2/n for n = 2..5",
        "0 (exact)",
    );
    let mut ok = true;
    for n in 2..=5 {
        let report = set_quantities(&set_record(&format!("omega-set:{n}"))?, &SetHorizons::default())?;
        ok &= report.consistent;
        for ev in report.evidence_for(SetQuantity::Bs) {
            rec = rec.estimate(&format!("bs evidence n={n}"), &ev.value, ev.bound_kind);
        }
    }
    Ok(rec.verdict(ok))
}

fn schreier_pair_set(_: &VerifyConfig) -> Result<CheckRecord> {
    let mut rec = CheckRecord::new(
        "schreier-pair-set",
        "pairs (e_k, ε e_k) in Schreier ⊕∞ l1: ω ≤ ε while bs = 2",
        "stated values consistent with evidence for ε ∈ {0, 1/10, 1/2}",
        "0 (exact)",
    );
    let mut ok = true;
    for eps in ["0", "1/10", "1/2"] {
        let report = set_quantities(&set_record(&format!("schreier-pair-set:{eps}"))?, &SetHorizons::default())?;
        ok &= report.consistent && report.stated_value(SetQuantity::Bs) == Some(&int(2));
        for ev in &report.evidence {
            rec = rec.estimate(&format!("{} eps={eps}", ev.target), &ev.value, ev.bound_kind);
        }
    }
    Ok(rec.verdict(ok))
}

fn schreier_wu(c: &VerifyConfig) -> Result<CheckRecord> {
    let e = lookup("schreier-basis")?;
    let grid = default_epsilon_grid(&e.spec.bound);
    let est = wu_lower(&e.space, &e.spec, None, &grid, FunctionalFamily::CoordinateAndAdmissibleSigns, c.horizons.wu)?;
    Ok(CheckRecord::new(
        "schreier-wu",
        "the Schreier basis is weakly null but not uniformly weakly null",
        "wu lower bound over admissible sign functionals ≥ 9/10",
        "0 (exact)",
    )
    .estimate("wu", &est.value, est.bound_kind)
    .verdict(at_least(&est.value, &rat(9, 10))))
}

fn fuzz_regression(c: &VerifyConfig) -> Result<CheckRecord> {
    let report = fuzz_invariants(&c.fuzz, c)?;
    let failing: Vec<String> = report.checks.iter().filter(|r| !r.pass).map(|r| r.id.clone()).collect();
    let rec = CheckRecord::new(
        "fuzz-regression",
        "finite-window invariants on random rational sequences",
        "all invariants hold",
        "1e-12 (LP vs grid), exact otherwise",
    )
    .value("seed", c.fuzz.seed)
    .value("trials", c.fuzz.trials)
    .value("invariants", report.checks.len())
    .value("failed", failing.len())
    .verdict(failing.is_empty());
    Ok(if failing.is_empty() { rec } else { rec.detail(failing.join(", ")) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_match() {
        let ids: Vec<&str> = CHECKS.iter().map(|(id, _)| *id).collect();
        assert_eq!(ids, CHECK_IDS);
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn quick_checks_pass() {
        let c = VerifyConfig::default();
        let only: Vec<String> = ["omega-example-norm", "ell1-asep", "c0-sm", "schreier-sm", "ramsey-schreier", "c-signflip-pair"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let r = run_paper_suite(&c, Some(&only)).unwrap();
        assert_eq!(r.checks.len(), only.len());
        assert!(r.all_pass(), "{}", r.to_json());
    }
}
