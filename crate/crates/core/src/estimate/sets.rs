//! Set-level reports: stated values of a catalog set next to the finite
//! evidence computed from its member sequences.

use serde::Serialize;

use super::{asep_upper, cca_estimate, cesaro_difference, sm_delta_upper, tcca_estimate, wca_estimate};
use super::{BoundKind, QuantityEstimate};
use crate::admissible::Admissibility;
use crate::catalog::sets::{AnalyticValue, CatalogSetRecord, ChainCheck, MemberRef, Probe, SetQuantity};
use crate::catalog::{lookup, CatalogEntry};
use crate::error::Result;
use crate::rational::{self, rat, Rational, Value};
use crate::space::FLOAT_TOLERANCE;

/// Horizons for the per-member summaries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetHorizons {
    pub cca: u64,
    pub asep: u64,
    pub asep_block: u64,
    pub sm_window: u64,
}

impl Default for SetHorizons {
    fn default() -> Self {
        SetHorizons { cca: 40, asep: 10, asep_block: 5, sm_window: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemberSummary {
    pub member: String,
    pub estimates: Vec<QuantityEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceResult {
    pub member: String,
    pub probe: Probe,
    pub target: SetQuantity,
    pub value: Value,
    pub bound_kind: BoundKind,
    /// Upper end of the stated interval for the target.
    pub stated_upper: Option<String>,
    pub slack: String,
    pub holds: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetReport {
    pub id: String,
    pub description: String,
    pub analytic: Vec<AnalyticValue>,
    pub members: Vec<MemberSummary>,
    pub evidence: Vec<EvidenceResult>,
    pub chain: Vec<ChainCheck>,
    pub consistent: bool,
}

fn resolve(member: &MemberRef) -> Result<CatalogEntry> {
    let mut entry = lookup(&member.id)?;
    if let Some(map) = &member.map {
        entry.spec = entry.spec.subsequence(map.clone())?;
    }
    Ok(entry)
}

fn run_probe(entry: &CatalogEntry, probe: &Probe) -> Result<(Value, BoundKind)> {
    let (space, spec) = (&entry.space, &entry.spec);
    Ok(match probe {
        Probe::CesaroDifference { n, m } => (cesaro_difference(space, spec, *n, *m)?, BoundKind::Exact),
        Probe::Cca { horizon } => {
            let e = cca_estimate(space, spec, *horizon)?;
            (e.value, e.bound_kind)
        }
        Probe::Tcca { horizon } => {
            let e = tcca_estimate(space, spec, *horizon)?;
            (e.value, e.bound_kind)
        }
        Probe::Wca { horizon } => {
            let e = wca_estimate(space, spec, *horizon)?;
            (e.value, e.bound_kind)
        }
        Probe::HalfAsep { horizon, max_block } => {
            let e = asep_upper(space, spec, *horizon, *max_block)?;
            (e.value.scale(&rat(1, 2)), e.bound_kind)
        }
    })
}

fn at_most(value: &Value, hi: &Rational, slack: &Rational) -> bool {
    let bound = hi + slack;
    match value {
        Value::Exact(r) => *r <= bound,
        Value::Approx(x) => *x <= rational::to_f64(&bound) + FLOAT_TOLERANCE,
    }
}

/// Runs the member estimators and the record's probes, and checks them
/// against the stated values. Sup-type set quantities are never reported as
/// computed; only the stated values carry exactness.
pub fn set_quantities(record: &CatalogSetRecord, horizons: &SetHorizons) -> Result<SetReport> {
    let mut members = Vec::new();
    for m in &record.members {
        let entry = resolve(m)?;
        let (space, spec) = (&entry.space, &entry.spec);
        let window: Vec<u64> = (1..=horizons.sm_window).collect();
        let estimates = vec![
            cca_estimate(space, spec, horizons.cca)?,
            asep_upper(space, spec, horizons.asep, horizons.asep_block)?,
            sm_delta_upper(space, spec, &window, Admissibility::Schreier)?.estimate,
        ];
        members.push(MemberSummary { member: m.label(), estimates });
    }
    let mut evidence = Vec::new();
    for e in &record.evidence {
        let entry = resolve(&e.member)?;
        let (value, bound_kind) = run_probe(&entry, &e.probe)?;
        let (_, hi) = record.interval(e.target);
        let holds = hi.as_ref().map_or(true, |h| at_most(&value, h, &e.slack));
        evidence.push(EvidenceResult {
            member: e.member.label(),
            probe: e.probe.clone(),
            target: e.target,
            value,
            bound_kind,
            stated_upper: hi.as_ref().map(rational::format_rational),
            slack: rational::format_rational(&e.slack),
            holds,
            reason: e.reason.clone(),
        });
    }
    let chain = record.chain_checks();
    let consistent = evidence.iter().all(|e| e.holds) && chain.iter().all(|c| c.holds);
    Ok(SetReport {
        id: record.id.clone(),
        description: record.description.clone(),
        analytic: record.analytic.clone(),
        members,
        evidence,
        chain,
        consistent,
    })
}

impl SetReport {
    pub fn stated_value(&self, q: SetQuantity) -> Option<&Rational> {
        self.analytic.iter().find(|a| a.quantity == q && a.kind == BoundKind::Exact).map(|a| &a.value)
    }

    pub fn evidence_for(&self, q: SetQuantity) -> impl Iterator<Item = &EvidenceResult> {
        self.evidence.iter().filter(move |e| e.target == q)
    }
}
