//! Finite-horizon estimators for the sequence and set quantities.
//!
//! A finite prefix never determines a limit quantity, so every estimate
//! carries a [`BoundKind`] saying what the number is known to be.

mod profile;
mod separation;
mod sets;
mod spreading;
mod weak;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::functional::Functional;
use crate::rational::{serde_rational, serde_rational_vec, Rational, Value};

pub use profile::{
    ca_estimate, cca_estimate, cesaro_difference, diagonal_extraction, subsequence_family, tail_certificate,
    tcca_estimate, wca_estimate, window_profile, window_profile_of, WindowProfile, SUPPORT_CAP,
};
pub use separation::{asep_upper, asep_upper_with_cap, ASEP_PAIR_CAP};
pub use sets::{set_quantities, EvidenceResult, MemberSummary, SetHorizons, SetReport};
pub use spreading::{
    sm_delta_check, sm_delta_upper, spreading_vectors, SetValue, SpreadingCheck, SpreadingStrategy, SpreadingUpper,
};
pub use weak::{default_epsilon_grid, wu_lower, FunctionalFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "ca")]
    Ca,
    #[serde(rename = "wca")]
    Wca,
    #[serde(rename = "cca")]
    Cca,
    #[serde(rename = "tcca")]
    Tcca,
    #[serde(rename = "asep")]
    Asep,
    #[serde(rename = "sm")]
    Sm,
    #[serde(rename = "wu")]
    Wu,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ca => "ca",
            Quantity::Wca => "wca",
            Quantity::Cca => "cca",
            Quantity::Tcca => "tcca",
            Quantity::Asep => "asep",
            Quantity::Sm => "sm",
            Quantity::Wu => "wu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ca" => Quantity::Ca,
            "wca" => Quantity::Wca,
            "cca" => Quantity::Cca,
            "tcca" => Quantity::Tcca,
            "asep" => Quantity::Asep,
            "sm" => Quantity::Sm,
            "wu" => Quantity::Wu,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// `‖x_k - x_l‖` attains the value.
    IndexPair { k: u64, l: u64 },
    /// `‖(1/#F)(Σ_F x - Σ_H x)‖` attains the value.
    Blocks { f: Vec<u64>, h: Vec<u64> },
    /// `‖Σ_{i∈F} α_i (x_i - x)‖` attains the value, with `Σ|α_i| = 1`.
    Coefficients {
        set: Vec<u64>,
        #[serde(with = "serde_rational_vec")]
        alpha: Vec<Rational>,
    },
    /// `#{k ≤ N : |f(x_k - x)| > ε} = count`.
    Functional {
        functional: Functional,
        #[serde(with = "serde_rational")]
        epsilon: Rational,
        count: u64,
        count_at_half: u64,
    },
    /// The estimate came from the subsequence selected by `map`.
    Subsequence { label: String, inner: Option<Box<Witness>> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantityEstimate {
    pub quantity: Quantity,
    pub value: Value,
    pub bound_kind: BoundKind,
    pub horizon: u64,
    pub params: BTreeMap<String, String>,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Value>>,
}

impl QuantityEstimate {
    fn new(quantity: Quantity, value: Value, bound_kind: BoundKind, horizon: u64) -> Self {
        QuantityEstimate { quantity, value, bound_kind, horizon, params: BTreeMap::new(), witness: None, profile: None }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// Float screening margin around a value `v`.
pub(crate) fn margin(v: f64) -> f64 {
    1e-9 * (1.0 + v.abs())
}
