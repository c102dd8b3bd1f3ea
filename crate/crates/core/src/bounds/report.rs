use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Stable equation tags used in reports, the CLI and campaign output.
pub mod tags {
    pub const THM1: &str = "thm1";
    pub const THM1_SIMPLIFIED: &str = "thm1s";
    pub const FANNES_AUDENAERT: &str = "fa";
    pub const IMPROVED_FA: &str = "cor2";
    pub const EQ14: &str = "eq14";
    pub const EQ14_GENERAL: &str = "eq14-general";
    pub const AFW: &str = "afw";
    pub const WILDE: &str = "wilde";
    pub const MI: &str = "mi";
    pub const PROP6: &str = "prop6";
    pub const PROP7: &str = "prop7";
    pub const CHAIN_RULE: &str = "chain";
    pub const PROP8: &str = "prop8";
    pub const PROP9: &str = "prop9";
    pub const PROP9_CONVEX: &str = "prop9-convex";
    pub const LEMMA3: &str = "lemma3";
    pub const COR10: &str = "cor10";
}

/// A computed left-hand side next to the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub equation_tag: String,
    /// Absent for formula-only evaluations.
    #[serde(with = "crate::json::opt_float", default)]
    pub lhs: Option<f64>,
    #[serde(with = "crate::json::float")]
    pub rhs: f64,
    /// `rhs − lhs`; absent when `lhs` is.
    #[serde(with = "crate::json::opt_float", default)]
    pub slack: Option<f64>,
    pub applicable: bool,
    /// Why the bound does not apply, when `applicable` is false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Informational markers such as `beyond_range` or `lhs_negative_infinite`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    /// Inputs and intermediate quantities (`eps`, `M`, ...).
    #[serde(with = "crate::json::float_map", default)]
    pub params: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn formula(tag: &str, rhs: f64) -> Self {
        Self {
            equation_tag: tag.to_string(),
            lhs: None,
            rhs,
            slack: None,
            applicable: true,
            reason: None,
            flags: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn compare(tag: &str, lhs: f64, rhs: f64) -> Self {
        let slack = if lhs == f64::NEG_INFINITY && rhs.is_finite() {
            f64::INFINITY
        } else {
            rhs - lhs
        };
        Self {
            lhs: Some(lhs),
            slack: Some(slack),
            ..Self::formula(tag, rhs)
        }
    }

    pub fn inapplicable(tag: &str, reason: impl Into<String>) -> Self {
        Self {
            applicable: false,
            reason: Some(reason.into()),
            ..Self::formula(tag, f64::NAN)
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_flag(mut self, flag: &str) -> Self {
        self.flags.push(flag.to_string());
        self
    }

    pub fn mark_inapplicable(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.reason = Some(reason.into());
        self
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    /// True when the report is applicable and its slack is below `-tol`.
    pub fn violates(&self, tol: f64) -> bool {
        self.applicable && self.slack.is_some_and(|s| s < -tol)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}
