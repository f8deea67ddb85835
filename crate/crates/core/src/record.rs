//! Outcome of a single inequality or identity check.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative slack allowed on inequality margins.
pub const TOL_INEQ: f64 = 1e-9;
/// Denominator floor for relative margins.
pub const MARGIN_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_hash: Option<String>,
    /// Named diagnostic numbers (component residuals, raw estimates, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
    /// Full serialized instance, attached to failing campaign records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RecordMeta {
    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn set_z(&mut self, z: &[Complex64]) {
        self.z = z.iter().map(|w| [w.re, w.im]).collect();
    }
}

/// `margin = rhs − |lhs|`; `pass ⇔ margin ≥ −TOL_INEQ·max(rhs, floor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub check: String,
    #[serde(with = "pair")]
    pub lhs: Complex64,
    pub rhs: f64,
    pub margin: f64,
    pub rel_margin: f64,
    pub pass: bool,
    pub meta: RecordMeta,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<VerificationRecord>,
}

impl VerificationRecord {
    /// Inequality `|lhs| ≤ rhs`.
    pub fn inequality(check: &str, lhs: Complex64, rhs: f64) -> Self {
        let margin = rhs - lhs.norm();
        let denom = rhs.max(MARGIN_FLOOR);
        VerificationRecord {
            check: check.to_string(),
            lhs,
            rhs,
            margin,
            rel_margin: margin / denom,
            pass: margin.is_finite() && margin >= -TOL_INEQ * denom,
            meta: RecordMeta::default(),
            parts: Vec::new(),
        }
    }

    /// Identity check: a residual against an absolute tolerance.
    pub fn residual(check: &str, residual: f64, tol: f64) -> Self {
        let mut r = Self::inequality(check, Complex64::new(residual, 0.0), tol);
        if residual.is_nan() {
            r.pass = false;
        }
        r
    }

    /// A record standing for several sub-checks: the headline values are the
    /// worst part's, and it passes only when every part passes.
    pub fn compound(check: &str, parts: Vec<VerificationRecord>) -> Self {
        let worst = parts
            .iter()
            .min_by(|a, b| a.rel_margin.total_cmp(&b.rel_margin))
            .cloned()
            .unwrap_or_else(|| Self::residual(check, 0.0, 0.0));
        let pass = !parts.is_empty() && parts.iter().all(|p| p.pass);
        VerificationRecord {
            check: check.to_string(),
            lhs: worst.lhs,
            rhs: worst.rhs,
            margin: worst.margin,
            rel_margin: worst.rel_margin,
            pass,
            meta: RecordMeta::default(),
            parts,
        }
    }

    /// A check that could not be evaluated; always failing. Numeric fields are
    /// zero so the record stays representable in JSON.
    pub fn errored(check: &str, message: String) -> Self {
        VerificationRecord {
            check: check.to_string(),
            lhs: Complex64::new(0.0, 0.0),
            rhs: 0.0,
            margin: 0.0,
            rel_margin: 0.0,
            pass: false,
            meta: RecordMeta { error: Some(message), ..RecordMeta::default() },
            parts: Vec::new(),
        }
    }

    pub fn with_meta(mut self, meta: RecordMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn part(&self, check: &str) -> Option<&VerificationRecord> {
        self.parts.iter().find(|p| p.check == check)
    }
}

mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
