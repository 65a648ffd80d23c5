use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    /// Obtained numerically; for infimum-type constants an upper bound.
    Estimated,
    /// Obtained from a closed-form expression in other constants.
    DerivedFormula,
}

impl ConstantKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantKind::Estimated => "estimated",
            ConstantKind::DerivedFormula => "derived_formula",
        }
    }
}

/// A named inequality constant with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport {
    /// `WJ`, `Poincare`, `WH`, `WI`, `LSI` or `contraction`.
    pub name: String,
    pub value: f64,
    pub kind: ConstantKind,
    pub valid: bool,
    /// Why the constant is (in)valid, or what it was estimated over.
    pub reason: String,
    /// Input parameters such as `C`, `lambda1`, `K`.
    pub inputs: Vec<(String, f64)>,
    /// Minimising family member, for estimated constants.
    pub minimizer: Option<String>,
}

impl ConstantReport {
    pub fn derived(name: &str, value: f64, valid: bool, reason: impl Into<String>, inputs: &[(&str, f64)]) -> Self {
        Self {
            name: name.into(),
            value,
            kind: ConstantKind::DerivedFormula,
            valid,
            reason: reason.into(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            minimizer: None,
        }
    }

    pub fn estimated(name: &str, value: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            kind: ConstantKind::Estimated,
            valid: value.is_finite(),
            reason: reason.into(),
            inputs: Vec::new(),
            minimizer: None,
        }
    }

    pub fn input(&self, key: &str) -> Option<f64> {
        self.inputs.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Free-text column of the CSV export.
    pub fn notes(&self) -> String {
        match &self.minimizer {
            Some(m) => format!("{}; minimizer: {m}", self.reason),
            None => self.reason.clone(),
        }
    }
}

/// Writes `(constant_name, value, kind, valid, notes)` rows.
pub fn write_reports_csv<W: Write>(reports: &[ConstantReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
    w.write_record(["constant_name", "value", "kind", "valid", "notes"]).map_err(io)?;
    for r in reports {
        w.write_record([r.name.clone(), r.value.to_string(), r.kind.as_str().into(), r.valid.to_string(), r.notes()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
    Ok(())
}
