use serde::Serialize;

use super::engine::{AssumptionReport, AveragingEngine, GammaTable};
use super::limit::LimitClass;
use crate::error::{Error, Result};

#[derive(Debug, Serialize)]
struct GammaRow {
    label: String,
    indices: Vec<usize>,
    values: Vec<f64>,
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_squared: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BracketRow {
    label: String,
    coefficient: f64,
    bracket: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct AveragingDoc<'a> {
    scheme: &'a str,
    omegas: &'a [f64],
    probe_state: &'a [f64],
    averaged_field: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_difference: Option<f64>,
    assumptions_pass: bool,
    gamma: Vec<GammaRow>,
    term: Vec<BracketRow>,
    assumption: &'a [super::engine::ClauseResult],
}

fn rows(table: &GammaTable) -> Vec<GammaRow> {
    table
        .entries()
        .map(|e| GammaRow {
            label: e.label.clone(),
            indices: e.indices.iter().map(|i| i + 1).collect(),
            values: e.values.clone(),
            class: e.class().name(),
            limit: e.class().limit(),
            exponent: e.classification.exponent,
            r_squared: e.classification.r_squared,
        })
        .collect()
}

/// Key-value γ table: one `[[gamma]]` table per coefficient with one-based
/// indices, samples, class and fit.
pub fn gamma_report(table: &GammaTable) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        omegas: &'a [f64],
        gamma: Vec<GammaRow>,
    }
    toml::to_string(&Doc {
        omegas: &table.omegas,
        gamma: rows(table),
    })
    .map_err(|e| Error::Config(e.to_string()))
}

/// Full averaging report: γ table, every contributing bracket at `probe`,
/// the assembled averaged field, an optional closed-form comparison and the
/// assumption clauses.
pub fn averaging_report(
    scheme: &str,
    engine: &AveragingEngine,
    probe: &[f64],
    closed_form: Option<&[f64]>,
    assumptions: &AssumptionReport,
) -> Result<String> {
    let averaged = engine.averaged_field(probe)?;
    let mut terms = Vec::new();
    for e in engine.table.entries() {
        if let LimitClass::Finite(g) = e.class() {
            terms.push(BracketRow {
                label: e.label.clone(),
                coefficient: g,
                bracket: engine.bracket(&e.indices, probe)?,
            });
        }
    }
    let diff = closed_form.map(|c| c.iter().zip(&averaged).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    let doc = AveragingDoc {
        scheme,
        omegas: &engine.table.omegas,
        probe_state: probe,
        averaged_field: averaged.clone(),
        closed_form,
        max_abs_difference: diff,
        assumptions_pass: assumptions.all_pass(),
        gamma: rows(&engine.table),
        term: terms,
        assumption: &assumptions.clauses,
    };
    toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))
}
