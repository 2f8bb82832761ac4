use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bracket::{lie_bracket, nested_bracket, FdStep};
use super::limit::{classify_limit, Classification, LimitClass};
use super::quadrature::{gamma_pair_inputs, gamma_triple_inputs};
use super::system::ControlAffineSystem;
use crate::error::{Error, Result};

/// Coefficients of magnitude below this at unit frequency count as vanishing
/// integrals in the assumption checks.
pub const INTEGRAL_FLOOR: f64 = 1e-8;
/// Brackets with every component below this (scaled by the state size) count
/// as vanishing.
pub const BRACKET_FLOOR: f64 = 1e-6;

fn check_channel(system: &ControlAffineSystem, i: usize) -> Result<()> {
    if i >= system.channels.len() {
        return Err(Error::invalid(
            "channel",
            format!("index {i} out of range for {} channels", system.channels.len()),
        ));
    }
    Ok(())
}

/// One-based label such as `g12` or `g232`.
pub fn gamma_label(indices: &[usize]) -> String {
    let mut s = String::from("g");
    for i in indices {
        s.push_str(&(i + 1).to_string());
    }
    s
}

/// `γ_ij(ω)`; channel indices are zero-based with `i < j`.
pub fn gamma_pair(i: usize, j: usize, system: &ControlAffineSystem, omega: f64) -> Result<f64> {
    check_channel(system, j)?;
    if i >= j {
        return Err(Error::invalid("i", format!("pair requires i < j, got ({i}, {j})")));
    }
    let c = &system.channels;
    gamma_pair_inputs(&c[i].input, &c[j].input, omega, &gamma_label(&[i, j]))
}

/// `γ_ijm(ω)`; zero-based, `i < j`, `m` unrestricted.
pub fn gamma_triple(i: usize, j: usize, m: usize, system: &ControlAffineSystem, omega: f64) -> Result<f64> {
    check_channel(system, j)?;
    check_channel(system, m)?;
    if i >= j {
        return Err(Error::invalid("i", format!("triple requires i < j, got ({i}, {j})")));
    }
    let c = &system.channels;
    gamma_triple_inputs(&c[i].input, &c[j].input, &c[m].input, omega, &gamma_label(&[i, j, m]))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaEntry {
    pub label: String,
    /// Zero-based channel indices.
    pub indices: Vec<usize>,
    /// Samples on the table's ω grid.
    pub values: Vec<f64>,
    pub classification: Classification,
}

impl GammaEntry {
    pub fn class(&self) -> LimitClass {
        self.classification.class
    }
}

/// Every `γ_ij` and `γ_ijm` of a system on a geometric ω grid.
#[derive(Debug, Clone, Serialize)]
pub struct GammaTable {
    pub omegas: Vec<f64>,
    pub pairs: Vec<GammaEntry>,
    pub triples: Vec<GammaEntry>,
}

impl GammaTable {
    pub fn get(&self, indices: &[usize]) -> Option<&GammaEntry> {
        self.pairs.iter().chain(&self.triples).find(|e| e.indices == indices)
    }

    pub fn entries(&self) -> impl Iterator<Item = &GammaEntry> {
        self.pairs.iter().chain(&self.triples)
    }
}

fn index_sets(l: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            pairs.push(vec![i, j]);
            for m in 0..l {
                triples.push(vec![i, j, m]);
            }
        }
    }
    (pairs, triples)
}

/// Quadratures for every index set and frequency run in parallel.
pub fn gamma_table(system: &ControlAffineSystem, omega_grid: &[f64]) -> Result<GammaTable> {
    let (pairs, triples) = index_sets(system.channels.len());
    let eval = |idx: &Vec<usize>, w: f64| -> Result<f64> {
        match idx.as_slice() {
            [i, j] => gamma_pair(*i, *j, system, w),
            [i, j, m] => gamma_triple(*i, *j, *m, system, w),
            _ => unreachable!(),
        }
    };
    let build = |sets: Vec<Vec<usize>>| -> Result<Vec<GammaEntry>> {
        let jobs: Vec<(usize, f64)> = (0..sets.len())
            .flat_map(|s| omega_grid.iter().map(move |&w| (s, w)))
            .collect();
        let flat: Vec<f64> = jobs
            .par_iter()
            .map(|&(s, w)| eval(&sets[s], w))
            .collect::<Result<_>>()?;
        sets.into_iter()
            .zip(flat.chunks(omega_grid.len().max(1)))
            .map(|(indices, values)| {
                let classification = classify_limit(omega_grid, values).map_err(|e| match e {
                    Error::Unclassifiable { reason } => Error::Unclassifiable {
                        reason: format!("{}: {reason}", gamma_label(&indices)),
                    },
                    other => other,
                })?;
                Ok(GammaEntry {
                    label: gamma_label(&indices),
                    indices,
                    values: values.to_vec(),
                    classification,
                })
            })
            .collect()
    };
    Ok(GammaTable {
        omegas: omega_grid.to_vec(),
        pairs: build(pairs)?,
        triples: build(triples)?,
    })
}

fn vanishes(v: &[f64], x: &[f64]) -> bool {
    let scale = x.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    v.iter().all(|c| c.abs() <= BRACKET_FLOOR * scale * scale)
}

/// Averaged vector field assembled from a precomputed [`GammaTable`].
#[derive(Debug, Clone)]
pub struct AveragingEngine {
    pub system: ControlAffineSystem,
    pub table: GammaTable,
}

impl AveragingEngine {
    pub fn new(system: ControlAffineSystem, omega_grid: &[f64]) -> Result<Self> {
        let table = gamma_table(&system, omega_grid)?;
        Ok(Self { system, table })
    }

    /// Bracket of the term with the given indices at `x`.
    pub fn bracket(&self, indices: &[usize], x: &[f64]) -> Result<Vec<f64>> {
        let f = |k: usize| self.system.channels[k].field.clone();
        match indices {
            [i, j] => lie_bracket(&*f(*i), &*f(*j), x, FdStep::Optimal),
            [i, j, m] => nested_bracket(&*f(*i), &*f(*j), &*f(*m), x),
            _ => Err(Error::invalid("indices", "expected two or three channel indices")),
        }
    }

    /// `f₀(x) + Σ γ_ij [fᵢ,fⱼ](x) + Σ γ_ijm [[fᵢ,fⱼ],fₘ](x)` over the limits.
    /// Zero-class terms are skipped without evaluating their brackets.
    pub fn averaged_field(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.system.dim {
            return Err(Error::DimensionMismatch {
                expected: self.system.dim,
                got: x.len(),
            });
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteField { point: x.to_vec() });
        }
        let mut out = (self.system.drift)(x);
        for entry in self.table.entries() {
            match entry.class() {
                LimitClass::Zero => {}
                LimitClass::Finite(g) => {
                    let b = self.bracket(&entry.indices, x)?;
                    for (o, v) in out.iter_mut().zip(b) {
                        *o += g * v;
                    }
                }
                LimitClass::Divergent(q) => {
                    let b = self.bracket(&entry.indices, x)?;
                    if !vanishes(&b, x) {
                        return Err(Error::DivergentTerm {
                            label: entry.label.clone(),
                            exponent: q,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Builds the γ table on `omega_grid` and evaluates the averaged field at `x`.
pub fn averaged_vector_field(system: &ControlAffineSystem, x: &[f64], omega_grid: &[f64]) -> Result<Vec<f64>> {
    AveragingEngine::new(system.clone(), omega_grid)?.averaged_field(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseStatus {
    Pass,
    Fail,
    /// No index combination triggers the clause.
    Vacuous,
    /// Not checked numerically and no declaration was supplied.
    Unverified,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub indices: Vec<usize>,
    pub status: ClauseStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub clauses: Vec<ClauseResult>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.status != ClauseStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| c.status == ClauseStatus::Fail)
    }
}

const ASSUMPTION_STATES: usize = 20;
const ASSUMPTION_SEED: u64 = 0x5eed;

/// Re-verifies the bounded and zero-mean input conditions and every
/// high-order exponent clause. A pair with `pᵢ+pⱼ > 1` passes when its
/// bracket vanishes on a random state grid or its unit-frequency integral
/// vanishes; triples with `pᵢ+pⱼ+pₘ > 2` likewise. Quadruples with exponent
/// sum `≥ 3` rely on the system's declared flag. Integrals are evaluated on
/// `omega_grid` and normalized to unit frequency.
pub fn check_assumptions(system: &ControlAffineSystem, omega_grid: &[f64]) -> AssumptionReport {
    let mut clauses = Vec::new();
    let l = system.channels.len();
    for (k, ch) in system.channels.iter().enumerate() {
        let peak = ch.input.max_abs_on_grid(1000);
        clauses.push(ClauseResult {
            clause: "bounded_input".into(),
            indices: vec![k],
            status: if peak <= 1.0 + 1e-12 {
                ClauseStatus::Pass
            } else {
                ClauseStatus::Fail
            },
            detail: format!("max |u| on 1000-point grid = {peak:.6e}"),
        });
        let mean = ch.input.period_integral(20_000);
        clauses.push(ClauseResult {
            clause: "zero_mean".into(),
            indices: vec![k],
            status: if mean.abs() < 1e-10 {
                ClauseStatus::Pass
            } else {
                ClauseStatus::Fail
            },
            detail: format!("integral over one period = {mean:.6e}"),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ASSUMPTION_SEED);
    let states: Vec<Vec<f64>> = (0..ASSUMPTION_STATES)
        .map(|_| (0..system.dim).map(|_| rng.gen_range(0.1..3.0)).collect())
        .collect();
    let p = |k: usize| system.channels[k].input.p;
    let engine_bracket = |idx: &[usize], x: &[f64]| -> Result<Vec<f64>> {
        let f = |k: usize| system.channels[k].field.clone();
        match idx {
            [i, j] => lie_bracket(&*f(*i), &*f(*j), x, FdStep::Optimal),
            [i, j, m] => nested_bracket(&*f(*i), &*f(*j), &*f(*m), x),
            _ => unreachable!(),
        }
    };
    let (pairs, triples) = index_sets(l);
    for (name, sets, threshold) in [("high_order_pair", pairs, 1.0), ("high_order_triple", triples, 2.0)] {
        let mut triggered = false;
        for idx in sets {
            let sum: f64 = idx.iter().map(|&k| p(k)).sum();
            if sum <= threshold + 1e-12 {
                continue;
            }
            triggered = true;
            let bracket_zero = states
                .iter()
                .all(|x| engine_bracket(&idx, x).map(|b| vanishes(&b, x)).unwrap_or(false));
            // γ(ω) = ω^{Σp - order + 1} × (unit-frequency integral)
            let order = idx.len() as f64;
            let integral = omega_grid
                .iter()
                .map(|&w| {
                    let g = match idx.as_slice() {
                        [i, j] => gamma_pair(*i, *j, system, w),
                        [i, j, m] => gamma_triple(*i, *j, *m, system, w),
                        _ => unreachable!(),
                    }?;
                    Ok(g / w.powf(sum - order + 1.0))
                })
                .try_fold(0.0f64, |acc, v: Result<f64>| Ok::<f64, Error>(acc.max(v?.abs())));
            let (status, detail) = match (&integral, bracket_zero) {
                (_, true) => (ClauseStatus::Pass, format!("exponent sum {sum:.3}; bracket vanishes")),
                (Ok(v), false) if v.abs() < INTEGRAL_FLOOR => {
                    (ClauseStatus::Pass, format!("exponent sum {sum:.3}; integral = {v:.3e}"))
                }
                (Ok(v), false) => (
                    ClauseStatus::Fail,
                    format!("exponent sum {sum:.3}; bracket nonzero and integral = {v:.3e}"),
                ),
                (Err(e), false) => (ClauseStatus::Fail, format!("exponent sum {sum:.3}; {e}")),
            };
            clauses.push(ClauseResult {
                clause: name.into(),
                indices: idx,
                status,
                detail,
            });
        }
        if !triggered {
            clauses.push(ClauseResult {
                clause: name.into(),
                indices: Vec::new(),
                status: ClauseStatus::Vacuous,
                detail: format!("no exponent sum exceeds {threshold}"),
            });
        }
    }

    let mut fourth = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            for m in 0..l {
                for q in 0..l {
                    if p(i) + p(j) + p(m) + p(q) >= 3.0 - 1e-12 {
                        fourth.push(vec![i, j, m, q]);
                    }
                }
            }
        }
    }
    if fourth.is_empty() {
        clauses.push(ClauseResult {
            clause: "fourth_order".into(),
            indices: Vec::new(),
            status: ClauseStatus::Vacuous,
            detail: "no exponent sum reaches 3".into(),
        });
    } else {
        let (status, detail) = match system.fourth_order_declared {
            Some(true) => (ClauseStatus::Pass, "declared by the caller"),
            Some(false) => (ClauseStatus::Fail, "declared violated by the caller"),
            None => (ClauseStatus::Unverified, "not checked numerically; no declaration"),
        };
        for idx in fourth {
            clauses.push(ClauseResult {
                clause: "fourth_order".into(),
                indices: idx,
                status,
                detail: detail.into(),
            });
        }
    }
    AssumptionReport { clauses }
}
