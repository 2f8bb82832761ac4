//! γ coefficients by nested composite Simpson quadrature in the time domain.
//!
//! With `T` the common period and `uᵢ(t) = wave_i(kᵢ ω t)`,
//!
//! ```text
//! γ_ij  = ω^{pᵢ+pⱼ} / T   ∫₀^T uⱼ(s) ∫₀^s uᵢ(p) dp ds
//! γ_ijm = ω^{pᵢ+pⱼ+pₘ} / (3T) ∫₀^T uₘ(τ) ∫₀^τ ∫₀^s [uⱼ(s)uᵢ(p) − uᵢ(s)uⱼ(p)] dp ds dτ
//! ```
//!
//! Inner integrals are accumulated node by node, so every evaluation is
//! linear in the number of nodes.

use super::input::{period_multiple, OscillatoryInput};
use crate::error::{Error, Result};

/// Minimum nodes per period of the fastest input.
pub const NODES_PER_PERIOD: usize = 2000;
/// Node cap for Richardson doubling.
pub const MAX_NODES: usize = 1 << 20;
/// Successive estimates closer than this stop the doubling.
pub const CONVERGED: f64 = 1e-9;
/// Disagreement at the node cap above which the quadrature is rejected.
pub const REJECT: f64 = 1e-7;

/// Cumulative Simpson integral on `n + 1` uniform nodes, `n` even. Odd nodes
/// use the half-interval rule `h/12 (5y₀ + 8y₁ − y₂)`.
pub fn cumulative_simpson(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut c = vec![0.0; y.len()];
    for k in 1..=n {
        c[k] = if k % 2 == 0 {
            c[k - 2] + h / 3.0 * (y[k - 2] + 4.0 * y[k - 1] + y[k])
        } else {
            c[k - 1] + h / 12.0 * (5.0 * y[k - 1] + 8.0 * y[k] - y[k + 1])
        };
    }
    c
}

/// Composite Simpson integral on `n + 1` uniform nodes, `n` even.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut acc = y[0] + y[n];
    for (i, v) in y.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * v;
    }
    acc * h / 3.0
}

struct Grid {
    period: f64,
    h: f64,
    n: usize,
}

impl Grid {
    fn new(period: f64, n: usize) -> Self {
        Self {
            period,
            h: period / n as f64,
            n,
        }
    }

    fn sample(&self, u: &OscillatoryInput, omega: f64) -> Vec<f64> {
        (0..=self.n).map(|i| u.wave_at(i as f64 * self.h, omega)).collect()
    }
}

fn base_nodes(inputs: &[&OscillatoryInput]) -> Result<(f64, usize)> {
    let ratios: Vec<_> = inputs.iter().map(|u| u.k).collect();
    let mult = period_multiple(&ratios)?;
    let k_max = ratios.iter().map(|k| k.value()).fold(0.0, f64::max);
    let periods = (mult * k_max).ceil() as usize;
    let n = (NODES_PER_PERIOD * periods.max(1)).max(NODES_PER_PERIOD);
    Ok((mult, n + n % 2))
}

/// Doubles the node count from `n0` until successive Simpson values agree,
/// returning the Richardson-extrapolated estimate.
pub fn richardson(label: &str, n0: usize, mut f: impl FnMut(usize) -> f64) -> Result<f64> {
    let mut n = n0 + n0 % 2;
    let mut prev = f(n);
    loop {
        n *= 2;
        let cur = f(n);
        let disagreement = (cur - prev).abs();
        let scale = cur.abs().max(1.0);
        let extrapolated = cur + (cur - prev) / 15.0;
        if disagreement <= CONVERGED * scale {
            return Ok(extrapolated);
        }
        if n >= MAX_NODES {
            if disagreement > REJECT * scale {
                return Err(Error::QuadratureNonConvergence {
                    label: label.to_string(),
                    disagreement,
                });
            }
            return Ok(extrapolated);
        }
        prev = cur;
    }
}

/// `(1/T) ∫₀^T wⱼ(s) ∫₀^s wᵢ(p) dp ds` on `n` intervals, unscaled by ω powers.
fn pair_raw(ui: &OscillatoryInput, uj: &OscillatoryInput, omega: f64, g: &Grid) -> f64 {
    let wi = g.sample(ui, omega);
    let wj = g.sample(uj, omega);
    let ai = cumulative_simpson(&wi, g.h);
    let integrand: Vec<f64> = wj.iter().zip(&ai).map(|(a, b)| a * b).collect();
    simpson(&integrand, g.h) / g.period
}

fn triple_raw(ui: &OscillatoryInput, uj: &OscillatoryInput, um: &OscillatoryInput, omega: f64, g: &Grid) -> f64 {
    let wi = g.sample(ui, omega);
    let wj = g.sample(uj, omega);
    let wm = g.sample(um, omega);
    let ai = cumulative_simpson(&wi, g.h);
    let aj = cumulative_simpson(&wj, g.h);
    let inner: Vec<f64> = (0..=g.n).map(|k| wj[k] * ai[k] - wi[k] * aj[k]).collect();
    let b = cumulative_simpson(&inner, g.h);
    let outer: Vec<f64> = wm.iter().zip(&b).map(|(a, b)| a * b).collect();
    simpson(&outer, g.h) / (3.0 * g.period)
}

/// `γ_ij(ω)` for two inputs.
pub fn gamma_pair_inputs(ui: &OscillatoryInput, uj: &OscillatoryInput, omega: f64, label: &str) -> Result<f64> {
    let (mult, n0) = base_nodes(&[ui, uj])?;
    let period = mult * std::f64::consts::TAU / omega;
    let raw = richardson(label, n0, |n| pair_raw(ui, uj, omega, &Grid::new(period, n)))?;
    Ok(omega.powf(ui.p + uj.p) * raw)
}

/// `γ_ijm(ω)` for three inputs.
pub fn gamma_triple_inputs(
    ui: &OscillatoryInput,
    uj: &OscillatoryInput,
    um: &OscillatoryInput,
    omega: f64,
    label: &str,
) -> Result<f64> {
    let (mult, n0) = base_nodes(&[ui, uj, um])?;
    let period = mult * std::f64::consts::TAU / omega;
    let raw = richardson(label, n0, |n| triple_raw(ui, uj, um, omega, &Grid::new(period, n)))?;
    Ok(omega.powf(ui.p + uj.p + um.p) * raw)
}
