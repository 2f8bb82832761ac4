use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_ENVELOPE_POINTS: usize = 5;
pub const RELIABLE_R_SQUARED: f64 = 0.9;

/// Exponential decay rate of a positive signal over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// `−d ln|z| / dt`.
    pub rate: f64,
    pub window: [f64; 2],
    pub r_squared: f64,
    pub points: usize,
    /// Whether the fit used per-oscillation maxima instead of raw samples.
    pub envelope: bool,
}

impl RateEstimate {
    pub fn reliable(&self) -> bool {
        self.r_squared >= RELIABLE_R_SQUARED
    }
}

/// Least-squares slope of `ln signal` over `window`. An oscillating signal is
/// reduced to its local maxima first; a monotone one is fitted sample by
/// sample.
pub fn estimate_rate(times: &[f64], signal: &[f64], window: [f64; 2]) -> Result<RateEstimate> {
    if times.len() != signal.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: signal.len(),
        });
    }
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(Error::Rejected("empty trajectory".into()));
    };
    if !(window[0] < window[1] && window[0] >= first - 1e-9 && window[1] <= last + 1e-9) {
        return Err(Error::Rejected(format!(
            "window [{}, {}] is not inside the trajectory span [{first}, {last}]",
            window[0], window[1]
        )));
    }
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= window[0] - 1e-9 && times[i] <= window[1] + 1e-9)
        .collect();
    if let Some(&i) = idx.iter().find(|&&i| !(signal[i] > 0.0)) {
        return Err(Error::Rejected(format!(
            "signal must be positive in the window; got {} at t = {}",
            signal[i], times[i]
        )));
    }
    let maxima: Vec<usize> = idx
        .windows(3)
        .filter(|w| signal[w[1]] >= signal[w[0]] && signal[w[1]] > signal[w[2]])
        .map(|w| w[1])
        .collect();
    let (points, envelope) = if maxima.len() >= MIN_ENVELOPE_POINTS {
        (maxima, true)
    } else {
        (idx, false)
    };
    if points.len() < MIN_ENVELOPE_POINTS {
        return Err(Error::Rejected(format!(
            "only {} envelope points in the window, need {MIN_ENVELOPE_POINTS}",
            points.len()
        )));
    }

    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&i| times[i]).collect();
    let ys: Vec<f64> = points.iter().map(|&i| signal[i].ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r_squared = if syy <= 1e-24 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(RateEstimate {
        rate: -slope,
        window,
        r_squared,
        points: points.len(),
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(t1: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t1 * i as f64 / n as f64).collect()
    }

    #[test]
    fn exact_exponential() {
        let t = grid(10.0, 1000);
        let s: Vec<f64> = t.iter().map(|t| (-0.5 * t).exp()).collect();
        let r = estimate_rate(&t, &s, [0.0, 10.0]).unwrap();
        assert!((r.rate - 0.5).abs() < 1e-6);
        assert!(!r.envelope);
        assert!(r.reliable());
    }

    #[test]
    fn oscillating_signal_uses_envelope() {
        let t = grid(40.0, 40_000);
        let s: Vec<f64> = t.iter().map(|t| (-0.2 * t).exp() * (1.5 + (3.0 * t).sin())).collect();
        let r = estimate_rate(&t, &s, [0.0, 40.0]).unwrap();
        assert!(r.envelope);
        assert_relative_eq!(r.rate, 0.2, max_relative = 1e-3);
    }

    #[test]
    fn constant_signal() {
        let t = grid(5.0, 100);
        let r = estimate_rate(&t, &vec![2.0; t.len()], [0.0, 5.0]).unwrap();
        assert!(r.rate.abs() < 1e-15);
        assert_eq!(r.r_squared, 1.0);
    }

    #[test]
    fn noisy_constant_is_unreliable() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let t = grid(5.0, 500);
        let s: Vec<f64> = t.iter().map(|_| 2.0 + rng.gen_range(-0.5..0.5)).collect();
        let r = estimate_rate(&t, &s, [0.0, 5.0]).unwrap();
        assert!(r.rate.abs() < 0.1);
        assert!(!r.reliable());
    }

    #[test]
    fn rejections() {
        let t = grid(1.0, 3);
        assert!(estimate_rate(&t, &[1.0, 0.9, 0.8, 0.7], [0.0, 1.0]).is_err());
        let t = grid(1.0, 10);
        let s = vec![1.0; 11];
        assert!(estimate_rate(&t, &s, [0.5, 2.0]).is_err());
        let mut z = s.clone();
        z[4] = 0.0;
        assert!(estimate_rate(&t, &z, [0.0, 1.0]).is_err());
    }
}
