use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest numerator or denominator accepted for a frequency multiplier.
pub const MAX_RATIO_TERM: u64 = 10_000;

/// Positive rational frequency multiplier `k = num / den`, kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrequencyRatio {
    num: u64,
    den: u64,
}

impl FrequencyRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid(
                "k",
                format!("frequency multiplier {num}/{den} must be positive"),
            ));
        }
        if num > MAX_RATIO_TERM || den > MAX_RATIO_TERM {
            return Err(Error::invalid(
                "k",
                format!("numerator and denominator must not exceed {MAX_RATIO_TERM}"),
            ));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(k: u64) -> Result<Self> {
        Self::new(k, 1)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for FrequencyRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A 2π-periodic scalar waveform of the phase.
#[derive(Clone)]
pub enum Waveform {
    Sin,
    Cos,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl Waveform {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Waveform::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, phase: f64) -> f64 {
        match self {
            Waveform::Sin => phase.sin(),
            Waveform::Cos => phase.cos(),
            Waveform::Custom { f, .. } => f(phase),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Waveform::Sin => "sin",
            Waveform::Cos => "cos",
            Waveform::Custom { name, .. } => name,
        }
    }
}

impl fmt::Debug for Waveform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The input `ω^p · wave(k ω t)` of one control channel.
#[derive(Debug, Clone)]
pub struct OscillatoryInput {
    pub wave: Waveform,
    pub k: FrequencyRatio,
    pub p: f64,
}

impl OscillatoryInput {
    pub fn new(wave: Waveform, k: FrequencyRatio, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("exponent must lie in (0, 1), got {p}")));
        }
        Ok(Self { wave, k, p })
    }

    /// Unscaled waveform value at time `t`.
    pub fn wave_at(&self, t: f64, omega: f64) -> f64 {
        self.wave.eval(self.k.value() * omega * t)
    }

    /// Full input `ω^p wave(kωt)`.
    pub fn eval(&self, t: f64, omega: f64) -> f64 {
        omega.powf(self.p) * self.wave_at(t, omega)
    }

    /// Largest |wave| on a uniform phase grid of `n` points.
    pub fn max_abs_on_grid(&self, n: usize) -> f64 {
        let step = std::f64::consts::TAU / n as f64;
        (0..n)
            .map(|i| self.wave.eval(i as f64 * step).abs())
            .fold(0.0, f64::max)
    }

    /// Mean-value integral `∫₀^{2π} wave` by composite Simpson on `n` intervals.
    pub fn period_integral(&self, n: usize) -> f64 {
        let n = n + n % 2;
        let h = std::f64::consts::TAU / n as f64;
        let mut acc = self.wave.eval(0.0) + self.wave.eval(std::f64::consts::TAU);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.wave.eval(i as f64 * h);
        }
        acc * h / 3.0
    }
}

/// `T = (2π/ω) · LCM(k₁⁻¹, …, k_l⁻¹)`, with the rational LCM taken as
/// `LCM(denominators of k) / GCD(numerators of k)`.
pub fn common_period(inputs: &[OscillatoryInput], omega: f64) -> Result<f64> {
    let ratios: Vec<FrequencyRatio> = inputs.iter().map(|u| u.k).collect();
    Ok(period_multiple(&ratios)? * std::f64::consts::TAU / omega)
}

/// `LCM(k₁⁻¹, …)` as a float; exact for reduced ratios.
pub fn period_multiple(ratios: &[FrequencyRatio]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::invalid("inputs", "at least one input is required"));
    }
    let mut lcm_den = 1u64;
    let mut gcd_num = 0u64;
    for k in ratios {
        lcm_den = lcm_den.lcm(&k.den);
        gcd_num = gcd_num.gcd(&k.num);
    }
    Ok(lcm_den as f64 / gcd_num as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn input(k: FrequencyRatio) -> OscillatoryInput {
        OscillatoryInput::new(Waveform::Sin, k, 0.5).unwrap()
    }

    #[test]
    fn ratios_are_reduced_and_validated() {
        let k = FrequencyRatio::new(4, 6).unwrap();
        assert_eq!((k.num(), k.den()), (2, 3));
        assert!(FrequencyRatio::new(0, 1).is_err());
        assert!(FrequencyRatio::new(1, 0).is_err());
        assert!(FrequencyRatio::new(MAX_RATIO_TERM + 1, 1).is_err());
    }

    #[test]
    fn common_period_examples() {
        let one = FrequencyRatio::integer(1).unwrap();
        let two = FrequencyRatio::integer(2).unwrap();
        let w = 15.0;
        assert_relative_eq!(common_period(&[input(one)], w).unwrap(), TAU / w);
        assert_relative_eq!(
            common_period(&[input(one), input(one), input(two)], w).unwrap(),
            TAU / w
        );
        let half = FrequencyRatio::new(1, 2).unwrap();
        let third = FrequencyRatio::new(1, 3).unwrap();
        assert_relative_eq!(common_period(&[input(half), input(third)], w).unwrap(), 6.0 * TAU / w);
    }

    #[test]
    fn common_period_matches_brute_force_search() {
        // smallest T on a grid of multiples of 2π/(ω·600) where every input repeats
        let cases = [
            (vec![(1, 2), (1, 3)], 6.0),
            (vec![(2, 3), (3, 4)], 12.0),
            (vec![(3, 1), (5, 2)], 2.0),
        ];
        for (ks, expected) in cases {
            let ratios: Vec<FrequencyRatio> = ks.iter().map(|&(n, d)| FrequencyRatio::new(n, d).unwrap()).collect();
            let found = (1..=600 * 20)
                .map(|i| i as f64 / 600.0)
                .find(|&m| {
                    ratios.iter().all(|k| {
                        let cycles = k.value() * m;
                        (cycles - cycles.round()).abs() < 1e-9
                    })
                })
                .unwrap();
            assert_relative_eq!(found, expected, epsilon = 1e-12);
            assert_relative_eq!(period_multiple(&ratios).unwrap(), expected);
        }
    }

    #[test]
    fn exponent_range() {
        let k = FrequencyRatio::integer(1).unwrap();
        assert!(OscillatoryInput::new(Waveform::Cos, k, 0.0).is_err());
        assert!(OscillatoryInput::new(Waveform::Cos, k, 1.0).is_err());
        assert!(OscillatoryInput::new(Waveform::Cos, k, 0.78).is_ok());
    }

    #[test]
    fn assumption_one_quantities() {
        let k = FrequencyRatio::integer(1).unwrap();
        let s = OscillatoryInput::new(Waveform::Sin, k, 0.5).unwrap();
        assert!(s.max_abs_on_grid(1000) <= 1.0);
        assert!(s.period_integral(2000).abs() < 1e-10);
        let biased = OscillatoryInput::new(Waveform::custom("1+sin", |x: f64| 1.0 + x.sin()), k, 0.5).unwrap();
        assert_relative_eq!(biased.period_integral(2000), TAU, max_relative = 1e-12);
    }
}
