//! Periodic phase modulations reduced to harmonic weights.
//!
//! A two-level system whose gap is modulated as `ω₀ + dφ/dt` with a
//! `τ = 2π/Ω`-periodic, zero-mean modulation interacts with its surroundings
//! through a comb of sidebands at `ω_q = ω₀ + qΩ`. All that survives of the
//! modulation in the steady-state thermodynamics is the weight distribution
//! `P_q = |ξ_q|²` of the phase factor `e^{−iφ(t)} = Σ_q ξ_q e^{−iqΩt}`,
//! normalised to `Σ_q P_q = 1`.
//!
//! [`Modulation`] stores that distribution, either given directly
//! ([`Modulation::from_weights`]) or computed from a phase function by FFT
//! ([`Modulation::from_phase`]).

use num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

/// Weights below this threshold are dropped from the support.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Tolerance on `|Σ P_q − 1|` for explicitly supplied weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Maximum spectral weight allowed to be lost to truncation in
/// [`Modulation::from_phase`].
pub const TRUNCATION_TOL: f64 = 1e-8;

/// Tolerated phase drift `|φ(τ) − φ(0)|` (radians): beyond it the modulation
/// has a non-zero mean frequency shift and the harmonic picture breaks down.
pub const PHASE_DRIFT_TOL: f64 = 1e-8;

/// Errors from modulation construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulationError {
    #[error("modulation frequency must be positive and finite, got {0}")]
    InvalidFrequency(f64),
    #[error("sample count must be a power of two of at least 64, got {0}")]
    SampleCount(usize),
    #[error("harmonic weights must sum to one within 1e-9, got {sum}")]
    WeightSum { sum: f64 },
    #[error("harmonic {q} has invalid weight {weight}")]
    InvalidWeight { q: i32, weight: f64 },
    #[error("harmonic {0} listed twice")]
    DuplicateHarmonic(i32),
    #[error("phase is not periodic: drift of {drift} radians over one period")]
    NonPeriodicPhase { drift: f64 },
    #[error("phase must evaluate to finite values, got {value} at t = {t}")]
    NonFinitePhase { t: f64, value: f64 },
    #[error(
        "truncated spectral weight {deficit} exceeds {TRUNCATION_TOL}; \
         increase the sample count"
    )]
    TruncationDeficit { deficit: f64 },
}

/// Harmonic weight distribution `{(q, P_q)}` of a periodic phase modulation
/// at frequency `Ω`, sorted by harmonic index.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    omega: f64,
    weights: Vec<(i32, f64)>,
}

impl Modulation {
    /// Build from explicit weights. Weights must be finite, non-negative and
    /// sum to one within [`WEIGHT_SUM_TOL`]; entries below [`WEIGHT_FLOOR`]
    /// are then dropped. The weights are stored as given (no renormalisation).
    pub fn from_weights(
        omega: f64,
        weights: &[(i32, f64)],
    ) -> Result<Self, ModulationError> {
        require_frequency(omega)?;
        let mut seen = std::collections::BTreeSet::new();
        for &(q, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(ModulationError::InvalidWeight { q, weight: w });
            }
            if !seen.insert(q) {
                return Err(ModulationError::DuplicateHarmonic(q));
            }
        }
        let sum: f64 = weights.iter().map(|&(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(ModulationError::WeightSum { sum });
        }
        let mut kept: Vec<(i32, f64)> = weights
            .iter()
            .copied()
            .filter(|&(_, w)| w >= WEIGHT_FLOOR)
            .collect();
        kept.sort_by_key(|&(q, _)| q);
        Ok(Modulation {
            omega,
            weights: kept,
        })
    }

    /// The trivial modulation: all weight on the carrier (`P_0 = 1`).
    pub fn unmodulated(omega: f64) -> Result<Self, ModulationError> {
        Modulation::from_weights(omega, &[(0, 1.0)])
    }

    /// Compute weights from a phase function `φ(t)` sampled over one period
    /// at `samples` points (a power of two, at least 64).
    ///
    /// The phase must return to its initial value after a period (zero-mean
    /// frequency modulation); the weights are the squared Fourier
    /// coefficients of `e^{−iφ(t)}`. Only the resolved band `|q| ≤ N/4` is
    /// trusted — weight past it is indistinguishable from aliasing — and
    /// within the band entries below [`WEIGHT_FLOOR`] are dropped. The kept
    /// weights are renormalised; if more than [`TRUNCATION_TOL`] of the
    /// total was discarded, the sampling is deemed insufficient.
    pub fn from_phase(
        omega: f64,
        phase: impl Fn(f64) -> f64,
        samples: usize,
    ) -> Result<Self, ModulationError> {
        require_frequency(omega)?;
        if samples < 64 || !samples.is_power_of_two() {
            return Err(ModulationError::SampleCount(samples));
        }
        let period = std::f64::consts::TAU / omega;
        let drift = (phase(period) - phase(0.0)).abs();
        if !(drift <= PHASE_DRIFT_TOL) {
            return Err(ModulationError::NonPeriodicPhase { drift });
        }
        let mut buffer: Vec<Complex<f64>> = (0..samples)
            .map(|j| {
                let t = period * j as f64 / samples as f64;
                let value = phase(t);
                if value.is_finite() {
                    Ok(Complex::from_polar(1.0, -value))
                } else {
                    Err(ModulationError::NonFinitePhase { t, value })
                }
            })
            .collect::<Result<_, _>>()?;
        // ξ_q = (1/N) Σ_j e^{−iφ(t_j)} e^{+iqΩt_j}: an (unnormalised)
        // inverse FFT with bins k ≤ N/2 mapping to q = k, k > N/2 to k − N.
        FftPlanner::new()
            .plan_fft_inverse(samples)
            .process(&mut buffer);
        let scale = 1.0 / samples as f64;
        let band = (samples / 4) as i64;
        let mut kept = Vec::new();
        let mut kept_sum = 0.0;
        let mut total = 0.0;
        for (k, value) in buffer.iter().enumerate() {
            let weight = (value * scale).norm_sqr();
            total += weight;
            let q = if k <= samples / 2 {
                k as i64
            } else {
                k as i64 - samples as i64
            };
            if q.abs() <= band && weight >= WEIGHT_FLOOR {
                kept.push((q as i32, weight));
                kept_sum += weight;
            }
        }
        // `total` is 1 up to rounding because |e^{−iφ}| = 1 (Parseval).
        let deficit = total - kept_sum;
        if deficit > TRUNCATION_TOL {
            return Err(ModulationError::TruncationDeficit { deficit });
        }
        for entry in &mut kept {
            entry.1 /= kept_sum;
        }
        kept.sort_by_key(|&(q, _)| q);
        Ok(Modulation {
            omega,
            weights: kept,
        })
    }

    /// Modulation frequency `Ω`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Modulation period `τ = 2π/Ω`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// Supported harmonics and their weights, sorted by harmonic index.
    pub fn weights(&self) -> &[(i32, f64)] {
        &self.weights
    }

    /// Weight of harmonic `q` (zero if not in the support).
    pub fn weight(&self, q: i32) -> f64 {
        self.weights
            .iter()
            .find(|&&(idx, _)| idx == q)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Largest `|q|` in the support.
    pub fn max_harmonic(&self) -> i32 {
        self.weights
            .iter()
            .map(|&(q, _)| q.abs())
            .max()
            .unwrap_or(0)
    }

    /// Total stored weight (one up to the construction tolerances).
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().map(|&(_, w)| w).sum()
    }
}

fn require_frequency(omega: f64) -> Result<(), ModulationError> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(ModulationError::InvalidFrequency(omega))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn explicit_weights_are_validated_and_sorted() {
        let m = Modulation::from_weights(2.0, &[(1, 0.25), (-1, 0.25), (0, 0.5)]).unwrap();
        assert_eq!(m.weights().len(), 3);
        assert_eq!(m.weights()[0].0, -1);
        assert_eq!(m.weights()[2].0, 1);
        assert_abs_diff_eq!(m.weight(0), 0.5);
        assert_abs_diff_eq!(m.weight(5), 0.0);
        assert_eq!(m.max_harmonic(), 1);
        assert_abs_diff_eq!(m.period(), std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn explicit_weight_errors() {
        assert!(matches!(
            Modulation::from_weights(0.0, &[(0, 1.0)]),
            Err(ModulationError::InvalidFrequency(_))
        ));
        assert!(matches!(
            Modulation::from_weights(1.0, &[(0, 0.9)]),
            Err(ModulationError::WeightSum { .. })
        ));
        assert!(matches!(
            Modulation::from_weights(1.0, &[(0, 1.2), (1, -0.2)]),
            Err(ModulationError::InvalidWeight { q: 1, .. })
        ));
        assert!(matches!(
            Modulation::from_weights(1.0, &[(0, 0.5), (0, 0.5)]),
            Err(ModulationError::DuplicateHarmonic(0))
        ));
        assert!(matches!(
            Modulation::from_weights(1.0, &[]),
            Err(ModulationError::WeightSum { .. })
        ));
    }

    #[test]
    fn tiny_weights_are_dropped_but_sum_checked_first() {
        let m =
            Modulation::from_weights(1.0, &[(0, 1.0 - 1e-13), (9, 1e-13)]).unwrap();
        assert_eq!(m.weights().len(), 1);
        assert_eq!(m.weights()[0].0, 0);
    }

    #[test]
    fn sinusoidal_phase_reproduces_bessel_weights() {
        // φ(t) = sin(Ωt) has ξ_q = J_q(1); frozen squared values below.
        let m = Modulation::from_phase(1.3, |t| (1.3 * t).sin(), 1024).unwrap();
        let frozen = [
            (0, 0.585_527_499_513_664_12),
            (1, 0.193_644_518_014_459_12),
            (2, 0.013_202_810_849_495_48),
            (3, 3.827_248_190_511_878e-4),
            (4, 6.133_740_558_547_628_2e-6),
            (5, 6.237_892_380_026_772e-8),
            (6, 4.384_139_983_022_986_7e-10),
            (7, 2.256_982_861_737_173_5e-12),
        ];
        for &(q, expected) in &frozen {
            assert_relative_eq!(m.weight(q), expected, max_relative = 1e-9);
            assert_relative_eq!(m.weight(-q), expected, max_relative = 1e-9);
        }
        assert_eq!(m.max_harmonic(), 7);
        assert_abs_diff_eq!(m.total_weight(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hard_phase_flips_exceed_any_resolved_band() {
        // A hard π phase flip at half period carries a 1/q² harmonic comb
        // whose tail never fits the resolved quarter band: the construction
        // must refuse rather than silently renormalise a chopped comb.
        let omega = 2.0;
        let period = std::f64::consts::TAU / omega;
        let flip = |t: f64| {
            let frac = (t / period).rem_euclid(1.0);
            if (0.25..0.75).contains(&frac) {
                std::f64::consts::PI
            } else {
                0.0
            }
        };
        match Modulation::from_phase(omega, flip, 256) {
            Err(ModulationError::TruncationDeficit { deficit }) => {
                assert!(deficit > 1e-3, "comb tail should be macroscopic");
            }
            other => panic!("expected truncation deficit, got {other:?}"),
        }
    }

    #[test]
    fn phase_construction_errors() {
        assert!(matches!(
            Modulation::from_phase(1.0, |t| t.sin(), 100),
            Err(ModulationError::SampleCount(100))
        ));
        assert!(matches!(
            Modulation::from_phase(1.0, |t| t.sin(), 32),
            Err(ModulationError::SampleCount(32))
        ));
        // Linear drift: not periodic.
        assert!(matches!(
            Modulation::from_phase(1.0, |t| 0.5 * t, 256),
            Err(ModulationError::NonPeriodicPhase { .. })
        ));
        assert!(matches!(
            Modulation::from_phase(1.0, |_| f64::NAN, 256),
            Err(ModulationError::NonPeriodicPhase { .. })
        ));
    }

    #[test]
    fn undersampling_a_broad_comb_is_detected() {
        // A very strong sinusoidal modulation spreads weight across many
        // harmonics; 64 samples cannot hold the comb and the lost weight
        // must be flagged rather than silently renormalised away.
        let result = Modulation::from_phase(1.0, |t| 40.0 * t.sin(), 64);
        assert!(matches!(
            result,
            Err(ModulationError::TruncationDeficit { .. })
        ));
        // The same modulation converges once sampled finely enough.
        assert!(Modulation::from_phase(1.0, |t| 40.0 * t.sin(), 1024).is_ok());
    }

    #[test]
    fn unmodulated_carrier() {
        let m = Modulation::unmodulated(3.0).unwrap();
        assert_eq!(m.weights(), &[(0, 1.0)]);
        assert_eq!(m.max_harmonic(), 0);
    }
}
