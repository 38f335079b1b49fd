//! Closed-form periodically modulated two-level machine.
//!
//! A two-level system whose gap is modulated at frequency `Ω` exchanges
//! quanta with its baths through sidebands `ω_q = ω₀ + qΩ`, each weighted by
//! the modulation's harmonic weight `P_q`. Because the jump operators of all
//! sidebands are the same lowering operator, the stationary state is fully
//! characterised by one number — the excited/ground population ratio — and
//! every current has an exact rational closed form in the sideband rates.
//! This module implements those closed forms; the full Floquet machinery in
//! [`crate::floquet`] must reproduce them, which the integration tests
//! exploit as a cross-check.

use thiserror::Error;

use crate::bath::{BathError, BathModel};
use crate::floquet::RATE_FLOOR;
use crate::modulation::{Modulation, ModulationError};
use crate::thermo::{self, CurrentEntry};

/// Relative slack granted to the efficiency bound before an engine is
/// declared in violation.
const BOUND_SLACK: f64 = 1e-9;

/// Errors from two-level machine construction and evaluation.
#[derive(Debug, Error)]
pub enum EngineError {
    /// The carrier frequency must be positive and finite.
    #[error("carrier frequency must be positive and finite, got {0}")]
    InvalidFrequency(f64),
    /// A populated sideband fell at a non-positive frequency.
    #[error("sideband {q} sits at non-positive frequency {frequency}")]
    NonPositiveSideband {
        /// Harmonic index of the offending sideband.
        q: i32,
        /// Its frequency `ω₀ + qΩ`.
        frequency: f64,
    },
    /// At least one bath is required.
    #[error("a machine needs at least one bath")]
    NoBaths,
    /// Bath labels must be unique.
    #[error("duplicate bath label {0:?}")]
    DuplicateBathLabel(String),
    /// No bath couples to any populated sideband: the machine has no
    /// dynamics.
    #[error("no bath couples to any populated sideband")]
    NoCoupling,
    /// Invalid modulation.
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    /// Invalid bath model or spectral evaluation.
    #[error(transparent)]
    Bath(#[from] BathError),
}

/// Net current through one (bath, sideband) channel.
#[derive(Debug, Clone)]
pub struct ChannelCurrent {
    /// Label of the bath carrying the current.
    pub bath: String,
    /// Harmonic index `q` of the sideband.
    pub harmonic: i32,
    /// Sideband frequency `ω₀ + qΩ`.
    pub frequency: f64,
    /// Net quantum current into the system (positive = heating).
    pub current: f64,
    /// The bath's local inverse temperature at this frequency, when the
    /// bath couples there at all.
    pub inv_temperature: Option<f64>,
}

/// Witness for one sideband pair in the work-extraction condition.
#[derive(Debug, Clone, Copy)]
pub struct PairWitness {
    /// Lower harmonic index.
    pub q_lo: i32,
    /// Higher harmonic index.
    pub q_hi: i32,
    /// Combined detailed-balance exponent at the lower sideband.
    pub exponent_lo: f64,
    /// Combined detailed-balance exponent at the higher sideband.
    pub exponent_hi: f64,
    /// True when the pair pumps work out (`exponent_lo > exponent_hi`).
    pub inverted: bool,
}

/// Result of the work-extraction test over all active sideband pairs.
#[derive(Debug, Clone)]
pub struct WorkCondition {
    /// One witness per active pair, ordered by `(q_lo, q_hi)`.
    pub pairs: Vec<PairWitness>,
    /// True when every active pair is inverted, which forces positive
    /// power output regardless of the harmonic weights.
    pub satisfied: bool,
}

/// Aggregate steady-state report of the machine.
#[derive(Debug, Clone)]
pub struct EngineReport {
    /// Net power output `Σ J` (positive when the machine extracts work).
    pub power: f64,
    /// Per-channel currents in deterministic (bath, harmonic) order.
    pub currents: Vec<ChannelCurrent>,
    /// Total heating current.
    pub intake: f64,
    /// Total cooling current (non-positive).
    pub outflow: f64,
    /// Flux-weighted inverse temperature of the intake side.
    pub inv_t_plus: f64,
    /// Flux-weighted inverse temperature of the outflow side.
    pub inv_t_minus: f64,
    /// `power / intake` when work is extracted from positive intake.
    pub efficiency: Option<f64>,
    /// Two-reservoir efficiency bound, when defined.
    pub carnot_bound: Option<f64>,
    /// Whether the efficiency respects the bound (with roundoff slack).
    pub within_bound: Option<bool>,
    /// True when a side mixes local inverse temperatures of opposite sign.
    pub mixed_sign: bool,
}

/// A modulated two-level system coupled to a set of labelled baths.
#[derive(Debug, Clone)]
pub struct TlsMachine {
    omega0: f64,
    modulation: Modulation,
    baths: Vec<(String, BathModel)>,
}

/// Combined emission/absorption rates of one sideband, summed over baths.
#[derive(Debug, Clone, Copy)]
struct SidebandRates {
    q: i32,
    weight: f64,
    emission: f64,
    absorption: f64,
}

impl TlsMachine {
    /// Build a machine, validating the carrier, the modulation's sideband
    /// placement and every bath model.
    pub fn new(
        omega0: f64,
        modulation: Modulation,
        baths: Vec<(String, BathModel)>,
    ) -> Result<Self, EngineError> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(EngineError::InvalidFrequency(omega0));
        }
        if baths.is_empty() {
            return Err(EngineError::NoBaths);
        }
        for (i, (label, bath)) in baths.iter().enumerate() {
            if baths[..i].iter().any(|(other, _)| other == label) {
                return Err(EngineError::DuplicateBathLabel(label.clone()));
            }
            bath.validate()?;
        }
        for &(q, _) in modulation.weights() {
            let frequency = omega0 + q as f64 * modulation.omega();
            if frequency <= 0.0 {
                return Err(EngineError::NonPositiveSideband { q, frequency });
            }
        }
        Ok(Self {
            omega0,
            modulation,
            baths,
        })
    }

    /// Carrier frequency `ω₀`.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// The harmonic weight distribution driving the sidebands.
    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    /// Labelled baths in input order.
    pub fn baths(&self) -> &[(String, BathModel)] {
        &self.baths
    }

    /// Frequency of sideband `q`.
    pub fn sideband(&self, q: i32) -> f64 {
        self.omega0 + q as f64 * self.modulation.omega()
    }

    fn clamp(rate: f64) -> f64 {
        if rate < RATE_FLOOR {
            0.0
        } else {
            rate
        }
    }

    /// Per-sideband rates combined over all baths, in ascending harmonic
    /// order.
    fn sideband_rates(&self) -> Result<Vec<SidebandRates>, EngineError> {
        let mut rates = Vec::with_capacity(self.modulation.weights().len());
        for &(q, weight) in self.modulation.weights() {
            let frequency = self.sideband(q);
            let mut emission = 0.0;
            let mut absorption = 0.0;
            for (_, bath) in &self.baths {
                let up = Self::clamp(bath.absorption(frequency)?);
                emission += Self::clamp(bath.spontaneous(frequency)? + up);
                absorption += up;
            }
            rates.push(SidebandRates {
                q,
                weight,
                emission,
                absorption,
            });
        }
        Ok(rates)
    }

    /// Stationary excited/ground population ratio
    /// `w = Σ_q P_q A_q / Σ_q P_q E_q`.
    pub fn steady_ratio(&self) -> Result<f64, EngineError> {
        let rates = self.sideband_rates()?;
        let down: f64 = rates.iter().map(|r| r.weight * r.emission).sum();
        let up: f64 = rates.iter().map(|r| r.weight * r.absorption).sum();
        if down == 0.0 {
            return Err(EngineError::NoCoupling);
        }
        Ok(up / down)
    }

    /// Total rate scale `Σ_q P_q (E_q + A_q)`, the natural absolute scale
    /// for current tolerances.
    pub fn rate_scale(&self) -> Result<f64, EngineError> {
        Ok(self
            .sideband_rates()?
            .iter()
            .map(|r| r.weight * (r.emission + r.absorption))
            .sum())
    }

    /// Steady-state current through every (bath, sideband) channel, in
    /// deterministic order: baths as given, harmonics ascending.
    pub fn channel_currents(&self) -> Result<Vec<ChannelCurrent>, EngineError> {
        let ratio = self.steady_ratio()?;
        let excited = ratio / (1.0 + ratio);
        let ground = 1.0 / (1.0 + ratio);
        let mut currents = Vec::new();
        for (label, bath) in &self.baths {
            for &(q, weight) in self.modulation.weights() {
                let frequency = self.sideband(q);
                let up = Self::clamp(bath.absorption(frequency)?);
                let down = Self::clamp(bath.spontaneous(frequency)? + up);
                let current = frequency * weight * (up * ground - down * excited);
                let inv_temperature = if down == 0.0 && up == 0.0 {
                    None
                } else {
                    Some(bath.boltzmann_exponent(frequency)? / frequency)
                };
                currents.push(ChannelCurrent {
                    bath: label.clone(),
                    harmonic: q,
                    frequency,
                    current,
                    inv_temperature,
                });
            }
        }
        Ok(currents)
    }

    /// Net power output `Σ J` over all channels.
    pub fn power(&self) -> Result<f64, EngineError> {
        Ok(self.channel_currents()?.iter().map(|c| c.current).sum())
    }

    /// Power output through the exact pair decomposition
    /// `Σ_{q₁>q₂} (q₁−q₂) Ω P₁ P₂ (A₁E₂ − A₂E₁) / z` with
    /// `z = Σ_q P_q (E_q + A_q)`.
    ///
    /// Algebraically identical to [`Self::power`]; having both lets tests
    /// pin the route-counting identity without reference values.
    pub fn pairwise_power(&self) -> Result<f64, EngineError> {
        let rates = self.sideband_rates()?;
        let z: f64 = rates
            .iter()
            .map(|r| r.weight * (r.emission + r.absorption))
            .sum();
        if z == 0.0 {
            return Err(EngineError::NoCoupling);
        }
        let omega = self.modulation.omega();
        let mut total = 0.0;
        for (i, hi) in rates.iter().enumerate() {
            for lo in &rates[..i] {
                // weights() is ascending, so hi.q > lo.q here.
                total += (hi.q - lo.q) as f64
                    * omega
                    * hi.weight
                    * lo.weight
                    * (hi.absorption * lo.emission - lo.absorption * hi.emission)
                    / z;
            }
        }
        Ok(total)
    }

    /// Test the pairwise work-extraction condition: every active sideband
    /// pair must have its detailed-balance exponents inverted (the lower
    /// frequency seeing the larger exponent).
    pub fn work_condition(&self) -> Result<WorkCondition, EngineError> {
        let rates = self.sideband_rates()?;
        let active: Vec<(&SidebandRates, f64)> = rates
            .iter()
            .filter(|r| r.emission > 0.0 || r.absorption > 0.0)
            .map(|r| {
                let exponent = if r.absorption == 0.0 {
                    f64::INFINITY
                } else {
                    (r.emission / r.absorption).ln()
                };
                (r, exponent)
            })
            .collect();
        let mut pairs = Vec::new();
        for (i, (hi, x_hi)) in active.iter().enumerate() {
            for (lo, x_lo) in &active[..i] {
                pairs.push(PairWitness {
                    q_lo: lo.q,
                    q_hi: hi.q,
                    exponent_lo: *x_lo,
                    exponent_hi: *x_hi,
                    inverted: x_lo > x_hi,
                });
            }
        }
        let satisfied = !pairs.is_empty() && pairs.iter().all(|p| p.inverted);
        Ok(WorkCondition { pairs, satisfied })
    }

    /// Full steady-state report: power, per-channel currents, effective
    /// temperatures and the efficiency against its bound.
    pub fn report(&self) -> Result<EngineReport, EngineError> {
        let currents = self.channel_currents()?;
        let entries: Vec<CurrentEntry> = currents
            .iter()
            .filter_map(|c| {
                c.inv_temperature.map(|x| CurrentEntry {
                    current: c.current,
                    inv_temperature: x,
                })
            })
            .collect();
        let effective = thermo::effective_temperatures(&entries);
        let power: f64 = currents.iter().map(|c| c.current).sum();
        let efficiency = if power > 0.0 && effective.intake > 0.0 {
            Some(power / effective.intake)
        } else {
            None
        };
        let carnot_bound = effective.carnot_bound();
        let within_bound = match (efficiency, carnot_bound) {
            (Some(eta), Some(bound)) if !effective.mixed_sign => {
                Some(eta <= bound + BOUND_SLACK * (1.0 + bound.abs()))
            }
            _ => None,
        };
        Ok(EngineReport {
            power,
            currents,
            intake: effective.intake,
            outflow: effective.outflow,
            inv_t_plus: effective.inv_t_plus,
            inv_t_minus: effective.inv_t_minus,
            efficiency,
            carnot_bound,
            within_bound,
            mixed_sign: effective.mixed_sign,
        })
    }
}
