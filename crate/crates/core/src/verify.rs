//! Randomised self-verification.
//!
//! Each suite draws machines from a seeded generator, checks an exact
//! structural law of the model on every draw, and reports the worst defect
//! seen.  The laws are chosen so that a violation always indicates a bug (or
//! an injected fault), never an unlucky parameter draw:
//!
//! * **route identity** — summed quanta flux `Σ_c J_c / ω_c` vanishes in any
//!   steady state, and the pairwise power decomposition equals the direct
//!   sum;
//! * **passivity** — a machine coupled only to equilibrium baths at one
//!   common temperature can never output work;
//! * **engine laws** — band-separated two-bath engines must satisfy the
//!   work-extraction condition, output positive power, stay within the
//!   effective Carnot bound and produce non-negative entropy;
//! * **entropy production** — along trajectories of the full driven
//!   pipeline, every dissipative channel produces entropy at a non-negative
//!   rate.
//!
//! [`Fault::RateSign`] deliberately corrupts one generator block (swapping
//! its emission and absorption rates) so that operators can confirm the
//! entropy suite actually detects broken detailed balance rather than
//! passing vacuously.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bath::{BathModel, Profile};
use crate::floquet::{
    entropy_balance, stationary_state, BathCoupling, FloquetMachine, GeneratorDecomposition,
    PeriodicHamiltonian,
};
use crate::linalg::{dissipator_superop, re, CMat, C64};
use crate::modulation::Modulation;
use crate::scenario::FloquetRun;
use crate::tls::TlsMachine;

/// Deliberate corruption applied before running a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    /// No corruption: suites must pass.
    #[default]
    None,
    /// Swap emission and absorption in the most asymmetric generator block,
    /// leaving its bookkeeping untouched. Breaks detailed balance, so the
    /// entropy suite must fail.
    RateSign,
}

/// Outcome of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// Suite name as printed by the CLI.
    pub name: &'static str,
    /// Number of machines drawn.
    pub trials: usize,
    /// Human-readable description of each violation.
    pub failures: Vec<String>,
    /// Largest normalised defect observed across all trials (0 when every
    /// quantity satisfied its law exactly to within round-off bookkeeping).
    pub worst: f64,
}

impl SuiteReport {
    /// True when no trial violated the suite's law.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} trials, worst defect {:.3e} — ",
            self.name, self.trials, self.worst
        )?;
        if self.passed() {
            write!(f, "ok")
        } else {
            write!(f, "FAILED ({} violations)", self.failures.len())
        }
    }
}

/// Random density matrix: normalised Ginibre state mixed with the maximally
/// mixed state so that no eigenvalue starts pathologically close to zero.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> CMat {
    let ginibre = CMat::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut rho = &ginibre * ginibre.adjoint();
    let trace: f64 = (0..dim).map(|k| rho[(k, k)].re).sum();
    rho /= re(trace);
    let mixed = 0.3 / dim as f64;
    rho *= re(0.7);
    for k in 0..dim {
        rho[(k, k)] += re(mixed);
    }
    rho
}

fn normalised_weights(rng: &mut impl Rng, harmonics: &[i32]) -> Vec<(i32, f64)> {
    let raw: Vec<f64> = harmonics
        .iter()
        .map(|_| rng.random_range(0.1..1.0))
        .collect();
    let sum: f64 = raw.iter().sum();
    harmonics
        .iter()
        .zip(raw)
        .map(|(&q, w)| (q, w / sum))
        .collect()
}

/// Random modulated two-level machine with assorted bath models.
///
/// One flat thermal bath is always present, so every sideband is active and
/// the steady state is well defined; extra baths may be band-limited,
/// population-specified or displaced-vacuum models.
pub fn random_tls_machine(rng: &mut impl Rng) -> TlsMachine {
    let omega0 = rng.random_range(4.0..8.0);
    let omega = rng.random_range(0.4..0.9);
    let mut harmonics: Vec<i32> = (-2..=2).filter(|_| rng.random_bool(0.6)).collect();
    if harmonics.is_empty() {
        harmonics.push(0);
    }
    let modulation = Modulation::from_weights(omega, &normalised_weights(rng, &harmonics))
        .expect("generated weights are valid");

    let mut baths = vec![(
        "base".to_string(),
        BathModel::thermal(rng.random_range(0.5..6.0), rng.random_range(0.2..1.0)),
    )];
    for i in 0..rng.random_range(0..=2u32) {
        let bath = match rng.random_range(0..3u32) {
            0 => {
                let lo = rng.random_range(1.0..5.0);
                BathModel::thermal_band(
                    rng.random_range(0.5..10.0),
                    rng.random_range(0.1..1.0),
                    lo,
                    lo + rng.random_range(1.0..4.0),
                )
            }
            1 => BathModel::Population {
                occupation: Profile::Constant(rng.random_range(0.0..3.0)),
                coupling: crate::bath::BaseCoupling::Flat {
                    strength: rng.random_range(0.05..0.5),
                },
            },
            _ => BathModel::Displaced {
                amplitude_sq: Profile::Constant(rng.random_range(0.0..2.0)),
                coupling: crate::bath::BaseCoupling::PowerLaw {
                    strength: rng.random_range(0.02..0.2),
                    exponent: 1.0,
                },
            },
        };
        baths.push((format!("extra{i}"), bath));
    }
    TlsMachine::new(omega0, modulation, baths).expect("generated machine is valid")
}

/// Random machine whose baths are all in equilibrium at one shared
/// temperature: a single composite equilibrium environment.
pub fn random_equilibrium_machine(rng: &mut impl Rng) -> TlsMachine {
    let omega0 = rng.random_range(4.0..8.0);
    let omega = rng.random_range(0.4..0.9);
    let mut harmonics: Vec<i32> = (-2..=2).filter(|_| rng.random_bool(0.7)).collect();
    if harmonics.is_empty() {
        harmonics.push(1);
    }
    let modulation = Modulation::from_weights(omega, &normalised_weights(rng, &harmonics))
        .expect("generated weights are valid");
    let temperature = rng.random_range(0.5..8.0);

    let mut baths = vec![(
        "flat".to_string(),
        BathModel::thermal(temperature, rng.random_range(0.2..1.0)),
    )];
    if rng.random_bool(0.5) {
        let lo = rng.random_range(2.0..5.0);
        baths.push((
            "band".to_string(),
            BathModel::thermal_band(temperature, rng.random_range(0.1..1.0), lo, lo + 2.0),
        ));
    }
    if rng.random_bool(0.3) {
        baths.push((
            "ohmic".to_string(),
            BathModel::Thermal {
                temperature,
                coupling: crate::bath::BaseCoupling::PowerLaw {
                    strength: rng.random_range(0.02..0.1),
                    exponent: 1.0,
                },
            },
        ));
    }
    TlsMachine::new(omega0, modulation, baths).expect("generated machine is valid")
}

/// Random two-band engine: cold bath on the lower sideband, hot bath on the
/// upper one, parameter ranges chosen so the work-extraction condition holds
/// for every draw.
pub fn random_tls_engine(rng: &mut impl Rng) -> TlsMachine {
    let omega0 = rng.random_range(8.0..12.0);
    let omega = rng.random_range(0.8..1.5);
    let p = rng.random_range(0.3..0.7);
    let modulation =
        Modulation::from_weights(omega, &[(-1, p), (1, 1.0 - p)]).expect("two-point weights");
    let t_cold = rng.random_range(0.3..1.0);
    let t_hot = rng.random_range(5.0..30.0);
    let lo = omega0 - omega;
    let hi = omega0 + omega;
    let baths = vec![
        (
            "cold".to_string(),
            BathModel::thermal_band(t_cold, rng.random_range(0.2..1.0), lo - 0.2, lo + 0.2),
        ),
        (
            "hot".to_string(),
            BathModel::thermal_band(t_hot, rng.random_range(0.2..1.0), hi - 0.2, hi + 0.2),
        ),
    ];
    TlsMachine::new(omega0, modulation, baths).expect("generated engine is valid")
}

/// Random detuned, circularly driven two-level machine for the full
/// pipeline, with one thermal and possibly one population bath.
pub fn random_driven_pair(rng: &mut impl Rng) -> (FloquetMachine, FloquetRun) {
    let omega0 = rng.random_range(0.6..1.8);
    let omega = rng.random_range(2.5..4.0);
    let g = rng.random_range(0.05..0.2);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);

    let mut h0 = CMat::zeros(2, 2);
    h0[(0, 0)] = re(-0.5 * omega0);
    h0[(1, 1)] = re(0.5 * omega0);
    let mut drive = CMat::zeros(2, 2);
    drive[(1, 0)] = C64::from_polar(g, phase);
    let hamiltonian =
        PeriodicHamiltonian::new(omega, vec![(0, h0), (1, drive)]).expect("valid drive");

    let mut sx = CMat::zeros(2, 2);
    sx[(0, 1)] = re(1.0);
    sx[(1, 0)] = re(1.0);
    let mut couplings = vec![BathCoupling {
        label: "thermal".to_string(),
        operator: sx.clone(),
        bath: BathModel::thermal(rng.random_range(0.5..5.0), rng.random_range(0.05..0.3)),
    }];
    if rng.random_bool(0.5) {
        couplings.push(BathCoupling {
            label: "pumped".to_string(),
            operator: sx,
            bath: BathModel::Population {
                occupation: Profile::Constant(rng.random_range(0.0..2.0)),
                coupling: crate::bath::BaseCoupling::Flat {
                    strength: rng.random_range(0.02..0.15),
                },
            },
        });
    }
    let machine = FloquetMachine::new(hamiltonian, couplings).expect("valid machine");
    (
        machine,
        FloquetRun {
            samples: 256,
            q_max: 2,
        },
    )
}

/// Random resonantly driven three-level amplifier: drive on the upper pair,
/// cold bath on the lower transition, hot bath on the upper one, gain
/// condition satisfied for every draw.
pub fn random_three_level_engine(rng: &mut impl Rng) -> (FloquetMachine, FloquetRun) {
    let omega_c = rng.random_range(0.8..1.2);
    let omega_h = rng.random_range(3.5..4.5);
    let omega = omega_h - omega_c;
    let g = rng.random_range(0.05..0.15);
    let t_c = rng.random_range(0.4..0.8);
    let t_h = rng.random_range(15.0..25.0);

    let mut h0 = CMat::zeros(3, 3);
    h0[(1, 1)] = re(omega_c);
    h0[(2, 2)] = re(omega_h);
    let mut drive = CMat::zeros(3, 3);
    drive[(2, 1)] = re(g);
    let hamiltonian =
        PeriodicHamiltonian::new(omega, vec![(0, h0), (1, drive)]).expect("valid drive");

    let mut s_cold = CMat::zeros(3, 3);
    s_cold[(0, 1)] = re(1.0);
    s_cold[(1, 0)] = re(1.0);
    let mut s_hot = CMat::zeros(3, 3);
    s_hot[(0, 2)] = re(1.0);
    s_hot[(2, 0)] = re(1.0);
    let couplings = vec![
        BathCoupling {
            label: "cold".to_string(),
            operator: s_cold,
            bath: BathModel::thermal_band(
                t_c,
                rng.random_range(0.05..0.2),
                omega_c - 0.4,
                omega_c + 0.4,
            ),
        },
        BathCoupling {
            label: "hot".to_string(),
            operator: s_hot,
            bath: BathModel::thermal_band(
                t_h,
                rng.random_range(0.05..0.2),
                omega_h - 0.4,
                omega_h + 0.4,
            ),
        },
    ];
    let machine = FloquetMachine::new(hamiltonian, couplings).expect("valid machine");
    (
        machine,
        FloquetRun {
            samples: 512,
            q_max: 1,
        },
    )
}

/// Swap emission and absorption in the most asymmetric block, rebuilding its
/// superoperator and the total generator but leaving the recorded exponent
/// untouched. Returns the corrupted block index, or `None` for an empty
/// generator.
pub fn corrupt_rate_signs(generator: &mut GeneratorDecomposition) -> Option<usize> {
    let index = generator
        .blocks
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let asym = |block: &crate::floquet::ChannelBlock| {
                (block.emission - block.absorption).abs() * block.operator.norm_squared()
            };
            asym(a).total_cmp(&asym(b))
        })?
        .0;
    let old = generator.blocks[index].superop.clone();
    let block = &mut generator.blocks[index];
    std::mem::swap(&mut block.emission, &mut block.absorption);
    let mut superop = dissipator_superop(&block.operator) * re(block.emission);
    superop += dissipator_superop(&block.operator.adjoint()) * re(block.absorption);
    block.superop = superop;
    generator.total += &generator.blocks[index].superop - old;
    Some(index)
}

fn seeded(seed: u64, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
}

/// In the steady state the net quanta flux vanishes: `Σ_c J_c / ω_c = 0`,
/// and the pairwise power decomposition reproduces the direct sum.
pub fn route_identity_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut rng = seeded(seed, 1);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let machine = random_tls_machine(&mut rng);
        let outcome = (|| -> Result<(), String> {
            let currents = machine.channel_currents().map_err(|e| e.to_string())?;
            let flux: f64 = currents.iter().map(|c| c.current / c.frequency).sum();
            // Floor the normalisation with the machine's rate scale so that a
            // draw sitting at equilibrium (all currents pure round-off) does
            // not divide noise by noise.
            let floor = 1e-4 * machine.rate_scale().map_err(|e| e.to_string())?;
            let scale: f64 = currents
                .iter()
                .map(|c| (c.current / c.frequency).abs())
                .sum();
            let defect = flux.abs() / (scale + floor + 1e-300);
            worst = worst.max(defect);
            if defect > 1e-10 {
                return Err(format!("net quanta flux {flux:.3e} at scale {scale:.3e}"));
            }
            let direct = machine.power().map_err(|e| e.to_string())?;
            let pairwise = machine.pairwise_power().map_err(|e| e.to_string())?;
            let power_defect = (direct - pairwise).abs() / (1.0 + direct.abs());
            worst = worst.max(power_defect);
            if power_defect > 1e-10 {
                return Err(format!(
                    "pairwise power {pairwise:.6e} disagrees with direct sum {direct:.6e}"
                ));
            }
            Ok(())
        })();
        if let Err(message) = outcome {
            failures.push(format!("trial {trial}: {message}"));
        }
    }
    SuiteReport {
        name: "route-identity",
        trials,
        failures,
        worst,
    }
}

/// A machine whose every bath is thermal at one shared temperature faces a
/// single equilibrium environment and can never output work.
pub fn passivity_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut rng = seeded(seed, 2);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let machine = random_equilibrium_machine(&mut rng);
        let outcome = (|| -> Result<(), String> {
            let currents = machine.channel_currents().map_err(|e| e.to_string())?;
            // As in the route suite, floor the normalisation so equilibrated
            // draws whose currents are pure round-off stay well-conditioned;
            // the factor absorbs the quantum energies multiplying the rates.
            let floor = 1e-3 * machine.rate_scale().map_err(|e| e.to_string())?;
            let scale: f64 = currents.iter().map(|c| c.current.abs()).sum();
            let power = machine.power().map_err(|e| e.to_string())?;
            let excess = power / (scale + floor + 1e-300);
            worst = worst.max(excess);
            if excess > 1e-10 {
                return Err(format!(
                    "extracted power {power:.3e} from equilibrium baths (scale {scale:.3e})"
                ));
            }
            let condition = machine.work_condition().map_err(|e| e.to_string())?;
            if condition.satisfied {
                return Err("work condition reported satisfied at equilibrium".to_string());
            }
            Ok(())
        })();
        if let Err(message) = outcome {
            failures.push(format!("trial {trial}: {message}"));
        }
    }
    SuiteReport {
        name: "passivity",
        trials,
        failures,
        worst,
    }
}

/// Band-separated engines must extract work, respect the effective Carnot
/// bound and produce entropy at a non-negative rate.
pub fn engine_law_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut rng = seeded(seed, 3);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let machine = random_tls_engine(&mut rng);
        let outcome = (|| -> Result<(), String> {
            let condition = machine.work_condition().map_err(|e| e.to_string())?;
            if !condition.satisfied {
                return Err("work condition not satisfied for a guaranteed engine".to_string());
            }
            let report = machine.report().map_err(|e| e.to_string())?;
            if report.power <= 0.0 {
                return Err(format!("no output power: {:.3e}", report.power));
            }
            let efficiency = report
                .efficiency
                .ok_or("efficiency undefined for a working engine")?;
            let bound = report
                .carnot_bound
                .ok_or("effective Carnot bound undefined")?;
            let over = (efficiency - bound) / bound.abs().max(1e-30);
            worst = worst.max(over);
            if over > 1e-9 {
                return Err(format!(
                    "efficiency {efficiency:.12} exceeds bound {bound:.12}"
                ));
            }
            let currents = machine.channel_currents().map_err(|e| e.to_string())?;
            let production: f64 = currents
                .iter()
                .filter_map(|c| c.inv_temperature.map(|x| -c.current * x))
                .sum();
            let scale: f64 = currents
                .iter()
                .filter_map(|c| c.inv_temperature.map(|x| (c.current * x).abs()))
                .sum();
            let deficit = -production / (scale + 1e-30);
            worst = worst.max(deficit);
            if deficit > 1e-9 {
                return Err(format!("negative entropy production {production:.3e}"));
            }
            Ok(())
        })();
        if let Err(message) = outcome {
            failures.push(format!("trial {trial}: {message}"));
        }
    }
    SuiteReport {
        name: "engine-laws",
        trials,
        failures,
        worst,
    }
}

/// Every dissipative channel of the full pipeline produces entropy at a
/// non-negative rate along relaxation trajectories (even-numbered trials use
/// a detuned driven pair, odd-numbered ones the three-level amplifier).
///
/// With [`Fault::RateSign`] one block's rates are swapped first; the suite
/// must then report violations.
pub fn entropy_production_suite(seed: u64, trials: usize, fault: Fault) -> SuiteReport {
    let mut rng = seeded(seed, 4);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let (machine, run) = if trial % 2 == 0 {
            random_driven_pair(&mut rng)
        } else {
            random_three_level_engine(&mut rng)
        };
        let rho0 = random_density(&mut rng, machine.hamiltonian.dim());
        let outcome = (|| -> Result<(), String> {
            let decomposition = machine.decompose(run.samples).map_err(|e| e.to_string())?;
            let mut generator = machine
                .generator(&decomposition, run.q_max)
                .map_err(|e| e.to_string())?;
            if fault == Fault::RateSign {
                corrupt_rate_signs(&mut generator);
            }
            stationary_state(&generator).map_err(|e| e.to_string())?;
            let scale = generator.rate_scale();
            let dt = (0.05 / scale.max(1e-6)).min(0.05);
            let mut trajectory = Vec::with_capacity(81);
            let mut rho = rho0.clone();
            trajectory.push((0.0, rho.clone()));
            for step in 1..=80 {
                rho = crate::floquet::evolve(&generator, &rho, dt).map_err(|e| e.to_string())?;
                trajectory.push((step as f64 * dt, rho.clone()));
            }
            let balance = entropy_balance(&generator, &trajectory).map_err(|e| e.to_string())?;
            let deficit = -balance.min_production / (1.0 + scale);
            worst = worst.max(deficit);
            if deficit > 1e-9 {
                return Err(format!(
                    "negative channel entropy production {:.3e}",
                    balance.min_production
                ));
            }
            Ok(())
        })();
        if let Err(message) = outcome {
            failures.push(format!("trial {trial}: {message}"));
        }
    }
    SuiteReport {
        name: "entropy-production",
        trials,
        failures,
        worst,
    }
}

/// Run all four suites with one seed and trial count.
pub fn run_all(seed: u64, trials: usize, fault: Fault) -> Vec<SuiteReport> {
    vec![
        route_identity_suite(seed, trials),
        passivity_suite(seed, trials),
        engine_law_suite(seed, trials),
        entropy_production_suite(seed, trials, fault),
    ]
}
