//! Thermodynamic bookkeeping on top of the assembled generator.
//!
//! Every dissipative block carries a quantum current, an entropy-production
//! contribution measured against its own Gibbs-like invariant state, and a
//! local temperature. The report aggregates them into net power, effective
//! hot/cold temperatures, efficiency against the transport bound, and a
//! discrete-time entropy balance along a trajectory.

use crate::linalg::{self, CMat};
use crate::thermo::{self, CurrentEntry};

use super::generator::{ChannelBlock, GeneratorDecomposition};
use super::FloquetError;

/// Absolute floor under which a per-channel entropy production is treated as
/// numerically corrupt rather than as roundoff (scaled by the rate scale).
const PRODUCTION_FLOOR: f64 = -1e-6;

/// Populations below this are floored inside logarithms; far below any
/// physically meaningful occupation, yet finite.
const LOG_FLOOR: f64 = 1e-300;

/// Relative agreement required between channel exponents before an idle
/// machine is reported at their common temperature.
const EQUILIBRIUM_TOL: f64 = 1e-9;

/// Per-channel thermodynamic summary at a fixed state.
#[derive(Debug, Clone)]
pub struct ChannelReport {
    /// Bath label of the contributing coupling.
    pub label: String,
    /// Folded quasi-Bohr value of the channel's cluster.
    pub bohr: f64,
    /// Harmonic offset from the cluster's dominant carrier.
    pub offset: i32,
    /// Channel frequency.
    pub frequency: f64,
    /// Downward rate `G(f)`.
    pub emission: f64,
    /// Upward rate `G(−f)`.
    pub absorption: f64,
    /// Net quantum current into the system.
    pub current: f64,
    /// Local inverse temperature of the bath at this frequency.
    pub inv_temperature: f64,
    /// Local temperature (zero when the inverse diverges).
    pub temperature: f64,
    /// Entropy production rate of this block at the given state.
    pub entropy_production: f64,
}

/// Aggregate thermodynamic report at a fixed state.
#[derive(Debug, Clone)]
pub struct ThermoReport {
    /// Per-channel details in generator block order.
    pub channels: Vec<ChannelReport>,
    /// Net power output `Σ J_c` (positive when heat is converted to work:
    /// at steady state the drive extracts exactly the surplus current).
    pub power: f64,
    /// Sum of positive currents (heat intake).
    pub intake: f64,
    /// Sum of negative currents (heat outflow).
    pub outflow: f64,
    /// Flux-weighted inverse temperature of the intake side.
    pub inv_t_plus: f64,
    /// Flux-weighted inverse temperature of the outflow side.
    pub inv_t_minus: f64,
    /// `power / intake` when the machine outputs work from positive intake.
    pub efficiency: Option<f64>,
    /// Transport bound `1 − inv_t_plus / inv_t_minus` when defined.
    pub carnot_bound: Option<f64>,
    /// Whether the efficiency respects the bound (with roundoff slack).
    pub within_bound: Option<bool>,
    /// Entropy current into the system from the baths, `Σ J_c / T_c`.
    pub entropy_flow: f64,
    /// Total entropy production `Σ σ_c ≥ 0`.
    pub entropy_production: f64,
    /// True when intake and outflow sides mix positive and negative local
    /// temperatures, which voids the efficiency bound.
    pub mixed_sign: bool,
}

/// One sample of the entropy balance along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct BalanceSample {
    /// Sample time.
    pub time: f64,
    /// Von Neumann entropy of the state.
    pub entropy: f64,
    /// Central-difference entropy rate (NaN at the trajectory edges).
    pub ds_dt: f64,
    /// Entropy current into the system from the baths.
    pub flow: f64,
    /// Total entropy production.
    pub production: f64,
    /// `ds_dt − (production + flow)`, the balance defect (NaN at edges).
    pub residual: f64,
}

/// Entropy balance of a trajectory.
#[derive(Debug, Clone)]
pub struct EntropyBalance {
    /// Per-sample records in input order.
    pub samples: Vec<BalanceSample>,
    /// Most negative per-channel production encountered.
    pub min_production: f64,
    /// Largest interior balance defect.
    pub max_residual: f64,
}

/// Entropy production of a single block at a given state:
/// `σ_c = Tr[(L_c ρ)(ln ρ̄_c − ln ρ)]` with logarithms floored far below
/// any physical population.
fn block_production(
    block: &ChannelBlock,
    generator: &GeneratorDecomposition,
    rho: &CMat,
    log_rho: &CMat,
) -> f64 {
    let reference = block.reference_state(&generator.quasi_energies, generator.omega);
    let log_reference = linalg::hermitian_log_floored(&reference, LOG_FLOOR);
    let moved = block.apply(rho);
    ((&moved * (log_reference - log_rho)).trace()).re
}

/// Entropy current into the system through a single block:
/// `−Tr[(L_c ρ) ln ρ̄_c] = J_c / T_c` for a strictly thermal channel.
fn block_flow(block: &ChannelBlock, generator: &GeneratorDecomposition, rho: &CMat) -> f64 {
    let reference = block.reference_state(&generator.quasi_energies, generator.omega);
    let log_reference = linalg::hermitian_log_floored(&reference, LOG_FLOOR);
    let moved = block.apply(rho);
    -((&moved * log_reference).trace()).re
}

/// Thermodynamic report of the generator at a fixed (usually stationary)
/// state.
pub fn thermo_report(
    generator: &GeneratorDecomposition,
    rho: &CMat,
) -> Result<ThermoReport, FloquetError> {
    if rho.nrows() != generator.dim || rho.ncols() != generator.dim {
        return Err(FloquetError::DimensionMismatch(
            "state dimension does not match generator".into(),
        ));
    }
    let log_rho = linalg::hermitian_log_floored(rho, LOG_FLOOR);
    let mut channels = Vec::with_capacity(generator.blocks.len());
    let mut entries = Vec::with_capacity(generator.blocks.len());
    let mut production = 0.0;
    for block in &generator.blocks {
        let current = block.current(rho);
        let sigma = block_production(block, generator, rho, &log_rho);
        production += sigma;
        entries.push(CurrentEntry {
            current,
            inv_temperature: block.inv_temperature,
        });
        channels.push(ChannelReport {
            label: block.label.clone(),
            bohr: block.bohr,
            offset: block.offset,
            frequency: block.frequency,
            emission: block.emission,
            absorption: block.absorption,
            current,
            inv_temperature: block.inv_temperature,
            temperature: if block.inv_temperature.is_infinite() {
                0.0
            } else {
                1.0 / block.inv_temperature
            },
            entropy_production: sigma,
        });
    }
    let mut effective = thermo::effective_temperatures(&entries);
    // Idle machine: currents at roundoff scale only. If every channel sits
    // at one common temperature, report that temperature on both sides
    // instead of leaving the averages undefined.
    let idle_scale = 1e-12 * (1.0 + generator.rate_scale());
    if effective.intake <= idle_scale && effective.outflow.abs() <= idle_scale
        && !entries.is_empty()
    {
        let first = entries[0].inv_temperature;
        let uniform = entries.iter().all(|e| {
            let x = e.inv_temperature;
            (x - first).abs() <= EQUILIBRIUM_TOL * (1.0 + first.abs().min(x.abs()))
                || (x.is_infinite() && first.is_infinite() && x.signum() == first.signum())
        });
        if uniform {
            effective.inv_t_plus = first;
            effective.inv_t_minus = first;
        }
    }
    let power = entries.iter().map(|e| e.current).sum::<f64>();
    let carnot = effective.carnot_bound();
    let efficiency = if power > idle_scale && effective.intake > idle_scale {
        Some(power / effective.intake)
    } else {
        None
    };
    let within_bound = match (efficiency, carnot) {
        (Some(eta), Some(bound)) if !effective.mixed_sign => {
            Some(eta <= bound + EQUILIBRIUM_TOL * (1.0 + bound.abs()))
        }
        _ => None,
    };
    Ok(ThermoReport {
        channels,
        power,
        intake: effective.intake,
        outflow: effective.outflow,
        inv_t_plus: effective.inv_t_plus,
        inv_t_minus: effective.inv_t_minus,
        efficiency,
        carnot_bound: carnot,
        within_bound,
        entropy_flow: thermo::entropy_flow(&entries),
        entropy_production: production,
        mixed_sign: effective.mixed_sign,
    })
}

/// Entropy balance along a sampled trajectory `(tᵢ, ρᵢ)`.
///
/// Verifies the second-law split `dS/dt = production + flow` by central
/// differences and fails with [`FloquetError::CorruptedGenerator`] when any
/// per-channel production is more negative than roundoff allows.
pub fn entropy_balance(
    generator: &GeneratorDecomposition,
    trajectory: &[(f64, CMat)],
) -> Result<EntropyBalance, FloquetError> {
    if trajectory.len() < 3 {
        return Err(FloquetError::InvalidArgument(
            "entropy balance needs at least three samples".into(),
        ));
    }
    if trajectory.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(FloquetError::InvalidArgument(
            "trajectory times must be strictly increasing".into(),
        ));
    }
    let scale = 1.0 + generator.rate_scale();
    let mut entropies = Vec::with_capacity(trajectory.len());
    let mut flows = Vec::with_capacity(trajectory.len());
    let mut productions = Vec::with_capacity(trajectory.len());
    let mut min_production = f64::INFINITY;
    for (_, rho) in trajectory {
        if rho.nrows() != generator.dim || rho.ncols() != generator.dim {
            return Err(FloquetError::DimensionMismatch(
                "trajectory state dimension does not match generator".into(),
            ));
        }
        let hermitian = linalg::hermitian_part(rho);
        let log_rho = linalg::hermitian_log_floored(&hermitian, LOG_FLOOR);
        entropies.push(linalg::von_neumann_entropy(&hermitian));
        let mut flow = 0.0;
        let mut production = 0.0;
        for block in &generator.blocks {
            let sigma = block_production(block, generator, &hermitian, &log_rho);
            min_production = min_production.min(sigma);
            production += sigma;
            flow += block_flow(block, generator, &hermitian);
        }
        flows.push(flow);
        productions.push(production);
    }
    if min_production < PRODUCTION_FLOOR * scale {
        return Err(FloquetError::CorruptedGenerator {
            sigma: min_production,
        });
    }
    let mut samples = Vec::with_capacity(trajectory.len());
    let mut max_residual = 0.0_f64;
    for i in 0..trajectory.len() {
        let (ds_dt, residual) = if i == 0 || i + 1 == trajectory.len() {
            (f64::NAN, f64::NAN)
        } else {
            let dt = trajectory[i + 1].0 - trajectory[i - 1].0;
            let rate = (entropies[i + 1] - entropies[i - 1]) / dt;
            let defect = rate - (productions[i] + flows[i]);
            max_residual = max_residual.max(defect.abs());
            (rate, defect)
        };
        samples.push(BalanceSample {
            time: trajectory[i].0,
            entropy: entropies[i],
            ds_dt,
            flow: flows[i],
            production: productions[i],
            residual,
        });
    }
    Ok(EntropyBalance {
        samples,
        min_production,
        max_residual,
    })
}
