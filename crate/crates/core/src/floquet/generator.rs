//! Master-equation generator assembled from harmonic jump channels.
//!
//! Each channel contributes a matched emission/absorption dissipator pair
//! whose rates are the bath's spectral response at the channel frequency.
//! The total generator additionally carries the coherent rotation generated
//! by the effective Hamiltonian, so the evolved state lives in the frame
//! that co-rotates with the micromotion only (quasi-energy phases included).

use nalgebra::DMatrix;

use crate::bath::BathModel;
use crate::linalg::{
    self, commutator_superop, dissipator_superop, hermitian_eigen, re, unvectorize, vectorize,
    CMat, C64,
};

use super::{
    channels::CouplingChannelSet, clamp_rate, decompose::FloquetDecomposition, FloquetError,
    FloquetMachine, CLUSTER_REL_TOL,
};

/// Relative tolerance on the stationary residual `‖L ρ̄‖`.
const STATIONARY_RESIDUAL_TOL: f64 = 1e-8;

/// Most negative stationary-state eigenvalue tolerated before the
/// construction is declared corrupt rather than clamped.
const NEGATIVITY_TOL: f64 = 1e-8;

/// Tolerance on trace drift under propagation.
const TRACE_DRIFT_TOL: f64 = 1e-8;

/// One dissipative block of the generator: a single frequency channel of a
/// single bath coupling, with its emission/absorption rate pair.
#[derive(Debug, Clone)]
pub struct ChannelBlock {
    /// Index into the machine's coupling list.
    pub coupling_index: usize,
    /// Bath label the rates were drawn from.
    pub label: String,
    /// Folded quasi-Bohr value of the underlying cluster.
    pub bohr: f64,
    /// Signed quasi-energy difference satisfied by the jump operator.
    pub quasi_gap: f64,
    /// Harmonic offset from the cluster's dominant carrier.
    pub offset: i32,
    /// Channel frequency `f > 0`.
    pub frequency: f64,
    /// Downward (emission) rate `G(f)`.
    pub emission: f64,
    /// Upward (absorption) rate `G(−f)`.
    pub absorption: f64,
    /// Detailed-balance exponent `ln[G(f)/G(−f)]`, possibly infinite.
    pub exponent: f64,
    /// Local inverse temperature `exponent / f`.
    pub inv_temperature: f64,
    /// Jump operator in the Floquet eigenbasis.
    pub operator: CMat,
    /// Vectorised dissipator `emission·D[S] + absorption·D[S†]`.
    pub superop: DMatrix<C64>,
}

impl ChannelBlock {
    /// Apply this block's dissipator to a density matrix.
    pub fn apply(&self, rho: &CMat) -> CMat {
        unvectorize(&(&self.superop * vectorize(rho)), rho.nrows())
    }

    /// Net quantum current into the system through this channel:
    /// `f · (absorption·Tr[S†ρS] − emission·Tr[SρS†])`.
    pub fn current(&self, rho: &CMat) -> f64 {
        let up = (self.operator.adjoint() * rho * &self.operator).trace().re;
        let down = (&self.operator * rho * self.operator.adjoint()).trace().re;
        self.frequency * (self.absorption * up - self.emission * down)
    }

    /// Invariant state of this block alone: a diagonal Gibbs-like state of
    /// the effective Hamiltonian at the channel's local temperature, rescaled
    /// to the quasi-energy ladder. A channel with a vanishing quasi-energy
    /// gap (a pure drive harmonic) relaxes towards the maximally mixed state.
    pub fn reference_state(&self, quasi_energies: &[f64], omega: f64) -> CMat {
        let d = quasi_energies.len();
        if self.quasi_gap.abs() <= CLUSTER_REL_TOL * omega {
            return CMat::identity(d, d) * re(1.0 / d as f64);
        }
        let beta = self.exponent / self.quasi_gap;
        let mut log_weights: Vec<f64> = if beta.is_infinite() {
            // Zero-temperature limit: all weight on the extremal level(s).
            let extreme = quasi_energies.iter().copied().fold(
                if beta > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                |a, b| if beta > 0.0 { a.min(b) } else { a.max(b) },
            );
            let near = 1e-12 * (1.0 + extreme.abs());
            quasi_energies
                .iter()
                .map(|&e| {
                    if (e - extreme).abs() <= near {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        } else {
            quasi_energies.iter().map(|&e| -beta * e).collect()
        };
        let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for w in &mut log_weights {
            *w = (*w - top).exp();
        }
        let total: f64 = log_weights.iter().sum();
        let mut rho = CMat::zeros(d, d);
        for (k, w) in log_weights.iter().enumerate() {
            rho[(k, k)] = re(w / total);
        }
        rho
    }
}

/// Full generator of the reduced dynamics in the Floquet eigenbasis.
#[derive(Debug, Clone)]
pub struct GeneratorDecomposition {
    /// Hilbert-space dimension.
    pub dim: usize,
    /// Drive angular frequency.
    pub omega: f64,
    /// Quasi-energies defining the coherent part.
    pub quasi_energies: Vec<f64>,
    /// Dissipative blocks, one per (coupling, channel) pair.
    pub blocks: Vec<ChannelBlock>,
    /// Vectorised total generator: coherent part plus all blocks.
    pub total: DMatrix<C64>,
    /// Warnings inherited from channel extraction (dropped static weight).
    pub warnings: Vec<String>,
}

impl GeneratorDecomposition {
    /// Combined rate scale `Σ (emission + absorption)·‖S‖²`, used to set
    /// absolute tolerances.
    pub fn rate_scale(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b.emission + b.absorption) * b.operator.norm_squared())
            .sum()
    }

    /// Apply the full generator to a density matrix.
    pub fn apply(&self, rho: &CMat) -> CMat {
        unvectorize(&(&self.total * vectorize(rho)), self.dim)
    }
}

fn bath_rates(bath: &BathModel, frequency: f64) -> Result<(f64, f64, f64), FloquetError> {
    let emission = clamp_rate(bath.spontaneous(frequency)? + bath.absorption(frequency)?);
    let absorption = clamp_rate(bath.absorption(frequency)?);
    let exponent = if emission == 0.0 && absorption == 0.0 {
        f64::NAN // inert channel, skipped by the caller
    } else {
        bath.boltzmann_exponent(frequency)?
    };
    Ok((emission, absorption, exponent))
}

/// Assemble the generator from a decomposition and its extracted channels.
pub fn build_generator(
    decomposition: &FloquetDecomposition,
    machine: &FloquetMachine,
    sets: &[CouplingChannelSet],
) -> Result<GeneratorDecomposition, FloquetError> {
    let d = decomposition.dim();
    let quasi = decomposition.quasi_energies().to_vec();
    let mut h_bar = CMat::zeros(d, d);
    for (k, &e) in quasi.iter().enumerate() {
        h_bar[(k, k)] = re(e);
    }
    let mut total = commutator_superop(&h_bar);
    let mut blocks = Vec::new();
    let mut warnings = Vec::new();
    for set in sets {
        warnings.extend(set.warnings.iter().cloned());
        let coupling = machine
            .couplings
            .get(set.coupling_index)
            .ok_or_else(|| FloquetError::DimensionMismatch("stale coupling index".into()))?;
        for channel in &set.channels {
            let (emission, absorption, exponent) =
                bath_rates(&coupling.bath, channel.frequency)?;
            if emission == 0.0 && absorption == 0.0 {
                continue; // the bath is dark at this frequency
            }
            let mut superop = dissipator_superop(&channel.operator) * re(emission);
            superop += dissipator_superop(&channel.operator.adjoint()) * re(absorption);
            total += &superop;
            blocks.push(ChannelBlock {
                coupling_index: set.coupling_index,
                label: set.label.clone(),
                bohr: channel.bohr,
                quasi_gap: channel.quasi_gap,
                offset: channel.offset,
                frequency: channel.frequency,
                emission,
                absorption,
                exponent,
                inv_temperature: exponent / channel.frequency,
                operator: channel.operator.clone(),
                superop,
            });
        }
    }
    Ok(GeneratorDecomposition {
        dim: d,
        omega: decomposition.omega(),
        quasi_energies: quasi,
        blocks,
        total,
        warnings,
    })
}

/// Unique stationary state of the generator, obtained from the null space of
/// its vectorised form.
///
/// Fails with [`FloquetError::NonErgodic`] when the kernel is not
/// one-dimensional and with [`FloquetError::NumericalIntegrity`] when the
/// kernel vector does not round to a physical density matrix.
pub fn stationary_state(generator: &GeneratorDecomposition) -> Result<CMat, FloquetError> {
    let null = linalg::null_space(&generator.total);
    if null.kernel_dim != 1 {
        return Err(FloquetError::NonErgodic {
            kernel_dim: null.kernel_dim,
            gap: null.gap,
        });
    }
    let candidate = unvectorize(&null.vector, generator.dim);
    let trace = candidate.trace();
    if trace.norm() < 1e-12 * candidate.norm() {
        return Err(FloquetError::NumericalIntegrity(
            "stationary kernel vector is traceless".into(),
        ));
    }
    let mut rho = linalg::hermitian_part(&(candidate / trace));
    let (eigs, vecs) = hermitian_eigen(&rho);
    let most_negative = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if most_negative < -NEGATIVITY_TOL {
        return Err(FloquetError::NumericalIntegrity(format!(
            "stationary state has negative population {most_negative:.3e}"
        )));
    }
    let clamped: Vec<f64> = eigs.iter().map(|&e| e.max(0.0)).collect();
    let norm: f64 = clamped.iter().sum();
    let mut diag = CMat::zeros(generator.dim, generator.dim);
    for (k, &p) in clamped.iter().enumerate() {
        diag[(k, k)] = re(p / norm);
    }
    rho = &vecs * diag * vecs.adjoint();
    let residual = generator.apply(&rho).norm();
    let scale = 1.0 + generator.total.norm();
    if residual > STATIONARY_RESIDUAL_TOL * scale {
        return Err(FloquetError::NumericalIntegrity(format!(
            "stationary residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(rho)
}

/// Evolve a state for a time `t ≥ 0` under the full generator via the matrix
/// exponential of its vectorised form.
pub fn evolve(
    generator: &GeneratorDecomposition,
    rho: &CMat,
    t: f64,
) -> Result<CMat, FloquetError> {
    if rho.nrows() != generator.dim || rho.ncols() != generator.dim {
        return Err(FloquetError::DimensionMismatch(
            "state dimension does not match generator".into(),
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(FloquetError::InvalidArgument(
            "evolution time must be finite and non-negative".into(),
        ));
    }
    let propagator = (&generator.total * re(t)).exp();
    let evolved = unvectorize(&(propagator * vectorize(rho)), generator.dim);
    let drift = (evolved.trace() - rho.trace()).norm();
    if drift > TRACE_DRIFT_TOL * (1.0 + rho.trace().norm()) {
        return Err(FloquetError::NumericalIntegrity(format!(
            "trace drifted by {drift:.3e} during evolution"
        )));
    }
    Ok(evolved)
}

/// Map a state from the Floquet eigenbasis co-rotating frame back to the lab
/// frame at time `t = (periods + j/N)·τ`, where `j` indexes the stored
/// propagator samples.
pub fn lab_frame_state(
    decomposition: &FloquetDecomposition,
    rho: &CMat,
    sample_index: usize,
    periods: u64,
) -> Result<CMat, FloquetError> {
    let d = decomposition.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(FloquetError::DimensionMismatch(
            "state dimension does not match decomposition".into(),
        ));
    }
    let n = decomposition.sample_count();
    if sample_index >= n {
        return Err(FloquetError::InvalidArgument(format!(
            "sample index {sample_index} out of range (N = {n})"
        )));
    }
    let tau = decomposition.period();
    let t = (periods as f64 + sample_index as f64 / n as f64) * tau;
    // Lab-frame propagator U(t) for t beyond one period: stroboscopic powers
    // of the monodromy times the stored intra-period sample.
    let mut u = decomposition.propagation().sample(sample_index).clone();
    let monodromy = decomposition.propagation().monodromy();
    for _ in 0..periods {
        u = &u * monodromy;
    }
    // Undo the quasi-energy rotation: ρ_lab = U V e^{+iDt} ρ e^{−iDt} V† U†.
    let mut rotation = CMat::zeros(d, d);
    for (k, &e) in decomposition.quasi_energies().iter().enumerate() {
        rotation[(k, k)] = super::complex_phase(e * t);
    }
    let frame = u * decomposition.basis() * rotation;
    Ok(&frame * rho * frame.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathModel;
    use crate::floquet::{
        floquet_decompose, jump_operators, propagate_period, BathCoupling, PeriodicHamiltonian,
    };
    use crate::linalg::re;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sigma_x() -> CMat {
        CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)])
    }

    fn static_machine(gap: f64, omega: f64, temperature: f64) -> FloquetMachine {
        let h = PeriodicHamiltonian::static_hamiltonian(
            omega,
            CMat::from_row_slice(2, 2, &[re(gap), re(0.0), re(0.0), re(0.0)]),
        )
        .unwrap();
        FloquetMachine::new(
            h,
            vec![BathCoupling {
                label: "thermal".into(),
                operator: sigma_x(),
                bath: BathModel::thermal(temperature, 1.0),
            }],
        )
        .unwrap()
    }

    fn build(machine: &FloquetMachine, samples: usize, q_max: u32) -> GeneratorDecomposition {
        let dec = floquet_decompose(propagate_period(&machine.hamiltonian, samples).unwrap())
            .unwrap();
        let sets = jump_operators(&dec, machine, q_max).unwrap();
        build_generator(&dec, machine, &sets).unwrap()
    }

    #[test]
    fn static_thermal_contact_relaxes_to_gibbs() {
        let (gap, temperature) = (1.0, 0.75);
        let machine = static_machine(gap, 4.0, temperature);
        let generator = build(&machine, 256, 0);
        assert_eq!(generator.blocks.len(), 1);
        let block = &generator.blocks[0];
        assert_relative_eq!(block.exponent, gap / temperature, max_relative = 1e-9);
        let rho = stationary_state(&generator).unwrap();
        // Quasi-energies sort the ground state first here (ε̄ = {0, 1}).
        let ratio = rho[(1, 1)].re / rho[(0, 0)].re;
        assert_relative_eq!(ratio, (-gap / temperature).exp(), max_relative = 1e-8);
        assert_abs_diff_eq!(rho[(0, 1)].norm(), 0.0, epsilon = 1e-10);
        // Stationary currents vanish at equilibrium.
        assert_abs_diff_eq!(block.current(&rho), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn block_reference_state_matches_local_gibbs() {
        let machine = static_machine(1.0, 4.0, 0.75);
        let generator = build(&machine, 256, 0);
        let reference = generator.blocks[0].reference_state(&generator.quasi_energies, 4.0);
        let stationary = stationary_state(&generator).unwrap();
        assert!((&reference - &stationary).norm() < 1e-8);
    }

    #[test]
    fn evolution_matches_amplitude_damping_law() {
        // Zero temperature: pure decay of the excited population at the
        // emission rate.
        let machine = {
            let h = PeriodicHamiltonian::static_hamiltonian(
                4.0,
                CMat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]),
            )
            .unwrap();
            FloquetMachine::new(
                h,
                vec![BathCoupling {
                    label: "vacuum".into(),
                    operator: sigma_x(),
                    bath: BathModel::Population {
                        coupling: crate::bath::BaseCoupling::Flat { strength: 0.3 },
                        occupation: crate::bath::Profile::Constant(0.0),
                    },
                }],
            )
            .unwrap()
        };
        let generator = build(&machine, 256, 0);
        let block = &generator.blocks[0];
        assert_relative_eq!(block.emission, 0.3, max_relative = 1e-9);
        assert_abs_diff_eq!(block.absorption, 0.0, epsilon = 1e-15);
        // Excited state sits at quasi-energy 1, i.e. eigenbasis index 1.
        let mut rho = CMat::zeros(2, 2);
        rho[(1, 1)] = re(1.0);
        let t = 2.5;
        let evolved = evolve(&generator, &rho, t).unwrap();
        assert_relative_eq!(
            evolved[(1, 1)].re,
            (-0.3 * t).exp(),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            evolved[(0, 0)].re,
            1.0 - (-0.3 * t).exp(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn coherences_rotate_at_the_quasi_energy_gap() {
        // With a weak coupling the off-diagonal element precesses at the
        // quasi-energy splitting under the coherent part of the generator.
        let machine = static_machine(1.0, 4.0, 1.0);
        let generator = build(&machine, 256, 0);
        let mut rho = CMat::from_row_slice(
            2,
            2,
            &[re(0.5), re(0.5), re(0.5), re(0.5)],
        );
        rho = crate::linalg::hermitian_part(&rho);
        let t = 0.3;
        let evolved = evolve(&generator, &rho, t).unwrap();
        let gap = generator.quasi_energies[1] - generator.quasi_energies[0];
        let expected_phase = C64::new(0.0, -gap * t).exp();
        let rotated = evolved[(1, 0)] / rho[(1, 0)];
        // Dissipation shrinks the magnitude; the phase must match exactly.
        assert!(rotated.norm() < 1.0);
        assert!((rotated / rotated.norm() - expected_phase).norm() < 1e-8);
    }

    #[test]
    fn dark_bath_yields_non_ergodic_error() {
        // A band-limited bath that misses the transition frequency leaves
        // no dissipative blocks: the kernel is the full commutant.
        let h = PeriodicHamiltonian::static_hamiltonian(
            4.0,
            CMat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]),
        )
        .unwrap();
        let machine = FloquetMachine::new(
            h,
            vec![BathCoupling {
                label: "band".into(),
                operator: sigma_x(),
                bath: BathModel::thermal_band(2.0, 1.0, 5.0, 6.0),
            }],
        )
        .unwrap();
        let generator = build(&machine, 256, 0);
        assert!(generator.blocks.is_empty());
        match stationary_state(&generator) {
            Err(FloquetError::NonErgodic { kernel_dim, .. }) => assert_eq!(kernel_dim, 2),
            other => panic!("expected non-ergodic kernel, got {other:?}"),
        }
    }

    #[test]
    fn lab_frame_round_trip_preserves_trace_and_hermiticity() {
        let machine = static_machine(1.0, 4.0, 1.0);
        let dec =
            floquet_decompose(propagate_period(&machine.hamiltonian, 256).unwrap()).unwrap();
        let sets = jump_operators(&dec, &machine, 1).unwrap();
        let generator = build_generator(&dec, &machine, &sets).unwrap();
        let rho = stationary_state(&generator).unwrap();
        let lab = lab_frame_state(&dec, &rho, 37, 2).unwrap();
        assert_abs_diff_eq!(lab.trace().re, 1.0, epsilon = 1e-10);
        assert!(crate::linalg::hermiticity_defect(&lab) < 1e-10);
        // The stationary populations are basis-diagonal; for a static system
        // the lab state must equal V ρ V† at every sampled time.
        let direct = dec.basis() * &rho * dec.basis().adjoint();
        assert!((&lab - &direct).norm() < 1e-9);
    }

    #[test]
    fn evolve_rejects_bad_inputs() {
        let machine = static_machine(1.0, 4.0, 1.0);
        let generator = build(&machine, 256, 0);
        let rho = CMat::identity(2, 2) * re(0.5);
        assert!(matches!(
            evolve(&generator, &rho, -1.0),
            Err(FloquetError::InvalidArgument(_))
        ));
        let wrong = CMat::identity(3, 3) * re(1.0 / 3.0);
        assert!(matches!(
            evolve(&generator, &wrong, 1.0),
            Err(FloquetError::DimensionMismatch(_))
        ));
    }
}
