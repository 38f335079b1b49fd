//! Floquet–Lindblad pipeline for periodically driven open systems.
//!
//! The stages mirror the physics:
//!
//! 1. [`propagate_period`] — integrate the Schrödinger propagator of a
//!    [`PeriodicHamiltonian`] across one period on a uniform grid, each step
//!    exactly unitary.
//! 2. [`floquet_decompose`] — diagonalise the one-period propagator into
//!    quasi-energies (folded to `[0, Ω)`) and Floquet modes, defining the
//!    effective Hamiltonian `H̄` and the periodic micromotion.
//! 3. [`jump_operators`] — resolve each hermitian coupling operator into
//!    harmonic jump operators `S(f)` at channel frequencies
//!    `f = ω̄ + mΩ > 0`, one per quasi-Bohr cluster and retained harmonic.
//! 4. [`build_generator`] — attach bath rates `G(±f)` to each channel,
//!    producing a block-structured Lindblad generator in the Floquet
//!    eigenbasis.
//! 5. [`stationary_state`] / [`evolve`] — kernel and propagation of the
//!    generator.
//! 6. [`thermo_report`] / [`entropy_balance`] — heat currents, power,
//!    effective inverse temperatures, efficiency bounds and the entropy
//!    balance along trajectories.

mod channels;
mod decompose;
mod generator;
mod propagate;
mod report;

pub use channels::{bohr_spectrum, jump_operators, BohrSpectrum, CouplingChannelSet, JumpChannel};
pub use decompose::{floquet_decompose, FloquetDecomposition};
pub use generator::{
    build_generator, evolve, lab_frame_state, stationary_state, ChannelBlock,
    GeneratorDecomposition,
};
pub use propagate::{propagate_period, Propagation};
pub use report::{entropy_balance, thermo_report, BalanceSample, EntropyBalance, ThermoReport};

use thiserror::Error;

use crate::bath::{BathError, BathModel};
use crate::linalg::{hermiticity_defect, max_abs, CMat};

/// Relative tolerance for hermiticity and Fourier-pairing checks on inputs.
pub const INPUT_HERMITICITY_TOL: f64 = 1e-12;

/// Channel frequencies within `1e−8·Ω` of each other merge into one cluster;
/// the same margin separates "exactly zero" frequencies that must be dropped.
pub const CLUSTER_REL_TOL: f64 = 1e-8;

/// Operators with Frobenius norm below this are discarded as empty channels.
pub const OPERATOR_FLOOR: f64 = 1e-12;

/// Rates below this are treated as exact zeros.
pub const RATE_FLOOR: f64 = 1e-300;

/// Errors from the Floquet pipeline.
#[derive(Debug, Error)]
pub enum FloquetError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Fourier term m = {m} violates hermiticity pairing (defect {defect:.3e})")]
    NonHermitianTerm { m: i32, defect: f64 },
    #[error("coupling operator {label:?} is not hermitian (defect {defect:.3e})")]
    NonHermitianCoupling { label: String, defect: f64 },
    #[error("sample count must be a power of two of at least 256, got {0}")]
    SampleCount(usize),
    #[error("propagator lost unitarity (defect {defect:.3e}); refine the step")]
    UnitarityLoss { defect: f64 },
    #[error("monodromy reconstruction residual {residual:.3e} exceeds 1e-9")]
    DecompositionResidual { residual: f64 },
    #[error(
        "harmonic reconstruction residual {residual:.3e} exceeds 1e-6: \
         raise the sample count or the harmonic cutoff"
    )]
    InsufficientSampling { residual: f64 },
    #[error(
        "generator kernel is {kernel_dim}-dimensional (separation {gap:.3e}): \
         no unique stationary state"
    )]
    NonErgodic { kernel_dim: usize, gap: f64 },
    #[error("negative entropy production {sigma:.3e}: generator is corrupted")]
    CorruptedGenerator { sigma: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error("numerical integrity check failed: {0}")]
    NumericalIntegrity(String),
}

/// A time-periodic Hamiltonian `H(t) = Σ_m H_m e^{−imΩt}` with
/// `H_{−m} = H_m†`. The `m = +1` term carries the raising operator of a
/// co-rotating drive.
#[derive(Debug, Clone)]
pub struct PeriodicHamiltonian {
    dim: usize,
    omega: f64,
    terms: Vec<(i32, CMat)>,
}

impl PeriodicHamiltonian {
    /// Build from Fourier terms `(m, H_m)`.
    ///
    /// The drive frequency must be positive; all matrices square with equal
    /// dimension at least two; `H_0` hermitian; and every `±m` pair adjoint
    /// to each other within [`INPUT_HERMITICITY_TOL`] (relative). A missing
    /// partner of a listed `m ≠ 0` term is filled in as the adjoint.
    pub fn new(omega: f64, terms: Vec<(i32, CMat)>) -> Result<Self, FloquetError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(FloquetError::InvalidArgument(format!(
                "drive frequency must be positive and finite, got {omega}"
            )));
        }
        if terms.is_empty() {
            return Err(FloquetError::InvalidArgument(
                "at least one Fourier term required".into(),
            ));
        }
        let dim = terms[0].1.nrows();
        if dim < 2 {
            return Err(FloquetError::InvalidArgument(format!(
                "system dimension must be at least 2, got {dim}"
            )));
        }
        let mut by_index = std::collections::BTreeMap::<i32, CMat>::new();
        for (m, matrix) in terms {
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(FloquetError::DimensionMismatch(format!(
                    "term m = {m} is {}×{}, expected {dim}×{dim}",
                    matrix.nrows(),
                    matrix.ncols()
                )));
            }
            if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(FloquetError::InvalidArgument(format!(
                    "term m = {m} contains non-finite entries"
                )));
            }
            if by_index.insert(m, matrix).is_some() {
                return Err(FloquetError::InvalidArgument(format!(
                    "Fourier index m = {m} listed twice"
                )));
            }
        }
        if let Some(h0) = by_index.get(&0) {
            let defect = hermiticity_defect(h0);
            if defect > INPUT_HERMITICITY_TOL * max_abs(h0).max(1.0) {
                return Err(FloquetError::NonHermitianTerm { m: 0, defect });
            }
        }
        let indices: Vec<i32> = by_index.keys().copied().collect();
        for &m in &indices {
            if m <= 0 {
                continue;
            }
            let positive = by_index[&m].clone();
            match by_index.get(&-m) {
                Some(negative) => {
                    let defect = (negative - positive.adjoint()).norm();
                    if defect > INPUT_HERMITICITY_TOL * max_abs(&positive).max(1.0) {
                        return Err(FloquetError::NonHermitianTerm { m: -m, defect });
                    }
                }
                None => {
                    by_index.insert(-m, positive.adjoint());
                }
            }
        }
        for &m in &indices {
            if m < 0 && !by_index.contains_key(&-m) {
                let negative = by_index[&m].clone();
                by_index.insert(-m, negative.adjoint());
            }
        }
        Ok(PeriodicHamiltonian {
            dim,
            omega,
            terms: by_index.into_iter().collect(),
        })
    }

    /// Purely static Hamiltonian (only the `m = 0` term), with `omega`
    /// setting the folding window of the quasi-energies.
    pub fn static_hamiltonian(omega: f64, h0: CMat) -> Result<Self, FloquetError> {
        PeriodicHamiltonian::new(omega, vec![(0, h0)])
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Drive frequency `Ω`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Drive period `τ = 2π/Ω`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// The Fourier terms `(m, H_m)`, sorted by `m`.
    pub fn terms(&self) -> &[(i32, CMat)] {
        &self.terms
    }

    /// The Fourier term at index `m`, if present.
    pub fn term_matrix(&self, m: i32) -> Option<&CMat> {
        self.terms
            .iter()
            .find(|&&(idx, _)| idx == m)
            .map(|(_, matrix)| matrix)
    }

    /// Evaluate `H(t)`.
    pub fn at(&self, t: f64) -> CMat {
        let mut h = CMat::zeros(self.dim, self.dim);
        for (m, term) in &self.terms {
            let phase = num_complex::Complex::from_polar(1.0, -(*m as f64) * self.omega * t);
            h += term * phase;
        }
        h
    }
}

/// A hermitian coupling operator to a named bath.
#[derive(Debug, Clone)]
pub struct BathCoupling {
    pub label: String,
    pub operator: CMat,
    pub bath: BathModel,
}

/// A periodically driven system together with its bath couplings.
#[derive(Debug, Clone)]
pub struct FloquetMachine {
    pub hamiltonian: PeriodicHamiltonian,
    pub couplings: Vec<BathCoupling>,
}

impl FloquetMachine {
    /// Validate and assemble a machine: unique non-empty labels, hermitian
    /// coupling operators of matching dimension, structurally valid baths.
    pub fn new(
        hamiltonian: PeriodicHamiltonian,
        couplings: Vec<BathCoupling>,
    ) -> Result<Self, FloquetError> {
        if couplings.is_empty() {
            return Err(FloquetError::InvalidArgument(
                "at least one bath coupling required".into(),
            ));
        }
        let mut labels = std::collections::BTreeSet::new();
        for coupling in &couplings {
            if coupling.label.is_empty() {
                return Err(FloquetError::InvalidArgument(
                    "bath labels must be non-empty".into(),
                ));
            }
            if !labels.insert(coupling.label.clone()) {
                return Err(FloquetError::InvalidArgument(format!(
                    "bath label {:?} used twice",
                    coupling.label
                )));
            }
            if coupling.operator.nrows() != hamiltonian.dim()
                || coupling.operator.ncols() != hamiltonian.dim()
            {
                return Err(FloquetError::DimensionMismatch(format!(
                    "coupling {:?} is {}×{}, expected {dim}×{dim}",
                    coupling.label,
                    coupling.operator.nrows(),
                    coupling.operator.ncols(),
                    dim = hamiltonian.dim()
                )));
            }
            let defect = hermiticity_defect(&coupling.operator);
            if defect > INPUT_HERMITICITY_TOL * max_abs(&coupling.operator).max(1.0) {
                return Err(FloquetError::NonHermitianCoupling {
                    label: coupling.label.clone(),
                    defect,
                });
            }
            coupling.bath.validate()?;
        }
        Ok(FloquetMachine {
            hamiltonian,
            couplings,
        })
    }

    /// Propagate one period and diagonalise the monodromy.
    pub fn decompose(&self, samples: usize) -> Result<FloquetDecomposition, FloquetError> {
        floquet_decompose(propagate_period(&self.hamiltonian, samples)?)
    }

    /// Full pipeline: decomposition plus block generator with harmonic
    /// window `q_max`.
    pub fn generator(
        &self,
        decomposition: &FloquetDecomposition,
        q_max: u32,
    ) -> Result<GeneratorDecomposition, FloquetError> {
        let sets = jump_operators(decomposition, self, q_max)?;
        build_generator(decomposition, self, &sets)
    }
}

/// Clamp a rate: negative input is a caller bug, tiny magnitudes collapse to
/// zero so that underflowed Boltzmann factors cannot poison ratios.
pub(crate) fn clamp_rate(rate: f64) -> f64 {
    if rate < RATE_FLOOR {
        0.0
    } else {
        rate
    }
}

pub(crate) fn complex_phase(angle: f64) -> crate::linalg::C64 {
    num_complex::Complex::from_polar(1.0, angle)
}
