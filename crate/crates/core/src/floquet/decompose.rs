//! Monodromy diagonalisation: quasi-energies, Floquet modes, effective
//! Hamiltonian and micromotion.

use crate::linalg::{re, unitary_eigenphases, CMat, CVec, I};

use super::{propagate::Propagation, FloquetError};

/// Absolute tolerance for clustering monodromy eigenvalue cosines before the
/// sine part splits them.
const PHASE_CLUSTER_TOL: f64 = 1e-10;

/// Largest tolerated residual `‖U(τ) − e^{−iH̄τ}‖` of the reconstruction
/// (equivalently, of the micromotion periodicity `P(τ) = P(0)`).
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Floquet decomposition of a one-period propagation: monodromy eigenbasis
/// `V` (columns are the Floquet modes at `t = 0`), quasi-energies
/// `ε̄_k ∈ [0, Ω)` sorted ascending, and the retained propagator samples.
#[derive(Debug, Clone)]
pub struct FloquetDecomposition {
    propagation: Propagation,
    quasi_energies: Vec<f64>,
    basis: CMat,
    residual: f64,
}

impl FloquetDecomposition {
    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.propagation.dim()
    }

    /// Drive frequency `Ω`.
    pub fn omega(&self) -> f64 {
        self.propagation.omega()
    }

    /// Drive period `τ`.
    pub fn period(&self) -> f64 {
        self.propagation.period()
    }

    /// Number of propagator samples per period.
    pub fn sample_count(&self) -> usize {
        self.propagation.sample_count()
    }

    /// Quasi-energies folded to the principal branch `[0, Ω)`, ascending.
    pub fn quasi_energies(&self) -> &[f64] {
        &self.quasi_energies
    }

    /// Floquet-mode basis: column `k` is the mode with quasi-energy `ε̄_k`.
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// The underlying propagation.
    pub fn propagation(&self) -> &Propagation {
        &self.propagation
    }

    /// Reconstruction residual `‖U(τ) − e^{−iH̄τ}‖`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Effective Hamiltonian `H̄ = V diag(ε̄) V†` in the lab basis;
    /// `U(τ) = e^{−iH̄τ}` within [`DECOMPOSITION_TOL`].
    pub fn effective_hamiltonian(&self) -> CMat {
        let diag = CMat::from_diagonal(&CVec::from_iterator(
            self.dim(),
            self.quasi_energies.iter().map(|&e| re(e)),
        ));
        &self.basis * diag * self.basis.adjoint()
    }

    /// `e^{+iH̄ t_j}` for grid point `j`, in the Floquet eigenbasis
    /// (a diagonal matrix).
    fn counter_rotation(&self, j: usize) -> CMat {
        let t = self.period() * j as f64 / self.sample_count() as f64;
        CMat::from_diagonal(&CVec::from_iterator(
            self.dim(),
            self.quasi_energies.iter().map(|&e| (I * re(e * t)).exp()),
        ))
    }

    /// Micromotion `P(t_j) = U(t_j) e^{+iH̄t_j}` in the lab basis: periodic,
    /// unitary, `P(0) = 1`.
    pub fn micromotion(&self, j: usize) -> CMat {
        self.propagation.sample(j) * &self.basis * self.counter_rotation(j) * self.basis.adjoint()
    }

    /// Propagator sample rotated into the Floquet eigenbasis,
    /// `M_j = V† U(t_j) V`.
    pub(crate) fn rotated_sample(&self, j: usize) -> CMat {
        self.basis.adjoint() * self.propagation.sample(j) * &self.basis
    }
}

/// Diagonalise the monodromy of a propagation.
///
/// The eigenphases `θ_k` of `U(τ)` give quasi-energies `ε̄_k = θ_k/τ` pinned
/// to the principal branch `[0, Ω)`; the reconstruction
/// `‖U(τ) − V e^{−iθ} V†‖` must stay below [`DECOMPOSITION_TOL`], which at
/// the same time bounds the micromotion periodicity defect
/// `‖P(τ) − P(0)‖ = ‖U(τ)e^{+iH̄τ} − 1‖`.
pub fn floquet_decompose(propagation: Propagation) -> Result<FloquetDecomposition, FloquetError> {
    let (phases, basis) = unitary_eigenphases(propagation.monodromy(), PHASE_CLUSTER_TOL);
    let tau = propagation.period();
    let quasi_energies: Vec<f64> = phases.iter().map(|&theta| theta / tau).collect();
    let dim = propagation.dim();
    let reconstructed = &basis
        * CMat::from_diagonal(&CVec::from_iterator(
            dim,
            phases.iter().map(|&theta| (-I * re(theta)).exp()),
        ))
        * basis.adjoint();
    let residual = (propagation.monodromy() - reconstructed).norm();
    if residual > DECOMPOSITION_TOL {
        return Err(FloquetError::DecompositionResidual { residual });
    }
    Ok(FloquetDecomposition {
        propagation,
        quasi_energies,
        basis,
        residual,
    })
}
