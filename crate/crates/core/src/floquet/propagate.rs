//! One-period propagation of a time-periodic Hamiltonian.
//!
//! The propagator is advanced on a uniform grid with the midpoint rule,
//! `U(t + Δt) = exp[−i H(t + Δt/2) Δt] U(t)`, each step built from the
//! hermitian eigendecomposition so that unitarity is exact by construction
//! and the only error is the second-order time-discretisation error of the
//! midpoint evaluation.

use crate::linalg::{phase_evolution, unitarity_defect, CMat};

use super::{FloquetError, PeriodicHamiltonian};

/// Largest tolerated unitarity defect of the accumulated monodromy.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Uniformly sampled propagators over one period.
#[derive(Debug, Clone)]
pub struct Propagation {
    omega: f64,
    samples: Vec<CMat>,
    monodromy: CMat,
}

impl Propagation {
    /// Drive frequency `Ω`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Drive period `τ`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// Number of grid points per period.
    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.monodromy.nrows()
    }

    /// Propagator `U(t_j)` at grid point `t_j = j·τ/N`, for `j < N`.
    pub fn sample(&self, j: usize) -> &CMat {
        &self.samples[j]
    }

    /// All propagator samples `U(t_0), …, U(t_{N−1})`.
    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    /// One-period propagator `U(τ)`.
    pub fn monodromy(&self) -> &CMat {
        &self.monodromy
    }
}

/// Integrate the propagator across one period on `samples` uniform grid
/// points (a power of two, at least 256).
pub fn propagate_period(
    hamiltonian: &PeriodicHamiltonian,
    samples: usize,
) -> Result<Propagation, FloquetError> {
    if samples < 256 || !samples.is_power_of_two() {
        return Err(FloquetError::SampleCount(samples));
    }
    let period = hamiltonian.period();
    let dt = period / samples as f64;
    let dim = hamiltonian.dim();
    let mut grid = Vec::with_capacity(samples);
    let mut u = CMat::identity(dim, dim);
    for j in 0..samples {
        grid.push(u.clone());
        let midpoint = (j as f64 + 0.5) * dt;
        u = phase_evolution(&hamiltonian.at(midpoint), dt) * u;
    }
    let defect = unitarity_defect(&u);
    if defect > UNITARITY_TOL {
        return Err(FloquetError::UnitarityLoss { defect });
    }
    Ok(Propagation {
        omega: hamiltonian.omega(),
        samples: grid,
        monodromy: u,
    })
}
