//! Independent reference implementations used to cross-check the main
//! pipeline.
//!
//! Everything in this module is deliberately written from first principles
//! with elementary algorithms — classical rate equations solved by Gaussian
//! elimination on the normal equations, fixed-step Runge–Kutta integration,
//! the exactly solvable circularly driven two-level system, and a power-series
//! Bessel function — so that agreement with the Floquet machinery is a
//! genuine two-route check rather than a tautology.

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::linalg::{re, CMat, I};

/// Errors from oracle computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("rate matrix must be square, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("rate from state {from} to state {to} is negative: {rate}")]
    NegativeRate { from: usize, to: usize, rate: f64 },
    #[error("rate graph is not strongly connected: state {0} unreachable")]
    Disconnected(usize),
    #[error("fixed point residual {residual} too large; system ill-conditioned")]
    IllConditioned { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A classical Markov jump process on `n` states with transition rates
/// `rates[i][j] ≥ 0` from state `i` to state `j`.
#[derive(Debug, Clone)]
pub struct RateSystem {
    rates: Vec<Vec<f64>>,
}

impl RateSystem {
    /// Build from a square matrix of non-negative off-diagonal rates.
    /// Diagonal entries are ignored.
    pub fn new(rates: Vec<Vec<f64>>) -> Result<Self, OracleError> {
        let n = rates.len();
        for (i, row) in rates.iter().enumerate() {
            if row.len() != n {
                return Err(OracleError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &rate) in row.iter().enumerate() {
                if i != j && !(rate >= 0.0 && rate.is_finite()) {
                    return Err(OracleError::NegativeRate {
                        from: i,
                        to: j,
                        rate,
                    });
                }
            }
        }
        if n == 0 {
            return Err(OracleError::InvalidArgument("empty rate system".into()));
        }
        Ok(RateSystem { rates })
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.rates.len()
    }

    /// True if the system has no states.
    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// The Kolmogorov generator `M` with `dp/dt = M p`:
    /// `M[i][j] = k_{j→i}` for `i ≠ j`, columns summing to zero.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                -(0..n)
                    .filter(|&k| k != j)
                    .map(|k| self.rates[j][k])
                    .sum::<f64>()
            } else {
                self.rates[j][i]
            }
        })
    }

    /// Stationary distribution of an ergodic rate system.
    ///
    /// Requires the directed graph of strictly positive rates to be strongly
    /// connected; solves `M p = 0, Σp = 1` through the normal equations and
    /// verifies the residual.
    pub fn fixed_point(&self) -> Result<Vec<f64>, OracleError> {
        let n = self.len();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        self.check_strongly_connected()?;
        let m = self.generator();
        // Stack M with the normalisation row 1ᵀ: least squares of
        // [M; 1ᵀ] p = [0; 1] via AᵀA p = Aᵀ b.
        let mut ata = DMatrix::<f64>::zeros(n, n);
        let mut atb = DMatrix::<f64>::zeros(n, 1);
        for a in 0..n {
            for b in 0..n {
                let mut acc = 1.0; // contribution of the ones row
                for r in 0..n {
                    acc += m[(r, a)] * m[(r, b)];
                }
                ata[(a, b)] = acc;
            }
            atb[(a, 0)] = 1.0;
        }
        let solution = ata.lu().solve(&atb).ok_or(OracleError::IllConditioned {
            residual: f64::INFINITY,
        })?;
        let p: Vec<f64> = (0..n).map(|i| solution[(i, 0)]).collect();
        let scale = self
            .rates
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &r| acc.max(r))
            .max(1.0);
        let residual = (0..n)
            .map(|r| (0..n).map(|c| m[(r, c)] * p[c]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if residual > 1e-10 * scale {
            return Err(OracleError::IllConditioned { residual });
        }
        Ok(p)
    }

    fn check_strongly_connected(&self) -> Result<(), OracleError> {
        let n = self.len();
        let forward = self.reachable(|i, j| self.rates[i][j] > 0.0);
        if let Some(missing) = (0..n).find(|&s| !forward[s]) {
            return Err(OracleError::Disconnected(missing));
        }
        let backward = self.reachable(|i, j| self.rates[j][i] > 0.0);
        if let Some(missing) = (0..n).find(|&s| !backward[s]) {
            return Err(OracleError::Disconnected(missing));
        }
        Ok(())
    }

    fn reachable(&self, edge: impl Fn(usize, usize) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && edge(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }
}

/// Integrate `dρ/dt = L ρ` (with `ρ` vectorised and `L` acting on the
/// vectorisation) by classical fixed-step fourth-order Runge–Kutta.
///
/// Returns `steps + 1` samples `(t_k, ρ(t_k))` including the initial state.
pub fn integrate_trajectory(
    generator: &CMat,
    rho0: &CMat,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, CMat)>, OracleError> {
    let d = rho0.nrows();
    if rho0.ncols() != d {
        return Err(OracleError::InvalidArgument(
            "initial state must be square".into(),
        ));
    }
    if generator.nrows() != d * d || generator.ncols() != d * d {
        return Err(OracleError::InvalidArgument(format!(
            "generator must be {0}×{0} for a {d}-dimensional state",
            d * d
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) || steps == 0 {
        return Err(OracleError::InvalidArgument(
            "need t_end > 0 and at least one step".into(),
        ));
    }
    let dt = t_end / steps as f64;
    let mut state = crate::linalg::vectorize(rho0);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, rho0.clone()));
    for k in 0..steps {
        let k1 = generator * &state;
        let k2 = generator * &(&state + &k1 * re(0.5 * dt));
        let k3 = generator * &(&state + &k2 * re(0.5 * dt));
        let k4 = generator * &(&state + &k3 * re(dt));
        state += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(dt / 6.0);
        samples.push((
            dt * (k + 1) as f64,
            crate::linalg::unvectorize(&state, d),
        ));
    }
    Ok(samples)
}

/// Closed-form solution of the circularly driven two-level system
/// `H(t) = ω₀ σ_z/2 + g (σ₊ e^{−iΩt} + σ₋ e^{+iΩt})` in the basis
/// `{|e⟩, |g⟩}`.
#[derive(Debug, Clone)]
pub struct RabiOracle {
    omega0: f64,
    omega: f64,
    coupling: f64,
    /// Rotating-frame splitting `√(Δ² + 4g²)`, `Δ = ω₀ − Ω`.
    pub splitting: f64,
    /// One-period propagator `U(τ)`.
    pub monodromy: CMat,
    /// Folded quasi-energies in `[0, Ω)`, ascending.
    pub quasi_energies: [f64; 2],
}

/// Solve the circularly driven two-level problem exactly.
///
/// In the frame rotating at `Ω` the Hamiltonian is the static
/// `Δ σ_z/2 + g σ_x`, so `U(t) = e^{−iΩt σ_z/2} e^{−i H̃ t}` and the folded
/// quasi-energies are `(Ω/2 ± √(Δ²/4 + g²)) mod Ω`.
pub fn closed_form_rabi(omega0: f64, omega: f64, coupling: f64) -> Result<RabiOracle, OracleError> {
    if !(omega > 0.0 && omega.is_finite()) || !omega0.is_finite() || !coupling.is_finite() {
        return Err(OracleError::InvalidArgument(format!(
            "need finite parameters and Ω > 0, got ω₀ = {omega0}, Ω = {omega}, g = {coupling}"
        )));
    }
    let period = std::f64::consts::TAU / omega;
    let detuning = omega0 - omega;
    let lambda = (0.25 * detuning * detuning + coupling * coupling).sqrt();
    let splitting = 2.0 * lambda;
    let monodromy = rabi_propagator(omega0, omega, coupling, period);
    let mut quasi = [
        (0.5 * omega + lambda).rem_euclid(omega),
        (0.5 * omega - lambda).rem_euclid(omega),
    ];
    quasi.sort_by(f64::total_cmp);
    Ok(RabiOracle {
        omega0,
        omega,
        coupling,
        splitting,
        monodromy,
        quasi_energies: quasi,
    })
}

impl RabiOracle {
    /// Exact propagator `U(t)` from the rotating-frame solution.
    pub fn propagator_at(&self, t: f64) -> CMat {
        rabi_propagator(self.omega0, self.omega, self.coupling, t)
    }
}

fn rabi_propagator(omega0: f64, omega: f64, coupling: f64, t: f64) -> CMat {
    let detuning = omega0 - omega;
    let lambda = (0.25 * detuning * detuning + coupling * coupling).sqrt();
    // e^{−i H̃ t} with H̃ = Δσ_z/2 + g σ_x = λ·(n̂·σ̂).
    let (cos_t, sin_t) = ((lambda * t).cos(), (lambda * t).sin());
    let (nz, nx) = if lambda > 0.0 {
        (0.5 * detuning / lambda, coupling / lambda)
    } else {
        (0.0, 0.0)
    };
    let rot = CMat::from_row_slice(
        2,
        2,
        &[
            re(cos_t) - I * re(sin_t * nz),
            -I * re(sin_t * nx),
            -I * re(sin_t * nx),
            re(cos_t) + I * re(sin_t * nz),
        ],
    );
    let half = Complex::from_polar(1.0, -0.5 * omega * t);
    let frame = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![half, half.conj()]));
    frame * rot
}

/// Bessel function of the first kind `J_n(x)` by its power series,
/// adequate for moderate arguments (`|x| ≲ 20`).
pub fn bessel_j(order: i32, x: f64) -> f64 {
    if order < 0 {
        let value = bessel_j(-order, x);
        return if order % 2 == 0 { value } else { -value };
    }
    let n = order as u32;
    let half = 0.5 * x;
    // First term: (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -(half * half) / (k * (k + n as f64));
        let next = sum + term;
        if next == sum || k > 400.0 {
            return next;
        }
        sum = next;
        k += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::linalg::{dissipator_superop, unitarity_defect};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn two_state_fixed_point_obeys_detailed_balance() {
        let system = RateSystem::new(vec![vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        let p = system.fixed_point().unwrap();
        assert_relative_eq!(p[0], 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(p[1], 2.0 / 3.0, max_relative = 1e-12);
        // Generator columns sum to zero.
        let m = system.generator();
        for j in 0..2 {
            assert_abs_diff_eq!(m.column(j).sum(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn three_state_cycle_with_uniform_rates_is_uniform() {
        let system = RateSystem::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let p = system.fixed_point().unwrap();
        for &pi in &p {
            assert_relative_eq!(pi, 1.0 / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        // One-way flow 0 → 1: nothing returns to 0.
        let system = RateSystem::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            system.fixed_point(),
            Err(OracleError::Disconnected(_))
        ));
    }

    #[test]
    fn rate_validation() {
        assert!(matches!(
            RateSystem::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]),
            Err(OracleError::NegativeRate { from: 0, to: 1, .. })
        ));
        assert!(matches!(
            RateSystem::new(vec![vec![0.0, 1.0]]),
            Err(OracleError::NotSquare { .. })
        ));
        assert!(RateSystem::new(vec![]).is_err());
    }

    #[test]
    fn rk4_reproduces_exponential_decay() {
        // Zero-temperature amplitude damping: p_e(t) = p_e(0) e^{−γt},
        // coherences decay at γ/2.
        let gamma = 0.8;
        let lowering = CMat::from_row_slice(2, 2, &[re(0.0), re(0.0), re(1.0), re(0.0)]);
        let generator = dissipator_superop(&lowering) * re(gamma);
        let rho0 = CMat::from_row_slice(
            2,
            2,
            &[re(0.7), re(0.2), re(0.2), re(0.3)],
        );
        let samples = integrate_trajectory(&generator, &rho0, 2.0, 800).unwrap();
        let (t_final, rho_final) = samples.last().unwrap();
        assert_abs_diff_eq!(*t_final, 2.0, epsilon = 1e-12);
        assert_relative_eq!(
            rho_final[(0, 0)].re,
            0.7 * (-gamma * 2.0_f64).exp(),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            rho_final[(0, 1)].re,
            0.2 * (-0.5 * gamma * 2.0_f64).exp(),
            max_relative = 1e-10
        );
        // Trace is preserved by the integrator.
        assert_abs_diff_eq!(rho_final.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rk4_argument_validation() {
        let generator = CMat::zeros(4, 4);
        let rho = CMat::identity(2, 2) * re(0.5);
        assert!(integrate_trajectory(&generator, &rho, 0.0, 10).is_err());
        assert!(integrate_trajectory(&generator, &rho, 1.0, 0).is_err());
        let wrong = CMat::zeros(3, 3);
        assert!(integrate_trajectory(&wrong, &rho, 1.0, 10).is_err());
    }

    #[test]
    fn rabi_oracle_frozen_monodromy() {
        // Frozen for ω₀ = 1, Ω = 1.5, g = 0.25.
        let oracle = closed_form_rabi(1.0, 1.5, 0.25).unwrap();
        assert_relative_eq!(
            oracle.splitting,
            0.707_106_781_186_547_57,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            oracle.quasi_energies[0],
            0.396_446_609_406_726_32,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            oracle.quasi_energies[1],
            1.103_553_390_593_273_7,
            max_relative = 1e-12
        );
        let m = &oracle.monodromy;
        assert!(unitarity_defect(m) < 1e-14);
        let expected_diag = C64::new(-0.089_714_561_782_198_43, -0.704_255_385_994_394_7);
        let expected_off = C64::new(0.0, 0.704_255_385_994_394_7);
        assert!((m[(0, 0)] - expected_diag).norm() < 1e-12);
        assert!((m[(1, 1)] - expected_diag.conj()).norm() < 1e-12);
        assert!((m[(0, 1)] - expected_off).norm() < 1e-12);
        assert!((m[(1, 0)] - expected_off).norm() < 1e-12);
    }

    #[test]
    fn rabi_oracle_on_resonance_splitting_is_twice_coupling() {
        let oracle = closed_form_rabi(2.0, 2.0, 0.3).unwrap();
        assert_relative_eq!(oracle.splitting, 0.6, max_relative = 1e-14);
        let gap = oracle.quasi_energies[1] - oracle.quasi_energies[0];
        assert_relative_eq!(gap.min(2.0 - gap), 0.6, max_relative = 1e-12);
    }

    #[test]
    fn rabi_propagator_solves_schroedinger_equation() {
        let oracle = closed_form_rabi(1.0, 3.0, 0.2).unwrap();
        // dU/dt = −i H(t) U, checked by central difference.
        let (t, h) = (0.37, 1e-6);
        let du = (oracle.propagator_at(t + h) - oracle.propagator_at(t - h)) * re(0.5 / h);
        let hamiltonian = CMat::from_row_slice(
            2,
            2,
            &[
                re(0.5),
                re(0.2) * Complex::from_polar(1.0, -3.0 * t),
                re(0.2) * Complex::from_polar(1.0, 3.0 * t),
                re(-0.5),
            ],
        );
        let expected = hamiltonian * oracle.propagator_at(t) * (-I);
        assert!((du - expected).norm() < 1e-8);
        // And U(0) = 1.
        assert!((oracle.propagator_at(0.0) - CMat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn bessel_frozen_values_and_identities() {
        assert_relative_eq!(bessel_j(0, 1.0), 0.765_197_686_557_966_61, max_relative = 1e-14);
        assert_relative_eq!(bessel_j(1, 1.0), 0.440_050_585_744_933_55, max_relative = 1e-14);
        assert_relative_eq!(
            bessel_j(5, 1.0),
            2.497_577_302_112_343_3e-4,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bessel_j(7, 1.0),
            1.502_325_817_436_808_1e-6,
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(bessel_j(0, 0.0), 1.0);
        assert_abs_diff_eq!(bessel_j(3, 0.0), 0.0);
        // Parity: J_{−n} = (−1)^n J_n.
        assert_abs_diff_eq!(bessel_j(-3, 1.7), -bessel_j(3, 1.7), epsilon = 1e-15);
        assert_abs_diff_eq!(bessel_j(-2, 1.7), bessel_j(2, 1.7), epsilon = 1e-15);
        // Recurrence J_{n−1}(x) + J_{n+1}(x) = (2n/x) J_n(x).
        let x = 2.3;
        for n in 1..6 {
            assert_relative_eq!(
                bessel_j(n - 1, x) + bessel_j(n + 1, x),
                2.0 * n as f64 / x * bessel_j(n, x),
                max_relative = 1e-12
            );
        }
    }
}
